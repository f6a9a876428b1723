//! `opsat`: exact satisfiability and operator-assignment toolkit.
//!
//! Exit codes: 0 success / satisfiable / valid; 1 unsatisfiable / invalid
//! witness / no gap; 2 input error; 3 resource cap exceeded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use opsat::classify::{gap_verdict, minimal_clone_analysis, BooleanOperation, GapVerdict};
use opsat::closure::apply_closure_assignments;
use opsat::contextuality::{
    parse_hypergraph, parse_projectors, serialize_hypergraph, serialize_projectors,
    threesat_to_scenario, two_allows_decide, verify_quantum_model, TwoAllowsResult,
};
use opsat::error::{Error, Result};
use opsat::fourier::{indicator_poly, serialize_poly};
use opsat::gadget::{build_j, build_j_hat, lift, parse_definitions, serialize_reduction};
use opsat::gallery::{
    first_kind_certificate, mermin_instance, mermin_witness, serialize_certificate,
};
use opsat::matrix::{
    operator_value, parse_assignment, serialize_assignment, validate_assignment, Matrix,
    OperatorAssignment,
};
use opsat::model::{boolean_value, parse_instance, parse_language, serialize_instance, Instance};
use opsat::report::render;
use opsat::scalar::{rat, rational_to_string};
use opsat::solve::{
    instance_to_clauses, instance_to_parity, parity_witness_to_assignment, solve_2sat, solve_brute,
    solve_dual_horn, solve_gf2, solve_horn, ClauseShape, Conversion, Gf2Result, HornResult,
    Literal, TwoSatResult,
};

#[derive(Parser)]
#[command(
    name = "opsat",
    version,
    about = "Exact generalized satisfiability via operator assignments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a constraint language: Schaefer flags, gap verdict, clones.
    Classify {
        /// Language file (map of named relations).
        #[arg(long)]
        language: PathBuf,
    },
    /// Decide an instance with the chosen method.
    Solve {
        /// Instance file.
        #[arg(long)]
        instance: PathBuf,
        /// Decision procedure.
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Validate an operator assignment and compute its value on an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// Operator assignment file.
        #[arg(long)]
        operators: PathBuf,
    },
    /// Print the indicator polynomial of a named relation.
    Transform {
        /// Relation name inside the language file.
        #[arg(long)]
        relation: String,
        #[arg(long)]
        language: PathBuf,
    },
    /// Rewrite an instance through pp-definitions (gadget reduction).
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        /// Definitions file (source language plus formulas).
        #[arg(long)]
        defs: PathBuf,
        /// Also add the pairwise full-relation constraints per block.
        #[arg(long)]
        extended: bool,
    },
    /// Lift a satisfying operator assignment through a gadget reduction.
    Lift {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        defs: PathBuf,
        /// Satisfying operator assignment of the source instance.
        #[arg(long)]
        operators: PathBuf,
        /// Lift through the extended construction.
        #[arg(long)]
        extended: bool,
    },
    /// Apply a Kronecker closure operation to operator assignments.
    Closure {
        /// Built-in operation name (xor3, maj3, and2, or2, not1,
        /// const_false, const_true) or a JSON file with `arity` and `table`.
        #[arg(long)]
        op: String,
        /// One operator-assignment file per operation argument.
        #[arg(long, num_args = 1.., required = true)]
        assignments: Vec<PathBuf>,
    },
    /// Contextuality scenarios.
    Scenario(ScenarioArgs),
    /// Canonical magic-square objects.
    Mermin {
        /// Which document to emit.
        #[arg(long, value_enum)]
        emit: MerminEmit,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioArgs {
    /// Reduce a clause instance to a scenario (prints the hypergraph).
    #[arg(long, value_name = "INSTANCE")]
    from_3sat: Option<PathBuf>,
    /// Decide realizability of a size-<=2 scenario.
    #[arg(long, value_name = "HYPERGRAPH")]
    decide_2: Option<PathBuf>,
    /// Verify a projector assignment against a scenario (two files).
    #[arg(long, value_names = ["HYPERGRAPH", "PROJECTORS"], num_args = 2)]
    verify: Option<Vec<PathBuf>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    #[value(name = "2sat")]
    TwoSat,
    Horn,
    Dualhorn,
    Gf2,
}

#[derive(Clone, Copy, ValueEnum)]
enum MerminEmit {
    Instance,
    Witness,
    Report,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("canonical serializers emit valid JSON")
}

fn literal_json(l: &Literal) -> serde_json::Value {
    serde_json::json!({ "var": l.var, "sign": l.sign })
}

fn witness_json(a: &opsat::model::BooleanAssignment) -> serde_json::Value {
    let map: BTreeMap<String, i8> = a.iter().map(|(v, &s)| (v.clone(), s)).collect();
    serde_json::json!(map)
}

/// Outcome of a command: exit code and what to print.
struct Outcome {
    code: u8,
    stdout: String,
}

fn ok(stdout: String) -> Result<Outcome> {
    Ok(Outcome { code: 0, stdout })
}

fn with_code(code: u8, stdout: String) -> Result<Outcome> {
    Ok(Outcome { code, stdout })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Classify { language } => {
            let lang = parse_language(&read(&language)?)?;
            let verdict = gap_verdict(&lang);
            let clones = minimal_clone_analysis(&lang);
            let verdict_name = match &verdict {
                GapVerdict::NoGap { .. } => "NoGap",
                GapVerdict::GapsOfAllKinds { .. } => "GapsOfAllKinds",
            };
            let notes = match &verdict {
                GapVerdict::NoGap { .. } => Vec::new(),
                GapVerdict::GapsOfAllKinds { notes, .. } => notes.clone(),
            };
            ok(render(
                "classify",
                verdict_name,
                serde_json::json!({
                    "flags": verdict.flags(),
                    "notes": notes,
                    "minimal_clones": clones.clones,
                    "clone_summary": clones.summary,
                }),
            ))
        }

        Command::Solve { instance, method } => {
            let inst = parse_instance(&read(&instance)?)?;
            solve_command(&inst, method)
        }

        Command::Verify {
            instance,
            operators,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let f = parse_assignment(&read(&operators)?)?;
            let report = validate_assignment(&f, &inst);
            if !report.is_valid() {
                return with_code(
                    1,
                    render(
                        "verify",
                        "invalid",
                        serde_json::json!({ "violations": report.violations }),
                    ),
                );
            }
            let value = operator_value(&f, &inst)?;
            let satisfied = value == rat(1);
            with_code(
                if satisfied { 0 } else { 1 },
                render(
                    "verify",
                    if satisfied {
                        "satisfying"
                    } else {
                        "not-satisfying"
                    },
                    serde_json::json!({
                        "value": rational_to_string(&value),
                        "dimension": f.dim(),
                    }),
                ),
            )
        }

        Command::Transform { relation, language } => {
            let lang = parse_language(&read(&language)?)?;
            let rel = lang.get(&relation).ok_or_else(|| Error::UnknownRelation {
                constraint: 0,
                relation: relation.clone(),
            })?;
            ok(serialize_poly(&indicator_poly(rel)))
        }

        Command::Reduce {
            instance,
            defs,
            extended,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let defs = parse_definitions(inst.language(), &read(&defs)?)?;
            let out = if extended {
                build_j_hat(&inst, &defs)?
            } else {
                build_j(&inst, &defs)?
            };
            ok(serialize_reduction(&out))
        }

        Command::Lift {
            instance,
            defs,
            operators,
            extended,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let defs = parse_definitions(inst.language(), &read(&defs)?)?;
            let f = parse_assignment(&read(&operators)?)?;
            let out = if extended {
                build_j_hat(&inst, &defs)?
            } else {
                build_j(&inst, &defs)?
            };
            match lift(&f, &inst, &defs, &out) {
                Ok(g) => ok(serialize_assignment(&g)),
                Err(e @ Error::InvalidAssignment(_)) => with_code(
                    1,
                    render(
                        "lift",
                        "invalid-witness",
                        serde_json::json!({ "message": e.to_string() }),
                    ),
                ),
                Err(e) => Err(e),
            }
        }

        Command::Closure { op, assignments } => {
            let operation = parse_operation(&op)?;
            let mut parsed: Vec<OperatorAssignment> = Vec::with_capacity(assignments.len());
            for path in &assignments {
                parsed.push(parse_assignment(&read(path)?)?);
            }
            let Some(first) = parsed.first() else {
                return Err(Error::InvalidInput("no assignments given".into()));
            };
            let vars: Vec<String> = first.vars().cloned().collect();
            for (i, a) in parsed.iter().enumerate() {
                let these: Vec<String> = a.vars().cloned().collect();
                if these != vars {
                    return Err(Error::InvalidInput(format!(
                        "assignment {i} has different variables from the first"
                    )));
                }
            }
            let tuples: Vec<Vec<Matrix>> = parsed
                .iter()
                .map(|a| vars.iter().map(|v| a.get(v).unwrap().clone()).collect())
                .collect();
            let out = apply_closure_assignments(&operation, &tuples, None)?;
            let dim = out.first().map_or(1, Matrix::dim);
            let result =
                OperatorAssignment::from_pairs(dim, vars.iter().cloned().zip(out.iter().cloned()))?;
            ok(serialize_assignment(&result))
        }

        Command::Scenario(args) => scenario_command(args),

        Command::Mermin { emit } => {
            let inst = mermin_instance();
            let witness = mermin_witness();
            match emit {
                MerminEmit::Instance => ok(serialize_instance(&inst)),
                MerminEmit::Witness => ok(serialize_assignment(&witness)),
                MerminEmit::Report => {
                    let cert = first_kind_certificate(&inst, &witness)?;
                    ok(serialize_certificate(&cert))
                }
            }
        }
    }
}

fn solve_command(inst: &Instance, method: Method) -> Result<Outcome> {
    match method {
        Method::Brute => {
            let (value, witness) = solve_brute(inst)?;
            let sat = value == rat(1);
            with_code(
                if sat { 0 } else { 1 },
                render(
                    "solve",
                    if sat { "sat" } else { "unsat" },
                    serde_json::json!({
                        "method": "brute",
                        "value": rational_to_string(&value),
                        "witness": witness_json(&witness),
                    }),
                ),
            )
        }
        Method::TwoSat | Method::Horn | Method::Dualhorn => {
            let (shape, name) = match method {
                Method::TwoSat => (ClauseShape::TwoSat, "2sat"),
                Method::Horn => (ClauseShape::Horn, "horn"),
                _ => (ClauseShape::DualHorn, "dualhorn"),
            };
            let clauses = match instance_to_clauses(inst, shape)? {
                Conversion::Converted(c) => c,
                Conversion::ConstraintUnsatisfiable { constraint } => {
                    return with_code(
                        1,
                        render(
                            "solve",
                            "unsat",
                            serde_json::json!({
                                "method": name,
                                "certificate": {
                                    "kind": "constraint-unsatisfiable",
                                    "constraint": constraint,
                                },
                            }),
                        ),
                    );
                }
            };
            match method {
                Method::TwoSat => match solve_2sat(&clauses)? {
                    TwoSatResult::Sat(a) => sat_outcome(inst, name, &a),
                    TwoSatResult::Unsat(cert) => with_code(
                        1,
                        render(
                            "solve",
                            "unsat",
                            serde_json::json!({
                                "method": name,
                                "certificate": {
                                    "kind": "implication-paths",
                                    "variable": cert.variable,
                                    "path_to_negation": cert
                                        .path_to_negation
                                        .iter()
                                        .map(literal_json)
                                        .collect::<Vec<_>>(),
                                    "path_back": cert
                                        .path_back
                                        .iter()
                                        .map(literal_json)
                                        .collect::<Vec<_>>(),
                                },
                            }),
                        ),
                    ),
                },
                _ => {
                    let result = if matches!(method, Method::Horn) {
                        solve_horn(&clauses)?
                    } else {
                        solve_dual_horn(&clauses)?
                    };
                    match result {
                        HornResult::Sat(a) => sat_outcome(inst, name, &a),
                        HornResult::Unsat(deriv) => {
                            let steps: Vec<serde_json::Value> = deriv
                                .steps
                                .iter()
                                .map(|s| match s {
                                    opsat::solve::DerivationStep::Input { clause } => {
                                        serde_json::json!({ "input": clause })
                                    }
                                    opsat::solve::DerivationStep::Resolve {
                                        premise,
                                        unit,
                                        resolvent,
                                    } => serde_json::json!({
                                        "premise": premise,
                                        "unit": unit,
                                        "resolvent": resolvent
                                            .iter()
                                            .map(literal_json)
                                            .collect::<Vec<_>>(),
                                    }),
                                })
                                .collect();
                            with_code(
                                1,
                                render(
                                    "solve",
                                    "unsat",
                                    serde_json::json!({
                                        "method": name,
                                        "certificate": {
                                            "kind": "unit-resolution",
                                            "steps": steps,
                                        },
                                    }),
                                ),
                            )
                        }
                    }
                }
            }
        }
        Method::Gf2 => {
            let sys = match instance_to_parity(inst)? {
                Conversion::Converted(s) => s,
                Conversion::ConstraintUnsatisfiable { constraint } => {
                    return with_code(
                        1,
                        render(
                            "solve",
                            "unsat",
                            serde_json::json!({
                                "method": "gf2",
                                "certificate": {
                                    "kind": "constraint-unsatisfiable",
                                    "constraint": constraint,
                                },
                            }),
                        ),
                    );
                }
            };
            match solve_gf2(&sys) {
                Gf2Result::Sat(w) => {
                    let a = parity_witness_to_assignment(inst, &w);
                    sat_outcome(inst, "gf2", &a)
                }
                Gf2Result::Unsat(cert) => with_code(
                    1,
                    render(
                        "solve",
                        "unsat",
                        serde_json::json!({
                            "method": "gf2",
                            "certificate": {
                                "kind": "inconsistent-combination",
                                "rows": cert.rows,
                            },
                        }),
                    ),
                ),
            }
        }
    }
}

fn sat_outcome(
    inst: &Instance,
    method: &str,
    a: &opsat::model::BooleanAssignment,
) -> Result<Outcome> {
    let a = &opsat::solve::complete_assignment(inst, a);
    let value = boolean_value(inst, a)?;
    debug_assert_eq!(value, rat(1));
    with_code(
        0,
        render(
            "solve",
            "sat",
            serde_json::json!({
                "method": method,
                "value": rational_to_string(&value),
                "witness": witness_json(a),
            }),
        ),
    )
}

fn scenario_command(args: ScenarioArgs) -> Result<Outcome> {
    if let Some(path) = args.from_3sat {
        let inst = parse_instance(&read(&path)?)?;
        let out = threesat_to_scenario(&inst)?;
        return ok(serialize_hypergraph(&out.hypergraph));
    }
    if let Some(path) = args.decide_2 {
        let h = parse_hypergraph(&read(&path)?)?;
        return match two_allows_decide(&h)? {
            TwoAllowsResult::Realizable(model) => with_code(
                0,
                render(
                    "scenario",
                    "realizable",
                    serde_json::json!({
                        "model": json(&serialize_projectors(&model)),
                    }),
                ),
            ),
            TwoAllowsResult::NotRealizable(cert) => with_code(
                1,
                render(
                    "scenario",
                    "not-realizable",
                    serde_json::json!({
                        "certificate": {
                            "kind": "implication-paths",
                            "variable": cert.variable,
                            "path_to_negation": cert
                                .path_to_negation
                                .iter()
                                .map(literal_json)
                                .collect::<Vec<_>>(),
                            "path_back": cert
                                .path_back
                                .iter()
                                .map(literal_json)
                                .collect::<Vec<_>>(),
                        },
                    }),
                ),
            ),
        };
    }
    if let Some(paths) = args.verify {
        let h = parse_hypergraph(&read(&paths[0])?)?;
        let p = parse_projectors(&read(&paths[1])?)?;
        let report = verify_quantum_model(&h, &p);
        let valid = report.is_valid();
        return with_code(
            if valid { 0 } else { 1 },
            render(
                "scenario",
                if valid {
                    "valid-model"
                } else {
                    "invalid-model"
                },
                serde_json::json!({ "violations": report.violations }),
            ),
        );
    }
    Err(Error::InvalidInput(
        "scenario needs one of --from-3sat, --decide-2, --verify".into(),
    ))
}

fn parse_operation(arg: &str) -> Result<BooleanOperation> {
    match arg {
        "xor3" => return Ok(BooleanOperation::xor3()),
        "maj3" => return Ok(BooleanOperation::maj3()),
        "and2" => return Ok(BooleanOperation::and2()),
        "or2" => return Ok(BooleanOperation::or2()),
        "not1" => return Ok(BooleanOperation::not1()),
        "const_false" => return Ok(BooleanOperation::const_false()),
        "const_true" => return Ok(BooleanOperation::const_true()),
        _ => {}
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Error::InvalidInput(format!(
            "`{arg}` is neither a built-in operation nor a readable file"
        )));
    }
    let doc: serde_json::Value = serde_json::from_str(&read(path)?)?;
    let arity = doc
        .get("arity")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("operation file needs an `arity` field".into()))?
        as usize;
    let table: Vec<i8> = doc
        .get("table")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| Error::InvalidInput("operation file needs a `table` array".into()))?
        .iter()
        .map(|v| {
            v.as_i64()
                .map(|n| n as i8)
                .ok_or_else(|| Error::InvalidInput("table entries must be +1 or -1".into()))
        })
        .collect::<Result<_>>()?;
    let name = doc
        .get("name")
        .and_then(serde_json::Value::as_str)
        .unwrap_or("custom")
        .to_string();
    BooleanOperation::new(name, arity, table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_name = std::env::args().nth(1).unwrap_or_default();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            print!("{}", opsat::report::render_error(&command_name, &e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

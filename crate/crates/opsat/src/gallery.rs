//! Canned objects: Pauli matrices, the magic-square parity system with its
//! dimension-4 witness, padding of full-relation constraints into ternary
//! languages, and first-kind gap certificates.
//!
//! The magic square is the canonical satisfiability gap of the first kind:
//! six parity equations on nine variables (three rows with right-hand side
//! `+1`, three columns with right-hand sides `+1, +1, -1`) that admit no
//! Boolean solution, while the Pauli-tensor assignment below satisfies all
//! six equations with commuting Hermitian involutions on dimension 4. The
//! witness matrices are committed as fixed data and re-verified by tests
//! rather than recomputed from anything.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{operator_value, validate_assignment, Matrix, OperatorAssignment};
use crate::model::{relations, Constraint, ConstraintLanguage, Instance, ScopeEntry};
use crate::scalar::{rat, rational_to_string, GaussianRational, Rational};
use crate::solve::solve_brute;

/// Pauli X.
pub fn pauli_x() -> Matrix {
    Matrix::from_ints(2, &[0, 1, 1, 0]).expect("2x2")
}

/// Pauli Y; the only gallery matrix with imaginary entries.
pub fn pauli_y() -> Matrix {
    let zero = GaussianRational::zero();
    let i = GaussianRational::i();
    Matrix::new(2, vec![zero.clone(), -i.clone(), i, zero]).expect("2x2")
}

/// Pauli Z.
pub fn pauli_z() -> Matrix {
    Matrix::from_ints(2, &[1, 0, 0, -1]).expect("2x2")
}

/// The magic-square instance: nine variables `X11..X33`, six parity
/// constraints (rows then columns), with the last column odd.
pub fn mermin_instance() -> Instance {
    let lang = ConstraintLanguage::from_pairs([
        ("even3".to_string(), relations::even(3)),
        ("odd3".to_string(), relations::odd(3)),
    ])
    .expect("fixed names");
    let name = |r: usize, c: usize| format!("X{r}{c}");
    let variables: Vec<String> = (1..=3)
        .flat_map(|r| (1..=3).map(move |c| name(r, c)))
        .collect();
    let mut constraints = Vec::with_capacity(6);
    for r in 1..=3 {
        constraints.push(Constraint {
            relation: "even3".into(),
            scope: (1..=3).map(|c| ScopeEntry::Var(name(r, c))).collect(),
        });
    }
    for c in 1..=3 {
        constraints.push(Constraint {
            relation: if c == 3 { "odd3" } else { "even3" }.into(),
            scope: (1..=3).map(|r| ScopeEntry::Var(name(r, c))).collect(),
        });
    }
    Instance::new(lang, variables, constraints).expect("fixed instance")
}

/// The dimension-4 Pauli-tensor witness for [`mermin_instance`].
///
/// Row by row: `Z(x)I, I(x)Z, Z(x)Z; I(x)X, X(x)I, X(x)X; Z(x)X, X(x)Z,
/// Y(x)Y`. Every matrix is a Hermitian involution, the three operators of
/// every row and column commute, row products are `I`, and column products
/// are `I, I, -I`.
pub fn mermin_witness() -> OperatorAssignment {
    let i2 = Matrix::identity(2).expect("2x2");
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    OperatorAssignment::from_pairs(
        4,
        [
            ("X11".to_string(), z.kron(&i2)),
            ("X12".to_string(), i2.kron(&z)),
            ("X13".to_string(), z.kron(&z)),
            ("X21".to_string(), i2.kron(&x)),
            ("X22".to_string(), x.kron(&i2)),
            ("X23".to_string(), x.kron(&x)),
            ("X31".to_string(), z.kron(&x)),
            ("X32".to_string(), x.kron(&z)),
            ("X33".to_string(), y.kron(&y)),
        ],
    )
    .expect("fixed dimensions")
}

/// Mode for replacing full-relation constraints by ternary ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadMode {
    /// Replace `((Z1, Z2), T)` by the parity equation `Z1 Z2 Y = -1`.
    ThreeLin,
    /// Replace `((Z1, Z2), T)` by the clause `Z1 v Z2 v Y`.
    ThreeSat,
}

fn pad_fresh_name(index: usize) -> String {
    format!("T{index}__Y")
}

/// Replace every binary full-relation constraint by one ternary constraint
/// on a fresh variable, leaving all other constraints untouched.
///
/// In `ThreeLin` mode every non-full relation must be a ternary parity
/// relation; in `ThreeSat` mode, a clause relation of arity at most 3.
/// Operator satisfiability is preserved in both directions at any fixed
/// dimension: forward via [`pad_witness`], backward by restriction.
pub fn pad_t_constraints(inst: &Instance, mode: PadMode) -> Result<Instance> {
    let t2 = relations::t2();
    for v in inst.variables() {
        if v.starts_with('T') && v.contains("__") {
            return Err(Error::InvalidInput(format!(
                "variable `{v}` collides with the reserved fresh-name scheme T<index>__Y"
            )));
        }
    }
    let replacement_name = match mode {
        PadMode::ThreeLin => "odd3",
        PadMode::ThreeSat => "or3",
    };
    let replacement_rel = match mode {
        PadMode::ThreeLin => relations::odd(3),
        PadMode::ThreeSat => relations::clause(&[1, 1, 1]),
    };
    // Validate the residual language.
    for (name, rel) in inst.language().iter() {
        if *rel == t2 {
            continue;
        }
        let ok = match mode {
            PadMode::ThreeLin => *rel == relations::even(3) || *rel == relations::odd(3),
            PadMode::ThreeSat => {
                rel.arity() <= 3
                    && (0..(1usize << rel.arity()))
                        .map(|i| crate::model::tuple_from_index(i, rel.arity()))
                        .any(|signs| relations::clause(&signs) == *rel)
            }
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "relation `{name}` does not belong to the {mode:?} language"
            )));
        }
    }

    let mut language = ConstraintLanguage::new();
    for (name, rel) in inst.language().iter() {
        if *rel != t2 {
            language.insert(name.clone(), rel.clone())?;
        }
    }
    if language.get(replacement_name).is_none() {
        language.insert(replacement_name.to_string(), replacement_rel)?;
    }

    let mut variables = inst.variables().to_vec();
    let mut constraints = Vec::with_capacity(inst.constraints().len());
    for (i, c) in inst.constraints().iter().enumerate() {
        if *inst.relation_of(i) == t2 {
            let fresh = pad_fresh_name(i);
            variables.push(fresh.clone());
            let mut scope = c.scope.clone();
            scope.push(ScopeEntry::Var(fresh));
            constraints.push(Constraint {
                relation: replacement_name.to_string(),
                scope,
            });
        } else {
            constraints.push(c.clone());
        }
    }
    Instance::new(language, variables, constraints)
}

/// Extend a satisfying operator assignment of `inst` to the padded instance:
/// the fresh variable of a replaced constraint `((Z1, Z2), T)` receives
/// `-f(Z2) f(Z1)` in `ThreeLin` mode (so the product equation holds) and
/// `-I` in `ThreeSat` mode (which annihilates the clause polynomial's
/// product term). The extension is verified before being returned.
pub fn pad_witness(
    f: &OperatorAssignment,
    inst: &Instance,
    mode: PadMode,
    padded: &Instance,
) -> Result<OperatorAssignment> {
    if operator_value(f, inst)? != rat(1) {
        return Err(Error::InvalidAssignment(
            "padding transport needs a satisfying assignment".into(),
        ));
    }
    let t2 = relations::t2();
    let mut g = f.restrict(inst.variables())?;
    for (i, c) in inst.constraints().iter().enumerate() {
        if *inst.relation_of(i) != t2 {
            continue;
        }
        let z1 = g.eval_entry(&c.scope[0])?;
        let z2 = g.eval_entry(&c.scope[1])?;
        let value = match mode {
            PadMode::ThreeLin => z2.mul(&z1)?.neg(),
            PadMode::ThreeSat => Matrix::identity(f.dim())?.neg(),
        };
        g.insert(pad_fresh_name(i), value)?;
    }
    if operator_value(&g, padded)? != rat(1) {
        return Err(Error::BrokenPrecondition(
            "padded witness fails to satisfy the padded instance".into(),
        ));
    }
    Ok(g)
}

/// A fully re-verified first-kind gap certificate: the instance is not
/// Boolean satisfiable, yet the committed witness satisfies it exactly.
#[derive(Clone, Debug)]
pub struct GapCertificate {
    pub instance: Instance,
    pub boolean_max: Rational,
    pub witness: OperatorAssignment,
    pub witness_dim: usize,
    pub kind: GapKind,
}

/// Kinds of certificate this artifact can assemble. Only the first kind is
/// constructible here: the third kind needs a system with no
/// finite-dimensional solution at all, which cannot be witnessed by any
/// finite object this crate manipulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    First,
}

/// Assemble and fully verify a first-kind certificate: brute-force the
/// Boolean maximum (must be below 1), validate the witness, and check its
/// operator value is exactly 1.
pub fn first_kind_certificate(
    inst: &Instance,
    witness: &OperatorAssignment,
) -> Result<GapCertificate> {
    let (boolean_max, _) = solve_brute(inst)?;
    if boolean_max == rat(1) {
        return Err(Error::InvalidInput(
            "instance is Boolean satisfiable; there is no gap to certify".into(),
        ));
    }
    let report = validate_assignment(witness, inst);
    if !report.is_valid() {
        return Err(Error::InvalidAssignment(format!(
            "witness fails validation: {:?}",
            report.violations[0]
        )));
    }
    let value = operator_value(witness, inst)?;
    if value != rat(1) {
        return Err(Error::InvalidAssignment(format!(
            "witness has operator value {}, not 1",
            rational_to_string(&value)
        )));
    }
    Ok(GapCertificate {
        instance: inst.clone(),
        boolean_max,
        witness: witness.clone(),
        witness_dim: witness.dim(),
        kind: GapKind::First,
    })
}

/// Serialize a certificate (instance and witness embedded as their canonical
/// documents, the maximum as an exact fraction string).
pub fn serialize_certificate(cert: &GapCertificate) -> String {
    let instance: serde_json::Value =
        serde_json::from_str(&crate::model::serialize_instance(&cert.instance))
            .expect("round trip");
    let witness: serde_json::Value =
        serde_json::from_str(&crate::matrix::serialize_assignment(&cert.witness))
            .expect("round trip");
    let doc = serde_json::json!({
        "kind": cert.kind,
        "boolean_max": rational_to_string(&cert.boolean_max),
        "witness_dim": cert.witness_dim,
        "instance": instance,
        "witness": witness,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

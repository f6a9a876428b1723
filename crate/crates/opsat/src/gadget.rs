//! Gadget reductions through pp-definitions, with constructive lifting and
//! projection of operator solutions.
//!
//! Given an instance over a language `A` and, for every relation of `A`, a
//! pp-formula defining it over a language `B`, [`build_j`] rewrites each
//! constraint into the formula's atoms, introducing fresh variables for the
//! quantified ones. The variables touched by one source constraint form its
//! *block*; blocks of different constraints only share source variables.
//! [`build_j_hat`] additionally places a full-relation constraint on every
//! pair of distinct variables inside each block, which forces commutation and
//! makes the plain restriction work in the reverse direction.
//!
//! [`lift`] turns a satisfying operator assignment of the source instance
//! into one of the rewritten instance over the same space: per block, the
//! scope operators are simultaneously diagonalized, each joint eigenvalue
//! tuple is a tuple of the source relation, and the lexicographically
//! smallest Boolean witness for the formula at that tuple supplies the
//! eigenvalues of the fresh operators. [`project`] is the reverse direction
//! for the extended construction: restriction to the source variables.
//!
//! Every definition set re-verifies `pp_defines(formula) == relation` at
//! construction; an unverified definition is a hard error, never a warning.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{pp_defines, Atom, PpFormula};
use crate::error::{Error, Result};
use crate::matrix::{operator_value, Matrix, OperatorAssignment};
use crate::model::{
    relations, BooleanRelation, Constraint, ConstraintLanguage, Instance, ScopeEntry, Sign,
};
use crate::scalar::rat;
use crate::spectral::{inverse_conjugate_signs, joint_eigen};

/// Name used for the full binary relation in extended reductions.
pub const T_NAME: &str = "T";

/// A verified set of pp-definitions of a target language over a source
/// language.
#[derive(Clone, Debug)]
pub struct PpDefinitionSet {
    target: ConstraintLanguage,
    source: ConstraintLanguage,
    defs: BTreeMap<String, PpFormula>,
}

impl PpDefinitionSet {
    /// Build and verify: every supplied formula must define exactly the
    /// target relation it is keyed by.
    pub fn new(
        target: ConstraintLanguage,
        source: ConstraintLanguage,
        defs: BTreeMap<String, PpFormula>,
    ) -> Result<Self> {
        for (name, formula) in &defs {
            let rel = target.get(name).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "definition given for `{name}`, which the target language lacks"
                ))
            })?;
            if formula.free.len() != rel.arity() {
                return Err(Error::DefinitionMismatch {
                    relation: name.clone(),
                });
            }
            if pp_defines(formula, &source)? != *rel {
                return Err(Error::DefinitionMismatch {
                    relation: name.clone(),
                });
            }
        }
        Ok(PpDefinitionSet {
            target,
            source,
            defs,
        })
    }

    pub fn target(&self) -> &ConstraintLanguage {
        &self.target
    }

    pub fn source(&self) -> &ConstraintLanguage {
        &self.source
    }

    pub fn formula(&self, relation: &str) -> Option<&PpFormula> {
        self.defs.get(relation)
    }

    /// Identity definitions of a language from itself.
    pub fn identity(lang: &ConstraintLanguage) -> Result<Self> {
        let defs = lang
            .iter()
            .map(|(name, rel)| (name.clone(), PpFormula::identity(name, rel.arity())))
            .collect();
        PpDefinitionSet::new(lang.clone(), lang.clone(), defs)
    }
}

/// A block: the variables a source constraint touches in the rewritten
/// instance (distinct scope variables first, then the fresh ones).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub constraint: usize,
    pub variables: Vec<String>,
}

/// A rewritten instance with its block bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: Instance,
    pub blocks: Vec<Block>,
    pub extended: bool,
}

/// Fresh name for bound variable `bound` of source constraint `index`.
fn fresh_name(index: usize, bound: &str) -> String {
    format!("B{index}__{bound}")
}

fn looks_reserved(name: &str) -> bool {
    let Some(rest) = name.strip_prefix('B') else {
        return false;
    };
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    !digits.is_empty() && rest[digits.len()..].starts_with("__")
}

fn check_source_names(inst: &Instance) -> Result<()> {
    for v in inst.variables() {
        if looks_reserved(v) {
            return Err(Error::InvalidInput(format!(
                "variable `{v}` collides with the reserved fresh-name scheme B<index>__<name>"
            )));
        }
    }
    Ok(())
}

struct BuildState {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
    blocks: Vec<Block>,
}

fn build_core(inst: &Instance, defs: &PpDefinitionSet) -> Result<BuildState> {
    check_source_names(inst)?;
    let mut variables: Vec<String> = inst.variables().to_vec();
    let mut constraints: Vec<Constraint> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    for (i, c) in inst.constraints().iter().enumerate() {
        let rel = inst.relation_of(i);
        let formula = defs.formula(&c.relation).ok_or_else(|| {
            Error::InvalidInput(format!("no definition for relation `{}`", c.relation))
        })?;
        let target_rel = defs.target.get(&c.relation).expect("verified at load");
        if target_rel != rel {
            return Err(Error::DefinitionMismatch {
                relation: c.relation.clone(),
            });
        }
        // Position of each free variable in the formula.
        let free_index: BTreeMap<&str, usize> = formula
            .free
            .iter()
            .enumerate()
            .map(|(k, v)| (v.as_str(), k))
            .collect();
        let mut block_vars: Vec<String> = Vec::new();
        for e in &c.scope {
            if let ScopeEntry::Var(v) = e {
                if !block_vars.contains(v) {
                    block_vars.push(v.clone());
                }
            }
        }
        for bound in &formula.bound {
            let fresh = fresh_name(i, bound);
            variables.push(fresh.clone());
            block_vars.push(fresh);
        }
        for atom in &formula.atoms {
            let scope: Vec<ScopeEntry> = atom
                .scope
                .iter()
                .map(|e| match e {
                    ScopeEntry::Const(k) => ScopeEntry::Const(*k),
                    ScopeEntry::Var(v) => match free_index.get(v.as_str()) {
                        Some(&k) => c.scope[k].clone(),
                        None => ScopeEntry::Var(fresh_name(i, v)),
                    },
                })
                .collect();
            constraints.push(Constraint {
                relation: atom.relation.clone(),
                scope,
            });
        }
        blocks.push(Block {
            constraint: i,
            variables: block_vars,
        });
    }
    Ok(BuildState {
        variables,
        constraints,
        blocks,
    })
}

/// The basic gadget reduction: one constraint per formula atom, fresh
/// variables per quantified variable, over the source language.
pub fn build_j(inst: &Instance, defs: &PpDefinitionSet) -> Result<ReductionOutput> {
    let state = build_core(inst, defs)?;
    let instance = Instance::new(defs.source.clone(), state.variables, state.constraints)?;
    Ok(ReductionOutput {
        instance,
        blocks: state.blocks,
        extended: false,
    })
}

/// The extended reduction: everything [`build_j`] produces, plus a
/// full-relation constraint on every unordered pair of distinct variables
/// within each block (duplicates across blocks are kept).
pub fn build_j_hat(inst: &Instance, defs: &PpDefinitionSet) -> Result<ReductionOutput> {
    let mut state = build_core(inst, defs)?;
    let mut language = defs.source.clone();
    match language.get(T_NAME) {
        None => language.insert(T_NAME.to_string(), relations::t2())?,
        Some(existing) => {
            if *existing != relations::t2() {
                return Err(Error::InvalidInput(format!(
                    "source language already defines `{T_NAME}` as something other than the \
                     full binary relation"
                )));
            }
        }
    }
    for block in &state.blocks {
        for i in 0..block.variables.len() {
            for j in (i + 1)..block.variables.len() {
                state.constraints.push(Constraint {
                    relation: T_NAME.to_string(),
                    scope: vec![
                        ScopeEntry::Var(block.variables[i].clone()),
                        ScopeEntry::Var(block.variables[j].clone()),
                    ],
                });
            }
        }
    }
    let instance = Instance::new(language, state.variables, state.constraints)?;
    Ok(ReductionOutput {
        instance,
        blocks: state.blocks,
        extended: true,
    })
}

/// The lexicographically smallest witness for the bound variables of
/// `formula` at the free-variable values `a` (`-1 < +1`, leftmost bound
/// variable most significant), or `None` if no witness exists.
pub fn lex_smallest_witness(
    formula: &PpFormula,
    source: &ConstraintLanguage,
    a: &[Sign],
) -> Result<Option<Vec<Sign>>> {
    let t = formula.bound.len();
    if t > crate::classify::MAX_QUANTIFIED {
        return Err(Error::CapExceeded(format!(
            "{t} quantified variables exceed the cap {}",
            crate::classify::MAX_QUANTIFIED
        )));
    }
    let mut env: BTreeMap<&str, Sign> = BTreeMap::new();
    for (name, &v) in formula.free.iter().zip(a) {
        env.insert(name.as_str(), v);
    }
    for code in 0..(1usize << t) {
        let witness: Vec<Sign> = (0..t)
            .map(|k| {
                if (code >> (t - 1 - k)) & 1 == 0 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        for (k, name) in formula.bound.iter().enumerate() {
            env.insert(name.as_str(), witness[k]);
        }
        let ok = formula.atoms.iter().all(|atom| {
            let tuple: Vec<Sign> = atom
                .scope
                .iter()
                .map(|e| match e {
                    ScopeEntry::Const(c) => *c,
                    ScopeEntry::Var(v) => env[v.as_str()],
                })
                .collect();
            source
                .get(&atom.relation)
                .map(|rel| rel.contains(&tuple))
                .unwrap_or(false)
        });
        if ok {
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Lift a satisfying operator assignment of `inst` to one of `out.instance`
/// over the same space.
///
/// Per constraint block: simultaneously diagonalize the scope operators; each
/// joint eigenvalue tuple lies in the constraint's relation (asserted), and
/// the lexicographically smallest Boolean witness at that tuple defines the
/// diagonal of each fresh operator in the joint eigenbasis. The result
/// extends `f`, satisfies `out.instance`, and pairwise commutes on every
/// block (both verified before returning).
pub fn lift(
    f: &OperatorAssignment,
    inst: &Instance,
    defs: &PpDefinitionSet,
    out: &ReductionOutput,
) -> Result<OperatorAssignment> {
    if operator_value(f, inst)? != rat(1) {
        return Err(Error::InvalidAssignment(
            "lift requires a satisfying operator assignment of the source instance".into(),
        ));
    }
    let mut lifted = f.restrict(inst.variables())?;
    for (i, c) in inst.constraints().iter().enumerate() {
        let formula = defs.formula(&c.relation).ok_or_else(|| {
            Error::InvalidInput(format!("no definition for relation `{}`", c.relation))
        })?;
        let t = formula.bound.len();
        if t == 0 {
            continue;
        }
        let rel = inst.relation_of(i);
        let ops: Vec<Matrix> = c
            .scope
            .iter()
            .map(|e| f.eval_entry(e))
            .collect::<Result<_>>()?;
        let dec = joint_eigen(&ops)?;
        let d = f.dim();
        let mut fresh_diags: Vec<Vec<Sign>> = vec![Vec::with_capacity(d); t];
        for col in 0..d {
            let tuple: Vec<Sign> = dec.diags.iter().map(|dg| dg[col]).collect();
            if !rel.contains(&tuple) {
                return Err(Error::BrokenPrecondition(format!(
                    "joint eigenvalue tuple {tuple:?} of constraint {i} is outside `{}`",
                    c.relation
                )));
            }
            let witness =
                lex_smallest_witness(formula, &defs.source, &tuple)?.ok_or_else(|| {
                    Error::BrokenPrecondition(format!(
                        "no witness for `{}` at {tuple:?} although the tuple is in the relation",
                        c.relation
                    ))
                })?;
            for (k, &b) in witness.iter().enumerate() {
                fresh_diags[k].push(b);
            }
        }
        for (k, bound) in formula.bound.iter().enumerate() {
            let m = inverse_conjugate_signs(&dec.basis, &fresh_diags[k])?;
            lifted.insert(fresh_name(i, bound), m)?;
        }
    }

    for block in &out.blocks {
        for i in 0..block.variables.len() {
            for j in (i + 1)..block.variables.len() {
                let a = lifted.get(&block.variables[i]).ok_or_else(|| {
                    Error::InvalidAssignment(format!("missing `{}`", block.variables[i]))
                })?;
                let b = lifted.get(&block.variables[j]).ok_or_else(|| {
                    Error::InvalidAssignment(format!("missing `{}`", block.variables[j]))
                })?;
                if !a.commutes(b)? {
                    return Err(Error::BrokenPrecondition(format!(
                        "lifted operators for `{}` and `{}` do not commute on their block",
                        block.variables[i], block.variables[j]
                    )));
                }
            }
        }
    }
    if operator_value(&lifted, &out.instance)? != rat(1) {
        return Err(Error::BrokenPrecondition(
            "lifted assignment does not satisfy the rewritten instance".into(),
        ));
    }
    Ok(lifted)
}

/// Project a satisfying operator assignment of an extended reduction back to
/// the source instance by restriction, verifying the result satisfies it.
pub fn project(
    g: &OperatorAssignment,
    out: &ReductionOutput,
    inst: &Instance,
) -> Result<OperatorAssignment> {
    if !out.extended {
        return Err(Error::InvalidInput(
            "projection is only available for the extended construction".into(),
        ));
    }
    if operator_value(g, &out.instance)? != rat(1) {
        return Err(Error::InvalidAssignment(
            "projection requires a satisfying assignment of the extended instance".into(),
        ));
    }
    let restriction = g.restrict(inst.variables())?;
    if operator_value(&restriction, inst)? != rat(1) {
        return Err(Error::BrokenPrecondition(
            "restriction does not satisfy the source instance".into(),
        ));
    }
    Ok(restriction)
}

// ---------------------------------------------------------------------------
// Clause definitions over the exactly-one language
// ---------------------------------------------------------------------------

/// The source language `{R13, R12, R11}`: exactly one of three, exactly one
/// of two, and the single-true unary relation.
pub fn one_in_k_language() -> ConstraintLanguage {
    ConstraintLanguage::from_pairs([
        ("R13".to_string(), relations::r_one_in_three()),
        ("R12".to_string(), relations::r_one_in_two()),
        ("R11".to_string(), relations::r_one_in_one()),
    ])
    .expect("fixed names")
}

/// The commutativity gadget: defines the full binary relation from `R13`
/// with four quantified variables and three atoms.
pub fn ji_formula() -> PpFormula {
    let v = |s: &str| ScopeEntry::Var(s.into());
    PpFormula::new(
        vec!["Z1".into(), "Z2".into()],
        vec!["U1".into(), "U2".into(), "U3".into(), "U4".into()],
        vec![
            Atom {
                relation: "R13".into(),
                scope: vec![v("Z1"), v("U1"), v("U4")],
            },
            Atom {
                relation: "R13".into(),
                scope: vec![v("Z2"), v("U2"), v("U4")],
            },
            Atom {
                relation: "R13".into(),
                scope: vec![v("U1"), v("U2"), v("U3")],
            },
        ],
    )
    .expect("fixed formula")
}

/// A verified definition set for `{T}` over `{R13}` via [`ji_formula`].
pub fn ji_definitions() -> PpDefinitionSet {
    let target = ConstraintLanguage::from_pairs([(T_NAME.to_string(), relations::t2())]).unwrap();
    let source =
        ConstraintLanguage::from_pairs([("R13".to_string(), relations::r_one_in_three())]).unwrap();
    PpDefinitionSet::new(
        target,
        source,
        BTreeMap::from([(T_NAME.to_string(), ji_formula())]),
    )
    .expect("the commutativity gadget defines the full binary relation")
}

/// The pp-formula defining the clause relation with literal signs `signs`
/// over `{R13, R12, R11}`, with every atom on distinct variables and no
/// constants.
///
/// The scheme: a clause is satisfied when at least one literal is true.
/// Writing `comp(i)` for the complement of literal `i` and `val(i)` for the
/// literal itself (negations are materialized as fresh variables tied by
/// `R12`, which is Boolean inequality):
///
/// - arity 1: `R11(val(1))`;
/// - arity 2: `exists w. R13(comp(1), comp(2), w)`;
/// - arity 3: `exists a b c d. R13(comp(1), a, b) & R13(val(2), b, c) &
///   R13(comp(3), c, d)`.
pub fn clause_formula(signs: &[Sign]) -> Result<PpFormula> {
    let r = signs.len();
    if r == 0 || r > 3 || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidInput(format!(
            "clause signs must be 1 to 3 entries of {{+1,-1}}, got {signs:?}"
        )));
    }
    let free: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
    let mut bound: Vec<String> = Vec::new();
    let mut atoms: Vec<Atom> = Vec::new();
    let v = |s: &String| ScopeEntry::Var(s.clone());

    // comp(i): a term whose value is the complement of literal i; val(i): a
    // term whose value is literal i itself. Each negation introduces one
    // fresh variable and one R12 atom.
    let mut negation_of: BTreeMap<usize, String> = BTreeMap::new();
    let mut need_negation = |i: usize, bound: &mut Vec<String>, atoms: &mut Vec<Atom>| -> String {
        negation_of
            .entry(i)
            .or_insert_with(|| {
                let n = format!("n{}", i + 1);
                bound.push(n.clone());
                atoms.push(Atom {
                    relation: "R12".into(),
                    scope: vec![ScopeEntry::Var(free[i].clone()), ScopeEntry::Var(n.clone())],
                });
                n
            })
            .clone()
    };

    match r {
        1 => {
            if signs[0] == 1 {
                atoms.push(Atom {
                    relation: "R11".into(),
                    scope: vec![v(&free[0])],
                });
            } else {
                let n = need_negation(0, &mut bound, &mut atoms);
                atoms.push(Atom {
                    relation: "R11".into(),
                    scope: vec![ScopeEntry::Var(n)],
                });
            }
        }
        2 => {
            let comp1 = if signs[0] == 1 {
                need_negation(0, &mut bound, &mut atoms)
            } else {
                free[0].clone()
            };
            let comp2 = if signs[1] == 1 {
                need_negation(1, &mut bound, &mut atoms)
            } else {
                free[1].clone()
            };
            bound.push("w".into());
            atoms.push(Atom {
                relation: "R13".into(),
                scope: vec![
                    ScopeEntry::Var(comp1),
                    ScopeEntry::Var(comp2),
                    ScopeEntry::Var("w".into()),
                ],
            });
        }
        _ => {
            let comp1 = if signs[0] == 1 {
                need_negation(0, &mut bound, &mut atoms)
            } else {
                free[0].clone()
            };
            let val2 = if signs[1] == 1 {
                free[1].clone()
            } else {
                need_negation(1, &mut bound, &mut atoms)
            };
            let comp3 = if signs[2] == 1 {
                need_negation(2, &mut bound, &mut atoms)
            } else {
                free[2].clone()
            };
            for chain in ["a", "b", "c", "d"] {
                bound.push(chain.into());
            }
            let va = |s: &str| ScopeEntry::Var(s.into());
            atoms.push(Atom {
                relation: "R13".into(),
                scope: vec![ScopeEntry::Var(comp1), va("a"), va("b")],
            });
            atoms.push(Atom {
                relation: "R13".into(),
                scope: vec![ScopeEntry::Var(val2), va("b"), va("c")],
            });
            atoms.push(Atom {
                relation: "R13".into(),
                scope: vec![ScopeEntry::Var(comp3), va("c"), va("d")],
            });
        }
    }
    PpFormula::new(free, bound, atoms)
}

/// Verified definitions of every clause relation in `lang` (matched by
/// content, arity at most 3) over `{R13, R12, R11}`.
pub fn clause_definitions_for(lang: &ConstraintLanguage) -> Result<PpDefinitionSet> {
    let mut defs = BTreeMap::new();
    for (name, rel) in lang.iter() {
        let r = rel.arity();
        if r > 3 {
            return Err(Error::InvalidInput(format!(
                "relation `{name}` has arity {r}; clause relations stop at 3"
            )));
        }
        let signs = (0..(1usize << r))
            .map(|idx| crate::model::tuple_from_index(idx, r))
            .find(|signs| relations::clause(signs) == *rel)
            .ok_or_else(|| {
                Error::InvalidInput(format!("relation `{name}` is not a clause relation"))
            })?;
        defs.insert(name.clone(), clause_formula(&signs)?);
    }
    PpDefinitionSet::new(lang.clone(), one_in_k_language(), defs)
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DefsDoc {
    source: BTreeMap<String, serde_json::Value>,
    definitions: BTreeMap<String, serde_json::Value>,
}

/// Parse a definitions file: `{"source": {<relation docs>}, "definitions":
/// {<pp-formula docs>}}`. The target language is taken from `target` (for a
/// reduction this is the instance's own language) and every definition is
/// verified against it.
pub fn parse_definitions(target: &ConstraintLanguage, text: &str) -> Result<PpDefinitionSet> {
    #[derive(Deserialize)]
    struct RelationDoc {
        arity: usize,
        tuples: Vec<Vec<i8>>,
    }
    let doc: DefsDoc = serde_json::from_str(text)?;
    let mut source = ConstraintLanguage::new();
    for (name, value) in doc.source {
        let rel: RelationDoc = serde_json::from_value(value)?;
        source.insert(name, BooleanRelation::new(rel.arity, rel.tuples)?)?;
    }
    let mut defs = BTreeMap::new();
    for (name, value) in doc.definitions {
        let formula = crate::classify::parse_pp_formula(&serde_json::to_string(&value)?)?;
        defs.insert(name, formula);
    }
    PpDefinitionSet::new(target.clone(), source, defs)
}

/// Serialize a definition set to the definitions file format.
pub fn serialize_definitions(defs: &PpDefinitionSet) -> String {
    let doc = DefsDoc {
        source: defs
            .source
            .iter()
            .map(|(name, rel)| {
                (
                    name.clone(),
                    serde_json::json!({
                        "arity": rel.arity(),
                        "tuples": rel.tuples().cloned().collect::<Vec<_>>(),
                    }),
                )
            })
            .collect(),
        definitions: defs
            .defs
            .iter()
            .map(|(name, f)| {
                let text = crate::classify::serialize_pp_formula(f);
                (
                    name.clone(),
                    serde_json::from_str(&text).expect("round trip"),
                )
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Serialize a reduction output: the instance document plus the block table.
pub fn serialize_reduction(out: &ReductionOutput) -> String {
    let instance_value: serde_json::Value =
        serde_json::from_str(&crate::model::serialize_instance(&out.instance)).expect("round trip");
    let doc = serde_json::json!({
        "instance": instance_value,
        "blocks": out.blocks,
        "extended": out.extended,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

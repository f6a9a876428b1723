//! Relations over `{+1, -1}`, constraint languages, instances, and Boolean
//! assignments, together with their canonical JSON file format.
//!
//! Conventions used throughout the crate:
//!
//! - `+1` encodes *false* and `-1` encodes *true*;
//! - relation tuples are kept in lexicographic ascending order with `-1 < +1`
//!   (plain numeric order), which fixes the serialized form and the meaning of
//!   "lexicographically smallest" everywhere downstream;
//! - scope entries are either declared variable names or the literal constant
//!   tokens `+1` / `-1`.
//!
//! Instances keep duplicate constraints; the value of an assignment is the
//! fraction of constraints it satisfies, counted with multiplicity. An
//! instance with no constraints has value 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rat, Rational};

/// A single Boolean value in the `{+1, -1}` encoding.
pub type Sign = i8;

/// A finite relation over `{+1, -1}` of a fixed arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanRelation {
    arity: usize,
    tuples: BTreeSet<Vec<Sign>>,
}

impl BooleanRelation {
    /// Build a relation from explicit tuples, validating entries and lengths.
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<Sign>>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::BadRelation {
                    relation: String::new(),
                    message: format!("tuple {t:?} does not have arity {arity}"),
                });
            }
            if t.iter().any(|&e| e != 1 && e != -1) {
                return Err(Error::BadRelation {
                    relation: String::new(),
                    message: format!("tuple {t:?} has an entry outside {{+1, -1}}"),
                });
            }
            set.insert(t);
        }
        Ok(BooleanRelation { arity, tuples: set })
    }

    /// The empty relation of the given arity (satisfied by nothing).
    pub fn empty(arity: usize) -> Self {
        BooleanRelation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// The full relation of the given arity (satisfied by everything).
    pub fn full(arity: usize) -> Self {
        let mut tuples = BTreeSet::new();
        for idx in 0..(1usize << arity) {
            tuples.insert(tuple_from_index(idx, arity));
        }
        BooleanRelation { arity, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Tuples in canonical (lexicographic ascending, `-1 < +1`) order.
    pub fn tuples(&self) -> impl Iterator<Item = &Vec<Sign>> {
        self.tuples.iter()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Sign]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn insert(&mut self, tuple: Vec<Sign>) -> Result<()> {
        if tuple.len() != self.arity || tuple.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::BadRelation {
                relation: String::new(),
                message: format!("tuple {tuple:?} invalid for arity {}", self.arity),
            });
        }
        self.tuples.insert(tuple);
        Ok(())
    }
}

/// Index `0..2^n` to tuple, bit `i` set meaning position `i` is `-1`.
pub fn tuple_from_index(idx: usize, arity: usize) -> Vec<Sign> {
    (0..arity)
        .map(|i| if (idx >> i) & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Tuple to index, inverse of [`tuple_from_index`].
pub fn index_from_tuple(tuple: &[Sign]) -> usize {
    tuple
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &s)| acc | (usize::from(s == -1)) << i)
}

/// Common named relations.
pub mod relations {
    use super::*;

    /// The full binary relation; its indicator polynomial is the constant -1.
    pub fn t2() -> BooleanRelation {
        BooleanRelation::full(2)
    }

    /// Exactly one of three true.
    pub fn r_one_in_three() -> BooleanRelation {
        BooleanRelation::new(3, vec![vec![-1, 1, 1], vec![1, -1, 1], vec![1, 1, -1]]).unwrap()
    }

    /// Exactly one of two true.
    pub fn r_one_in_two() -> BooleanRelation {
        BooleanRelation::new(2, vec![vec![-1, 1], vec![1, -1]]).unwrap()
    }

    /// The singleton `{-1}` (the variable is true).
    pub fn r_one_in_one() -> BooleanRelation {
        BooleanRelation::new(1, vec![vec![-1]]).unwrap()
    }

    /// Even parity on `r` positions: product of entries is `+1`.
    pub fn even(r: usize) -> BooleanRelation {
        parity(r, 1)
    }

    /// Odd parity on `r` positions: product of entries is `-1`.
    pub fn odd(r: usize) -> BooleanRelation {
        parity(r, -1)
    }

    /// Solutions of the parity equation `x_1 ... x_r = rhs`.
    pub fn parity(r: usize, rhs: Sign) -> BooleanRelation {
        let tuples = (0..(1usize << r))
            .map(|idx| tuple_from_index(idx, r))
            .filter(|t| t.iter().product::<Sign>() == rhs);
        BooleanRelation::new(r, tuples).unwrap()
    }

    /// Binary equality.
    pub fn equality() -> BooleanRelation {
        BooleanRelation::new(2, vec![vec![-1, -1], vec![1, 1]]).unwrap()
    }

    /// The clause relation for literal signs `signs`: everything except the
    /// unique falsifying tuple `(sg l_1, ..., sg l_r)`.
    pub fn clause(signs: &[Sign]) -> BooleanRelation {
        let r = signs.len();
        let tuples = (0..(1usize << r))
            .map(|idx| tuple_from_index(idx, r))
            .filter(|t| t.as_slice() != signs);
        BooleanRelation::new(r, tuples).unwrap()
    }

    /// Binary OR: at least one of two true.
    pub fn or2() -> BooleanRelation {
        clause(&[1, 1])
    }
}

/// A named collection of Boolean relations.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstraintLanguage {
    relations: BTreeMap<String, BooleanRelation>,
}

impl ConstraintLanguage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, BooleanRelation)>) -> Result<Self> {
        let mut lang = ConstraintLanguage::new();
        for (name, rel) in pairs {
            lang.insert(name, rel)?;
        }
        Ok(lang)
    }

    pub fn insert(&mut self, name: String, relation: BooleanRelation) -> Result<()> {
        if name.is_empty() {
            return Err(Error::BadRelation {
                relation: name,
                message: "relation name must be nonempty".into(),
            });
        }
        if self.relations.contains_key(&name) {
            return Err(Error::BadRelation {
                relation: name,
                message: "duplicate relation name".into(),
            });
        }
        self.relations.insert(name, relation);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&BooleanRelation> {
        self.relations.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BooleanRelation)> {
        self.relations.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.relations.keys()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }
}

/// One scope position: a variable or a `{+1, -1}` constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScopeEntry {
    Var(String),
    Const(Sign),
}

impl ScopeEntry {
    /// Parse the file token form: `+1` / `-1` are constants, anything matching
    /// `[A-Za-z_][A-Za-z0-9_]*` is a variable name.
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "+1" => Ok(ScopeEntry::Const(1)),
            "-1" => Ok(ScopeEntry::Const(-1)),
            _ => {
                if is_valid_variable_name(token) {
                    Ok(ScopeEntry::Var(token.to_string()))
                } else {
                    Err(Error::BadVariableName {
                        name: token.to_string(),
                    })
                }
            }
        }
    }

    pub fn token(&self) -> String {
        match self {
            ScopeEntry::Var(v) => v.clone(),
            ScopeEntry::Const(1) => "+1".into(),
            ScopeEntry::Const(_) => "-1".into(),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            ScopeEntry::Var(v) => Some(v),
            ScopeEntry::Const(_) => None,
        }
    }
}

impl fmt::Display for ScopeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Variable names are `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_variable_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// One constraint: a relation name applied to a scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub relation: String,
    pub scope: Vec<ScopeEntry>,
}

/// An instance: a language, an ordered list of declared variables, and an
/// ordered list of constraints. Values are immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    language: ConstraintLanguage,
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Instance {
    /// Build and validate an instance.
    pub fn new(
        language: ConstraintLanguage,
        variables: Vec<String>,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !is_valid_variable_name(v) {
                return Err(Error::BadVariableName { name: v.clone() });
            }
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidInput(format!("duplicate variable `{v}`")));
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            let rel = language
                .get(&c.relation)
                .ok_or_else(|| Error::UnknownRelation {
                    constraint: i,
                    relation: c.relation.clone(),
                })?;
            if rel.arity() != c.scope.len() {
                return Err(Error::ArityMismatch {
                    constraint: i,
                    relation: c.relation.clone(),
                    expected: rel.arity(),
                    actual: c.scope.len(),
                });
            }
            for entry in &c.scope {
                if let ScopeEntry::Var(v) = entry {
                    if !seen.contains(v) {
                        return Err(Error::UndeclaredVariable {
                            constraint: i,
                            variable: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(Instance {
            language,
            variables,
            constraints,
        })
    }

    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn relation_of(&self, constraint: usize) -> &BooleanRelation {
        self.language
            .get(&self.constraints[constraint].relation)
            .expect("validated at construction")
    }
}

/// A total map from variable names to Boolean values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BooleanAssignment {
    values: BTreeMap<String, Sign>,
}

impl BooleanAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Sign)>) -> Self {
        BooleanAssignment {
            values: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, var: impl Into<String>, value: Sign) {
        self.values.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<Sign> {
        self.values.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Sign)> {
        self.values.iter()
    }

    /// Value of a scope entry under this assignment; constants map to
    /// themselves.
    pub fn eval_entry(&self, entry: &ScopeEntry) -> Result<Sign> {
        match entry {
            ScopeEntry::Const(c) => Ok(*c),
            ScopeEntry::Var(v) => self.get(v).ok_or_else(|| Error::PartialAssignment {
                variable: v.clone(),
            }),
        }
    }
}

/// Fraction of constraints of `inst` satisfied by `a`, in `[0, 1]`.
///
/// The assignment must be total on the instance's variables. A zero-constraint
/// instance has value 1.
pub fn boolean_value(inst: &Instance, a: &BooleanAssignment) -> Result<Rational> {
    for v in inst.variables() {
        if a.get(v).is_none() {
            return Err(Error::PartialAssignment {
                variable: v.clone(),
            });
        }
    }
    let m = inst.constraints().len();
    if m == 0 {
        return Ok(rat(1));
    }
    let mut satisfied = 0i64;
    for (i, c) in inst.constraints().iter().enumerate() {
        let tuple: Vec<Sign> = c
            .scope
            .iter()
            .map(|e| a.eval_entry(e))
            .collect::<Result<_>>()?;
        if inst.relation_of(i).contains(&tuple) {
            satisfied += 1;
        }
    }
    Ok(Rational::new(satisfied.into(), (m as i64).into()))
}

// ---------------------------------------------------------------------------
// Canonical JSON file format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RelationDoc {
    arity: usize,
    tuples: Vec<Vec<i8>>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintDoc {
    relation: String,
    scope: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    language: BTreeMap<String, RelationDoc>,
    variables: Vec<String>,
    constraints: Vec<ConstraintDoc>,
}

/// Parse a standalone language file: the map `{"<name>": {"arity": k,
/// "tuples": [...]}}`.
pub fn parse_language(text: &str) -> Result<ConstraintLanguage> {
    let doc: BTreeMap<String, RelationDoc> = serde_json::from_str(text)?;
    let mut language = ConstraintLanguage::new();
    for (name, rel) in doc {
        let relation = BooleanRelation::new(rel.arity, rel.tuples).map_err(|e| match e {
            Error::BadRelation { message, .. } => Error::BadRelation {
                relation: name.clone(),
                message,
            },
            other => other,
        })?;
        language.insert(name, relation)?;
    }
    Ok(language)
}

/// Serialize a standalone language file.
pub fn serialize_language(lang: &ConstraintLanguage) -> String {
    let doc: BTreeMap<String, RelationDoc> = lang
        .iter()
        .map(|(name, rel)| {
            (
                name.clone(),
                RelationDoc {
                    arity: rel.arity(),
                    tuples: rel.tuples().cloned().collect(),
                },
            )
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse the canonical JSON instance format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let mut language = ConstraintLanguage::new();
    for (name, rel) in doc.language {
        let relation = BooleanRelation::new(rel.arity, rel.tuples).map_err(|e| match e {
            Error::BadRelation { message, .. } => Error::BadRelation {
                relation: name.clone(),
                message,
            },
            other => other,
        })?;
        language.insert(name, relation)?;
    }
    let mut constraints = Vec::with_capacity(doc.constraints.len());
    for c in doc.constraints {
        let scope = c
            .scope
            .iter()
            .map(|tok| ScopeEntry::parse(tok))
            .collect::<Result<Vec<_>>>()?;
        constraints.push(Constraint {
            relation: c.relation,
            scope,
        });
    }
    Instance::new(language, doc.variables, constraints)
}

/// Serialize to the canonical JSON instance format (tuples in canonical
/// order, two-space indentation, trailing newline).
pub fn serialize_instance(inst: &Instance) -> String {
    let doc = InstanceDoc {
        language: inst
            .language
            .iter()
            .map(|(name, rel)| {
                (
                    name.clone(),
                    RelationDoc {
                        arity: rel.arity(),
                        tuples: rel.tuples().cloned().collect(),
                    },
                )
            })
            .collect(),
        variables: inst.variables.clone(),
        constraints: inst
            .constraints
            .iter()
            .map(|c| ConstraintDoc {
                relation: c.relation.clone(),
                scope: c.scope.iter().map(|e| e.token()).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

//! Invariance of relations under Boolean operations, the Schaefer condition
//! flags, the gap verdict, minimal-clone membership, and brute-force
//! evaluation of primitive-positive formulas.
//!
//! A relation `R` is *invariant* under an `m`-ary operation `f` when applying
//! `f` componentwise to any `m` tuples of `R` lands back in `R`; `f` is then a
//! closure operation (polymorphism) of `R`. The six Schaefer classes are
//! exactly invariance under six base operations:
//!
//! | class      | base operation            |
//! |------------|---------------------------|
//! | 0-valid    | constant false            |
//! | 1-valid    | constant true             |
//! | bijunctive | majority of three         |
//! | Horn       | binary AND                |
//! | dual Horn  | binary OR                 |
//! | affine     | ternary XOR               |
//!
//! A language with at least one of the first five properties admits no
//! satisfiability gap between Boolean and operator satisfiability. Otherwise
//! it has gaps of every kind: a first-kind gap for the language itself, a
//! third-kind gap once the full binary relation is added, and the latter
//! extension has an undecidable operator-satisfiability problem. Affine is
//! reported but deliberately ignored by the verdict: parity languages are the
//! canonical gap witnesses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    index_from_tuple, tuple_from_index, BooleanRelation, ConstraintLanguage, ScopeEntry, Sign,
};

/// Cap on quantified variables in brute-force pp-formula evaluation.
pub const MAX_QUANTIFIED: usize = 20;

/// A Boolean operation of some arity, as a total truth table.
///
/// The table is indexed by [`index_from_tuple`]: bit `i` of the index set
/// means argument `i` is `-1` (true).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanOperation {
    name: String,
    arity: usize,
    table: Vec<Sign>,
}

impl BooleanOperation {
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<Sign>) -> Result<Self> {
        if arity > 20 {
            return Err(Error::CapExceeded(format!(
                "operation arity {arity} exceeds the supported 20"
            )));
        }
        if table.len() != 1 << arity {
            return Err(Error::InvalidInput(format!(
                "operation of arity {arity} needs {} table entries, got {}",
                1 << arity,
                table.len()
            )));
        }
        if table.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidInput(
                "operation table entries must be +1 or -1".into(),
            ));
        }
        Ok(BooleanOperation {
            name: name.into(),
            arity,
            table,
        })
    }

    /// Build from a closure over sign tuples.
    pub fn from_fn(name: impl Into<String>, arity: usize, f: impl Fn(&[Sign]) -> Sign) -> Self {
        let table = (0..(1usize << arity))
            .map(|idx| f(&tuple_from_index(idx, arity)))
            .collect();
        BooleanOperation::new(name, arity, table).expect("table constructed to size")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, args: &[Sign]) -> Sign {
        debug_assert_eq!(args.len(), self.arity);
        self.table[index_from_tuple(args)]
    }

    pub fn table(&self) -> &[Sign] {
        &self.table
    }

    /// Constant false (`+1`), arity 1.
    pub fn const_false() -> Self {
        Self::from_fn("const_false", 1, |_| 1)
    }

    /// Constant true (`-1`), arity 1.
    pub fn const_true() -> Self {
        Self::from_fn("const_true", 1, |_| -1)
    }

    /// Majority of three.
    pub fn maj3() -> Self {
        Self::from_fn("maj3", 3, |a| {
            let trues = a.iter().filter(|&&s| s == -1).count();
            if trues >= 2 {
                -1
            } else {
                1
            }
        })
    }

    /// Binary AND (true only when both are true).
    pub fn and2() -> Self {
        Self::from_fn("and2", 2, |a| if a[0] == -1 && a[1] == -1 { -1 } else { 1 })
    }

    /// Binary OR.
    pub fn or2() -> Self {
        Self::from_fn("or2", 2, |a| if a[0] == -1 || a[1] == -1 { -1 } else { 1 })
    }

    /// Ternary exclusive or; in the `{+1,-1}` encoding this is the product.
    pub fn xor3() -> Self {
        Self::from_fn("xor3", 3, |a| a.iter().product())
    }

    /// Unary negation.
    pub fn not1() -> Self {
        Self::from_fn("not1", 1, |a| -a[0])
    }

    /// The projection onto coordinate `i` (0-based) among `arity` arguments.
    pub fn projection(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        Self::from_fn(format!("proj{arity}_{i}"), arity, move |a| a[i])
    }

    /// Composition `self(g_1(args), ..., g_m(args))`; all `g_i` share an arity.
    pub fn compose(&self, inner: &[BooleanOperation]) -> Result<Self> {
        if inner.len() != self.arity {
            return Err(Error::InvalidInput(format!(
                "composition needs {} inner operations, got {}",
                self.arity,
                inner.len()
            )));
        }
        let Some(r) = inner.first().map(|g| g.arity) else {
            return Err(Error::InvalidInput(
                "composition with zero inner operations is not supported".into(),
            ));
        };
        if inner.iter().any(|g| g.arity != r) {
            return Err(Error::InvalidInput(
                "inner operations must share an arity".into(),
            ));
        }
        let outer = self.clone();
        let inner = inner.to_vec();
        Ok(Self::from_fn(
            format!("{}∘(…)", self.name),
            r,
            move |args| {
                let mid: Vec<Sign> = inner.iter().map(|g| g.apply(args)).collect();
                outer.apply(&mid)
            },
        ))
    }
}

/// Exhaustive invariance test: every componentwise application of `f` to
/// tuples of `R` stays in `R` (all `|R|^m` selections are tried).
pub fn is_invariant(rel: &BooleanRelation, f: &BooleanOperation) -> bool {
    let tuples: Vec<&Vec<Sign>> = rel.tuples().collect();
    if tuples.is_empty() {
        return true;
    }
    let m = f.arity();
    let r = rel.arity();
    let count = tuples.len();
    let mut selector = vec![0usize; m];
    loop {
        let mut image = Vec::with_capacity(r);
        for pos in 0..r {
            let args: Vec<Sign> = selector.iter().map(|&k| tuples[k][pos]).collect();
            image.push(f.apply(&args));
        }
        if !rel.contains(&image) {
            return false;
        }
        // Odometer increment over the m selections.
        let mut i = 0;
        loop {
            if i == m {
                return true;
            }
            selector[i] += 1;
            if selector[i] < count {
                break;
            }
            selector[i] = 0;
            i += 1;
        }
    }
}

/// Whether every relation of the language is invariant under `f`.
pub fn language_invariant(lang: &ConstraintLanguage, f: &BooleanOperation) -> bool {
    lang.iter().all(|(_, rel)| is_invariant(rel, f))
}

/// The smallest relation containing `rel` that is invariant under `f`
/// (close under componentwise application to a fixpoint).
pub fn close_under(rel: &BooleanRelation, f: &BooleanOperation) -> BooleanRelation {
    let mut out = rel.clone();
    let r = rel.arity();
    let m = f.arity();
    loop {
        let tuples: Vec<Vec<Sign>> = out.tuples().cloned().collect();
        let count = tuples.len();
        if count == 0 {
            return out;
        }
        let mut added = false;
        let mut selector = vec![0usize; m];
        'outer: loop {
            let mut image = Vec::with_capacity(r);
            for pos in 0..r {
                let args: Vec<Sign> = selector.iter().map(|&k| tuples[k][pos]).collect();
                image.push(f.apply(&args));
            }
            if !out.contains(&image) {
                out.insert(image).expect("image tuple is well formed");
                added = true;
            }
            let mut i = 0;
            loop {
                if i == m {
                    break 'outer;
                }
                selector[i] += 1;
                if selector[i] < count {
                    break;
                }
                selector[i] = 0;
                i += 1;
            }
        }
        if !added {
            return out;
        }
    }
}

/// The six Schaefer condition flags for a language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchaeferFlags {
    pub zero_valid: bool,
    pub one_valid: bool,
    pub bijunctive: bool,
    pub horn: bool,
    pub dual_horn: bool,
    pub affine: bool,
}

impl SchaeferFlags {
    /// True when some flag in the no-gap list holds (affine excluded).
    pub fn no_gap(&self) -> bool {
        self.zero_valid || self.one_valid || self.bijunctive || self.horn || self.dual_horn
    }
}

/// Compute all six flags by exhaustive invariance checks.
pub fn schaefer_flags(lang: &ConstraintLanguage) -> SchaeferFlags {
    SchaeferFlags {
        zero_valid: language_invariant(lang, &BooleanOperation::const_false()),
        one_valid: language_invariant(lang, &BooleanOperation::const_true()),
        bijunctive: language_invariant(lang, &BooleanOperation::maj3()),
        horn: language_invariant(lang, &BooleanOperation::and2()),
        dual_horn: language_invariant(lang, &BooleanOperation::or2()),
        affine: language_invariant(lang, &BooleanOperation::xor3()),
    }
}

/// The dichotomy verdict for a language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GapVerdict {
    /// No satisfiability gap of any kind; Boolean, finite-dimensional and
    /// arbitrary-dimension satisfiability coincide on every instance.
    NoGap { flags: SchaeferFlags },
    /// Gaps of every kind.
    GapsOfAllKinds {
        flags: SchaeferFlags,
        notes: Vec<String>,
    },
}

impl GapVerdict {
    pub fn flags(&self) -> &SchaeferFlags {
        match self {
            GapVerdict::NoGap { flags } => flags,
            GapVerdict::GapsOfAllKinds { flags, .. } => flags,
        }
    }

    pub fn is_no_gap(&self) -> bool {
        matches!(self, GapVerdict::NoGap { .. })
    }
}

/// Decide the gap verdict from the Schaefer flags.
///
/// `NoGap` when the language is 0-valid, 1-valid, bijunctive, Horn or dual
/// Horn; otherwise gaps of every kind, with the canonical consequences spelled
/// out in the notes. Affine never averts the gap verdict.
pub fn gap_verdict(lang: &ConstraintLanguage) -> GapVerdict {
    let flags = schaefer_flags(lang);
    if flags.no_gap() {
        GapVerdict::NoGap { flags }
    } else {
        GapVerdict::GapsOfAllKinds {
            flags,
            notes: vec![
                "the language has a satisfiability gap of the first kind \
                 (an instance unsatisfiable over Booleans but satisfiable by \
                 finite-dimensional operators)"
                    .into(),
                "adding the full binary relation T yields a satisfiability gap \
                 of the third kind (an instance satisfiable by operators on \
                 some Hilbert space but on no finite-dimensional one)"
                    .into(),
                "operator satisfiability over arbitrary Hilbert spaces for the \
                 language extended with T is undecidable"
                    .into(),
            ],
        }
    }
}

/// The seven minimal clones directly above the projections-only clone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CloneName {
    I0,
    I1,
    D2,
    E2,
    V2,
    L2,
    N2,
}

impl CloneName {
    pub const ALL: [CloneName; 7] = [
        CloneName::I0,
        CloneName::I1,
        CloneName::D2,
        CloneName::E2,
        CloneName::V2,
        CloneName::L2,
        CloneName::N2,
    ];

    /// The base operation generating this clone.
    pub fn base(&self) -> BooleanOperation {
        match self {
            CloneName::I0 => BooleanOperation::const_false(),
            CloneName::I1 => BooleanOperation::const_true(),
            CloneName::D2 => BooleanOperation::maj3(),
            CloneName::E2 => BooleanOperation::and2(),
            CloneName::V2 => BooleanOperation::or2(),
            CloneName::L2 => BooleanOperation::xor3(),
            CloneName::N2 => BooleanOperation::not1(),
        }
    }
}

impl std::fmt::Display for CloneName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Result of the minimal-clone membership analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalCloneAnalysis {
    /// Minimal clones whose base operation preserves every relation of the
    /// language.
    pub clones: Vec<CloneName>,
    /// Human-readable summary; when `clones` is empty the polymorphism clone
    /// collapses to projections only and every Boolean relation is
    /// pp-definable from the language.
    pub summary: String,
}

/// Which of the seven minimal clones sit inside the language's polymorphism
/// clone (by exhaustive invariance of every relation under each base).
pub fn minimal_clone_analysis(lang: &ConstraintLanguage) -> MinimalCloneAnalysis {
    let clones: Vec<CloneName> = CloneName::ALL
        .iter()
        .copied()
        .filter(|c| language_invariant(lang, &c.base()))
        .collect();
    let summary = if clones.is_empty() {
        "Pol(A) = I2: every Boolean relation is pp-definable from A".to_string()
    } else {
        format!(
            "Pol(A) contains the minimal clones {{{}}}",
            clones
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    MinimalCloneAnalysis { clones, summary }
}

// ---------------------------------------------------------------------------
// Primitive-positive formulas
// ---------------------------------------------------------------------------

/// One atom of a pp-formula: a relation name applied to free variables,
/// quantified variables, or constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub scope: Vec<ScopeEntry>,
}

/// An existentially quantified conjunction of atoms.
///
/// `free` are the defined relation's argument names, `bound` the quantified
/// names; they must be disjoint and individually distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PpFormula {
    pub free: Vec<String>,
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl PpFormula {
    pub fn new(free: Vec<String>, bound: Vec<String>, atoms: Vec<Atom>) -> Result<Self> {
        let mut names = std::collections::BTreeSet::new();
        for n in free.iter().chain(bound.iter()) {
            if !crate::model::is_valid_variable_name(n) {
                return Err(Error::BadVariableName { name: n.clone() });
            }
            if !names.insert(n.clone()) {
                return Err(Error::InvalidInput(format!(
                    "variable `{n}` repeated among free/bound names"
                )));
            }
        }
        for (i, atom) in atoms.iter().enumerate() {
            for e in &atom.scope {
                if let ScopeEntry::Var(v) = e {
                    if !names.contains(v) {
                        return Err(Error::UndeclaredVariable {
                            constraint: i,
                            variable: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(PpFormula { free, bound, atoms })
    }

    /// The identity formula: a single atom applying `relation` to fresh free
    /// variables `x1..xr`.
    pub fn identity(relation: &str, arity: usize) -> Self {
        let free: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
        let scope = free.iter().map(|v| ScopeEntry::Var(v.clone())).collect();
        PpFormula {
            free,
            bound: vec![],
            atoms: vec![Atom {
                relation: relation.to_string(),
                scope,
            }],
        }
    }
}

fn check_atoms(formula: &PpFormula, lang: &ConstraintLanguage) -> Result<()> {
    for (i, atom) in formula.atoms.iter().enumerate() {
        let rel = lang
            .get(&atom.relation)
            .ok_or_else(|| Error::UnknownRelation {
                constraint: i,
                relation: atom.relation.clone(),
            })?;
        if rel.arity() != atom.scope.len() {
            return Err(Error::ArityMismatch {
                constraint: i,
                relation: atom.relation.clone(),
                expected: rel.arity(),
                actual: atom.scope.len(),
            });
        }
    }
    Ok(())
}

/// Brute-force truth of `formula(x/a)` in the language `lang`: search all
/// `2^s` assignments to the quantified variables for one satisfying every
/// atom.
pub fn eval_pp(formula: &PpFormula, lang: &ConstraintLanguage, a: &[Sign]) -> Result<bool> {
    if a.len() != formula.free.len() {
        return Err(Error::InvalidInput(format!(
            "formula has {} free variables, point has {}",
            formula.free.len(),
            a.len()
        )));
    }
    let s = formula.bound.len();
    if s > MAX_QUANTIFIED {
        return Err(Error::CapExceeded(format!(
            "{s} quantified variables exceed the brute-force cap {MAX_QUANTIFIED}"
        )));
    }
    check_atoms(formula, lang)?;

    let mut env: BTreeMap<&str, Sign> = BTreeMap::new();
    for (name, &val) in formula.free.iter().zip(a.iter()) {
        env.insert(name.as_str(), val);
    }
    for witness in 0..(1usize << s) {
        for (k, name) in formula.bound.iter().enumerate() {
            env.insert(name.as_str(), if (witness >> k) & 1 == 1 { -1 } else { 1 });
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
            lang.get(&atom.relation)
                .expect("checked above")
                .contains(&tuple)
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The relation a pp-formula defines over a language: all free-variable
/// tuples on which it evaluates true.
pub fn pp_defines(formula: &PpFormula, lang: &ConstraintLanguage) -> Result<BooleanRelation> {
    let r = formula.free.len();
    let mut tuples = Vec::new();
    for idx in 0..(1usize << r) {
        let a = tuple_from_index(idx, r);
        if eval_pp(formula, lang, &a)? {
            tuples.push(a);
        }
    }
    BooleanRelation::new(r, tuples)
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    relation: String,
    scope: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PpFormulaDoc {
    free: Vec<String>,
    bound: Vec<String>,
    atoms: Vec<AtomDoc>,
}

/// Parse the pp-formula JSON format.
pub fn parse_pp_formula(text: &str) -> Result<PpFormula> {
    let doc: PpFormulaDoc = serde_json::from_str(text)?;
    pp_formula_from_doc(doc)
}

fn pp_formula_from_doc(doc: PpFormulaDoc) -> Result<PpFormula> {
    let atoms = doc
        .atoms
        .into_iter()
        .map(|a| {
            let scope = a
                .scope
                .iter()
                .map(|t| ScopeEntry::parse(t))
                .collect::<Result<Vec<_>>>()?;
            Ok(Atom {
                relation: a.relation,
                scope,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PpFormula::new(doc.free, doc.bound, atoms)
}

/// Serialize the pp-formula JSON format.
pub fn serialize_pp_formula(f: &PpFormula) -> String {
    let doc = PpFormulaDoc {
        free: f.free.clone(),
        bound: f.bound.clone(),
        atoms: f
            .atoms
            .iter()
            .map(|a| AtomDoc {
                relation: a.relation.clone(),
                scope: a.scope.iter().map(|e| e.token()).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::relations;

    fn lang_of(pairs: Vec<(&str, BooleanRelation)>) -> ConstraintLanguage {
        ConstraintLanguage::from_pairs(pairs.into_iter().map(|(n, r)| (n.to_string(), r))).unwrap()
    }

    #[test]
    fn projections_preserve_everything() {
        let rels = [
            relations::r_one_in_three(),
            relations::even(3),
            BooleanRelation::empty(2),
            BooleanRelation::full(2),
        ];
        for rel in &rels {
            for i in 0..2 {
                assert!(is_invariant(rel, &BooleanOperation::projection(2, i)));
            }
        }
    }

    #[test]
    fn one_in_three_not_invariant_under_and() {
        // and2 on (-1,+1,+1) and (+1,-1,+1) gives (+1,+1,+1), outside R13.
        assert!(!is_invariant(
            &relations::r_one_in_three(),
            &BooleanOperation::and2()
        ));
    }

    #[test]
    fn even_parity_invariant_under_xor3() {
        assert!(is_invariant(&relations::even(3), &BooleanOperation::xor3()));
        assert!(is_invariant(&relations::odd(3), &BooleanOperation::xor3()));
    }

    #[test]
    fn full_binary_language_has_all_flags() {
        let lang = lang_of(vec![("T", relations::t2())]);
        let flags = schaefer_flags(&lang);
        assert!(flags.zero_valid);
        assert!(flags.one_valid);
        assert!(flags.bijunctive);
        assert!(flags.horn);
        assert!(flags.dual_horn);
        assert!(flags.affine);
        assert!(gap_verdict(&lang).is_no_gap());
    }

    #[test]
    fn one_in_three_has_no_flags() {
        let lang = lang_of(vec![("R13", relations::r_one_in_three())]);
        let flags = schaefer_flags(&lang);
        assert!(!flags.zero_valid);
        assert!(!flags.one_valid);
        assert!(!flags.bijunctive);
        assert!(!flags.horn);
        assert!(!flags.dual_horn);
        assert!(!flags.affine);
        assert!(!gap_verdict(&lang).is_no_gap());
    }

    #[test]
    fn even3_flag_pattern() {
        let lang = lang_of(vec![("even3", relations::even(3))]);
        let flags = schaefer_flags(&lang);
        assert!(flags.zero_valid);
        assert!(!flags.one_valid);
        assert!(flags.affine);
        assert!(!flags.horn);
        assert!(!flags.dual_horn);
        assert!(!flags.bijunctive);
    }

    #[test]
    fn parity_language_has_gaps_of_all_kinds() {
        let lang = lang_of(vec![
            ("even3", relations::even(3)),
            ("odd3", relations::odd(3)),
        ]);
        match gap_verdict(&lang) {
            GapVerdict::GapsOfAllKinds { flags, notes } => {
                assert!(flags.affine);
                assert_eq!(notes.len(), 3);
            }
            v => panic!("expected gaps, got {v:?}"),
        }
    }

    #[test]
    fn minimal_clones_for_one_in_three_is_empty() {
        let lang = lang_of(vec![("R13", relations::r_one_in_three())]);
        let analysis = minimal_clone_analysis(&lang);
        assert!(analysis.clones.is_empty());
        assert!(analysis.summary.contains("I2"));
    }

    #[test]
    fn minimal_clones_for_parity_fragment_is_l2() {
        let lang = lang_of(vec![
            ("even3", relations::even(3)),
            ("odd3", relations::odd(3)),
        ]);
        let analysis = minimal_clone_analysis(&lang);
        assert_eq!(analysis.clones, vec![CloneName::L2]);
    }

    #[test]
    fn minimal_clones_for_equality_is_all_seven() {
        let lang = lang_of(vec![("eq", relations::equality())]);
        let analysis = minimal_clone_analysis(&lang);
        assert_eq!(analysis.clones.len(), 7);
    }

    #[test]
    fn composition_closure_spot_checks() {
        // If R is invariant under f and under each g_i, it is invariant under
        // the composition.
        let rels = [relations::even(3), relations::equality(), relations::t2()];
        let f = BooleanOperation::xor3();
        let gs = [
            BooleanOperation::projection(2, 0),
            BooleanOperation::projection(2, 1),
            BooleanOperation::projection(2, 0),
        ];
        let h = f.compose(&gs).unwrap();
        for rel in &rels {
            if is_invariant(rel, &f) && gs.iter().all(|g| is_invariant(rel, g)) {
                assert!(is_invariant(rel, &h));
            }
        }
        // maj3 composed with projections of arity 3 is again a polymorphism
        // of anything maj3 preserves.
        let maj = BooleanOperation::maj3();
        let gs3 = [
            BooleanOperation::projection(3, 1),
            BooleanOperation::projection(3, 2),
            BooleanOperation::projection(3, 0),
        ];
        let h3 = maj.compose(&gs3).unwrap();
        let two_clause = relations::clause(&[1, 1]);
        assert!(is_invariant(&two_clause, &maj));
        assert!(is_invariant(&two_clause, &h3));
    }

    fn ji_formula() -> PpFormula {
        PpFormula::new(
            vec!["Z1".into(), "Z2".into()],
            vec!["U1".into(), "U2".into(), "U3".into(), "U4".into()],
            vec![
                Atom {
                    relation: "R13".into(),
                    scope: vec![
                        ScopeEntry::Var("Z1".into()),
                        ScopeEntry::Var("U1".into()),
                        ScopeEntry::Var("U4".into()),
                    ],
                },
                Atom {
                    relation: "R13".into(),
                    scope: vec![
                        ScopeEntry::Var("Z2".into()),
                        ScopeEntry::Var("U2".into()),
                        ScopeEntry::Var("U4".into()),
                    ],
                },
                Atom {
                    relation: "R13".into(),
                    scope: vec![
                        ScopeEntry::Var("U1".into()),
                        ScopeEntry::Var("U2".into()),
                        ScopeEntry::Var("U3".into()),
                    ],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn ji_formula_defines_full_binary_relation() {
        let lang = lang_of(vec![("R13", relations::r_one_in_three())]);
        let formula = ji_formula();
        for idx in 0..4 {
            let a = tuple_from_index(idx, 2);
            assert!(eval_pp(&formula, &lang, &a).unwrap(), "failed at {a:?}");
        }
        assert_eq!(pp_defines(&formula, &lang).unwrap(), relations::t2());
    }

    #[test]
    fn single_equality_atom_membership() {
        let lang = lang_of(vec![("eq", relations::equality())]);
        let formula = PpFormula::identity("eq", 2);
        assert!(!eval_pp(&formula, &lang, &[1, -1]).unwrap());
        assert!(eval_pp(&formula, &lang, &[1, 1]).unwrap());
        assert_eq!(pp_defines(&formula, &lang).unwrap(), relations::equality());
    }

    #[test]
    fn exists_parity_witness_defines_full_relation() {
        // ∃y even3(x1, x2, y): y = x1*x2 always witnesses.
        let lang = lang_of(vec![("even3", relations::even(3))]);
        let formula = PpFormula::new(
            vec!["x1".into(), "x2".into()],
            vec!["y".into()],
            vec![Atom {
                relation: "even3".into(),
                scope: vec![
                    ScopeEntry::Var("x1".into()),
                    ScopeEntry::Var("x2".into()),
                    ScopeEntry::Var("y".into()),
                ],
            }],
        )
        .unwrap();
        for idx in 0..4 {
            assert!(eval_pp(&formula, &lang, &tuple_from_index(idx, 2)).unwrap());
        }
        assert_eq!(pp_defines(&formula, &lang).unwrap(), relations::t2());
    }

    #[test]
    fn parity_atom_with_constant_defines_equality() {
        // even3(x1, x2, +1): x1*x2 = 1, i.e. equality.
        let lang = lang_of(vec![("even3", relations::even(3))]);
        let formula = PpFormula::new(
            vec!["x1".into(), "x2".into()],
            vec![],
            vec![Atom {
                relation: "even3".into(),
                scope: vec![
                    ScopeEntry::Var("x1".into()),
                    ScopeEntry::Var("x2".into()),
                    ScopeEntry::Const(1),
                ],
            }],
        )
        .unwrap();
        assert_eq!(pp_defines(&formula, &lang).unwrap(), relations::equality());
    }

    #[test]
    fn identity_formula_returns_relation_exactly() {
        for rel in [
            relations::r_one_in_three(),
            relations::even(3),
            relations::or2(),
            BooleanRelation::empty(2),
        ] {
            let lang = lang_of(vec![("R", rel.clone())]);
            let formula = PpFormula::identity("R", rel.arity());
            assert_eq!(pp_defines(&formula, &lang).unwrap(), rel);
        }
    }

    #[test]
    fn constants_replaceable_by_singleton_constrained_variables() {
        // Replacing each constant by a fresh bound variable pinned by the
        // matching singleton relation defines the same relation.
        let lang = lang_of(vec![
            ("even3", relations::even(3)),
            (
                "single_true",
                BooleanRelation::new(1, vec![vec![-1]]).unwrap(),
            ),
            (
                "single_false",
                BooleanRelation::new(1, vec![vec![1]]).unwrap(),
            ),
        ]);
        let with_const = PpFormula::new(
            vec!["x1".into(), "x2".into()],
            vec![],
            vec![Atom {
                relation: "even3".into(),
                scope: vec![
                    ScopeEntry::Var("x1".into()),
                    ScopeEntry::Var("x2".into()),
                    ScopeEntry::Const(-1),
                ],
            }],
        )
        .unwrap();
        let with_var = PpFormula::new(
            vec!["x1".into(), "x2".into()],
            vec!["z".into()],
            vec![
                Atom {
                    relation: "even3".into(),
                    scope: vec![
                        ScopeEntry::Var("x1".into()),
                        ScopeEntry::Var("x2".into()),
                        ScopeEntry::Var("z".into()),
                    ],
                },
                Atom {
                    relation: "single_true".into(),
                    scope: vec![ScopeEntry::Var("z".into())],
                },
            ],
        )
        .unwrap();
        assert_eq!(
            pp_defines(&with_const, &lang).unwrap(),
            pp_defines(&with_var, &lang).unwrap()
        );
    }

    #[test]
    fn quantifier_cap_is_enforced() {
        let lang = lang_of(vec![("T", relations::t2())]);
        let bound: Vec<String> = (0..=MAX_QUANTIFIED).map(|i| format!("y{i}")).collect();
        let formula = PpFormula::new(vec!["x".into()], bound, vec![]).unwrap();
        assert!(matches!(
            eval_pp(&formula, &lang, &[1]),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn pp_formula_json_round_trip() {
        let f = ji_formula();
        let text = serialize_pp_formula(&f);
        assert_eq!(parse_pp_formula(&text).unwrap(), f);
    }
}

//! Boolean-domain decision procedures with verifiable certificates.
//!
//! - [`solve_brute`]: exact maximum over all assignments, with a
//!   lexicographically smallest maximizing witness.
//! - [`solve_2sat`]: implication-graph reachability. Unsatisfiability is
//!   certified by two literal paths, one from a variable to its negation and
//!   one back.
//! - [`solve_horn`] / [`solve_dual_horn`]: unit resolution. Unsatisfiability
//!   is certified by a resolution derivation of the empty clause; the
//!   satisfying witness is the minimal model under the all-false
//!   (respectively all-true) start.
//! - [`solve_gf2`]: elimination on parity equations in the multiplicative
//!   `{+1,-1}` encoding. Unsatisfiability is certified by a subset of rows
//!   whose left-hand sides multiply to the constant 1 while the right-hand
//!   sides multiply to -1.
//!
//! The module also converts instances over bijunctive / Horn / dual-Horn /
//! affine relations into the clause or parity form the specialized solvers
//! consume, by enumerating all implied clauses (or parity equations) of each
//! relation and checking that they define the relation exactly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{
    boolean_value, tuple_from_index, BooleanAssignment, BooleanRelation, Instance, ScopeEntry, Sign,
};
use crate::scalar::{rat, Rational};

/// Hard cap on variables for exhaustive search.
pub const BRUTE_FORCE_CAP: usize = 24;

/// A literal: a variable together with its sign.
///
/// The sign follows the clause convention of the `{+1,-1}` encoding:
/// `sign = +1` is the positive literal `x`, `sign = -1` is `¬x`, and an
/// assignment satisfies the literal when it gives the variable the value
/// `-sign`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: String,
    pub sign: Sign,
}

impl Literal {
    pub fn positive(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            sign: 1,
        }
    }

    pub fn negative(var: impl Into<String>) -> Self {
        Literal {
            var: var.into(),
            sign: -1,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            var: self.var.clone(),
            sign: -self.sign,
        }
    }

    pub fn satisfied_by(&self, a: &BooleanAssignment) -> bool {
        a.get(&self.var) == Some(-self.sign)
    }
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign == 1 {
            write!(f, "{}", self.var)
        } else {
            write!(f, "¬{}", self.var)
        }
    }
}

/// A disjunction of literals.
pub type Clause = Vec<Literal>;

/// Whether an assignment satisfies the clause (some literal satisfied).
pub fn clause_satisfied(clause: &Clause, a: &BooleanAssignment) -> bool {
    clause.iter().any(|l| l.satisfied_by(a))
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

/// Exact value of the instance and the lexicographically smallest assignment
/// attaining it (`-1 < +1`, leftmost variable most significant).
pub fn solve_brute(inst: &Instance) -> Result<(Rational, BooleanAssignment)> {
    let vars = inst.variables();
    let n = vars.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded(format!(
            "{n} variables exceed the brute-force cap {BRUTE_FORCE_CAP}"
        )));
    }
    let mut best: Option<(Rational, BooleanAssignment)> = None;
    for code in 0..(1u64 << n) {
        let a = BooleanAssignment::from_pairs(vars.iter().enumerate().map(|(i, v)| {
            // Leftmost variable is the most significant digit; 0 means -1 so
            // ascending codes enumerate assignments in lexicographic order.
            let bit = (code >> (n - 1 - i)) & 1;
            (v.clone(), if bit == 0 { -1 } else { 1 })
        }));
        let value = boolean_value(inst, &a)?;
        let better = match &best {
            None => true,
            Some((b, _)) => value > *b,
        };
        if better {
            let done = value == rat(1);
            best = Some((value, a));
            if done {
                break;
            }
        }
    }
    Ok(best.expect("at least the empty assignment was evaluated"))
}

// ---------------------------------------------------------------------------
// 2SAT via the implication graph
// ---------------------------------------------------------------------------

/// Unsatisfiability certificate: literal paths `var -> ¬var -> var` in the
/// implication graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSatCertificate {
    pub variable: String,
    /// Vertices of a directed path from the positive literal to the negative.
    pub path_to_negation: Vec<Literal>,
    /// Vertices of a directed path from the negative literal to the positive.
    pub path_back: Vec<Literal>,
}

/// Result of the 2SAT decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoSatResult {
    Sat(BooleanAssignment),
    Unsat(TwoSatCertificate),
}

/// The implication graph of a set of at-most-2-literal clauses: one vertex
/// per literal, and per clause `(l1 ∨ l2)` the edges `¬l1 -> l2` and
/// `¬l2 -> l1`. A unit clause `(l)` contributes `¬l -> l`.
pub struct ImplicationGraph {
    vars: Vec<String>,
    index: BTreeMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

impl ImplicationGraph {
    /// Vertex id of a literal: `2*var + (1 if negative)`.
    fn vertex(&self, lit: &Literal) -> usize {
        2 * self.index[&lit.var] + usize::from(lit.sign == -1)
    }

    fn literal(&self, v: usize) -> Literal {
        Literal {
            var: self.vars[v / 2].clone(),
            sign: if v % 2 == 1 { -1 } else { 1 },
        }
    }

    fn complement_vertex(v: usize) -> usize {
        v ^ 1
    }

    /// Build from clauses; rejects empty clauses and clauses longer than two.
    pub fn new(clauses: &[Clause]) -> Result<Self> {
        let mut vars = Vec::new();
        let mut index = BTreeMap::new();
        for c in clauses {
            if c.is_empty() {
                return Err(Error::InvalidInput(
                    "2SAT does not accept empty clauses".into(),
                ));
            }
            if c.len() > 2 {
                return Err(Error::InvalidInput(format!(
                    "clause with {} literals is not a 2-clause",
                    c.len()
                )));
            }
            for l in c {
                if !index.contains_key(&l.var) {
                    index.insert(l.var.clone(), vars.len());
                    vars.push(l.var.clone());
                }
            }
        }
        let mut graph = ImplicationGraph {
            adj: vec![Vec::new(); 2 * vars.len()],
            edges: BTreeSet::new(),
            vars,
            index,
        };
        for c in clauses {
            let (l1, l2) = match c.len() {
                1 => (&c[0], &c[0]),
                _ => (&c[0], &c[1]),
            };
            let a = graph.vertex(l1);
            let b = graph.vertex(l2);
            graph.add_edge(Self::complement_vertex(a), b);
            graph.add_edge(Self::complement_vertex(b), a);
        }
        Ok(graph)
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        if self.edges.insert((u, v)) {
            self.adj[u].push(v);
        }
    }

    pub fn has_edge(&self, from: &Literal, to: &Literal) -> bool {
        match (self.index.get(&from.var), self.index.get(&to.var)) {
            (Some(_), Some(_)) => self.edges.contains(&(self.vertex(from), self.vertex(to))),
            _ => false,
        }
    }

    /// BFS parents from `start`; `parent[v] = usize::MAX` where unreached.
    fn bfs(&self, start: usize) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let mut parent = vec![UNSEEN; self.adj.len()];
        parent[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if parent[v] == UNSEEN {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    fn path(&self, parent: &[usize], start: usize, end: usize) -> Option<Vec<Literal>> {
        if parent[end] == usize::MAX {
            return None;
        }
        let mut rev = vec![end];
        let mut cur = end;
        while cur != start {
            cur = parent[cur];
            rev.push(cur);
        }
        rev.reverse();
        Some(rev.into_iter().map(|v| self.literal(v)).collect())
    }
}

/// Decide a set of at-most-2-literal clauses.
pub fn solve_2sat(clauses: &[Clause]) -> Result<TwoSatResult> {
    let graph = ImplicationGraph::new(clauses)?;
    let n = graph.vars.len();

    // Unsatisfiable exactly when some variable reaches its negation and back.
    for v in 0..n {
        let pos = 2 * v;
        let neg = 2 * v + 1;
        let from_pos = graph.bfs(pos);
        if from_pos[neg] == usize::MAX {
            continue;
        }
        let from_neg = graph.bfs(neg);
        if from_neg[pos] == usize::MAX {
            continue;
        }
        return Ok(TwoSatResult::Unsat(TwoSatCertificate {
            variable: graph.vars[v].clone(),
            path_to_negation: graph.path(&from_pos, pos, neg).expect("reachable"),
            path_back: graph.path(&from_neg, neg, pos).expect("reachable"),
        }));
    }

    // Satisfiable: assign whole implication closures at a time. A closure
    // that contains no complementary pair can be committed outright; since
    // committed sets are closed under implications, later closures cannot
    // conflict with them.
    let mut holds: Vec<Option<bool>> = vec![None; 2 * n];
    for v in 0..n {
        if holds[2 * v].is_some() {
            continue;
        }
        let mut committed = false;
        for start in [2 * v, 2 * v + 1] {
            let parent = graph.bfs(start);
            let closure: Vec<usize> = (0..2 * n).filter(|&u| parent[u] != usize::MAX).collect();
            let consistent = closure.iter().all(|&u| {
                parent[ImplicationGraph::complement_vertex(u)] == usize::MAX
                    && holds[u] != Some(false)
            });
            if consistent {
                for &u in &closure {
                    holds[u] = Some(true);
                    holds[ImplicationGraph::complement_vertex(u)] = Some(false);
                }
                committed = true;
                break;
            }
        }
        debug_assert!(committed, "both closures inconsistent in a SAT instance");
        if !committed {
            return Err(Error::BrokenPrecondition(
                "2SAT witness construction failed after reachability said satisfiable".into(),
            ));
        }
    }
    let assignment =
        BooleanAssignment::from_pairs(graph.vars.iter().enumerate().map(|(v, name)| {
            // The positive literal holds exactly when the variable is true (-1).
            (
                name.clone(),
                if holds[2 * v] == Some(true) { -1 } else { 1 },
            )
        }));
    if !clauses.iter().all(|c| clause_satisfied(c, &assignment)) {
        return Err(Error::BrokenPrecondition(
            "constructed witness fails a clause it was built to satisfy".into(),
        ));
    }
    Ok(TwoSatResult::Sat(assignment))
}

/// Re-verify an unsatisfiability certificate against the clause set: both
/// paths must walk existing implication edges and connect `x` to `¬x` and
/// back.
pub fn verify_2sat_certificate(clauses: &[Clause], cert: &TwoSatCertificate) -> bool {
    let Ok(graph) = ImplicationGraph::new(clauses) else {
        return false;
    };
    let pos = Literal::positive(cert.variable.clone());
    let neg = Literal::negative(cert.variable.clone());
    let path_ok = |path: &[Literal], from: &Literal, to: &Literal| {
        path.first() == Some(from)
            && path.last() == Some(to)
            && path.windows(2).all(|w| graph.has_edge(&w[0], &w[1]))
    };
    path_ok(&cert.path_to_negation, &pos, &neg) && path_ok(&cert.path_back, &neg, &pos)
}

// ---------------------------------------------------------------------------
// Horn and dual-Horn via unit resolution
// ---------------------------------------------------------------------------

/// One step of a unit-resolution derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationStep {
    /// A clause of the input, by index.
    Input { clause: usize },
    /// Unit resolution of two earlier steps (0-based indices into the
    /// derivation); `unit` must be a single literal and `resolvent` the other
    /// premise minus the complementary literal.
    Resolve {
        premise: usize,
        unit: usize,
        resolvent: Clause,
    },
}

/// A unit-resolution derivation of the empty clause.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HornDerivation {
    pub steps: Vec<DerivationStep>,
}

/// Result of the Horn (or dual-Horn) decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HornResult {
    Sat(BooleanAssignment),
    Unsat(HornDerivation),
}

fn clause_of_step(clauses: &[Clause], steps: &[DerivationStep], i: usize) -> Clause {
    match &steps[i] {
        DerivationStep::Input { clause } => clauses[*clause].clone(),
        DerivationStep::Resolve { resolvent, .. } => resolvent.clone(),
    }
}

/// Decide a Horn instance (every clause has at most one positive literal).
///
/// The satisfying witness is the minimal model: start everything at `+1`
/// (false) and propagate forced positive units in clause-list order.
pub fn solve_horn(clauses: &[Clause]) -> Result<HornResult> {
    for c in clauses {
        if c.iter().filter(|l| l.sign == 1).count() > 1 {
            return Err(Error::InvalidInput(
                "clause with two positive literals is not Horn".into(),
            ));
        }
    }
    solve_by_unit_resolution(clauses, 1)
}

/// Decide a dual-Horn instance (at most one negative literal per clause).
/// The witness is minimal from the all-true start.
pub fn solve_dual_horn(clauses: &[Clause]) -> Result<HornResult> {
    for c in clauses {
        if c.iter().filter(|l| l.sign == -1).count() > 1 {
            return Err(Error::InvalidInput(
                "clause with two negative literals is not dual Horn".into(),
            ));
        }
    }
    solve_by_unit_resolution(clauses, -1)
}

/// Shared engine. `default_value` is what unforced variables get: `+1`
/// (false) for Horn, `-1` (true) for dual Horn.
fn solve_by_unit_resolution(clauses: &[Clause], default_value: Sign) -> Result<HornResult> {
    let mut steps: Vec<DerivationStep> = Vec::new();
    // Unit literal -> derivation step that produced it.
    let mut units: BTreeMap<Literal, usize> = BTreeMap::new();
    let mut vars: BTreeSet<String> = BTreeSet::new();

    for (i, c) in clauses.iter().enumerate() {
        for l in c {
            vars.insert(l.var.clone());
        }
        if c.is_empty() {
            return Err(Error::InvalidInput(
                "unit resolution does not accept an empty input clause".into(),
            ));
        }
        steps.push(DerivationStep::Input { clause: i });
        if c.len() == 1 {
            units.entry(c[0].clone()).or_insert(steps.len() - 1);
        }
    }

    // Propagate to fixpoint in clause-list order.
    loop {
        let mut progressed = false;
        for i in 0..clauses.len() {
            let clause = &clauses[i];
            if clause.len() < 2 {
                continue;
            }
            // Skip once some literal is itself a derived unit (the clause is
            // already satisfied in the minimal model).
            if clause.iter().any(|l| units.contains_key(l)) {
                continue;
            }
            let falsified: Vec<(usize, usize)> = clause
                .iter()
                .enumerate()
                .filter_map(|(j, l)| units.get(&l.complement()).map(|&s| (j, s)))
                .collect();
            if falsified.len() < clause.len() - 1 {
                continue;
            }
            // Resolve away every falsified literal one at a time.
            let mut premise_step = steps
                .iter()
                .position(|s| matches!(s, DerivationStep::Input { clause: c } if *c == i))
                .expect("input step exists");
            let mut current = clause.clone();
            for (j, unit_step) in falsified.iter().take(clause.len() - 1) {
                let lit = &clause[*j];
                let resolvent: Clause = current.iter().filter(|l| *l != lit).cloned().collect();
                steps.push(DerivationStep::Resolve {
                    premise: premise_step,
                    unit: *unit_step,
                    resolvent: resolvent.clone(),
                });
                premise_step = steps.len() - 1;
                current = resolvent;
            }
            if falsified.len() == clause.len() {
                // All literals falsified: one more resolution gives the empty
                // clause.
                let (_, unit_step) = falsified[clause.len() - 1];
                steps.push(DerivationStep::Resolve {
                    premise: premise_step,
                    unit: unit_step,
                    resolvent: vec![],
                });
                return Ok(HornResult::Unsat(prune_derivation(clauses, steps)));
            }
            debug_assert_eq!(current.len(), 1);
            units.entry(current[0].clone()).or_insert(steps.len() - 1);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }

    // Complementary derived units close the refutation.
    for (lit, &s) in &units {
        if let Some(&t) = units.get(&lit.complement()) {
            steps.push(DerivationStep::Resolve {
                premise: s,
                unit: t,
                resolvent: vec![],
            });
            return Ok(HornResult::Unsat(prune_derivation(clauses, steps)));
        }
    }

    let mut assignment = BooleanAssignment::new();
    for v in &vars {
        assignment.set(v.clone(), default_value);
    }
    for lit in units.keys() {
        assignment.set(lit.var.clone(), -lit.sign);
    }
    if !clauses.iter().all(|c| clause_satisfied(c, &assignment)) {
        return Err(Error::BrokenPrecondition(
            "propagated model fails a clause it was built to satisfy".into(),
        ));
    }
    Ok(HornResult::Sat(assignment))
}

/// Drop steps that do not feed the final empty clause, reindexing premises.
fn prune_derivation(_clauses: &[Clause], steps: Vec<DerivationStep>) -> HornDerivation {
    let mut needed = vec![false; steps.len()];
    let mut stack = vec![steps.len() - 1];
    while let Some(i) = stack.pop() {
        if needed[i] {
            continue;
        }
        needed[i] = true;
        if let DerivationStep::Resolve { premise, unit, .. } = &steps[i] {
            stack.push(*premise);
            stack.push(*unit);
        }
    }
    let mut remap = vec![usize::MAX; steps.len()];
    let mut kept = Vec::new();
    for (i, step) in steps.into_iter().enumerate() {
        if needed[i] {
            remap[i] = kept.len();
            kept.push(match step {
                DerivationStep::Resolve {
                    premise,
                    unit,
                    resolvent,
                } => DerivationStep::Resolve {
                    premise: remap[premise],
                    unit: remap[unit],
                    resolvent,
                },
                s => s,
            });
        }
    }
    HornDerivation { steps: kept }
}

/// Re-verify a derivation: every step is an input clause or a legal unit
/// resolution of earlier steps, and the last step is the empty clause.
pub fn verify_horn_derivation(clauses: &[Clause], derivation: &HornDerivation) -> bool {
    let steps = &derivation.steps;
    if steps.is_empty() {
        return false;
    }
    for (i, step) in steps.iter().enumerate() {
        match step {
            DerivationStep::Input { clause } => {
                if *clause >= clauses.len() {
                    return false;
                }
            }
            DerivationStep::Resolve {
                premise,
                unit,
                resolvent,
            } => {
                if *premise >= i || *unit >= i {
                    return false;
                }
                let unit_clause = clause_of_step(clauses, steps, *unit);
                if unit_clause.len() != 1 {
                    return false;
                }
                let pivot = unit_clause[0].complement();
                let premise_clause = clause_of_step(clauses, steps, *premise);
                if !premise_clause.contains(&pivot) {
                    return false;
                }
                let expected: Clause = premise_clause
                    .iter()
                    .filter(|l| **l != pivot)
                    .cloned()
                    .collect();
                if *resolvent != expected {
                    return false;
                }
            }
        }
    }
    clause_of_step(clauses, steps, steps.len() - 1).is_empty()
}

// ---------------------------------------------------------------------------
// Parity systems over the two-element field
// ---------------------------------------------------------------------------

/// A system of parity equations `prod_{i in S} x_i = rhs` over densely
/// indexed variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySystem {
    nvars: usize,
    rows: Vec<(BTreeSet<usize>, Sign)>,
}

impl ParitySystem {
    /// Rows must have nonempty index sets within range and `{+1,-1}` sides.
    pub fn new(nvars: usize, rows: Vec<(BTreeSet<usize>, Sign)>) -> Result<Self> {
        for (i, (set, rhs)) in rows.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "parity row {i} has an empty index set"
                )));
            }
            if set.iter().any(|&v| v >= nvars) {
                return Err(Error::InvalidInput(format!(
                    "parity row {i} mentions a variable out of range"
                )));
            }
            if *rhs != 1 && *rhs != -1 {
                return Err(Error::InvalidInput(format!(
                    "parity row {i} has right-hand side outside {{+1,-1}}"
                )));
            }
        }
        Ok(ParitySystem { nvars, rows })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> &[(BTreeSet<usize>, Sign)] {
        &self.rows
    }
}

/// Unsatisfiability certificate: indices of rows whose combination is
/// `1 = -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Certificate {
    pub rows: Vec<usize>,
}

/// Result of parity solving; the witness is indexed like the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gf2Result {
    Sat(Vec<Sign>),
    Unsat(Gf2Certificate),
}

/// Gauss-Jordan elimination in the multiplicative encoding (multiplying two
/// equations cancels shared variables because `x^2 = 1`).
pub fn solve_gf2(sys: &ParitySystem) -> Gf2Result {
    #[derive(Clone)]
    struct Row {
        set: BTreeSet<usize>,
        rhs: Sign,
        provenance: BTreeSet<usize>,
    }
    let mut rows: Vec<Row> = sys
        .rows
        .iter()
        .enumerate()
        .map(|(i, (set, rhs))| Row {
            set: set.clone(),
            rhs: *rhs,
            provenance: BTreeSet::from([i]),
        })
        .collect();

    let combine = |a: &Row, b: &Row| Row {
        set: a.set.symmetric_difference(&b.set).cloned().collect(),
        rhs: a.rhs * b.rhs,
        provenance: a
            .provenance
            .symmetric_difference(&b.provenance)
            .cloned()
            .collect(),
    };

    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows.len()];
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for var in 0..sys.nvars {
        let Some(p) = (0..rows.len()).find(|&r| !used.contains(&r) && rows[r].set.contains(&var))
        else {
            continue;
        };
        used.insert(p);
        pivot_of_row[p] = Some(var);
        let pivot_row = rows[p].clone();
        for r in 0..rows.len() {
            if r != p && rows[r].set.contains(&var) {
                rows[r] = combine(&rows[r], &pivot_row);
            }
        }
    }

    if let Some(bad) = rows.iter().find(|r| r.set.is_empty() && r.rhs == -1) {
        return Gf2Result::Unsat(Gf2Certificate {
            rows: bad.provenance.iter().cloned().collect(),
        });
    }

    // Free variables default to +1; pivots are then forced directly.
    let mut witness = vec![1i8; sys.nvars];
    for (r, row) in rows.iter().enumerate() {
        if let Some(p) = pivot_of_row[r] {
            let rest: Sign = row
                .set
                .iter()
                .filter(|&&v| v != p)
                .map(|&v| witness[v])
                .product();
            witness[p] = row.rhs * rest;
        }
    }
    assert!(
        sys.rows
            .iter()
            .all(|(set, rhs)| set.iter().map(|&v| witness[v]).product::<Sign>() == *rhs),
        "back substitution must satisfy every row"
    );
    Gf2Result::Sat(witness)
}

/// Re-verify a parity certificate: the chosen rows' index sets cancel
/// completely while their right-hand sides multiply to -1.
pub fn verify_gf2_certificate(sys: &ParitySystem, cert: &Gf2Certificate) -> bool {
    let mut acc: BTreeSet<usize> = BTreeSet::new();
    let mut rhs: Sign = 1;
    let mut seen = BTreeSet::new();
    for &r in &cert.rows {
        if r >= sys.rows.len() || !seen.insert(r) {
            return false;
        }
        let (set, b) = &sys.rows[r];
        acc = acc.symmetric_difference(set).cloned().collect();
        rhs *= *b;
    }
    acc.is_empty() && rhs == -1
}

// ---------------------------------------------------------------------------
// Instance conversion
// ---------------------------------------------------------------------------

/// Shape of implied clauses to decompose a relation into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseShape {
    /// At most two literals.
    TwoSat,
    /// At most one positive literal.
    Horn,
    /// At most one negative literal.
    DualHorn,
}

impl ClauseShape {
    fn admits(&self, signs: &[Sign], len: usize) -> bool {
        match self {
            ClauseShape::TwoSat => len <= 2,
            ClauseShape::Horn => signs.iter().filter(|&&s| s == 1).count() <= 1,
            ClauseShape::DualHorn => signs.iter().filter(|&&s| s == -1).count() <= 1,
        }
    }
}

/// A clause over positions of a relation, as `(position, sign)` pairs.
pub type PositionClause = Vec<(usize, Sign)>;

fn position_clause_satisfied(clause: &PositionClause, tuple: &[Sign]) -> bool {
    clause.iter().any(|&(p, s)| tuple[p] == -s)
}

/// All clauses of the given shape implied by the relation (satisfied by every
/// tuple), restricted to distinct positions in increasing order.
pub fn implied_clauses(rel: &BooleanRelation, shape: ClauseShape) -> Vec<PositionClause> {
    let r = rel.arity();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << r) {
        let positions: Vec<usize> = (0..r).filter(|i| (mask >> i) & 1 == 1).collect();
        let len = positions.len();
        if matches!(shape, ClauseShape::TwoSat) && len > 2 {
            continue;
        }
        for signs_code in 0..(1usize << len) {
            let signs: Vec<Sign> = tuple_from_index(signs_code, len);
            if !shape.admits(&signs, len) {
                continue;
            }
            let clause: PositionClause = positions
                .iter()
                .cloned()
                .zip(signs.iter().cloned())
                .collect();
            if rel.tuples().all(|t| position_clause_satisfied(&clause, t)) {
                out.push(clause);
            }
        }
    }
    out
}

/// Decompose a relation into implied clauses of the shape; `None` when the
/// conjunction of all implied clauses does not define the relation (i.e. the
/// relation is outside the class).
pub fn decompose(rel: &BooleanRelation, shape: ClauseShape) -> Option<Vec<PositionClause>> {
    let clauses = implied_clauses(rel, shape);
    let r = rel.arity();
    for idx in 0..(1usize << r) {
        let tuple = tuple_from_index(idx, r);
        let models = clauses.iter().all(|c| position_clause_satisfied(c, &tuple));
        if models != rel.contains(&tuple) {
            return None;
        }
    }
    Some(clauses)
}

/// Result of converting an instance to clause or parity form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conversion<T> {
    Converted(T),
    /// Some constraint is unsatisfiable on its own after substituting its
    /// scope (so the instance is trivially unsatisfiable).
    ConstraintUnsatisfiable {
        constraint: usize,
    },
}

/// Substitute a scope into a position clause, folding constants and repeated
/// variables. `None` means the clause became a tautology.
fn substitute_clause(clause: &PositionClause, scope: &[ScopeEntry]) -> Option<Clause> {
    let mut lits: Vec<Literal> = Vec::new();
    for &(pos, sign) in clause {
        match &scope[pos] {
            ScopeEntry::Const(c) => {
                if *c == -sign {
                    return None; // constant satisfies the clause
                }
                // Falsified literal: drop it.
            }
            ScopeEntry::Var(v) => {
                let lit = Literal {
                    var: v.clone(),
                    sign,
                };
                if lits.contains(&lit.complement()) {
                    return None; // x or ¬x: tautology
                }
                if !lits.contains(&lit) {
                    lits.push(lit);
                }
            }
        }
    }
    Some(lits)
}

/// Convert an instance whose relations all decompose in the given clause
/// shape into a clause list.
pub fn instance_to_clauses(inst: &Instance, shape: ClauseShape) -> Result<Conversion<Vec<Clause>>> {
    let mut decomposed: BTreeMap<&str, Vec<PositionClause>> = BTreeMap::new();
    for (name, rel) in inst.language().iter() {
        if let Some(d) = decompose(rel, shape) {
            decomposed.insert(name.as_str(), d);
        }
    }
    let mut clauses = Vec::new();
    for (i, c) in inst.constraints().iter().enumerate() {
        let Some(position_clauses) = decomposed.get(c.relation.as_str()) else {
            return Err(Error::InvalidInput(format!(
                "relation `{}` does not decompose into {:?} clauses",
                c.relation, shape
            )));
        };
        for pc in position_clauses {
            match substitute_clause(pc, &c.scope) {
                None => {}
                Some(cl) if cl.is_empty() => {
                    return Ok(Conversion::ConstraintUnsatisfiable { constraint: i });
                }
                Some(cl) => clauses.push(cl),
            }
        }
    }
    Ok(Conversion::Converted(clauses))
}

/// All parity equations implied by a relation, as `(position set, rhs)`.
pub fn implied_parities(rel: &BooleanRelation) -> Vec<(BTreeSet<usize>, Sign)> {
    let r = rel.arity();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << r) {
        let positions: BTreeSet<usize> = (0..r).filter(|i| (mask >> i) & 1 == 1).collect();
        for rhs in [1i8, -1] {
            if rel
                .tuples()
                .all(|t| positions.iter().map(|&p| t[p]).product::<Sign>() == rhs)
            {
                out.push((positions.clone(), rhs));
            }
        }
    }
    out
}

/// Decompose a relation into implied parity equations; `None` when the
/// relation is not affine.
pub fn decompose_parity(rel: &BooleanRelation) -> Option<Vec<(BTreeSet<usize>, Sign)>> {
    let eqs = implied_parities(rel);
    let r = rel.arity();
    for idx in 0..(1usize << r) {
        let tuple = tuple_from_index(idx, r);
        let models = eqs
            .iter()
            .all(|(set, rhs)| set.iter().map(|&p| tuple[p]).product::<Sign>() == *rhs);
        if models != rel.contains(&tuple) {
            return None;
        }
    }
    Some(eqs)
}

/// Convert an instance over affine relations into a parity system over the
/// instance's variable indices.
pub fn instance_to_parity(inst: &Instance) -> Result<Conversion<ParitySystem>> {
    let var_index: BTreeMap<&str, usize> = inst
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut decomposed: BTreeMap<&str, Vec<(BTreeSet<usize>, Sign)>> = BTreeMap::new();
    for (name, rel) in inst.language().iter() {
        if let Some(d) = decompose_parity(rel) {
            decomposed.insert(name.as_str(), d);
        }
    }
    let mut rows: Vec<(BTreeSet<usize>, Sign)> = Vec::new();
    for (i, c) in inst.constraints().iter().enumerate() {
        let Some(eqs) = decomposed.get(c.relation.as_str()) else {
            return Err(Error::InvalidInput(format!(
                "relation `{}` is not affine",
                c.relation
            )));
        };
        for (positions, rhs) in eqs {
            // Fold the scope: constants move to the right-hand side and
            // repeated variables cancel in pairs.
            let mut rhs = *rhs;
            let mut vars: BTreeSet<usize> = BTreeSet::new();
            for &p in positions {
                match &c.scope[p] {
                    ScopeEntry::Const(k) => rhs *= *k,
                    ScopeEntry::Var(v) => {
                        let idx = var_index[v.as_str()];
                        if !vars.insert(idx) {
                            vars.remove(&idx);
                        }
                    }
                }
            }
            if vars.is_empty() {
                if rhs == -1 {
                    return Ok(Conversion::ConstraintUnsatisfiable { constraint: i });
                }
            } else {
                rows.push((vars, rhs));
            }
        }
    }
    Ok(Conversion::Converted(ParitySystem::new(
        inst.variables().len(),
        rows,
    )?))
}

/// Turn a parity witness (indexed like the instance variables) into an
/// assignment.
pub fn parity_witness_to_assignment(inst: &Instance, witness: &[Sign]) -> BooleanAssignment {
    BooleanAssignment::from_pairs(
        inst.variables()
            .iter()
            .cloned()
            .zip(witness.iter().cloned()),
    )
}

/// Extend a partial witness to a total assignment on the instance's
/// variables, defaulting to `+1` (false). Variables absent from the clause
/// form are unconstrained, so any default preserves satisfaction.
pub fn complete_assignment(inst: &Instance, a: &BooleanAssignment) -> BooleanAssignment {
    let mut out = a.clone();
    for v in inst.variables() {
        if out.get(v).is_none() {
            out.set(v.clone(), 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{relations, Constraint, ConstraintLanguage};
    use crate::scalar::ratio;

    fn lit(v: &str, sign: Sign) -> Literal {
        Literal {
            var: v.into(),
            sign,
        }
    }

    #[test]
    fn brute_force_on_empty_instance() {
        let inst = Instance::new(ConstraintLanguage::new(), vec![], vec![]).unwrap();
        let (value, witness) = solve_brute(&inst).unwrap();
        assert_eq!(value, rat(1));
        assert_eq!(witness, BooleanAssignment::new());
    }

    #[test]
    fn brute_force_single_full_constraint_gives_lex_smallest_witness() {
        let lang = ConstraintLanguage::from_pairs([("T".to_string(), relations::t2())]).unwrap();
        let inst = Instance::new(
            lang,
            vec!["A".into(), "B".into()],
            vec![Constraint {
                relation: "T".into(),
                scope: vec![ScopeEntry::Var("A".into()), ScopeEntry::Var("B".into())],
            }],
        )
        .unwrap();
        let (value, witness) = solve_brute(&inst).unwrap();
        assert_eq!(value, rat(1));
        assert_eq!(witness.get("A"), Some(-1));
        assert_eq!(witness.get("B"), Some(-1));
    }

    #[test]
    fn brute_force_cap() {
        let vars: Vec<String> = (0..=BRUTE_FORCE_CAP).map(|i| format!("X{i}")).collect();
        let inst = Instance::new(ConstraintLanguage::new(), vars, vec![]).unwrap();
        assert!(matches!(solve_brute(&inst), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn two_sat_all_four_clauses_on_two_vars_unsat() {
        let clauses = vec![
            vec![lit("x", 1), lit("y", 1)],
            vec![lit("x", -1), lit("y", 1)],
            vec![lit("x", 1), lit("y", -1)],
            vec![lit("x", -1), lit("y", -1)],
        ];
        match solve_2sat(&clauses).unwrap() {
            TwoSatResult::Unsat(cert) => {
                assert!(verify_2sat_certificate(&clauses, &cert));
            }
            TwoSatResult::Sat(_) => panic!("expected unsat"),
        }
    }

    #[test]
    fn two_sat_single_clause_sat() {
        let clauses = vec![vec![lit("x", 1), lit("y", 1)]];
        match solve_2sat(&clauses).unwrap() {
            TwoSatResult::Sat(a) => assert!(clause_satisfied(&clauses[0], &a)),
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn two_sat_unit_contradiction() {
        let clauses = vec![vec![lit("x", 1)], vec![lit("x", -1)]];
        match solve_2sat(&clauses).unwrap() {
            TwoSatResult::Unsat(cert) => {
                assert_eq!(cert.variable, "x");
                assert!(verify_2sat_certificate(&clauses, &cert));
            }
            _ => panic!("expected unsat"),
        }
    }

    #[test]
    fn two_sat_rejects_long_clause() {
        let clauses = vec![vec![lit("x", 1), lit("y", 1), lit("z", 1)]];
        assert!(solve_2sat(&clauses).is_err());
    }

    #[test]
    fn two_sat_implication_chain_forces_assignment() {
        // (¬x ∨ y), (¬y ∨ z), (x): x true forces y, z true.
        let clauses = vec![
            vec![lit("x", -1), lit("y", 1)],
            vec![lit("y", -1), lit("z", 1)],
            vec![lit("x", 1)],
        ];
        match solve_2sat(&clauses).unwrap() {
            TwoSatResult::Sat(a) => {
                assert!(clauses.iter().all(|c| clause_satisfied(c, &a)));
                assert_eq!(a.get("x"), Some(-1));
                assert_eq!(a.get("y"), Some(-1));
                assert_eq!(a.get("z"), Some(-1));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn horn_unsat_with_verifiable_derivation() {
        // (x), (¬x ∨ y), (¬y).
        let clauses = vec![
            vec![lit("x", 1)],
            vec![lit("x", -1), lit("y", 1)],
            vec![lit("y", -1)],
        ];
        match solve_horn(&clauses).unwrap() {
            HornResult::Unsat(deriv) => {
                assert!(verify_horn_derivation(&clauses, &deriv));
                assert!(matches!(
                    deriv.steps.last(),
                    Some(DerivationStep::Resolve { resolvent, .. }) if resolvent.is_empty()
                ));
            }
            _ => panic!("expected unsat"),
        }
    }

    #[test]
    fn horn_all_negative_clause_sat_with_all_false_witness() {
        let clauses = vec![vec![lit("x", -1), lit("y", -1)]];
        match solve_horn(&clauses).unwrap() {
            HornResult::Sat(a) => {
                assert_eq!(a.get("x"), Some(1));
                assert_eq!(a.get("y"), Some(1));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn horn_empty_input_is_sat() {
        match solve_horn(&[]).unwrap() {
            HornResult::Sat(a) => assert_eq!(a, BooleanAssignment::new()),
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn horn_rejects_two_positive_literals() {
        let clauses = vec![vec![lit("x", 1), lit("y", 1)]];
        assert!(solve_horn(&clauses).is_err());
        assert!(solve_dual_horn(&clauses).is_ok());
    }

    #[test]
    fn horn_minimal_model_propagates_in_order() {
        // (x), (¬x ∨ y): minimal model x = y = true, z untouched false.
        let clauses = vec![
            vec![lit("x", 1)],
            vec![lit("x", -1), lit("y", 1)],
            vec![lit("z", -1), lit("y", 1)],
        ];
        match solve_horn(&clauses).unwrap() {
            HornResult::Sat(a) => {
                assert_eq!(a.get("x"), Some(-1));
                assert_eq!(a.get("y"), Some(-1));
                assert_eq!(a.get("z"), Some(1));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn dual_horn_mirror_behaviour() {
        // (¬x), (x ∨ ¬y): forced x false, then y false; default true.
        let clauses = vec![
            vec![lit("x", -1)],
            vec![lit("x", 1), lit("y", -1)],
            vec![lit("z", 1), lit("y", 1)],
        ];
        match solve_dual_horn(&clauses).unwrap() {
            HornResult::Sat(a) => {
                assert_eq!(a.get("x"), Some(1));
                assert_eq!(a.get("y"), Some(1));
                assert_eq!(a.get("z"), Some(-1));
                assert!(clauses.iter().all(|c| clause_satisfied(c, &a)));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn gf2_single_equation_sat() {
        let sys = ParitySystem::new(2, vec![(BTreeSet::from([0, 1]), 1)]).unwrap();
        match solve_gf2(&sys) {
            Gf2Result::Sat(w) => assert_eq!(w, vec![1, 1]),
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn gf2_direct_contradiction() {
        let sys = ParitySystem::new(1, vec![(BTreeSet::from([0]), 1), (BTreeSet::from([0]), -1)])
            .unwrap();
        match solve_gf2(&sys) {
            Gf2Result::Unsat(cert) => {
                assert_eq!(cert.rows, vec![0, 1]);
                assert!(verify_gf2_certificate(&sys, &cert));
            }
            _ => panic!("expected unsat"),
        }
    }

    #[test]
    fn decompose_two_clause_relation() {
        let rel = relations::or2();
        let clauses = decompose(&rel, ClauseShape::TwoSat).unwrap();
        assert!(clauses.contains(&vec![(0, 1), (1, 1)]));
        // OR2 is not Horn.
        assert!(decompose(&rel, ClauseShape::Horn).is_none());
        assert!(decompose(&rel, ClauseShape::DualHorn).is_some());
    }

    #[test]
    fn decompose_parity_relation() {
        assert!(decompose_parity(&relations::even(3)).is_some());
        assert!(decompose_parity(&relations::odd(3)).is_some());
        assert!(decompose_parity(&relations::or2()).is_none());
    }

    #[test]
    fn instance_conversion_folds_constants_and_repeats() {
        let lang =
            ConstraintLanguage::from_pairs([("even3".to_string(), relations::even(3))]).unwrap();
        // even3(X, X, Y) collapses to Y = +1; even3(X, +1, -1) gives X = -1.
        let inst = Instance::new(
            lang,
            vec!["X".into(), "Y".into()],
            vec![
                Constraint {
                    relation: "even3".into(),
                    scope: vec![
                        ScopeEntry::Var("X".into()),
                        ScopeEntry::Var("X".into()),
                        ScopeEntry::Var("Y".into()),
                    ],
                },
                Constraint {
                    relation: "even3".into(),
                    scope: vec![
                        ScopeEntry::Var("X".into()),
                        ScopeEntry::Const(1),
                        ScopeEntry::Const(-1),
                    ],
                },
            ],
        )
        .unwrap();
        let Conversion::Converted(sys) = instance_to_parity(&inst).unwrap() else {
            panic!("expected conversion");
        };
        match solve_gf2(&sys) {
            Gf2Result::Sat(w) => {
                let a = parity_witness_to_assignment(&inst, &w);
                assert_eq!(boolean_value(&inst, &a).unwrap(), rat(1));
                assert_eq!(a.get("Y"), Some(1));
                assert_eq!(a.get("X"), Some(-1));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn trivially_unsat_constraint_detected() {
        // odd3 applied to (X, X, +1) reduces to 1 = -1.
        let lang =
            ConstraintLanguage::from_pairs([("odd3".to_string(), relations::odd(3))]).unwrap();
        let inst = Instance::new(
            lang,
            vec!["X".into()],
            vec![Constraint {
                relation: "odd3".into(),
                scope: vec![
                    ScopeEntry::Var("X".into()),
                    ScopeEntry::Var("X".into()),
                    ScopeEntry::Const(1),
                ],
            }],
        )
        .unwrap();
        assert_eq!(
            instance_to_parity(&inst).unwrap(),
            Conversion::ConstraintUnsatisfiable { constraint: 0 }
        );
    }

    #[test]
    fn brute_force_value_is_a_fraction_over_m() {
        let lang = ConstraintLanguage::from_pairs([
            ("R11".to_string(), relations::r_one_in_one()),
            ("F1".to_string(), BooleanRelation::empty(1)),
        ])
        .unwrap();
        let inst = Instance::new(
            lang,
            vec!["X".into()],
            vec![
                Constraint {
                    relation: "R11".into(),
                    scope: vec![ScopeEntry::Var("X".into())],
                },
                Constraint {
                    relation: "F1".into(),
                    scope: vec![ScopeEntry::Var("X".into())],
                },
            ],
        )
        .unwrap();
        let (value, _) = solve_brute(&inst).unwrap();
        assert_eq!(value, ratio(1, 2));
    }
}

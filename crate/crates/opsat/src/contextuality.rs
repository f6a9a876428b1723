//! Contextuality scenarios, quantum-model verification, and reductions
//! between clause satisfiability and quantum realizability.
//!
//! A scenario is a hypergraph whose vertices carry orthogonal projectors;
//! a *quantum model* assigns each vertex a Hermitian idempotent so that the
//! projectors of every edge sum to the identity. The dictionary
//! `A = I - 2P`, `P = (I - A)/2` moves between projectors and involutions.
//! The edge condition `sum P_v = I` is checked directly as a matrix equation:
//! it is not itself of the indicator-polynomial form, but on commuting
//! involutions it holds exactly when the exactly-one indicator polynomial
//! evaluates to `-I` (both forms are implemented and their equivalence
//! tested; the polynomials themselves are different objects).
//!
//! The commutativity gadget ties two projectors `P_1, P_2` to four fresh
//! projectors via three exactly-one equations
//! `P_1 + Q_1 + Q_4 = I`, `P_2 + Q_2 + Q_4 = I`, `Q_1 + Q_2 + Q_3 = I`;
//! the equations force `[P_1, P_2] = 0` and conversely commuting projectors
//! admit such fresh projectors. This is what lets clause instances be
//! reduced to scenarios with edges of size at most 3, and it is why size-2
//! edges are easy: realizability of a graph is plain bipartiteness, decided
//! through an implication-graph instance.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{
    build_j_hat, clause_definitions_for, ji_formula, lex_smallest_witness, PpDefinitionSet,
    ReductionOutput, T_NAME,
};
use crate::matrix::{matrix_from_doc, matrix_to_doc, Matrix, MatrixDoc, OperatorAssignment};
use crate::model::{Instance, ScopeEntry, Sign};
use crate::scalar::{ratio, GaussianRational};
use crate::solve::{solve_2sat, Clause, Literal, TwoSatCertificate, TwoSatResult};

/// Cap on vertices for the exhaustive dimension-1 model search.
pub const DIM1_SEARCH_CAP: usize = 4096;

/// A hypergraph: named vertices, edges as nonempty vertex subsets, every
/// vertex covered by some edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
}

impl Hypergraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Vec<String>>) -> Result<Self> {
        let declared: BTreeSet<&str> = vertices.iter().map(String::as_str).collect();
        if declared.len() != vertices.len() {
            return Err(Error::InvalidInput("duplicate vertex name".into()));
        }
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidInput(format!("edge {i} is empty")));
            }
            let set: BTreeSet<&str> = e.iter().map(String::as_str).collect();
            if set.len() != e.len() {
                return Err(Error::InvalidInput(format!("edge {i} repeats a vertex")));
            }
            for v in e {
                if !declared.contains(v.as_str()) {
                    return Err(Error::InvalidInput(format!(
                        "edge {i} mentions undeclared vertex `{v}`"
                    )));
                }
                covered.insert(v.as_str());
            }
        }
        if covered.len() != vertices.len() {
            let missing = vertices
                .iter()
                .find(|v| !covered.contains(v.as_str()))
                .expect("some vertex uncovered");
            return Err(Error::InvalidInput(format!(
                "vertex `{missing}` is not covered by any edge"
            )));
        }
        Ok(Hypergraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Vec<String>] {
        &self.edges
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A candidate quantum model: one matrix per vertex on a common space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorAssignment {
    dim: usize,
    assign: BTreeMap<String, Matrix>,
}

impl ProjectorAssignment {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension 0 is rejected".into()));
        }
        Ok(ProjectorAssignment {
            dim,
            assign: BTreeMap::new(),
        })
    }

    pub fn from_pairs(
        dim: usize,
        pairs: impl IntoIterator<Item = (String, Matrix)>,
    ) -> Result<Self> {
        let mut p = ProjectorAssignment::new(dim)?;
        for (v, m) in pairs {
            p.insert(v, m)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, vertex: String, m: Matrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix for `{vertex}` has dimension {}, assignment has {}",
                m.dim(),
                self.dim
            )));
        }
        self.assign.insert(vertex, m);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, vertex: &str) -> Option<&Matrix> {
        self.assign.get(vertex)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Matrix)> {
        self.assign.iter()
    }

    /// Dimension-1 model from a 0/1 valuation.
    pub fn from_bits(bits: &BTreeMap<String, bool>) -> Self {
        let mut p = ProjectorAssignment::new(1).expect("dim 1");
        for (v, &b) in bits {
            p.insert(
                v.clone(),
                Matrix::from_ints(1, &[i64::from(b)]).expect("1x1"),
            )
            .expect("dim 1");
        }
        p
    }
}

/// A violated quantum-model condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelViolation {
    MissingVertex { vertex: String },
    NotHermitian { vertex: String },
    NotIdempotent { vertex: String },
    EdgeSumNotIdentity { edge: usize },
}

/// Outcome of [`verify_quantum_model`]; empty means the scenario is realized.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumModelReport {
    pub violations: Vec<ModelViolation>,
}

impl QuantumModelReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the three quantum-model conditions: per vertex Hermitian and
/// idempotent, per edge the projectors resolve the identity.
pub fn verify_quantum_model(h: &Hypergraph, p: &ProjectorAssignment) -> QuantumModelReport {
    let mut report = QuantumModelReport::default();
    for v in h.vertices() {
        match p.get(v) {
            None => report
                .violations
                .push(ModelViolation::MissingVertex { vertex: v.clone() }),
            Some(m) => {
                if !m.is_hermitian() {
                    report
                        .violations
                        .push(ModelViolation::NotHermitian { vertex: v.clone() });
                }
                if !m.is_idempotent() {
                    report
                        .violations
                        .push(ModelViolation::NotIdempotent { vertex: v.clone() });
                }
            }
        }
    }
    let identity = Matrix::identity(p.dim()).expect("dim positive");
    for (i, e) in h.edges().iter().enumerate() {
        let mut sum = Matrix::zero(p.dim()).expect("dim positive");
        let mut total = true;
        for v in e {
            match p.get(v) {
                Some(m) => sum = sum.add(m).expect("same dim"),
                None => total = false,
            }
        }
        if total && sum != identity {
            report
                .violations
                .push(ModelViolation::EdgeSumNotIdentity { edge: i });
        }
    }
    report
}

/// `P = (I - A)/2`: the projector onto the `-1` eigenspace of an involution.
pub fn involution_projector(a: &Matrix) -> Result<Matrix> {
    if !a.is_hermitian() || !a.is_involution() {
        return Err(Error::PredicateFailed(
            "expected a Hermitian involution".into(),
        ));
    }
    let half = GaussianRational::from_rational(ratio(1, 2));
    Ok(Matrix::identity(a.dim())?.sub(a)?.scalar_mul(&half))
}

/// `A = I - 2P`: the involution attached to a projector.
pub fn projector_involution(p: &Matrix) -> Result<Matrix> {
    if !p.is_hermitian() || !p.is_idempotent() {
        return Err(Error::PredicateFailed(
            "expected a Hermitian idempotent".into(),
        ));
    }
    let two = GaussianRational::from_int(2);
    Matrix::identity(p.dim())?.sub(&p.scalar_mul(&two))
}

// ---------------------------------------------------------------------------
// The commutativity gadget
// ---------------------------------------------------------------------------

/// Report of [`ji_gadget_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JiGadgetReport {
    /// Whether each of the three sum equations holds.
    pub equations_hold: [bool; 3],
    /// The commutator-algebra identity: the sum of the three right-hand
    /// sides equals `[P1, P2]`, for arbitrary matrices. (Each side is
    /// computed independently.)
    pub rhs_sum_equals_commutator: bool,
    /// When all equations hold: each of the three displayed identities,
    /// checked as a matrix equation on the given inputs.
    pub identities_on_inputs: Option<[bool; 3]>,
    /// When all equations hold: `[P1, P2] = 0`.
    pub commutator_vanishes: Option<bool>,
}

impl JiGadgetReport {
    pub fn all_equations_hold(&self) -> bool {
        self.equations_hold.iter().all(|&b| b)
    }
}

/// The three right-hand sides of the gadget's commutator identities:
/// `[P1,Q3] + [Q4,Q3]`, `[P1,P2] + [P1,Q2]`, and
/// `[Q2,P1] + [Q3,P1] + [Q3,Q4]`.
pub fn ji_rhs_commutators(ms: &[&Matrix; 6]) -> Result<[Matrix; 3]> {
    let [p1, p2, q1, q2, q3, q4] = ms;
    let _ = q1;
    let rhs1 = p1.commutator(q3)?.add(&q4.commutator(q3)?)?;
    let rhs2 = p1.commutator(p2)?.add(&p1.commutator(q2)?)?;
    let rhs3 = q2
        .commutator(p1)?
        .add(&q3.commutator(p1)?)?
        .add(&q3.commutator(q4)?)?;
    Ok([rhs1, rhs2, rhs3])
}

/// The three left-hand sides: `[P1+Q1+Q4-I, -P1+Q1+Q3]`,
/// `[P2+Q2+Q4-I, -P1]`, and `[Q1+Q2+Q3-I, P1+Q4]`.
pub fn ji_lhs_commutators(ms: &[&Matrix; 6]) -> Result<[Matrix; 3]> {
    let [p1, p2, q1, q2, q3, q4] = ms;
    let i = Matrix::identity(p1.dim())?;
    let g1 = p1.add(q1)?.add(q4)?.sub(&i)?;
    let g2 = p2.add(q2)?.add(q4)?.sub(&i)?;
    let g3 = q1.add(q2)?.add(q3)?.sub(&i)?;
    let m1 = p1.neg().add(q1)?.add(q3)?;
    let m2 = p1.neg();
    let m3 = p1.add(q4)?;
    Ok([
        g1.commutator(&m1)?,
        g2.commutator(&m2)?,
        g3.commutator(&m3)?,
    ])
}

/// Check the commutativity gadget on six Hermitian idempotents: evaluate the
/// three sum equations; when they hold, verify the displayed commutator
/// identities on the inputs and conclude `[P1, P2] = 0`. The universal sum
/// identity (right-hand sides summing to `[P1, P2]`) is checked on every
/// call.
pub fn ji_gadget_check(
    p1: &Matrix,
    p2: &Matrix,
    q1: &Matrix,
    q2: &Matrix,
    q3: &Matrix,
    q4: &Matrix,
) -> Result<JiGadgetReport> {
    let ms = [p1, p2, q1, q2, q3, q4];
    let dim = p1.dim();
    for (i, m) in ms.iter().enumerate() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "input {i} has dimension {}, expected {dim}",
                m.dim()
            )));
        }
        if !m.is_hermitian() || !m.is_idempotent() {
            return Err(Error::PredicateFailed(format!(
                "input {i} is not a Hermitian idempotent"
            )));
        }
    }
    let identity = Matrix::identity(dim)?;
    let equations_hold = [
        p1.add(q1)?.add(q4)? == identity,
        p2.add(q2)?.add(q4)? == identity,
        q1.add(q2)?.add(q3)? == identity,
    ];
    let rhs = ji_rhs_commutators(&ms)?;
    let rhs_sum = rhs[0].add(&rhs[1])?.add(&rhs[2])?;
    let commutator = p1.commutator(p2)?;
    let rhs_sum_equals_commutator = rhs_sum == commutator;

    let (identities_on_inputs, commutator_vanishes) = if equations_hold.iter().all(|&b| b) {
        let lhs = ji_lhs_commutators(&ms)?;
        let ids = [lhs[0] == rhs[0], lhs[1] == rhs[1], lhs[2] == rhs[2]];
        (Some(ids), Some(commutator.is_zero()))
    } else {
        (None, None)
    };
    Ok(JiGadgetReport {
        equations_hold,
        rhs_sum_equals_commutator,
        identities_on_inputs,
        commutator_vanishes,
    })
}

/// For two commuting projectors, construct four projectors satisfying the
/// gadget equations, by lifting the commutativity formula through the joint
/// eigenbasis of the matching involutions.
pub fn ji_completion(p1: &Matrix, p2: &Matrix) -> Result<[Matrix; 4]> {
    if !p1.commutes(p2)? {
        return Err(Error::PredicateFailed(
            "gadget completion needs commuting projectors".into(),
        ));
    }
    let a1 = projector_involution(p1)?;
    let a2 = projector_involution(p2)?;
    let dec = crate::spectral::joint_eigen(&[a1, a2])?;
    let formula = ji_formula();
    let source = crate::gadget::one_in_k_language();
    let d = p1.dim();
    let mut fresh_diags: Vec<Vec<Sign>> = vec![Vec::with_capacity(d); 4];
    for col in 0..d {
        let tuple = [dec.diags[0][col], dec.diags[1][col]];
        let witness = lex_smallest_witness(&formula, &source, &tuple)?
            .expect("the commutativity formula defines the full relation");
        for (k, &b) in witness.iter().enumerate() {
            fresh_diags[k].push(b);
        }
    }
    let mut out = Vec::with_capacity(4);
    for diag in &fresh_diags {
        let involution = crate::spectral::inverse_conjugate_signs(&dec.basis, diag)?;
        out.push(involution_projector(&involution)?);
    }
    Ok([
        out[0].clone(),
        out[1].clone(),
        out[2].clone(),
        out[3].clone(),
    ])
}

// ---------------------------------------------------------------------------
// Clause instances to scenarios
// ---------------------------------------------------------------------------

/// A scenario built from a clause instance, with its intermediate reduction.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub hypergraph: Hypergraph,
    /// The extended reduction over `{R13, R12, R11, T}` the scenario encodes.
    pub reduction: ReductionOutput,
    /// The verified definitions used by the reduction.
    pub definitions: PpDefinitionSet,
}

/// Fresh vertex for slot `k` (1-based) of the gadget replacing constraint
/// `index` of the extended instance.
fn gadget_vertex(index: usize, k: usize) -> String {
    format!("Q{index}__U{k}")
}

/// Reduce a clause instance (arity at most 3, scopes on distinct variables,
/// no constants) to a contextuality scenario with edges of size at most 3.
///
/// Exactly-one constraints become edges on their scopes; every pair
/// constraint of the extended construction becomes a commutativity gadget:
/// four fresh vertices and three size-3 edges.
pub fn threesat_to_scenario(cnf: &Instance) -> Result<ScenarioOutput> {
    for (i, c) in cnf.constraints().iter().enumerate() {
        let mut seen = BTreeSet::new();
        for e in &c.scope {
            match e {
                ScopeEntry::Const(_) => {
                    return Err(Error::InvalidInput(format!(
                        "constraint {i} has a constant in its scope; scenario reduction needs \
                         plain variable scopes"
                    )));
                }
                ScopeEntry::Var(v) => {
                    if !seen.insert(v.clone()) {
                        return Err(Error::InvalidInput(format!(
                            "constraint {i} repeats variable `{v}`; scenario reduction needs \
                             distinct scope variables"
                        )));
                    }
                }
            }
        }
    }
    let definitions = clause_definitions_for(cnf.language())?;
    let reduction = build_j_hat(cnf, &definitions)?;

    let mut edges: Vec<Vec<String>> = Vec::new();
    let mut fresh_vertices: Vec<String> = Vec::new();
    for (i, c) in reduction.instance.constraints().iter().enumerate() {
        let scope_vars: Vec<String> = c
            .scope
            .iter()
            .map(|e| match e {
                ScopeEntry::Var(v) => v.clone(),
                ScopeEntry::Const(_) => unreachable!("validated above and by construction"),
            })
            .collect();
        match c.relation.as_str() {
            "R13" | "R12" | "R11" => edges.push(scope_vars),
            t if t == T_NAME => {
                let us: Vec<String> = (1..=4).map(|k| gadget_vertex(i, k)).collect();
                fresh_vertices.extend(us.iter().cloned());
                edges.push(vec![scope_vars[0].clone(), us[0].clone(), us[3].clone()]);
                edges.push(vec![scope_vars[1].clone(), us[1].clone(), us[3].clone()]);
                edges.push(vec![us[0].clone(), us[1].clone(), us[2].clone()]);
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unexpected relation `{other}` in the extended instance"
                )));
            }
        }
    }
    let used: BTreeSet<&str> = edges
        .iter()
        .flat_map(|e| e.iter().map(String::as_str))
        .collect();
    let mut vertices: Vec<String> = reduction
        .instance
        .variables()
        .iter()
        .filter(|v| used.contains(v.as_str()))
        .cloned()
        .collect();
    vertices.extend(fresh_vertices);
    let hypergraph = Hypergraph::new(vertices, edges)?;
    Ok(ScenarioOutput {
        hypergraph,
        reduction,
        definitions,
    })
}

/// Dimension-1 model of a scenario built by [`threesat_to_scenario`] from a
/// satisfying Boolean assignment of the clause instance: lift the assignment
/// through the reduction, read projектors off the lifted values, and complete
/// each gadget with its witness.
pub fn scenario_model_from_boolean(
    scenario: &ScenarioOutput,
    cnf: &Instance,
    witness: &crate::model::BooleanAssignment,
) -> Result<ProjectorAssignment> {
    let f = OperatorAssignment::from_boolean(witness);
    let lifted = crate::gadget::lift(&f, cnf, &scenario.definitions, &scenario.reduction)?;
    let mut bits: BTreeMap<String, bool> = BTreeMap::new();
    let sign_of = |m: &Matrix| -> Sign {
        if *m.entry(0, 0) == GaussianRational::from_int(-1) {
            -1
        } else {
            1
        }
    };
    for v in scenario.reduction.instance.variables() {
        let m = lifted
            .get(v)
            .ok_or_else(|| Error::InvalidAssignment(format!("missing `{v}`")))?;
        bits.insert(v.clone(), sign_of(m) == -1);
    }
    let formula = ji_formula();
    let source = crate::gadget::one_in_k_language();
    for (i, c) in scenario.reduction.instance.constraints().iter().enumerate() {
        if c.relation != T_NAME {
            continue;
        }
        let z: Vec<Sign> = c
            .scope
            .iter()
            .map(|e| {
                let ScopeEntry::Var(v) = e else {
                    unreachable!("pair constraints are variable pairs")
                };
                sign_of(lifted.get(v).expect("lift is total"))
            })
            .collect();
        let w = lex_smallest_witness(&formula, &source, &z)?
            .expect("the commutativity formula defines the full relation");
        for (k, &value) in w.iter().enumerate() {
            bits.insert(gadget_vertex(i, k + 1), value == -1);
        }
    }
    // Restrict to scenario vertices (declared-but-unused variables drop out).
    let model_bits: BTreeMap<String, bool> = scenario
        .hypergraph
        .vertices()
        .iter()
        .map(|v| (v.clone(), *bits.get(v).unwrap_or(&false)))
        .collect();
    Ok(ProjectorAssignment::from_bits(&model_bits))
}

/// Exhaustive (propagation-pruned) search for a dimension-1 model: a 0/1
/// valuation with exactly one 1 per edge.
pub fn decide_dim1_model(h: &Hypergraph) -> Result<Option<ProjectorAssignment>> {
    let n = h.vertices().len();
    if n > DIM1_SEARCH_CAP {
        return Err(Error::CapExceeded(format!(
            "{n} vertices exceed the dimension-1 search cap {DIM1_SEARCH_CAP}"
        )));
    }
    let index: BTreeMap<&str, usize> = h
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let edges: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .map(|e| e.iter().map(|v| index[v.as_str()]).collect())
        .collect();

    fn propagate(assign: &mut Vec<Option<bool>>, edges: &[Vec<usize>]) -> bool {
        loop {
            let mut changed = false;
            for e in edges {
                let ones = e.iter().filter(|&&v| assign[v] == Some(true)).count();
                let unassigned: Vec<usize> =
                    e.iter().copied().filter(|&v| assign[v].is_none()).collect();
                if ones > 1 {
                    return false;
                }
                if ones == 1 {
                    for v in unassigned {
                        assign[v] = Some(false);
                        changed = true;
                    }
                } else if unassigned.is_empty() {
                    return false; // zero ones and nothing left to set
                } else if unassigned.len() == 1 {
                    assign[unassigned[0]] = Some(true);
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(assign: &mut Vec<Option<bool>>, edges: &[Vec<usize>]) -> Option<Vec<bool>> {
        if !propagate(assign, edges) {
            return None;
        }
        let Some(v) = assign.iter().position(Option::is_none) else {
            return Some(assign.iter().map(|a| a.unwrap()).collect());
        };
        for value in [true, false] {
            let mut next = assign.clone();
            next[v] = Some(value);
            if let Some(model) = search(&mut next, edges) {
                return Some(model);
            }
        }
        None
    }

    let mut assign: Vec<Option<bool>> = vec![None; n];
    Ok(search(&mut assign, &edges).map(|model| {
        let bits: BTreeMap<String, bool> = h
            .vertices()
            .iter()
            .cloned()
            .zip(model.iter().copied())
            .collect();
        ProjectorAssignment::from_bits(&bits)
    }))
}

// ---------------------------------------------------------------------------
// Size-2 decision
// ---------------------------------------------------------------------------

/// Outcome of the size-2 realizability decision.
#[derive(Clone, Debug)]
pub enum TwoAllowsResult {
    /// A dimension-1 model, which realizes the scenario on every space.
    Realizable(ProjectorAssignment),
    /// The derived implication-graph instance is unsatisfiable; no model
    /// exists in any dimension.
    NotRealizable(TwoSatCertificate),
}

/// Decide realizability of a scenario with edges of size at most 2, by the
/// clause translation: an edge `{u, v}` becomes the clauses `(u or v)` and
/// `(not u or not v)` (exactly one of the two projectors is the identity),
/// a singleton `{u}` the unit clause `(u)`.
pub fn two_allows_decide(h: &Hypergraph) -> Result<TwoAllowsResult> {
    if h.max_edge_size() > 2 {
        return Err(Error::InvalidInput(format!(
            "scenario has an edge of size {}, decision supports size at most 2",
            h.max_edge_size()
        )));
    }
    let mut clauses: Vec<Clause> = Vec::new();
    for e in h.edges() {
        match e.as_slice() {
            [u] => clauses.push(vec![Literal::positive(u.clone())]),
            [u, v] => {
                clauses.push(vec![
                    Literal::positive(u.clone()),
                    Literal::positive(v.clone()),
                ]);
                clauses.push(vec![
                    Literal::negative(u.clone()),
                    Literal::negative(v.clone()),
                ]);
            }
            _ => unreachable!("edge sizes checked above"),
        }
    }
    match solve_2sat(&clauses)? {
        TwoSatResult::Unsat(cert) => Ok(TwoAllowsResult::NotRealizable(cert)),
        TwoSatResult::Sat(a) => {
            let bits: BTreeMap<String, bool> = h
                .vertices()
                .iter()
                .map(|v| (v.clone(), a.get(v) == Some(-1)))
                .collect();
            let model = ProjectorAssignment::from_bits(&bits);
            let report = verify_quantum_model(h, &model);
            if !report.is_valid() {
                return Err(Error::BrokenPrecondition(
                    "derived dimension-1 model failed verification".into(),
                ));
            }
            Ok(TwoAllowsResult::Realizable(model))
        }
    }
}

/// Two-coloring check for singleton-free size-2 scenarios (test oracle for
/// the decision procedure).
pub fn is_bipartite(h: &Hypergraph) -> Result<bool> {
    if h.edges().iter().any(|e| e.len() != 2) {
        return Err(Error::InvalidInput(
            "bipartiteness applies to scenarios with all edges of size 2".into(),
        ));
    }
    let index: BTreeMap<&str, usize> = h
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut adj = vec![Vec::new(); h.vertices().len()];
    for e in h.edges() {
        let (u, v) = (index[e[0].as_str()], index[e[1].as_str()]);
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut color = vec![None::<bool>; h.vertices().len()];
    for start in 0..color.len() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!color[u].unwrap());
                        queue.push_back(v);
                    }
                    Some(c) => {
                        if c == color[u].unwrap() {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
}

/// Serialize a hypergraph.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let doc = HypergraphDoc {
        vertices: h.vertices.clone(),
        edges: h.edges.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse a hypergraph document.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let doc: HypergraphDoc = serde_json::from_str(text)?;
    Hypergraph::new(doc.vertices, doc.edges)
}

#[derive(Serialize, Deserialize)]
struct ProjectorDoc {
    dim: usize,
    assign: BTreeMap<String, MatrixDoc>,
}

/// Serialize a projector assignment (matrix format per vertex).
pub fn serialize_projectors(p: &ProjectorAssignment) -> String {
    let doc = ProjectorDoc {
        dim: p.dim,
        assign: p
            .assign
            .iter()
            .map(|(v, m)| (v.clone(), matrix_to_doc(m)))
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse a projector assignment document.
pub fn parse_projectors(text: &str) -> Result<ProjectorAssignment> {
    let doc: ProjectorDoc = serde_json::from_str(text)?;
    let mut p = ProjectorAssignment::new(doc.dim)?;
    for (v, m) in &doc.assign {
        p.insert(v.clone(), matrix_from_doc(m)?)?;
    }
    Ok(p)
}

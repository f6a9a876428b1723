//! Exact complex-rational dense matrices and operator assignments.
//!
//! All entries are Gaussian rationals, so predicates like `A^2 = I`,
//! `A = A*`, `AB = BA` and `P_R(A_1,...,A_r) = -I` are decided by exact
//! structural equality. There is no tolerance anywhere.
//!
//! An *operator assignment* maps variables to Hermitian involutions on a
//! common space; the constants `+1` and `-1` map to `I` and `-I` implicitly.
//! It is valid for an instance when the matrices assigned to each constraint
//! scope pairwise commute; it satisfies a constraint when the relation's
//! indicator polynomial evaluates to `-I` at the scope's matrices. The
//! fraction of satisfied constraints is the assignment's (operator) value;
//! dimension-1 assignments recover ordinary Boolean evaluation.
//!
//! Dimension 0 is rejected at construction: in a 0-dimensional space every
//! equation holds vacuously, which would corrupt gap semantics downstream.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::MultilinearPoly;
use crate::model::{Instance, ScopeEntry, Sign};
use crate::scalar::{rat, rational_from_str, GaussianRational, Rational};

/// A square matrix of Gaussian rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    data: Vec<GaussianRational>,
}

impl Matrix {
    /// Build from row-major entries; the dimension must be positive.
    pub fn new(dim: usize, data: Vec<GaussianRational>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "dimension 0 is rejected: every equation would hold vacuously".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                dim,
                dim,
                dim * dim,
                data.len()
            )));
        }
        Ok(Matrix { dim, data })
    }

    /// Build from a function of (row, column).
    pub fn from_fn(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> GaussianRational,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Matrix::new(dim, data)
    }

    /// Build from integer entries, for fixtures.
    pub fn from_ints(dim: usize, entries: &[i64]) -> Result<Self> {
        Matrix::new(
            dim,
            entries
                .iter()
                .map(|&n| GaussianRational::from_int(n))
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Matrix::from_fn(dim, |r, c| {
            if r == c {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            }
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Matrix::from_fn(dim, |_, _| GaussianRational::zero())
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(entries: &[GaussianRational]) -> Result<Self> {
        let d = entries.len();
        Matrix::from_fn(d, |r, c| {
            if r == c {
                entries[r].clone()
            } else {
                GaussianRational::zero()
            }
        })
    }

    /// Diagonal matrix with `{+1,-1}` entries.
    pub fn diagonal_signs(signs: &[Sign]) -> Result<Self> {
        let entries: Vec<GaussianRational> = signs
            .iter()
            .map(|&s| GaussianRational::from_int(i64::from(s)))
            .collect();
        Matrix::diagonal(&entries)
    }

    /// `c * I`.
    pub fn scalar(dim: usize, c: GaussianRational) -> Result<Self> {
        Matrix::from_fn(dim, |r, col| {
            if r == col {
                c.clone()
            } else {
                GaussianRational::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &GaussianRational {
        &self.data[row * self.dim + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: GaussianRational) {
        self.data[row * self.dim + col] = value;
    }

    fn check_same_dim(&self, other: &Matrix, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{op} of a {}x{} and a {}x{} matrix",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_dim(other, "sum")?;
        Matrix::new(
            self.dim,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_dim(other, "difference")?;
        Matrix::new(
            self.dim,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &GaussianRational) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scalar_mul_rational(&self, c: &Rational) -> Matrix {
        self.scalar_mul(&GaussianRational::from_rational(c.clone()))
    }

    /// Matrix product; entries are summed in index order so results are
    /// identical across runs.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_dim(other, "product")?;
        let d = self.dim;
        let mut data = vec![GaussianRational::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entry(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let b = other.entry(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    data[r * d + c] += &(a * b);
                }
            }
        }
        Matrix::new(d, data)
    }

    /// Conjugate transpose.
    pub fn conjugate_transpose(&self) -> Matrix {
        let d = self.dim;
        Matrix::from_fn(d, |r, c| self.entry(c, r).conj()).expect("dim unchanged")
    }

    /// Kronecker product; output dimension is the product of the inputs'.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let da = self.dim;
        let db = other.dim;
        Matrix::from_fn(da * db, |r, c| {
            let (ra, rb) = (r / db, r % db);
            let (ca, cb) = (c / db, c % db);
            self.entry(ra, ca) * other.entry(rb, cb)
        })
        .expect("product of positive dims is positive")
    }

    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for i in 0..self.dim {
            t += self.entry(i, i);
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim).expect("dim positive")
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| *self.entry(r, c) == self.entry(c, r).conj()))
    }

    /// `A^2 = I`, exactly.
    pub fn is_involution(&self) -> bool {
        match self.mul(self) {
            Ok(sq) => sq.is_identity(),
            Err(_) => false,
        }
    }

    /// `P^2 = P`, exactly.
    pub fn is_idempotent(&self) -> bool {
        match self.mul(self) {
            Ok(sq) => sq == *self,
            Err(_) => false,
        }
    }

    /// `AB = BA`, exactly.
    pub fn commutes(&self, other: &Matrix) -> Result<bool> {
        self.check_same_dim(other, "commutator")?;
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Matrix) -> Result<Matrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Exact inverse by Gauss-Jordan elimination (first nonzero pivot).
    pub fn inverse(&self) -> Result<Matrix> {
        let d = self.dim;
        let mut work = self.clone();
        let mut out = Matrix::identity(d)?;
        for col in 0..d {
            let Some(pivot) = (col..d).find(|&r| !work.entry(r, col).is_zero()) else {
                return Err(Error::PredicateFailed("matrix is not invertible".into()));
            };
            if pivot != col {
                for c in 0..d {
                    let (a, b) = (work.entry(pivot, c).clone(), work.entry(col, c).clone());
                    work.set_entry(pivot, c, b);
                    work.set_entry(col, c, a);
                    let (a, b) = (out.entry(pivot, c).clone(), out.entry(col, c).clone());
                    out.set_entry(pivot, c, b);
                    out.set_entry(col, c, a);
                }
            }
            let inv = work.entry(col, col).inv().expect("pivot nonzero");
            for c in 0..d {
                let w = (&inv).mul(work.entry(col, c));
                work.set_entry(col, c, w);
                let o = (&inv).mul(out.entry(col, c));
                out.set_entry(col, c, o);
            }
            for r in 0..d {
                if r == col || work.entry(r, col).is_zero() {
                    continue;
                }
                let factor = work.entry(r, col).clone();
                for c in 0..d {
                    let w = work.entry(r, c).clone() - (&factor).mul(work.entry(col, c));
                    work.set_entry(r, c, w);
                    let o = out.entry(r, c).clone() - (&factor).mul(out.entry(col, c));
                    out.set_entry(r, c, o);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| self.entry(r, c).to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of a sequence, left to right; empty input is the 1x1
/// identity.
pub fn kron_all(factors: &[Matrix]) -> Matrix {
    let mut acc = Matrix::identity(1).expect("dim 1");
    for f in factors {
        acc = acc.kron(f);
    }
    acc
}

/// Evaluate a multilinear polynomial at pairwise commuting matrices, with the
/// empty product read as the identity.
///
/// Commutation is checked, never assumed: without it the polynomial's value
/// would depend on an arbitrary factor order.
pub fn eval_poly_at(p: &MultilinearPoly, ops: &[Matrix]) -> Result<Matrix> {
    if ops.len() != p.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "polynomial on {} variables evaluated at {} matrices",
            p.nvars(),
            ops.len()
        )));
    }
    let dim = ops.first().map_or(1, Matrix::dim);
    for (i, m) in ops.iter().enumerate() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operand {i} has dimension {} instead of {dim}",
                m.dim()
            )));
        }
    }
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            if !ops[i].commutes(&ops[j])? {
                return Err(Error::NonCommuting { left: i, right: j });
            }
        }
    }
    let mut acc = Matrix::zero(dim)?;
    for (mask, coeff) in p.terms() {
        let mut term = Matrix::identity(dim)?;
        for (i, op) in ops.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                term = term.mul(op)?;
            }
        }
        acc = acc.add(&term.scalar_mul_rational(coeff))?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Operator assignments
// ---------------------------------------------------------------------------

/// A map from variable names to matrices on a common space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorAssignment {
    dim: usize,
    assign: BTreeMap<String, Matrix>,
}

impl OperatorAssignment {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension 0 is rejected".into()));
        }
        Ok(OperatorAssignment {
            dim,
            assign: BTreeMap::new(),
        })
    }

    pub fn from_pairs(
        dim: usize,
        pairs: impl IntoIterator<Item = (String, Matrix)>,
    ) -> Result<Self> {
        let mut f = OperatorAssignment::new(dim)?;
        for (name, m) in pairs {
            f.insert(name, m)?;
        }
        Ok(f)
    }

    pub fn insert(&mut self, var: String, m: Matrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix for `{var}` has dimension {} in an assignment of dimension {}",
                m.dim(),
                self.dim
            )));
        }
        self.assign.insert(var, m);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, var: &str) -> Option<&Matrix> {
        self.assign.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Matrix)> {
        self.assign.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.assign.keys()
    }

    /// Matrix for a scope entry: constants are `I` and `-I`.
    pub fn eval_entry(&self, entry: &ScopeEntry) -> Result<Matrix> {
        match entry {
            ScopeEntry::Const(c) => {
                let id = Matrix::identity(self.dim)?;
                Ok(if *c == 1 { id } else { id.neg() })
            }
            ScopeEntry::Var(v) => self
                .get(v)
                .cloned()
                .ok_or_else(|| Error::InvalidAssignment(format!("missing variable `{v}`"))),
        }
    }

    /// Restriction to the given variables (all of which must be present).
    pub fn restrict(&self, vars: &[String]) -> Result<OperatorAssignment> {
        let mut out = OperatorAssignment::new(self.dim)?;
        for v in vars {
            let m = self
                .get(v)
                .cloned()
                .ok_or_else(|| Error::InvalidAssignment(format!("missing variable `{v}`")))?;
            out.insert(v.clone(), m)?;
        }
        Ok(out)
    }

    /// The dimension-1 assignment carrying a Boolean assignment.
    pub fn from_boolean(a: &crate::model::BooleanAssignment) -> Self {
        let mut out = OperatorAssignment::new(1).expect("dim 1");
        for (v, &s) in a.iter() {
            out.insert(
                v.clone(),
                Matrix::from_ints(1, &[i64::from(s)]).expect("1x1"),
            )
            .expect("dim matches");
        }
        out
    }
}

/// One violated condition found by [`validate_assignment`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    MissingVariable {
        variable: String,
    },
    NotHermitian {
        variable: String,
    },
    NotInvolution {
        variable: String,
    },
    /// Two distinct variables sharing a constraint scope do not commute.
    NonCommutingPair {
        constraint: usize,
        left: String,
        right: String,
    },
}

/// Every violation of the operator-assignment conditions, per condition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the three operator-assignment conditions of `f` against `inst`:
/// every matrix Hermitian, every matrix an involution, and pairwise
/// commutation on the variables of each constraint scope.
pub fn validate_assignment(f: &OperatorAssignment, inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();
    for v in inst.variables() {
        match f.get(v) {
            None => report.violations.push(Violation::MissingVariable {
                variable: v.clone(),
            }),
            Some(m) => {
                if !m.is_hermitian() {
                    report.violations.push(Violation::NotHermitian {
                        variable: v.clone(),
                    });
                }
                if !m.is_involution() {
                    report.violations.push(Violation::NotInvolution {
                        variable: v.clone(),
                    });
                }
            }
        }
    }
    for (i, c) in inst.constraints().iter().enumerate() {
        let scope_vars: Vec<&str> = {
            let mut seen = Vec::new();
            for e in &c.scope {
                if let ScopeEntry::Var(v) = e {
                    if !seen.contains(&v.as_str()) {
                        seen.push(v.as_str());
                    }
                }
            }
            seen
        };
        for a in 0..scope_vars.len() {
            for b in (a + 1)..scope_vars.len() {
                let (Some(ma), Some(mb)) = (f.get(scope_vars[a]), f.get(scope_vars[b])) else {
                    continue;
                };
                if !ma.commutes(mb).unwrap_or(false) {
                    report.violations.push(Violation::NonCommutingPair {
                        constraint: i,
                        left: scope_vars[a].to_string(),
                        right: scope_vars[b].to_string(),
                    });
                }
            }
        }
    }
    report
}

/// Whether assignment `f` satisfies constraint `i` of `inst`: the indicator
/// polynomial of the relation evaluates to `-I` at the scope matrices.
pub fn constraint_satisfied(f: &OperatorAssignment, inst: &Instance, i: usize) -> Result<bool> {
    let c = &inst.constraints()[i];
    let ops: Vec<Matrix> = c
        .scope
        .iter()
        .map(|e| f.eval_entry(e))
        .collect::<Result<_>>()?;
    let poly = crate::fourier::indicator_poly(inst.relation_of(i));
    let value = eval_poly_at(&poly, &ops)?;
    let minus_i = Matrix::identity(f.dim())?.neg();
    Ok(value == minus_i)
}

/// The fraction of constraints satisfied by `f`; requires `f` to be a valid
/// operator assignment for `inst`. A zero-constraint instance has value 1.
pub fn operator_value(f: &OperatorAssignment, inst: &Instance) -> Result<Rational> {
    let report = validate_assignment(f, inst);
    if !report.is_valid() {
        return Err(Error::InvalidAssignment(format!(
            "{} violation(s), first: {:?}",
            report.violations.len(),
            report.violations[0]
        )));
    }
    let m = inst.constraints().len();
    if m == 0 {
        return Ok(rat(1));
    }
    let mut satisfied = 0i64;
    for i in 0..m {
        if constraint_satisfied(f, inst, i)? {
            satisfied += 1;
        }
    }
    Ok(Rational::new(satisfied.into(), (m as i64).into()))
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub(crate) struct EntryDoc {
    re: String,
    im: String,
}

/// Wire form of a matrix; shared by every format that embeds matrices.
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixDoc {
    dim: usize,
    rows: Vec<Vec<EntryDoc>>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentDoc {
    dim: usize,
    assign: BTreeMap<String, MatrixDoc>,
}

pub(crate) fn matrix_to_doc(m: &Matrix) -> MatrixDoc {
    MatrixDoc {
        dim: m.dim(),
        rows: (0..m.dim())
            .map(|r| {
                (0..m.dim())
                    .map(|c| {
                        let (re, im) = m.entry(r, c).to_parts();
                        EntryDoc { re, im }
                    })
                    .collect()
            })
            .collect(),
    }
}

pub(crate) fn matrix_from_doc(doc: &MatrixDoc) -> Result<Matrix> {
    if doc.rows.len() != doc.dim || doc.rows.iter().any(|r| r.len() != doc.dim) {
        return Err(Error::DimensionMismatch(format!(
            "matrix document claims dimension {} but rows disagree",
            doc.dim
        )));
    }
    let mut data = Vec::with_capacity(doc.dim * doc.dim);
    for row in &doc.rows {
        for e in row {
            data.push(GaussianRational::new(
                rational_from_str(&e.re)?,
                rational_from_str(&e.im)?,
            ));
        }
    }
    Matrix::new(doc.dim, data)
}

/// Serialize a matrix to the canonical JSON format.
pub fn serialize_matrix(m: &Matrix) -> String {
    let mut s = serde_json::to_string_pretty(&matrix_to_doc(m)).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse the matrix JSON format.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    matrix_from_doc(&serde_json::from_str(text)?)
}

/// Serialize an operator assignment to the canonical JSON format.
pub fn serialize_assignment(f: &OperatorAssignment) -> String {
    let doc = AssignmentDoc {
        dim: f.dim(),
        assign: f
            .iter()
            .map(|(v, m)| (v.clone(), matrix_to_doc(m)))
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse the operator assignment JSON format.
pub fn parse_assignment(text: &str) -> Result<OperatorAssignment> {
    let doc: AssignmentDoc = serde_json::from_str(text)?;
    let mut f = OperatorAssignment::new(doc.dim)?;
    for (var, m) in &doc.assign {
        f.insert(var.clone(), matrix_from_doc(m)?)?;
    }
    Ok(f)
}

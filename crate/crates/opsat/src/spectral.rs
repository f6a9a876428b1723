//! Exact simultaneous diagonalization of pairwise-commuting Hermitian
//! involutions.
//!
//! For commuting Hermitian involutions `A_1, ..., A_r` there is a joint
//! eigenbasis. The textbook statement uses a unitary basis change; unit
//! normalization needs square roots, which leave the rational field, so this
//! module returns an invertible matrix `C` whose columns are pairwise
//! orthogonal joint eigenvectors without normalization. `C* C` is then
//! diagonal with positive rational entries, `C^{-1} = (C*C)^{-1} C*` is exact,
//! and everything downstream (similarity transport, reconstruction,
//! preservation of Hermiticity and involutivity) survives the weakening
//! because diagonal matrices commute.
//!
//! The decomposition refines `C^d` by splitting along each operator's `+1`
//! and `-1` eigenspaces, realized as images of the projectors `(I ± A)/2`;
//! bases are extracted by exact Gaussian elimination with the first nonzero
//! coordinate as pivot, and orthogonalized within each joint eigenspace by
//! the Gram process without normalization.

use serde::{Deserialize, Serialize};
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::matrix::{matrix_from_doc, matrix_to_doc, Matrix, MatrixDoc};
use crate::model::Sign;
use crate::scalar::GaussianRational;

type ColumnVec = Vec<GaussianRational>;

/// A joint eigendecomposition of a commuting family of Hermitian involutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointEigenDecomposition {
    /// Invertible; columns are joint eigenvectors, pairwise orthogonal.
    pub basis: Matrix,
    /// Per input operator, the eigenvalue of each basis column.
    pub diags: Vec<Vec<Sign>>,
    /// Column indices grouped by joint eigenvalue tuple, in refinement order.
    pub blocks: Vec<Vec<usize>>,
}

impl JointEigenDecomposition {
    /// The eigenvalue tuple of column `col` across all operators.
    pub fn eigen_tuple(&self, col: usize) -> Vec<Sign> {
        self.diags.iter().map(|d| d[col]).collect()
    }
}

fn mat_vec(m: &Matrix, v: &ColumnVec) -> ColumnVec {
    let d = m.dim();
    (0..d)
        .map(|r| {
            let mut acc = GaussianRational::zero();
            for c in 0..d {
                let e = m.entry(r, c);
                if !e.is_zero() && !v[c].is_zero() {
                    acc += &(e * &v[c]);
                }
            }
            acc
        })
        .collect()
}

fn inner_product(u: &ColumnVec, v: &ColumnVec) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for (a, b) in u.iter().zip(v) {
        acc += &(&a.conj() * b);
    }
    acc
}

/// Incremental exact elimination for extracting a maximal independent subset.
struct EchelonBasis {
    reduced: Vec<(usize, ColumnVec)>,
}

impl EchelonBasis {
    fn new() -> Self {
        EchelonBasis {
            reduced: Vec::new(),
        }
    }

    /// Reduce `v` against the rows collected so far; if a nonzero residue
    /// remains, store it and report independence.
    fn try_insert(&mut self, v: &ColumnVec) -> bool {
        let mut w = v.clone();
        for (pivot, row) in &self.reduced {
            if w[*pivot].is_zero() {
                continue;
            }
            let factor = (&w[*pivot]).mul(&row[*pivot].inv().expect("pivot entries are nonzero"));
            for (wi, ri) in w.iter_mut().zip(row) {
                *wi -= &(&factor * ri);
            }
        }
        match w.iter().position(|e| !e.is_zero()) {
            Some(pivot) => {
                self.reduced.push((pivot, w));
                true
            }
            None => false,
        }
    }
}

/// Gram orthogonalization without normalization; inputs must be independent.
fn orthogonalize(vectors: &[ColumnVec]) -> Vec<ColumnVec> {
    let mut out: Vec<ColumnVec> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for prev in &out {
            let denom = inner_product(prev, prev);
            let coeff = inner_product(prev, &w)
                .mul(denom.inv().expect("independent vectors have nonzero norm"));
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= &(&coeff * pi);
            }
        }
        out.push(w);
    }
    out
}

/// Simultaneously diagonalize pairwise-commuting Hermitian involutions.
///
/// Fails with the offending index or pair when an input is not Hermitian,
/// not an involution, or does not commute with another input.
pub fn joint_eigen(ops: &[Matrix]) -> Result<JointEigenDecomposition> {
    if ops.is_empty() {
        return Err(Error::InvalidInput(
            "joint diagonalization needs at least one operator".into(),
        ));
    }
    let d = ops[0].dim();
    for (i, a) in ops.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "operator {i} has dimension {} instead of {d}",
                a.dim()
            )));
        }
        if !a.is_hermitian() {
            return Err(Error::PredicateFailed(format!(
                "operator {i} is not Hermitian"
            )));
        }
        if !a.is_involution() {
            return Err(Error::PredicateFailed(format!(
                "operator {i} does not square to the identity"
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

    // Start from the standard basis and refine by each operator's
    // eigenspaces. Eigenspaces of earlier operators are invariant under later
    // ones because the family commutes, so restriction is well defined.
    let standard: Vec<ColumnVec> = (0..d)
        .map(|i| {
            let mut e = vec![GaussianRational::zero(); d];
            e[i] = GaussianRational::one();
            e
        })
        .collect();
    let mut leaves: Vec<(Vec<ColumnVec>, Vec<Sign>)> = vec![(standard, Vec::new())];
    for a in ops {
        let mut next = Vec::with_capacity(leaves.len() * 2);
        for (basis, evals) in leaves {
            let mut plus_basis = Vec::new();
            let mut minus_basis = Vec::new();
            let mut plus_ech = EchelonBasis::new();
            let mut minus_ech = EchelonBasis::new();
            for v in &basis {
                let av = mat_vec(a, v);
                // Images of (I + A)v and (I - A)v span the two eigenspace
                // intersections; the factor 1/2 does not change spans.
                let plus: ColumnVec = v.iter().zip(&av).map(|(x, y)| x.clone() + y).collect();
                let minus: ColumnVec = v
                    .iter()
                    .zip(&av)
                    .map(|(x, y)| x.clone() - y.clone())
                    .collect();
                if plus_ech.try_insert(&plus) {
                    plus_basis.push(plus);
                }
                if minus_ech.try_insert(&minus) {
                    minus_basis.push(minus);
                }
            }
            if !plus_basis.is_empty() {
                let mut e = evals.clone();
                e.push(1);
                next.push((plus_basis, e));
            }
            if !minus_basis.is_empty() {
                let mut e = evals.clone();
                e.push(-1);
                next.push((minus_basis, e));
            }
        }
        leaves = next;
    }

    let mut columns: Vec<ColumnVec> = Vec::with_capacity(d);
    let mut diags: Vec<Vec<Sign>> = vec![Vec::with_capacity(d); ops.len()];
    let mut blocks = Vec::with_capacity(leaves.len());
    for (basis, evals) in &leaves {
        let ortho = orthogonalize(basis);
        let start = columns.len();
        blocks.push((start..start + ortho.len()).collect::<Vec<_>>());
        for v in ortho {
            // Canonical scaling: first nonzero coordinate becomes 1. Keeps
            // already-diagonal inputs on the standard basis.
            let lead = v
                .iter()
                .find(|e| !e.is_zero())
                .expect("basis vectors are nonzero")
                .inv()
                .expect("nonzero entry");
            let scaled: ColumnVec = v.iter().map(|e| (&lead).mul(e)).collect();
            columns.push(scaled);
            for (i, &e) in evals.iter().enumerate() {
                diags[i].push(e);
            }
        }
    }
    debug_assert_eq!(columns.len(), d, "eigenspace dimensions must sum to d");

    let basis = Matrix::from_fn(d, |r, c| columns[c][r].clone())?;
    Ok(JointEigenDecomposition {
        basis,
        diags,
        blocks,
    })
}

/// The diagonal of `C* C`, after checking it really is diagonal with nonzero
/// entries (i.e. `C` has nonzero pairwise-orthogonal columns).
fn column_gram_diagonal(c: &Matrix) -> Result<Vec<GaussianRational>> {
    let gram = c.conjugate_transpose().mul(c)?;
    let d = c.dim();
    let mut diag = Vec::with_capacity(d);
    for r in 0..d {
        for col in 0..d {
            if r != col && !gram.entry(r, col).is_zero() {
                return Err(Error::PredicateFailed(
                    "basis columns are not pairwise orthogonal".into(),
                ));
            }
        }
        if gram.entry(r, r).is_zero() {
            return Err(Error::PredicateFailed(
                "basis has a zero column, hence is not invertible".into(),
            ));
        }
        diag.push(gram.entry(r, r).clone());
    }
    Ok(diag)
}

/// `C^{-1} M C` for a basis `C` with orthogonal columns, computed as
/// `(C*C)^{-1} C* M C`.
pub fn conjugate(c: &Matrix, m: &Matrix) -> Result<Matrix> {
    let d0 = column_gram_diagonal(c)?;
    let mut out = c.conjugate_transpose().mul(m)?.mul(c)?;
    let d = out.dim();
    for r in 0..d {
        let inv = d0[r].inv().expect("checked nonzero");
        for col in 0..d {
            let v = (&inv).mul(out.entry(r, col));
            out.set_entry(r, col, v);
        }
    }
    Ok(out)
}

/// `C D C^{-1}` for diagonal `D` (given by its diagonal entries), computed as
/// `C D (C*C)^{-1} C*`.
///
/// When `D` has `{+1,-1}` diagonal the result is a Hermitian involution:
/// both `D` and `C*C` are real diagonal, so they commute and conjugation by
/// `C` preserves the defining equations.
pub fn inverse_conjugate(c: &Matrix, diag: &[GaussianRational]) -> Result<Matrix> {
    let d = c.dim();
    if diag.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "diagonal of length {} against dimension {d}",
            diag.len()
        )));
    }
    let d0 = column_gram_diagonal(c)?;
    // Scale column j of C by diag[j] / d0[j], then multiply by C*.
    let scaled = Matrix::from_fn(d, |r, col| {
        (&(&diag[col]).mul(&d0[col].inv().expect("checked nonzero"))).mul(c.entry(r, col))
    })?;
    scaled.mul(&c.conjugate_transpose())
}

/// [`inverse_conjugate`] with a `{+1,-1}` diagonal.
pub fn inverse_conjugate_signs(c: &Matrix, signs: &[Sign]) -> Result<Matrix> {
    let diag: Vec<GaussianRational> = signs
        .iter()
        .map(|&s| GaussianRational::from_int(i64::from(s)))
        .collect();
    inverse_conjugate(c, &diag)
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    basis: MatrixDoc,
    diags: Vec<Vec<i8>>,
    blocks: Vec<Vec<usize>>,
}

/// Serialize a decomposition (matrix format plus `diags` and `blocks`).
pub fn serialize_decomposition(d: &JointEigenDecomposition) -> String {
    let doc = DecompositionDoc {
        basis: matrix_to_doc(&d.basis),
        diags: d.diags.clone(),
        blocks: d.blocks.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse a serialized decomposition.
pub fn parse_decomposition(text: &str) -> Result<JointEigenDecomposition> {
    let doc: DecompositionDoc = serde_json::from_str(text)?;
    Ok(JointEigenDecomposition {
        basis: matrix_from_doc(&doc.basis)?,
        diags: doc.diags,
        blocks: doc.blocks,
    })
}

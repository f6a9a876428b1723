//! Kronecker-product closure operations on operator assignments.
//!
//! A Boolean operation `f` of arity `m` extends to Hermitian involutions
//! `X_1, ..., X_m` on spaces of dimensions `d_1, ..., d_m` by
//!
//! ```text
//! F(X_1, ..., X_m) = sum_S fhat(S) (x)_{i} X_i^{S(i)}
//! ```
//!
//! where `X_i^0` is the identity of that factor and `fhat` are the
//! coefficients of `f`'s multilinear representation. The output lives on the
//! tensor product (dimension `prod d_i`), is again a Hermitian involution,
//! sends commuting inputs to commuting outputs, and agrees with `f` on
//! scalars: `F(a_1 I, ..., a_m I) = f(a) I`. When `f` preserves a relation
//! `R`, applying `F` componentwise to satisfying fully commuting assignments
//! yields a satisfying fully commuting assignment again.
//!
//! The plain operator product is *not* such an extension: the magic-square
//! witness satisfies every row equation, yet the componentwise ordinary
//! product of its rows violates the even-parity relation
//! ([`ordinary_product_counterexample`] exhibits this exactly), while the
//! Kronecker form succeeds on the same input.

use serde::{Deserialize, Serialize};

use crate::classify::{is_invariant, language_invariant, BooleanOperation, PpFormula};
use crate::error::{Error, Result};
use crate::fourier::{indicator_poly, transform, MultilinearPoly, TruthTable};
use crate::gallery::mermin_witness;
use crate::matrix::{eval_poly_at, kron_all, operator_value, Matrix, OperatorAssignment};
use crate::model::{BooleanRelation, Constraint, ConstraintLanguage, Instance, ScopeEntry, Sign};
use crate::scalar::rat;

/// Cap on the output dimension of a Kronecker application.
pub const MAX_OUTPUT_DIM: usize = 4096;

/// A Boolean operation together with its multilinear coefficients, ready to
/// be applied to operators.
#[derive(Clone, Debug)]
pub struct OperatorOperation {
    boolean: BooleanOperation,
    coefficients: MultilinearPoly,
}

impl OperatorOperation {
    pub fn new(boolean: BooleanOperation) -> Self {
        let table = TruthTable::from_signs(boolean.arity(), boolean.table())
            .expect("operation tables are total");
        let coefficients = transform(&table);
        OperatorOperation {
            boolean,
            coefficients,
        }
    }

    pub fn boolean(&self) -> &BooleanOperation {
        &self.boolean
    }

    pub fn coefficients(&self) -> &MultilinearPoly {
        &self.coefficients
    }

    /// Apply to Hermitian involutions (dimensions may differ per slot).
    pub fn apply(&self, ops: &[Matrix]) -> Result<Matrix> {
        let m = self.boolean.arity();
        if ops.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "operation of arity {m} applied to {} operators",
                ops.len()
            )));
        }
        let mut total_dim: usize = 1;
        for (i, op) in ops.iter().enumerate() {
            if !op.is_hermitian() || !op.is_involution() {
                return Err(Error::PredicateFailed(format!(
                    "input {i} is not a Hermitian involution"
                )));
            }
            total_dim = total_dim.saturating_mul(op.dim());
        }
        if total_dim > MAX_OUTPUT_DIM {
            return Err(Error::CapExceeded(format!(
                "output dimension {total_dim} exceeds the cap {MAX_OUTPUT_DIM}"
            )));
        }
        let mut acc = Matrix::zero(total_dim)?;
        for (mask, coeff) in self.coefficients.terms() {
            let factors: Vec<Matrix> = ops
                .iter()
                .enumerate()
                .map(|(i, op)| {
                    if (mask >> i) & 1 == 1 {
                        op.clone()
                    } else {
                        Matrix::identity(op.dim()).expect("dim positive")
                    }
                })
                .collect();
            acc = acc.add(&kron_all(&factors).scalar_mul_rational(coeff))?;
        }
        Ok(acc)
    }
}

/// [`OperatorOperation::apply`] as a free function.
pub fn apply_closure(f: &BooleanOperation, ops: &[Matrix]) -> Result<Matrix> {
    OperatorOperation::new(f.clone()).apply(ops)
}

/// Apply a closure operation componentwise to `m` fully commuting
/// `r`-variable assignments (given as matrix tuples, one per slot; dimensions
/// may differ across slots but not within one).
///
/// The output tuple is verified fully commuting. When `relation` is given
/// and every input tuple satisfies its indicator equation, the output is
/// verified to satisfy it as well.
pub fn apply_closure_assignments(
    f: &BooleanOperation,
    assignments: &[Vec<Matrix>],
    relation: Option<&BooleanRelation>,
) -> Result<Vec<Matrix>> {
    let m = f.arity();
    if assignments.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "operation of arity {m} applied to {} assignments",
            assignments.len()
        )));
    }
    let Some(r) = assignments.first().map(Vec::len) else {
        return Err(Error::InvalidInput("no assignments given".into()));
    };
    if assignments.iter().any(|a| a.len() != r) {
        return Err(Error::DimensionMismatch(
            "assignments disagree on the number of variables".into(),
        ));
    }
    for (slot, tuple) in assignments.iter().enumerate() {
        for i in 0..r {
            for j in (i + 1)..r {
                if !tuple[i].commutes(&tuple[j])? {
                    return Err(Error::BrokenPrecondition(format!(
                        "assignment {slot} is not fully commuting (positions {i}, {j})"
                    )));
                }
            }
        }
    }
    let op = OperatorOperation::new(f.clone());
    let mut out = Vec::with_capacity(r);
    for pos in 0..r {
        let slice: Vec<Matrix> = assignments.iter().map(|a| a[pos].clone()).collect();
        out.push(op.apply(&slice)?);
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if !out[i].commutes(&out[j])? {
                return Err(Error::BrokenPrecondition(format!(
                    "closure output is not fully commuting (positions {i}, {j})"
                )));
            }
        }
    }
    if let Some(rel) = relation {
        let poly = indicator_poly(rel);
        let all_satisfy = assignments.iter().try_fold(true, |acc, tuple| {
            let value = eval_poly_at(&poly, tuple)?;
            let minus_i = Matrix::identity(tuple[0].dim())?.neg();
            Ok::<bool, Error>(acc && value == minus_i)
        })?;
        if all_satisfy {
            let value = eval_poly_at(&poly, &out)?;
            let minus_i = Matrix::identity(out[0].dim())?.neg();
            if value != minus_i {
                return Err(Error::BrokenPrecondition(
                    "closure output violates a relation every input satisfied".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// Report of the ordinary-product counterexample on the magic square.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductCounterexampleReport {
    /// Every row of the witness satisfies the even-parity relation.
    pub rows_satisfy_even_parity: bool,
    /// Ordinary column products `D_j = X_{1j} X_{2j} X_{3j}`: whether each
    /// equals the identity.
    pub column_products_are_identity: [bool; 3],
    /// `D_1 D_2 D_3 = -I`, so the tuple of column products violates even
    /// parity.
    pub product_tuple_violates_even_parity: bool,
    /// The Kronecker composition of the three rows satisfies even parity on
    /// dimension 64.
    pub kronecker_composition_satisfies: bool,
    pub kronecker_dim: usize,
}

impl ProductCounterexampleReport {
    pub fn all_assertions_hold(&self) -> bool {
        self.rows_satisfy_even_parity
            && self.column_products_are_identity == [true, true, false]
            && self.product_tuple_violates_even_parity
            && self.kronecker_composition_satisfies
            && self.kronecker_dim == 64
    }
}

/// Run the ordinary-product counterexample on the committed magic-square
/// witness and report every assertion.
pub fn ordinary_product_counterexample() -> Result<ProductCounterexampleReport> {
    let w = mermin_witness();
    let get = |r: usize, c: usize| {
        w.get(&format!("X{r}{c}"))
            .cloned()
            .expect("witness is total")
    };
    let even = crate::model::relations::even(3);
    let poly = indicator_poly(&even);
    let minus_i4 = Matrix::identity(4)?.neg();

    let rows: Vec<Vec<Matrix>> = (1..=3)
        .map(|r| (1..=3).map(|c| get(r, c)).collect())
        .collect();
    let rows_satisfy = rows
        .iter()
        .map(|row| Ok(eval_poly_at(&poly, row)? == minus_i4))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);

    // Ordinary products down the columns.
    let mut column_products = Vec::with_capacity(3);
    for c in 1..=3 {
        column_products.push(get(1, c).mul(&get(2, c))?.mul(&get(3, c))?);
    }
    let i4 = Matrix::identity(4)?;
    let identity_flags = [
        column_products[0] == i4,
        column_products[1] == i4,
        column_products[2] == i4,
    ];
    let triple_product = column_products[0]
        .mul(&column_products[1])?
        .mul(&column_products[2])?;
    let violates = triple_product == minus_i4 && eval_poly_at(&poly, &column_products)? != minus_i4;

    // Kronecker composition of the rows.
    let composed = apply_closure_assignments(&BooleanOperation::xor3(), &rows, Some(&even))?;
    let dim = composed[0].dim();
    let kron_value = eval_poly_at(&poly, &composed)?;
    let kron_ok = kron_value == Matrix::identity(dim)?.neg();

    Ok(ProductCounterexampleReport {
        rows_satisfy_even_parity: rows_satisfy,
        column_products_are_identity: identity_flags,
        product_tuple_violates_even_parity: violates,
        kronecker_composition_satisfies: kron_ok,
        kronecker_dim: dim,
    })
}

/// One operation's row in a [`CollapseDemoReport`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub operation: String,
    /// Whether the operation preserves every relation of the language.
    pub closure_of_language: bool,
    /// Whether the operation preserves the candidate relation.
    pub preserves_relation: bool,
}

/// Report of a definability-collapse demonstration.
///
/// Membership side: for each tuple of `R`, a supplied operator witness
/// satisfies the instance obtained from the formula by substituting the
/// tuple for the free variables. Invariance side: for each supplied Boolean
/// operation, whether it is a closure operation of the language and whether
/// it preserves `R`. A closure operation of the language that does not
/// preserve `R` rules out any (even operator-quantified) pp-definition of
/// `R` from the language.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CollapseDemoReport {
    pub membership_checked: usize,
    pub membership_all_satisfied: bool,
    pub invariance: Vec<InvarianceRow>,
}

impl CollapseDemoReport {
    /// Operations that witness non-definability: closure operations of the
    /// language under which the relation is not invariant.
    pub fn obstructions(&self) -> Vec<&InvarianceRow> {
        self.invariance
            .iter()
            .filter(|row| row.closure_of_language && !row.preserves_relation)
            .collect()
    }
}

/// The instance `psi(x/a, y/Y)`: the formula's atoms over the language, with
/// free variables replaced by the constants of `a` and bound variables kept
/// as instance variables.
pub fn substitute_instance(
    formula: &PpFormula,
    lang: &ConstraintLanguage,
    a: &[Sign],
) -> Result<Instance> {
    if a.len() != formula.free.len() {
        return Err(Error::InvalidInput(format!(
            "tuple length {} does not match {} free variables",
            a.len(),
            formula.free.len()
        )));
    }
    let constraints = formula
        .atoms
        .iter()
        .map(|atom| {
            let scope = atom
                .scope
                .iter()
                .map(|e| match e {
                    ScopeEntry::Const(c) => ScopeEntry::Const(*c),
                    ScopeEntry::Var(v) => match formula.free.iter().position(|f| f == v) {
                        Some(k) => ScopeEntry::Const(a[k]),
                        None => ScopeEntry::Var(v.clone()),
                    },
                })
                .collect();
            Constraint {
                relation: atom.relation.clone(),
                scope,
            }
        })
        .collect();
    Instance::new(lang.clone(), formula.bound.clone(), constraints)
}

/// Demonstrate the collapse of operator-quantified definability: verify the
/// membership side of a candidate definition and tabulate invariance under
/// the supplied operations.
pub fn ppstar_collapse_demo(
    relation: &BooleanRelation,
    lang: &ConstraintLanguage,
    formula: &PpFormula,
    witnesses: &[(Vec<Sign>, OperatorAssignment)],
    operations: &[BooleanOperation],
) -> Result<CollapseDemoReport> {
    let mut checked = 0;
    let mut all_ok = true;
    for tuple in relation.tuples() {
        let Some((_, witness)) = witnesses.iter().find(|(t, _)| t == tuple) else {
            return Err(Error::InvalidInput(format!(
                "no witness supplied for tuple {tuple:?}"
            )));
        };
        let inst = substitute_instance(formula, lang, tuple)?;
        let value = operator_value(witness, &inst)?;
        checked += 1;
        if value != rat(1) {
            all_ok = false;
        }
    }
    if !all_ok {
        return Err(Error::InvalidAssignment(
            "a supplied witness does not satisfy its substituted instance".into(),
        ));
    }
    let invariance = operations
        .iter()
        .map(|op| InvarianceRow {
            operation: op.name().to_string(),
            closure_of_language: language_invariant(lang, op),
            preserves_relation: is_invariant(relation, op),
        })
        .collect();
    Ok(CollapseDemoReport {
        membership_checked: checked,
        membership_all_satisfied: all_ok,
        invariance,
    })
}

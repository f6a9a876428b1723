//! The unique multilinear polynomial representation of functions on
//! `{+1, -1}^n`.
//!
//! Every `f : {+1,-1}^n -> Q` is represented by exactly one multilinear
//! polynomial `P_f(X_1,...,X_n) = sum_S fhat(S) prod_{i in S} X_i` with
//! `fhat(S) = 2^{-n} sum_a f(a) prod_{i in S} a_i`. For `{+1,-1}`-valued `f`
//! every coefficient is an integer multiple of `2^{-n}`.
//!
//! The *indicator* polynomial of a relation `R` represents the function that
//! maps tuples in `R` to `-1` and all other tuples to `+1`; a constraint is
//! satisfied exactly when its indicator polynomial evaluates to `-1` (or to
//! `-I` under an operator assignment).
//!
//! Products reduce with `X_i^2 = 1`, which on coefficients is the convolution
//! `(fg)hat(S) = sum_T fhat(T) ghat(S delta T)` over subset symmetric
//! difference. (Some statements of the convolution formula misprint the first
//! factor's index as `S`; the form used here is the one consistent with
//! pointwise products, and it is tested exhaustively against truth tables.)
//!
//! Subsets of `[n]` are bitmasks, so polynomials are capped at 64 variables.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{index_from_tuple, BooleanRelation, Sign};
use crate::scalar::{rat, ratio, rational_from_str, rational_to_string, Rational};

/// Maximum number of variables in one polynomial (subsets are `u64` masks).
pub const MAX_VARS: usize = 64;

/// A multilinear polynomial with exact rational coefficients, stored sparsely.
///
/// Zero coefficients are never stored, so equality of representations is
/// equality of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    nvars: usize,
    coeffs: BTreeMap<u64, Rational>,
}

impl MultilinearPoly {
    /// The zero polynomial on `nvars` variables.
    pub fn zero(nvars: usize) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::CapExceeded(format!(
                "polynomials support at most {MAX_VARS} variables, got {nvars}"
            )));
        }
        Ok(MultilinearPoly {
            nvars,
            coeffs: BTreeMap::new(),
        })
    }

    /// A constant polynomial.
    pub fn constant(nvars: usize, value: Rational) -> Result<Self> {
        let mut p = Self::zero(nvars)?;
        p.set(0, value);
        Ok(p)
    }

    /// Build from explicit (subset mask, coefficient) terms.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (u64, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars)?;
        for (mask, c) in terms {
            if nvars < MAX_VARS && mask >= (1u64 << nvars) {
                return Err(Error::InvalidInput(format!(
                    "term mask {mask:#x} out of range for {nvars} variables"
                )));
            }
            let mut val = p.coeff(mask);
            val += c;
            p.set(mask, val);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Coefficient at the subset `mask` (zero if absent).
    pub fn coeff(&self, mask: u64) -> Rational {
        self.coeffs
            .get(&mask)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn set(&mut self, mask: u64, value: Rational) {
        if value.is_zero() {
            self.coeffs.remove(&mask);
        } else {
            self.coeffs.insert(mask, value);
        }
    }

    /// Terms in increasing mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&m| m == 0)
    }

    pub fn negate(&self) -> MultilinearPoly {
        MultilinearPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &MultilinearPoly) -> Result<MultilinearPoly> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidInput(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        let mut out = self.clone();
        for (m, c) in other.coeffs.iter() {
            let mut val = out.coeff(*m);
            val += c;
            out.set(*m, val);
        }
        Ok(out)
    }
}

/// A total truth table on `{+1,-1}^n`, indexed by [`index_from_tuple`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    nvars: usize,
    values: Vec<Rational>,
}

impl TruthTable {
    /// Build from a value vector of length `2^nvars`.
    pub fn new(nvars: usize, values: Vec<Rational>) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::CapExceeded(format!(
                "truth tables support at most {MAX_VARS} variables"
            )));
        }
        if values.len() != 1usize << nvars {
            return Err(Error::InvalidInput(format!(
                "truth table on {nvars} variables needs {} entries, got {}",
                1usize << nvars,
                values.len()
            )));
        }
        Ok(TruthTable { nvars, values })
    }

    /// Build from `{+1,-1}` values.
    pub fn from_signs(nvars: usize, signs: &[Sign]) -> Result<Self> {
        Self::new(nvars, signs.iter().map(|&s| rat(i64::from(s))).collect())
    }

    /// The `{+1,-1}`-valued indicator of a relation: `-1` on tuples in `R`,
    /// `+1` elsewhere.
    pub fn indicator(rel: &BooleanRelation) -> Self {
        let n = rel.arity();
        let mut values = vec![rat(1); 1 << n];
        for t in rel.tuples() {
            values[index_from_tuple(t)] = rat(-1);
        }
        TruthTable { nvars: n, values }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value_at_index(&self, idx: usize) -> &Rational {
        &self.values[idx]
    }

    pub fn value(&self, tuple: &[Sign]) -> &Rational {
        &self.values[index_from_tuple(tuple)]
    }
}

/// The transform: the unique multilinear polynomial representing `table`.
///
/// Coefficients are `fhat(S) = 2^{-n} sum_a f(a) prod_{i in S} a_i`, computed
/// by in-place Walsh-Hadamard butterflies.
pub fn transform(table: &TruthTable) -> MultilinearPoly {
    let n = table.nvars;
    let mut work = table.values.clone();
    // Butterfly per variable: split on whether the variable is +1 or -1.
    for bit in 0..n {
        let step = 1usize << bit;
        let mut base = 0;
        while base < work.len() {
            for j in base..base + step {
                let plus = work[j].clone() + work[j + step].clone();
                let minus = work[j].clone() - work[j + step].clone();
                work[j] = plus;
                work[j + step] = minus;
            }
            base += step << 1;
        }
    }
    let scale = ratio(1, 1i64 << n.min(62));
    // For n > 62 the shift above would overflow; polynomials that large are
    // far outside desk scale, but keep the arithmetic correct anyway.
    let scale = if n > 62 {
        let mut s = rat(1);
        for _ in 0..n {
            s /= rat(2);
        }
        s
    } else {
        scale
    };
    let mut poly = MultilinearPoly::zero(n).expect("nvars checked by TruthTable");
    for (mask, v) in work.into_iter().enumerate() {
        if !v.is_zero() {
            poly.set(mask as u64, v * scale.clone());
        }
    }
    poly
}

/// The indicator polynomial of a relation: the transform of the function that
/// maps tuples in `R` to `-1` and all other tuples to `+1`.
pub fn indicator_poly(rel: &BooleanRelation) -> MultilinearPoly {
    transform(&TruthTable::indicator(rel))
}

/// The indicator polynomial of the clause with the given literals, via the
/// product form `2^{1-r} prod_i (1 + sg(l_i) X_i) - 1`.
///
/// `literals` are `(variable index, sign)` pairs with distinct indices below
/// `r = literals.len()`; the polynomial is on `r` variables.
pub fn clause_poly(literals: &[(usize, Sign)]) -> Result<MultilinearPoly> {
    let r = literals.len();
    let mut seen = vec![false; r];
    let mut sign_of = vec![0i8; r];
    for &(idx, sg) in literals {
        if idx >= r {
            return Err(Error::InvalidInput(format!(
                "literal index {idx} out of range for a clause of {r} literals"
            )));
        }
        if seen[idx] {
            return Err(Error::InvalidInput(format!(
                "repeated variable index {idx} in clause"
            )));
        }
        if sg != 1 && sg != -1 {
            return Err(Error::InvalidInput(format!("invalid literal sign {sg}")));
        }
        seen[idx] = true;
        sign_of[idx] = sg;
    }
    let mut poly = MultilinearPoly::zero(r)?;
    let scale = if r == 0 { rat(2) } else { ratio(2, 1i64 << r) };
    for mask in 0u64..(1u64 << r) {
        let mut c = scale.clone();
        for (i, s) in sign_of.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                c *= rat(i64::from(*s));
            }
        }
        poly.set(mask, c);
    }
    let mut constant = poly.coeff(0);
    constant -= rat(1);
    poly.set(0, constant);
    Ok(poly)
}

/// Pointwise product of the represented functions; coefficients convolve over
/// symmetric difference and `X_i^2` reduces to `1`.
pub fn multiply(p: &MultilinearPoly, q: &MultilinearPoly) -> Result<MultilinearPoly> {
    if p.nvars != q.nvars {
        return Err(Error::InvalidInput(format!(
            "variable count mismatch: {} vs {}",
            p.nvars, q.nvars
        )));
    }
    let mut out = MultilinearPoly::zero(p.nvars)?;
    for (s, a) in p.terms() {
        for (t, b) in q.terms() {
            let mask = s ^ t;
            let mut val = out.coeff(mask);
            val += a.clone() * b.clone();
            out.set(mask, val);
        }
    }
    Ok(out)
}

/// Evaluate at a rational point: `sum_S coeff(S) prod_{i in S} a_i`.
pub fn evaluate(p: &MultilinearPoly, point: &[Rational]) -> Result<Rational> {
    if point.len() != p.nvars {
        return Err(Error::InvalidInput(format!(
            "point has length {}, polynomial has {} variables",
            point.len(),
            p.nvars
        )));
    }
    let mut total = Rational::zero();
    for (mask, c) in p.terms() {
        let mut term = c.clone();
        for (i, a) in point.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                term *= a.clone();
            }
        }
        total += term;
    }
    Ok(total)
}

/// Evaluate at a `{+1,-1}` tuple.
pub fn evaluate_signs(p: &MultilinearPoly, tuple: &[Sign]) -> Result<Rational> {
    let point: Vec<Rational> = tuple.iter().map(|&s| rat(i64::from(s))).collect();
    evaluate(p, &point)
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermDoc {
    vars: Vec<usize>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    nvars: usize,
    terms: Vec<TermDoc>,
}

/// Serialize: vars ascending within a term, terms sorted by subset mask,
/// coefficients as `p/q` in lowest terms.
pub fn serialize_poly(p: &MultilinearPoly) -> String {
    let doc = PolyDoc {
        nvars: p.nvars,
        terms: p
            .terms()
            .map(|(mask, c)| TermDoc {
                vars: (0..p.nvars).filter(|i| (mask >> i) & 1 == 1).collect(),
                coef: rational_to_string(c),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Parse the polynomial JSON format.
pub fn parse_poly(text: &str) -> Result<MultilinearPoly> {
    let doc: PolyDoc = serde_json::from_str(text)?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in &doc.terms {
        let mut mask = 0u64;
        for &v in &t.vars {
            if v >= doc.nvars {
                return Err(Error::InvalidInput(format!(
                    "term variable {v} out of range for nvars {}",
                    doc.nvars
                )));
            }
            mask |= 1 << v;
        }
        terms.push((mask, rational_from_str(&t.coef)?));
    }
    MultilinearPoly::from_terms(doc.nvars, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{relations, tuple_from_index};

    /// Independent oracle: direct-sum transform straight from the definition.
    fn transform_by_definition(table: &TruthTable) -> MultilinearPoly {
        let n = table.nvars();
        let mut poly = MultilinearPoly::zero(n).unwrap();
        for mask in 0u64..(1u64 << n) {
            let mut total = Rational::zero();
            for idx in 0..(1usize << n) {
                let tuple = tuple_from_index(idx, n);
                let mut prod = table.value_at_index(idx).clone();
                for (i, &s) in tuple.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        prod *= rat(i64::from(s));
                    }
                }
                total += prod;
            }
            let mut c = total;
            c /= rat(1i64 << n);
            if !c.is_zero() {
                poly = poly
                    .add(&MultilinearPoly::from_terms(n, [(mask, c)]).unwrap())
                    .unwrap();
            }
        }
        poly
    }

    fn and2_table() -> TruthTable {
        // Conjunction: -1 (true) exactly when both inputs are -1.
        let signs: Vec<Sign> = (0..4)
            .map(|idx| {
                let t = tuple_from_index(idx, 2);
                if t == vec![-1, -1] {
                    -1
                } else {
                    1
                }
            })
            .collect();
        TruthTable::from_signs(2, &signs).unwrap()
    }

    #[test]
    fn and2_transform_matches_half_one_plus_x_plus_y_minus_xy() {
        let p = transform(&and2_table());
        assert_eq!(p.coeff(0b00), ratio(1, 2));
        assert_eq!(p.coeff(0b01), ratio(1, 2));
        assert_eq!(p.coeff(0b10), ratio(1, 2));
        assert_eq!(p.coeff(0b11), ratio(-1, 2));
        assert_eq!(p.num_terms(), 4);
    }

    #[test]
    fn constant_minus_one_function() {
        let table = TruthTable::from_signs(2, &[-1, -1, -1, -1]).unwrap();
        let p = transform(&table);
        assert_eq!(p.coeff(0), rat(-1));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn one_in_three_indicator_polynomial() {
        let p = indicator_poly(&relations::r_one_in_three());
        assert_eq!(p.coeff(0b111), ratio(3, 4));
        for mask in [0b011u64, 0b101, 0b110] {
            assert_eq!(p.coeff(mask), ratio(1, 4));
        }
        for mask in [0b001u64, 0b010, 0b100] {
            assert_eq!(p.coeff(mask), ratio(-1, 4));
        }
        assert_eq!(p.coeff(0), ratio(1, 4));
    }

    #[test]
    fn full_binary_relation_indicator_is_constant_minus_one() {
        let p = indicator_poly(&relations::t2());
        assert_eq!(p.coeff(0), rat(-1));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn empty_relation_indicator_is_constant_plus_one() {
        let p = indicator_poly(&BooleanRelation::empty(1));
        assert_eq!(p.coeff(0), rat(1));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn butterfly_transform_matches_definition_oracle() {
        // All {+1,-1} tables on up to 3 variables would be 2^8; sample n = 3,
        // exhaust n <= 2.
        for n in 0..=2usize {
            for code in 0..(1u32 << (1 << n)) {
                let signs: Vec<Sign> = (0..(1 << n))
                    .map(|i| if (code >> i) & 1 == 1 { -1 } else { 1 })
                    .collect();
                let table = TruthTable::from_signs(n, &signs).unwrap();
                assert_eq!(transform(&table), transform_by_definition(&table));
            }
        }
        let signs: Vec<Sign> = (0..8).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
        let table = TruthTable::from_signs(3, &signs).unwrap();
        assert_eq!(transform(&table), transform_by_definition(&table));
    }

    #[test]
    fn transform_agrees_with_function_everywhere() {
        for n in 0..=2usize {
            for code in 0..(1u32 << (1 << n)) {
                let signs: Vec<Sign> = (0..(1 << n))
                    .map(|i| if (code >> i) & 1 == 1 { -1 } else { 1 })
                    .collect();
                let table = TruthTable::from_signs(n, &signs).unwrap();
                let p = transform(&table);
                for idx in 0..(1usize << n) {
                    let tuple = tuple_from_index(idx, n);
                    assert_eq!(
                        evaluate_signs(&p, &tuple).unwrap(),
                        *table.value_at_index(idx)
                    );
                }
            }
        }
    }

    #[test]
    fn clause_poly_or2_positive() {
        // (x1 or x2): -1/2 + X1/2 + X2/2 + X1X2/2.
        let p = clause_poly(&[(0, 1), (1, 1)]).unwrap();
        assert_eq!(p.coeff(0), ratio(-1, 2));
        assert_eq!(p.coeff(0b01), ratio(1, 2));
        assert_eq!(p.coeff(0b10), ratio(1, 2));
        assert_eq!(p.coeff(0b11), ratio(1, 2));
    }

    #[test]
    fn clause_poly_matches_relation_indicator_for_small_arity() {
        for r in 1..=3usize {
            for signs_code in 0..(1usize << r) {
                let signs: Vec<Sign> = tuple_from_index(signs_code, r);
                let lits: Vec<(usize, Sign)> =
                    signs.iter().enumerate().map(|(i, &s)| (i, s)).collect();
                let p = clause_poly(&lits).unwrap();
                let rel = relations::clause(&signs);
                assert_eq!(p, indicator_poly(&rel), "clause signs {signs:?}");
            }
        }
    }

    #[test]
    fn unit_clause_polys() {
        // (x1) -> X1; (not x1) -> -X1.
        let pos = clause_poly(&[(0, 1)]).unwrap();
        assert_eq!(pos.coeff(0b1), rat(1));
        assert_eq!(pos.num_terms(), 1);
        let neg = clause_poly(&[(0, -1)]).unwrap();
        assert_eq!(neg.coeff(0b1), rat(-1));
        assert_eq!(neg.num_terms(), 1);
    }

    #[test]
    fn clause_poly_rejects_repeated_index() {
        assert!(clause_poly(&[(0, 1), (0, -1)]).is_err());
    }

    #[test]
    fn multiply_identity_and_idempotent_reduction() {
        let p = indicator_poly(&relations::r_one_in_three());
        let one = MultilinearPoly::constant(3, rat(1)).unwrap();
        assert_eq!(multiply(&p, &one).unwrap(), p);

        let x1 = MultilinearPoly::from_terms(1, [(0b1, rat(1))]).unwrap();
        let sq = multiply(&x1, &x1).unwrap();
        assert_eq!(sq, MultilinearPoly::constant(1, rat(1)).unwrap());
    }

    #[test]
    fn square_of_sign_indicator_is_one() {
        let p = indicator_poly(&relations::r_one_in_three());
        let sq = multiply(&p, &p).unwrap();
        assert_eq!(sq, MultilinearPoly::constant(3, rat(1)).unwrap());
    }

    #[test]
    fn multiply_agrees_with_pointwise_products() {
        // Exhaustive over pairs of {+1,-1} tables for n <= 2.
        for n in 0..=2usize {
            let m = 1u32 << (1 << n);
            for code_f in 0..m {
                for code_g in 0..m {
                    let f: Vec<Sign> = (0..(1 << n))
                        .map(|i| if (code_f >> i) & 1 == 1 { -1 } else { 1 })
                        .collect();
                    let g: Vec<Sign> = (0..(1 << n))
                        .map(|i| if (code_g >> i) & 1 == 1 { -1 } else { 1 })
                        .collect();
                    let fg: Vec<Rational> = f
                        .iter()
                        .zip(&g)
                        .map(|(&a, &b)| rat(i64::from(a) * i64::from(b)))
                        .collect();
                    let pf = transform(&TruthTable::from_signs(n, &f).unwrap());
                    let pg = transform(&TruthTable::from_signs(n, &g).unwrap());
                    let expect = transform(&TruthTable::new(n, fg).unwrap());
                    assert_eq!(multiply(&pf, &pg).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let and2 = transform(&and2_table());
        assert_eq!(evaluate_signs(&and2, &[-1, -1]).unwrap(), rat(-1));
        assert_eq!(evaluate_signs(&and2, &[1, -1]).unwrap(), rat(1));

        // At the all +1 point the value is the coefficient sum.
        let p = indicator_poly(&relations::r_one_in_three());
        let sum: Rational = p.terms().map(|(_, c)| c.clone()).sum();
        assert_eq!(evaluate_signs(&p, &[1, 1, 1]).unwrap(), sum);
        assert_eq!(evaluate_signs(&p, &[1, 1, 1]).unwrap(), rat(1));
    }

    #[test]
    fn transform_of_evaluation_table_recovers_polynomial() {
        // Uniqueness on a rational (not only +/-1 valued) polynomial.
        let p = MultilinearPoly::from_terms(
            3,
            [
                (0b000u64, ratio(7, 5)),
                (0b011, ratio(-2, 3)),
                (0b111, ratio(1, 9)),
            ],
        )
        .unwrap();
        let values: Vec<Rational> = (0..8)
            .map(|idx| evaluate_signs(&p, &tuple_from_index(idx, 3)).unwrap())
            .collect();
        let table = TruthTable::new(3, values).unwrap();
        assert_eq!(transform(&table), p);
    }

    #[test]
    fn poly_json_round_trip() {
        let p = indicator_poly(&relations::r_one_in_three());
        let text = serialize_poly(&p);
        assert_eq!(parse_poly(&text).unwrap(), p);
    }
}

//! Cross-module invariants: serialization round trips, value invariances,
//! similarity transport, closure preservation, and the equivalence between
//! the exactly-one indicator equation and the resolution of the identity.

use std::collections::BTreeMap;

use opsat::classify::{is_invariant, BooleanOperation};
use opsat::closure::apply_closure_assignments;
use opsat::contextuality::involution_projector;
use opsat::fourier::{evaluate_signs, indicator_poly, transform, TruthTable};
use opsat::gallery::{pauli_x, pauli_y, pauli_z};
use opsat::matrix::{eval_poly_at, operator_value, Matrix, OperatorAssignment};
use opsat::model::{
    boolean_value, parse_instance, serialize_instance, tuple_from_index, BooleanAssignment,
    BooleanRelation, Constraint, ConstraintLanguage, Instance, ScopeEntry, Sign,
};
use opsat::scalar::{rat, GaussianRational, Rational};
use opsat::spectral::{inverse_conjugate_signs, joint_eigen};

// ---------------------------------------------------------------------------
// Random instances for proptest
// ---------------------------------------------------------------------------

mod generated {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Debug)]
    struct InstanceSketch {
        relations: Vec<(usize, Vec<usize>)>, // (arity, tuple indices)
        nvars: usize,
        constraints: Vec<(usize, Vec<i8>)>, // (relation index, scope encoding)
    }

    fn instance_sketch() -> impl Strategy<Value = InstanceSketch> {
        let relation = (1usize..=3).prop_flat_map(|arity| {
            proptest::collection::vec(0usize..(1 << arity), 0..=(1 << arity))
                .prop_map(move |tuples| (arity, tuples))
        });
        (proptest::collection::vec(relation, 1..=3), 1usize..=6).prop_flat_map(
            |(relations, nvars)| {
                let count = relations.len();
                let arities: Vec<usize> = relations.iter().map(|(a, _)| *a).collect();
                let constraint = (0..count).prop_flat_map(move |rel| {
                    let arity = arities[rel];
                    // Scope encoding per position: 0..nvars = variable index,
                    // nvars = constant +1, nvars + 1 = constant -1.
                    proptest::collection::vec(0i8..(nvars as i8 + 2), arity)
                        .prop_map(move |scope| (rel, scope))
                });
                proptest::collection::vec(constraint, 0..=5).prop_map(move |constraints| {
                    InstanceSketch {
                        relations: relations.clone(),
                        nvars,
                        constraints,
                    }
                })
            },
        )
    }

    fn build_instance(sketch: &InstanceSketch, var_prefix: &str) -> Instance {
        let lang = ConstraintLanguage::from_pairs(sketch.relations.iter().enumerate().map(
            |(i, (arity, tuples))| {
                (
                    format!("R{i}"),
                    BooleanRelation::new(
                        *arity,
                        tuples.iter().map(|&t| tuple_from_index(t, *arity)),
                    )
                    .unwrap(),
                )
            },
        ))
        .unwrap();
        let vars: Vec<String> = (0..sketch.nvars)
            .map(|i| format!("{var_prefix}{i}"))
            .collect();
        let constraints = sketch
            .constraints
            .iter()
            .map(|(rel, scope)| Constraint {
                relation: format!("R{rel}"),
                scope: scope
                    .iter()
                    .map(|&code| {
                        let code = code as usize;
                        if code < sketch.nvars {
                            ScopeEntry::Var(vars[code].clone())
                        } else if code == sketch.nvars {
                            ScopeEntry::Const(1)
                        } else {
                            ScopeEntry::Const(-1)
                        }
                    })
                    .collect(),
            })
            .collect();
        Instance::new(lang, vars, constraints).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn parse_serialize_round_trip(sketch in instance_sketch()) {
            let inst = build_instance(&sketch, "X");
            let text = serialize_instance(&inst);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(serialize_instance(&back), text);
        }

        #[test]
        fn boolean_value_invariances(sketch in instance_sketch(), assignment_code in 0u64..64) {
            let inst = build_instance(&sketch, "X");
            let a = BooleanAssignment::from_pairs(inst.variables().iter().enumerate().map(
                |(i, v)| (v.clone(), if (assignment_code >> i) & 1 == 1 { -1i8 } else { 1 }),
            ));
            let value = boolean_value(&inst, &a).unwrap();

            // The value is k/m for some 0 <= k <= m.
            let m = inst.constraints().len().max(1) as i64;
            let scaled = value.clone() * Rational::new(m.into(), 1.into());
            prop_assert!(scaled.is_integer());
            prop_assert!(value >= rat(0) && value <= rat(1));

            // Permuting constraints does not change the value.
            let mut reversed_constraints: Vec<Constraint> = inst.constraints().to_vec();
            reversed_constraints.reverse();
            let permuted = Instance::new(
                inst.language().clone(),
                inst.variables().to_vec(),
                reversed_constraints,
            )
            .unwrap();
            prop_assert_eq!(boolean_value(&permuted, &a).unwrap(), value.clone());

            // Renaming variables consistently does not change the value.
            let renamed_inst = build_instance(&sketch, "Y");
            let renamed_a = BooleanAssignment::from_pairs(
                a.iter().map(|(v, &s)| (v.replacen('X', "Y", 1), s)),
            );
            prop_assert_eq!(boolean_value(&renamed_inst, &renamed_a).unwrap(), value);
        }

        #[test]
        fn dimension_one_operator_value_matches_boolean(
            sketch in instance_sketch(),
            assignment_code in 0u64..64,
        ) {
            let inst = build_instance(&sketch, "X");
            let a = BooleanAssignment::from_pairs(inst.variables().iter().enumerate().map(
                |(i, v)| (v.clone(), if (assignment_code >> i) & 1 == 1 { -1i8 } else { 1 }),
            ));
            let f = OperatorAssignment::from_boolean(&a);
            prop_assert_eq!(
                operator_value(&f, &inst).unwrap(),
                boolean_value(&inst, &a).unwrap()
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Matrix-level invariants (seeded randomness, exact assertions)
// ---------------------------------------------------------------------------

mod exact {
    use super::*;

    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
        Matrix::from_fn(dim, |_, _| {
            GaussianRational::new(
                Rational::new(rng.gen_range(-3i64..=3).into(), 1.into()),
                Rational::new(rng.gen_range(-3i64..=3).into(), 1.into()),
            )
        })
        .unwrap()
    }

    fn random_invertible(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
        loop {
            let m = random_matrix(rng, dim);
            if m.inverse().is_ok() {
                return m;
            }
        }
    }

    /// A fully commuting tuple of involutions: signs diagonals conjugated by a
    /// common random invertible basis (not necessarily Hermitian afterwards;
    /// polynomial evaluation only needs commutation).
    fn random_commuting_tuple(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Vec<Matrix> {
        let basis = random_invertible(rng, dim);
        let inverse = basis.inverse().unwrap();
        (0..len)
            .map(|_| {
                let signs: Vec<i64> = (0..dim).map(|_| if rng.gen() { 1 } else { -1 }).collect();
                let diag = Matrix::from_fn(dim, |r, c| {
                    if r == c {
                        GaussianRational::from_int(signs[r])
                    } else {
                        GaussianRational::zero()
                    }
                })
                .unwrap();
                basis.mul(&diag).unwrap().mul(&inverse).unwrap()
            })
            .collect()
    }

    #[test]
    fn similarity_transport_of_polynomial_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let poly = indicator_poly(&opsat::model::relations::r_one_in_three());
        for _ in 0..10 {
            let dim = *[2usize, 3, 4].choose(&mut rng).unwrap();
            let ops = random_commuting_tuple(&mut rng, dim, 3);
            let c = random_invertible(&mut rng, dim);
            let c_inv = c.inverse().unwrap();
            let conjugated: Vec<Matrix> = ops
                .iter()
                .map(|a| c.mul(a).unwrap().mul(&c_inv).unwrap())
                .collect();
            let direct = eval_poly_at(&poly, &conjugated).unwrap();
            let transported = c
                .mul(&eval_poly_at(&poly, &ops).unwrap())
                .unwrap()
                .mul(&c_inv)
                .unwrap();
            assert_eq!(direct, transported);
        }
    }

    #[test]
    fn kron_is_multiplicative_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let (da, db) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let a = random_matrix(&mut rng, da);
            let b = random_matrix(&mut rng, db);
            let c = random_matrix(&mut rng, da);
            let d = random_matrix(&mut rng, db);
            let left = a.kron(&b).mul(&c.kron(&d)).unwrap();
            let right = a.mul(&c).unwrap().kron(&b.mul(&d).unwrap());
            assert_eq!(left, right);
        }
    }

    #[test]
    fn joint_eigen_round_trip_on_pauli_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let paulis = [
            pauli_x(),
            pauli_y(),
            pauli_z(),
            Matrix::identity(2).unwrap(),
        ];
        for &factors in &[1usize, 2, 3] {
            // Commuting family: tensor words in {Z, I} together with tensor
            // words in {X, I} that overlap only on identities, or plain
            // random diagonal-conjugated families. Use Z/I words: all commute.
            let dim = 1usize << factors;
            let mut ops = Vec::new();
            for _ in 0..3 {
                let word: Vec<Matrix> = (0..factors)
                    .map(|_| {
                        if rng.gen() {
                            pauli_z()
                        } else {
                            Matrix::identity(2).unwrap()
                        }
                    })
                    .collect();
                ops.push(opsat::matrix::kron_all(&word));
            }
            let dec = joint_eigen(&ops).unwrap();
            for (i, a) in ops.iter().enumerate() {
                let rebuilt = inverse_conjugate_signs(&dec.basis, &dec.diags[i]).unwrap();
                assert_eq!(rebuilt, *a, "dimension {dim}, operator {i}");
            }
            // Eigenvalue count: trace equals diagonal sum.
            for (i, a) in ops.iter().enumerate() {
                let sum: i64 = dec.diags[i].iter().map(|&s| i64::from(s)).sum();
                assert_eq!(a.trace(), GaussianRational::from_int(sum));
            }
            let _ = paulis.len();
        }
        // One mixed X-word family at dimension 8 for breadth.
        let i2 = Matrix::identity(2).unwrap();
        let ops = vec![
            opsat::matrix::kron_all(&[pauli_x(), i2.clone(), i2.clone()]),
            opsat::matrix::kron_all(&[i2.clone(), pauli_x(), i2.clone()]),
            opsat::matrix::kron_all(&[i2.clone(), i2.clone(), pauli_x()]),
        ];
        let dec = joint_eigen(&ops).unwrap();
        for (i, a) in ops.iter().enumerate() {
            assert_eq!(
                inverse_conjugate_signs(&dec.basis, &dec.diags[i]).unwrap(),
                *a
            );
        }
    }

    #[test]
    fn indicator_equation_matches_resolution_of_identity() {
        // On fully commuting Hermitian involutions, the exactly-one indicator
        // evaluates to -I exactly when the induced projectors sum to I.
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let r13 = opsat::model::relations::r_one_in_three();
        let poly = indicator_poly(&r13);
        for case in 0..20 {
            let dim = *[2usize, 4].choose(&mut rng).unwrap();
            // Hermitian commuting family: signs diagonals in a common
            // orthogonal-column eigenbasis.
            let basis = {
                // Reuse joint_eigen's canonical basis of a random Z/I tensor
                // family to stay Hermitian.
                let factors = dim.trailing_zeros() as usize;
                let word: Vec<Matrix> = (0..factors)
                    .map(|_| if rng.gen() { pauli_x() } else { pauli_z() })
                    .collect();
                joint_eigen(&[opsat::matrix::kron_all(&word)])
                    .unwrap()
                    .basis
            };
            let satisfying = case % 2 == 0;
            let columns: Vec<[Sign; 3]> = (0..dim)
                .map(|_| {
                    if satisfying {
                        *[[-1, 1, 1], [1, -1, 1], [1, 1, -1]]
                            .choose(&mut rng)
                            .unwrap()
                    } else {
                        *[[-1, -1, 1], [1, 1, 1], [-1, -1, -1]]
                            .choose(&mut rng)
                            .unwrap()
                    }
                })
                .collect();
            let ops: Vec<Matrix> = (0..3)
                .map(|slot| {
                    let signs: Vec<Sign> = columns.iter().map(|t| t[slot]).collect();
                    inverse_conjugate_signs(&basis, &signs).unwrap()
                })
                .collect();
            let value = eval_poly_at(&poly, &ops).unwrap();
            let indicator_satisfied = value == Matrix::identity(dim).unwrap().neg();
            let sum = ops
                .iter()
                .map(|a| involution_projector(a).unwrap())
                .fold(Matrix::zero(dim).unwrap(), |acc, p| acc.add(&p).unwrap());
            let resolves = sum == Matrix::identity(dim).unwrap();
            assert_eq!(indicator_satisfied, resolves);
            assert_eq!(indicator_satisfied, satisfying);
        }
    }

    #[test]
    fn closure_preserves_invariant_relations_on_satisfying_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let relations: Vec<(&str, BooleanRelation)> = vec![
            ("even3", opsat::model::relations::even(3)),
            ("odd3", opsat::model::relations::odd(3)),
            ("or2", opsat::model::relations::clause(&[1, 1])),
            ("clause_nnp", opsat::model::relations::clause(&[-1, -1, 1])),
        ];
        let operations = [
            BooleanOperation::xor3(),
            BooleanOperation::maj3(),
            BooleanOperation::and2(),
        ];
        for (name, rel) in &relations {
            for op in &operations {
                if !is_invariant(rel, op) {
                    continue;
                }
                // Sample satisfying diagonal (hence commuting Hermitian) tuples
                // and apply the closure componentwise.
                let tuples: Vec<Vec<Sign>> = rel.tuples().cloned().collect();
                for _ in 0..5 {
                    let assignments: Vec<Vec<Matrix>> = (0..op.arity())
                        .map(|_| {
                            let dim = 2;
                            let cols: Vec<&Vec<Sign>> =
                                (0..dim).map(|_| tuples.choose(&mut rng).unwrap()).collect();
                            (0..rel.arity())
                                .map(|slot| {
                                    let signs: Vec<Sign> = cols.iter().map(|t| t[slot]).collect();
                                    Matrix::diagonal_signs(&signs).unwrap()
                                })
                                .collect()
                        })
                        .collect();
                    // apply_closure_assignments asserts preservation internally
                    // when the relation is supplied.
                    let out = apply_closure_assignments(op, &assignments, Some(rel)).unwrap();
                    assert_eq!(out.len(), rel.arity(), "relation {name}");
                }
            }
        }
    }

    #[test]
    fn transform_uniqueness_on_rational_tables() {
        // transform(evaluate-table of P) == P for random multilinear P.
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..20 {
            let n = rng.gen_range(0..=3usize);
            let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
            for mask in 0..(1u64 << n) {
                if rng.gen_bool(0.5) {
                    terms.insert(
                        mask,
                        Rational::new(
                            rng.gen_range(-9i64..=9).into(),
                            rng.gen_range(1i64..=9).into(),
                        ),
                    );
                }
            }
            let poly = opsat::fourier::MultilinearPoly::from_terms(n, terms).unwrap();
            let values: Vec<Rational> = (0..(1usize << n))
                .map(|idx| evaluate_signs(&poly, &tuple_from_index(idx, n)).unwrap())
                .collect();
            let table = TruthTable::new(n, values).unwrap();
            assert_eq!(transform(&table), poly);
        }
    }
}

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use toric_periods::lattice::{
    identity, lattice_index, mat_mul, orthogonal_lattice, quotient_lattice, rank_of,
    saturate_sublattice, smith_normal_form, solve_in_basis, to_big, Index, LatticeMap,
};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows)
}

fn shaped() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix(r, c).prop_map(move |m| (r, c, m)))
}

fn vectors(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), 1..=n)
}

fn in_lattice(basis: &[Vec<i64>], v: &[i64]) -> bool {
    solve_in_basis(basis, v).is_some()
}

proptest! {
    #[test]
    fn smith_form_is_a_factorization((rows, cols, m) in shaped()) {
        let s = smith_normal_form(&to_big(&m), rows, cols);
        let lar = mat_mul(&mat_mul(&s.left, &to_big(&m), rows, cols), &s.right, cols, cols);
        for i in 0..rows {
            for j in 0..cols {
                let expected = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&lar[i][j], &expected);
            }
        }
        prop_assert_eq!(mat_mul(&s.left, &s.left_inv, rows, rows), identity(rows));
        prop_assert_eq!(mat_mul(&s.right, &s.right_inv, cols, cols), identity(cols));
        let nonzero: Vec<&BigInt> = s.diag.iter().filter(|d| !d.is_zero()).collect();
        for w in nonzero.windows(2) {
            prop_assert!(w[0] > &BigInt::zero());
            prop_assert!((w[1] % w[0]).is_zero(), "divisibility chain broken: {:?}", s.diag);
        }
        prop_assert_eq!(s.rank(), rank_of(&m, cols));
    }

    #[test]
    fn saturation_is_the_rational_span(gens in vectors(3), probe in prop::collection::vec(-3i64..=3, 3)) {
        let sat = saturate_sublattice(&gens, 3);
        prop_assert_eq!(sat.len(), rank_of(&gens, 3));
        for g in &gens {
            prop_assert!(in_lattice(&sat, g));
        }
        // k·v in the span for some k forces v into the saturation
        let in_span = (1..=6).any(|k| {
            let kv: Vec<i64> = probe.iter().map(|x| k * x).collect();
            rank_of(&[gens.clone(), vec![kv]].concat(), 3) == rank_of(&gens, 3)
        });
        prop_assert_eq!(in_lattice(&sat, &probe), in_span);
    }

    #[test]
    fn orthogonal_complement(vecs in vectors(3)) {
        let perp = orthogonal_lattice(&vecs, 3);
        prop_assert_eq!(perp.len(), 3 - rank_of(&vecs, 3));
        for p in &perp {
            for v in &vecs {
                prop_assert_eq!(p.iter().zip(v).map(|(a, b)| a * b).sum::<i64>(), 0);
            }
        }
        prop_assert_eq!(saturate_sublattice(&perp, 3), perp.clone());
    }

    #[test]
    fn quotient_presentation(gens in vectors(3), probe in prop::collection::vec(-4i64..=4, 3)) {
        let q = quotient_lattice(3, &gens);
        let rank = rank_of(&gens, 3);
        prop_assert_eq!(q.free_projection.target_rank, 3 - rank);
        prop_assert_eq!(q.free_projection.compose(&q.section), LatticeMap::identity(3 - rank));
        for g in &gens {
            prop_assert!(q.free_projection.apply(g).iter().all(|&x| x == 0));
            for (row, d) in q.torsion_projection.iter().zip(&q.torsion_invariants) {
                prop_assert_eq!(row.iter().zip(g).map(|(a, b)| a * b).sum::<i64>().rem_euclid(*d as i64), 0);
            }
        }
        // a point dies in the quotient exactly when it lies in the sublattice
        let dies = q.free_projection.apply(&probe).iter().all(|&x| x == 0)
            && q.torsion_projection.iter().zip(&q.torsion_invariants)
                .all(|(row, d)| row.iter().zip(&probe).map(|(a, b)| a * b).sum::<i64>().rem_euclid(*d as i64) == 0);
        if gens.len() == 3 && rank == 3 {
            // Cramer's rule: the coordinates are integral iff det divides each minor
            let d = det3(&gens);
            let member = (0..3).all(|k| {
                let mut m = gens.clone();
                m[k] = probe.clone();
                det3(&m) % d == 0
            });
            prop_assert_eq!(dies, member);
            let torsion: u64 = q.torsion_invariants.iter().product();
            prop_assert_eq!(torsion, d.unsigned_abs());
            prop_assert_eq!(lattice_index(&LatticeMap::from_columns(3, &gens)), Index::Finite(BigInt::from(d.abs())));
        }
    }
}

/// Determinant of the matrix whose columns are `v`.
fn det3(v: &[Vec<i64>]) -> i64 {
    v[0][0] * (v[1][1] * v[2][2] - v[2][1] * v[1][2])
        - v[1][0] * (v[0][1] * v[2][2] - v[2][1] * v[0][2])
        + v[2][0] * (v[0][1] * v[1][2] - v[1][1] * v[0][2])
}

#[test]
fn index_of_diagonal_inclusions() {
    let m = LatticeMap::new(2, 2, vec![vec![2, 0], vec![0, 3]]);
    assert_eq!(lattice_index(&m), Index::Finite(BigInt::from(6)));
    let q = quotient_lattice(2, &[vec![2, 0], vec![0, 3]]);
    assert_eq!(q.torsion_invariants, vec![6]);
    let q = quotient_lattice(2, &[vec![2, 0], vec![0, 2]]);
    assert_eq!(q.torsion_invariants, vec![2, 2]);
    assert_eq!(
        lattice_index(&LatticeMap::new(2, 2, vec![vec![1, 2], vec![2, 4]])),
        Index::Infinite
    );
}

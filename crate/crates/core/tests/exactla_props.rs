use ncpres_core::exactla::{
    in_row_span, nullspace, rank, rref, sparse_from_rational, QMatrix, RowEchelon, SparseEchelon,
};
use ncpres_core::Scalar;
use num::{BigInt, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(seed: u64) -> Config {
    Config {
        cases: 200,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn q(n: i64) -> Scalar {
    Scalar::from_integer(n.into())
}

fn int_matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(prop::collection::vec(-range..=range, cols), rows).prop_map(move |rs| {
        QMatrix::from_rows(cols, rs.into_iter().map(|r| r.into_iter().map(q).collect()).collect())
            .unwrap()
    })
}

/// Matrices of deliberately low rank: products of a `r x k` and a `k x c`
/// factor.
fn low_rank() -> impl Strategy<Value = QMatrix> {
    (1usize..=6, 1usize..=6, 1usize..=4).prop_flat_map(|(r, c, k)| {
        (int_matrix(r, k, 3), int_matrix(k, c, 3)).prop_map(|(a, b)| a.checked_mul(&b).unwrap())
    })
}

fn any_matrix() -> impl Strategy<Value = QMatrix> {
    prop_oneof![
        low_rank(),
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| int_matrix(r, c, 4)),
    ]
}

/// Unit lower-triangular times unit upper-triangular: always invertible.
fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
    (int_matrix(n, n, 2), int_matrix(n, n, 2)).prop_map(move |(a, b)| {
        let mut l = QMatrix::identity(n);
        let mut u = QMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l.set(i, j, a.get(i, j).clone());
                u.set(j, i, b.get(j, i).clone());
            }
        }
        l.checked_mul(&u).unwrap()
    })
}

/// Textbook rank by counting nonzero rows after plain rational elimination;
/// kept independent of the library's fraction-free routine.
fn naive_rank(m: &QMatrix) -> usize {
    let mut rows = m.row_vecs();
    let mut r = 0;
    for c in 0..m.cols() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

proptest! {
    #![proptest_config(config(0x5eed_0002))]

    #[test]
    fn rref_is_idempotent(m in any_matrix()) {
        let once = rref(&m);
        let twice = rref(&once.matrix);
        prop_assert_eq!(&once.matrix, &twice.matrix);
        prop_assert_eq!(&once.pivots, &twice.pivots);
        for (i, &c) in once.pivots.iter().enumerate() {
            prop_assert_eq!(once.matrix.get(i, c), &q(1));
            for k in 0..once.matrix.rows() {
                if k != i {
                    prop_assert!(once.matrix.get(k, c).is_zero());
                }
            }
        }
    }

    #[test]
    fn rank_matches_naive_elimination(m in any_matrix()) {
        prop_assert_eq!(rank(&m), naive_rank(&m));
    }

    #[test]
    fn rank_is_transpose_invariant(m in any_matrix()) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rank_is_invariant_under_invertible_maps(
        (m, g) in (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| (int_matrix(r, c, 3), invertible(r)))
    ) {
        prop_assert_eq!(rank(&g.checked_mul(&m).unwrap()), rank(&m));
        prop_assert_eq!(rank(&m.scale(&Scalar::new(3.into(), 7.into()))), rank(&m));
    }

    #[test]
    fn rank_nullity(m in any_matrix()) {
        let ns = nullspace(&m);
        prop_assert_eq!(rank(&m) + ns.len(), m.cols());
        for v in &ns {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn combinations_lie_in_row_span(m in any_matrix(), coeffs in prop::collection::vec(-3i64..=3, 6)) {
        let mut v = vec![Scalar::zero(); m.cols()];
        for (i, c) in coeffs.iter().take(m.rows()).enumerate() {
            for (x, y) in v.iter_mut().zip(m.row(i)) {
                *x += q(*c) * y;
            }
        }
        prop_assert!(in_row_span(&m, &v).unwrap());
    }

    #[test]
    fn incremental_echelons_agree_with_bareiss(m in any_matrix()) {
        let mut dense = RowEchelon::new(m.cols());
        let mut sparse = SparseEchelon::new();
        for r in m.row_vecs() {
            dense.insert(&r).unwrap();
            sparse.insert(sparse_from_rational(r.iter().cloned().enumerate()));
        }
        prop_assert_eq!(dense.rank(), rank(&m));
        prop_assert_eq!(sparse.rank(), rank(&m));
    }

    #[test]
    fn sparse_echelon_survives_overflow(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..6),
        big in (1i64 << 40)..(1i64 << 62)
    ) {
        // Entries near the machine-word limit force the big-integer fallback.
        let rows: Vec<Vec<Scalar>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| Scalar::from_integer(BigInt::from(x) * big + x)).collect())
            .collect();
        let m = QMatrix::from_rows(4, rows.clone()).unwrap();
        let mut sparse = SparseEchelon::new();
        for r in &rows {
            sparse.insert(sparse_from_rational(r.iter().cloned().enumerate()));
        }
        prop_assert_eq!(sparse.rank(), naive_rank(&m));
        for r in &rows {
            prop_assert!(sparse.contains(sparse_from_rational(r.iter().cloned().enumerate())));
        }
    }
}

#[test]
fn fractions_are_handled_exactly() {
    let h = QMatrix::from_rows(
        3,
        (0..3)
            .map(|i| (0..3).map(|j| Scalar::new(1.into(), BigInt::from(i + j + 1))).collect())
            .collect(),
    )
    .unwrap();
    assert_eq!(rank(&h), 3);
    assert_eq!(rref(&h).matrix, QMatrix::identity(3));
}

#[test]
fn sparse_pivot_is_the_last_column() {
    let mut e = SparseEchelon::new();
    e.insert(vec![(0, BigInt::from(1)), (5, BigInt::from(2))]);
    e.insert(vec![(1, BigInt::from(1)), (5, BigInt::from(1))]);
    assert_eq!(e.pivots(), vec![1, 5]);
    assert_eq!(e.rank_below(2), 1);
}

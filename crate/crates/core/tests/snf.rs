use morseflow::complex::{smith_normal_form, IntMatrix};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, c), r)
            .prop_map(move |rows| IntMatrix::from_rows(&rows, c))
    })
}

fn square() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, n), n)
            .prop_map(move |rows| IntMatrix::from_rows(&rows, n))
    })
}

/// Rank over the rationals by fraction-free elimination.
fn rational_rank(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<i128>> = m.to_rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            let (f, g) = (a[i][c], a[rank][c]);
            for j in 0..cols {
                a[i][j] = a[i][j] * g - a[rank][j] * f;
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant by expansion over permutations.
fn leibniz(m: &IntMatrix) -> i64 {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }
    let n = m.rows();
    perms(n)
        .into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            sign * (0..n).map(|i| m.get(i, p[i])).product::<i64>()
        })
        .sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn diagonal_form(a in matrix()) {
        let s = smith_normal_form(&a).unwrap();
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let expected = if i == j && i < s.rank() { s.diagonal[i] } else { 0 };
                prop_assert_eq!(s.d.get(i, j), expected);
            }
        }
        prop_assert!(s.diagonal.iter().all(|&d| d > 0));
        prop_assert!(s.diagonal.windows(2).all(|w| w[1] % w[0] == 0));
        prop_assert_eq!(s.rank(), rational_rank(&a));
        // The first invariant factor is the gcd of all entries.
        let g = a.to_rows().into_iter().flatten().fold(0, gcd);
        prop_assert_eq!(s.diagonal.first().copied().unwrap_or(0), g);
    }

    #[test]
    fn determinant_is_preserved(a in square()) {
        let s = smith_normal_form(&a).unwrap();
        let det = leibniz(&a);
        let product: i64 = if s.rank() == a.rows() { s.diagonal.iter().product() } else { 0 };
        prop_assert_eq!(product, det.abs());
        prop_assert_eq!(a.det().unwrap(), det);
    }
}

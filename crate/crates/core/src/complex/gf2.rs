//! Linear algebra over the field with two elements, for binary coefficients.

use super::matrix::IntMatrix;

/// Row-reduced copy of `m` mod 2 and its pivot columns.
fn reduce(m: &IntMatrix) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut a: Vec<Vec<u8>> = (0..m.rows()).map(|i| m.row(i).iter().map(|v| v.rem_euclid(2) as u8).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.cols() {
        let Some(p) = (r..a.len()).find(|&i| a[i][col] == 1) else { continue };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][col] == 1 {
                for j in 0..m.cols() {
                    a[i][j] ^= a[r][j];
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the null space of `m` mod 2, as columns of the result.
pub fn nullspace(m: &IntMatrix) -> IntMatrix {
    let (a, pivots) = reduce(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut out = IntMatrix::zeros(m.cols(), free.len());
    for (k, &f) in free.iter().enumerate() {
        out.set(f, k, 1);
        for (row, &p) in pivots.iter().enumerate() {
            out.set(p, k, a[row][f] as i64);
        }
    }
    out
}

/// Some solution of `m x = b` mod 2.
pub fn solve(m: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    let mut aug = m.to_rows();
    for (row, v) in aug.iter_mut().zip(b) {
        row.push(v.rem_euclid(2));
    }
    let n = m.cols();
    let (a, pivots) = reduce(&IntMatrix::from_rows(&aug, n + 1));
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![0; n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = a[row][n] as i64;
    }
    Some(x)
}

/// Columns of `m` side by side with those of `other`.
pub fn hcat(m: &IntMatrix, other: &IntMatrix) -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..m.rows()).map(|i| [m.row(i), other.row(i)].concat()).collect();
    IntMatrix::from_rows(&rows, m.cols() + other.cols())
}

/// A basis of `H_k` mod 2 for boundaries `d_k`, `d_{k+1}`: cycles independent
/// modulo boundaries, as columns.
pub fn homology_basis(d_k: &IntMatrix, d_k1: &IntMatrix) -> IntMatrix {
    let z = nullspace(d_k);
    let mut chosen = d_k1.mod2();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut rank = super::rank_mod2(&chosen);
    for j in 0..z.cols() {
        let candidate = hcat(&chosen, &IntMatrix::column_vector(&z.column(j)));
        let r = super::rank_mod2(&candidate);
        if r > rank {
            rank = r;
            chosen = candidate;
            basis.push(z.column(j));
        }
    }
    let mut out = IntMatrix::zeros(d_k.cols(), basis.len());
    for (j, v) in basis.iter().enumerate() {
        for (i, &e) in v.iter().enumerate() {
            out.set(i, j, e);
        }
    }
    out
}

/// Coordinates of the class of cycle `z` in `basis`, modulo the boundaries `b`.
pub fn coordinates(basis: &IntMatrix, boundaries: &IntMatrix, z: &[i64]) -> Option<Vec<i64>> {
    let x = solve(&hcat(basis, &boundaries.mod2()), z)?;
    Some(x[..basis.cols()].to_vec())
}

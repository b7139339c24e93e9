//! Smith normal form over the integers.

use serde::Serialize;

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... | d_r`, all positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnfResult {
    /// Nonzero diagonal entries.
    pub diagonal: Vec<i64>,
    #[serde(skip)]
    pub d: IntMatrix,
    #[serde(skip)]
    pub u: IntMatrix,
    #[serde(skip)]
    pub u_inv: IntMatrix,
    #[serde(skip)]
    pub v: IntMatrix,
    #[serde(skip)]
    pub v_inv: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

struct State {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl State {
    /// `row[dst] += q * row[src]` on `D`.
    fn add_row(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        self.d.add_row(dst, src, q)?;
        self.u.add_row(dst, src, q)?;
        self.u_inv.add_col(src, dst, -q)
    }

    /// `col[dst] += q * col[src]` on `D`.
    fn add_col(&mut self, dst: usize, src: usize, q: i64) -> Result<()> {
        self.d.add_col(dst, src, q)?;
        self.v.add_col(dst, src, q)?;
        self.v_inv.add_row(src, dst, -q)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form by elementary operations, always pivoting on the entry of
/// smallest magnitude in the remaining block.
pub fn smith_normal_form(a: &IntMatrix) -> Result<SnfResult> {
    let (m, n) = (a.rows(), a.cols());
    let mut st = State {
        d: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    let mut diagonal = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let v = st.d.get(i, j);
                    if v != 0 && pivot.is_none_or(|(pi, pj)| v.unsigned_abs() < st.d.get(pi, pj).unsigned_abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(st, diagonal);
            };
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);
            let p = st.d.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let q = st.d.get(i, t) / p;
                if q != 0 {
                    st.add_row(i, t, -q)?;
                }
                clean &= st.d.get(i, t) == 0;
            }
            for j in t + 1..n {
                let q = st.d.get(t, j) / p;
                if q != 0 {
                    st.add_col(j, t, -q)?;
                }
                clean &= st.d.get(t, j) == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold a row with a non-multiple into the pivot row.
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| st.d.get(i, j) % p != 0));
            match bad {
                Some(i) => st.add_row(t, i, 1)?,
                None => break,
            }
        }
        if st.d.get(t, t) < 0 {
            st.negate_row(t);
        }
        diagonal.push(st.d.get(t, t));
    }
    finish(st, diagonal)
}

fn finish(st: State, diagonal: Vec<i64>) -> Result<SnfResult> {
    if diagonal.iter().any(|&d| d <= 0) {
        return Err(Error::CheckFailed("Smith normal form produced a nonpositive pivot".into()));
    }
    Ok(SnfResult { diagonal, d: st.d, u: st.u, u_inv: st.u_inv, v: st.v, v_inv: st.v_inv })
}

/// Whether `b` lies in the integer column span of `a`.
pub fn in_image(a: &IntMatrix, b: &[i64]) -> Result<bool> {
    assert_eq!(a.rows(), b.len());
    let snf = smith_normal_form(a)?;
    let ub = snf.u.apply(b)?;
    Ok(ub.iter().enumerate().all(|(i, &c)| match snf.diagonal.get(i) {
        Some(&d) => c % d == 0,
        None => c == 0,
    }))
}

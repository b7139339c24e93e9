//! The Morse chain complex, its homology, and cycles glued from trajectories.

mod cycle;
pub mod gf2;
mod matrix;
mod snf;

pub use cycle::{find_pairing, glue_cycle_curve, DeltaElement, GluedCycle, MorseCycle, PairingWitness, TrajectoryRef};
pub use matrix::{rank_mod2, IntMatrix};
pub use snf::{in_image, smith_normal_form, SnfResult};

use serde::{Deserialize, Serialize};

use crate::critical::CriticalPoint;
use crate::error::{Error, Result};
use crate::flow::FlowCensus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    #[default]
    Z,
    Z2,
}

impl std::str::FromStr for Coefficients {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" => Ok(Coefficients::Z),
            "z2" => Ok(Coefficients::Z2),
            _ => Err(Error::Invalid(format!("unknown coefficient mode `{s}` (expected z or z2)"))),
        }
    }
}

/// Graded generators and boundary matrices of a surface Morse complex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseComplex {
    /// Critical point ids of index 0, 1, 2, ascending.
    pub generators: [Vec<usize>; 3],
    /// `boundary[0]` is the first boundary (minima x saddles), `boundary[1]`
    /// the second (saddles x maxima). Entry `(y, x)` is `n(x, y)`.
    pub boundary: [IntMatrix; 2],
    pub coefficients: Coefficients,
}

impl MorseComplex {
    /// Boundary `C_k -> C_{k-1}` for `k` in `1..=2`; zero maps otherwise.
    pub fn d(&self, k: usize) -> IntMatrix {
        match k {
            1 | 2 => self.boundary[k - 1].clone(),
            0 => IntMatrix::zeros(0, self.generators[0].len()),
            _ => IntMatrix::zeros(self.generators[2].len(), 0),
        }
    }

    pub fn rank(&self, k: usize) -> usize {
        self.generators.get(k).map_or(0, Vec::len)
    }

    /// Position of a critical point among the generators of its degree.
    pub fn position(&self, degree: usize, id: usize) -> Option<usize> {
        self.generators[degree].iter().position(|&g| g == id)
    }
}

/// Boundary matrices from the trajectory census.
pub fn assemble(crit: &[CriticalPoint], census: &FlowCensus, coefficients: Coefficients) -> Result<MorseComplex> {
    let generators: [Vec<usize>; 3] =
        std::array::from_fn(|k| crit.iter().filter(|c| c.index == k).map(|c| c.id).collect());
    let block = |k: usize| -> Result<IntMatrix> {
        let (lower, upper) = (&generators[k - 1], &generators[k]);
        let mut m = IntMatrix::zeros(lower.len(), upper.len());
        for (j, &x) in upper.iter().enumerate() {
            for (i, &y) in lower.iter().enumerate() {
                let moduli = census.get(x, y).ok_or(Error::MissingModuli { source_id: x, target_id: y })?;
                let entry = match coefficients {
                    Coefficients::Z => moduli.n(),
                    Coefficients::Z2 => (moduli.count() % 2) as i64,
                };
                m.set(i, j, entry);
            }
        }
        Ok(m)
    };
    let boundary = [block(1)?, block(2)?];
    Ok(MorseComplex { generators, boundary, coefficients })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DSquaredReport {
    pub product: IntMatrix,
    pub pass: bool,
}

/// `d_1 d_2`, reduced mod 2 for binary coefficients.
pub fn verify_d_squared(c: &MorseComplex) -> Result<DSquaredReport> {
    let mut product = c.boundary[0].mul(&c.boundary[1])?;
    if c.coefficients == Coefficients::Z2 {
        product = product.mod2();
    }
    let pass = product.is_zero();
    Ok(DSquaredReport { product, pass })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub betti: Vec<usize>,
    /// Torsion coefficients per degree (entries greater than one).
    pub torsion: Vec<Vec<i64>>,
}

impl HomologySummary {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// Homology of a chain complex given by its boundary maps `d[k]: C_{k+1} -> C_k`
/// and the ranks of the chain groups.
pub fn homology_of(ranks: &[usize], d: &[IntMatrix], coefficients: Coefficients) -> Result<HomologySummary> {
    for pair in d.windows(2) {
        let mut product = pair[0].mul(&pair[1])?;
        if coefficients == Coefficients::Z2 {
            product = product.mod2();
        }
        if !product.is_zero() {
            return Err(Error::NotAComplex);
        }
    }
    let mut rank = vec![0usize; ranks.len() + 1];
    let mut torsion = vec![Vec::new(); ranks.len()];
    for (k, m) in d.iter().enumerate() {
        match coefficients {
            Coefficients::Z => {
                let snf = smith_normal_form(m)?;
                rank[k + 1] = snf.rank();
                torsion[k] = snf.diagonal.iter().copied().filter(|&v| v > 1).collect();
            }
            Coefficients::Z2 => rank[k + 1] = rank_mod2(m),
        }
    }
    // rank[k] is the rank of the boundary leaving degree k.
    let betti = (0..ranks.len()).map(|k| ranks[k] - rank[k] - rank[k + 1]).collect();
    Ok(HomologySummary { betti, torsion })
}

pub fn homology(c: &MorseComplex) -> Result<HomologySummary> {
    let ranks: Vec<usize> = c.generators.iter().map(Vec::len).collect();
    homology_of(&ranks, &c.boundary, c.coefficients)
}

/// Whether the integer chains `a` and `b` of degree `k` differ by a boundary.
pub fn homologous(c: &MorseComplex, k: usize, a: &[i64], b: &[i64]) -> Result<bool> {
    let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if c.coefficients == Coefficients::Z2 {
        let m = c.d(k + 1).mod2();
        let mut aug = m.to_rows();
        for (row, v) in aug.iter_mut().zip(&diff) {
            row.push(v.rem_euclid(2));
        }
        let augmented = IntMatrix::from_rows(&aug, m.cols() + 1);
        return Ok(rank_mod2(&augmented) == rank_mod2(&m));
    }
    in_image(&c.d(k + 1), &diff)
}

/// A basis of the free part of `H_k` and the coordinate map onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyBasis {
    /// Cycles representing the free generators, as chain vectors.
    pub cycles: Vec<Vec<i64>>,
    /// Rows of `V^{-1}` that give coordinates in the kernel basis.
    kernel_coords: IntMatrix,
    /// Left transform of the Smith form of the boundaries in kernel coordinates.
    quotient_u: IntMatrix,
    /// Number of boundary directions before the free coordinates start.
    skip: usize,
}

impl HomologyBasis {
    /// Free coordinates of the class of cycle `z`.
    pub fn coordinates(&self, z: &[i64]) -> Result<Vec<i64>> {
        let kz = self.kernel_coords.apply(z)?;
        let q = self.quotient_u.apply(&kz)?;
        Ok(q[self.skip..].to_vec())
    }
}

/// Free basis of `H_k` for the complex with boundaries `d_k: C_k -> C_{k-1}`
/// and `d_{k+1}: C_{k+1} -> C_k`.
pub fn homology_basis(d_k: &IntMatrix, d_k1: &IntMatrix) -> Result<HomologyBasis> {
    let n = d_k.cols();
    let s = smith_normal_form(d_k)?;
    let r = s.rank();
    let kernel = s.v.col_block(r..n);
    let kernel_coords = s.v_inv.row_block(r..n);
    // Boundaries lie in the kernel, so their coordinates outside it vanish.
    let b = kernel_coords.mul(d_k1)?;
    let q = smith_normal_form(&b)?;
    let skip = q.rank();
    let free = q.u_inv.col_block(skip..n - r);
    let basis = kernel.mul(&free)?;
    let cycles = (0..basis.cols()).map(|j| basis.column(j)).collect();
    Ok(HomologyBasis { cycles, kernel_coords, quotient_u: q.u, skip })
}

pub fn complex_homology_basis(c: &MorseComplex, k: usize) -> Result<HomologyBasis> {
    homology_basis(&c.d(k), &c.d(k + 1))
}

/// Matrix of the map induced on the free part of `H_k` by the chain map `phi`
/// (columns: basis of the source, rows: coordinates in the target).
pub fn induced_map(phi: &IntMatrix, source: &HomologyBasis, target: &HomologyBasis) -> Result<IntMatrix> {
    let cols: Vec<Vec<i64>> = source
        .cycles
        .iter()
        .map(|z| target.coordinates(&phi.apply(z)?))
        .collect::<Result<_>>()?;
    let rows = target.cycles.len();
    let mut m = IntMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            m.set(i, j, *v);
        }
    }
    Ok(m)
}

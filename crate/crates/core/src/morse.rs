//! A function on a surface together with its critical points and flow census.

use crate::complex::{assemble, Coefficients, MorseComplex};
use crate::critical::{find_critical_points, CriticalPoint, SearchParams};
use crate::error::Result;
use crate::flow::{enumerate_moduli, FlowCensus, FlowConfig};
use crate::geometry::ImplicitSurface;
use crate::scalarfield::Expression;

#[derive(Debug, Clone, PartialEq)]
pub struct MorseData {
    pub f: Expression,
    pub crit: Vec<CriticalPoint>,
    pub census: FlowCensus,
}

impl MorseData {
    /// Critical points and every index-one moduli space of `f`.
    pub fn compute(f: Expression, surface: &ImplicitSurface, search: &SearchParams, cfg: &FlowConfig) -> Result<Self> {
        let crit = find_critical_points(&f, surface, search)?;
        let census = enumerate_moduli(&f, surface, &crit, cfg)?;
        Ok(MorseData { f, crit, census })
    }

    pub fn complex(&self, coefficients: Coefficients) -> Result<MorseComplex> {
        assemble(&self.crit, &self.census, coefficients)
    }

    pub fn of_index(&self, index: usize) -> impl Iterator<Item = &CriticalPoint> {
        self.crit.iter().filter(move |c| c.index == index)
    }
}

#![allow(dead_code)]

use morseflow::catalog::{tilted_height, Surface};
use morseflow::complex::{Coefficients, MorseComplex};
use morseflow::critical::SearchParams;
use morseflow::flow::FlowConfig;
use morseflow::geometry::ImplicitSurface;
use morseflow::morse::MorseData;
use morseflow::scalarfield::Expression;

pub struct Setup {
    pub surface: ImplicitSurface,
    pub cfg: FlowConfig,
}

impl Setup {
    pub fn new(surface: Surface) -> Self {
        let surface = surface.build();
        let cfg = FlowConfig::for_surface(&surface);
        Setup { surface, cfg }
    }

    pub fn data(&self, f: Expression) -> MorseData {
        MorseData::compute(f, &self.surface, &SearchParams::default(), &self.cfg).unwrap()
    }

    pub fn tilt(&self, degrees: f64) -> MorseData {
        self.data(tilt(degrees))
    }
}

/// `z` tilted by 0.1 towards the horizontal direction at `degrees`.
pub fn tilt(degrees: f64) -> Expression {
    tilted_height(0.1, degrees.to_radians())
}

pub fn complex(d: &MorseData) -> MorseComplex {
    d.complex(Coefficients::Z).unwrap()
}

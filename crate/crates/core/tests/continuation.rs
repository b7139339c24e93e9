mod common;

use common::{complex, Setup};
use morseflow::catalog::Surface;
use morseflow::complex::{Coefficients, IntMatrix};
use morseflow::continuation::{
    continuation_matrix, induced_homology_map, same_induced_map, verify_chain_map, verify_functoriality,
    ContinuationMatrix, Homotopy, Ramp, Triple,
};
use morseflow::flow::FlowSettings;
use morseflow::morse::MorseData;

fn phi(s: &Setup, a: &MorseData, b: &MorseData, coefficients: Coefficients) -> ContinuationMatrix {
    let h = Homotopy::new(a.f.clone(), b.f.clone());
    continuation_matrix(&h, a, b, &s.surface, &s.cfg, coefficients).unwrap().matrix
}

#[test]
fn constant_homotopy_is_the_identity() {
    for (surface, angle) in [(Surface::Sphere, 0.0), (Surface::VerticalTorus, 45.0), (Surface::Dumbbell, 0.0)] {
        let s = Setup::new(surface);
        let d = s.tilt(angle);
        let m = phi(&s, &d, &d, Coefficients::Z);
        for k in 0..3 {
            assert_eq!(m.degree(k), &IntMatrix::identity(d.of_index(k).count()), "{surface} degree {k}");
        }
    }
}

/// Chain map, isomorphism on homology, and one `+1` per column in degree 0.
fn check_pair(surface: Surface, a: f64, b: f64) -> ContinuationMatrix {
    let s = Setup::new(surface);
    let (d0, d1) = (s.tilt(a), s.tilt(b));
    let m = phi(&s, &d0, &d1, Coefficients::Z);
    let (c0, c1) = (complex(&d0), complex(&d1));
    let chain = verify_chain_map(&m, &c0, &c1).unwrap();
    assert!(chain.pass, "{surface} {a} -> {b}: {chain:?}");
    let induced = induced_homology_map(&m, &c0, &c1).unwrap();
    assert!(induced.determinants.iter().all(|d| d.abs() == 1));
    for j in 0..m.degree(0).cols() {
        assert_eq!(m.degree(0).column(j).iter().filter(|&&v| v == 1).count(), 1);
        assert_eq!(m.degree(0).column(j).iter().sum::<i64>(), 1);
    }
    m
}

#[test]
fn sphere_pairs() {
    for (a, b) in [(0.0, 180.0), (0.0, 90.0), (30.0, 250.0)] {
        let m = check_pair(Surface::Sphere, a, b);
        // One minimum and one maximum: the maps are forced.
        assert_eq!(m.degree(0), &IntMatrix::identity(1));
        assert_eq!(m.degree(2).get(0, 0).abs(), 1);
    }
}

#[test]
fn torus_pairs() {
    for (a, b) in [(45.0, 60.0), (45.0, 135.0), (45.0, 225.0), (30.0, 160.0), (110.0, 20.0)] {
        let m = check_pair(Surface::VerticalTorus, a, b);
        assert_eq!(m.degree(1).det().unwrap().abs(), 1, "{a} -> {b}");
    }
}

#[test]
fn dumbbell_pairs() {
    for (a, b) in [(0.0, 30.0), (0.0, 180.0), (20.0, -60.0), (200.0, 340.0), (10.0, 100.0)] {
        check_pair(Surface::Dumbbell, a, b);
    }
}

#[test]
fn functoriality_on_triples() {
    for (surface, angles) in [(Surface::Sphere, [0.0, 120.0, 250.0]), (Surface::VerticalTorus, [45.0, 60.0, 135.0])] {
        let s = Setup::new(surface);
        let d: Vec<MorseData> = angles.iter().map(|&a| s.tilt(a)).collect();
        let (p10, p21, p20) =
            (phi(&s, &d[0], &d[1], Coefficients::Z), phi(&s, &d[1], &d[2], Coefficients::Z), phi(&s, &d[0], &d[2], Coefficients::Z));
        for coefficients in [Coefficients::Z, Coefficients::Z2] {
            let t = Triple { data: [&d[0], &d[1], &d[2]], phi10: &p10, phi21: &p21, phi20: &p20 };
            let r = verify_functoriality(&t, coefficients).unwrap();
            assert!(r.pass, "{surface} {coefficients:?}: {r:?}");
        }
    }
}

#[test]
fn ramp_shape_does_not_change_homology_map() {
    for (surface, a, b) in [(Surface::VerticalTorus, 45.0, 135.0), (Surface::Dumbbell, 0.0, 30.0), (Surface::Sphere, 0.0, 180.0)] {
        let s = Setup::new(surface);
        let (d0, d1) = (s.tilt(a), s.tilt(b));
        let h = Homotopy::new(d0.f.clone(), d1.f.clone());
        let m1 = continuation_matrix(&h, &d0, &d1, &s.surface, &s.cfg, Coefficients::Z).unwrap().matrix;
        let h2 = h.with_ramp(Ramp::Smootherstep);
        let m2 = continuation_matrix(&h2, &d0, &d1, &s.surface, &s.cfg, Coefficients::Z).unwrap().matrix;
        assert!(same_induced_map(&m1, &m2, &complex(&d0), &complex(&d1)).unwrap(), "{surface}");
    }
}

#[test]
fn binary_mode_is_the_reduction() {
    let s = Setup::new(Surface::Dumbbell);
    let (d0, d1) = (s.tilt(0.0), s.tilt(180.0));
    let z = phi(&s, &d0, &d1, Coefficients::Z);
    let z2 = phi(&s, &d0, &d1, Coefficients::Z2);
    assert_eq!(z.reduced_mod2(), z2);
    let (c0, c1) = (d0.complex(Coefficients::Z2).unwrap(), d1.complex(Coefficients::Z2).unwrap());
    assert!(verify_chain_map(&z2, &c0, &c1).unwrap().pass);
    assert!(induced_homology_map(&z2, &c0, &c1).is_ok());
}

#[test]
fn halving_tolerances_keeps_matrices() {
    let s = Setup::new(Surface::VerticalTorus);
    let (d0, d1) = (s.tilt(45.0), s.tilt(135.0));
    let base = phi(&s, &d0, &d1, Coefficients::Z);
    let cfg = FlowSettings::default().scaled(0.5).resolve(&s.surface);
    let h = Homotopy::new(d0.f.clone(), d1.f.clone());
    let fine = continuation_matrix(&h, &d0, &d1, &s.surface, &cfg, Coefficients::Z).unwrap().matrix;
    assert_eq!(base, fine);
}

#[test]
fn composition_of_chain_maps() {
    let s = Setup::new(Surface::VerticalTorus);
    let d: Vec<MorseData> = [45.0, 135.0].iter().map(|&a| s.tilt(a)).collect();
    let there = phi(&s, &d[0], &d[1], Coefficients::Z);
    let back = phi(&s, &d[1], &d[0], Coefficients::Z);
    let round = there.then(&back).unwrap();
    assert!(same_induced_map(&round, &phi(&s, &d[0], &d[0], Coefficients::Z), &complex(&d[0]), &complex(&d[0])).unwrap());
}

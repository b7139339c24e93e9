mod common;

use common::{complex, tilt, Setup};
use morseflow::catalog::{random_tilt_angles, tilted_height, Surface};
use morseflow::compare::{simplicial_homology, SimplicialComplex, SurfaceMesh};
use morseflow::complex::{find_pairing, glue_cycle_curve, homology, verify_d_squared, Coefficients, MorseCycle};
use morseflow::flow::FlowSettings;
use morseflow::morse::MorseData;
use morseflow::Error;

fn oracle_betti(surface: Surface, coefficients: Coefficients) -> Vec<usize> {
    let k = match surface {
        Surface::Sphere => SimplicialComplex::builtin("tetrahedron").unwrap(),
        Surface::VerticalTorus => SimplicialComplex::builtin("csaszar").unwrap(),
        _ => SurfaceMesh::catalog(surface, 8).unwrap().to_simplicial().unwrap(),
    };
    simplicial_homology(&k, coefficients).unwrap().betti
}

#[test]
fn catalog_complexes_match_simplicial_homology() {
    for (surface, counts) in
        [(Surface::Sphere, [1, 0, 1]), (Surface::VerticalTorus, [1, 2, 1]), (Surface::Dumbbell, [2, 2, 2])]
    {
        let s = Setup::new(surface);
        let d = s.data(surface.default_function(0.1));
        for (k, &n) in counts.iter().enumerate() {
            assert_eq!(d.of_index(k).count(), n, "{surface} index {k}");
        }
        for coefficients in [Coefficients::Z, Coefficients::Z2] {
            let c = d.complex(coefficients).unwrap();
            assert!(verify_d_squared(&c).unwrap().pass);
            let h = homology(&c).unwrap();
            assert_eq!(h.betti, oracle_betti(surface, coefficients), "{surface} {coefficients:?}");
            assert!(h.torsion.iter().all(Vec::is_empty));
        }
    }
}

#[test]
fn random_tilts_keep_homology() {
    for surface in [Surface::Sphere, Surface::VerticalTorus, Surface::Dumbbell] {
        let s = Setup::new(surface);
        let expected = oracle_betti(surface, Coefficients::Z);
        for angle in random_tilt_angles(11, 10) {
            let d = s.data(tilted_height(0.1, angle));
            let c = complex(&d);
            assert!(verify_d_squared(&c).unwrap().pass, "{surface} at {angle}");
            assert_eq!(homology(&c).unwrap().betti, expected, "{surface} at {angle}");
        }
    }
}

#[test]
fn tighter_tolerances_change_no_integer() {
    for surface in [Surface::VerticalTorus, Surface::Dumbbell] {
        let s = Setup::new(surface);
        let f = surface.default_function(0.1);
        let base = s.data(f.clone());
        let tight = FlowSettings::default().scaled(0.1).resolve(&s.surface);
        let fine = MorseData::compute(f, &s.surface, &Default::default(), &tight).unwrap();
        assert_eq!(complex(&base).boundary, complex(&fine).boundary, "{surface}");
    }
}

#[test]
fn dumbbell_boundaries_by_hand() {
    // Tilted towards +x: the lower neck saddle joins the two minima, the upper
    // one is met by both maxima, and the other pairs have no flow lines.
    let s = Setup::new(Surface::Dumbbell);
    let d = s.tilt(0.0);
    let c = complex(&d);
    let d1 = c.d(1);
    let d2 = c.d(2);
    let lower = (0..2).find(|&j| d1.column(j).iter().any(|&v| v != 0)).unwrap();
    let upper = 1 - lower;
    let col = d1.column(lower);
    assert_eq!(col.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1, 1]);
    assert_eq!(col[0] + col[1], 0);
    assert_eq!(d1.column(upper), vec![0, 0]);
    assert_eq!(d2.row(lower), &[0, 0]);
    assert!(d2.row(upper).iter().all(|v| v.abs() == 1));
    assert_eq!(d2.row(upper).iter().sum::<i64>().abs(), 2);
    assert_eq!(d.census.get(c.generators[1][upper], c.generators[0][0]).unwrap().count() + d.census.get(c.generators[1][upper], c.generators[0][1]).unwrap().count(), 2);
}

#[test]
fn torus_kernel_elements_pair_and_glue() {
    let s = Setup::new(Surface::VerticalTorus);
    let d = s.tilt(45.0);
    let c = complex(&d);
    for coefficients in [vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1], vec![2, 0], vec![0, -3]] {
        let a = MorseCycle::new(1, coefficients.clone());
        assert!(a.is_cycle(&c).unwrap());
        let w = find_pairing(&a, &c, &d.census).unwrap();
        assert!(w.is_valid(), "{coefficients:?}");
        let g = glue_cycle_curve(&a, &w, &d.census, &d.crit, &s.cfg).unwrap();
        assert!(g.max_gap <= 10.0 * s.cfg.capture_radius);
        let copies: i64 = coefficients.iter().map(|v| v.abs()).sum();
        assert_eq!(g.curves.len() as i64, copies, "{coefficients:?}");
        for curve in &g.curves {
            assert_eq!(curve.first(), curve.last());
        }
    }
    let zero = MorseCycle::zero(&c, 1);
    let w = find_pairing(&zero, &c, &d.census).unwrap();
    assert!(w.elements.is_empty());
}

#[test]
fn non_cycle_has_no_pairing() {
    let s = Setup::new(Surface::Dumbbell);
    let d = s.tilt(0.0);
    let c = complex(&d);
    let lower = (0..2).find(|&j| c.d(1).column(j).iter().any(|&v| v != 0)).unwrap();
    let a = MorseCycle::generator(&c, 1, c.generators[1][lower]).unwrap();
    assert!(!a.is_cycle(&c).unwrap());
    assert!(matches!(find_pairing(&a, &c, &d.census), Err(Error::NotACycle { .. })));
    let upper = MorseCycle::generator(&c, 1, c.generators[1][1 - lower]).unwrap();
    let w = find_pairing(&upper, &c, &d.census).unwrap();
    let g = glue_cycle_curve(&upper, &w, &d.census, &d.crit, &s.cfg).unwrap();
    assert_eq!(g.curves.len(), 1);
}

#[test]
fn symmetric_functions_are_rejected() {
    let z = morseflow::scalarfield::Expression::parse("z").unwrap();
    for (surface, f) in [
        (Surface::VerticalTorus, z.clone()),
        (Surface::Dumbbell, z.clone()),
        (Surface::VerticalTorus, tilt(0.0)),
    ] {
        let s = Setup::new(surface);
        let e = MorseData::compute(f, &s.surface, &Default::default(), &s.cfg).unwrap_err();
        assert_eq!(e.exit_code(), 3, "{surface}: {e}");
    }
}

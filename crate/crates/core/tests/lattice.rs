use std::sync::OnceLock;

use spheroidal::lattice::*;
use spheroidal::spectral::SpectralConfig;

fn spectrum16() -> &'static JointSpectrum {
    static SPEC: OnceLock<JointSpectrum> = OnceLock::new();
    SPEC.get_or_init(|| build_joint_spectrum(16.0, 28, 38, &SpectralConfig::default()).unwrap())
}

#[test]
fn orientation_reverses_the_index() {
    let (ccw, _, l_star) = monodromy(spectrum16(), SymmetrySelector::All, Orientation::Counterclockwise).unwrap();
    let (cw, _, _) = monodromy(spectrum16(), SymmetrySelector::All, Orientation::Clockwise).unwrap();
    assert_eq!(l_star, 20);
    assert_eq!(ccw.matrix, [[1, 0], [2, 1]]);
    assert_eq!(cw.matrix, [[1, 0], [-2, 1]]);
    assert_eq!(cw.index, -ccw.index);
}

#[test]
fn symmetry_classes() {
    for sel in [SymmetrySelector::S2Even, SymmetrySelector::S2Odd] {
        let (r, _, _) = monodromy(spectrum16(), sel, Orientation::Counterclockwise).unwrap();
        assert_eq!(r.index, 1, "{sel:?}");
        let (r, _, _) = monodromy(spectrum16(), sel, Orientation::Clockwise).unwrap();
        assert_eq!(r.index, -1, "{sel:?}");
    }
    for sel in SymmetrySelector::PARITY_CLASSES {
        let (r, _, _) = monodromy(spectrum16(), sel, Orientation::Counterclockwise).unwrap();
        assert_eq!(r.matrix, [[1, 0], [2, 1]], "{sel:?}");
    }
}

#[test]
fn loops_away_from_the_origin_are_trivial() {
    let spec = spectrum16();
    for &(a, b, lo, hi) in &[
        (2, 12, 20.0, 200.0),
        (-12, -2, 20.0, 200.0),
        (3, 10, -150.0, 50.0),
        (-6, 6, 60.0, 250.0),
        (4, 14, -200.0, -20.0),
        (1, 19, -200.0, -100.0),
    ] {
        let r = monodromy_on_loop(spec, SymmetrySelector::All, &rectangle_loop(a, b, lo, hi, 1)).unwrap();
        assert_eq!(r.matrix, [[1, 0], [0, 1]], "rectangle ({a}, {b}, {lo}, {hi})");
    }
    for sel in SymmetrySelector::PARITY_CLASSES {
        let base = sel.base_column();
        let anchors = rectangle_loop(base + 2, base + 12, 20.0, 200.0, 2);
        let r = monodromy_on_loop(spec, sel, &anchors).unwrap();
        assert_eq!(r.matrix, [[1, 0], [0, 1]], "{sel:?}");
    }
}

#[test]
fn trace_closes_on_a_lattice_image() {
    let (r, anchors, _) = monodromy(spectrum16(), SymmetrySelector::All, Orientation::Counterclockwise).unwrap();
    assert_eq!(anchors.first().map(|a| a.m), anchors.last().map(|a| a.m));
    let first = r.trace.first().unwrap();
    let last = r.trace.last().unwrap();
    // the vertical edge returns unchanged; the horizontal one gains two vertical steps
    assert_eq!(first.corners[0], last.corners[0]);
    assert_eq!(first.corners[3], last.corners[3]);
    let (m, l) = first.corners[1];
    assert_eq!(last.corners[1], (m, l + 2));
}

#[test]
fn junction_cells_agree() {
    for rep in junction_compare(spectrum16(), 20).unwrap() {
        assert!(rep.corners_match, "{rep:?}");
        assert!(rep.bottom_transport_ok && rep.top_transport_ok, "{rep:?}");
    }
}

#[test]
fn weyl_count_tracks_two_gamma_over_pi() {
    let cfg = SpectralConfig::default();
    for gamma in [4.0, 8.0, 12.0, 20.0] {
        let spec = build_joint_spectrum(gamma, 0, 40, &cfg).unwrap();
        let n = count_negative(&spec).unwrap() as f64;
        assert!((n - 2.0 * gamma / std::f64::consts::PI).abs() <= 1.0, "gamma = {gamma}: {n}");
    }
}

#[test]
fn refusals() {
    let cfg = SpectralConfig::default();
    let small = build_joint_spectrum(4.0, 10, 20, &cfg).unwrap();
    assert!(matches!(
        monodromy(&small, SymmetrySelector::All, Orientation::Counterclockwise),
        Err(LatticeError::LoopTooCoarse { .. })
    ));
    let flat = build_joint_spectrum(0.0, 4, 8, &cfg).unwrap();
    assert_eq!(
        monodromy(&flat, SymmetrySelector::All, Orientation::Counterclockwise).unwrap_err(),
        LatticeError::Degenerate
    );
    let short = build_joint_spectrum(16.0, 0, 5, &cfg).unwrap();
    assert!(matches!(count_negative(&short), Err(LatticeError::ColumnTruncated { .. })));
}

#[test]
fn spectrum_is_deterministic() {
    let cfg = SpectralConfig::default();
    let a = build_joint_spectrum(6.0, 8, 14, &cfg).unwrap().to_csv();
    let b = build_joint_spectrum(6.0, 8, 14, &cfg).unwrap().to_csv();
    assert_eq!(a, b);
}

#[test]
fn record_count_and_partitions() {
    let spec = build_joint_spectrum(16.0, 20, 40, &SpectralConfig::default()).unwrap();
    let expected: usize = (-20i64..=20).map(|m| (41 - m.abs()) as usize).sum();
    assert_eq!(spec.len(), expected);
    assert_eq!(expected, 1261);
    let ground = spec.column(0)[0].g;
    assert!((ground + 240.75).abs() <= 1.0, "{ground}");
    assert!(spec.points.iter().all(|p| p.g >= (p.m * p.m) as f64 - 256.0 - 1e-6));

    let even = filter_symmetry(&spec, SymmetrySelector::S2Even);
    let odd = filter_symmetry(&spec, SymmetrySelector::S2Odd);
    assert_eq!(even.len() + odd.len(), spec.len());
    assert!(even.points.iter().all(|p| odd.get(p.m, p.l).is_none()));

    // a rectangular truncation does not split exactly into quarters
    let sizes: Vec<usize> = SymmetrySelector::PARITY_CLASSES.iter().map(|&s| filter_symmetry(&spec, s).len()).collect();
    assert_eq!(sizes.iter().sum::<usize>(), spec.len());
    let quarter = spec.len() as f64 / 4.0;
    assert!(sizes.iter().all(|&n| (n as f64 / quarter - 1.0).abs() < 0.05), "{sizes:?}");
}

#[test]
fn vertical_gap_at_large_gamma() {
    use spheroidal::asymptotics::{neighbor_gaps, Regime};
    let spec = build_joint_spectrum(32.0, 1, 4, &SpectralConfig::default()).unwrap();
    let r = neighbor_gaps(&spec, 0, Regime::LargeGamma).unwrap();
    assert_eq!(r.vertical_predicted, 125.0);
    assert!((r.vertical - r.vertical_predicted).abs() <= 1.0, "{r:?}");
}

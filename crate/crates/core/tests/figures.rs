use std::f64::consts::PI;

use weyl_uncertainty::analysis::{
    figure_config, figure_dataset, find_extremum, scan, ExtremumKind, Functional, ScanTable, Sweep,
};
use weyl_uncertainty::families::{closed_form_char, ClosedForm, FamilySpec, Truncation};

fn fig(id: u8) -> ScanTable {
    figure_dataset(id, &Truncation::default()).unwrap()
}

fn argmin(t: &ScanTable, f: Functional) -> usize {
    (0..t.rows.len())
        .min_by(|&a, &b| f.of(&t.rows[a]).total_cmp(&f.of(&t.rows[b])))
        .unwrap()
}

#[test]
fn every_figure_respects_its_bounds_and_grid() {
    for id in 1..=4 {
        let cfg = figure_config(id).unwrap();
        let t = fig(id);
        assert_eq!(t.rows.len(), cfg.sweep.steps);
        assert!(t.rows.windows(2).all(|w| w[0].param < w[1].param));
        assert!(t.bound_violations().is_empty(), "figure {id}");
        for r in &t.rows {
            for x in [r.u, r.u_prime, r.u_double_prime, r.v, r.abs_phi, r.pi_k, r.nbar] {
                assert!(x.is_finite());
            }
            assert!(r.v >= -1e-15);
        }
    }
}

#[test]
fn gaussian_u_approaches_one_at_both_ends() {
    let t = fig(2);
    let u: Vec<f64> = t.rows.iter().map(|r| r.u).collect();
    let i = argmin(&t, Functional::U);
    assert!(i > 0 && i + 1 < u.len());
    assert!(u[..=i].windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(u[i..].windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(u[0] > 0.95 && *u.last().unwrap() > 0.88);
    // Continuum minimum sits at a k^2 = pi / 2.
    assert!((t.rows[i].param / (PI / 2.0)).ln().abs() < 0.05, "{}", t.rows[i].param);
}

#[test]
fn gaussian_u_and_uprime_coincide_without_chirp() {
    let t = fig(3);
    let r = t.nearest_row(0.0).unwrap();
    assert!(r.param.abs() < 1e-12);
    assert!((r.u - r.u_prime).abs() < 1e-2, "{} {}", r.u, r.u_prime);
}

#[test]
fn gaussian_uprime_revives_near_half_pi() {
    let t = fig(3);
    let up: Vec<f64> = t.rows.iter().map(|r| r.u_prime).collect();
    let peaks: Vec<f64> = (1..up.len() - 1)
        .filter(|&i| up[i] > up[i - 1] && up[i] >= up[i + 1])
        .map(|i| t.rows[i].param)
        .collect();
    assert!(peaks.iter().any(|b| b.abs() < 0.02), "{peaks:?}");
    assert!(peaks.iter().any(|b| (b - PI / 2.0).abs() < 0.02), "{peaks:?}");
}

#[test]
fn refined_extremum_sits_inside_scan_cell() {
    let t = fig(4);
    let coarse = &t.rows[argmin(&t, Functional::U)];
    let cfg = figure_config(4).unwrap();
    let e = find_extremum(
        &cfg.template,
        "lambda",
        Functional::U,
        ExtremumKind::Min,
        (0.1, 3.0),
        1,
        PI,
        &Truncation::default(),
    )
    .unwrap();
    let cell = (3.0 - 0.1) / 255.0;
    assert!((e.param - coarse.param).abs() <= cell + 1e-9);
    assert!(e.value <= coarse.u + 1e-12);
    assert!(!e.at_boundary);
}

#[test]
fn phase_coherent_scan_matches_closed_form() {
    let spec: FamilySpec = "phase-coherent:xi=0.5".parse().unwrap();
    let t = scan(&spec, &Sweep::linear("xi", 0.05, 0.95, 19), 1, PI, &Truncation::default()).unwrap();
    for r in &t.rows {
        let s = spec.with_param("xi", r.param, 1).unwrap();
        let ClosedForm::Exact(cs) = closed_form_char(&s, 1, PI).unwrap() else {
            panic!("phase-coherent states have an exact form");
        };
        assert!((cs.phi.norm() - r.abs_phi).abs() < 1e-12);
        assert!((cs.phi_tilde.norm() - r.abs_phi_tilde).abs() < 1e-12);
        assert!((cs.pi_k - r.pi_k).abs() < 1e-12);
    }
}

#[test]
fn off_resonant_scan_is_unbounded() {
    let spec: FamilySpec = "bessel".parse().unwrap();
    let t = scan(&spec, &Sweep::linear("lambda", 0.5, 1.0, 3), 1, 0.3, &Truncation::default()).unwrap();
    assert!(!t.bounded);
    assert!(t.bound_violations().is_empty());
}

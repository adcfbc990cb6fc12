use relpack::oracle::{
    density_norm, density_profile, position_moments, profile_width, velocity_moments, Axis, ProfileKind,
    QuadratureSpec,
};
use relpack::packet::GaussianPacket;
use relpack::spreading::{sigma_parallel, sigma_perp, time_for_scaled};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn moments_reproduce_figure_edge() {
    let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).unwrap();
    let t = time_for_scaled(&p, 100.0).unwrap();
    let r = position_moments(&p, t, &QuadratureSpec::default()).unwrap();
    assert!(r.converged);
    assert!(rel(r.sigma_par / p.sigma_x(), 1.030776) < 5e-3);
    assert!(rel(r.sigma_perp / p.sigma_x(), std::f64::consts::SQRT_2) < 5e-3);
}

#[test]
fn mean_velocity_lags_beta_at_second_order() {
    let dev = |eps: f64| {
        let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, eps).unwrap();
        let v = velocity_moments(&p, &QuadratureSpec::default()).unwrap();
        p.triad().parallel.dot(&v.mean) / p.kinematics().speed() - 1.0
    };
    let d = dev(0.1);
    assert!(d < -1e-3, "{d}");
    let ratio = d / dev(0.05);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn density_variance_matches_moments_midway() {
    let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).unwrap();
    let t = time_for_scaled(&p, 50.0).unwrap();
    let quad = QuadratureSpec::default();
    let m = position_moments(&p, t, &quad).unwrap();
    for kind in [ProfileKind::Slice, ProfileKind::Marginal] {
        let w = profile_width(&p, t, Axis::Parallel, kind, &quad).unwrap();
        assert!(w.converged, "{kind:?} {}", w.est_error);
        assert!(rel(w.sigma.powi(2), m.sigma_par.powi(2)) < 5e-3, "{kind:?}");
        assert!(w.mean_offset.abs() < 1e-2 * p.sigma_x());
    }
    let w = profile_width(&p, t, Axis::Transverse, ProfileKind::Marginal, &quad).unwrap();
    assert!(rel(w.sigma.powi(2), m.sigma_perp.powi(2)) < 5e-3);
}

#[test]
fn density_widths_at_time_zero_for_several_packets() {
    let quad = QuadratureSpec::default();
    for (gamma, eps) in [(1.25, 0.05), (5.0, 0.01), (2.0, 0.05)] {
        let p = GaussianPacket::from_gamma_epsilon(1.0, gamma, eps).unwrap();
        for axis in [Axis::Parallel, Axis::Transverse] {
            let w = profile_width(&p, 0.0, axis, ProfileKind::Slice, &quad).unwrap();
            assert!(rel(w.sigma.powi(2), p.sigma_x().powi(2)) < 2e-3);
        }
    }
}

#[test]
fn free_evolution_keeps_norm() {
    let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).unwrap();
    let quad = QuadratureSpec::default();
    assert!((density_norm(&p, 0.0, &quad).unwrap() - 1.0).abs() < 1e-6);
    let t = time_for_scaled(&p, 100.0).unwrap();
    assert!((density_norm(&p, t, &quad).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn profile_peak_follows_analytic_widths() {
    // near the figure parameters the profile is close to the spreading Gaussian
    let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).unwrap();
    let t = time_for_scaled(&p, 20.0).unwrap();
    let quad = QuadratureSpec::default().with_nodes(256);
    let prof = density_profile(&p, t, Axis::Transverse, &[0.0], &quad).unwrap();
    let sp = sigma_parallel(&p, t).sigma;
    let sq = sigma_perp(&p, t).sigma;
    let gaussian_peak = (2.0 * std::f64::consts::PI).powf(-1.5) / (sp * sq * sq);
    assert!(rel(prof.points[0].1, gaussian_peak) < 5e-3);
}

#[test]
fn results_are_bit_reproducible() {
    let p = GaussianPacket::from_gamma_epsilon(1.0, 5.0, 0.05).unwrap();
    let t = time_for_scaled(&p, 50.0).unwrap();
    let quad = QuadratureSpec::default();
    let a = position_moments(&p, t, &quad).unwrap();
    let b = position_moments(&p, t, &quad).unwrap();
    assert_eq!(a, b);
    let a = profile_width(&p, t, Axis::Parallel, ProfileKind::Marginal, &quad).unwrap();
    let b = profile_width(&p, t, Axis::Parallel, ProfileKind::Marginal, &quad).unwrap();
    assert_eq!(a, b);
}

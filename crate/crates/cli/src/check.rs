//! The invariant battery behind `relpack check`.

use nalgebra::Vector3;
use num_complex::Complex64;
use relpack::boost::{boosted_norm, measure_contraction, BoostSpec};
use relpack::kinematics::{boost_momentum, FourMomentum};
use relpack::oracle::{
    density_norm, position_moments, profile_width, velocity_moments, Axis, MomentReport, ProfileKind, QuadratureSpec,
};
use relpack::packet::GaussianPacket;
use relpack::quadrature::GaussLegendre;
use relpack::spreading::{excess_variances, gaussian_integral, sigma_parallel, sigma_perp, time_for_scaled};

use crate::args::Opts;
use crate::run::{quad_spec, Failure, Report};
use crate::table::Table;

/// Twenty fixed (σ, ξ, τ) triples spread over [0.5, 2] × [−3, 3] × [−2, 2].
pub const TRIPLES: [(f64, f64, f64); 20] = [
    (1.713, -2.104, 0.882),
    (0.642, 2.775, -1.513),
    (1.208, 0.337, 1.964),
    (1.955, -0.918, -0.276),
    (0.871, 1.462, 0.118),
    (0.503, -2.951, 1.402),
    (1.476, 2.019, -1.887),
    (1.034, -0.064, -0.731),
    (0.768, 0.985, 1.246),
    (1.891, 2.538, 0.554),
    (1.322, -1.677, -1.129),
    (0.595, -0.452, 0.009),
    (1.603, 1.176, 1.731),
    (0.933, -2.483, -0.418),
    (1.167, 2.902, -1.992),
    (1.794, -1.245, 0.321),
    (0.707, 0.558, -1.660),
    (1.411, -2.736, 1.058),
    (1.999, 0.213, -0.947),
    (0.826, -1.891, 0.693),
];

struct Item {
    name: &'static str,
    passed: bool,
    value: f64,
    tolerance: f64,
    detail: String,
}

impl Item {
    fn within(name: &'static str, value: f64, tolerance: f64, detail: String) -> Self {
        Item {
            name,
            passed: value <= tolerance,
            value,
            tolerance,
            detail,
        }
    }

    fn failed(name: &'static str, tolerance: f64, err: impl std::fmt::Display) -> Self {
        Item {
            name,
            passed: false,
            value: f64::NAN,
            tolerance,
            detail: err.to_string(),
        }
    }

    fn require(mut self, converged: bool, est_error: f64) -> Self {
        if !converged {
            self.passed = false;
            self.detail = format!("{}; not converged (est_error {est_error:e})", self.detail);
        }
        self
    }
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Deterministic low-discrepancy sample of `(k, m, β₀)` with |β₀| < 0.99.
fn kinematic_points() -> Vec<(Vector3<f64>, f64, Vector3<f64>)> {
    let a: Vec<f64> = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0].iter().map(|p| p.sqrt()).collect();
    (1..=1000)
        .filter_map(|i| {
            let u: Vec<f64> = a.iter().map(|alpha| frac(i as f64 * alpha)).collect();
            let k = Vector3::new(6.0 * u[0] - 3.0, 6.0 * u[1] - 3.0, 6.0 * u[2] - 3.0);
            let m = 0.1 + 2.9 * u[3];
            let d = Vector3::new(2.0 * u[4] - 1.0, 2.0 * u[5] - 1.0, 2.0 * u[6] - 1.0);
            (d.norm() > 1e-3).then(|| (k, m, d.normalize() * (0.99 * u[7])))
        })
        .collect()
}

fn mass_shell() -> Item {
    let worst = kinematic_points()
        .into_iter()
        .map(|(k, m, b)| {
            let fp = FourMomentum::on_shell(k, m).expect("positive mass");
            let out = boost_momentum(&fp, &b).expect("subluminal");
            ((out.invariant_mass_squared() - m * m) / (m * m)).abs()
        })
        .fold(0.0, f64::max);
    Item::within("mass_shell", worst, 1e-10, "max relative drift of E²−|p|² over 1000 boosts".into())
}

fn boost_group() -> Item {
    let worst = kinematic_points()
        .into_iter()
        .map(|(k, m, b)| {
            let fp = FourMomentum::on_shell(k, m).expect("positive mass");
            let back = boost_momentum(&boost_momentum(&fp, &b).expect("subluminal"), &(-b)).expect("subluminal");
            ((back.energy - fp.energy).abs() + (back.p - fp.p).norm()) / fp.energy
        })
        .fold(0.0, f64::max);
    Item::within("boost_group", worst, 1e-12, "boost by β₀ then −β₀, max relative change".into())
}

fn momentum_normalization(quad: &QuadratureSpec) -> Item {
    let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).expect("valid packet");
    let s = p.sigma_p();
    let w = quad.halfwidth_sigmas;
    let rule = GaussLegendre::new(quad.nodes_per_axis);
    let c = p.mean_momentum();
    let axes: Vec<_> = (0..3).map(|i| rule.on_interval(c[i] - w * s, c[i] + w * s)).collect();
    let mut total = 0.0;
    for &(x, wx) in &axes[0] {
        for &(y, wy) in &axes[1] {
            for &(z, wz) in &axes[2] {
                total += wx * wy * wz * p.momentum_amplitude(&Vector3::new(x, y, z)).powi(2);
            }
        }
    }
    Item::within(
        "momentum_normalization",
        (total - 1.0).abs(),
        1e-8,
        format!("∫|Ψ|² on a {}³ Gauss-Legendre box", quad.nodes_per_axis),
    )
}

/// Composite Gauss-Legendre on exp(−(1 + iτ)z²/σ² + iξz/σ) over ±12σ.
fn gaussian_integral_quadrature(sigma: f64, xi: f64, tau: f64) -> Complex64 {
    let rule = GaussLegendre::new(24);
    let panels = 96;
    let h = 24.0 * sigma / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..panels {
        let a = -12.0 * sigma + j as f64 * h;
        for (z, w) in rule.on_interval(a, a + h) {
            let u = z / sigma;
            sum += Complex64::new(-u * u, xi * u - tau * u * u).exp() * w;
        }
    }
    sum
}

fn gaussian_identity() -> Item {
    let worst = TRIPLES
        .iter()
        .chain(std::iter::once(&(1.0, 2.0, 1.0)))
        .map(|&(s, xi, tau)| {
            let d = gaussian_integral(s, xi, tau) - gaussian_integral_quadrature(s, xi, tau);
            d.re.abs().max(d.im.abs())
        })
        .fold(0.0, f64::max);
    Item::within(
        "gaussian_integral_identity",
        worst,
        1e-8,
        "closed form vs composite Gauss-Legendre, worst part over 21 triples".into(),
    )
}

fn anisotropy() -> Item {
    let mut worst: f64 = 0.0;
    for eps in [0.01, 0.05] {
        for gamma in [1.25, 2.0, 5.0] {
            let p = GaussianPacket::from_gamma_epsilon(1.0, gamma, eps).expect("valid packet");
            let g4 = p.kinematics().gamma.powi(4);
            for s in [10.0, 50.0, 100.0] {
                let t = time_for_scaled(&p, s).expect("moving packet");
                let (par, perp) = excess_variances(&p, t);
                worst = worst.max((perp - g4 * par).abs() / perp);
            }
        }
    }
    Item::within(
        "anisotropy_identity",
        worst,
        1e-12,
        "σ_⊥²−σ_x² against γ⁴(σ_∥²−σ_x²), closed form".into(),
    )
}

fn figure_packet() -> GaussianPacket {
    GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).expect("valid packet")
}

fn moment_concordance(quad: &QuadratureSpec) -> Item {
    let name = "moment_concordance";
    let p = figure_packet();
    let v = match velocity_moments(&p, quad) {
        Ok(v) => v,
        Err(e) => return Item::failed(name, 5e-3, e),
    };
    let mut worst: f64 = 0.0;
    for s in [10.0, 50.0, 100.0] {
        let t = time_for_scaled(&p, s).expect("moving packet");
        let r = MomentReport::at_time(&p, &v, t);
        worst = worst
            .max((r.sigma_par / sigma_parallel(&p, t).sigma - 1.0).abs())
            .max((r.sigma_perp / sigma_perp(&p, t).sigma - 1.0).abs());
    }
    Item::within(name, worst, 5e-3, "exact moments vs closed form, ε=0.01 γ=2, βt/σ_x ≤ 100".into())
        .require(v.converged, v.est_error)
}

fn density_concordance(quad: &QuadratureSpec) -> Item {
    let name = "density_concordance";
    let p = figure_packet();
    let t = time_for_scaled(&p, 50.0).expect("moving packet");
    let m = match position_moments(&p, t, quad) {
        Ok(m) => m,
        Err(e) => return Item::failed(name, 5e-3, e),
    };
    let widths = profile_width(&p, t, Axis::Parallel, ProfileKind::Marginal, quad)
        .and_then(|a| Ok((a, profile_width(&p, t, Axis::Transverse, ProfileKind::Marginal, quad)?)));
    let (wp, wt) = match widths {
        Ok(w) => w,
        Err(e) => return Item::failed(name, 5e-3, e),
    };
    let dev = (wp.sigma.powi(2) / m.sigma_par.powi(2) - 1.0)
        .abs()
        .max((wt.sigma.powi(2) / m.sigma_perp.powi(2) - 1.0).abs());
    Item::within(name, dev, 5e-3, "density-profile variances vs moment covariance at βt/σ_x=50".into())
        .require(m.converged, m.est_error)
        .require(wp.converged && wt.converged, wp.est_error.max(wt.est_error))
}

fn free_evolution_norm(quad: &QuadratureSpec) -> Item {
    let name = "free_evolution_norm";
    let p = figure_packet();
    let t = time_for_scaled(&p, 100.0).expect("moving packet");
    match density_norm(&p, t, quad) {
        Ok(n) => Item::within(name, (n - 1.0).abs(), 1e-6, "∫|ψ(t)|² d³x at βt/σ_x=100".into()),
        Err(e) => Item::failed(name, 1e-6, e),
    }
}

fn contraction(quad: &QuadratureSpec) -> (Item, Item) {
    let spec = BoostSpec::from_gamma(2.0).expect("γ₀ ≥ 1");
    let measure = |s: f64| measure_contraction(&GaussianPacket::at_rest(1.0, s).expect("valid packet"), &spec, quad);
    let (a, b) = match (measure(0.005), measure(0.0025)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return (Item::failed("contraction", 1e-3, &e), Item::failed("contraction_scaling", 1.2, e))
        }
    };
    let dev = (a.sigma_par_ratio - 0.5).abs().max((a.sigma_perp_ratio - 1.0).abs());
    let first = Item::within(
        "contraction",
        dev,
        1e-3,
        format!("γ₀=2 σ_p=0.005: σ′_∥/σ_x={} σ′_⊥/σ_x={}", a.sigma_par_ratio, a.sigma_perp_ratio),
    )
    .require(a.converged, a.est_error);
    let ratio = (a.sigma_par_ratio * 2.0 - 1.0) / (b.sigma_par_ratio * 2.0 - 1.0);
    let second = Item::within(
        "contraction_scaling",
        (ratio - 4.0).abs(),
        1.2,
        format!("deviation ratio under σ_p halving = {ratio}"),
    )
    .require(a.converged && b.converged, a.est_error.max(b.est_error));
    (first, second)
}

fn unitarity(quad: &QuadratureSpec) -> Item {
    let name = "boost_unitarity";
    let p = GaussianPacket::at_rest(1.0, 0.005).expect("valid packet");
    let mut worst: f64 = 0.0;
    for g in [1.25, 2.0, 5.0] {
        match boosted_norm(&p, &BoostSpec::from_gamma(g).expect("γ₀ ≥ 1"), quad) {
            Ok(n) => worst = worst.max((n - 1.0).abs()),
            Err(e) => return Item::failed(name, 1e-8, e),
        }
    }
    Item::within(name, worst, 1e-8, "∫|Ψ′|² for γ₀ ∈ {1.25, 2, 5}".into())
}

pub fn run_check(opts: &Opts) -> Result<Report, Failure> {
    let unused = [
        ("--mass", opts.mass.is_some()),
        ("--gamma", opts.gamma.is_some()),
        ("--p", opts.p.is_some()),
        ("--epsilon", opts.epsilon.is_some()),
        ("--sigma-p", opts.sigma_p.is_some()),
        ("--beta0", opts.beta0.is_some()),
        ("--t-max", opts.t_max.is_some()),
        ("--samples", opts.samples.is_some()),
        ("--with-oracle", opts.with_oracle),
    ];
    if let Some((flag, _)) = unused.iter().find(|(_, given)| *given) {
        return Err(Failure::Usage(format!("{flag} is not used by `check`")));
    }
    let quad = quad_spec(opts)?;
    let (contract, scaling) = contraction(&quad);
    let items = vec![
        mass_shell(),
        boost_group(),
        momentum_normalization(&quad),
        gaussian_identity(),
        anisotropy(),
        moment_concordance(&quad),
        density_concordance(&quad),
        free_evolution_norm(&quad),
        contract,
        scaling,
        unitarity(&quad),
    ];

    let mut table = Table::new(vec!["invariant", "passed", "value", "tolerance", "detail"]);
    let failed: Vec<&str> = items.iter().filter(|i| !i.passed).map(|i| i.name).collect();
    for item in items {
        table.push(vec![
            item.name.into(),
            item.passed.into(),
            item.value.into(),
            item.tolerance.into(),
            item.detail.into(),
        ]);
    }
    let failure = (!failed.is_empty()).then(|| Failure::Invariant(format!("failed: {}", failed.join(", "))));
    Ok(Report {
        table,
        failure,
        warnings: Vec::new(),
    })
}

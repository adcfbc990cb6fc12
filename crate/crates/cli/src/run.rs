use nalgebra::Vector3;
use relpack::boost::{boosted_widths_quadratic, measure_contraction, BoostSpec};
use relpack::oracle::{profile_width, velocity_moments, Axis, MomentReport, ProfileKind, QuadratureSpec};
use relpack::packet::GaussianPacket;
use relpack::spreading::{sigma_parallel, sigma_perp, time_for_scaled};

use crate::args::Opts;
use crate::table::{Cell, Table};

/// Why a run ends with a nonzero exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Usage(String),
    Io(String),
    Numerical(String),
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numerical(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<relpack::Error> for Failure {
    fn from(e: relpack::Error) -> Self {
        match e {
            relpack::Error::Domain(_) | relpack::Error::Usage(_) => Failure::Usage(e.to_string()),
            relpack::Error::PhaseResolution { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

/// A table to emit, plus the failure to report once it is written.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub failure: Option<Failure>,
    pub warnings: Vec<String>,
}

fn reject(flag: &str, given: bool, command: &str) -> Result<(), Failure> {
    if given {
        Err(Failure::Usage(format!("{flag} is not used by `{command}`")))
    } else {
        Ok(())
    }
}

pub fn quad_spec(opts: &Opts) -> Result<QuadratureSpec, Failure> {
    let d = QuadratureSpec::default();
    Ok(QuadratureSpec::new(
        opts.quad_nodes.unwrap_or(d.nodes_per_axis),
        opts.quad_halfwidth.unwrap_or(d.halfwidth_sigmas),
        true,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Figure1,
    Spread,
    Density,
}

impl Curve {
    fn name(self) -> &'static str {
        match self {
            Curve::Figure1 => "figure1",
            Curve::Spread => "spread",
            Curve::Density => "density",
        }
    }
}

fn moving_packet(opts: &Opts) -> Result<GaussianPacket, Failure> {
    let m = opts.mass.unwrap_or(1.0);
    if !(m > 0.0 && m.is_finite()) {
        return Err(Failure::Usage(format!("--mass must be positive, got {m}")));
    }
    let p = match (opts.p, opts.gamma) {
        (Some(p), _) => {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Failure::Usage(format!("--p must be positive, got {p}")));
            }
            p
        }
        (None, gamma) => {
            let g = gamma.unwrap_or(2.0);
            if !(g > 1.0 && g.is_finite()) {
                return Err(Failure::Usage(format!("--gamma must exceed 1, got {g}")));
            }
            m * (g * g - 1.0).sqrt()
        }
    };
    let sigma_p = match (opts.sigma_p, opts.epsilon) {
        (Some(s), _) => s,
        (None, eps) => {
            let e = eps.unwrap_or(0.01);
            if !(e > 0.0 && e.is_finite()) {
                return Err(Failure::Usage(format!("--epsilon must be positive, got {e}")));
            }
            e * p
        }
    };
    Ok(GaussianPacket::new(m, Vector3::new(0.0, 0.0, p), sigma_p)?)
}

fn scaled_grid(opts: &Opts, default_samples: usize) -> Result<Vec<f64>, Failure> {
    let t_max = opts.t_max.unwrap_or(100.0);
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Failure::Usage(format!("--t-max must be positive, got {t_max}")));
    }
    let n = opts.samples.unwrap_or(default_samples);
    if n < 2 {
        return Err(Failure::Usage(format!("--samples must be at least 2, got {n}")));
    }
    Ok((0..n).map(|i| t_max * (i as f64 / (n - 1) as f64)).collect())
}

/// Width curves for `figure1`, `spread` and `density`.
pub fn run_curve(kind: Curve, opts: &Opts) -> Result<Report, Failure> {
    reject("--beta0", opts.beta0.is_some(), kind.name())?;
    let packet = moving_packet(opts)?;
    let grid = scaled_grid(opts, if kind == Curve::Density { 11 } else { 101 })?;
    let quad = quad_spec(opts)?;
    let sx = packet.sigma_x();
    let with_moments = opts.with_oracle;
    let with_density = kind == Curve::Density;

    let mut columns = vec![
        "beta_t_over_sigma_x",
        "sigma_par_over_sigma_x",
        "sigma_perp_over_sigma_x",
        "beyond_validity",
    ];
    if with_moments {
        columns.extend([
            "moment_sigma_par_over_sigma_x",
            "moment_sigma_perp_over_sigma_x",
            "moment_converged",
            "moment_est_error",
        ]);
    }
    if with_density {
        columns.extend([
            "density_sigma_par_over_sigma_x",
            "density_sigma_perp_over_sigma_x",
            "density_converged",
            "density_est_error",
        ]);
    }

    let velocity = if with_moments { Some(velocity_moments(&packet, &quad)?) } else { None };
    let mut table = Table::new(columns);
    let mut unconverged = 0;
    let mut beyond = 0;
    for &s in &grid {
        let t = time_for_scaled(&packet, s)?;
        let par = sigma_parallel(&packet, t);
        let perp = sigma_perp(&packet, t);
        let outside = !par.validity.is_within();
        beyond += usize::from(outside);
        let mut row: Vec<Cell> = vec![s.into(), (par.sigma / sx).into(), (perp.sigma / sx).into(), outside.into()];
        if let Some(v) = &velocity {
            let r = MomentReport::at_time(&packet, v, t);
            unconverged += usize::from(!r.converged);
            row.extend([
                (r.sigma_par / sx).into(),
                (r.sigma_perp / sx).into(),
                r.converged.into(),
                r.est_error.into(),
            ]);
        }
        if with_density {
            let wp = profile_width(&packet, t, Axis::Parallel, ProfileKind::Marginal, &quad)?;
            let wt = profile_width(&packet, t, Axis::Transverse, ProfileKind::Marginal, &quad)?;
            let ok = wp.converged && wt.converged;
            unconverged += usize::from(!ok);
            row.extend([
                (wp.sigma / sx).into(),
                (wt.sigma / sx).into(),
                ok.into(),
                wp.est_error.max(wt.est_error).into(),
            ]);
        }
        table.push(row);
    }

    let mut warnings = Vec::new();
    if beyond > 0 {
        warnings.push(format!(
            "{beyond} grid point(s) lie beyond a tenth of the validity horizon ω/σ_p²"
        ));
    }
    let failure = (unconverged > 0).then(|| {
        Failure::Numerical(format!(
            "oracle quadrature did not converge at {unconverged} grid point(s); raise --quad-nodes"
        ))
    });
    Ok(Report { table, failure, warnings })
}

/// Measured Lorentz contraction of a rest packet.
pub fn run_contract(opts: &Opts) -> Result<Report, Failure> {
    reject("--p", opts.p.is_some(), "contract")?;
    reject("--epsilon", opts.epsilon.is_some(), "contract")?;
    reject("--t-max", opts.t_max.is_some(), "contract")?;
    reject("--samples", opts.samples.is_some(), "contract")?;
    reject("--with-oracle", opts.with_oracle, "contract")?;
    let m = opts.mass.unwrap_or(1.0);
    let packet = GaussianPacket::at_rest(m, opts.sigma_p.unwrap_or(0.005))?;
    let spec = match opts.beta0 {
        Some(b) => BoostSpec::along_z(b)?,
        None => BoostSpec::from_gamma(opts.gamma.unwrap_or(2.0))?,
    };
    let quad = quad_spec(opts)?;
    let quadratic = boosted_widths_quadratic(&packet, &spec)?;
    let r = measure_contraction(&packet, &spec, &quad)?;

    let mut table = Table::new(vec![
        "gamma0",
        "beta0",
        "sigma_p",
        "sigma_par_ratio",
        "sigma_perp_ratio",
        "predicted_ratio",
        "narrowness",
        "narrowness_warning",
        "norm_check",
        "converged",
        "est_error",
    ]);
    table.push(vec![
        spec.gamma0().into(),
        spec.beta0().z.into(),
        packet.sigma_p().into(),
        r.sigma_par_ratio.into(),
        r.sigma_perp_ratio.into(),
        r.predicted_ratio.into(),
        r.narrowness.into(),
        quadratic.warning.into(),
        r.norm_check.into(),
        r.converged.into(),
        r.est_error.into(),
    ]);
    let mut warnings = Vec::new();
    if quadratic.warning {
        warnings.push(format!(
            "narrowness σ_p/(mβ₀) = {} exceeds 0.1; the 1/γ₀ prediction is not expected to hold",
            r.narrowness
        ));
    }
    let failure = (!r.converged).then(|| {
        Failure::Numerical(format!(
            "contraction quadrature did not converge (relative change {:e}); raise --quad-nodes",
            r.est_error
        ))
    });
    Ok(Report { table, failure, warnings })
}

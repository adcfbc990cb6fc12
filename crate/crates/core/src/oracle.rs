//! Numerical oracles for the spreading laws.
//!
//! Two independent routes to the position distribution at time `t`, neither
//! of which truncates the dispersion relation:
//!
//! 1. **Moments.** With the position operator acting as `i∇_k` on
//!    Ψ(k) e^{−iω(k)t} and Ψ real, the mean is `t⟨v⟩` and the covariance is
//!    `σ_x² I + t² Cov(v)`, where `v(k) = k/ω(k)` is averaged over |Ψ(k)|².
//!    [`velocity_moments`] evaluates those averages by tensor-product
//!    Gauss-Legendre quadrature; [`position_moments`] assembles the report.
//! 2. **Density.** ψ(t, x) is computed directly as the Fourier integral of
//!    Ψ(k) e^{i(k·x − ω(k)t)}. The packet is symmetric about p̂, so the
//!    transverse plane reduces to a Hankel transform with a `J0` kernel and
//!    every quantity here is a 2D quadrature over `(k_∥, |k_⊥|)`.
//!
//! All sums run in a fixed order, so results are bit-reproducible even though
//! independent samples are evaluated in parallel.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::packet::GaussianPacket;
use crate::quadrature::GaussLegendre;
use crate::spreading;

/// Largest relative change under node doubling for converged moments.
pub const MOMENT_TOLERANCE: f64 = 1e-6;
/// Largest relative change under node doubling for converged densities.
pub const DENSITY_TOLERANCE: f64 = 1e-4;
/// Phase change per quadrature cell above which a density grid is rejected.
pub const MAX_PHASE_PER_CELL: f64 = PI / 4.0;
/// Half-width of the sampling window for profile widths, in analytic widths.
pub const PROFILE_WINDOW: f64 = 10.0;
/// Gauss-Legendre samples taken along a profile when measuring its width.
pub const PROFILE_SAMPLES: usize = 96;

/// Node counts and box size for every oracle quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    /// Half-width of the momentum box around the peak, in standard
    /// deviations of the Gaussian being integrated: σ_p for |Ψ|² (moments),
    /// √2 σ_p for Ψ itself (densities).
    pub halfwidth_sigmas: f64,
    /// Repeat each quadrature with doubled nodes and report the change.
    pub refinement: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_axis: 64,
            halfwidth_sigmas: 8.0,
            refinement: true,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes_per_axis: usize, halfwidth_sigmas: f64, refinement: bool) -> Result<Self> {
        let spec = QuadratureSpec {
            nodes_per_axis,
            halfwidth_sigmas,
            refinement,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 8 {
            return Err(Error::usage(format!(
                "nodes_per_axis must be at least 8, got {}",
                self.nodes_per_axis
            )));
        }
        if !(self.halfwidth_sigmas >= 5.0 && self.halfwidth_sigmas.is_finite()) {
            return Err(Error::usage(format!(
                "halfwidth_sigmas must be at least 5, got {}",
                self.halfwidth_sigmas
            )));
        }
        Ok(())
    }

    pub fn with_nodes(&self, nodes_per_axis: usize) -> Self {
        QuadratureSpec {
            nodes_per_axis,
            ..*self
        }
    }

    pub fn doubled(&self) -> Self {
        self.with_nodes(2 * self.nodes_per_axis)
    }
}

/// Mean and covariance of the group velocity `k/ω(k)` under |Ψ(k)|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityMoments {
    pub mean: Vector3<f64>,
    pub covariance: Matrix3<f64>,
    /// Quadrature of |Ψ|² itself; 1 up to truncation and rounding.
    pub norm: f64,
    pub converged: bool,
    pub est_error: f64,
}

/// Position mean and covariance at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub time: f64,
    pub mean: Vector3<f64>,
    pub covariance: Matrix3<f64>,
    /// √(p̂ᵀ C p̂).
    pub sigma_par: f64,
    /// √((tr C − σ_∥²)/2).
    pub sigma_perp: f64,
    pub converged: bool,
    pub est_error: f64,
}

struct RawMoments {
    norm: f64,
    mean: Vector3<f64>,
    covariance: Matrix3<f64>,
}

fn raw_velocity_moments(packet: &GaussianPacket, nodes: usize, halfwidth: f64) -> RawMoments {
    let rule = GaussLegendre::new(nodes);
    let axis: Vec<(f64, f64)> = rule
        .on_interval(-halfwidth, halfwidth)
        .into_iter()
        .map(|(u, w)| (u, w * (-0.5 * u * u).exp()))
        .collect();
    let triad = packet.triad();
    let s = packet.sigma_p();
    let m2 = packet.mass() * packet.mass();
    let centre = packet.mean_momentum();
    // |Ψ|² d³k = (2π)^(−3/2) e^{−|u|²/2} d³u with k = p + σ_p u
    let scale = (2.0 * PI).powf(-1.5);

    let velocity = |a: f64, b: f64, c: f64| -> Vector3<f64> {
        let k = centre + triad.perp1 * (s * a) + triad.perp2 * (s * b) + triad.parallel * (s * c);
        k / (k.norm_squared() + m2).sqrt()
    };

    let first: Vec<(f64, Vector3<f64>)> = axis
        .par_iter()
        .map(|&(a, wa)| {
            let mut norm = 0.0;
            let mut sum = Vector3::zeros();
            for &(b, wb) in &axis {
                for &(c, wc) in &axis {
                    let w = wa * wb * wc;
                    norm += w;
                    sum += velocity(a, b, c) * w;
                }
            }
            (norm, sum)
        })
        .collect();
    let (norm, sum) = first
        .iter()
        .fold((0.0, Vector3::zeros()), |(n, s), (dn, ds)| (n + dn, s + ds));
    let mean = sum / norm;

    let second: Vec<Matrix3<f64>> = axis
        .par_iter()
        .map(|&(a, wa)| {
            let mut acc = Matrix3::zeros();
            for &(b, wb) in &axis {
                for &(c, wc) in &axis {
                    let d = velocity(a, b, c) - mean;
                    acc += d * d.transpose() * (wa * wb * wc);
                }
            }
            acc
        })
        .collect();
    let covariance = second.iter().fold(Matrix3::zeros(), |acc, m| acc + m) / norm;

    RawMoments {
        norm: norm * scale,
        mean,
        covariance,
    }
}

fn moment_change(coarse: &RawMoments, fine: &RawMoments) -> f64 {
    let cov_scale = fine.covariance.norm();
    let cov = if cov_scale > 0.0 {
        (coarse.covariance - fine.covariance).norm() / cov_scale
    } else {
        0.0
    };
    let spread = fine.covariance.trace().max(0.0).sqrt();
    let mean_scale = fine.mean.norm().max(spread);
    let mean = if mean_scale > 0.0 {
        (coarse.mean - fine.mean).norm() / mean_scale
    } else {
        0.0
    };
    cov.max(mean).max((coarse.norm - fine.norm).abs())
}

/// Mean and covariance of `v(k) = k/ω(k)` under the packet's momentum density.
pub fn velocity_moments(packet: &GaussianPacket, quad: &QuadratureSpec) -> Result<VelocityMoments> {
    quad.validate()?;
    let base = raw_velocity_moments(packet, quad.nodes_per_axis, quad.halfwidth_sigmas);
    let (converged, est_error) = if quad.refinement {
        let fine = raw_velocity_moments(packet, 2 * quad.nodes_per_axis, quad.halfwidth_sigmas);
        let change = moment_change(&base, &fine);
        (change < MOMENT_TOLERANCE, change)
    } else {
        (true, 0.0)
    };
    Ok(VelocityMoments {
        mean: base.mean,
        covariance: base.covariance,
        norm: base.norm,
        converged,
        est_error,
    })
}

impl MomentReport {
    /// Position moments at time `t` from precomputed velocity moments.
    pub fn at_time(packet: &GaussianPacket, velocity: &VelocityMoments, t: f64) -> Self {
        let sx2 = packet.sigma_x() * packet.sigma_x();
        let covariance = Matrix3::identity() * sx2 + velocity.covariance * (t * t);
        let axis = packet.triad().parallel;
        let par2 = axis.dot(&(covariance * axis));
        let perp2 = 0.5 * (covariance.trace() - par2);
        MomentReport {
            time: t,
            mean: velocity.mean * t,
            covariance,
            sigma_par: par2.sqrt(),
            sigma_perp: perp2.sqrt(),
            converged: velocity.converged,
            est_error: velocity.est_error,
        }
    }
}

/// Exact position mean and covariance at time `t`.
pub fn position_moments(packet: &GaussianPacket, t: f64, quad: &QuadratureSpec) -> Result<MomentReport> {
    let velocity = velocity_moments(packet, quad)?;
    Ok(MomentReport::at_time(packet, &velocity, t))
}

/// Direction along which a density profile is taken, relative to p̂.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Parallel,
    Transverse,
}

/// How the 3D density is reduced to a 1D profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// |ψ|² on a line through the packet centre.
    Slice,
    /// |ψ|² integrated over the two coordinates orthogonal to the axis.
    Marginal,
}

/// Sampled density profile with its node-doubling error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    /// `(offset / σ_x, density)` pairs.
    pub points: Vec<(f64, f64)>,
    pub nodes_per_axis: usize,
    pub converged: bool,
    /// Largest change under doubling, relative to the largest density.
    pub est_error: f64,
}

/// Width of a density profile measured from its second central moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileWidth {
    pub sigma: f64,
    /// First moment of the profile relative to the moving centre βt.
    pub mean_offset: f64,
    /// Integral of the profile (1 for a marginal profile).
    pub mass: f64,
    pub nodes_per_axis: usize,
    pub converged: bool,
    pub est_error: f64,
}

/// Cylindrical momentum grid around p with the evolved amplitude
/// Ψ(k) e^{−iφ(k)t} stored at every node, where
/// φ = ω(k) − ω(p) − β·(k − p) is the part of the phase that the moving
/// frame does not remove.
struct CylinderGrid {
    rho: Vec<(f64, f64)>,
    /// `(k_⊥, w k_⊥)`: radial nodes with the cylindrical measure folded in.
    kperp: Vec<(f64, f64)>,
    amp: Vec<Complex64>,
}

impl CylinderGrid {
    fn new(packet: &GaussianPacket, t: f64, nodes: usize, halfwidth: f64) -> Self {
        let s = packet.sigma_p();
        let span = amplitude_span(packet, halfwidth);
        let rule = GaussLegendre::new(nodes);
        let rho = rule.on_interval(-span, span);
        let kperp: Vec<(f64, f64)> = rule
            .on_interval(0.0, span)
            .into_iter()
            .map(|(k, w)| (k, w * k))
            .collect();
        let p = packet.mean_momentum().norm();
        let m = packet.mass();
        let omega_p = (p * p + m * m).sqrt();
        let peak = packet.momentum_peak();
        let inv4s2 = 1.0 / (4.0 * s * s);

        let amp = rho
            .par_iter()
            .flat_map_iter(|&(r, _)| {
                kperp.iter().map(move |&(k, _)| {
                    let k_par = p + r;
                    let omega_k = (k_par * k_par + k * k + m * m).sqrt();
                    let q2 = r * r + k * k;
                    // ω_k − ω_p without cancellation, then the curvature part of the phase
                    let d_omega = (2.0 * p * r + q2) / (omega_k + omega_p);
                    let phi = (omega_p * q2 - p * r * d_omega) / (omega_p * (omega_k + omega_p));
                    let envelope = peak * (-q2 * inv4s2).exp();
                    Complex64::from_polar(envelope, -phi * t)
                })
            })
            .collect();
        CylinderGrid { rho, kperp, amp }
    }

    fn n_perp(&self) -> usize {
        self.kperp.len()
    }

    fn row(&self, i: usize) -> &[Complex64] {
        let n = self.n_perp();
        &self.amp[i * n..(i + 1) * n]
    }

    fn fourier_row(&self, s: f64) -> Vec<Complex64> {
        self.rho
            .iter()
            .map(|&(r, w)| Complex64::from_polar(w, r * s))
            .collect()
    }

    fn bessel_column(&self, r: f64) -> Vec<f64> {
        self.kperp.iter().map(|&(k, c)| c * libm::j0(k * r)).collect()
    }

    /// Σ_i w_i e^{iρ_i s} C_ij for every radial node j.
    fn longitudinal_transform(&self, s: f64) -> Vec<Complex64> {
        let f = self.fourier_row(s);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_perp()];
        for (i, fi) in f.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += fi * a;
            }
        }
        out
    }

    /// ψ(t, x) up to a global phase at longitudinal offset `s` from βt and
    /// transverse distance `r` from the axis.
    fn amplitude(&self, s: f64, r: f64) -> Complex64 {
        let d = self.longitudinal_transform(s);
        let b = self.bessel_column(r);
        let sum: Complex64 = d.iter().zip(&b).map(|(d, b)| d * b).sum();
        sum / (2.0 * PI).sqrt()
    }

    /// ∫ d²x_⊥ |ψ|² at longitudinal offset `s`, by Parseval in the transverse plane.
    fn parallel_marginal(&self, s: f64) -> f64 {
        self.longitudinal_transform(s)
            .iter()
            .zip(&self.kperp)
            .map(|(d, &(_, c))| c * d.norm_sqr())
            .sum()
    }

    /// ∫ dx_∥ |ψ|² at transverse distance `r`, by Parseval along the axis.
    fn transverse_areal_density(&self, r: f64) -> f64 {
        let b = self.bessel_column(r);
        self.rho
            .iter()
            .enumerate()
            .map(|(i, &(_, w))| {
                let g: Complex64 = self.row(i).iter().zip(&b).map(|(a, b)| a * b).sum();
                w * g.norm_sqr()
            })
            .sum()
    }
}

/// Momentum half-span of the density grids; Ψ has standard deviation √2 σ_p.
fn amplitude_span(packet: &GaussianPacket, halfwidth: f64) -> f64 {
    halfwidth * SQRT_2 * packet.sigma_p()
}

fn analytic_widths(packet: &GaussianPacket, t: f64) -> (f64, f64) {
    (
        spreading::sigma_parallel(packet, t).sigma,
        spreading::sigma_perp(packet, t).sigma,
    )
}

/// Bounds on |∂φ/∂k_∥|·|t| and |∂φ/∂k_⊥|·|t| over the momentum box.
fn phase_gradients(packet: &GaussianPacket, t: f64, halfwidth: f64) -> (f64, f64) {
    let span = amplitude_span(packet, halfwidth);
    let p = packet.mean_momentum().norm();
    let m = packet.mass();
    let beta = p / (p * p + m * m).sqrt();
    let steps = 32;
    let mut g_par: f64 = 0.0;
    let mut g_perp: f64 = 0.0;
    for i in 0..=steps {
        let r = span * (2.0 * i as f64 / steps as f64 - 1.0);
        for j in 0..=steps {
            let k = span * j as f64 / steps as f64;
            let omega = ((p + r) * (p + r) + k * k + m * m).sqrt();
            g_par = g_par.max(((p + r) / omega - beta).abs());
            g_perp = g_perp.max(k / omega);
        }
    }
    (g_par * t.abs(), g_perp * t.abs())
}

/// Widest Gauss-Legendre cell on an interval of the given length.
fn cell_width(nodes: usize, length: f64) -> f64 {
    0.5 * length * PI / (nodes as f64 + 0.5)
}

/// Which oscillating kernels a density evaluation carries.
#[derive(Debug, Clone, Copy)]
struct PhaseLoad {
    /// Largest longitudinal offset |s| sampled, or `None` if the ∥ integral is
    /// under a modulus square only.
    longitudinal: Option<f64>,
    /// Largest transverse radius sampled, or `None` likewise.
    transverse: Option<f64>,
}

fn phase_per_cell(packet: &GaussianPacket, t: f64, nodes: usize, halfwidth: f64, load: PhaseLoad) -> f64 {
    let (g_par, g_perp) = phase_gradients(packet, t, halfwidth);
    let span = amplitude_span(packet, halfwidth);
    let par = load.longitudinal.map_or(0.0, |s| (s + g_par) * cell_width(nodes, 2.0 * span));
    let perp = load.transverse.map_or(0.0, |r| (r + g_perp) * cell_width(nodes, span));
    par.max(perp)
}

fn required_for(packet: &GaussianPacket, t: f64, halfwidth: f64, load: PhaseLoad) -> usize {
    let mut n = 8;
    while phase_per_cell(packet, t, n, halfwidth, load) > MAX_PHASE_PER_CELL && n < 1 << 20 {
        n *= 2;
    }
    n
}

fn slice_load(axis: Axis, max_offset: f64) -> PhaseLoad {
    match axis {
        Axis::Parallel => PhaseLoad {
            longitudinal: Some(max_offset),
            transverse: Some(0.0),
        },
        Axis::Transverse => PhaseLoad {
            longitudinal: Some(0.0),
            transverse: Some(max_offset),
        },
    }
}

fn marginal_load(axis: Axis, max_offset: f64) -> PhaseLoad {
    match axis {
        Axis::Parallel => PhaseLoad {
            longitudinal: Some(max_offset),
            transverse: None,
        },
        // the x_1 marginal samples the areal density out to |x_⊥| = √2 · max_offset
        Axis::Transverse => PhaseLoad {
            longitudinal: None,
            transverse: Some(2f64.sqrt() * max_offset),
        },
    }
}

/// Smallest power-of-two node count for which a slice profile reaching
/// `max_offset` (length units) passes the phase-resolution check.
pub fn required_density_nodes(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    max_offset: f64,
    halfwidth_sigmas: f64,
) -> usize {
    required_for(packet, t, halfwidth_sigmas, slice_load(axis, max_offset))
}

fn check_phase(packet: &GaussianPacket, t: f64, quad: &QuadratureSpec, load: PhaseLoad) -> Result<()> {
    let per_cell = phase_per_cell(packet, t, quad.nodes_per_axis, quad.halfwidth_sigmas, load);
    if per_cell > MAX_PHASE_PER_CELL {
        return Err(Error::PhaseResolution {
            phase_per_cell: per_cell,
            nodes: quad.nodes_per_axis,
            required: required_for(packet, t, quad.halfwidth_sigmas, load),
        });
    }
    Ok(())
}

fn sample_profile(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    kind: ProfileKind,
    offsets: &[f64],
    nodes: usize,
    halfwidth: f64,
) -> Vec<f64> {
    let grid = CylinderGrid::new(packet, t, nodes, halfwidth);
    let sx = packet.sigma_x();
    match (kind, axis) {
        (ProfileKind::Slice, Axis::Parallel) => offsets
            .par_iter()
            .map(|&o| grid.amplitude(o * sx, 0.0).norm_sqr())
            .collect(),
        (ProfileKind::Slice, Axis::Transverse) => offsets
            .par_iter()
            .map(|&o| grid.amplitude(0.0, (o * sx).abs()).norm_sqr())
            .collect(),
        (ProfileKind::Marginal, Axis::Parallel) => offsets
            .par_iter()
            .map(|&o| grid.parallel_marginal(o * sx))
            .collect(),
        (ProfileKind::Marginal, Axis::Transverse) => {
            // ρ(x_1) = ∫ dx_2 ρ_⊥(√(x_1² + x_2²)), x_2 over the same window as the offsets
            let reach = offsets.iter().fold(0.0f64, |a, o| a.max(o.abs())) * sx;
            let x2 = GaussLegendre::new(PROFILE_SAMPLES).on_interval(0.0, reach.max(sx));
            offsets
                .par_iter()
                .map(|&o| {
                    let x1 = o * sx;
                    2.0 * x2
                        .iter()
                        .map(|&(y, w)| w * grid.transverse_areal_density(x1.hypot(y)))
                        .sum::<f64>()
                })
                .collect()
        }
    }
}

fn profile_with_error(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    kind: ProfileKind,
    offsets: &[f64],
    quad: &QuadratureSpec,
) -> Result<DensityProfile> {
    quad.validate()?;
    let max_offset = offsets.iter().fold(0.0f64, |a, o| a.max(o.abs())) * packet.sigma_x();
    let load = match kind {
        ProfileKind::Slice => slice_load(axis, max_offset),
        ProfileKind::Marginal => marginal_load(axis, max_offset),
    };
    check_phase(packet, t, quad, load)?;
    let n = quad.nodes_per_axis;
    let base = sample_profile(packet, t, axis, kind, offsets, n, quad.halfwidth_sigmas);
    let (converged, est_error) = if quad.refinement {
        let fine = sample_profile(packet, t, axis, kind, offsets, 2 * n, quad.halfwidth_sigmas);
        let scale = fine.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let change = base
            .iter()
            .zip(&fine)
            .fold(0.0f64, |a, (b, f)| a.max((b - f).abs()));
        let rel = if scale > 0.0 { change / scale } else { change };
        (rel < DENSITY_TOLERANCE, rel)
    } else {
        (true, 0.0)
    };
    Ok(DensityProfile {
        points: offsets.iter().copied().zip(base).collect(),
        nodes_per_axis: n,
        converged,
        est_error,
    })
}

/// |ψ(t, x)|² on a line through the packet centre, by direct quadrature of
/// the Fourier integral with the exact dispersion relation.
///
/// Offsets are in units of σ_x, measured from the moving centre βt p̂ along
/// p̂ (`Parallel`) or along the first transverse axis (`Transverse`). The
/// density is normalized so that its 3D integral is 1.
pub fn density_profile(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    offsets: &[f64],
    quad: &QuadratureSpec,
) -> Result<DensityProfile> {
    profile_with_error(packet, t, axis, ProfileKind::Slice, offsets, quad)
}

/// Marginal density along an axis: |ψ(t, x)|² integrated over the two
/// orthogonal coordinates. Offsets as in [`density_profile`].
pub fn marginal_profile(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    offsets: &[f64],
    quad: &QuadratureSpec,
) -> Result<DensityProfile> {
    profile_with_error(packet, t, axis, ProfileKind::Marginal, offsets, quad)
}

struct RawWidth {
    sigma: f64,
    mean_offset: f64,
    mass: f64,
}

fn raw_profile_width(
    grid: &CylinderGrid,
    axis: Axis,
    kind: ProfileKind,
    window: f64,
) -> RawWidth {
    let rule = GaussLegendre::new(PROFILE_SAMPLES);
    match axis {
        Axis::Parallel => {
            let samples = rule.on_interval(-window, window);
            let density: Vec<f64> = samples
                .par_iter()
                .map(|&(s, _)| match kind {
                    ProfileKind::Slice => grid.amplitude(s, 0.0).norm_sqr(),
                    ProfileKind::Marginal => grid.parallel_marginal(s),
                })
                .collect();
            let mass: f64 = samples.iter().zip(&density).map(|(&(_, w), d)| w * d).sum();
            let mean = samples.iter().zip(&density).map(|(&(s, w), d)| w * d * s).sum::<f64>() / mass;
            let var = samples
                .iter()
                .zip(&density)
                .map(|(&(s, w), d)| w * d * (s - mean) * (s - mean))
                .sum::<f64>()
                / mass;
            RawWidth {
                sigma: var.sqrt(),
                mean_offset: mean,
                mass,
            }
        }
        Axis::Transverse => {
            let samples = rule.on_interval(0.0, window);
            let density: Vec<f64> = samples
                .par_iter()
                .map(|&(r, _)| match kind {
                    ProfileKind::Slice => grid.amplitude(0.0, r).norm_sqr(),
                    ProfileKind::Marginal => grid.transverse_areal_density(r),
                })
                .collect();
            match kind {
                // even profile along x_1: mean zero, integrate over the half line
                ProfileKind::Slice => {
                    let mass: f64 = samples.iter().zip(&density).map(|(&(_, w), d)| w * d).sum();
                    let m2: f64 = samples.iter().zip(&density).map(|(&(r, w), d)| w * d * r * r).sum();
                    RawWidth {
                        sigma: (m2 / mass).sqrt(),
                        mean_offset: 0.0,
                        mass: 2.0 * mass,
                    }
                }
                // radial areal density: σ_⊥² = ⟨|x_⊥|²⟩ / 2
                ProfileKind::Marginal => {
                    let mass: f64 = samples.iter().zip(&density).map(|(&(r, w), d)| w * d * r).sum();
                    let m2: f64 = samples.iter().zip(&density).map(|(&(r, w), d)| w * d * r * r * r).sum();
                    RawWidth {
                        sigma: (0.5 * m2 / mass).sqrt(),
                        mean_offset: 0.0,
                        mass: 2.0 * PI * mass,
                    }
                }
            }
        }
    }
}

/// Width of the density along `axis` from the second central moment of a
/// directly computed profile.
///
/// The sampling window is ±[`PROFILE_WINDOW`] analytic widths. The node count
/// is raised above `quad.nodes_per_axis` when needed to resolve the phase.
pub fn profile_width(
    packet: &GaussianPacket,
    t: f64,
    axis: Axis,
    kind: ProfileKind,
    quad: &QuadratureSpec,
) -> Result<ProfileWidth> {
    quad.validate()?;
    let (w_par, w_perp) = analytic_widths(packet, t);
    let window = PROFILE_WINDOW
        * match axis {
            Axis::Parallel => w_par,
            Axis::Transverse => w_perp,
        };
    let load = match kind {
        ProfileKind::Slice => slice_load(axis, window),
        ProfileKind::Marginal => PhaseLoad {
            longitudinal: (axis == Axis::Parallel).then_some(window),
            transverse: (axis == Axis::Transverse).then_some(window),
        },
    };
    let n = quad
        .nodes_per_axis
        .max(required_for(packet, t, quad.halfwidth_sigmas, load));
    let base = raw_profile_width(&CylinderGrid::new(packet, t, n, quad.halfwidth_sigmas), axis, kind, window);
    let (converged, est_error) = if quad.refinement {
        let fine = raw_profile_width(
            &CylinderGrid::new(packet, t, 2 * n, quad.halfwidth_sigmas),
            axis,
            kind,
            window,
        );
        let rel = ((base.sigma - fine.sigma) / fine.sigma)
            .abs()
            .max(((base.mass - fine.mass) / fine.mass).abs());
        (rel < DENSITY_TOLERANCE, rel)
    } else {
        (true, 0.0)
    };
    Ok(ProfileWidth {
        sigma: base.sigma,
        mean_offset: base.mean_offset,
        mass: base.mass,
        nodes_per_axis: n,
        converged,
        est_error,
    })
}

/// ∫ |ψ(t, x)|² d³x on an `(x_∥, |x_⊥|)` product grid covering ±10 analytic
/// widths, with the density itself computed by direct quadrature.
pub fn density_norm(packet: &GaussianPacket, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    let (w_par, w_perp) = analytic_widths(packet, t);
    let (l_par, l_perp) = (PROFILE_WINDOW * w_par, PROFILE_WINDOW * w_perp);
    let load = PhaseLoad {
        longitudinal: Some(l_par),
        transverse: Some(l_perp),
    };
    let n = quad
        .nodes_per_axis
        .max(required_for(packet, t, quad.halfwidth_sigmas, load));
    let grid = CylinderGrid::new(packet, t, n, quad.halfwidth_sigmas);
    let rule = GaussLegendre::new(PROFILE_SAMPLES);
    let radial = rule.on_interval(0.0, l_perp);
    let bessel: Vec<Vec<f64>> = radial.iter().map(|&(r, _)| grid.bessel_column(r)).collect();
    let slabs: Vec<f64> = rule
        .on_interval(-l_par, l_par)
        .par_iter()
        .map(|&(s, ws)| {
            let d = grid.longitudinal_transform(s);
            let ring: f64 = radial
                .iter()
                .zip(&bessel)
                .map(|(&(r, wr), b)| {
                    let psi: Complex64 = d.iter().zip(b).map(|(d, b)| d * b).sum();
                    wr * 2.0 * PI * r * psi.norm_sqr() / (2.0 * PI)
                })
                .sum();
            ws * ring
        })
        .collect();
    Ok(slabs.iter().sum())
}

//! Lorentz contraction of a Gaussian packet at rest.
//!
//! Seen from a frame moving with velocity −β₀, the rest packet has momentum
//! amplitude
//!
//! ```text
//! Ψ′(p) = √(γ₀(1 − β₀·β(p))) Ψ(Λ⁻¹p),   β(p) = p/ω(p),
//! ```
//!
//! peaked at `p = mγ₀β₀`. Near the peak |Λ⁻¹p|² ≈ |p_⊥|² + |p_∥ − mγ₀β₀|²/γ₀²,
//! so the momentum width along β₀ grows by γ₀ and the position width shrinks
//! to σ_x/γ₀. The approximation is good while σ_p/(mβ₀) is small.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Triad;
use crate::kinematics::{boost_momentum, lorentz_gamma, omega_unchecked, FourMomentum, NULL_BOOST};
use crate::oracle::{QuadratureSpec, MOMENT_TOLERANCE};
use crate::packet::GaussianPacket;
use crate::quadrature::GaussLegendre;

/// Largest σ_p/(mβ₀) for which the quadratic boosted widths are trusted.
pub const NARROWNESS_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostSpec {
    beta0: Vector3<f64>,
    gamma0: f64,
}

impl BoostSpec {
    pub fn new(beta0: Vector3<f64>) -> Result<Self> {
        let gamma0 = lorentz_gamma(&beta0)?;
        Ok(BoostSpec { beta0, gamma0 })
    }

    /// Boost along `+z` with the given speed.
    pub fn along_z(speed: f64) -> Result<Self> {
        Self::new(Vector3::new(0.0, 0.0, speed))
    }

    /// Boost along `+z` with the given Lorentz factor.
    pub fn from_gamma(gamma0: f64) -> Result<Self> {
        if !(gamma0 >= 1.0 && gamma0.is_finite()) {
            return Err(Error::domain(format!("boost gamma must be at least 1, got {gamma0}")));
        }
        let speed = (1.0 - 1.0 / (gamma0 * gamma0)).sqrt();
        Ok(BoostSpec {
            beta0: Vector3::new(0.0, 0.0, speed),
            gamma0,
        })
    }

    pub fn beta0(&self) -> Vector3<f64> {
        self.beta0
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn speed(&self) -> f64 {
        self.beta0.norm()
    }

    pub fn is_identity(&self) -> bool {
        self.speed() < NULL_BOOST
    }

    pub fn triad(&self) -> Triad {
        if self.is_identity() {
            Triad::along(&Vector3::zeros())
        } else {
            Triad::along(&self.beta0)
        }
    }

    /// Momentum `mγ₀β₀` at which the boosted density peaks.
    pub fn peak_momentum(&self, mass: f64) -> Vector3<f64> {
        self.beta0 * (mass * self.gamma0)
    }

    /// σ_p/(m|β₀|); infinite for the identity boost.
    pub fn narrowness(&self, packet: &GaussianPacket) -> f64 {
        packet.sigma_p() / (packet.mass() * self.speed())
    }
}

/// Measured widths of the boosted packet at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport {
    /// σ′_∥/σ_x.
    pub sigma_par_ratio: f64,
    /// σ′_⊥/σ_x.
    pub sigma_perp_ratio: f64,
    /// 1/γ₀.
    pub predicted_ratio: f64,
    pub narrowness: f64,
    /// |1 − ∫|Ψ′|² d³p|.
    pub norm_check: f64,
    pub converged: bool,
    pub est_error: f64,
}

impl ContractionReport {
    pub fn narrowness_warning(&self) -> bool {
        self.narrowness.is_finite() && self.narrowness > NARROWNESS_LIMIT
    }
}

/// Momentum widths of the boosted packet in the quadratic approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticWidths {
    pub sigma_p_perp: f64,
    pub sigma_p_par: f64,
    pub narrowness: f64,
    /// Narrowness exceeded [`NARROWNESS_LIMIT`]; the widths are still returned.
    pub warning: bool,
}

fn require_rest(packet: &GaussianPacket) -> Result<()> {
    if packet.is_at_rest() {
        Ok(())
    } else {
        Err(Error::usage("boost operations act on a packet at rest (zero mean momentum)"))
    }
}

/// √(γ₀(1 − β₀·β)); equals 1/√γ₀ at β = β₀.
pub fn jacobian_factor(beta: &Vector3<f64>, spec: &BoostSpec) -> Result<f64> {
    lorentz_gamma(beta)?;
    Ok((spec.gamma0 * (1.0 - spec.beta0.dot(beta))).sqrt())
}

/// Ψ′(p) = √(γ₀(1 − β₀·β(p))) Ψ(Λ⁻¹p) for a packet at rest.
pub fn boosted_momentum_amplitude(
    packet: &GaussianPacket,
    spec: &BoostSpec,
    p: &Vector3<f64>,
) -> Result<f64> {
    require_rest(packet)?;
    Ok(boosted_value(packet, spec, p))
}

fn boosted_value(packet: &GaussianPacket, spec: &BoostSpec, p: &Vector3<f64>) -> f64 {
    let m = packet.mass();
    let fp = FourMomentum::new(omega_unchecked(p, m), *p);
    let inv = boost_momentum(&fp, &spec.beta0).expect("validated boost");
    let j2 = spec.gamma0 * (1.0 - spec.beta0.dot(p) / fp.energy);
    j2.sqrt() * packet.momentum_amplitude(&inv.p)
}

/// Ψ′(p) and its analytic gradient.
fn boosted_value_and_gradient(
    packet: &GaussianPacket,
    spec: &BoostSpec,
    p: &Vector3<f64>,
) -> (f64, Vector3<f64>) {
    let m = packet.mass();
    let s2 = packet.sigma_p() * packet.sigma_p();
    let g0 = spec.gamma0;
    let b0 = spec.beta0;
    let omega = omega_unchecked(p, m);
    let fp = FourMomentum::new(omega, *p);
    let inv = boost_momentum(&fp, &b0).expect("validated boost").p;

    let b0_dot_p = b0.dot(p);
    let j2 = g0 * (1.0 - b0_dot_p / omega);
    let j = j2.sqrt();
    let grad_j2 = -(b0 / omega - p * (b0_dot_p / (omega * omega * omega))) * g0;
    let grad_j = grad_j2 / (2.0 * j);

    let g = packet.momentum_amplitude(&inv);
    // (∂Λ⁻¹p/∂p)ᵀ Λ⁻¹p
    let speed = b0.norm();
    let mut pull = inv - p * (g0 * b0.dot(&inv) / omega);
    if speed >= NULL_BOOST {
        let n = b0 / speed;
        pull += n * ((g0 - 1.0) * n.dot(&inv));
    }
    let grad_g = pull * (-g / (2.0 * s2));
    (j * g, grad_j * g + grad_g * j)
}

/// Analytic gradient of Ψ′ at `p`.
pub fn boosted_amplitude_gradient(
    packet: &GaussianPacket,
    spec: &BoostSpec,
    p: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    require_rest(packet)?;
    Ok(boosted_value_and_gradient(packet, spec, p).1)
}

/// Quadratic approximation |p_⊥|² + |p_∥ − mγ₀β₀|²/γ₀² to |Λ⁻¹p|².
pub fn quadratic_momentum_square(spec: &BoostSpec, mass: f64, p: &Vector3<f64>) -> f64 {
    let local = spec.triad().components(&(p - spec.peak_momentum(mass)));
    local[0] * local[0] + local[1] * local[1] + local[2] * local[2] / (spec.gamma0 * spec.gamma0)
}

/// Transverse and parallel momentum widths `(σ_p, γ₀σ_p)` of the boosted packet.
pub fn boosted_widths_quadratic(packet: &GaussianPacket, spec: &BoostSpec) -> Result<QuadraticWidths> {
    require_rest(packet)?;
    let narrowness = spec.narrowness(packet);
    Ok(QuadraticWidths {
        sigma_p_perp: packet.sigma_p(),
        sigma_p_par: spec.gamma0 * packet.sigma_p(),
        narrowness,
        warning: !spec.is_identity() && narrowness > NARROWNESS_LIMIT,
    })
}

struct RawContraction {
    norm: f64,
    var_par: f64,
    var_perp: f64,
}

fn raw_contraction(packet: &GaussianPacket, spec: &BoostSpec, nodes: usize, halfwidth: f64) -> RawContraction {
    let s = packet.sigma_p();
    let triad = spec.triad();
    let centre = spec.peak_momentum(packet.mass());
    let rule = GaussLegendre::new(nodes);
    let perp = rule.on_interval(-halfwidth * s, halfwidth * s);
    let par = rule.on_interval(-halfwidth * spec.gamma0 * s, halfwidth * spec.gamma0 * s);

    let slabs: Vec<[f64; 3]> = par
        .par_iter()
        .map(|&(c, wc)| {
            let mut acc = [0.0; 3];
            for &(a, wa) in &perp {
                for &(b, wb) in &perp {
                    let p = centre + triad.perp1 * a + triad.perp2 * b + triad.parallel * c;
                    let (v, g) = boosted_value_and_gradient(packet, spec, &p);
                    let w = wa * wb * wc;
                    let gl = triad.components(&g);
                    acc[0] += w * v * v;
                    acc[1] += w * gl[2] * gl[2];
                    acc[2] += w * (gl[0] * gl[0] + gl[1] * gl[1]);
                }
            }
            acc
        })
        .collect();
    let [norm, par2, perp2] = slabs
        .iter()
        .fold([0.0; 3], |a, s| [a[0] + s[0], a[1] + s[1], a[2] + s[2]]);
    RawContraction {
        norm,
        var_par: par2 / norm,
        var_perp: 0.5 * perp2 / norm,
    }
}

/// ∫|Ψ′|² d³p over a box centred on the boosted peak.
pub fn boosted_norm(packet: &GaussianPacket, spec: &BoostSpec, quad: &QuadratureSpec) -> Result<f64> {
    require_rest(packet)?;
    quad.validate()?;
    let s = packet.sigma_p();
    let triad = spec.triad();
    let centre = spec.peak_momentum(packet.mass());
    let rule = GaussLegendre::new(quad.nodes_per_axis);
    let w = quad.halfwidth_sigmas;
    let perp = rule.on_interval(-w * s, w * s);
    let par = rule.on_interval(-w * spec.gamma0 * s, w * spec.gamma0 * s);
    let slabs: Vec<f64> = par
        .par_iter()
        .map(|&(c, wc)| {
            let mut acc = 0.0;
            for &(a, wa) in &perp {
                for &(b, wb) in &perp {
                    let p = centre + triad.perp1 * a + triad.perp2 * b + triad.parallel * c;
                    acc += wa * wb * wc * boosted_value(packet, spec, &p).powi(2);
                }
            }
            acc
        })
        .collect();
    Ok(slabs.iter().sum())
}

/// Position widths of the exactly boosted rest packet at t = 0.
///
/// The covariance is ∫ ∂_aΨ′ ∂_bΨ′ d³p (position acts as the momentum
/// gradient and Ψ′ is real, so the mean vanishes). No quadratic truncation
/// and no replacement of the Jacobian factor is made.
pub fn measure_contraction(
    packet: &GaussianPacket,
    spec: &BoostSpec,
    quad: &QuadratureSpec,
) -> Result<ContractionReport> {
    require_rest(packet)?;
    quad.validate()?;
    let base = raw_contraction(packet, spec, quad.nodes_per_axis, quad.halfwidth_sigmas);
    let (converged, est_error) = if quad.refinement {
        let fine = raw_contraction(packet, spec, 2 * quad.nodes_per_axis, quad.halfwidth_sigmas);
        let change = ((base.var_par - fine.var_par) / fine.var_par)
            .abs()
            .max(((base.var_perp - fine.var_perp) / fine.var_perp).abs())
            .max((base.norm - fine.norm).abs());
        (change < MOMENT_TOLERANCE, change)
    } else {
        (true, 0.0)
    };
    let sx = packet.sigma_x();
    Ok(ContractionReport {
        sigma_par_ratio: base.var_par.sqrt() / sx,
        sigma_perp_ratio: base.var_perp.sqrt() / sx,
        predicted_ratio: 1.0 / spec.gamma0,
        narrowness: spec.narrowness(packet),
        norm_check: (1.0 - base.norm).abs(),
        converged,
        est_error,
    })
}

/// Peak value of |Ψ′|² predicted by the quadratic form with the Jacobian
/// factor frozen at its peak value 1/√γ₀.
pub fn quadratic_peak_density(packet: &GaussianPacket, spec: &BoostSpec) -> f64 {
    let s2 = packet.sigma_p() * packet.sigma_p();
    (2.0 * PI * s2).powf(-1.5) / spec.gamma0
}

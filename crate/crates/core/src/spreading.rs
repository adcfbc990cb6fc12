//! Closed-form spreading of a moving Gaussian packet.
//!
//! Keeping ω(k) to second order about the mean momentum, the position
//! density stays Gaussian with widths
//!
//! ```text
//! σ_∥(t)² = σ_x² + (σ_p t / (ω γ²))²
//! σ_⊥(t)² = σ_x² + (σ_p t / ω)²
//! ```
//!
//! parallel and transverse to p̂. `σ_p/ω` is the same quantity as
//! `(σ_p/|p|) β` but stays finite for a packet at rest.
//!
//! The truncation holds only for |t| well inside T = ω/σ_p². Evaluations
//! past [`DEFAULT_WARN_FRACTION`]·T still return a value, tagged with
//! [`Validity::BeyondHorizon`].

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::packet::GaussianPacket;

/// Fraction of the validity horizon beyond which widths are flagged.
pub const DEFAULT_WARN_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    Within,
    /// `|t|/T` exceeded the warning fraction.
    BeyondHorizon { t_over_horizon: f64 },
}

impl Validity {
    pub fn is_within(&self) -> bool {
        matches!(self, Validity::Within)
    }
}

/// A width together with the validity status of the time it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Width {
    pub sigma: f64,
    pub validity: Validity,
}

/// T = ω/σ_p², the time over which the quadratic dispersion expansion holds.
pub fn validity_horizon(packet: &GaussianPacket) -> f64 {
    packet.kinematics().omega / (packet.sigma_p() * packet.sigma_p())
}

pub fn validity(packet: &GaussianPacket, t: f64, warn_fraction: f64) -> Validity {
    let ratio = t.abs() / validity_horizon(packet);
    if ratio > warn_fraction {
        Validity::BeyondHorizon { t_over_horizon: ratio }
    } else {
        Validity::Within
    }
}

/// Spreading velocity of the parallel width, σ_p/(ωγ²).
pub fn parallel_rate(packet: &GaussianPacket) -> f64 {
    let kin = packet.kinematics();
    packet.sigma_p() / (kin.omega * kin.gamma * kin.gamma)
}

/// Spreading velocity of the transverse width, σ_p/ω.
pub fn transverse_rate(packet: &GaussianPacket) -> f64 {
    packet.sigma_p() / packet.kinematics().omega
}

pub fn sigma_parallel(packet: &GaussianPacket, t: f64) -> Width {
    sigma_parallel_with(packet, t, DEFAULT_WARN_FRACTION)
}

pub fn sigma_parallel_with(packet: &GaussianPacket, t: f64, warn_fraction: f64) -> Width {
    Width {
        sigma: packet.sigma_x().hypot(parallel_rate(packet) * t),
        validity: validity(packet, t, warn_fraction),
    }
}

pub fn sigma_perp(packet: &GaussianPacket, t: f64) -> Width {
    sigma_perp_with(packet, t, DEFAULT_WARN_FRACTION)
}

pub fn sigma_perp_with(packet: &GaussianPacket, t: f64, warn_fraction: f64) -> Width {
    Width {
        sigma: packet.sigma_x().hypot(transverse_rate(packet) * t),
        validity: validity(packet, t, warn_fraction),
    }
}

/// Variance growth `(σ_∥² − σ_x², σ_⊥² − σ_x²)` at time `t`, computed
/// without the cancellation of subtracting σ_x² from a squared width.
pub fn excess_variances(packet: &GaussianPacket, t: f64) -> (f64, f64) {
    ((parallel_rate(packet) * t).powi(2), (transverse_rate(packet) * t).powi(2))
}

/// Time `T_ns` with β T_ns = σ_x/√ε, over which both widths grow by at most
/// a factor √(1 + ε).
pub fn no_spread_horizon(packet: &GaussianPacket) -> Result<f64> {
    let eps = packet.epsilon()?;
    Ok(packet.sigma_x() / (packet.kinematics().speed() * eps.sqrt()))
}

/// Time `t` at which the packet centre has moved `beta_t_over_sigma_x` initial widths.
pub fn time_for_scaled(packet: &GaussianPacket, beta_t_over_sigma_x: f64) -> Result<f64> {
    let beta = packet.kinematics().speed();
    if beta == 0.0 {
        return Err(Error::domain("scaled time beta*t/sigma_x is undefined for a packet at rest"));
    }
    Ok(beta_t_over_sigma_x * packet.sigma_x() / beta)
}

/// ∫ dz exp(−z²/σ²) exp(iξz/σ) exp(−iτz²/σ²) over the real line,
/// = (πσ²/(1+iτ))^(1/2) exp(−ξ²/4(1+iτ)) with the principal root.
pub fn gaussian_integral(sigma: f64, xi: f64, tau: f64) -> Complex64 {
    let denom = Complex64::new(1.0, tau);
    let prefactor = (Complex64::from(PI * sigma * sigma) / denom).sqrt();
    prefactor * (Complex64::from(-xi * xi / 4.0) / denom).exp()
}

/// Exponent f(x) of the position amplitude envelope at time `t`:
///
/// f = −(x_∥ − βt)² / 4σ_∥(t)² − |x_⊥|² / 4σ_⊥(t)²,
///
/// negative away from the packet centre. The density exponent is `2 f`.
pub fn envelope_exponent(packet: &GaussianPacket, t: f64, x: &Vector3<f64>) -> f64 {
    let triad = packet.triad();
    let local = triad.components(x);
    let drift = packet.kinematics().speed() * t;
    let s_par = sigma_parallel(packet, t).sigma;
    let s_perp = sigma_perp(packet, t).sigma;
    let along = local[2] - drift;
    let across2 = local[0] * local[0] + local[1] * local[1];
    -along * along / (4.0 * s_par * s_par) - across2 / (4.0 * s_perp * s_perp)
}

/// Widths sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingCurve {
    /// `t`, or `βt/σ_x` when `scaled`.
    pub times: Vec<f64>,
    /// `σ_∥`, or `σ_∥/σ_x` when `scaled`.
    pub sigma_par: Vec<f64>,
    /// `σ_⊥`, or `σ_⊥/σ_x` when `scaled`.
    pub sigma_perp: Vec<f64>,
    pub validity: Vec<Validity>,
    pub scaled: bool,
}

impl SpreadingCurve {
    pub fn analytic(packet: &GaussianPacket, times: &[f64]) -> Self {
        let (par, perp): (Vec<_>, Vec<_>) = times
            .iter()
            .map(|&t| (sigma_parallel(packet, t), sigma_perp(packet, t)))
            .unzip();
        SpreadingCurve {
            times: times.to_vec(),
            validity: par.iter().map(|w| w.validity).collect(),
            sigma_par: par.iter().map(|w| w.sigma).collect(),
            sigma_perp: perp.iter().map(|w| w.sigma).collect(),
            scaled: false,
        }
    }

    /// Analytic curve on a grid of `βt/σ_x` values, widths in units of σ_x.
    pub fn analytic_scaled(packet: &GaussianPacket, beta_t_over_sigma_x: &[f64]) -> Result<Self> {
        let times = beta_t_over_sigma_x
            .iter()
            .map(|&s| time_for_scaled(packet, s))
            .collect::<Result<Vec<_>>>()?;
        Self::analytic(packet, &times).to_scaled(packet)
    }

    /// Rescales an unscaled curve to `βt/σ_x` and `σ/σ_x`.
    pub fn to_scaled(&self, packet: &GaussianPacket) -> Result<Self> {
        if self.scaled {
            return Ok(self.clone());
        }
        let beta = packet.kinematics().speed();
        if beta == 0.0 {
            return Err(Error::domain("cannot scale time by beta for a packet at rest"));
        }
        let sx = packet.sigma_x();
        Ok(SpreadingCurve {
            times: self.times.iter().map(|t| beta * t / sx).collect(),
            sigma_par: self.sigma_par.iter().map(|s| s / sx).collect(),
            sigma_perp: self.sigma_perp.iter().map(|s| s / sx).collect(),
            validity: self.validity.clone(),
            scaled: true,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

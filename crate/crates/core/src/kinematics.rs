//! Free-particle kinematics in natural units: the dispersion relation
//! ω(k) = √(|k|² + m²), velocity β = k/ω, γ = ω/m, and pure boosts of
//! on-shell four-momenta.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Boost speeds below this are treated as the identity transformation.
pub const NULL_BOOST: f64 = 1e-14;

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("mass must be positive and finite, got {m}")))
    }
}

/// Relativistic energy of a particle of mass `m` and momentum `k`.
pub fn omega(k: &Vector3<f64>, m: f64) -> Result<f64> {
    check_mass(m)?;
    Ok(omega_unchecked(k, m))
}

#[inline]
pub(crate) fn omega_unchecked(k: &Vector3<f64>, m: f64) -> f64 {
    (k.norm_squared() + m * m).sqrt()
}

/// γ = 1/√(1 − |β|²) for a velocity strictly inside the unit ball.
pub fn lorentz_gamma(beta: &Vector3<f64>) -> Result<f64> {
    let b2 = beta.norm_squared();
    if b2.is_nan() || b2 >= 1.0 {
        return Err(Error::domain(format!(
            "velocity must satisfy |beta| < 1, got |beta| = {}",
            b2.sqrt()
        )));
    }
    Ok(1.0 / (1.0 - b2).sqrt())
}

/// Energy, velocity and Lorentz factor of an on-shell momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub omega: f64,
    pub beta: Vector3<f64>,
    pub gamma: f64,
}

impl Kinematics {
    pub fn speed(&self) -> f64 {
        self.beta.norm()
    }
}

pub fn kinematics_of(p: &Vector3<f64>, m: f64) -> Result<Kinematics> {
    let omega = omega(p, m)?;
    Ok(Kinematics {
        omega,
        beta: p / omega,
        gamma: omega / m,
    })
}

/// Truncation order of the Taylor series of ω(k) about the mean momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExpansionOrder {
    Constant,
    Linear,
    Quadratic,
}

impl TryFrom<u8> for ExpansionOrder {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            0 => Ok(ExpansionOrder::Constant),
            1 => Ok(ExpansionOrder::Linear),
            2 => Ok(ExpansionOrder::Quadratic),
            other => Err(Error::usage(format!(
                "dispersion expansion order must be 0, 1 or 2, got {other}"
            ))),
        }
    }
}

/// ω(k) expanded about `p`:
/// ω + β·δ + |δ|²/2ω − (β·δ)²/2ω with δ = k − p, truncated at `order`.
pub fn dispersion_expansion(
    k: &Vector3<f64>,
    p: &Vector3<f64>,
    m: f64,
    order: ExpansionOrder,
) -> Result<f64> {
    let kin = kinematics_of(p, m)?;
    let delta = k - p;
    let mut value = kin.omega;
    if order >= ExpansionOrder::Linear {
        value += kin.beta.dot(&delta);
    }
    if order >= ExpansionOrder::Quadratic {
        let along = kin.beta.dot(&delta);
        value += (delta.norm_squared() - along * along) / (2.0 * kin.omega);
    }
    Ok(value)
}

/// A four-momentum `(energy, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourMomentum {
    pub energy: f64,
    pub p: Vector3<f64>,
}

impl FourMomentum {
    pub fn new(energy: f64, p: Vector3<f64>) -> Self {
        FourMomentum { energy, p }
    }

    /// The on-shell four-momentum `(ω(k), k)` of a particle of mass `m`.
    pub fn on_shell(k: Vector3<f64>, m: f64) -> Result<Self> {
        Ok(FourMomentum {
            energy: omega(&k, m)?,
            p: k,
        })
    }

    /// Minkowski square `energy² − |p|²`.
    pub fn invariant_mass_squared(&self) -> f64 {
        self.energy * self.energy - self.p.norm_squared()
    }
}

/// Applies the inverse boost Λ⁻¹ for a frame moving with velocity `beta0`:
/// the momentum component along β̂₀ becomes γ₀(p_∥ − |β₀| E), the transverse
/// part is unchanged and the energy becomes γ₀(E − β₀·p).
pub fn boost_momentum(fp: &FourMomentum, beta0: &Vector3<f64>) -> Result<FourMomentum> {
    let gamma0 = lorentz_gamma(beta0)?;
    let speed = beta0.norm();
    if speed < NULL_BOOST {
        return Ok(*fp);
    }
    let n = beta0 / speed;
    let p_par = n.dot(&fp.p);
    // γ₀ − 1 written without cancellation for slow boosts.
    let gamma_minus_one = gamma0 * gamma0 * speed * speed / (gamma0 + 1.0);
    let p = fp.p + n * (gamma_minus_one * p_par) - beta0 * (gamma0 * fp.energy);
    let energy = gamma0 * (fp.energy - beta0.dot(&fp.p));
    Ok(FourMomentum { energy, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn omega_examples() {
        assert_eq!(omega(&Vector3::zeros(), 1.0).unwrap(), 1.0);
        let k = Vector3::new(1.0, 1.0, 1.0);
        assert_abs_diff_eq!(omega(&k, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(omega(&Vector3::new(0.0, 3.0, 0.0), 4.0).unwrap(), 5.0);
    }

    #[test]
    fn omega_rejects_non_positive_mass() {
        assert!(matches!(omega(&Vector3::zeros(), 0.0), Err(Error::Domain(_))));
        assert!(matches!(omega(&Vector3::zeros(), -1.0), Err(Error::Domain(_))));
        assert!(kinematics_of(&Vector3::zeros(), 0.0).is_err());
    }

    #[test]
    fn kinematics_examples() {
        let rest = kinematics_of(&Vector3::zeros(), 1.0).unwrap();
        assert_eq!((rest.omega, rest.beta, rest.gamma), (1.0, Vector3::zeros(), 1.0));

        let k = kinematics_of(&Vector3::new(0.0, 0.0, 3f64.sqrt()), 1.0).unwrap();
        assert_abs_diff_eq!(k.omega, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.beta.z, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.gamma, 2.0, epsilon = 1e-15);

        let k = kinematics_of(&Vector3::new(0.0, 0.0, 3.0), 4.0).unwrap();
        assert_eq!(k.omega, 5.0);
        assert_abs_diff_eq!(k.beta.z, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(k.gamma, 1.25, epsilon = 1e-15);
        assert_relative_eq!(k.gamma, 1.0 / (1.0 - k.speed().powi(2)).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn invalid_expansion_order() {
        assert!(matches!(ExpansionOrder::try_from(3), Err(Error::Usage(_))));
        assert_eq!(ExpansionOrder::try_from(2).unwrap(), ExpansionOrder::Quadratic);
    }

    #[test]
    fn expansion_at_zero_displacement() {
        let p = Vector3::new(0.3, -0.2, 1.1);
        for order in 0..3u8 {
            let v = dispersion_expansion(&p, &p, 0.7, order.try_into().unwrap()).unwrap();
            assert_eq!(v, omega(&p, 0.7).unwrap());
        }
    }

    #[test]
    fn expansion_hand_value_and_cubic_residual() {
        let p = Vector3::new(0.0, 0.0, 3f64.sqrt());
        let at = |d: f64| {
            let k = p + Vector3::new(0.0, 0.0, d);
            let approx = dispersion_expansion(&k, &p, 1.0, ExpansionOrder::Quadratic).unwrap();
            (approx, omega(&k, 1.0).unwrap())
        };
        let d = 0.01;
        let (approx, exact) = at(d);
        assert_abs_diff_eq!(approx, 2.0 + 3f64.sqrt() / 2.0 * d + d * d / 16.0, epsilon = 1e-15);
        let r1 = (exact - approx).abs();
        assert!(r1 <= 1e-6, "{r1}");
        let (approx2, exact2) = at(d / 2.0);
        let ratio = r1 / (exact2 - approx2).abs();
        assert!((ratio - 8.0).abs() <= 0.8, "residual ratio {ratio}");
    }

    #[test]
    fn boost_examples() {
        let fp = FourMomentum::on_shell(Vector3::new(0.1, 0.2, 0.3), 1.0).unwrap();
        assert_eq!(boost_momentum(&fp, &Vector3::zeros()).unwrap(), fp);

        let rest = FourMomentum::on_shell(Vector3::zeros(), 1.0).unwrap();
        let b = boost_momentum(&rest, &Vector3::new(0.0, 0.0, 0.6)).unwrap();
        assert_abs_diff_eq!(b.p.z, -0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(b.p.x, 0.0);
        assert_abs_diff_eq!(b.energy, 1.25, epsilon = 1e-15);
    }

    #[test]
    fn boost_transverse_unchanged() {
        let fp = FourMomentum::on_shell(Vector3::new(0.4, -0.1, 0.9), 2.0).unwrap();
        let beta0 = Vector3::new(0.0, 0.0, -0.8);
        let b = boost_momentum(&fp, &beta0).unwrap();
        assert_eq!((b.p.x, b.p.y), (fp.p.x, fp.p.y));
        let g = lorentz_gamma(&beta0).unwrap();
        assert_relative_eq!(b.p.z, g * (fp.p.z + 0.8 * fp.energy), max_relative = 1e-14);
        assert_relative_eq!(b.invariant_mass_squared(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn superluminal_boost_is_a_domain_error() {
        let fp = FourMomentum::on_shell(Vector3::zeros(), 1.0).unwrap();
        assert!(boost_momentum(&fp, &Vector3::new(0.0, 1.0, 0.0)).is_err());
        assert!(boost_momentum(&fp, &Vector3::new(0.8, 0.8, 0.0)).is_err());
    }

    #[test]
    fn tiny_boost_is_identity() {
        let fp = FourMomentum::on_shell(Vector3::new(1.0, 2.0, 3.0), 1.0).unwrap();
        assert_eq!(boost_momentum(&fp, &Vector3::new(1e-15, 0.0, 0.0)).unwrap(), fp);
    }
}

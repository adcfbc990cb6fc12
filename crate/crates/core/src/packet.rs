//! The normalized Gaussian wavepacket in momentum space,
//!
//! Ψ(k) = (2πσ_p²)^(−3/4) exp(−|k − p|² / 4σ_p²),
//!
//! and, for a packet at rest, its t = 0 position amplitude.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frame::Triad;
use crate::kinematics::{kinematics_of, Kinematics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    mass: f64,
    mean_momentum: Vector3<f64>,
    sigma_p: f64,
}

impl GaussianPacket {
    pub fn new(mass: f64, mean_momentum: Vector3<f64>, sigma_p: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        if !(sigma_p > 0.0 && sigma_p.is_finite()) {
            return Err(Error::domain(format!("sigma_p must be positive, got {sigma_p}")));
        }
        if !mean_momentum.iter().all(|c| c.is_finite()) {
            return Err(Error::domain("mean momentum must be finite"));
        }
        Ok(GaussianPacket {
            mass,
            mean_momentum,
            sigma_p,
        })
    }

    /// A packet at rest with momentum width `sigma_p`.
    pub fn at_rest(mass: f64, sigma_p: f64) -> Result<Self> {
        Self::new(mass, Vector3::zeros(), sigma_p)
    }

    /// A packet moving along `+z` with Lorentz factor `gamma` and relative
    /// momentum width `epsilon = sigma_p / |p|`.
    pub fn from_gamma_epsilon(mass: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!(
                "gamma must exceed 1 when the width is given relative to |p|, got {gamma}"
            )));
        }
        let p = mass * (gamma * gamma - 1.0).sqrt();
        Self::new(mass, Vector3::new(0.0, 0.0, p), epsilon * p)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn mean_momentum(&self) -> Vector3<f64> {
        self.mean_momentum
    }

    pub fn sigma_p(&self) -> f64 {
        self.sigma_p
    }

    /// Position width at t = 0; the packet is minimal, so σ_x σ_p = 1/2.
    pub fn sigma_x(&self) -> f64 {
        0.5 / self.sigma_p
    }

    pub fn is_at_rest(&self) -> bool {
        self.mean_momentum == Vector3::zeros()
    }

    /// ε = σ_p/|p|. Undefined for a packet at rest.
    pub fn epsilon(&self) -> Result<f64> {
        let p = self.mean_momentum.norm();
        if p == 0.0 {
            return Err(Error::domain("epsilon = sigma_p/|p| is undefined for a packet at rest"));
        }
        Ok(self.sigma_p / p)
    }

    /// Kinematics of the mean momentum.
    pub fn kinematics(&self) -> Kinematics {
        // mass was validated at construction
        kinematics_of(&self.mean_momentum, self.mass).expect("validated mass")
    }

    /// Frame with its parallel axis along p̂ (along ẑ at rest).
    pub fn triad(&self) -> Triad {
        Triad::along(&self.mean_momentum)
    }

    /// Peak value (2πσ_p²)^(−3/4) of the momentum amplitude.
    pub fn momentum_peak(&self) -> f64 {
        (2.0 * PI * self.sigma_p * self.sigma_p).powf(-0.75)
    }

    pub fn momentum_amplitude(&self, k: &Vector3<f64>) -> f64 {
        let d2 = (k - self.mean_momentum).norm_squared();
        self.momentum_peak() * (-d2 / (4.0 * self.sigma_p * self.sigma_p)).exp()
    }

    /// |ψ(0, x)| = (2πσ_x²)^(−3/4) exp(−|x|²/4σ_x²) for a packet at rest.
    ///
    /// Moving packets carry an x-dependent phase and have no closed form here;
    /// use [`crate::oracle`] for them.
    pub fn rest_position_amplitude_t0(&self, x: &Vector3<f64>) -> Result<f64> {
        if !self.is_at_rest() {
            return Err(Error::usage(
                "the closed-form position amplitude holds only for a packet at rest; \
                 use oracle::density_profile for a moving packet",
            ));
        }
        let sx = self.sigma_x();
        Ok((2.0 * PI * sx * sx).powf(-0.75) * (-x.norm_squared() / (4.0 * sx * sx)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn moving() -> GaussianPacket {
        GaussianPacket::new(1.0, Vector3::new(0.3, -0.4, 1.2), 0.05).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(GaussianPacket::new(0.0, Vector3::zeros(), 1.0).is_err());
        assert!(GaussianPacket::new(1.0, Vector3::zeros(), 0.0).is_err());
        assert!(GaussianPacket::new(1.0, Vector3::zeros(), -2.0).is_err());
        assert!(GaussianPacket::from_gamma_epsilon(1.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn gamma_epsilon_constructor() {
        let p = GaussianPacket::from_gamma_epsilon(1.0, 2.0, 0.01).unwrap();
        assert_relative_eq!(p.kinematics().gamma, 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.epsilon().unwrap(), 0.01, max_relative = 1e-15);
        assert_relative_eq!(p.mean_momentum().z, 3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn width_product_is_one_half() {
        for s in [1e-4, 0.005, 0.3, 1.0, 7.5] {
            let p = GaussianPacket::at_rest(1.0, s).unwrap();
            assert_abs_diff_eq!(p.sigma_x() * p.sigma_p(), 0.5, epsilon = 1e-16);
        }
    }

    #[test]
    fn epsilon_undefined_at_rest() {
        assert!(GaussianPacket::at_rest(1.0, 0.1).unwrap().epsilon().is_err());
    }

    #[test]
    fn momentum_amplitude_examples() {
        let p = moving();
        let peak = (2.0 * PI * 0.05f64.powi(2)).powf(-0.75);
        assert_relative_eq!(p.momentum_amplitude(&p.mean_momentum()), peak, max_relative = 1e-15);
        let off = p.mean_momentum() + Vector3::new(0.0, 2.0 * 0.05, 0.0);
        assert_relative_eq!(p.momentum_amplitude(&off), peak * 0.367_879_441_171_442_3, max_relative = 1e-14);
    }

    #[test]
    fn momentum_normalization_by_quadrature() {
        let p = moving();
        let s = p.sigma_p();
        let c = p.mean_momentum();
        let rule = GaussLegendre::new(48);
        let axes: Vec<_> = (0..3).map(|i| rule.on_interval(c[i] - 8.0 * s, c[i] + 8.0 * s)).collect();
        let mut total = 0.0;
        for &(x, wx) in &axes[0] {
            for &(y, wy) in &axes[1] {
                for &(z, wz) in &axes[2] {
                    total += wx * wy * wz * p.momentum_amplitude(&Vector3::new(x, y, z)).powi(2);
                }
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn isotropic_at_rest() {
        let p = GaussianPacket::at_rest(1.0, 0.2).unwrap();
        let a = p.momentum_amplitude(&Vector3::new(0.3, 0.0, 0.4));
        let b = p.momentum_amplitude(&Vector3::new(0.0, -0.5, 0.0));
        let c = p.momentum_amplitude(&Vector3::new(0.0, 0.3, -0.4));
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        assert_abs_diff_eq!(a, c, epsilon = 1e-15);
    }

    #[test]
    fn peak_on_sampled_grid() {
        let p = moving();
        let h = p.sigma_p() / 4.0;
        let c = p.mean_momentum();
        let mut best = (f64::MIN, Vector3::zeros());
        for i in -20..=20 {
            for j in -20..=20 {
                for l in -20..=20 {
                    // grid offset by a third of a cell so the peak is not on a node
                    let k = c + Vector3::new(i as f64 + 0.3, j as f64 - 0.3, l as f64 + 0.1) * h;
                    let v = p.momentum_amplitude(&k);
                    if v > best.0 {
                        best = (v, k);
                    }
                }
            }
        }
        assert!((best.1 - c).amax() <= h);
    }

    #[test]
    fn rest_position_amplitude() {
        let p = GaussianPacket::at_rest(1.0, 0.25).unwrap();
        let sx = p.sigma_x();
        let peak = (2.0 * PI * sx * sx).powf(-0.75);
        assert_relative_eq!(p.rest_position_amplitude_t0(&Vector3::zeros()).unwrap(), peak);
        let x = Vector3::new(2.0 * sx, 0.0, 0.0);
        assert_relative_eq!(
            p.rest_position_amplitude_t0(&x).unwrap(),
            peak * (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert!(matches!(moving().rest_position_amplitude_t0(&x), Err(Error::Usage(_))));
    }

    #[test]
    fn rest_position_second_moment() {
        let p = GaussianPacket::at_rest(1.0, 0.25).unwrap();
        let sx = p.sigma_x();
        let rule = GaussLegendre::new(48);
        let pts = rule.on_interval(-10.0 * sx, 10.0 * sx);
        let (mut m0, mut m2) = (0.0, 0.0);
        for &(x, wx) in &pts {
            for &(y, wy) in &pts {
                for &(z, wz) in &pts {
                    let d = p.rest_position_amplitude_t0(&Vector3::new(x, y, z)).unwrap().powi(2);
                    m0 += wx * wy * wz * d;
                    m2 += wx * wy * wz * d * y * y;
                }
            }
        }
        assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-10);
        assert_relative_eq!(m2, sx * sx, max_relative = 1e-10);
    }
}

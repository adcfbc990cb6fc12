//! Relativistic Gaussian wavepackets: closed-form spreading laws, Lorentz
//! contraction of a boosted packet, and the numerical quadrature oracles
//! used to check them.
//!
//! Natural units (ħ = c = 1) are used throughout. All lengths, momenta and
//! energies are expressed in units set by the particle mass.
//!
//! Module layout:
//!
//! - [`kinematics`]: dispersion relation, velocity and γ factors, boosts of
//!   four-momenta.
//! - [`packet`]: the Gaussian momentum-space packet and its rest-frame
//!   position amplitude.
//! - [`spreading`]: the closed-form width laws and the Gaussian integral
//!   identity behind them.
//! - [`oracle`]: exact position moments and direct density quadrature.
//! - [`boost`]: boosted rest packet and measured contraction.
//! - [`quadrature`]: Gauss-Legendre rules shared by the oracles.

pub mod boost;
pub mod error;
pub mod frame;
pub mod kinematics;
pub mod oracle;
pub mod packet;
pub mod quadrature;
pub mod spreading;

pub use error::{Error, Result};
pub use nalgebra::{Matrix3, Vector3};
pub use num_complex::Complex64;

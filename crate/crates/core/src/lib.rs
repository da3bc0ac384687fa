//! Special transmission eigenvalues of the radially symmetric variable-speed
//! wave equation and the radial Schrödinger equation, and recovery of the
//! wave-speed profile or potential from them.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the inversion layer
//! and the JSON formats use.

pub mod dispersion;
pub mod error;
pub mod factorization;
pub mod inversion;
pub mod profiles;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod shooting;
pub mod spectra;

mod poly;

pub use error::{Error, Result};
pub use scalar::{principal_sqrt, Real, C};

pub type Profile = profiles::Profile<f64>;
pub type Piece = profiles::Piece<f64>;
pub type LiouvilleImage = profiles::LiouvilleImage<f64>;
pub type ShootingTrace = shooting::ShootingTrace<f64>;
pub type DispersionValue = dispersion::DispersionValue<f64>;
pub type MaclaurinData = dispersion::MaclaurinData<f64>;
pub type WaveDispersion = dispersion::WaveDispersion<f64>;
pub type SchrodingerDispersion = dispersion::SchrodingerDispersion<f64>;
pub type ContourBox = spectra::ContourBox<f64>;
pub type EigenvalueRecord = spectra::EigenvalueRecord<f64>;
pub type SpectralData = factorization::SpectralData<f64>;

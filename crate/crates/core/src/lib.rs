//! Exact time-dependent solutions of the Schrödinger equation for a particle
//! confined by an infinite wall at `x = 0` and a repulsive delta barrier
//! `V0·δ(x − L)`, built by superposing stationary states with a spectral
//! function φ(E), together with the survival probability inside the well
//! and its non-exponential (asymptotically `t⁻³`) decay.
//!
//! Units: ħ = m = 1.
//!
//! ```
//! use deltawall::{observables, PotentialConfig};
//!
//! let cfg = PotentialConfig::new(3.0, 1.0)?;
//! let p0 = observables::survival_closed_form(0.0, 0.5, &cfg)?;
//! assert!((p0 - 0.5).abs() < 1e-6);
//! # Ok::<(), deltawall::Error>(())
//! ```

pub mod eigenbasis;
pub mod error;
pub mod exec;
pub mod io;
pub mod observables;
pub mod propagator;
pub mod quadrature;
pub mod spectral;
pub mod verify;

pub use eigenbasis::{EigenCoeffs, PotentialConfig};
pub use error::{Error, Result};
pub use exec::Execution;
pub use observables::{CurveSource, DecayCurve, ExpFitResult};
pub use propagator::{FieldSample, Mode, WaveField};
pub use quadrature::Tolerance;
pub use spectral::{AdmissibilityReport, SpectralFunction, SpectralKind};

pub use num_complex::Complex64;

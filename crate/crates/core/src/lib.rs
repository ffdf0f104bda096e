//! Sum-to-maximum ratio `R_n = S_n / M_n` of i.i.d. regularly varying
//! variables: the limit Laplace transform `e^{-s}/(1 + φ_α(s))`, Monte Carlo
//! estimates at finite `n`, Laplace-order checks across tail indices, and the
//! SIR statistics built on `Z_n = R_n - 1`.

pub mod curve;
pub mod distributions;
pub mod error;
pub mod inversion;
pub mod io;
pub mod mc;
pub mod ordering;
pub mod phi;
pub mod quadrature;
pub mod rng;
pub mod sir;
pub mod stats;

pub use curve::LtCurve;
pub use distributions::{DistributionSpec, Family};
pub use error::{Error, Result};
pub use inversion::CdfCurve;
pub use mc::{Functional, MomentEstimate, RatioSampleSet, SimConfig};
pub use ordering::{OrderingReport, Verdict};
pub use phi::{phi, PhiValue};
pub use rng::RngStream;
pub use sir::SirReport;

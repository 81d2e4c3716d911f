//! Numerical engine for a hybrid photon-counting / homodyne CHSH test on
//! weakly amplified two-photon N00N states.
//!
//! The crate is `no_std` (it only needs `alloc`) so it can be embedded in any
//! host; file formats, the CLI and parallel grid evaluation live in the
//! companion `hybrid-chsh` crate.
//!
//! Module map:
//! * [`fockspace`] builds squeezed number states, the amplified N00N state and
//!   the truncated squeeze operator.
//! * [`measurement`] evaluates quadrature-bin overlaps and the four
//!   correlation functions for the binned measurement protocol.
//! * [`channels`] applies photon loss (amplitude damping) to two-mode states.
//! * [`chsh`] assembles the CHSH value and runs the threshold, gain and
//!   loss-boundary searches.
//! * `oracle` (feature `oracle`) holds brute-force reference paths used by the
//!   test suites.
//!
//! Quadratures follow the `x = (a + a†)/2` convention throughout, so the
//! homodyne threshold `x0` is only meaningful in that normalization.

#![cfg_attr(not(test), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod channels;
pub mod chsh;
mod error;
pub mod fockspace;
mod linalg;
mod math;
pub mod measurement;
pub mod optimize;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod quadrature;

pub use channels::{LossParams, MeasurementKind, ProductFormDensity, TwoModeDensity};
pub use chsh::{BellEvaluator, BellResult, BoundaryCurve, GainMode, Scenario, SearchPolicy, SweepSeries};
pub use error::{Error, Result};
pub use fockspace::{FockCutoff, Gain, SingleModeCoeffs, SqueezeMatrix, TwoModePureState};
pub use linalg::Matrix;
pub use measurement::{QTable, Thresholds};

/// Largest accepted truncation deficit for a state built at a finite cutoff.
pub const MAX_NORM_DEFICIT: f64 = 1e-8;

/// Cutoff used when none is given explicitly.
pub const DEFAULT_NMAX: usize = 40;

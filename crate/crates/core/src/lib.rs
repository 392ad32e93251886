//! Physical-layer radio identity verification built on RF-DNA fingerprints.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! ```text
//! signal       synthesize bursts, Butterworth capture filter, transient
//!              detection, like-filtered AWGN
//! tfr          oversampled discrete Gabor transform, normalized surface
//! fingerprint  50 patches x (std, var, skew, kurt) + 4 global = 204 features
//! featsel      eight ranking / projection methods over two-class sets
//! svm          soft-margin RBF SVM trained by pairwise dual ascent
//! modelsel     margin PMFs and the gated model choice over the N_r sweep
//! harness      cohorts, Monte-Carlo datasets, trials, SNR sweeps, reports
//! ```
//!
//! File formats (IQ + sidecar, fingerprint store, model JSON, relevance
//! text, manifests) live in [`io`] and are safe to feed untrusted bytes.

pub mod error;
pub mod featsel;
pub mod fingerprint;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod modelsel;
pub mod seed;
pub mod signal;
pub mod svm;
pub mod tfr;

pub use error::{Error, Result};
pub use matrix::Matrix;

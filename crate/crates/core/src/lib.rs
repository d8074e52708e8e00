//! Three-qutrit Clauser-Horne-Bell inequality toolkit.
//!
//! Three observers each send one qutrit of a shared state through an
//! unbiased symmetric six-port beamsplitter and record which output port
//! fires. This crate builds that experiment end to end:
//!
//! - [`tensor`]: complex matrix kernels at dimensions 3, 9, 27.
//! - [`sixport`]: the beamsplitter unitary and its measurement projectors.
//! - [`experiment`]: states, isotropic noise, the 216 joint probabilities,
//!   and the correlation function `Q_ijk` with its closed form and inverse.
//! - [`bell`]: the inequality in probability and correlation form, the
//!   729-entry coefficient expansion that proves the classical bound 3, the
//!   exhaustive vertex scan, and relabelings of the inequality family.
//! - [`optimizer`]: seeded derivative-free search for maximal violation and
//!   the critical noise fraction.
//! - [`io`]: the settings and state file schemas used by the CLI.
//!
//! The maximally entangled state at the right phase settings drives the
//! correlation form to 5 against the local-realistic bound of 3, and the
//! violation survives isotropic noise up to a fraction of 0.4.

pub mod bell;
pub mod error;
pub mod experiment;
pub mod io;
pub mod optimizer;
pub mod sixport;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;

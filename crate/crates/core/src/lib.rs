//! Polarizing wiretap codes over degraded binary erasure wiretap channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`]: bit-packed GF(2) matrices and the suffix-rank decodability engine.
//! - [`channel`]: discrete channels and the TVD / Bhattacharyya / capacity functionals.
//! - [`transforms`]: polar, Reed-Muller, multi-kernel, ABS and random-linear transforms.
//! - [`bitchannel`]: erasure parameters of synthesized bit-channels (recursion,
//!   exhaustive enumeration, Monte-Carlo rank estimation).
//! - [`wiretap`]: set selection for wiretap codes and the leakage / error bounds.
//! - [`oracle`]: exhaustive ground truth at tiny blocklengths.
//!
//! Bit indices are 0-based throughout. The encoder maps `u` to `x = G u`
//! where `G` is the transform matrix of a [`transforms::CodeConstruction`], and
//! bits are decoded in increasing index order.

pub mod bitchannel;
pub mod channel;
mod error;
pub mod gf2;
pub mod oracle;
mod seed;
pub mod transforms;
pub mod wiretap;

pub use error::{Error, Result};
pub use seed::derive_seed;

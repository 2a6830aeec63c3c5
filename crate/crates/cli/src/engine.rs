//! Construction and evaluation of one (family, n) cell: transform, Bob's and
//! Eve's profiles, and the requested designs.

use polar_wiretap::bitchannel::{self, BitChannelProfile};
use polar_wiretap::channel::Bec;
use polar_wiretap::derive_seed;
use polar_wiretap::transforms::{self, AbsBudget, CodeConstruction, Family};
use polar_wiretap::wiretap::{
    self, ConditionalEvaluator, SecrecyOperatingPoint, Variant, WiretapDesign,
};

use crate::config::{mk_sequence, FamilySpec};
use crate::CliError;

/// Generic transforms up to this length are evaluated by full enumeration.
pub const EXHAUSTIVE_UP_TO: usize = 16;

/// Labels for seeds derived from a row seed.
const TRANSFORM: u64 = 0;
const BOB: u64 = 1;
const EVE: u64 = 2;
const CONDITIONAL: u64 = 3;

fn family_label(f: Family) -> u64 {
    match f {
        Family::Polar => 1,
        Family::Rm => 2,
        Family::Mk => 3,
        Family::Abs => 4,
        Family::Rl => 5,
    }
}

/// Seed of a (family, n) row; everything random in the row derives from it.
pub fn row_seed(base: u64, spec: &FamilySpec, n: usize) -> u64 {
    spec.seed
        .unwrap_or_else(|| derive_seed(base, &[family_label(spec.family), n as u64]))
}

fn depth(n: usize) -> Result<usize, CliError> {
    if n.is_power_of_two() && n >= 2 {
        Ok(n.trailing_zeros() as usize)
    } else {
        Err(CliError::Usage(format!(
            "blocklength {n} is not a power of two"
        )))
    }
}

pub enum Built {
    Code(Box<CodeConstruction>),
    Skipped(String),
}

pub fn build_code(
    spec: &FamilySpec,
    n: usize,
    p_b: Bec,
    p_e: Bec,
    seed: u64,
) -> Result<Built, CliError> {
    let code = match spec.family {
        Family::Polar => transforms::polar_transform(depth(n)?)?,
        Family::Rm => transforms::rm_transform(depth(n)?)?,
        Family::Abs => {
            let budget = spec.abs_budget.unwrap_or(AbsBudget {
                seed: derive_seed(seed, &[TRANSFORM]),
                ..AbsBudget::default()
            });
            transforms::abs_transform(depth(n)?, p_b, p_e, budget)?
        }
        Family::Rl => transforms::rl_transform(n, derive_seed(seed, &[TRANSFORM]))?,
        Family::Mk => {
            if spec.kernels.is_empty() {
                return Ok(Built::Skipped("skipped: no kernel file for mk".into()));
            }
            match mk_sequence(spec, n)? {
                Some(kernels) => transforms::mk_transform(&kernels)?,
                None => {
                    return Ok(Built::Skipped(format!(
                        "skipped: kernel sizes do not divide {n}"
                    )))
                }
            }
        }
    };
    Ok(Built::Code(Box::new(code)))
}

/// Exact recursion for Kronecker-structured codes, enumeration for small
/// generic codes, Monte Carlo otherwise.
pub fn profile(
    code: &CodeConstruction,
    channel: Bec,
    samples: u64,
    seed: u64,
) -> Result<BitChannelProfile, CliError> {
    if let Some(p) = bitchannel::structured_profile(code, channel) {
        return Ok(p);
    }
    if code.n() <= EXHAUSTIVE_UP_TO {
        return Ok(bitchannel::exhaustive_profile(code, channel)?);
    }
    Ok(bitchannel::mc_profile(code, channel, samples, seed)?)
}

pub fn bob_profile(
    code: &CodeConstruction,
    p_b: Bec,
    samples: u64,
    row_seed: u64,
) -> Result<BitChannelProfile, CliError> {
    profile(code, p_b, samples, derive_seed(row_seed, &[BOB]))
}

pub fn eve_profile(
    code: &CodeConstruction,
    p_e: Bec,
    samples: u64,
    row_seed: u64,
) -> Result<BitChannelProfile, CliError> {
    profile(code, p_e, samples, derive_seed(row_seed, &[EVE]))
}

pub fn conditional_evaluator(n: usize, samples: u64, row_seed: u64) -> ConditionalEvaluator {
    if n <= EXHAUSTIVE_UP_TO {
        ConditionalEvaluator::Exhaustive
    } else {
        ConditionalEvaluator::MonteCarlo {
            samples,
            seed: derive_seed(row_seed, &[CONDITIONAL]),
        }
    }
}

/// Runs one design variant. With `z > 0`, Monte-Carlo estimates are first
/// shifted by `z` standard errors toward the pessimistic side.
#[allow(clippy::too_many_arguments)]
pub fn run_design(
    variant: Variant,
    code: &CodeConstruction,
    bob: &BitChannelProfile,
    eve: &BitChannelProfile,
    op: &SecrecyOperatingPoint,
    samples: u64,
    row_seed: u64,
    z: f64,
) -> Result<WiretapDesign, CliError> {
    let bob = bob.pessimistic_for_reliability(z);
    let eve = eve.pessimistic_for_secrecy(z);
    let design = match variant {
        Variant::Bound2 => wiretap::design_bound2(&bob, &eve, op)?,
        Variant::Bound1 => {
            let evaluator = conditional_evaluator(op.n, samples, row_seed);
            wiretap::design_bound1(code, &bob, &eve, op, evaluator)?
        }
        Variant::Asymptotic => {
            return Err(CliError::Usage(
                "the asymptotic rule is not available as a finite-n design bound".into(),
            ))
        }
    };
    Ok(design)
}

//! Single-point design report.

use polar_wiretap::bitchannel::{BitChannelProfile, Method};
use polar_wiretap::channel::Bec;
use polar_wiretap::transforms::{Family, Provenance};
use polar_wiretap::wiretap::{self, SecondOrderBounds, SecrecyOperatingPoint, WiretapDesign};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::engine::{self, Built};
use crate::{CliError, ToolInfo, SCHEMA_VERSION};

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSummary {
    pub method: Method,
    pub erasure_prob: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub min_erasure: f64,
    pub max_erasure: f64,
    /// Sum of bit-channel capacities; equals `n (1 - p)` for an exact profile.
    pub capacity_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_std_err: Option<f64>,
}

impl ProfileSummary {
    pub fn of(p: &BitChannelProfile) -> Self {
        let e = p.erasure();
        Self {
            method: p.method(),
            erasure_prob: p.channel().erasure_prob(),
            samples: p.samples(),
            seed: p.seed(),
            min_erasure: e.iter().copied().fold(f64::INFINITY, f64::min),
            max_erasure: e.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            capacity_sum: p.capacity_sum(),
            max_std_err: p.std_err().map(|s| s.iter().copied().fold(0.0, f64::max)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondOrderReport {
    #[serde(flatten)]
    pub bounds: SecondOrderBounds,
    pub note: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub operating_point: SecrecyOperatingPoint,
    pub family: Family,
    pub row_seed: u64,
    pub conservative_z: f64,
    pub provenance: Provenance,
    pub bob: ProfileSummary,
    pub eve: ProfileSummary,
    pub second_order: SecondOrderReport,
    pub designs: Vec<WiretapDesign>,
}

impl DesignReport {
    /// True when every requested design places at least one message bit.
    pub fn feasible(&self) -> bool {
        self.designs.iter().all(|d| d.feasible)
    }
}

pub fn run_design(cfg: &ExperimentConfig) -> Result<DesignReport, CliError> {
    cfg.validate()?;
    let single = |what: &str, len: usize| {
        if len == 1 {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "design needs exactly one {what}, got {len}"
            )))
        }
    };
    single("family", cfg.families.len())?;
    single("blocklength", cfg.blocklengths.len())?;
    single("value of p_e", cfg.p_e.len())?;
    let spec = &cfg.families[0];
    let n = cfg.blocklengths[0];
    let op = SecrecyOperatingPoint::new(cfg.p_b, cfg.p_e[0], n, cfg.eps, cfg.delta)?;
    let (p_b, p_e) = (Bec::new(op.p_b)?, Bec::new(op.p_e)?);
    let seed = engine::row_seed(cfg.seed, spec, n);
    let code = match engine::build_code(spec, n, p_b, p_e, seed)? {
        Built::Code(c) => *c,
        Built::Skipped(msg) => return Err(CliError::Usage(msg)),
    };
    let bob = engine::bob_profile(&code, p_b, cfg.samples, seed)?;
    let eve = engine::eve_profile(&code, p_e, cfg.samples, seed)?;
    let designs = cfg
        .bounds
        .iter()
        .map(|&v| {
            engine::run_design(
                v,
                &code,
                &bob,
                &eve,
                &op,
                cfg.samples,
                seed,
                cfg.conservative_z,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DesignReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        operating_point: op,
        family: spec.family,
        row_seed: seed,
        conservative_z: cfg.conservative_z,
        provenance: code.provenance().clone(),
        bob: ProfileSummary::of(&bob),
        eve: ProfileSummary::of(&eve),
        second_order: SecondOrderReport {
            bounds: wiretap::second_order_bounds(&op)?,
            note: "normal approximation; O(log n / n) terms dropped",
        },
        designs,
    })
}

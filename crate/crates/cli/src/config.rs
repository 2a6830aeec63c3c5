//! Experiment configuration: a JSON file whose keys can all be overridden
//! from the command line.

use std::path::{Path, PathBuf};

use polar_wiretap::transforms::{AbsBudget, Family, Kernel};
use polar_wiretap::wiretap::Variant;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One code family with its construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "FamilyEntry")]
pub struct FamilySpec {
    pub family: Family,
    /// Overrides the row seed derived from the base seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// MK only: kernel files in Kronecker order (outermost first). The
    /// sequence is padded with G2 kernels up to the requested blocklength.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernels: Vec<PathBuf>,
    /// ABS only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_budget: Option<AbsBudget>,
}

impl FamilySpec {
    pub fn plain(family: Family) -> Self {
        Self {
            family,
            seed: None,
            kernels: Vec::new(),
            abs_budget: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilyEntry {
    Name(Family),
    Full {
        family: Family,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        kernels: Vec<PathBuf>,
        #[serde(default)]
        abs_budget: Option<AbsBudget>,
    },
}

impl From<FamilyEntry> for FamilySpec {
    fn from(e: FamilyEntry) -> Self {
        match e {
            FamilyEntry::Name(family) => FamilySpec::plain(family),
            FamilyEntry::Full {
                family,
                seed,
                kernels,
                abs_budget,
            } => FamilySpec {
                family,
                seed,
                kernels,
                abs_budget,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p_b: f64,
    /// One sweep scenario per value.
    pub p_e: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
    pub blocklengths: Vec<usize>,
    pub families: Vec<FamilySpec>,
    pub bounds: Vec<Variant>,
    pub samples: u64,
    pub seed: u64,
    /// Standard errors added to Monte-Carlo estimates before thresholding
    /// (0 uses the point estimates).
    pub conservative_z: f64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p_b: 0.05,
            p_e: vec![0.3, 0.4],
            eps: 0.001,
            delta: 0.01,
            blocklengths: vec![128, 256, 512, 1024],
            families: [
                Family::Polar,
                Family::Rm,
                Family::Mk,
                Family::Abs,
                Family::Rl,
            ]
            .into_iter()
            .map(FamilySpec::plain)
            .collect(),
            bounds: vec![Variant::Bound1, Variant::Bound2],
            samples: polar_wiretap::bitchannel::DEFAULT_SAMPLES,
            seed: 1,
            conservative_z: 0.0,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Relative kernel paths are resolved against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        for f in &mut self.families {
            for k in &mut f.kernels {
                if k.is_relative() {
                    *k = base.join(&*k);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.families.is_empty() {
            return Err(CliError::Usage("no code family selected".into()));
        }
        if self.blocklengths.is_empty() {
            return Err(CliError::Usage("no blocklength selected".into()));
        }
        if self.p_e.is_empty() {
            return Err(CliError::Usage("no value of p_e given".into()));
        }
        if self.bounds.is_empty() {
            return Err(CliError::Usage("no bound variant selected".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Usage("samples must be positive".into()));
        }
        if self.conservative_z.is_nan() || self.conservative_z < 0.0 {
            return Err(CliError::Usage(
                "conservative_z must be non-negative".into(),
            ));
        }
        for &p_e in &self.p_e {
            polar_wiretap::wiretap::SecrecyOperatingPoint::new(
                self.p_b, p_e, 1, self.eps, self.delta,
            )?;
        }
        Ok(())
    }
}

/// Kernel sequence for an MK row of length `n`: the configured kernels,
/// followed by G2 kernels until the product reaches `n`. `None` when `n`
/// cannot be reached that way.
pub fn mk_sequence(spec: &FamilySpec, n: usize) -> Result<Option<Vec<Kernel>>, CliError> {
    let mut kernels = Vec::new();
    for path in &spec.kernels {
        kernels.push(Kernel::load(path)?);
    }
    let mut size: usize = kernels.iter().map(Kernel::size).product();
    if size == 0 || !n.is_multiple_of(size) {
        return Ok(None);
    }
    while size < n {
        if !(n / size).is_multiple_of(2) {
            return Ok(None);
        }
        kernels.push(Kernel::g2());
        size *= 2;
    }
    Ok(Some(kernels))
}

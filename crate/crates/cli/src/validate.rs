//! Oracle validation suite: random partitions at a tiny blocklength checked
//! against exact leakage and block-error enumeration.

use polar_wiretap::channel::Bec;
use polar_wiretap::oracle::{self, LeakageReport, LEAKAGE_MAX_N};
use polar_wiretap::transforms::{self, CodeConstruction, Family};
use polar_wiretap::wiretap::WiretapDesign;
use polar_wiretap::{derive_seed, Error};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{CliError, ToolInfo, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub n: usize,
    pub configs: usize,
    pub p_b: f64,
    /// Configuration `c` uses `p_e[c % len]`.
    pub p_e: Vec<f64>,
    /// `polar` (default) or `rl`.
    pub family: Family,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n: 8,
            configs: 50,
            p_b: 0.05,
            p_e: vec![0.3, 0.5, 0.8],
            family: Family::Polar,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCase {
    pub index: usize,
    #[serde(flatten)]
    pub report: LeakageReport,
    /// Exact leakage of the same design over the whole `p_e` grid, ascending `p_e`.
    pub leakage_over_pe: Vec<(f64, f64)>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub failures: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: OracleConfig,
    pub cases: Vec<OracleCase>,
    pub invariants: Vec<InvariantResult>,
    pub flagged: usize,
    pub pass: bool,
}

pub const INVARIANTS: [&str; 9] = [
    "exact_leakage <= bound1_natural",
    "bound1_natural <= bound2",
    "exact_leakage <= bound1_permuted",
    "exact_pe <= pe_bound",
    "exact_pe_msg <= exact_pe",
    "pe_bound_msg <= pe_bound",
    "leakage within [0, 1]",
    "exact_pe within [0, 1]",
    "leakage non-increasing in p_e",
];

/// Uniformly random partition of `0..n` into `(A, R, B)`.
pub fn random_partition(n: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let k = rng.gen_range(0..=n);
    let r = rng.gen_range(0..=n - k);
    let mut a = idx[..k].to_vec();
    let mut rr = idx[k..k + r].to_vec();
    let mut b = idx[k + r..].to_vec();
    a.sort_unstable();
    rr.sort_unstable();
    b.sort_unstable();
    (a, rr, b)
}

fn code_for(family: Family, n: usize, seed: u64) -> Result<CodeConstruction, CliError> {
    Ok(match family {
        Family::Polar if n.is_power_of_two() => {
            transforms::polar_transform(n.trailing_zeros() as usize)?
        }
        Family::Rl => transforms::rl_transform(n, seed)?,
        other => {
            return Err(CliError::Usage(format!(
                "oracle suite supports polar (power-of-two n) and rl, not {other} at n = {n}"
            )))
        }
    })
}

pub fn run_oracle(cfg: &OracleConfig) -> Result<OracleReport, CliError> {
    if cfg.n > LEAKAGE_MAX_N {
        return Err(CliError::Core(Error::TooLarge {
            n: cfg.n,
            limit: LEAKAGE_MAX_N,
        }));
    }
    if cfg.n == 0 {
        return Err(CliError::Usage("blocklength must be positive".into()));
    }
    if cfg.configs > 0 && cfg.p_e.is_empty() {
        return Err(CliError::Usage("no value of p_e given".into()));
    }
    let p_b = Bec::new(cfg.p_b)?;
    let mut grid: Vec<f64> = cfg.p_e.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut cases = Vec::with_capacity(cfg.configs);
    for c in 0..cfg.configs {
        let case_seed = derive_seed(cfg.seed, &[c as u64]);
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
        let code = code_for(cfg.family, cfg.n, derive_seed(case_seed, &[1]))?;
        let (a, r, b) = random_partition(cfg.n, &mut rng);
        let design = WiretapDesign::from_partition(cfg.n, &a, &r, &b)?;
        let p_e = Bec::new(cfg.p_e[c % cfg.p_e.len()])?;
        let report = oracle::leakage_report(&code, &design, p_b, p_e)?;
        let mut violations: Vec<String> =
            report.violations().into_iter().map(String::from).collect();
        let mut leakage_over_pe = Vec::with_capacity(grid.len());
        for &p in &grid {
            leakage_over_pe.push((p, oracle::exact_leakage(&code, &design, Bec::new(p)?)?));
        }
        if leakage_over_pe
            .windows(2)
            .any(|w| w[1].1 > w[0].1 + oracle::CHAIN_TOLERANCE)
        {
            violations.push(INVARIANTS[8].to_string());
        }
        cases.push(OracleCase {
            index: c,
            report,
            leakage_over_pe,
            violations,
        });
    }
    let invariants: Vec<InvariantResult> = INVARIANTS
        .iter()
        .map(|&name| {
            let failures = cases
                .iter()
                .filter(|c| c.violations.iter().any(|v| v == name))
                .count();
            InvariantResult {
                name: name.to_string(),
                failures,
                pass: failures == 0,
            }
        })
        .collect();
    let flagged = cases.iter().filter(|c| !c.violations.is_empty()).count();
    Ok(OracleReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        config: cfg.clone(),
        cases,
        pass: flagged == 0,
        invariants,
        flagged,
    })
}

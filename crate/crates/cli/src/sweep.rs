//! Secrecy-rate sweeps over blocklengths and code families, one table per
//! (p_b, p_e) scenario.

use std::io::Write;
use std::path::{Path, PathBuf};

use polar_wiretap::bitchannel::BitChannelProfile;
use polar_wiretap::channel::Bec;
use polar_wiretap::transforms::{CodeConstruction, Family};
use polar_wiretap::wiretap::{self, SecrecyOperatingPoint, Variant};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::engine::{self, Built};
use crate::CliError;

/// Slack for the post-hoc converse check `R_s <= upper2nd`.
pub const CONVERSE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p_b: f64,
    pub p_e: f64,
    pub n: usize,
    pub family: Family,
    pub variant: Variant,
    pub k_b: Option<usize>,
    pub k_e: Option<usize>,
    #[serde(rename = "R_s")]
    pub r_s: Option<f64>,
    pub pe_bound: Option<f64>,
    pub leakage_bound: Option<f64>,
    pub cs: f64,
    pub upper2nd: f64,
    pub lower2nd: f64,
    pub samples: u64,
    pub seed: u64,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub p_b: f64,
    pub p_e: f64,
    pub rows: Vec<SweepRow>,
}

impl Scenario {
    pub fn file_name(&self) -> String {
        format!("sweep_pb{}_pe{}.csv", self.p_b, self.p_e)
    }

    pub fn rows_for(&self, family: Family, variant: Variant) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.family == family && r.variant == variant)
    }

    pub fn rate(&self, n: usize, family: Family, variant: Variant) -> Option<f64> {
        self.rows_for(family, variant)
            .find(|r| r.n == n)
            .and_then(|r| r.r_s)
    }
}

struct Cell {
    code: CodeConstruction,
    bob: BitChannelProfile,
}

/// Runs the sweep. Rows come out ordered by (n, configured family order,
/// configured variant order) in every scenario.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<Scenario>, CliError> {
    cfg.validate()?;
    let p_b = Bec::new(cfg.p_b)?;
    let mut scenarios: Vec<Scenario> = cfg
        .p_e
        .iter()
        .map(|&p_e| Scenario {
            p_b: cfg.p_b,
            p_e,
            rows: Vec::new(),
        })
        .collect();
    for &n in &cfg.blocklengths {
        for spec in &cfg.families {
            let seed = engine::row_seed(cfg.seed, spec, n);
            // Bob's side does not depend on p_e except for ABS
            let mut shared: Option<Cell> = None;
            for sc in scenarios.iter_mut() {
                let pe_value = sc.p_e;
                let op = SecrecyOperatingPoint::new(cfg.p_b, pe_value, n, cfg.eps, cfg.delta)?;
                let second = wiretap::second_order_bounds(&op)?;
                let row = |variant, status: String| SweepRow {
                    p_b: cfg.p_b,
                    p_e: pe_value,
                    n,
                    family: spec.family,
                    variant,
                    k_b: None,
                    k_e: None,
                    r_s: None,
                    pe_bound: None,
                    leakage_bound: None,
                    cs: second.capacity,
                    upper2nd: second.upper,
                    lower2nd: second.lower,
                    samples: cfg.samples,
                    seed,
                    status,
                };
                let p_e = Bec::new(pe_value)?;
                let cell = match shared {
                    Some(ref c) if spec.family != Family::Abs => Ok(c),
                    _ => {
                        build_cell(spec, n, p_b, p_e, cfg.samples, seed).map(|c| &*shared.insert(c))
                    }
                };
                let cell = match cell {
                    Ok(c) => c,
                    Err(e) => {
                        for &v in &cfg.bounds {
                            sc.rows.push(row(v, status_of(&e)));
                        }
                        continue;
                    }
                };
                let eve = match engine::eve_profile(&cell.code, p_e, cfg.samples, seed) {
                    Ok(e) => e,
                    Err(e) => {
                        for &v in &cfg.bounds {
                            sc.rows.push(row(v, status_of(&e)));
                        }
                        continue;
                    }
                };
                for &variant in &cfg.bounds {
                    let result = engine::run_design(
                        variant,
                        &cell.code,
                        &cell.bob,
                        &eve,
                        &op,
                        cfg.samples,
                        seed,
                        cfg.conservative_z,
                    );
                    let r = match result {
                        Ok(d) => {
                            let mut status =
                                if d.feasible { "ok" } else { "infeasible" }.to_string();
                            if d.secrecy_rate > second.upper + CONVERSE_SLACK {
                                status.push_str("; above upper2nd");
                            }
                            SweepRow {
                                k_b: Some(d.k_b),
                                k_e: Some(d.k_e),
                                r_s: Some(d.secrecy_rate),
                                pe_bound: Some(d.pe_bound),
                                leakage_bound: Some(d.leakage_bound),
                                ..row(variant, status)
                            }
                        }
                        Err(e) => row(variant, status_of(&e)),
                    };
                    sc.rows.push(r);
                }
            }
        }
    }
    Ok(scenarios)
}

fn build_cell(
    spec: &crate::config::FamilySpec,
    n: usize,
    p_b: Bec,
    p_e: Bec,
    samples: u64,
    seed: u64,
) -> Result<Cell, CliError> {
    match engine::build_code(spec, n, p_b, p_e, seed)? {
        Built::Code(code) => {
            let bob = engine::bob_profile(&code, p_b, samples, seed)?;
            Ok(Cell { code: *code, bob })
        }
        Built::Skipped(msg) => Err(CliError::Skipped(msg)),
    }
}

fn status_of(e: &CliError) -> String {
    match e {
        CliError::Skipped(msg) => msg.clone(),
        other => format!("error: {other}"),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Writes one CSV per scenario into `dir` and returns the paths.
pub fn write_scenarios(scenarios: &[Scenario], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for sc in scenarios {
        let path = dir.join(sc.file_name());
        let file = std::fs::File::create(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_csv(&sc.rows, std::io::BufWriter::new(file))?;
        paths.push(path);
    }
    Ok(paths)
}

//! Erasure polynomials of a kernel.

use std::path::Path;

use polar_wiretap::transforms::Kernel;
use serde::Serialize;

use crate::{CliError, ToolInfo, SCHEMA_VERSION};

/// Points `0, 0.1, ..., 1` at which each polynomial is sampled.
pub const Q_GRID_POINTS: usize = 11;

#[derive(Clone, Debug, Serialize)]
pub struct BitPolynomial {
    pub index: usize,
    /// Coefficients of `q^0, q^1, ..., q^l`.
    pub coefficients: Vec<i64>,
    /// Pairs `(q, f(q))`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub size: usize,
    pub rows: Vec<String>,
    pub polynomials: Vec<BitPolynomial>,
}

pub fn analyze(kernel: &Kernel) -> KernelReport {
    let l = kernel.size();
    let polynomials = (0..l)
        .map(|i| BitPolynomial {
            index: i,
            coefficients: kernel.polynomial(i),
            samples: (0..Q_GRID_POINTS)
                .map(|t| {
                    let q = t as f64 / (Q_GRID_POINTS - 1) as f64;
                    (q, kernel.erasure_prob(i, q))
                })
                .collect(),
        })
        .collect();
    KernelReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        size: l,
        rows: kernel.to_text().lines().skip(1).map(String::from).collect(),
        polynomials,
    }
}

pub fn analyze_file(path: &Path) -> Result<KernelReport, CliError> {
    Ok(analyze(&Kernel::load(path)?))
}

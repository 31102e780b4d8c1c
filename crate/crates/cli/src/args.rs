//! Command-line options and the JSON config file they override.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::Deserialize;

use cirminus::SwapType;

/// Options shared by every subcommand. Each field can also come from the
/// `--config` JSON file (same names, snake case); flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    /// JSON file with defaults for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Zero curve (CSV `maturity_years,zero_rate,discount` or JSON).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Swaption surface (CSV `maturity_years,tenor_years,strike,normal_vol_bps,price` or JSON).
    #[arg(long)]
    pub surface: Option<PathBuf>,
    /// Bermudan grid (CSV `maturity_years,tenor_years,strike`).
    #[arg(long)]
    pub strikes: Option<PathBuf>,
    /// CMS requests (CSV `effective_years,tenor_years,index_years`).
    #[arg(long)]
    pub requests: Option<PathBuf>,
    /// Reference prices or rates to compare against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Model parameters: a calibration result JSON, a JSON array, or eight
    /// comma-separated numbers. Calibrates inline when absent.
    #[arg(long)]
    pub params: Option<String>,
    /// Gram-Charlier truncation orders.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    /// Monte Carlo paths.
    #[arg(long)]
    pub paths: Option<usize>,
    /// Simulation steps per year.
    #[arg(long)]
    pub mesh: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// payer or receiver.
    #[arg(long)]
    pub swap_type: Option<SwapType>,
    /// Calibrate to the column with this tenor.
    #[arg(long, conflicts_with = "diagonal")]
    pub tenor: Option<f64>,
    /// Calibrate to the diagonal ending at this date.
    #[arg(long)]
    pub diagonal: Option<f64>,
    #[arg(long)]
    pub min_maturity: Option<f64>,
    #[arg(long)]
    pub max_maturity: Option<f64>,
    #[arg(long)]
    pub drop_last_maturity: bool,
    /// Start point: i1, i2 or eight comma-separated numbers. Repeatable.
    #[arg(long)]
    pub start: Option<Vec<String>>,
    /// Extra perturbed starts around the first one.
    #[arg(long)]
    pub random_starts: Option<usize>,
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    /// Regress on every path rather than in-the-money paths only.
    #[arg(long)]
    pub regress_all: bool,
    /// Polynomial degree of the LSMC basis.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Add a Monte Carlo column to `price`.
    #[arg(long)]
    pub mc: bool,
    /// Simulation horizon in years for `simulate`.
    #[arg(long)]
    pub horizon: Option<f64>,
}

macro_rules! prefer {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        RunArgs {
            config: $flags.config,
            regress_all: $flags.regress_all || $file.regress_all,
            drop_last_maturity: $flags.drop_last_maturity || $file.drop_last_maturity,
            mc: $flags.mc || $file.mc,
            $($field: $flags.$field.or($file.$field),)*
        }
    };
}

impl RunArgs {
    /// Merges the config file (if any) under the flags. Relative paths in the
    /// file are taken relative to the file itself.
    pub fn resolve(self) -> anyhow::Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let mut file: RunArgs =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut file.curve,
            &mut file.surface,
            &mut file.strikes,
            &mut file.requests,
            &mut file.reference,
            &mut file.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        let flags = self;
        Ok(
            prefer!(flags, file; curve, surface, strikes, requests, reference, params, orders, paths,
            mesh, seed, threads, out, swap_type, tenor, diagonal, min_maturity, max_maturity, start,
            random_starts, max_evaluations, degree, horizon),
        )
    }

    pub fn require<'a, T>(value: &'a Option<T>, flag: &str) -> anyhow::Result<&'a T> {
        value.as_ref().ok_or_else(|| anyhow::anyhow!("--{flag} is required"))
    }
}

//! Command-line and file configuration.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "conewave", version, about = "Wave kernels, diffraction and trace singularities on Euclidean cones")]
pub struct Cli {
    /// JSON file supplying defaults for the flags below and the subcommand's parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed of the randomized verification suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Mollifier width.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Spectral cutoff of trace runs.
    #[arg(long = "lambda-max", global = true)]
    pub lambda_max: Option<f64>,
    /// Tolerance override KEY=VAL (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep a sine or half-wave kernel in t (CSV).
    Kernel(KernelArgs),
    /// Tabulate the scattering matrix and its Fourier oracle (CSV).
    Scatter(ScatterArgs),
    /// Two-diffraction composition check (JSON input and output).
    Compose(ComposeArgs),
    /// Mollified pillowcase trace (CSV) with detected peaks (JSON).
    Trace(TraceArgs),
    /// Predicted two-diffraction trace singularity (JSON).
    Predict(PredictArgs),
    /// Run the acceptance suite and print a PASS/FAIL table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// Closed form on C_4pi (mollified when h > 0).
    Closed,
    /// Planar kernel (alpha = 2pi).
    Plane,
    /// Bessel mode series (h > 0).
    Cheeger,
    /// Friedlander tabulation.
    Friedlander,
    /// Moving conical point on C_4pi (h = 0).
    MovingPoint,
    /// Half-wave kernel on C_4pi from the moving-vertex integral (h > 0).
    Halfwave,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Closed => "closed",
            Representation::Plane => "plane",
            Representation::Cheeger => "cheeger",
            Representation::Friedlander => "friedlander",
            Representation::MovingPoint => "moving-point",
            Representation::Halfwave => "halfwave",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelArgs {
    /// Cone angle
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Radius of the first point
    #[arg(long)]
    pub r1: Option<f64>,
    /// Angle of the first point
    #[arg(long)]
    pub theta1: Option<f64>,
    /// Radius of the second point
    #[arg(long)]
    pub r2: Option<f64>,
    /// Angle of the second point
    #[arg(long)]
    pub theta2: Option<f64>,
    /// Times as START:STEP:END.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long, value_enum)]
    pub representation: Option<Representation>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterArgs {
    /// Cone angle
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Angle differences as START:STEP:END.
    #[arg(long)]
    pub thetas: Option<String>,
    /// Fourier truncation N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cesaro order of the Fourier mean (0 for plain partial sums).
    #[arg(long = "cesaro-order")]
    pub cesaro_order: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComposeArgs {
    /// JSON file with the composition point (overrides the `compose` section of --config).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Amplitudes of the oracle: leading or unit.
    #[arg(long)]
    pub amplitude: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceArgs {
    /// First side of the rectangle (default 1)
    #[arg(long = "a-rect")]
    pub a_rect: Option<f64>,
    /// Second side of the rectangle (default 1)
    #[arg(long = "b-rect")]
    pub b_rect: Option<f64>,
    /// Times as START:STEP:END (default 0.5:h/4:6).
    #[arg(long)]
    pub t: Option<String>,
    /// Output file of the peak JSON.
    #[arg(long)]
    pub peaks: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictArgs {
    /// Orbit length.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Leg between the two diffractions.
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Run only these criteria (repeatable, e.g. --only AT-4).
    #[arg(long)]
    pub only: Vec<String>,
}

/// Contents of a --config file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub h: Option<f64>,
    pub lambda_max: Option<f64>,
    pub tol: BTreeMap<String, f64>,
    pub kernel: KernelArgs,
    pub scatter: ScatterArgs,
    pub compose: Option<serde_json::Value>,
    pub trace: TraceArgs,
    pub predict: PredictArgs,
    pub verify: VerifyArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Global settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub h: Option<f64>,
    pub lambda_max: Option<f64>,
    pub tol: BTreeMap<String, f64>,
}

impl Settings {
    pub fn merge(cli: &Cli, file: &FileConfig) -> Self {
        let mut tol = file.tol.clone();
        tol.extend(cli.tol.iter().cloned());
        Settings {
            out: cli.out.clone(),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            h: cli.h.or(file.h),
            lambda_max: cli.lambda_max.or(file.lambda_max),
            tol,
        }
    }

    /// Tolerance `key` or its default; rejects keys outside `allowed`.
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tol.get(key).copied().unwrap_or(default)
    }

    pub fn check_tol_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.tol.keys() {
            if !allowed.contains(&k.as_str()) {
                bail!("unknown tolerance key `{k}` (expected one of: {})", allowed.join(", "));
            }
        }
        Ok(())
    }
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VAL, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Parses START:STEP:END into an inclusive grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, step, b] = parts[..] else { bail!("expected START:STEP:END, got `{s}`") };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| anyhow!("bad number `{x}` in `{s}`: {e}"));
    let (a, step, b) = (num(a)?, num(step)?, num(b)?);
    if !(step > 0.0 && b >= a && a.is_finite() && b.is_finite()) {
        bail!("range `{s}` needs a positive step and END >= START");
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| a + k as f64 * step).collect())
}

/// First present value, or an error naming the missing parameter.
pub fn need<T: Clone>(name: &str, cli: &Option<T>, file: &Option<T>) -> Result<T> {
    cli.clone().or_else(|| file.clone()).ok_or_else(|| anyhow!("missing parameter --{name}"))
}

//! Subcommand implementations.

use crate::config::*;
use crate::output::{fmt_f64, Sink};
use anyhow::{anyhow, bail, Context, Result};
use conewave::cone_geometry::{ConeAngle, ConeChain, ConePoint, PlanarPoint};
use conewave::cone_wave_kernel::*;
use conewave::diffraction::{scattering_matrix, scattering_matrix_fourier, FourierSummation, DEFAULT_CESARO_ORDER};
use conewave::special_functions::Mollifier;
use conewave::two_diffraction::*;
use conewave::verification::{all_passed, run_acceptance, run_selected, CriterionReport};
use conewave::wave_trace::*;
use conewave::{Complex64, Error};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Success,
    VerificationFailed,
}

pub fn kernel(args: &KernelArgs, file: &KernelArgs, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&[])?;
    let rep = args.representation.or(file.representation).unwrap_or(Representation::Closed);
    let alpha_default = match rep {
        Representation::Plane => Some(2.0 * std::f64::consts::PI),
        _ => Some(4.0 * std::f64::consts::PI),
    };
    let alpha = ConeAngle::new(args.alpha.or(file.alpha).or(alpha_default).unwrap())?;
    let r1 = need("r1", &args.r1, &file.r1)?;
    let r2 = need("r2", &args.r2, &file.r2)?;
    let th1 = need("theta1", &args.theta1, &file.theta1)?;
    let th2 = need("theta2", &args.theta2, &file.theta2)?;
    let ts = parse_range(&need("t", &args.t, &file.t)?)?;
    let default_h = match rep {
        Representation::Cheeger | Representation::Halfwave => 0.05,
        _ => 0.0,
    };
    let h = s.h.unwrap_or(default_h);
    let q1 = ConePoint::new(alpha, r1, th1)?;
    let q2 = ConePoint::new(alpha, r2, th2)?;
    let four_pi_only = matches!(rep, Representation::Closed | Representation::MovingPoint | Representation::Halfwave);
    if four_pi_only && (alpha.value() - 4.0 * std::f64::consts::PI).abs() > 1e-12 {
        bail!("representation {} is available on C_4pi only", rep.name());
    }
    if rep == Representation::Plane && (alpha.value() - 2.0 * std::f64::consts::PI).abs() > 1e-12 {
        bail!("representation plane requires alpha = 2pi");
    }
    let values: Vec<Complex64> = match rep {
        Representation::Cheeger => {
            if h <= 0.0 {
                bail!("the Bessel series needs h > 0");
            }
            sine_kernel_cheeger_sweep(alpha, r1, r2, th1 - th2, &ts, h, None)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect()
        }
        Representation::Friedlander => {
            let fg = build_friedlander(alpha, FriedlanderSpec::default())?;
            eval_each(&ts, |q| sine_kernel_friedlander(&fg, q).map(|v| v.value), q1, q2, h)?
        }
        Representation::Closed => eval_each(&ts, |q| sine_kernel_4pi_closed_mollified(q).map(|v| v.value), q1, q2, h)?,
        Representation::Plane => eval_each(&ts, |q| sine_kernel_plane(q).map(|v| v.value), q1, q2, h)?,
        Representation::MovingPoint => {
            if h != 0.0 {
                bail!("the moving-point representation is unmollified; use --h 0");
            }
            eval_each(&ts, |q| sine_kernel_moving_point(q, conewave::cone_geometry::Sign::Minus).map(|v| v.value), q1, q2, h)?
        }
        Representation::Halfwave => {
            if h <= 0.0 {
                bail!("the half-wave kernel needs h > 0");
            }
            eval_each(&ts, |q| halfwave_mu_4pi(q.t, q.q1, q.q2, q.h), q1, q2, h)?
        }
    };
    let mut w = Sink::csv(&s.out)?;
    w.row(&["t", "r1", "theta1", "r2", "theta2", "alpha", "representation", "value_re", "value_im", "region"])?;
    for (&t, v) in ts.iter().zip(&values) {
        let q = KernelQuery::new(t, q1, q2, h)?;
        let region = classify_region(alpha, &q).as_str();
        w.row(&[
            &fmt_f64(t),
            &fmt_f64(r1),
            &fmt_f64(q1.theta),
            &fmt_f64(r2),
            &fmt_f64(q2.theta),
            &fmt_f64(alpha.value()),
            rep.name(),
            &fmt_f64(v.re),
            &fmt_f64(v.im),
            region,
        ])?;
    }
    w.finish()?;
    Ok(Outcome::Success)
}

/// Evaluates a pointwise representation; on-front queries of unmollified kernels give NaN.
fn eval_each(
    ts: &[f64],
    f: impl Fn(&KernelQuery) -> conewave::Result<Complex64> + Sync,
    q1: ConePoint,
    q2: ConePoint,
    h: f64,
) -> Result<Vec<Complex64>> {
    let vals = conewave::par::map(ts, |&t| -> conewave::Result<Complex64> {
        let q = KernelQuery::new(t, q1, q2, h)?;
        match f(&q) {
            Err(Error::OnFront) => Ok(Complex64::new(f64::NAN, f64::NAN)),
            other => other,
        }
    });
    vals.into_iter().map(|v| v.map_err(anyhow::Error::from)).collect()
}

pub fn scatter(args: &ScatterArgs, file: &ScatterArgs, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&[])?;
    let alpha = ConeAngle::new(need("alpha", &args.alpha, &file.alpha)?)?;
    let thetas = parse_range(&need("thetas", &args.thetas, &file.thetas)?)?;
    let n = args.n.or(file.n).unwrap_or(500);
    let order = args.cesaro_order.or(file.cesaro_order).unwrap_or(DEFAULT_CESARO_ORDER);
    let summation = if order == 0 { FourierSummation::Partial } else { FourierSummation::Cesaro(order) };
    let mut w = Sink::csv(&s.out)?;
    w.row(&["alpha", "theta", "S_closed", "S_fourier_re", "S_fourier_im", "is_pole"])?;
    for th in thetas {
        let e = scattering_matrix(alpha, th);
        let f = scattering_matrix_fourier(alpha, th, n, summation);
        w.row(&[
            &fmt_f64(alpha.value()),
            &fmt_f64(th),
            &fmt_f64(e.value),
            &fmt_f64(f.re),
            &fmt_f64(f.im),
            if e.is_pole { "true" } else { "false" },
        ])?;
    }
    w.finish()?;
    Ok(Outcome::Success)
}

/// Composition point given either by planar points and time, or by the
/// angles of q1 about p1 and q2 about p2 on the base line (t = a + b + c).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeInput {
    pub chain: ConeChain,
    pub omega: f64,
    #[serde(default)]
    pub q1: Option<PlanarPoint>,
    #[serde(default)]
    pub q2: Option<PlanarPoint>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub theta1: Option<f64>,
    #[serde(default)]
    pub theta2: Option<f64>,
    #[serde(default)]
    pub t0: Option<f64>,
}

impl ComposeInput {
    fn point(&self) -> Result<CompositionPoint> {
        let (q1, q2, t) = match (self.q1, self.q2, self.t, self.theta1, self.theta2) {
            (Some(q1), Some(q2), Some(t), None, None) => (q1, q2, t),
            (None, None, t, Some(a), Some(b)) => {
                let (q1, q2, t_star) = chain_points(&self.chain, a, b);
                (q1, q2, t.unwrap_or(t_star))
            }
            _ => bail!("give either q1, q2 and t, or theta1 and theta2"),
        };
        let mut cp = CompositionPoint::new(self.chain, q1, q2, t, self.omega)?;
        if let Some(t0) = self.t0 {
            cp.t0 = t0;
            cp.validate()?;
        }
        Ok(cp)
    }
}

#[derive(Serialize)]
struct StationaryOut {
    #[serde(flatten)]
    data: StationaryData,
    value: Complex64,
}

#[derive(Serialize)]
struct ComposeOut {
    stationary: StationaryOut,
    amplitude_tilde: Option<Complex64>,
    symbol_lambda0: Option<Complex64>,
    oracle: Complex64,
    rel_err: f64,
}

pub fn compose(args: &ComposeArgs, file: &FileConfig, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&["kappa", "sigma_q", "rel_tol"])?;
    let value = match (&args.input, &file.compose) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<serde_json::Value>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        (None, Some(v)) => v.clone(),
        (None, None) => bail!("compose needs --input FILE or a `compose` section in --config"),
    };
    let mut value = value;
    let amplitude = match value.as_object_mut().and_then(|o| o.remove("amplitude")) {
        Some(v) => Some(v.as_str().ok_or_else(|| anyhow!("amplitude must be a string"))?.to_string()),
        None => None,
    };
    let input: ComposeInput = serde_json::from_value(value).context("composition input")?;
    let amp = match args.amplitude.clone().or(amplitude).as_deref().unwrap_or("leading") {
        "leading" => OracleAmplitude::Leading,
        "unit" => OracleAmplitude::Unit,
        other => bail!("amplitude must be `leading` or `unit`, got `{other}`"),
    };
    let cp = input.point()?;
    let d = OracleConfig::default();
    let cfg = OracleConfig { kappa: s.tol("kappa", d.kappa), sigma_q: s.tol("sigma_q", d.sigma_q), rel_tol: s.tol("rel_tol", d.rel_tol) };
    let check = composition_check(&cp, amp, &cfg)?;
    let data = stationary_eliminate(&cp)?;
    let symbol = composed_angles(&cp.chain, cp.q1, cp.q2)
        .ok()
        .and_then(|((_, th1), (_, th2))| principal_symbol_lambda0(&cp.chain, th1, th2, cp.omega).ok());
    let out = ComposeOut {
        stationary: StationaryOut { data, value: check.stationary },
        amplitude_tilde: amplitude_tilde(&cp.chain, cp.q1, cp.q2, cp.omega).ok(),
        symbol_lambda0: symbol,
        oracle: check.oracle,
        rel_err: check.rel_err,
    };
    Sink::json(&s.out, &out)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct PeakOut {
    t: f64,
    height: f64,
    prominence: f64,
    nearest_length: f64,
}

#[derive(Serialize)]
struct PeaksOut {
    a_rect: f64,
    b_rect: f64,
    h: f64,
    lambda_max: f64,
    eigenvalue_count: u64,
    weyl_count: f64,
    noise_floor: f64,
    peaks: Vec<PeakOut>,
}

pub fn trace(args: &TraceArgs, file: &TraceArgs, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&["prominence"])?;
    let surf = PillowcaseSurface::new(args.a_rect.or(file.a_rect).unwrap_or(1.0), args.b_rect.or(file.b_rect).unwrap_or(1.0))?;
    let h = s.h.unwrap_or(0.02);
    let lambda_max = s.lambda_max.unwrap_or(400.0);
    let ts = match args.t.clone().or_else(|| file.t.clone()) {
        Some(r) => parse_range(&r)?,
        None => parse_range(&format!("0.5:{}:6", h / 4.0))?,
    };
    let spec = pillowcase_spectrum(surf, lambda_max)?;
    let tr = mollified_trace(&spec, &ts, Mollifier::new(h)?)?;
    let mut w = Sink::csv(&s.out)?;
    w.row(&["t", "re", "im"])?;
    for (&t, v) in ts.iter().zip(&tr) {
        w.row(&[&fmt_f64(t), &fmt_f64(v.re), &fmt_f64(v.im)])?;
    }
    w.finish()?;
    let mags: Vec<f64> = tr.iter().map(|v| v.norm()).collect();
    let floor = noise_floor(&mags);
    let t_end = ts.last().copied().unwrap_or(0.0);
    let lengths = surf.length_set(t_end + 1.0);
    let peaks = find_peaks(&ts, &mags, s.tol("prominence", 3.0) * floor)
        .into_iter()
        .map(|p| PeakOut {
            t: p.t,
            height: p.height,
            prominence: p.prominence,
            nearest_length: lengths.iter().copied().min_by(|a, b| (a - p.t).abs().total_cmp(&(b - p.t).abs())).unwrap_or(f64::NAN),
        })
        .collect();
    let report = PeaksOut {
        a_rect: surf.a_rect,
        b_rect: surf.b_rect,
        h,
        lambda_max,
        eigenvalue_count: spec.counting(lambda_max),
        weyl_count: surf.weyl_count(lambda_max),
        noise_floor: floor,
        peaks,
    };
    // Peaks go to --peaks, or to standard output when the trace went to a file.
    let target: Option<PathBuf> = args.peaks.clone().or_else(|| file.peaks.clone());
    match (target, &s.out) {
        (Some(p), _) => Sink::json(&Some(p), &report)?,
        (None, Some(_)) => Sink::json(&None, &report)?,
        (None, None) => eprintln!("{}", serde_json::to_string(&report)?),
    }
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct PredictOut {
    #[serde(flatten)]
    prediction: TracePrediction,
    abs: f64,
}

pub fn predict(args: &PredictArgs, file: &PredictArgs, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&[])?;
    let l = need("L", &args.l, &file.l)?;
    let b = need("b", &args.b, &file.b)?;
    let p = predict_two_diffraction_singularity(l, b)?;
    Sink::json(&s.out, &PredictOut { prediction: p, abs: p.coefficient.norm() })?;
    Ok(Outcome::Success)
}

pub fn verify(args: &VerifyArgs, file: &VerifyArgs, s: &Settings) -> Result<Outcome> {
    s.check_tol_keys(&[])?;
    let only = if args.only.is_empty() { file.only.clone() } else { args.only.clone() };
    let rows: Vec<CriterionReport> = if only.is_empty() { run_acceptance(s.seed) } else { run_selected(s.seed, &only) };
    if rows.is_empty() {
        bail!("no criterion matches {only:?}");
    }
    let text: String = rows.iter().map(|r| format!("{r}\n")).collect();
    Sink::text(&s.out, &text)?;
    Ok(if all_passed(&rows) { Outcome::Success } else { Outcome::VerificationFailed })
}

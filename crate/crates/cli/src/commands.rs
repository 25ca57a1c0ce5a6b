//! Subcommand implementations. Each command is a pure function of
//! (config, seed) to output bytes, written under the output directory.

use crate::config::ExperimentConfig;
use crate::fit::{fit_slope, SlopeFit};
use crate::formats::{spectrum_csv, CertificateFile, CodeFile, Csv};
use anytime_core::bitlinalg::BitVec;
use anytime_core::bounds::{
    epsilon_star, region_sweep, theta_star, tighter_bsc_thresholds, union_bound_thresholds,
    REGION_GRID_POINTS,
};
use anytime_core::channel::{ChannelKind, ChannelModel};
use anytime_core::code::{CodeError, CodeParams, Encoder, ToeplitzParityCheck};
use anytime_core::control::{
    closed_loop_sim, default_delta, open_loop_sim, performance_curve, random_walk_demo,
    PlantParams, QuantizerConfig,
};
use anytime_core::decode::{complexity_stats, DecoderState};
use anytime_core::rng::{mix, Rng64};
use anytime_core::spectrum::{certify, enumerate_spectrum, smallest_passing_d_o, SpectrumError};
use serde::Serialize;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    CertificationFailed,
    BudgetExceeded(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::CertificationFailed => 3,
            CliError::BudgetExceeded(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::CertificationFailed => "certification failed".to_string(),
            CliError::BudgetExceeded(m) => format!("budget exceeded: {m}"),
            CliError::Runtime(m) => m.clone(),
        }
    }
}

fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing required field `{name}`")))
}

fn channel_from(cfg: &ExperimentConfig) -> Result<ChannelModel, CliError> {
    let eps = require(cfg.epsilon, "epsilon")?;
    match cfg.channel.as_deref().unwrap_or("bec") {
        "bec" => ChannelModel::bec(eps),
        "bsc" => ChannelModel::bsc(eps),
        other => return Err(CliError::Usage(format!("unknown channel kind `{other}`"))),
    }
    .map_err(|e| CliError::Usage(e.to_string()))
}

fn map_code_err(e: CodeError) -> CliError {
    match e {
        CodeError::InvalidParams | CodeError::InvalidProbability => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn map_spectrum_err(e: SpectrumError) -> CliError {
    match e {
        SpectrumError::BudgetExceeded { .. } => CliError::BudgetExceeded(e.to_string()),
        SpectrumError::InvalidRange | SpectrumError::NoTrials => CliError::Usage(e.to_string()),
        SpectrumError::Code(c) => map_code_err(c),
    }
}

fn seed_of(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

/// Loads the code from `code_file` or samples a TZ_p code from (n, k, p,
/// horizon, seed). Sampling uses `mix(seed, 3)` so simulation streams
/// (0..2) of the same seed stay independent of the code draw.
fn load_or_sample_code(cfg: &ExperimentConfig) -> Result<ToeplitzParityCheck, CliError> {
    if let Some(path) = &cfg.code_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read code file {path}: {e}")))?;
        return CodeFile::from_json(&text)
            .and_then(|f| f.to_code())
            .map_err(CliError::Usage);
    }
    let params = CodeParams::new(
        require(cfg.n, "n")?,
        require(cfg.k, "k")?,
        require(cfg.horizon, "horizon")?,
    )
    .map_err(map_code_err)?;
    ToeplitzParityCheck::sample_tz(params, cfg.p.unwrap_or(0.5), mix(seed_of(cfg), 3))
        .map_err(map_code_err)
}

fn write_out(out: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    std::fs::write(&path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {name}");
    Ok(())
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn cmd_sample_code(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let params = CodeParams::new(
        require(cfg.n, "n")?,
        require(cfg.k, "k")?,
        require(cfg.horizon, "horizon")?,
    )
    .map_err(map_code_err)?;
    let p = cfg.p.unwrap_or(0.5);
    let seed = seed_of(cfg);
    let h = ToeplitzParityCheck::sample_tz(params, p, seed).map_err(map_code_err)?;
    // Deriving the generator validates the full-rank invariants.
    h.derive_generator().map_err(map_code_err)?;
    write_out(out, "code.json", &CodeFile::from_code(&h, p, seed).to_json())
}

pub fn cmd_certify(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let h = load_or_sample_code(cfg)?;
    let k = h.params().k();
    let alpha = require(cfg.alpha, "alpha")?;
    let theta = require(cfg.theta, "theta")?;
    let d_o = require(cfg.d_o, "d_o")?;
    let d_max = cfg
        .d_max
        .unwrap_or_else(|| h.params().horizon().min(if k == 0 { 1 } else { 24 / k.max(1) }));
    let spec = enumerate_spectrum(&h, d_max, d_max).map_err(map_spectrum_err)?;
    let cert = certify(&spec, alpha, theta, d_o, &h).map_err(map_spectrum_err)?;
    let smallest = smallest_passing_d_o(&spec, alpha, theta, &h).map_err(map_spectrum_err)?;
    write_out(out, "spectrum.csv", &spectrum_csv(&spec, &cfg.echo()))?;
    write_out(
        out,
        "certificate.json",
        &CertificateFile::new(&cert, &spec, smallest, &cfg.echo()).to_json(),
    )?;
    if cert.pass {
        Ok(())
    } else {
        Err(CliError::CertificationFailed)
    }
}

#[derive(Serialize)]
struct ExponentFit {
    instants: usize,
    error_instants: u64,
    fitted: Option<FittedSlope>,
}

#[derive(Serialize)]
struct FittedSlope {
    slope: f64,
    intercept: f64,
    ci95_low: f64,
    ci95_high: f64,
    points: usize,
}

/// Monte Carlo estimate of the per-delay error profile P(d): the fraction
/// of decode instants whose earliest unresolved block is d steps back.
pub fn estimate_exponent(
    h: &ToeplitzParityCheck,
    channel: ChannelModel,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<(Vec<u64>, usize), CliError> {
    let g = h.derive_generator().map_err(map_code_err)?;
    let k = h.params().k();
    let mut counts: Vec<u64> = vec![0; horizon + 1];
    let mut instants = 0usize;
    for trial in 0..trials {
        let trial_seed = mix(seed, trial as u64);
        let mut msg_rng = Rng64::stream(trial_seed, 1);
        let mut chan_rng = Rng64::stream(trial_seed, 2);
        let mut enc = Encoder::new(g.clone());
        let mut dec = DecoderState::with_generator(h.clone(), g.clone());
        for _ in 0..horizon {
            let mut b = BitVec::zeros(k);
            for i in 0..k {
                b.set(i, msg_rng.bernoulli(0.5));
            }
            let c = enc.push(b).map_err(map_code_err)?;
            let z = channel.transmit(&c, &mut chan_rng);
            let step = dec
                .step(&z)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            counts[step.delay] += 1;
            instants += 1;
        }
    }
    Ok((counts, instants))
}

/// Fit of log2 P(d) against d over bins with at least `min_count` hits.
pub fn fit_exponent(counts: &[u64], instants: usize, min_count: u64) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &c)| c >= min_count)
        .map(|(d, &c)| (d as f64, (c as f64 / instants as f64).log2()))
        .collect();
    fit_slope(&pts)
}

pub fn cmd_exponent(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let channel = channel_from(cfg)?;
    if channel.kind() != ChannelKind::Bec {
        return Err(CliError::Usage("exponent estimation requires a BEC".into()));
    }
    let h = load_or_sample_code(cfg)?;
    let horizon = cfg.horizon.unwrap_or(100).min(h.params().horizon());
    let trials = cfg.trials.unwrap_or(1000);
    if trials == 0 {
        return Err(CliError::Usage("trials must be >= 1".into()));
    }
    let (counts, instants) = estimate_exponent(&h, channel, horizon, trials, seed_of(cfg))?;
    let mut csv = Csv::new("exponent", &cfg.echo(), &["d", "count", "p_hat"]);
    for (d, &c) in counts.iter().enumerate().skip(1) {
        if c > 0 {
            csv.row(&[
                d.to_string(),
                c.to_string(),
                fmt_f64(c as f64 / instants as f64),
            ]);
        }
    }
    write_out(out, "exponent.csv", &csv.finish())?;
    let fitted = fit_exponent(&counts, instants, 20).map(|f| FittedSlope {
        slope: f.slope,
        intercept: f.intercept,
        ci95_low: f.ci95.0,
        ci95_high: f.ci95.1,
        points: f.points,
    });
    let report = ExponentFit {
        instants,
        error_instants: counts.iter().skip(1).sum(),
        fitted,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("fit serializes");
    text.push('\n');
    write_out(out, "exponent_fit.json", &text)
}

pub fn cmd_thresholds(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let channel = channel_from(cfg)?;
    let p = cfg.p.unwrap_or(0.5);
    let zeta = channel.bhattacharyya();
    if !(0.0 < zeta && zeta < 1.0) {
        return Err(CliError::Usage("degenerate channel: zeta outside (0,1)".into()));
    }
    let union = union_bound_thresholds(zeta, p);
    let tighter = (channel.kind() == ChannelKind::Bsc && channel.epsilon() < 0.25
        && channel.epsilon() > 0.0)
        .then(|| tighter_bsc_thresholds(channel.epsilon()));
    let mut csv = Csv::new(
        "thresholds",
        &cfg.echo(),
        &["r", "theta_star", "beta_union", "beta_tighter"],
    );
    csv.comment(&format!("zeta: {zeta}"));
    csv.comment(&format!("r_max_union: {}", union.r_max()));
    if let Some(t) = &tighter {
        csv.comment(&format!("r_max_tighter: {}", t.r_max()));
    }
    csv.comment(&format!("epsilon_star: {}", epsilon_star()));
    for i in 1..=REGION_GRID_POINTS {
        let r = i as f64 / (REGION_GRID_POINTS + 1) as f64;
        let beta_u = (r < union.r_max()).then(|| union.beta(r));
        let beta_t = tighter
            .as_ref()
            .and_then(|t| (r < t.r_max()).then(|| t.beta(r)));
        csv.row(&[
            fmt_f64(r),
            fmt_f64(theta_star(r)),
            beta_u.map(fmt_f64).unwrap_or_default(),
            beta_t.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    write_out(out, "thresholds.csv", &csv.finish())
}

pub fn cmd_region(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let kind = match cfg.channel.as_deref().unwrap_or("bec") {
        "bec" => ChannelKind::Bec,
        "bsc" => ChannelKind::Bsc,
        other => return Err(CliError::Usage(format!("unknown channel kind `{other}`"))),
    };
    let n = require(cfg.n, "n")?;
    let m = cfg.moment.unwrap_or(1);
    let p = cfg.p.unwrap_or(0.5);
    let use_tighter = cfg.use_tighter.unwrap_or(false);
    let grid: Vec<f64> = match &cfg.eps_grid {
        Some(g) => g.clone(),
        None => (1..32).map(|i| i as f64 / 64.0).collect(),
    };
    let points = region_sweep(kind, &grid, p, n, m, use_tighter);
    let mut csv = Csv::new(
        "region",
        &cfg.echo(),
        &["epsilon", "lambda_max_nth_root", "log2_lambda_max", "rate", "beta"],
    );
    csv.comment(&format!("epsilon_star: {}", epsilon_star()));
    for pt in points {
        csv.row(&[
            fmt_f64(pt.channel_param),
            fmt_f64(pt.lambda_max_nth_root),
            fmt_f64(pt.log2_lambda_max),
            fmt_f64(pt.rate),
            fmt_f64(pt.beta),
        ]);
    }
    write_out(out, "region.csv", &csv.finish())
}

fn plant_from(cfg: &ExperimentConfig) -> Result<PlantParams, CliError> {
    let plant = PlantParams::new(
        require(cfg.lambda, "lambda")?,
        require(cfg.w_width, "w_width")?,
        require(cfg.v_width, "v_width")?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(plant.with_x0(cfg.x0.unwrap_or(0.0)))
}

pub fn cmd_stabilize(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let plant = plant_from(cfg)?;
    let channel = channel_from(cfg)?;
    let h = load_or_sample_code(cfg)?;
    let horizon = cfg.horizon.unwrap_or(100).min(h.params().horizon());
    let delta = match cfg.delta {
        Some(d) => d,
        None => default_delta(&plant, h.params().k()).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let quant =
        QuantizerConfig::sizing(&plant, delta).map_err(|e| CliError::Usage(e.to_string()))?;
    if quant.label_bits() != h.params().k() {
        return Err(CliError::Usage(format!(
            "quantizer needs k = {} label bits but the code has k = {}",
            quant.label_bits(),
            h.params().k()
        )));
    }
    let seed = seed_of(cfg);
    let sim = closed_loop_sim(&plant, &quant, &h, channel, horizon, seed, cfg.cap)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut csv = Csv::new(
        "stabilize",
        &cfg.echo(),
        &["t", "x", "y", "u", "bin", "delay", "xhat", "clamped"],
    );
    csv.comment(&format!("L: {} delta: {}", quant.bins(), quant.delta()));
    csv.comment(&format!("sup_abs_x: {}", sim.sup_abs_x));
    csv.comment(&format!("clamp_count: {}", sim.clamp_count));
    for r in &sim.rows {
        csv.row(&[
            r.t.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.u),
            r.bin.to_string(),
            r.delay.to_string(),
            fmt_f64(r.xhat),
            (r.clamped as u8).to_string(),
        ]);
    }
    write_out(out, "trace.csv", &csv.finish())?;
    let mut open = Csv::new("stabilize", &cfg.echo(), &["t", "log2_abs_x"]);
    for (i, l) in open_loop_sim(&plant, horizon, seed).into_iter().enumerate() {
        open.row(&[(i + 1).to_string(), fmt_f64(l)]);
    }
    write_out(out, "open_loop.csv", &open.finish())
}

pub fn cmd_perf_curve(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let plant = plant_from(cfg)?;
    let channel = channel_from(cfg)?;
    let n = require(cfg.n, "n")?;
    let ks = cfg.label_bits.clone().unwrap_or_else(|| vec![3, 4, 5, 6]);
    if ks.is_empty() {
        return Err(CliError::Usage("label_bits must be non-empty".into()));
    }
    let horizon = cfg.horizon.unwrap_or(100);
    let trials = cfg.trials.unwrap_or(1000);
    if trials == 0 {
        return Err(CliError::Usage("trials must be >= 1".into()));
    }
    let cap = cfg.cap.unwrap_or(1000.0);
    let points = performance_curve(
        &plant,
        n,
        channel,
        cfg.p.unwrap_or(0.5),
        &ks,
        horizon,
        trials,
        seed_of(cfg),
        cap,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = Csv::new("perf-curve", &cfg.echo(), &["k", "quantile", "sup_x"]);
    csv.comment(&format!("cap: {cap}"));
    for point in points {
        let mut sups = point.sups.clone();
        sups.sort_by(|a, b| a.partial_cmp(b).expect("sups are finite"));
        for (i, s) in sups.iter().enumerate() {
            csv.row(&[
                point.label_bits.to_string(),
                fmt_f64((i + 1) as f64 / sups.len() as f64),
                fmt_f64(*s),
            ]);
        }
    }
    write_out(out, "curve.csv", &csv.finish())
}

pub fn cmd_decode_sim(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let channel = channel_from(cfg)?;
    if channel.kind() != ChannelKind::Bec {
        return Err(CliError::Usage("decode simulation requires a BEC".into()));
    }
    let h = load_or_sample_code(cfg)?;
    let horizon = cfg.horizon.unwrap_or(100).min(h.params().horizon());
    let g = h.derive_generator().map_err(map_code_err)?;
    let k = h.params().k();
    let seed = seed_of(cfg);
    let mut msg_rng = Rng64::stream(seed, 1);
    let mut chan_rng = Rng64::stream(seed, 2);
    let mut enc = Encoder::new(g.clone());
    let mut dec = DecoderState::with_generator(h.clone(), g);
    let mut csv = Csv::new(
        "decode-sim",
        &cfg.echo(),
        &["t", "erasures_this_step", "resolved_through", "delay", "complexity"],
    );
    for _ in 0..horizon {
        let mut b = BitVec::zeros(k);
        for i in 0..k {
            b.set(i, msg_rng.bernoulli(0.5));
        }
        let c = enc.push(b).map_err(map_code_err)?;
        let step = dec
            .step(&channel.transmit(&c, &mut chan_rng))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        csv.row(&[
            dec.instant().to_string(),
            step.erasures.to_string(),
            step.resolved_through.to_string(),
            step.delay.to_string(),
            step.complexity.to_string(),
        ]);
    }
    let stats = complexity_stats(dec.complexity_log());
    csv.comment(&format!("mean_complexity: {}", stats.mean));
    for (d, frac) in &stats.tail {
        csv.comment(&format!("tail_ge_{d}: {frac}"));
    }
    write_out(out, "decode_trace.csv", &csv.finish())
}

pub fn cmd_random_walk(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let lambda = require(cfg.lambda, "lambda")?;
    let channel = channel_from(cfg)?;
    let h = load_or_sample_code(cfg)?;
    if h.params().k() != 1 {
        return Err(CliError::Usage("random walk needs a k = 1 code".into()));
    }
    let horizon = cfg.horizon.unwrap_or(500).min(h.params().horizon());
    let rows = random_walk_demo(lambda, &h, channel, horizon, seed_of(cfg))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = Csv::new(
        "random-walk",
        &cfg.echo(),
        &["t", "delay", "err_sq", "running_mse"],
    );
    let mut total = 0.0f64;
    for r in &rows {
        total += r.err_sq;
        csv.row(&[
            r.t.to_string(),
            r.delay.to_string(),
            fmt_f64(r.err_sq),
            fmt_f64(total / r.t as f64),
        ]);
    }
    write_out(out, "random_walk.csv", &csv.finish())
}

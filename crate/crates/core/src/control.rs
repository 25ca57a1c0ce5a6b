//! Stabilization of an unstable scalar plant over an erasure channel.
//!
//! The plant is `x_{t+1} = lambda x_t + u_t + w_t`, observed through
//! `y_t = x_t + v_t`, with `x_1 = 0` and bounded uniform noise: `w` on
//! `[-W/2, W/2]`, `v` on `[-V/2, V/2]`. Each step the observer quantizes
//! `y_t` to one of `L` bins, labels the bin with `k` bits, feeds the label
//! into a causal tree code, and ships one `n`-bit block over the channel.
//! The controller decodes the stream, rebuilds a state estimate from the
//! most recent fully resolved bin, and applies the deadbeat control
//! `u_t = -lambda xhat_t`.

use crate::channel::{ChannelKind, ChannelModel};
use crate::code::{CodeError, CodeParams, Encoder, ToeplitzParityCheck};
use crate::bitlinalg::BitVec;
use crate::decode::{DecodeError, DecoderState};
use crate::rng::{mix, Rng64};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum ControlError {
    /// Quantizer step below the measurement noise width.
    DeltaBelowNoise,
    /// `|lambda| <= 1`; nothing to stabilize.
    StablePlant,
    /// Code message width does not match the quantizer label width.
    LabelWidthMismatch,
    /// The closed loop decodes erasures only.
    NotErasureChannel,
    /// Label width too small for the plant (`2^k <= 2 |lambda|`).
    LabelWidthTooSmall,
    Code(CodeError),
    Decode(DecodeError),
}

impl fmt::Display for ControlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlError::DeltaBelowNoise => {
                write!(f, "quantizer step smaller than the measurement noise width")
            }
            ControlError::StablePlant => write!(f, "plant gain must satisfy |lambda| > 1"),
            ControlError::LabelWidthMismatch => {
                write!(f, "code message width must equal the quantizer label width")
            }
            ControlError::NotErasureChannel => {
                write!(f, "closed-loop simulation requires an erasure channel")
            }
            ControlError::LabelWidthTooSmall => {
                write!(f, "label width k must satisfy 2^k > 2 |lambda|")
            }
            ControlError::Code(e) => write!(f, "{e}"),
            ControlError::Decode(e) => write!(f, "{e}"),
        }
    }
}

impl From<CodeError> for ControlError {
    fn from(e: CodeError) -> Self {
        ControlError::Code(e)
    }
}

impl From<DecodeError> for ControlError {
    fn from(e: DecodeError) -> Self {
        ControlError::Decode(e)
    }
}

/// Plant gain and noise widths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantParams {
    /// Open-loop gain, `|lambda| > 1`.
    pub lambda: f64,
    /// Width of the process-noise support (`w` uniform on `[-w/2, w/2]`).
    pub w_width: f64,
    /// Width of the measurement-noise support.
    pub v_width: f64,
    /// Initial state, known to both observer and controller.
    pub x0: f64,
}

impl PlantParams {
    pub fn new(lambda: f64, w_width: f64, v_width: f64) -> Result<Self, ControlError> {
        if !(libm::fabs(lambda) > 1.0) {
            return Err(ControlError::StablePlant);
        }
        assert!(w_width >= 0.0 && v_width >= 0.0, "noise widths must be nonnegative");
        Ok(PlantParams {
            lambda,
            w_width,
            v_width,
            x0: 0.0,
        })
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }
}

/// Uniform lattice quantizer over `[-L delta / 2, L delta / 2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizerConfig {
    delta: f64,
    bins: usize,
    label_bits: usize,
}

impl QuantizerConfig {
    /// Sizes the quantizer so the closed loop never saturates:
    /// `L = ceil((V + W + 2 |lambda| delta) / delta)` bins labelled with
    /// `k = ceil(log2 L)` bits. Requires `delta >= V` so a bin pins the
    /// state to within one quantization step.
    pub fn sizing(plant: &PlantParams, delta: f64) -> Result<Self, ControlError> {
        if delta < plant.v_width {
            return Err(ControlError::DeltaBelowNoise);
        }
        let l = plant.v_width + plant.w_width + 2.0 * libm::fabs(plant.lambda) * delta;
        // Slack absorbs float rounding when the ratio is an exact integer.
        let bins = libm::ceil(l / delta - 1e-9) as usize;
        let bins = bins.max(2);
        let label_bits = (usize::BITS - (bins - 1).leading_zeros()) as usize;
        Ok(QuantizerConfig {
            delta,
            bins,
            label_bits,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of bins, `L`.
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Bits per bin label, `k = ceil(log2 L)`.
    pub fn label_bits(&self) -> usize {
        self.label_bits
    }

    /// Half-width of the covered range, `L delta / 2`.
    pub fn range(&self) -> f64 {
        self.bins as f64 * self.delta / 2.0
    }

    /// Bin index of `y`, clamped into `[0, L)`; the flag reports clamping.
    pub fn quantize(&self, y: f64) -> (usize, bool) {
        let raw = libm::floor((y + self.range()) / self.delta);
        if raw < 0.0 {
            (0, true)
        } else if raw >= self.bins as f64 {
            (self.bins - 1, y >= self.range())
        } else {
            (raw as usize, false)
        }
    }

    /// Center of bin `b`.
    pub fn dequantize(&self, bin: usize) -> f64 {
        debug_assert!(bin < self.bins);
        (bin as f64 + 0.5) * self.delta - self.range()
    }

    /// `k`-bit bin label; bit 0 carries the most significant bit.
    pub fn label(&self, bin: usize) -> BitVec {
        debug_assert!(bin < self.bins);
        let mut v = BitVec::zeros(self.label_bits);
        for i in 0..self.label_bits {
            v.set(i, (bin >> (self.label_bits - 1 - i)) & 1 == 1);
        }
        v
    }

    /// Inverse of [`Self::label`], clamped into `[0, L)`.
    pub fn label_to_bin(&self, label: &BitVec) -> usize {
        debug_assert_eq!(label.len(), self.label_bits);
        let mut bin = 0usize;
        for i in 0..self.label_bits {
            bin = (bin << 1) | label.get(i) as usize;
        }
        bin.min(self.bins - 1)
    }
}

/// One simulation step of the closed loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// Plant state at the start of the step.
    pub x: f64,
    /// Noisy observation.
    pub y: f64,
    /// Control applied this step.
    pub u: f64,
    /// Transmitted bin index.
    pub bin: usize,
    /// Decoder delay `t - r` after this step's block.
    pub delay: usize,
    /// Controller state estimate.
    pub xhat: f64,
    /// Observation fell outside the quantizer range.
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    pub sup_abs_x: f64,
    pub clamp_count: usize,
}

/// Runs the closed loop for `horizon` steps over a BEC. Noise and channel
/// randomness come from independent streams of `seed` (process = 0,
/// measurement = 1, channel = 2). With `cap`, the run stops early once
/// `|x_t| >= cap` (the supremum is then already determined up to the cap).
pub fn closed_loop_sim(
    plant: &PlantParams,
    quant: &QuantizerConfig,
    h: &ToeplitzParityCheck,
    channel: ChannelModel,
    horizon: usize,
    seed: u64,
    cap: Option<f64>,
) -> Result<SimTrace, ControlError> {
    if channel.kind() != ChannelKind::Bec {
        return Err(ControlError::NotErasureChannel);
    }
    if h.params().k() != quant.label_bits() {
        return Err(ControlError::LabelWidthMismatch);
    }
    let g = h.derive_generator()?;
    let mut encoder = Encoder::new(g.clone());
    let mut decoder = DecoderState::with_generator(h.clone(), g);
    let mut proc_rng = Rng64::stream(seed, 0);
    let mut meas_rng = Rng64::stream(seed, 1);
    let mut chan_rng = Rng64::stream(seed, 2);

    let mut x = plant.x0;
    let mut controls: Vec<f64> = Vec::new();
    let mut rows = Vec::with_capacity(horizon);
    let mut sup = 0.0f64;
    let mut clamp_count = 0usize;

    for t in 1..=horizon {
        let v = meas_rng.uniform(-plant.v_width / 2.0, plant.v_width / 2.0);
        let y = x + v;
        let (bin, clamped) = quant.quantize(y);
        clamp_count += clamped as usize;

        let codeword = encoder.push(quant.label(bin))?;
        let z = channel.transmit(&codeword, &mut chan_rng);
        let step = decoder.step(&z)?;

        // Rebuild the estimate from the newest resolved bin, rolled
        // forward through the controls applied since.
        let r = step.resolved_through;
        let mut xhat = if r >= 1 {
            quant.dequantize(quant.label_to_bin(&decoder.messages()[r - 1]))
        } else {
            plant.x0 // Nothing decoded yet; x_1 = x0 is known exactly.
        };
        // controls[j - 1] holds u_j; roll forward through u_r .. u_{t-1}
        // (u_1 .. u_{t-1} when starting from the known x_1 = 0).
        let start = r.saturating_sub(1);
        for &u in &controls[start..] {
            xhat = plant.lambda * xhat + u;
        }
        let u = -plant.lambda * xhat;
        controls.push(u);

        rows.push(TraceRow {
            t,
            x,
            y,
            u,
            bin,
            delay: step.delay,
            xhat,
            clamped,
        });
        sup = sup.max(libm::fabs(x));

        let w = proc_rng.uniform(-plant.w_width / 2.0, plant.w_width / 2.0);
        x = plant.lambda * x + u + w;
        if let Some(cap) = cap {
            if libm::fabs(x) >= cap {
                sup = sup.max(libm::fabs(x));
                break;
            }
        }
    }
    Ok(SimTrace {
        rows,
        sup_abs_x: sup,
        clamp_count,
    })
}

/// `log2 |x_t|` of the uncontrolled plant, computed on the normalized
/// state `x_t / lambda^t` so arbitrarily long horizons stay finite.
pub fn open_loop_sim(plant: &PlantParams, horizon: usize, seed: u64) -> Vec<f64> {
    let mut rng = Rng64::stream(seed, 0);
    let lam = plant.lambda;
    let log_lam = libm::log2(libm::fabs(lam));
    let mut m = plant.x0; // x_t / lambda^t
    let mut pow = 1.0f64; // lambda^t
    let mut out = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let w = rng.uniform(-plant.w_width / 2.0, plant.w_width / 2.0);
        // x_{t+1} = lambda x_t + w_t, so m_{t+1} = m_t + w_t / lambda^{t+1}.
        pow *= lam;
        m += w / pow;
        out.push(t as f64 * log_lam + libm::log2(libm::fabs(m)));
    }
    out
}

/// One step of the random-walk tracking demo.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomWalkRow {
    pub t: usize,
    pub delay: usize,
    /// Squared estimation error `(x_t - xhat_t)^2`.
    pub err_sq: f64,
}

/// Tracks `x_{t+1} = lambda x_t + w_t` with `w_t = +/-1`, one sign bit per
/// step through a rate-`1/n` tree code. The estimator uses the resolved
/// prefix of the sign stream; the error is `sum_{j>r} lambda^{t-j} w_j`.
pub fn random_walk_demo(
    lambda: f64,
    h: &ToeplitzParityCheck,
    channel: ChannelModel,
    horizon: usize,
    seed: u64,
) -> Result<Vec<RandomWalkRow>, ControlError> {
    if channel.kind() != ChannelKind::Bec {
        return Err(ControlError::NotErasureChannel);
    }
    if h.params().k() != 1 {
        return Err(ControlError::LabelWidthMismatch);
    }
    let g = h.derive_generator()?;
    let mut encoder = Encoder::new(g.clone());
    let mut decoder = DecoderState::with_generator(h.clone(), g);
    let mut src_rng = Rng64::stream(seed, 0);
    let mut chan_rng = Rng64::stream(seed, 2);

    let mut walks: Vec<f64> = Vec::with_capacity(horizon);
    let mut rows = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let bit = src_rng.bernoulli(0.5);
        walks.push(if bit { 1.0 } else { -1.0 });
        let mut msg = BitVec::zeros(1);
        msg.set(0, bit);
        let codeword = encoder.push(msg)?;
        let step = decoder.step(&channel.transmit(&codeword, &mut chan_rng))?;

        let mut err = 0.0f64;
        for j in step.resolved_through + 1..=t {
            err = err * lambda + walks[j - 1];
        }
        rows.push(RandomWalkRow {
            t,
            delay: step.delay,
            err_sq: err * err,
        });
    }
    Ok(rows)
}

/// Default quantizer step for a `k`-bit label:
/// `delta_k = max(V, (V + W) / (2^k - 2 |lambda|))`, the smallest step
/// whose sized quantizer still fits in `k` bits.
pub fn default_delta(plant: &PlantParams, label_bits: usize) -> Result<f64, ControlError> {
    let two_k = libm::exp2(label_bits as f64);
    let two_lam = 2.0 * libm::fabs(plant.lambda);
    if two_k <= two_lam {
        return Err(ControlError::LabelWidthTooSmall);
    }
    Ok(((plant.v_width + plant.w_width) / (two_k - two_lam)).max(plant.v_width))
}

/// Supremum of `|x_t|` for every trial of one label width.
#[derive(Clone, Debug, PartialEq)]
pub struct PerfPoint {
    pub label_bits: usize,
    /// One capped supremum per trial, in trial order.
    pub sups: Vec<f64>,
}

/// Monte-Carlo sweep of the closed loop over label widths. Each trial
/// draws a fresh code (seeded by `mix`ing the trial index) and reports
/// `sup_t |x_t|` capped at `cap`.
#[allow(clippy::too_many_arguments)]
pub fn performance_curve(
    plant: &PlantParams,
    n: usize,
    channel: ChannelModel,
    p: f64,
    label_widths: &[usize],
    horizon: usize,
    trials: usize,
    seed: u64,
    cap: f64,
) -> Result<Vec<PerfPoint>, ControlError> {
    let mut out = Vec::with_capacity(label_widths.len());
    for &k in label_widths {
        let quant = QuantizerConfig::sizing(plant, default_delta(plant, k)?)?;
        debug_assert_eq!(quant.label_bits(), k);
        let params = CodeParams::new(n, k, horizon)?;
        let mut sups = Vec::with_capacity(trials);
        for trial in 0..trials {
            let trial_seed = mix(seed, ((k as u64) << 32) | trial as u64);
            let h = ToeplitzParityCheck::sample_tz(params, p, mix(trial_seed, 3))?;
            let sim = closed_loop_sim(plant, &quant, &h, channel, horizon, trial_seed, Some(cap))?;
            sups.push(sim.sup_abs_x.min(cap));
        }
        out.push(PerfPoint {
            label_bits: k,
            sups,
        });
    }
    Ok(out)
}

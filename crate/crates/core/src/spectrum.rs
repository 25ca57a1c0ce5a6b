//! Brute-force weight-spectrum enumeration and anytime-distance
//! certification.
//!
//! For a decoding instant `t`, codewords are grouped by the delay `d` of
//! their first nonzero block (block `t - d + 1`); the spectrum records the
//! per-delay minimum weight `w_min(d)` and the weight counts `N_w(d)`.
//! For a Toeplitz code these are independent of `t`, so the spectrum is
//! keyed by delay only.
//!
//! Enumeration walks all `2^(k t)` message sequences in Gray-code order,
//! maintaining the codeword incrementally; the budget is capped at 2^24.

use crate::code::{CodeError, ToeplitzParityCheck};
use crate::rng::mix;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Enumeration budget: at most 2^24 message sequences.
pub const MAX_BUDGET_BITS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpectrumError {
    /// `k * t` exceeds the enumeration budget.
    BudgetExceeded { kt: usize },
    /// Need `1 <= d_max <= t` and `t` within the code horizon.
    InvalidRange,
    /// Monte Carlo needs at least one trial.
    NoTrials,
    Code(CodeError),
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::BudgetExceeded { kt } => {
                write!(f, "enumeration budget exceeded: k*t = {kt} > {MAX_BUDGET_BITS}")
            }
            SpectrumError::InvalidRange => write!(f, "need 1 <= d_max <= t <= horizon"),
            SpectrumError::NoTrials => write!(f, "trials must be >= 1"),
            SpectrumError::Code(e) => write!(f, "{e}"),
        }
    }
}

impl From<CodeError> for SpectrumError {
    fn from(e: CodeError) -> Self {
        SpectrumError::Code(e)
    }
}

/// Per-delay weight counts `N_w(d)` for `d = 1..=d_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpectrum {
    n: usize,
    k: usize,
    d_max: usize,
    /// `counts[d - 1]` maps weight -> count for delay `d`.
    counts: Vec<BTreeMap<usize, u64>>,
}

impl WeightSpectrum {
    /// Builds a spectrum from explicit per-delay counts (delay 1 first).
    pub fn from_counts(n: usize, k: usize, counts: Vec<BTreeMap<usize, u64>>) -> Self {
        let d_max = counts.len();
        WeightSpectrum { n, k, d_max, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Weight counts at delay `d` (1-based).
    pub fn counts(&self, d: usize) -> &BTreeMap<usize, u64> {
        &self.counts[d - 1]
    }

    /// Minimum Hamming weight over the delay-`d` codeword class, if any.
    pub fn w_min(&self, d: usize) -> Option<usize> {
        self.counts[d - 1].keys().next().copied()
    }

    /// Total number of codewords counted across all delays.
    pub fn total(&self) -> u64 {
        self.counts
            .iter()
            .map(|m| m.values().sum::<u64>())
            .sum()
    }
}

/// Exact spectrum of `h` at decoding instant `t` for delays `1..=d_max`,
/// by exhaustive enumeration of all message sequences.
pub fn enumerate_spectrum(
    h: &ToeplitzParityCheck,
    d_max: usize,
    t: usize,
) -> Result<WeightSpectrum, SpectrumError> {
    let params = h.params();
    let (n, k) = (params.n(), params.k());
    if d_max == 0 || d_max > t || t > params.horizon() {
        return Err(SpectrumError::InvalidRange);
    }
    let kt = k * t;
    if kt > MAX_BUDGET_BITS {
        return Err(SpectrumError::BudgetExceeded { kt });
    }
    let g = h.derive_generator()?;

    // Contribution of message bit (step tau, lane i) to the full codeword:
    // column i of G_(t'-tau+1) lands in codeword block t' for t' >= tau.
    let nt = n * t;
    let words = nt.div_ceil(64);
    let mut contrib: Vec<Vec<u64>> = Vec::with_capacity(kt);
    for tau in 0..t {
        for i in 0..k {
            let mut cw = vec![0u64; words];
            for tp in tau..t {
                let gb = g.block(tp - tau + 1);
                for r in 0..n {
                    if gb.get(r, i) {
                        let bit = tp * n + r;
                        cw[bit / 64] ^= 1u64 << (bit % 64);
                    }
                }
            }
            contrib.push(cw);
        }
    }

    let mut counts: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); d_max];
    let mut cw = vec![0u64; words];
    for m in 1u64..(1u64 << kt) {
        // Gray step: message bit tz(m) flips between gray(m-1) and gray(m).
        let flip = m.trailing_zeros() as usize;
        for (a, b) in cw.iter_mut().zip(&contrib[flip]) {
            *a ^= b;
        }
        // First nonzero codeword bit locates the delay class.
        let (wi, w) = cw
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .expect("nonzero message encodes to nonzero codeword");
        let first_bit = wi * 64 + w.trailing_zeros() as usize;
        let d = t - first_bit / n;
        if d <= d_max {
            let weight: usize = cw.iter().map(|w| w.count_ones() as usize).sum();
            *counts[d - 1].entry(weight).or_insert(0) += 1;
        }
    }
    Ok(WeightSpectrum {
        n,
        k,
        d_max,
        counts,
    })
}

/// A single certification failure.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `w_min(d)` fell below `alpha * n * d`.
    MinWeight { d: usize, w_min: usize, required: f64 },
    /// Some `N_w(d)` exceeded `2^(theta w)`.
    WeightCount { d: usize, w: usize, count: u64, limit_log2: f64 },
    /// A principal minor is rank deficient.
    RankDeficient { t: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MinWeight { d, w_min, required } => {
                write!(f, "d={d}: w_min={w_min} < alpha*n*d={required}")
            }
            Violation::WeightCount { d, w, count, limit_log2 } => {
                write!(f, "d={d}: N_{w}={count} > 2^(theta*w)=2^{limit_log2}")
            }
            Violation::RankDeficient { t } => write!(f, "principal minor at t={t} rank deficient"),
        }
    }
}

/// Outcome of checking `(alpha, theta, d_o)`-anytime distance on an
/// enumerated spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct AnytimeCertificate {
    pub alpha: f64,
    pub theta: f64,
    pub d_o: usize,
    pub d_max: usize,
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// Checks the anytime-distance conditions for `d_o <= d <= d_max` plus
/// full rank of every principal minor up to `d_max`.
pub fn certify(
    spec: &WeightSpectrum,
    alpha: f64,
    theta: f64,
    d_o: usize,
    h: &ToeplitzParityCheck,
) -> Result<AnytimeCertificate, SpectrumError> {
    if d_o == 0 || d_o > spec.d_max() {
        return Err(SpectrumError::InvalidRange);
    }
    let n = spec.n();
    let mut violations = Vec::new();
    for t in 1..=spec.d_max() {
        let m = h.principal_minor(t)?;
        if m.rank() != m.rows() {
            violations.push(Violation::RankDeficient { t });
        }
    }
    for d in d_o..=spec.d_max() {
        let required = alpha * n as f64 * d as f64;
        if let Some(w_min) = spec.w_min(d) {
            if (w_min as f64) + 1e-9 < required {
                violations.push(Violation::MinWeight { d, w_min, required });
            }
        }
        for (&w, &count) in spec.counts(d) {
            let limit_log2 = theta * w as f64;
            if libm::log2(count as f64) > limit_log2 + 1e-9 {
                violations.push(Violation::WeightCount {
                    d,
                    w,
                    count,
                    limit_log2,
                });
            }
        }
    }
    Ok(AnytimeCertificate {
        alpha,
        theta,
        d_o,
        d_max: spec.d_max(),
        pass: violations.is_empty(),
        violations,
    })
}

/// Convenience sweep: the smallest `d_o <= d_max` for which certification
/// passes, or `None` if every choice fails.
pub fn smallest_passing_d_o(
    spec: &WeightSpectrum,
    alpha: f64,
    theta: f64,
    h: &ToeplitzParityCheck,
) -> Result<Option<usize>, SpectrumError> {
    for d_o in 1..=spec.d_max() {
        if certify(spec, alpha, theta, d_o, h)?.pass {
            return Ok(Some(d_o));
        }
    }
    Ok(None)
}

/// Union bound on the delay-`d` error event: `sum_w N_w(d) zeta^w`.
pub fn union_bound_error(spec: &WeightSpectrum, zeta: f64, d: usize) -> f64 {
    spec.counts(d)
        .iter()
        .map(|(&w, &count)| count as f64 * libm::pow(zeta, w as f64))
        .sum()
}

/// Monte Carlo fraction of TZ_p codes passing certification. Trial `i`
/// uses seed `mix(seed, i)`, so results merge deterministically.
#[allow(clippy::too_many_arguments)]
pub fn ensemble_fraction(
    params: crate::code::CodeParams,
    p: f64,
    alpha: f64,
    theta: f64,
    d_o: usize,
    d_max: usize,
    trials: usize,
    seed: u64,
) -> Result<f64, SpectrumError> {
    if trials == 0 {
        return Err(SpectrumError::NoTrials);
    }
    let mut passed = 0usize;
    for trial in 0..trials {
        let h = ToeplitzParityCheck::sample_tz(params, p, mix(seed, trial as u64))?;
        let spec = enumerate_spectrum(&h, d_max, d_max)?;
        if certify(&spec, alpha, theta, d_o, &h)?.pass {
            passed += 1;
        }
    }
    Ok(passed as f64 / trials as f64)
}

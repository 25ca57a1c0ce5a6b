//! Closed-form and numeric rate/exponent analytics.
//!
//! Exponents `beta` throughout are per channel use: an anytime-reliable
//! code satisfies `P <= eta 2^(-beta n d)`. Numeric inversions use plain
//! bisection on fixed brackets, so every value here is deterministic.

use crate::channel::{ChannelKind, ChannelModel};
use alloc::vec::Vec;

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "entropy argument outside [0,1]");
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * libm::log2(x) - (1.0 - x) * libm::log2(1.0 - x)
}

/// Binary KL divergence in bits, `KL(x || y)`.
pub fn kl(x: f64, y: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "kl first argument outside [0,1]");
    assert!(y > 0.0 && y < 1.0, "kl second argument outside (0,1)");
    let mut v = 0.0;
    if x > 0.0 {
        v += x * libm::log2(x / y);
    }
    if x < 1.0 {
        v += (1.0 - x) * libm::log2((1.0 - x) / (1.0 - y));
    }
    v
}

/// The smaller root of `H(x) = y`, i.e. the inverse of the binary entropy
/// restricted to [0, 1/2]. Bisection; `|H(result) - y| < 1e-10`.
pub fn inv_entropy_smaller_root(y: f64) -> f64 {
    assert!((0.0..=1.0).contains(&y), "inverse entropy argument outside [0,1]");
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The weight-count growth threshold `theta* = log2(1/(2^(1-R) - 1))`.
pub fn theta_star(rate: f64) -> f64 {
    assert!(rate > 0.0 && rate < 1.0, "rate outside (0,1)");
    libm::log2(1.0 / (libm::exp2(1.0 - rate) - 1.0))
}

/// Which bound produced a [`ThresholdResult`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdKind {
    /// Union bound over the TZ_p ensemble for a channel with Bhattacharyya
    /// parameter `zeta`.
    UnionBound { zeta: f64, p: f64 },
    /// Tighter BSC bound, valid below `epsilon_star()`.
    TighterBsc { eps: f64 },
}

/// Maximum rate and the per-rate exponent bound `beta(R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdResult {
    r_max: f64,
    kind: ThresholdKind,
}

impl ThresholdResult {
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn kind(&self) -> ThresholdKind {
        self.kind
    }

    /// The exponent bound at rate `r` (per channel use). Positive for
    /// `r < r_max`, decreasing in `r`.
    pub fn beta(&self, r: f64) -> f64 {
        assert!(r > 0.0 && r < 1.0, "rate outside (0,1)");
        match self.kind {
            ThresholdKind::UnionBound { zeta, p } => {
                inv_entropy_smaller_root(1.0 - r)
                    * (libm::log2(1.0 / zeta)
                        + libm::log2(libm::pow(1.0 - p, -(1.0 - r)) - 1.0))
            }
            ThresholdKind::TighterBsc { eps } => {
                kl(0.5 * inv_entropy_smaller_root(1.0 - r), eps)
            }
        }
    }
}

/// Union-bound achievability thresholds for the TZ_p ensemble:
/// `R < 1 - log2(1 + zeta) / log2(1/(1-p))` and
/// `beta < H^-1(1-R) (log2(1/zeta) + log2((1-p)^-(1-R) - 1))`.
pub fn union_bound_thresholds(zeta: f64, p: f64) -> ThresholdResult {
    assert!(zeta > 0.0 && zeta < 1.0, "zeta outside (0,1)");
    assert!(p > 0.0 && p < 1.0, "p outside (0,1)");
    let r_max = 1.0 - libm::log2(1.0 + zeta) / libm::log2(1.0 / (1.0 - p));
    ThresholdResult {
        r_max: r_max.max(0.0),
        kind: ThresholdKind::UnionBound { zeta, p },
    }
}

/// Tighter thresholds for BSC(eps) with p = 1/2:
/// `R < 1 - H(2 eps)` and `beta < KL(H^-1(1-R)/2 || eps)`.
/// Improves on the union bound exactly for `eps < epsilon_star()`.
pub fn tighter_bsc_thresholds(eps: f64) -> ThresholdResult {
    assert!(eps > 0.0 && eps < 0.25, "eps outside (0, 1/4)");
    ThresholdResult {
        r_max: 1.0 - binary_entropy(2.0 * eps),
        kind: ThresholdKind::TighterBsc { eps },
    }
}

/// The crossover flip probability below which the tighter BSC bound beats
/// the union bound: the root of `H(2e) = 2 log2(sqrt(e) + sqrt(1-e))`.
pub fn epsilon_star() -> f64 {
    let f = |e: f64| binary_entropy(2.0 * e) - 2.0 * libm::log2(libm::sqrt(e) + libm::sqrt(1.0 - e));
    let (mut lo, mut hi) = (1e-6f64, 0.25f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Stabilizability of the m-th moment of a gain-`lambda` plant over `n`
/// channel uses per step: requires `R > log2|lambda| / n` and
/// `beta > m log2|lambda| / n`, both strict.
pub fn sahai_check(lambda: f64, m: u32, n: usize, rate: f64, beta: f64) -> bool {
    assert!(libm::fabs(lambda) > 1.0, "plant must be unstable");
    assert!(m >= 1);
    let l = libm::log2(libm::fabs(lambda));
    rate > l / n as f64 && beta > m as f64 * l / n as f64
}

/// One point of the stabilizable region sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPoint {
    /// Channel noise parameter (erasure or crossover probability).
    pub channel_param: f64,
    /// `|lambda_max|^(1/n)`.
    pub lambda_max_nth_root: f64,
    pub log2_lambda_max: f64,
    /// Rate achieving the supremum.
    pub rate: f64,
    /// Exponent bound at the achieving rate.
    pub beta: f64,
}

/// Grid resolution of the rate sweep.
pub const REGION_GRID_POINTS: usize = 512;

/// Largest stabilizable `log2|lambda| = sup min(nR, beta(R) n / m)` over a
/// 512-point rate grid. With `use_tighter`, BSC channels below
/// `epsilon_star()` use the tighter thresholds.
pub fn stabilizable_lambda_max(
    channel: ChannelModel,
    p: f64,
    n: usize,
    m: u32,
    use_tighter: bool,
) -> RegionPoint {
    let mut candidates: Vec<ThresholdResult> =
        alloc::vec![union_bound_thresholds(channel.bhattacharyya(), p)];
    // The tighter bound raises r_max below the crossover but can lower
    // beta at small rates, so keep whichever wins pointwise.
    if use_tighter
        && channel.kind() == ChannelKind::Bsc
        && channel.epsilon() > 0.0
        && channel.epsilon() < epsilon_star()
    {
        candidates.push(tighter_bsc_thresholds(channel.epsilon()));
    }
    let mut best = RegionPoint {
        channel_param: channel.epsilon(),
        lambda_max_nth_root: 1.0,
        log2_lambda_max: 0.0,
        rate: 0.0,
        beta: 0.0,
    };
    for thresholds in &candidates {
        for i in 1..=REGION_GRID_POINTS {
            let r = thresholds.r_max() * i as f64 / (REGION_GRID_POINTS + 1) as f64;
            if r <= 0.0 || r >= 1.0 {
                continue;
            }
            let beta = thresholds.beta(r);
            if beta <= 0.0 {
                continue;
            }
            let value = (n as f64 * r).min(beta * n as f64 / m as f64);
            if value > best.log2_lambda_max {
                best = RegionPoint {
                    channel_param: channel.epsilon(),
                    lambda_max_nth_root: libm::exp2(value / n as f64),
                    log2_lambda_max: value,
                    rate: r,
                    beta,
                };
            }
        }
    }
    best
}

/// Sweeps the stabilizable region over a grid of channel parameters.
pub fn region_sweep(
    kind: ChannelKind,
    params: &[f64],
    p: f64,
    n: usize,
    m: u32,
    use_tighter: bool,
) -> Vec<RegionPoint> {
    params
        .iter()
        .map(|&eps| {
            let channel = match kind {
                ChannelKind::Bec => ChannelModel::bec(eps),
                ChannelKind::Bsc => ChannelModel::bsc(eps),
            }
            .expect("valid channel parameter");
            stabilizable_lambda_max(channel, p, n, m, use_tighter)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_and_kl_basics() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        for x in [0.1, 0.3, 0.7] {
            assert_eq!(kl(x, x), 0.0);
        }
        assert!(kl(0.3, 0.1) > 0.0);
    }

    #[test]
    fn inverse_entropy_round_trip() {
        assert!((inv_entropy_smaller_root(1.0) - 0.5).abs() < 1e-12);
        assert!((inv_entropy_smaller_root(0.0)).abs() < 1e-12);
        let x = inv_entropy_smaller_root(0.6);
        assert!((x - 0.14610).abs() < 1e-4, "x = {x}");
        for i in 0..=1000 {
            let y = i as f64 / 1000.0;
            let x = inv_entropy_smaller_root(y);
            assert!(x <= 0.5 + 1e-12);
            assert!((binary_entropy(x) - y).abs() < 1e-9, "y = {y}");
        }
    }

    fn theta_star_by_grid(rate: f64) -> f64 {
        // Two-stage grid maximization of (H(x) - (1-R)) / x over (0, 1].
        let eval = |x: f64| (binary_entropy(x) - (1.0 - rate)) / x;
        let mut best_x = 1.0;
        let mut best = eval(1.0);
        for i in 1..=100_000 {
            let x = i as f64 / 100_000.0;
            let v = eval(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let lo = (best_x - 2e-5).max(1e-9);
        let hi = (best_x + 2e-5).min(1.0);
        for i in 0..=100_000 {
            let x = lo + (hi - lo) * i as f64 / 100_000.0;
            best = best.max(eval(x));
        }
        best
    }

    #[test]
    fn theta_star_values() {
        assert!(theta_star(1e-9) < 1e-6);
        assert!((theta_star(0.5) - 1.2715533).abs() < 1e-6);
        for rate in [0.2, 0.4, 0.6] {
            let grid = theta_star_by_grid(rate);
            assert!(
                (theta_star(rate) - grid).abs() < 1e-6,
                "rate {rate}: closed form {} vs grid {grid}",
                theta_star(rate)
            );
        }
    }

    #[test]
    fn theta_star_vs_zeta_condition() {
        // theta*(R) < log2(1/zeta) iff R < 1 - log2(1 + zeta).
        for zi in 1..10 {
            let zeta = zi as f64 / 10.0;
            let r_thresh = 1.0 - libm::log2(1.0 + zeta);
            for ri in 1..100 {
                let r = ri as f64 / 100.0;
                assert_eq!(
                    theta_star(r) < libm::log2(1.0 / zeta),
                    r < r_thresh,
                    "zeta={zeta} r={r}"
                );
            }
        }
    }

    #[test]
    fn union_bound_threshold_values() {
        let t = union_bound_thresholds(0.3, 0.5);
        assert!((t.r_max() - 0.6214883767462704).abs() < 1e-12);
        // Useless channel: r_max -> 0.
        assert!(union_bound_thresholds(0.999999, 0.5).r_max() < 1e-5);
        // Composition at R = 0.4.
        let beta = t.beta(0.4);
        assert!((beta - 0.11419).abs() < 5e-5, "beta = {beta}");
        // beta(R) -> 0 as R -> r_max.
        assert!(t.beta(t.r_max() - 1e-9).abs() < 1e-6);
        // Decreasing in R.
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let r = t.r_max() * i as f64 / 60.0;
            let b = t.beta(r);
            assert!(b < prev && b > 0.0);
            prev = b;
        }
    }

    #[test]
    fn epsilon_star_value() {
        let e = epsilon_star();
        assert!((e - 0.0753).abs() < 5e-4, "eps* = {e}");
        // Defining equation holds at the root.
        let lhs = 1.0 - binary_entropy(2.0 * e);
        let rhs = 1.0 - 2.0 * libm::log2(libm::sqrt(e) + libm::sqrt(1.0 - e));
        assert!((lhs - rhs).abs() < 1e-6);
    }

    #[test]
    fn tighter_bsc_values_and_crossover() {
        let t = tighter_bsc_thresholds(0.05);
        assert!((t.r_max() - 0.5310044064107188).abs() < 1e-9);
        // Tighter r_max beats the union bound exactly below eps*.
        let e_star = epsilon_star();
        for i in 1..25 {
            let eps = i as f64 / 100.0;
            let union = union_bound_thresholds(
                ChannelModel::bsc(eps).unwrap().bhattacharyya(),
                0.5,
            );
            let tighter = tighter_bsc_thresholds(eps);
            assert_eq!(
                tighter.r_max() > union.r_max(),
                eps < e_star,
                "eps = {eps}"
            );
        }
    }

    #[test]
    fn sahai_examples() {
        assert!(sahai_check(2.0, 1, 15, 0.4, 0.07));
        assert!(!sahai_check(2.0, 1, 15, 0.05, 0.07));
        // Boundary is strict.
        assert!(!sahai_check(2.0, 1, 15, 0.4, 1.0 / 15.0));
    }

    #[test]
    fn region_bec_contains_lambda_two() {
        let point =
            stabilizable_lambda_max(ChannelModel::bec(0.3).unwrap(), 0.5, 15, 1, false);
        assert!(point.log2_lambda_max >= 1.0, "{point:?}");
        // A near-clean channel supports a much larger gain, though the
        // exponent bound keeps it below one bit per channel use.
        let clean = stabilizable_lambda_max(ChannelModel::bec(1e-9).unwrap(), 0.5, 15, 1, false);
        assert!(clean.log2_lambda_max / 15.0 > 0.7, "{clean:?}");
        assert!(clean.log2_lambda_max > point.log2_lambda_max);
    }

    #[test]
    fn region_sweep_monotone() {
        let grid: Vec<f64> = (1..30).map(|i| i as f64 / 40.0).collect();
        for (kind, tighter) in [
            (ChannelKind::Bec, false),
            (ChannelKind::Bsc, false),
            (ChannelKind::Bsc, true),
        ] {
            let grid = if kind == ChannelKind::Bsc {
                grid.iter().map(|&e| e * 0.6).collect()
            } else {
                grid.clone()
            };
            let points = region_sweep(kind, &grid, 0.5, 15, 2, tighter);
            for w in points.windows(2) {
                assert!(
                    w[1].lambda_max_nth_root <= w[0].lambda_max_nth_root + 1e-9,
                    "{kind:?} tighter={tighter}: {w:?}"
                );
            }
        }
    }
}

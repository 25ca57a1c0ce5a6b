//! Streaming maximum-likelihood decoding over the binary erasure channel.
//!
//! At each instant the unresolved erasures satisfy `H_e z_e = s`, where
//! `H_e` collects the parity-check columns at erased positions and `s`
//! folds in the contributions of everything known. The decoder searches
//! the smallest suffix `z_{e,2}` (erasures within the last `d'` steps)
//! such that the stacked matrix `[H_e11; W H_e21]`, with `W` a basis of
//! the left null space of `H_e22`, has full column rank; the prefix
//! `z_{e,1}` is then uniquely determined and solved. Resolved estimates
//! are final: a position is only ever assigned its unique consistent
//! value.
//!
//! `ml_oracle` is the brute-force reference: it enumerates every codeword
//! consistent with the unerased symbols and resolves exactly the positions
//! on which all of them agree.

use crate::bitlinalg::{BitMatrix, BitVec};
use crate::channel::ChannelOutputBlock;
use crate::code::{CodeError, ToeplitzGenerator, ToeplitzParityCheck};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeError {
    /// Step index exceeded the code horizon.
    HorizonExceeded,
    /// Output block length does not match the code's n.
    BadBlockLength { expected: usize, got: usize },
    /// No codeword is consistent with the received symbols: the input is
    /// not a true BEC observation of a valid codeword.
    Inconsistent,
    /// Enumeration budget for the oracle exceeded.
    BudgetExceeded,
    Code(CodeError),
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::HorizonExceeded => write!(f, "step exceeds code horizon"),
            DecodeError::BadBlockLength { expected, got } => {
                write!(f, "expected {expected} symbols, got {got}")
            }
            DecodeError::Inconsistent => write!(f, "received symbols are not consistent with any codeword"),
            DecodeError::BudgetExceeded => write!(f, "oracle enumeration budget exceeded"),
            DecodeError::Code(e) => write!(f, "{e}"),
        }
    }
}

impl From<CodeError> for DecodeError {
    fn from(e: CodeError) -> Self {
        DecodeError::Code(e)
    }
}

/// Outcome of one decoder step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepResult {
    /// Last instant `r` with every codeword bit of steps `<= r` known.
    pub resolved_through: usize,
    /// `t - r`.
    pub delay: usize,
    /// Elimination dimension: the delay of the earliest unresolved erasure
    /// when the step's linear system was formed, 0 if there was none.
    pub complexity: usize,
    /// Erasures received in this step's block.
    pub erasures: usize,
}

/// Streaming BEC decoder state for one code and one channel stream.
#[derive(Clone, Debug)]
pub struct DecoderState {
    h: ToeplitzParityCheck,
    g: ToeplitzGenerator,
    t: usize,
    /// Per step: codeword bits with unresolved positions as zero.
    values: Vec<BitVec>,
    /// Per step: unresolved positions within the block, ascending.
    unknown: Vec<Vec<usize>>,
    /// Count of unresolved positions across all steps.
    unknown_total: usize,
    /// Syndrome of the known bits: for each received parity row, the XOR
    /// of the contributions of all currently-known codeword bits.
    syndrome: BitVec,
    resolved_through: usize,
    messages: Vec<BitVec>,
    complexity_log: Vec<usize>,
}

impl DecoderState {
    pub fn new(h: ToeplitzParityCheck) -> Result<Self, CodeError> {
        let g = h.derive_generator()?;
        Ok(Self::with_generator(h, g))
    }

    /// Uses a pre-derived generator (must be the pair of `h`).
    pub fn with_generator(h: ToeplitzParityCheck, g: ToeplitzGenerator) -> Self {
        DecoderState {
            h,
            g,
            t: 0,
            values: Vec::new(),
            unknown: Vec::new(),
            unknown_total: 0,
            syndrome: BitVec::zeros(0),
            resolved_through: 0,
            messages: Vec::new(),
            complexity_log: Vec::new(),
        }
    }

    pub fn instant(&self) -> usize {
        self.t
    }

    pub fn resolved_through(&self) -> usize {
        self.resolved_through
    }

    /// Message estimates for the resolved prefix, final once emitted.
    pub fn messages(&self) -> &[BitVec] {
        &self.messages
    }

    /// Elimination dimension used at each past step.
    pub fn complexity_log(&self) -> &[usize] {
        &self.complexity_log
    }

    /// The codeword block at step `tau`, if fully resolved.
    pub fn codeword_block(&self, tau: usize) -> Option<&BitVec> {
        (tau >= 1 && tau <= self.resolved_through).then(|| &self.values[tau - 1])
    }

    /// Ingests the channel output for the next step and advances the
    /// resolved prefix as far as the erasure pattern allows.
    pub fn step(&mut self, z: &ChannelOutputBlock) -> Result<StepResult, DecodeError> {
        let params = self.h.params();
        let (n, nbar) = (params.n(), params.nbar());
        if self.t + 1 > params.horizon() {
            return Err(DecodeError::HorizonExceeded);
        }
        if z.len() != n {
            return Err(DecodeError::BadBlockLength {
                expected: n,
                got: z.len(),
            });
        }
        self.t += 1;
        let t = self.t;

        let mut block = BitVec::zeros(n);
        let mut unknown = Vec::new();
        for (i, sym) in z.iter().enumerate() {
            match sym.bit() {
                Some(b) => block.set(i, b),
                None => unknown.push(i),
            }
        }
        let erasures = unknown.len();
        self.unknown_total += erasures;
        self.values.push(block);
        self.unknown.push(unknown);

        // New parity rows for block t: contributions of all known bits.
        let mut new_rows = BitVec::zeros(nbar);
        for tau in 1..=t {
            new_rows.xor_assign(&self.h.block(t - tau + 1).mul_vec(&self.values[tau - 1]));
        }
        let old_len = self.syndrome.len();
        let mut syn = BitVec::zeros(old_len + nbar);
        for i in 0..old_len {
            syn.set(i, self.syndrome.get(i));
        }
        for i in 0..nbar {
            syn.set(old_len + i, new_rows.get(i));
        }
        self.syndrome = syn;

        let complexity = if self.unknown_total == 0 {
            0
        } else {
            let e_min = self.earliest_unknown_step().expect("unknowns exist");
            let d = t - e_min + 1;
            self.eliminate(e_min)?;
            d
        };
        self.complexity_log.push(complexity);

        let old_r = self.resolved_through;
        let new_r = match self.earliest_unknown_step() {
            Some(s) => s - 1,
            None => t,
        };
        debug_assert!(new_r >= old_r, "resolved prefix never shrinks");

        // Every fully-known block's parity rows must balance to zero.
        for blk in old_r + 1..=new_r {
            for i in (blk - 1) * nbar..blk * nbar {
                if self.syndrome.get(i) {
                    return Err(DecodeError::Inconsistent);
                }
            }
        }
        self.resolved_through = new_r;

        // Emit the message estimates for newly resolved blocks.
        for tau in old_r + 1..=new_r {
            let mut residual = self.values[tau - 1].clone();
            for (j, b) in self.messages.iter().enumerate() {
                residual.xor_assign(&self.g.block(tau - j).mul_vec(b));
            }
            let sol = self
                .g
                .block(1)
                .solve(&residual)
                .map_err(|_| DecodeError::Inconsistent)?;
            let mut b = BitVec::zeros(params.k());
            for i in 0..params.k() {
                b.set(i, sol.particular.get(i));
            }
            self.messages.push(b);
        }

        Ok(StepResult {
            resolved_through: self.resolved_through,
            delay: t - self.resolved_through,
            complexity,
            erasures,
        })
    }

    fn earliest_unknown_step(&self) -> Option<usize> {
        self.unknown
            .iter()
            .position(|u| !u.is_empty())
            .map(|i| i + 1)
    }

    /// Smallest-suffix search: for growing `d'`, split the erased system at
    /// step `t - d'` and solve the prefix when the stacked matrix has full
    /// column rank.
    fn eliminate(&mut self, e_min: usize) -> Result<(), DecodeError> {
        let params = self.h.params();
        let nbar = params.nbar();
        let t = self.t;

        // Unresolved positions in steps e_min..=t, ascending by global index.
        let cols: Vec<(usize, usize)> = (e_min..=t)
            .flat_map(|tau| self.unknown[tau - 1].iter().map(move |&c| (tau, c)))
            .collect();
        debug_assert!(!cols.is_empty());

        // Erased-column submatrix over parity rows of blocks e_min..=t.
        let d = t - e_min + 1;
        let mut he = BitMatrix::zeros(d * nbar, cols.len());
        for (jj, &(tau, c)) in cols.iter().enumerate() {
            for blk in tau..=t {
                let hb = self.h.block(blk - tau + 1);
                for r in 0..nbar {
                    if hb.get(r, c) {
                        he.set((blk - e_min) * nbar + r, jj, true);
                    }
                }
            }
        }
        let mut rhs = BitVec::zeros(d * nbar);
        for i in 0..d * nbar {
            rhs.set(i, self.syndrome.get((e_min - 1) * nbar + i));
        }

        for d_prime in 0..d {
            let boundary = t - d_prime; // z_{e,1}: erasures in steps <= boundary
            let split = cols.partition_point(|&(tau, _)| tau <= boundary);
            if split == 0 {
                break;
            }
            let row_split = (boundary - e_min + 1) * nbar;
            let h11 = he.row_slice(0, row_split).select_columns_range(0, split);
            let bottom = he.row_slice(row_split, d * nbar);
            let h21 = bottom.select_columns_range(0, split);
            let h22 = bottom.select_columns_range(split, cols.len());
            let w = h22.left_null_basis();
            let stacked = h11.vstack(&w.mul(&h21));
            if stacked.rank() != split {
                continue;
            }
            let mut rhs1 = BitVec::zeros(row_split);
            for i in 0..row_split {
                rhs1.set(i, rhs.get(i));
            }
            let mut rhs2 = BitVec::zeros(d * nbar - row_split);
            for i in 0..rhs2.len() {
                rhs2.set(i, rhs.get(row_split + i));
            }
            let wr = w.mul_vec(&rhs2);
            let mut full_rhs = BitVec::zeros(stacked.rows());
            for i in 0..row_split {
                full_rhs.set(i, rhs1.get(i));
            }
            for i in 0..wr.len() {
                full_rhs.set(row_split + i, wr.get(i));
            }
            let sol = stacked
                .solve(&full_rhs)
                .map_err(|_| DecodeError::Inconsistent)?;
            debug_assert!(sol.null_basis.is_empty());
            for (jj, &(tau, c)) in cols.iter().take(split).enumerate() {
                self.resolve_bit(tau, c, sol.particular.get(jj));
            }
            return Ok(());
        }
        Ok(())
    }

    /// Marks a position known and folds its contribution into the syndrome.
    fn resolve_bit(&mut self, tau: usize, c: usize, value: bool) {
        let nbar = self.h.params().nbar();
        let u = &mut self.unknown[tau - 1];
        let idx = u.iter().position(|&x| x == c).expect("bit is unresolved");
        u.remove(idx);
        self.unknown_total -= 1;
        if value {
            self.values[tau - 1].set(c, true);
            for blk in tau..=self.t {
                let hb = self.h.block(blk - tau + 1);
                for r in 0..nbar {
                    if hb.get(r, c) {
                        let i = (blk - 1) * nbar + r;
                        self.syndrome.set(i, !self.syndrome.get(i));
                    }
                }
            }
        }
    }
}

impl BitMatrix {
    /// Columns `lo..hi` as a new matrix (contiguous convenience wrapper).
    fn select_columns_range(&self, lo: usize, hi: usize) -> BitMatrix {
        let idx: Vec<usize> = (lo..hi).collect();
        self.select_columns(&idx)
    }
}

/// Brute-force ML reference: a position is resolved iff every codeword
/// consistent with the unerased symbols agrees there. Budget `n*t <= 24`.
pub fn ml_oracle(
    h: &ToeplitzParityCheck,
    outputs: &[ChannelOutputBlock],
) -> Result<Vec<Option<bool>>, DecodeError> {
    let params = h.params();
    let (n, k) = (params.n(), params.k());
    let t = outputs.len();
    if t > params.horizon() {
        return Err(DecodeError::HorizonExceeded);
    }
    if n * t > 24 {
        return Err(DecodeError::BudgetExceeded);
    }
    let g = h.derive_generator()?;

    // Received pattern as masks over the flattened codeword.
    let mut known_mask = 0u32;
    let mut known_vals = 0u32;
    for (tau, z) in outputs.iter().enumerate() {
        if z.len() != n {
            return Err(DecodeError::BadBlockLength {
                expected: n,
                got: z.len(),
            });
        }
        for (i, sym) in z.iter().enumerate() {
            if let Some(b) = sym.bit() {
                known_mask |= 1 << (tau * n + i);
                if b {
                    known_vals |= 1 << (tau * n + i);
                }
            }
        }
    }

    // Enumerate all codewords.
    let mut agree: Option<(u32, u32)> = None; // (candidate word, agreement mask)
    for m in 0u64..(1u64 << (k * t)) {
        let mut msgs = Vec::with_capacity(t);
        for tau in 0..t {
            let mut b = BitVec::zeros(k);
            for i in 0..k {
                b.set(i, m >> (tau * k + i) & 1 == 1);
            }
            msgs.push(b);
        }
        let blocks = g.encode_all(&msgs)?;
        let mut cw = 0u32;
        for (tau, blk) in blocks.iter().enumerate() {
            for i in 0..n {
                if blk.get(i) {
                    cw |= 1 << (tau * n + i);
                }
            }
        }
        if cw & known_mask != known_vals {
            continue;
        }
        agree = Some(match agree {
            None => (cw, (1u32 << (n * t)).wrapping_sub(1)),
            Some((cand, mask)) => (cand, mask & !(cand ^ cw)),
        });
    }
    let (cand, mask) = agree.ok_or(DecodeError::Inconsistent)?;
    Ok((0..n * t)
        .map(|i| (mask >> i & 1 == 1).then(|| cand >> i & 1 == 1))
        .collect())
}

/// Summary of a complexity log.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityStats {
    pub mean: f64,
    /// `(d, fraction of steps with elimination dimension >= d)` for
    /// `d = 1..=max`.
    pub tail: Vec<(usize, f64)>,
}

pub fn complexity_stats(log: &[usize]) -> ComplexityStats {
    assert!(!log.is_empty(), "empty complexity log");
    let total = log.len() as f64;
    let mean = log.iter().sum::<usize>() as f64 / total;
    let max = log.iter().copied().max().unwrap_or(0);
    let tail = (1..=max)
        .map(|d| {
            let count = log.iter().filter(|&&c| c >= d).count();
            (d, count as f64 / total)
        })
        .collect();
    ComplexityStats { mean, tail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Symbol;
    use crate::code::CodeParams;
    use crate::rng::{mix, Rng64};
    use alloc::vec;

    fn toy_code() -> ToeplitzParityCheck {
        let params = CodeParams::new(2, 1, 6).unwrap();
        let mut blocks = vec![
            BitMatrix::from_rows(&[&[1, 1]]),
            BitMatrix::from_rows(&[&[1, 0]]),
        ];
        blocks.resize(6, BitMatrix::zeros(1, 2));
        ToeplitzParityCheck::from_blocks(params, blocks).unwrap()
    }

    fn as_block(bits: &[Option<bool>]) -> ChannelOutputBlock {
        bits.iter()
            .map(|b| match b {
                Some(v) => Symbol::from_bit(*v),
                None => Symbol::Erased,
            })
            .collect()
    }

    #[test]
    fn clean_stream_resolves_immediately() {
        let h = toy_code();
        let g = h.derive_generator().unwrap();
        let msgs: Vec<BitVec> = [1u8, 0, 1, 1]
            .iter()
            .map(|&b| BitVec::from_bits(&[b]))
            .collect();
        let blocks = g.encode_all(&msgs).unwrap();
        let mut dec = DecoderState::new(h).unwrap();
        for (i, blk) in blocks.iter().enumerate() {
            let z = as_block(&blk.iter_bits().map(Some).collect::<Vec<_>>());
            let res = dec.step(&z).unwrap();
            assert_eq!(res.resolved_through, i + 1);
            assert_eq!(res.delay, 0);
            assert_eq!(res.complexity, 0);
        }
        assert_eq!(dec.messages(), &msgs[..]);
    }

    #[test]
    fn single_erasure_solved_from_parity() {
        // H_1 = [1 1]: codeword (1,1); first bit erased, solved from parity.
        let mut dec = DecoderState::new(toy_code()).unwrap();
        let res = dec.step(&as_block(&[None, Some(true)])).unwrap();
        assert_eq!(res.resolved_through, 1);
        assert_eq!(res.erasures, 1);
        assert_eq!(dec.codeword_block(1).unwrap(), &BitVec::from_bits(&[1, 1]));
        assert_eq!(dec.messages(), &[BitVec::from_bits(&[1])]);
    }

    #[test]
    fn fully_erased_step_resolved_later() {
        // Both bits of step 1 erased; step 2 received clean.
        let h = toy_code();
        let g = h.derive_generator().unwrap();
        let msgs: Vec<BitVec> = [1u8, 0].iter().map(|&b| BitVec::from_bits(&[b])).collect();
        let blocks = g.encode_all(&msgs).unwrap();
        let mut dec = DecoderState::with_generator(h.clone(), g);
        let res = dec.step(&as_block(&[None, None])).unwrap();
        assert_eq!(res.resolved_through, 0);
        assert_eq!(res.delay, 1);
        let z2 = as_block(&blocks[1].iter_bits().map(Some).collect::<Vec<_>>());
        let res = dec.step(&z2).unwrap();
        // Cross-check against the oracle on the same outputs.
        let oracle = ml_oracle(&h, &[as_block(&[None, None]), z2]).unwrap();
        let resolvable_prefix = oracle[..2].iter().all(|p| p.is_some());
        assert_eq!(res.resolved_through >= 1, resolvable_prefix);
        if res.resolved_through >= 1 {
            let blk = dec.codeword_block(1).unwrap();
            assert_eq!(oracle[0], Some(blk.get(0)));
            assert_eq!(oracle[1], Some(blk.get(1)));
        }
    }

    #[test]
    fn oracle_trivial_cases() {
        let h = toy_code();
        let g = h.derive_generator().unwrap();
        // No erasures: everything resolves to the received word.
        let msgs = vec![BitVec::from_bits(&[1]), BitVec::from_bits(&[1])];
        let blocks = g.encode_all(&msgs).unwrap();
        let outs: Vec<ChannelOutputBlock> = blocks
            .iter()
            .map(|b| as_block(&b.iter_bits().map(Some).collect::<Vec<_>>()))
            .collect();
        let res = ml_oracle(&h, &outs).unwrap();
        assert!(res.iter().all(|p| p.is_some()));

        // Everything erased at t=1: only the coordinates on which all of
        // null(H_1) agree (none here: null = {00, 11}).
        let res = ml_oracle(&h, &[as_block(&[None, None])]).unwrap();
        assert_eq!(res, vec![None, None]);
    }

    #[test]
    fn oracle_detects_corrupt_input() {
        // (1,0) violates the parity H_1 = [1 1].
        let res = ml_oracle(&toy_code(), &[as_block(&[Some(true), Some(false)])]);
        assert_eq!(res.unwrap_err(), DecodeError::Inconsistent);
    }

    #[test]
    fn decoder_matches_oracle_on_random_instances() {
        // Soundness and prefix completeness against the brute-force oracle.
        let mut checked = 0;
        for trial in 0..200u64 {
            let mut rng = Rng64::new(mix(0xDECdec, trial));
            let n = 2 + (rng.next_u64() % 3) as usize; // 2..4
            let k = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            let k = k.min(2);
            let t_max = (24 / n).min(6);
            let params = CodeParams::new(n, k, t_max).unwrap();
            let h = ToeplitzParityCheck::sample_tz(params, 0.5, rng.next_u64()).unwrap();
            let g = h.derive_generator().unwrap();
            let msgs: Vec<BitVec> = (0..t_max)
                .map(|_| {
                    let mut b = BitVec::zeros(k);
                    for i in 0..k {
                        b.set(i, rng.bernoulli(0.5));
                    }
                    b
                })
                .collect();
            let blocks = g.encode_all(&msgs).unwrap();
            let all_erased = trial % 5 == 0;
            let outs: Vec<ChannelOutputBlock> = blocks
                .iter()
                .map(|b| {
                    b.iter_bits()
                        .map(|bit| {
                            if all_erased || rng.bernoulli(0.4) {
                                Symbol::Erased
                            } else {
                                Symbol::from_bit(bit)
                            }
                        })
                        .collect()
                })
                .collect();

            let mut dec = DecoderState::with_generator(h.clone(), g);
            let mut prev_r = 0;
            for t in 1..=t_max {
                let res = dec.step(&outs[t - 1]).unwrap();
                assert!(res.resolved_through >= prev_r);
                prev_r = res.resolved_through;
                let oracle = ml_oracle(&h, &outs[..t]).unwrap();
                // Soundness: resolved blocks agree with the oracle.
                for tau in 1..=res.resolved_through {
                    let blk = dec.codeword_block(tau).unwrap();
                    for i in 0..n {
                        assert_eq!(oracle[(tau - 1) * n + i], Some(blk.get(i)));
                    }
                }
                // Completeness: the resolved prefix is exactly the longest
                // prefix the oracle pins down.
                let oracle_prefix = (0..t)
                    .take_while(|&tau| (0..n).all(|i| oracle[tau * n + i].is_some()))
                    .count();
                assert_eq!(res.resolved_through, oracle_prefix);
                checked += 1;
            }
            // Resolved message estimates match the transmitted prefix.
            let r = dec.resolved_through();
            assert_eq!(dec.messages(), &msgs[..r]);
        }
        assert!(checked >= 200);
    }

    #[test]
    fn complexity_stats_summary() {
        let stats = complexity_stats(&[0, 0, 1, 2, 0, 3]);
        assert!((stats.mean - 1.0).abs() < 1e-12);
        assert_eq!(stats.tail[0], (1, 0.5));
        assert_eq!(stats.tail[1], (2, 2.0 / 6.0));
        assert_eq!(stats.tail[2], (3, 1.0 / 6.0));

        let clean = complexity_stats(&[0, 0, 0]);
        assert_eq!(clean.mean, 0.0);
        assert!(clean.tail.is_empty());
    }
}

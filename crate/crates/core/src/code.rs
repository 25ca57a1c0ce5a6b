//! Causal linear code construction over GF(2).
//!
//! A time-invariant (Toeplitz) code is defined by parity-check blocks
//! `H_1..H_T`, each `nbar x n` with `H_1` full row rank; the implied
//! infinite parity-check matrix is block lower triangular Toeplitz with
//! block `(i, j) = H_{i-j+1}`. The paired generator blocks `G_1..G_T`
//! (each `n x k`) are derived by successive solves so that every leading
//! principal minor annihilates every encoded sequence.
//!
//! `FiniteHorizonCode` is the non-Toeplitz induction construction that
//! grows a horizon-`T-1` code to horizon `T` by prepending a fresh first
//! block-column.

use crate::bitlinalg::{BitMatrix, BitVec};
use crate::rng::Rng64;
use alloc::vec::Vec;
use core::fmt;

/// How many times H_1 is redrawn before giving up on full row rank.
const FULL_RANK_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeError {
    /// Parameters violate `0 < k < n` or `T >= 1`.
    InvalidParams,
    /// Bernoulli parameter outside (0, 1).
    InvalidProbability,
    /// No full-rank H_1 found within the attempt budget.
    SamplingFailed,
    /// H_1 is not full row rank (or G_1 not full column rank).
    NotFullRank,
    /// A step index exceeded the code horizon.
    HorizonExceeded,
    /// A block of the input is not consistent with any codeword.
    NonCodeword { block: usize },
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::InvalidParams => write!(f, "require 0 < k < n and T >= 1"),
            CodeError::InvalidProbability => write!(f, "require 0 < p < 1"),
            CodeError::SamplingFailed => write!(f, "no full-rank H_1 found"),
            CodeError::NotFullRank => write!(f, "block is rank deficient"),
            CodeError::HorizonExceeded => write!(f, "step exceeds code horizon"),
            CodeError::NonCodeword { block } => {
                write!(f, "input is not a codeword (detected at block {block})")
            }
        }
    }
}

/// Rate and horizon parameters of a causal code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeParams {
    n: usize,
    k: usize,
    horizon: usize,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, horizon: usize) -> Result<Self, CodeError> {
        if k == 0 || k >= n || horizon == 0 {
            return Err(CodeError::InvalidParams);
        }
        Ok(CodeParams { n, k, horizon })
    }

    /// Channel bits per step.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Message bits per step.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Parity rows per step, `n - k`.
    pub fn nbar(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Maximum supported number of steps.
    pub fn horizon(&self) -> usize {
        self.horizon
    }
}

fn random_block(rows: usize, cols: usize, p: f64, rng: &mut Rng64) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.bernoulli(p));
        }
    }
    m
}

fn full_rank_block(rows: usize, cols: usize, p: f64, rng: &mut Rng64) -> Result<BitMatrix, CodeError> {
    for _ in 0..FULL_RANK_ATTEMPTS {
        let m = random_block(rows, cols, p, rng);
        if m.rank() == rows {
            return Ok(m);
        }
    }
    Err(CodeError::SamplingFailed)
}

/// A time-invariant causal code given by parity-check blocks `H_1..H_T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzParityCheck {
    params: CodeParams,
    blocks: Vec<BitMatrix>,
}

impl ToeplitzParityCheck {
    /// Samples from the TZ_p ensemble: H_1 redrawn until full row rank,
    /// H_2..H_T i.i.d. Bernoulli(p). Deterministic given `seed`.
    pub fn sample_tz(params: CodeParams, p: f64, seed: u64) -> Result<Self, CodeError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(CodeError::InvalidProbability);
        }
        let mut rng = Rng64::new(seed);
        let nbar = params.nbar();
        let mut blocks = Vec::with_capacity(params.horizon);
        blocks.push(full_rank_block(nbar, params.n, p, &mut rng)?);
        for _ in 1..params.horizon {
            blocks.push(random_block(nbar, params.n, p, &mut rng));
        }
        Ok(ToeplitzParityCheck { params, blocks })
    }

    /// Builds from explicit blocks. `H_1` must be full row rank.
    pub fn from_blocks(params: CodeParams, blocks: Vec<BitMatrix>) -> Result<Self, CodeError> {
        if blocks.len() != params.horizon {
            return Err(CodeError::InvalidParams);
        }
        for b in &blocks {
            if b.rows() != params.nbar() || b.cols() != params.n {
                return Err(CodeError::InvalidParams);
            }
        }
        if blocks[0].rank() != params.nbar() {
            return Err(CodeError::NotFullRank);
        }
        Ok(ToeplitzParityCheck { params, blocks })
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    /// The block `H_i`, 1-based.
    pub fn block(&self, i: usize) -> &BitMatrix {
        &self.blocks[i - 1]
    }

    pub fn blocks(&self) -> &[BitMatrix] {
        &self.blocks
    }

    /// The `nbar*t x n*t` block lower triangular Toeplitz assembly.
    pub fn principal_minor(&self, t: usize) -> Result<BitMatrix, CodeError> {
        if t == 0 || t > self.params.horizon {
            return Err(CodeError::HorizonExceeded);
        }
        let (n, nbar) = (self.params.n, self.params.nbar());
        let mut m = BitMatrix::zeros(nbar * t, n * t);
        for i in 0..t {
            for j in 0..=i {
                m.paste(i * nbar, j * n, &self.blocks[i - j]);
            }
        }
        Ok(m)
    }

    /// Derives the paired Toeplitz generator: `G_1` is a null-space basis
    /// of `H_1`; for `tau >= 2`, `G_tau` is the lexicographically smallest
    /// solution of `H_1 G_tau = sum_{j=2..tau} H_j G_{tau-j+1}`.
    pub fn derive_generator(&self) -> Result<ToeplitzGenerator, CodeError> {
        let (n, k, nbar) = (self.params.n, self.params.k, self.params.nbar());
        if self.blocks[0].rank() != nbar {
            return Err(CodeError::NotFullRank);
        }
        let g1 = self.blocks[0].null_space_basis();
        debug_assert_eq!(g1.cols(), k);
        let mut gens: Vec<BitMatrix> = Vec::with_capacity(self.params.horizon);
        gens.push(g1);
        for tau in 2..=self.params.horizon {
            // rhs = sum_{j=2..tau} H_j G_{tau-j+1}
            let mut rhs = BitMatrix::zeros(nbar, k);
            for j in 2..=tau {
                let prod = self.blocks[j - 1].mul(&gens[tau - j]);
                for r in 0..nbar {
                    for c in 0..k {
                        if prod.get(r, c) {
                            rhs.set(r, c, !rhs.get(r, c));
                        }
                    }
                }
            }
            let mut g = BitMatrix::zeros(n, k);
            for c in 0..k {
                let sol = self.blocks[0]
                    .solve(&rhs.column(c))
                    .map_err(|_| CodeError::NotFullRank)?;
                for r in 0..n {
                    if sol.particular.get(r) {
                        g.set(r, c, true);
                    }
                }
            }
            gens.push(g);
        }
        Ok(ToeplitzGenerator {
            params: self.params,
            blocks: gens,
        })
    }
}

/// Generator blocks `G_1..G_T` paired with a Toeplitz parity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzGenerator {
    params: CodeParams,
    blocks: Vec<BitMatrix>,
}

impl ToeplitzGenerator {
    pub fn params(&self) -> CodeParams {
        self.params
    }

    /// The block `G_i`, 1-based.
    pub fn block(&self, i: usize) -> &BitMatrix {
        &self.blocks[i - 1]
    }

    pub fn blocks(&self) -> &[BitMatrix] {
        &self.blocks
    }

    /// Codeword block at step `tau = messages.len()`:
    /// `c_tau = sum_j G_{tau-j+1} b_j`.
    pub fn encode_step(&self, messages: &[BitVec]) -> Result<BitVec, CodeError> {
        let tau = messages.len();
        if tau == 0 || tau > self.params.horizon {
            return Err(CodeError::HorizonExceeded);
        }
        let mut c = BitVec::zeros(self.params.n);
        for (j, b) in messages.iter().enumerate() {
            debug_assert_eq!(b.len(), self.params.k);
            c.xor_assign(&self.blocks[tau - j - 1].mul_vec(b));
        }
        Ok(c)
    }

    /// Encodes a whole message sequence into codeword blocks.
    pub fn encode_all(&self, messages: &[BitVec]) -> Result<Vec<BitVec>, CodeError> {
        (1..=messages.len())
            .map(|t| self.encode_step(&messages[..t]))
            .collect()
    }

    /// Inverts the encoder block by block. Fails with `NonCodeword` when a
    /// block residual is outside the column space of `G_1`.
    pub fn recover_messages(&self, codeword: &[BitVec]) -> Result<Vec<BitVec>, CodeError> {
        if codeword.len() > self.params.horizon {
            return Err(CodeError::HorizonExceeded);
        }
        let k = self.params.k;
        let mut messages: Vec<BitVec> = Vec::with_capacity(codeword.len());
        for (idx, c) in codeword.iter().enumerate() {
            let tau = idx + 1;
            let mut residual = c.clone();
            for (j, b) in messages.iter().enumerate() {
                residual.xor_assign(&self.blocks[tau - j - 1].mul_vec(b));
            }
            let sol = self.blocks[0]
                .solve(&residual)
                .map_err(|_| CodeError::NonCodeword { block: tau })?;
            // G_1 has full column rank, so the solution is unique.
            debug_assert!(sol.null_basis.is_empty());
            let mut b = BitVec::zeros(k);
            for i in 0..k {
                b.set(i, sol.particular.get(i));
            }
            messages.push(b);
        }
        Ok(messages)
    }
}

/// Streaming encoder owning its message history.
#[derive(Clone, Debug)]
pub struct Encoder {
    generator: ToeplitzGenerator,
    history: Vec<BitVec>,
}

impl Encoder {
    pub fn new(generator: ToeplitzGenerator) -> Self {
        Encoder {
            generator,
            history: Vec::new(),
        }
    }

    /// Appends a message block and returns the next codeword block.
    pub fn push(&mut self, message: BitVec) -> Result<BitVec, CodeError> {
        self.history.push(message);
        self.generator.encode_step(&self.history)
    }

    pub fn steps(&self) -> usize {
        self.history.len()
    }
}

/// Finite-horizon causal code from the induction construction: the code is
/// grown from horizon `T-1` to `T` by prepending a first block-column with
/// a full-rank diagonal block and Bernoulli(1/2) subdiagonal blocks. Not
/// Toeplitz in general. Stored as block-columns, oldest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHorizonCode {
    n: usize,
    k: usize,
    /// `columns[j][i]` is the block in block-row `j + i`, block-column `j`.
    columns: Vec<Vec<BitMatrix>>,
}

impl FiniteHorizonCode {
    /// Horizon-1 base case: a single full-rank `nbar x n` block.
    pub fn base(n: usize, k: usize, seed: u64) -> Result<Self, CodeError> {
        if k == 0 || k >= n {
            return Err(CodeError::InvalidParams);
        }
        let mut rng = Rng64::new(seed);
        let h11 = full_rank_block(n - k, n, 0.5, &mut rng)?;
        Ok(FiniteHorizonCode {
            n,
            k,
            columns: alloc::vec![alloc::vec![h11]],
        })
    }

    pub fn horizon(&self) -> usize {
        self.columns.len()
    }

    /// Grows the horizon by one: the existing structure shifts one step
    /// later and a fresh first block-column is sampled.
    pub fn extend_horizon(&self, seed: u64) -> Result<Self, CodeError> {
        let mut rng = Rng64::new(seed);
        let nbar = self.n - self.k;
        let t_new = self.horizon() + 1;
        let mut first = Vec::with_capacity(t_new);
        first.push(full_rank_block(nbar, self.n, 0.5, &mut rng)?);
        for _ in 1..t_new {
            first.push(random_block(nbar, self.n, 0.5, &mut rng));
        }
        let mut columns = Vec::with_capacity(t_new);
        columns.push(first);
        columns.extend(self.columns.iter().cloned());
        Ok(FiniteHorizonCode {
            n: self.n,
            k: self.k,
            columns,
        })
    }

    /// The `nbar*t x n*t` leading principal assembly.
    pub fn principal_minor(&self, t: usize) -> Result<BitMatrix, CodeError> {
        if t == 0 || t > self.horizon() {
            return Err(CodeError::HorizonExceeded);
        }
        let (n, nbar) = (self.n, self.n - self.k);
        let mut m = BitMatrix::zeros(nbar * t, n * t);
        for (j, col) in self.columns.iter().take(t).enumerate() {
            for (off, block) in col.iter().take(t - j).enumerate() {
                m.paste((j + off) * nbar, j * n, block);
            }
        }
        Ok(m)
    }
}

//! Memoryless binary-input channel models: erasure (BEC) and symmetric
//! (BSC), with seeded sampling and Bhattacharyya parameters.

use crate::bitlinalg::BitVec;
use crate::rng::Rng64;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    Bec,
    Bsc,
}

/// One channel output symbol. `Erased` occurs only on the BEC.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }
}

/// A block of `n` channel output symbols.
pub type ChannelOutputBlock = Vec<Symbol>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvalidChannelParameter;

impl fmt::Display for InvalidChannelParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "channel parameter out of range")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    kind: ChannelKind,
    epsilon: f64,
}

impl ChannelModel {
    /// Binary erasure channel with erasure probability `epsilon` in [0, 1).
    pub fn bec(epsilon: f64) -> Result<Self, InvalidChannelParameter> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(InvalidChannelParameter);
        }
        Ok(ChannelModel {
            kind: ChannelKind::Bec,
            epsilon,
        })
    }

    /// Binary symmetric channel with crossover probability `epsilon` in [0, 1/2).
    pub fn bsc(epsilon: f64) -> Result<Self, InvalidChannelParameter> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(InvalidChannelParameter);
        }
        Ok(ChannelModel {
            kind: ChannelKind::Bsc,
            epsilon,
        })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Sends one codeword block. Consumes exactly `c.len()` variates from
    /// `rng`, so traces are reproducible independent of batching.
    pub fn transmit(&self, c: &BitVec, rng: &mut Rng64) -> ChannelOutputBlock {
        c.iter_bits()
            .map(|bit| {
                let hit = rng.bernoulli(self.epsilon);
                match self.kind {
                    ChannelKind::Bec if hit => Symbol::Erased,
                    ChannelKind::Bec => Symbol::from_bit(bit),
                    ChannelKind::Bsc => Symbol::from_bit(bit ^ hit),
                }
            })
            .collect()
    }

    /// Bhattacharyya parameter: `eps` for the BEC, `2 sqrt(eps (1 - eps))`
    /// for the BSC.
    pub fn bhattacharyya(&self) -> f64 {
        match self.kind {
            ChannelKind::Bec => self.epsilon,
            ChannelKind::Bsc => 2.0 * libm::sqrt(self.epsilon * (1.0 - self.epsilon)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_is_identity() {
        let mut rng = Rng64::new(1);
        let c = BitVec::from_bits(&[1, 0, 1, 1, 0]);
        for ch in [ChannelModel::bec(0.0).unwrap(), ChannelModel::bsc(0.0).unwrap()] {
            let z = ch.transmit(&c, &mut rng);
            for (s, b) in z.iter().zip(c.iter_bits()) {
                assert_eq!(s.bit(), Some(b));
            }
        }
    }

    #[test]
    fn bec_erasure_fraction() {
        let ch = ChannelModel::bec(0.3).unwrap();
        let mut rng = Rng64::new(11);
        let c = BitVec::zeros(10);
        let mut erased = 0usize;
        for _ in 0..10_000 {
            erased += ch
                .transmit(&c, &mut rng)
                .iter()
                .filter(|&&s| s == Symbol::Erased)
                .count();
        }
        let frac = erased as f64 / 100_000.0;
        assert!((frac - 0.3).abs() < 0.005, "frac = {frac}");
    }

    #[test]
    fn bsc_flip_fraction_and_value_preservation() {
        let ch = ChannelModel::bsc(0.3).unwrap();
        let mut rng = Rng64::new(12);
        let c = BitVec::zeros(10);
        let mut flips = 0usize;
        for _ in 0..10_000 {
            flips += ch
                .transmit(&c, &mut rng)
                .iter()
                .filter(|&&s| s == Symbol::One)
                .count();
        }
        let frac = flips as f64 / 100_000.0;
        assert!((frac - 0.3).abs() < 0.005, "frac = {frac}");

        // BEC never alters unerased symbols.
        let ch = ChannelModel::bec(0.5).unwrap();
        let c = BitVec::from_bits(&[1, 1, 0, 1, 0, 0, 1, 0]);
        for _ in 0..1000 {
            for (s, b) in ch.transmit(&c, &mut rng).iter().zip(c.iter_bits()) {
                if let Some(v) = s.bit() {
                    assert_eq!(v, b);
                }
            }
        }
    }

    #[test]
    fn bhattacharyya_values() {
        assert_eq!(ChannelModel::bec(0.3).unwrap().bhattacharyya(), 0.3);
        assert_eq!(ChannelModel::bsc(0.0).unwrap().bhattacharyya(), 0.0);
        let z = ChannelModel::bsc(0.3).unwrap().bhattacharyya();
        assert!((z - 0.9165151389911680).abs() < 1e-12);
        // Monotone in eps on the valid range.
        let mut prev = -1.0;
        for i in 0..50 {
            let z = ChannelModel::bsc(i as f64 / 100.0).unwrap().bhattacharyya();
            assert!(z >= prev && (0.0..=1.0).contains(&z));
            prev = z;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChannelModel::bec(1.0).is_err());
        assert!(ChannelModel::bec(-0.1).is_err());
        assert!(ChannelModel::bsc(0.5).is_err());
    }
}

//! Dense GF(2) linear algebra.
//!
//! `BitMatrix` packs bits row-major into 64-bit words (column `j` lives in
//! word `j / 64`, bit `j % 64`, LSB first) so elimination reduces to word
//! XORs. Everything here is exact arithmetic over GF(2); sizes are desk
//! scale (dimensions up to a few thousand), so cubic elimination is fine.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A bit vector over GF(2), packed LSB-first into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the first set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Dense GF(2) matrix, row-major packed.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    bits: Vec<u64>,
}

/// Result of [`BitMatrix::solve`]: a particular solution plus a basis of
/// the homogeneous solutions. The solution set is `particular + span(null_basis)`;
/// it is a single point iff `null_basis` is empty.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub particular: BitVec,
    pub null_basis: Vec<BitVec>,
}

/// The linear system has no solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inconsistent;

impl fmt::Display for Inconsistent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "linear system is inconsistent")
    }
}

/// Malformed hex row input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HexError {
    BadLength { row: usize, expected: usize, got: usize },
    BadDigit { row: usize, ch: char },
    PaddingNonzero { row: usize },
}

impl fmt::Display for HexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HexError::BadLength { row, expected, got } => {
                write!(f, "row {row}: expected {expected} hex digits, got {got}")
            }
            HexError::BadDigit { row, ch } => write!(f, "row {row}: invalid hex digit {ch:?}"),
            HexError::PaddingNonzero { row } => {
                write!(f, "row {row}: bits beyond the column count are set")
            }
        }
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            wpr,
            bits: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes. Rows must have equal length.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        let mut m = BitMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.bits[i * self.wpr + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let mask = 1u64 << (j % 64);
        let w = &mut self.bits[i * self.wpr + j / 64];
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.wpr..(i + 1) * self.wpr]
    }

    /// rows[i] ^= rows[j]
    fn xor_rows(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let (a, b) = self.bits.split_at_mut(hi * self.wpr);
        let lo_row = &mut a[lo * self.wpr..(lo + 1) * self.wpr];
        let hi_row = &mut b[..self.wpr];
        if i < j {
            for (x, y) in lo_row.iter_mut().zip(hi_row.iter()) {
                *x ^= y;
            }
        } else {
            for (x, y) in hi_row.iter_mut().zip(lo_row.iter()) {
                *x ^= y;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for w in 0..self.wpr {
            self.bits.swap(i * self.wpr + w, j * self.wpr + w);
        }
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            words: self.row_words(i).to_vec(),
            len: self.cols,
        }
    }

    pub fn set_row(&mut self, i: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        let wpr = self.wpr;
        self.bits[i * wpr..(i + 1) * wpr].copy_from_slice(&v.words[..wpr]);
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u64; rhs.wpr];
            for j in 0..self.cols {
                if self.get(i, j) {
                    for (a, b) in acc.iter_mut().zip(rhs.row_words(j)) {
                        *a ^= b;
                    }
                }
            }
            out.bits[i * out.wpr..(i + 1) * out.wpr].copy_from_slice(&acc);
        }
        out
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let mut parity = 0u64;
            for (a, b) in self.row_words(i).iter().zip(&v.words) {
                parity ^= a & b;
            }
            out.set(i, parity.count_ones() & 1 == 1);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                if self.get(i, j) {
                    out.set(i, jj, true);
                }
            }
        }
        out
    }

    /// New matrix keeping rows `lo..hi`.
    pub fn row_slice(&self, lo: usize, hi: usize) -> BitMatrix {
        assert!(lo <= hi && hi <= self.rows);
        BitMatrix {
            rows: hi - lo,
            cols: self.cols,
            wpr: self.wpr,
            bits: self.bits[lo * self.wpr..hi * self.wpr].to_vec(),
        }
    }

    /// Stacks `self` on top of `bottom`.
    pub fn vstack(&self, bottom: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, bottom.cols);
        let mut out = BitMatrix::zeros(self.rows + bottom.rows, self.cols);
        out.bits[..self.bits.len()].copy_from_slice(&self.bits);
        out.bits[self.bits.len()..].copy_from_slice(&bottom.bits);
        out
    }

    /// Places `self` to the left of `right`.
    pub fn hstack(&self, right: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, right.rows);
        let mut out = BitMatrix::zeros(self.rows, self.cols + right.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(i, j, true);
                }
            }
            for j in 0..right.cols {
                if right.get(i, j) {
                    out.set(i, self.cols + j, true);
                }
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(i0, j0)`.
    pub fn paste(&mut self, i0: usize, j0: usize, block: &BitMatrix) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                if block.get(i, j) {
                    self.set(i0 + i, j0 + j, true);
                }
            }
        }
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        self.clone().row_reduce_in_place().1.len()
    }

    /// Reduced row echelon form and the (strictly increasing) pivot columns.
    pub fn row_reduce(&self) -> (BitMatrix, Vec<usize>) {
        self.clone().row_reduce_in_place()
    }

    fn row_reduce_in_place(mut self) -> (BitMatrix, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, j)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, j) {
                    self.xor_rows(i, r);
                }
            }
            pivots.push(j);
            r += 1;
        }
        (self, pivots)
    }

    /// Solves `self * x = s`. The particular solution sets all free
    /// variables (under RREF) to zero, which is the lexicographically
    /// smallest satisfying vector.
    pub fn solve(&self, s: &BitVec) -> Result<SolutionSet, Inconsistent> {
        assert_eq!(s.len(), self.rows, "rhs length must equal row count");
        // Eliminate the augmented system [A | s].
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        aug.paste(0, 0, self);
        for i in 0..self.rows {
            if s.get(i) {
                aug.set(i, self.cols, true);
            }
        }
        let (ech, pivots) = aug.row_reduce_in_place();
        if pivots.last() == Some(&self.cols) {
            return Err(Inconsistent);
        }
        let mut particular = BitVec::zeros(self.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            if ech.get(r, self.cols) {
                particular.set(pc, true);
            }
        }
        let null_basis = null_basis_from_rref(&ech, &pivots, self.cols);
        Ok(SolutionSet {
            particular,
            null_basis,
        })
    }

    /// Basis of `{x : self * x = 0}`, returned as matrix columns.
    /// Column count equals `cols - rank`.
    pub fn null_space_basis(&self) -> BitMatrix {
        let (ech, pivots) = self.row_reduce();
        let basis = null_basis_from_rref(&ech, &pivots, self.cols);
        let mut out = BitMatrix::zeros(self.cols, basis.len());
        for (j, v) in basis.iter().enumerate() {
            for i in 0..self.cols {
                if v.get(i) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Basis of `{x : x * self = 0}`, returned as matrix rows.
    /// Row count equals `rows - rank`; the product with `self` is zero.
    pub fn left_null_basis(&self) -> BitMatrix {
        // Row-reduce [A | I]; rows whose A-part vanished record the
        // combinations of original rows that sum to zero.
        let aug = self.hstack(&BitMatrix::identity(self.rows));
        let (ech, _) = aug.row_reduce_in_place();
        let mut basis_rows = Vec::new();
        for i in 0..self.rows {
            if (0..self.cols).all(|j| !ech.get(i, j)) {
                basis_rows.push(i);
            }
        }
        let mut out = BitMatrix::zeros(basis_rows.len(), self.rows);
        for (bi, &i) in basis_rows.iter().enumerate() {
            for j in 0..self.rows {
                if ech.get(i, self.cols + j) {
                    out.set(bi, j, true);
                }
            }
        }
        out
    }

    /// One lowercase hex string per row. The leftmost digit covers columns
    /// 0-3 with column 0 as the most significant bit of that digit.
    pub fn to_hex_rows(&self) -> Vec<String> {
        let digits = self.cols.div_ceil(4);
        (0..self.rows)
            .map(|i| {
                let mut s = String::with_capacity(digits);
                for d in 0..digits {
                    let mut nib = 0u8;
                    for b in 0..4 {
                        let j = d * 4 + b;
                        if j < self.cols && self.get(i, j) {
                            nib |= 1 << (3 - b);
                        }
                    }
                    s.push(char::from_digit(nib as u32, 16).unwrap());
                }
                s
            })
            .collect()
    }

    /// Inverse of [`to_hex_rows`](Self::to_hex_rows). Padding bits past the
    /// column count must be zero.
    pub fn from_hex_rows(rows: &[&str], cols: usize) -> Result<BitMatrix, HexError> {
        let digits = cols.div_ceil(4);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != digits {
                return Err(HexError::BadLength {
                    row: i,
                    expected: digits,
                    got: row.len(),
                });
            }
            for (d, ch) in row.chars().enumerate() {
                let nib = ch
                    .to_digit(16)
                    .ok_or(HexError::BadDigit { row: i, ch })? as u8;
                for b in 0..4 {
                    if nib & (1 << (3 - b)) != 0 {
                        let j = d * 4 + b;
                        if j >= cols {
                            return Err(HexError::PaddingNonzero { row: i });
                        }
                        m.set(i, j, true);
                    }
                }
            }
        }
        Ok(m)
    }
}

fn null_basis_from_rref(ech: &BitMatrix, pivots: &[usize], cols: usize) -> Vec<BitVec> {
    let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = BitVec::zeros(cols);
            v.set(f, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if ech.get(r, f) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng64;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, rng: &mut Rng64) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.bernoulli(0.5));
            }
        }
        m
    }

    /// Brute-force rank: count the distinct vectors in the row span.
    fn rank_by_span(m: &BitMatrix) -> usize {
        assert!(m.rows() <= 16);
        let mut span = BTreeSet::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut v = BitVec::zeros(m.cols());
            for i in 0..m.rows() {
                if mask & (1 << i) != 0 {
                    v.xor_assign(&m.row(i));
                }
            }
            span.insert(alloc::format!("{v:?}"));
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_identity() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn rank_duplicated_row() {
        let m = BitMatrix::from_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let mut rng = Rng64::new(17);
        for _ in 0..20 {
            let m = random_matrix(5, 8, &mut rng);
            assert_eq!(m.rank(), rank_by_span(&m));
        }
    }

    #[test]
    fn row_reduce_identity_and_zero() {
        let (e, p) = BitMatrix::identity(3).row_reduce();
        assert_eq!(e, BitMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);

        let z = BitMatrix::zeros(2, 3);
        let (e, p) = z.row_reduce();
        assert_eq!(e, z);
        assert!(p.is_empty());
    }

    #[test]
    fn row_reduce_hand_example() {
        let m = BitMatrix::from_rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let (e, p) = m.row_reduce();
        assert_eq!(p, vec![0, 1]);
        assert_eq!(e, BitMatrix::from_rows(&[&[1, 0, 1], &[0, 1, 1]]));
        // Row span preserved.
        assert_eq!(rank_by_span(&m), rank_by_span(&e));
        assert_eq!(rank_by_span(&m.vstack(&e)), rank_by_span(&m));
    }

    #[test]
    fn solve_identity() {
        let a = BitMatrix::identity(4);
        let s = BitVec::from_bits(&[1, 0, 1, 1]);
        let sol = a.solve(&s).unwrap();
        assert_eq!(sol.particular, s);
        assert!(sol.null_basis.is_empty());
    }

    #[test]
    fn solve_parity_row() {
        let a = BitMatrix::from_rows(&[&[1, 1]]);
        let sol = a.solve(&BitVec::from_bits(&[1])).unwrap();
        // Free variable zeroed: particular is [1,0].
        assert_eq!(sol.particular, BitVec::from_bits(&[1, 0]));
        assert_eq!(sol.null_basis.len(), 1);
        assert_eq!(sol.null_basis[0], BitVec::from_bits(&[1, 1]));
    }

    #[test]
    fn solve_inconsistent() {
        let a = BitMatrix::from_rows(&[&[1, 0], &[1, 0]]);
        let s = BitVec::from_bits(&[1, 0]);
        assert_eq!(a.solve(&s).unwrap_err(), Inconsistent);
    }

    #[test]
    fn solve_solution_set_matches_enumeration() {
        let mut rng = Rng64::new(99);
        for _ in 0..40 {
            let a = random_matrix(4, 6, &mut rng);
            let mut s = BitVec::zeros(4);
            for i in 0..4 {
                s.set(i, rng.bernoulli(0.5));
            }
            // Brute force the full solution set.
            let mut expected = BTreeSet::new();
            for mask in 0u64..(1 << 6) {
                let mut x = BitVec::zeros(6);
                for j in 0..6 {
                    if mask & (1 << j) != 0 {
                        x.set(j, true);
                    }
                }
                if a.mul_vec(&x) == s {
                    expected.insert(alloc::format!("{x:?}"));
                }
            }
            match a.solve(&s) {
                Err(Inconsistent) => assert!(expected.is_empty()),
                Ok(sol) => {
                    assert_eq!(a.mul_vec(&sol.particular), s);
                    let mut got = BTreeSet::new();
                    for mask in 0u64..(1 << sol.null_basis.len()) {
                        let mut x = sol.particular.clone();
                        for (bi, nb) in sol.null_basis.iter().enumerate() {
                            if mask & (1 << bi) != 0 {
                                x.xor_assign(nb);
                            }
                        }
                        got.insert(alloc::format!("{x:?}"));
                    }
                    assert_eq!(got, expected);
                }
            }
        }
    }

    #[test]
    fn null_space_identity_and_parity() {
        assert_eq!(BitMatrix::identity(3).null_space_basis().cols(), 0);
        let basis = BitMatrix::from_rows(&[&[1, 1]]).null_space_basis();
        assert_eq!(basis.cols(), 1);
        assert_eq!(basis.column(0), BitVec::from_bits(&[1, 1]));
    }

    #[test]
    fn null_space_random_membership() {
        let mut rng = Rng64::new(5);
        for _ in 0..20 {
            let a = random_matrix(3, 6, &mut rng);
            let basis = a.null_space_basis();
            assert_eq!(basis.cols(), 6 - a.rank());
            for j in 0..basis.cols() {
                assert!(a.mul_vec(&basis.column(j)).is_zero());
            }
            // Exhaustive: span of basis equals the set of annihilated vectors.
            let mut count = 0u64;
            for mask in 0u64..(1 << 6) {
                let mut x = BitVec::zeros(6);
                for j in 0..6 {
                    if mask & (1 << j) != 0 {
                        x.set(j, true);
                    }
                }
                if a.mul_vec(&x).is_zero() {
                    count += 1;
                }
            }
            assert_eq!(count, 1 << basis.cols());
        }
    }

    #[test]
    fn left_null_basis_cases() {
        // Full row rank: empty basis.
        let a = BitMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(a.left_null_basis().rows(), 0);

        // 2x1 column of ones.
        let a = BitMatrix::from_rows(&[&[1], &[1]]);
        let b = a.left_null_basis();
        assert_eq!(b.rows(), 1);
        assert_eq!(b.row(0), BitVec::from_bits(&[1, 1]));
    }

    #[test]
    fn left_null_basis_random() {
        let mut rng = Rng64::new(7);
        for _ in 0..20 {
            let a = random_matrix(6, 3, &mut rng);
            let b = a.left_null_basis();
            assert_eq!(b.rows(), 6 - a.rank());
            assert!(b.mul(&a).is_zero());
            // Oracle: null space of the transpose.
            let nt = a.transpose().null_space_basis();
            assert_eq!(b.rows(), nt.cols());
            assert_eq!(b.rank(), nt.transpose().rank());
        }
    }

    #[test]
    fn block_lower_triangular_full_rank_remark() {
        // Full-rank diagonal blocks imply a full-rank assembly.
        let mut rng = Rng64::new(2024);
        for _ in 0..100 {
            let nblocks = 1 + (rng.next_u64() % 4) as usize;
            let bs = 1 + (rng.next_u64() % 4) as usize;
            let dim = nblocks * bs;
            let mut a = BitMatrix::zeros(dim, dim);
            for b in 0..nblocks {
                let diag = loop {
                    let d = random_matrix(bs, bs, &mut rng);
                    if d.rank() == bs {
                        break d;
                    }
                };
                a.paste(b * bs, b * bs, &diag);
                for bj in 0..b {
                    a.paste(b * bs, bj * bs, &random_matrix(bs, bs, &mut rng));
                }
            }
            assert_eq!(a.rank(), dim);
        }
    }

    #[test]
    fn hex_round_trip_examples() {
        // Column 0 is the MSB of the leftmost digit.
        let m = BitMatrix::from_rows(&[&[1, 0, 0, 0, 1], &[0, 1, 1, 1, 0]]);
        assert_eq!(m.to_hex_rows(), vec!["88", "70"]);
        let back = BitMatrix::from_hex_rows(&["88", "70"], 5).unwrap();
        assert_eq!(back, m);
        // Nonzero padding bit rejected.
        assert!(BitMatrix::from_hex_rows(&["84"], 5).is_err());
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(seed in 0u64..1000, rows in 1usize..7, cols in 1usize..9) {
            let mut rng = Rng64::new(seed);
            let m = random_matrix(rows, cols, &mut rng);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn hex_round_trip(seed in 0u64..1000, rows in 0usize..6, cols in 1usize..40) {
            let mut rng = Rng64::new(seed);
            let m = random_matrix(rows, cols, &mut rng);
            let hex = m.to_hex_rows();
            let refs: alloc::vec::Vec<&str> = hex.iter().map(|s| s.as_str()).collect();
            prop_assert_eq!(BitMatrix::from_hex_rows(&refs, cols).unwrap(), m);
        }

        #[test]
        fn left_null_times_matrix_is_zero(seed in 0u64..500, rows in 1usize..8, cols in 1usize..8) {
            let mut rng = Rng64::new(seed);
            let a = random_matrix(rows, cols, &mut rng);
            let b = a.left_null_basis();
            prop_assert_eq!(b.rows(), rows - a.rank());
            if b.rows() > 0 {
                prop_assert!(b.mul(&a).is_zero());
            }
        }
    }
}

//! Square matrices over GF(2) with bit-packed rows.
//!
//! Row `i` is stored as a single `u64`; bit `j` of that word is entry `(i, j)`
//! (0-based internally, 1-based in the text format and documentation).
//! Dimensions up to 64 are supported.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::MatrixError;
use crate::poly::Gf2Poly;

/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

#[inline]
fn row_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    n: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Gf2Matrix { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    /// Builds a matrix from packed rows. Bits above column `n` must be clear.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self, MatrixError> {
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        if rows.len() != n {
            return Err(MatrixError::Shape { expected: n, found: rows.len() });
        }
        if rows.iter().any(|r| r & !row_mask(n) != 0) {
            return Err(MatrixError::Shape { expected: n, found: n + 1 });
        }
        Ok(Gf2Matrix { n, rows })
    }

    /// Builds a matrix from a row-major list of `n * n` bits.
    pub fn from_entries(n: usize, bits: &[u8]) -> Result<Self, MatrixError> {
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        if bits.len() != n * n {
            return Err(MatrixError::Shape { expected: n * n, found: bits.len() });
        }
        let mut m = Self::zero(n);
        for (idx, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => m.rows[idx / n] |= 1 << (idx % n),
                other => return Err(MatrixError::BadEntry(other as char)),
            }
        }
        Ok(m)
    }

    /// Parses rows given as strings of `0`/`1`, e.g. `["0001", "1000", ...]`.
    pub fn from_row_strs(rows: &[&str]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        let mut m = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            m.rows[i] = parse_row(row, n)?;
        }
        Ok(m)
    }

    /// The 4x4 matrix C: ones on the subdiagonal, last column `(1, 0, 0, 1)`.
    pub fn matrix_c() -> Self {
        Self::from_row_strs(&["0001", "1000", "0100", "0011"]).expect("constant matrix")
    }

    /// Block-diagonal matrix with `blocks` placed along the diagonal in order.
    pub fn direct_sum(blocks: &[Gf2Matrix]) -> Result<Self, MatrixError> {
        if blocks.is_empty() {
            return Err(MatrixError::EmptyDirectSum);
        }
        let n: usize = blocks.iter().map(|b| b.n).sum();
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        let mut m = Self::zero(n);
        let mut offset = 0;
        for b in blocks {
            for (i, &r) in b.rows.iter().enumerate() {
                m.rows[offset + i] = r << offset;
            }
            offset += b.n;
        }
        Ok(m)
    }

    /// `m` copies of `block` along the diagonal.
    pub fn direct_power(block: &Gf2Matrix, m: usize) -> Result<Self, MatrixError> {
        Self::direct_sum(&vec![block.clone(); m])
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and the
    /// coefficients `c_0, ..., c_{d-1}` down the last column.
    pub fn companion(p: &Gf2Poly) -> Result<Self, MatrixError> {
        let d = match p.degree() {
            None | Some(0) => return Err(MatrixError::BadCompanion),
            Some(d) => d,
        };
        if d > MAX_DIM {
            return Err(MatrixError::TooLarge(d));
        }
        let mut m = Self::zero(d);
        for i in 1..d {
            m.rows[i] |= 1 << (i - 1);
        }
        for i in 0..d {
            if p.coeff(i) {
                m.rows[i] |= 1 << (d - 1);
            }
        }
        Ok(m)
    }

    /// Nilpotent shift with ones on the superdiagonal.
    pub fn shift(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n.saturating_sub(1) {
            m.rows[i] = 1 << (i + 1);
        }
        m
    }

    /// Single-entry matrix with a one at 0-based `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.set(i, j, true);
        m
    }

    /// Diagonal matrix from 0/1 entries.
    pub fn diag(bits: &[u8]) -> Self {
        let mut m = Self::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            m.set(i, i, b & 1 == 1);
        }
        m
    }

    /// Matrix with entries taken from the low `n * n` bits of `code`, row-major,
    /// entry `(0, 0)` at bit 0. Used to walk all of `M_n(F_2)` for `n <= 8`.
    pub fn from_index(n: usize, code: u64) -> Self {
        assert!(n <= 8);
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i] = (code >> (i * n)) & row_mask(n);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    fn check_dims(&self, other: &Self) -> Result<(), MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dims(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dims(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect();
        Gf2Matrix { n: self.n, rows }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a ^= b;
        }
    }

    /// Row-by-row product: for every set bit `l` of row `i` of `self`, row `l`
    /// of `other` is XORed into row `i` of the result.
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut acc = 0u64;
                let mut bits = row;
                while bits != 0 {
                    let l = bits.trailing_zeros() as usize;
                    acc ^= other.rows[l];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Gf2Matrix { n: self.n, rows }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            let mut bits = self.rows[i];
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    /// XOR of the diagonal.
    pub fn trace(&self) -> bool {
        self.rows.iter().enumerate().fold(false, |acc, (i, &r)| acc ^ ((r >> i) & 1 == 1))
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.rows.clone())
    }

    pub fn corank(&self) -> usize {
        self.n - self.rank()
    }

    /// Gauss-Jordan inversion on the augmented pair `[A | I]`.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| (a[r] >> col) & 1 == 1).ok_or(MatrixError::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(Gf2Matrix { n, rows: inv })
    }

    /// `s * a * s^{-1}`.
    pub fn conjugate(s: &Self, a: &Self) -> Result<Self, MatrixError> {
        s.check_dims(a)?;
        let s_inv = s.inverse()?;
        Ok(s.mul_unchecked(a).mul_unchecked(&s_inv))
    }

    /// `p(a)` by Horner's rule.
    pub fn eval_poly(&self, p: &Gf2Poly) -> Self {
        let mut acc = Self::zero(self.n);
        let Some(deg) = p.degree() else {
            return acc;
        };
        for i in (0..=deg).rev() {
            acc = acc.mul_unchecked(self);
            if p.coeff(i) {
                for r in 0..self.n {
                    acc.rows[r] ^= 1 << r;
                }
            }
        }
        acc
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul_unchecked(self) == *self
    }

    /// Whether `a^k = 0`.
    pub fn is_nilpotent_index(&self, k: u64) -> bool {
        self.pow(k).is_zero()
    }

    /// Column `j` as a packed vector (bit `i` = entry `(i, j)`).
    pub fn column(&self, j: usize) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | (((r >> j) & 1) << i))
    }

    /// Builds a matrix whose columns are the given packed vectors.
    pub fn from_columns(n: usize, cols: &[u64]) -> Self {
        assert_eq!(cols.len(), n);
        let mut m = Self::zero(n);
        for (j, &c) in cols.iter().enumerate() {
            for i in 0..n {
                if (c >> i) & 1 == 1 {
                    m.rows[i] |= 1 << j;
                }
            }
        }
        m
    }

    /// Matrix-vector product on a packed column vector.
    pub fn apply(&self, v: u64) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | (((r & v).count_ones() as u64 & 1) << i))
    }

    /// Splits into `[[Q1, Q2], [Q3, Q4]]` with `Q4` of size `alpha x alpha`.
    pub fn block_split(&self, alpha: usize) -> Result<BlockSplit, MatrixError> {
        if alpha > self.n {
            return Err(MatrixError::AlphaOutOfRange { alpha, n: self.n });
        }
        let top = self.n - alpha;
        let sub = |r0: usize, c0: usize, nr: usize, nc: usize| Block {
            rows: nr,
            cols: nc,
            data: (r0..r0 + nr).map(|r| (self.rows[r] >> c0) & row_mask(nc)).collect(),
        };
        let q1 = sub(0, 0, top, top);
        let q4 = sub(top, top, alpha, alpha);
        Ok(BlockSplit {
            q1: Gf2Matrix { n: top, rows: q1.data },
            q2: sub(0, top, top, alpha),
            q3: sub(top, 0, alpha, top),
            q4: Gf2Matrix { n: alpha, rows: q4.data },
        })
    }

    /// Inverse of [`Gf2Matrix::block_split`].
    pub fn from_blocks(split: &BlockSplit) -> Result<Self, MatrixError> {
        let top = split.q1.n;
        let alpha = split.q4.n;
        if (split.q2.rows, split.q2.cols) != (top, alpha) || (split.q3.rows, split.q3.cols) != (alpha, top) {
            return Err(MatrixError::DimensionMismatch(top, alpha));
        }
        let n = top + alpha;
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..top {
            rows.push(split.q1.rows[i] | (split.q2.data[i] << top));
        }
        for i in 0..alpha {
            rows.push(split.q3.data[i] | (split.q4.rows[i] << top));
        }
        Ok(Gf2Matrix { n, rows })
    }

    /// Returns `S` with `S p S^{-1} = diag(I_r, 0)` for an idempotent `p`.
    ///
    /// The columns of `S^{-1}` are a basis of the image of `p` (greedy over the
    /// columns of `p` in index order) followed by a basis of its kernel (greedy
    /// over the columns of `I + p`, which span the kernel when `p` is idempotent).
    pub fn canonicalize_idempotent(&self) -> Result<Self, MatrixError> {
        if !self.is_idempotent() {
            return Err(MatrixError::NotIdempotent);
        }
        let n = self.n;
        let complement = self.add_unchecked(&Self::identity(n));
        let mut basis = Vec::with_capacity(n);
        let mut echelon = Echelon::default();
        for j in 0..n {
            let c = self.column(j);
            if echelon.insert(c) {
                basis.push(c);
            }
        }
        for j in 0..n {
            let c = complement.column(j);
            if echelon.insert(c) {
                basis.push(c);
            }
        }
        debug_assert_eq!(basis.len(), n);
        Self::from_columns(n, &basis).inverse()
    }

    /// Lexicographic comparison of the concatenated row bit strings, entry
    /// `(1, 1)` first.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.rows.iter().zip(&other.rows) {
            if a != b {
                return a.reverse_bits().cmp(&b.reverse_bits());
            }
        }
        self.n.cmp(&other.n)
    }

    /// Text form: the dimension, then one line of `0`/`1` per row, each line
    /// newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(MatrixError::Parse("missing dimension line".into()))?;
        let n: usize = header.parse().map_err(|_| MatrixError::Parse(format!("bad dimension line {header:?}")))?;
        if n > MAX_DIM {
            return Err(MatrixError::TooLarge(n));
        }
        let mut m = Self::zero(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| MatrixError::Parse(format!("expected {n} rows, found {i}")))?;
            m.rows[i] = parse_row(line, n)?;
        }
        if let Some(extra) = lines.next() {
            return Err(MatrixError::Parse(format!("unexpected trailing line {extra:?}")));
        }
        Ok(m)
    }
}

fn parse_row(row: &str, n: usize) -> Result<u64, MatrixError> {
    if row.chars().count() != n {
        return Err(MatrixError::Parse(format!("row {row:?} does not have {n} entries")));
    }
    let mut word = 0u64;
    for (j, ch) in row.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => word |= 1 << j,
            other => return Err(MatrixError::BadEntry(other)),
        }
    }
    Ok(word)
}

pub(crate) fn rank_of_rows(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let r = rows[i];
        if r == 0 {
            continue;
        }
        let low = r & r.wrapping_neg();
        rank += 1;
        for other in rows.iter_mut().skip(i + 1) {
            if *other & low != 0 {
                *other ^= r;
            }
        }
    }
    rank
}

/// Incremental echelon basis of packed vectors, keyed by lowest set bit.
#[derive(Default, Clone)]
pub(crate) struct Echelon {
    basis: Vec<u64>,
}

impl Echelon {
    pub(crate) fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            let low = b & b.wrapping_neg();
            if v & low != 0 {
                v ^= b;
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current span.
    pub(crate) fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let low = r & r.wrapping_neg();
        for b in self.basis.iter_mut() {
            if *b & low != 0 {
                *b ^= r;
            }
        }
        self.basis.push(r);
        true
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix({}):", self.n)?;
        for i in 0..self.n {
            f.write_str(" ")?;
            for j in 0..self.n {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for Gf2Matrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

/// Rectangular piece of a matrix produced by [`Gf2Matrix::block_split`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Block {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Block {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i] >> j) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&r| r == 0)
    }

    pub fn mul(&self, other: &Block) -> Result<Block, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(self.cols, other.rows));
        }
        let data = self
            .data
            .iter()
            .map(|&row| {
                let mut acc = 0;
                let mut bits = row;
                while bits != 0 {
                    acc ^= other.data[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(Block { rows: self.rows, cols: other.cols, data })
    }

    /// Square blocks convert back to matrices.
    pub fn into_square(self) -> Result<Gf2Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimensionMismatch(self.rows, self.cols));
        }
        Ok(Gf2Matrix { n: self.rows, rows: self.data })
    }
}

impl From<&Gf2Matrix> for Block {
    fn from(m: &Gf2Matrix) -> Self {
        Block { rows: m.n, cols: m.n, data: m.rows.clone() }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockSplit {
    pub q1: Gf2Matrix,
    pub q2: Block,
    pub q3: Block,
    pub q4: Gf2Matrix,
}

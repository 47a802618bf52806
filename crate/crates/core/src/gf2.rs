//! Dense bit-packed linear algebra over GF(2).
//!
//! Matrices are stored row-major, 64 columns per machine word, so row XOR
//! (the inner loop of elimination, syndrome computation and coset tests)
//! is word-parallel. Everything at the scales this crate targets
//! (n <= 1344 columns) is comfortably dense.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A bit vector over GF(2). Unused high bits of the last word are kept zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinVector {
    len: usize,
    words: Vec<u64>,
}

impl BinVector {
    pub fn zeros(len: usize) -> Self {
        BinVector {
            len,
            words: vec![0u64; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BinVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BinVector::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        let w = i / WORD_BITS;
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[w] |= mask;
        } else {
            self.words[w] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let cur = self.get(i);
        self.set(i, !cur);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BinVector) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BinVector) -> BinVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the AND of two vectors (the GF(2) inner product).
    pub fn dot(&self, other: &BinVector) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc & 1 == 1
    }

    /// True iff every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinVector) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Hex encoding of the underlying bytes, little-endian within each byte:
    /// column `8k + t` maps to bit `t` of byte `k`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for k in 0..nbytes {
            let byte = (self.words[k / 8] >> (8 * (k % 8))) as u8;
            s.push_str(&format!("{:02x}", byte));
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self, Gf2Error> {
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Gf2Error::Parse(format!(
                "hex string has {} chars, expected {} for {} bits",
                hex.len(),
                2 * nbytes,
                len
            )));
        }
        let mut v = BinVector::zeros(len);
        for k in 0..nbytes {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16)
                .map_err(|e| Gf2Error::Parse(format!("bad hex byte: {e}")))?;
            v.words[k / 8] |= (byte as u64) << (8 * (k % 8));
        }
        // Reject set bits beyond the declared length.
        if len % WORD_BITS != 0 || len % 8 != 0 {
            let last = v.words.len() - 1;
            let valid = len - last * WORD_BITS;
            if valid < WORD_BITS && v.words[last] >> valid != 0 {
                return Err(Gf2Error::Parse("set bits beyond vector length".into()));
            }
        }
        Ok(v)
    }
}

impl std::fmt::Debug for BinVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BinVector[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { 1 } else { 0 })?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over GF(2) with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BinMatrix {
            rows,
            cols,
            wpr,
            words: vec![0u64; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BinMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BinVector]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut m = BinMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.words[i * m.wpr..(i + 1) * m.wpr].copy_from_slice(r.words());
        }
        m
    }

    /// Build from 0/1 entries given row-major; for tests and small fixtures.
    pub fn from_dense(rows: &[&[u8]]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        let mut m = BinMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index out of range");
        (self.words[i * self.wpr + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let w = i * self.wpr + j / WORD_BITS;
        let mask = 1u64 << (j % WORD_BITS);
        if bit {
            self.words[w] |= mask;
        } else {
            self.words[w] &= !mask;
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.wpr..(i + 1) * self.wpr]
    }

    pub fn row(&self, i: usize) -> BinVector {
        BinVector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn xor_row_into(&self, i: usize, target: &mut BinVector) {
        assert_eq!(target.len, self.cols);
        for (t, w) in target.words.iter_mut().zip(self.row_words(i)) {
            *t ^= w;
        }
    }

    fn xor_rows(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.wpr, dst * self.wpr);
        for k in 0..self.wpr {
            self.words[d + k] ^= self.words[s + k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.words.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Entrywise XOR.
    pub fn add(&self, other: &BinMatrix) -> Result<BinMatrix, Gf2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Gf2Error::Dimension(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(out)
    }

    /// GF(2) matrix product. Row `i` of the result accumulates the rows of
    /// `other` selected by the set bits of row `i` of `self`.
    pub fn multiply(&self, other: &BinMatrix) -> Result<BinMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::Dimension(format!(
                "multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = i * out.wpr;
            for k in 0..self.cols {
                if self.get(i, k) {
                    let src = k * other.wpr;
                    for w in 0..other.wpr {
                        out.words[dst + w] ^= other.words[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v^T` (one parity bit per row).
    pub fn mul_vector(&self, v: &BinVector) -> Result<BinVector, Gf2Error> {
        if v.len != self.cols {
            return Err(Gf2Error::Dimension(format!(
                "mul_vector {}x{} by len {}",
                self.rows, self.cols, v.len
            )));
        }
        let mut out = BinVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row_words(i).iter().zip(&v.words) {
                acc ^= (a & b).count_ones() & 1;
            }
            if acc & 1 == 1 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &BinMatrix) -> Result<BinMatrix, Gf2Error> {
        if self.rows != other.rows {
            return Err(Gf2Error::Dimension(format!(
                "hstack {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(i, j, true);
                }
            }
            for j in 0..other.cols {
                if other.get(i, j) {
                    out.set(i, self.cols + j, true);
                }
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &BinMatrix) -> Result<BinMatrix, Gf2Error> {
        if self.cols != other.cols {
            return Err(Gf2Error::Dimension(format!(
                "vstack {} cols with {} cols",
                self.cols, other.cols
            )));
        }
        let mut out = BinMatrix::zeros(self.rows + other.rows, self.cols);
        out.words[..self.rows * self.wpr].copy_from_slice(&self.words);
        out.words[self.rows * self.wpr..].copy_from_slice(&other.words);
        Ok(out)
    }

    /// Rank by Gaussian elimination with plain leftmost pivoting.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&i| m.get(i, col));
            let Some(pivot) = pivot else { continue };
            m.swap_rows(rank, pivot);
            for i in 0..m.rows {
                if i != rank && m.get(i, col) {
                    m.xor_rows(rank, i);
                }
            }
            rank += 1;
        }
        rank
    }

    /// A basis of the right null space, one kernel vector per row of the
    /// returned matrix. `self * k^T = 0` for every row `k`.
    pub fn kernel_basis(&self) -> BinMatrix {
        // Reduce [self] while tracking pivot columns, then read free columns.
        let mut m = self.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&i| m.get(i, col));
            let Some(pivot) = pivot else { continue };
            m.swap_rows(rank, pivot);
            for i in 0..m.rows {
                if i != rank && m.get(i, col) {
                    m.xor_rows(rank, i);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = BinMatrix::zeros(free.len().max(1), m.cols);
        if free.is_empty() {
            return BinMatrix::zeros(0, m.cols);
        }
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if m.get(r, fc) {
                    basis.set(bi, pc, true);
                }
            }
        }
        basis
    }

    /// A particular solution `x` of `self * x^T = s`, or `None` if the
    /// system is infeasible.
    pub fn solve_particular(&self, s: &BinVector) -> Result<Option<BinVector>, Gf2Error> {
        if s.len != self.rows {
            return Err(Gf2Error::Dimension(format!(
                "solve {}x{} with rhs len {}",
                self.rows, self.cols, s.len
            )));
        }
        let mut m = self.clone();
        let mut rhs = s.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&i| m.get(i, col)) else {
                continue;
            };
            m.swap_rows(rank, p);
            let (br, bp) = (rhs.get(rank), rhs.get(p));
            rhs.set(rank, bp);
            rhs.set(p, br);
            for i in 0..m.rows {
                if i != rank && m.get(i, col) {
                    m.xor_rows(rank, i);
                    let b = rhs.get(i) ^ rhs.get(rank);
                    rhs.set(i, b);
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }
        // Rows below the rank must have zero rhs for feasibility.
        for i in rank..m.rows {
            if rhs.get(i) {
                return Ok(None);
            }
        }
        let mut x = BinVector::zeros(m.cols);
        for &(r, c) in &pivots {
            if rhs.get(r) {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }
}

impl std::fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", if self.get(i, j) { 1 } else { 0 })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Row-reduced echelon basis of a matrix's row space, reused across many
/// membership queries (coset tests run once per decoded trial).
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    rows: Vec<BinVector>,
    pivot_cols: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(m: &BinMatrix) -> Self {
        let mut rows: Vec<BinVector> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();
        for i in 0..m.rows() {
            let mut r = m.row(i);
            for (b, &pc) in rows.iter().zip(&pivot_cols) {
                if r.get(pc) {
                    r.xor_assign(b);
                }
            }
            if let Some(p) = r.iter_ones().next() {
                // Back-substitute into existing rows to keep the basis reduced.
                for (b, _) in rows.iter_mut().zip(&pivot_cols) {
                    if b.get(p) {
                        b.xor_assign(&r);
                    }
                }
                rows.push(r);
                pivot_cols.push(p);
            }
        }
        EchelonBasis {
            cols: m.cols(),
            rows,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; the remainder is zero iff `v` lies in
    /// the row space.
    pub fn reduce(&self, v: &BinVector) -> BinVector {
        assert_eq!(v.len(), self.cols, "reduce length mismatch");
        let mut r = v.clone();
        for (b, &pc) in self.rows.iter().zip(&self.pivot_cols) {
            if r.get(pc) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BinVector) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Whether `v` is a GF(2) combination of the rows of `m`.
pub fn in_row_space(v: &BinVector, m: &BinMatrix) -> Result<bool, Gf2Error> {
    if v.len() != m.cols() {
        return Err(Gf2Error::Dimension(format!(
            "in_row_space len {} vs {} cols",
            v.len(),
            m.cols()
        )));
    }
    Ok(EchelonBasis::new(m).contains(v))
}

/// Serialized form of a matrix: dimensions plus one hex bitstring per row.
#[derive(Serialize, Deserialize)]
pub struct BinMatrixFile {
    pub format: String,
    pub version: u32,
    pub rows: usize,
    pub cols: usize,
    pub row_hex: Vec<String>,
}

pub const MATRIX_FORMAT: &str = "binmatrix";
pub const MATRIX_VERSION: u32 = 1;

impl BinMatrix {
    pub fn to_hex_rows(&self) -> Vec<String> {
        (0..self.rows).map(|i| self.row(i).to_hex()).collect()
    }

    pub fn from_hex_rows(rows: usize, cols: usize, hex: &[String]) -> Result<Self, Gf2Error> {
        if hex.len() != rows {
            return Err(Gf2Error::Parse(format!(
                "{} hex rows for a {}-row matrix",
                hex.len(),
                rows
            )));
        }
        let vecs: Vec<BinVector> = hex
            .iter()
            .map(|h| BinVector::from_hex(cols, h))
            .collect::<Result<_, _>>()?;
        if rows == 0 {
            return Ok(BinMatrix::zeros(0, cols));
        }
        Ok(BinMatrix::from_rows(&vecs))
    }

    pub fn to_hex_json(&self) -> String {
        let file = BinMatrixFile {
            format: MATRIX_FORMAT.to_string(),
            version: MATRIX_VERSION,
            rows: self.rows,
            cols: self.cols,
            row_hex: self.to_hex_rows(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("matrix serialization");
        s.push('\n');
        s
    }

    pub fn from_hex_json(text: &str) -> Result<Self, Gf2Error> {
        let file: BinMatrixFile =
            serde_json::from_str(text).map_err(|e| Gf2Error::Parse(e.to_string()))?;
        if file.format != MATRIX_FORMAT {
            return Err(Gf2Error::Parse(format!("unknown format tag {}", file.format)));
        }
        if file.version != MATRIX_VERSION {
            return Err(Gf2Error::Parse(format!(
                "unsupported matrix format version {}",
                file.version
            )));
        }
        BinMatrix::from_hex_rows(file.rows, file.cols, &file.row_hex)
    }

    /// Export in the alist interchange format (1-based indices, zero-padded
    /// per-column and per-row neighbor lists).
    pub fn to_alist(&self) -> String {
        let n = self.cols;
        let m = self.rows;
        let col_lists: Vec<Vec<usize>> = (0..n)
            .map(|j| (0..m).filter(|&i| self.get(i, j)).collect())
            .collect();
        let row_lists: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..n).filter(|&j| self.get(i, j)).collect())
            .collect();
        let dv_max = col_lists.iter().map(Vec::len).max().unwrap_or(0);
        let dc_max = row_lists.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        out.push_str(&format!("{} {}\n{} {}\n", n, m, dv_max, dc_max));
        out.push_str(
            &col_lists
                .iter()
                .map(|l| l.len().to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push('\n');
        out.push_str(
            &row_lists
                .iter()
                .map(|l| l.len().to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push('\n');
        for l in &col_lists {
            let mut entries: Vec<String> = l.iter().map(|&i| (i + 1).to_string()).collect();
            entries.resize(dv_max, "0".to_string());
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
        for l in &row_lists {
            let mut entries: Vec<String> = l.iter().map(|&j| (j + 1).to_string()).collect();
            entries.resize(dc_max, "0".to_string());
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_alist(text: &str) -> Result<Self, Gf2Error> {
        let mut nums = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Gf2Error::Parse(e.to_string())));
        let mut next = |what: &str| {
            nums.next()
                .unwrap_or_else(|| Err(Gf2Error::Parse(format!("missing {what}"))))
        };
        let n = next("column count")?;
        let m = next("row count")?;
        let dv_max = next("max column weight")?;
        let _dc_max = next("max row weight")?;
        let mut col_deg = Vec::with_capacity(n);
        for _ in 0..n {
            col_deg.push(next("column degree")?);
        }
        let mut row_deg = Vec::with_capacity(m);
        for _ in 0..m {
            row_deg.push(next("row degree")?);
        }
        let mut mat = BinMatrix::zeros(m, n);
        for (j, &d) in col_deg.iter().enumerate() {
            for k in 0..dv_max {
                let e = next("column entry")?;
                if k < d {
                    if e == 0 || e > m {
                        return Err(Gf2Error::Parse(format!("column entry {e} out of range")));
                    }
                    mat.set(e - 1, j, true);
                } else if e != 0 {
                    return Err(Gf2Error::Parse("nonzero padding entry".into()));
                }
            }
        }
        // The row lists are redundant with the column lists; read and verify.
        let mut check = BinMatrix::zeros(m, n);
        let dc_max = _dc_max;
        for (i, &d) in row_deg.iter().enumerate() {
            for k in 0..dc_max {
                let e = next("row entry")?;
                if k < d {
                    if e == 0 || e > n {
                        return Err(Gf2Error::Parse(format!("row entry {e} out of range")));
                    }
                    check.set(i, e - 1, true);
                }
            }
        }
        if mat != check {
            return Err(Gf2Error::Parse(
                "alist column and row lists disagree".into(),
            ));
        }
        Ok(mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BinMatrix {
        let mut m = BinMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.5) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> BinVector {
        let mut v = BinVector::zeros(len);
        for i in 0..len {
            if rng.gen_bool(0.5) {
                v.set(i, true);
            }
        }
        v
    }

    /// Naive triple-loop product, the independent oracle for `multiply`.
    fn naive_multiply(a: &BinMatrix, b: &BinMatrix) -> BinMatrix {
        let mut out = BinMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = false;
                for k in 0..a.cols() {
                    acc ^= a.get(i, k) & b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Enumerate the full row span (2^rows sums); oracle for rank and
    /// membership on small matrices.
    fn row_span(m: &BinMatrix) -> Vec<BinVector> {
        assert!(m.rows() <= 12);
        let mut span = Vec::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut v = BinVector::zeros(m.cols());
            for i in 0..m.rows() {
                if mask >> i & 1 == 1 {
                    m.xor_row_into(i, &mut v);
                }
            }
            span.push(v);
        }
        span
    }

    #[test]
    fn identity_times_matrix_is_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 7, 9);
            let id = BinMatrix::identity(7);
            assert_eq!(id.multiply(&m).unwrap(), m);
        }
    }

    #[test]
    fn all_ones_square_is_zero_product() {
        let m = BinMatrix::from_dense(&[&[1, 1], &[1, 1]]);
        let p = m.multiply(&m).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn multiply_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 8, 8);
            let b = random_matrix(&mut rng, 8, 8);
            assert_eq!(a.multiply(&b).unwrap(), naive_multiply(&a, &b));
        }
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let a = BinMatrix::zeros(2, 3);
        let b = BinMatrix::zeros(2, 3);
        assert!(a.multiply(&b).is_err());
    }

    #[test]
    fn rank_identity_and_degenerate() {
        assert_eq!(BinMatrix::identity(5).rank(), 5);
        assert_eq!(BinMatrix::from_dense(&[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(BinMatrix::zeros(3, 4).rank(), 0);
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 10, 12);
            let distinct: std::collections::HashSet<Vec<u64>> =
                row_span(&m).into_iter().map(|v| v.words().to_vec()).collect();
            let expected = (distinct.len() as f64).log2().round() as usize;
            assert_eq!(m.rank(), expected);
        }
    }

    #[test]
    fn in_row_space_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_matrix(&mut rng, 5, 9);
        for i in 0..5 {
            assert!(in_row_space(&m.row(i), &m).unwrap());
        }
        assert!(in_row_space(&BinVector::zeros(9), &m).unwrap());
    }

    #[test]
    fn in_row_space_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 6, 10);
            let span: std::collections::HashSet<Vec<u64>> =
                row_span(&m).into_iter().map(|v| v.words().to_vec()).collect();
            for _ in 0..20 {
                let v = random_vector(&mut rng, 10);
                let expect = span.contains(&v.words().to_vec());
                assert_eq!(in_row_space(&v, &m).unwrap(), expect);
            }
        }
    }

    #[test]
    fn solve_particular_cases() {
        // Zero syndrome accepts the zero solution.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_matrix(&mut rng, 5, 8);
        let x = m.solve_particular(&BinVector::zeros(5)).unwrap().unwrap();
        assert!(m.mul_vector(&x).unwrap().is_zero());

        // Identity matrix returns the rhs itself.
        let id = BinMatrix::identity(6);
        let s = random_vector(&mut rng, 6);
        assert_eq!(id.solve_particular(&s).unwrap().unwrap(), s);

        // Construct-then-verify on random consistent systems.
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 6, 10);
            let x0 = random_vector(&mut rng, 10);
            let s = m.mul_vector(&x0).unwrap();
            let x = m.solve_particular(&s).unwrap().expect("consistent");
            assert_eq!(m.mul_vector(&x).unwrap(), s);
        }
    }

    #[test]
    fn solve_particular_flags_infeasible() {
        // Two equal rows with different rhs bits cannot be satisfied.
        let m = BinMatrix::from_dense(&[&[1, 0, 1], &[1, 0, 1]]);
        let s = BinVector::from_bits(&[1, 0]);
        assert_eq!(m.solve_particular(&s).unwrap(), None);
    }

    #[test]
    fn kernel_basis_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 6, 11);
            let k = m.kernel_basis();
            assert_eq!(m.rank() + k.rows(), m.cols());
            if k.rows() > 0 {
                let prod = m.multiply(&k.transpose()).unwrap();
                assert!(prod.is_zero());
            }
        }
    }

    #[test]
    fn transpose_involution_and_stacks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_matrix(&mut rng, 4, 7);
        assert_eq!(m.transpose().transpose(), m);
        let h = m.hstack(&m).unwrap();
        assert_eq!(h.cols(), 14);
        assert_eq!(h.rank(), m.rank());
        let v = m.vstack(&m).unwrap();
        assert_eq!(v.rows(), 8);
        assert_eq!(v.rank(), m.rank());
    }

    #[test]
    fn hex_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in [1usize, 7, 8, 63, 64, 65, 130] {
            let v = random_vector(&mut rng, len);
            let h = v.to_hex();
            assert_eq!(BinVector::from_hex(len, &h).unwrap(), v);
        }
    }

    #[test]
    fn hex_rejects_overflow_bits() {
        // 4-bit vector, byte with a bit beyond position 3 set.
        assert!(BinVector::from_hex(4, "10").is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = random_matrix(&mut rng, 5, 70);
        let text = m.to_hex_json();
        assert_eq!(BinMatrix::from_hex_json(&text).unwrap(), m);
        assert!(BinMatrix::from_hex_json("{\"format\":\"nope\"}").is_err());
    }

    #[test]
    fn alist_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 6, 9);
            let text = m.to_alist();
            assert_eq!(BinMatrix::from_alist(&text).unwrap(), m);
        }
    }

    #[test]
    fn alist_rejects_garbage() {
        assert!(BinMatrix::from_alist("3 2\n").is_err());
        assert!(BinMatrix::from_alist("not numbers").is_err());
    }

    #[test]
    fn echelon_membership_matches_one_shot() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_matrix(&mut rng, 8, 15);
        let basis = EchelonBasis::new(&m);
        assert_eq!(basis.rank(), m.rank());
        for _ in 0..30 {
            let v = random_vector(&mut rng, 15);
            assert_eq!(basis.contains(&v), in_row_space(&v, &m).unwrap());
        }
    }
}

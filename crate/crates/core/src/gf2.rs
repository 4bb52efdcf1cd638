//! Dense linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into 64-bit words so that row
//! additions and masked popcounts run a word at a time. Bit `i` of a vector
//! is stored in word `i / 64`, position `i % 64`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("row index {index} out of range for a matrix with {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("row_add needs two distinct rows, got {0} twice")]
    SameRow(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("invalid bit string {0:?}")]
    InvalidBitString(String),
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A fixed-length vector over GF(2).
///
/// Ordering is lexicographic on the bit string with bit 0 as the most
/// significant position, so `"011" < "100"`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// The standard basis vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Vector of length `len` with the listed positions set.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
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
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    fn check_len(&self, other: &BitVector) {
        assert_eq!(
            self.len, other.len,
            "bit vectors of different lengths ({} vs {})",
            self.len, other.len
        );
    }

    /// `self ^= other`.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        self.check_len(other);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// `self & !other`.
    pub fn and_not(&self, other: &BitVector) -> BitVector {
        self.check_len(other);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Popcount of `self & other` without allocating.
    #[inline]
    pub fn count_ones_and(&self, other: &BitVector) -> usize {
        self.check_len(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        self.count_ones_and(other) % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Indices of the set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let pos = diff.trailing_zeros();
                return if (a >> pos) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    /// Parses a string of `0`/`1` characters; character `i` is bit `i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Gf2Error::InvalidBitString(s.to_string())),
            }
        }
        Ok(v)
    }
}

/// A dense `rows x cols` matrix over GF(2), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows of equal length. An empty row list gives
    /// the `0 x 0` matrix.
    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BitVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {} columns",
                bad.len(),
                cols
            )));
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Builds a matrix from `0`/`1` row strings.
    pub fn parse_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, Gf2Error> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().trim().parse())
            .collect::<Result<Vec<BitVector>, _>>()?;
        Self::from_rows(parsed)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self, Gf2Error> {
        let mut m = BitMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Gf2Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for i in col.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bits(&self.rows.iter().map(|r| r.get(c)).collect::<Vec<_>>())
    }

    /// Replaces row `target` with `row[target] ^ row[source]`.
    pub fn row_add(&mut self, target: usize, source: usize) -> Result<(), Gf2Error> {
        let n = self.rows.len();
        for index in [target, source] {
            if index >= n {
                return Err(Gf2Error::RowOutOfRange { index, rows: n });
            }
        }
        if target == source {
            return Err(Gf2Error::SameRow(target));
        }
        let (dst, src) = if target < source {
            let (lo, hi) = self.rows.split_at_mut(source);
            (&mut lo[target], &hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(target);
            (&mut hi[0], &lo[source])
        };
        dst.xor_assign(src);
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Matrix product `self * other` over GF(2).
    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows.len() {
            return Err(Gf2Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows.len(),
                self.cols,
                other.rows.len(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(other.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols);
        BitVector::from_bits(&self.rows.iter().map(|r| r.dot(v)).collect::<Vec<_>>())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(i, r)| r.count_ones() == 1 && r.get(i))
    }

    pub fn rank(&self) -> usize {
        let mut m = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..m.len()).find(|&r| m[r].get(col)) else {
                continue;
            };
            m.swap(rank, pivot);
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.cols
    }

    /// Gauss-Jordan inversion; the pivot for each column is the first row
    /// at or below the diagonal with a one in that column.
    pub fn invert(&self) -> Result<BitMatrix, Gf2Error> {
        if !self.is_square() {
            return Err(Gf2Error::NotSquare {
                rows: self.rows.len(),
                cols: self.cols,
            });
        }
        let n = self.cols;
        let mut m = self.rows.clone();
        let mut inv = BitMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| m[r].get(col))
                .ok_or(Gf2Error::Singular)?;
            m.swap(col, pivot);
            inv.swap(col, pivot);
            let (pivot_row, pivot_inv) = (m[col].clone(), inv[col].clone());
            for r in 0..n {
                if r != col && m[r].get(col) {
                    m[r].xor_assign(&pivot_row);
                    inv[r].xor_assign(&pivot_inv);
                }
            }
        }
        Ok(BitMatrix { cols: n, rows: inv })
    }

    /// Sub-matrix on the given row and column index lists, in that order.
    pub fn select(&self, row_ids: &[usize], col_ids: &[usize]) -> BitMatrix {
        let rows = row_ids
            .iter()
            .map(|&r| {
                BitVector::from_bits(&col_ids.iter().map(|&c| self.get(r, c)).collect::<Vec<_>>())
            })
            .collect();
        BitMatrix {
            cols: col_ids.len(),
            rows,
        }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&str]) -> BitMatrix {
        BitMatrix::parse_rows(rows).unwrap()
    }

    #[test]
    fn row_add_xors_target_with_source() {
        let mut a = m(&["011", "110"]);
        a.row_add(0, 1).unwrap();
        assert_eq!(a, m(&["101", "110"]));
    }

    #[test]
    fn row_add_of_zero_row_is_noop() {
        let mut a = m(&["011", "000", "101"]);
        let before = a.clone();
        a.row_add(2, 1).unwrap();
        a.row_add(0, 1).unwrap();
        assert_eq!(a, before);
    }

    #[test]
    fn row_add_twice_restores() {
        let mut a = m(&["011", "110", "111"]);
        let before = a.clone();
        a.row_add(0, 2).unwrap();
        a.row_add(0, 2).unwrap();
        assert_eq!(a, before);
    }

    #[test]
    fn row_add_rejects_bad_indices() {
        let mut a = m(&["01", "10"]);
        assert_eq!(a.row_add(0, 0), Err(Gf2Error::SameRow(0)));
        assert_eq!(
            a.row_add(2, 0),
            Err(Gf2Error::RowOutOfRange { index: 2, rows: 2 })
        );
    }

    #[test]
    fn invert_identity_and_unitriangular() {
        assert_eq!(
            BitMatrix::identity(5).invert().unwrap(),
            BitMatrix::identity(5)
        );
        let u = m(&["11", "01"]);
        assert_eq!(u.invert().unwrap(), u);
    }

    #[test]
    fn invert_appendix_matrix_multiplies_back() {
        let p = m(&["1011", "0101", "0001", "0010"]);
        let inv = p.invert().unwrap();
        // Gauss-Jordan by hand: rows 2 and 3 are swapped unit vectors,
        // which leaves (1 0 1 1) and (0 1 1 0) for the top rows.
        assert_eq!(inv, m(&["1011", "0110", "0001", "0010"]));
        assert!(p.multiply(&inv).unwrap().is_identity());
        assert!(inv.multiply(&p).unwrap().is_identity());
    }

    #[test]
    fn invert_singular_fails() {
        assert_eq!(m(&["11", "11"]).invert(), Err(Gf2Error::Singular));
        assert!(matches!(
            m(&["110", "011"]).invert(),
            Err(Gf2Error::NotSquare { .. })
        ));
    }

    #[test]
    fn multiply_small_product() {
        assert_eq!(
            m(&["11", "01"]).multiply(&m(&["10", "11"])).unwrap(),
            m(&["01", "11"])
        );
        let a = m(&["101", "011"]);
        assert_eq!(a.multiply(&BitMatrix::identity(3)).unwrap(), a);
        assert!(a.multiply(&a).is_err());
    }

    #[test]
    fn ordering_is_lexicographic_with_bit_zero_most_significant() {
        let a: BitVector = "011".parse().unwrap();
        let b: BitVector = "100".parse().unwrap();
        assert!(a < b);
        let long_a = BitVector::unit(130, 100);
        let long_b = BitVector::unit(130, 3);
        assert!(long_a < long_b);
    }

    #[test]
    fn iter_ones_spans_words() {
        let v = BitVector::from_indices(200, [0, 63, 64, 130, 199]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 130, 199]);
        assert_eq!(v.count_ones(), 5);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(BitVector::ones(70).count_ones(), 70);
    }

    fn random_invertible(n: usize, ops: &[(usize, usize)]) -> BitMatrix {
        let mut a = BitMatrix::identity(n);
        for &(i, j) in ops {
            let (i, j) = (i % n, j % n);
            if i != j {
                a.row_add(i, j).unwrap();
            }
        }
        a
    }

    proptest! {
        #[test]
        fn product_with_inverse_is_identity(
            n in 1usize..40,
            ops in proptest::collection::vec((0usize..64, 0usize..64), 0..200),
        ) {
            let a = random_invertible(n, &ops);
            let inv = a.invert().unwrap();
            prop_assert!(a.multiply(&inv).unwrap().is_identity());
        }

        #[test]
        fn row_add_preserves_rank_and_is_involution(
            bits in proptest::collection::vec(any::<bool>(), 36),
            i in 0usize..6, j in 0usize..6,
        ) {
            prop_assume!(i != j);
            let rows = bits.chunks(6).map(BitVector::from_bits).collect();
            let a = BitMatrix::from_rows(rows).unwrap();
            let mut b = a.clone();
            b.row_add(i, j).unwrap();
            prop_assert_eq!(a.rank(), b.rank());
            b.row_add(i, j).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

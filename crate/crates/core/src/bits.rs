//! Dense binary vectors and matrices.
//!
//! [`BitMatrix`] is column-major: one [`TactFrame`] per column, which matches
//! how the channel produces the received matrix one tact at a time.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    Dimensions {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A length-`Q` binary vector: what one user puts on the channel in one tact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TactFrame {
    len: usize,
    words: Vec<u64>,
}

impl TactFrame {
    pub fn zeros(len: usize) -> Self {
        TactFrame {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut f = TactFrame::zeros(len);
        for i in 0..len {
            f.set(i, true);
        }
        f
    }

    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut f = TactFrame::zeros(len);
        for p in positions {
            f.set(p, true);
        }
        f
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
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn or_assign(&mut self, other: &TactFrame) -> Result<(), BitsError> {
        if other.len != self.len {
            return Err(BitsError::Length {
                expected: self.len,
                got: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        Ok(())
    }

    /// True if every 1 of `self` is a 1 of `other`.
    pub fn is_subset_of(&self, other: &TactFrame) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for TactFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "TactFrame({s})")
    }
}

/// A `rows × cols` binary matrix stored by column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    columns: Vec<TactFrame>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            columns: vec![TactFrame::zeros(rows); cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            columns: vec![TactFrame::ones(rows); cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<TactFrame>) -> Result<Self, BitsError> {
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(BitsError::Length {
                expected: rows,
                got: c.len(),
            });
        }
        Ok(BitMatrix { rows, columns })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].get(row)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.columns[col].set(row, value)
    }

    pub fn column(&self, col: usize) -> &TactFrame {
        &self.columns[col]
    }

    pub fn columns(&self) -> &[TactFrame] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<TactFrame> {
        self.columns
    }

    pub fn weight(&self) -> usize {
        self.columns.iter().map(TactFrame::weight).sum()
    }

    pub fn or_assign(&mut self, other: &BitMatrix) -> Result<(), BitsError> {
        self.check_same_shape(other)?;
        for (a, b) in self.columns.iter_mut().zip(&other.columns) {
            a.or_assign(b)?;
        }
        Ok(())
    }

    /// Elementwise `self ∧ other`.
    pub fn and(&self, other: &BitMatrix) -> Result<BitMatrix, BitsError> {
        self.check_same_shape(other)?;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut c = a.clone();
                for (x, y) in c.words.iter_mut().zip(&b.words) {
                    *x &= *y;
                }
                c
            })
            .collect();
        Ok(BitMatrix {
            rows: self.rows,
            columns,
        })
    }

    /// Rows `start..start + len` as a new matrix.
    pub fn row_block(&self, start: usize, len: usize) -> BitMatrix {
        assert!(start + len <= self.rows);
        let columns = self
            .columns
            .iter()
            .map(|c| TactFrame::from_positions(len, (0..len).filter(|&r| c.get(start + r))))
            .collect();
        BitMatrix { rows: len, columns }
    }

    pub(crate) fn check_same_shape(&self, other: &BitMatrix) -> Result<(), BitsError> {
        self.check_shape(other.rows, other.cols())
    }

    pub(crate) fn check_shape(&self, rows: usize, cols: usize) -> Result<(), BitsError> {
        if self.rows != rows || self.cols() != cols {
            return Err(BitsError::Dimensions {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols(),
            });
        }
        Ok(())
    }
}

/// One line per row, `'0'`/`'1'` characters, no separators.
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols() {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols())?;
        fmt::Display::fmt(self, f)
    }
}

/// Parses the row-per-line text format. Blank lines and `#` comments are
/// skipped; whitespace inside a row is ignored so `0 1 0` also works.
impl FromStr for BitMatrix {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, BitsError> {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(BitsError::Parse {
                        line: i + 1,
                        reason: format!("unexpected character {other:?}"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(BitsError::Parse {
                        line: i + 1,
                        reason: format!("row has {} entries, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                if b {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }
}

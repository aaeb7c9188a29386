//! Kautz-Singleton inner map, the subrange stacking layout, and the cover
//! condition `T ∧ Y = T`.
//!
//! A q-ary codeword of length `n` becomes a `q × n` one-hot matrix
//! ([`KsMatrix`]), stored sparsely as one row index per column. For
//! transmission it is cut into `m` parts of `t` columns and the parts are
//! stacked into a `Q × t` block ([`StackedBlock`]): part `j` occupies rows
//! `j q .. (j + 1) q` and rows from `m q` up are zero.

use thiserror::Error;

use crate::bits::{BitMatrix, BitsError, TactFrame};
use crate::field::{Field, Gf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KsError {
    #[error("column {col} has weight {weight}, expected exactly 1")]
    ColumnWeight { col: usize, weight: usize },
    #[error("row index {row} out of range for q = {q}")]
    RowRange { row: usize, q: usize },
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// Geometry of one user's transmission: `m` subranges of `q` subchannels out
/// of `Q`, over `t` tacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameLayout {
    pub q: usize,
    pub m: usize,
    pub t: usize,
    pub subchannels: usize,
}

impl FrameLayout {
    pub fn new(q: usize, m: usize, t: usize, subchannels: usize) -> Result<Self, KsError> {
        if q < 2 || m == 0 || t == 0 {
            return Err(KsError::Layout(format!("need q >= 2, m >= 1, t >= 1 (got q={q}, m={m}, t={t})")));
        }
        if m.checked_mul(q).is_none_or(|mq| mq > subchannels) {
            return Err(KsError::Layout(format!(
                "m·q = {}·{} exceeds Q = {subchannels}",
                m, q
            )));
        }
        Ok(FrameLayout { q, m, t, subchannels })
    }

    /// Codeword length `n = m t`.
    pub fn n(&self) -> usize {
        self.m * self.t
    }

    /// Row and tact of codeword position `p`.
    #[inline]
    pub fn locate(&self, position: usize, symbol_row: usize) -> (usize, usize) {
        let part = position / self.t;
        (part * self.q + symbol_row, position % self.t)
    }
}

/// `q × n` one-hot matrix; `rows[j]` is the row of the single 1 in column `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KsMatrix {
    q: usize,
    rows: Vec<u32>,
}

impl KsMatrix {
    pub fn new(q: usize, rows: Vec<u32>) -> Result<Self, KsError> {
        if let Some(&r) = rows.iter().find(|&&r| r as usize >= q) {
            return Err(KsError::RowRange { row: r as usize, q });
        }
        Ok(KsMatrix { q, rows })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Reads a dense one-hot matrix; every column must have weight 1.
    pub fn from_dense(m: &BitMatrix) -> Result<Self, KsError> {
        let rows = m
            .columns()
            .iter()
            .enumerate()
            .map(|(col, c)| match c.weight() {
                1 => Ok(c.ones_iter().next().expect("weight 1") as u32),
                weight => Err(KsError::ColumnWeight { col, weight }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KsMatrix { q: m.rows(), rows })
    }

    pub fn to_dense(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.q, self.rows.len());
        for (c, &r) in self.rows.iter().enumerate() {
            m.set(r as usize, c, true);
        }
        m
    }
}

/// One-hot encodes a codeword: column `j` has its 1 in the row given by the
/// canonical index of `codeword[j]` (`α_i` goes to row `i - 1`).
pub fn ks_encode(field: &Field, codeword: &[Gf]) -> KsMatrix {
    KsMatrix {
        q: field.order() as usize,
        rows: codeword.iter().map(|&c| field.index_of(c) as u32).collect(),
    }
}

pub fn ks_decode(field: &Field, matrix: &KsMatrix) -> Result<Vec<Gf>, KsError> {
    if matrix.q != field.order() as usize {
        return Err(KsError::Layout(format!(
            "matrix has {} rows but the field has {} elements",
            matrix.q,
            field.order()
        )));
    }
    Ok(matrix
        .rows
        .iter()
        .map(|&r| field.element_at(r as usize).expect("row < q"))
        .collect())
}

/// A `Q × t` transmission block built from a KS matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedBlock {
    layout: FrameLayout,
    ks: KsMatrix,
}

pub fn stack(matrix: &KsMatrix, layout: FrameLayout) -> Result<StackedBlock, KsError> {
    if matrix.q != layout.q || matrix.n() != layout.n() {
        return Err(KsError::Layout(format!(
            "a {}x{} KS matrix does not fit m={}, t={}, q={}",
            matrix.q,
            matrix.n(),
            layout.m,
            layout.t,
            layout.q
        )));
    }
    Ok(StackedBlock {
        layout,
        ks: matrix.clone(),
    })
}

impl StackedBlock {
    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn unstack(&self) -> KsMatrix {
        self.ks.clone()
    }

    /// `(row, tact)` of every 1, `m` per tact.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ks
            .rows
            .iter()
            .enumerate()
            .map(|(p, &r)| self.layout.locate(p, r as usize))
    }

    /// Column `tact` as a length-`Q` frame of weight `m`.
    pub fn column(&self, tact: usize) -> TactFrame {
        let l = &self.layout;
        TactFrame::from_positions(
            l.subchannels,
            (0..l.m).map(|j| j * l.q + self.ks.rows[j * l.t + tact] as usize),
        )
    }

    pub fn to_dense(&self) -> BitMatrix {
        let l = &self.layout;
        BitMatrix::from_columns(l.subchannels, (0..l.t).map(|c| self.column(c)).collect())
            .expect("columns have length Q")
    }
}

/// Unstacks a dense `Q × t` block back into the KS matrix, checking that
/// rows at and beyond `m q` are zero and each part column is one-hot.
pub fn unstack_dense(block: &BitMatrix, layout: FrameLayout) -> Result<KsMatrix, KsError> {
    block.check_shape(layout.subchannels, layout.t)?;
    let mut rows = vec![0u32; layout.n()];
    for tact in 0..layout.t {
        let col = block.column(tact);
        if let Some(r) = col.ones_iter().find(|&r| r >= layout.m * layout.q) {
            return Err(KsError::RowRange { row: r, q: layout.m * layout.q });
        }
        for j in 0..layout.m {
            let ones: Vec<usize> = (0..layout.q).filter(|&r| col.get(j * layout.q + r)).collect();
            if ones.len() != 1 {
                return Err(KsError::ColumnWeight {
                    col: j * layout.t + tact,
                    weight: ones.len(),
                });
            }
            rows[j * layout.t + tact] = ones[0] as u32;
        }
    }
    Ok(KsMatrix { q: layout.q, rows })
}

/// The cover condition: true iff every 1 of `block` is a 1 of `received`.
pub fn cover_check(block: &StackedBlock, received: &BitMatrix) -> Result<bool, KsError> {
    received.check_shape(block.layout.subchannels, block.layout.t)?;
    Ok(block.ones().all(|(r, c)| received.get(r, c)))
}

/// Cover condition on dense matrices, `T ∧ Y = T` literally.
pub fn cover_check_dense(t: &BitMatrix, y: &BitMatrix) -> Result<bool, KsError> {
    Ok(t.and(y)? == *t)
}

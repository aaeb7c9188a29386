//! Cover-condition decoding.
//!
//! [`exhaustive_decode`] checks `T_l ∧ Y = T_l` for every codeword `c_l` and
//! succeeds only when exactly one codeword survives. The transmitted word
//! always survives (the channel never erases a 1), so the decoder either
//! returns the right word or reports a failure; it cannot be wrong.
//!
//! [`ConcatenatedCode`] splits that search: each of the `m` subranges is
//! decoded on its own against the small inner code, ambiguous subranges
//! become erasures, and the outer code fills them in by Gaussian elimination.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitMatrix;
use crate::channel::BlockSource;
use crate::codes::{CodeError, LinearCode, DEFAULT_ENUMERATION_LIMIT};
use crate::field::{Field, FieldError, Gf};
use crate::ks::{stack, FrameLayout, KsError, KsMatrix, StackedBlock};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("layout mismatch: {0}")]
    Layout(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Ks(#[from] KsError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How much of the candidate list to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    /// Stop at the second candidate; enough to tell success from failure.
    #[default]
    Status,
    /// Collect every candidate.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(Vec<Gf>),
    /// Two or more codewords satisfy the cover condition. In
    /// [`DecodeMode::Status`] only the first two are listed; the
    /// concatenated decoder lists none.
    Failure { candidates: Vec<Vec<Gf>> },
}

impl DecodeOutcome {
    pub fn is_decoded(&self) -> bool {
        matches!(self, DecodeOutcome::Decoded(_))
    }

    pub fn codeword(&self) -> Option<&[Gf]> {
        match self {
            DecodeOutcome::Decoded(c) => Some(c),
            DecodeOutcome::Failure { .. } => None,
        }
    }
}

/// A code with every codeword pre-mapped to its KS row indices.
#[derive(Debug, Clone)]
pub struct Codebook {
    code: LinearCode,
    rows: Vec<u32>,
    size: usize,
}

impl Codebook {
    pub fn new(code: LinearCode) -> Result<Self, DecodeError> {
        Codebook::with_limit(code, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn with_limit(code: LinearCode, limit: u64) -> Result<Self, DecodeError> {
        let field = Arc::clone(code.field());
        let mut rows = Vec::new();
        let mut size = 0;
        for c in code.codewords_with_limit(limit)? {
            rows.extend(c.iter().map(|&s| field.index_of(s) as u32));
            size += 1;
        }
        Ok(Codebook { code, rows, size })
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// KS row indices of codeword `index` (messages in mixed-radix order).
    pub fn rows(&self, index: usize) -> &[u32] {
        let n = self.code.n();
        &self.rows[index * n..(index + 1) * n]
    }

    pub fn codeword(&self, index: usize) -> Vec<Gf> {
        self.code.encode_unchecked(&self.code.message_at(index as u64))
    }

    pub fn ks_matrix(&self, index: usize) -> KsMatrix {
        KsMatrix::new(self.code.field().order() as usize, self.rows(index).to_vec()).expect("rows < q")
    }

    pub fn block(&self, index: usize, layout: FrameLayout) -> Result<StackedBlock, DecodeError> {
        Ok(stack(&self.ks_matrix(index), layout)?)
    }

    fn check_layout(&self, layout: &FrameLayout) -> Result<(), DecodeError> {
        if layout.q != self.code.field().order() as usize || layout.n() != self.code.n() {
            return Err(DecodeError::Layout(format!(
                "code of length {} over GF({}) does not fit m={}, t={}, q={}",
                self.code.n(),
                self.code.field().order(),
                layout.m,
                layout.t,
                layout.q
            )));
        }
        Ok(())
    }

    #[inline]
    fn covered(&self, index: usize, y: &BitMatrix, layout: &FrameLayout, row_offset: usize) -> bool {
        self.rows(index).iter().enumerate().all(|(p, &r)| {
            let (row, col) = layout.locate(p, r as usize);
            y.get(row_offset + row, col)
        })
    }

    /// Indices of codewords satisfying the cover condition, stopping once
    /// `limit` are found.
    pub fn candidates(
        &self,
        y: &BitMatrix,
        layout: &FrameLayout,
        limit: Option<usize>,
    ) -> Result<Vec<usize>, DecodeError> {
        self.check_layout(layout)?;
        y.check_shape(layout.subchannels, layout.t).map_err(KsError::from)?;
        Ok(self.candidates_at(y, layout, 0, limit))
    }

    fn candidates_at(&self, y: &BitMatrix, layout: &FrameLayout, row_offset: usize, limit: Option<usize>) -> Vec<usize> {
        let cap = limit.unwrap_or(usize::MAX);
        let mut out = Vec::new();
        for i in 0..self.size {
            if self.covered(i, y, layout, row_offset) {
                out.push(i);
                if out.len() >= cap {
                    break;
                }
            }
        }
        out
    }
}

/// Full-stream interference source drawing uniform codewords from a codebook.
pub struct CodebookSource<'a> {
    pub book: &'a Codebook,
    pub layout: FrameLayout,
}

impl BlockSource for CodebookSource<'_> {
    fn layout(&self) -> FrameLayout {
        self.layout
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> StackedBlock {
        let i = rng.gen_range(0..self.book.len());
        self.book.block(i, self.layout).expect("codebook matches layout")
    }
}

/// Exhaustive search over all codewords of `book`'s code.
pub fn exhaustive_decode(
    y: &BitMatrix,
    book: &Codebook,
    layout: &FrameLayout,
    mode: DecodeMode,
) -> Result<DecodeOutcome, DecodeError> {
    let limit = match mode {
        DecodeMode::Status => Some(2),
        DecodeMode::Diagnostic => None,
    };
    let found = book.candidates(y, layout, limit)?;
    Ok(match found.as_slice() {
        [only] => DecodeOutcome::Decoded(book.codeword(*only)),
        _ => DecodeOutcome::Failure {
            candidates: found.iter().map(|&i| book.codeword(i)).collect(),
        },
    })
}

/// `C_O ◊ C_I`: an outer `(m, k_O, d_O)` code over GF(q^{k_I}) whose symbols
/// are inner messages of an inner `(t, k_I, d_I)` code over GF(q).
///
/// Outer symbols and inner messages correspond through the coordinates of
/// GF(q^{k_I}) over GF(q) (see [`Field::to_base_digits`]). Inner codeword `j`
/// occupies positions `j t .. (j + 1) t`, which stacking puts in subrange `j`.
#[derive(Debug, Clone)]
pub struct ConcatenatedCode {
    outer: LinearCode,
    inner: Codebook,
}

impl ConcatenatedCode {
    pub fn new(outer: LinearCode, inner: LinearCode) -> Result<Self, DecodeError> {
        let k_inner = inner.k() as u32;
        if !outer.field().is_extension_of(inner.field(), k_inner) {
            return Err(DecodeError::Layout(format!(
                "outer field GF({}) is not the degree-{} extension of the inner field GF({})",
                outer.field().order(),
                k_inner,
                inner.field().order()
            )));
        }
        Ok(ConcatenatedCode {
            outer,
            inner: Codebook::new(inner)?,
        })
    }

    pub fn outer(&self) -> &LinearCode {
        &self.outer
    }

    pub fn inner(&self) -> &LinearCode {
        self.inner.code()
    }

    pub fn inner_codebook(&self) -> &Codebook {
        &self.inner
    }

    pub fn field(&self) -> &Arc<Field> {
        self.inner.code().field()
    }

    /// Number of subranges, the outer length.
    pub fn m(&self) -> usize {
        self.outer.n()
    }

    /// Tacts, the inner length.
    pub fn t(&self) -> usize {
        self.inner.code().n()
    }

    pub fn n(&self) -> usize {
        self.m() * self.t()
    }

    /// Dimension in GF(q) symbols, `k_O k_I`.
    pub fn k(&self) -> usize {
        self.outer.k() * self.inner.code().k()
    }

    /// `d_O d_I`, a lower bound on the minimum distance.
    pub fn designed_distance(&self) -> usize {
        self.outer.d() * self.inner.code().d()
    }

    pub fn layout(&self, subchannels: usize) -> Result<FrameLayout, DecodeError> {
        Ok(FrameLayout::new(
            self.field().order() as usize,
            self.m(),
            self.t(),
            subchannels,
        )?)
    }

    pub fn symbol_to_inner_message(&self, symbol: Gf) -> Vec<Gf> {
        if self.inner.code().k() == 1 {
            vec![symbol]
        } else {
            self.outer.field().to_base_digits(symbol)
        }
    }

    pub fn inner_message_to_symbol(&self, message: &[Gf]) -> Result<Gf, DecodeError> {
        if self.inner.code().k() == 1 {
            return Ok(self.outer.field().element(message[0].0 as u64)?);
        }
        Ok(self.outer.field().from_base_digits(message)?)
    }

    /// Encodes `k_O` outer-field symbols into `m t` GF(q) symbols.
    pub fn encode(&self, message: &[Gf]) -> Result<Vec<Gf>, DecodeError> {
        let outer_word = self.outer.encode(message)?;
        let mut out = Vec::with_capacity(self.n());
        for &s in &outer_word {
            out.extend(self.inner.code().encode(&self.symbol_to_inner_message(s))?);
        }
        Ok(out)
    }

    /// Encodes `k_O k_I` GF(q) symbols, `k_I` per outer symbol.
    pub fn encode_base(&self, message: &[Gf]) -> Result<Vec<Gf>, DecodeError> {
        let k_i = self.inner.code().k();
        if message.len() != self.k() {
            return Err(CodeError::Length {
                expected: self.k(),
                got: message.len(),
            }
            .into());
        }
        let outer_msg = message
            .chunks(k_i)
            .map(|c| self.inner_message_to_symbol(c))
            .collect::<Result<Vec<_>, _>>()?;
        self.encode(&outer_msg)
    }

    /// The whole concatenated code as a linear code over GF(q), with its
    /// minimum distance found by enumeration.
    pub fn as_linear_code(&self) -> Result<LinearCode, DecodeError> {
        let k = self.k();
        let generator = (0..k)
            .map(|i| {
                let mut e = vec![Gf::ZERO; k];
                e[i] = Gf::ONE;
                self.encode_base(&e)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LinearCode::from_generator(self.field(), generator, None)?)
    }

    /// Cover-condition search over the inner code restricted to subrange
    /// `block` of `y`. `None` is an erasure.
    pub fn inner_decode_block(
        &self,
        y: &BitMatrix,
        layout: &FrameLayout,
        block: usize,
    ) -> Result<Option<Gf>, DecodeError> {
        self.check_layout(layout, y)?;
        Ok(self.inner_decode_unchecked(y, layout, block))
    }

    fn inner_decode_unchecked(&self, y: &BitMatrix, layout: &FrameLayout, block: usize) -> Option<Gf> {
        let inner_layout = FrameLayout {
            q: layout.q,
            m: 1,
            t: layout.t,
            subchannels: layout.q,
        };
        match self.inner.candidates_at(y, &inner_layout, block * layout.q, Some(2)).as_slice() {
            [only] => {
                let msg = self.inner.code().message_at(*only as u64);
                Some(self.inner_message_to_symbol(&msg).expect("inner message maps to an outer symbol"))
            }
            _ => None,
        }
    }

    /// Inner decoding of every subrange: the outer word with erasures.
    pub fn inner_decode_all(&self, y: &BitMatrix, layout: &FrameLayout) -> Result<Vec<Option<Gf>>, DecodeError> {
        self.check_layout(layout, y)?;
        Ok((0..self.m()).map(|j| self.inner_decode_unchecked(y, layout, j)).collect())
    }

    /// Inner exhaustive decoding, then outer erasure correction.
    pub fn decode(&self, y: &BitMatrix, layout: &FrameLayout) -> Result<DecodeOutcome, DecodeError> {
        let outer_word = self.inner_decode_all(y, layout)?;
        Ok(match self.outer.solve_message(&outer_word)? {
            Some(msg) => DecodeOutcome::Decoded(self.encode(&msg)?),
            None => DecodeOutcome::Failure { candidates: Vec::new() },
        })
    }

    fn check_layout(&self, layout: &FrameLayout, y: &BitMatrix) -> Result<(), DecodeError> {
        if layout.q != self.field().order() as usize || layout.m != self.m() || layout.t != self.t() {
            return Err(DecodeError::Layout(format!(
                "concatenated code needs q={}, m={}, t={}",
                self.field().order(),
                self.m(),
                self.t()
            )));
        }
        y.check_shape(layout.subchannels, layout.t).map_err(KsError::from)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::ks::ks_encode;
    use rand::SeedableRng;

    fn rs62() -> Codebook {
        let f = Field::new(7, 1).unwrap();
        Codebook::new(LinearCode::reed_solomon(&f, 6, 2).unwrap()).unwrap()
    }

    #[test]
    fn codebook_matches_ks_encoding() {
        let book = rs62();
        assert_eq!(book.len(), 49);
        let f = book.code().field().clone();
        for i in 0..49 {
            assert_eq!(book.ks_matrix(i), ks_encode(&f, &book.codeword(i)));
        }
    }

    #[test]
    fn clean_reception_decodes_every_codeword() {
        let book = rs62();
        for layout in [FrameLayout::new(7, 1, 6, 7).unwrap(), FrameLayout::new(7, 2, 3, 14).unwrap()] {
            for i in 0..book.len() {
                let y = book.block(i, layout).unwrap().to_dense();
                let out = exhaustive_decode(&y, &book, &layout, DecodeMode::Diagnostic).unwrap();
                assert_eq!(out, DecodeOutcome::Decoded(book.codeword(i)));
            }
        }
    }

    #[test]
    fn all_ones_fails_with_every_candidate() {
        let book = rs62();
        let layout = FrameLayout::new(7, 1, 6, 7).unwrap();
        let y = BitMatrix::ones(7, 6);
        match exhaustive_decode(&y, &book, &layout, DecodeMode::Diagnostic).unwrap() {
            DecodeOutcome::Failure { candidates } => assert_eq!(candidates.len(), 49),
            other => panic!("{other:?}"),
        }
        match exhaustive_decode(&y, &book, &layout, DecodeMode::Status).unwrap() {
            DecodeOutcome::Failure { candidates } => assert_eq!(candidates.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn layout_mismatch_is_an_error() {
        let book = rs62();
        let layout = FrameLayout::new(7, 2, 2, 14).unwrap();
        assert!(matches!(
            exhaustive_decode(&BitMatrix::zeros(14, 2), &book, &layout, DecodeMode::Status),
            Err(DecodeError::Layout(_))
        ));
        let layout = FrameLayout::new(7, 1, 6, 7).unwrap();
        assert!(exhaustive_decode(&BitMatrix::zeros(8, 6), &book, &layout, DecodeMode::Status).is_err());
    }

    #[test]
    fn adding_ones_never_shrinks_the_candidate_set() {
        let book = rs62();
        let layout = FrameLayout::new(7, 2, 3, 14).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let mut y = book.block(rng.gen_range(0..49), layout).unwrap().to_dense();
            let mut prev = book.candidates(&y, &layout, None).unwrap();
            for _ in 0..15 {
                y.set(rng.gen_range(0..14), rng.gen_range(0..3), true);
                let next = book.candidates(&y, &layout, None).unwrap();
                assert!(prev.iter().all(|c| next.contains(c)));
                prev = next;
            }
        }
    }

    fn desk_concatenated() -> ConcatenatedCode {
        let f = Field::new(7, 1).unwrap();
        let outer = LinearCode::reed_solomon(&f, 4, 2).unwrap();
        let inner = LinearCode::reed_solomon(&f, 3, 1).unwrap();
        ConcatenatedCode::new(outer, inner).unwrap()
    }

    #[test]
    fn concatenated_parameters_and_zero_message() {
        let cc = desk_concatenated();
        assert_eq!((cc.m(), cc.t(), cc.n(), cc.k()), (4, 3, 12, 2));
        assert_eq!(cc.designed_distance(), 9);
        assert_eq!(cc.encode(&[Gf::ZERO, Gf::ZERO]).unwrap(), vec![Gf::ZERO; 12]);
    }

    #[test]
    fn concatenated_distance_meets_design() {
        let cc = desk_concatenated();
        let lin = cc.as_linear_code().unwrap();
        assert!(lin.d() >= cc.designed_distance());
        let words: Vec<_> = lin.codewords().unwrap().collect();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                assert!(crate::codes::distance(a, b) >= 9);
            }
        }
    }

    #[test]
    fn trivial_inner_code_reduces_to_outer_encoding() {
        let f = Field::new(7, 1).unwrap();
        let outer = LinearCode::reed_solomon(&f, 5, 3).unwrap();
        let inner = LinearCode::from_generator(&f, vec![vec![Gf::ONE]], None).unwrap();
        let cc = ConcatenatedCode::new(outer.clone(), inner).unwrap();
        for msg in [[Gf(1), Gf(2), Gf(3)], [Gf(6), Gf(0), Gf(4)]] {
            assert_eq!(cc.encode(&msg).unwrap(), outer.encode(&msg).unwrap());
        }
    }

    #[test]
    fn extension_outer_field_bridge() {
        let base = Field::new(7, 1).unwrap();
        let ext = Field::extension(&base, 2).unwrap();
        let outer = LinearCode::reed_solomon(&ext, 4, 2).unwrap();
        let inner = LinearCode::reed_solomon(&base, 3, 2).unwrap();
        let cc = ConcatenatedCode::new(outer, inner).unwrap();
        assert_eq!(cc.k(), 4);
        for v in 0..49 {
            let digits = cc.symbol_to_inner_message(Gf(v));
            assert_eq!(cc.inner_message_to_symbol(&digits).unwrap(), Gf(v));
        }
        let msg = [Gf(3), Gf(5), Gf(0), Gf(6)];
        let word = cc.encode_base(&msg).unwrap();
        let layout = cc.layout(28).unwrap();
        let book = Codebook::new(cc.as_linear_code().unwrap()).unwrap();
        let idx = (0..book.len()).find(|&i| book.codeword(i) == word).unwrap();
        let y = book.block(idx, layout).unwrap().to_dense();
        assert_eq!(cc.decode(&y, &layout).unwrap(), DecodeOutcome::Decoded(word));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let f7 = Field::new(7, 1).unwrap();
        let f5 = Field::new(5, 1).unwrap();
        let outer = LinearCode::reed_solomon(&f5, 4, 2).unwrap();
        let inner = LinearCode::reed_solomon(&f7, 3, 1).unwrap();
        assert!(ConcatenatedCode::new(outer, inner).is_err());
    }

    #[test]
    fn inner_blocks_clean_and_saturated() {
        let cc = desk_concatenated();
        let layout = cc.layout(28).unwrap();
        let word = cc.encode(&[Gf(2), Gf(5)]).unwrap();
        let f = cc.field().clone();
        let y = stack(&ks_encode(&f, &word), layout).unwrap().to_dense();
        let outer_word = cc.outer().encode(&[Gf(2), Gf(5)]).unwrap();
        for j in 0..4 {
            assert_eq!(cc.inner_decode_block(&y, &layout, j).unwrap(), Some(outer_word[j]));
        }
        assert_eq!(cc.decode(&y, &layout).unwrap(), DecodeOutcome::Decoded(word.clone()));

        // saturate subranges with all-ones: d_O = 3 erasures exceed the budget
        let mut y3 = y.clone();
        for j in 0..3 {
            for r in 0..7 {
                for c in 0..3 {
                    y3.set(j * 7 + r, c, true);
                }
            }
        }
        assert_eq!(cc.inner_decode_block(&y3, &layout, 0).unwrap(), None);
        assert!(!cc.decode(&y3, &layout).unwrap().is_decoded());

        // two erasures are still correctable
        let mut y2 = y.clone();
        for j in [1, 3] {
            for r in 0..7 {
                for c in 0..3 {
                    y2.set(j * 7 + r, c, true);
                }
            }
        }
        assert_eq!(cc.decode(&y2, &layout).unwrap(), DecodeOutcome::Decoded(word));
    }
}

//! Linear block codes over a [`Field`].

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::field::{Field, FieldError, Gf};

/// Default cap on `q^k` for anything that enumerates a whole code.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    Parameters(String),
    #[error("expected a vector of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("code has q^k = {size} codewords, above the enumeration limit {limit}")]
    EnumerationLimit { size: u128, limit: u64 },
    #[error("received word does not agree with any codeword on its unerased positions")]
    Inconsistent,
    #[error("weight distribution needs enumeration or an MDS code")]
    NoWeightDistribution,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Evaluation code, possibly with column multipliers. Always MDS.
    ReedSolomon,
    Generic,
}

/// An `(n, k, d)` linear code given by a `k × n` generator matrix.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<Field>,
    n: usize,
    k: usize,
    d: usize,
    generator: Vec<Vec<Gf>>,
    kind: CodeKind,
}

impl LinearCode {
    /// RS code evaluating messages (polynomial coefficients, lowest degree
    /// first) at the first `n` nonzero elements of the canonical enumeration,
    /// i.e. at `g^0, g^1, ..., g^{n-1}`.
    pub fn reed_solomon(field: &Arc<Field>, n: usize, k: usize) -> Result<LinearCode, CodeError> {
        if n > field.order() as usize - 1 {
            return Err(CodeError::Parameters(format!(
                "RS length {n} exceeds the {} nonzero points of GF({})",
                field.order() - 1,
                field.order()
            )));
        }
        let points = (1..=n)
            .map(|i| field.element_at(i))
            .collect::<Result<Vec<_>, _>>()?;
        LinearCode::generalized_reed_solomon(field, &points, &vec![Gf::ONE; n], k)
    }

    /// Generalized RS code: codeword `j` is `multipliers[j] · f(points[j])`.
    pub fn generalized_reed_solomon(
        field: &Arc<Field>,
        points: &[Gf],
        multipliers: &[Gf],
        k: usize,
    ) -> Result<LinearCode, CodeError> {
        let n = points.len();
        if multipliers.len() != n {
            return Err(CodeError::Length {
                expected: n,
                got: multipliers.len(),
            });
        }
        if k == 0 || k > n {
            return Err(CodeError::Parameters(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        for (i, p) in points.iter().enumerate() {
            field.element(p.0 as u64)?;
            if points[..i].contains(p) {
                return Err(CodeError::Parameters(format!("repeated evaluation point {p}")));
            }
        }
        if multipliers.iter().any(|v| v.is_zero() || !field.contains(*v)) {
            return Err(CodeError::Parameters("multipliers must be nonzero field elements".into()));
        }
        let generator = (0..k)
            .map(|i| {
                points
                    .iter()
                    .zip(multipliers)
                    .map(|(&x, &v)| field.mul(v, field.pow(x, i as u64)))
                    .collect()
            })
            .collect();
        Ok(LinearCode {
            field: Arc::clone(field),
            n,
            k,
            d: n - k + 1,
            generator,
            kind: CodeKind::ReedSolomon,
        })
    }

    /// Code with an arbitrary full-rank generator. When `d` is `None` the
    /// minimum distance is found by enumeration.
    pub fn from_generator(
        field: &Arc<Field>,
        generator: Vec<Vec<Gf>>,
        d: Option<usize>,
    ) -> Result<LinearCode, CodeError> {
        let k = generator.len();
        if k == 0 {
            return Err(CodeError::Parameters("generator has no rows".into()));
        }
        let n = generator[0].len();
        if generator.iter().any(|r| r.len() != n) || n < k {
            return Err(CodeError::Parameters("generator must be a k × n matrix with k <= n".into()));
        }
        if generator.iter().flatten().any(|g| !field.contains(*g)) {
            return Err(CodeError::Parameters("generator entry outside the field".into()));
        }
        if rank(field, generator.clone()) != k {
            return Err(CodeError::Parameters("generator does not have full row rank".into()));
        }
        let mut code = LinearCode {
            field: Arc::clone(field),
            n,
            k,
            d: 0,
            generator,
            kind: CodeKind::Generic,
        };
        code.d = match d {
            Some(d) => d,
            None => code.enumerated_min_distance(DEFAULT_ENUMERATION_LIMIT)?,
        };
        Ok(code)
    }

    /// Uniformly random full-rank generator; `d` found by enumeration.
    pub fn random<R: Rng + ?Sized>(
        field: &Arc<Field>,
        n: usize,
        k: usize,
        rng: &mut R,
    ) -> Result<LinearCode, CodeError> {
        if k == 0 || k > n {
            return Err(CodeError::Parameters(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        loop {
            let g: Vec<Vec<Gf>> = (0..k)
                .map(|_| (0..n).map(|_| Gf(rng.gen_range(0..field.order()))).collect())
                .collect();
            if rank(field, g.clone()) == k {
                return LinearCode::from_generator(field, g, None);
            }
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn is_mds(&self) -> bool {
        self.d == self.n - self.k + 1
    }

    pub fn generator(&self) -> &[Vec<Gf>] {
        &self.generator
    }

    /// Number of codewords, `q^k`.
    pub fn size(&self) -> u128 {
        (self.field.order() as u128)
            .checked_pow(self.k as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn encode(&self, message: &[Gf]) -> Result<Vec<Gf>, CodeError> {
        if message.len() != self.k {
            return Err(CodeError::Length {
                expected: self.k,
                got: message.len(),
            });
        }
        if let Some(m) = message.iter().find(|m| !self.field.contains(**m)) {
            return Err(FieldError::OutOfRange {
                value: m.0 as u64,
                order: self.field.order(),
            }
            .into());
        }
        Ok(self.encode_unchecked(message))
    }

    pub(crate) fn encode_unchecked(&self, message: &[Gf]) -> Vec<Gf> {
        let f = &*self.field;
        let mut out = vec![Gf::ZERO; self.n];
        for (row, &m) in self.generator.iter().zip(message) {
            if m.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(m, g));
            }
        }
        out
    }

    /// Message number `index` in mixed-radix order: digit `i` is
    /// `(index / q^i) mod q`, read as an element value.
    pub fn message_at(&self, mut index: u64) -> Vec<Gf> {
        let q = self.field.order() as u64;
        (0..self.k)
            .map(|_| {
                let d = Gf((index % q) as u32);
                index /= q;
                d
            })
            .collect()
    }

    /// All `q^k` codewords, zero word first.
    pub fn codewords(&self) -> Result<Codewords<'_>, CodeError> {
        self.codewords_with_limit(DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn codewords_with_limit(&self, limit: u64) -> Result<Codewords<'_>, CodeError> {
        let size = self.size();
        if size > limit as u128 {
            return Err(CodeError::EnumerationLimit { size, limit });
        }
        Ok(Codewords {
            code: self,
            next: 0,
            total: size as u64,
        })
    }

    fn enumerated_min_distance(&self, limit: u64) -> Result<usize, CodeError> {
        Ok(self
            .codewords_with_limit(limit)?
            .skip(1)
            .map(|c| weight(&c))
            .min()
            .unwrap_or(self.n))
    }

    /// Weight distribution, analytic for MDS codes, enumerated otherwise.
    pub fn weight_distribution(&self) -> Result<WeightDistribution, CodeError> {
        if self.is_mds() {
            return Ok(WeightDistribution::mds(self.n, self.k, self.field.order() as u64));
        }
        self.enumerated_weight_distribution(DEFAULT_ENUMERATION_LIMIT)
            .map_err(|e| match e {
                CodeError::EnumerationLimit { .. } => CodeError::NoWeightDistribution,
                other => other,
            })
    }

    pub fn enumerated_weight_distribution(&self, limit: u64) -> Result<WeightDistribution, CodeError> {
        let mut counts = vec![0u64; self.n + 1];
        for c in self.codewords_with_limit(limit)? {
            counts[weight(&c)] += 1;
        }
        Ok(WeightDistribution {
            counts: counts.into_iter().map(BigUint::from).collect(),
        })
    }

    /// Recovers the message from the unerased positions by Gaussian
    /// elimination on the matching generator columns. `Ok(None)` means the
    /// surviving columns have rank below `k`; this never happens with at
    /// most `d - 1` erasures.
    pub fn solve_message(&self, received: &[Option<Gf>]) -> Result<Option<Vec<Gf>>, CodeError> {
        if received.len() != self.n {
            return Err(CodeError::Length {
                expected: self.n,
                got: received.len(),
            });
        }
        let f = &*self.field;
        let k = self.k;
        // one equation per known position: Σ_i m_i G[i][j] = r_j
        let mut rows: Vec<Vec<Gf>> = received
            .iter()
            .enumerate()
            .filter_map(|(j, r)| {
                r.map(|r| {
                    let mut row: Vec<Gf> = self.generator.iter().map(|g| g[j]).collect();
                    row.push(r);
                    row
                })
            })
            .collect();
        if rows.iter().any(|r| !f.contains(r[k])) {
            return Err(CodeError::Parameters("received symbol outside the field".into()));
        }
        if rows.len() < k {
            return Ok(None);
        }
        let mut pivot_row = 0;
        for col in 0..k {
            let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                return Ok(None);
            };
            rows.swap(pivot_row, p);
            let inv = f.inv(rows[pivot_row][col])?;
            for x in rows[pivot_row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            let pivot = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == pivot_row || row[col].is_zero() {
                    continue;
                }
                let factor = row[col];
                for (x, &p) in row.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(factor, p));
                }
            }
            pivot_row += 1;
        }
        if rows[k..].iter().any(|r| !r[k].is_zero()) {
            return Err(CodeError::Inconsistent);
        }
        Ok(Some(rows[..k].iter().map(|r| r[k]).collect()))
    }

    /// Erasure correction: `None` entries are erased. Returns the unique
    /// codeword agreeing with the unerased positions, or `Ok(None)` when the
    /// erasures leave it undetermined.
    pub fn erasure_decode(&self, received: &[Option<Gf>]) -> Result<Option<Vec<Gf>>, CodeError> {
        Ok(self
            .solve_message(received)?
            .map(|m| self.encode_unchecked(&m)))
    }
}

pub struct Codewords<'a> {
    code: &'a LinearCode,
    next: u64,
    total: u64,
}

impl Iterator for Codewords<'_> {
    type Item = Vec<Gf>;

    fn next(&mut self) -> Option<Vec<Gf>> {
        if self.next >= self.total {
            return None;
        }
        let m = self.code.message_at(self.next);
        self.next += 1;
        Some(self.code.encode_unchecked(&m))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

pub fn weight(word: &[Gf]) -> usize {
    word.iter().filter(|x| !x.is_zero()).count()
}

pub fn distance(a: &[Gf], b: &[Gf]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn rank(field: &Field, mut m: Vec<Vec<Gf>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        let pivot: Vec<Gf> = m[r].iter().map(|&x| field.mul(x, inv)).collect();
        for row in m.iter_mut().skip(r + 1) {
            let factor = row[c];
            if factor.is_zero() {
                continue;
            }
            for (x, &p) in row.iter_mut().zip(&pivot) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// `A(W)` for `W = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDistribution {
    counts: Vec<BigUint>,
}

impl WeightDistribution {
    pub fn from_counts(counts: Vec<BigUint>) -> Self {
        WeightDistribution { counts }
    }

    /// `A(W) = C(n,W) Σ_{j=0}^{W-d} (-1)^j C(W,j) (q^{W-d+1-j} - 1)` for an
    /// `(n, k)` MDS code with `d = n - k + 1`.
    pub fn mds(n: usize, k: usize, q: u64) -> Self {
        let d = n - k + 1;
        let qb = BigInt::from(q);
        let mut counts = vec![BigUint::zero(); n + 1];
        counts[0] = BigUint::one();
        for w in d..=n {
            let mut acc = BigInt::zero();
            for j in 0..=(w - d) {
                let term = binomial(w as u64, j as u64) * (qb.pow((w - d + 1 - j) as u32) - 1u32);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc *= binomial(n as u64, w as u64);
            debug_assert!(!acc.is_negative());
            counts[w] = acc.to_biguint().expect("MDS weight counts are nonnegative");
        }
        WeightDistribution { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, w: usize) -> &BigUint {
        &self.counts[w]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Smallest nonzero weight with a nonzero count.
    pub fn min_distance(&self) -> Option<usize> {
        (1..self.counts.len()).find(|&w| !self.counts[w].is_zero())
    }

    /// `log2 A(W)`, `-inf` for empty weights.
    pub fn log2_count(&self, w: usize) -> f64 {
        log2_big(&self.counts[w])
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub(crate) fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top 64 bits");
    (top as f64).log2() + shift as f64
}

/// Smallest `n >= max(k, d)` with
/// `q^{n-k} >= Σ_{i=0}^{d-2} C(n-1, i) (q-1)^i`, exact integer arithmetic.
/// For `d <= 1` the sum is empty and `n = k`.
pub fn gv_exact_n(q: u64, k: usize, d: usize) -> Result<usize, CodeError> {
    if q < 2 || k == 0 || d == 0 {
        return Err(CodeError::Parameters(format!(
            "GV search needs q >= 2, k >= 1, d >= 1 (got q={q}, k={k}, d={d})"
        )));
    }
    if d == 1 {
        return Ok(k);
    }
    let terms_len = d - 1;
    let start = k.max(d);
    // terms[i] = C(n-1, i) (q-1)^i at the current n
    let q1 = BigUint::from(q - 1);
    let mut terms = vec![BigUint::zero(); terms_len];
    {
        let base = (start - 1) as u64;
        let mut power = BigUint::one();
        for (i, t) in terms.iter_mut().enumerate() {
            if i as u64 <= base {
                *t = binomial(base, i as u64).to_biguint().expect("binomial is nonnegative") * &power;
            }
            power *= &q1;
        }
    }
    let qb = BigUint::from(q);
    let mut lhs = qb.pow((start - k) as u32);
    let mut n = start;
    loop {
        let sum: BigUint = terms.iter().sum();
        if lhs >= sum {
            return Ok(n);
        }
        // C(n, i) (q-1)^i = C(n-1, i) (q-1)^i + (q-1) · C(n-1, i-1) (q-1)^{i-1}
        for i in (1..terms_len).rev() {
            let add = &terms[i - 1] * &q1;
            terms[i] += add;
        }
        lhs *= &qb;
        n += 1;
    }
}

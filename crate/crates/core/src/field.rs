//! Finite fields GF(p^e) and extension towers GF((p^e)^k).
//!
//! Elements are stored in polynomial-basis form: a prime-field element is its
//! residue, and an element of an extension of degree `k` over a base field of
//! order `b` is the integer `c_0 + c_1 b + ... + c_{k-1} b^{k-1}` whose base-`b`
//! digits are the coefficients over the base field. Base-field elements are
//! therefore embedded unchanged as the constants `0..b`.
//!
//! Every field also carries a *canonical enumeration* `α_1, ..., α_q`:
//! `α_1 = 0` and `α_{i+1} = g^{i-1}` for the field's primitive element `g`.
//! The Kautz-Singleton map puts `α_i` in row `i - 1` (0-based), so this order
//! fixes every row index in the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 24;

/// Fields up to this order get log/antilog tables; larger ones multiply by
/// polynomial reduction.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum of 2^24")]
    TooLarge(u128),
    #[error("value {value} is not an element of GF({order})")]
    OutOfRange { value: u64, order: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("expected {expected} base-field digits, got {got}")]
    DigitCount { expected: usize, got: usize },
}

/// A field element in polynomial-basis form. Only meaningful together with
/// the [`Field`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf(pub u32);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct LogTables {
    // exp has 2(q-1) entries so log sums never need a modulo.
    exp: Vec<u32>,
    // log[0] is unused.
    log: Vec<u32>,
}

pub struct Field {
    characteristic: u32,
    order: u32,
    /// `None` for a prime field.
    base: Option<Arc<Field>>,
    /// Degree over `base` (1 for a prime field).
    degree: u32,
    /// Low coefficients `c_0..c_{degree-1}` of the monic modulus
    /// `x^degree + Σ c_i x^i`. Empty for prime fields.
    modulus: Vec<Gf>,
    primitive: Gf,
    tables: Option<LogTables>,
    baby_steps: OnceLock<HashMap<u32, u32>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("order", &self.order)
            .field("characteristic", &self.characteristic)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.characteristic == other.characteristic
            && self.degree == other.degree
            && self.modulus == other.modulus
            && self.base == other.base
    }
}

impl Eq for Field {}

impl Field {
    /// Builds GF(characteristic^degree).
    pub fn new(characteristic: u32, degree: u32) -> Result<Arc<Field>, FieldError> {
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(characteristic as u64) {
            return Err(FieldError::NotPrime(characteristic as u64));
        }
        let order = (characteristic as u128).checked_pow(degree).unwrap_or(u128::MAX);
        if order > MAX_ORDER as u128 {
            return Err(FieldError::TooLarge(order));
        }
        let prime = Arc::new(Field::prime(characteristic));
        if degree == 1 {
            Ok(prime)
        } else {
            Field::extension(&prime, degree)
        }
    }

    /// Builds the degree-`degree` extension of `base`. A degree-1 extension
    /// is `base` itself.
    ///
    /// The modulus is the first monic polynomial (ordered by the integer value
    /// of its low coefficients) for which `x` is primitive, so `x` is the
    /// primitive element of the result.
    pub fn extension(base: &Arc<Field>, degree: u32) -> Result<Arc<Field>, FieldError> {
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if degree == 1 {
            return Ok(Arc::clone(base));
        }
        let order = (base.order as u128).checked_pow(degree).unwrap_or(u128::MAX);
        if order > MAX_ORDER as u128 {
            return Err(FieldError::TooLarge(order));
        }
        let order = order as u32;
        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let candidates = (base.order as u64).pow(degree);
        for low in 1..candidates {
            let modulus = digits_of(low as u32, base.order, degree as usize);
            if modulus[0].is_zero() {
                continue;
            }
            let mut field = Field {
                characteristic: base.characteristic,
                order,
                base: Some(Arc::clone(base)),
                degree,
                modulus,
                primitive: Gf(base.order),
                tables: None,
                baby_steps: OnceLock::new(),
            };
            let x = Gf(base.order);
            if field.pow(x, group) != Gf::ONE {
                continue;
            }
            if factors.iter().any(|&r| field.pow(x, group / r) == Gf::ONE) {
                continue;
            }
            if order as u64 <= TABLE_LIMIT {
                field.tables = Some(field.build_tables());
            }
            return Ok(Arc::new(field));
        }
        unreachable!("every finite field has a primitive polynomial of each degree")
    }

    fn prime(p: u32) -> Field {
        let group = (p - 1) as u64;
        let factors = prime_factors(group);
        let mut field = Field {
            characteristic: p,
            order: p,
            base: None,
            degree: 1,
            modulus: Vec::new(),
            primitive: Gf::ONE,
            tables: None,
            baby_steps: OnceLock::new(),
        };
        if p > 2 {
            let g = (2..p)
                .map(Gf)
                .find(|&g| factors.iter().all(|&r| field.pow(g, group / r) != Gf::ONE))
                .expect("prime fields have primitive roots");
            field.primitive = g;
        }
        if p as u64 <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        field
    }

    fn build_tables(&self) -> LogTables {
        let n = (self.order - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; self.order as usize];
        let mut x = Gf::ONE;
        for i in 0..n {
            exp[i] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_slow(x, self.primitive);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        LogTables { exp, log }
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    /// Degree over the immediate base field (1 for prime fields).
    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn base(&self) -> Option<&Arc<Field>> {
        self.base.as_ref()
    }

    pub fn primitive(&self) -> Gf {
        self.primitive
    }

    /// Low coefficients of the monic reduction polynomial over the base field.
    pub fn modulus(&self) -> &[Gf] {
        &self.modulus
    }

    /// True if `self` is the degree-`degree` vector space over `base` used by
    /// [`Field::to_base_digits`]. A field is its own degree-1 extension.
    pub fn is_extension_of(&self, base: &Field, degree: u32) -> bool {
        if degree == 1 {
            return self == base;
        }
        self.degree == degree && self.base.as_deref() == Some(base)
    }

    pub fn element(&self, value: u64) -> Result<Gf, FieldError> {
        if value < self.order as u64 {
            Ok(Gf(value as u32))
        } else {
            Err(FieldError::OutOfRange {
                value,
                order: self.order,
            })
        }
    }

    #[inline]
    pub fn contains(&self, a: Gf) -> bool {
        a.0 < self.order
    }

    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.characteristic == 2 {
            return Gf(a.0 ^ b.0);
        }
        match &self.base {
            None => Gf((a.0 + b.0) % self.order),
            Some(base) => self.digitwise(a, b, |x, y| base.add(x, y)),
        }
    }

    pub fn neg(&self, a: Gf) -> Gf {
        if self.characteristic == 2 {
            return a;
        }
        match &self.base {
            None => Gf((self.order - a.0) % self.order),
            Some(base) => self.digitwise(a, Gf::ZERO, |x, _| base.neg(x)),
        }
    }

    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.is_zero() || b.is_zero() {
            return Gf::ZERO;
        }
        match &self.tables {
            Some(t) => Gf(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: Gf) -> Result<Gf, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                Gf(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => self.pow(a, self.order as u64 - 2),
        })
    }

    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Gf, mut e: u64) -> Gf {
        let mut acc = Gf::ONE;
        let mut sq = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_any(acc, sq);
            }
            sq = self.mul_any(sq, sq);
            e >>= 1;
        }
        acc
    }

    fn mul_any(&self, a: Gf, b: Gf) -> Gf {
        if self.tables.is_some() {
            self.mul(a, b)
        } else {
            self.mul_slow(a, b)
        }
    }

    fn mul_slow(&self, a: Gf, b: Gf) -> Gf {
        let base = match &self.base {
            None => return Gf(((a.0 as u64 * b.0 as u64) % self.order as u64) as u32),
            Some(base) => base,
        };
        let e = self.degree as usize;
        let da = digits_of(a.0, base.order, e);
        let db = digits_of(b.0, base.order, e);
        let mut prod = vec![Gf::ZERO; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = base.add(prod[i + j], base.mul(x, y));
            }
        }
        // x^e = -Σ c_i x^i
        for top in (e..2 * e - 1).rev() {
            let h = prod[top];
            if h.is_zero() {
                continue;
            }
            for (i, &c) in self.modulus.iter().enumerate() {
                let k = top - e + i;
                prod[k] = base.sub(prod[k], base.mul(h, c));
            }
        }
        from_digits(&prod[..e], base.order)
    }

    fn digitwise(&self, a: Gf, b: Gf, op: impl Fn(Gf, Gf) -> Gf) -> Gf {
        let base = self.base.as_ref().expect("extension field");
        let e = self.degree as usize;
        let da = digits_of(a.0, base.order, e);
        let db = digits_of(b.0, base.order, e);
        let out: Vec<Gf> = da.iter().zip(&db).map(|(&x, &y)| op(x, y)).collect();
        from_digits(&out, base.order)
    }

    /// Coordinates of `a` over the immediate base field, lowest degree first.
    /// For a prime field this is `[a]`.
    pub fn to_base_digits(&self, a: Gf) -> Vec<Gf> {
        match &self.base {
            None => vec![a],
            Some(base) => digits_of(a.0, base.order, self.degree as usize),
        }
    }

    pub fn from_base_digits(&self, digits: &[Gf]) -> Result<Gf, FieldError> {
        match &self.base {
            None => {
                if digits.len() != 1 {
                    return Err(FieldError::DigitCount {
                        expected: 1,
                        got: digits.len(),
                    });
                }
                self.element(digits[0].0 as u64)
            }
            Some(base) => {
                if digits.len() != self.degree as usize {
                    return Err(FieldError::DigitCount {
                        expected: self.degree as usize,
                        got: digits.len(),
                    });
                }
                for &d in digits {
                    base.element(d.0 as u64)?;
                }
                Ok(from_digits(digits, base.order))
            }
        }
    }

    /// Position of `a` in the canonical enumeration, 0-based (`α_1 = 0` has
    /// index 0, `g^j` has index `j + 1`).
    pub fn index_of(&self, a: Gf) -> usize {
        if a.is_zero() {
            return 0;
        }
        match &self.tables {
            Some(t) => t.log[a.0 as usize] as usize + 1,
            None => self.discrete_log(a) as usize + 1,
        }
    }

    /// Inverse of [`Field::index_of`].
    pub fn element_at(&self, index: usize) -> Result<Gf, FieldError> {
        if index >= self.order as usize {
            return Err(FieldError::OutOfRange {
                value: index as u64,
                order: self.order,
            });
        }
        if index == 0 {
            return Ok(Gf::ZERO);
        }
        Ok(match &self.tables {
            Some(t) => Gf(t.exp[index - 1]),
            None => self.pow(self.primitive, index as u64 - 1),
        })
    }

    /// All elements in canonical order.
    pub fn canonical_elements(&self) -> impl Iterator<Item = Gf> + '_ {
        (0..self.order as usize).map(move |i| self.element_at(i).expect("index in range"))
    }

    // Baby-step giant-step, only used above the table limit.
    fn discrete_log(&self, a: Gf) -> u32 {
        let n = self.order as u64 - 1;
        let m = (n as f64).sqrt().ceil() as u64;
        let baby = self.baby_steps.get_or_init(|| {
            let mut map = HashMap::with_capacity(m as usize);
            let mut x = Gf::ONE;
            for j in 0..m {
                map.entry(x.0).or_insert(j as u32);
                x = self.mul_any(x, self.primitive);
            }
            map
        });
        let giant = self
            .inv(self.pow(self.primitive, m))
            .expect("primitive element is nonzero");
        let mut gamma = a;
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma.0) {
                return ((i * m + j as u64) % n) as u32;
            }
            gamma = self.mul_any(gamma, giant);
        }
        unreachable!("every nonzero element is a power of the primitive element")
    }
}

fn digits_of(mut value: u32, radix: u32, len: usize) -> Vec<Gf> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(Gf(value % radix));
        value /= radix;
    }
    out
}

fn from_digits(digits: &[Gf], radix: u32) -> Gf {
    Gf(digits.iter().rev().fold(0u32, |acc, d| acc * radix + d.0))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gf7_basics() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.add(Gf(3), Gf(5)), Gf(1));
        for a in 1..7 {
            assert_eq!(f.mul(Gf(a), f.inv(Gf(a)).unwrap()), Gf::ONE);
        }
        // smallest primitive root mod 7
        assert_eq!(f.primitive(), Gf(3));
    }

    #[test]
    fn canonical_enumeration_of_gf7() {
        let f = Field::new(7, 1).unwrap();
        let order: Vec<u32> = f.canonical_elements().map(Gf::value).collect();
        assert_eq!(order, vec![0, 1, 3, 2, 6, 4, 5]);
        for i in 0..7 {
            assert_eq!(f.index_of(f.element_at(i).unwrap()), i);
        }
    }

    #[test]
    fn gf64_uses_x6_x_1() {
        let f = Field::new(2, 6).unwrap();
        assert_eq!(f.order(), 64);
        assert_eq!(f.modulus().iter().map(|g| g.0).collect::<Vec<_>>(), vec![1, 1, 0, 0, 0, 0]);
        assert_eq!(f.primitive(), Gf(2));
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Field::new(7, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(Field::new(2, 25), Err(FieldError::TooLarge(_))));
        assert!(matches!(Field::new(3, 16), Err(FieldError::TooLarge(_))));
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.inv(Gf::ZERO), Err(FieldError::ZeroInverse));
        assert!(f.element(5).is_err());
    }

    #[test]
    fn gf64_commutativity_exhaustive() {
        let f = Field::new(2, 6).unwrap();
        for a in 0..64 {
            for b in 0..64 {
                assert_eq!(f.mul(Gf(a), Gf(b)), f.mul(Gf(b), Gf(a)));
            }
        }
    }

    /// Reference multiplication in GF(2)[x] / (x^6 + x + 1), carry-less.
    fn clmul_mod(a: u32, b: u32) -> u32 {
        let mut r = 0u32;
        for i in 0..6 {
            if b >> i & 1 == 1 {
                r ^= a << i;
            }
        }
        for top in (6..11).rev() {
            if r >> top & 1 == 1 {
                r ^= 0b100_0011 << (top - 6);
            }
        }
        r
    }

    #[test]
    fn gf64_matches_carryless_reference() {
        let f = Field::new(2, 6).unwrap();
        for a in 0..64 {
            for b in 0..64 {
                assert_eq!(f.mul(Gf(a), Gf(b)).0, clmul_mod(a, b));
            }
        }
    }

    fn check_axioms(f: &Field, samples: usize, seed: u64) {
        let q = f.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in 0..q {
            let a = Gf(a);
            assert_eq!(f.add(a, Gf::ZERO), a);
            assert_eq!(f.mul(a, Gf::ONE), a);
            assert_eq!(f.add(a, f.neg(a)), Gf::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf::ONE);
            }
        }
        for _ in 0..samples {
            let a = Gf(rng.gen_range(0..q));
            let b = Gf(rng.gen_range(0..q));
            let c = Gf(rng.gen_range(0..q));
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, e) in [(2, 1), (2, 3), (3, 1), (3, 2), (5, 2), (7, 1), (2, 8), (3, 5), (31, 2), (2, 10)] {
            let f = Field::new(p, e).unwrap();
            check_axioms(&f, 2000, p as u64 * 100 + e as u64);
        }
    }

    #[test]
    fn tower_restricts_to_base_arithmetic() {
        let base = Field::new(7, 1).unwrap();
        let ext = Field::extension(&base, 2).unwrap();
        assert_eq!(ext.order(), 49);
        assert!(ext.is_extension_of(&base, 2));
        for a in 0..7 {
            for b in 0..7 {
                assert_eq!(ext.add(Gf(a), Gf(b)), base.add(Gf(a), Gf(b)));
                assert_eq!(ext.mul(Gf(a), Gf(b)), base.mul(Gf(a), Gf(b)));
            }
        }
        check_axioms(&ext, 2000, 9);
    }

    #[test]
    fn large_tower_without_tables() {
        let base = Field::new(2, 6).unwrap();
        let big = Field::extension(&base, 4).unwrap();
        assert_eq!(big.order(), 1 << 24);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = Gf(rng.gen_range(1..big.order()));
            let b = Gf(rng.gen_range(0..big.order()));
            let c = Gf(rng.gen_range(0..big.order()));
            assert_eq!(big.mul(a, big.inv(a).unwrap()), Gf::ONE);
            assert_eq!(big.mul(a, big.add(b, c)), big.add(big.mul(a, b), big.mul(a, c)));
            assert_eq!(big.mul(a, b), big.mul(b, a));
        }
        for a in 0..64 {
            for b in 0..64 {
                assert_eq!(big.mul(Gf(a), Gf(b)), base.mul(Gf(a), Gf(b)));
            }
        }
        for idx in [1usize, 2, 17, 4095, 1 << 20, (1 << 24) - 1] {
            let e = big.element_at(idx).unwrap();
            assert_eq!(big.index_of(e), idx);
        }
    }

    #[test]
    fn degree_one_extension_is_the_base() {
        let base = Field::new(7, 1).unwrap();
        let same = Field::extension(&base, 1).unwrap();
        assert!(Arc::ptr_eq(&base, &same));
        assert!(same.is_extension_of(&base, 1));
    }

    #[test]
    fn base_digits_round_trip() {
        let base = Field::new(2, 3).unwrap();
        let ext = Field::extension(&base, 3).unwrap();
        for v in 0..ext.order() {
            let d = ext.to_base_digits(Gf(v));
            assert_eq!(d.len(), 3);
            assert_eq!(ext.from_base_digits(&d).unwrap(), Gf(v));
        }
        assert!(ext.from_base_digits(&[Gf(1)]).is_err());
    }
}

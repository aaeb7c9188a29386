//! Data behind the four figures, as plain tables.

use std::fmt;

use crate::bounds::{self, BoundsError};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) => f.write_str(&fmt_real(*v)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Shortest round-trip text of `v`, in exponent form when very small or
/// very large.
pub fn fmt_real(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Named columns, rows of cells, and `key = value` metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta_real(&mut self, key: &str, value: f64) -> &mut Self {
        self.meta(key, fmt_real(value))
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value of column `name` in every row (text cells give NaN).
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let i = self.column_index(name).expect("known column");
        self.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Int(v) => *v as f64,
                Cell::Real(v) => *v,
                Cell::Text(_) => f64::NAN,
            })
            .collect()
    }

    /// Rows whose column `name` holds the text `value`.
    pub fn filter(&self, name: &str, value: &str) -> Table {
        let i = self.column_index(name).expect("known column");
        Table {
            meta: self.meta.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| matches!(&r[i], Cell::Text(s) if s == value))
                .cloned()
                .collect(),
        }
    }
}

/// `ρ(m)` for `m = 1 ..= Q/q`, one series per user count.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1 {
    pub subchannels: u64,
    pub q: u64,
    pub k: u64,
    pub p_r: f64,
    pub users: Vec<u64>,
}

impl Default for Fig1 {
    fn default() -> Self {
        Fig1 {
            subchannels: 4096,
            q: 64,
            k: 120,
            p_r: 1e-10,
            users: vec![50, 100, 200, 500],
        }
    }
}

impl Fig1 {
    pub fn table(&self) -> Result<Table, BoundsError> {
        let mut t = Table::new(&["series", "S", "m", "t", "rho"]);
        t.meta("figure", 1)
            .meta("Q", self.subchannels)
            .meta("q", self.q)
            .meta("k", self.k)
            .meta_real("p_r", self.p_r);
        for &users in &self.users {
            for m in 1..=self.subchannels / self.q {
                let mut p = bounds::SystemParams {
                    subchannels: self.subchannels,
                    q: self.q,
                    m,
                    t: 1,
                    users,
                    k: self.k,
                    p_r: self.p_r,
                };
                p.t = bounds::min_tacts(&p)?;
                let rho = bounds::rates(&p)?.relative;
                t.push(vec![format!("S={users}").into(), users.into(), m.into(), p.t.into(), rho.into()]);
            }
        }
        Ok(t)
    }
}

/// A roughly geometric list of user counts from 2 to `hi`.
pub fn user_grid(hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1;
    while decade <= hi {
        for step in [1, 2, 3, 5, 7] {
            let s = step * decade;
            if (2..=hi).contains(&s) {
                out.push(s);
            }
        }
        decade *= 10;
    }
    out
}

/// `ρ*(S)` with `k log2 q` held at a fixed number of bits, one series per `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2 {
    pub subchannels: u64,
    pub p_r: f64,
    pub bits: u64,
    pub alphabets: Vec<u64>,
    pub users: Vec<u64>,
}

impl Default for Fig2 {
    fn default() -> Self {
        Fig2 {
            subchannels: 4096,
            p_r: 1e-10,
            bits: 720,
            alphabets: vec![8, 16, 64, 256],
            users: user_grid(10_000),
        }
    }
}

impl Fig2 {
    pub fn table(&self) -> Result<Table, BoundsError> {
        let mut t = Table::new(&["series", "q", "k", "S", "m_opt", "rho_star"]);
        t.meta("figure", 2)
            .meta("Q", self.subchannels)
            .meta_real("p_r", self.p_r)
            .meta("k_log2_q", self.bits);
        for &q in &self.alphabets {
            let bits_per_symbol = (q as f64).log2();
            if q < 3 || bits_per_symbol.fract() != 0.0 || !self.bits.is_multiple_of(bits_per_symbol as u64) {
                return Err(BoundsError::Domain(format!(
                    "q = {q} must be a power of two >= 4 whose bit width divides {}",
                    self.bits
                )));
            }
            let k = self.bits / bits_per_symbol as u64;
            for &users in &self.users {
                let rs = bounds::rho_star(self.subchannels, q, users, k, self.p_r)?;
                t.push(vec![
                    format!("q={q}").into(),
                    q.into(),
                    k.into(),
                    users.into(),
                    rs.m.into(),
                    rs.rho.into(),
                ]);
            }
        }
        Ok(t)
    }
}

/// `ρ̄*∞(S)` and the constant floor it approaches, one series per `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3 {
    pub eps: f64,
    pub alphabets: Vec<u64>,
    pub users: Vec<u64>,
}

impl Default for Fig3 {
    fn default() -> Self {
        Fig3 {
            eps: 1e-6,
            alphabets: vec![16, 64, 256],
            users: user_grid(10_000),
        }
    }
}

impl Fig3 {
    pub fn table(&self) -> Result<Table, BoundsError> {
        let mut t = Table::new(&["series", "q", "S", "rho_star_inf", "mu_opt", "mu_hat", "rho_piecewise", "rho_floor"]);
        t.meta("figure", 3).meta_real("eps", self.eps);
        for &q in &self.alphabets {
            for &users in &self.users {
                let r = bounds::rho_star_inf(q, users, self.eps)?;
                let floor = bounds::rho_floor(q, users, self.eps).map_or(Cell::from("nan"), Cell::from);
                t.push(vec![
                    format!("q={q}").into(),
                    q.into(),
                    users.into(),
                    r.value.into(),
                    r.mu.into(),
                    r.mu_hat.into(),
                    r.value_piecewise.into(),
                    floor,
                ]);
            }
        }
        Ok(t)
    }
}

/// Maximal user counts with concatenated decoding (one series per inner
/// dimension) against exhaustive decoding at the same overall rate.
///
/// Inner codes are RS`(t, k_I)` over GF(q), so `d_I = t - k_I + 1`. Outer
/// codes are RS`(m, k_O)` over GF(q^{k_I}) when `m < q^{k_I}`; otherwise the
/// outer distance is the largest `d_O` whose closed-form blocklength fits in
/// `m`. The exhaustive series uses `n = m t`, `k = k_O k_I` and the largest
/// `d` whose closed-form blocklength fits in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig4 {
    pub subchannels: u64,
    pub p_r: f64,
    pub m: u64,
    pub t: u64,
    pub q: u64,
    pub inner_dims: Vec<u64>,
}

impl Default for Fig4 {
    fn default() -> Self {
        Fig4 {
            subchannels: 1 << 18,
            p_r: 1e-10,
            m: 200,
            t: 50,
            q: 64,
            inner_dims: vec![1, 2, 3, 4],
        }
    }
}

/// Largest `d >= 1` with `closed_form_n(k, d, q) <= n`.
pub fn largest_distance(k: u64, n: u64, q: u64) -> Result<Option<u64>, BoundsError> {
    if bounds::closed_form_n(k, 1, q)? > n {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1, n + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bounds::closed_form_n(k, mid, q)? <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Point {
    pub k_inner: u64,
    pub k_outer: u64,
    pub d_outer: u64,
    pub rate: f64,
    pub p_inner_hat: f64,
    pub s_max: u64,
    /// Exhaustive decoding at the same `k = k_O k_I`.
    pub s_max_exhaustive: u64,
}

impl Fig4 {
    fn outer_distance(&self, k_inner: u64, k_outer: u64) -> Result<Option<u64>, BoundsError> {
        let outer_alphabet = (self.q as f64).powi(k_inner as i32);
        if (self.m as f64) < outer_alphabet {
            return Ok((k_outer <= self.m).then(|| self.m - k_outer + 1));
        }
        largest_distance(k_outer, self.m, self.q)
    }

    fn exhaustive(&self, k: u64) -> Result<Option<(u64, u64)>, BoundsError> {
        let n = self.m * self.t;
        let Some(d) = largest_distance(k, n, self.q)? else {
            return Ok(None);
        };
        let s = bounds::s_max_for_code(self.q, n, k, d, self.p_r, self.m, self.subchannels)?;
        Ok(Some((d, s)))
    }

    pub fn points(&self) -> Result<Vec<Fig4Point>, BoundsError> {
        let mut out = Vec::new();
        for &k_inner in &self.inner_dims {
            if k_inner < 1 || k_inner > self.t || self.t > self.q - 1 {
                return Err(BoundsError::Domain(format!(
                    "inner RS({}, {k_inner}) over GF({}) needs 1 <= k_I <= t <= q - 1",
                    self.t, self.q
                )));
            }
            let d_inner = self.t - k_inner + 1;
            for k_outer in 1..=self.m {
                let Some(d_outer) = self.outer_distance(k_inner, k_outer)? else {
                    continue;
                };
                let Some((_, s_exh)) = self.exhaustive(k_outer * k_inner)? else {
                    continue;
                };
                let p_hat = bounds::p_inner_max(self.p_r, self.m, d_outer as f64 / self.m as f64)?;
                let s = bounds::s_max_concatenated(
                    self.q,
                    k_inner as f64 / self.t as f64,
                    d_inner as f64 / self.t as f64,
                    d_inner,
                    p_hat,
                    self.m,
                    self.subchannels,
                )?;
                out.push(Fig4Point {
                    k_inner,
                    k_outer,
                    d_outer,
                    rate: (k_outer * k_inner) as f64 / (self.m * self.t) as f64,
                    p_inner_hat: p_hat,
                    s_max: s,
                    s_max_exhaustive: s_exh,
                });
            }
        }
        Ok(out)
    }

    pub fn table(&self) -> Result<Table, BoundsError> {
        let mut t = Table::new(&["series", "k_I", "k_O", "k", "rate", "distance", "p_inner_hat", "s_max"]);
        t.meta("figure", 4)
            .meta("Q", self.subchannels)
            .meta_real("p_r", self.p_r)
            .meta("m", self.m)
            .meta("t", self.t)
            .meta("q", self.q);
        let points = self.points()?;
        for p in &points {
            t.push(vec![
                format!("k_I={}", p.k_inner).into(),
                p.k_inner.into(),
                p.k_outer.into(),
                (p.k_inner * p.k_outer).into(),
                p.rate.into(),
                p.d_outer.into(),
                p.p_inner_hat.into(),
                p.s_max.into(),
            ]);
        }
        let mut ks: Vec<u64> = points.iter().map(|p| p.k_inner * p.k_outer).collect();
        ks.sort_unstable();
        ks.dedup();
        let n = self.m * self.t;
        for k in ks {
            if let Some((d, s)) = self.exhaustive(k)? {
                t.push(vec![
                    "exhaustive".into(),
                    Cell::from("nan"),
                    Cell::from("nan"),
                    k.into(),
                    (k as f64 / n as f64).into(),
                    d.into(),
                    self.p_r.into(),
                    s.into(),
                ]);
            }
        }
        Ok(t)
    }
}

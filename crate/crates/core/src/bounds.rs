//! Closed-form failure bounds, code sizing and user-count / rate estimates.
//!
//! Everything is evaluated in the log domain: at `q = 64, k = 120` the factor
//! `q^k` alone is about `10^216`. Quantities that the formulas round up or
//! down go through [`ceil_tol`] / [`floor_tol`], which snap values within a
//! relative `1e-9` of an integer to that integer, so an exact integer computed
//! with a little float noise is not pushed to the next one.

use thiserror::Error;

use crate::codes::WeightDistribution;
use crate::optimize::{self, Optimum, Spacing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("precondition violated: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("the exact bound needs the code's weight distribution")]
    MissingWeightDistribution,
}

type Result<T> = std::result::Result<T, BoundsError>;

fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BoundsError::Domain(msg.into()))
}

const SNAP: f64 = 1e-9;

fn snap(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= SNAP * x.abs().max(1.0)).then_some(r)
}

pub fn ceil_tol(x: f64) -> f64 {
    snap(x).unwrap_or(x.ceil())
}

pub fn floor_tol(x: f64) -> f64 {
    snap(x).unwrap_or(x.floor())
}

fn le_tol(a: f64, b: f64) -> bool {
    a <= b + SNAP * b.abs().max(1.0)
}

/// `log2(2^a + 2^b)`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `ln(e^a + e^b)`.
fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// One scenario: `S` users each on `m` subranges of `q` out of `Q`
/// subchannels for `t` tacts, sending `k` q-ary symbols with target failure
/// probability `p_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub subchannels: u64,
    pub q: u64,
    pub m: u64,
    pub t: u64,
    pub users: u64,
    pub k: u64,
    pub p_r: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let SystemParams { subchannels, q, m, users, p_r, .. } = *self;
        if q < 2 || q > subchannels {
            return domain(format!("need 2 <= q <= Q (got q={q}, Q={subchannels})"));
        }
        if m < 1 || m > subchannels / q {
            return domain(format!("need 1 <= m <= Q/q = {} (got m={m})", subchannels / q));
        }
        if users < 1 {
            return domain("need S >= 1");
        }
        if !(p_r > 0.0 && p_r < 1.0) {
            return domain(format!("need 0 < p_r < 1 (got {p_r})"));
        }
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.m * self.t
    }

    pub fn beta(&self) -> Result<f64> {
        beta(self.subchannels, self.m, self.users)
    }
}

/// Asymptotic regime: `p_r = 2^{-cn}`, `m = μ Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub c: f64,
    pub mu: f64,
    pub eps: f64,
}

impl AsymptoticParams {
    /// `c' = c log2 q / log2(q - 1)`.
    pub fn c_prime(&self, q: u64) -> f64 {
        c_prime(q, self.c)
    }

    /// `ε' = S ε`.
    pub fn eps_prime(&self, users: u64) -> f64 {
        users as f64 * self.eps
    }
}

/// Rate and relative distance of a code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeRate {
    pub rate: f64,
    pub delta: f64,
}

impl CodeRate {
    pub fn new(n: u64, k: u64, d: u64) -> Self {
        CodeRate {
            rate: k as f64 / n as f64,
            delta: d as f64 / n as f64,
        }
    }
}

/// Probability that one given position of the target's frame is hit by at
/// least one of the other `S - 1` users: `1 - (1 - m/Q)^{S-1}`.
pub fn beta(subchannels: u64, m: u64, users: u64) -> Result<f64> {
    if m < 1 || m > subchannels {
        return domain(format!("need 1 <= m <= Q (got m={m}, Q={subchannels})"));
    }
    if users < 1 {
        return domain("need S >= 1");
    }
    if m == subchannels {
        return Ok(if users >= 2 { 1.0 } else { 0.0 });
    }
    let mu = m as f64 / subchannels as f64;
    Ok(-((users - 1) as f64 * (-mu).ln_1p()).exp_m1())
}

/// `log2(q^k β^d)`.
pub fn log2_loose_bound(q: u64, k: u64, beta: f64, d: u64) -> f64 {
    if d == 0 {
        return k as f64 * (q as f64).log2();
    }
    k as f64 * (q as f64).log2() + d as f64 * beta.log2()
}

/// `log2 Σ_{W=d}^{n} A(W) β^W`.
pub fn log2_exact_bound(wd: &WeightDistribution, beta: f64, d: u64) -> f64 {
    let lb = beta.log2();
    (d as usize..=wd.n())
        .map(|w| wd.log2_count(w) + if w == 0 { 0.0 } else { w as f64 * lb })
        .fold(f64::NEG_INFINITY, log2_add)
}

/// Both forms of the union bound on the target's failure probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureBound {
    pub log2_exact: Option<f64>,
    pub log2_loose: f64,
}

impl FailureBound {
    pub fn loose(&self) -> f64 {
        self.log2_loose.exp2()
    }

    pub fn exact(&self) -> Result<f64> {
        self.log2_exact.map(f64::exp2).ok_or(BoundsError::MissingWeightDistribution)
    }
}

/// `p_* <= Σ_{W=d}^{n} A(W) β^W < q^k β^d`. The exact sum is only
/// available when a weight distribution is supplied.
pub fn p_star_bound(wd: Option<&WeightDistribution>, q: u64, k: u64, beta: f64, d: u64) -> Result<FailureBound> {
    if !(0.0..=1.0).contains(&beta) {
        return domain(format!("need 0 <= β <= 1 (got {beta})"));
    }
    if d < 1 {
        return domain("need d >= 1");
    }
    if let Some(wd) = wd {
        if d as usize > wd.n() {
            return domain(format!("d = {d} exceeds the code length {}", wd.n()));
        }
    }
    Ok(FailureBound {
        log2_exact: wd.map(|wd| log2_exact_bound(wd, beta, d)),
        log2_loose: log2_loose_bound(q, k, beta, d),
    })
}

/// Smallest `d` with `q^k β^d <= p_r`, i.e.
/// `⌈(k log2 q - log2 p_r) / (-log2 β)⌉`. `β = 0` (a single user) gives
/// `d = 1` by convention since the bound is then 0.
pub fn required_d(k: u64, q: u64, p_r: f64, beta: f64) -> Result<u64> {
    if !(p_r > 0.0 && p_r < 1.0) {
        return domain(format!("need 0 < p_r < 1 (got {p_r})"));
    }
    if beta >= 1.0 || beta.is_nan() {
        return domain(format!("need β < 1 (got {beta}); the bound is vacuous"));
    }
    if beta <= 0.0 {
        return Ok(1);
    }
    let target = p_r.log2();
    let x = (k as f64 * (q as f64).log2() - target) / -beta.log2();
    let mut d = ceil_tol(x).max(1.0) as u64;
    while !le_tol(log2_loose_bound(q, k, beta, d), target) {
        d += 1;
    }
    while d > 1 && le_tol(log2_loose_bound(q, k, beta, d - 1), target) {
        d -= 1;
    }
    Ok(d)
}

fn blocklength_factor(q: u64) -> Result<f64> {
    if q < 3 {
        return domain(format!("the closed-form blocklength needs q >= 3 (got q={q})"));
    }
    let l = (q as f64).log2();
    Ok(l / (l - 1.0))
}

/// `⌈ log2 q / (log2 q - 1) · (k + d - 1) ⌉`. Compare with
/// [`crate::codes::gv_exact_n`], which solves the GV condition exactly.
pub fn closed_form_n(k: u64, d: u64, q: u64) -> Result<u64> {
    Ok(ceil_tol(blocklength_factor(q)? * (k + d).saturating_sub(1) as f64) as u64)
}

/// Minimal tacts with one ceiling over the whole expression,
/// `⌈ L/(L-1) · (k(L - log2 β) - log2 p_r) / (m (-log2 β)) ⌉` with
/// `L = log2 q`. For `β = 0` the limit `L/(L-1) · k/m` is used.
pub fn min_tacts(p: &SystemParams) -> Result<u64> {
    Ok(ceil_tol(min_tacts_real(p)?) as u64)
}

/// The expression inside [`min_tacts`]'s ceiling.
pub fn min_tacts_real(p: &SystemParams) -> Result<f64> {
    p.validate()?;
    tacts_for_beta(p.q, p.k, p.m, p.p_r, p.beta()?)
}

/// [`min_tacts_real`] with `β` given directly.
pub fn tacts_for_beta(q: u64, k: u64, m: u64, p_r: f64, beta: f64) -> Result<f64> {
    let factor = blocklength_factor(q)?;
    if beta >= 1.0 || beta.is_nan() {
        return domain("need β < 1 (m(S-1) saturates the channel)");
    }
    if m < 1 {
        return domain("need m >= 1");
    }
    let (k, m) = (k as f64, m as f64);
    if beta <= 0.0 {
        return Ok(factor * k / m);
    }
    let l = (q as f64).log2();
    let nb = -beta.log2();
    Ok(factor * (k * (l + nb) - p_r.log2()) / (m * nb))
}

/// Minimal tacts through the integer steps: `d` from [`required_d`], then
/// [`closed_form_n`], then `⌈n/m⌉`. Can differ from [`min_tacts`] by a
/// small amount because every step rounds up on its own.
pub fn min_tacts_stepwise(p: &SystemParams) -> Result<u64> {
    p.validate()?;
    let d = required_d(p.k, p.q, p.p_r, p.beta()?)?;
    let n = closed_form_n(p.k, d, p.q)?;
    Ok(n.div_ceil(p.m))
}

fn s_max_parts(q: u64, rate: f64, delta: f64, d: u64, p_r: f64, m: u64, subchannels: u64) -> Result<Option<(f64, f64)>> {
    if d < 1 || !(delta > 0.0) || !(rate > 0.0) {
        return domain(format!("need d >= 1, R > 0, δ > 0 (got d={d}, R={rate}, δ={delta})"));
    }
    if !(p_r > 0.0 && p_r < 1.0) {
        return domain(format!("need 0 < p_r < 1 (got {p_r})"));
    }
    if m < 1 || m > subchannels {
        return domain(format!("need 1 <= m <= Q (got m={m}, Q={subchannels})"));
    }
    // x = p_r^{1/d} / q^{R/δ}
    let ln_x = p_r.ln() / d as f64 - rate / delta * (q as f64).ln();
    if ln_x >= 0.0 {
        return domain("need p_r^{1/d} < q^{R/δ}");
    }
    if m == subchannels {
        return Ok(None);
    }
    Ok(Some((ln_x.exp(), m as f64 / subchannels as f64)))
}

fn to_count(x: f64) -> u64 {
    // saturating: the estimate can exceed u64 for vanishing m/Q
    floor_tol(x) as u64
}

/// `⌊ -ln(1 - p_r^{1/d}/q^{R/δ}) / -ln(1 - m/Q) ⌋ + 1`: the largest `S`
/// for which `q^k β^d <= p_r` still holds. `m = Q` gives 1.
pub fn s_max_exhaustive(q: u64, rate: f64, delta: f64, d: u64, p_r: f64, m: u64, subchannels: u64) -> Result<u64> {
    Ok(match s_max_parts(q, rate, delta, d, p_r, m, subchannels)? {
        None => 1,
        Some((x, mu)) => to_count((-x).ln_1p() / (-mu).ln_1p()).saturating_add(1),
    })
}

/// `⌊ (Q/m - 1) · p_r^{1/d}/q^{R/δ} ⌋ + 1`, never above
/// [`s_max_exhaustive`].
pub fn s_max_simplified(q: u64, rate: f64, delta: f64, d: u64, p_r: f64, m: u64, subchannels: u64) -> Result<u64> {
    Ok(match s_max_parts(q, rate, delta, d, p_r, m, subchannels)? {
        None => 1,
        Some((x, _)) => to_count((subchannels as f64 / m as f64 - 1.0) * x).saturating_add(1),
    })
}

/// [`s_max_exhaustive`] for an `(n, k, d)` code.
pub fn s_max_for_code(q: u64, n: u64, k: u64, d: u64, p_r: f64, m: u64, subchannels: u64) -> Result<u64> {
    let r = CodeRate::new(n, k, d);
    s_max_exhaustive(q, r.rate, r.delta, d, p_r, m, subchannels)
}

/// The same estimate for the concatenated scheme: inner-code parameters, and
/// the per-block failure target `p̂` in place of `p_r`.
pub fn s_max_concatenated(
    q: u64,
    rate_inner: f64,
    delta_inner: f64,
    d_inner: u64,
    p_inner_hat: f64,
    m: u64,
    subchannels: u64,
) -> Result<u64> {
    s_max_exhaustive(q, rate_inner, delta_inner, d_inner, p_inner_hat, m, subchannels)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    /// Bits per tact of one user, `(k/t) log2 q`.
    pub per_user: f64,
    /// `R_Σ = S R_i`.
    pub sum: f64,
    /// `ρ = R_Σ / Q`.
    pub relative: f64,
}

pub fn rates(p: &SystemParams) -> Result<Rates> {
    if p.t < 1 {
        return domain("need t >= 1");
    }
    let per_user = p.k as f64 / p.t as f64 * (p.q as f64).log2();
    let sum = p.users as f64 * per_user;
    Ok(Rates {
        per_user,
        sum,
        relative: sum / p.subchannels as f64,
    })
}

/// `ρ` at the minimal number of tacts for `m` subranges.
pub fn rho(subchannels: u64, q: u64, users: u64, m: u64, k: u64, p_r: f64) -> Result<f64> {
    let mut p = SystemParams { subchannels, q, m, t: 1, users, k, p_r };
    p.t = min_tacts(&p)?;
    Ok(rates(&p)?.relative)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoStar {
    pub rho: f64,
    pub m: u64,
}

/// `max_{1 <= m <= Q/q} ρ`, by scanning every `m`; ties go to the smaller
/// `m`. Values of `m` where `β = 1` are skipped.
pub fn rho_star(subchannels: u64, q: u64, users: u64, k: u64, p_r: f64) -> Result<RhoStar> {
    if q < 2 || subchannels < q {
        return domain(format!("need Q/q >= 1 (got Q={subchannels}, q={q})"));
    }
    let mut best: Option<RhoStar> = None;
    for m in 1..=subchannels / q {
        let r = match rho(subchannels, q, users, m, k, p_r) {
            Ok(r) => r,
            Err(_) if beta(subchannels, m, users)? >= 1.0 => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|b| r > b.rho) {
            best = Some(RhoStar { rho: r, m });
        }
    }
    best.ok_or_else(|| BoundsError::Infeasible("every m saturates the channel".into()))
}

/// `c' = c log2 q / log2(q - 1)`.
pub fn c_prime(q: u64, c: f64) -> f64 {
    c * (q as f64).log2() / ((q - 1) as f64).log2()
}

/// Tacts needed when `p_r = 2^{-cn}`:
/// `L/(L-1) · (k/m) · (L - log2 β) / (-log2 β - c')`.
pub fn t_asymptotic(q: u64, k: u64, m: u64, beta: f64, c: f64) -> Result<f64> {
    let factor = blocklength_factor(q)?;
    if !(beta > 0.0 && beta < 1.0) || m < 1 || c < 0.0 {
        return domain(format!("need 0 < β < 1, m >= 1, c >= 0 (got β={beta}, m={m}, c={c})"));
    }
    let nb = -beta.log2();
    let denom = nb - c_prime(q, c);
    if denom <= 0.0 {
        return Err(BoundsError::Infeasible(format!(
            "-log2 β = {nb} does not exceed c' = {}",
            c_prime(q, c)
        )));
    }
    let l = (q as f64).log2();
    Ok(factor * (k as f64 / m as f64) * (l + nb) / denom)
}

fn check_asymptotic(q: u64, users: u64, mu: f64) -> Result<()> {
    if q < 3 {
        return domain(format!("need q >= 3 (got q={q})"));
    }
    if users < 2 {
        return domain("need S >= 2");
    }
    if !(mu > 0.0 && mu <= 1.0 / q as f64) {
        return domain(format!("need 0 < μ <= 1/q (got μ={mu})"));
    }
    Ok(())
}

/// `S μ (-log2 β - c') (L - 1) / (L - log2 β)` with
/// `β = 1 - (1 - μ)^{S-1}`. A nonpositive value means the decay rate `c`
/// is out of reach at this `μ`.
pub fn rho_inf_lower(q: u64, users: u64, mu: f64, c: f64) -> Result<f64> {
    check_asymptotic(q, users, mu)?;
    let l = (q as f64).log2();
    let b = -((users - 1) as f64 * (-mu).ln_1p()).exp_m1();
    let nb = -b.log2();
    Ok(users as f64 * mu * (nb - c_prime(q, c)) * (l - 1.0) / (l + nb))
}

/// `μ̂ = 1 - 2^{-1/(S-1)}`, the `μ` at which `β = 1/2`.
pub fn mu_hat(users: u64) -> Result<f64> {
    if users < 2 {
        return domain("need S >= 2");
    }
    Ok(-(-std::f64::consts::LN_2 / (users - 1) as f64).exp_m1())
}

/// `S` above which `μ̂ < 1/q`: `1/(-log2(1 - 1/q)) + 1`.
pub fn mu_hat_threshold(q: u64) -> f64 {
    1.0 / -(-1.0 / q as f64).ln_1p() * std::f64::consts::LN_2 + 1.0
}

/// A simpler sufficient condition for `μ̂ < 1/q`: `S > q ln 2 + 1`.
pub fn mu_hat_sufficient_threshold(q: u64) -> f64 {
    q as f64 * std::f64::consts::LN_2 + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoStarInf {
    /// Numerical maximum over `0 < μ <= 1/q`.
    pub value: f64,
    pub mu: f64,
    pub mu_hat: f64,
    /// `μ̂` if it is below `1/q`, otherwise `1/q`.
    pub mu_piecewise: f64,
    pub value_piecewise: f64,
}

/// `max_{0 < μ <= 1/q} ρ̄∞(q, S, μ, c)`, plus the value at the closed-form
/// choice of `μ`.
pub fn rho_star_inf(q: u64, users: u64, c: f64) -> Result<RhoStarInf> {
    let hi = 1.0 / q as f64;
    check_asymptotic(q, users, hi)?;
    let f = |mu: f64| rho_inf_lower(q, users, mu, c).unwrap_or(f64::NEG_INFINITY);
    let Optimum { x, value } = optimize::maximize(f, hi * 1e-12, hi, 400, Spacing::Log, 1e-13);
    let mh = mu_hat(users)?;
    let mu_piecewise = if mh < hi { mh } else { hi };
    Ok(RhoStarInf {
        value,
        mu: x,
        mu_hat: mh,
        mu_piecewise,
        value_piecewise: rho_inf_lower(q, users, mu_piecewise, c)?,
    })
}

/// `(1 - S ε) · (L - 1)/(L + 1) · ln 2`.
pub fn rho_floor(q: u64, users: u64, eps: f64) -> Result<f64> {
    let eps_prime = users as f64 * eps;
    if !(eps > 0.0) || eps_prime >= 1.0 {
        return domain(format!("need ε > 0 and S ε < 1 (got ε={eps}, S ε={eps_prime})"));
    }
    let l = (q as f64).log2();
    Ok((1.0 - eps_prime) * (l - 1.0) / (l + 1.0) * std::f64::consts::LN_2)
}

const S_LO: f64 = 1e-9;

/// `ln( e^{-s d} (1 + p (e^s - 1))^m )`, the Chernoff objective.
pub fn chernoff_ln(d_outer: f64, m: u64, p_inner: f64, s: f64) -> f64 {
    -s * d_outer + m as f64 * ln_add((-p_inner).ln_1p(), p_inner.ln() + s)
}

fn check_chernoff(d_outer: f64, m: u64, p_inner: f64) -> Result<()> {
    if !(p_inner > 0.0 && p_inner < 1.0) {
        return domain(format!("need 0 < p_inner < 1 (got {p_inner})"));
    }
    if !(d_outer >= 0.0 && d_outer <= m as f64) {
        return domain(format!("need 0 <= d_O <= m (got d_O={d_outer}, m={m})"));
    }
    Ok(())
}

/// Minimizer `s` and the minimum of [`chernoff_ln`] over `s > 0`. When
/// `d_O <= m p` the infimum is at `s → 0` and equals `ln 1 = 0`.
pub fn chernoff_optimum(d_outer: f64, m: u64, p_inner: f64) -> Result<Optimum> {
    check_chernoff(d_outer, m, p_inner)?;
    if d_outer <= m as f64 * p_inner {
        return Ok(Optimum { x: 0.0, value: 0.0 });
    }
    let hi = 100.0 - 4.0 * p_inner.ln();
    Ok(optimize::minimize(
        |s| chernoff_ln(d_outer, m, p_inner, s),
        S_LO,
        hi,
        400,
        Spacing::Log,
        1e-13,
    ))
}

/// `min_{s>0} e^{-s d_O} (1 + p (e^s - 1))^m`, bounding the probability that
/// at least `d_O` of `m` independent inner blocks fail.
pub fn chernoff_p_star(d_outer: f64, m: u64, p_inner: f64) -> Result<f64> {
    Ok(chernoff_optimum(d_outer, m, p_inner)?.value.exp())
}

/// `ln((a e^{sδ} - 1)/(e^s - 1))` with `a = p_r^{1/m}`, `-inf` where the
/// numerator is not positive.
pub fn p_inner_ln(p_r: f64, m: u64, delta_outer: f64, s: f64) -> f64 {
    let ln_a = p_r.ln() / m as f64;
    let z = s * delta_outer + ln_a;
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_a + s * (delta_outer - 1.0) + (-(-z).exp_m1()).ln() - (-(-s).exp_m1()).ln()
}

/// Maximizer `s` and maximum of [`p_inner_ln`].
pub fn p_inner_optimum(p_r: f64, m: u64, delta_outer: f64) -> Result<Optimum> {
    if !(delta_outer > 0.0 && delta_outer <= 1.0) {
        return domain(format!("need 0 < δ_O <= 1 (got {delta_outer})"));
    }
    if !(p_r > 0.0 && p_r < 1.0) {
        return domain(format!("need 0 < p_r < 1 (got {p_r})"));
    }
    if m < 1 {
        return domain("need m >= 1");
    }
    let ln_a = p_r.ln() / m as f64;
    let hi = 100.0 - 4.0 * ln_a / delta_outer;
    let opt = optimize::maximize(
        |s| p_inner_ln(p_r, m, delta_outer, s),
        S_LO,
        hi,
        400,
        Spacing::Log,
        1e-13,
    );
    if opt.value == f64::NEG_INFINITY || opt.value.is_nan() {
        return Err(BoundsError::Infeasible(format!(
            "no positive inner failure rate meets p_r={p_r} with m={m}, δ_O={delta_outer}"
        )));
    }
    Ok(opt)
}

/// `p̂ = max_{s>0} (p_r^{1/m} e^{s δ_O} - 1)/(e^s - 1)`: the largest inner
/// failure probability for which the Chernoff bound still gives `p_* <= p_r`.
pub fn p_inner_max(p_r: f64, m: u64, delta_outer: f64) -> Result<f64> {
    Ok(p_inner_optimum(p_r, m, delta_outer)?.value.exp())
}

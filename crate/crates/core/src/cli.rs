//! Command-line front end.
//!
//! Settings come from three layers, later ones winning: built-in defaults,
//! a `key = value` config file (`--config`), then flags (`--seed`,
//! `--trials`, `--format`, `--jobs`, `--id`, `--out`, and `--set key=value`
//! for anything else).
//!
//! Recognized keys:
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `Q` | subchannels | 4096 |
//! | `q` | alphabet size (prime power) | 64 |
//! | `m` | subranges per user | 64 |
//! | `t` | tacts (0 picks the minimum) | 0 |
//! | `S` | active users | 10 |
//! | `k` | information symbols | 120 |
//! | `n` | code length for the exact bound (0 = none) | 0 |
//! | `p_r` | target failure probability | 1e-10 |
//! | `c`, `eps` | asymptotic decay rate and slack | 1e-6 |
//! | `decoder` | `exhaustive` or `concatenated` | exhaustive |
//! | `k_outer`, `k_inner` | concatenated dimensions | 2, 1 |
//! | `model` | `iid-subset` or `full-stream` | iid-subset |
//! | `trials`, `seed`, `jobs` | campaign size, seed, threads | 1000, 1, all |
//! | `format` | `csv` or `json` | csv |
//! | `id` | figure number | 1 |
//! | `sweep`, `values` | swept key and its values (`1,2,5` or `1..10`) | |
//! | `series` | comma list overriding a figure's series values | |
//! | `timing` | include per-trial wall time in simulate output | false |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bounds::{self, SystemParams};
use crate::channel::InterferenceModel;
use crate::codes::{gv_exact_n, LinearCode, DEFAULT_ENUMERATION_LIMIT};
use crate::decoders::{Codebook, ConcatenatedCode};
use crate::field::Field;
use crate::figures::{fmt_real, Cell, Fig1, Fig2, Fig3, Fig4, Table};
use crate::ks::FrameLayout;
use crate::simulation::{self, CampaignConfig, CampaignReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
    #[error("decoding error: {0} trial(s) decoded to a wrong codeword")]
    WrongDecode(u64),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn precondition(e: impl fmt::Display) -> CliError {
    let s = e.to_string();
    CliError::Precondition(s.strip_prefix("precondition violated: ").unwrap_or(&s).to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bounds,
    Simulate,
    Sweep,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecoderKind {
    #[default]
    Exhaustive,
    Concatenated,
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subchannels: u64,
    pub q: u64,
    pub m: u64,
    pub t: u64,
    pub users: u64,
    pub k: u64,
    pub n: u64,
    pub p_r: f64,
    pub c: f64,
    pub eps: f64,
    pub decoder: DecoderKind,
    pub k_outer: u64,
    pub k_inner: u64,
    pub model: InterferenceModel,
    pub trials: u64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub format: Format,
    pub figure: u32,
    pub sweep: Option<(String, Vec<String>)>,
    pub series: Option<Vec<u64>>,
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subchannels: 4096,
            q: 64,
            m: 64,
            t: 0,
            users: 10,
            k: 120,
            n: 0,
            p_r: 1e-10,
            c: 1e-6,
            eps: 1e-6,
            decoder: DecoderKind::Exhaustive,
            k_outer: 2,
            k_inner: 1,
            model: InterferenceModel::IidSubset,
            trials: 1000,
            seed: 1,
            jobs: None,
            format: Format::Csv,
            figure: 1,
            sweep: None,
            series: None,
            timing: false,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| format!("{key} = {value:?}: {e}"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<String>, String> {
    if let Some((a, b)) = value.split_once("..") {
        let lo: u64 = parse_num(key, a.trim())?;
        let hi: u64 = parse_num(key, b.trim().trim_start_matches('='))?;
        if lo > hi {
            return Err(format!("{key}: empty range {value}"));
        }
        return Ok((lo..=hi).map(|v| v.to_string()).collect());
    }
    let items: Vec<String> = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(format!("{key}: empty list"));
    }
    Ok(items)
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "Q" => self.subchannels = parse_num(key, v)?,
            "q" => self.q = parse_num(key, v)?,
            "m" => self.m = parse_num(key, v)?,
            "t" => self.t = parse_num(key, v)?,
            "S" => self.users = parse_num(key, v)?,
            "k" => self.k = parse_num(key, v)?,
            "n" => self.n = parse_num(key, v)?,
            "p_r" => self.p_r = parse_num(key, v)?,
            "c" => self.c = parse_num(key, v)?,
            "eps" => self.eps = parse_num(key, v)?,
            "decoder" => {
                self.decoder = match v {
                    "exhaustive" => DecoderKind::Exhaustive,
                    "concatenated" => DecoderKind::Concatenated,
                    other => return Err(format!("unknown decoder {other:?} (exhaustive or concatenated)")),
                }
            }
            "k_outer" => self.k_outer = parse_num(key, v)?,
            "k_inner" => self.k_inner = parse_num(key, v)?,
            "model" => self.model = v.parse().map_err(|e| format!("{e}"))?,
            "trials" => self.trials = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "jobs" => self.jobs = Some(parse_num(key, v)?),
            "format" => self.format = v.parse()?,
            "id" => self.figure = parse_num(key, v)?,
            "sweep" => {
                let values = self.sweep.take().map(|s| s.1).unwrap_or_default();
                self.sweep = Some((v.to_string(), values));
            }
            "values" => {
                let name = self.sweep.take().map(|s| s.0).unwrap_or_default();
                self.sweep = Some((name, parse_list(key, v)?));
            }
            "series" => {
                self.series = Some(
                    parse_list(key, v)?
                        .iter()
                        .map(|s| parse_num(key, s))
                        .collect::<Result<_, _>>()?,
                )
            }
            "timing" => self.timing = parse_num(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Applies a config file's contents: `key = value` per line, `#`
    /// comments and blank lines ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
                line: i + 1,
                reason: format!("expected key = value, got {line:?}"),
            })?;
            self.set(key, value).map_err(|reason| CliError::Config { line: i + 1, reason })?;
        }
        Ok(())
    }

    fn params(&self) -> SystemParams {
        SystemParams {
            subchannels: self.subchannels,
            q: self.q,
            m: self.m,
            t: self.t,
            users: self.users,
            k: self.k,
            p_r: self.p_r,
        }
    }

    fn meta(&self, table: &mut Table, keys: &[&str]) {
        for &key in keys {
            let value = match key {
                "Q" => self.subchannels.to_string(),
                "q" => self.q.to_string(),
                "m" => self.m.to_string(),
                "t" => self.t.to_string(),
                "S" => self.users.to_string(),
                "k" => self.k.to_string(),
                "n" => self.n.to_string(),
                "p_r" => fmt_real(self.p_r),
                "c" => fmt_real(self.c),
                "eps" => fmt_real(self.eps),
                "decoder" => format!("{:?}", self.decoder).to_lowercase(),
                "k_outer" => self.k_outer.to_string(),
                "k_inner" => self.k_inner.to_string(),
                "model" => self.model.to_string(),
                "trials" => self.trials.to_string(),
                "seed" => self.seed.to_string(),
                _ => continue,
            };
            table.meta(key, value);
        }
    }
}

fn na() -> Cell {
    Cell::from("nan")
}

fn cell_or_na<T: Into<Cell>, E>(r: Result<T, E>) -> Cell {
    r.map_or_else(|_| na(), Into::into)
}

/// Every bound for the configured scenario as `quantity, value` rows.
pub fn run_bounds(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params();
    p.validate().map_err(precondition)?;
    if cfg.q < 3 {
        return Err(CliError::Precondition("the closed-form bounds need q >= 3".into()));
    }
    let b = p.beta().map_err(precondition)?;
    let mut t = Table::new(&["quantity", "value"]);
    cfg.meta(&mut t, &["Q", "q", "m", "t", "S", "k", "n", "p_r", "c", "eps"]);
    let mut row = |name: &str, value: Cell| t.push(vec![name.into(), value]);

    row("beta", b.into());
    let d = bounds::required_d(cfg.k, cfg.q, cfg.p_r, b).map_err(precondition)?;
    row("required_d", d.into());
    let n = bounds::closed_form_n(cfg.k, d, cfg.q).map_err(precondition)?;
    row("closed_form_n", n.into());
    row("gv_exact_n", cell_or_na(gv_exact_n(cfg.q, cfg.k as usize, d as usize).map(|v| v as u64)));
    let loose = bounds::p_star_bound(None, cfg.q, cfg.k, b, d).map_err(precondition)?;
    row("p_star_loose", loose.loose().into());
    row("log2_p_star_loose", loose.log2_loose.into());

    // the exact sum needs an actual code: an MDS code of length n if one is configured
    if cfg.n > 0 {
        if cfg.k > cfg.n {
            return Err(CliError::Precondition(format!("need k <= n (got k={}, n={})", cfg.k, cfg.n)));
        }
        let wd = crate::codes::WeightDistribution::mds(cfg.n as usize, cfg.k as usize, cfg.q);
        let dn = cfg.n - cfg.k + 1;
        let fb = bounds::p_star_bound(Some(&wd), cfg.q, cfg.k, b, dn).map_err(precondition)?;
        row("mds_d", dn.into());
        row("p_star_exact", cell_or_na(fb.exact()));
        row("p_star_mds_loose", fb.loose().into());
    }

    let tacts = bounds::min_tacts(&p).map_err(precondition)?;
    row("min_tacts", tacts.into());
    row("min_tacts_real", cell_or_na(bounds::min_tacts_real(&p)));
    row("min_tacts_stepwise", cell_or_na(bounds::min_tacts_stepwise(&p)));
    let mut used = p;
    used.t = if cfg.t > 0 { cfg.t } else { tacts };
    row("t", used.t.into());
    let r = bounds::rates(&used).map_err(precondition)?;
    row("rate_per_user", r.per_user.into());
    row("rate_sum", r.sum.into());
    row("rho", r.relative.into());
    let s_exact = bounds::s_max_for_code(cfg.q, n, cfg.k, d, cfg.p_r, cfg.m, cfg.subchannels);
    row("s_max", cell_or_na(s_exact));
    let rate = bounds::CodeRate::new(n, cfg.k, d);
    row(
        "s_max_simplified",
        cell_or_na(bounds::s_max_simplified(cfg.q, rate.rate, rate.delta, d, cfg.p_r, cfg.m, cfg.subchannels)),
    );
    let rs = bounds::rho_star(cfg.subchannels, cfg.q, cfg.users, cfg.k, cfg.p_r).map_err(precondition)?;
    row("rho_star", rs.rho.into());
    row("rho_star_m", rs.m.into());

    row("t_asymptotic", cell_or_na(bounds::t_asymptotic(cfg.q, cfg.k, cfg.m, b, cfg.c)));
    let mu = cfg.m as f64 / cfg.subchannels as f64;
    row("rho_inf_lower", cell_or_na(bounds::rho_inf_lower(cfg.q, cfg.users, mu, cfg.c)));
    match bounds::rho_star_inf(cfg.q, cfg.users, cfg.c) {
        Ok(r) => {
            row("rho_star_inf", r.value.into());
            row("rho_star_inf_mu", r.mu.into());
            row("mu_hat", r.mu_hat.into());
            row("rho_star_inf_piecewise", r.value_piecewise.into());
        }
        Err(_) => {
            for name in ["rho_star_inf", "rho_star_inf_mu", "mu_hat", "rho_star_inf_piecewise"] {
                row(name, na());
            }
        }
    }
    row("rho_floor", cell_or_na(bounds::rho_floor(cfg.q, cfg.users, cfg.eps)));
    Ok(t)
}

/// `(p, e)` with `q = p^e`.
fn prime_power(q: u64) -> Result<(u32, u32), CliError> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    let mut e = 0;
    while rest > 1 && rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if q < 2 || rest != 1 || p > u32::MAX as u64 {
        return Err(CliError::Precondition(format!("q = {q} is not a prime power")));
    }
    Ok((p as u32, e))
}

fn campaign_config(cfg: &RunConfig) -> CampaignConfig {
    CampaignConfig {
        users: cfg.users as usize,
        model: cfg.model,
        seed: cfg.seed,
        trials: cfg.trials,
        jobs: cfg.jobs,
    }
}

fn records_table(cfg: &RunConfig, report: &CampaignReport) -> Table {
    let mut cols = vec!["trial", "seed", "outcome", "candidates", "erasures"];
    if cfg.timing {
        cols.push("elapsed_us");
    }
    let mut t = Table::new(&cols);
    for r in &report.records {
        let mut row = vec![
            r.trial.into(),
            Cell::Text(r.seed.to_string()),
            r.outcome.as_str().into(),
            (r.candidates as u64).into(),
            r.erasures.map_or_else(na, |e| (e as u64).into()),
        ];
        if cfg.timing {
            row.push((r.elapsed.as_micros() as u64).into());
        }
        t.push(row);
    }
    t
}

/// Runs a Monte-Carlo campaign. The summary and bound comparison go in the
/// metadata; rows are per-trial records. A wrong decode is an error.
pub fn run_simulate(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.trials < 1 {
        return Err(CliError::Precondition("need trials >= 1".into()));
    }
    if cfg.users < 1 {
        return Err(CliError::Precondition("need S >= 1".into()));
    }
    let (p, e) = prime_power(cfg.q)?;
    let field = Field::new(p, e).map_err(precondition)?;
    let campaign = campaign_config(cfg);
    let (report, meta): (CampaignReport, Vec<(&str, String)>) = match cfg.decoder {
        DecoderKind::Exhaustive => {
            if cfg.t == 0 {
                return Err(CliError::Precondition("simulate needs t >= 1".into()));
            }
            let n = (cfg.m * cfg.t) as usize;
            let size = (cfg.q as f64).powi(cfg.k as i32);
            if size > DEFAULT_ENUMERATION_LIMIT as f64 {
                return Err(CliError::Precondition(format!(
                    "exhaustive decoding enumerates q^k = {size} codewords, above the limit {DEFAULT_ENUMERATION_LIMIT}"
                )));
            }
            let code = LinearCode::reed_solomon(&field, n, cfg.k as usize).map_err(precondition)?;
            let book = Codebook::new(code).map_err(precondition)?;
            let layout = FrameLayout::new(cfg.q as usize, cfg.m as usize, cfg.t as usize, cfg.subchannels as usize)
                .map_err(precondition)?;
            let bounds = simulation::exhaustive_bounds(&book, &layout, cfg.users as usize).map_err(precondition)?;
            let report = simulation::run_exhaustive(&book, layout, &campaign).map_err(precondition)?;
            let meta = vec![
                ("code", format!("RS({n},{}) over GF({})", cfg.k, cfg.q)),
                ("d", book.code().d().to_string()),
                ("beta", fmt_real(bounds.beta)),
                ("bound_exact", fmt_real(bounds.exact)),
                ("bound_loose", fmt_real(bounds.loose)),
                ("within_exact_3sigma", report.summary.within(bounds.exact, 3.0).to_string()),
            ];
            (report, meta)
        }
        DecoderKind::Concatenated => {
            if cfg.t == 0 {
                return Err(CliError::Precondition("simulate needs t >= 1".into()));
            }
            let inner_size = (cfg.q as f64).powi(cfg.k_inner as i32);
            if inner_size > DEFAULT_ENUMERATION_LIMIT as f64 {
                return Err(CliError::Precondition(format!(
                    "inner decoding enumerates q^k_inner = {inner_size} codewords, above the limit"
                )));
            }
            let outer_field = Field::extension(&field, cfg.k_inner as u32).map_err(precondition)?;
            let outer =
                LinearCode::reed_solomon(&outer_field, cfg.m as usize, cfg.k_outer as usize).map_err(precondition)?;
            let inner = LinearCode::reed_solomon(&field, cfg.t as usize, cfg.k_inner as usize).map_err(precondition)?;
            let code = ConcatenatedCode::new(outer, inner).map_err(precondition)?;
            let bounds = simulation::concatenated_bounds(&code, cfg.subchannels as usize, cfg.users as usize)
                .map_err(precondition)?;
            let report =
                simulation::run_concatenated(&code, cfg.subchannels as usize, &campaign).map_err(precondition)?;
            let chernoff = bounds.chernoff.map_or("nan".to_string(), fmt_real);
            let within = bounds.chernoff.is_some_and(|c| report.summary.within(c, 3.0));
            let meta = vec![
                (
                    "code",
                    format!(
                        "RS({},{}) over GF({}) with inner RS({},{}) over GF({})",
                        cfg.m,
                        cfg.k_outer,
                        outer_field_order(cfg),
                        cfg.t,
                        cfg.k_inner,
                        cfg.q
                    ),
                ),
                ("beta", fmt_real(bounds.beta)),
                ("bound_inner", fmt_real(bounds.inner)),
                ("bound_chernoff", chernoff),
                ("within_chernoff_3sigma", within.to_string()),
                (
                    "inner_erasure_rate",
                    report.summary.inner_erasure_rate().map_or("nan".into(), fmt_real),
                ),
            ];
            (report, meta)
        }
    };
    let mut t = records_table(cfg, &report);
    cfg.meta(
        &mut t,
        &["Q", "q", "m", "t", "S", "k", "decoder", "k_outer", "k_inner", "model", "trials", "seed"],
    );
    if cfg.decoder == DecoderKind::Exhaustive {
        t.meta.retain(|(k, _)| k != "k_outer" && k != "k_inner");
    } else {
        t.meta.retain(|(k, _)| k != "k");
    }
    for (k, v) in meta {
        t.meta(k, v);
    }
    let s = report.summary;
    let (lo, hi) = s.failure_interval();
    t.meta("decoded", s.decoded)
        .meta("failures", s.failures)
        .meta("wrong", s.wrong)
        .meta_real("failure_rate", s.failure_rate())
        .meta_real("failure_ci95_low", lo)
        .meta_real("failure_ci95_high", hi);
    if s.wrong > 0 {
        return Err(CliError::WrongDecode(s.wrong));
    }
    Ok(t)
}

fn outer_field_order(cfg: &RunConfig) -> u64 {
    cfg.q.pow(cfg.k_inner as u32)
}

const SWEEP_COLUMNS: [&str; 8] = ["beta", "required_d", "closed_form_n", "min_tacts", "rho", "s_max", "p_star_loose", "rho_star"];

/// Evaluates the main bounds for each value of one swept key.
pub fn run_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let Some((key, values)) = cfg.sweep.clone().filter(|(k, v)| !k.is_empty() && !v.is_empty()) else {
        return Err(CliError::Precondition("sweep needs `sweep = <key>` and `values = <list or a..b>`".into()));
    };
    let mut cols = vec![key.as_str()];
    cols.extend(SWEEP_COLUMNS);
    let mut t = Table::new(&cols);
    cfg.meta(&mut t, &["Q", "q", "m", "t", "S", "k", "p_r", "c", "eps"]);
    t.meta.retain(|(k, _)| *k != key);
    t.meta("sweep", &key);
    for v in &values {
        let mut c = cfg.clone();
        c.sweep = None;
        c.set(&key, v).map_err(CliError::Precondition)?;
        let report = run_bounds(&c)?;
        let lookup: BTreeMap<String, Cell> = report
            .rows
            .into_iter()
            .map(|mut r| {
                let value = r.pop().expect("value");
                (r[0].to_string(), value)
            })
            .collect();
        let mut row = vec![Cell::from(v.as_str())];
        row.extend(SWEEP_COLUMNS.iter().map(|k| lookup.get(*k).cloned().unwrap_or_else(na)));
        t.push(row);
    }
    Ok(t)
}

/// Data for figure `id` with the configured overrides.
pub fn run_figure(cfg: &RunConfig, explicit: &dyn Fn(&str) -> bool) -> Result<Table, CliError> {
    let pick = |key: &str, value: u64, default: u64| if explicit(key) { value } else { default };
    let pick_f = |key: &str, value: f64, default: f64| if explicit(key) { value } else { default };
    let t = match cfg.figure {
        1 => {
            let d = Fig1::default();
            Fig1 {
                subchannels: pick("Q", cfg.subchannels, d.subchannels),
                q: pick("q", cfg.q, d.q),
                k: pick("k", cfg.k, d.k),
                p_r: pick_f("p_r", cfg.p_r, d.p_r),
                users: cfg.series.clone().unwrap_or(d.users),
            }
            .table()
        }
        2 => {
            let d = Fig2::default();
            Fig2 {
                subchannels: pick("Q", cfg.subchannels, d.subchannels),
                p_r: pick_f("p_r", cfg.p_r, d.p_r),
                alphabets: cfg.series.clone().unwrap_or(d.alphabets),
                ..d
            }
            .table()
        }
        3 => {
            let d = Fig3::default();
            Fig3 {
                eps: pick_f("eps", cfg.eps, d.eps),
                alphabets: cfg.series.clone().unwrap_or(d.alphabets),
                ..d
            }
            .table()
        }
        4 => {
            let d = Fig4::default();
            Fig4 {
                subchannels: pick("Q", cfg.subchannels, d.subchannels),
                p_r: pick_f("p_r", cfg.p_r, d.p_r),
                m: pick("m", cfg.m, d.m),
                t: pick("t", cfg.t, d.t),
                q: pick("q", cfg.q, d.q),
                inner_dims: cfg.series.clone().unwrap_or(d.inner_dims),
            }
            .table()
        }
        other => return Err(CliError::Precondition(format!("figure id must be 1, 2, 3 or 4 (got {other})"))),
    };
    t.map_err(precondition)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Real(v) if v.is_finite() => json!(v),
        Cell::Real(v) => json!(v.to_string()),
        Cell::Text(s) if s == "nan" => Value::Null,
        Cell::Text(s) => json!(s),
    }
}

/// Renders a table: CSV has `# key = value` lines, then a header row, then
/// one line per row; JSON is an object with `meta`, `columns` and `rows`.
pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &table.meta {
                out.push_str(&format!("# {k} = {v}\n"));
            }
            out.push_str(&table.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.iter().map(|c| csv_field(&c.to_string())).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let meta: Map<String, Value> = table.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(json_cell).collect()))
                .collect();
            let doc = json!({ "meta": meta, "columns": table.columns, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vdmac", version, about = "Coded multiple access over an OR channel: bounds, simulation, figures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
    /// `key = value` config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Output file (stdout if absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for simulations
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Figure number (1-4)
    #[arg(long, global = true)]
    pub id: Option<u32>,
    /// Any config key, e.g. `--set S=5`; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandArg {
    /// Evaluate every bound for one scenario
    Bounds,
    /// Run a Monte-Carlo decoding campaign
    Simulate,
    /// Evaluate the bounds across values of one key
    Sweep,
    /// Emit the data behind a figure
    Figure,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Bounds => Command::Bounds,
            CommandArg::Simulate => Command::Simulate,
            CommandArg::Sweep => Command::Sweep,
            CommandArg::Figure => Command::Figure,
        }
    }
}

/// Resolves the layered configuration and returns it with the set of keys
/// given explicitly (by file or flag).
pub fn resolve(cli: &Cli) -> Result<(Command, RunConfig, Vec<String>), CliError> {
    let mut cfg = RunConfig::default();
    let mut explicit = Vec::new();
    let mut note = |text: &str| {
        for line in text.lines() {
            if let Some((k, _)) = line.split('#').next().unwrap_or("").split_once('=') {
                explicit.push(k.trim().to_string());
            }
        }
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Precondition(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
        note(&text);
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Precondition(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k, v).map_err(CliError::Precondition)?;
        note(kv);
    }
    let flags: [(&str, Option<String>); 5] = [
        ("seed", cli.seed.map(|v| v.to_string())),
        ("trials", cli.trials.map(|v| v.to_string())),
        ("jobs", cli.jobs.map(|v| v.to_string())),
        ("id", cli.id.map(|v| v.to_string())),
        ("format", cli.format.map(|f| format!("{f:?}"))),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v).map_err(CliError::Precondition)?;
            explicit.push(k.to_string());
        }
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok((cli.command.into(), cfg, explicit))
}

/// Runs one command and returns the rendered output.
pub fn execute(command: Command, cfg: &RunConfig, explicit: &[String]) -> Result<String, CliError> {
    let is_explicit = |k: &str| explicit.iter().any(|e| e == k);
    let table = match command {
        Command::Bounds => run_bounds(cfg)?,
        Command::Simulate => run_simulate(cfg)?,
        Command::Sweep => run_sweep(cfg)?,
        Command::Figure => run_figure(cfg, &is_explicit)?,
    };
    Ok(render(&table, cfg.format))
}

/// Entry point for the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli).and_then(|(command, cfg, explicit)| {
        let text = execute(command, &cfg, &explicit)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, text)?,
            None => {
                use std::io::Write;
                match std::io::stdout().lock().write_all(text.as_bytes()) {
                    // a closed pipe (`| head`) is not an error
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                    other => other?,
                }
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

//! Monte-Carlo campaigns.
//!
//! Trial `i` of a campaign with seed `s` uses seed `mix_seed(s, i)` for every
//! random choice it makes, so results do not depend on how trials are
//! scheduled across threads.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::TactFrame;
use crate::bounds::{self, BoundsError};
use crate::channel::{mix_seed, BlockSource, ChannelError, ChannelScenario, InterferenceModel, RandomSymbols};
use crate::codes::CodeError;
use crate::decoders::{
    exhaustive_decode, Codebook, CodebookSource, ConcatenatedCode, DecodeError, DecodeMode, DecodeOutcome,
};
use crate::ks::{ks_encode, stack, FrameLayout, KsError, StackedBlock};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid campaign: {0}")]
    Config(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Ks(#[from] KsError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("thread pool: {0}")]
    Pool(String),
}

const MESSAGE_DOMAIN: u64 = 0x006d_7367;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialOutcome {
    Decoded,
    Failure,
    /// A unique candidate that is not the transmitted word.
    Wrong,
}

impl TrialOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialOutcome::Decoded => "DECODED",
            TrialOutcome::Failure => "FAILURE",
            TrialOutcome::Wrong => "WRONG",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub outcome: TrialOutcome,
    /// Candidates passing the cover condition (exhaustive decoder), or 0.
    pub candidates: usize,
    /// Erased outer positions (concatenated decoder only).
    pub erasures: Option<usize>,
    pub elapsed: Duration,
}

/// Counts over a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub trials: u64,
    pub decoded: u64,
    pub failures: u64,
    pub wrong: u64,
    /// Total erased outer positions over all trials.
    pub erasures: u64,
    /// Outer positions inspected, `trials · m`, for the concatenated decoder.
    pub inner_blocks: u64,
}

impl Summary {
    pub fn from_records(records: &[TrialRecord], blocks_per_trial: u64) -> Self {
        let count = |o| records.iter().filter(|r| r.outcome == o).count() as u64;
        let erasures: u64 = records.iter().filter_map(|r| r.erasures).map(|e| e as u64).sum();
        let concatenated = records.iter().any(|r| r.erasures.is_some());
        Summary {
            trials: records.len() as u64,
            decoded: count(TrialOutcome::Decoded),
            failures: count(TrialOutcome::Failure),
            wrong: count(TrialOutcome::Wrong),
            erasures,
            inner_blocks: if concatenated { records.len() as u64 * blocks_per_trial } else { 0 },
        }
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.trials.max(1) as f64
    }

    /// 95% Wilson score interval for the failure probability.
    pub fn failure_interval(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.trials, 1.959_963_984_540_054)
    }

    /// Fraction of inner blocks that came out erased.
    pub fn inner_erasure_rate(&self) -> Option<f64> {
        (self.inner_blocks > 0).then(|| self.erasures as f64 / self.inner_blocks as f64)
    }

    /// Whether the failure count is within `z` binomial standard deviations
    /// above `bound`.
    pub fn within(&self, bound: f64, z: f64) -> bool {
        binomial_within(self.failures, self.trials, bound, z)
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// `count <= n p + z sqrt(n p (1 - p))`, with `p` clamped to `[0, 1]`.
pub fn binomial_within(count: u64, n: u64, p: f64, z: f64) -> bool {
    let p = p.clamp(0.0, 1.0);
    let n = n as f64;
    count as f64 <= n * p + z * (n * p * (1.0 - p)).sqrt()
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Shared campaign settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignConfig {
    pub users: usize,
    pub model: InterferenceModel,
    pub seed: u64,
    pub trials: u64,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl CampaignConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.users == 0 {
            return Err(SimError::Config("need S >= 1".into()));
        }
        if self.trials == 0 {
            return Err(SimError::Config("need trials >= 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(SimError::Config("need jobs >= 1".into()));
        }
        Ok(())
    }
}

fn run_trials<F>(cfg: &CampaignConfig, trial: F) -> Result<Vec<TrialRecord>, SimError>
where
    F: Fn(u64, u64) -> Result<TrialRecord, SimError> + Sync,
{
    let body = || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| trial(i, mix_seed(cfg.seed, i)))
            .collect::<Result<Vec<_>, _>>()
    };
    match cfg.jobs {
        None => body(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| SimError::Pool(e.to_string()))?
            .install(body),
    }
}

/// Sends a uniformly random codeword of `book` each trial and decodes it by
/// exhaustive search.
pub fn run_exhaustive(book: &Codebook, layout: FrameLayout, cfg: &CampaignConfig) -> Result<CampaignReport, SimError> {
    cfg.validate()?;
    ChannelScenario::new(layout, cfg.users, 0, cfg.model, cfg.seed)?;
    book.block(0, layout)?;
    let source = CodebookSource { book, layout };
    let mode = if book.len() <= 4096 {
        DecodeMode::Diagnostic
    } else {
        DecodeMode::Status
    };
    let records = run_trials(cfg, |trial, seed| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, MESSAGE_DOMAIN));
        let index = rng.gen_range(0..book.len());
        let block = book.block(index, layout)?;
        let scenario = ChannelScenario::new(layout, cfg.users, 0, cfg.model, seed)?;
        let reception = scenario.run(&block, &source)?;
        let outcome = exhaustive_decode(&reception.received, book, &layout, mode)?;
        let (outcome, candidates) = match outcome {
            DecodeOutcome::Decoded(c) if c == book.codeword(index) => (TrialOutcome::Decoded, 1),
            DecodeOutcome::Decoded(_) => (TrialOutcome::Wrong, 1),
            DecodeOutcome::Failure { candidates } => (TrialOutcome::Failure, candidates.len()),
        };
        Ok(TrialRecord {
            trial,
            seed,
            outcome,
            candidates,
            erasures: None,
            elapsed: start.elapsed(),
        })
    })?;
    let summary = Summary::from_records(&records, 0);
    Ok(CampaignReport { records, summary })
}

/// Full-stream interferers sending random concatenated codewords.
pub struct ConcatenatedSource<'a> {
    pub code: &'a ConcatenatedCode,
    pub layout: FrameLayout,
}

impl ConcatenatedSource<'_> {
    fn random_block<R: Rng>(&self, rng: &mut R) -> (Vec<crate::field::Gf>, StackedBlock) {
        let outer_field = self.code.outer().field();
        let msg: Vec<_> = (0..self.code.outer().k())
            .map(|_| outer_field.element(rng.gen_range(0..outer_field.order() as u64)).expect("below order"))
            .collect();
        let word = self.code.encode(&msg).expect("valid message");
        let block = stack(&ks_encode(self.code.field(), &word), self.layout).expect("layout matches code");
        (word, block)
    }
}

impl BlockSource for ConcatenatedSource<'_> {
    fn layout(&self) -> FrameLayout {
        self.layout
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> StackedBlock {
        self.random_block(rng).1
    }
}

/// Sends a uniformly random concatenated codeword each trial; inner
/// exhaustive decoding per subrange, outer erasure decoding.
pub fn run_concatenated(
    code: &ConcatenatedCode,
    subchannels: usize,
    cfg: &CampaignConfig,
) -> Result<CampaignReport, SimError> {
    cfg.validate()?;
    let layout = code.layout(subchannels)?;
    ChannelScenario::new(layout, cfg.users, 0, cfg.model, cfg.seed)?;
    let source = ConcatenatedSource { code, layout };
    let records = run_trials(cfg, |trial, seed| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, MESSAGE_DOMAIN));
        let (word, block) = source.random_block(&mut rng);
        let scenario = ChannelScenario::new(layout, cfg.users, 0, cfg.model, seed)?;
        let reception = scenario.run(&block, &source)?;
        let erasures = code
            .inner_decode_all(&reception.received, &layout)?
            .iter()
            .filter(|s| s.is_none())
            .count();
        let outcome = match code.decode(&reception.received, &layout)? {
            DecodeOutcome::Decoded(c) if c == word => TrialOutcome::Decoded,
            DecodeOutcome::Decoded(_) => TrialOutcome::Wrong,
            DecodeOutcome::Failure { .. } => TrialOutcome::Failure,
        };
        Ok(TrialRecord {
            trial,
            seed,
            outcome,
            candidates: 0,
            erasures: Some(erasures),
            elapsed: start.elapsed(),
        })
    })?;
    let summary = Summary::from_records(&records, code.m() as u64);
    Ok(CampaignReport { records, summary })
}

/// Analytic bounds to compare an exhaustive campaign against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveBounds {
    pub beta: f64,
    pub exact: f64,
    pub loose: f64,
}

pub fn exhaustive_bounds(book: &Codebook, layout: &FrameLayout, users: usize) -> Result<ExhaustiveBounds, SimError> {
    let code = book.code();
    let b = bounds::beta(layout.subchannels as u64, layout.m as u64, users as u64)?;
    let wd = code.weight_distribution()?;
    let q = code.field().order() as u64;
    let fb = bounds::p_star_bound(Some(&wd), q, code.k() as u64, b, code.d() as u64)?;
    Ok(ExhaustiveBounds {
        beta: b,
        exact: fb.exact()?,
        loose: fb.loose(),
    })
}

/// Analytic bounds for a concatenated campaign: the inner union bound and
/// the Chernoff bound on `d_O` or more erased blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcatenatedBounds {
    pub beta: f64,
    pub inner: f64,
    /// `None` when the inner bound is not below 1.
    pub chernoff: Option<f64>,
}

pub fn concatenated_bounds(
    code: &ConcatenatedCode,
    subchannels: usize,
    users: usize,
) -> Result<ConcatenatedBounds, SimError> {
    let inner = code.inner();
    let b = bounds::beta(subchannels as u64, code.m() as u64, users as u64)?;
    let wd = inner.weight_distribution()?;
    let q = code.field().order() as u64;
    let p_inner = bounds::p_star_bound(Some(&wd), q, inner.k() as u64, b, inner.d() as u64)?.exact()?;
    let chernoff = if p_inner > 0.0 && p_inner < 1.0 {
        Some(bounds::chernoff_p_star(code.outer().d() as f64, code.m() as u64, p_inner)?)
    } else if p_inner == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Ok(ConcatenatedBounds {
        beta: b,
        inner: p_inner,
        chernoff,
    })
}

/// Per-position coverage of the target's frame by the other users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageStats {
    /// Position observations, `tacts · Q`.
    pub samples: u64,
    pub covered: u64,
    pub beta: f64,
}

impl CoverageStats {
    pub fn rate(&self) -> f64 {
        self.covered as f64 / self.samples as f64
    }

    /// `(observed - expected) / σ` under independent Bernoulli(β) samples.
    pub fn z_score(&self) -> f64 {
        let n = self.samples as f64;
        let sigma = (n * self.beta * (1.0 - self.beta)).sqrt();
        let diff = self.covered as f64 - n * self.beta;
        if sigma == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / sigma
        }
    }
}

/// Counts, over `tacts` tacts, how often each of the `Q` positions (in the
/// target's receiver coordinates) is covered by the `S - 1` interferers.
pub fn coverage_experiment(
    layout: FrameLayout,
    users: usize,
    model: InterferenceModel,
    seed: u64,
    tacts: u64,
) -> Result<CoverageStats, SimError> {
    if users == 0 || tacts == 0 {
        return Err(SimError::Config("need S >= 1 and tacts >= 1".into()));
    }
    let scenario = ChannelScenario::new(layout, users, 0, model, seed)?;
    let source = RandomSymbols(layout);
    let target = scenario.schedule(0);
    let covered: u64 = (0..tacts)
        .into_par_iter()
        .map(|tact| {
            let mut frame = TactFrame::zeros(layout.subchannels);
            for user in 1..users {
                frame
                    .or_assign(&scenario.gen_interference(user, tact, &source))
                    .expect("same length");
            }
            let seen = crate::channel::inverse_permute(&frame, &target.permutation(tact)).expect("same length");
            seen.weight() as u64
        })
        .sum();
    Ok(CoverageStats {
        samples: tacts * layout.subchannels as u64,
        covered,
        beta: bounds::beta(layout.subchannels as u64, layout.m as u64, users as u64)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::LinearCode;
    use crate::field::Field;

    fn rs62() -> Codebook {
        let f = Field::new(7, 1).unwrap();
        Codebook::new(LinearCode::reed_solomon(&f, 6, 2).unwrap()).unwrap()
    }

    fn cfg(users: usize, trials: u64) -> CampaignConfig {
        CampaignConfig {
            users,
            model: InterferenceModel::FullStream,
            seed: 11,
            trials,
            jobs: None,
        }
    }

    #[test]
    fn single_user_never_fails() {
        let book = rs62();
        let layout = FrameLayout::new(7, 2, 3, 14).unwrap();
        let r = run_exhaustive(&book, layout, &cfg(1, 200)).unwrap();
        assert_eq!(r.summary.decoded, 200);
        assert!(r.records.iter().all(|t| t.candidates == 1));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let book = rs62();
        let layout = FrameLayout::new(7, 1, 6, 14).unwrap();
        let strip = |r: CampaignReport| {
            r.records
                .into_iter()
                .map(|t| (t.trial, t.seed, t.outcome, t.candidates))
                .collect::<Vec<_>>()
        };
        let mut one = cfg(3, 300);
        one.jobs = Some(1);
        let mut four = one;
        four.jobs = Some(4);
        assert_eq!(
            strip(run_exhaustive(&book, layout, &one).unwrap()),
            strip(run_exhaustive(&book, layout, &four).unwrap())
        );
    }

    #[test]
    fn exhaustive_campaign_respects_bound() {
        let book = rs62();
        let layout = FrameLayout::new(7, 2, 3, 28).unwrap();
        let r = run_exhaustive(&book, layout, &cfg(3, 2000)).unwrap();
        let b = exhaustive_bounds(&book, &layout, 3).unwrap();
        assert_eq!(r.summary.wrong, 0);
        assert!(b.exact <= b.loose);
        assert!(r.summary.within(b.exact, 3.0), "{} vs {}", r.summary.failure_rate(), b.exact);
    }

    #[test]
    fn concatenated_campaign() {
        let f = Field::new(7, 1).unwrap();
        let cc = ConcatenatedCode::new(
            LinearCode::reed_solomon(&f, 4, 2).unwrap(),
            LinearCode::reed_solomon(&f, 3, 1).unwrap(),
        )
        .unwrap();
        let r = run_concatenated(&cc, 28, &cfg(3, 2000)).unwrap();
        assert_eq!(r.summary.wrong, 0);
        let b = concatenated_bounds(&cc, 28, 3).unwrap();
        assert!(r.summary.within(b.chernoff.unwrap(), 3.0));
        assert!(binomial_within(r.summary.erasures, r.summary.inner_blocks, b.inner, 3.0));
    }

    #[test]
    fn invalid_campaigns_rejected() {
        let book = rs62();
        let layout = FrameLayout::new(7, 2, 3, 14).unwrap();
        assert!(run_exhaustive(&book, layout, &cfg(0, 10)).is_err());
        assert!(run_exhaustive(&book, layout, &cfg(2, 0)).is_err());
        let wrong = FrameLayout::new(7, 1, 3, 14).unwrap();
        assert!(run_exhaustive(&book, wrong, &cfg(2, 10)).is_err());
    }

    #[test]
    fn wilson_interval_brackets_rate() {
        let (lo, hi) = wilson_interval(30, 1000, 1.96);
        assert!(lo < 0.03 && 0.03 < hi);
        assert_eq!(wilson_interval(0, 10, 1.96).0, 0.0);
    }

    #[test]
    fn coverage_tracks_beta() {
        let layout = FrameLayout::new(7, 2, 3, 28).unwrap();
        for model in [InterferenceModel::IidSubset, InterferenceModel::FullStream] {
            let c = coverage_experiment(layout, 5, model, 3, 2000).unwrap();
            assert!(c.z_score().abs() <= 3.0, "{model}: {}", c.z_score());
        }
        let single = coverage_experiment(layout, 1, InterferenceModel::IidSubset, 3, 10).unwrap();
        assert_eq!(single.covered, 0);
    }
}

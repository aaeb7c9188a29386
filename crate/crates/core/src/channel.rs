//! The `Q`-subchannel disjunctive channel.
//!
//! Every user permutes each transmitted frame with a fresh permutation drawn
//! from its own [`PermutationSchedule`]; the channel ORs all users' frames;
//! the receiver undoes the target user's permutation, giving
//! `Y_i = T_i ∨ (⋁_{j≠i} X_j)`.
//!
//! Randomness is keyed, not streamed: the permutation of user `u` at tact `τ`
//! depends only on `(seed_u, τ)`, so any realization can be regenerated
//! bit-for-bit without storing per-tact state.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::{BitMatrix, BitsError, TactFrame};
use crate::ks::{FrameLayout, KsMatrix, StackedBlock};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("frame length {frame} does not match permutation length {perm}")]
    Length { frame: usize, perm: usize },
    #[error("streams have different lengths")]
    StreamLength,
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("unknown interference model {0:?} (expected full-stream or iid-subset)")]
    UnknownModel(String),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// SplitMix64 finalizer over `(a, b)`; used to derive every keyed seed.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn keyed_rng(seed: u64, key: u64, domain: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(seed, domain), key))
}

const DOMAIN_PERMUTATION: u64 = 1;
const DOMAIN_STREAM_BLOCK: u64 = 2;
const DOMAIN_IID_FRAME: u64 = 3;
const DOMAIN_OFFSET: u64 = 4;
const DOMAIN_USER: u64 = 5;

/// Bijection on `[0, Q)`: the bit at position `p` moves to `map[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation {
            map: (0..len as u32).collect(),
        }
    }

    /// Uniform over all `len!` permutations (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut map: Vec<u32> = (0..len as u32).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    pub fn from_map(map: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v as usize >= map.len() || std::mem::replace(&mut seen[v as usize], true) {
                return None;
            }
        }
        Some(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.map
    }
}

pub fn permute(frame: &TactFrame, perm: &Permutation) -> Result<TactFrame, ChannelError> {
    check_len(frame, perm)?;
    Ok(TactFrame::from_positions(
        frame.len(),
        frame.ones_iter().map(|p| perm.map[p] as usize),
    ))
}

pub fn inverse_permute(frame: &TactFrame, perm: &Permutation) -> Result<TactFrame, ChannelError> {
    check_len(frame, perm)?;
    Ok(TactFrame::from_positions(
        frame.len(),
        (0..frame.len()).filter(|&p| frame.get(perm.map[p] as usize)),
    ))
}

fn check_len(frame: &TactFrame, perm: &Permutation) -> Result<(), ChannelError> {
    if frame.len() != perm.len() {
        return Err(ChannelError::Length {
            frame: frame.len(),
            perm: perm.len(),
        });
    }
    Ok(())
}

/// Per-tact permutations shared by one transmitter-receiver pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationSchedule {
    seed: Option<u64>,
    subchannels: usize,
}

impl PermutationSchedule {
    pub fn new(seed: u64, subchannels: usize) -> Self {
        PermutationSchedule {
            seed: Some(seed),
            subchannels,
        }
    }

    /// Every tact uses the identity permutation.
    pub fn identity(subchannels: usize) -> Self {
        PermutationSchedule {
            seed: None,
            subchannels,
        }
    }

    pub fn subchannels(&self) -> usize {
        self.subchannels
    }

    pub fn permutation(&self, tact: u64) -> Permutation {
        match self.seed {
            None => Permutation::identity(self.subchannels),
            Some(seed) => {
                let mut rng = keyed_rng(seed, tact, DOMAIN_PERMUTATION);
                Permutation::random(self.subchannels, &mut rng)
            }
        }
    }
}

/// Frames a user puts on the channel for `block`, starting at `first_tact`.
pub fn transmit_user(
    block: &StackedBlock,
    schedule: &PermutationSchedule,
    first_tact: u64,
) -> Result<Vec<TactFrame>, ChannelError> {
    (0..block.layout().t)
        .map(|c| permute(&block.column(c), &schedule.permutation(first_tact + c as u64)))
        .collect()
}

/// Elementwise OR of several users' frame sequences, tact by tact.
pub fn superpose(streams: &[Vec<TactFrame>]) -> Result<Vec<TactFrame>, ChannelError> {
    let Some(first) = streams.first() else {
        return Ok(Vec::new());
    };
    if streams.iter().any(|s| s.len() != first.len()) {
        return Err(ChannelError::StreamLength);
    }
    let mut out = first.clone();
    for s in &streams[1..] {
        for (acc, f) in out.iter_mut().zip(s) {
            acc.or_assign(f)?;
        }
    }
    Ok(out)
}

/// Undoes the target's permutations on the channel output, one column per tact.
pub fn receive(
    output: &[TactFrame],
    schedule: &PermutationSchedule,
    first_tact: u64,
) -> Result<BitMatrix, ChannelError> {
    let columns = output
        .iter()
        .enumerate()
        .map(|(c, f)| inverse_permute(f, &schedule.permutation(first_tact + c as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_columns(schedule.subchannels(), columns)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InterferenceModel {
    /// Each interferer transmits a continuous stream of its own codewords
    /// under its own schedule, misaligned with the target by a random offset.
    FullStream,
    /// Each interferer puts an independent uniform weight-`m` frame on the
    /// channel every tact.
    #[default]
    IidSubset,
}

impl fmt::Display for InterferenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterferenceModel::FullStream => "full-stream",
            InterferenceModel::IidSubset => "iid-subset",
        })
    }
}

impl FromStr for InterferenceModel {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, ChannelError> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "full-stream" | "fullstream" => Ok(InterferenceModel::FullStream),
            "iid-subset" | "iidsubset" | "iid" => Ok(InterferenceModel::IidSubset),
            other => Err(ChannelError::UnknownModel(other.to_string())),
        }
    }
}

/// Where full-stream interferers get their transmitted blocks.
pub trait BlockSource: Sync {
    fn layout(&self) -> FrameLayout;
    fn draw(&self, rng: &mut ChaCha8Rng) -> StackedBlock;
}

/// Uniformly random one-hot columns; for experiments that only need
/// interference statistics and no particular code.
#[derive(Debug, Clone, Copy)]
pub struct RandomSymbols(pub FrameLayout);

impl BlockSource for RandomSymbols {
    fn layout(&self) -> FrameLayout {
        self.0
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> StackedBlock {
        let l = self.0;
        let rows = (0..l.n()).map(|_| rng.gen_range(0..l.q as u32)).collect();
        let ks = KsMatrix::new(l.q, rows).expect("rows below q");
        crate::ks::stack(&ks, l).expect("matching layout")
    }
}

/// Uniformly random weight-`m` frame of length `len` (all ones if `m >= len`).
pub fn random_subset_frame<R: Rng + ?Sized>(len: usize, m: usize, rng: &mut R) -> TactFrame {
    if m >= len {
        return TactFrame::ones(len);
    }
    TactFrame::from_positions(len, rand::seq::index::sample(rng, len, m))
}

/// One multiple-access realization: `users` active users sharing `layout`,
/// the receiver listening to `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelScenario {
    pub layout: FrameLayout,
    pub users: usize,
    pub target: usize,
    pub model: InterferenceModel,
    pub seed: u64,
}

/// Receiver-side view of one transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reception {
    /// `Y_i`, after the target's inverse permutations.
    pub received: BitMatrix,
    /// `⋁_{j≠i} X_j` alone, in the same receiver coordinates.
    pub interference: BitMatrix,
}

impl ChannelScenario {
    pub fn new(
        layout: FrameLayout,
        users: usize,
        target: usize,
        model: InterferenceModel,
        seed: u64,
    ) -> Result<Self, ChannelError> {
        if users == 0 {
            return Err(ChannelError::Scenario("need at least one user".into()));
        }
        if target >= users {
            return Err(ChannelError::Scenario(format!("target {target} is not below S = {users}")));
        }
        Ok(ChannelScenario {
            layout,
            users,
            target,
            model,
            seed,
        })
    }

    pub fn user_seed(&self, user: usize) -> u64 {
        mix_seed(mix_seed(self.seed, DOMAIN_USER), user as u64)
    }

    pub fn schedule(&self, user: usize) -> PermutationSchedule {
        PermutationSchedule::new(self.user_seed(user), self.layout.subchannels)
    }

    /// Stream offset of a full-stream interferer, uniform in `[0, t)`.
    pub fn offset(&self, user: usize) -> u64 {
        keyed_rng(self.user_seed(user), 0, DOMAIN_OFFSET).gen_range(0..self.layout.t as u64)
    }

    /// Channel-domain frame that interferer `user` sends at absolute `tact`.
    pub fn gen_interference(&self, user: usize, tact: u64, source: &dyn BlockSource) -> TactFrame {
        let l = self.layout;
        let seed = self.user_seed(user);
        match self.model {
            InterferenceModel::IidSubset => {
                let mut rng = keyed_rng(seed, tact, DOMAIN_IID_FRAME);
                random_subset_frame(l.subchannels, l.m, &mut rng)
            }
            InterferenceModel::FullStream => {
                let pos = tact + self.offset(user);
                let (block_index, col) = (pos / l.t as u64, (pos % l.t as u64) as usize);
                let mut rng = keyed_rng(seed, block_index, DOMAIN_STREAM_BLOCK);
                let block = source.draw(&mut rng);
                permute(&block.column(col), &self.schedule(user).permutation(tact))
                    .expect("source layout matches scenario")
            }
        }
    }

    /// Sends `target_block` from the target at tacts `0..t` with every other
    /// user interfering, and returns what the receiver sees.
    pub fn run(&self, target_block: &StackedBlock, source: &dyn BlockSource) -> Result<Reception, ChannelError> {
        let l = self.layout;
        if *target_block.layout() != l || source.layout() != l {
            return Err(ChannelError::Scenario("block layout differs from scenario layout".into()));
        }
        let target_schedule = self.schedule(self.target);
        let sent = transmit_user(target_block, &target_schedule, 0)?;
        let mut received = Vec::with_capacity(l.t);
        let mut interference = Vec::with_capacity(l.t);
        for (tact, frame) in sent.iter().enumerate() {
            let mut others = TactFrame::zeros(l.subchannels);
            for user in (0..self.users).filter(|&u| u != self.target) {
                others.or_assign(&self.gen_interference(user, tact as u64, source))?;
            }
            let mut out = frame.clone();
            out.or_assign(&others)?;
            let perm = target_schedule.permutation(tact as u64);
            received.push(inverse_permute(&out, &perm)?);
            interference.push(inverse_permute(&others, &perm)?);
        }
        Ok(Reception {
            received: BitMatrix::from_columns(l.subchannels, received)?,
            interference: BitMatrix::from_columns(l.subchannels, interference)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, Gf};
    use crate::ks::{cover_check, ks_encode, stack};

    #[test]
    fn identity_permutation_is_noop() {
        let f = TactFrame::from_positions(10, [1, 4, 9]);
        let id = Permutation::identity(10);
        assert_eq!(permute(&f, &id).unwrap(), f);
        assert_eq!(inverse_permute(&f, &id).unwrap(), f);
    }

    #[test]
    fn permutation_round_trip_and_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let len = rng.gen_range(1..200);
            let w = rng.gen_range(0..=len);
            let f = random_subset_frame(len, w, &mut rng);
            let p = Permutation::random(len, &mut rng);
            let moved = permute(&f, &p).unwrap();
            assert_eq!(moved.weight(), f.weight());
            assert_eq!(inverse_permute(&moved, &p).unwrap(), f);
        }
        assert!(permute(&TactFrame::zeros(3), &Permutation::identity(4)).is_err());
    }

    #[test]
    fn from_map_validates() {
        assert!(Permutation::from_map(vec![2, 0, 1]).is_some());
        assert!(Permutation::from_map(vec![0, 0, 1]).is_none());
        assert!(Permutation::from_map(vec![0, 3, 1]).is_none());
    }

    #[test]
    fn schedules_are_deterministic_and_vary_by_tact() {
        let s = PermutationSchedule::new(42, 64);
        assert_eq!(s.permutation(5), s.permutation(5));
        assert_ne!(s.permutation(5), s.permutation(6));
        assert_ne!(s.permutation(5), PermutationSchedule::new(43, 64).permutation(5));
        assert_eq!(PermutationSchedule::identity(8).permutation(3), Permutation::identity(8));
    }

    #[test]
    fn superpose_properties() {
        let a = vec![TactFrame::from_positions(8, [0, 3]), TactFrame::from_positions(8, [7])];
        let b = vec![TactFrame::from_positions(8, [3, 5]), TactFrame::from_positions(8, [1])];
        assert_eq!(superpose(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(superpose(&[a.clone(), a.clone()]).unwrap(), a);
        let ab = superpose(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ab, superpose(&[b.clone(), a.clone()]).unwrap());
        assert_eq!(ab[0].weight(), 3);
        assert!(superpose(&[a, vec![]]).is_err());
    }

    #[test]
    fn superpose_weight_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let streams: Vec<Vec<TactFrame>> = (0..3)
                .map(|_| vec![random_subset_frame(32, rng.gen_range(0..6), &mut rng)])
                .collect();
            let out = superpose(&streams).unwrap();
            let total: usize = streams.iter().map(|s| s[0].weight()).sum();
            let disjoint = (0..32).all(|p| streams.iter().filter(|s| s[0].get(p)).count() <= 1);
            assert!(out[0].weight() <= total);
            assert_eq!(out[0].weight() == total, disjoint);
        }
    }

    fn example_block(layout: FrameLayout) -> StackedBlock {
        let f = Field::new(7, 1).unwrap();
        let word: Vec<Gf> = [2, 4, 6, 1, 2, 5].iter().map(|&i| f.element_at(i - 1).unwrap()).collect();
        stack(&ks_encode(&f, &word), layout).unwrap()
    }

    #[test]
    fn identity_schedule_sends_ks_columns() {
        let layout = FrameLayout::new(7, 1, 6, 7).unwrap();
        let block = example_block(layout);
        let frames = transmit_user(&block, &PermutationSchedule::identity(7), 0).unwrap();
        for (c, f) in frames.iter().enumerate() {
            assert_eq!(*f, block.column(c));
            assert_eq!(f.weight(), 1);
        }
    }

    #[test]
    fn single_user_receives_exactly_its_block() {
        let layout = FrameLayout::new(7, 2, 3, 20).unwrap();
        let block = example_block(layout);
        let sc = ChannelScenario::new(layout, 1, 0, InterferenceModel::FullStream, 9).unwrap();
        let rx = sc.run(&block, &RandomSymbols(layout)).unwrap();
        assert_eq!(rx.received, block.to_dense());
        assert_eq!(rx.interference.weight(), 0);
    }

    #[test]
    fn ones_are_never_lost_and_runs_are_reproducible() {
        let layout = FrameLayout::new(7, 2, 3, 28).unwrap();
        let block = example_block(layout);
        for model in [InterferenceModel::FullStream, InterferenceModel::IidSubset] {
            for seed in 0..200 {
                let sc = ChannelScenario::new(layout, 6, 2, model, seed).unwrap();
                let rx = sc.run(&block, &RandomSymbols(layout)).unwrap();
                assert!(cover_check(&block, &rx.received).unwrap());
                assert_eq!(sc.run(&block, &RandomSymbols(layout)).unwrap(), rx);
                for tact in 0..3 {
                    for u in [0, 1, 3, 4, 5] {
                        assert_eq!(sc.gen_interference(u, tact, &RandomSymbols(layout)).weight(), 2);
                    }
                }
            }
        }
    }

    #[test]
    fn transmitted_frame_positions_are_uniform() {
        // A fixed subrange 1 lands on each channel position with probability 1/Q.
        let q_total = 16;
        let samples = 100_000u64;
        let mut hits = vec![0u64; q_total];
        let layout = FrameLayout::new(4, 1, 1, q_total).unwrap();
        let ks = KsMatrix::new(4, vec![2]).unwrap();
        let block = stack(&ks, layout).unwrap();
        for tact in 0..samples {
            let s = PermutationSchedule::new(77, q_total);
            let f = transmit_user(&block, &s, tact).unwrap();
            hits[f[0].ones_iter().next().unwrap()] += 1;
        }
        let p = 1.0 / q_total as f64;
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - samples as f64 * p).abs() <= 3.0 * sigma, "{h}");
        }
    }

    #[test]
    fn saturated_subset_covers_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_subset_frame(9, 9, &mut rng).weight(), 9);
        assert_eq!(random_subset_frame(9, 3, &mut rng).weight(), 3);
    }

    #[test]
    fn scenario_validation_and_model_parsing() {
        let layout = FrameLayout::new(7, 1, 6, 7).unwrap();
        assert!(ChannelScenario::new(layout, 0, 0, InterferenceModel::IidSubset, 0).is_err());
        assert!(ChannelScenario::new(layout, 3, 3, InterferenceModel::IidSubset, 0).is_err());
        assert_eq!("full-stream".parse::<InterferenceModel>().unwrap(), InterferenceModel::FullStream);
        assert_eq!("IID_SUBSET".parse::<InterferenceModel>().unwrap(), InterferenceModel::IidSubset);
        assert!("burst".parse::<InterferenceModel>().is_err());
    }
}

//! Kautz-Singleton coded multiple access over a vector OR channel.
//!
//! Each of `S` users maps a q-ary codeword to a one-hot binary matrix,
//! stacks it into `m` subranges of a `Q`-subchannel frame, and sends one
//! column per tact under its own random permutation. The receiver sees the
//! OR of everything and decodes by the cover condition `T ∧ Y = T`.
//!
//! - [`field`], [`codes`]: finite fields, linear / Reed-Solomon codes,
//!   weight distributions, erasure decoding.
//! - [`ks`], [`bits`]: the one-hot map, stacking, the cover condition.
//! - [`channel`]: permutations, interference models, one transmission.
//! - [`decoders`]: exhaustive and concatenated decoding.
//! - [`bounds`], [`optimize`]: closed-form bounds and their optimizers.
//! - [`simulation`], [`figures`], [`cli`]: campaigns, figure data, the CLI.
//!
//! ```
//! use vdmac::{field::Field, codes::LinearCode, ks::ks_encode};
//!
//! let f = Field::new(7, 1).unwrap();
//! let code = LinearCode::reed_solomon(&f, 6, 2).unwrap();
//! let word = code.encode(&[f.element(1).unwrap(), f.element(3).unwrap()]).unwrap();
//! assert_eq!(ks_encode(&f, &word).to_dense().weight(), 6);
//! ```

pub mod bits;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod codes;
pub mod decoders;
pub mod field;
pub mod figures;
pub mod ks;
pub mod optimize;
pub mod simulation;

pub use bits::{BitMatrix, TactFrame};
pub use channel::{ChannelScenario, InterferenceModel};
pub use codes::{LinearCode, WeightDistribution};
pub use decoders::{exhaustive_decode, Codebook, ConcatenatedCode, DecodeMode, DecodeOutcome};
pub use field::{Field, Gf};
pub use ks::{cover_check, ks_encode, stack, FrameLayout, KsMatrix, StackedBlock};

/// Any error the library can return.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] field::FieldError),
    #[error(transparent)]
    Code(#[from] codes::CodeError),
    #[error(transparent)]
    Bits(#[from] bits::BitsError),
    #[error(transparent)]
    Ks(#[from] ks::KsError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
    #[error(transparent)]
    Decode(#[from] decoders::DecodeError),
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
    #[error(transparent)]
    Simulation(#[from] simulation::SimError),
    #[error(transparent)]
    Cli(#[from] cli::CliError),
}

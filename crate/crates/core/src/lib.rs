//! Maximum-likelihood and bit-wise MAP decoding of short binary linear block
//! codes, expressed as layered networks whose weights are the codebook.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod channel;
pub mod decoders;
pub mod error;
pub mod gf2;
pub mod montecarlo;
pub mod network;
pub mod rng;
pub mod verify;
mod scalar;

pub use channel::{ebn0_to_sigma, prefec_rates, q_function, sigma_to_ebn0, transmit};
pub use decoders::{DecodeOutcome, DecoderKind, Metric};
pub use error::{Error, Result};
pub use gf2::{bch_31_21, hamming_7_4, polar_16_8, CodeId, GeneratorMatrix};
pub use network::{build_mlnn, build_slnn, AlphaMode, LayeredNet};
pub use scalar::Real;

pub type Net = network::LayeredNet<f64>;
pub type Net32 = network::LayeredNet<f32>;
pub type Outcome = decoders::DecodeOutcome<f64>;
pub type Received = channel::ReceivedVector<f64>;
pub type Channel = channel::ChannelParams<f64>;
pub type Decoder = decoders::PreparedDecoder<f64>;

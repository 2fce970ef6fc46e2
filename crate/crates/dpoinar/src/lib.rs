//! Companion to `dpoinar-core`: file formats, multi-threaded chains, the
//! simulation study, rolling-origin evaluation and the `dpoinar` command.
//!
//! All randomness derives from 64-bit master seeds. A sampler run with seed
//! `s` drives chain `c` with ChaCha8 seeded by `s` on stream `c`. Study
//! replicate `r` of a scenario with seed `s` uses
//! `mix_seed(s, r)` for simulation and `mix_seed(mix_seed(s, r), SAMPLER_SALT)`
//! for the sampler; evaluation origin `t` uses `mix_seed(seed, t)`.

pub mod config;
mod error;
pub mod evaluate;
pub mod io;
pub mod parallel;
pub mod study;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use parallel::run_chains_parallel;

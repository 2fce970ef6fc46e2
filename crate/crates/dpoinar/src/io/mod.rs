//! File formats: counts and exposure CSV, posterior draws as JSON lines, and
//! run manifests.

mod counts;
mod draws;
mod manifest;

pub use counts::{
    attach_exposure, load_counts, load_exposure, read_counts, save_counts, save_exposure,
    write_counts, SERIES_ID,
};
pub use draws::{load_draws, read_draws, save_draws, write_draws, DrawsHeader, DRAWS_FORMAT, DRAWS_VERSION};
pub use manifest::{write_json, Manifest};

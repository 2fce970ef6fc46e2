//! Domain types and generative machinery for the dependent PoINAR(1) model.

mod dp;
mod panel;
mod params;
mod simulate;
mod thinning;

pub use dp::{crp_draw, stick_breaking, StickBreaking};
pub use panel::{CountPanel, SeasonMap, SeasonSummary, MONTHS};
pub use params::{Hyperparams, ModelState, RateMode};
pub use simulate::{simulate_panel, simulate_poinar, InitialValue, PanelSpec, SimulatedPanel};
pub use thinning::binomial_thin;

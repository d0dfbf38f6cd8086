//! Semi-static provisioning: modulation and path policies, grooming,
//! first-fit placement and blocking accounting.

mod driver;
mod engine;
mod policy;
mod spectrum;

pub use driver::{load_curve, run_seeds, throughput_at_bbp, write_curve_csv, CurveRow};
pub use engine::{
    audit, groom_and_place, run_simulation, select_path, write_events_jsonl, Event, EventAction, LciRecord,
    NetworkState, NewLci, PlacementPlan, SimConfig, SimMetrics, SimOutcome,
};
pub use policy::{effective_cardinalities, select_modulation, ModulationPolicy, PathPolicy};
pub use spectrum::SpectrumState;

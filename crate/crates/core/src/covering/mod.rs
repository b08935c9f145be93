//! Deciding, certifying, searching and bracketing covers of a body by
//! translates of `±λK`.

mod cover;
mod lambda;
mod number;
mod search;
mod witness;

pub use cover::{verify_cover, CertifiedCell, Cover, CoverJson, CoverageResult};
pub use lambda::{lambda_of, Bracket, LambdaConfig, LowerProof, Probe, ProbeOutcome, UpperProof};
pub use number::{covering_number_upper, volume_lower_bound, CoveringNumber, CoveringNumberConfig};
pub use search::{corner_translations, grid_translations, lattice_cover, search_cover, SearchConfig, SearchOutcome};
pub use witness::{
    group_constraints, witness_lower_bound, witness_lower_bound_signed, WitnessOutcome, WitnessSet,
};

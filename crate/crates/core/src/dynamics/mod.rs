//! Hamiltonian vector fields (`i(X)ω = −dH`), flows, Hofer lengths and
//! detection of short closed orbits.

mod field;
mod flow;
mod hamiltonian;
mod length;
mod orbits;

pub use field::{hamiltonian_vector_field, hamiltonian_vector_field_in, VectorField};
pub use flow::{closed_form_flow, flow, flow_to, flow_with, FlowOptions, IntegratorStats, Trajectory};
pub use hamiltonian::{
    differential, parse_hamiltonian, Hamiltonian, HamiltonianFn, MomentHamiltonian, RadialBump, Reparametrized,
};
pub use length::{hofer_length, sampled_extrema, Extrema, LengthEstimate};
pub use orbits::{
    classify_start, classify_starts, detect_closed_trajectories, OrbitConfig, TrajectoryClassification, Verdict,
};

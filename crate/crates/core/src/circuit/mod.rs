//! Linear-optical realisation of sculpting bigraphs and its heralded simulation.

mod compile;
mod gate;
mod permanent;
mod reference;
mod simulate;

pub use compile::compile_bigraph;
pub use gate::{Circuit, Detector, Gate, GateCounts};
pub use permanent::{permanent, projected_amplitudes};
pub use reference::{closed_form_references, general_closed_form, ReferenceProbability};
pub use simulate::{
    apply_gate, circuit_input, fidelity_increasing, fidelity_sweep, ideal_heralded_run, simulate, HeraldReport,
    IdealRun, OutcomeProbability, SimulationOptions, SimulationResult, SweepRow,
};

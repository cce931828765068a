//! Sculpting bigraphs and the subtraction protocol.

mod graph;
mod matching;
mod protocol;

pub use graph::{
    dicke_bigraph, singlet_bigraph, symmetric_variant_bigraph, ColorLabel, Dot, Edge, Phase,
    Scheme, SculptingBigraph,
};
pub use matching::{collapse_factor, enumerate_matchings, state_from_matchings, Matching};
pub use protocol::{
    apply_sculpting, dot_superposition, exchange_overlap, initial_state, sculpt, swap_spatial,
};

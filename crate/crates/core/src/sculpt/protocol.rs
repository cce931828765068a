use num_complex::Complex64;

use super::graph::{Dot, SculptingBigraph};
use crate::fock::{
    tilde_superposition, Basis, FockBasisState, ModeLayout, ModeSuperposition, SparseState,
};
use crate::{Error, Result};

/// `d` bosons per spatial mode, one in each internal state.
pub fn initial_state(n: usize, d: usize) -> Result<SparseState> {
    let layout = ModeLayout::new(n, d, 0)?;
    SparseState::basis(layout, FockBasisState::new(vec![1; n * d]))
}

/// Expands a dot into rail coefficients: each edge contributes
/// `exp(i phase) / sqrt(edges)` times its colour mode on its spatial mode.
pub fn dot_superposition(dot: &Dot, layout: &ModeLayout) -> Result<ModeSuperposition> {
    let amp = dot.amplitude();
    let mut terms = Vec::new();
    for edge in dot.edges() {
        let weight = edge.phase.value() * amp;
        match edge.color.basis {
            Basis::Computational => {
                let rail = layout.rail_of(edge.mode, edge.color.index)?;
                terms.push((rail, weight));
            }
            Basis::Fourier => {
                let tilde = tilde_superposition(layout, edge.mode, edge.color.index)?;
                terms.extend(tilde.terms().iter().map(|&(r, c)| (r, c * weight)));
            }
        }
    }
    ModeSuperposition::new(terms)
}

fn check_layout(graph: &SculptingBigraph, layout: &ModeLayout) -> Result<()> {
    if layout.spatial_count() != graph.n() || layout.internal_dim() != graph.d() {
        return Err(Error::LayoutMismatch);
    }
    Ok(())
}

/// Applies every dot's subtraction in listed order.
pub fn apply_sculpting(graph: &SculptingBigraph, state: &SparseState) -> Result<SparseState> {
    check_layout(graph, state.layout())?;
    if state.is_zero() {
        return Err(Error::ZeroState);
    }
    let photons = state
        .terms()
        .keys()
        .map(FockBasisState::photon_count)
        .max()
        .unwrap_or(0);
    if (photons as usize) < graph.dots().len() {
        return Err(Error::PhotonCount {
            expected: graph.dots().len() as u32,
            found: photons,
        });
    }
    let mut current = state.clone();
    for dot in graph.dots() {
        let sup = dot_superposition(dot, state.layout())?;
        current = current.apply_superposition(&sup, false)?;
        if current.is_zero() {
            break;
        }
    }
    Ok(current)
}

/// `A |Sym_{N,d}>` with unit-normalised dots.
pub fn sculpt(graph: &SculptingBigraph) -> Result<SparseState> {
    apply_sculpting(graph, &initial_state(graph.n(), graph.d())?)
}

/// Exchanges the occupation blocks of spatial modes `j` and `k`.
pub fn swap_spatial(state: &SparseState, j: usize, k: usize) -> Result<SparseState> {
    let layout = *state.layout();
    let n = layout.spatial_count();
    for m in [j, k] {
        if m >= n {
            return Err(Error::ModeOutOfRange { mode: m, n });
        }
    }
    let d = layout.internal_dim();
    let terms = state.iter().map(|(basis, &amp)| {
        let mut occ = basis.occupations().to_vec();
        for s in 0..d {
            occ.swap(j * d + s, k * d + s);
        }
        (FockBasisState::new(occ), amp)
    });
    SparseState::from_terms(layout, terms)
}

/// `<state| swap_jk |state>` normalised by `<state|state>`.
pub fn exchange_overlap(state: &SparseState, j: usize, k: usize) -> Result<Complex64> {
    let swapped = swap_spatial(state, j, k)?;
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(state.inner(&swapped)? / norm)
}

//! The `(d-1)`-to-one matching sum.
//!
//! When every edge is coloured `0~` or `(d-1)~`, a mode hit by `l` red and
//! `d-1-l` blue subtractions collapses to a single Fourier photon:
//!
//! ```text
//! a_{0~}^l a_{(d-1)~}^(d-1-l) prod_s a_s^dagger |vac>
//!     = (-1)^(d-1-l) l! (d-1-l)! / sqrt(d)^(d-2) a_{(d-1-l)~}^dagger |vac>
//! ```
//!
//! so the sculpted state is a sum over assignments of dots to circles in
//! which every circle receives exactly `d-1` dots.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::graph::SculptingBigraph;
use crate::fock::{root_of_unity, Basis, FockBasisState, ModeLayout, SparseState};
use crate::{Error, Result};

/// One dot-to-circle assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `(spatial mode, edge index within the dot)` for every dot, in dot order.
    pub picks: Vec<(usize, usize)>,
    /// Number of dots assigned to each circle.
    pub tally: Vec<usize>,
}

/// All assignments of one edge per dot that give every circle exactly `d-1`
/// dots, in depth-first order (dot order, then edge order).
pub fn enumerate_matchings(graph: &SculptingBigraph) -> Vec<Matching> {
    let n = graph.n();
    let capacity = graph.d() - 1;
    let dots = graph.dots();
    if dots.len() != capacity * n {
        return Vec::new();
    }

    // reachable[i][j]: dots at index >= i that touch circle j
    let mut reachable = vec![vec![0usize; n]; dots.len() + 1];
    for i in (0..dots.len()).rev() {
        reachable[i] = reachable[i + 1].clone();
        for e in dots[i].edges() {
            reachable[i][e.mode] += 1;
        }
    }

    let mut out = Vec::new();
    let mut picks = Vec::with_capacity(dots.len());
    let mut tally = vec![0usize; n];
    search(graph, capacity, &reachable, 0, &mut picks, &mut tally, &mut out);
    out
}

fn search(
    graph: &SculptingBigraph,
    capacity: usize,
    reachable: &[Vec<usize>],
    dot: usize,
    picks: &mut Vec<(usize, usize)>,
    tally: &mut [usize],
    out: &mut Vec<Matching>,
) {
    if (0..tally.len()).any(|j| capacity - tally[j] > reachable[dot][j]) {
        return;
    }
    if dot == graph.dots().len() {
        out.push(Matching {
            picks: picks.clone(),
            tally: tally.to_vec(),
        });
        return;
    }
    for (idx, edge) in graph.dots()[dot].edges().iter().enumerate() {
        if tally[edge.mode] == capacity {
            continue;
        }
        tally[edge.mode] += 1;
        picks.push((edge.mode, idx));
        search(graph, capacity, reachable, dot + 1, picks, tally, out);
        picks.pop();
        tally[edge.mode] -= 1;
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Collapse factor for a mode hit by `reds` `0~` subtractions out of `d-1`.
pub fn collapse_factor(d: usize, reds: usize) -> f64 {
    let blues = d - 1 - reds;
    let sign = if blues.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * factorial(reds) * factorial(blues) / (d as f64).sqrt().powi(d as i32 - 2)
}

/// The sculpted state rebuilt as a weighted sum over matchings.
///
/// Bunched contributions from non-matching assignments are not included, so
/// this agrees with direct application exactly when those cancel.
pub fn state_from_matchings(graph: &SculptingBigraph) -> Result<SparseState> {
    let d = graph.d();
    let n = graph.n();
    for dot in graph.dots() {
        for e in dot.edges() {
            if e.color.basis != Basis::Fourier || (e.color.index != 0 && e.color.index != d - 1) {
                return Err(Error::UnsupportedColor(e.color.to_string()));
            }
        }
    }
    let layout = ModeLayout::new(n, d, 0)?;

    // amplitudes keyed by the Fourier label left on each mode
    let mut by_label: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    for m in enumerate_matchings(graph) {
        let mut weight = Complex64::new(1.0, 0.0);
        let mut reds = vec![0usize; n];
        for (dot, &(mode, idx)) in graph.dots().iter().zip(&m.picks) {
            let edge = &dot.edges()[idx];
            weight *= edge.phase.value() * dot.amplitude();
            if edge.color.index == 0 {
                reds[mode] += 1;
            }
        }
        let labels: Vec<usize> = reds.iter().map(|&l| d - 1 - l).collect();
        for &l in &reds {
            weight *= collapse_factor(d, l);
        }
        *by_label.entry(labels).or_default() += weight;
    }
    fourier_labels_to_fock(&layout, &by_label)
}

/// Expands `sum_labels amp * prod_j a_{j,labels[j]~}^dagger |vac>` onto rails.
fn fourier_labels_to_fock(
    layout: &ModeLayout,
    by_label: &BTreeMap<Vec<usize>, Complex64>,
) -> Result<SparseState> {
    let n = layout.spatial_count();
    let d = layout.internal_dim();
    let scale = (d as f64).sqrt().powi(n as i32).recip();
    let mut terms = Vec::new();
    for (labels, &amp) in by_label {
        // a_{m~}^dagger = (1/sqrt d) sum_s omega^(-m s) a_s^dagger
        for idx in 0..d.pow(n as u32) {
            let mut occ = vec![0u8; layout.total_rails()];
            let mut phase = 0i64;
            let mut rest = idx;
            for j in (0..n).rev() {
                let s = rest % d;
                rest /= d;
                occ[j * d + s] = 1;
                phase -= (labels[j] * s) as i64;
            }
            terms.push((FockBasisState::new(occ), amp * root_of_unity(phase, d) * scale));
        }
    }
    SparseState::from_terms(*layout, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sculpt::graph::{
        dicke_bigraph, singlet_bigraph, symmetric_variant_bigraph, ColorLabel, Dot, Edge, Phase,
    };
    use crate::sculpt::protocol::sculpt;

    #[test]
    fn singlet_n2_has_two_matchings() {
        let g = singlet_bigraph(2).unwrap();
        let ms = enumerate_matchings(&g);
        // 4 raw assignments; only the two crossing ones give one dot per circle
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].picks, vec![(0, 0), (1, 1)]);
        assert_eq!(ms[1].picks, vec![(1, 1), (0, 0)]);
        for m in &ms {
            assert_eq!(m.tally, vec![1, 1]);
        }
    }

    #[test]
    fn isolated_circle_has_no_matchings() {
        let red = ColorLabel::fourier(0);
        let dot = Dot::new(vec![Edge::new(0, Phase::ZERO, red), Edge::new(1, Phase::ZERO, red)]).unwrap();
        // circle 2 untouched
        let g = SculptingBigraph::new(3, 2, vec![dot.clone(), dot.clone(), dot]).unwrap();
        assert!(enumerate_matchings(&g).is_empty());
        assert!(state_from_matchings(&g).unwrap().is_zero());
    }

    #[test]
    fn wrong_dot_count_has_no_matchings() {
        let g = singlet_bigraph(3).unwrap();
        let short = SculptingBigraph::new(3, 3, g.dots()[..5].to_vec()).unwrap();
        assert!(enumerate_matchings(&short).is_empty());
    }

    #[test]
    fn matchings_respect_tally() {
        for n in 2..=4 {
            for g in [singlet_bigraph(n).unwrap(), dicke_bigraph(n).unwrap()] {
                let ms = enumerate_matchings(&g);
                assert!(!ms.is_empty());
                for m in &ms {
                    assert!(m.tally.iter().all(|&t| t == n - 1));
                    let mut count = vec![0; n];
                    for (dot, &(mode, idx)) in g.dots().iter().zip(&m.picks) {
                        assert_eq!(dot.edges()[idx].mode, mode);
                        count[mode] += 1;
                    }
                    assert_eq!(count, m.tally);
                }
            }
        }
    }

    #[test]
    fn matching_count_matches_brute_force() {
        for n in 2..=4 {
            let g = singlet_bigraph(n).unwrap();
            let dots = g.dots();
            let mut brute = 0;
            for mask in 0u32..(1 << dots.len()) {
                let mut tally = vec![0; n];
                for (i, dot) in dots.iter().enumerate() {
                    tally[dot.edges()[((mask >> i) & 1) as usize].mode] += 1;
                }
                if tally.iter().all(|&t| t == n - 1) {
                    brute += 1;
                }
            }
            assert_eq!(enumerate_matchings(&g).len(), brute, "N = {n}");
        }
    }

    #[test]
    fn collapse_factors() {
        // d = 2: l = 0 -> -1, l = 1 -> +1
        assert_eq!(collapse_factor(2, 0), -1.0);
        assert_eq!(collapse_factor(2, 1), 1.0);
        // d = 3, l = 1: (-1)^1 * 1 * 1 / sqrt3
        assert!((collapse_factor(3, 1) + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oracle_agrees_with_direct_application_n3() {
        for g in [
            singlet_bigraph(3).unwrap(),
            dicke_bigraph(3).unwrap(),
            symmetric_variant_bigraph(3).unwrap(),
        ] {
            let direct = sculpt(&g).unwrap();
            let oracle = state_from_matchings(&g).unwrap();
            assert!(direct.max_deviation(&oracle).unwrap() < 1e-9);
        }
    }

    #[test]
    fn singlet_oracle_support_is_one_per_mode() {
        let g = singlet_bigraph(3).unwrap();
        let s = state_from_matchings(&g).unwrap();
        let layout = *s.layout();
        for (basis, _) in s.iter() {
            for j in 0..3 {
                assert_eq!(basis.spatial_block(&layout, j).iter().sum::<u8>(), 1);
            }
        }
    }

    #[test]
    fn unsupported_colours_rejected() {
        let dot = Dot::new(vec![Edge::new(0, Phase::ZERO, ColorLabel::fourier(1))]).unwrap();
        let g = SculptingBigraph::new(1, 3, vec![dot.clone(), dot]).unwrap();
        assert!(matches!(state_from_matchings(&g), Err(Error::UnsupportedColor(_))));
        let dot = Dot::new(vec![Edge::new(0, Phase::ZERO, ColorLabel::computational(0))]).unwrap();
        let g = SculptingBigraph::new(1, 2, vec![dot]).unwrap();
        assert!(state_from_matchings(&g).is_err());
    }
}

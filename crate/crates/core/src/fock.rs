//! Sparse second-quantised states over a fixed rail layout.
//!
//! Every spatial mode `j` owns `d` rails, one per internal state `s`, laid out
//! as `j * d + s`. Ancilla rails follow after all spatial rails.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result, PRUNE_TOL};

/// Term count above which operator application fans out over rayon.
const PAR_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    spatial_count: usize,
    internal_dim: usize,
    ancilla_count: usize,
}

impl ModeLayout {
    pub fn new(spatial_count: usize, internal_dim: usize, ancilla_count: usize) -> Result<Self> {
        if spatial_count == 0 {
            return Err(Error::InvalidLayout("need at least one spatial mode".into()));
        }
        if internal_dim < 2 {
            return Err(Error::InvalidLayout(format!(
                "internal dimension {internal_dim} < 2"
            )));
        }
        Ok(Self {
            spatial_count,
            internal_dim,
            ancilla_count,
        })
    }

    pub fn spatial_count(&self) -> usize {
        self.spatial_count
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancilla_count
    }

    /// Number of spatial x internal rails, excluding ancillas.
    pub fn system_rails(&self) -> usize {
        self.spatial_count * self.internal_dim
    }

    pub fn total_rails(&self) -> usize {
        self.system_rails() + self.ancilla_count
    }

    /// Same spatial/internal shape with a different number of ancillas.
    pub fn with_ancillas(&self, ancilla_count: usize) -> Self {
        Self {
            ancilla_count,
            ..*self
        }
    }

    pub fn rail_of(&self, spatial: usize, internal: usize) -> Result<usize> {
        if spatial >= self.spatial_count {
            return Err(Error::ModeOutOfRange {
                mode: spatial,
                n: self.spatial_count,
            });
        }
        if internal >= self.internal_dim {
            return Err(Error::InternalIndexOutOfRange {
                index: internal,
                d: self.internal_dim,
            });
        }
        Ok(spatial * self.internal_dim + internal)
    }

    pub fn ancilla_rail(&self, index: usize) -> Result<usize> {
        if index >= self.ancilla_count {
            return Err(Error::RailOutOfRange {
                rail: self.system_rails() + index,
                total: self.total_rails(),
            });
        }
        Ok(self.system_rails() + index)
    }

    /// Inverse of [`rail_of`](Self::rail_of) / [`ancilla_rail`](Self::ancilla_rail).
    pub fn locate(&self, rail: usize) -> Result<RailKind> {
        if rail < self.system_rails() {
            Ok(RailKind::System {
                spatial: rail / self.internal_dim,
                internal: rail % self.internal_dim,
            })
        } else if rail < self.total_rails() {
            Ok(RailKind::Ancilla(rail - self.system_rails()))
        } else {
            Err(Error::RailOutOfRange {
                rail,
                total: self.total_rails(),
            })
        }
    }

    fn check_rail(&self, rail: usize) -> Result<()> {
        if rail < self.total_rails() {
            Ok(())
        } else {
            Err(Error::RailOutOfRange {
                rail,
                total: self.total_rails(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RailKind {
    System { spatial: usize, internal: usize },
    Ancilla(usize),
}

/// Occupation numbers, one per rail. Ordered lexicographically by occupations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockBasisState {
    occupations: Vec<u8>,
    photon_count: u32,
}

impl FockBasisState {
    pub fn new(occupations: Vec<u8>) -> Self {
        let photon_count = occupations.iter().map(|&n| u32::from(n)).sum();
        Self {
            occupations,
            photon_count,
        }
    }

    pub fn empty(rails: usize) -> Self {
        Self::new(vec![0; rails])
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn occupation(&self, rail: usize) -> u8 {
        self.occupations[rail]
    }

    pub fn photon_count(&self) -> u32 {
        self.photon_count
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    /// Raise one rail, returning the new state and the bosonic factor sqrt(n+1).
    pub fn raised(&self, rail: usize) -> (Self, f64) {
        let mut occupations = self.occupations.clone();
        let n = occupations[rail];
        occupations[rail] = n.checked_add(1).expect("rail occupation overflow");
        (
            Self {
                occupations,
                photon_count: self.photon_count + 1,
            },
            f64::from(n + 1).sqrt(),
        )
    }

    /// Lower one rail, returning the new state and sqrt(n), or `None` when empty.
    pub fn lowered(&self, rail: usize) -> Option<(Self, f64)> {
        let n = self.occupations[rail];
        if n == 0 {
            return None;
        }
        let mut occupations = self.occupations.clone();
        occupations[rail] = n - 1;
        Some((
            Self {
                occupations,
                photon_count: self.photon_count - 1,
            },
            f64::from(n).sqrt(),
        ))
    }

    /// Occupations of the `internal_dim` rails belonging to one spatial mode.
    pub fn spatial_block(&self, layout: &ModeLayout, spatial: usize) -> &[u8] {
        let d = layout.internal_dim();
        &self.occupations[spatial * d..(spatial + 1) * d]
    }
}

/// A superposition of Fock basis states with complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    layout: ModeLayout,
    terms: BTreeMap<FockBasisState, Complex64>,
}

impl SparseState {
    pub fn zero(layout: ModeLayout) -> Self {
        Self {
            layout,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(layout: ModeLayout) -> Self {
        Self::basis(layout, FockBasisState::empty(layout.total_rails()))
            .expect("vacuum matches its own layout")
    }

    pub fn basis(layout: ModeLayout, state: FockBasisState) -> Result<Self> {
        Self::from_terms(layout, [(state, Complex64::new(1.0, 0.0))])
    }

    /// Collects terms, summing repeated basis states in iteration order and
    /// pruning below [`PRUNE_TOL`].
    pub fn from_terms<I>(layout: ModeLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockBasisState, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (state, amp) in terms {
            if state.len() != layout.total_rails() {
                return Err(Error::LayoutMismatch);
            }
            *map.entry(state).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        Ok(Self { layout, terms: map }.prune(PRUNE_TOL))
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn terms(&self) -> &BTreeMap<FockBasisState, Complex64> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisState, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, state: &FockBasisState) -> Complex64 {
        self.terms.get(state).copied().unwrap_or_default()
    }

    /// Number of stored terms; see [`SparseState::is_zero`] for emptiness.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Photon count shared by all terms, `None` for the zero state or a mixed-count state.
    pub fn photon_count(&self) -> Option<u32> {
        let mut counts = self.terms.keys().map(FockBasisState::photon_count);
        let first = counts.next()?;
        counts.all(|c| c == first).then_some(first)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self.terms.iter().map(|(k, &v)| (k.clone(), v * factor));
        Self::from_terms(self.layout, terms).expect("same layout")
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &SparseState, factor: Complex64) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, &v)| (k.clone(), v))
            .chain(other.terms.iter().map(|(k, &v)| (k.clone(), v * factor)));
        Self::from_terms(self.layout, terms)
    }

    pub fn prune(mut self, tol: f64) -> Self {
        self.terms.retain(|_, amp| amp.norm() >= tol);
        self
    }

    /// Returns the unit-norm state together with the original norm.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok((self.scaled(Complex64::new(1.0 / norm, 0.0)), norm))
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &SparseState) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let sum: Complex64 = small
            .terms
            .iter()
            .filter_map(|(k, a)| large.terms.get(k).map(|b| a.conj() * b))
            .sum();
        Ok(if flip { sum.conj() } else { sum })
    }

    /// Largest amplitude deviation between two states on the same layout.
    pub fn max_deviation(&self, other: &SparseState) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let keys = self.terms.keys().chain(other.terms.keys());
        Ok(keys
            .map(|k| (self.amplitude(k) - other.amplitude(k)).norm())
            .fold(0.0, f64::max))
    }

    pub fn create(&self, rail: usize) -> Result<Self> {
        self.layout.check_rail(rail)?;
        Ok(self.map_terms(|state, amp, out| {
            let (raised, factor) = state.raised(rail);
            out.push((raised, amp * factor));
        }))
    }

    pub fn annihilate(&self, rail: usize) -> Result<Self> {
        self.layout.check_rail(rail)?;
        Ok(self.map_terms(|state, amp, out| {
            if let Some((lowered, factor)) = state.lowered(rail) {
                out.push((lowered, amp * factor));
            }
        }))
    }

    /// Applies `sum_r c_r a_r`, or `sum_r conj(c_r) a_r^dagger` when `adjoint`.
    pub fn apply_superposition(&self, sup: &ModeSuperposition, adjoint: bool) -> Result<Self> {
        for &(rail, _) in sup.terms() {
            self.layout.check_rail(rail)?;
        }
        Ok(self.map_terms(|state, amp, out| {
            for &(rail, coeff) in sup.terms() {
                if adjoint {
                    let (raised, factor) = state.raised(rail);
                    out.push((raised, amp * coeff.conj() * factor));
                } else if let Some((lowered, factor)) = state.lowered(rail) {
                    out.push((lowered, amp * coeff * factor));
                }
            }
        }))
    }

    /// Rebuilds the state from per-term contributions. Contributions are
    /// merged in term order regardless of scheduling, so output is bit-stable.
    pub(crate) fn map_terms<F>(&self, f: F) -> Self
    where
        F: Fn(&FockBasisState, Complex64, &mut Vec<(FockBasisState, Complex64)>) + Sync,
    {
        let expand = |(state, &amp): (&FockBasisState, &Complex64)| {
            let mut out = Vec::new();
            f(state, amp, &mut out);
            out
        };
        let contributions: Vec<(FockBasisState, Complex64)> = if self.terms.len() >= PAR_THRESHOLD {
            let entries: Vec<_> = self.terms.iter().collect();
            entries.into_par_iter().flat_map_iter(expand).collect()
        } else {
            self.terms.iter().flat_map(expand).collect()
        };
        Self::from_terms(self.layout, contributions).expect("operator preserves layout")
    }

    /// Same state on a layout with extra (vacuum) ancilla rails appended.
    pub fn with_ancillas(&self, ancilla_count: usize) -> Result<Self> {
        if ancilla_count < self.layout.ancilla_count() {
            return Err(Error::InvalidLayout(
                "cannot drop ancilla rails by relabelling".into(),
            ));
        }
        let layout = self.layout.with_ancillas(ancilla_count);
        let extra = ancilla_count - self.layout.ancilla_count();
        let terms = self.terms.iter().map(|(k, &v)| {
            let mut occ = k.occupations().to_vec();
            occ.extend(std::iter::repeat_n(0, extra));
            (FockBasisState::new(occ), v)
        });
        Self::from_terms(layout, terms)
    }
}

/// Basis in which a rail's internal index is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Computational,
    Fourier,
}

/// A linear combination of rail operators, `sum_r c_r a_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSuperposition {
    terms: Vec<(usize, Complex64)>,
    normalized: bool,
}

impl ModeSuperposition {
    pub fn new(terms: Vec<(usize, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(rail, _) in &terms {
            if !seen.insert(rail) {
                return Err(Error::DuplicateRail(rail));
            }
        }
        let norm_sqr: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        Ok(Self {
            terms,
            normalized: (norm_sqr - 1.0).abs() < 1e-12,
        })
    }

    pub fn terms(&self) -> &[(usize, Complex64)] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn coefficient(&self, rail: usize) -> Complex64 {
        self.terms
            .iter()
            .find(|(r, _)| *r == rail)
            .map(|&(_, c)| c)
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Merges terms on shared rails. Used when a dot's expanded edges overlap.
    pub fn merged(terms: impl IntoIterator<Item = (usize, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (rail, c) in terms {
            *map.entry(rail).or_default() += c;
        }
        Self::new(map.into_iter().filter(|(_, c)| c.norm() >= PRUNE_TOL).collect())
    }
}

/// `exp(2 pi i k / d)`.
pub fn root_of_unity(k: i64, d: usize) -> Complex64 {
    let d = d as i64;
    let k = k.rem_euclid(d);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// Fourier annihilator on spatial mode `spatial`:
/// `a~_l = (1/sqrt d) sum_s omega^(l s) a_(j,s)`, `omega = exp(2 pi i / d)`.
pub fn tilde_superposition(
    layout: &ModeLayout,
    spatial: usize,
    fourier_index: usize,
) -> Result<ModeSuperposition> {
    let d = layout.internal_dim();
    if fourier_index >= d {
        return Err(Error::InternalIndexOutOfRange {
            index: fourier_index,
            d,
        });
    }
    let scale = 1.0 / (d as f64).sqrt();
    let terms = (0..d)
        .map(|s| {
            let rail = layout.rail_of(spatial, s)?;
            Ok((rail, root_of_unity((fourier_index * s) as i64, d) * scale))
        })
        .collect::<Result<Vec<_>>>()?;
    ModeSuperposition::new(terms)
}

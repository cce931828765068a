use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::compile::compile_bigraph;
use super::gate::{Circuit, Gate};
use crate::fock::{Basis, FockBasisState, ModeLayout, SparseState};
use crate::sculpt::{initial_state, sculpt, SculptingBigraph};
use crate::targets::{split_qudits, QuditState};
use crate::{Error, Result};

type LocalExpansion = Vec<(Vec<u8>, Complex64)>;

/// Output distribution of `prod_i (sum_o m[o, i] a_o^dagger)^{n_i} / sqrt(n_i!) |0>`.
fn expand_local(matrix: &DMatrix<Complex64>, input: &[u8]) -> LocalExpansion {
    let k = input.len();
    let mut poly: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; k], Complex64::new(1.0, 0.0));
    for (i, &count) in input.iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
            for (mono, coeff) in &poly {
                for o in 0..k {
                    let m = matrix[(o, i)];
                    if m == Complex64::default() {
                        continue;
                    }
                    let mut raised = mono.clone();
                    raised[o] += 1;
                    *next.entry(raised).or_default() += coeff * m;
                }
            }
            poly = next;
        }
    }
    let fact = |v: &[u8]| -> f64 {
        v.iter()
            .map(|&n| (1..=u32::from(n)).map(f64::from).product::<f64>())
            .product()
    };
    let in_norm = fact(input).sqrt();
    poly.into_iter()
        .map(|(mono, coeff)| {
            let scale = fact(&mono).sqrt() / in_norm;
            (mono, coeff * scale)
        })
        .collect()
}

/// Applies one gate to a Fock state.
pub fn apply_gate(state: &SparseState, gate: &Gate) -> Result<SparseState> {
    let layout = *state.layout();
    let rails = gate.rails(&layout);
    for &r in &rails {
        layout.locate(r)?;
    }
    if let Gate::Phase { rail, angle } = *gate {
        let unit = angle.value();
        return Ok(state.map_terms(|basis, amp, out| {
            let n = basis.occupation(rail);
            out.push((basis.clone(), amp * unit.powu(u32::from(n))));
        }));
    }
    let matrix = gate.matrix(&layout);

    let mut cache: HashMap<Vec<u8>, LocalExpansion> = HashMap::new();
    for basis in state.terms().keys() {
        let local: Vec<u8> = rails.iter().map(|&r| basis.occupation(r)).collect();
        cache
            .entry(local)
            .or_insert_with_key(|local| expand_local(&matrix, local));
    }
    Ok(state.map_terms(|basis, amp, out| {
        let local: Vec<u8> = rails.iter().map(|&r| basis.occupation(r)).collect();
        for (mono, coeff) in &cache[&local] {
            let mut occ = basis.occupations().to_vec();
            for (&r, &n) in rails.iter().zip(mono) {
                occ[r] = n;
            }
            out.push((FockBasisState::new(occ), amp * coeff));
        }
    }))
}

/// Keeps terms where `rail` holds exactly `count` photons.
fn project_rail(state: &SparseState, rail: usize, count: u8) -> SparseState {
    state.map_terms(|basis, amp, out| {
        if basis.occupation(rail) == count {
            out.push((basis.clone(), amp));
        }
    })
}

/// Drops ancilla rails from a state whose ancillas have all been projected.
fn strip_ancillas(state: &SparseState) -> Result<SparseState> {
    let layout = state.layout().with_ancillas(0);
    let keep = layout.system_rails();
    SparseState::from_terms(
        layout,
        state
            .iter()
            .map(|(b, &a)| (FockBasisState::new(b.occupations()[..keep].to_vec()), a)),
    )
}

/// Probability of one herald pattern, summed over every output configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeProbability {
    pub herald: Vec<u8>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldReport {
    pub herald: Vec<u8>,
    /// Probability of the herald pattern alone.
    pub herald_probability: f64,
    /// Probability of the herald pattern and one photon per output group.
    pub probability: f64,
    /// Normalised postselected output state on the system rails, if any.
    pub conditional: Option<SparseState>,
    /// Normalised qudits read from the output rails.
    pub qudits: Option<QuditState>,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct SimulationOptions {
    /// Defer detection to the end and report every herald pattern. Otherwise
    /// each detector is applied right after the last gate touching its rail.
    pub all_outcomes: bool,
    /// State the postselected output is compared against.
    pub target: Option<QuditState>,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub report: HeraldReport,
    /// Every herald pattern with nonzero probability, present with `all_outcomes`.
    pub outcomes: Option<Vec<OutcomeProbability>>,
}

/// Initial state `|Sym_{N,d}>` with vacuum ancillas for `circuit`.
pub fn circuit_input(circuit: &Circuit) -> Result<SparseState> {
    let layout = circuit.layout();
    initial_state(layout.spatial_count(), layout.internal_dim())?
        .with_ancillas(layout.ancilla_count())
}

pub fn simulate(
    circuit: &Circuit,
    input: &SparseState,
    options: &SimulationOptions,
) -> Result<SimulationResult> {
    let layout: ModeLayout = *circuit.layout();
    if *input.layout() != layout {
        return Err(Error::LayoutMismatch);
    }
    let system = layout.system_rails();
    if input
        .terms()
        .keys()
        .any(|b| b.occupations()[system..].iter().any(|&n| n > 0))
    {
        return Err(Error::InvalidCircuit("ancilla rails must start in vacuum".into()));
    }
    if let Some(target) = &options.target {
        if target.n() != layout.spatial_count() || target.d() != layout.internal_dim() {
            return Err(Error::DimensionMismatch(
                target.n(),
                target.d(),
                layout.spatial_count(),
                layout.internal_dim(),
            ));
        }
    }
    let herald = circuit.herald_pattern();
    let input_norm = input.norm_sqr();

    let mut last_touch: HashMap<usize, usize> = HashMap::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        for r in g.rails(&layout) {
            last_touch.insert(r, i);
        }
    }
    let mut detect_after: BTreeMap<usize, Vec<(usize, u8)>> = BTreeMap::new();
    let mut pending = Vec::new();
    for det in circuit.detectors() {
        match last_touch.get(&det.rail) {
            Some(&i) if !options.all_outcomes => {
                detect_after.entry(i).or_default().push((det.rail, det.count))
            }
            _ => pending.push((det.rail, det.count)),
        }
    }

    // Heralded amplitudes shrink like r per gadget; the state is renormalised
    // after every projection so that pruning stays relative, and the lost
    // weight is carried in `retained`.
    let mut state = input.clone();
    let mut retained = 1.0;
    for (i, gate) in circuit.gates().iter().enumerate() {
        state = apply_gate(&state, gate)?;
        if let Some(dets) = detect_after.get(&i) {
            for &(rail, count) in dets {
                state = project_rail(&state, rail, count);
            }
            if state.is_zero() {
                break;
            }
            let before = state.norm_sqr();
            state = state.scaled(Complex64::new(before.sqrt().recip(), 0.0));
            retained *= before;
        }
    }

    let outcomes = options.all_outcomes.then(|| {
        let mut by_herald: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (basis, amp) in state.iter() {
            *by_herald
                .entry(basis.occupations()[system..].to_vec())
                .or_default() += amp.norm_sqr() / input_norm;
        }
        by_herald
            .into_iter()
            .map(|(herald, probability)| OutcomeProbability { herald, probability })
            .collect()
    });

    for (rail, count) in pending {
        state = project_rail(&state, rail, count);
    }
    let heralded = strip_ancillas(&state)?;
    let herald_probability = heralded.norm_sqr() * retained / input_norm;

    let postselected = heralded.map_terms(|basis, amp, out| {
        let one_each = (0..layout.spatial_count())
            .all(|j| basis.spatial_block(&layout, j).iter().sum::<u8>() == 1);
        if one_each {
            out.push((basis.clone(), amp));
        }
    });
    let probability = postselected.norm_sqr() * retained / input_norm;

    let (conditional, qudits, fidelity) = if postselected.is_zero() {
        (None, None, None)
    } else {
        let (unit, _) = postselected.normalize()?;
        let mut qudits = split_qudits(&unit, Basis::Computational)?.state;
        if circuit.output_basis() == Basis::Fourier {
            qudits = QuditState::new(qudits.n(), qudits.d(), qudits.amplitudes().to_vec(), Basis::Fourier)?;
        }
        let fidelity = match &options.target {
            Some(t) => Some(t.fidelity(&qudits)?),
            None => None,
        };
        (Some(unit), Some(qudits), fidelity)
    };

    Ok(SimulationResult {
        report: HeraldReport {
            herald,
            herald_probability,
            probability,
            conditional,
            qudits,
            fidelity,
        },
        outcomes,
    })
}

/// The `r`-independent reference a compiled circuit approaches.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealRun {
    /// Squared norm of the one-photon-per-mode part of `A |Sym_{N,d}>`.
    pub weight: f64,
    /// Squared norm of the full sculpted state, bunched terms included.
    pub total_weight: f64,
    /// Normalised qudit state read in the Fourier basis; `None` when `weight` is 0.
    pub state: Option<QuditState>,
}

pub fn ideal_heralded_run(graph: &SculptingBigraph) -> Result<IdealRun> {
    let sculpted = sculpt(graph)?;
    let total_weight = sculpted.norm_sqr();
    let extraction = split_qudits(&sculpted, Basis::Fourier)?;
    let weight = extraction.state.norm_sqr();
    let state = if weight > 0.0 {
        Some(extraction.state.normalized()?)
    } else {
        None
    };
    Ok(IdealRun {
        weight,
        total_weight,
        state,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub reflectivity: f64,
    pub fidelity: f64,
    pub probability: f64,
    /// `probability / r^(2 |dots|)`; tends to the ideal weight as `r -> 0`.
    pub scaled_probability: f64,
}

/// True when fidelity rises strictly as `r` falls, treating points within
/// `floor` of 1 as already converged (some graphs are exact at every `r`).
pub fn fidelity_increasing(rows: &[SweepRow], floor: f64) -> bool {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.reflectivity.total_cmp(&a.reflectivity));
    sorted.windows(2).all(|w| {
        let (coarse, fine) = (w[0].fidelity, w[1].fidelity);
        fine > coarse || (1.0 - coarse <= floor && 1.0 - fine <= floor)
    })
}

/// Compiles and simulates `graph` at each reflectivity, comparing against the ideal run.
pub fn fidelity_sweep(graph: &SculptingBigraph, reflectivities: &[f64]) -> Result<Vec<SweepRow>> {
    let ideal = ideal_heralded_run(graph)?;
    let target = ideal
        .state
        .ok_or_else(|| Error::InvalidGraph("ideal run has no one-photon-per-mode output".into()))?;
    let dots = graph.dots().len() as i32;
    reflectivities
        .par_iter()
        .map(|&r| {
            let circuit = compile_bigraph(graph, r)?;
            let input = circuit_input(&circuit)?;
            let options = SimulationOptions {
                all_outcomes: false,
                target: Some(target.clone()),
            };
            let report = simulate(&circuit, &input, &options)?.report;
            Ok(SweepRow {
                reflectivity: r,
                fidelity: report.fidelity.unwrap_or(0.0),
                probability: report.probability,
                scaled_probability: report.probability / r.powi(2 * dots),
            })
        })
        .collect()
}

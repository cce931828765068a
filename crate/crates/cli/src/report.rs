//! Heralded-run reports for compiled circuits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sculpt_core::circuit::{
    circuit_input, closed_form_references, compile_bigraph, fidelity_increasing,
    ideal_heralded_run, projected_amplitudes, simulate, Circuit, SimulationOptions, SweepRow,
};
use sculpt_core::sculpt::SculptingBigraph;
use sculpt_core::targets::QuditState;

use crate::formats::CircuitBundle;
use crate::verify::{Check, Comparison};
use crate::CliError;

/// Largest photon count for which the permanent cross-check is attempted.
pub const PERMANENT_PHOTON_LIMIT: usize = 20;
pub const ORACLE_TOL: f64 = 1e-12;
pub const OUTCOME_TOL: f64 = 1e-8;
pub const CONVERGED_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealSummary {
    pub weight: f64,
    pub total_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub reflectivity: Option<f64>,
    pub herald_probability: f64,
    pub probability: f64,
    /// `probability / r^(2 |detectors|)`.
    pub scaled_probability: Option<f64>,
    pub fidelity: Option<f64>,
    pub permanent_probability: Option<f64>,
    pub permanent_deviation: Option<f64>,
    pub outcome_total: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub expression: String,
    pub value: f64,
    /// Computed ideal weight divided by `value`; recorded, not asserted.
    pub weight_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub detectors: usize,
    pub ideal: Option<IdealSummary>,
    pub runs: Vec<RunReport>,
    pub references: Vec<ReferenceValue>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub struct SimulateOptions {
    pub sweep: Option<Vec<f64>>,
    pub outcomes: bool,
}

fn run_one(
    circuit: &Circuit,
    reflectivity: Option<f64>,
    target: Option<&QuditState>,
    outcomes: bool,
) -> Result<RunReport, CliError> {
    let input = circuit_input(circuit)?;
    let options = SimulationOptions {
        all_outcomes: outcomes,
        target: target.cloned(),
    };
    let result = simulate(circuit, &input, &options)?;
    let report = result.report;
    let photons = input.photon_count().unwrap_or(0) as usize;
    let needed = circuit.layout().spatial_count()
        + circuit.herald_pattern().iter().map(|&c| c as usize).sum::<usize>();
    let permanent_probability = if photons == needed && photons <= PERMANENT_PHOTON_LIMIT {
        Some(projected_amplitudes(circuit, &input)?.norm_sqr() / input.norm_sqr())
    } else {
        None
    };
    let dots = circuit.detectors().len() as i32;
    Ok(RunReport {
        reflectivity,
        herald_probability: report.herald_probability,
        probability: report.probability,
        scaled_probability: reflectivity.map(|r| report.probability / r.powi(2 * dots)),
        fidelity: report.fidelity,
        permanent_probability,
        permanent_deviation: permanent_probability.map(|p| (p - report.probability).abs()),
        outcome_total: result
            .outcomes
            .map(|o| o.iter().map(|x| x.probability).sum()),
    })
}

fn sweep_runs(
    graph: &SculptingBigraph,
    rs: &[f64],
    target: Option<&QuditState>,
    outcomes: bool,
) -> Result<Vec<RunReport>, CliError> {
    rs.par_iter()
        .map(|&r| {
            let circuit = compile_bigraph(graph, r)?;
            run_one(&circuit, Some(r), target, outcomes)
        })
        .collect()
}

pub fn simulate_bundle(bundle: &CircuitBundle, opts: &SimulateOptions) -> Result<SimulationReport, CliError> {
    let layout = bundle.circuit.layout();
    let n = layout.spatial_count();
    let ideal = bundle.graph.as_ref().map(ideal_heralded_run).transpose()?;
    let target = ideal.as_ref().and_then(|i| i.state.as_ref());

    let runs = match (&opts.sweep, &bundle.graph) {
        (Some(rs), Some(graph)) => sweep_runs(graph, rs, target, opts.outcomes)?,
        (Some(_), None) => {
            return Err(CliError::Malformed(
                "--sweep needs a circuit file that embeds its source graph".into(),
            ))
        }
        (None, _) => vec![run_one(&bundle.circuit, bundle.reflectivity, target, opts.outcomes)?],
    };

    let mut checks = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        for (name, p) in [("herald_probability", run.herald_probability), ("probability", run.probability)] {
            checks.push(Check::new(format!("run{i}_{name}_min"), p, Comparison::AtLeast, 0.0));
            checks.push(Check::new(format!("run{i}_{name}_max"), p, Comparison::AtMost, 1.0));
        }
        if let Some(dev) = run.permanent_deviation {
            checks.push(Check::new(format!("run{i}_permanent"), dev, Comparison::AtMost, ORACLE_TOL));
        }
        if let Some(total) = run.outcome_total {
            checks.push(Check::new(
                format!("run{i}_outcome_total"),
                (total - 1.0).abs(),
                Comparison::AtMost,
                OUTCOME_TOL,
            ));
        }
    }
    if runs.len() > 1 && target.is_some() {
        let rows: Vec<SweepRow> = runs
            .iter()
            .map(|r| SweepRow {
                reflectivity: r.reflectivity.unwrap_or(0.0),
                fidelity: r.fidelity.unwrap_or(0.0),
                probability: r.probability,
                scaled_probability: r.scaled_probability.unwrap_or(0.0),
            })
            .collect();
        let ok = fidelity_increasing(&rows, CONVERGED_FLOOR);
        checks.push(Check::new(
            "fidelity_increasing",
            if ok { 1.0 } else { 0.0 },
            Comparison::AtLeast,
            1.0,
        ));
    }

    let weight = ideal.as_ref().map(|i| i.weight);
    let references = closed_form_references(n)
        .into_iter()
        .map(|r| ReferenceValue {
            weight_ratio: weight.map(|w| w / r.value),
            expression: r.expression,
            value: r.value,
        })
        .collect();

    let pass = checks.iter().all(Check::evaluate);
    Ok(SimulationReport {
        n,
        d: layout.internal_dim(),
        detectors: bundle.circuit.detectors().len(),
        ideal: ideal.map(|i| IdealSummary {
            weight: i.weight,
            total_weight: i.total_weight,
        }),
        runs,
        references,
        checks,
        pass,
    })
}

//! Bigraph to circuit translation.
//!
//! Each spatial mode first passes a DFT port so that its rails carry Fourier
//! labels. Every dot then becomes a subtraction gadget:
//!
//! 1. phase shifters and beam splitters rotate the dot's mode onto a working rail,
//! 2. a weak beam splitter (amplitude reflectivity `r`) taps the working rail
//!    into the dot's vacuum ancilla, heralded by a single-photon detection,
//! 3. the rotation is undone.
//!
//! Conditioned on the click, the gadget acts as `r t^n a_dot` with
//! `t = sqrt(1 - r^2)`, which tends to the ideal subtraction as `r -> 0`.

use super::gate::{Circuit, Detector, Gate};
use crate::fock::{Basis, ModeLayout};
use crate::sculpt::{Dot, Phase, SculptingBigraph};
use crate::{Error, Result};

/// A rail coefficient `magnitude * exp(i phase)` in the Fourier frame.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FrameCoefficient {
    rail: usize,
    magnitude: f64,
    phase: Phase,
}

/// Dot mode in the post-DFT frame. Fourier edges land on one rail; a
/// computational edge `s` spreads over all `d` rails with phases `-2 l s / d`.
fn fourier_frame_coefficients(dot: &Dot, layout: &ModeLayout) -> Result<Vec<FrameCoefficient>> {
    let d = layout.internal_dim();
    let amp = dot.amplitude();
    let mut out = Vec::new();
    for edge in dot.edges() {
        match edge.color.basis {
            Basis::Fourier => out.push(FrameCoefficient {
                rail: layout.rail_of(edge.mode, edge.color.index)?,
                magnitude: amp,
                phase: edge.phase,
            }),
            Basis::Computational => {
                let s = edge.color.index;
                let spread = amp / (d as f64).sqrt();
                for l in 0..d {
                    let twist = Phase::new(-2 * (l * s) as i64, d as i64)?;
                    out.push(FrameCoefficient {
                        rail: layout.rail_of(edge.mode, l)?,
                        magnitude: spread,
                        phase: edge.phase + twist,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn subtraction_gadget(coeffs: &[FrameCoefficient], ancilla: usize, reflectivity: f64) -> Vec<Gate> {
    let work = coeffs[0].rail;
    let phases: Vec<Gate> = coeffs
        .iter()
        .filter(|c| !c.phase.is_zero())
        .map(|c| Gate::Phase {
            rail: c.rail,
            angle: c.phase,
        })
        .collect();

    // real Givens rotations folding every other rail into the working rail
    let mut rotations = Vec::new();
    let mut folded = coeffs[0].magnitude;
    for c in &coeffs[1..] {
        let theta = -c.magnitude.atan2(folded);
        folded = folded.hypot(c.magnitude);
        rotations.push((c.rail, theta));
    }

    let mut gates = phases.clone();
    gates.extend(rotations.iter().map(|&(rail, theta)| Gate::BeamSplitter {
        rail_a: work,
        rail_b: rail,
        theta,
        phi: 0.0,
    }));
    gates.push(Gate::BeamSplitter {
        rail_a: work,
        rail_b: ancilla,
        theta: reflectivity.asin(),
        phi: 0.0,
    });
    gates.extend(rotations.iter().rev().map(|&(rail, theta)| Gate::BeamSplitter {
        rail_a: work,
        rail_b: rail,
        theta: -theta,
        phi: 0.0,
    }));
    gates.extend(phases.iter().map(|g| match *g {
        Gate::Phase { rail, angle } => Gate::Phase {
            rail,
            angle: -angle,
        },
        _ => unreachable!(),
    }));
    gates
}

/// Compiles a bigraph into DFT ports plus one heralded subtraction gadget per dot.
pub fn compile_bigraph(graph: &SculptingBigraph, reflectivity: f64) -> Result<Circuit> {
    if !(reflectivity > 0.0 && reflectivity < 1.0) {
        return Err(Error::InvalidReflectivity(reflectivity));
    }
    for (i, dot) in graph.dots().iter().enumerate() {
        if dot.edges().len() > 2 {
            return Err(Error::DotTooLarge {
                dot: i,
                edges: dot.edges().len(),
            });
        }
    }
    let layout = ModeLayout::new(graph.n(), graph.d(), graph.dots().len())?;
    let mut gates: Vec<Gate> = (0..graph.n()).map(|mode| Gate::DftPort { mode }).collect();
    let mut detectors = Vec::with_capacity(graph.dots().len());
    for (i, dot) in graph.dots().iter().enumerate() {
        let ancilla = layout.ancilla_rail(i)?;
        let coeffs = fourier_frame_coefficients(dot, &layout)?;
        gates.extend(subtraction_gadget(&coeffs, ancilla, reflectivity));
        detectors.push(Detector {
            rail: ancilla,
            count: 1,
        });
    }
    Circuit::new(layout, gates, detectors)
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{Basis, ModeLayout, RailKind};
use crate::sculpt::Phase;
use crate::targets::dft_matrix;
use crate::{Error, Result};

/// A passive linear-optical element. Matrices act on creation operators:
/// `a_r^dagger -> sum_r' M[r', r] a_r'^dagger`, columns indexed by [`Gate::rails`].
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `d`-port DFT across the internal rails of one spatial mode, taking
    /// computational rails to Fourier rails.
    DftPort { mode: usize },
    Phase { rail: usize, angle: Phase },
    /// `[[cos t, -e^{-i p} sin t], [e^{i p} sin t, cos t]]` on `(rail_a, rail_b)`.
    BeamSplitter {
        rail_a: usize,
        rail_b: usize,
        theta: f64,
        phi: f64,
    },
}

impl Gate {
    pub fn rails(&self, layout: &ModeLayout) -> Vec<usize> {
        match *self {
            Gate::DftPort { mode } => {
                let d = layout.internal_dim();
                (mode * d..(mode + 1) * d).collect()
            }
            Gate::Phase { rail, .. } => vec![rail],
            Gate::BeamSplitter { rail_a, rail_b, .. } => vec![rail_a, rail_b],
        }
    }

    pub fn matrix(&self, layout: &ModeLayout) -> DMatrix<Complex64> {
        match *self {
            Gate::DftPort { .. } => dft_matrix(layout.internal_dim()),
            Gate::Phase { angle, .. } => DMatrix::from_element(1, 1, angle.value()),
            Gate::BeamSplitter { theta, phi, .. } => {
                let (s, c) = theta.sin_cos();
                let e = Complex64::from_polar(1.0, phi);
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(c, 0.0),
                        -e.conj() * s,
                        e * s,
                        Complex64::new(c, 0.0),
                    ],
                )
            }
        }
    }

    fn validate(&self, layout: &ModeLayout) -> Result<()> {
        match *self {
            Gate::DftPort { mode } if mode >= layout.spatial_count() => {
                return Err(Error::ModeOutOfRange {
                    mode,
                    n: layout.spatial_count(),
                })
            }
            Gate::BeamSplitter { rail_a, rail_b, .. } if rail_a == rail_b => {
                return Err(Error::InvalidCircuit(format!(
                    "beam splitter couples rail {rail_a} to itself"
                )))
            }
            Gate::BeamSplitter { theta, phi, .. } if !theta.is_finite() || !phi.is_finite() => {
                return Err(Error::InvalidCircuit("non-finite beam splitter angle".into()))
            }
            _ => {}
        }
        for rail in self.rails(layout) {
            layout.locate(rail)?;
        }
        Ok(())
    }
}

/// Photon-number-resolving detector on an ancilla rail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detector {
    pub rail: usize,
    pub count: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: ModeLayout,
    gates: Vec<Gate>,
    detectors: Vec<Detector>,
    output_groups: Vec<Vec<usize>>,
}

impl Circuit {
    /// Validates gates and detectors; output groups are the `d` rails of each spatial mode.
    pub fn new(layout: ModeLayout, gates: Vec<Gate>, detectors: Vec<Detector>) -> Result<Self> {
        for g in &gates {
            g.validate(&layout)?;
        }
        let mut covered = vec![false; layout.ancilla_count()];
        for det in &detectors {
            match layout.locate(det.rail)? {
                RailKind::Ancilla(i) if !covered[i] => covered[i] = true,
                RailKind::Ancilla(_) => {
                    return Err(Error::InvalidCircuit(format!(
                        "rail {} has two detectors",
                        det.rail
                    )))
                }
                RailKind::System { .. } => {
                    return Err(Error::InvalidCircuit(format!(
                        "detector on output rail {}",
                        det.rail
                    )))
                }
            }
        }
        if let Some(i) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidCircuit(format!("ancilla {i} has no detector")));
        }
        let d = layout.internal_dim();
        let output_groups = (0..layout.spatial_count())
            .map(|j| (j * d..(j + 1) * d).collect())
            .collect();
        Ok(Self {
            layout,
            gates,
            detectors,
            output_groups,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn output_groups(&self) -> &[Vec<usize>] {
        &self.output_groups
    }

    /// Required counts in ancilla order.
    pub fn herald_pattern(&self) -> Vec<u8> {
        let mut pattern = vec![0; self.layout.ancilla_count()];
        for det in &self.detectors {
            pattern[det.rail - self.layout.system_rails()] = det.count;
        }
        pattern
    }

    /// Basis in which the output rails should be read: Fourier when every
    /// spatial mode passes through exactly one DFT port.
    pub fn output_basis(&self) -> Basis {
        let mut ports = vec![0usize; self.layout.spatial_count()];
        for g in &self.gates {
            if let Gate::DftPort { mode } = g {
                ports[*mode] += 1;
            }
        }
        if ports.iter().all(|&p| p == 1) {
            Basis::Fourier
        } else {
            Basis::Computational
        }
    }

    pub fn count_gates(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::DftPort { .. } => counts.dft_ports += 1,
                Gate::Phase { .. } => counts.phases += 1,
                Gate::BeamSplitter { .. } => counts.beam_splitters += 1,
            }
        }
        counts
    }

    /// Single-photon transfer matrix of the whole circuit.
    pub fn transfer_matrix(&self) -> DMatrix<Complex64> {
        let total = self.layout.total_rails();
        let mut t = DMatrix::<Complex64>::identity(total, total);
        for g in &self.gates {
            let rails = g.rails(&self.layout);
            let m = g.matrix(&self.layout);
            let mut embedded = DMatrix::<Complex64>::identity(total, total);
            for (i, &ri) in rails.iter().enumerate() {
                for (j, &rj) in rails.iter().enumerate() {
                    embedded[(ri, rj)] = m[(i, j)];
                }
            }
            t = embedded * t;
        }
        t
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub dft_ports: usize,
    pub phases: usize,
    pub beam_splitters: usize,
}

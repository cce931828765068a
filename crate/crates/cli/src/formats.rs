//! On-disk formats: bigraphs, circuits, and the canonical JSON writer.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use sculpt_core::circuit::{Circuit, Detector, Gate};
use sculpt_core::fock::{Basis, ModeLayout};
use sculpt_core::sculpt::{ColorLabel, Dot, Edge, Phase, SculptingBigraph};

use crate::CliError;

/// Writes every float as `{:.16e}`, i.e. 17 significant digits.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with sorted keys and fixed float formatting, newline terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // serde_json's Map is a BTreeMap, so going through Value sorts the keys
    let value = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    Comp,
    Fourier,
}

impl BasisName {
    pub fn tag(self) -> &'static str {
        match self {
            BasisName::Comp => "comp",
            BasisName::Fourier => "fourier",
        }
    }
}

impl From<Basis> for BasisName {
    fn from(b: Basis) -> Self {
        match b {
            Basis::Computational => BasisName::Comp,
            Basis::Fourier => BasisName::Fourier,
        }
    }
}

impl From<BasisName> for Basis {
    fn from(b: BasisName) -> Self {
        match b {
            BasisName::Comp => Basis::Computational,
            BasisName::Fourier => Basis::Fourier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseFile {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorFile {
    pub basis: BasisName,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub mode: usize,
    pub phase: PhaseFile,
    pub color: ColorFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DotFile {
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BigraphFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub dots: Vec<DotFile>,
}

impl From<&SculptingBigraph> for BigraphFile {
    fn from(g: &SculptingBigraph) -> Self {
        let dots = g
            .dots()
            .iter()
            .map(|dot| DotFile {
                edges: dot
                    .edges()
                    .iter()
                    .map(|e| EdgeFile {
                        mode: e.mode,
                        phase: PhaseFile {
                            num: e.phase.num(),
                            den: e.phase.den(),
                        },
                        color: ColorFile {
                            basis: e.color.basis.into(),
                            index: e.color.index,
                        },
                    })
                    .collect(),
            })
            .collect();
        BigraphFile {
            n: g.n(),
            d: g.d(),
            dots,
        }
    }
}

impl BigraphFile {
    pub fn to_graph(&self) -> Result<SculptingBigraph, CliError> {
        let mut dots = Vec::with_capacity(self.dots.len());
        for dot in &self.dots {
            let mut edges = Vec::with_capacity(dot.edges.len());
            for e in &dot.edges {
                let phase = Phase::new(e.phase.num, e.phase.den)?;
                let color = match e.color.basis {
                    BasisName::Comp => ColorLabel::computational(e.color.index),
                    BasisName::Fourier => ColorLabel::fourier(e.color.index),
                };
                edges.push(Edge::new(e.mode, phase, color));
            }
            dots.push(Dot::new(edges)?);
        }
        Ok(SculptingBigraph::new(self.n, self.d, dots)?)
    }
}

pub fn parse_bigraph(text: &str) -> Result<SculptingBigraph, CliError> {
    let file: BigraphFile =
        serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("bigraph: {e}")))?;
    file.to_graph()
}

pub fn bigraph_json(graph: &SculptingBigraph) -> Result<String, CliError> {
    to_canonical_json(&BigraphFile::from(graph))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub ancillas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateFile {
    Dft {
        mode: usize,
    },
    Phase {
        rail: usize,
        angle: PhaseFile,
    },
    BeamSplitter {
        rail_a: usize,
        rail_b: usize,
        theta: f64,
        phi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorFile {
    pub rail: usize,
    pub count: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub layout: LayoutFile,
    pub gates: Vec<GateFile>,
    pub detectors: Vec<DetectorFile>,
    pub output_groups: Vec<Vec<usize>>,
    pub reflectivity: Option<f64>,
    /// Source bigraph, kept so that sweeps can recompile at other reflectivities.
    pub graph: Option<BigraphFile>,
}

/// A circuit together with the metadata stored next to it.
#[derive(Debug, Clone)]
pub struct CircuitBundle {
    pub circuit: Circuit,
    pub reflectivity: Option<f64>,
    pub graph: Option<SculptingBigraph>,
}

impl CircuitBundle {
    pub fn to_file(&self) -> CircuitFile {
        let layout = self.circuit.layout();
        let gates = self
            .circuit
            .gates()
            .iter()
            .map(|g| match *g {
                Gate::DftPort { mode } => GateFile::Dft { mode },
                Gate::Phase { rail, angle } => GateFile::Phase {
                    rail,
                    angle: PhaseFile {
                        num: angle.num(),
                        den: angle.den(),
                    },
                },
                Gate::BeamSplitter {
                    rail_a,
                    rail_b,
                    theta,
                    phi,
                } => GateFile::BeamSplitter {
                    rail_a,
                    rail_b,
                    theta,
                    phi,
                },
            })
            .collect();
        CircuitFile {
            layout: LayoutFile {
                n: layout.spatial_count(),
                d: layout.internal_dim(),
                ancillas: layout.ancilla_count(),
            },
            gates,
            detectors: self
                .circuit
                .detectors()
                .iter()
                .map(|d| DetectorFile {
                    rail: d.rail,
                    count: d.count,
                })
                .collect(),
            output_groups: self.circuit.output_groups().to_vec(),
            reflectivity: self.reflectivity,
            graph: self.graph.as_ref().map(BigraphFile::from),
        }
    }

    pub fn from_file(file: &CircuitFile) -> Result<Self, CliError> {
        let layout = ModeLayout::new(file.layout.n, file.layout.d, file.layout.ancillas)?;
        let mut gates = Vec::with_capacity(file.gates.len());
        for g in &file.gates {
            gates.push(match *g {
                GateFile::Dft { mode } => Gate::DftPort { mode },
                GateFile::Phase { rail, angle } => Gate::Phase {
                    rail,
                    angle: Phase::new(angle.num, angle.den)?,
                },
                GateFile::BeamSplitter {
                    rail_a,
                    rail_b,
                    theta,
                    phi,
                } => Gate::BeamSplitter {
                    rail_a,
                    rail_b,
                    theta,
                    phi,
                },
            });
        }
        let detectors = file
            .detectors
            .iter()
            .map(|d| Detector {
                rail: d.rail,
                count: d.count,
            })
            .collect();
        let circuit = Circuit::new(layout, gates, detectors)?;
        if circuit.output_groups() != file.output_groups.as_slice() {
            return Err(CliError::Malformed(
                "output_groups do not match the layout".into(),
            ));
        }
        if let Some(r) = file.reflectivity {
            if !(r > 0.0 && r < 1.0) {
                return Err(CliError::Malformed(format!("reflectivity {r} outside (0, 1)")));
            }
        }
        let graph = file.graph.as_ref().map(BigraphFile::to_graph).transpose()?;
        if let Some(g) = &graph {
            if g.n() != layout.spatial_count() || g.d() != layout.internal_dim() {
                return Err(CliError::Malformed(
                    "embedded graph does not fit the circuit layout".into(),
                ));
            }
        }
        Ok(Self {
            circuit,
            reflectivity: file.reflectivity,
            graph,
        })
    }
}

pub fn parse_circuit(text: &str) -> Result<CircuitBundle, CliError> {
    let file: CircuitFile =
        serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("circuit: {e}")))?;
    CircuitBundle::from_file(&file)
}

pub fn circuit_json(bundle: &CircuitBundle) -> Result<String, CliError> {
    to_canonical_json(&bundle.to_file())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sculpt_core::sculpt::Scheme;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_canonical_json(&serde_json::json!({"b": 0.1, "a": -2.5e-300, "c": 3})).unwrap();
        assert_eq!(
            s,
            "{\"a\":-2.5000000000000000e-300,\"b\":1.0000000000000001e-1,\"c\":3}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn bigraph_round_trip() {
        for scheme in Scheme::ALL {
            let g = scheme.build(3).unwrap();
            let text = bigraph_json(&g).unwrap();
            let back = parse_bigraph(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(bigraph_json(&back).unwrap(), text);
        }
    }

    #[test]
    fn malformed_bigraphs_are_rejected() {
        for text in [
            "",
            "{}",
            "{\"N\":2,\"d\":2}",
            "{\"N\":2,\"d\":2,\"dots\":[{\"edges\":[]}]}",
            "{\"N\":2,\"d\":2,\"dots\":[],\"extra\":1}",
            "{\"N\":2,\"d\":2,\"dots\":[{\"edges\":[{\"mode\":5,\"phase\":{\"num\":0,\"den\":1},\"color\":{\"basis\":\"comp\",\"index\":0}}]}]}",
            "{\"N\":2,\"d\":2,\"dots\":[{\"edges\":[{\"mode\":0,\"phase\":{\"num\":0,\"den\":0},\"color\":{\"basis\":\"comp\",\"index\":0}}]}]}",
        ] {
            assert!(parse_bigraph(text).is_err(), "{text}");
        }
    }
}

//! Verification of a sculpting bigraph against its intended target.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use sculpt_core::fock::Basis;
use sculpt_core::sculpt::{exchange_overlap, sculpt, state_from_matchings, Scheme, SculptingBigraph};
use sculpt_core::targets::{
    collective_unitary, d3_plus_uniform_reference, dicke_1n_state, equal_up_to_phase,
    singlet_state, split_qudits, QuditState,
};

use crate::formats::BasisName;
use crate::CliError;

/// Readout bases to verify in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BasisChoice {
    Comp,
    Fourier,
    Both,
}

impl BasisChoice {
    fn bases(self) -> Vec<Basis> {
        match self {
            BasisChoice::Comp => vec![Basis::Computational],
            BasisChoice::Fourier => vec![Basis::Fourier],
            BasisChoice::Both => vec![Basis::Computational, Basis::Fourier],
        }
    }
}

/// Reference state of each scheme, when one is known.
pub fn reference_state(scheme: Scheme, n: usize) -> Result<Option<QuditState>, CliError> {
    Ok(match scheme {
        Scheme::Singlet => Some(singlet_state(n)?),
        Scheme::Dicke => Some(dicke_1n_state(n)?),
        Scheme::SymmetricVariant if n == 2 => Some(dicke_1n_state(2)?),
        Scheme::SymmetricVariant if n == 3 => Some(d3_plus_uniform_reference()),
        Scheme::SymmetricVariant => None,
    })
}

/// The built-in scheme `graph` is equivalent to, up to dot order and a global phase.
pub fn infer_scheme(graph: &SculptingBigraph) -> Option<Scheme> {
    Scheme::ALL.into_iter().find(|s| {
        s.build(graph.n())
            .ok()
            .filter(|b| b.d() == graph.d())
            .and_then(|b| b.relative_phase(graph))
            .is_some()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// A named numeric check. `pass` is always recomputed from `value` and `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let mut check = Check {
            name: name.into(),
            value,
            comparison,
            threshold,
            pass: false,
        };
        check.pass = check.evaluate();
        check
    }

    pub fn evaluate(&self) -> bool {
        self.value.is_finite()
            && match self.comparison {
                Comparison::AtMost => self.value <= self.threshold,
                Comparison::AtLeast => self.value >= self.threshold,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisResult {
    pub basis: BasisName,
    pub fidelity: f64,
    pub phase: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub pair: [usize; 2],
    pub overlap_re: f64,
    pub overlap_im: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub target: Option<String>,
    pub tol: f64,
    pub weight: f64,
    pub residual: f64,
    pub readouts: Vec<BasisResult>,
    pub sign_tests: Vec<SignTest>,
    pub oracle_max_deviation: Option<f64>,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.evaluate())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Rejects reports whose stored verdicts disagree with their numbers.
    pub fn check_consistency(&self) -> Result<(), CliError> {
        for c in &self.checks {
            if c.pass != c.evaluate() {
                return Err(CliError::Malformed(format!("check `{}` has a stale verdict", c.name)));
            }
        }
        if self.pass != self.checks.iter().all(Check::evaluate) {
            return Err(CliError::Malformed("overall verdict disagrees with checks".into()));
        }
        Ok(())
    }
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let ph = r[(j, j)] / r[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub struct VerifyOptions {
    pub scheme: Scheme,
    pub tol: f64,
    pub basis: BasisChoice,
    pub seed: u64,
}

pub fn verify(graph: &SculptingBigraph, opts: &VerifyOptions) -> Result<VerificationReport, CliError> {
    let start = Instant::now();
    let n = graph.n();
    let tol = opts.tol;
    let reference = if graph.d() == n {
        reference_state(opts.scheme, n)?
    } else {
        None
    };
    let mut checks = Vec::new();

    let raw = sculpt(graph)?;
    let weight = raw.norm_sqr();
    checks.push(Check::new("nonzero", weight, Comparison::AtLeast, f64::MIN_POSITIVE));
    let state = if weight > 0.0 { raw.normalize()?.0 } else { raw.clone() };

    let comp = split_qudits(&state, Basis::Computational)?;
    let residual = comp.residual_norm();
    checks.push(Check::new("residual", residual, Comparison::AtMost, tol));

    let mut readouts = Vec::new();
    if let Some(target) = &reference {
        for basis in opts.basis.bases() {
            let label = BasisName::from(basis);
            let tag = label.tag();
            let got = split_qudits(&state, basis)?.state;
            let (fidelity, phase, distance) = if got.norm_sqr() > 0.0 {
                let got = got.normalized()?;
                let cmp = equal_up_to_phase(target, &got, tol)?;
                (cmp.fidelity, cmp.phase, cmp.distance.min(f64::MAX))
            } else {
                (0.0, 0.0, f64::MAX)
            };
            checks.push(Check::new(format!("fidelity_{tag}"), fidelity, Comparison::AtLeast, 1.0 - tol));
            checks.push(Check::new(format!("distance_{tag}"), distance, Comparison::AtMost, tol));
            readouts.push(BasisResult {
                basis: label,
                fidelity,
                phase,
                distance,
            });
        }
    }

    let expected = opts.scheme.exchange_sign();
    let mut sign_tests = Vec::new();
    if weight > 0.0 {
        for j in 0..n {
            for k in j + 1..n {
                let ov = exchange_overlap(&raw, j, k)?;
                let err = (ov - Complex64::new(expected, 0.0)).norm();
                checks.push(Check::new(format!("exchange_{j}_{k}"), err, Comparison::AtMost, tol));
                sign_tests.push(SignTest {
                    pair: [j, k],
                    overlap_re: ov.re,
                    overlap_im: ov.im,
                    expected,
                });
            }
        }
    }

    // graphs using colours outside the two matching labels have no oracle
    let oracle_max_deviation = match state_from_matchings(graph) {
        Ok(oracle) => {
            let dev = raw.max_deviation(&oracle)?;
            checks.push(Check::new("oracle", dev, Comparison::AtMost, tol));
            Some(dev)
        }
        Err(sculpt_core::Error::UnsupportedColor(_)) => None,
        Err(e) => return Err(e.into()),
    };

    if opts.scheme == Scheme::Singlet {
        if let Some(target) = &reference {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let u = random_unitary(n, &mut rng);
            let got = split_qudits(&state, Basis::Computational)?.state;
            let fidelity = if got.norm_sqr() > 0.0 {
                let rotated = collective_unitary(&got.normalized()?, &u)?;
                target.fidelity(&rotated)?
            } else {
                0.0
            };
            checks.push(Check::new("unitary_covariance", fidelity, Comparison::AtLeast, 1.0 - tol));
        }
    }

    let pass = checks.iter().all(Check::evaluate);
    Ok(VerificationReport {
        scheme: opts.scheme.name().to_string(),
        n,
        d: graph.d(),
        target: reference.as_ref().map(|_| opts.scheme.name().to_string()),
        tol,
        weight,
        residual,
        readouts,
        sign_tests,
        oracle_max_deviation,
        checks,
        seconds: start.elapsed().as_secs_f64(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(scheme: Scheme, basis: BasisChoice) -> VerifyOptions {
        VerifyOptions {
            scheme,
            tol: 1e-9,
            basis,
            seed: 1,
        }
    }

    #[test]
    fn builtin_schemes_verify() {
        for scheme in Scheme::ALL {
            for n in [2, 3] {
                let g = scheme.build(n).unwrap();
                assert_eq!(infer_scheme(&g), Some(scheme));
                let r = verify(&g, &opts(scheme, BasisChoice::Fourier)).unwrap();
                assert!(r.pass, "{} N = {n}: {:?}", scheme.name(), r.failing());
                r.check_consistency().unwrap();
            }
        }
    }

    #[test]
    fn dicke_fails_in_computational_readout() {
        let g = Scheme::Dicke.build(3).unwrap();
        let r = verify(&g, &opts(Scheme::Dicke, BasisChoice::Both)).unwrap();
        assert!(!r.pass);
        assert!(r.failing().contains(&"fidelity_comp"));
        assert!(!r.failing().contains(&"fidelity_fourier"));
    }

    #[test]
    fn wrong_target_fails_sign_tests() {
        let g = Scheme::Dicke.build(3).unwrap();
        let r = verify(&g, &opts(Scheme::Singlet, BasisChoice::Fourier)).unwrap();
        assert!(r.failing().iter().any(|c| c.starts_with("exchange_")));
    }

    #[test]
    fn stale_verdicts_are_detected() {
        let g = Scheme::Singlet.build(2).unwrap();
        let mut r = verify(&g, &opts(Scheme::Singlet, BasisChoice::Both)).unwrap();
        r.checks[0].value = -1.0;
        assert!(r.check_consistency().is_err());
    }
}

//! Acceptance suite: one verdict line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use sculpt_cli::formats::CircuitBundle;
use sculpt_cli::report::{simulate_bundle, SimulateOptions};
use sculpt_core::circuit::{
    circuit_input, compile_bigraph, fidelity_increasing, fidelity_sweep, simulate,
    SimulationOptions,
};
use sculpt_core::fock::{tilde_superposition, Basis, FockBasisState, ModeLayout, SparseState};
use sculpt_core::sculpt::{exchange_overlap, sculpt, state_from_matchings, Scheme};
use sculpt_core::targets::{
    dicke_1n_state, equal_up_to_phase, extract_qudits, singlet_state, QuditState,
};

const TOL: f64 = 1e-9;

type Criterion = Box<dyn FnOnce(&mut Vec<(String, f64)>) -> Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn collapse_identity() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        let layout = ModeLayout::new(1, d, 0).unwrap();
        let red = tilde_superposition(&layout, 0, 0).unwrap();
        let blue = tilde_superposition(&layout, 0, d - 1).unwrap();
        for l in 0..d {
            let mut lhs = SparseState::basis(layout, FockBasisState::new(vec![1; d])).unwrap();
            for _ in 0..d - 1 - l {
                lhs = lhs.apply_superposition(&blue, false).unwrap();
            }
            for _ in 0..l {
                lhs = lhs.apply_superposition(&red, false).unwrap();
            }
            let sign = if (d - 1 - l) % 2 == 0 { 1.0 } else { -1.0 };
            let factor = sign * fact(l) * fact(d - 1 - l) / (d as f64).sqrt().powi(d as i32 - 2);
            let rhs = SparseState::vacuum(layout)
                .apply_superposition(&tilde_superposition(&layout, 0, d - 1 - l).unwrap(), true)
                .unwrap()
                .scaled(Complex64::new(factor, 0.0));
            worst = worst.max(lhs.max_deviation(&rhs).unwrap());
        }
    }
    let elapsed = start.elapsed();
    Verdict::new(
        worst < 1e-10 && elapsed < Duration::from_secs(1),
        format!("max deviation {worst:.2e} over d = 2..5, {elapsed:.2?}"),
    )
}

struct SchemeRun {
    fidelity: f64,
    worst_exchange: f64,
    residual: f64,
    elapsed: Duration,
}

fn run_scheme(scheme: Scheme, n: usize, target: &QuditState, basis: Basis) -> SchemeRun {
    let start = Instant::now();
    let raw = sculpt(&scheme.build(n).unwrap()).unwrap();
    let (state, _) = raw.normalize().unwrap();
    let ex = extract_qudits(&state, basis, TOL).unwrap();
    let got = ex.state.normalized().unwrap();
    let fidelity = equal_up_to_phase(target, &got, TOL).unwrap().fidelity;
    let expected = Complex64::new(scheme.exchange_sign(), 0.0);
    let mut worst_exchange: f64 = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            worst_exchange = worst_exchange.max((exchange_overlap(&raw, j, k).unwrap() - expected).norm());
        }
    }
    SchemeRun {
        fidelity,
        worst_exchange,
        residual: ex.residual_norm(),
        elapsed: start.elapsed(),
    }
}

fn generation(scheme: Scheme, residuals: &mut Vec<(String, f64)>) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let (target, basis) = match scheme {
            Scheme::Singlet => (singlet_state(n).unwrap(), Basis::Computational),
            _ => (dicke_1n_state(n).unwrap(), Basis::Fourier),
        };
        let run = run_scheme(scheme, n, &target, basis);
        let limit = match (scheme, n) {
            (Scheme::Singlet, 3) => Some(Duration::from_secs(1)),
            (Scheme::Singlet, 4) => Some(Duration::from_secs(60)),
            _ => None,
        };
        pass &= run.fidelity >= 1.0 - TOL && run.worst_exchange <= TOL;
        pass &= limit.is_none_or(|l| run.elapsed < l);
        residuals.push((format!("{} N={n}", scheme.name()), run.residual));
        parts.push(format!(
            "N={n}: 1-F {:.1e}, exchange err {:.1e}, {:.2?}",
            1.0 - run.fidelity,
            run.worst_exchange,
            run.elapsed
        ));
    }
    Verdict::new(pass, parts.join("; "))
}

fn symmetric_variant() -> Verdict {
    let raw = sculpt(&Scheme::SymmetricVariant.build(3).unwrap()).unwrap();
    let (state, _) = raw.normalize().unwrap();
    let got = extract_qudits(&state, Basis::Fourier, TOL).unwrap().state;
    let support = got.support(TOL);
    let mut labels: Vec<Vec<usize>> = support.iter().map(|(l, _)| l.clone()).collect();
    labels.sort();
    let mut expected: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
        vec![1, 1, 1],
    ];
    expected.sort();
    let mods: Vec<f64> = support.iter().map(|(_, a)| a.norm()).collect();
    let max = mods.iter().copied().fold(f64::MIN, f64::max);
    let min = mods.iter().copied().fold(f64::MAX, f64::min);
    let ratio_err = max / min - 1.0;
    Verdict::new(
        labels == expected && ratio_err <= TOL,
        format!("{} terms, max modulus ratio - 1 = {ratio_err:.1e}", labels.len()),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    for scheme in Scheme::ALL {
        for n in 2..=4 {
            let graph = scheme.build(n).unwrap();
            let dev = sculpt(&graph)
                .unwrap()
                .max_deviation(&state_from_matchings(&graph).unwrap())
                .unwrap();
            worst = worst.max(dev);
        }
    }
    Verdict::new(worst <= TOL, format!("max term deviation {worst:.2e} (3 schemes, N = 2..4)"))
}

fn support_property(residuals: &[(String, f64)]) -> Verdict {
    let (name, worst) = residuals
        .iter()
        .cloned()
        .fold((String::new(), 0.0), |acc, (k, v)| if v >= acc.1 { (k, v) } else { acc });
    Verdict::new(
        !residuals.is_empty() && worst < TOL,
        format!("largest bunched residual {worst:.2e} ({name})"),
    )
}

fn circuit_convergence() -> Verdict {
    let rs = [0.2, 0.1, 0.05];
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        for scheme in [Scheme::Singlet, Scheme::Dicke] {
            let start = Instant::now();
            let rows = fidelity_sweep(&scheme.build(n).unwrap(), &rs).unwrap();
            let elapsed = start.elapsed();
            let last = rows.iter().find(|r| r.reflectivity == 0.05).unwrap().fidelity;
            let increasing = fidelity_increasing(&rows, 1e-12);
            pass &= increasing && last >= 0.999 && elapsed < Duration::from_secs(300);
            let fids: Vec<String> = rows.iter().map(|r| format!("{:.10}", r.fidelity)).collect();
            parts.push(format!("{} N={n} F=[{}] {elapsed:.2?}", scheme.name(), fids.join(", ")));
        }
    }
    for scheme in Scheme::ALL {
        let circuit = compile_bigraph(&scheme.build(2).unwrap(), 0.2).unwrap();
        let options = SimulationOptions {
            all_outcomes: true,
            target: None,
        };
        let result = simulate(&circuit, &circuit_input(&circuit).unwrap(), &options).unwrap();
        let total: f64 = result.outcomes.unwrap().iter().map(|o| o.probability).sum();
        pass &= (total - 1.0).abs() <= 1e-8;
        parts.push(format!("{} N=2 outcome sum - 1 = {:.1e}", scheme.name(), total - 1.0));
    }
    Verdict::new(pass, parts.join("; "))
}

fn probability_reporting() -> Verdict {
    let graph = Scheme::Singlet.build(3).unwrap();
    let bundle = CircuitBundle {
        circuit: compile_bigraph(&graph, 0.1).unwrap(),
        reflectivity: Some(0.1),
        graph: Some(graph),
    };
    let report = simulate_bundle(
        &bundle,
        &SimulateOptions {
            sweep: None,
            outcomes: false,
        },
    )
    .unwrap();
    let run = &report.runs[0];
    let weight = report.ideal.as_ref().map(|i| i.weight).unwrap_or(0.0);
    let has = |e: &str| report.references.iter().any(|r| r.expression == e);
    let dev = run.permanent_deviation.unwrap_or(f64::INFINITY);
    let pass = weight > 0.0
        && run.probability > 0.0
        && has("2*sqrt(6)/3^8")
        && has("N!*sqrt(N!)/(N^N)^N")
        && dev <= 1e-12;
    let refs: Vec<String> = report
        .references
        .iter()
        .map(|r| format!("{} = {:.6e}", r.expression, r.value))
        .collect();
    Verdict::new(
        pass,
        format!(
            "weight {weight:.6e}, p(r=0.1) {:.6e}, |p - p_perm| {dev:.1e}; references {}",
            run.probability,
            refs.join(", ")
        ),
    )
}

fn main() {
    let mut residuals = Vec::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 single-mode collapse identity", Box::new(|_| collapse_identity())),
        ("2 singlet generation", Box::new(|r| generation(Scheme::Singlet, r))),
        ("3 Dicke generation", Box::new(|r| generation(Scheme::Dicke, r))),
        ("4 symmetric variant N=3", Box::new(|_| symmetric_variant())),
        ("5 matching oracle equivalence", Box::new(|_| oracle_equivalence())),
        ("6 support property", Box::new(|r| support_property(r))),
        ("7 circuit convergence", Box::new(|_| circuit_convergence())),
        ("8 probability reporting", Box::new(|_| probability_reporting())),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let verdict = check(&mut residuals);
        if !verdict.pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail
        );
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

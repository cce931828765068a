use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sculpt_core::fock::{Basis, FockBasisState, ModeLayout, SparseState};
use sculpt_core::targets::{
    collective_unitary, dft_matrix, dicke_1n_state, equal_up_to_phase, singlet_state,
    split_qudits, unitarity_deviation, QuditState,
};

/// Ginibre matrix orthonormalised by QR, with the R diagonal phases folded back in.
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

fn random_state(n: usize, d: usize, rng: &mut ChaCha8Rng) -> QuditState {
    let amps = (0..d.pow(n as u32))
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    QuditState::new(n, d, amps, Basis::Computational).unwrap()
}

#[test]
fn singlet_is_invariant_under_collective_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [2, 3] {
        let s = singlet_state(n).unwrap();
        for _ in 0..20 {
            let u = random_unitary(n, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-12);
            let rotated = collective_unitary(&s, &u).unwrap();
            let cmp = equal_up_to_phase(&s, &rotated, 1e-9).unwrap();
            assert!(cmp.fidelity >= 1.0 - 1e-9);
            let det = u.determinant();
            assert!((Complex64::from_polar(1.0, cmp.phase) - det).norm() < 1e-9);
        }
    }
}

#[test]
fn dft_multiplies_singlet_by_its_determinant() {
    for n in 2..=4 {
        let s = singlet_state(n).unwrap();
        let f = dft_matrix(n);
        let cmp = equal_up_to_phase(&s, &collective_unitary(&s, &f).unwrap(), 1e-9).unwrap();
        assert!(cmp.equal);
        assert!((Complex64::from_polar(1.0, cmp.phase) - f.determinant()).norm() < 1e-9);
    }
}

#[test]
fn dicke_is_not_dft_invariant() {
    let s = dicke_1n_state(3).unwrap();
    let rotated = collective_unitary(&s, &dft_matrix(3)).unwrap();
    assert!(!equal_up_to_phase(&s, &rotated, 1e-9).unwrap().equal);
}

#[test]
fn phase_equality_is_an_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let a = random_state(2, 3, &mut rng);
        let b = a.scaled(Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)));
        let c = b.scaled(Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)));
        assert!(equal_up_to_phase(&a, &a, 1e-12).unwrap().equal);
        let ab = equal_up_to_phase(&a, &b, 1e-9).unwrap();
        let ba = equal_up_to_phase(&b, &a, 1e-9).unwrap();
        assert!(ab.equal && ba.equal);
        assert!((Complex64::from_polar(1.0, ab.phase + ba.phase) - 1.0).norm() < 1e-9);
        assert!(equal_up_to_phase(&b, &c, 1e-9).unwrap().equal);
        assert!(equal_up_to_phase(&a, &c, 1e-9).unwrap().equal);
        let other = random_state(2, 3, &mut rng);
        assert!(!equal_up_to_phase(&a, &other, 1e-9).unwrap().equal);
    }
}

#[test]
fn extraction_splits_the_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let layout = ModeLayout::new(2, 2, 1).unwrap();
    for _ in 0..20 {
        let terms = (0..8).map(|_| {
            let occ: Vec<u8> = (0..5).map(|_| rng.gen_range(0..2)).collect();
            (
                FockBasisState::new(occ),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        });
        let state = SparseState::from_terms(layout, terms).unwrap();
        for basis in [Basis::Computational, Basis::Fourier] {
            let split = split_qudits(&state, basis).unwrap();
            let total = split.state.norm_sqr() + split.residual_norm_sqr;
            assert!((total - state.norm_sqr()).abs() < 1e-12);
        }
    }
}

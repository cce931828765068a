//! Reference qudit states and extraction of qudits from Fock states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{root_of_unity, Basis, SparseState};
use crate::{Error, Result};

/// Dense amplitudes over `{0..d-1}^N`, first qudit most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    n: usize,
    d: usize,
    amplitudes: Vec<Complex64>,
    basis: Basis,
}

impl QuditState {
    pub fn new(n: usize, d: usize, amplitudes: Vec<Complex64>, basis: Basis) -> Result<Self> {
        let expected = d
            .checked_pow(n as u32)
            .ok_or_else(|| Error::InvalidLayout(format!("d^N overflows for N={n}, d={d}")))?;
        if amplitudes.len() != expected {
            return Err(Error::InvalidLayout(format!(
                "{} amplitudes for d^N = {expected}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidLayout("non-finite amplitude".into()));
        }
        Ok(Self {
            n,
            d,
            amplitudes,
            basis,
        })
    }

    pub fn zeros(n: usize, d: usize, basis: Basis) -> Self {
        Self {
            n,
            d,
            amplitudes: vec![Complex64::default(); d.pow(n as u32)],
            basis,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn index_of(&self, labels: &[usize]) -> usize {
        labels.iter().fold(0, |acc, &l| acc * self.d + l)
    }

    pub fn labels_of(&self, mut index: usize) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for slot in labels.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
        labels
    }

    pub fn amplitude(&self, labels: &[usize]) -> Complex64 {
        self.amplitudes[self.index_of(labels)]
    }

    /// Nonzero `(labels, amplitude)` pairs above `tol`, in lexicographic order.
    pub fn support(&self, tol: f64) -> Vec<(Vec<usize>, Complex64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, &a)| (self.labels_of(i), a))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
            ..self.clone()
        })
    }

    fn check_same_shape(&self, other: &QuditState) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(self.n, self.d, other.n, other.d));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuditState) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`.
    pub fn fidelity(&self, other: &QuditState) -> Result<f64> {
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok((self.inner(other)?.norm_sqr() / denom).min(1.0))
    }

    /// Moves qudit `i` to position `perm[i]`.
    pub fn permute_qudits(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n
            || perm
                .iter()
                .any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidLayout("qudit permutation is invalid".into()));
        }
        let mut out = vec![Complex64::default(); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let labels = self.labels_of(i);
            let mut moved = vec![0; self.n];
            for (q, &l) in labels.iter().enumerate() {
                moved[perm[q]] = l;
            }
            out[self.index_of(&moved)] = a;
        }
        Ok(Self {
            amplitudes: out,
            ..self.clone()
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm; parity flips with every swap
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    out.push((perm.clone(), odd));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            odd = !odd;
            out.push((perm.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn permutation_state(n: usize, signed: bool) -> Result<QuditState> {
    if n < 2 {
        return Err(Error::InvalidLayout(format!("need N >= 2, got {n}")));
    }
    let mut state = QuditState::zeros(n, n, Basis::Computational);
    let perms = permutations(n);
    let amp = 1.0 / (perms.len() as f64).sqrt();
    for (perm, odd) in perms {
        let idx = state.index_of(&perm);
        let sign = if signed && odd { -1.0 } else { 1.0 };
        state.amplitudes[idx] = Complex64::new(sign * amp, 0.0);
    }
    Ok(state)
}

/// Totally antisymmetric `N`-qudit state, `d = N`.
pub fn singlet_state(n: usize) -> Result<QuditState> {
    permutation_state(n, true)
}

/// Equal superposition of all permutations of `(0, ..., N-1)`.
pub fn dicke_1n_state(n: usize) -> Result<QuditState> {
    permutation_state(n, false)
}

/// Qutrit tripartite Dicke state: the six permutations of `012` plus `2|111>`, normalised.
pub fn d33_reference() -> QuditState {
    let mut state = permutation_state(3, false).expect("N = 3");
    let unnormalized: Vec<Complex64> = state
        .amplitudes
        .iter()
        .map(|a| if a.norm() > 0.0 { Complex64::new(1.0, 0.0) } else { *a })
        .collect();
    state.amplitudes = unnormalized;
    let idx = state.index_of(&[1, 1, 1]);
    state.amplitudes[idx] = Complex64::new(2.0, 0.0);
    state.normalized().expect("nonzero")
}

/// Permutations of `012` plus `|111>` with equal weights, normalised.
pub fn d3_plus_uniform_reference() -> QuditState {
    let mut state = d33_reference();
    let idx = state.index_of(&[1, 1, 1]);
    state.amplitudes[idx] = state.amplitudes[state.index_of(&[0, 1, 2])];
    state.normalized().expect("nonzero")
}

/// `F_{l s} = omega^(l s) / sqrt(d)`, mapping computational rail labels to Fourier labels.
pub fn dft_matrix(d: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |l, s| root_of_unity((l * s) as i64, d) * scale)
}

/// Largest entry of `U^dagger U - I`.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let product = u.adjoint() * u;
    let n = u.ncols();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Applies `U` to every qudit.
pub fn collective_unitary(state: &QuditState, u: &DMatrix<Complex64>) -> Result<QuditState> {
    let d = state.d;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(state.n, d, state.n, u.nrows()));
    }
    let dev = unitarity_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    let mut amps = state.amplitudes.clone();
    let total = amps.len();
    for q in 0..state.n {
        let stride = d.pow((state.n - 1 - q) as u32);
        let mut next = vec![Complex64::default(); total];
        for (idx, &a) in amps.iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            let s = (idx / stride) % d;
            let base = idx - s * stride;
            for l in 0..d {
                next[base + l * stride] += u[(l, s)] * a;
            }
        }
        amps = next;
    }
    Ok(QuditState {
        amplitudes: amps,
        ..state.clone()
    })
}

/// One-photon-per-mode part of a Fock state, read as qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    /// Unnormalised qudit amplitudes.
    pub state: QuditState,
    /// Squared norm carried by terms that are not one-photon-per-mode.
    pub residual_norm_sqr: f64,
}

impl Extraction {
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm_sqr.sqrt()
    }
}

/// Splits a Fock state into its one-photon-per-spatial-mode sector, read in
/// `basis`, and the squared norm of everything else (bunched terms and
/// ancilla photons).
pub fn split_qudits(state: &SparseState, basis: Basis) -> Result<Extraction> {
    let layout = state.layout();
    let n = layout.spatial_count();
    let d = layout.internal_dim();
    let mut qudits = QuditState::zeros(n, d, Basis::Computational);
    let mut residual = 0.0;
    'terms: for (basis_state, amp) in state.iter() {
        let occ = basis_state.occupations();
        if occ[layout.system_rails()..].iter().any(|&x| x > 0) {
            residual += amp.norm_sqr();
            continue;
        }
        let mut idx = 0;
        for j in 0..n {
            let block = basis_state.spatial_block(layout, j);
            let mut label = None;
            for (s, &count) in block.iter().enumerate() {
                match (count, label) {
                    (0, _) => {}
                    (1, None) => label = Some(s),
                    _ => {
                        residual += amp.norm_sqr();
                        continue 'terms;
                    }
                }
            }
            match label {
                Some(s) => idx = idx * d + s,
                None => {
                    residual += amp.norm_sqr();
                    continue 'terms;
                }
            }
        }
        qudits.amplitudes[idx] += amp;
    }
    let qudits = match basis {
        Basis::Computational => qudits,
        Basis::Fourier => {
            // a_s^dagger = sum_l F_{l s} a_{l~}^dagger
            let mut f = collective_unitary(&qudits, &dft_matrix(d))?;
            f.basis = Basis::Fourier;
            f
        }
    };
    Ok(Extraction {
        state: qudits,
        residual_norm_sqr: residual,
    })
}

/// As [`split_qudits`], but requires `N` photons and a residual norm at most `tol`.
pub fn extract_qudits(state: &SparseState, basis: Basis, tol: f64) -> Result<Extraction> {
    let n = state.layout().spatial_count() as u32;
    match state.photon_count() {
        Some(count) if count == n => {}
        Some(count) => return Err(Error::PhotonCount { expected: n, found: count }),
        None if state.is_zero() => return Err(Error::ZeroState),
        None => {
            return Err(Error::PhotonCount {
                expected: n,
                found: state.terms().keys().map(|k| k.photon_count()).max().unwrap_or(0),
            })
        }
    }
    let extraction = split_qudits(state, basis)?;
    if extraction.residual_norm() > tol {
        return Err(Error::ResidualTooLarge {
            residual: extraction.residual_norm(),
            tol,
        });
    }
    Ok(extraction)
}

/// Result of a phase-insensitive comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComparison {
    pub equal: bool,
    /// `theta` with `b ~ exp(i theta) a`, in `(-pi, pi]`.
    pub phase: f64,
    pub fidelity: f64,
    /// `|| b - exp(i theta) a ||`.
    pub distance: f64,
}

/// Tests `b = exp(i theta) a` within `tol` (Euclidean distance). The phase is
/// read off the largest-modulus component of `b`, first in lexicographic order
/// on ties.
pub fn equal_up_to_phase(a: &QuditState, b: &QuditState, tol: f64) -> Result<PhaseComparison> {
    a.check_same_shape(b)?;
    let fidelity = a.fidelity(b)?;
    let mut reference = 0;
    let mut best = -1.0;
    for (i, amp) in b.amplitudes.iter().enumerate() {
        if amp.norm() > best {
            best = amp.norm();
            reference = i;
        }
    }
    let ar = a.amplitudes[reference];
    if ar.norm() == 0.0 {
        return Ok(PhaseComparison {
            equal: false,
            phase: 0.0,
            fidelity,
            distance: f64::INFINITY,
        });
    }
    let phase = (b.amplitudes[reference] / ar).arg();
    let rot = Complex64::from_polar(1.0, phase);
    let distance = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (y - rot * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(PhaseComparison {
        equal: distance <= tol,
        phase,
        fidelity,
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasisState, ModeLayout};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn singlet_n2() {
        let s = singlet_state(2).unwrap();
        assert!((s.amplitude(&[0, 1]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0]) + c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(s.support(0.0).len(), 2);
    }

    #[test]
    fn singlet_n3_signs_follow_parity() {
        let s = singlet_state(3).unwrap();
        let a = 1.0 / 6f64.sqrt();
        for (labels, sign) in [
            ([0, 1, 2], 1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([0, 2, 1], -1.0),
            ([2, 1, 0], -1.0),
            ([1, 0, 2], -1.0),
        ] {
            assert!((s.amplitude(&labels) - c(sign * a)).norm() < 1e-15, "{labels:?}");
        }
        assert_eq!(s.support(1e-15).len(), 6);
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert!(singlet_state(1).is_err());
    }

    #[test]
    fn dicke_states() {
        let s = dicke_1n_state(2).unwrap();
        assert!((s.amplitude(&[0, 1]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0]) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        let s = dicke_1n_state(3).unwrap();
        let support = s.support(1e-15);
        assert_eq!(support.len(), 6);
        assert!(support.iter().all(|(_, a)| (a - c(1.0 / 6f64.sqrt())).norm() < 1e-15));
        for perm in [[1, 0, 2], [2, 0, 1], [0, 2, 1]] {
            assert_eq!(s.permute_qudits(&perm).unwrap(), s);
        }
    }

    #[test]
    fn d33_ratio_and_norm() {
        let s = d33_reference();
        let ratio = s.amplitude(&[1, 1, 1]) / s.amplitude(&[0, 1, 2]);
        assert!((ratio - c(2.0)).norm() < 1e-14);
        assert!((s.norm() - 1.0).abs() < 1e-14);
        // overlap with the equal-weight 7-term state: (6 + 2) / sqrt(10 * 7)
        let f = s.inner(&d3_plus_uniform_reference()).unwrap();
        assert!((f.re - 8.0 / 70f64.sqrt()).abs() < 1e-14);
        assert!(f.re < 1.0 - 1e-3);
    }

    #[test]
    fn phase_comparison_examples() {
        let x = singlet_state(3).unwrap();
        let y = x.scaled(Complex64::from_polar(1.0, PI / 3.0));
        let cmp = equal_up_to_phase(&x, &y, 1e-12).unwrap();
        assert!(cmp.equal);
        assert!((cmp.phase - PI / 3.0).abs() < 1e-12);
        assert!((cmp.fidelity - 1.0).abs() < 1e-12);

        let cmp = equal_up_to_phase(&x, &dicke_1n_state(3).unwrap(), 1e-9).unwrap();
        assert!(!cmp.equal);
        assert!(cmp.fidelity < 1e-12);

        let z = singlet_state(2).unwrap();
        assert!(matches!(
            equal_up_to_phase(&x, &z, 1e-9),
            Err(Error::DimensionMismatch(..))
        ));
    }

    #[test]
    fn collective_identity_and_norm() {
        let x = dicke_1n_state(3).unwrap();
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert_eq!(collective_unitary(&x, &id).unwrap(), x);
        let f = collective_unitary(&x, &dft_matrix(3)).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-13);
        let bad = DMatrix::from_element(3, 3, c(1.0));
        assert!(matches!(collective_unitary(&x, &bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn fourier_readout_relabels() {
        // a_{0,1~}^dagger a_{1,0~}^dagger |vac> read in the Fourier basis is |1,0>
        let layout = ModeLayout::new(2, 2, 0).unwrap();
        let h = FRAC_1_SQRT_2;
        let terms = [
            (vec![1, 0, 1, 0], c(h * h)),
            (vec![1, 0, 0, 1], c(h * h)),
            (vec![0, 1, 1, 0], c(-h * h)),
            (vec![0, 1, 0, 1], c(-h * h)),
        ]
        .into_iter()
        .map(|(o, a)| (FockBasisState::new(o), a));
        let state = SparseState::from_terms(layout, terms).unwrap();
        let ex = extract_qudits(&state, Basis::Fourier, 1e-12).unwrap();
        assert_eq!(ex.state.basis(), Basis::Fourier);
        assert!((ex.state.amplitude(&[1, 0]) - c(1.0)).norm() < 1e-14);
        assert!(ex.state.support(1e-12).len() == 1);
    }

    #[test]
    fn bunched_state_rejected() {
        let layout = ModeLayout::new(2, 2, 0).unwrap();
        let s = SparseState::basis(layout, FockBasisState::new(vec![1, 1, 1, 1])).unwrap();
        assert!(matches!(
            extract_qudits(&s, Basis::Fourier, 1e-9),
            Err(Error::PhotonCount { .. })
        ));
        let s = SparseState::basis(layout, FockBasisState::new(vec![2, 0, 0, 0])).unwrap();
        match extract_qudits(&s, Basis::Computational, 1e-9) {
            Err(Error::ResidualTooLarge { residual, .. }) => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn split_is_norm_compatible() {
        let layout = ModeLayout::new(2, 3, 0).unwrap();
        let terms = [
            (vec![1, 0, 0, 0, 1, 0], c(0.3)),
            (vec![0, 0, 1, 1, 0, 0], Complex64::new(0.1, -0.4)),
            (vec![2, 0, 0, 0, 0, 0], c(0.5)),
            (vec![0, 1, 1, 0, 0, 0], c(-0.2)),
        ]
        .into_iter()
        .map(|(o, a)| (FockBasisState::new(o), a));
        let s = SparseState::from_terms(layout, terms).unwrap();
        for basis in [Basis::Computational, Basis::Fourier] {
            let ex = split_qudits(&s, basis).unwrap();
            assert!((ex.state.norm_sqr() + ex.residual_norm_sqr - s.norm_sqr()).abs() < 1e-12);
            assert!((ex.residual_norm_sqr - 0.29).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_enumeration_is_complete() {
        for n in 1..=5 {
            let perms = permutations(n);
            let total: usize = (1..=n).product();
            assert_eq!(perms.len(), total);
            let mut sorted: Vec<_> = perms.iter().map(|(p, _)| p.clone()).collect();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), total);
            for (p, odd) in perms {
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                assert_eq!(inversions % 2 == 1, odd);
            }
        }
    }
}

//! Direct-projection amplitudes from matrix permanents.
//!
//! `<m| U |n> = perm(U[rows(m), cols(n)]) / sqrt(prod n! prod m!)`, where
//! `rows(m)` repeats output rail `r` `m_r` times and `cols(n)` likewise for
//! the input. This route never touches the Fock-space simulator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gate::Circuit;
use crate::fock::SparseState;
use crate::targets::QuditState;
use crate::{Error, Result};

/// Ryser's formula with Gray-code subset updates, `O(2^n n)`.
pub fn permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::default(); n];
    let mut total = Complex64::default();
    let mut gray_prev = 0usize;
    for k in 1..(1usize << n) {
        let gray = k ^ (k >> 1);
        let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
        let added = gray & (1 << flipped) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if added {
                *sum += m[(i, flipped)];
            } else {
                *sum -= m[(i, flipped)];
            }
        }
        gray_prev = gray;
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == n as u32 % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn factorial(k: u8) -> f64 {
    (1..=u32::from(k)).map(f64::from).product()
}

/// Heralded, one-photon-per-group output amplitudes of `circuit` on `input`,
/// computed independently of the sparse simulator. Qudit labels index the
/// rail within each output group.
pub fn projected_amplitudes(circuit: &Circuit, input: &SparseState) -> Result<QuditState> {
    if input.layout() != circuit.layout() {
        return Err(Error::LayoutMismatch);
    }
    let layout = circuit.layout();
    let n = layout.spatial_count();
    let d = layout.internal_dim();
    let transfer = circuit.transfer_matrix();
    let herald = circuit.herald_pattern();
    let ancilla_rows: Vec<usize> = herald
        .iter()
        .enumerate()
        .flat_map(|(i, &count)| std::iter::repeat_n(layout.system_rails() + i, count as usize))
        .collect();
    let herald_norm: f64 = herald.iter().map(|&c| factorial(c)).product();

    let mut out = QuditState::zeros(n, d, circuit.output_basis());
    let mut amps = vec![Complex64::default(); d.pow(n as u32)];
    for (basis, &amp_in) in input.iter() {
        let cols: Vec<usize> = basis
            .occupations()
            .iter()
            .enumerate()
            .flat_map(|(r, &k)| std::iter::repeat_n(r, k as usize))
            .collect();
        if cols.len() != n + ancilla_rows.len() {
            continue;
        }
        let in_norm: f64 = basis.occupations().iter().map(|&k| factorial(k)).product();
        let scale = amp_in / (in_norm * herald_norm).sqrt();
        for (idx, slot) in amps.iter_mut().enumerate() {
            let labels = out.labels_of(idx);
            let rows: Vec<usize> = circuit
                .output_groups()
                .iter()
                .zip(&labels)
                .map(|(group, &l)| group[l])
                .chain(ancilla_rows.iter().copied())
                .collect();
            let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| transfer[(rows[i], cols[j])]);
            *slot += permanent(&sub) * scale;
        }
    }
    out = QuditState::new(n, d, amps, out.basis())?;
    Ok(out)
}

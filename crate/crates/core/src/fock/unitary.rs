use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::factorial::{binomial, ln_factorial};

use super::{FockBasis, U2Element};

/// Action of `Omega` on the `l`-photon states of one slot, in the basis
/// `|n_H, l - n_H>` ordered by ascending `n_H`.
///
/// The image of `|n_H, n_V>` is read off from
/// `(O11 a_H^dag + O21 a_V^dag)^{n_H} (O12 a_H^dag + O22 a_V^dag)^{n_V} |0>`
/// normalized by `1/sqrt(n_H! n_V!)`. This is the symmetric power of the full
/// U(2) matrix, phase included.
pub fn slot_unitary(omega: &U2Element, photons: u32) -> DMatrix<Complex64> {
    let m = omega.matrix();
    let (o11, o21, o12, o22) = (m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)]);
    let l = photons as usize;
    let lnf = |k: usize| ln_factorial(k as u64);
    let mut out = DMatrix::zeros(l + 1, l + 1);
    for n_h in 0..=l {
        let n_v = l - n_h;
        // Coefficient of a_H^dag^k a_V^dag^(l - k) in the expanded product.
        let mut coeff = vec![Complex64::new(0.0, 0.0); l + 1];
        for p in 0..=n_h {
            let first =
                o11.powu(p as u32) * o21.powu((n_h - p) as u32) * binomial(n_h as u64, p as u64);
            for q in 0..=n_v {
                let second = o12.powu(q as u32)
                    * o22.powu((n_v - q) as u32)
                    * binomial(n_v as u64, q as u64);
                coeff[p + q] += first * second;
            }
        }
        let ln_in = lnf(n_h) + lnf(n_v);
        for (k, c) in coeff.into_iter().enumerate() {
            let scale = (0.5 * (lnf(k) + lnf(l - k) - ln_in)).exp();
            out[(k, n_h)] = c * scale;
        }
    }
    out
}

/// `U(Omega)^{⊗N}` restricted to `basis`.
///
/// Photon numbers per slot are conserved, so the matrix is block diagonal
/// over slot-occupancy patterns and each element is a product of per-slot
/// amplitudes.
pub fn collective_unitary(omega: &U2Element, basis: &FockBasis) -> DMatrix<Complex64> {
    let dim = basis.len();
    let mut groups: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    let mut max_l = 0;
    for i in 0..dim {
        let totals = basis.slot_totals(i);
        max_l = max_l.max(totals.iter().copied().max().unwrap_or(0));
        groups.entry(totals).or_default().push(i);
    }
    let slot_mats: Vec<DMatrix<Complex64>> = (0..=max_l).map(|l| slot_unitary(omega, l)).collect();
    let mut u = DMatrix::zeros(dim, dim);
    for (totals, members) in &groups {
        for &col in members {
            let input = basis.state(col);
            for &row in members {
                let output = basis.state(row);
                let mut amp = Complex64::new(1.0, 0.0);
                for (s, &l) in totals.iter().enumerate() {
                    amp *= slot_mats[l as usize][(output[2 * s] as usize, input[2 * s] as usize)];
                }
                u[(row, col)] = amp;
            }
        }
    }
    u
}

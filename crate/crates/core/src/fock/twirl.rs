use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use super::{
    collective_unitary, noiseless_basis, stream, DensityOperator, DimGuard, FockBasis, HaarSampler,
};
use crate::error::{Error, Result};
use crate::multiplicity::multiplicity;
use crate::spin::{OccupancyMode, SectorKey, SpinLabel};

/// Samples per Monte Carlo work unit. Partial sums are combined in chunk
/// order, so the result is independent of the thread count.
const CHUNK: usize = 64;

/// `(1/M) sum_i U(Omega_i) rho U(Omega_i)^dag` over `M` Haar samples drawn
/// from `seed`.
pub fn twirl_monte_carlo(
    rho: &DensityOperator,
    samples: usize,
    seed: u64,
) -> Result<DensityOperator> {
    if samples == 0 {
        return Err(Error::domain("Monte Carlo twirl needs at least one sample"));
    }
    let basis = rho.basis();
    let sampler = HaarSampler::new(seed, stream::TWIRL);
    let n = basis.len();
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<DMatrix<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = DMatrix::zeros(n, n);
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let u = collective_unitary(&sampler.sample(i as u64), basis);
                acc += &u * rho.matrix() * u.adjoint();
            }
            acc
        })
        .collect();
    let mut sum = DMatrix::zeros(n, n);
    for p in &partial {
        sum += p;
    }
    sum /= Complex64::from(samples as f64);
    let mut out = (&sum + sum.adjoint()) * Complex64::from(0.5);
    let (target, got) = (rho.trace().re, out.trace().re);
    if got != 0.0 {
        out *= Complex64::from(target / got);
    }
    DensityOperator::new(Arc::clone(basis), out)
}

#[derive(Clone, Debug)]
struct SectorFrame {
    key: SectorKey,
    logical: usize,
    gauge: usize,
    /// Noiseless-basis vectors embedded in the twirled basis, column
    /// `k * gauge + g`.
    frame: DMatrix<Complex64>,
}

/// Exact Haar twirl over a basis made of whole photon-number sectors.
///
/// Averaging over U(2) removes every coherence between different `(L, j)`
/// sectors and, inside a sector, replaces the gauge factor by its maximally
/// mixed state while keeping the logical reduced operator.
#[derive(Clone, Debug)]
pub struct ExactTwirl {
    basis: Arc<FockBasis>,
    sectors: Vec<SectorFrame>,
}

impl ExactTwirl {
    pub fn new(basis: Arc<FockBasis>, guard: DimGuard) -> Result<Self> {
        let mode = basis.mode();
        let n_slots = basis.n_slots();
        let range = basis.photons();
        let mut sectors = Vec::new();
        let mut covered = 0usize;
        for l in range.min()..=range.max() {
            if mode == OccupancyMode::Restricted && l > n_slots {
                break;
            }
            for spin in SpinLabel::allowed_descending(l) {
                let key = SectorKey::new(n_slots, l, spin)?;
                if multiplicity(key, mode)?.is_zero() {
                    continue;
                }
                let nb = noiseless_basis(key, mode, guard)?;
                let local = nb.frame();
                let mut frame = DMatrix::zeros(basis.len(), local.ncols());
                for (r, occ) in nb.basis().states().iter().enumerate() {
                    let row = basis
                        .index_of(occ)
                        .ok_or_else(|| Error::domain("twirl basis does not cover whole sectors"))?;
                    frame.row_mut(row).copy_from(&local.row(r));
                }
                covered += local.ncols();
                sectors.push(SectorFrame {
                    key,
                    logical: nb.logical_dim(),
                    gauge: nb.gauge_dim(),
                    frame,
                });
            }
        }
        if covered != basis.len() {
            return Err(Error::domain(format!(
                "sector frames span {covered} of {} basis states",
                basis.len()
            )));
        }
        Ok(ExactTwirl { basis, sectors })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Sector labels in the order they are processed.
    pub fn sectors(&self) -> impl Iterator<Item = SectorKey> + '_ {
        self.sectors.iter().map(|s| s.key)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if **rho.basis() != *self.basis {
            return Err(Error::domain("density operator lives on a different basis"));
        }
        let n = self.basis.len();
        let mut out = DMatrix::zeros(n, n);
        for s in &self.sectors {
            let block = s.frame.adjoint() * rho.matrix() * &s.frame;
            let d = s.gauge;
            let scale = Complex64::from(1.0 / d as f64);
            let mut twirled = DMatrix::zeros(s.logical * d, s.logical * d);
            for a in 0..s.logical {
                for b in 0..s.logical {
                    let reduced: Complex64 = (0..d).map(|g| block[(a * d + g, b * d + g)]).sum();
                    for g in 0..d {
                        twirled[(a * d + g, b * d + g)] = reduced * scale;
                    }
                }
            }
            out += &s.frame * twirled * s.frame.adjoint();
        }
        DensityOperator::new(Arc::clone(&self.basis), out)
    }
}

/// Exact twirl of `rho`; builds the sector frames on every call. Use
/// [`ExactTwirl`] directly to reuse them.
pub fn twirl_exact(rho: &DensityOperator, guard: DimGuard) -> Result<DensityOperator> {
    ExactTwirl::new(Arc::clone(rho.basis()), guard)?.apply(rho)
}

/// Per-sample outcome of sending an encoded logical state through the
/// channel.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub sector: SectorKey,
    pub mode: OccupancyMode,
    pub seed: u64,
    /// `<psi| rho_logical |psi>` after decoding, one per sample.
    pub fidelities: Vec<f64>,
    /// Norm of the output component outside the sector frame, one per sample.
    pub leakage: Vec<f64>,
}

impl FidelityReport {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelities
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn mean_fidelity(&self) -> f64 {
        self.fidelities.iter().sum::<f64>() / self.fidelities.len() as f64
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }
}

/// Encodes `logical_state` with the top gauge vector, applies one collective
/// unitary per Haar sample, decodes by tracing out the gauge factor and
/// reports the fidelity with the input.
pub fn logical_fidelity_check(
    key: SectorKey,
    mode: OccupancyMode,
    logical_state: &DVector<Complex64>,
    samples: usize,
    seed: u64,
    guard: DimGuard,
) -> Result<FidelityReport> {
    let nb = noiseless_basis(key, mode, guard)?;
    let norm = logical_state.norm();
    if norm == 0.0 {
        return Err(Error::domain("logical state is zero"));
    }
    let psi = logical_state / Complex64::from(norm);
    let encoded = nb.encode(&psi, 0)?;
    let frame = nb.frame();
    let sampler = HaarSampler::new(seed, stream::FIDELITY);
    let results: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = collective_unitary(&sampler.sample(i as u64), nb.basis());
            let out = &u * encoded.amplitudes();
            let rho_logical = nb.decode(&out);
            let fidelity = (psi.adjoint() * &rho_logical * &psi)[(0, 0)].re;
            let leakage = (&out - &frame * (frame.adjoint() * &out)).norm();
            (fidelity, leakage)
        })
        .collect();
    let (fidelities, leakage) = results.into_iter().unzip();
    Ok(FidelityReport {
        sector: key,
        mode,
        seed,
        fidelities,
        leakage,
    })
}

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{DimGuard, FockBasis, StateVector};
use crate::error::{Error, Result};
use crate::spin::{OccupancyMode, SectorKey};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// `J_+ = sum_s a_{s,H}^dag a_{s,V}` applied to a vector over `basis`.
pub fn apply_raising(basis: &FockBasis, v: &DVector<Complex64>) -> DVector<Complex64> {
    ladder(basis, v, true)
}

/// `J_- = sum_s a_{s,V}^dag a_{s,H}` applied to a vector over `basis`.
pub fn apply_lowering(basis: &FockBasis, v: &DVector<Complex64>) -> DVector<Complex64> {
    ladder(basis, v, false)
}

fn ladder(basis: &FockBasis, v: &DVector<Complex64>, raise: bool) -> DVector<Complex64> {
    let mut out = DVector::zeros(basis.len());
    let mut occ = Vec::new();
    for (i, amp) in v.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        for_each_ladder_step(basis.state(i), raise, &mut occ, |target, coeff| {
            let j = basis
                .index_of(target)
                .expect("ladder operators preserve photon number and slot occupancy");
            out[j] += amp * coeff;
        });
    }
    out
}

/// Calls `f(target, coefficient)` for every term of `J_±|state>`.
fn for_each_ladder_step(
    state: &[u32],
    raise: bool,
    scratch: &mut Vec<u32>,
    mut f: impl FnMut(&[u32], f64),
) {
    for s in 0..state.len() / 2 {
        let (n_h, n_v) = (state[2 * s], state[2 * s + 1]);
        let (from, coeff) = if raise {
            (n_v, f64::from((n_h + 1) * n_v))
        } else {
            (n_h, f64::from(n_h * (n_v + 1)))
        };
        if from == 0 {
            continue;
        }
        scratch.clear();
        scratch.extend_from_slice(state);
        if raise {
            scratch[2 * s] += 1;
            scratch[2 * s + 1] -= 1;
        } else {
            scratch[2 * s] -= 1;
            scratch[2 * s + 1] += 1;
        }
        f(scratch, coeff.sqrt());
    }
}

/// Indices of basis states with `2m = twice_m`, i.e. the `J_z = m`
/// eigenspace (the occupation basis diagonalizes `J_z`).
fn weight_space(basis: &FockBasis, twice_m: i64) -> Vec<usize> {
    (0..basis.len())
        .filter(|&i| basis.twice_weight(i) == twice_m)
        .collect()
}

/// Matrix of `J_+` from the weight-`j` space to the weight-`j + 1` space.
fn raising_block(basis: &FockBasis, from: &[usize], to: &[usize]) -> DMatrix<f64> {
    let row_of: HashMap<usize, usize> = to.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut a = DMatrix::zeros(to.len(), from.len());
    let mut scratch = Vec::new();
    for (c, &i) in from.iter().enumerate() {
        for_each_ladder_step(basis.state(i), true, &mut scratch, |target, coeff| {
            let j = basis.index_of(target).expect("raising stays in the sector");
            a[(row_of[&j], c)] += coeff;
        });
    }
    a
}

fn numeric_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_THRESHOLD * max).count()
}

/// Orthonormal basis of `ker a`, one column per null vector.
///
/// The null space comes from a full SVD; its projector is then
/// re-orthonormalized by column-pivoted Gram-Schmidt (largest residual first,
/// lowest index on ties) so the result does not depend on how the SVD
/// happens to rotate degenerate singular vectors.
fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let projector = if a.nrows() == 0 {
        DMatrix::identity(cols, cols)
    } else {
        // A thin SVD of a wide matrix omits part of the null space; pad to square.
        let padded = if a.nrows() < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.rows_mut(0, a.nrows()).copy_from(a);
            p
        } else {
            a.clone()
        };
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let max = svd.singular_values.max();
        let null: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| max == 0.0 || svd.singular_values[i] <= RANK_THRESHOLD * max)
            .collect();
        let mut p = DMatrix::zeros(cols, cols);
        for &i in &null {
            let row = v_t.row(i).transpose();
            p += &row * row.transpose();
        }
        p
    };
    let nullity = projector.trace().round() as usize;
    pivoted_gram_schmidt(&projector, nullity)
}

fn pivoted_gram_schmidt(m: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    let mut residual = m.clone();
    let mut q = DMatrix::zeros(m.nrows(), count);
    let mut used = vec![false; m.ncols()];
    for k in 0..count {
        let (pivot, _) = (0..m.ncols())
            .filter(|&c| !used[c])
            .map(|c| (c, residual.column(c).norm()))
            .fold(
                (usize::MAX, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        used[pivot] = true;
        let mut v = residual.column(pivot).into_owned();
        // Re-orthogonalize once for stability.
        for j in 0..k {
            let qj = q.column(j);
            let d = qj.dot(&v);
            v -= qj * d;
        }
        v /= v.norm();
        for (c, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
            let d = v.dot(&residual.column(c));
            residual.column_mut(c).axpy(-d, &v, 1.0);
        }
        q.set_column(k, &v);
    }
    q
}

/// Multiplicity of spin `j` in the `(N, L)` sector from operator spectra:
/// the dimension of `ker J_+` inside the `J_z = j` eigenspace.
pub fn sector_multiplicity_numeric(
    key: SectorKey,
    mode: OccupancyMode,
    guard: DimGuard,
) -> Result<usize> {
    key.check_mode(mode)?;
    let basis = FockBasis::sector(key.n_slots(), key.photons(), mode, guard)?;
    let twice_j = i64::from(key.spin().twice());
    let at_j = weight_space(&basis, twice_j);
    let above = weight_space(&basis, twice_j + 2);
    let a = raising_block(&basis, &at_j, &above);
    Ok(at_j.len() - numeric_rank(&a))
}

/// Explicit basis of one isotypic sector as `K` logical copies of a spin-`j`
/// gauge factor.
///
/// `vectors[k][g]` is the `g`-th gauge state of logical state `k`, with `g`
/// running over `m = j, j - 1, ..., -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiselessBasis {
    sector: SectorKey,
    mode: OccupancyMode,
    basis: Arc<FockBasis>,
    vectors: Vec<Vec<StateVector>>,
}

impl NoiselessBasis {
    /// Assembles a basis from parts, checking shapes only.
    pub fn from_parts(
        sector: SectorKey,
        mode: OccupancyMode,
        basis: Arc<FockBasis>,
        vectors: Vec<Vec<StateVector>>,
    ) -> Result<Self> {
        let gauge = sector.spin().dim() as usize;
        if vectors.iter().any(|row| row.len() != gauge) {
            return Err(Error::domain(format!(
                "every logical state needs {gauge} gauge vectors"
            )));
        }
        if vectors
            .iter()
            .flatten()
            .any(|v| !Arc::ptr_eq(v.basis(), &basis) && **v.basis() != *basis)
        {
            return Err(Error::domain("vectors live on a different basis"));
        }
        Ok(NoiselessBasis {
            sector,
            mode,
            basis,
            vectors,
        })
    }

    pub fn sector(&self) -> SectorKey {
        self.sector
    }

    pub fn mode(&self) -> OccupancyMode {
        self.mode
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn logical_dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn gauge_dim(&self) -> usize {
        self.sector.spin().dim() as usize
    }

    pub fn vectors(&self) -> &[Vec<StateVector>] {
        &self.vectors
    }

    pub fn vector(&self, logical: usize, gauge: usize) -> &StateVector {
        &self.vectors[logical][gauge]
    }

    /// `2m` of gauge index `g`.
    pub fn twice_m(&self, gauge: usize) -> i64 {
        i64::from(self.sector.spin().twice()) - 2 * gauge as i64
    }

    /// All vectors as columns, column `k * (2j + 1) + g`.
    pub fn frame(&self) -> DMatrix<Complex64> {
        let cols: Vec<DVector<Complex64>> = self
            .vectors
            .iter()
            .flatten()
            .map(|v| v.amplitudes().clone())
            .collect();
        if cols.is_empty() {
            return DMatrix::zeros(self.basis.len(), 0);
        }
        DMatrix::from_columns(&cols)
    }

    /// `sum_k c_k |k> ⊗ |g>`.
    pub fn encode(&self, logical: &DVector<Complex64>, gauge: usize) -> Result<StateVector> {
        if logical.len() != self.logical_dim() {
            return Err(Error::domain(format!(
                "logical state has dimension {}, expected {}",
                logical.len(),
                self.logical_dim()
            )));
        }
        if gauge >= self.gauge_dim() {
            return Err(Error::domain(format!(
                "gauge index {gauge} out of range 0..{}",
                self.gauge_dim()
            )));
        }
        let mut amps = DVector::zeros(self.basis.len());
        for (k, c) in logical.iter().enumerate() {
            amps += self.vectors[k][gauge].amplitudes() * *c;
        }
        StateVector::new(Arc::clone(&self.basis), amps)
    }

    /// Logical density matrix of a state: project onto the sector frame and
    /// trace out the gauge factor.
    pub fn decode(&self, amplitudes: &DVector<Complex64>) -> DMatrix<Complex64> {
        let k = self.logical_dim();
        let d = self.gauge_dim();
        let coords = self.frame().adjoint() * amplitudes;
        DMatrix::from_fn(k, k, |a, b| {
            (0..d)
                .map(|g| coords[a * d + g] * coords[b * d + g].conj())
                .sum()
        })
    }
}

/// Highest-weight states of `(N, L, j)` from `ker J_+` at `m = j`, each
/// lowered with `J_- / sqrt(j(j + 1) - m(m - 1))` to fill its gauge factor.
pub fn noiseless_basis(
    key: SectorKey,
    mode: OccupancyMode,
    guard: DimGuard,
) -> Result<NoiselessBasis> {
    key.check_mode(mode)?;
    let basis = Arc::new(FockBasis::sector(
        key.n_slots(),
        key.photons(),
        mode,
        guard,
    )?);
    let twice_j = key.spin().twice();
    let at_j = weight_space(&basis, i64::from(twice_j));
    let above = weight_space(&basis, i64::from(twice_j) + 2);
    let kernel = null_space(&raising_block(&basis, &at_j, &above));
    if kernel.ncols() == 0 {
        return Err(Error::EmptySector {
            n_slots: key.n_slots(),
            photons: key.photons(),
            twice_j,
        });
    }
    let tj = f64::from(twice_j);
    let mut vectors = Vec::with_capacity(kernel.ncols());
    for col in kernel.column_iter() {
        let mut top = DVector::zeros(basis.len());
        for (r, &i) in at_j.iter().enumerate() {
            top[i] = Complex64::from(col[r]);
        }
        let mut chain = Vec::with_capacity(twice_j as usize + 1);
        let mut current = top;
        for g in 0..=twice_j {
            if g > 0 {
                // m is the weight being lowered from.
                let tm = tj - 2.0 * f64::from(g - 1);
                let norm = ((tj * (tj + 2.0) - tm * (tm - 2.0)) / 4.0).sqrt();
                current = apply_lowering(&basis, &current) / Complex64::from(norm);
            }
            chain.push(StateVector::new(Arc::clone(&basis), current.clone())?);
        }
        vectors.push(chain);
    }
    Ok(NoiselessBasis {
        sector: key,
        mode,
        basis,
        vectors,
    })
}

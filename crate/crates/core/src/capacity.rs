//! Per-slot capacities of a train with at most one photon per slot.
//!
//! Small trains (`N <= EXACT_LIMIT`) are evaluated with exact integers; larger
//! ones in the log domain. Both paths are public so they can be compared.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::multiplicity::{binomial, restricted_multiplicity};
use crate::spin::{SectorKey, SpinLabel};

/// `log2(3)`: one noiseless qutrit (vacuum, H, V) per slot.
pub const LOG2_3: f64 = 1.584_962_500_721_156_3;

/// Largest `N` evaluated with exact integers.
pub const EXACT_LIMIT: u32 = 64;

/// Smallest `N` used by [`fit_asymptote`].
pub const FIT_MIN_SLOTS: u32 = 100;

/// Fewest points [`fit_asymptote`] accepts.
pub const FIT_MIN_POINTS: usize = 5;

/// Largest `N` accepted by [`capacity_sweep`].
pub const SWEEP_MAX_SLOTS: u32 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityKind {
    Quantum,
    Classical,
}

impl CapacityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CapacityKind::Quantum => "quantum",
            CapacityKind::Classical => "classical",
        }
    }
}

impl fmt::Display for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CapacityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quantum" => Ok(CapacityKind::Quantum),
            "classical" => Ok(CapacityKind::Classical),
            other => Err(Error::parse(
                "capacity kind",
                format!("{other:?}, expected \"quantum\" or \"classical\""),
            )),
        }
    }
}

/// Capacity of an `N`-slot train in bits per slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub n_slots: u32,
    pub kind: CapacityKind,
    pub bits_per_slot: f64,
    /// Mean photon number per slot needed to reach the capacity.
    pub avg_photons_per_slot: f64,
    /// Photon number of the largest subsystem (quantum only).
    pub achieving_photons: Option<u32>,
    /// Spin of the largest subsystem (quantum only).
    pub achieving_spin: Option<SpinLabel>,
}

/// Power-law fit `C_N ≈ limit - amplitude * N^(-exponent)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub limit: f64,
    pub amplitude: f64,
    pub exponent: f64,
    /// Root-mean-square residual of the log-log regression.
    pub residual: f64,
}

/// `log2` of a big integer, accurate to double precision. `-inf` for zero.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top: u64 = (x >> shift)
        .try_into()
        .expect("at most 64 bits after shift");
    (top as f64).log2() + shift as f64
}

fn ln_choose(n: u32, k: u32) -> f64 {
    ln_binomial(u64::from(n), u64::from(k))
}

/// Natural log of the restricted multiplicity, via log-factorials.
fn ln_restricted(n_slots: u32, photons: u32, twice_j: u32) -> f64 {
    let l = photons;
    ln_choose(n_slots, l) + f64::from(twice_j + 1).ln() - f64::from(l + 1).ln()
        + ln_choose(l + 1, (l - twice_j) / 2)
}

/// `log2` of the restricted multiplicity, computed from log-factorials so it
/// stays usable where the exact integer has tens of thousands of bits.
pub fn log2_restricted_multiplicity(key: SectorKey) -> Result<f64> {
    key.check_mode(crate::OccupancyMode::Restricted)?;
    Ok(ln_restricted(key.n_slots(), key.photons(), key.spin().twice()) / std::f64::consts::LN_2)
}

/// `2j` maximizing the qubit-ensemble multiplicity for `L` qubits.
///
/// `K(j) >= K(j - 1)` exactly when `(2j)^2 <= L + 2`, so the multiplicity is
/// unimodal in `j` and the answer is the largest `2j` of the parity of `L`
/// passing that test. Ties resolve to the larger spin.
pub fn best_twice_j(photons: u32) -> u32 {
    let bound = u64::from(photons) + 2;
    let mut t = photons % 2;
    while t + 2 <= photons && u64::from(t + 2).pow(2) <= bound {
        t += 2;
    }
    t
}

fn check_slots(n_slots: u32) -> Result<()> {
    if n_slots == 0 {
        Err(Error::ZeroSlots)
    } else {
        Ok(())
    }
}

/// Logical qubits per slot: `(1/N) log2 max_{L, j} K(N, L, j)`.
///
/// The achieving `(L, j)` breaks ties toward smaller `L`, then larger `j`.
pub fn quantum_capacity(n_slots: u32) -> Result<CapacityPoint> {
    if n_slots <= EXACT_LIMIT {
        quantum_capacity_exact(n_slots)
    } else {
        quantum_capacity_log(n_slots)
    }
}

/// Exhaustive exact search over every `(L, j)`.
pub fn quantum_capacity_exact(n_slots: u32) -> Result<CapacityPoint> {
    check_slots(n_slots)?;
    let mut best: Option<(BigUint, u32, SpinLabel)> = None;
    for l in 0..=n_slots {
        for spin in SpinLabel::allowed_descending(l) {
            let k = restricted_multiplicity(SectorKey::new(n_slots, l, spin)?)?;
            if best.as_ref().is_none_or(|(b, _, _)| k > *b) {
                best = Some((k, l, spin));
            }
        }
    }
    let (k, l, spin) = best.expect("L = 0 always present");
    Ok(quantum_point(n_slots, log2_biguint(&k), l, spin))
}

/// Log-domain search: for each `L` only the best spin is evaluated.
pub fn quantum_capacity_log(n_slots: u32) -> Result<CapacityPoint> {
    check_slots(n_slots)?;
    let mut best = (f64::NEG_INFINITY, 0u32, 0u32);
    for l in 0..=n_slots {
        let t = best_twice_j(l);
        let v = ln_restricted(n_slots, l, t);
        // Floating-point noise must not let a larger L steal an exact tie.
        if !best.0.is_finite() || v > best.0 + 1e-12 * best.0.abs().max(1.0) {
            best = (v, l, t);
        }
    }
    let (ln_k, l, t) = best;
    Ok(quantum_point(
        n_slots,
        ln_k / std::f64::consts::LN_2,
        l,
        SpinLabel::from_twice(t),
    ))
}

fn quantum_point(n_slots: u32, log2_k: f64, photons: u32, spin: SpinLabel) -> CapacityPoint {
    let n = f64::from(n_slots);
    CapacityPoint {
        n_slots,
        kind: CapacityKind::Quantum,
        bits_per_slot: log2_k / n,
        avg_photons_per_slot: f64::from(photons) / n,
        achieving_photons: Some(photons),
        achieving_spin: Some(spin),
    }
}

/// Classical bits per slot: `(1/N) log2 sum_{L, j} K(N, L, j)`.
///
/// The photon average is the mean `L / N` over all distinguishable messages
/// taken uniformly, i.e. weighted by `W_L = sum_j K(N, L, j)`; see
/// [`classical_mean_photons`].
pub fn classical_capacity(n_slots: u32) -> Result<CapacityPoint> {
    if n_slots <= EXACT_LIMIT {
        classical_capacity_exact(n_slots)
    } else {
        classical_capacity_log(n_slots)
    }
}

/// Message weights `W_L` summed exactly over every `j`.
pub fn classical_capacity_exact(n_slots: u32) -> Result<CapacityPoint> {
    check_slots(n_slots)?;
    let mut weights = Vec::with_capacity(n_slots as usize + 1);
    for l in 0..=n_slots {
        let mut w = BigUint::zero();
        for spin in SpinLabel::allowed_descending(l) {
            w += restricted_multiplicity(SectorKey::new(n_slots, l, spin)?)?;
        }
        weights.push(w);
    }
    let total: BigUint = weights.iter().sum();
    let weighted: BigUint = weights
        .iter()
        .enumerate()
        .map(|(l, w)| w * BigUint::from(l))
        .sum();
    let n = f64::from(n_slots);
    let mean_l = if weighted.is_zero() {
        0.0
    } else {
        (log2_biguint(&weighted) - log2_biguint(&total)).exp2()
    };
    Ok(CapacityPoint {
        n_slots,
        kind: CapacityKind::Classical,
        bits_per_slot: log2_biguint(&total) / n,
        avg_photons_per_slot: mean_l / n,
        achieving_photons: None,
        achieving_spin: None,
    })
}

/// Log-sum-exp over `L` with a running maximum.
///
/// Summing the qubit-ensemble multiplicities over `j` telescopes to the
/// central binomial coefficient, so `W_L = C(N, L) C(L, floor(L/2))`.
pub fn classical_capacity_log(n_slots: u32) -> Result<CapacityPoint> {
    check_slots(n_slots)?;
    let ln_weights: Vec<f64> = (0..=n_slots)
        .map(|l| ln_choose(n_slots, l) + ln_choose(l, l / 2))
        .collect();
    let (ln_total, mean_l) = log_sum_exp_with_mean(&ln_weights);
    let n = f64::from(n_slots);
    Ok(CapacityPoint {
        n_slots,
        kind: CapacityKind::Classical,
        bits_per_slot: ln_total / std::f64::consts::LN_2 / n,
        avg_photons_per_slot: mean_l / n,
        achieving_photons: None,
        achieving_spin: None,
    })
}

/// Mean photon number per slot over all classical messages, weighting each
/// `L` by its message count `W_L`.
pub fn classical_mean_photons(n_slots: u32) -> Result<f64> {
    Ok(classical_capacity(n_slots)?.avg_photons_per_slot)
}

/// `ln sum_i exp(x_i)` and the mean index `sum_i i exp(x_i) / sum_i exp(x_i)`.
fn log_sum_exp_with_mean(ln_terms: &[f64]) -> (f64, f64) {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut weighted = 0.0;
    for (i, &x) in ln_terms.iter().enumerate() {
        if x > max {
            let scale = (max - x).exp();
            sum *= scale;
            weighted *= scale;
            max = x;
        }
        let w = (x - max).exp();
        sum += w;
        weighted += i as f64 * w;
    }
    (max + sum.ln(), weighted / sum)
}

pub fn capacity(n_slots: u32, kind: CapacityKind) -> Result<CapacityPoint> {
    match kind {
        CapacityKind::Quantum => quantum_capacity(n_slots),
        CapacityKind::Classical => classical_capacity(n_slots),
    }
}

/// One point per grid entry, computed in parallel. Each point is evaluated
/// independently in a fixed order, so results do not depend on thread count.
pub fn capacity_sweep(n_grid: &[u32], kind: CapacityKind) -> Result<Vec<CapacityPoint>> {
    if n_grid.is_empty() {
        return Err(Error::domain("capacity grid is empty"));
    }
    if n_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("capacity grid must be sorted ascending"));
    }
    if let Some(&top) = n_grid.last().filter(|&&n| n > SWEEP_MAX_SLOTS) {
        return Err(Error::domain(format!(
            "grid value {top} exceeds the sweep limit {SWEEP_MAX_SLOTS}"
        )));
    }
    n_grid.par_iter().map(|&n| capacity(n, kind)).collect()
}

/// Powers of two times `start` up to `stop` inclusive.
pub fn geometric_grid(start: u32, stop: u32) -> Result<Vec<u32>> {
    if start == 0 || stop < start {
        return Err(Error::domain(format!(
            "geometric grid needs 1 <= start <= stop, got {start}..{stop}"
        )));
    }
    let mut grid = Vec::new();
    let mut n = start;
    loop {
        grid.push(n);
        match n.checked_mul(2) {
            Some(next) if next <= stop => n = next,
            _ => break,
        }
    }
    Ok(grid)
}

/// Least-squares fit of `ln(log2(3) - C_N)` against `ln N` over points with
/// `N >= FIT_MIN_SLOTS`; the exponent is minus the slope.
pub fn fit_asymptote(points: &[CapacityPoint]) -> Result<FitResult> {
    if let Some(p) = points.iter().find(|p| p.bits_per_slot >= LOG2_3) {
        return Err(Error::domain(format!(
            "point N={} has {} bits per slot, not below log2(3)",
            p.n_slots, p.bits_per_slot
        )));
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.n_slots >= FIT_MIN_SLOTS)
        .map(|p| (f64::from(p.n_slots).ln(), (LOG2_3 - p.bits_per_slot).ln()))
        .collect();
    if usable.len() < FIT_MIN_POINTS {
        return Err(Error::domain(format!(
            "need at least {FIT_MIN_POINTS} points with N >= {FIT_MIN_SLOTS}, got {}",
            usable.len()
        )));
    }
    let m = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 {
        return Err(Error::domain("fit points must span more than one N"));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = usable
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    Ok(FitResult {
        limit: LOG2_3,
        amplitude: intercept.exp(),
        exponent: -slope,
        residual: (sse / m).sqrt(),
    })
}

/// Exact classical message count `sum_{L <= N} sum_j K(N, L, j)` as a
/// big integer; handy for small-`N` cross-checks.
pub fn classical_message_total(n_slots: u32) -> Result<BigUint> {
    check_slots(n_slots)?;
    Ok((0..=n_slots)
        .map(|l| {
            binomial(u64::from(n_slots), u64::from(l)) * binomial(u64::from(l), u64::from(l / 2))
        })
        .sum())
}

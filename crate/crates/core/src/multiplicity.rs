//! Exact multiplicities of spin-`j` representations in the `(N, L)` sector.
//!
//! Two routes compute the same numbers:
//!
//! * closed forms and a recursion over the number of slots
//!   ([`restricted_multiplicity`], [`general_multiplicity`]);
//! * a highest-weight count over Fock occupation vectors
//!   ([`oracle_multiplicity`]) that shares no code with the first route.
//!
//! Spins are carried as `2j` integers and every count is a [`BigUint`].

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::spin::{check_photons, check_spin, OccupancyMode, SectorKey, SpinLabel};

/// `C(n, k)` as an exact integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k.min(n - k)))
}

/// Dimension of the `(N, L)` photon-number sector.
///
/// `C(N, L) 2^L` with at most one photon per slot, `C(L + 2N - 1, 2N - 1)`
/// (photons in `2N` modes) otherwise.
pub fn sector_dimension(n_slots: u32, photons: u32, mode: OccupancyMode) -> BigUint {
    let (n, l) = (u64::from(n_slots), u64::from(photons));
    match mode {
        OccupancyMode::Restricted => binomial(n, l) << photons,
        OccupancyMode::General => {
            if n == 0 {
                return if l == 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                };
            }
            binomial(l + 2 * n - 1, 2 * n - 1)
        }
    }
}

/// Number of spin-`j` copies among `L` qubits:
/// `(2j + 1) / (L + 1) * C(L + 1, L/2 - j)`.
pub fn qubit_ensemble_multiplicity(photons: u32, spin: SpinLabel) -> Result<BigUint> {
    check_spin(photons, spin)?;
    let l = u64::from(photons);
    let k = u64::from((photons - spin.twice()) / 2);
    let numerator = binomial(l + 1, k) * BigUint::from(spin.dim());
    let denominator = BigUint::from(l + 1);
    debug_assert!((&numerator % &denominator).is_zero());
    Ok(numerator / denominator)
}

/// Multiplicity of spin `j` for `L` photons in `N` slots, at most one per slot.
pub fn restricted_multiplicity(key: SectorKey) -> Result<BigUint> {
    key.check_mode(OccupancyMode::Restricted)?;
    let ensemble = qubit_ensemble_multiplicity(key.photons(), key.spin())?;
    Ok(binomial(u64::from(key.n_slots()), u64::from(key.photons())) * ensemble)
}

/// Spins in the decomposition of `j1 ⊗ j2`, ascending, each once.
pub fn tensor_product_spins(j1: SpinLabel, j2: SpinLabel) -> Vec<SpinLabel> {
    let (a, b) = (j1.twice(), j2.twice());
    let lo = a.abs_diff(b);
    (lo..=a + b).step_by(2).map(SpinLabel::from_twice).collect()
}

/// Memoized multiplicities for arbitrary slot occupancy, built bottom-up in
/// `N` up to fixed bounds.
///
/// Each layer follows from the previous one by adding a slot: a new slot
/// holding `L - L'` photons carries spin `(L - L')/2`, and coupling it to
/// every spin of the old `(N - 1, L')` sector and collecting terms by `j`
/// gives
///
/// ```text
/// K(N, L, j) = sum_{nu = 0}^{L/2 - j} sum_{mu = L/2 - j}^{L/2 + j} K(N - 1, mu + nu, (mu - nu)/2)
/// ```
///
/// with `K(1, L, j) = [2j == L]`.
#[derive(Clone, Debug)]
pub struct GeneralTable {
    max_slots: u32,
    max_photons: u32,
    // layers[n - 1][l][twice_j]; slots with the wrong parity stay zero.
    layers: Vec<Vec<Vec<BigUint>>>,
}

impl GeneralTable {
    pub fn build(max_slots: u32, max_photons: u32) -> Result<Self> {
        if max_slots == 0 {
            return Err(Error::ZeroSlots);
        }
        let lmax = max_photons as usize;
        let mut layers = Vec::with_capacity(max_slots as usize);
        let base: Vec<Vec<BigUint>> = (0..=lmax)
            .map(|l| {
                let mut row = vec![BigUint::zero(); l + 1];
                row[l] = BigUint::one();
                row
            })
            .collect();
        layers.push(base);
        for _ in 1..max_slots {
            let prev = layers.last().expect("base layer present");
            let next = (0..=lmax)
                .map(|l| {
                    let mut row = vec![BigUint::zero(); l + 1];
                    for twice_j in (l % 2..=l).step_by(2) {
                        row[twice_j] = Self::step(prev, l, twice_j);
                    }
                    row
                })
                .collect();
            layers.push(next);
        }
        Ok(GeneralTable {
            max_slots,
            max_photons,
            layers,
        })
    }

    fn step(prev: &[Vec<BigUint>], photons: usize, twice_j: usize) -> BigUint {
        let u = (photons - twice_j) / 2;
        let mut total = BigUint::zero();
        for nu in 0..=u {
            for mu in u..=photons - u {
                total += &prev[mu + nu][mu - nu];
            }
        }
        total
    }

    pub fn max_slots(&self) -> u32 {
        self.max_slots
    }

    pub fn max_photons(&self) -> u32 {
        self.max_photons
    }

    pub fn covers(&self, n_slots: u32, photons: u32) -> bool {
        n_slots <= self.max_slots && photons <= self.max_photons
    }

    /// `None` when the key lies outside the table bounds.
    pub fn get(&self, key: SectorKey) -> Option<&BigUint> {
        if !self.covers(key.n_slots(), key.photons()) {
            return None;
        }
        Some(
            &self.layers[key.n_slots() as usize - 1][key.photons() as usize]
                [key.spin().twice() as usize],
        )
    }

    /// Adds `delta` to one memo entry. Only for exercising verification
    /// failure paths.
    #[doc(hidden)]
    pub fn perturb_entry(&mut self, key: SectorKey, delta: u32) -> Result<()> {
        if !self.covers(key.n_slots(), key.photons()) {
            return Err(Error::domain(format!("{key} lies outside the table")));
        }
        self.layers[key.n_slots() as usize - 1][key.photons() as usize]
            [key.spin().twice() as usize] += delta;
        Ok(())
    }
}

static GENERAL_CACHE: RwLock<Option<Arc<GeneralTable>>> = RwLock::new(None);

fn general_table_covering(n_slots: u32, photons: u32) -> Result<Arc<GeneralTable>> {
    {
        let guard = GENERAL_CACHE.read().unwrap_or_else(|e| e.into_inner());
        if let Some(table) = guard.as_ref().filter(|t| t.covers(n_slots, photons)) {
            return Ok(Arc::clone(table));
        }
    }
    let mut guard = GENERAL_CACHE.write().unwrap_or_else(|e| e.into_inner());
    if let Some(table) = guard.as_ref().filter(|t| t.covers(n_slots, photons)) {
        return Ok(Arc::clone(table));
    }
    let (n_max, l_max) = match guard.as_ref() {
        Some(t) => (t.max_slots.max(n_slots), t.max_photons.max(photons)),
        None => (n_slots, photons),
    };
    let table = Arc::new(GeneralTable::build(n_max, l_max)?);
    *guard = Some(Arc::clone(&table));
    Ok(table)
}

/// Multiplicity of spin `j` for `L` photons in `N` slots with arbitrary
/// occupancy, served from a process-wide [`GeneralTable`] that grows on
/// demand.
pub fn general_multiplicity(key: SectorKey) -> Result<BigUint> {
    let table = general_table_covering(key.n_slots(), key.photons())?;
    Ok(table.get(key).expect("table covers key").clone())
}

/// Multiplicity in either occupancy mode.
pub fn multiplicity(key: SectorKey, mode: OccupancyMode) -> Result<BigUint> {
    match mode {
        OccupancyMode::Restricted => restricted_multiplicity(key),
        OccupancyMode::General => general_multiplicity(key),
    }
}

/// Number of occupation vectors `(n_{s,H}, n_{s,V})` over `N` slots with `L`
/// photons in total and `sum(n_H - n_V) = 2m`.
///
/// Counts by sweeping slots and tracking how many horizontal and vertical
/// photons have been placed so far.
pub fn weight_count(
    n_slots: u32,
    photons: u32,
    twice_m: i64,
    mode: OccupancyMode,
) -> Result<BigUint> {
    let l = i64::from(photons);
    if twice_m.abs() > l || (l - twice_m) % 2 != 0 {
        return Err(Error::InvalidWeight { photons, twice_m });
    }
    let horizontal = ((l + twice_m) / 2) as usize;
    let vertical = ((l - twice_m) / 2) as usize;
    let idx = |h: usize, v: usize| h * (vertical + 1) + v;

    // ways[h][v]: vectors over the slots seen so far with h horizontal and v
    // vertical photons.
    let mut ways = vec![BigUint::zero(); (horizontal + 1) * (vertical + 1)];
    ways[0] = BigUint::one();
    for _ in 0..n_slots {
        let mut next = vec![BigUint::zero(); ways.len()];
        for h in 0..=horizontal {
            for v in 0..=vertical {
                let mut acc = BigUint::zero();
                match mode {
                    OccupancyMode::Restricted => {
                        acc += &ways[idx(h, v)];
                        if h > 0 {
                            acc += &ways[idx(h - 1, v)];
                        }
                        if v > 0 {
                            acc += &ways[idx(h, v - 1)];
                        }
                    }
                    OccupancyMode::General => {
                        // next[h][v] = sum over h' <= h, v' <= v of ways[h'][v'],
                        // assembled as a running 2-D prefix sum.
                        acc += &ways[idx(h, v)];
                        if h > 0 {
                            acc += &next[idx(h - 1, v)];
                        }
                        if v > 0 {
                            acc += &next[idx(h, v - 1)];
                        }
                        if h > 0 && v > 0 {
                            acc -= &next[idx(h - 1, v - 1)];
                        }
                    }
                }
                next[idx(h, v)] = acc;
            }
        }
        ways = next;
    }
    Ok(ways.swap_remove(idx(horizontal, vertical)))
}

/// Multiplicity by highest-weight counting:
/// `weight_count(m = j) - weight_count(m = j + 1)`.
pub fn oracle_multiplicity(key: SectorKey, mode: OccupancyMode) -> Result<BigUint> {
    key.check_mode(mode)?;
    let twice_j = i64::from(key.spin().twice());
    let at_j = weight_count(key.n_slots(), key.photons(), twice_j, mode)?;
    if key.is_pure_phase() {
        return Ok(at_j);
    }
    let above = weight_count(key.n_slots(), key.photons(), twice_j + 2, mode)?;
    Ok(at_j - above)
}

/// Spin with the largest multiplicity for fixed `(N, L)`, and that
/// multiplicity. Ties go to the larger spin, so pure phase encoding wins a
/// tie against a hybrid one.
pub fn optimal_spin(
    n_slots: u32,
    photons: u32,
    mode: OccupancyMode,
) -> Result<(SpinLabel, BigUint)> {
    check_photons(n_slots, photons, mode)?;
    let mut best: Option<(SpinLabel, BigUint)> = None;
    // Descending order: a later spin only wins if strictly larger.
    for spin in SpinLabel::allowed_descending(photons) {
        let k = multiplicity(SectorKey::new(n_slots, photons, spin)?, mode)?;
        if best.as_ref().is_none_or(|(_, b)| k > *b) {
            best = Some((spin, k));
        }
    }
    Ok(best.expect("at least one allowed spin"))
}

/// True when the optimal spin is below `L/2`, i.e. a hybrid
/// polarization/phase encoding strictly beats pure phase encoding.
pub fn is_hybrid(n_slots: u32, photons: u32, mode: OccupancyMode) -> Result<bool> {
    let (spin, _) = optimal_spin(n_slots, photons, mode)?;
    Ok(spin.twice() < photons)
}

/// Number of distinguishable classical messages for `N` slots holding at
/// most `L` photons: the sum of all multiplicities with `L' <= L`.
pub fn message_count(n_slots: u32, max_photons: u32, mode: OccupancyMode) -> Result<BigUint> {
    check_photons(n_slots, max_photons, mode)?;
    let mut total = BigUint::zero();
    for l in 0..=max_photons {
        for spin in SpinLabel::allowed_descending(l) {
            total += multiplicity(SectorKey::new(n_slots, l, spin)?, mode)?;
        }
    }
    Ok(total)
}

/// One multiplicity with its table markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub value: BigUint,
    /// `j = L/2`: all photons identically polarized.
    pub pure_phase: bool,
    /// Hybrid entry that is the strict maximum of its group.
    pub optimal: bool,
}

/// Multiplicities over a rectangular `(N, L)` range with pure-phase and
/// optimal markers.
///
/// The optimal marker follows the two tables' conventions. In restricted
/// mode the group is a whole `N` column (every `L` and `j` in range); in
/// general mode it is a fixed `(N, L)` pair. An entry is marked when it is
/// the unique maximum of its group and is not pure phase. Ties mark nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTable {
    mode: OccupancyMode,
    max_slots: u32,
    max_photons: u32,
    entries: BTreeMap<SectorKey, TableEntry>,
}

impl MultiplicityTable {
    /// Every valid key with `1 <= N <= max_slots`, `0 <= L <= max_photons`
    /// (and `L <= N` when restricted).
    pub fn build(mode: OccupancyMode, max_slots: u32, max_photons: u32) -> Result<Self> {
        if max_slots == 0 {
            return Err(Error::domain("max_slots must be at least 1"));
        }
        let general = match mode {
            OccupancyMode::General => Some(GeneralTable::build(max_slots, max_photons)?),
            OccupancyMode::Restricted => None,
        };
        let mut entries = BTreeMap::new();
        for n in 1..=max_slots {
            let top = match mode {
                OccupancyMode::Restricted => max_photons.min(n),
                OccupancyMode::General => max_photons,
            };
            let mut group: Vec<SectorKey> = Vec::new();
            for l in 0..=top {
                if mode == OccupancyMode::General {
                    Self::mark_group(&mut entries, &group);
                    group.clear();
                }
                for spin in SpinLabel::allowed_descending(l) {
                    let key = SectorKey::new(n, l, spin)?;
                    let value = match &general {
                        Some(t) => t.get(key).expect("table covers range").clone(),
                        None => restricted_multiplicity(key)?,
                    };
                    entries.insert(
                        key,
                        TableEntry {
                            value,
                            pure_phase: key.is_pure_phase(),
                            optimal: false,
                        },
                    );
                    group.push(key);
                }
            }
            Self::mark_group(&mut entries, &group);
        }
        Ok(MultiplicityTable {
            mode,
            max_slots,
            max_photons,
            entries,
        })
    }

    fn mark_group(entries: &mut BTreeMap<SectorKey, TableEntry>, group: &[SectorKey]) {
        let Some(max) = group.iter().map(|k| &entries[k].value).max().cloned() else {
            return;
        };
        let winners: Vec<&SectorKey> = group.iter().filter(|k| entries[*k].value == max).collect();
        if let [winner] = winners[..] {
            let entry = entries.get_mut(winner).expect("winner is in the table");
            entry.optimal = !entry.pure_phase;
        }
    }

    pub fn mode(&self) -> OccupancyMode {
        self.mode
    }

    pub fn max_slots(&self) -> u32 {
        self.max_slots
    }

    pub fn max_photons(&self) -> u32 {
        self.max_photons
    }

    pub fn get(&self, key: &SectorKey) -> Option<&TableEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries ordered by `N`, then `L`, then `j` ascending.
    pub fn iter(&self) -> impl Iterator<Item = (&SectorKey, &TableEntry)> {
        self.entries.iter()
    }
}

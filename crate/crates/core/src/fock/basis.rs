use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::DimGuard;
use crate::error::{Error, Result};
use crate::multiplicity::sector_dimension;
use crate::spin::{check_photons, OccupancyMode};

/// Which photon numbers a basis spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonRange {
    Exactly(u32),
    UpTo(u32),
}

impl PhotonRange {
    pub fn max(self) -> u32 {
        match self {
            PhotonRange::Exactly(l) | PhotonRange::UpTo(l) => l,
        }
    }

    pub fn min(self) -> u32 {
        match self {
            PhotonRange::Exactly(l) => l,
            PhotonRange::UpTo(_) => 0,
        }
    }

    pub fn contains(self, photons: u32) -> bool {
        (self.min()..=self.max()).contains(&photons)
    }
}

/// Ordered occupation-number basis of `N` two-mode slots.
///
/// States are sorted lexicographically over the flattened `2N`-vector (H
/// before V within a slot, slots ascending).
#[derive(Clone, Debug)]
pub struct FockBasis {
    n_slots: u32,
    photons: PhotonRange,
    mode: OccupancyMode,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n_slots == other.n_slots
            && self.photons == other.photons
            && self.mode == other.mode
            && self.states == other.states
    }
}

impl FockBasis {
    /// Closed-form number of states.
    pub fn closed_form_size(n_slots: u32, photons: PhotonRange, mode: OccupancyMode) -> BigUint {
        (photons.min()..=photons.max())
            .map(|l| sector_dimension(n_slots, l, mode))
            .sum()
    }

    pub fn enumerate(
        n_slots: u32,
        photons: PhotonRange,
        mode: OccupancyMode,
        guard: DimGuard,
    ) -> Result<Self> {
        check_photons(n_slots, photons.max(), mode)?;
        guard.check(&Self::closed_form_size(n_slots, photons, mode))?;
        let mut states = Vec::new();
        let mut current = vec![0u32; 2 * n_slots as usize];
        Self::fill(0, photons.max(), photons, mode, &mut current, &mut states);
        Ok(Self::from_sorted(n_slots, photons, mode, states))
    }

    /// Fixed total photon number `L`.
    pub fn sector(
        n_slots: u32,
        photons: u32,
        mode: OccupancyMode,
        guard: DimGuard,
    ) -> Result<Self> {
        Self::enumerate(n_slots, PhotonRange::Exactly(photons), mode, guard)
    }

    /// All photon numbers `0..=max_photons`.
    pub fn capped(
        n_slots: u32,
        max_photons: u32,
        mode: OccupancyMode,
        guard: DimGuard,
    ) -> Result<Self> {
        Self::enumerate(n_slots, PhotonRange::UpTo(max_photons), mode, guard)
    }

    fn fill(
        slot: usize,
        remaining: u32,
        photons: PhotonRange,
        mode: OccupancyMode,
        current: &mut [u32],
        out: &mut Vec<Vec<u32>>,
    ) {
        let n_slots = current.len() / 2;
        if slot == n_slots {
            if matches!(photons, PhotonRange::UpTo(_)) || remaining == 0 {
                out.push(current.to_vec());
            }
            return;
        }
        let cap = mode.slot_cap().unwrap_or(u32::MAX).min(remaining);
        if let PhotonRange::Exactly(_) = photons {
            let slots_left = (n_slots - slot) as u64;
            if let Some(c) = mode.slot_cap() {
                if u64::from(remaining) > slots_left * u64::from(c) {
                    return;
                }
            }
        }
        for n_h in 0..=cap {
            for n_v in 0..=cap - n_h {
                current[2 * slot] = n_h;
                current[2 * slot + 1] = n_v;
                Self::fill(slot + 1, remaining - n_h - n_v, photons, mode, current, out);
            }
        }
        current[2 * slot] = 0;
        current[2 * slot + 1] = 0;
    }

    fn from_sorted(
        n_slots: u32,
        photons: PhotonRange,
        mode: OccupancyMode,
        states: Vec<Vec<u32>>,
    ) -> Self {
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        FockBasis {
            n_slots,
            photons,
            mode,
            states,
            index,
        }
    }

    /// Rebuilds a basis from an explicit state listing, which must equal the
    /// enumerated basis for the same parameters.
    pub fn from_listing(
        n_slots: u32,
        photons: PhotonRange,
        mode: OccupancyMode,
        states: Vec<Vec<u32>>,
        guard: DimGuard,
    ) -> Result<Self> {
        let expected = Self::enumerate(n_slots, photons, mode, guard)?;
        if expected.states != states {
            return Err(Error::domain(
                "basis listing does not match the canonical enumeration",
            ));
        }
        Ok(expected)
    }

    pub fn n_slots(&self) -> u32 {
        self.n_slots
    }

    pub fn photons(&self) -> PhotonRange {
        self.photons
    }

    pub fn mode(&self) -> OccupancyMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn photon_number(&self, i: usize) -> u32 {
        self.states[i].iter().sum()
    }

    /// `2m = sum_s (n_{s,H} - n_{s,V})`, twice the `J_z` eigenvalue.
    pub fn twice_weight(&self, i: usize) -> i64 {
        self.states[i]
            .chunks_exact(2)
            .map(|s| i64::from(s[0]) - i64::from(s[1]))
            .sum()
    }

    /// Photons in each slot.
    pub fn slot_totals(&self, i: usize) -> Vec<u32> {
        self.states[i]
            .chunks_exact(2)
            .map(|s| s[0] + s[1])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use OccupancyMode::{General, Restricted};

    #[test]
    fn sizes_match_examples() {
        let g = DimGuard::default();
        assert_eq!(FockBasis::sector(2, 2, General, g).unwrap().len(), 10);
        assert_eq!(FockBasis::sector(3, 2, Restricted, g).unwrap().len(), 12);
        let vac = FockBasis::sector(1, 0, General, g).unwrap();
        assert_eq!(vac.states(), &[vec![0, 0]]);
    }

    #[test]
    fn sizes_match_closed_form_and_order_is_lexicographic() {
        for mode in [Restricted, General] {
            for n in 1..=4u32 {
                for l in 0..=4u32 {
                    if mode == Restricted && l > n {
                        continue;
                    }
                    for range in [PhotonRange::Exactly(l), PhotonRange::UpTo(l)] {
                        let b = FockBasis::enumerate(n, range, mode, DimGuard::default()).unwrap();
                        let expect = FockBasis::closed_form_size(n, range, mode);
                        assert_eq!(BigUint::from(b.len()), expect);
                        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
                        for (i, s) in b.states().iter().enumerate() {
                            assert_eq!(b.index_of(s), Some(i));
                            assert!(range.contains(b.photon_number(i)));
                            if mode == Restricted {
                                assert!(b.slot_totals(i).iter().all(|&t| t <= 1));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn guard_reports_size() {
        let err = FockBasis::sector(6, 6, General, DimGuard(100)).unwrap_err();
        match err {
            Error::DimensionGuard { size, guard } => {
                assert_eq!(size, BigUint::from(12376u32));
                assert_eq!(guard, 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn restricted_rejects_too_many_photons() {
        assert!(FockBasis::sector(2, 3, Restricted, DimGuard::default()).is_err());
    }

    #[test]
    fn weights() {
        let b = FockBasis::sector(2, 2, General, DimGuard::default()).unwrap();
        let i = b.index_of(&[2, 0, 0, 0]).unwrap();
        assert_eq!(b.twice_weight(i), 2);
        let i = b.index_of(&[0, 1, 0, 1]).unwrap();
        assert_eq!(b.twice_weight(i), -2);
    }
}

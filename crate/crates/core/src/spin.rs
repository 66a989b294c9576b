use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spin value `j`, stored as the integer `2j` so half-integers stay exact.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SpinLabel(u32);

impl SpinLabel {
    pub const ZERO: SpinLabel = SpinLabel(0);
    pub const HALF: SpinLabel = SpinLabel(1);

    pub const fn from_twice(twice_j: u32) -> Self {
        SpinLabel(twice_j)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    /// Dimension `2j + 1` of the spin-`j` irreducible representation.
    pub const fn dim(self) -> u32 {
        self.0 + 1
    }

    pub const fn is_half_integer(self) -> bool {
        self.0 % 2 == 1
    }

    /// `j` as a float, for display and physics formulas only.
    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Every spin label allowed for `photons` qubits, from `L/2` downwards.
    pub fn allowed_descending(photons: u32) -> impl Iterator<Item = SpinLabel> {
        (0..=photons / 2).map(move |k| SpinLabel(photons - 2 * k))
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.0)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

impl FromStr for SpinLabel {
    type Err = Error;

    /// Accepts `"3/2"`, `"1"`, or `"0.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::parse(
                "spin",
                format!("{s:?} is not a non-negative multiple of 1/2"),
            )
        };
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(SpinLabel(num)),
                "1" => num.checked_mul(2).map(SpinLabel).ok_or_else(bad),
                _ => Err(bad()),
            };
        }
        if let Ok(whole) = s.parse::<u32>() {
            return whole.checked_mul(2).map(SpinLabel).ok_or_else(bad);
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * x;
        if x < 0.0 || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(bad());
        }
        Ok(SpinLabel(twice as u32))
    }
}

/// Whether a slot may carry more than one photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OccupancyMode {
    /// At most one photon per slot.
    Restricted,
    /// Any number of photons per slot.
    General,
}

impl OccupancyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OccupancyMode::Restricted => "restricted",
            OccupancyMode::General => "general",
        }
    }

    /// Largest photon number a single slot may hold, if capped.
    pub fn slot_cap(self) -> Option<u32> {
        match self {
            OccupancyMode::Restricted => Some(1),
            OccupancyMode::General => None,
        }
    }
}

impl fmt::Display for OccupancyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OccupancyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "restricted" => Ok(OccupancyMode::Restricted),
            "general" => Ok(OccupancyMode::General),
            other => Err(Error::parse(
                "occupancy mode",
                format!("{other:?}, expected \"restricted\" or \"general\""),
            )),
        }
    }
}

/// Label `(N, L, j)` of an isotypic sector: `L` photons spread over `N`
/// slots, total spin `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectorKey {
    n_slots: u32,
    photons: u32,
    spin: SpinLabel,
}

impl SectorKey {
    pub fn new(n_slots: u32, photons: u32, spin: SpinLabel) -> Result<Self> {
        if n_slots == 0 {
            return Err(Error::ZeroSlots);
        }
        check_spin(photons, spin)?;
        Ok(SectorKey {
            n_slots,
            photons,
            spin,
        })
    }

    /// Shorthand for `new(n, l, SpinLabel::from_twice(twice_j))`.
    pub fn from_twice(n_slots: u32, photons: u32, twice_j: u32) -> Result<Self> {
        Self::new(n_slots, photons, SpinLabel::from_twice(twice_j))
    }

    pub fn n_slots(&self) -> u32 {
        self.n_slots
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn spin(&self) -> SpinLabel {
        self.spin
    }

    pub fn is_pure_phase(&self) -> bool {
        self.spin.twice() == self.photons
    }

    /// Errors unless the key fits `mode` (restricted needs `L <= N`).
    pub fn check_mode(&self, mode: OccupancyMode) -> Result<()> {
        check_photons(self.n_slots, self.photons, mode)
    }
}

impl fmt::Display for SectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} L={} j={}", self.n_slots, self.photons, self.spin)
    }
}

pub(crate) fn check_spin(photons: u32, spin: SpinLabel) -> Result<()> {
    let twice_j = spin.twice();
    if twice_j > photons {
        return Err(Error::SpinTooLarge { photons, twice_j });
    }
    if !(photons - twice_j).is_multiple_of(2) {
        return Err(Error::SpinParity { photons, twice_j });
    }
    Ok(())
}

pub(crate) fn check_photons(n_slots: u32, photons: u32, mode: OccupancyMode) -> Result<()> {
    if n_slots == 0 {
        return Err(Error::ZeroSlots);
    }
    if mode == OccupancyMode::Restricted && photons > n_slots {
        return Err(Error::PhotonsExceedSlots {
            slots: n_slots,
            photons,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_display_and_parse() {
        assert_eq!(SpinLabel::from_twice(3).to_string(), "3/2");
        assert_eq!(SpinLabel::from_twice(4).to_string(), "2");
        assert_eq!("3/2".parse::<SpinLabel>().unwrap().twice(), 3);
        assert_eq!("2".parse::<SpinLabel>().unwrap().twice(), 4);
        assert_eq!("0.5".parse::<SpinLabel>().unwrap().twice(), 1);
        assert!("1/3".parse::<SpinLabel>().is_err());
        assert!("0.3".parse::<SpinLabel>().is_err());
        assert!("-1".parse::<SpinLabel>().is_err());
    }

    #[test]
    fn sector_key_validation() {
        assert!(SectorKey::from_twice(4, 3, 1).is_ok());
        assert!(matches!(
            SectorKey::from_twice(4, 3, 2),
            Err(Error::SpinParity { .. })
        ));
        assert!(matches!(
            SectorKey::from_twice(4, 3, 5),
            Err(Error::SpinTooLarge { .. })
        ));
        assert!(matches!(
            SectorKey::from_twice(0, 0, 0),
            Err(Error::ZeroSlots)
        ));
        let k = SectorKey::from_twice(2, 3, 1).unwrap();
        assert!(k.check_mode(OccupancyMode::General).is_ok());
        assert!(matches!(
            k.check_mode(OccupancyMode::Restricted),
            Err(Error::PhotonsExceedSlots { .. })
        ));
    }

    #[test]
    fn allowed_spins() {
        let v: Vec<u32> = SpinLabel::allowed_descending(5)
            .map(SpinLabel::twice)
            .collect();
        assert_eq!(v, vec![5, 3, 1]);
        let v: Vec<u32> = SpinLabel::allowed_descending(0)
            .map(SpinLabel::twice)
            .collect();
        assert_eq!(v, vec![0]);
    }

    #[test]
    fn mode_parse() {
        assert_eq!(
            "Restricted".parse::<OccupancyMode>().unwrap(),
            OccupancyMode::Restricted
        );
        assert!("both".parse::<OccupancyMode>().is_err());
    }
}

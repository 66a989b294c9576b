//! Table rendering, figure data, and the on-disk formats.
//!
//! All text output is UTF-8 with LF line endings. CSV files start with a
//! mandatory header row; readers skip lines starting with `#`, which the CLI
//! uses for provenance headers. Multiplicities are always full decimal
//! integers.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacity::{capacity_sweep, CapacityKind, CapacityPoint};
use crate::error::{Error, Result};
use crate::fock::{DimGuard, FockBasis, NoiselessBasis, PhotonRange, StateVector};
use crate::multiplicity::MultiplicityTable;
use crate::spin::{OccupancyMode, SectorKey, SpinLabel};

pub const TABLE_CSV_HEADER: &str = "N,L,twice_j,multiplicity,pure_phase,optimal";
pub const FIGURE_CSV_HEADER: &str =
    "N,kind,bits_per_slot,avg_photons_per_slot,argmax_L,argmax_twice_j";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Pretty,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "pretty" => Ok(TableFormat::Pretty),
            other => Err(Error::parse(
                "table format",
                format!("{other:?}, expected csv, json or pretty"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub multiplicity: BigUint,
    pub pure_phase: bool,
    pub optimal: bool,
}

/// One `(L, j)` row; `cells[n - 1]` is the entry for `N = n`, absent where
/// the key is out of range (restricted mode with `L > N`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub photons: u32,
    pub spin: SpinLabel,
    pub cells: Vec<Option<TableCell>>,
}

/// A multiplicity table laid out like a printed one: rows `(L, j)` with `L`
/// ascending and `j` descending, one column per `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableDocument {
    pub mode: OccupancyMode,
    pub max_slots: u32,
    pub max_photons: u32,
    pub rows: Vec<TableRow>,
}

impl TableDocument {
    /// Restricted tables never hold more photons than slots, so the photon
    /// bound is clamped to `max_slots` there.
    pub fn build(mode: OccupancyMode, max_slots: u32, max_photons: u32) -> Result<Self> {
        if max_slots == 0 || max_photons == 0 {
            return Err(Error::domain(format!(
                "table bounds must be at least 1, got max_slots={max_slots} max_photons={max_photons}"
            )));
        }
        let table = MultiplicityTable::build(mode, max_slots, max_photons)?;
        Ok(Self::from_table(&table))
    }

    pub fn from_table(table: &MultiplicityTable) -> Self {
        let mode = table.mode();
        let max_slots = table.max_slots();
        let max_photons = match mode {
            OccupancyMode::Restricted => table.max_photons().min(max_slots),
            OccupancyMode::General => table.max_photons(),
        };
        let mut rows = Vec::new();
        for l in 0..=max_photons {
            for spin in SpinLabel::allowed_descending(l) {
                let cells = (1..=max_slots)
                    .map(|n| {
                        let key = SectorKey::new(n, l, spin).ok()?;
                        table.get(&key).map(|e| TableCell {
                            multiplicity: e.value.clone(),
                            pure_phase: e.pure_phase,
                            optimal: e.optimal,
                        })
                    })
                    .collect();
                rows.push(TableRow {
                    photons: l,
                    spin,
                    cells,
                });
            }
        }
        TableDocument {
            mode,
            max_slots,
            max_photons,
            rows,
        }
    }

    /// Cells in CSV order: `N` ascending, then `L` ascending, then `j`
    /// descending.
    pub fn cells(&self) -> impl Iterator<Item = (u32, &TableRow, &TableCell)> + '_ {
        (1..=self.max_slots).flat_map(move |n| {
            self.rows
                .iter()
                .filter_map(move |r| r.cells[n as usize - 1].as_ref().map(|c| (n, r, c)))
        })
    }

    pub fn get(&self, n_slots: u32, photons: u32, spin: SpinLabel) -> Option<&TableCell> {
        let row = self
            .rows
            .iter()
            .find(|r| r.photons == photons && r.spin == spin)?;
        row.cells.get(n_slots.checked_sub(1)? as usize)?.as_ref()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_CSV_HEADER);
        out.push('\n');
        for (n, row, cell) in self.cells() {
            writeln!(
                out,
                "{n},{},{},{},{},{}",
                row.photons,
                row.spin.twice(),
                cell.multiplicity,
                cell.pure_phase,
                cell.optimal
            )
            .expect("writing to a String");
        }
        out
    }

    /// Parses a table CSV back. The mode is not stored in the file; bounds
    /// are the largest `N` and `L` present.
    pub fn from_csv(text: &str, mode: OccupancyMode) -> Result<Self> {
        let mut reader = csv_reader(text);
        check_header(&mut reader, TABLE_CSV_HEADER)?;
        let mut cells: Vec<(SectorKey, TableCell)> = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::parse("table CSV", e))?;
            let field = |i: usize| record.get(i).unwrap_or_default();
            let what = || format!("table CSV row {}", line + 1);
            let n: u32 = field(0).parse().map_err(|e| Error::parse(what(), e))?;
            let l: u32 = field(1).parse().map_err(|e| Error::parse(what(), e))?;
            let t: u32 = field(2).parse().map_err(|e| Error::parse(what(), e))?;
            let key = SectorKey::from_twice(n, l, t)?;
            key.check_mode(mode)?;
            let cell = TableCell {
                multiplicity: field(3).parse().map_err(|e| Error::parse(what(), e))?,
                pure_phase: field(4).parse().map_err(|e| Error::parse(what(), e))?,
                optimal: field(5).parse().map_err(|e| Error::parse(what(), e))?,
            };
            cells.push((key, cell));
        }
        let max_slots = cells.iter().map(|(k, _)| k.n_slots()).max().unwrap_or(0);
        let max_photons = cells.iter().map(|(k, _)| k.photons()).max().unwrap_or(0);
        let mut rows: Vec<TableRow> = Vec::new();
        for l in 0..=max_photons {
            for spin in SpinLabel::allowed_descending(l) {
                rows.push(TableRow {
                    photons: l,
                    spin,
                    cells: vec![None; max_slots as usize],
                });
            }
        }
        for (key, cell) in cells {
            let row = rows
                .iter_mut()
                .find(|r| r.photons == key.photons() && r.spin == key.spin())
                .expect("rows cover every valid key");
            row.cells[key.n_slots() as usize - 1] = Some(cell);
        }
        Ok(TableDocument {
            mode,
            max_slots,
            max_photons,
            rows,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .cells()
            .map(|(n, row, cell)| {
                serde_json::json!({
                    "N": n,
                    "L": row.photons,
                    "twice_j": row.spin.twice(),
                    "multiplicity": cell.multiplicity.to_string(),
                    "pure_phase": cell.pure_phase,
                    "optimal": cell.optimal,
                })
            })
            .collect();
        serde_json::json!({
            "mode": self.mode,
            "max_slots": self.max_slots,
            "max_photons": self.max_photons,
            "entries": entries,
        })
    }

    /// Fixed-width text layout. Pure-phase entries are wrapped in
    /// underscores, optimal hybrid entries carry a trailing `*`.
    pub fn to_pretty(&self) -> String {
        let label = |c: &TableCell| {
            let mut s = c.multiplicity.to_string();
            if c.pure_phase {
                s = format!("_{s}_");
            }
            if c.optimal {
                s.push('*');
            }
            s
        };
        let width = self
            .cells()
            .map(|(_, _, c)| label(c).len())
            .max()
            .unwrap_or(1)
            .max(4)
            + 2;
        let mut out = String::new();
        let _ = write!(out, "{:>3}  {:<6}", "L", "spin");
        for n in 1..=self.max_slots {
            let _ = write!(out, "{:>width$}", format!("N={n}"));
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:>3}  {:<6}", row.photons, format!("j={}", row.spin));
            for cell in &row.cells {
                let text = cell.as_ref().map(label).unwrap_or_default();
                let _ = write!(out, "{text:>width$}");
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("plain JSON value");
                s.push('\n');
                s
            }
            TableFormat::Pretty => self.to_pretty(),
        }
    }
}

/// Builds and renders a multiplicity table in one step.
pub fn render_table(
    mode: OccupancyMode,
    max_slots: u32,
    max_photons: u32,
    format: TableFormat,
) -> Result<String> {
    Ok(TableDocument::build(mode, max_slots, max_photons)?.render(format))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes())
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &str) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| Error::parse("CSV header", e))?;
    let got: Vec<&str> = header.iter().collect();
    if got.join(",") != expected {
        return Err(Error::parse(
            "CSV header",
            format!("expected {expected:?}, got {:?}", got.join(",")),
        ));
    }
    Ok(())
}

/// Quantum and classical capacities for every grid value, quantum first for
/// each `N`.
pub fn figure_points(n_grid: &[u32]) -> Result<Vec<CapacityPoint>> {
    let quantum = capacity_sweep(n_grid, CapacityKind::Quantum)?;
    let classical = capacity_sweep(n_grid, CapacityKind::Classical)?;
    Ok(quantum
        .into_iter()
        .zip(classical)
        .flat_map(|(q, c)| [q, c])
        .collect())
}

pub fn figure_csv(points: &[CapacityPoint]) -> String {
    let mut out = String::from(FIGURE_CSV_HEADER);
    out.push('\n');
    for p in points {
        let argmax_l = p
            .achieving_photons
            .map(|l| l.to_string())
            .unwrap_or_default();
        let argmax_j = p
            .achieving_spin
            .map(|s| s.twice().to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{:?},{:?},{argmax_l},{argmax_j}",
            p.n_slots, p.kind, p.bits_per_slot, p.avg_photons_per_slot
        )
        .expect("writing to a String");
    }
    out
}

pub fn parse_figure_csv(text: &str) -> Result<Vec<CapacityPoint>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, FIGURE_CSV_HEADER)?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse("figure CSV", e))?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let what = || format!("figure CSV row {}", line + 1);
        let opt = |s: &str| -> Result<Option<u32>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| Error::parse(what(), e))
            }
        };
        points.push(CapacityPoint {
            n_slots: field(0).parse().map_err(|e| Error::parse(what(), e))?,
            kind: field(1).parse()?,
            bits_per_slot: field(2).parse().map_err(|e| Error::parse(what(), e))?,
            avg_photons_per_slot: field(3).parse().map_err(|e| Error::parse(what(), e))?,
            achieving_photons: opt(field(4))?,
            achieving_spin: opt(field(5))?.map(SpinLabel::from_twice),
        });
    }
    Ok(points)
}

/// Computes the figure series over `n_grid` and writes it as CSV to `out`.
pub fn emit_figure_data(n_grid: &[u32], out: &Path) -> Result<Vec<CapacityPoint>> {
    let points = figure_points(n_grid)?;
    write_file(out, &figure_csv(&points))?;
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorDocument {
    pub n_slots: u32,
    pub photons: u32,
    pub twice_j: u32,
}

/// Serialized [`NoiselessBasis`]: the sector, the occupation listing of the
/// underlying Fock basis, and `vectors[k][g]` as `[re, im]` pairs aligned
/// with that listing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiselessBasisDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
    pub sector: SectorDocument,
    pub mode: OccupancyMode,
    pub logical_dim: usize,
    pub gauge_dim: usize,
    pub basis: Vec<Vec<u32>>,
    pub vectors: Vec<Vec<Vec<[f64; 2]>>>,
}

impl NoiselessBasisDocument {
    pub fn from_basis(nb: &NoiselessBasis) -> Self {
        let key = nb.sector();
        NoiselessBasisDocument {
            generator: None,
            sector: SectorDocument {
                n_slots: key.n_slots(),
                photons: key.photons(),
                twice_j: key.spin().twice(),
            },
            mode: nb.mode(),
            logical_dim: nb.logical_dim(),
            gauge_dim: nb.gauge_dim(),
            basis: nb.basis().states().to_vec(),
            vectors: nb
                .vectors()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_basis(self, guard: DimGuard) -> Result<NoiselessBasis> {
        let key = SectorKey::from_twice(
            self.sector.n_slots,
            self.sector.photons,
            self.sector.twice_j,
        )?;
        if self.vectors.len() != self.logical_dim || self.gauge_dim != key.spin().dim() as usize {
            return Err(Error::parse(
                "noiseless basis document",
                "declared dimensions disagree with the vectors",
            ));
        }
        let basis = Arc::new(FockBasis::from_listing(
            key.n_slots(),
            PhotonRange::Exactly(key.photons()),
            self.mode,
            self.basis,
            guard,
        )?);
        let vectors = self
            .vectors
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|amps| {
                        let v = DVector::from_iterator(
                            amps.len(),
                            amps.into_iter().map(|[re, im]| Complex64::new(re, im)),
                        );
                        StateVector::new(Arc::clone(&basis), v)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        NoiselessBasis::from_parts(key, self.mode, basis, vectors)
    }
}

/// JSON text for a noiseless basis, with an optional provenance object.
pub fn serialize_noiseless_basis(
    nb: &NoiselessBasis,
    generator: Option<serde_json::Value>,
) -> String {
    let mut doc = NoiselessBasisDocument::from_basis(nb);
    doc.generator = generator;
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn parse_noiseless_basis(text: &str, guard: DimGuard) -> Result<NoiselessBasis> {
    let doc: NoiselessBasisDocument =
        serde_json::from_str(text).map_err(|e| Error::parse("noiseless basis document", e))?;
    doc.into_basis(guard)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

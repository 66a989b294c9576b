//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use nss_core::capacity::{capacity_sweep, fit_asymptote, geometric_grid, LOG2_3};
use nss_core::fock::{
    logical_fidelity_check, random_amplitudes, sector_multiplicity_numeric, stream,
    twirl_monte_carlo, ExactTwirl,
};
use nss_core::multiplicity::{
    binomial, general_multiplicity, multiplicity, oracle_multiplicity, restricted_multiplicity,
    sector_dimension,
};
use nss_core::tables::TableDocument;
use nss_core::{
    CapacityKind, DensityOperator, DimGuard, FockBasis, OccupancyMode, SectorKey, SpinLabel,
    StateVector,
};

type Row = (u32, u32, u32, &'static [&'static str]);

const TABLE_ONE: &[Row] = &[
    (1, 1, 2, &["_2", "_3", "_4", "_5", "_6"]),
    (2, 2, 2, &["_1", "_3", "_6", "_10", "_15"]),
    (2, 0, 2, &["1", "3", "6", "10", "15"]),
    (3, 3, 3, &["_1", "_4", "_10", "_20"]),
    (3, 1, 3, &["2", "8*", "20*", "40"]),
    (4, 4, 4, &["_1", "_5", "_15"]),
    (4, 2, 4, &["3", "15", "45*"]),
    (4, 0, 4, &["2", "10", "30"]),
    (5, 5, 5, &["_1", "_6"]),
    (5, 3, 5, &["4", "24"]),
    (5, 1, 5, &["5", "30"]),
    (6, 6, 6, &["_1"]),
    (6, 4, 6, &["5"]),
    (6, 2, 6, &["9"]),
    (6, 0, 6, &["5"]),
];

const TABLE_TWO: &[Row] = &[
    (2, 2, 2, &["_3", "_6", "_10", "_15", "_21", "_28", "_36"]),
    (2, 0, 2, &["1", "3", "6", "10", "15", "21", "28"]),
    (3, 3, 2, &["_4", "_10", "_20", "_35", "_56", "_84", "_120"]),
    (3, 1, 2, &["2", "8", "20", "40*", "70*", "112*", "168*"]),
    (
        4,
        4,
        2,
        &["_5", "_15", "_35", "_70", "_126", "_210", "_330"],
    ),
    (4, 2, 2, &["3", "15", "45*", "105*", "210*", "378*", "630*"]),
    (4, 0, 2, &["1", "6", "20", "50", "105", "196", "336"]),
];

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            ok: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self {
            ok: false,
            detail: detail.into(),
        }
    }
}

fn run_table(mode: &str, max_slots: &str, max_photons: &str) -> Result<TableDocument, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nss"))
        .args([
            "table",
            "--mode",
            mode,
            "--max-slots",
            max_slots,
            "--max-photons",
            max_photons,
        ])
        .args(["--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mode = mode.parse::<OccupancyMode>().map_err(|e| e.to_string())?;
    TableDocument::from_csv(&text, mode).map_err(|e| e.to_string())
}

fn compare_table(doc: &TableDocument, rows: &[Row]) -> Outcome {
    let mut cells = 0;
    for &(l, twice_j, first, values) in rows {
        for (i, raw) in values.iter().enumerate() {
            let n = first + i as u32;
            let value = raw.trim_start_matches('_').trim_end_matches('*');
            let Some(cell) = doc.get(n, l, SpinLabel::from_twice(twice_j)) else {
                return Outcome::fail(format!("missing N={n} L={l} 2j={twice_j}"));
            };
            if cell.multiplicity.to_string() != value
                || cell.pure_phase != raw.starts_with('_')
                || cell.optimal != raw.ends_with('*')
            {
                return Outcome::fail(format!(
                    "N={n} L={l} 2j={twice_j}: got {} pure_phase={} optimal={}, expected {raw}",
                    cell.multiplicity, cell.pure_phase, cell.optimal
                ));
            }
            cells += 1;
        }
    }
    Outcome::pass(format!("{cells} cells with markers"))
}

fn table_one() -> Outcome {
    match run_table("restricted", "6", "6") {
        Ok(doc) => compare_table(&doc, TABLE_ONE),
        Err(e) => Outcome::fail(e),
    }
}

fn table_two() -> Outcome {
    match run_table("general", "8", "4") {
        Ok(doc) => compare_table(&doc, TABLE_TWO),
        Err(e) => Outcome::fail(e),
    }
}

fn oracle_triangle() -> Outcome {
    let guard = DimGuard(DimGuard::DEFAULT);
    let mut exact = 0;
    let mut numeric = 0;
    let cases = [
        (OccupancyMode::Restricted, 8u32),
        (OccupancyMode::General, 6u32),
    ];
    for (mode, bound) in cases {
        for n in 1..=bound {
            let max_l = match mode {
                OccupancyMode::Restricted => n,
                OccupancyMode::General => bound,
            };
            for l in 0..=max_l {
                let dim = sector_dimension(n, l, mode);
                for spin in SpinLabel::allowed_descending(l) {
                    let key = SectorKey::new(n, l, spin).unwrap();
                    let closed = match mode {
                        OccupancyMode::Restricted => restricted_multiplicity(key),
                        OccupancyMode::General => general_multiplicity(key),
                    }
                    .unwrap();
                    let oracle = oracle_multiplicity(key, mode).unwrap();
                    if closed != oracle {
                        return Outcome::fail(format!(
                            "{mode} {key}: closed {closed}, oracle {oracle}"
                        ));
                    }
                    exact += 1;
                    if dim <= BigUint::from(2000u32) {
                        let k = sector_multiplicity_numeric(key, mode, guard).unwrap();
                        if BigUint::from(k) != closed {
                            return Outcome::fail(format!(
                                "{mode} {key}: closed {closed}, numeric {k}"
                            ));
                        }
                        numeric += 1;
                    }
                }
            }
        }
    }
    Outcome::pass(format!("{exact} sectors exact, {numeric} numeric"))
}

fn dimension_sums() -> Outcome {
    let mut checked = 0;
    for mode in [OccupancyMode::Restricted, OccupancyMode::General] {
        for n in 1..=8u32 {
            for l in 0..=8u32 {
                if mode == OccupancyMode::Restricted && l > n {
                    continue;
                }
                let total: BigUint = SpinLabel::allowed_descending(l)
                    .map(|s| {
                        multiplicity(SectorKey::new(n, l, s).unwrap(), mode).unwrap() * s.dim()
                    })
                    .sum();
                let expected = match mode {
                    OccupancyMode::Restricted => {
                        binomial(u64::from(n), u64::from(l)) * (BigUint::from(1u32) << l)
                    }
                    OccupancyMode::General => {
                        binomial(u64::from(l + 2 * n - 1), u64::from(2 * n - 1))
                    }
                };
                if total != expected {
                    return Outcome::fail(format!("{mode} N={n} L={l}: {total} != {expected}"));
                }
                checked += 1;
            }
        }
    }
    Outcome::pass(format!("{checked} (N, L) pairs"))
}

fn asymptotics() -> Outcome {
    let grid = geometric_grid(2, 16384).unwrap();
    let mut notes = Vec::new();
    for kind in [CapacityKind::Quantum, CapacityKind::Classical] {
        let series = capacity_sweep(&grid, kind).unwrap();
        if let Some(w) = series
            .windows(2)
            .find(|w| w[1].bits_per_slot < w[0].bits_per_slot)
        {
            return Outcome::fail(format!(
                "{kind} drops between N={} and N={}",
                w[0].n_slots, w[1].n_slots
            ));
        }
        let top = series.last().unwrap();
        let gap = LOG2_3 - top.bits_per_slot;
        if !(0.0..=0.05).contains(&gap) {
            return Outcome::fail(format!(
                "{kind} at N={} is {gap} below log2(3)",
                top.n_slots
            ));
        }
        let fit = fit_asymptote(&series).unwrap();
        if !(0.74..=0.94).contains(&fit.exponent) {
            return Outcome::fail(format!("{kind} exponent {}", fit.exponent));
        }
        if kind == CapacityKind::Quantum && (top.avg_photons_per_slot - 2.0 / 3.0).abs() > 0.05 {
            return Outcome::fail(format!("quantum <L>/N = {}", top.avg_photons_per_slot));
        }
        notes.push(format!(
            "{kind}: gap {gap:.4}, exponent {:.3}",
            fit.exponent
        ));
    }
    Outcome::pass(notes.join("; "))
}

fn noiseless_property() -> Outcome {
    let guard = DimGuard(DimGuard::DEFAULT);
    let mut worst = 1.0f64;
    for (n, l, twice_j) in [(3, 3, 1), (4, 3, 1), (4, 4, 0)] {
        let key = SectorKey::from_twice(n, l, twice_j).unwrap();
        let mode = OccupancyMode::Restricted;
        let k = restricted_multiplicity(key).unwrap();
        let dim = usize::try_from(&k).unwrap();
        let psi = random_amplitudes(dim, 11, stream::STATE);
        let report = logical_fidelity_check(key, mode, &psi, 100, 11, guard).unwrap();
        if report.fidelities.len() != 100 {
            return Outcome::fail(format!("{key}: {} samples", report.fidelities.len()));
        }
        let f = report.min_fidelity();
        if f < 1.0 - 1e-9 {
            return Outcome::fail(format!("{key}: min fidelity {f}"));
        }
        worst = worst.min(f);
    }
    let two = restricted_multiplicity(SectorKey::from_twice(4, 4, 0).unwrap()).unwrap();
    if two != BigUint::from(2u32) {
        return Outcome::fail(format!("(4, 4, 0) logical dimension {two}"));
    }
    Outcome::pass(format!("worst fidelity {worst:.16}"))
}

fn twirl_convergence() -> Outcome {
    let guard = DimGuard(DimGuard::DEFAULT);
    let basis = Arc::new(FockBasis::capped(2, 2, OccupancyMode::General, guard).unwrap());
    let exact = ExactTwirl::new(Arc::clone(&basis), guard).unwrap();
    let seeds = 0..8u64;
    let (mut small, mut large, mut idempotence) = (0.0, 0.0, 0.0f64);
    for seed in seeds.clone() {
        let amps = random_amplitudes(basis.len(), seed, stream::STATE);
        let rho = DensityOperator::from_pure(&StateVector::new(Arc::clone(&basis), amps).unwrap());
        let target = exact.apply(&rho).unwrap();
        idempotence = idempotence.max(exact.apply(&target).unwrap().distance(&target));
        small += twirl_monte_carlo(&rho, 1_000, seed)
            .unwrap()
            .distance(&target);
        large += twirl_monte_carlo(&rho, 16_000, seed)
            .unwrap()
            .distance(&target);
    }
    let ratio = small / large;
    if !(2.0..=8.0).contains(&ratio) {
        return Outcome::fail(format!("distance ratio {ratio}"));
    }
    if idempotence > 1e-10 {
        return Outcome::fail(format!("idempotence error {idempotence}"));
    }
    Outcome::pass(format!(
        "ratio {ratio:.2} over {} seeds, idempotence {idempotence:.1e}",
        seeds.count()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 restricted table", table_one, Duration::from_secs(1)),
        ("2 general table", table_two, Duration::from_secs(1)),
        (
            "3 oracle triangle",
            oracle_triangle,
            Duration::from_secs(120),
        ),
        ("4 dimension sums", dimension_sums, Duration::from_secs(5)),
        ("5 asymptotics", asymptotics, Duration::from_secs(120)),
        (
            "6 noiseless subsystem",
            noiseless_property,
            Duration::from_secs(60),
        ),
        (
            "7 twirl convergence",
            twirl_convergence,
            Duration::from_secs(30),
        ),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.ok && elapsed > budget {
            outcome = Outcome::fail(format!(
                "{} but took {elapsed:.2?} (budget {budget:?})",
                outcome.detail
            ));
        }
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {} [{elapsed:.2?}]", outcome.detail);
        failed += usize::from(!outcome.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

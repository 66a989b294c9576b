//! `nss`: multiplicity tables, capacity sweeps, oracle checks and
//! collective-noise simulations from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use nss_core::capacity::{capacity_sweep, fit_asymptote, geometric_grid};
use nss_core::fock::{noiseless_basis, random_amplitudes, sector_multiplicity_numeric, stream};
use nss_core::multiplicity::{
    is_hybrid, multiplicity, oracle_multiplicity, restricted_multiplicity, sector_dimension,
    GeneralTable,
};
use nss_core::tables::{
    figure_csv, figure_points, parse_figure_csv, read_file, serialize_noiseless_basis, write_file,
    TableDocument, TableFormat,
};
use nss_core::{
    CapacityKind, DimGuard, FockBasis, MultiplicityTable, OccupancyMode, SectorKey, SpinLabel,
    VERSION,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nss",
    version,
    about = "Noiseless subsystems of multiphoton polarization states"
)]
struct Cli {
    /// Largest Fock basis any command may build.
    #[arg(long, global = true, env = "NSS_DIM_GUARD", default_value_t = DimGuard::DEFAULT)]
    dim_guard: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplicity table for all sectors up to the given bounds.
    Table(TableArgs),
    /// Multiplicity of a single (N, L, j) sector.
    Multiplicity(SectorArgs),
    /// Quantum and classical capacity per slot over a grid of N.
    Capacity(CapacityArgs),
    /// Power-law fit of a capacity series towards log2(3).
    Fit(FitArgs),
    /// Cross-check closed forms against weight counting and dimension sums.
    Verify(VerifyArgs),
    /// Encode a random logical state and push it through Haar-random collective noise.
    Simulate(SimulateArgs),
    /// Explicit noiseless basis of one sector as JSON.
    Basis(BasisArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Restricted,
    General,
}

impl From<ModeArg> for OccupancyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Restricted => OccupancyMode::Restricted,
            ModeArg::General => OccupancyMode::General,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Pretty,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
            FormatArg::Pretty => TableFormat::Pretty,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Quantum,
    Classical,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Restricted,
    General,
    Both,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::General)]
    mode: ModeArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_slots: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_photons: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SectorArgs {
    #[arg(long)]
    slots: u32,
    #[arg(long)]
    photons: u32,
    /// Twice the total spin.
    #[arg(long)]
    spin2: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::General)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct CapacityArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    kind: KindArg,
    /// `geometric:<start>:<stop>` or `list:a,b,c`.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Fit only this series; by default every series in the file is fitted.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    max_slots: u32,
    #[arg(long, default_value_t = 6)]
    max_photons: u32,
    #[arg(long, value_enum, default_value_t = VerifyMode::Both)]
    mode: VerifyMode,
    /// Also compare against operator-rank multiplicities.
    #[arg(long)]
    numeric: bool,
    /// Largest sector dimension handed to the numeric check.
    #[arg(long, default_value_t = 2000)]
    numeric_limit: usize,
    #[arg(long, hide = true, value_name = "N:L:SPIN2")]
    inject_fault: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sector: SectorArgs,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BasisArgs {
    #[command(flatten)]
    sector: SectorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let guard = DimGuard(cli.dim_guard);
    match cli.command {
        Command::Table(args) => cmd_table(args),
        Command::Multiplicity(args) => cmd_multiplicity(args),
        Command::Capacity(args) => cmd_capacity(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Verify(args) => cmd_verify(args, guard),
        Command::Simulate(args) => cmd_simulate(args, guard),
        Command::Basis(args) => cmd_basis(args, guard),
    }
}

fn invocation() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn header_lines(seed: Option<u64>) -> String {
    let mut s = format!("# nss {VERSION}\n# args: {}\n", invocation());
    if let Some(seed) = seed {
        s.push_str(&format!("# seed: {seed}\n"));
    }
    s
}

fn generator(seed: Option<u64>) -> serde_json::Value {
    let mut g = json!({
        "program": "nss",
        "version": VERSION,
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
    });
    if let Some(seed) = seed {
        g["seed"] = json!(seed);
    }
    g
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sector_key(args: &SectorArgs) -> Result<(SectorKey, OccupancyMode)> {
    let key = SectorKey::from_twice(args.slots, args.photons, args.spin2)?;
    let mode = OccupancyMode::from(args.mode);
    key.check_mode(mode)?;
    Ok((key, mode))
}

fn cmd_table(args: TableArgs) -> Result<ExitCode> {
    let doc = TableDocument::build(args.mode.into(), args.max_slots, args.max_photons)?;
    let text = match args.format {
        FormatArg::Json => {
            let mut value = doc.to_json();
            value["generator"] = generator(None);
            let mut s = serde_json::to_string_pretty(&value)?;
            s.push('\n');
            s
        }
        other => header_lines(None) + &doc.render(other.into()),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_multiplicity(args: SectorArgs) -> Result<ExitCode> {
    let (key, mode) = sector_key(&args)?;
    let k = multiplicity(key, mode)?;
    let (n, l) = (key.n_slots(), key.photons());
    let group_bound = match mode {
        OccupancyMode::Restricted => n,
        OccupancyMode::General => l.max(1),
    };
    let table = MultiplicityTable::build(mode, n, group_bound)?;
    let optimal = table.get(&key).is_some_and(|e| e.optimal);
    println!("multiplicity {k}");
    println!("pure_phase {}", key.is_pure_phase());
    println!("optimal {optimal}");
    println!("hybrid {}", is_hybrid(n, l, mode)?);
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(spec: &str) -> Result<Vec<u32>> {
    let malformed =
        || anyhow!("malformed grid {spec:?}: expected geometric:<start>:<stop> or list:a,b,c");
    let (kind, rest) = spec.split_once(':').ok_or_else(malformed)?;
    match kind {
        "geometric" => {
            let (a, b) = rest.split_once(':').ok_or_else(malformed)?;
            let start = a.parse().map_err(|_| malformed())?;
            let stop = b.parse().map_err(|_| malformed())?;
            Ok(geometric_grid(start, stop)?)
        }
        "list" => rest
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| malformed()))
            .collect(),
        _ => Err(malformed()),
    }
}

fn cmd_capacity(args: CapacityArgs) -> Result<ExitCode> {
    let grid = parse_grid(&args.grid)?;
    let points = match args.kind {
        KindArg::Quantum => capacity_sweep(&grid, CapacityKind::Quantum)?,
        KindArg::Classical => capacity_sweep(&grid, CapacityKind::Classical)?,
        KindArg::Both => figure_points(&grid)?,
    };
    emit(
        args.out.as_deref(),
        &(header_lines(None) + &figure_csv(&points)),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(args: FitArgs) -> Result<ExitCode> {
    let text = read_file(&args.input)?;
    let points = parse_figure_csv(&text)?;
    let kinds: &[CapacityKind] = match args.kind {
        Some(KindArg::Quantum) => &[CapacityKind::Quantum],
        Some(KindArg::Classical) => &[CapacityKind::Classical],
        Some(KindArg::Both) | None => &[CapacityKind::Quantum, CapacityKind::Classical],
    };
    let mut rows = Vec::new();
    for &kind in kinds {
        let series: Vec<_> = points.iter().filter(|p| p.kind == kind).cloned().collect();
        if series.is_empty() && args.kind.is_none() {
            continue;
        }
        let fit = fit_asymptote(&series).with_context(|| format!("{kind} series"))?;
        rows.push(format!(
            "{kind},{:?},{:?},{:?},{:?}",
            fit.limit, fit.amplitude, fit.exponent, fit.residual
        ));
    }
    if rows.is_empty() {
        bail!("{} holds no capacity points", args.input.display());
    }
    println!("kind,limit,amplitude,exponent,residual");
    for row in rows {
        println!("{row}");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_fault(spec: &str) -> Result<SectorKey> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [n, l, t] = parts[..] else {
        bail!("fault must be N:L:SPIN2, got {spec:?}");
    };
    let parse = |s: &str| {
        s.parse::<u32>()
            .with_context(|| format!("fault field {s:?}"))
    };
    Ok(SectorKey::from_twice(parse(n)?, parse(l)?, parse(t)?)?)
}

struct Verifier {
    numeric: bool,
    numeric_limit: usize,
    guard: DimGuard,
    checked: usize,
    failures: Vec<String>,
}

impl Verifier {
    fn check_sector(&mut self, key: SectorKey, mode: OccupancyMode, value: &BigUint) -> Result<()> {
        self.checked += 1;
        let oracle = oracle_multiplicity(key, mode)?;
        if *value != oracle {
            self.failures.push(format!(
                "{mode} N={} L={} 2j={}: closed form {value}, weight count {oracle}",
                key.n_slots(),
                key.photons(),
                key.spin().twice()
            ));
        }
        let dim = sector_dimension(key.n_slots(), key.photons(), mode);
        if self.numeric && dim <= BigUint::from(self.numeric_limit) {
            let numeric = sector_multiplicity_numeric(key, mode, self.guard)?;
            if BigUint::from(numeric) != *value {
                self.failures.push(format!(
                    "{mode} N={} L={} 2j={}: closed form {value}, operator rank {numeric}",
                    key.n_slots(),
                    key.photons(),
                    key.spin().twice()
                ));
            }
        }
        Ok(())
    }

    fn check_dimension(
        &mut self,
        n: u32,
        l: u32,
        mode: OccupancyMode,
        values: &[(SpinLabel, BigUint)],
    ) {
        let total: BigUint = values.iter().map(|(s, k)| k * s.dim()).sum();
        let expected = sector_dimension(n, l, mode);
        if total != expected {
            self.failures.push(format!(
                "{mode} N={n} L={l}: sum (2j+1)K = {total}, sector dimension {expected}"
            ));
        }
    }

    fn restricted(&mut self, max_slots: u32, max_photons: u32) -> Result<()> {
        let mode = OccupancyMode::Restricted;
        for n in 1..=max_slots {
            for l in 0..=n.min(max_photons) {
                let mut values = Vec::new();
                for spin in SpinLabel::allowed_descending(l) {
                    let key = SectorKey::new(n, l, spin)?;
                    let k = restricted_multiplicity(key)?;
                    self.check_sector(key, mode, &k)?;
                    values.push((spin, k));
                }
                self.check_dimension(n, l, mode, &values);
            }
        }
        Ok(())
    }

    fn general(&mut self, table: &GeneralTable) -> Result<()> {
        let mode = OccupancyMode::General;
        for n in 1..=table.max_slots() {
            for l in 0..=table.max_photons() {
                let mut values = Vec::new();
                for spin in SpinLabel::allowed_descending(l) {
                    let key = SectorKey::new(n, l, spin)?;
                    let k = table
                        .get(key)
                        .cloned()
                        .ok_or_else(|| anyhow!("{key} missing from the memo"))?;
                    self.check_sector(key, mode, &k)?;
                    values.push((spin, k));
                }
                self.check_dimension(n, l, mode, &values);
            }
        }
        Ok(())
    }
}

fn cmd_verify(args: VerifyArgs, guard: DimGuard) -> Result<ExitCode> {
    if args.max_slots == 0 {
        bail!("--max-slots must be at least 1");
    }
    let fault = args.inject_fault.as_deref().map(parse_fault).transpose()?;
    if fault.is_some() && args.mode == VerifyMode::Restricted {
        bail!("fault injection targets the general-occupancy memo");
    }
    let mut v = Verifier {
        numeric: args.numeric,
        numeric_limit: args.numeric_limit,
        guard,
        checked: 0,
        failures: Vec::new(),
    };
    if args.mode != VerifyMode::General {
        v.restricted(args.max_slots, args.max_photons)?;
    }
    if args.mode != VerifyMode::Restricted {
        let mut table = GeneralTable::build(args.max_slots, args.max_photons)?;
        if let Some(key) = fault {
            table.perturb_entry(key, 1)?;
        }
        v.general(&table)?;
    }
    if v.failures.is_empty() {
        println!("ok: {} sectors verified", v.checked);
        return Ok(ExitCode::SUCCESS);
    }
    for f in &v.failures {
        println!("FAIL {f}");
    }
    println!("{} failures in {} sectors", v.failures.len(), v.checked);
    Ok(ExitCode::from(EXIT_VERIFY))
}

fn check_dimension_guard(key: SectorKey, mode: OccupancyMode, guard: DimGuard) -> Result<()> {
    let size = FockBasis::closed_form_size(
        key.n_slots(),
        nss_core::PhotonRange::Exactly(key.photons()),
        mode,
    );
    guard.check(&size)?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, guard: DimGuard) -> Result<ExitCode> {
    let (key, mode) = sector_key(&args.sector)?;
    check_dimension_guard(key, mode, guard)?;
    let logical_dim = usize::try_from(&multiplicity(key, mode)?)
        .context("logical dimension does not fit in memory")?;
    if logical_dim == 0 {
        bail!("sector {key} is empty in {mode} mode");
    }
    let logical = random_amplitudes(logical_dim, args.seed, stream::STATE);
    let report = nss_core::fock::logical_fidelity_check(
        key,
        mode,
        &logical,
        args.samples,
        args.seed,
        guard,
    )?;
    print!("{}", header_lines(Some(args.seed)));
    println!(
        "sector N={} L={} j={} mode={mode}",
        key.n_slots(),
        key.photons(),
        key.spin()
    );
    println!("logical_dim {logical_dim}");
    println!("samples {}", args.samples);
    println!("min_fidelity {:?}", report.min_fidelity());
    println!("mean_fidelity {:?}", report.mean_fidelity());
    println!("max_leakage {:?}", report.max_leakage());
    Ok(ExitCode::SUCCESS)
}

fn cmd_basis(args: BasisArgs, guard: DimGuard) -> Result<ExitCode> {
    let (key, mode) = sector_key(&args.sector)?;
    check_dimension_guard(key, mode, guard)?;
    let nb = noiseless_basis(key, mode, guard)?;
    let text = serialize_noiseless_basis(&nb, Some(generator(None)));
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

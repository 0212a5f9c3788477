//! Command-line front end for the `wigner` binary.
//!
//! Results go to stdout as `key=value` lines; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::check::CheckSuite;
use crate::error::{Error, Result};
use crate::expectations::{
    expectation, negativity_volume, normalization, p_marginal, purity, q_marginal,
};
use crate::field::{FieldKind, PhaseSpaceField};
use crate::grid::GridSpec;
use crate::io::{self, FieldFile};
use crate::render::{render_ascii, render_ppm};
use crate::state::{
    cat_state, coherent_state, oscillator_eigenstate, pure_projector, thermal_oscillator_kernel,
    DensityKernel, OperatorKernel, Oscillator, SampledWavefunction,
};
use crate::transform::{PhaseConvention, WignerTransform};

pub const THREADS_VAR: &str = "WPSF_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONTAINMENT: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_GRID_MISMATCH: i32 = 5;
pub const EXIT_KIND_MISMATCH: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "wigner",
    version,
    about = "Wigner functions and Weyl symbols on a phase-space grid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a state and write it as a wavefunction CSV or kernel dump.
    State(StateArgs),
    /// Compute the Wigner function of a wavefunction or kernel.
    Wigner(WignerArgs),
    /// Compute the Weyl symbol of an operator kernel dump.
    Symbol(SymbolArgs),
    /// Phase-space expectation value of an observable.
    Expect(ExpectArgs),
    /// Render a field as a PPM heatmap or an ASCII preview.
    Render(RenderArgs),
    /// Run the built-in identity checks.
    Check(CheckArgs),
    /// Write the position and momentum marginals of a Wigner function.
    Marginals(MarginalArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StateKind {
    Fock,
    Coherent,
    Cat,
    Thermal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Observable {
    Q,
    Q2,
    P2,
    H,
}

#[derive(Debug, Args)]
struct OscillatorArgs {
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl OscillatorArgs {
    fn oscillator(&self) -> Result<Oscillator> {
        Oscillator::new(self.mass, self.omega)
    }
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Oscillator level for `fock`.
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    q0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p0: f64,
    /// Relative phase of the cat superposition.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,
    /// Inverse temperature for `thermal`.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[command(flatten)]
    oscillator: OscillatorArgs,
    /// Position grid as `n_q:q_min:q_max`.
    #[arg(long, default_value = "256:-8:8", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Write a density-kernel dump even for pure states.
    #[arg(long)]
    kernel: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct WignerArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// ħ for wavefunction CSV input; kernel dumps carry their own.
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Expected grid of a wavefunction CSV, as `n_q:q_min:q_max`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct SymbolArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExpectArgs {
    #[arg(long)]
    wigner: PathBuf,
    /// Weyl symbol field file.
    #[arg(long, conflicts_with = "obs", required_unless_present = "obs")]
    symbol: Option<PathBuf>,
    /// Built-in observable.
    #[arg(long, value_enum)]
    obs: Option<Observable>,
    #[command(flatten)]
    oscillator: OscillatorArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write an 80-column text preview instead of a PPM image.
    #[arg(long)]
    ascii: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Grid as `n_q:q_min:q_max`; defaults to 64 samples over ±8·√ħ.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Flip the sign of the Fourier phase to exercise the failure path.
    #[arg(long, hide = true)]
    break_phase: bool,
}

#[derive(Debug, Args)]
struct MarginalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_q: PathBuf,
    #[arg(long)]
    out_p: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let transform = WignerTransform::new().threads(threads);
    let mut stdout = std::io::stdout().lock();
    let result = match cli.command {
        Command::State(a) => cmd_state(&a, &mut stdout),
        Command::Wigner(a) => cmd_wigner(&a, &transform, &mut stdout),
        Command::Symbol(a) => cmd_symbol(&a, &transform, &mut stdout),
        Command::Expect(a) => cmd_expect(&a, &mut stdout),
        Command::Render(a) => cmd_render(&a, &mut stdout),
        Command::Check(a) => cmd_check(&a, transform, &mut stdout),
        Command::Marginals(a) => cmd_marginals(&a, &mut stdout),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            failure.code
        }
    }
}

fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{THREADS_VAR}: {e}")),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got `{s}`"
            )),
        },
    }
}

struct Failure {
    error: Error,
    code: i32,
}

type CmdResult = std::result::Result<i32, Failure>;

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidGrid(_) | Error::InvalidState(_) => EXIT_USAGE,
        Error::Containment { .. } => EXIT_CONTAINMENT,
        Error::NotHermitian { .. } | Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::GridMismatch => EXIT_GRID_MISMATCH,
        Error::KindMismatch { .. } => EXIT_KIND_MISMATCH,
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = exit_code(&error);
        Failure { error, code }
    }
}

/// Reclassifies validation errors on file contents as parse errors.
fn from_input(error: Error) -> Failure {
    let code = match error {
        Error::InvalidGrid(_) | Error::InvalidState(_) => EXIT_PARSE,
        ref e => exit_code(e),
    };
    Failure { error, code }
}

fn io_at(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        error: Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )),
        code: EXIT_PARSE,
    }
}

fn create(path: &Path) -> std::result::Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_at(path, e))
}

fn read_bytes(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| io_at(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> std::result::Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| io_at(path, e))
}

fn read_field_file(path: &Path) -> std::result::Result<FieldFile, Failure> {
    FieldFile::from_bytes(&read_bytes(path)?).map_err(from_input)
}

fn read_field(path: &Path) -> std::result::Result<PhaseSpaceField, Failure> {
    read_field_file(path)?.into_field().map_err(from_input)
}

fn emit(out: &mut impl Write, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}={value}");
}

fn cmd_state(a: &StateArgs, out: &mut impl Write) -> CmdResult {
    let grid = GridSpec::parse_triplet(&a.grid, a.hbar)?;
    let osc = a.oscillator.oscillator()?;
    let pure = match a.kind {
        StateKind::Fock => Some(oscillator_eigenstate(&grid, a.n, &osc)?),
        StateKind::Coherent => Some(coherent_state(&grid, a.q0, a.p0, &osc)?),
        StateKind::Cat => Some(cat_state(&grid, a.q0, a.p0, a.phase, &osc)?),
        StateKind::Thermal => None,
    };
    match pure {
        Some(psi) if !a.kernel => {
            let mut w = create(&a.out)?;
            io::write_wavefunction(&mut w, &psi)?;
            w.flush().map_err(|e| io_at(&a.out, e))?;
            emit(out, "rows", grid.n_q());
            emit(out, "norm", fixed(psi.norm_sqr()));
        }
        pure => {
            let rho = match pure {
                Some(psi) => pure_projector(&psi),
                None => thermal_oscillator_kernel(&grid, &osc, a.beta)?,
            };
            write_bytes(&a.out, &io::kernel_to_bytes(&rho)?)?;
            emit(out, "rows", grid.n_q());
            emit(out, "trace", fixed(rho.trace()));
        }
    }
    Ok(EXIT_OK)
}

fn load_wavefunction(
    a: &WignerArgs,
    bytes: &[u8],
) -> std::result::Result<SampledWavefunction, Failure> {
    let samples = io::read_wavefunction(bytes).map_err(from_input)?;
    let grid = match &a.grid {
        Some(text) => {
            let grid = GridSpec::parse_triplet(text, a.hbar)?;
            samples.check_axis(&grid).map_err(|e| Failure {
                code: EXIT_GRID_MISMATCH,
                error: Error::Parse(format!("input does not match --grid: {e}")),
            })?;
            grid
        }
        None => samples.infer_grid(a.hbar).map_err(from_input)?,
    };
    // Shape errors are parse errors; a truncated state is a containment error.
    SampledWavefunction::from_samples_unchecked(grid, samples.values)
        .map_err(from_input)
        .and_then(|psi| {
            psi.check_containment()?;
            Ok(psi)
        })
}

fn cmd_wigner(a: &WignerArgs, t: &WignerTransform, out: &mut impl Write) -> CmdResult {
    let bytes = read_bytes(&a.input)?;
    let w = if bytes.starts_with(io::MAGIC) {
        match FieldFile::from_bytes(&bytes).map_err(from_input)? {
            FieldFile::Kernel { grid, values } => {
                let rho = DensityKernel::from_values(grid, values).map_err(from_input)?;
                t.wigner_of_kernel(&rho)?
            }
            FieldFile::Field(_) => {
                return Err(from_input(Error::Parse(
                    "input is already a phase-space field".into(),
                )))
            }
        }
    } else {
        t.wigner_of_wavefunction(&load_wavefunction(a, &bytes)?)?
    };
    write_bytes(&a.out, &io::field_to_bytes(&w)?)?;
    emit(out, "norm", fixed(normalization(&w)?));
    emit(out, "purity", fixed(purity(&w)?));
    emit(out, "negativity", fixed(negativity_volume(&w)?));
    emit(out, "min_w", fixed(w.min_re()));
    emit(out, "max_w", fixed(w.max_re()));
    Ok(EXIT_OK)
}

fn cmd_symbol(a: &SymbolArgs, t: &WignerTransform, out: &mut impl Write) -> CmdResult {
    let (grid, values) = match read_field_file(&a.input)? {
        FieldFile::Kernel { grid, values } => (grid, values),
        FieldFile::Field(_) => {
            return Err(from_input(Error::Parse(
                "expected an operator kernel dump".into(),
            )))
        }
    };
    let op = OperatorKernel::new(grid, values, false).map_err(from_input)?;
    let symbol = t.weyl_symbol(&op)?;
    write_bytes(&a.out, &io::field_to_bytes(&symbol)?)?;
    emit(out, "trace", fixed(op.trace().re));
    emit(out, "max_imag", format!("{:.3e}", symbol.max_imag()));
    Ok(EXIT_OK)
}

fn builtin_symbol(obs: Observable, grid: GridSpec, osc: &Oscillator) -> PhaseSpaceField {
    let (m, w) = (osc.mass, osc.omega);
    let f: Box<dyn Fn(f64, f64) -> f64> = match obs {
        Observable::Q => Box::new(|q, _| q),
        Observable::Q2 => Box::new(|q, _| q * q),
        Observable::P2 => Box::new(|_, p| p * p),
        Observable::H => Box::new(move |q, p| p * p / (2.0 * m) + 0.5 * m * w * w * q * q),
    };
    PhaseSpaceField::from_fn(grid, FieldKind::WeylSymbol, f)
}

fn cmd_expect(a: &ExpectArgs, out: &mut impl Write) -> CmdResult {
    let w = read_field(&a.wigner)?;
    let symbol = match (&a.symbol, a.obs) {
        (Some(path), _) => read_field(path)?,
        (None, Some(obs)) => builtin_symbol(obs, *w.grid(), &a.oscillator.oscillator()?),
        (None, None) => unreachable!("clap requires one of --symbol or --obs"),
    };
    emit(
        out,
        "expectation",
        format!("{:.12e}", expectation(&w, &symbol)?),
    );
    Ok(EXIT_OK)
}

fn cmd_render(a: &RenderArgs, out: &mut impl Write) -> CmdResult {
    let field = read_field(&a.input)?;
    if a.ascii {
        write_bytes(&a.out, render_ascii(&field).as_bytes())?;
        emit(out, "format", "ascii");
    } else {
        write_bytes(&a.out, &render_ppm(&field))?;
        emit(out, "format", "ppm");
        emit(out, "width", field.grid().n_q());
        emit(out, "height", field.grid().n_p());
    }
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs, t: WignerTransform, out: &mut impl Write) -> CmdResult {
    let suite = match &a.grid {
        Some(text) => CheckSuite::new(GridSpec::parse_triplet(text, a.hbar)?),
        None => CheckSuite::with_hbar(a.hbar)?,
    };
    let phase = if a.break_phase {
        PhaseConvention::Reversed
    } else {
        PhaseConvention::Standard
    };
    let outcomes = suite.transform(t.phase(phase)).run()?;
    let mut failed = 0;
    for o in &outcomes {
        emit(
            out,
            &format!("check.{}", o.name),
            if o.passed { "pass" } else { "fail" },
        );
        if !o.passed {
            failed += 1;
            eprintln!("FAIL {}: {}", o.name, o.detail);
        }
    }
    emit(out, "checks", outcomes.len());
    emit(out, "failed", failed);
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_marginals(a: &MarginalArgs, out: &mut impl Write) -> CmdResult {
    let w = read_field(&a.input)?;
    let mq = q_marginal(&w)?;
    let mp = p_marginal(&w)?;
    let mut fq = create(&a.out_q)?;
    io::write_series(&mut fq, &mq.axis, &mq.values)?;
    fq.flush().map_err(|e| io_at(&a.out_q, e))?;
    let mut fp = create(&a.out_p)?;
    io::write_series(&mut fp, &mp.axis, &mp.values)?;
    fp.flush().map_err(|e| io_at(&a.out_p, e))?;
    emit(out, "q_total", fixed(mq.total()));
    emit(out, "p_total", fixed(mp.total()));
    Ok(EXIT_OK)
}

/// Six decimals, without a negative sign on values that round to zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        s[1..].to_string()
    } else {
        s
    }
}

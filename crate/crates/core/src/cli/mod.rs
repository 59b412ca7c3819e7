//! Command-line front end.
//!
//! Exit codes: 0 success, 2 solver or check failure, 3 ambiguous transport,
//! 4 bad flags. Output files go to `--out-dir`, else `$SPHEROIDAL_OUT_DIR`,
//! else the working directory, and are written atomically.

pub mod svg;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classical::{
    self, action_i, classify_critical_point, critical_values, integrate_flow, pinched_torus,
    ClassicalError, CriticalKind2D, EuclideanState, FlowConfig, Hamiltonian, SystemParams,
};
use crate::lattice::{
    build_joint_spectrum, count_negative, monodromy, JointSpectrum, LatticeError, MonodromyReport,
    Orientation, SymmetrySelector,
};
use crate::spectral::{Parity, SpectralConfig};

pub const OUT_DIR_ENV: &str = "SPHEROIDAL_OUT_DIR";

/// Fewest negative `m = 0` states for which a loop around the origin is attempted.
pub const MIN_NEGATIVE_STATES: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "spheroidal", version, about = "Joint spectrum, quantum monodromy and classical analysis of prolate spheroidal harmonics")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Relative eigenvalue tolerance of the spectral solver.
    #[arg(long, global = true)]
    pub eig_tol: Option<f64>,
    /// Coefficient tail tolerance of the spectral solver.
    #[arg(long, global = true)]
    pub tail_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint spectrum (m, g) as CSV, optionally with an SVG scatter plot.
    Spectrum(SpectrumArgs),
    /// Monodromy matrix of the joint spectrum around the origin.
    Monodromy(MonodromyArgs),
    /// Classical integrable system.
    #[command(subcommand)]
    Classical(ClassicalCommand),
    /// Run built-in consistency checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Largest |m|; defaults to ceil(1.5 gamma) + 4.
    #[arg(long)]
    pub mmax: Option<i64>,
    /// Largest l; defaults to mmax + 10.
    #[arg(long)]
    pub lmax: Option<i64>,
    /// Adds columns (hbar m, hbar^2 g).
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Output CSV path (default: spectrum.csv in the output directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG scatter plot next to the CSV.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SymmetryArg {
    All,
    S2even,
    S2odd,
    /// l - m even, m even
    ParityEe,
    /// l - m even, m odd
    ParityEo,
    /// l - m odd, m even
    ParityOe,
    /// l - m odd, m odd
    ParityOo,
}

impl SymmetryArg {
    pub fn selector(self) -> SymmetrySelector {
        let p = |lm, m| SymmetrySelector::Parity { lm, m };
        match self {
            SymmetryArg::All => SymmetrySelector::All,
            SymmetryArg::S2even => SymmetrySelector::S2Even,
            SymmetryArg::S2odd => SymmetrySelector::S2Odd,
            SymmetryArg::ParityEe => p(Parity::Even, Parity::Even),
            SymmetryArg::ParityEo => p(Parity::Even, Parity::Odd),
            SymmetryArg::ParityOe => p(Parity::Odd, Parity::Even),
            SymmetryArg::ParityOo => p(Parity::Odd, Parity::Odd),
        }
    }
}

#[derive(Debug, Args)]
pub struct MonodromyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub symmetry: SymmetryArg,
    /// Traverse the loop clockwise.
    #[arg(long)]
    pub clockwise: bool,
    #[arg(long)]
    pub mmax: Option<i64>,
    #[arg(long)]
    pub lmax: Option<i64>,
    /// Output JSON path (default: monodromy.json); the SVG goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Sets E = 1/2 and a = gamma; overrides --energy and --a.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
}

impl SystemArgs {
    fn params(&self) -> Result<SystemParams, ClassicalError> {
        match self.gamma {
            Some(g) => SystemParams::unit_speed(g),
            None => SystemParams::new(self.energy, self.a),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PointArg {
    Pole,
    Equator,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FlowArg {
    G,
    Lz,
}

#[derive(Debug, Subcommand)]
pub enum ClassicalCommand {
    /// Critical values of (Lz, G): boundary parabola and the isolated origin.
    Bifurcation {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        mmax: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the flow of G or Lz from a given (P, L).
    Orbit {
        #[command(flatten)]
        system: SystemArgs,
        /// P as px,py,pz; rescaled to |P| = sqrt(2E).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..=3, required = true)]
        p: Vec<f64>,
        /// L as lx,ly,lz; its component along P is removed.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 1..=3, required = true)]
        l: Vec<f64>,
        #[arg(long, value_enum, default_value = "g")]
        flow: FlowArg,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10)]
        record_every: usize,
        #[arg(long, default_value_t = 1e-6)]
        drift_bound: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Action I(m, g).
    Action {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
    },
    /// Linear stability at a pole or an equatorial relative equilibrium.
    Classify {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum)]
        point: PointArg,
        /// Multiplier of the Lz flow; fitted at the equator, 1 at the pole if omitted.
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        /// Angular momentum at the equator.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        m: f64,
    },
    /// Sample the singular fibre over the origin.
    Pinched {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 41)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Asymptotics,
    Brackets,
    All,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Transport(String),
    #[error("{0}")]
    BadFlags(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("validation failed")]
    Validation,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Transport(_) => 3,
            CliError::BadFlags(_) => 4,
            _ => 2,
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::OffLattice { .. }
            | LatticeError::AmbiguousSnap { .. }
            | LatticeError::NonIntegral
            | LatticeError::DegenerateCell
            | LatticeError::LoopNotClosed
            | LatticeError::BadAnchorStep { .. } => CliError::Transport(e.to_string()),
            LatticeError::InvalidRange { .. } => CliError::BadFlags(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<ClassicalError> for CliError {
    fn from(e: ClassicalError) -> Self {
        match e {
            ClassicalError::Energy(_)
            | ClassicalError::FocalDistance(_)
            | ClassicalError::TimeStep(_)
            | ClassicalError::BetaRequired
            | ClassicalError::WrongBeta { .. }
            | ClassicalError::BelowBoundary { .. }
            | ClassicalError::PzRange { .. } => CliError::BadFlags(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

struct Context {
    out_dir: PathBuf,
    spectral: SpectralConfig,
}

impl Context {
    fn path(&self, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.out_dir.join(default))
    }
}

fn default_mmax(gamma: f64) -> i64 {
    (1.5 * gamma).ceil() as i64 + 4
}

fn spectrum_bounds(gamma: f64, mmax: Option<i64>, lmax: Option<i64>) -> Result<(i64, i64), CliError> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(CliError::BadFlags(format!("gamma must be finite and non-negative, got {gamma}")));
    }
    let m = mmax.unwrap_or_else(|| default_mmax(gamma));
    let l = lmax.unwrap_or(m + 10);
    if m < 0 || l < m {
        return Err(CliError::BadFlags(format!("need lmax >= mmax >= 0, got mmax={m}, lmax={l}")));
    }
    Ok((m, l))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn spectrum_svg(spectrum: &JointSpectrum, hbar: f64) -> String {
    let pts = spectrum.scaled(hbar);
    let mut plot = svg::Plot::covering(&pts, "hbar m", "hbar^2 g");
    if let Some((lo, hi)) = spectrum.m_range() {
        let gamma = spectrum.gamma;
        let curve: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let m = lo as f64 + (hi - lo) as f64 * i as f64 / 200.0;
                (hbar * m, hbar * hbar * (m * m - gamma * gamma))
            })
            .collect();
        plot.polyline(&curve, "red", 1.5);
    }
    plot.points(&pts, 2.0, "black");
    plot.render()
}

fn cmd_spectrum(ctx: &Context, a: &SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (mmax, lmax) = spectrum_bounds(a.gamma, a.mmax, a.lmax)?;
    if let Some(h) = a.hbar {
        if !(h.is_finite() && h > 0.0) {
            return Err(CliError::BadFlags(format!("hbar must be positive, got {h}")));
        }
    }
    let spectrum = build_joint_spectrum(a.gamma, mmax, lmax, &ctx.spectral)?;
    let csv = match a.hbar {
        None => spectrum.to_csv(),
        Some(h) => {
            let base = spectrum.to_csv();
            let mut lines = base.lines();
            let mut s = format!("{},hbar_m,hbar2_g\n", lines.next().unwrap_or_default());
            for (line, (x, y)) in lines.zip(spectrum.scaled(h)) {
                s.push_str(&format!("{line},{x:.16e},{y:.16e}\n"));
            }
            s
        }
    };
    let path = ctx.path(&a.out, "spectrum.csv");
    write_atomic(&path, &csv)?;
    let _ = writeln!(out, "{}", path.display());
    if a.svg {
        let svg_path = path.with_extension("svg");
        write_atomic(&svg_path, &spectrum_svg(&spectrum, a.hbar.unwrap_or(1.0)))?;
        let _ = writeln!(out, "{}", svg_path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct MonodromyOutput {
    symmetry: SymmetrySelector,
    orientation: Orientation,
    negative_states: usize,
    #[serde(flatten)]
    report: MonodromyReport,
}

fn cmd_monodromy(ctx: &Context, a: &MonodromyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mmax = a.mmax.or_else(|| Some(default_mmax(a.gamma)));
    let (mmax, lmax) = spectrum_bounds(a.gamma, mmax, a.lmax)?;
    let spectrum = build_joint_spectrum(a.gamma, mmax, lmax, &ctx.spectral)?;
    let negative = count_negative(&spectrum)?;
    if negative < MIN_NEGATIVE_STATES {
        return Err(LatticeError::TooFewNegative(negative).into());
    }
    let selector = a.symmetry.selector();
    let orientation = if a.clockwise { Orientation::Clockwise } else { Orientation::Counterclockwise };
    let (result, anchors, l_star) = monodromy(&spectrum, selector, orientation)?;
    let report = MonodromyOutput {
        symmetry: selector,
        orientation,
        negative_states: negative,
        report: MonodromyReport::new(a.gamma, l_star, &result, anchors.clone()),
    };
    let text = json(&report);
    let path = ctx.path(&a.out, "monodromy.json");
    write_atomic(&path, &text)?;

    let sub = crate::lattice::filter_symmetry(&spectrum, selector);
    let pts: Vec<(f64, f64)> = sub.points.iter().map(|p| (p.m as f64, p.g)).collect();
    let mut plot = svg::Plot::covering(&pts, "m", "g");
    plot.points(&pts, 2.0, "black");
    let path_pts: Vec<(f64, f64)> = anchors.iter().map(|x| (x.m as f64, x.g)).collect();
    plot.polyline(&path_pts, "red", 1.5);
    for (k, cell) in result.trace.iter().enumerate() {
        let corners: Option<Vec<(f64, f64)>> = cell
            .corners
            .iter()
            .map(|&(m, l)| sub.get(m, l).map(|g| (m as f64, g)))
            .collect();
        if let Some(c) = corners {
            let color = if k == 0 { "blue" } else { "green" };
            plot.polygon(&c, color, 0.15);
        }
    }
    write_atomic(&path.with_extension("svg"), &plot.render())?;
    let _ = out.write_all(text.as_bytes());
    Ok(())
}

fn normalize_state(p: &[f64], l: &[f64], params: &SystemParams) -> Result<EuclideanState, CliError> {
    if p.len() != 3 || l.len() != 3 {
        return Err(CliError::BadFlags("--p and --l take three components each".into()));
    }
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::BadFlags("P must be a non-zero finite vector".into()));
    }
    let s = params.speed() / norm;
    let p = [p[0] * s, p[1] * s, p[2] * s];
    let k = (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) / (params.speed() * params.speed());
    let l = [l[0] - k * p[0], l[1] - k * p[1], l[2] - k * p[2]];
    Ok(EuclideanState::new(p, l))
}

#[derive(Serialize)]
struct ActionOutput {
    m: f64,
    g: f64,
    gamma: f64,
    action: f64,
}

#[derive(Serialize)]
struct ClassifyOutput {
    point: &'static str,
    energy: f64,
    a: f64,
    kind: classical::CriticalKind,
    beta: Option<f64>,
    residual: f64,
    /// `[re, im]` pairs.
    eigenvalues: Vec<[f64; 2]>,
}

fn cmd_classical(ctx: &Context, c: &ClassicalCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        ClassicalCommand::Bifurcation { system, mmax, samples, out: file } => {
            let params = system.params()?;
            let m_max = mmax.unwrap_or(1.5 * params.gamma() + 2.0);
            let d = critical_values(&params, m_max, *samples);
            let path = ctx.path(file, "bifurcation.csv");
            write_atomic(&path, &d.to_csv())?;
            let curve: Vec<(f64, f64)> = d
                .points
                .iter()
                .filter(|p| p.0 == CriticalKind2D::Boundary)
                .map(|p| (p.1, p.2))
                .collect();
            let mut plot = svg::Plot::covering(&curve, "m", "g");
            plot.polyline(&curve, "black", 1.5);
            plot.points(&[(0.0, 0.0)], 4.0, "red");
            write_atomic(&path.with_extension("svg"), &plot.render())?;
            let _ = writeln!(out, "{}", path.display());
        }
        ClassicalCommand::Orbit { system, p, l, flow, t, dt, record_every, drift_bound, out: file } => {
            let params = system.params()?;
            let state = normalize_state(p, l, &params)?;
            let ham = match flow {
                FlowArg::G => Hamiltonian::G,
                FlowArg::Lz => Hamiltonian::Lz,
            };
            let cfg = FlowConfig { dt: *dt, t_end: *t, record_every: *record_every, drift_bound: *drift_bound };
            let traj = integrate_flow(&state, ham, &params, &cfg)?;
            let path = ctx.path(file, "orbit.csv");
            write_atomic(&path, &traj.to_csv())?;
            let _ = writeln!(out, "{}", path.display());
        }
        ClassicalCommand::Action { system, m, g } => {
            let params = system.params()?;
            let action = action_i(*m, *g, &params)?;
            let _ = out.write_all(json(&ActionOutput { m: *m, g: *g, gamma: params.gamma(), action }).as_bytes());
        }
        ClassicalCommand::Classify { system, point, beta, m } => {
            let params = system.params()?;
            let (name, state, beta) = match point {
                PointArg::Pole => (
                    "pole",
                    EuclideanState::new([0.0, 0.0, params.speed()], [0.0; 3]),
                    Some(beta.unwrap_or(1.0)),
                ),
                PointArg::Equator => (
                    "equator",
                    EuclideanState::new([params.speed(), 0.0, 0.0], [0.0, 0.0, *m]),
                    *beta,
                ),
            };
            let r = classify_critical_point(&state, beta, &params)?;
            let report = ClassifyOutput {
                point: name,
                energy: params.energy(),
                a: params.a(),
                kind: r.kind,
                beta: r.beta,
                residual: r.residual,
                eigenvalues: r.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            };
            let _ = out.write_all(json(&report).as_bytes());
        }
        ClassicalCommand::Pinched { system, samples, out: file } => {
            let params = system.params()?;
            let s = params.speed();
            let n = (*samples).max(2);
            let mut csv = String::from("sign,pz,phi,px,py,pz_state,lx,ly,lz,G,Lz\n");
            for sign in [1.0, -1.0] {
                for i in 0..n {
                    let pz = -s + 2.0 * s * i as f64 / (n - 1) as f64;
                    let phi = std::f64::consts::TAU * i as f64 / (n - 1) as f64;
                    let z = pinched_torus(pz, phi, sign, &params)?;
                    let row: Vec<String> = [sign, pz, phi]
                        .into_iter()
                        .chain(z.to_array())
                        .chain([classical::g_value(&z, &params), classical::lz_value(&z)])
                        .map(|v| format!("{v:.16e}"))
                        .collect();
                    csv.push_str(&row.join(","));
                    csv.push('\n');
                }
            }
            let path = ctx.path(file, "pinched.csv");
            write_atomic(&path, &csv)?;
            let _ = writeln!(out, "{}", path.display());
        }
    }
    Ok(())
}

fn cmd_validate(ctx: &Context, a: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut reports = Vec::new();
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    if want(Suite::Oracle) {
        reports.push(validate::oracle_suite(&ctx.spectral).map_err(CliError::Solver)?);
    }
    if want(Suite::Asymptotics) {
        reports.push(validate::asymptotics_suite(&ctx.spectral).map_err(CliError::Solver)?);
    }
    if want(Suite::Brackets) {
        reports.push(validate::brackets_suite(1000, 1).map_err(CliError::Solver)?);
    }
    let text = json(&reports);
    let name = format!("validate_{}.json", format!("{:?}", a.suite).to_lowercase());
    write_atomic(&ctx.path(&a.out, &name), &text)?;
    let _ = out.write_all(text.as_bytes());
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::Validation)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut spectral = SpectralConfig::default();
    if let Some(t) = cli.eig_tol {
        spectral.eig_tol = t;
    }
    if let Some(t) = cli.tail_tol {
        spectral.tail_tol = t;
    }
    if !(spectral.eig_tol > 0.0 && spectral.tail_tol > 0.0) {
        return Err(CliError::BadFlags("tolerances must be positive".into()));
    }
    let ctx = Context { out_dir, spectral };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(&ctx, a, out),
        Command::Monodromy(a) => cmd_monodromy(&ctx, a, out),
        Command::Classical(c) => cmd_classical(&ctx, c, out),
        Command::Validate(a) => cmd_validate(&ctx, a, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

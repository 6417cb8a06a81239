//! Subcommands, flag parsing and exit codes.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use lumpkit_core::dynamics::{region_scan, simulate, uniform_grid};
use lumpkit_core::families::{
    catenary_irreversible, circulant_simplicial, cycle, mamillary_inward, mamillary_mixed_example,
    mamillary_outward, three_cycle_eigensystem, uniform_reversible_cycle,
};
use lumpkit_core::fixtures::{all_lumping_fixtures, appendix_nonneg_q, appendix_real_q, reversible_chain};
use lumpkit_core::linalg::{eig_left, EigenSystem, Matrix, C64};
use lumpkit_core::lumping::{farkas_row_test, lump, transform_basis, LumpingMatrix};
use lumpkit_core::model::{induce_reaction_network, is_mass_conserving, validate_kinetic};
use lumpkit_core::realizer::{exists_nonneg_p, exists_real_p, RealSearch};
use lumpkit_core::{CompartmentalModel, Tolerances};
use serde::Deserialize;

use crate::io::{
    self, CertificateJson, CheckJson, EigenJson, ErrorJson, FarkasJson, GenerateJson, KineticJson, LumpJson,
    ModelError, ModelJson, NetworkJson,
};

#[derive(Debug, Parser)]
#[command(name = "lumpkit", version, about = "Exact linear lumping of compartmental systems")]
pub struct Cli {
    /// Residual tolerance for exactness and eigen checks.
    #[arg(long, global = true, env = "LUMPKIT_TOL")]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Catenary,
    MamillaryIn,
    MamillaryOut,
    MamillaryMixed,
    Circulant,
    Cycle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a family model and its left eigensystem.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// JSON object with any of `k`, `mu`, `c`, `d`, `reversible`.
        #[arg(long)]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lump a model with a given `Q` (optionally replaced by `PQ`).
    Lump {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "Q")]
        q: PathBuf,
        #[arg(long = "P")]
        p: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kinetic and compartmental checks plus the induced network.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a real `P` with `PQ >= 0` for a two-row `Q`.
    RealizeNonneg {
        #[arg(long = "Q")]
        q: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a complex `P` with real `PQ`.
    RealizeReal {
        #[arg(long = "Q")]
        q: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        draws: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the exact trajectory as CSV.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Initial state, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 10.0)]
        t1: f64,
        #[arg(long, default_value_t = 1001)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Real/complex map of the three-cycle lumping over `(k2, k3)`.
    RegionScan {
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        /// `lo:hi`, used for both `k2` and `k3`.
        #[arg(long, default_value = "0:20")]
        range: String,
        #[arg(long, default_value_t = 201)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write every worked-example output into a directory.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out_dir: PathBuf,
    },
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Domain(lumpkit_core::Error),
    Io(String),
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Io(_) | CliError::Parse(_) => 1,
        }
    }

    pub fn to_json(&self) -> ErrorJson {
        let (error, detail) = match self {
            CliError::Domain(e) => (e.code().to_string(), e.to_string()),
            CliError::Io(d) => ("Io".to_string(), d.clone()),
            CliError::Parse(d) => ("Parse".to_string(), d.clone()),
        };
        ErrorJson { error, detail }
    }
}

impl From<lumpkit_core::Error> for CliError {
    fn from(e: lumpkit_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Parse(d) => CliError::Parse(d),
            ModelError::Domain(e) => CliError::Domain(e),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn load_model(path: &Path) -> CliResult<CompartmentalModel> {
    let text = read(path)?;
    let json: ModelJson =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(json.to_model()?)
}

fn load_matrix(path: &Path) -> CliResult<Matrix<C64>> {
    io::parse_matrix(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_real_matrix(path: &Path) -> CliResult<Matrix<f64>> {
    let m = load_matrix(path)?;
    if m.max_imag() != 0.0 {
        return Err(CliError::Parse(format!("{}: expected a real matrix", path.display())));
    }
    Ok(m.real_part())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyParams {
    #[serde(default)]
    k: Vec<f64>,
    #[serde(default)]
    mu: Option<Vec<f64>>,
    #[serde(default)]
    c: Vec<f64>,
    #[serde(default)]
    d: f64,
    #[serde(default)]
    reversible: bool,
}

fn build_family(family: Family, p: &FamilyParams) -> lumpkit_core::Result<(CompartmentalModel, EigenSystem)> {
    match family {
        Family::Catenary => {
            let mu = p.mu.clone().unwrap_or_else(|| vec![0.0; p.k.len() + 1]);
            catenary_irreversible(&p.k, &mu)
        }
        Family::MamillaryIn => mamillary_inward(&p.k),
        Family::MamillaryOut => mamillary_outward(&p.k),
        Family::MamillaryMixed => mamillary_mixed_example(&p.k),
        Family::Circulant => circulant_simplicial(&p.c, p.d),
        Family::Cycle => {
            let uniform = p.k.windows(2).all(|w| w[0] == w[1]);
            if !p.reversible && p.k.len() == 3 {
                three_cycle_eigensystem(&p.k)
            } else if p.reversible && uniform && !p.k.is_empty() {
                uniform_reversible_cycle(p.k.len(), p.k[0])
            } else {
                let model = cycle(&p.k, p.reversible)?;
                let sys = eig_left(model.a())?;
                Ok((model, sys))
            }
        }
    }
}

fn generate(family: Family, params: &str) -> CliResult<String> {
    let p: FamilyParams = serde_json::from_str(params).map_err(|e| CliError::Parse(format!("--params: {e}")))?;
    let (model, sys) = build_family(family, &p)?;
    let name = family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    Ok(io::to_json(&GenerateJson {
        family: name,
        model: ModelJson::from_model(&model),
        eigensystem: EigenJson::from_system(&sys),
    }))
}

fn lump_json(model: &CompartmentalModel, q: &Matrix<C64>, tol: &Tolerances) -> CliResult<LumpJson> {
    let lq = LumpingMatrix::new(q.clone())?;
    let lumped = lump(model, &lq, tol)?;
    let mut json = LumpJson::from_lumped(&lumped, tol.residual);
    let scale = q.max_abs();
    if q.max_imag() == 0.0 && q.as_slice().iter().all(|z| z.re >= -tol.sign * scale) {
        let f = farkas_row_test(&q.real_part(), tol.sign)?;
        json.farkas = Some(FarkasJson {
            has_nonneg_geninverse: f.has_nonneg_geninverse,
            witness_row: f.witness_row,
        });
    }
    Ok(json)
}

fn lump_cmd(model: &Path, q: &Path, p: Option<&Path>, tol: &Tolerances) -> CliResult<String> {
    let model = load_model(model)?;
    let mut q = load_matrix(q)?;
    if let Some(p) = p {
        let p = load_matrix(p)?;
        q = transform_basis(&LumpingMatrix::new(q)?, &p, tol.rank)?.matrix().clone();
    }
    Ok(io::to_json(&lump_json(&model, &q, tol)?))
}

fn check_cmd(model: &Path) -> CliResult<String> {
    let model = load_model(model)?;
    let report = validate_kinetic(&model);
    let (network, network_error) = match induce_reaction_network(&model) {
        Ok(net) => {
            let closed = is_mass_conserving(&net)?;
            (Some(NetworkJson::from_network(&net, closed)), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(io::to_json(&CheckJson {
        kinetic: KineticJson::from_report(&report),
        network,
        network_error,
    }))
}

fn realize_nonneg_json(q: &Matrix<f64>, tol: &Tolerances) -> CliResult<String> {
    let cert = exists_nonneg_p(q, tol)?;
    Ok(io::to_json(&CertificateJson::from_certificate(&cert, &q.to_complex(), None)))
}

fn realize_real_json(q: &Matrix<C64>, search: &RealSearch, tol: &Tolerances) -> CliResult<String> {
    let cert = exists_real_p(q, search, tol)?;
    Ok(io::to_json(&CertificateJson::from_certificate(&cert, q, Some(search.seed))))
}

fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Parse(format!("--range expects lo:hi, got {s}")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| CliError::Parse(format!("--range: {e}")));
    Ok((num(lo)?, num(hi)?))
}

fn simulate_csv(model: &CompartmentalModel, x0: &[f64], times: &[f64]) -> CliResult<String> {
    let tr = simulate(model, x0, times)?;
    Ok(io::trajectory_csv(model.species(), &tr))
}

fn fixtures_cmd(dir: &Path, tol: &Tolerances) -> CliResult<String> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> CliResult<()> {
        let path = dir.join(&name);
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        written.push(name);
        Ok(())
    };
    for fx in all_lumping_fixtures()? {
        put(format!("{}.model.json", fx.name), io::to_json(&ModelJson::from_model(&fx.model)))?;
        put(format!("{}.Q.json", fx.name), io::to_json(&io::complex_rows(&fx.q)))?;
        put(format!("{}.lump.json", fx.name), io::to_json(&lump_json(&fx.model, &fx.q, tol)?))?;
    }
    for (name, a13) in [("appendix-nonneg", 2.0), ("appendix-nonneg-a13-18", 18.0)] {
        let q = appendix_nonneg_q(a13);
        put(format!("{name}.Q.json"), io::to_json(&io::real_rows(&q)))?;
        put(format!("{name}.certificate.json"), realize_nonneg_json(&q, tol)?)?;
    }
    let q = appendix_real_q();
    put("appendix-real.Q.json".into(), io::to_json(&io::complex_rows(&q)))?;
    put(
        "appendix-real.certificate.json".into(),
        realize_real_json(&q, &RealSearch::default(), tol)?,
    )?;
    let chain = reversible_chain();
    put(
        "reversible-chain.trajectory.csv".into(),
        simulate_csv(&chain, &[1.0, 0.0, 0.0, 0.0, 0.0], &uniform_grid(0.0, 10.0, 1001))?,
    )?;
    put(
        "three-cycle.region.csv".into(),
        io::region_csv(&region_scan(1.0, (0.0, 20.0), (0.0, 20.0), 201)?),
    )?;
    let mut listing = written.join("\n");
    listing.push('\n');
    Ok(listing)
}

/// Runs one parsed command, writing to standard output or the `--out` file.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let tol = match cli.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return Err(CliError::Parse(format!("tolerance must be positive, got {t}")));
        }
        Some(t) => Tolerances::with_residual(t),
        None => Tolerances::default(),
    };
    match &cli.command {
        Command::Generate { family, params, out } => write_output(out.as_deref(), &generate(*family, params)?),
        Command::Lump { model, q, p, out } => write_output(out.as_deref(), &lump_cmd(model, q, p.as_deref(), &tol)?),
        Command::Check { model, out } => write_output(out.as_deref(), &check_cmd(model)?),
        Command::RealizeNonneg { q, out } => {
            let q = load_real_matrix(q)?;
            write_output(out.as_deref(), &realize_nonneg_json(&q, &tol)?)
        }
        Command::RealizeReal { q, seed, draws, out } => {
            let q = load_matrix(q)?;
            let search = RealSearch {
                seed: *seed,
                max_draws: *draws,
            };
            write_output(out.as_deref(), &realize_real_json(&q, &search, &tol)?)
        }
        Command::Simulate {
            model,
            x0,
            t0,
            t1,
            steps,
            out,
        } => {
            let model = load_model(model)?;
            let times = uniform_grid(*t0, *t1, *steps);
            write_output(out.as_deref(), &simulate_csv(&model, x0, &times)?)
        }
        Command::RegionScan { k1, range, steps, out } => {
            let r = parse_range(range)?;
            write_output(out.as_deref(), &io::region_csv(&region_scan(*k1, r, r, *steps)?))
        }
        Command::Fixtures { out_dir } => write_output(None, &fixtures_cmd(out_dir, &tol)?),
    }
}

/// Parses `args` (program name first) and runs the command. Errors go to
/// standard error as `{"error", "detail"}`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let body = serde_json::to_string(&e.to_json()).expect("serializable");
            eprintln!("{body}");
            e.exit_code()
        }
    }
}

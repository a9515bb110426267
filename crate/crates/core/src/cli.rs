//! Command-line front end. Exit codes: 0 ok, 1 verification failure,
//! 2 parse or input error, 3 resource cap, 4 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gwreath::{build_product, BuildOptions, ProductScheme, ProductSpec};
use crate::linalg::{CMatrix, DEFAULT_MAX_DIM, DEFAULT_TOL};
use crate::poset::Poset;
use crate::scheme::{adjacency_from_json, scheme_report, Scheme, SchemeJson, DEFAULT_SEED};
use crate::terwilliger::{central_decomposition_seeded, terwilliger_algebra_capped};
use crate::verify::{match_to_oracle, run_suite, Level, SuiteConfig};

/// Environment variable overriding the default dimension cap.
pub const MAX_DIM_ENV: &str = "TW_SCHEME_MAX_DIM";

#[derive(Debug, Parser)]
#[command(
    name = "tw",
    version,
    about = "Terwilliger algebras of generalized wreath products"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, clap::Args)]
pub struct Common {
    /// Numerical tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for every randomized numerical step.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest |X_P| to materialize; defaults to $TW_SCHEME_MAX_DIM or 4096.
    #[arg(long)]
    pub max_dim: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the scheme axioms of a class-label matrix.
    SchemeVerify {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build a product and write the requested matrix families.
    ProductBuild {
        path: PathBuf,
        /// Comma-separated families among A, E, Estar, km.
        #[arg(long, value_delimiter = ',', default_value = "km")]
        dump: Vec<Family>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::Lemmas)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Brute-force central decomposition, labelled by the closed forms.
    Decompose {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "A")]
    A,
    #[value(name = "E")]
    E,
    #[value(name = "Estar")]
    Estar,
    #[value(name = "km")]
    Km,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    #[value(name = "closed_forms", alias = "closed-forms")]
    ClosedForms,
    #[value(name = "lemmas")]
    Lemmas,
    #[value(name = "full_oracle", alias = "full-oracle")]
    FullOracle,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::ClosedForms => Level::ClosedForms,
            LevelArg::Lemmas => Level::Lemmas,
            LevelArg::FullOracle => Level::FullOracle,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Result of a subcommand: text for stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

/// Runs the process: parses arguments, dispatches, prints, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::SchemeVerify { path, common } => scheme_verify(path, common),
        Command::ProductBuild {
            path,
            dump,
            out,
            common,
        } => product_build(path, dump, out, common),
        Command::Verify {
            path,
            level,
            format,
            out,
            common,
        } => verify(path, (*level).into(), *format, out.as_deref(), common),
        Command::Decompose {
            path,
            format,
            common,
        } => decompose(path, *format, common),
    }
}

impl Common {
    fn max_dim(&self) -> Result<usize> {
        let cap = match self.max_dim {
            Some(cap) => cap,
            None => match std::env::var(MAX_DIM_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{MAX_DIM_ENV}={v} is not a number")))?,
                Err(_) => DEFAULT_MAX_DIM,
            },
        };
        if cap < 2 {
            return Err(Error::Contract(format!("dimension cap {cap} is below 2")));
        }
        Ok(cap)
    }

    fn options(&self) -> Result<BuildOptions> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Contract(format!(
                "tolerance {} is not positive",
                self.tol
            )));
        }
        Ok(BuildOptions {
            tol: self.tol,
            seed: self.seed,
            max_dim: self.max_dim()?,
            ..BuildOptions::default()
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Reads a product spec; a bare scheme file is taken as a one-point product.
pub fn load_spec(path: &Path, tol: f64, seed: u64) -> Result<ProductSpec> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("poset").is_some() {
        ProductSpec::from_json_str(&text, tol, seed)
    } else {
        let json: SchemeJson = serde_json::from_value(value)?;
        let scheme = Scheme::from_json(&json, tol, seed)?;
        ProductSpec::new(Poset::antichain(1)?, vec![scheme], vec![], tol, seed)
    }
}

fn load_product(path: &Path, common: &Common) -> Result<ProductScheme> {
    let opts = common.options()?;
    let spec = load_spec(path, opts.tol, opts.seed)?;
    build_product(&spec, opts)
}

fn scheme_verify(path: &Path, common: &Common) -> Result<Outcome> {
    let json: SchemeJson = serde_json::from_str(&read(path)?)?;
    let mats = adjacency_from_json(&json)?;
    let report = scheme_report(&mats, common.tol, common.seed)?;
    let code = if report.is_valid() { 0 } else { 1 };
    Ok(Outcome {
        stdout: report.to_table(),
        code,
    })
}

/// Exact complex entries as `[re, im]` pairs.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|x| (0..m.dim()).map(|y| [m[(x, y)].re, m[(x, y)].im]).collect())
        .collect()
}

#[derive(Serialize)]
struct MatrixFamily {
    labels: Vec<String>,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize)]
struct KmTable {
    labels: Vec<String>,
    valencies: Vec<u64>,
    multiplicities: Vec<u64>,
}

fn product_build(path: &Path, dump: &[Family], dir: &Path, common: &Common) -> Result<Outcome> {
    let ps = load_product(path, common)?;
    fs::create_dir_all(dir)?;
    let labels: Vec<String> = ps.d_indices().iter().map(|i| i.to_string()).collect();
    let mut out = format!("|X_P| = {}, d = {}\n", ps.size(), ps.d());
    let mut written = Vec::new();
    for family in dump {
        let (name, matrices) = match family {
            Family::A => ("A.json", ps.adjacency_all()?),
            Family::E => ("E.json", ps.idempotents_all()?),
            Family::Estar => ("Estar.json", ps.duals_all()?),
            Family::Km => {
                let km = KmTable {
                    labels: labels.clone(),
                    valencies: ps.valencies().to_vec(),
                    multiplicities: ps.multiplicities().to_vec(),
                };
                fs::write(
                    dir.join("km.json"),
                    serde_json::to_string_pretty(&km)? + "\n",
                )?;
                written.push("km.json");
                let _ = writeln!(out, "{:<24} {:>8} {:>8}", "index", "k", "m");
                for (k, l) in labels.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{:<24} {:>8} {:>8}",
                        l,
                        ps.valencies()[k],
                        ps.multiplicities()[k]
                    );
                }
                continue;
            }
        };
        let family = MatrixFamily {
            labels: labels.clone(),
            matrices: matrices.iter().map(matrix_to_pairs).collect(),
        };
        fs::write(dir.join(name), serde_json::to_string(&family)? + "\n")?;
        written.push(name);
    }
    let scheme = ps.as_scheme()?.to_json();
    fs::write(
        dir.join("scheme.json"),
        serde_json::to_string(&scheme)? + "\n",
    )?;
    written.push("scheme.json");
    let _ = writeln!(out, "wrote {} to {}", written.join(", "), dir.display());
    Ok(Outcome::ok(out))
}

fn verify(
    path: &Path,
    level: Level,
    format: Format,
    out: Option<&Path>,
    common: &Common,
) -> Result<Outcome> {
    let ps = match load_product(path, common) {
        Ok(ps) => ps,
        Err(Error::NotAScheme {
            axiom,
            name,
            residual,
        }) => {
            let msg = format!(
                "FAIL component.axioms: axiom {axiom} ({name}) fails with residual {residual:e}\n"
            );
            return Ok(Outcome {
                stdout: msg,
                code: 1,
            });
        }
        Err(e) => return Err(e),
    };
    let cfg = SuiteConfig {
        tol: common.tol,
        seed: common.seed,
    };
    let report = run_suite(&ps, level, cfg)?;
    let json = report.to_json()? + "\n";
    if let Some(path) = out {
        fs::write(path, &json)?;
    }
    let mut text = match format {
        Format::Json => json,
        Format::Table => report.to_table(),
    };
    if !report.all_passed() && format == Format::Table {
        for c in report.checks.iter().filter(|c| c.counterexample.is_some()) {
            let _ = writeln!(text, "failing check: {}", c.check_id);
        }
    }
    Ok(Outcome {
        stdout: text,
        code: if report.all_passed() { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct DecompositionRow {
    index: usize,
    #[serde(rename = "type")]
    label: Option<String>,
    n: usize,
    mult: usize,
    rank: usize,
}

fn decompose(path: &Path, format: Format, common: &Common) -> Result<Outcome> {
    let ps = load_product(path, common)?;
    let oracle_max = ps.options().oracle_max;
    if ps.size() > oracle_max {
        return Err(Error::Resource(format!(
            "decomposition allows |X_P| <= {oracle_max}, got {}",
            ps.size()
        )));
    }
    let td = terwilliger_algebra_capped(&ps.as_scheme()?, ps.base_point(), common.tol, oracle_max)?;
    let cd = central_decomposition_seeded(&td, common.tol, common.seed)?;
    let phi = ps.enumerate_phi()?;
    let matching = match_to_oracle(&phi.idempotents, &cd);
    let mut labels = vec![None; cd.len()];
    for (t, hit) in phi.triples.iter().zip(&matching) {
        if let Some((k, _)) = hit {
            let d = ps.d_indices();
            labels[*k] = Some(format!("({}, {}, {})", d[t.i], d[t.j], t.ell));
        }
    }
    let rows: Vec<DecompositionRow> = (0..cd.len())
        .map(|k| DecompositionRow {
            index: k,
            label: labels[k].clone(),
            n: cd.dims[k],
            mult: cd.mults[k],
            rank: cd.ranks[k],
        })
        .collect();
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Table => {
            let width = rows
                .iter()
                .filter_map(|r| r.label.as_ref().map(String::len))
                .max()
                .unwrap_or(4)
                .max(4);
            let mut t = format!("dim T = {}, |X_P| = {}\n", td.dim(), ps.size());
            let _ = writeln!(
                t,
                "{:>3}  {:<width$}  {:>4}  {:>5}  {:>5}",
                "#", "type", "n", "mult", "rank"
            );
            for r in &rows {
                let _ = writeln!(
                    t,
                    "{:>3}  {:<width$}  {:>4}  {:>5}  {:>5}",
                    r.index,
                    r.label.as_deref().unwrap_or("-"),
                    r.n,
                    r.mult,
                    r.rank
                );
            }
            t
        }
    };
    Ok(Outcome::ok(text))
}

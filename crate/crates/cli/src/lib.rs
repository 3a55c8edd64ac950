//! `geomex`: generation, spectral analysis, discrepancy, overlap measurement,
//! and bound certification for typed partite simplicial complexes, with
//! reproducible JSON reports.
//!
//! Exit codes: 0 success, 2 validation or usage error, 3 cap/limit refusal.

pub mod manifest;
pub mod reports;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use geomex_core::bounds::{
    bound_report, certify_overlap, walk_bound_check, BoundConfig, BoundsError, CoxeterMode,
};
use geomex_core::complex::TypedComplex;
use geomex_core::discrepancy::{
    discrepancy_exact_with_cap, discrepancy_local_search, discrepancy_spectral_bound, DiscError,
    DEFAULT_EXACT_CAP,
};
use geomex_core::generators::{
    complete_partite, flag_complex, random_partite, FlagComplexSpec, GenError,
};
use geomex_core::geometry::{
    coverage_at, overlap_monte_carlo, overlap_search_2d, CoordMode, GeometryError,
};
use geomex_core::io::{load_complex, load_embedding, save_complex, LoadError};
use geomex_core::numeric::{parse_rational, ParseRationalError};
use geomex_core::spectral::{
    lambda_tilde, walk_decomposition_with_cap, LambdaOptions, SpectralError, DEFAULT_RATIONAL_CAP,
};

use manifest::RunManifest;
use reports::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Complex(#[from] geomex_core::complex::ComplexError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("bad rational `{value}`: {source}")]
    BadRational {
        value: String,
        source: ParseRationalError,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 3 for cap/limit refusals, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Gen(GenError::CapExceeded { .. })
            | CliError::Disc(DiscError::CapExceeded { .. })
            | CliError::Disc(DiscError::ClassTooWide { .. })
            | CliError::Spectral(SpectralError::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateKind {
    Complete,
    Flag,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectralCliMode {
    Dense,
    Iter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscCliMethod {
    Exact,
    Local,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OverlapCliMode {
    #[value(name = "search2d")]
    Search2d,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoxeterCliMode {
    Crystallographic,
    #[value(name = "all-finite")]
    AllFinite,
}

impl From<CoxeterCliMode> for CoxeterMode {
    fn from(m: CoxeterCliMode) -> Self {
        match m {
            CoxeterCliMode::Crystallographic => CoxeterMode::Crystallographic,
            CoxeterCliMode::AllFinite => CoxeterMode::AllFinite,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "geomex",
    version,
    about = "Spectra, discrepancy, explicit bounds, and geometric overlap of typed partite complexes"
)]
struct Cli {
    /// Write the JSON report to this file (default: stdout).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exact rational geometry predicates (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point geometry predicates.
    #[arg(long, global = true)]
    float: bool,
    /// Timestamp string to record in the manifest (omitted otherwise, so
    /// reruns stay byte-identical).
    #[arg(long, global = true)]
    timestamp: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a complex (complete partite, projective flag, or random) as
    /// JSON.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        /// Class sizes, comma separated (complete|random).
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Field size (flag; prime).
        #[arg(long)]
        q: Option<u64>,
        /// Dimension (flag).
        #[arg(long)]
        d: Option<usize>,
        /// Chamber probability, e.g. "1/2" or "0.3" (random).
        #[arg(long, required_if_eq("kind", "random"))]
        p: Option<String>,
        #[arg(long, required_if_eq("kind", "random"))]
        seed: Option<u64>,
        /// Enumeration budget on q^(d+2) (flag).
        #[arg(long)]
        cap: Option<u128>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalized second eigenvalues per type, walk decomposition, and the
    /// identity-verification status.
    Spectral {
        #[arg(long)]
        input: PathBuf,
        /// Type whose induced graph gets the walk decomposition.
        #[arg(long = "type", default_value_t = 0)]
        type_label: usize,
        #[arg(long, value_enum, default_value = "dense")]
        mode: SpectralCliMode,
        /// Walk half-length.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, required_if_eq("mode", "iter"))]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Left-vertex cap for exact rational walk decomposition.
        #[arg(long, default_value_t = DEFAULT_RATIONAL_CAP)]
        walk_cap: usize,
        /// Residue size for report-only walk-bound comparisons.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Discrepancy: exact maximum, local-search lower bound, or the spectral
    /// upper bound.
    Disc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: DiscCliMethod,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, required_if_eq("method", "local"))]
        seed: Option<u64>,
        /// Vertex-total cap for exact enumeration.
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: usize,
    },
    /// Best covered point of an embedded complex.
    Overlap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, value_enum)]
        mode: OverlapCliMode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, required_if_eq("mode", "mc"))]
        seed: Option<u64>,
    },
    /// Evaluate the explicit constant chain for (d, q, n, c_d).
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u64,
        /// Walk half-length (default: the canonical 2 d N_d).
        #[arg(long)]
        n: Option<u64>,
        /// Selection-density constant, e.g. "1/2" (user-supplied; nothing is
        /// shipped as certified).
        #[arg(long)]
        cd: String,
        #[arg(long, value_enum, default_value = "crystallographic")]
        coxeter: CoxeterCliMode,
    },
    /// Certify overlap for a complex from its measured spectral bound.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cd: String,
    },
}

/// Parse and execute; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString>,
{
    let os_args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = os_args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(os_args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(msg) = geomex_core::exec::set_threads(threads) {
            eprintln!("note: --threads {threads}: {msg}");
        }
    }
    match dispatch(&cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn coord_mode(cli: &Cli) -> CoordMode {
    if cli.float {
        CoordMode::Float
    } else {
        CoordMode::ExactRational
    }
}

fn parse_cd(value: &str) -> Result<geomex_core::Rat, CliError> {
    parse_rational(value).map_err(|source| CliError::BadRational {
        value: value.to_owned(),
        source,
    })
}

fn dispatch(cli: &Cli, argv: Vec<String>) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate {
            kind,
            sizes,
            q,
            d,
            p,
            seed,
            cap,
            out,
        } => {
            let mut manifest = RunManifest::new("generate", argv, cli.timestamp.clone());
            let (cx, pruned) = match kind {
                GenerateKind::Complete => {
                    let sizes = sizes
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--kind complete needs --sizes".into()))?;
                    (complete_partite(sizes)?, Vec::new())
                }
                GenerateKind::Flag => {
                    let q = q.ok_or_else(|| CliError::Usage("--kind flag needs --q".into()))?;
                    let d = d.ok_or_else(|| CliError::Usage("--kind flag needs --d".into()))?;
                    let mut spec = FlagComplexSpec::new(q, d);
                    if let Some(cap) = cap {
                        spec = spec.with_cap(*cap);
                    }
                    (flag_complex(&spec)?, Vec::new())
                }
                GenerateKind::Random => {
                    let sizes = sizes
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--kind random needs --sizes".into()))?;
                    let p = parse_cd(p.as_ref().expect("required_if_eq"))?;
                    let seed = seed.expect("required_if_eq");
                    manifest.seed("seed", seed);
                    let rp = random_partite(sizes, &p, seed)?;
                    (rp.complex, rp.pruned)
                }
            };
            let validation = cx.validate();
            if !validation.is_valid() && *kind != GenerateKind::Random {
                return Err(CliError::Load(LoadError::Invalid(validation)));
            }
            save_complex(&cx, out).map_err(|e| CliError::Write {
                path: out.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            })?;
            let body = GenerateReport::new(&cx, out, &pruned, &validation);
            let summary = format!(
                "wrote {} ({} vertices, {} chambers{})",
                out.display(),
                cx.vertices().len(),
                cx.chambers().len(),
                if validation.is_valid() {
                    ""
                } else {
                    "; INVALID, see report"
                }
            );
            emit(cli, manifest, body, &summary)
        }

        Command::Spectral {
            input,
            type_label,
            mode,
            n,
            seed,
            tolerance,
            walk_cap,
            q,
        } => {
            let mut manifest = RunManifest::new("spectral", argv, cli.timestamp.clone());
            manifest
                .input("input", input)
                .map_err(|source| CliError::Write {
                    path: input.display().to_string(),
                    source,
                })?;
            let cx = load_complex(input)?;
            let mut opts = match mode {
                SpectralCliMode::Dense => LambdaOptions::dense(),
                SpectralCliMode::Iter => {
                    let seed = seed.expect("required_if_eq");
                    manifest.seed("seed", seed);
                    LambdaOptions::iterative(seed)
                }
            };
            if let Some(t) = tolerance {
                opts.tolerance = *t;
            }
            if *type_label > cx.d() {
                return Err(CliError::Usage(format!(
                    "--type {type_label} out of range for d = {}",
                    cx.d()
                )));
            }

            let mut lambdas = Vec::new();
            for i in 0..=cx.d() {
                let g = cx.induced_bipartite(i)?;
                lambdas.push(LambdaEntry::new(i, &lambda_tilde(&g, &opts)?));
            }
            let g = cx.induced_bipartite(*type_label)?;
            let wd = walk_decomposition_with_cap(&g, *n, *walk_cap)?;
            let walk = WalkEntry::new(*type_label, &wd);
            let walk_bounds = match q {
                Some(q) => {
                    let mut rows = Vec::new();
                    for k in 0..=*n as u64 {
                        let wb = walk_bound_check(
                            cx.d(),
                            *q,
                            *n as u64,
                            k,
                            CoxeterMode::Crystallographic,
                        )?;
                        rows.push(WalkBoundEntry::new(k, &wb));
                    }
                    Some(rows)
                }
                None => None,
            };
            let max = lambdas.iter().map(|l| l.value).fold(0.0f64, f64::max);
            let summary = format!("max lambda~ = {max:.6} over {} types", cx.d() + 1);
            emit(
                cli,
                manifest,
                SpectralReport {
                    lambda: lambdas,
                    walk,
                    walk_bounds,
                },
                &summary,
            )
        }

        Command::Disc {
            input,
            method,
            restarts,
            seed,
            cap,
        } => {
            let mut manifest = RunManifest::new("disc", argv, cli.timestamp.clone());
            manifest
                .input("input", input)
                .map_err(|source| CliError::Write {
                    path: input.display().to_string(),
                    source,
                })?;
            let cx = load_complex(input)?;
            let body = match method {
                DiscCliMethod::Exact => {
                    DiscReport::from_result(&discrepancy_exact_with_cap(&cx, *cap)?)
                }
                DiscCliMethod::Local => {
                    let seed = seed.expect("required_if_eq");
                    manifest.seed("seed", seed);
                    DiscReport::from_result(&discrepancy_local_search(&cx, *restarts, seed)?)
                }
                DiscCliMethod::Spectral => DiscReport::from_bound(
                    cx.d(),
                    &discrepancy_spectral_bound(&cx, &LambdaOptions::dense())?,
                ),
            };
            let summary = format!("discrepancy[{}] = {}", body.method, body.value_decimal);
            emit(cli, manifest, body, &summary)
        }

        Command::Overlap {
            input,
            embedding,
            mode,
            samples,
            seed,
        } => {
            let mut manifest = RunManifest::new("overlap", argv, cli.timestamp.clone());
            manifest
                .input("input", input)
                .map_err(|source| CliError::Write {
                    path: input.display().to_string(),
                    source,
                })?;
            manifest
                .input("embedding", embedding)
                .map_err(|source| CliError::Write {
                    path: embedding.display().to_string(),
                    source,
                })?;
            let cx = load_complex(input)?;
            let emb = load_embedding(embedding, coord_mode(cli))?;
            let result = match mode {
                OverlapCliMode::Search2d => overlap_search_2d(&cx, &emb)?,
                OverlapCliMode::Mc => {
                    let seed = seed.expect("required_if_eq");
                    manifest.seed("seed", seed);
                    overlap_monte_carlo(&cx, &emb, *samples, seed)?
                }
            };
            // The reported point is re-counted through the public entry once
            // more; the two counts must agree.
            let recount = coverage_at(&cx, &emb, &result.point)?;
            debug_assert_eq!(recount.covered, result.covered);
            let body = OverlapReport::new(mode_name(*mode), &result);
            let summary = format!(
                "best point covers {}/{} chambers ({:.4})",
                result.covered,
                result.total,
                result.fraction_f64()
            );
            emit(cli, manifest, body, &summary)
        }

        Command::Bounds {
            d,
            q,
            n,
            cd,
            coxeter,
        } => {
            let manifest = RunManifest::new("bounds", argv, cli.timestamp.clone());
            let c_d = parse_cd(cd)?;
            let cfg = BoundConfig {
                d: *d,
                q: *q,
                n: *n,
                c_d,
                mode: (*coxeter).into(),
            };
            let body = bound_report(&cfg)?;
            let summary = format!("chain verdict: {:?}", body.verdict);
            emit(cli, manifest, body, &summary)
        }

        Command::Certify { input, cd } => {
            let mut manifest = RunManifest::new("certify", argv, cli.timestamp.clone());
            manifest
                .input("input", input)
                .map_err(|source| CliError::Write {
                    path: input.display().to_string(),
                    source,
                })?;
            let cx = load_complex(input)?;
            let c_d = parse_cd(cd)?;
            let report = certify_overlap(&cx, &c_d, &LambdaOptions::dense())?;
            let body = CertifyReportJson::new(&report, "user-supplied (--cd)");
            let summary = body.summary();
            emit(cli, manifest, body, &summary)
        }
    }
}

fn mode_name(mode: OverlapCliMode) -> &'static str {
    match mode {
        OverlapCliMode::Search2d => "search2d",
        OverlapCliMode::Mc => "mc",
    }
}

/// Serialize the report (manifest + body); JSON goes to `--report` or stdout,
/// the human summary to stdout when the JSON went to a file.
fn emit<T: serde::Serialize>(
    cli: &Cli,
    manifest: RunManifest,
    body: T,
    summary: &str,
) -> Result<(), CliError> {
    let envelope = Envelope { manifest, body };
    let mut json = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    json.push('\n');
    match &cli.report {
        Some(path) => {
            std::fs::write(path, &json).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })?;
            println!("{summary}");
            println!("report: {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct Envelope<T: serde::Serialize> {
    manifest: RunManifest,
    #[serde(flatten)]
    body: T,
}

/// Convenience for tests: run against a report path and read it back.
pub fn run_to_string(args: &[&str], report: &Path) -> (i32, String) {
    let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    argv.push("--report".into());
    argv.push(report.display().to_string());
    let code = run(argv);
    let content = std::fs::read_to_string(report).unwrap_or_default();
    (code, content)
}

pub use geomex_core;

// Re-exported for integration tests that build fixtures directly.
pub fn write_fixture_complex(cx: &TypedComplex, path: &Path) -> Result<(), CliError> {
    save_complex(cx, path).map_err(CliError::Load)
}

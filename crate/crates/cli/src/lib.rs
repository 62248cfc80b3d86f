//! `isopair`: generate, analyze, classify and compare pairs of commuting isometries.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 bad input,
//! 3 the two inputs of `equiv` are not equivalent.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use isopair_core::analysis::{analyze, AnalysisReport};
use isopair_core::bcl::{corpus_triple, random_triple, BclTriple};
use isopair_core::classify::{classify, compare_classifications, ClassificationResult, EquivalenceVerdict};
use isopair_core::frame::PairInput;
use isopair_core::io::{parse_input, to_json, InputDocument};
use isopair_core::izuchi::{build_izuchi_model, min_series_terms};
use isopair_core::models::{bishift_truncated, direct_sum, scramble, twisted_shift};
use isopair_core::tolerance::Tolerances;
use isopair_core::Error;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_EQUIVALENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "isopair", version, about = "Pairs of commuting isometries: models, spectra and classification")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true, env = "ISOPAIR_FORMAT")]
    format: Format,

    /// Write output here instead of stdout
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    /// Relative rank tolerance (default: max(rows, cols) * 1e-12)
    #[arg(long, global = true, env = "ISOPAIR_RANK_TOL")]
    rank_tol: Option<f64>,

    #[arg(long, global = true, env = "ISOPAIR_CLUSTER_TOL")]
    cluster_tol: Option<f64>,

    #[arg(long, global = true, env = "ISOPAIR_BAND_TOL")]
    band_tol: Option<f64>,

    #[arg(long, global = true, env = "ISOPAIR_CHECK_TOL")]
    check_tol: Option<f64>,

    #[arg(long, global = true, env = "ISOPAIR_MATCH_TOL")]
    match_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a triple or a truncated model as JSON
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Defect spectrum, cross-commutator rank and the rank identities
    Analyze {
        /// Input document ("-" for stdin)
        input: Option<PathBuf>,
        /// Run this many random triples instead of reading an input
        #[arg(long)]
        trials: Option<usize>,
        /// First seed of a batch run
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fundamental sequence, block decomposition and shift-unitary part
    Classify { input: PathBuf },
    /// Decide joint unitary equivalence of two inputs
    Equiv { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
enum GenModel {
    /// Haar-random U and a random rank-r projection P
    RandomTriple {
        #[arg(long)]
        n: usize,
        #[arg(long = "rank-p", alias = "rankP")]
        rank_p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The 2x2 triple U = [[0, 1], [alpha, 0]], P = diag(1, 0)
    TwoFinite {
        #[arg(long, value_parser = parse_complex)]
        alpha: C64,
    },
    /// (M_z, M_w) on polynomials of degree < N in each variable
    Bishift {
        #[arg(long = "N")]
        n: usize,
    },
    /// (M_z, alpha M_z) on polynomials of degree < N
    Twisted {
        #[arg(long, value_parser = parse_complex)]
        alpha: C64,
        #[arg(long = "N")]
        n: usize,
    },
    /// (gamma M_z, M_w) on the invariant subspace generated by w / (1 - r z conj(w))
    Izuchi {
        #[arg(long)]
        r: f64,
        #[arg(long, value_parser = parse_complex)]
        gamma: C64,
        #[arg(long = "N")]
        n: usize,
        /// Number of series vectors (default: N)
        #[arg(long = "J")]
        j: Option<usize>,
        /// Terms kept in each series (default: enough for a 1e-14 tail, at least 50)
        #[arg(long = "K")]
        k: Option<usize>,
    },
    /// Block-diagonal sum of inputs of the same kind
    DirectSum {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Conjugate the interior of a truncated model by a Haar-random unitary
    Scramble {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Complex numbers like `1`, `-i`, `0.5+0.25i` or `1+0i`.
fn parse_complex(s: &str) -> Result<C64, String> {
    s.trim().parse::<C64>().map_err(|e| format!("`{s}` is not a complex number: {e}"))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotSquare { .. } | Error::DimensionMismatch(_) | Error::InvalidParameter(_) | Error::InvalidTriple(_) => {
                EXIT_INPUT
            }
            Error::NotHermitian { .. }
            | Error::NotContraction { .. }
            | Error::NotNormal { .. }
            | Error::Inconsistent(_)
            | Error::CheckFailed(_) => EXIT_CHECK_FAILED,
        };
        Self { code, message: e.to_string() }
    }
}

/// Output of a command and the exit code it finished with.
struct Outcome {
    body: String,
    code: i32,
}

impl Cli {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let d = Tolerances::default();
        let t = Tolerances {
            rank_tol: self.rank_tol.or(d.rank_tol),
            cluster_tol: self.cluster_tol.unwrap_or(d.cluster_tol),
            band_tol: self.band_tol.unwrap_or(d.band_tol),
            check_tol: self.check_tol.unwrap_or(d.check_tol),
            match_tol: self.match_tol.unwrap_or(d.match_tol),
        };
        t.validate()?;
        Ok(t)
    }
}

/// Parse `args` (including the program name) and run the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(outcome.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_INPUT
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let tols = cli.tolerances()?;
    match &cli.command {
        Command::Gen { model } => {
            if cli.format != Format::Json && cli.format != Format::Text {
                return Err(Failure::input("gen writes JSON; --format csv is not supported"));
            }
            let doc = generate(model)?;
            Ok(Outcome { body: to_json(&doc), code: EXIT_OK })
        }
        Command::Analyze { input, trials, seed } => match (input, trials) {
            (Some(_), Some(_)) => Err(Failure::input("give either an input file or --trials, not both")),
            (None, None) => Err(Failure::input("analyze needs an input file or --trials")),
            (Some(path), None) => {
                let report = analyze(&read_input(path)?, &tols)?;
                let code = if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
                Ok(Outcome { body: render_analysis(&report, cli.format)?, code })
            }
            (None, Some(t)) => run_trials(*t, *seed, &tols, cli.format),
        },
        Command::Classify { input } => {
            let result = classify(&read_input(input)?, &tols)?;
            Ok(Outcome { body: render_classification(&result, cli.format)?, code: EXIT_OK })
        }
        Command::Equiv { a, b } => {
            let (ia, ib) = (read_input(a)?, read_input(b)?);
            let (ca, cb) = rayon::join(|| classify(&ia, &tols), || classify(&ib, &tols));
            let verdict = compare_classifications(&ca?, &cb?, tols.match_tol);
            let code = if verdict.equivalent { EXIT_OK } else { EXIT_NOT_EQUIVALENT };
            Ok(Outcome { body: render_verdict(&verdict, cli.format)?, code })
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<PairInput, Failure> {
    parse_input(&read_text(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn generate(model: &GenModel) -> Result<InputDocument, Failure> {
    let doc = match model {
        GenModel::RandomTriple { n, rank_p, seed } => {
            if *n == 0 {
                return Err(Failure::input("n must be at least 1"));
            }
            InputDocument::from(&random_triple(*n, *rank_p, *seed)?)
        }
        GenModel::TwoFinite { alpha } => InputDocument::from(&BclTriple::two_finite(*alpha)?),
        GenModel::Bishift { n } => InputDocument::from(&bishift_truncated(*n)?),
        GenModel::Twisted { alpha, n } => InputDocument::from(&twisted_shift(*alpha, *n)?),
        GenModel::Izuchi { r, gamma, n, j, k } => {
            if !(r.is_finite() && *r > 0.0 && *r < 1.0) {
                return Err(Failure::input(format!("r = {r} must lie in (0, 1)")));
            }
            let k = k.unwrap_or_else(|| min_series_terms(*r).max(50));
            InputDocument::from(&build_izuchi_model(*r, *gamma, *n, j.unwrap_or(*n), k)?.pair)
        }
        GenModel::DirectSum { inputs } => {
            let parts = inputs.iter().map(|p| read_input(p)).collect::<Result<Vec<_>, _>>()?;
            if parts.iter().all(|p| matches!(p, PairInput::Triple(_))) {
                let triples: Vec<BclTriple> =
                    parts.into_iter().filter_map(|p| if let PairInput::Triple(t) = p { Some(t) } else { None }).collect();
                InputDocument::from(&BclTriple::direct_sum(&triples)?)
            } else if parts.iter().all(|p| matches!(p, PairInput::Pair(_))) {
                let pairs: Vec<_> =
                    parts.into_iter().filter_map(|p| if let PairInput::Pair(q) = p { Some(q) } else { None }).collect();
                InputDocument::from(&direct_sum(&pairs)?)
            } else {
                return Err(Failure::input("direct-sum needs inputs of one kind (all triples or all pairs)"));
            }
        }
        GenModel::Scramble { input, seed } => match read_input(input)? {
            PairInput::Pair(p) => InputDocument::from(&scramble(&p, *seed)?),
            PairInput::Triple(_) => return Err(Failure::input("scramble expects a truncated model, not a triple")),
        },
    };
    Ok(doc)
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn fmt_list(zs: &[C64]) -> String {
    let items: Vec<String> = zs.iter().map(|z| fmt_c(*z)).collect();
    format!("[{}]", items.join(", "))
}

fn csv_table<R: Serialize>(rows: &[R]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    eigenvalue_re: f64,
    eigenvalue_im: f64,
    cluster_label: usize,
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_analysis(r: &AnalysisReport, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(to_json(r)),
        Format::Csv => csv_table(
            &r.spectrum
                .iter()
                .map(|e| SpectrumRow { index: e.index, eigenvalue_re: e.eigenvalue, eigenvalue_im: 0.0, cluster_label: e.cluster })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let f = &r.rank_formula;
            let mut s = String::new();
            let _ = writeln!(s, "defect spectrum on {} coordinates:", r.frame_dim);
            for c in &r.clusters {
                let _ = writeln!(s, "  {:>+.10}  x{}", c.value, c.multiplicity);
            }
            let _ = writeln!(s, "rank C = {}, rank X = {}", f.rank_c, f.rank_x);
            let _ = writeln!(s, "dim E1 = {}, dim E-1 = {}, dim K+ = {}", f.dim_e1, f.dim_em1, f.dim_kplus);
            let _ = writeln!(s, "normality residual = {:.3e}", r.normality_residual);
            let _ = writeln!(
                s,
                "rank C = rank X + dim E1 + dim K+: {}",
                pass_fail(f.additive_holds)
            );
            let _ = writeln!(
                s,
                "rank C = 2 rank X + dim E1 - dim E-1: {}",
                pass_fail(f.index_holds)
            );
            let _ = writeln!(s, "+/- eigenvalue symmetry: {}", pass_fail(r.symmetry.holds()));
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct TrialReport {
    trial: usize,
    seed: u64,
    n: usize,
    report: AnalysisReport,
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    seed: u64,
    n: usize,
    rank_c: usize,
    rank_x: usize,
    dim_e1: usize,
    dim_em1: usize,
    dim_kplus: usize,
    additive_holds: bool,
    index_holds: bool,
    symmetry_holds: bool,
}

fn run_trials(trials: usize, first_seed: u64, tols: &Tolerances, format: Format) -> Result<Outcome, Failure> {
    let reports = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = first_seed + trial as u64;
            let t = corpus_triple(seed)?;
            let report = analyze(&PairInput::Triple(t.clone()), tols)?;
            Ok(TrialReport { trial, seed, n: t.n(), report })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let failed = reports.iter().filter(|t| !t.report.passed).count();
    let body = match format {
        Format::Json => to_json(&reports),
        Format::Csv => csv_table(
            &reports
                .iter()
                .map(|t| {
                    let f = &t.report.rank_formula;
                    TrialRow {
                        trial: t.trial,
                        seed: t.seed,
                        n: t.n,
                        rank_c: f.rank_c,
                        rank_x: f.rank_x,
                        dim_e1: f.dim_e1,
                        dim_em1: f.dim_em1,
                        dim_kplus: f.dim_kplus,
                        additive_holds: f.additive_holds,
                        index_holds: f.index_holds,
                        symmetry_holds: t.report.symmetry.holds(),
                    }
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Text => {
            let mut s = String::new();
            for t in &reports {
                let f = &t.report.rank_formula;
                let _ = writeln!(
                    s,
                    "trial {:>4}  seed {:>6}  n = {:>2}  rank C = {:>2}  rank X = {:>2}  {}",
                    t.trial,
                    t.seed,
                    t.n,
                    f.rank_c,
                    f.rank_x,
                    pass_fail(t.report.passed)
                );
            }
            let _ = writeln!(s, "{} of {} trials passed", trials - failed, trials);
            s
        }
    };
    Ok(Outcome { body, code: if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

#[derive(Serialize)]
struct BlockRow {
    index: usize,
    kind: String,
    alpha_re: f64,
    alpha_im: f64,
}

fn render_classification(r: &ClassificationResult, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(to_json(r)),
        Format::Csv => csv_table(
            &r.blocks
                .iter()
                .enumerate()
                .map(|(index, b)| BlockRow { index, kind: format!("{:?}", b.kind), alpha_re: b.alpha.re, alpha_im: b.alpha.im })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "k = {}", r.k);
            let _ = writeln!(s, "fundamental sequence: {}", fmt_list(&r.fundamental_sequence()));
            for (i, b) in r.blocks.iter().enumerate() {
                let _ = write!(s, "  block {i}: {:<11} alpha = {}", format!("{:?}", b.kind), fmt_c(b.alpha));
                if let Some(p) = b.params {
                    let _ = write!(s, "  lambda = {:.6}  gamma = {}", p.lambda, fmt_c(p.gamma));
                }
                s.push('\n');
            }
            let su = &r.shift_unitary;
            let _ = writeln!(s, "shift-unitary part: dimension {}", su.dim);
            if su.dim > 0 {
                let _ = writeln!(s, "  U on ran P:      {}", fmt_list(&su.eigs_on_p));
                let _ = writeln!(s, "  U on ran P^perp: {}", fmt_list(&su.eigs_on_pperp));
            }
            let res = &r.residuals;
            let _ = writeln!(
                s,
                "residuals: normality {:.2e}, E1 containment {:.2e}, |alpha| - lambda {:.2e}",
                res.normality, res.e1_containment, res.alpha_lambda_gap
            );
            Ok(s)
        }
    }
}

fn render_verdict(v: &EquivalenceVerdict, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(to_json(v)),
        Format::Csv => Err(Failure::input("equiv has no CSV output")),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{}", if v.equivalent { "equivalent" } else { "not equivalent" });
            let r = &v.report;
            let _ = writeln!(s, "first:  k = {}  sequence {}", r.k_a, fmt_list(&r.sequence_a));
            let _ = writeln!(s, "second: k = {}  sequence {}", r.k_b, fmt_list(&r.sequence_b));
            if let Some(m) = &v.matching {
                let _ = writeln!(s, "matching: {m:?}");
            } else if !r.shift_unitary_match {
                let _ = writeln!(s, "shift-unitary parts differ");
            }
            Ok(s)
        }
    }
}

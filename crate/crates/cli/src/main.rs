//! Command-line surface for the plate-spectrum pipeline.
//!
//! Stages communicate through files (spectrum JSON, bound-report CSV,
//! verdict JSON lines), so any stage can be replaced or replayed. Every
//! command is deterministic for a fixed seed, and the exit status encodes
//! the verdict: 0 when all asserted checks passed, 2 when some check failed
//! (with a machine-readable failure list on stderr), 1 on usage or i/o
//! errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use platelab::bounds::{build_report, ReportOptions};
use platelab::discretize::{
    clamped_bilaplacian, dirichlet_laplacian, neumann_laplacian, ProblemTag, SparseOperator,
};
use platelab::eigensolve::{lowest_eigenpairs, SolveOptions, Spectrum};
use platelab::fourier_probe::run_probe;
use platelab::geometry::{build_domain, summarize};
use platelab::lemma_lab::{dimension_constants, random_admissible_profile, verify_lemma_case};
use platelab::rearrangement::{decreasing_rearrangement, GridFunction};
use platelab::rng::SplitMix64;

#[derive(Parser)]
#[command(
    name = "platelab",
    version,
    about = "Plate and Laplacian spectra with lower-bound verification"
)]
struct Cli {
    /// Optional config file with `key=value` lines supplying flag defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Dirichlet,
    Neumann,
    Clamped,
}

impl ProblemArg {
    fn tag(self) -> ProblemTag {
        match self {
            ProblemArg::Dirichlet => ProblemTag::DirichletLaplacian,
            ProblemArg::Neumann => ProblemTag::NeumannLaplacian,
            ProblemArg::Clamped => ProblemTag::ClampedBilaplacian,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    /// Indicator of the domain.
    Indicator,
    /// 1 − |x − centroid| / r_max, clipped at zero.
    Cone,
    /// Gaussian bump centered at the centroid.
    Bump,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the lowest eigenvalues of a problem on a rasterized domain.
    Solve(SolveArgs),
    /// Evaluate the lower bounds against a computed spectrum.
    Bounds(BoundsArgs),
    /// Verify the moment inequalities on seeded random profiles.
    VerifyLemma(VerifyLemmaArgs),
    /// Run the Fourier-side identity checks on computed eigenfunctions.
    Probe(ProbeArgs),
    /// Rearrange a test function on a domain and emit its radial profile.
    Rearrange(RearrangeArgs),
    /// Print the dimensional constants table.
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Shape spec, e.g. `disk:r=1`, `rect:w=1,h=2`, `lshape:a=1,b=0.5`,
    /// `mask:path`.
    #[arg(long)]
    domain: String,
    /// Grid spacing.
    #[arg(long)]
    h: f64,
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Number of eigenpairs.
    #[arg(long)]
    m: usize,
    /// Relative residual tolerance (default 1e-9; fourth-order problems on
    /// fine grids need a looser target, bounded below by eps·cond).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "spectrum.json")]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    /// Spectrum JSON produced by `solve`.
    #[arg(long)]
    spectrum: PathBuf,
    /// Companion Neumann spectrum JSON (enables the Neumann-corrected
    /// plate bound).
    #[arg(long)]
    neumann: Option<PathBuf>,
    /// Dimensional constant of the Melas bound (no default).
    #[arg(long)]
    melas_cn: Option<f64>,
    /// Relative slack granted to lower bounds before flagging a violation.
    #[arg(long, default_value_t = 0.01)]
    slack: f64,
    #[arg(long, default_value = "bounds.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyLemmaArgs {
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "lemma.jsonl")]
    out: PathBuf,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    h: f64,
    /// Number of eigenpairs to transform and check.
    #[arg(long)]
    m: usize,
    /// Padding factor of the transform box; the dual grid resolution is set
    /// by the padded box size, and the radial identities need pad ≳ 8 on
    /// unit-scale domains.
    #[arg(long, default_value_t = 10)]
    pad: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "probe.json")]
    out: PathBuf,
}

#[derive(Args)]
struct RearrangeArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    h: f64,
    #[arg(long, value_enum, default_value_t = FunctionArg::Indicator)]
    function: FunctionArg,
    #[arg(long, default_value = "profile.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, default_value_t = 64)]
    n_max: usize,
}

/// Failures collected for the machine-readable stderr list.
struct Failures(Vec<(String, String)>);

impl Failures {
    fn new() -> Self {
        Failures(Vec::new())
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.0.push((name.to_string(), detail));
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            return Ok(());
        }
        let list: Vec<serde_json::Value> = self
            .0
            .iter()
            .map(|(name, detail)| serde_json::json!({ "check": name, "detail": detail }))
            .collect();
        eprintln!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({ "failures": list }))?
        );
        std::process::exit(2);
    }
}

fn solve_operator(domain: &str, h: f64, problem: ProblemTag) -> Result<SparseOperator> {
    let d = build_domain(domain, h).with_context(|| format!("building domain `{domain}`"))?;
    Ok(match problem {
        ProblemTag::DirichletLaplacian => dirichlet_laplacian(&d),
        ProblemTag::NeumannLaplacian => neumann_laplacian(&d),
        ProblemTag::ClampedBilaplacian => clamped_bilaplacian(&d),
    })
}

fn default_tol(problem: ProblemTag) -> f64 {
    match problem {
        // the attainable residual scales with eps·cond(A); the fourth-order
        // operator needs the looser default on fine grids
        ProblemTag::ClampedBilaplacian => 1e-6,
        _ => 1e-9,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let tag = args.problem.tag();
    let op = solve_operator(&args.domain, args.h, tag)?;
    let tol = args.tol.unwrap_or_else(|| default_tol(tag));
    let opts = SolveOptions {
        seed: args.seed,
        want_vectors: false,
        ..Default::default()
    };
    let started = Instant::now();
    let spectrum = lowest_eigenpairs(&op, args.m, tol, &opts)?;
    spectrum.validate(tol)?;
    std::fs::write(&args.out, spectrum.to_json()? + "\n")?;
    eprintln!(
        "solved {} on {} ({} unknowns) in {:.2}s -> {}",
        tag,
        args.domain,
        op.dim,
        started.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let spectrum = Spectrum::from_json(&std::fs::read_to_string(&args.spectrum)?)?;
    let domain = build_domain(&spectrum.domain_ref, spectrum.h)
        .with_context(|| format!("rebuilding domain `{}`", spectrum.domain_ref))?;
    let geo = summarize(&domain);
    let neumann = match &args.neumann {
        Some(path) => {
            let neu = Spectrum::from_json(&std::fs::read_to_string(path)?)?;
            if neu.domain_ref != spectrum.domain_ref || neu.h != spectrum.h {
                bail!(
                    "Neumann spectrum was computed on `{}` at h={}, expected `{}` at h={}",
                    neu.domain_ref,
                    neu.h,
                    spectrum.domain_ref,
                    spectrum.h
                );
            }
            Some(neu)
        }
        None => None,
    };
    let opts = ReportOptions {
        slack: args.slack,
        neumann,
        melas_cn: args.melas_cn,
    };
    let report = build_report(&spectrum, &geo, &opts)?;
    std::fs::write(&args.out, report.to_csv())?;
    let mut failures = Failures::new();
    for row in &report.rows {
        failures.check(
            "bound_row",
            !row.violated,
            format!(
                "k={} mean={} violates a bound beyond slack {}",
                row.k, row.mean, args.slack
            ),
        );
    }
    eprintln!("bound report -> {}", args.out.display());
    failures.finish()
}

fn cmd_verify_lemma(args: VerifyLemmaArgs) -> Result<()> {
    let mut rng = SplitMix64::new(args.seed);
    let mut out = String::new();
    let mut passed = 0usize;
    let mut failures = Failures::new();
    let started = Instant::now();
    for case in 0..args.cases {
        let profile = random_admissible_profile(&mut rng);
        let verdict = verify_lemma_case(&profile)?;
        let ok = verdict.holds_25 && verdict.holds_26;
        if ok {
            passed += 1;
        }
        failures.check(
            "lemma_case",
            ok,
            format!(
                "case {case}: lhs_25={} rhs_25={} lhs_26={} rhs_26={}",
                verdict.lhs_25, verdict.rhs_25, verdict.lhs_26, verdict.rhs_26
            ),
        );
        let mut line = serde_json::to_value(verdict)?;
        line["case"] = serde_json::json!(case);
        line["b"] = serde_json::json!(profile.b);
        line["eta"] = serde_json::json!(profile.eta);
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string(&serde_json::json!({
            "summary": { "cases": args.cases, "passed": passed, "seed": args.seed,
                          "elapsed_s": started.elapsed().as_secs_f64() }
        }))?
    )?;
    std::fs::write(&args.out, out)?;
    eprintln!(
        "{passed}/{} lemma cases hold -> {}",
        args.cases,
        args.out.display()
    );
    failures.finish()
}

fn cmd_probe(args: ProbeArgs) -> Result<()> {
    let domain = build_domain(&args.domain, args.h)?;
    let geo = summarize(&domain);
    let op = clamped_bilaplacian(&domain);
    let opts = SolveOptions {
        seed: args.seed,
        want_vectors: true,
        ..Default::default()
    };
    let spectrum = lowest_eigenpairs(&op, args.m, args.tol, &opts)?;
    let report = run_probe(&op, &spectrum, &geo, args.pad, args.m)?;
    std::fs::write(&args.out, serde_json::to_string_pretty(&report)? + "\n")?;
    let mut failures = Failures::new();
    for check in &report.checks {
        failures.check(
            &check.name,
            check.pass,
            format!(
                "worst margin {:.3e} at z = {:?}",
                check.worst_margin, check.location
            ),
        );
    }
    eprintln!("probe report -> {}", args.out.display());
    failures.finish()
}

fn cmd_rearrange(args: RearrangeArgs) -> Result<()> {
    let domain = build_domain(&args.domain, args.h)?;
    let geo = summarize(&domain);
    let centroid = geo.centroid;
    let mut r_max: f64 = 0.0;
    for (_, x) in domain.inside_cells() {
        let mut r2 = 0.0;
        for q in 0..domain.n() {
            let d = x[q] - centroid[q];
            r2 += d * d;
        }
        r_max = r_max.max(r2.sqrt());
    }
    let n = domain.n();
    let f = GridFunction::from_domain(&domain, |x| {
        let mut r2 = 0.0;
        for q in 0..n {
            let d = x[q] - centroid[q];
            r2 += d * d;
        }
        let r = r2.sqrt();
        match args.function {
            FunctionArg::Indicator => 1.0,
            FunctionArg::Cone => (1.0 - r / r_max).max(0.0),
            FunctionArg::Bump => {
                let s = r_max / 2.0;
                (-r2 / (2.0 * s * s)).exp()
            }
        }
    })?;
    let profile = decreasing_rearrangement(&f)?;
    let mut out = String::new();
    writeln!(
        out,
        "# domain={} h={} function={:?}",
        args.domain, args.h, args.function
    )?;
    out.push_str(&profile.to_csv());
    std::fs::write(&args.out, out)?;
    eprintln!(
        "profile ({} samples) -> {}",
        profile.s.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_constants(args: ConstantsArgs) -> Result<()> {
    let mut failures = Failures::new();
    println!("n,ball_ratio,d_value,c2,c3,all_checks");
    for n in 1..=args.n_max.min(64) {
        let c = dimension_constants(n)?;
        println!(
            "{},{:.11e},{:.11e},{:.11e},{:.11e},{}",
            c.n, c.ball_ratio, c.d_value, c.c2, c.c3, c.all_checks
        );
        failures.check(
            "dimension_constants",
            c.all_checks,
            format!(
                "n={n}: ball_ratio={} d={} c2={} c3={}",
                c.ball_ratio, c.d_value, c.c2, c.c3
            ),
        );
    }
    failures.finish()
}

/// Merge `key=value` lines from a config file into missing long flags.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config");
    let Some(pos) = pos else {
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .cloned()
        .context("--config needs a path")?;
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config `{path}`"))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line `{line}` is not key=value"))?;
        let flag = format!("--{}", key.trim());
        if !argv.iter().any(|a| a == &flag) {
            argv.push(flag);
            argv.push(value.trim().to_string());
        }
    }
    Ok(argv)
}

fn main() -> Result<()> {
    let argv = merge_config(std::env::args().collect())?;
    let cli = Cli::parse_from(argv);
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::VerifyLemma(args) => cmd_verify_lemma(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Rearrange(args) => cmd_rearrange(args),
        Command::Constants(args) => cmd_constants(args),
    }
}

//! Batch front-end: verdicts, count tables, growth reports, constructions,
//! verification, rendering, and canned demo reproductions.
//!
//! Exit codes: 0 proven-exists, 1 proven-not-exists, 2 heuristic or
//! inconclusive, 3 errors.  Identical inputs and seed produce byte-identical
//! outputs; `WAVESET_THREADS` caps the enumeration worker pool.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::One;

use waveset::construct::{
    build_wavelet_core, csb_upgrade, verify_wavelet, tiling_generator, CoreParams,
};
use waveset::existence::{decide, DecideOptions, Verdict};
use waveset::io;
use waveset::lattice::{count_series, Lattice};
use waveset::linalg::{Matrix, QMatrix};
use waveset::rat::{parse_q, q, qr, Q};
use waveset::regions::Region;

#[derive(Parser)]
#[command(
    name = "waveset",
    version,
    about = "Decide, diagnose, and construct simultaneous dilation/translation tilings"
)]
struct Cli {
    /// Output directory for reports and artifacts (default: report to stdout
    /// only).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed recorded in reports and used by any randomized diagnostic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Maximum series index for counting diagnostics.
    #[arg(long, global = true)]
    jmax: Option<u32>,

    /// Ball radius for counting diagnostics (rational, e.g. "1" or "3/2").
    #[arg(long, global = true)]
    radius: Option<String>,

    /// Primary report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence for a problem spec and dump the evidence.
    Analyze {
        /// Problem spec JSON file ({"matrix": …, "lattice": …, …}).
        #[arg(long)]
        spec: PathBuf,
    },
    /// Count table N_j with series diagnostics (CSV).
    Count {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Canned reproductions: shannon, iw2d, obvious, lcc, quincunx.
    Demo {
        name: String,
        /// Scale parameter for the singular-approximant scheme of the lcc
        /// demo (active range of j).
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Run the shell-by-shell construction.
    Construct {
        /// Matrix JSON file.
        #[arg(long)]
        matrix: PathBuf,
        /// Lattice JSON file.
        #[arg(long)]
        lattice: PathBuf,
        /// Truncation half-width for unbounded generator factors.
        #[arg(long, default_value = "2")]
        l: String,
        /// Shell count (refined so each shell has measure < 1/2).
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Covering-deficit tolerance (rational).
        #[arg(long, default_value = "1/1000")]
        tol: String,
        #[arg(long, default_value_t = 30)]
        maxiter: usize,
    },
    /// Verify a region against a matrix and lattice.
    Verify {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        /// Tolerance on the dilation/translation reports (rational).
        #[arg(long, default_value = "0")]
        tol: String,
    },
    /// Render a region (dims 1–2) as SVG.
    Render {
        #[arg(long)]
        region: PathBuf,
        /// Output file (default: <out>/region.svg or stdout).
        #[arg(long)]
        to: Option<PathBuf>,
    },
    /// Upgrade a dilation-tiling, translation-packing region toward a
    /// simultaneous tile.
    Upgrade {
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        /// Target translation deficit (rational).
        #[arg(long, default_value = "1/10000")]
        target: String,
        #[arg(long, default_value_t = 40)]
        maxiter: usize,
    },
}

fn write_artifact(out: &Option<PathBuf>, name: &str, content: &str) -> anyhow::Result<Option<String>> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, content)?;
        Ok(Some(path.display().to_string()))
    } else {
        Ok(None)
    }
}

fn load_spec(path: &Path) -> anyhow::Result<io::ProblemSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading problem spec {}", path.display()))?;
    Ok(io::parse_problem_spec(&text)?)
}

fn decide_options(cli: &Cli, spec: &io::ProblemSpec) -> anyhow::Result<DecideOptions> {
    let radius = match &cli.radius {
        Some(r) => parse_q(r)?,
        None => spec.radius.clone(),
    };
    Ok(DecideOptions {
        radius,
        jmax: cli.jmax.unwrap_or(spec.jmax),
        user_subspaces: spec.subspaces.clone(),
        ..Default::default()
    })
}

fn emit_report(cli: &Cli, verdict: Verdict, artifacts: Vec<String>) -> anyhow::Result<i32> {
    let code = verdict.status.exit_code();
    let report = io::Report {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed: cli.seed,
        verdict,
        exit_code: code,
        artifacts,
    };
    let text = io::report_json(&report);
    if let Some(p) = write_artifact(&cli.out, "report.json", &text)? {
        eprintln!("report written to {p}");
    }
    println!("{text}");
    Ok(code)
}

fn cmd_analyze(cli: &Cli, spec_path: &Path) -> anyhow::Result<i32> {
    let spec = load_spec(spec_path)?;
    let opts = decide_options(cli, &spec)?;
    let verdict = decide(&spec.matrix, &spec.lattice, &opts)?;
    let mut artifacts = Vec::new();
    // Series CSV next to the report when possible.
    if let Ok(series) = count_series(
        &spec.matrix,
        &spec.lattice,
        &opts.radius,
        opts.jmax,
        opts.cap,
    ) {
        if let Some(p) = write_artifact(&cli.out, "series.csv", &io::count_series_csv(&series))? {
            artifacts.push(p);
        }
    }
    emit_report(cli, verdict, artifacts)
}

fn cmd_count(cli: &Cli, spec_path: &Path) -> anyhow::Result<i32> {
    let spec = load_spec(spec_path)?;
    let opts = decide_options(cli, &spec)?;
    let series = count_series(
        &spec.matrix,
        &spec.lattice,
        &opts.radius,
        opts.jmax,
        waveset::lattice::ENUM_CAP_DEFAULT,
    )?;
    let csv = io::count_series_csv(&series);
    let diag = waveset::existence::series_diagnostics(&series);
    if let Some(p) = write_artifact(&cli.out, "series.csv", &csv)? {
        eprintln!("series written to {p}");
    }
    match cli.format {
        Format::Csv => print!("{csv}"),
        _ => {
            let summary = serde_json::json!({
                "entries": series.entries,
                "partial_sums": diag.partial_sums,
                "bounded_witness": diag.bounded_witness,
                "geometric_fit": diag.geometric_fit,
                "truncated_at": series.truncated_at,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(2)
}

fn demo_pair(name: &str, depth: u32) -> anyhow::Result<(Matrix, Lattice, &'static str)> {
    match name {
        "shannon" => Ok((
            Matrix::from_q(QMatrix::diagonal(&[q(2)]))?,
            Lattice::standard(1),
            "dyadic dilation on the integer lattice",
        )),
        "iw2d" => {
            let a = Matrix::from_q(QMatrix::diagonal(&[q(4), qr(1, 2)]))?;
            let lat = Lattice::from_rows(&Matrix::from_f64_rows(vec![
                vec![1.0, 0.0],
                vec![std::f64::consts::SQRT_2, 1.0],
            ])?)?;
            Ok((a, lat, "planar kernel rule, sheared irrational lattice"))
        }
        "obvious" => {
            let a = Matrix::from_q(QMatrix::diagonal(&[q(2), q(2), qr(1, 3)]))?;
            let lat = Lattice::from_q_rows(vec![
                vec![q(1), q(1), q(0)],
                vec![q(0), q(0), q(1)],
                vec![q(1), q(0), q(0)],
            ])?;
            Ok((a, lat, "skew plane witness in three dimensions"))
        }
        "quincunx" => {
            let a = Matrix::from_q(QMatrix::from_rows(vec![
                vec![q(1), q(1)],
                vec![q(-1), q(1)],
            ])?)?;
            Ok((a, Lattice::standard(2), "rotation-scaling with modulus √2"))
        }
        "lcc" => {
            // Singular-type approximant scheme: rational stand-ins for the
            // badly-behaved pair, active for j up to `depth`.  The scheme is
            // documented in the README; results are scheme-dependent.
            let qd: Q = q(11).pow(depth as i32);
            let alpha = Q::one() / &qd;
            let beta = Q::one() / (q(3) * &qd + Q::one());
            let a = Matrix::from_q(QMatrix::diagonal(&[q(10), qr(1, 2), qr(1, 2)]))?;
            let lat = Lattice::from_q_rows(vec![
                vec![Q::one(), q(0), q(0)],
                vec![alpha, Q::one(), q(0)],
                vec![beta, q(0), Q::one()],
            ])?;
            Ok((a, lat, "singular-approximant counting blow-up (scheme-dependent)"))
        }
        other => bail!("unknown demo {other:?} (expected shannon|iw2d|obvious|lcc|quincunx)"),
    }
}

fn cmd_demo(cli: &Cli, name: &str, depth: u32) -> anyhow::Result<i32> {
    let (a, lat, note) = demo_pair(name, depth)?;
    let mut artifacts = Vec::new();

    if name == "shannon" {
        // Construct-and-verify demo: the symmetric band set tiles by both.
        let shannon = Region::intervals(vec![(q(-1), qr(-1, 2)), (qr(1, 2), q(1))]);
        let aq = a.as_q().unwrap();
        let (tile, _) = tiling_generator(&a, &q(2), None)?;
        let report = verify_wavelet(&shannon, aq, &lat, &tile, &q(0))?;
        if !report.pass {
            bail!("shannon verification failed: {report:?}");
        }
        if let Some(p) = write_artifact(&cli.out, "shannon.svg", &io::region_svg(&shannon)?)? {
            artifacts.push(p);
        }
        if let Some(p) = write_artifact(
            &cli.out,
            "shannon-region.json",
            &serde_json::to_string_pretty(&io::region_to_json(&shannon))?,
        )? {
            artifacts.push(p);
        }
        eprintln!("shannon: exact pass (excess = deficit = 0); {note}");
    }

    let radius = cli
        .radius
        .as_ref()
        .map(|r| parse_q(r))
        .transpose()?
        .unwrap_or_else(|| if name == "lcc" { q(2) } else { Q::one() });
    let jmax = cli.jmax.unwrap_or(match name {
        "lcc" => depth.min(12),
        _ => 20,
    });
    let opts = DecideOptions {
        radius: radius.clone(),
        jmax,
        ..Default::default()
    };
    let verdict = decide(&a, &lat, &opts)?;

    if name == "lcc" {
        // The counting blow-up at the active scales: N_j ≥ (11/10)^j.
        if let Ok(series) = count_series(&a, &lat, &radius, jmax, opts.cap) {
            for &(j, n) in &series.entries {
                let needed = 1.1f64.powi(j as i32);
                if (n as f64) < needed {
                    bail!("lcc demo: N_{j} = {n} below the certified bound {needed:.3}");
                }
            }
            if let Some(p) =
                write_artifact(&cli.out, "lcc-series.csv", &io::count_series_csv(&series))?
            {
                artifacts.push(p);
            }
            eprintln!(
                "lcc: counts exceed (11/10)^j on the active range j ≤ {jmax}; {note}"
            );
        }
    }

    emit_report(cli, verdict, artifacts)
}

fn cmd_construct(
    cli: &Cli,
    matrix: &Path,
    lattice: &Path,
    l: &str,
    k: usize,
    tol: &str,
    maxiter: usize,
) -> anyhow::Result<i32> {
    let a = io::parse_matrix(&fs::read_to_string(matrix)?)?;
    let lat = io::parse_lattice(&fs::read_to_string(lattice)?)?;
    let params = CoreParams {
        l: parse_q(l)?,
        k,
        tol: parse_q(tol)?,
        maxiter,
    };
    let cand = build_wavelet_core(&a, &lat, &params)?;
    let mut artifacts = Vec::new();
    if let Some(p) = write_artifact(
        &cli.out,
        "region.json",
        &serde_json::to_string_pretty(&io::region_to_json(&cand.region))?,
    )? {
        artifacts.push(p);
    }
    if let Some(p) = write_artifact(&cli.out, "trace.csv", &io::outer_trace_csv(&cand.outer_trace))? {
        artifacts.push(p);
    }
    if cand.region.dim() <= 2 {
        if let Some(p) = write_artifact(&cli.out, "region.svg", &io::region_svg(&cand.region)?)? {
            artifacts.push(p);
        }
    }
    let summary = serde_json::json!({
        "translation_packs": cand.translation_report.packs,
        "dilation_excess": waveset::rat::fmt_q(&cand.dilation_report.excess_volume),
        "dilation_deficit": waveset::rat::fmt_q(&cand.dilation_report.deficit_volume),
        "outer_steps": cand.outer_trace.len(),
        "inner_rows": cand.inner_rows,
        "region_pieces": cand.region.piece_count(),
        "region_volume": waveset::rat::fmt_q(&cand.region.volume()),
        "generator_approximate": cand.generator.approximate,
        "artifacts": artifacts,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    let ok = cand.translation_report.packs
        && cand.dilation_report.excess_volume == q(0)
        && cand.dilation_report.deficit_volume <= params.tol;
    Ok(if ok { 0 } else { 2 })
}

fn cmd_verify(
    cli: &Cli,
    region: &Path,
    matrix: &Path,
    lattice: &Path,
    tol: &str,
) -> anyhow::Result<i32> {
    let s = io::parse_region(&fs::read_to_string(region)?)?;
    let a = io::parse_matrix(&fs::read_to_string(matrix)?)?;
    let aq = a
        .as_q()
        .ok_or_else(|| anyhow!("verification needs a rational matrix"))?;
    let lat = io::parse_lattice(&fs::read_to_string(lattice)?)?;
    let (tile, _) = tiling_generator(&a, &q(2), None)?;
    let report = verify_wavelet(&s, aq, &lat, &tile, &parse_q(tol)?)?;
    let summary = serde_json::json!({
        "pass": report.pass,
        "translation": {
            "packs": report.translation.packs,
            "covers": report.translation.covers,
            "excess": waveset::rat::fmt_q(&report.translation.excess_volume),
            "deficit": waveset::rat::fmt_q(&report.translation.deficit_volume),
        },
        "dilation": {
            "packs": report.dilation.packs,
            "covers": report.dilation.covers,
            "excess": waveset::rat::fmt_q(&report.dilation.excess_volume),
            "deficit": waveset::rat::fmt_q(&report.dilation.deficit_volume),
            "truncation_bound": waveset::rat::fmt_q(&report.dilation.truncation_bound),
        },
    });
    if let Some(p) = write_artifact(&cli.out, "verify.json", &serde_json::to_string_pretty(&summary)?)? {
        eprintln!("verification written to {p}");
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_render(cli: &Cli, region: &Path, to: &Option<PathBuf>) -> anyhow::Result<i32> {
    let r = io::parse_region(&fs::read_to_string(region)?)?;
    let svg = io::region_svg(&r)?;
    match (to, &cli.out) {
        (Some(path), _) => fs::write(path, &svg)?,
        (None, Some(_)) => {
            write_artifact(&cli.out, "region.svg", &svg)?;
        }
        (None, None) => print!("{svg}"),
    }
    Ok(0)
}

fn cmd_upgrade(
    cli: &Cli,
    region: &Path,
    matrix: &Path,
    lattice: &Path,
    target: &str,
    maxiter: usize,
) -> anyhow::Result<i32> {
    let u = io::parse_region(&fs::read_to_string(region)?)?;
    let a = io::parse_matrix(&fs::read_to_string(matrix)?)?;
    let aq = a
        .as_q()
        .ok_or_else(|| anyhow!("upgrade needs a rational matrix"))?;
    let lat = io::parse_lattice(&fs::read_to_string(lattice)?)?;
    let (out, trace) = csb_upgrade(&u, aq, &lat, &parse_q(target)?, maxiter)?;
    let mut artifacts = Vec::new();
    if let Some(p) = write_artifact(
        &cli.out,
        "upgraded-region.json",
        &serde_json::to_string_pretty(&io::region_to_json(&out))?,
    )? {
        artifacts.push(p);
    }
    if let Some(p) = write_artifact(&cli.out, "upgrade-trace.csv", &io::csb_trace_csv(&trace))? {
        artifacts.push(p);
    }
    let summary = serde_json::json!({
        "iterations": trace.len(),
        "final_deficit": trace.last().map(|r| waveset::rat::fmt_q(&r.deficit)),
        "volume": waveset::rat::fmt_q(&out.volume()),
        "artifacts": artifacts,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze { spec } => cmd_analyze(&cli, spec),
        Command::Count { spec } => cmd_count(&cli, spec),
        Command::Demo { name, depth } => cmd_demo(&cli, name, *depth),
        Command::Construct {
            matrix,
            lattice,
            l,
            k,
            tol,
            maxiter,
        } => cmd_construct(&cli, matrix, lattice, l, *k, tol, *maxiter),
        Command::Verify {
            region,
            matrix,
            lattice,
            tol,
        } => cmd_verify(&cli, region, matrix, lattice, tol),
        Command::Render { region, to } => cmd_render(&cli, region, to),
        Command::Upgrade {
            region,
            matrix,
            lattice,
            target,
            maxiter,
        } => cmd_upgrade(&cli, region, matrix, lattice, target, *maxiter),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

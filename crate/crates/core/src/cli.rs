//! Command-line front end. Exit codes: 0 when every check passes, 1 when a
//! check fails, 2 for usage and input errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{self, SweepConfig};
use crate::error::Result;
use crate::filling::{build_filling, predict_density, BuildResult, Params};
use crate::io::{self, MeshFormat};
use crate::oracle::{self, EnumerationBudget};
use crate::simplicial::{validate_disk, SkeletonGraph, Triangulation};
use crate::verify::{self, uniform_estimates};

#[derive(Parser, Debug)]
#[command(name = "ringfill", version, about = "Annular isometric fillings of cycle graphs")]
pub struct Cli {
    /// Worker threads for verification and sweeps.
    #[arg(long, global = true, env = "RINGFILL_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: u32,
    /// Collar width as a fraction of n; decimals or `a/b`.
    #[arg(long, default_value = "0.1")]
    pub rho: String,
    /// Innermost cycle length as a fraction of n.
    #[arg(long, default_value = "0.25")]
    pub eta: String,
}

impl ParamArgs {
    fn params(&self) -> Result<Params> {
        Params::parse(self.n, &self.rho, &self.eta)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build K_n and write it as JSON with its schedule.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the exact Lipschitz constant of a filling read from JSON.
    Verify {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include a shortest shortcut path in the report.
        #[arg(long)]
        witness: bool,
    },
    /// Build K_n and run every structural, drift and distance check.
    Audit {
        #[command(flatten)]
        params: ParamArgs,
        /// Seed for pair sampling above `--all-pairs-up-to`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        all_pairs_up_to: u32,
        /// Also run the full isometry check.
        #[arg(long)]
        isometry: bool,
    },
    /// Build and check K_n for several n; writes CSV.
    Sweep {
        #[arg(long = "n-list", alias = "n", value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
        #[arg(long, default_value = "0.1")]
        rho: String,
        #[arg(long, default_value = "0.25")]
        eta: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip all-pairs verification above this n.
        #[arg(long, default_value_t = u32::MAX)]
        verify_up_to: u32,
    },
    /// Exhaustive search for the smallest isometric filling of C_n.
    Oracle {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        max_interior: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical checks of the continuum profile.
    Analyze {
        #[arg(long)]
        core_inequality: bool,
        #[arg(long)]
        profile_integral: bool,
        #[arg(long)]
        constants: bool,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Values of eta for the profile integral.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.5, 0.9])]
        eta: Vec<f64>,
    },
    /// Write a filling as an OFF or OBJ mesh.
    Export {
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(MeshFormat))]
        format: MeshFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl clap::builder::ValueParserFactory for MeshFormat {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<MeshFormat>().map_err(|e| e.to_string()))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn check(label: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    eprintln!("[{}] {label}: {detail}", if ok { "pass" } else { "FAIL" });
    ok
}

fn read_triangulation(path: &Path) -> Result<(Triangulation, Option<BuildResult>)> {
    let text = io::read_to_string(path)?;
    if io::has_build_metadata(&text) {
        let b = io::build_from_json(&text)?;
        Ok((b.complex.clone(), Some(b)))
    } else {
        Ok((io::triangulation_from_json(&text)?, None))
    }
}

fn cmd_build(params: &ParamArgs, out: Option<&Path>) -> Result<bool> {
    let b = build_filling(&params.params()?)?;
    let prediction = predict_density(&b.params);
    eprintln!(
        "n={} vertices={} triangles={} density={:.6} bound={:.6}",
        b.params.n,
        b.vertex_count(),
        b.complex.triangles().len(),
        b.density(),
        prediction.bound_f64()
    );
    emit(out, &io::build_to_json(&b)?)?;
    Ok(true)
}

fn cmd_verify(input: &Path, out: Option<&Path>, witness: bool) -> Result<bool> {
    let (t, build) = read_triangulation(input)?;
    let disk = validate_disk(&t);
    if !check("disk", disk.is_valid(), format!("{} defects", disk.defects.len())) {
        for d in &disk.defects {
            eprintln!("  {d}");
        }
        return Ok(false);
    }
    let report = verify::verify_filling(&t)?;
    let eps = build.as_ref().map(|b| uniform_estimates(b).eps_n);
    let w = report.worst_pair;
    check(
        "isometry",
        report.is_isometric,
        format!("delta={}/{} worst pair ({}, {}) d_K={} d_C={}", report.delta.num, report.delta.den, w.x, w.y, w.d_k, w.d_c),
    );
    emit(out, &io::report_to_json(&report, eps, witness)?)?;
    Ok(report.is_isometric)
}

fn cmd_audit(params: &ParamArgs, seed: u64, samples: usize, all_pairs_up_to: u32, isometry: bool) -> Result<bool> {
    let b = build_filling(&params.params()?)?;
    let n = b.params.n;
    let mut ok = true;

    let disk = validate_disk(&b.complex);
    ok &= check("disk", disk.is_valid(), format!("V={} E={} F={} chi={}", disk.vertices, disk.edges, disk.faces, disk.euler_characteristic));
    for d in &disk.defects {
        eprintln!("  {d}");
    }
    ok &= check(
        "counts",
        b.vertex_count() as u64 == b.predicted_vertex_count
            && b.complex.triangles().len() as u64 == b.predicted_triangle_count,
        format!("V={} (predicted {}), F={} (predicted {})", b.vertex_count(), b.predicted_vertex_count, b.complex.triangles().len(), b.predicted_triangle_count),
    );
    let lower = analysis::lower_bound(n, 1.0);
    ok &= check("size lower bound", b.vertex_count() as f64 >= lower, format!("{} >= {lower}", b.vertex_count()));

    match verify::drift_audit(&b) {
        Ok(audit) => {
            let edges: usize = audit.annuli.iter().map(|a| a.slanted_edges).sum();
            ok &= check(
                "drift",
                audit.equal_annuli_attain_bound(),
                format!("{} annuli, {edges} slanted edges within bound", audit.annuli.len()),
            );
        }
        Err(e) => ok &= check("drift", false, e),
    }

    let g = SkeletonGraph::new(&b.complex);
    let pairs = if n <= all_pairs_up_to {
        verify::all_boundary_pairs(n)
    } else {
        verify::sample_boundary_pairs(n, samples, seed)
    };
    let lb = verify::check_lower_bound(&b, &g, &pairs)?;
    ok &= check("lower bound soundness", lb.is_sound(), format!("{} pairs, {} violations", lb.pairs_checked, lb.violations.len()));

    if isometry {
        let r = verify::verify_with_graph(&b.complex, &g)?;
        ok &= check("isometry", r.is_isometric, format!("delta={}/{}", r.delta.num, r.delta.den));
    }

    let eps = uniform_estimates(&b);
    eprintln!("eps_n={:.6} (depth {:.6}, length {:.6}, drift {:.6})", eps.eps_n, eps.depth, eps.length, eps.drift);
    Ok(ok)
}

fn cmd_sweep(n_list: &[u32], rho: &str, eta: &str, out: Option<&Path>, verify_up_to: u32) -> Result<bool> {
    let outcomes = analysis::run_sweep(n_list, rho, eta, SweepConfig { verify_up_to });
    let mut rows = Vec::new();
    let mut ok = true;
    for o in outcomes {
        match o.row {
            Ok(row) => {
                if row.is_isometric == Some(false) {
                    eprintln!("n={}: not isometric (delta={:?})", row.n, row.delta);
                }
                rows.push(row);
            }
            Err(e) => {
                ok = false;
                eprintln!("n={}: {e}", o.n);
            }
        }
    }
    let mut buf = Vec::new();
    analysis::write_sweep_csv(&rows, &mut buf)?;
    emit(out, &String::from_utf8_lossy(&buf))?;
    Ok(ok)
}

fn cmd_oracle(n: u32, max_interior: u32, out: Option<&Path>) -> Result<bool> {
    let budget = EnumerationBudget::new(n, max_interior)?;
    let r = oracle::min_isometric_vertices(n, budget)?;
    eprintln!("examined per interior count: {:?}", r.examined);
    if r.may_be_incomplete {
        eprintln!("warning: enumeration hit its output cap");
    }
    match (&r.min_vertices, &r.witness) {
        (Some(v), Some(w)) => {
            eprintln!("n={n}: minimum isometric filling has {v} vertices");
            emit(out, &io::triangulation_to_json(w)?)?;
            Ok(true)
        }
        _ => {
            eprintln!("n={n}: no isometric filling with at most {max_interior} interior vertices");
            Ok(false)
        }
    }
}

fn cmd_analyze(core: bool, integral: bool, constants: bool, grid: usize, etas: &[f64]) -> Result<bool> {
    let all = !(core || integral || constants);
    let mut ok = true;
    if core || all {
        let r = analysis::check_core_inequality(grid, grid, 0.0);
        ok &= check(
            "core inequality",
            r.passes(),
            format!("min slack {:e} at (t, s)=({:.4}, {:.4}); max |slack| at s=1/2 {:e}", r.min_slack, r.min_at.0, r.min_at.1, r.max_abs_slack_at_half),
        );
    }
    if integral || all {
        for &eta in etas {
            let p = analysis::profile_integral(eta);
            ok &= check(
                &format!("profile integral eta={eta}"),
                p.agrees_within(1e-10),
                format!("closed form {:.15}, quadrature {:.15}", p.closed_form, p.quadrature),
            );
        }
    }
    if constants || all {
        let c = analysis::constants_report();
        ok &= check(
            "constants",
            c.ordering_holds(),
            format!("{} <= {:.6} < {:.5} (gap {:.5})", c.lower, c.annular, c.hemisphere, c.gap),
        );
    }
    Ok(ok)
}

fn cmd_export(input: &Path, format: MeshFormat, out: Option<&Path>) -> Result<bool> {
    let (t, _) = read_triangulation(input)?;
    emit(out, &io::export_mesh(&t, format))?;
    Ok(true)
}

pub fn run(cli: Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match cli.command {
        Command::Build { params, out } => cmd_build(&params, out.as_deref()),
        Command::Verify { input, out, witness } => cmd_verify(&input, out.as_deref(), witness),
        Command::Audit { params, seed, samples, all_pairs_up_to, isometry } => {
            cmd_audit(&params, seed, samples, all_pairs_up_to, isometry)
        }
        Command::Sweep { n_list, rho, eta, out, verify_up_to } => cmd_sweep(&n_list, &rho, &eta, out.as_deref(), verify_up_to),
        Command::Oracle { n, max_interior, out } => cmd_oracle(n, max_interior, out.as_deref()),
        Command::Analyze { core_inequality, profile_integral, constants, grid, eta } => {
            cmd_analyze(core_inequality, profile_integral, constants, grid, &eta)
        }
        Command::Export { input, format, out } => cmd_export(&input, format, out.as_deref()),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

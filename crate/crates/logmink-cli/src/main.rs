//! Command-line surface for the logmink toolkit: validation, solving,
//! cone-volume extraction, log-centers, inequality sweeps, and planar SVG
//! figures. Orchestration only — all mathematics lives in the library.
//!
//! Exit codes: 0 ok, 2 condition failure, 3 non-convergence, 64 bad input,
//! 65 unsupported dimension.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use logmink::inequalities;
use logmink::io as mio;
use logmink::logcenter;
use logmink::measure::{
    classify_concentration, ConditionStatus, MeasureError, SubspaceReport, SubspaceStatus,
};
use logmink::sampling;
use logmink::solver::{SolveError, SolveOptions};
use logmink::splitter::{self, SplitError};

const EXIT_CONDITION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_BAD_INPUT: u8 = 64;
const EXIT_BAD_DIMENSION: u8 = 65;

#[derive(Parser)]
#[command(name = "logmink", about = "Discrete logarithmic Minkowski problem toolkit")]
struct Cli {
    /// Residual tolerance for solves.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for randomized sweeps; everything else is deterministic.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Iteration cap for the outer descent.
    #[arg(long, global = true, default_value_t = 5000)]
    max_iter: usize,
    /// Worker threads for the inequality sweep.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the concentration condition of a measure JSON file.
    Validate { path: PathBuf },
    /// Solve the logarithmic Minkowski problem for a measure.
    Solve {
        #[arg(long)]
        measure: PathBuf,
        /// Output polytope JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Iteration trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Bypass the equality-case splitter.
        #[arg(long)]
        strict_only: bool,
    },
    /// Cone-volume measure of a polytope JSON file.
    Conemeasure { path: PathBuf },
    /// Log-center of a polytope (against its own cone-volume measure unless
    /// one is given).
    Logcenter {
        polytope: PathBuf,
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// Random sweep of the opposite-facet inequalities.
    CheckIneq {
        #[arg(long, default_value_t = 1000)]
        random: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Report CSV (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Emit an SVG figure of a planar polytope.
    Plot {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Solve {
            measure,
            out,
            trace,
            strict_only,
        } => {
            let opts = SolveOptions {
                residual_tol: cli.tol,
                max_iter: cli.max_iter,
                step0: 1.0,
                seed: cli.seed,
            };
            cmd_solve(&measure, out, trace, strict_only, &opts)
        }
        Command::Conemeasure { path } => cmd_conemeasure(&path),
        Command::Logcenter { polytope, measure } => cmd_logcenter(&polytope, measure.as_deref()),
        Command::CheckIneq {
            random,
            dim,
            report,
        } => cmd_check_ineq(random, dim, cli.seed, cli.jobs, report),
        Command::Plot { path, out } => cmd_plot(&path, out),
    }
}

fn subspace_json(report: &SubspaceReport) -> serde_json::Value {
    let basis: Vec<Vec<f64>> = (0..report.basis.ncols())
        .map(|j| report.basis.column(j).iter().copied().collect())
        .collect();
    json!({
        "basis": basis,
        "dim": report.dim_xi,
        "essential": report.essential,
        "mass": report.mass,
        "bound": report.bound,
        "status": match report.status {
            SubspaceStatus::Strict => "STRICT",
            SubspaceStatus::Equality => "EQUALITY",
            SubspaceStatus::Violated => "VIOLATED",
        },
        "partner": report.partner.as_deref().map(subspace_json),
    })
}

fn cmd_validate(path: &Path) -> Result<ExitCode, String> {
    let text = read_to_string(path)?;
    let m = mio::read_measure(&text).map_err(|e| e.to_string())?;
    match classify_concentration(&m) {
        Ok(verdict) => {
            let status = match verdict.status {
                ConditionStatus::StrictOk => "STRICT_OK",
                ConditionStatus::EqualityOk => "EQUALITY_OK",
                ConditionStatus::Fail => "FAIL",
            };
            let doc = json!({
                "hemisphere_ok": verdict.hemisphere_ok,
                "general_position": verdict.general_position,
                "status": status,
                "witnesses": verdict.witnesses.iter().map(subspace_json).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            if verdict.status == ConditionStatus::Fail {
                Ok(ExitCode::from(EXIT_CONDITION))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Err(MeasureError::HemisphereConcentrated { witness }) => {
            let doc = json!({
                "hemisphere_ok": false,
                "status": "FAIL",
                "witness_direction": witness,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(ExitCode::from(EXIT_CONDITION))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_solve(
    measure: &Path,
    out: Option<PathBuf>,
    trace_path: Option<PathBuf>,
    strict_only: bool,
    opts: &SolveOptions,
) -> Result<ExitCode, String> {
    let text = read_to_string(measure)?;
    let m = mio::read_measure(&text).map_err(|e| e.to_string())?;

    let solved = if strict_only {
        logmink::solver::solve_strict(&m, opts).map(|(p, trace)| (p, Some(trace)))
    } else {
        splitter::solve_with(&m, opts)
            .map(|p| (p, None))
            .map_err(|e| match e {
                SplitError::Solver(inner) => inner,
                SplitError::ConditionFailed { verdict } => SolveError::Precondition(format!(
                    "condition verdict {:?}",
                    verdict.status
                )),
                SplitError::Measure(inner) => SolveError::Measure(inner),
                other => SolveError::Precondition(other.to_string()),
            })
    };

    match solved {
        Ok((p, trace)) => {
            if let Some(path) = trace_path {
                let mut csv = String::from("iter,objective,residual_inf,step,min_support\n");
                if let Some(tr) = &trace {
                    for (i, rec) in tr.iterations.iter().enumerate() {
                        csv.push_str(&format!(
                            "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                            i, rec.objective, rec.residual_inf, rec.step, rec.min_support
                        ));
                    }
                }
                std::fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let residual = logmink::solver::residual(&p, &m).map_err(|e| e.to_string())?;
            let mut doc = mio::polytope_to_json(&p);
            doc.residual = Some(residual);
            emit(&out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        Err(SolveError::NonConvergence { iterations, trace }) => {
            eprintln!(
                "did not converge within {iterations} iterations; check for near-equality subspaces"
            );
            if let Some(path) = trace_path {
                let mut csv = String::from("iter,objective,residual_inf,step,min_support\n");
                for (i, rec) in trace.iterations.iter().enumerate() {
                    csv.push_str(&format!(
                        "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        i, rec.objective, rec.residual_inf, rec.step, rec.min_support
                    ));
                }
                let _ = std::fs::write(&path, csv);
            }
            Ok(ExitCode::from(EXIT_NONCONVERGENCE))
        }
        Err(SolveError::Precondition(msg)) => {
            eprintln!("precondition failed: {msg}");
            Ok(ExitCode::from(EXIT_CONDITION))
        }
        Err(SolveError::Measure(MeasureError::HemisphereConcentrated { witness })) => {
            eprintln!("measure is concentrated on a closed hemisphere; witness {witness:?}");
            Ok(ExitCode::from(EXIT_CONDITION))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_conemeasure(path: &Path) -> Result<ExitCode, String> {
    let text = read_to_string(path)?;
    let p = mio::read_polytope(&text).map_err(|e| e.to_string())?;
    let nu = p.cone_volume_measure().map_err(|e| e.to_string())?;
    println!("{}", mio::write_measure(&nu));
    Ok(ExitCode::SUCCESS)
}

fn cmd_logcenter(polytope: &Path, measure: Option<&Path>) -> Result<ExitCode, String> {
    let text = read_to_string(polytope)?;
    let p = mio::read_polytope(&text).map_err(|e| e.to_string())?;
    let m = match measure {
        Some(path) => mio::read_measure(&read_to_string(path)?).map_err(|e| e.to_string())?,
        None => p.cone_volume_measure().map_err(|e| e.to_string())?,
    };
    let r = logcenter::log_center(&p, &m).map_err(|e| e.to_string())?;
    let doc = json!({
        "xi": r.xi.iter().copied().collect::<Vec<f64>>(),
        "phi": r.phi_value,
        "gradient_norm": r.gradient_norm,
        "iterations": r.iterations,
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_ineq(
    random: usize,
    dim: usize,
    seed: u64,
    jobs: usize,
    report: Option<PathBuf>,
) -> Result<ExitCode, String> {
    if !(2..=6).contains(&dim) {
        eprintln!("dimension {dim} unsupported (need 2..=6)");
        return Ok(ExitCode::from(EXIT_BAD_DIMENSION));
    }
    let jobs = jobs.max(1);
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    let chunk = random.div_ceil(jobs);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..jobs {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(random);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                for inst in lo..hi {
                    // One RNG stream per instance keeps the sweep identical
                    // for any --jobs value.
                    let mut rng = rand_chacha_seeded(seed.wrapping_add(inst as u64));
                    let n_facets = dim + 2 + (rand::Rng::gen_range(&mut rng, 0..6)) as usize;
                    let p = sampling::random_polytope(&mut rng, dim, n_facets);
                    let mut lines = Vec::new();
                    for (k, hs) in p.halfspaces().iter().enumerate() {
                        let c = inequalities::check_opposite_facets(&p, &hs.normal)
                            .expect("interior origin by construction");
                        lines.push(format!(
                            "{},{},{:.16e},{:.16e},{:.16e},{}",
                            inst, k, c.lhs, c.rhs, c.slack, c.tight
                        ));
                    }
                    out.push((inst, lines));
                }
                out
            }));
        }
        for h in handles {
            rows.extend(h.join().expect("sweep worker"));
        }
    });
    rows.sort_by_key(|(inst, _)| *inst);
    let mut csv = String::from("instance,direction,lhs,rhs,slack,tight\n");
    let mut violations = 0usize;
    for (_, lines) in &rows {
        for l in lines {
            csv.push_str(l);
            csv.push('\n');
            let slack: f64 = l.split(',').nth(4).unwrap().parse().unwrap();
            if slack < -1e-9 {
                violations += 1;
            }
        }
    }
    emit(&report, &csv)?;
    eprintln!("checked {random} instances in dimension {dim}: {violations} violations");
    Ok(ExitCode::SUCCESS)
}

fn rand_chacha_seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn cmd_plot(path: &Path, out: Option<PathBuf>) -> Result<ExitCode, String> {
    let text = read_to_string(path)?;
    let p = mio::read_polytope(&text).map_err(|e| e.to_string())?;
    if p.dim() != 2 {
        eprintln!("plot supports dimension 2 only (got {})", p.dim());
        return Ok(ExitCode::from(EXIT_BAD_DIMENSION));
    }
    let m = p.cone_volume_measure().map_err(|e| e.to_string())?;
    let xi = logcenter::log_center(&p, &m).map_err(|e| e.to_string())?.xi;
    emit(&out, &render_svg(&p, &xi))?;
    Ok(ExitCode::SUCCESS)
}

fn render_svg(p: &logmink::Polytope, xi: &nalgebra::DVector<f64>) -> String {
    // Order vertices by angle around their centroid.
    let n = p.vertices().len() as f64;
    let cx: f64 = p.vertices().iter().map(|v| v[0]).sum::<f64>() / n;
    let cy: f64 = p.vertices().iter().map(|v| v[1]).sum::<f64>() / n;
    let mut verts: Vec<(f64, f64)> = p.vertices().iter().map(|v| (v[0], v[1])).collect();
    verts.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.partial_cmp(&tb).unwrap()
    });

    let r = p
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(1.0f64, f64::max)
        * 1.4;
    let scale = 200.0 / r;
    let tx = |x: f64| 250.0 + x * scale;
    let ty = |y: f64| 250.0 - y * scale;

    let mut svg = String::new();
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n",
    );
    svg.push_str("<rect width=\"500\" height=\"500\" fill=\"white\"/>\n");
    let pts: Vec<String> = verts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", tx(x), ty(y)))
        .collect();
    svg.push_str(&format!(
        "<polygon points=\"{}\" fill=\"#dbeafe\" stroke=\"#1d4ed8\" stroke-width=\"2\"/>\n",
        pts.join(" ")
    ));
    // Outward normals from facet centroids.
    for f in p.proper_facets() {
        let hs = &p.halfspaces()[f.normal_index];
        let (x0, y0) = (f.centroid[0], f.centroid[1]);
        let (x1, y1) = (x0 + hs.normal[0] * 0.25 * r, y0 + hs.normal[1] * 0.25 * r);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#16a34a\" stroke-width=\"1.5\"/>\n",
            tx(x0), ty(y0), tx(x1), ty(y1)
        ));
    }
    svg.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"black\"/>\n",
        tx(0.0),
        ty(0.0)
    ));
    svg.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#dc2626\"/>\n",
        tx(xi[0]),
        ty(xi[1])
    ));
    svg.push_str("</svg>\n");
    svg
}

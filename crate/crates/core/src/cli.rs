//! The `invrig` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::combinatorics::{exhaustive_cauchy_check, CauchyMode};
use crate::error::{Error, Result};
use crate::framework::{
    perturb, tangency_residuals, univalence_check, CFramework, Triangulation,
    DEFAULT_UNIVALENCE_TOL,
};
use crate::io::{self, Document};
use crate::linalg::TolPolicy;
use crate::packing::{
    koebe_construction, packing_tangency_residuals, FaceChoice, DEFAULT_MAX_SWEEPS,
    DEFAULT_PACKING_TOL,
};
use crate::rigidity::{
    equilibrium_stresses, extract_flex, inversive_distance_vector, jacobian_check,
    nontrivial_fraction, rigidity_verdict, trivial_motion_basis, RankMode, RigidityVerdict,
};
use crate::svg::{render_svg, RenderOptions};
use crate::sweep::genericity_sweep;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Vertex removed when a command needs a Koebe framework for a bare
/// triangulation and no `--vinf` applies.
const DEFAULT_VINF: usize = 0;

#[derive(Debug, Parser)]
#[command(
    name = "invrig",
    version,
    about = "Inversive rigidity of circle frameworks"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Framework or triangulation document. A triangulation is replaced by
    /// its Koebe framework with vertex 0 at infinity.
    file: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inversive distance of every edge.
    Inv(Input),
    /// Rank of the rigidity matrix against 3n - 6.
    Rank {
        #[command(flatten)]
        input: Input,
        /// Exact rational rank instead of the SVD rank.
        #[arg(long)]
        exact: bool,
        /// Relative singular-value tolerance.
        #[arg(long, value_parser = positive_f64)]
        tol: Option<f64>,
    },
    /// Verdict, flex and stress summary.
    Check(Input),
    /// Basis of equilibrium stresses.
    Stress(Input),
    /// The six trivial motions and their kernel residual.
    TrivialBasis(Input),
    /// Koebe framework of a triangulation.
    Pack {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VINF)]
        vinf: usize,
        #[arg(long, default_value_t = DEFAULT_PACKING_TOL, value_parser = positive_f64)]
        tol: f64,
        /// Maximum relaxation sweeps.
        #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
        max_iter: usize,
        /// Write the framework document here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Random perturbation of a framework.
    Perturb {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rigidity over random perturbations.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sign-change lemma over edge labelings.
    Cauchy {
        file: PathBuf,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-difference check of the inversive-distance Jacobian.
    Jacobian {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-5, value_parser = positive_f64)]
        step: f64,
    },
    /// SVG drawing.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

fn framework_input(input: &Input) -> Result<CFramework> {
    match io::load_document(&input.file)? {
        Document::Framework(f) => Ok(f),
        Document::Triangulation(t) => Ok(koebe_construction(
            &t,
            DEFAULT_VINF,
            FaceChoice::Auto,
            DEFAULT_PACKING_TOL,
            DEFAULT_MAX_SWEEPS,
        )?
        .framework),
    }
}

fn triangulation_input(path: &Path) -> Result<Triangulation> {
    match io::load_document(path)? {
        Document::Triangulation(t) => Ok(t),
        Document::Framework(f) => f
            .source()
            .cloned()
            .ok_or_else(|| Error::Validation("framework document has no faces".into())),
    }
}

fn emit(
    out: &mut dyn Write,
    json_mode: bool,
    value: Value,
    human: impl FnOnce() -> String,
) -> Result<()> {
    if json_mode {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&value).expect("json value serializes")
        )?;
    } else {
        write!(out, "{}", human())?;
    }
    Ok(())
}

fn rank_line(v: &RigidityVerdict, n: usize) -> String {
    format!(
        "rank {} / {} required — {}",
        v.rank,
        RigidityVerdict::required_rank(n),
        if v.is_infinitesimally_rigid {
            "infinitesimally rigid"
        } else {
            "not infinitesimally rigid"
        }
    )
}

fn verdict_json(v: &RigidityVerdict, n: usize) -> Value {
    json!({
        "rank": v.rank,
        "required_rank": RigidityVerdict::required_rank(n),
        "nullity": v.nullity,
        "infinitesimally_rigid": v.is_infinitesimally_rigid,
        "mode": match v.mode { RankMode::Numeric => "numeric", RankMode::Exact => "exact" },
        "threshold": v.threshold_used,
        "singular_values": v.singular_values,
    })
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.12e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_or_print(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(write!(out, "{text}")?),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let json_mode = cli.json;
    match &cli.command {
        Command::Inv(input) => {
            let f = framework_input(input)?;
            let inv = inversive_distance_vector(&f);
            let value = json!({
                "edges": f.edges().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
                "inversive_distances": inv,
            });
            emit(out, json_mode, value, || {
                let mut s = String::from("edge\tinv\n");
                for (&(i, j), x) in f.edges().iter().zip(&inv) {
                    s += &format!("{i}-{j}\t{x:.15}\n");
                }
                s
            })?;
        }
        Command::Rank { input, exact, tol } => {
            let f = framework_input(input)?;
            let policy = match tol {
                Some(t) => TolPolicy::Relative(*t),
                None => TolPolicy::from_env()?,
            };
            let mode = if *exact {
                RankMode::Exact
            } else {
                RankMode::Numeric
            };
            let v = rigidity_verdict(&f, mode, policy)?;
            let n = f.num_circles();
            emit(out, json_mode, verdict_json(&v, n), || {
                rank_line(&v, n) + "\n"
            })?;
        }
        Command::Check(input) => {
            let f = framework_input(input)?;
            let policy = TolPolicy::from_env()?;
            let n = f.num_circles();
            let v = rigidity_verdict(&f, RankMode::Numeric, policy)?;
            let flex = extract_flex(&f, policy)?;
            let fraction = flex
                .as_ref()
                .map(|c| nontrivial_fraction(&f, c))
                .transpose()?;
            let stresses = equilibrium_stresses(&f, policy)?;
            let tangency = tangency_residuals(&f).into_iter().fold(0.0, f64::max);
            let value = json!({
                "verdict": verdict_json(&v, n),
                "flex": flex.as_ref().map(|c| c.0.clone()),
                "flex_nontrivial_fraction": fraction,
                "stress_dimension": stresses.basis.len(),
                "stress_matrix_rank": stresses.rank,
                "max_tangency_residual": tangency,
            });
            emit(out, json_mode, value, || {
                let mut s = rank_line(&v, n) + "\n";
                s += &format!("nullity {}\n", v.nullity);
                match fraction {
                    Some(p) => s += &format!("flex: found (nontrivial fraction {p:.6})\n"),
                    None => s += "flex: none\n",
                }
                s += &format!(
                    "stresses: {} (rank of V {} of {} edges)\n",
                    stresses.basis.len(),
                    stresses.rank,
                    f.num_edges()
                );
                s += &format!("max tangency residual {tangency:.3e}\n");
                s
            })?;
        }
        Command::Stress(input) => {
            let f = framework_input(input)?;
            let b = equilibrium_stresses(&f, TolPolicy::from_env()?)?;
            let vectors: Vec<&Vec<f64>> = b.basis.iter().map(|s| &s.0).collect();
            let value = json!({
                "dimension": b.basis.len(),
                "stress_matrix_rank": b.rank,
                "threshold": b.threshold_used,
                "basis": vectors,
            });
            emit(out, json_mode, value, || {
                let mut s = format!(
                    "{} independent stresses (rank of V {})\n",
                    b.basis.len(),
                    b.rank
                );
                for (k, w) in b.basis.iter().enumerate() {
                    s += &format!("stress {k}: {}\n", fmt_vec(&w.0));
                }
                s
            })?;
        }
        Command::TrivialBasis(input) => {
            let f = framework_input(input)?;
            let b = trivial_motion_basis(&f)?;
            let vectors: Vec<&Vec<f64>> = b.vectors.iter().map(|v| &v.0).collect();
            let value = json!({
                "vectors": vectors,
                "max_relative_residual": b.max_relative_residual,
                "gram_rank": b.gram_rank,
            });
            emit(out, json_mode, value, || {
                let mut s = String::new();
                for (k, v) in b.vectors.iter().enumerate() {
                    s += &format!("motion {}: {}\n", k + 1, fmt_vec(&v.0));
                }
                s += &format!("max |Rc| / (|R| |c|) = {:.3e}\n", b.max_relative_residual);
                s += &format!("gram rank {}\n", b.gram_rank);
                s
            })?;
        }
        Command::Pack {
            file,
            vinf,
            tol,
            max_iter,
            output,
        } => {
            let t = triangulation_input(file)?;
            if *vinf >= t.num_vertices {
                return Err(Error::Validation(format!(
                    "vertex {vinf} out of range for {} vertices",
                    t.num_vertices
                )));
            }
            let k = koebe_construction(&t, *vinf, FaceChoice::Auto, *tol, *max_iter)?;
            let p = &k.packing;
            let packing_residual = packing_tangency_residuals(p)
                .into_iter()
                .fold(0.0, f64::max);
            let tangency = tangency_residuals(&k.framework)
                .into_iter()
                .fold(0.0, f64::max);
            let univalence = univalence_check(&k.framework, DEFAULT_UNIVALENCE_TOL);
            let doc = io::framework_to_json(&k.framework) + "\n";
            if let Some(path) = output {
                write_or_print(out, &Some(path.clone()), &doc)?;
            }
            let mut value = json!({
                "vinf": vinf,
                "sweeps": p.sweeps,
                "angle_sum_error": p.angle_sum_error,
                "packing_tangency_residual": packing_residual,
                "max_tangency_residual": tangency,
                "min_pairwise_inv": univalence.min_pairwise_inv,
                "univalent": univalence.ok,
                "inversion_face": k.face,
                "inversion_center": [k.inversion_center.x, k.inversion_center.y],
            });
            if output.is_none() {
                value["framework"] =
                    serde_json::to_value(io::FrameworkDocument::from_framework(&k.framework))
                        .expect("framework serializes");
            }
            emit(out, json_mode, value, || {
                let mut s = format!("converged after {} sweeps\n", p.sweeps);
                s += &format!("angle sum error {:.3e}\n", p.angle_sum_error);
                s += &format!("packing tangency residual {packing_residual:.3e}\n");
                s += &format!("framework tangency residual {tangency:.3e}\n");
                s += &format!(
                    "univalent: {} (min pairwise inv {:.12})\n",
                    univalence.ok, univalence.min_pairwise_inv
                );
                match output {
                    Some(path) => s += &format!("framework written to {}\n", path.display()),
                    None => s += &doc,
                }
                s
            })?;
        }
        Command::Perturb {
            input,
            eps,
            seed,
            output,
        } => {
            let f = framework_input(input)?;
            let g = perturb(&f, *eps, *seed)?;
            write_or_print(out, output, &(io::framework_to_json(&g) + "\n"))?;
        }
        Command::Sweep {
            input,
            samples,
            eps,
            seed,
        } => {
            let f = framework_input(input)?;
            let id = input
                .file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let r = genericity_sweep(&f, &id, *samples, *eps, *seed, TolPolicy::from_env()?)?;
            let value = serde_json::to_value(&r).expect("report serializes");
            emit(out, json_mode, value, || {
                let mut s = format!(
                    "{}: {} of {} samples rigid (eps {}, seed {})\n",
                    r.triangulation, r.rigid_count, r.samples, r.eps, r.seed
                );
                s += "rank\tcount\n";
                for (rank, count) in &r.rank_histogram {
                    s += &format!("{rank}\t{count}\n");
                }
                match r.min_singular_gap {
                    Some(g) => s += &format!("min singular gap {g:.3e}\n"),
                    None => s += "min singular gap n/a\n",
                }
                s
            })?;
        }
        Command::Cauchy {
            file,
            exhaustive: _,
            samples,
            seed,
        } => {
            let t = triangulation_input(file)?;
            let mode = match samples {
                Some(n) => CauchyMode::Sampled {
                    samples: *n,
                    seed: *seed,
                },
                None => CauchyMode::Exhaustive,
            };
            let r = exhaustive_cauchy_check(&t, mode)?;
            let value = json!({
                "mode": if samples.is_some() { "sampled" } else { "exhaustive" },
                "labelings": r.labelings,
                "checked": r.checked,
                "ok": r.ok(),
                "counterexample": r.counterexample.as_ref().map(|s| s.labels().to_vec()),
            });
            emit(out, json_mode, value, || {
                let mut s = format!(
                    "{} labelings, {} satisfy the hypothesis\n",
                    r.labelings, r.checked
                );
                match &r.counterexample {
                    None => {
                        s += "every checked labeling has a vertex with exactly two sign changes\n"
                    }
                    Some(c) => s += &format!("counterexample: {:?}\n", c.labels()),
                }
                s
            })?;
            if !r.ok() {
                return Ok(EXIT_VALIDATION);
            }
        }
        Command::Jacobian { input, step } => {
            let f = framework_input(input)?;
            let residual = jacobian_check(&f, *step)?;
            let value = json!({ "step": step, "max_residual": residual });
            emit(out, json_mode, value, || {
                format!("max |J - A_p R| = {residual:.3e} at step {step:e}\n")
            })?;
        }
        Command::Render { input, output } => {
            let f = framework_input(input)?;
            let svg = render_svg(&f, &RenderOptions::default());
            write_or_print(out, output, &svg)?;
        }
    }
    Ok(EXIT_OK)
}

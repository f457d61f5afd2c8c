//! `lrl`: lattice remainder experiments from the command line.
//!
//! Exit status is 0 when every acceptance rule passes, 2 when a run finished
//! but some rule failed, and 1 on any error.

mod artifacts;
mod cache;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lrl_core::counting::{count_points, DEFAULT_CANDIDATE_CAP};
use lrl_core::experiments::{
    counterexample_experiment_with, eigenvalue_count_experiment_with, geometric_t_grid,
    group_mean_square_experiment, hardy_experiment_with, rescaled_experiment_with, Direct,
    RuleOutcome, SpectrumSource,
};
use lrl_core::fourier::lp_report;
use lrl_core::rng::streams;
use lrl_core::spectral::{parseval_check, PARSEVAL_CSV_HEADER};
use lrl_core::{decay_envelope, parse_body_spec, BodyKind, RigidMotion, Rotation, StarBody};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::Outputs;
use crate::cache::CachedSource;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(name = "lrl", version = VERSION, about = "Lattice-point remainder experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize, Clone)]
struct Common {
    /// Body: ball | ellipsoid:a1,a2[,a3] | pball:p | poly:h:c0,...,ch
    #[arg(long, default_value = "ball")]
    body: String,
    /// Dimension (2 or 3).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, default_value = "lrl-out")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "LRL_THREADS")]
    threads: Option<usize>,
    /// Directory for cached entry spectra.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Maximum number of lattice candidates per enumeration.
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap: u64,
}

#[derive(Args, Debug, Serialize, Clone)]
struct Grid {
    #[arg(long = "t-start", default_value_t = 50.0)]
    t_start: f64,
    #[arg(long = "t-ratio", default_value_t = 2.0)]
    t_ratio: f64,
    #[arg(long = "t-count", default_value_t = 6)]
    t_count: usize,
}

#[derive(Args, Debug, Serialize, Clone)]
struct Placement {
    /// Rotation: an angle for k = 2, a quaternion w,x,y,z for k = 3.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Translation as comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Print N, R and the volume term for one dilation and motion.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long = "T")]
        t: f64,
        #[command(flatten)]
        placement: Placement,
    },
    /// Hardy averages (1/T)∫|R| for Haar-random motions.
    Hardy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 16)]
        motions: usize,
    },
    /// Haar Monte Carlo mean square of R over motions.
    GroupMs {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Averages of |R(s^{1/h})| over s ∈ [1, S].
    Rescaled {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        h: u32,
        #[arg(long = "s-start", default_value_t = 2500.0)]
        s_start: f64,
        #[arg(long = "s-ratio", default_value_t = 4.0)]
        s_ratio: f64,
        #[arg(long = "s-count", default_value_t = 6)]
        s_count: usize,
        #[arg(long, default_value_t = 8)]
        motions: usize,
    },
    /// Superellipse at x = 0: axis-aligned against random rotations.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        p: u32,
        #[arg(long = "t-start", default_value_t = 100.0)]
        t_start: f64,
        #[arg(long = "t-ratio", default_value_t = 2.0)]
        t_ratio: f64,
        #[arg(long = "t-count", default_value_t = 6)]
        t_count: usize,
        #[arg(long, default_value_t = 8)]
        motions: usize,
    },
    /// Eigenvalue counts of P(∂) on the torus.
    Eigen {
        #[command(flatten)]
        common: Common,
        /// Degree; defaults to the polynomial degree, or 2.
        #[arg(long)]
        h: Option<u32>,
        #[arg(long = "lambda-start", default_value_t = 1e4)]
        lambda_start: f64,
        #[arg(long = "lambda-ratio", default_value_t = 4.0)]
        lambda_ratio: f64,
        #[arg(long = "lambda-count", default_value_t = 6)]
        lambda_count: usize,
        #[command(flatten)]
        placement: Placement,
    },
    /// Decay envelope of the indicator's Fourier transform.
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        dirs: usize,
        #[arg(long = "r-min", default_value_t = 10.0)]
        r_min: f64,
        #[arg(long = "r-max", default_value_t = 100.0)]
        r_max: f64,
        #[arg(long, default_value_t = 24)]
        radii: usize,
        /// Exponents for the L^p norms of the envelope.
        #[arg(long = "p-norms", default_value = "2.5,3,4")]
        p_norms: String,
    },
    /// Monte Carlo torus mean square against the truncated spectral sum.
    Parseval {
        #[command(flatten)]
        common: Common,
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "n-max", default_value_t = 24)]
        n_max: u32,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[command(flatten)]
        placement: Placement,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Hardy { .. } => "hardy",
            Command::GroupMs { .. } => "group-ms",
            Command::Rescaled { .. } => "rescaled",
            Command::Counterexample { .. } => "counterexample",
            Command::Eigen { .. } => "eigen",
            Command::Decay { .. } => "decay",
            Command::Parseval { .. } => "parseval",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Count { common, .. }
            | Command::Hardy { common, .. }
            | Command::GroupMs { common, .. }
            | Command::Rescaled { common, .. }
            | Command::Counterexample { common, .. }
            | Command::Eigen { common, .. }
            | Command::Decay { common, .. }
            | Command::Parseval { common, .. } => common,
        }
    }

    /// Flat config echo: every flag, plus the experiment name.
    fn echo(&self) -> Value {
        let tagged = serde_json::to_value(self).expect("config serializes");
        let mut flat = serde_json::Map::new();
        flat.insert("experiment".into(), json!(self.name()));
        if let Value::Object(outer) = tagged {
            for (_, inner) in outer {
                flatten_into(&mut flat, inner);
            }
        }
        Value::Object(flat)
    }
}

fn flatten_into(out: &mut serde_json::Map<String, Value>, v: Value) {
    if let Value::Object(m) = v {
        for (k, v) in m {
            if v.is_object() {
                flatten_into(out, v);
            } else {
                out.insert(k, v);
            }
        }
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("{what}: cannot parse {s:?} as a number"))
        })
        .collect()
}

fn parse_motion(k: usize, placement: &Placement) -> Result<RigidMotion> {
    let rotation = match (&placement.theta, k) {
        (None, _) => Rotation::identity(k),
        (Some(t), 2) => Rotation::planar(
            t.trim()
                .parse()
                .with_context(|| format!("--theta: cannot parse {t:?} as an angle"))?,
        ),
        (Some(t), _) => {
            let q = parse_list(t, "--theta")?;
            let q: [f64; 4] = q
                .try_into()
                .map_err(|_| anyhow::anyhow!("--theta for k = 3 needs a quaternion w,x,y,z"))?;
            Rotation::from_quaternion(q)?
        }
    };
    let x = match &placement.x {
        None => vec![0.0; k],
        Some(s) => parse_list(s, "--x")?,
    };
    if x.len() != k {
        bail!("--x has {} coordinates but k = {k}", x.len());
    }
    Ok(RigidMotion::new(rotation, &x)?)
}

fn body_of(common: &Common) -> Result<StarBody> {
    parse_body_spec(&common.body, common.k).with_context(|| format!("--body {:?}", common.body))
}

fn source_of(common: &Common) -> Result<Box<dyn SpectrumSource>> {
    Ok(match &common.cache {
        Some(dir) => Box::new(
            CachedSource::new(dir).with_context(|| format!("--cache {}", dir.display()))?,
        ),
        None => Box::new(Direct),
    })
}

struct Finished {
    seed: Option<u64>,
    csv: String,
    results: Value,
    rules: Vec<RuleOutcome>,
}

fn run(cmd: &Command) -> Result<bool> {
    let common = cmd.common();
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let started = Instant::now();
    let body = body_of(common)?;
    let source = source_of(common)?;
    let seed = Some(common.seed);
    let finished = match cmd {
        Command::Count { t, placement, .. } => {
            let motion = parse_motion(body.dim(), placement)?;
            let n = count_points(&body, &motion, *t, common.cap)?;
            let vol = body.volume() * t.powi(body.dim() as i32);
            println!("N {n}");
            println!("R {}", n as f64 - vol);
            println!("volume_term {vol}");
            return Ok(true);
        }
        Command::Hardy { grid, motions, .. } => {
            let g = geometric_t_grid(grid.t_start, grid.t_ratio, grid.t_count)?;
            let r = hardy_experiment_with(source.as_ref(), &body, *motions, &g, common.seed, common.cap)?;
            if r.partial {
                eprintln!("warning: some motions failed; see the summary");
            }
            Finished {
                seed,
                csv: r.to_csv(),
                results: json!({
                    "target": r.target,
                    "median_slope": r.median_slope,
                    "max_slope": r.max_slope,
                    "partial": r.partial,
                    "fits": r.fits,
                }),
                rules: r.rules,
            }
        }
        Command::GroupMs { grid, samples, .. } => {
            let g = geometric_t_grid(grid.t_start, grid.t_ratio, grid.t_count)?;
            let r = group_mean_square_experiment(&body, *samples, &g, common.seed, common.cap)?;
            Finished {
                seed,
                csv: r.to_csv(),
                results: json!({ "target": r.target, "fit": r.fit }),
                rules: r.rules,
            }
        }
        Command::Rescaled {
            h,
            s_start,
            s_ratio,
            s_count,
            motions,
            ..
        } => {
            let g = geometric_t_grid(*s_start, *s_ratio, *s_count)?;
            let r = rescaled_experiment_with(source.as_ref(), &body, *h, *motions, &g, common.seed, common.cap)?;
            Finished {
                seed,
                csv: r.to_csv(),
                results: json!({
                    "target": r.target,
                    "median_slope": r.median_slope,
                    "partial": r.partial,
                    "fits": r.fits,
                }),
                rules: r.rules,
            }
        }
        Command::Counterexample {
            p,
            t_start,
            t_ratio,
            t_count,
            motions,
            ..
        } => {
            let g = geometric_t_grid(*t_start, *t_ratio, *t_count)?;
            let r = counterexample_experiment_with(source.as_ref(), *p, *motions, &g, common.seed, common.cap)?;
            let fits: Vec<Value> = r
                .arms
                .iter()
                .map(|a| json!({"arm": a.label, "angle": a.angle, "max_fit": a.max_fit, "hardy_fit": a.hardy_fit}))
                .collect();
            Finished {
                seed,
                csv: r.to_csv(),
                results: json!({
                    "axis_max_slope": r.axis_max_slope,
                    "random_median_hardy_slope": r.random_median_hardy_slope,
                    "random_median_max_slope": r.random_median_max_slope,
                    "disk_axis_max_slope": r.disk_axis_max_slope,
                    "disk_random_median_max_slope": r.disk_random_median_max_slope,
                    "disk_random_median_hardy_slope": r.disk_random_median_hardy_slope,
                    "arms": fits,
                }),
                rules: r.rules,
            }
        }
        Command::Eigen {
            h,
            lambda_start,
            lambda_ratio,
            lambda_count,
            placement,
            ..
        } => {
            let h = match (h, body.kind()) {
                (Some(h), _) => *h,
                (None, BodyKind::PolynomialSublevel { degree, .. }) => *degree,
                (None, _) => 2,
            };
            let motion = parse_motion(body.dim(), placement)?;
            let g = geometric_t_grid(*lambda_start, *lambda_ratio, *lambda_count)?;
            let r = eigenvalue_count_experiment_with(source.as_ref(), &body, h, &g, &motion, common.cap)?;
            Finished {
                seed: None,
                csv: r.to_csv(),
                results: json!({ "target": r.target, "sign_note": r.sign_note, "fit": r.fit }),
                rules: r.rules,
            }
        }
        Command::Decay {
            dirs,
            r_min,
            r_max,
            radii,
            p_norms,
            ..
        } => {
            let env = decay_envelope(&body, *dirs, *r_min, *r_max, *radii)?;
            let ps = parse_list(p_norms, "--p-norms")?;
            let norms = lp_report(&env, &ps)?;
            let mut rules = Vec::new();
            if *body.kind() == BodyKind::Ball {
                let spread = env.psi_max() / env.psi_min() - 1.0;
                rules.push(RuleOutcome::band("envelope spread across directions", spread, 0.0, 0.05, false));
                if body.dim() == 2 {
                    rules.push(RuleOutcome::band(
                        "envelope maximum",
                        env.psi_max(),
                        0.0,
                        0.36,
                        false,
                    ));
                }
            }
            let argmax = env
                .psi
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| env.angles[i]);
            Finished {
                seed: None,
                csv: env.to_csv(),
                results: json!({
                    "psi_max": env.psi_max(),
                    "psi_min": env.psi_min(),
                    "argmax_angle": argmax,
                    "lp_norms": norms,
                    "in_lemma_class": body.in_lemma_class(),
                }),
                rules,
            }
        }
        Command::Parseval {
            t,
            n_max,
            samples,
            placement,
            ..
        } => {
            let motion = parse_motion(body.dim(), placement)?;
            let c = parseval_check(
                &body,
                motion.rotation(),
                *t,
                *n_max,
                *samples,
                common.seed,
                streams::TORUS_SAMPLES,
            )?;
            let rules = vec![RuleOutcome::band(
                "|monte carlo - spectral sum| minus allowance",
                c.discrepancy - c.allowance,
                f64::NEG_INFINITY,
                0.0,
                false,
            )];
            Finished {
                seed,
                csv: format!("{PARSEVAL_CSV_HEADER}{}", c.csv_rows(common.seed)),
                results: serde_json::to_value(c)?,
                rules,
            }
        }
    };
    let outputs = Outputs {
        dir: common.out.clone(),
        experiment: cmd.name().to_string(),
    };
    let pass = outputs.emit(
        &cmd.echo(),
        finished.seed,
        &finished.csv,
        finished.results,
        &finished.rules,
        started.elapsed().as_secs_f64(),
    )?;
    for r in &finished.rules {
        println!(
            "{:<12} {}: {} in [{}, {}]",
            format!("{:?}", r.status).to_uppercase(),
            r.rule,
            r.value,
            r.lower,
            r.upper
        );
    }
    println!("wrote {}", outputs.csv_path().display());
    println!("wrote {}", outputs.summary_path().display());
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

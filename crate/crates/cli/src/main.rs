use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use conflict_volterra::analysis::{bifurcation_bisect, lv_equilibrium, solve_equilibrium};
use conflict_volterra::conflict::{
    attractive_limit, closed_form_repulsive, iterate_conflict, IterateOptions,
};
use conflict_volterra::io::{
    format_real, parse_config, read_trajectory_csv, render_phase_svg, write_atlas_jsonl,
    write_trajectory_csv, Plane, RunConfig, SvgOptions,
};
use conflict_volterra::sweep::{run_sweep, GridRange, SeedGrid, SweepSpec};
use conflict_volterra::{simulate, ConflictAlpha, Error, StochasticVector};

/// Simulate and analyse two predator-prey regions coupled by conflict composition.
#[derive(Debug, Parser)]
#[command(name = "conflict-volterra", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON run configuration; the limit-cycle reference run is used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the coupling strength.
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Override the number of steps.
    #[arg(long, global = true)]
    steps: Option<u64>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Phase plane for SVG output.
    #[arg(long, global = true, default_value = "p1p2", value_parser = parse_plane)]
    plane: Plane,
    /// Worker threads for sweeps.
    #[arg(
        long,
        global = true,
        env = "CONFLICT_VOLTERRA_THREADS",
        default_value_t = 1
    )]
    workers: usize,
    /// Override the main tolerance of the subcommand (conflict step, Newton,
    /// or cycle return tolerance).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the coupled map and write the trajectory as CSV (and SVG if configured).
    Simulate {
        /// Also write a phase portrait of the post-transient orbit here.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Iterate the pure conflict composition on two stochastic vectors.
    Conflict {
        /// Region A distribution, comma separated; must sum to 1
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        p: Floats,
        /// Region B distribution, same length as `--p`
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        r: Floats,
        /// Iteration cap
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: u64,
    },
    /// Solve for a fixed point of the coupled map and report its stability.
    Equilibrium {
        /// Starting point P1,P2,R1,R2; defaults to the uncoupled equilibrium in both regions.
        #[arg(long, value_parser = parse_vector)]
        seed: Option<Floats>,
    },
    /// Bisect on alpha between two couplings with different attractors.
    Bifurcate {
        /// Lower end of the bracket
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        /// Upper end of the bracket
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        /// Stop once the bracket is narrower than this
        #[arg(long, default_value_t = 1e-5)]
        resolution: f64,
    },
    /// Classify the attractor on an alpha grid and write a JSONL atlas.
    Atlas {
        /// First alpha of the grid
        #[arg(long, allow_hyphen_values = true)]
        alpha_lo: f64,
        /// Last alpha of the grid
        #[arg(long, allow_hyphen_values = true)]
        alpha_hi: f64,
        /// Number of alpha values, endpoints included
        #[arg(long)]
        count: usize,
        /// Extra seeds as P1,P2,R1,R2; repeatable. Defaults to the configured start.
        #[arg(long = "seed", value_parser = parse_vector)]
        seeds: Vec<Floats>,
    },
    /// Render a trajectory CSV as an SVG phase portrait.
    Render {
        /// Trajectory CSV written by `simulate`.
        input: PathBuf,
        /// Leading rows to leave out.
        #[arg(long, default_value_t = 0)]
        skip: usize,
        /// Point to mark in the selected plane, as X,Y.
        #[arg(long, value_parser = parse_vector)]
        marker: Option<Floats>,
    },
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated reals, e.g. `0.6,0.3,0.1`.
#[derive(Debug, Clone)]
struct Floats(Vec<f64>);

fn parse_vector(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(Floats)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config { .. } | Error::Invalid { .. } | Error::IndexOutOfRange { .. } => 2,
                Error::Io(_) | Error::Csv(_) | Error::Integrity(_) => 4,
                e if e.is_numeric() => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return 4;
        }
    }
    1
}

fn load_config(g: &Global) -> anyhow::Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text)?
        }
        None => RunConfig::reference(),
    };
    if let Some(a) = g.alpha {
        cfg.alpha = a;
    }
    if let Some(n) = g.steps {
        cfg.steps = n;
        cfg.transient = cfg.transient.filter(|&t| t < n);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format_real(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn seed4(v: &[f64]) -> anyhow::Result<[f64; 4]> {
    <[f64; 4]>::try_from(v).map_err(|_| {
        Error::Config {
            key: "seed".into(),
            reason: format!("needs 4 values P1,P2,R1,R2, got {}", v.len()),
        }
        .into()
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate { svg } => {
            let cfg = load_config(g)?;
            let traj = simulate(
                &cfg.initial_state()?,
                &cfg.params,
                cfg.alpha(),
                cfg.steps,
                &cfg.epsilons(),
            )?;
            let out = g.out.as_deref().or(cfg.outputs.trajectory.as_deref());
            write_trajectory_csv(&traj, open_out(out)?)?;
            if let Some(path) = svg.as_deref().or(cfg.outputs.svg.as_deref()) {
                let opts = SvgOptions {
                    skip: cfg.transient_steps() as usize,
                    title: Some(format!("alpha = {}", cfg.alpha)),
                    ..SvgOptions::default()
                };
                let doc = render_phase_svg(&traj, g.plane, &opts)?;
                std::fs::write(path, doc).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Conflict { p, r, max_iter } => {
            let alpha = ConflictAlpha::new(g.alpha.unwrap_or(1.0))?;
            let p = StochasticVector::new(p.0.clone())?;
            let r = StochasticVector::new(r.0.clone())?;
            let opts = IterateOptions {
                tol: g.tol.unwrap_or(IterateOptions::default().tol),
                max_iter: *max_iter,
                ..IterateOptions::default()
            };
            let report = iterate_conflict(&p, &r, alpha, &opts)?;
            let mut w = open_out(g.out.as_deref())?;
            writeln!(w, "alpha: {}", alpha.value())?;
            writeln!(w, "p_limit: {}", fmt_vec(report.p_limit.as_slice()))?;
            writeln!(w, "r_limit: {}", fmt_vec(report.r_limit.as_slice()))?;
            writeln!(w, "iterations: {}", report.iterations)?;
            writeln!(w, "converged: {}", report.converged)?;
            writeln!(w, "classification: {:?}", report.classification)?;
            writeln!(w, "final_inner: {:e}", report.final_inner)?;
            if alpha == ConflictAlpha::REPULSIVE {
                let (pc, rc) = closed_form_repulsive(&p, &r)?;
                writeln!(w, "closed_form_p: {}", fmt_vec(pc.as_slice()))?;
                writeln!(w, "closed_form_r: {}", fmt_vec(rc.as_slice()))?;
                let gap = report
                    .p_limit
                    .max_abs_diff(&pc)
                    .max(report.r_limit.max_abs_diff(&rc));
                writeln!(w, "max_deviation: {gap:e}")?;
            } else if alpha == ConflictAlpha::ATTRACTIVE {
                let (u, sets) = attractive_limit(&p, &r, opts.tol, opts.max_iter)?;
                writeln!(w, "uniform_limit: {}", fmt_vec(u.as_slice()))?;
                writeln!(w, "s0: {:?}", sets.s0)?;
                writeln!(w, "s_inf: {:?}", sets.s_inf)?;
            }
            w.flush()?;
        }
        Command::Equilibrium { seed } => {
            let cfg = load_config(g)?;
            let seed = match seed {
                Some(v) => seed4(&v.0)?,
                None => {
                    let [x, y] = lv_equilibrium(&cfg.params)?;
                    [x, y, x, y]
                }
            };
            let mut opts = cfg.newton_options();
            if let Some(t) = g.tol {
                opts.tol = t;
            }
            let res = solve_equilibrium(&cfg.params, cfg.alpha(), seed, &opts)?;
            let mut w = open_out(g.out.as_deref())?;
            writeln!(w, "alpha: {}", cfg.alpha)?;
            writeln!(w, "point: {}", fmt_vec(&res.point))?;
            writeln!(w, "residual_norm: {:e}", res.residual_norm)?;
            writeln!(w, "spectral_radius: {}", res.spectral_radius)?;
            writeln!(w, "power_iteration_radius: {}", res.power_radius)?;
            writeln!(w, "stability: {:?}", res.stable)?;
            writeln!(w, "iterations: {}", res.iterations)?;
            w.flush()?;
        }
        Command::Bifurcate { lo, hi, resolution } => {
            let cfg = load_config(g)?;
            let mut opts = cfg.classify_options();
            if let Some(t) = g.tol {
                opts.tol_cycle = t;
            }
            let b = bifurcation_bisect(
                &cfg.params,
                &cfg.initial_state()?,
                *lo,
                *hi,
                *resolution,
                &opts,
            )?;
            let mut w = open_out(g.out.as_deref())?;
            writeln!(w, "alpha_lo: {} ({})", b.alpha_lo, b.class_lo.as_str())?;
            writeln!(w, "alpha_hi: {} ({})", b.alpha_hi, b.class_hi.as_str())?;
            writeln!(w, "alpha_star: {}", b.alpha_star)?;
            writeln!(w, "width: {:e}", b.width)?;
            w.flush()?;
        }
        Command::Atlas {
            alpha_lo,
            alpha_hi,
            count,
            seeds,
        } => {
            let cfg = load_config(g)?;
            let mut classify = cfg.classify_options();
            if let Some(t) = g.tol {
                classify.tol_cycle = t;
            }
            let seeds = if seeds.is_empty() {
                vec![cfg.initial_state()?.to_array()]
            } else {
                seeds
                    .iter()
                    .map(|s| seed4(&s.0))
                    .collect::<anyhow::Result<_>>()?
            };
            let spec = SweepSpec {
                params: cfg.params,
                alpha_range: GridRange::new(*alpha_lo, *alpha_hi, *count)?,
                seeds: SeedGrid::Explicit(seeds),
                classify,
                workers: g.workers,
            };
            let records = run_sweep(&spec)?;
            let out = g.out.as_deref().or(cfg.outputs.atlas.as_deref());
            write_atlas_jsonl(&records, open_out(out)?)?;
        }
        Command::Render {
            input,
            skip,
            marker,
        } => {
            let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
            let traj = read_trajectory_csv(BufReader::new(file))?;
            let marker = match marker.as_ref().map(|m| m.0.as_slice()) {
                None => None,
                Some(&[x, y]) => Some([x, y]),
                Some(other) => {
                    return Err(Error::Config {
                        key: "marker".into(),
                        reason: format!("needs 2 values X,Y, got {}", other.len()),
                    }
                    .into())
                }
            };
            let opts = SvgOptions {
                skip: *skip,
                marker,
                ..SvgOptions::default()
            };
            let doc = render_phase_svg(&traj, g.plane, &opts)?;
            let mut w = open_out(g.out.as_deref())?;
            w.write_all(doc.as_bytes())?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

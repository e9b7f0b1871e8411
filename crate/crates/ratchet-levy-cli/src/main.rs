//! Command-line front end: closed-form values and transforms, simulation,
//! figure-reproduction sweeps, and barrier optimization.
//!
//! Exit codes: 0 on success, 2 on configuration/validation failure,
//! 3 on numerical failure (quadrature or transform inversion).

mod config;
mod presets;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use ratchet_levy::{
    estimate_pair, laplace_ruin, optimize_a, optimize_b, sigma_profile, sweep, value, Axis,
    LevyError, Region, SweepFixed, SweepSpec, Target,
};

#[derive(Parser)]
#[command(
    name = "ratchet-levy",
    version,
    about = "Dividend NPV and ruin-time transforms under mixed ratcheting-periodic strategies"
)]
struct Cli {
    /// JSON config file; flags below override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    c2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    paths: Option<u64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    tmax: Option<f64>,
    /// Figure preset name for `sweep` (fig1a, fig1b, fig3, fig4, fig5, fig6a-fig6d)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output file (or directory for multi-panel presets)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected NPV of dividends paid up to ruin
    Value,
    /// Laplace transform of the ruin time
    Laplace,
    /// Monte Carlo estimate with closed-form comparison
    Simulate,
    /// Parameter sweep to CSV (config block or --preset)
    Sweep,
    /// Barrier optimization (periodic barrier by default; optimize.axis = "b" for the ratcheting barrier)
    Optimize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 3 for numerical failures, 2 for everything else (validation/config).
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(le) = cause.downcast_ref::<LevyError>() {
            return match le {
                LevyError::QuadratureFailure(_)
                | LevyError::NumericalFailure(_)
                | LevyError::NoRoot(_) => 3,
                _ => 2,
            };
        }
    }
    2
}

fn resolved_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::base(),
    };
    if let Some(v) = cli.y {
        cfg.y = v;
    }
    if let Some(v) = cli.a {
        cfg.strategy.a = v;
    }
    if let Some(v) = cli.b {
        cfg.strategy.b = v;
    }
    if let Some(v) = cli.c1 {
        cfg.strategy.c1 = v;
    }
    if let Some(v) = cli.c2 {
        cfg.strategy.c2 = v;
    }
    if let Some(v) = cli.gamma {
        cfg.strategy.gamma = v;
    }
    if let Some(v) = cli.delta {
        cfg.delta = v;
    }
    if let Some(v) = cli.seed {
        cfg.sim.seed = v;
    }
    if let Some(v) = cli.paths {
        cfg.sim.n_paths = v;
    }
    if let Some(v) = cli.dt {
        cfg.sim.dt = v;
    }
    if let Some(v) = cli.tmax {
        cfg.sim.t_max = v;
    }
    Ok(cfg)
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Lower => "Lower",
        Region::Middle => "Middle",
        Region::Upper => "Upper",
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = resolved_config(cli)?;
    match cli.command {
        Command::Value => cmd_value(&cfg, cli),
        Command::Laplace => cmd_laplace(&cfg),
        Command::Simulate => cmd_simulate(&cfg, cli),
        Command::Sweep => cmd_sweep(&cfg, cli),
        Command::Optimize => cmd_optimize(&cfg, cli),
    }
}

fn cmd_value(cfg: &RunConfig, cli: &Cli) -> Result<()> {
    if !(cfg.y >= 0.0) {
        return Err(anyhow!("y must satisfy y >= 0, got {}", cfg.y));
    }
    let model = cfg.model()?;
    let strategy = cfg.strategy()?;
    println!("{}", cfg.echo());
    let v = value(&model, &strategy, cfg.delta, cfg.y)?;
    println!(
        "value={} region={} ratchet={} periodic={} continuation={}",
        v.value,
        region_name(v.region),
        v.ratchet_part,
        v.periodic_part,
        v.continuation
    );
    if let Some(out) = &cli.out {
        let body = format!(
            "y,value,region,ratchet,periodic,continuation\n{},{},{},{},{},{}\n",
            cfg.y,
            v.value,
            region_name(v.region),
            v.ratchet_part,
            v.periodic_part,
            v.continuation
        );
        write_output(Some(out.as_path()), "value", &cfg.echo(), &body)?;
    }
    Ok(())
}

fn cmd_laplace(cfg: &RunConfig) -> Result<()> {
    if !(cfg.y >= 0.0) {
        return Err(anyhow!("y must satisfy y >= 0, got {}", cfg.y));
    }
    let model = cfg.model()?;
    let strategy = cfg.strategy()?;
    println!("{}", cfg.echo());
    let l = laplace_ruin(&model, &strategy, cfg.delta, cfg.y)?;
    println!("laplace={} region={}", l.value, region_name(l.region));
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, cli: &Cli) -> Result<()> {
    let model = cfg.model()?;
    let strategy = cfg.strategy()?;
    let sim = cfg.sim_config();
    let target = cfg.sim_target()?;
    println!("{}", cfg.echo());
    if let Some(out) = &cli.out {
        let mut body =
            String::from("path,ruined,tau,disc_ratchet,disc_periodic,disc_ruin_indicator\n");
        for idx in 0..sim.n_paths {
            let o = ratchet_levy::simulate_path(&model, &strategy, cfg.delta, cfg.y, &sim, idx)?;
            body.push_str(&format!(
                "{idx},{},{},{},{},{}\n",
                o.ruined, o.tau, o.disc_ratchet, o.disc_periodic, o.disc_ruin_indicator
            ));
        }
        write_output(Some(out.as_path()), "paths", &cfg.echo(), &body)?;
    }
    let (div, ruin) = estimate_pair(&model, &strategy, cfg.delta, cfg.y, &sim)?;
    let est = match target {
        Target::DividendNpv => div,
        Target::RuinLaplace => ruin,
    };
    println!("target={}", cfg.sim.target);
    println!(
        "mean={} se={} n={} censored_fraction={}",
        est.mean, est.std_error, est.n, est.censored_fraction
    );
    let closed = match target {
        Target::DividendNpv => value(&model, &strategy, cfg.delta, cfg.y).map(|v| v.value),
        Target::RuinLaplace => laplace_ruin(&model, &strategy, cfg.delta, cfg.y).map(|l| l.value),
    };
    match closed {
        Ok(cf) if est.std_error > 0.0 => {
            println!("closed_form={} z={}", cf, (est.mean - cf) / est.std_error);
        }
        Ok(cf) => println!("closed_form={cf}"),
        Err(e) => println!("closed_form=unavailable ({e})"),
    }
    Ok(())
}

fn write_output(path: Option<&Path>, name: &str, header: &str, body: &str) -> Result<()> {
    match path {
        Some(p) => {
            let target = if p.extension().is_some() {
                p.to_path_buf()
            } else {
                std::fs::create_dir_all(p)
                    .with_context(|| format!("cannot create {}", p.display()))?;
                p.join(format!("{name}.csv"))
            };
            let mut f = std::fs::File::create(&target)
                .with_context(|| format!("cannot create {}", target.display()))?;
            writeln!(f, "{header}")?;
            f.write_all(body.as_bytes())?;
            println!("wrote {}", target.display());
        }
        None => {
            println!("{header}");
            print!("{body}");
        }
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, cli: &Cli) -> Result<()> {
    let echo = cfg.echo();
    if let Some(preset) = &cli.preset {
        for panel in presets::render(preset)? {
            write_output(cli.out.as_deref(), &panel.name, &echo, &panel.csv)?;
        }
        return Ok(());
    }
    let quantity = cfg.sweep_quantity()?;
    let axis = cfg.sweep_axis()?;
    let spec = SweepSpec {
        quantity,
        axis,
        lo: cfg.sweep.lo,
        hi: cfg.sweep.hi,
        n_points: cfg.sweep.n_points,
        fixed: SweepFixed {
            model: cfg.model()?,
            strategy: cfg.strategy()?,
            delta: cfg.delta,
            y: cfg.y,
        },
    };
    let rows = sweep(&spec)?;
    let qname = &cfg.sweep.quantity;
    let mut body = String::new();
    if axis == Axis::C1C2Grid {
        body.push_str(&format!("c1,c2,{qname},error\n"));
        for r in rows {
            body.push_str(&format!(
                "{},{},{},{}\n",
                r.axis_value,
                r.axis_value2.unwrap(),
                r.value.map(|v| v.to_string()).unwrap_or_default(),
                r.error.unwrap_or_default()
            ));
        }
    } else {
        body.push_str(&format!("{},{qname},error\n", axis.name()));
        for r in rows {
            body.push_str(&format!(
                "{},{},{}\n",
                r.axis_value,
                r.value.map(|v| v.to_string()).unwrap_or_default(),
                r.error.unwrap_or_default()
            ));
        }
    }
    write_output(cli.out.as_deref(), "sweep", &echo, &body)
}

fn cmd_optimize(cfg: &RunConfig, cli: &Cli) -> Result<()> {
    let model = cfg.model()?;
    let s = &cfg.strategy;
    println!("{}", cfg.echo());
    match cfg.optimize.axis.as_str() {
        "a" => {
            let rep = optimize_a(&model, cfg.y, s.b, s.c1, s.c2, s.gamma, cfg.delta)?;
            println!(
                "argmax_a={} max_value={} refined={}",
                rep.argmax, rep.max_value, rep.refined
            );
            if cli.out.is_some() {
                let mut body = String::from("a,dividend_npv,error\n");
                for (a, v) in rep.grid {
                    body.push_str(&format!("{a},{v},\n"));
                }
                write_output(cli.out.as_deref(), "optimize_a", &cfg.echo(), &body)?;
            }
            Ok(())
        }
        "b" => {
            let rep = optimize_b(
                &model,
                cfg.y,
                s.a,
                s.c1,
                s.c2,
                s.gamma,
                cfg.delta,
                cfg.optimize.tolerance,
            )?;
            println!(
                "b_star={} asymptote={} boundary_supremum={}",
                rep.b_star_approx, rep.asymptote, rep.boundary_supremum
            );
            if cli.out.is_some() {
                let mut body = String::from("b,dividend_npv,error\n");
                for (b, v) in rep.grid {
                    body.push_str(&format!("{b},{v},\n"));
                }
                write_output(cli.out.as_deref(), "optimize_b", &cfg.echo(), &body)?;
            }
            Ok(())
        }
        "sigma" => {
            let strategy = cfg.strategy()?;
            let prof = sigma_profile(&model, cfg.y, &strategy, cfg.delta, 0.025, 0.8, 32)?;
            println!(
                "argmax_sigma={} max_value={}",
                prof.argmax_sigma, prof.max_value
            );
            Ok(())
        }
        other => Err(anyhow!(
            "optimize.axis must be a, b, or sigma, got {other:?}"
        )),
    }
}

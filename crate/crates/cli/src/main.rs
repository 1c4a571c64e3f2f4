use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dimdot_cli::sweep::{format_number, resolve};
use dimdot_cli::{figure_config, parse_config, render_csv, run_sweep, ConfigError, FigureId, RunConfig, UnknownFigure};
use dimdot_core::{
    build_rates, eigensystem_analytic, steady_state_closedform, steady_state_nullspace, transition_table,
};

#[derive(Debug, Parser)]
#[command(name = "dimdot", version, about = "Heat transport and quantum correlations of two coupled quantum dots")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads; 0 picks automatically. Falls back to DIMDOT_THREADS.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Reserved. All computations are deterministic.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenenergies and eigenvectors in the product basis.
    Eigen {
        /// Print transition frequencies and squared matrix elements instead.
        #[arg(long)]
        transitions: bool,
    },
    /// Steady-state populations from the null space and the closed form.
    Steady,
    /// Heat currents, rectification and correlations at one point.
    Current,
    /// Evaluate the sweep grid of the config.
    Sweep,
    /// Emit the dataset behind one of the figure presets.
    Reproduce {
        /// fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig4, fig5 or fig6.
        figure: String,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let path = path.context("--config PATH is required for this command")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_config(&text)?)
}

fn single_point(cfg: &RunConfig) -> Result<()> {
    if !cfg.is_single_point() {
        bail!(ConfigError {
            line: None,
            message: "this command evaluates one point; remove sweep/series or use `sweep`".into(),
        });
    }
    Ok(())
}

fn eigen_csv(cfg: &RunConfig, transitions: bool) -> Result<String> {
    let point = resolve(cfg, &[])?;
    let es = eigensystem_analytic(&point.params)?;
    let mut out = String::new();
    if transitions {
        let tt = transition_table(&es, None);
        out.push_str("from,to,omega[J],S2_L[1],S2_R[1]\n");
        for n in 0..4 {
            for m in 0..4 {
                if m != n {
                    let row = [tt.omega[m][n], tt.left[m][n], tt.right[m][n]].map(format_number);
                    out.push_str(&format!("{},{},{}\n", n + 1, m + 1, row.join(",")));
                }
            }
        }
    } else {
        out.push_str("state,energy[J],re_00,im_00,re_01,im_01,re_10,im_10,re_11,im_11\n");
        for n in 0..4 {
            let mut fields = vec![(n + 1).to_string(), format_number(es.energies[n])];
            for a in es.vectors[n].iter() {
                fields.push(format_number(a.re));
                fields.push(format_number(a.im));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    Ok(out)
}

fn steady_csv(cfg: &RunConfig) -> Result<String> {
    let point = resolve(cfg, &[])?;
    let tt = transition_table(&eigensystem_analytic(&point.params)?, None);
    let w = build_rates(&tt, &point.baths)?;
    let ns = steady_state_nullspace(&w)?;
    let cf = steady_state_closedform(&w)?;
    let mut header: Vec<String> = (1..=4).map(|n| format!("p{n}[1]")).collect();
    header.extend((1..=4).map(|n| format!("p{n}_closed[1]")));
    header.extend(["closed_form_discrepancy[1]".to_string(), "residual[J]".to_string()]);
    let mut row: Vec<String> = ns.populations.iter().chain(cf.populations.iter()).map(|&x| format_number(x)).collect();
    row.push(format_number(cf.discrepancy.unwrap_or(f64::NAN)));
    row.push(format_number(ns.residual));
    Ok(format!("{}\n{}\n", header.join(","), row.join(",")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("DIMDOT_THREADS") {
        Ok(v) => v.trim().parse().with_context(|| format!("DIMDOT_THREADS must be a thread count, got `{v}`")),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count(cli.threads)?).build()?;
    let config = cli.config.as_deref();
    let out = cli.out.as_deref();
    pool.install(|| match &cli.command {
        Command::Eigen { transitions } => {
            let cfg = load_config(config)?;
            single_point(&cfg)?;
            emit(out, &eigen_csv(&cfg, *transitions)?)
        }
        Command::Steady => {
            let cfg = load_config(config)?;
            single_point(&cfg)?;
            emit(out, &steady_csv(&cfg)?)
        }
        Command::Current => {
            let cfg = load_config(config)?;
            single_point(&cfg)?;
            emit(out, &render_csv(&cfg, &run_sweep(&cfg)))
        }
        Command::Sweep => {
            let cfg = load_config(config)?;
            let target = out.map(Path::to_path_buf).or_else(|| cfg.out.clone());
            emit(target.as_deref(), &render_csv(&cfg, &run_sweep(&cfg)))
        }
        Command::Reproduce { figure } => {
            let cfg = figure_config(figure.parse::<FigureId>()?);
            emit(out, &render_csv(&cfg, &run_sweep(&cfg)))
        }
    })
}

/// Exit status per error class: 2 usage/config, 3 computation, 4 I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() || err.downcast_ref::<UnknownFigure>().is_some() {
        2
    } else if err.downcast_ref::<dimdot_core::Error>().is_some() {
        3
    } else if err.chain().any(|e| e.is::<io::Error>()) {
        4
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = format!("{err:#}").replace('\n', " ");
            eprintln!("dimdot: error: {message}");
            ExitCode::from(exit_code(&err))
        }
    }
}

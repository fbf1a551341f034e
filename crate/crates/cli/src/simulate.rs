//! `simulate` subcommand: CSV output for the placement and queue simulations.

use std::io::Write;

use bandset::analysis::{
    coupled_replay, mdone_mean, ordinary_cfrh, poissonised_cfrh, simulate_z, tail_decay_rate,
    tail_estimate, x_chain, CfrhTrace,
};
use bandset::sim_rng::{self, streams};
use bandset::BandSystem;
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Height profile of one placement run, one row per cell.
    Cfrh,
    /// Coupled X/Z queue summary per rho, or per-step rows with --trace.
    Queue,
    /// Solver pivots versus replayed placement, one row per solved instance.
    Coupling,
    /// Height statistics of placement runs, one row per epsilon.
    Sweep,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Comma-separated slack values (cfrh, coupling, sweep).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2])]
    pub eps: Vec<f64>,
    /// Comma-separated arrival rates (queue).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.9])]
    pub rho: Vec<f64>,
    /// Queue length in steps.
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: usize,
    /// Table positions per placement run (cfrh, sweep).
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Rows per random system (coupling).
    #[arg(long, default_value_t = 1_000)]
    pub m: usize,
    /// Solved instances to report (coupling).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long = "block-len", default_value_t = 64)]
    pub block_len: usize,
    /// Poissonised arrivals: k_j ~ Poisson(1 - eps) keys per cell (cfrh, sweep).
    #[arg(long)]
    pub poissonised: bool,
    /// Per-step rows instead of a summary (queue).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Serialize)]
struct CellRow {
    epsilon: f64,
    cell: usize,
    height: u32,
}

#[derive(Serialize)]
struct QueueStepRow {
    rho: f64,
    step: usize,
    arrivals: u32,
    x: u32,
    z: u32,
}

#[derive(Serialize)]
struct QueueSummaryRow {
    rho: f64,
    steps: usize,
    seed: u64,
    z_time_average: f64,
    mdone_mean: f64,
    relative_error: f64,
    x_time_average: f64,
    max_z: u32,
    tail_gt_5: f64,
    tail_gt_20: f64,
    decay_rate: Option<f64>,
    identity_holds: bool,
}

#[derive(Serialize)]
struct CouplingRow {
    epsilon: f64,
    instance: usize,
    m: usize,
    n: usize,
    block_len: usize,
    pos_eq_piv: bool,
    additions: u64,
    sum_heights: u64,
    additions_le_heights: bool,
}

#[derive(Serialize)]
struct SweepRow {
    epsilon: f64,
    n: usize,
    keys: usize,
    block_len: usize,
    seed: u64,
    poissonised: bool,
    mean_height: f64,
    max_height: u32,
    sum_heights: u64,
    max_displacement: usize,
    failed: bool,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn check(args: &SimulateArgs) -> Result<(), CliError> {
    if args.block_len == 0 {
        return Err(bad("--block-len must be at least 1"));
    }
    if matches!(args.kind, Kind::Cfrh | Kind::Sweep | Kind::Coupling)
        && (args.eps.is_empty() || args.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)))
    {
        return Err(bad("--eps values must lie in (0, 1)"));
    }
    if args.kind == Kind::Queue
        && (args.rho.is_empty() || args.rho.iter().any(|&r| !(r > 0.0 && r < 1.0)))
    {
        return Err(bad("--rho values must lie in (0, 1)"));
    }
    if matches!(args.kind, Kind::Cfrh | Kind::Sweep) && args.n == 0 {
        return Err(bad("--n must be at least 1"));
    }
    if args.kind == Kind::Coupling && args.m == 0 {
        return Err(bad("--m must be at least 1"));
    }
    Ok(())
}

fn placement(args: &SimulateArgs, eps: f64, seed: u64) -> Result<CfrhTrace, CliError> {
    let run = if args.poissonised {
        poissonised_cfrh(args.n, eps, args.block_len, seed)
    } else {
        ordinary_cfrh(args.n, eps, args.block_len, seed)
    };
    run.map_err(|e| bad(e.to_string()))
}

pub fn run<W: Write>(args: &SimulateArgs, seed: u64, out: W) -> Result<(), CliError> {
    check(args)?;
    let mut w = csv::Writer::from_writer(out);
    match args.kind {
        Kind::Cfrh => {
            for &eps in &args.eps {
                let t = placement(args, eps, seed)?;
                for (j, &h) in t.heights.iter().enumerate() {
                    w.serialize(CellRow {
                        epsilon: eps,
                        cell: j + 1,
                        height: h,
                    })?;
                }
            }
        }
        Kind::Queue => {
            for (i, &rho) in args.rho.iter().enumerate() {
                let mut rng = sim_rng::stream(seed, streams::ARRIVALS + 16 * i as u64);
                let z =
                    simulate_z(rho, args.steps, &mut rng, None).map_err(|e| bad(e.to_string()))?;
                let x = x_chain(&z.arrivals);
                if args.trace {
                    for (step, (&xj, &zj)) in x.iter().zip(&z.states).enumerate() {
                        w.serialize(QueueStepRow {
                            rho,
                            step,
                            arrivals: if step == 0 { 0 } else { z.arrivals[step - 1] },
                            x: xj,
                            z: zj,
                        })?;
                    }
                } else {
                    let expect = mdone_mean(rho).map_err(|e| bad(e.to_string()))?;
                    let avg = z.time_average();
                    w.serialize(QueueSummaryRow {
                        rho,
                        steps: args.steps,
                        seed,
                        z_time_average: avg,
                        mdone_mean: expect,
                        relative_error: (avg - expect).abs() / expect,
                        x_time_average: x[1..].iter().map(|&v| f64::from(v)).sum::<f64>()
                            / args.steps.max(1) as f64,
                        max_z: z.max_state(),
                        tail_gt_5: tail_estimate(&z, 5),
                        tail_gt_20: tail_estimate(&z, 20),
                        decay_rate: tail_decay_rate(&z, 5..=50),
                        identity_holds: x
                            .iter()
                            .zip(&z.states)
                            .all(|(&xj, &zj)| xj == zj.saturating_sub(1)),
                    })?;
                }
            }
        }
        Kind::Coupling => {
            for (i, &eps) in args.eps.iter().enumerate() {
                let mut rng = sim_rng::stream(seed, streams::SYSTEMS + 16 * i as u64);
                let n = (args.m as f64 / (1.0 - eps)).ceil() as usize;
                let mut unsolved = 0usize;
                let mut instance = 0;
                while instance < args.trials {
                    let sys = BandSystem::random(n, args.m, args.block_len, 1, false, &mut rng);
                    match coupled_replay(&sys) {
                        Ok(run) => {
                            w.serialize(CouplingRow {
                                epsilon: eps,
                                instance,
                                m: args.m,
                                n,
                                block_len: args.block_len,
                                pos_eq_piv: run.positions_match(),
                                additions: run.additions,
                                sum_heights: run.trace.sum_heights(),
                                additions_le_heights: run.additions_bounded(),
                            })?;
                            instance += 1;
                        }
                        Err(_) => {
                            unsolved += 1;
                            if unsolved > 100 * args.trials.max(1) {
                                return Err(bad(format!(
                                    "eps={eps}: too many unsolvable systems ({unsolved})"
                                )));
                            }
                        }
                    }
                }
                if unsolved > 0 {
                    eprintln!("eps={eps}: skipped {unsolved} unsolvable systems");
                }
            }
        }
        Kind::Sweep => {
            for &eps in &args.eps {
                let t = placement(args, eps, seed)?;
                w.serialize(SweepRow {
                    epsilon: eps,
                    n: args.n,
                    keys: t.positions.len(),
                    block_len: args.block_len,
                    seed,
                    poissonised: args.poissonised,
                    mean_height: t.mean_height(args.n),
                    max_height: t.max_height(),
                    sum_heights: t.sum_heights(),
                    max_displacement: t.max_displacement(),
                    failed: t.failed,
                })?;
            }
        }
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(())
}

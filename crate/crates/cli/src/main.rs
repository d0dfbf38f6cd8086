#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mbplan_core::hpo::LaunchMode;
use mbplan_core::pep::Direction;
use mbplan_core::physics::BandPlan;
use mbplan_core::sim::{ModulationPolicy, PathPolicy};

use config::RunConfig;
use stages::Failure;

#[derive(Parser)]
#[command(name = "mbplan", version, about = "Multi-band optical network planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Channel table of the band plan.
    Grid,
    /// Power evolution along one span.
    Pep {
        #[arg(long, value_enum, default_value = "forward")]
        direction: Dir,
    },
    /// Effective-loss parameters fitted to one span.
    Fit,
    /// Launch power optimisation.
    Hpo {
        #[command(subcommand)]
        target: HpoTarget,
    },
    #[command(name = "hpo-span", hide = true)]
    HpoSpan,
    #[command(name = "hpo-network", hide = true)]
    HpoNetwork,
    /// Channel-connection capacity table of the topology.
    Ccr,
    /// Provisioning runs over all seeds.
    Simulate,
    /// Uniform launch power sweep.
    GonSweep,
}

#[derive(Subcommand)]
enum HpoTarget {
    /// Optimise a single span.
    Span,
    /// Optimise every link of the topology.
    Network,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Forward,
    Backward,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Flp,
    Frp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Plan {
    Lcs,
    Lc,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum Modulation {
    Cbg,
    Wab,
    Wpb,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathSel {
    #[value(name = "maxmingf")]
    MaxMinGf,
    #[value(name = "minmaxf")]
    MinMaxF,
}

/// Flags that override fields of the JSON config.
#[derive(Args)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// First simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    band_plan: Option<Plan>,
    #[arg(long, global = true)]
    topology: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[arg(long, global = true)]
    per_band_frp: bool,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p_max_dbm: Option<f64>,
    /// Integration step, m.
    #[arg(long, global = true)]
    step_m: Option<f64>,
    #[arg(long, global = true)]
    length_km: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    launch_dbm: Option<f64>,
    #[arg(long, global = true)]
    lumped_loss_db: Option<f64>,
    /// Candidate paths per core pair.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    iterations: Option<u64>,
    #[arg(long, global = true)]
    demands: Option<usize>,
    #[arg(long, global = true)]
    loss_seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    modulation_policy: Option<Modulation>,
    #[arg(long, global = true, value_enum)]
    path_policy: Option<PathSel>,
    #[arg(long, global = true)]
    no_grooming: bool,
    #[arg(long, global = true, allow_negative_numbers = true)]
    from_dbm: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    to_dbm: Option<f64>,
    #[arg(long, global = true)]
    gon_step_db: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.sim.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(p) = self.band_plan {
            cfg.band_plan = match p {
                Plan::Lcs => BandPlan::lcs(),
                Plan::Lc => BandPlan::lc(),
                Plan::C => BandPlan::c_only(),
            };
        }
        if let Some(t) = &self.topology {
            cfg.topology = Some(t.clone());
        }
        if let Some(m) = self.mode {
            cfg.hpo.mode = match m {
                Mode::Flp => LaunchMode::Flp,
                Mode::Frp => LaunchMode::Frp,
            };
        }
        cfg.hpo.per_band_frp |= self.per_band_frp;
        if let Some(v) = self.p_max_dbm {
            cfg.hpo.p_max_dbm = v;
        }
        if let Some(v) = self.step_m {
            cfg.hpo.pep_step_m = v;
        }
        if let Some(v) = self.length_km {
            cfg.span.length_km = v;
        }
        if let Some(v) = self.launch_dbm {
            cfg.span.launch_dbm = v;
        }
        if let Some(v) = self.lumped_loss_db {
            cfg.span.lumped_loss_db = v;
        }
        if let Some(v) = self.k {
            cfg.sim.k = v;
        }
        if let Some(v) = self.iterations {
            cfg.sim.iterations = v;
        }
        if let Some(v) = self.demands {
            cfg.sim.demand_count = v;
        }
        if let Some(v) = self.loss_seed {
            cfg.sim.loss_seed = v;
        }
        if let Some(m) = self.modulation_policy {
            cfg.sim.modulation_policy = match m {
                Modulation::Cbg => ModulationPolicy::Cbg,
                Modulation::Wab => ModulationPolicy::Wab,
                Modulation::Wpb => ModulationPolicy::Wpb,
            };
        }
        if let Some(p) = self.path_policy {
            cfg.sim.path_policy = match p {
                PathSel::MaxMinGf => PathPolicy::MaxMinGf,
                PathSel::MinMaxF => PathPolicy::MinMaxF,
            };
        }
        cfg.sim.grooming &= !self.no_grooming;
        if let Some(v) = self.from_dbm {
            cfg.gon.from_dbm = v;
        }
        if let Some(v) = self.to_dbm {
            cfg.gon.to_dbm = v;
        }
        if let Some(v) = self.gon_step_db {
            cfg.gon.step_db = v;
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let mut cfg = match &cli.opts.config {
        Some(p) => RunConfig::from_path(p).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    cli.opts.apply(&mut cfg);
    cfg.validate().map_err(Failure::Config)?;
    log::debug!("config: {}", serde_json::to_string(&cfg).unwrap_or_default());
    match cli.command {
        Command::Grid => stages::grid(&cfg),
        Command::Pep { direction } => stages::pep(
            &cfg,
            match direction {
                Dir::Forward => Direction::Forward,
                Dir::Backward => Direction::Backward,
            },
        ),
        Command::Fit => stages::fit(&cfg),
        Command::Hpo { target: HpoTarget::Span } | Command::HpoSpan => stages::hpo_span(&cfg),
        Command::Hpo { target: HpoTarget::Network } | Command::HpoNetwork => stages::hpo_network(&cfg),
        Command::Ccr => stages::ccr(&cfg),
        Command::Simulate => stages::simulate(&cfg),
        Command::GonSweep => stages::gon(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asymptospec::local_spectrum::TargetTopology;
use asymptospec::nets::AsymptoticScale;
use asymptospec_cli::config::{parse_config_str, Analysis, Experiment, Grid1, LadderConfig, NetInput, Verb};
use asymptospec_cli::{out_dir, parse_config, run_to_dir, CliError, RunConfig, Summary, BUNDLED_CONFIGS};
use clap::{Args, Parser, Subcommand};

/// Asymptotic spectra, wave fronts and regularity classes of generalized-function nets.
#[derive(Parser, Debug)]
#[command(name = "asymptospec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML, or JSON for `.json` files).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "ASYMPTOSPEC_OUT")]
    out: Option<PathBuf>,
    /// Geometric ladder `ε0,q,n`.
    #[arg(long, global = true)]
    ladder: Option<LadderConfig>,
    /// Asymptotic scale: `power` or `gevrey:σ`.
    #[arg(long, global = true)]
    scale: Option<AsymptoticScale>,
    /// Seed of the randomized runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct NetArgs {
    /// Net in compact form, e.g. `delta:m=2` or `heaviside:at=0.25`.
    #[arg(long)]
    net: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fiber radii and r-samples on a grid.
    Spectrum {
        #[command(flatten)]
        net: NetArgs,
        /// Target topology: C<p> or Dprime.
        #[arg(long)]
        topology: Option<TargetTopology>,
    },
    /// Wave front estimate on a grid.
    Wavefront {
        #[command(flatten)]
        net: NetArgs,
    },
    /// Regularity classes on a compact set.
    Classify {
        #[command(flatten)]
        net: NetArgs,
    },
    /// One of the bundled experiments.
    Experiment {
        /// delta_powers, transport, blowup, strength, sum_law or properties.
        name: String,
    },
    /// Runs every bundled configuration and checks its expectations.
    CheckAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Command::CheckAll = cli.command {
        return check_all(&cli.common);
    }
    let cfg = match &cli.common.config {
        Some(path) => {
            let cfg = parse_config(path)?;
            check_verb(&cli.command, &cfg)?;
            cfg
        }
        None => default_config(&cli.command)?,
    };
    let cfg = apply_overrides(cfg, &cli.common)?;
    let summary = run_to_dir(&cfg, &out_dir(cli.common.out.as_deref(), &cfg))?;
    report(&summary, &out_dir(cli.common.out.as_deref(), &cfg));
    Ok(summary.passed)
}

fn net_input(net: &NetArgs, verb: &str) -> Result<NetInput, CliError> {
    net.net
        .clone()
        .map(NetInput::Compact)
        .ok_or_else(|| CliError::Usage(format!("{verb} needs --net or --config")))
}

fn default_config(cmd: &Command) -> Result<RunConfig, CliError> {
    let (analysis, net) = match cmd {
        Command::Spectrum { net, topology } => (
            Analysis::Spectrum {
                topology: topology.clone().unwrap_or(TargetTopology::c(0)),
                grid: Grid1::default(),
            },
            Some(net_input(net, "spectrum")?),
        ),
        Command::Wavefront { net } => (
            Analysis::Wavefront {
                grid: Grid1::default(),
                family: Default::default(),
                q_max: 8,
            },
            Some(net_input(net, "wavefront")?),
        ),
        Command::Classify { net } => (
            Analysis::Classify {
                k: [-0.5, 0.5],
                l_max: 2,
                family: Default::default(),
            },
            Some(net_input(net, "classify")?),
        ),
        Command::Experiment { name } => (Analysis::Experiment(Experiment::by_name(name)?), None),
        Command::CheckAll => unreachable!("handled before"),
    };
    let mut cfg = RunConfig::new(analysis);
    cfg.net = net;
    Ok(cfg)
}

/// The config's analysis must belong to the invoked verb.
fn check_verb(cmd: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    let (verb, flags_net, topology) = match cmd {
        Command::Spectrum { net, topology } => (Verb::Spectrum, net.net.is_some(), topology.is_some()),
        Command::Wavefront { net } => (Verb::Wavefront, net.net.is_some(), false),
        Command::Classify { net } => (Verb::Classify, net.net.is_some(), false),
        Command::Experiment { name } => {
            if let Analysis::Experiment(e) = &cfg.analysis {
                if e.name() != name {
                    return Err(CliError::Usage(format!("config runs experiment {}, not {name}", e.name())));
                }
            }
            (Verb::Experiment, false, false)
        }
        Command::CheckAll => return Ok(()),
    };
    if flags_net || topology {
        return Err(CliError::Usage("--net and --topology apply only without --config".into()));
    }
    if cfg.analysis.verb() != verb {
        return Err(CliError::Usage(format!(
            "config analysis {} runs under `{}`, not `{verb}`",
            cfg.analysis.kind(),
            cfg.analysis.verb()
        )));
    }
    Ok(())
}

fn apply_overrides(mut cfg: RunConfig, c: &Common) -> Result<RunConfig, CliError> {
    if let Some(l) = c.ladder {
        cfg.ladder = l;
    }
    if let Some(s) = c.scale {
        cfg.scale = s;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(s: &Summary, dir: &Path) {
    let ok = s.expectations.iter().filter(|e| e.passed).count();
    println!(
        "{}: {} table(s) in {}; expectations {ok}/{} passed",
        s.analysis,
        s.tables.len(),
        dir.display(),
        s.expectations.len()
    );
    for e in s.expectations.iter().filter(|e| !e.passed) {
        println!("  FAIL {}: {}", e.id, e.failures.join("; "));
    }
}

fn check_all(c: &Common) -> Result<bool, CliError> {
    let base = c.out.clone().unwrap_or_else(|| PathBuf::from("asymptospec-out"));
    let mut all = true;
    for (name, text) in BUNDLED_CONFIGS {
        let mut cfg = parse_config_str(text, false).map_err(|e| CliError::Config(format!("bundled {name}: {e}")))?;
        cfg.output.stem = Some(name.to_string());
        let cfg = apply_overrides(cfg, c)?;
        let s = run_to_dir(&cfg, &base)?;
        let ok = s.expectations.iter().filter(|e| e.passed).count();
        println!(
            "{} {name}: expectations {ok}/{}",
            if s.passed { "PASS" } else { "FAIL" },
            s.expectations.len()
        );
        for e in s.expectations.iter().filter(|e| !e.passed) {
            println!("  {}: {}", e.id, e.failures.join("; "));
        }
        all &= s.passed;
    }
    Ok(all)
}

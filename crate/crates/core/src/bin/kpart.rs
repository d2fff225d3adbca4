use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kpart::commands::{self, Format, PartitionChoice, RunConfig, Source};
use kpart::tensor::sx::Component;
use kpart::{Error, Mode};

#[derive(Parser)]
#[command(name = "kpart", version, about = "k-partition refinement and symmetry analysis of graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refine the graph's k-partition to a pq-stable one.
    Stabilize {
        #[command(flatten)]
        common: Common,
        /// Include the final class of every tuple.
        #[arg(long)]
        emit_partition: bool,
    },
    /// Symmetry certificate of a k-partition.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "stabilized")]
        partition: PartitionArg,
    },
    /// Automorphism group, k-orbits, and whether the stable partition is automorphic.
    Orbits {
        #[command(flatten)]
        common: Common,
    },
    /// Refine two graphs side by side.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input2: Option<String>,
        #[arg(long)]
        gen2: Option<String>,
    },
    /// Strongly regular parameters and intersection numbers.
    Srg {
        #[command(flatten)]
        common: Common,
        /// Write the intersection number table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Stable 3-partition, symmetry certificate, automorphisms and subsum system.
    Probe7 {
        #[command(flatten)]
        common: Common,
    },
    /// Row-subsum system of the stable 3-partition.
    Sx {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        pairs: PairsArg,
        #[arg(long, value_enum, default_value = "x")]
        component: ComponentArg,
    },
}

#[derive(Args)]
struct Common {
    /// Graph file (graph6 lines, DIMACS or JSON); `-` for standard input.
    #[arg(long)]
    input: Option<String>,
    /// Named generator such as `petersen` or `cycle:7`.
    #[arg(long = "gen")]
    generator: Option<String>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value = "count")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Largest vertex count for the automorphism search.
    #[arg(long)]
    oracle_limit: Option<usize>,
    /// Enumerate every permutation instead of backtracking.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Count,
    Set,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    Raw,
    Stabilized,
    Assembled,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairsArg {
    All,
    OrbitReduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    X,
    Y,
    Z,
}

fn config(common: &Common) -> Result<RunConfig, Error> {
    Ok(RunConfig {
        sources: vec![Source::from_parts(common.input.as_deref(), common.generator.as_deref(), "1")?],
        k: common.k,
        mode: match common.mode {
            ModeArg::Count => Mode::Count,
            ModeArg::Set => Mode::Set,
        },
        format: match common.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        oracle_limit: common.oracle_limit,
        exhaustive: common.exhaustive,
        ..RunConfig::default()
    })
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), Error> {
    let (name, common, cfg) = match &cli.command {
        Command::Stabilize { common, emit_partition } => {
            let cfg = RunConfig { emit_partition: *emit_partition, ..config(common)? };
            ("stabilize", common, cfg)
        }
        Command::Certify { common, partition } => {
            let partition = match partition {
                PartitionArg::Raw => PartitionChoice::Raw,
                PartitionArg::Stabilized => PartitionChoice::Stabilized,
                PartitionArg::Assembled => PartitionChoice::Assembled,
            };
            ("certify", common, RunConfig { partition, ..config(common)? })
        }
        Command::Orbits { common } => ("orbits", common, config(common)?),
        Command::Compare { common, input2, gen2 } => {
            let mut cfg = config(common)?;
            cfg.sources.push(Source::from_parts(input2.as_deref(), gen2.as_deref(), "2")?);
            ("compare", common, cfg)
        }
        Command::Srg { common, csv } => ("srg", common, RunConfig { csv: csv.clone(), ..config(common)? }),
        Command::Probe7 { common } => ("probe7", common, config(common)?),
        Command::Sx { common, pairs, component } => {
            let cfg = RunConfig {
                pairs_reduced: matches!(pairs, PairsArg::OrbitReduced),
                component: match component {
                    ComponentArg::X => Component::X,
                    ComponentArg::Y => Component::Y,
                    ComponentArg::Z => Component::Z,
                },
                ..config(common)?
            };
            ("sx", common, cfg)
        }
    };
    Ok((commands::run(name, &cfg)?, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, None)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Command-line driver for skill-discovery experiments.
//!
//! Exit codes: 0 on success, 1 for usage/config/input problems, 2 for
//! runtime or numeric failures.

mod commands;
mod config;
mod plot;

use clap::{Args, Parser, Subcommand};
use commands::{
    cmd_eval, cmd_finetune, cmd_hier, cmd_imitate, cmd_oracle, cmd_plot, cmd_train, EvalArgs,
    FinetuneArgs, HierArgs, ImitateArgs, OracleArgs, PlotArgs, TaskArgs, TrainArgs,
};
use diayn_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "diayn", about = "Unsupervised skill discovery at desk scale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TaskFlags {
    /// Task reward kind: goal_distance or x_progress.
    #[arg(long)]
    task_kind: Option<String>,
    /// Goal coordinates for goal_distance, comma separated.
    #[arg(long)]
    goal: Option<String>,
}

impl TaskFlags {
    fn into_args(self) -> TaskArgs {
        TaskArgs { task_kind: self.task_kind, goal: self.goal }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the unsupervised skill-discovery loop and write a checkpoint.
    Train {
        /// TOML config with a [train] section.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Resume from an existing checkpoint instead of starting fresh.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        episodes: Option<u64>,
        #[arg(long)]
        skills: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every skill of a checkpoint under a task reward.
    Eval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Greedy evaluation episodes per skill.
        #[arg(long)]
        episodes: Option<usize>,
        #[command(flatten)]
        task: TaskFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adapt the best skill to a task reward, starting from its weights.
    Finetune {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Training episodes.
        #[arg(long)]
        budget: Option<u64>,
        /// pretrained or random.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eval_episodes: Option<usize>,
        #[command(flatten)]
        task: TaskFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a meta-controller that picks frozen skills every k steps.
    Hier {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Steps each chosen skill runs for.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        eval_episodes: Option<usize>,
        #[command(flatten)]
        task: TaskFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retrieve the skill that best explains an expert state trajectory.
    Imitate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Record file of expert states (one row per step).
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print gridworld closed forms, partition comparisons, and verification
    /// verdicts.
    Oracle {
        /// Grid side for the even-split closed form (must be even).
        #[arg(long)]
        n: Option<usize>,
        /// WxH grid for the border-length comparison, e.g. 4x8.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a record file as a deterministic SVG.
    Plot {
        /// trace, histogram, curve, or heatmap.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "")]
        x_label: String,
        #[arg(long, default_value = "")]
        y_label: String,
        /// Column to histogram; defaults to the last column.
        #[arg(long)]
        column: Option<String>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Input(_) | Error::Config(_) | Error::Format(_) => 1,
        Error::Numeric(_) | Error::Io(_) => 2,
    }
}

fn run(cli: Cli) -> diayn_core::Result<()> {
    match cli.command {
        Command::Train { config, resume, seed, episodes, skills, alpha, out } => cmd_train(TrainArgs {
            config,
            resume,
            seed,
            episodes,
            skills,
            alpha,
            out,
        }),
        Command::Eval { config, checkpoint, episodes, task, out } => cmd_eval(EvalArgs {
            config,
            checkpoint,
            episodes,
            task: task.into_args(),
            out,
        }),
        Command::Finetune { config, checkpoint, budget, init, seed, eval_episodes, task, out } => {
            cmd_finetune(FinetuneArgs {
                config,
                checkpoint,
                budget,
                init,
                seed,
                eval_episodes,
                task: task.into_args(),
                out,
            })
        }
        Command::Hier { config, checkpoint, k, budget, seed, eval_episodes, task, out } => {
            cmd_hier(HierArgs {
                config,
                checkpoint,
                k,
                budget,
                seed,
                eval_episodes,
                task: task.into_args(),
                out,
            })
        }
        Command::Imitate { config, checkpoint, trajectory, out } => cmd_imitate(ImitateArgs {
            config,
            checkpoint,
            trajectory,
            out,
        }),
        Command::Oracle { n, dims, out } => cmd_oracle(OracleArgs { n, dims, out }),
        Command::Plot { kind, input, output, x_label, y_label, column } => cmd_plot(PlotArgs {
            kind,
            input,
            output,
            x_label,
            y_label,
            column,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error (exit 1).
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gowers_lab::approx::LiftDirection;
use gowers_lab::reductions::DichotomyFlavor;
use gowers_lab::scenario::{
    load_scenario, render, run, run_scenario, Format, GameSpec, PayoffSpec, ReduceStage, Reduction, Report,
    RunOptions, Scenario, Stage, EXIT_VALIDATION,
};
use gowers_lab::{Error, GameKind, InstanceSpec, Player};

/// Default output directory when `--out` is absent.
const OUT_ENV: &str = "GOWERS_LAB_OUT";

#[derive(Parser)]
#[command(name = "gowers-lab", version, about = "Run Gowers-space game experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Table,
}

#[derive(clap::Args)]
struct Common {
    /// Report directory; defaults to $GOWERS_LAB_OUT, then ./gowers-lab-out.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "table")]
    format: Fmt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario's whole pipeline.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the five axioms on an instance.
    Axioms {
        instance: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the scenario's game and verify the winner's strategy.
    Solve {
        scenario: PathBuf,
        /// Player whose goal is the payoff.
        #[arg(long, default_value = "I")]
        owner: String,
        #[command(flatten)]
        common: Common,
    },
    /// Solve, verify, apply one reduction, and verify its output.
    Reduce {
        scenario: PathBuf,
        /// kastanas, transfer_a_to_b, tilde, unfold, gowers, asymptotic,
        /// homogeneous, lift, approx_asymptotic or strong_asymptotic.
        name: String,
        /// F-I, G-II, A-I or B-II, for lift.
        #[arg(long)]
        direction: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the dichotomy games below every subspace of the root.
    Dichotomy {
        scenario: PathBuf,
        #[arg(long, default_value = "strategic")]
        flavor: String,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| format!("{what} {s:?}: {e}"))
}

fn with_pipeline(path: &Path, pipeline: impl FnOnce(&Scenario) -> Vec<Stage>) -> Result<Scenario, Report> {
    match load_scenario(path) {
        Ok(mut s) => {
            s.pipeline = pipeline(&s);
            Ok(s)
        }
        Err(e) => Err(Report::invalid(&stem(path), &e)),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn reduce_pipeline(stage: ReduceStage) -> Vec<Stage> {
    let mut out = Vec::new();
    if stage.name.input().is_some() {
        out.push(Stage::Solve {
            owner: stage.name.input_owner(),
            kind: None,
            horizon: None,
        });
        out.push(Stage::Verify { trials: None });
    }
    let unverified = matches!(stage.name, Reduction::Lift | Reduction::StrongAsymptotic);
    out.push(Stage::Reduce(stage));
    if unverified {
        out.push(Stage::Verify { trials: None });
    }
    out
}

fn usage_error(name: &str, msg: String) -> Report {
    Report::invalid(name, &Error::SpecInvalid(msg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, common) = match cli.cmd {
        Cmd::Run { scenario, common } => {
            let opts = RunOptions {
                budget_nodes: common.budget_nodes,
            };
            (run_scenario(&scenario, &opts), common)
        }
        Cmd::Axioms {
            instance,
            horizon,
            common,
        } => {
            let name = stem(&instance);
            let spec = std::fs::read_to_string(&instance)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str::<InstanceSpec>(&t).map_err(|e| e.to_string()));
            let report = match spec {
                Ok(spec) => {
                    let s = Scenario {
                        name,
                        description: None,
                        instance: spec,
                        system: None,
                        game: GameSpec {
                            kind: GameKind::F,
                            root: 0,
                            horizon,
                        },
                        payoff: PayoffSpec {
                            name: "everything".into(),
                            params: Default::default(),
                            delta: None,
                        },
                        pipeline: vec![Stage::Axioms],
                        budgets: Default::default(),
                        seed: 0,
                    };
                    let opts = RunOptions {
                        budget_nodes: common.budget_nodes,
                    };
                    run(&s, &opts)
                }
                Err(e) => usage_error(&name, format!("instance file: {e}")),
            };
            (report, common)
        }
        Cmd::Solve {
            scenario,
            owner,
            common,
        } => {
            let report = match parse_json::<Player>("owner", &owner) {
                Ok(owner) => match with_pipeline(&scenario, |_| {
                    vec![
                        Stage::Solve {
                            owner: Some(owner),
                            kind: None,
                            horizon: None,
                        },
                        Stage::Verify { trials: None },
                    ]
                }) {
                    Ok(s) => run(&s, &RunOptions { budget_nodes: common.budget_nodes }),
                    Err(r) => r,
                },
                Err(e) => usage_error("solve", e),
            };
            (report, common)
        }
        Cmd::Reduce {
            scenario,
            name,
            direction,
            common,
        } => {
            let parsed = parse_json::<Reduction>("reduction", &name).and_then(|n| {
                let d = direction
                    .as_deref()
                    .map(|d| parse_json::<LiftDirection>("direction", d))
                    .transpose()?;
                Ok((n, d))
            });
            let report = match parsed {
                Ok((name, direction)) => {
                    match with_pipeline(&scenario, |s| {
                        let mut stage = ReduceStage {
                            name,
                            direction,
                            dense: None,
                            delta: None,
                            horizon: None,
                        };
                        // Dense sets and radii come from the scenario's own reduce stage.
                        if let Some(Stage::Reduce(r)) = s
                            .pipeline
                            .iter()
                            .find(|st| matches!(st, Stage::Reduce(r) if r.name == name))
                        {
                            stage.dense = r.dense.clone();
                            stage.delta = r.delta.clone();
                            stage.horizon = r.horizon;
                            stage.direction = stage.direction.or(r.direction);
                        }
                        reduce_pipeline(stage)
                    }) {
                        Ok(s) => run(&s, &RunOptions { budget_nodes: common.budget_nodes }),
                        Err(r) => r,
                    }
                }
                Err(e) => usage_error("reduce", e),
            };
            (report, common)
        }
        Cmd::Dichotomy {
            scenario,
            flavor,
            common,
        } => {
            let report = match parse_json::<DichotomyFlavor>("flavor", &flavor) {
                Ok(flavor) => match with_pipeline(&scenario, |_| vec![Stage::Dichotomy { flavor, root: None }]) {
                    Ok(s) => run(&s, &RunOptions { budget_nodes: common.budget_nodes }),
                    Err(r) => r,
                },
                Err(e) => usage_error("dichotomy", e),
            };
            (report, common)
        }
    };

    let out = common
        .out
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gowers-lab-out"));
    let format = match common.format {
        Fmt::Json => Format::Json,
        Fmt::Table => Format::Table,
    };
    let written = std::fs::create_dir_all(&out).and_then(|_| {
        std::fs::write(out.join(format!("{}.report.json", report.scenario)), render(&report, Format::Json))?;
        std::fs::write(out.join(format!("{}.report.txt", report.scenario)), render(&report, Format::Table))
    });
    print!("{}", render(&report, format));
    if let Err(e) = written {
        eprintln!("cannot write reports to {}: {e}", out.display());
        return ExitCode::from(EXIT_VALIDATION as u8);
    }
    ExitCode::from(report.exit_code as u8)
}

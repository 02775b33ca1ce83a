//! Scenario files and the batch runner.
//!
//! A scenario names an instance, a game, a payoff and a pipeline of stages.
//! Stages share one "current strategy": `solve` produces it, `verify`
//! certifies it, and `reduce` stages transform it. Every source of randomness
//! draws from ChaCha8 seeded with the scenario seed, one stream per stage
//! (stream 0 belongs to the payoff), so reruns give byte-identical reports.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::approx::{
    approx_asymptotic_from_gowers, discretize, lift_strategy, strong_asymptotic_from_asymptotic, DeltaSeq,
    LiftDirection, PrecompactSystem, SystemSpec,
};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Player};
use crate::instances::{
    block_pair_scan, build_instance, counterexample_sets, pigeonhole_everywhere, CounterexampleKind, InstanceSpec,
    PigeonholeMode,
};
use crate::payoff::{for_each_sequence, Payoff};
use crate::rat::{format_rat, parse_rat, Rat};
use crate::reductions::{
    adversarial_from_kastanas, asymptotic_from_gowers, check_ramsey_dichotomy, gowers_from_asymptotic,
    homogeneous_from_asymptotic, tilde_a_to_f, tilde_b_to_g, tilde_lift, transfer_a_to_b, unfold_asymptotic,
    unfold_space, DichotomyFlavor,
};
use crate::solver::{solve, DEFAULT_NODE_BUDGET};
use crate::space::{check_axioms, point_set, PointData, PointSet, SpaceInstance, SubspaceId};
use crate::strategy::{verify_exhaustive, verify_strategy, Strategy, VerificationMode, VerifiedStrategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_UNVERIFIED: i32 = 4;

/// Sequences a random payoff may tabulate.
const RANDOM_PAYOFF_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub instance: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    pub game: GameSpec,
    pub payoff: PayoffSpec,
    pub pipeline: Vec<Stage>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub kind: GameKind,
    /// Palette index; 0 is the whole space for the built-in palettes.
    #[serde(default)]
    pub root: SubspaceId,
    pub horizon: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_nodes")]
    pub nodes: u64,
    /// Checked between stages. Exceeding it makes the report depend on timing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<u64>,
}

fn default_nodes() -> u64 {
    DEFAULT_NODE_BUDGET
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            nodes: DEFAULT_NODE_BUDGET,
            time_ms: None,
        }
    }
}

/// A named predicate. Positions index the outcome sequence.
///
/// | name | params |
/// |---|---|
/// | `everything`, `nothing` | |
/// | `parity` | `position`, `parity` (`even`/`odd`) |
/// | `increasing` | |
/// | `sum_at_least` | `bound` |
/// | `all_at_least` | `bound` |
/// | `in_set` | `position`, `points` |
/// | `first_coordinate` | `position`, `op` (`eq`, `ne`, `lt`, `le`, `gt`, `ge`), `value` |
/// | `counterexample` | `kind` |
/// | `random` | `density` |
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaSeq>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Stage {
    Axioms,
    Solve {
        #[serde(default)]
        owner: Option<Player>,
        #[serde(default)]
        kind: Option<GameKind>,
        #[serde(default)]
        horizon: Option<usize>,
    },
    /// Exhaustive unless `trials` asks for the seeded random adversary.
    Verify {
        #[serde(default)]
        trials: Option<u64>,
    },
    Reduce(ReduceStage),
    Dichotomy {
        flavor: DichotomyFlavor,
        #[serde(default)]
        root: Option<SubspaceId>,
    },
    PigeonholeCheck {
        set: SetSpec,
        /// Approximate mode radius, as a rational string.
        #[serde(default)]
        delta: Option<String>,
    },
    Counterexample {
        kind: CounterexampleKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Kastanas,
    TransferAToB,
    Tilde,
    Unfold,
    Gowers,
    Asymptotic,
    Homogeneous,
    Lift,
    ApproxAsymptotic,
    StrongAsymptotic,
}

impl Reduction {
    pub fn id(self) -> &'static str {
        match self {
            Reduction::Kastanas => "kastanas",
            Reduction::TransferAToB => "transfer_a_to_b",
            Reduction::Tilde => "tilde",
            Reduction::Unfold => "unfold",
            Reduction::Gowers => "gowers",
            Reduction::Asymptotic => "asymptotic",
            Reduction::Homogeneous => "homogeneous",
            Reduction::Lift => "lift",
            Reduction::ApproxAsymptotic => "approx_asymptotic",
            Reduction::StrongAsymptotic => "strong_asymptotic",
        }
    }

    /// The game of the verified strategy the reduction consumes, if any.
    pub fn input(self) -> Option<GameKind> {
        match self {
            Reduction::Kastanas => Some(GameKind::K),
            Reduction::TransferAToB => Some(GameKind::A),
            Reduction::Gowers | Reduction::Homogeneous | Reduction::StrongAsymptotic => Some(GameKind::F),
            Reduction::Asymptotic | Reduction::ApproxAsymptotic => Some(GameKind::G),
            Reduction::Tilde | Reduction::Unfold | Reduction::Lift => None,
        }
    }

    /// The player whose strategy the reduction consumes. `None` when either
    /// player's works or no strategy is consumed.
    pub fn input_owner(self) -> Option<Player> {
        match self {
            Reduction::TransferAToB | Reduction::Gowers | Reduction::Homogeneous | Reduction::StrongAsymptotic => {
                Some(Player::I)
            }
            Reduction::Asymptotic | Reduction::ApproxAsymptotic => Some(Player::II),
            Reduction::Kastanas | Reduction::Tilde | Reduction::Unfold | Reduction::Lift => None,
        }
    }
}

/// What a stage leaves as the current strategy, for the static check.
#[derive(Clone, Copy)]
enum Slot {
    Empty,
    /// `kind` is `None` when it depends on who wins.
    Held { kind: Option<GameKind>, verified: bool },
}

/// Checks that every stage's input matches what the previous stages leave.
pub fn check_pipeline(s: &Scenario) -> std::result::Result<(), (usize, Error)> {
    let mut slot = Slot::Empty;
    for (i, stage) in s.pipeline.iter().enumerate() {
        let bad = |msg: String| Err((i, Error::GameMismatch(msg)));
        slot = match stage {
            Stage::Solve { kind, .. } => Slot::Held {
                kind: Some(kind.unwrap_or(s.game.kind)),
                verified: false,
            },
            Stage::Verify { trials } => match slot {
                Slot::Empty => return bad("verify needs a strategy; solve first".into()),
                Slot::Held { kind, verified } => Slot::Held {
                    kind,
                    verified: verified || trials.is_none(),
                },
            },
            Stage::Reduce(r) => {
                if let Some(want) = r.name.input() {
                    match slot {
                        Slot::Empty => return bad(format!("{} needs a strategy; solve first", r.name.id())),
                        Slot::Held { verified: false, .. } => {
                            return bad(format!("{} needs an exhaustively verified strategy", r.name.id()))
                        }
                        Slot::Held { kind: Some(k), .. } if k != want => {
                            return bad(format!("{} needs a {want:?} strategy, the pipeline holds {k:?}", r.name.id()))
                        }
                        _ => {}
                    }
                }
                if r.name == Reduction::Lift && r.direction.is_none() {
                    return Err((i, Error::SpecInvalid("lift needs a direction".into())));
                }
                match r.name {
                    Reduction::Kastanas => Slot::Held { kind: None, verified: true },
                    Reduction::TransferAToB | Reduction::Gowers => Slot::Held {
                        kind: Some(if r.name == Reduction::Gowers { GameKind::G } else { GameKind::B }),
                        verified: true,
                    },
                    Reduction::Asymptotic | Reduction::ApproxAsymptotic | Reduction::Unfold => Slot::Held {
                        kind: Some(GameKind::F),
                        verified: true,
                    },
                    Reduction::Tilde => Slot::Held { kind: None, verified: true },
                    Reduction::Homogeneous => slot,
                    Reduction::StrongAsymptotic => Slot::Held {
                        kind: Some(GameKind::SF),
                        verified: false,
                    },
                    Reduction::Lift => Slot::Held {
                        kind: r.direction.map(LiftDirection::kind),
                        verified: false,
                    },
                }
            }
            Stage::Axioms | Stage::Dichotomy { .. } | Stage::PigeonholeCheck { .. } | Stage::Counterexample { .. } => {
                slot
            }
        };
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceStage {
    pub name: Reduction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<LiftDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense: Option<DenseSpec>,
    /// Overrides the payoff's `delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaSeq>,
    /// Horizon of the strong asymptotic game.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DenseSpec {
    All,
    Points {
        points: Vec<usize>,
    },
    /// Points whose coordinates are all multiples of `step`.
    GridMultiple {
        step: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Counterexample { name: CounterexampleKind },
    Points { points: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ValidationError,
    BudgetExhausted,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::ValidationError => EXIT_VALIDATION,
            Status::BudgetExhausted => EXIT_EXHAUSTED,
            Status::VerificationFailed => EXIT_UNVERIFIED,
        }
    }

    fn of(e: &Error) -> Status {
        match e {
            Error::SpecInvalid(_)
            | Error::PaletteNotClosedUnderMeet { .. }
            | Error::KindMismatch { .. }
            | Error::GameMismatch(_)
            | Error::NoMetric
            | Error::NotDense { .. } => Status::ValidationError,
            Error::ExhaustionBudget { .. } | Error::FiniteExhaustion { .. } | Error::PigeonholeUnavailable { .. } => {
                Status::BudgetExhausted
            }
            Error::IllegalMove(_)
            | Error::NotTerminal
            | Error::StrategyIncomplete(_)
            | Error::NotVerified(_)
            | Error::Invariant(_) => Status::VerificationFailed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_index: Option<usize>,
    /// The failing stage, or the construction step named by the error.
    pub stage_id: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub index: usize,
    pub op: String,
    pub seed: u64,
    pub result: String,
    pub nodes: u64,
    pub exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub name: String,
    pub points: usize,
    pub subspaces: usize,
    /// The full specification, palette rule included.
    pub spec: InstanceSpec,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<Game>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payoff: Option<String>,
    pub stages: Vec<StageReport>,
    /// Set by `pigeonhole_check` stages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pigeonhole: Option<String>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<Diagnostic>,
}

impl Report {
    fn new(name: &str, seed: u64) -> Self {
        Report {
            scenario: name.to_string(),
            seed,
            instance: None,
            game: None,
            payoff: None,
            stages: Vec::new(),
            pigeonhole: None,
            status: Status::Ok,
            exit_code: EXIT_OK,
            diagnostic: None,
        }
    }

    /// A report for input that never reached the runner.
    pub fn invalid(name: &str, e: &Error) -> Self {
        let mut r = Report::new(name, 0);
        r.fail_with(e, None, "load");
        r
    }

    fn fail(&mut self, status: Status, diagnostic: Diagnostic) {
        self.status = status;
        self.exit_code = status.exit_code();
        self.diagnostic = Some(diagnostic);
    }

    fn fail_with(&mut self, e: &Error, stage_index: Option<usize>, stage_id: &str) {
        let stage_id = match e {
            Error::FiniteExhaustion { stage, .. } => stage.clone(),
            _ => stage_id.to_string(),
        };
        self.fail(
            Status::of(e),
            Diagnostic {
                code: e.code().to_string(),
                stage_index,
                stage_id,
                message: e.to_string(),
            },
        );
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario's node budget.
    pub budget_nodes: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SpecInvalid(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| Error::SpecInvalid(format!("scenario: {e}")))
}

/// Loads and runs a scenario file. Unreadable or malformed files give a
/// report with exit code 2.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Report {
    match load_scenario(path) {
        Ok(s) => run(&s, opts),
        Err(e) => Report::invalid(&path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(), &e),
    }
}

/// The seed of stream `stream` under `seed`.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

pub fn build_space(s: &Scenario) -> Result<SpaceInstance> {
    let space = build_instance(&s.instance)?;
    match &s.system {
        Some(spec) => {
            let system = PrecompactSystem::from_spec(&space, spec)?;
            space.with_system(system)
        }
        None => Ok(space),
    }
}

pub fn run(s: &Scenario, opts: &RunOptions) -> Report {
    let mut report = Report::new(&s.name, s.seed);
    let space = match build_space(s) {
        Ok(space) => space,
        Err(e) => {
            report.fail_with(&e, None, "instance");
            return report;
        }
    };
    if let Err((i, e)) = check_pipeline(s) {
        report.fail_with(&e, Some(i), &stage_id(&s.pipeline[i]));
        return report;
    }
    report.instance = Some(InstanceSummary {
        name: space.name.clone(),
        points: space.num_points(),
        subspaces: space.num_subspaces(),
        spec: s.instance.clone(),
    });
    let game = Game::new(s.game.kind, s.game.root, s.game.horizon);
    let payoff_seed = stream_seed(s.seed, 0);
    let payoff = match game
        .check_space(&space)
        .and_then(|_| build_payoff(&space, &s.payoff, game.outcome_len(), payoff_seed))
    {
        Ok(p) => p,
        Err(e) => {
            report.fail_with(&e, None, "game");
            return report;
        }
    };
    report.game = Some(game);
    report.payoff = Some(payoff.name().to_string());

    let mut ctx = Ctx {
        space: &space,
        game,
        payoff_spec: &s.payoff,
        payoff_seed,
        budget: opts.budget_nodes.unwrap_or(s.budgets.nodes),
        current: None,
    };
    let start = Instant::now();
    for (i, stage) in s.pipeline.iter().enumerate() {
        let id = stage_id(stage);
        if let Some(ms) = s.budgets.time_ms {
            if start.elapsed().as_millis() > u128::from(ms) {
                report.fail(
                    Status::BudgetExhausted,
                    Diagnostic {
                        code: "TimeBudget".into(),
                        stage_index: Some(i),
                        stage_id: id,
                        message: format!("time budget of {ms} ms spent before this stage"),
                    },
                );
                break;
            }
        }
        let seed = stream_seed(s.seed, i as u64 + 1);
        match ctx.run_stage(stage, seed) {
            Ok(out) => {
                if let Some(p) = out.pigeonhole.clone() {
                    report.pigeonhole = Some(p);
                }
                let failed = out.failure.clone();
                report.stages.push(StageReport {
                    index: i,
                    op: id.clone(),
                    seed,
                    result: out.result,
                    nodes: out.nodes,
                    exhausted: false,
                    verified_fraction: out.fraction,
                    details: out.details,
                });
                if let Some(msg) = failed {
                    report.fail(
                        Status::VerificationFailed,
                        Diagnostic {
                            code: "NotVerified".into(),
                            stage_index: Some(i),
                            stage_id: id,
                            message: msg,
                        },
                    );
                    break;
                }
            }
            Err(e) => {
                let status = Status::of(&e);
                report.stages.push(StageReport {
                    index: i,
                    op: id.clone(),
                    seed,
                    result: format!("error: {}", e.code()),
                    nodes: 0,
                    exhausted: status == Status::BudgetExhausted,
                    verified_fraction: None,
                    details: Value::Null,
                });
                report.fail_with(&e, Some(i), &id);
                break;
            }
        }
    }
    report
}

fn stage_id(stage: &Stage) -> String {
    match stage {
        Stage::Axioms => "axioms".into(),
        Stage::Solve { .. } => "solve".into(),
        Stage::Verify { .. } => "verify".into(),
        Stage::Reduce(r) => format!("reduce:{}", r.name.id()),
        Stage::Dichotomy { .. } => "dichotomy".into(),
        Stage::PigeonholeCheck { .. } => "pigeonhole_check".into(),
        Stage::Counterexample { .. } => "counterexample".into(),
    }
}

enum Current {
    Verified(VerifiedStrategy),
    Unverified { strategy: Strategy, target: Payoff },
}

impl Current {
    fn strategy(&self) -> &Strategy {
        match self {
            Current::Verified(v) => v.strategy(),
            Current::Unverified { strategy, .. } => strategy,
        }
    }

    fn target(&self) -> &Payoff {
        match self {
            Current::Verified(v) => v.target(),
            Current::Unverified { target, .. } => target,
        }
    }
}

#[derive(Default)]
struct StageOut {
    result: String,
    nodes: u64,
    fraction: Option<f64>,
    details: Value,
    pigeonhole: Option<String>,
    /// Set when a declared verification did not pass.
    failure: Option<String>,
}

struct Ctx<'a> {
    space: &'a SpaceInstance,
    game: Game,
    payoff_spec: &'a PayoffSpec,
    payoff_seed: u64,
    budget: u64,
    current: Option<Current>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("stage details serialize")
}

fn describe(space: &SpaceInstance, v: &VerifiedStrategy) -> String {
    let g = v.game();
    format!(
        "{:?} wins {:?} below {} toward {}",
        v.owner(),
        g.kind,
        space.palette().subspace(g.root).label,
        v.target().name()
    )
}

impl Ctx<'_> {
    fn payoff(&self, len: usize) -> Result<Payoff> {
        build_payoff(self.space, self.payoff_spec, len, self.payoff_seed)
    }

    fn verified(&self, stage: &str) -> Result<&VerifiedStrategy> {
        match &self.current {
            Some(Current::Verified(v)) => Ok(v),
            Some(Current::Unverified { .. }) => Err(Error::GameMismatch(format!(
                "{stage} needs a verified strategy; add an exhaustive verify stage first"
            ))),
            None => Err(Error::GameMismatch(format!("{stage} needs a strategy; solve first"))),
        }
    }

    fn delta(&self, stage: &ReduceStage, len: usize) -> Result<DeltaSeq> {
        let d = stage
            .delta
            .clone()
            .or_else(|| self.payoff_spec.delta.clone())
            .ok_or_else(|| Error::SpecInvalid(format!("{} needs a delta sequence", stage.name.id())))?;
        if d.len() != len {
            return Err(Error::SpecInvalid(format!(
                "{} needs {len} delta entries, got {}",
                stage.name.id(),
                d.len()
            )));
        }
        Ok(d)
    }

    fn dense(&self, stage: &ReduceStage) -> Result<PointSet> {
        let spec = stage
            .dense
            .as_ref()
            .ok_or_else(|| Error::SpecInvalid(format!("{} needs a dense subset", stage.name.id())))?;
        dense_set(self.space, spec)
    }

    fn run_stage(&mut self, stage: &Stage, seed: u64) -> Result<StageOut> {
        let space = self.space;
        match stage {
            Stage::Axioms => {
                let rep = check_axioms(space, self.game.horizon, self.budget)?;
                let checks = std::iter::once(&rep.preorders).chain(rep.axioms.iter());
                let nodes = checks.clone().map(|c| c.checked).sum();
                let failed: Vec<&str> = checks.filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
                Ok(StageOut {
                    result: if failed.is_empty() {
                        "all axioms hold".into()
                    } else {
                        format!("failed: {}", failed.join(", "))
                    },
                    nodes,
                    details: to_value(&rep),
                    failure: (!failed.is_empty()).then(|| format!("axioms failed: {}", failed.join(", "))),
                    ..Default::default()
                })
            }
            Stage::Solve { owner, kind, horizon } => {
                let game = Game::new(
                    kind.unwrap_or(self.game.kind),
                    self.game.root,
                    horizon.unwrap_or(self.game.horizon),
                );
                let payoff = self.payoff(game.outcome_len())?;
                let owner = owner.unwrap_or(Player::I);
                let r = solve(space, game, &payoff, owner, self.budget)?;
                let out = StageOut {
                    result: format!("{:?} wins {:?} toward {}", r.winner, game.kind, r.target.name()),
                    nodes: r.nodes_expanded,
                    details: to_value(&r.summary()),
                    ..Default::default()
                };
                self.current = Some(Current::Unverified {
                    strategy: r.strategy,
                    target: r.target,
                });
                Ok(out)
            }
            Stage::Verify { trials } => {
                let cur = self
                    .current
                    .take()
                    .ok_or_else(|| Error::GameMismatch("verify needs a strategy; solve first".into()))?;
                let mode = match trials {
                    Some(trials) => VerificationMode::Sampled { seed, trials: *trials },
                    None => VerificationMode::Exhaustive,
                };
                let rep = verify_strategy(space, cur.strategy(), cur.target(), mode)?;
                let won = rep.all_won();
                let out = StageOut {
                    result: format!("{} of {} plays reach {}", rep.wins, rep.plays, rep.target),
                    nodes: rep.plays,
                    fraction: Some(rep.fraction),
                    details: to_value(&rep),
                    failure: (!won).then(|| format!("strategy reaches {} in {} of {} plays", rep.target, rep.wins, rep.plays)),
                    ..Default::default()
                };
                self.current = Some(match cur {
                    Current::Unverified { strategy, target } if won && trials.is_none() => {
                        Current::Verified(verify_exhaustive(space, strategy, &target)?)
                    }
                    other => other,
                });
                Ok(out)
            }
            Stage::Reduce(r) => self.reduce(r),
            Stage::Dichotomy { flavor, root } => {
                let len = match flavor {
                    DichotomyFlavor::Adversarial => 2 * self.game.horizon,
                    DichotomyFlavor::Strategic => self.game.horizon,
                };
                let payoff = self.payoff(len)?;
                let rep = check_ramsey_dichotomy(space, &payoff, root.unwrap_or(self.game.root), *flavor, self.budget)?;
                let first = rep.rows.iter().filter(|r| r.first.goal_won).count();
                let second = rep.rows.iter().filter(|r| r.second.goal_won).count();
                Ok(StageOut {
                    result: format!(
                        "{} of {} subspaces realize it ({first} first side, {second} second side)",
                        rep.realizing.len(),
                        rep.rows.len()
                    ),
                    nodes: rep.rows.iter().map(|r| r.first.nodes + r.second.nodes).sum(),
                    details: to_value(&rep),
                    ..Default::default()
                })
            }
            Stage::PigeonholeCheck { set, delta } => {
                let set = match set {
                    SetSpec::Counterexample { name } => counterexample_sets(space, *name)?
                        .set
                        .ok_or_else(|| Error::KindMismatch {
                            kind: name.name().into(),
                            reason: "has no single-point colouring set".into(),
                        })?,
                    SetSpec::Points { points } => points_in(space, points)?,
                };
                let mode = match delta {
                    Some(d) => PigeonholeMode::Approximate(parse_rat(d).map_err(Error::SpecInvalid)?),
                    None => PigeonholeMode::Exact,
                };
                let scan = pigeonhole_everywhere(space, &set, mode);
                let available = scan.iter().filter(|(_, r)| r.is_ok()).count();
                let verdict = if available == scan.len() {
                    "available_everywhere"
                } else if available == 0 {
                    "unavailable_everywhere"
                } else {
                    "partial"
                };
                let rows: Vec<Value> = scan
                    .iter()
                    .map(|(p, r)| match r {
                        Ok((side, q)) => json!({ "p": p, "side": side, "q": q }),
                        Err(Error::PigeonholeUnavailable { witnesses }) => {
                            json!({ "p": p, "split_witnesses": witnesses.len(), "first": witnesses.first() })
                        }
                        Err(e) => json!({ "p": p, "error": e.to_string() }),
                    })
                    .collect();
                Ok(StageOut {
                    result: format!("{verdict} ({available} of {} subspaces decide the set)", scan.len()),
                    details: json!({ "set_size": set.count_ones(..), "rows": rows }),
                    pigeonhole: Some(verdict.into()),
                    ..Default::default()
                })
            }
            Stage::Counterexample { kind } => self.counterexample(*kind),
        }
    }

    fn counterexample(&mut self, kind: CounterexampleKind) -> Result<StageOut> {
        let space = self.space;
        let ce = counterexample_sets(space, kind)?;
        match &ce.set {
            Some(set) => {
                let below = space.palette().below(self.game.root);
                let splitting = below
                    .iter()
                    .filter(|&&q| {
                        let adm = space.next_points(&[], q);
                        !adm.is_disjoint(set) && !adm.is_subset(set)
                    })
                    .count();
                Ok(StageOut {
                    result: if splitting == below.len() {
                        format!("every one of {} subspaces meets both the set and its complement", below.len())
                    } else {
                        format!("{splitting} of {} subspaces meet both sides", below.len())
                    },
                    nodes: below.len() as u64,
                    details: json!({
                        "kind": kind,
                        "set_size": set.count_ones(..),
                        "subspaces": below.len(),
                        "splitting": splitting,
                    }),
                    ..Default::default()
                })
            }
            None => {
                let game = Game::new(GameKind::F, self.game.root, 2);
                let r = solve(space, game, &ce.payoff, Player::I, self.budget)?;
                let scan = block_pair_scan(space, &ce.payoff, 2)?;
                Ok(StageOut {
                    result: format!(
                        "{:?} wins F at horizon 2; {} of {} subspaces with at least 2 blocks keep block pairs inside",
                        r.winner,
                        scan.inside.len(),
                        scan.checked
                    ),
                    nodes: r.nodes_expanded,
                    details: json!({
                        "kind": kind,
                        "payoff": ce.payoff.name(),
                        "winner": r.winner,
                        "scan": scan,
                        "note": "finite field proxy: |K*| >= dimension stands in for an infinite field",
                    }),
                    ..Default::default()
                })
            }
        }
    }

    fn reduce(&mut self, stage: &ReduceStage) -> Result<StageOut> {
        let space = self.space;
        let id = stage.name.id();
        let pal = space.palette();
        let h = self.game.horizon;
        let verified_out = |v: &VerifiedStrategy, details: Value| StageOut {
            result: describe(space, v),
            fraction: Some(1.0),
            details,
            ..Default::default()
        };
        match stage.name {
            Reduction::Kastanas => {
                let tau = self.verified(id)?;
                let out = adversarial_from_kastanas(space, tau)?;
                let res = verified_out(
                    &out.strategy,
                    json!({
                        "q": out.q,
                        "q_label": pal.subspace(out.q).label,
                        "chain": out.chain,
                        "rounds": out.rounds,
                        "sample_play": out.sample_play,
                    }),
                );
                self.current = Some(Current::Verified(out.strategy));
                Ok(res)
            }
            Reduction::TransferAToB => {
                let b = transfer_a_to_b(space, self.verified(id)?)?;
                let res = verified_out(&b, Value::Null);
                self.current = Some(Current::Verified(b));
                Ok(res)
            }
            Reduction::Gowers => {
                let g = gowers_from_asymptotic(space, self.verified(id)?)?;
                let res = verified_out(&g, Value::Null);
                self.current = Some(Current::Verified(g));
                Ok(res)
            }
            Reduction::Asymptotic => {
                let out = asymptotic_from_gowers(space, self.verified(id)?, self.budget)?;
                let res = verified_out(
                    &out.strategy,
                    json!({
                        "q": out.q,
                        "q_label": pal.subspace(out.q).label,
                        "chain": out.chain,
                        "sequences": out.sequences,
                    }),
                );
                self.current = Some(Current::Verified(out.strategy));
                Ok(res)
            }
            Reduction::Homogeneous => {
                let out = homogeneous_from_asymptotic(space, self.verified(id)?)?;
                Ok(StageOut {
                    result: format!(
                        "homogeneous set {:?}, {} subsequences checked",
                        out.set, out.subsequences_checked
                    ),
                    nodes: out.subsequences_checked,
                    fraction: Some(1.0),
                    details: to_value(&out),
                    ..Default::default()
                })
            }
            Reduction::ApproxAsymptotic => {
                let dense = self.dense(stage)?;
                let delta = self.delta(stage, h)?;
                let out = approx_asymptotic_from_gowers(space, self.verified(id)?, &dense, &delta, self.budget)?;
                let res = verified_out(
                    &out.strategy,
                    json!({
                        "q": out.q,
                        "q_label": pal.subspace(out.q).label,
                        "chain": out.chain,
                        "sequences": out.sequences.len(),
                    }),
                );
                self.current = Some(Current::Verified(out.strategy));
                Ok(res)
            }
            Reduction::StrongAsymptotic => {
                let tau = self.verified(id)?;
                let k = tau.game().horizon;
                let delta = self.delta(stage, k)?;
                let out = strong_asymptotic_from_asymptotic(space, tau, &delta, stage.horizon.unwrap_or(k), self.budget)?;
                let res = StageOut {
                    result: format!("I's SF strategy toward {}", out.target.name()),
                    details: json!({ "rounds": out.rounds }),
                    ..Default::default()
                };
                self.current = Some(Current::Unverified {
                    strategy: out.strategy,
                    target: out.target,
                });
                Ok(res)
            }
            Reduction::Tilde => {
                let x = self.payoff(h)?;
                let (tilde, tpay) = tilde_lift(space, &x);
                let a_game = Game::new(GameKind::A, self.game.root, h);
                let a = solve(&tilde, a_game, &tpay.complement(), Player::I, self.budget)?;
                let b_game = Game::new(GameKind::B, self.game.root, h);
                let b = solve(&tilde, b_game, &tpay, Player::II, self.budget)?;
                let nodes = a.nodes_expanded + b.nodes_expanded;
                let details = json!({ "a_side_won": a.goal_won(), "b_side_won": b.goal_won() });
                let projected = if a.goal_won() {
                    let v = verify_exhaustive(&tilde, a.strategy, &a.target)?;
                    Some(tilde_a_to_f(space, &v, &x)?)
                } else if b.goal_won() {
                    let v = verify_exhaustive(&tilde, b.strategy, &b.target)?;
                    Some(tilde_b_to_g(space, &tilde, &v, &x)?)
                } else {
                    None
                };
                Ok(match projected {
                    Some(v) => {
                        let mut res = verified_out(&v, details);
                        res.nodes = nodes;
                        self.current = Some(Current::Verified(v));
                        res
                    }
                    None => {
                        self.current = None;
                        StageOut {
                            result: "neither side wins in the lifted space".into(),
                            nodes,
                            details,
                            ..Default::default()
                        }
                    }
                })
            }
            Reduction::Unfold => {
                let x = self.payoff(h)?;
                let unfolded = unfold_space(space);
                let inner = x.clone();
                let decorated = Payoff::new(format!("{} with every bit set", x.name()), h, move |s| {
                    let bases: Vec<usize> = s.iter().map(|d| d / 2).collect();
                    s.iter().all(|d| d % 2 == 1) && inner.accepts(&bases)
                });
                let game = Game::new(GameKind::F, self.game.root, h);
                let r = solve(&unfolded, game, &decorated.complement(), Player::I, self.budget)?;
                if !r.goal_won() {
                    self.current = None;
                    return Ok(StageOut {
                        result: "I loses the unfolded game".into(),
                        nodes: r.nodes_expanded,
                        ..Default::default()
                    });
                }
                let tau = verify_exhaustive(&unfolded, r.strategy, &r.target)?;
                let (out, _) = unfold_asymptotic(space, &unfolded, &tau, &decorated)?;
                let mut res = verified_out(&out, Value::Null);
                res.nodes = r.nodes_expanded;
                self.current = Some(Current::Verified(out));
                Ok(res)
            }
            Reduction::Lift => {
                let dir = stage
                    .direction
                    .ok_or_else(|| Error::SpecInvalid("lift needs a direction".into()))?;
                let game = Game::new(dir.kind(), self.game.root, h);
                let len = game.outcome_len();
                let dense = self.dense(stage)?;
                let delta = self.delta(stage, len)?;
                let disc = discretize(space, &dense, &delta)?;
                let x = self.payoff(len)?;
                let xr = disc.restrict(&x);
                let aim = if dir.aims_at_payoff() { xr } else { xr.complement() };
                let r = solve(&disc.space, game, &aim, dir.owner(), self.budget)?;
                if !r.goal_won() {
                    self.current = None;
                    return Ok(StageOut {
                        result: format!("{:?} loses the discretized {:?} game", dir.owner(), dir.kind()),
                        nodes: r.nodes_expanded,
                        ..Default::default()
                    });
                }
                let v = verify_exhaustive(&disc.space, r.strategy, &r.target)?;
                let (lifted, target) = lift_strategy(space, &disc, &v, dir, &x)?;
                let res = StageOut {
                    result: format!("lifted {} strategy toward {}", to_value(&dir).as_str().unwrap_or("?"), target.name()),
                    nodes: r.nodes_expanded,
                    details: json!({ "dense_points": disc.parent.len(), "delta": delta }),
                    ..Default::default()
                };
                self.current = Some(Current::Unverified {
                    strategy: lifted,
                    target,
                });
                Ok(res)
            }
        }
    }
}

fn points_in(space: &SpaceInstance, points: &[usize]) -> Result<PointSet> {
    if let Some(&x) = points.iter().find(|&&x| x >= space.num_points()) {
        return Err(Error::SpecInvalid(format!("point {x} is outside the universe")));
    }
    Ok(point_set(space.num_points(), points.iter().copied()))
}

pub fn dense_set(space: &SpaceInstance, spec: &DenseSpec) -> Result<PointSet> {
    let n = space.num_points();
    match spec {
        DenseSpec::All => Ok(point_set(n, 0..n)),
        DenseSpec::Points { points } => points_in(space, points),
        DenseSpec::GridMultiple { step } => {
            let step = parse_rat(step).map_err(Error::SpecInvalid)?;
            let mut out = PointSet::with_capacity(n);
            for x in 0..n {
                let PointData::Real(v) = &space.point(x).data else {
                    return Err(Error::SpecInvalid("grid multiples need real coordinates".into()));
                };
                if v.iter().all(|c| (c / step).is_integer()) {
                    out.insert(x);
                }
            }
            Ok(out)
        }
    }
}

fn param<'a>(spec: &'a PayoffSpec, key: &str) -> Result<&'a Value> {
    spec.params
        .get(key)
        .ok_or_else(|| Error::SpecInvalid(format!("payoff {} needs parameter {key}", spec.name)))
}

fn param_usize(spec: &PayoffSpec, key: &str) -> Result<usize> {
    param(spec, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::SpecInvalid(format!("payoff parameter {key} must be a non-negative integer")))
}

fn param_str<'a>(spec: &'a PayoffSpec, key: &str) -> Result<&'a str> {
    param(spec, key)?
        .as_str()
        .ok_or_else(|| Error::SpecInvalid(format!("payoff parameter {key} must be a string")))
}

fn position(spec: &PayoffSpec, len: usize) -> Result<usize> {
    let i = param_usize(spec, "position")?;
    if i >= len {
        return Err(Error::SpecInvalid(format!(
            "payoff {} reads position {i} of outcomes of length {len}",
            spec.name
        )));
    }
    Ok(i)
}

/// Builds a named payoff on outcomes of length `len`. `seed` drives `random`.
pub fn build_payoff(space: &SpaceInstance, spec: &PayoffSpec, len: usize, seed: u64) -> Result<Payoff> {
    let n = space.num_points();
    let name = if spec.params.is_empty() {
        spec.name.clone()
    } else {
        format!("{}{}", spec.name, Value::Object(spec.params.clone()))
    };
    let payoff = match spec.name.as_str() {
        "everything" => Payoff::constant(len, true),
        "nothing" => Payoff::constant(len, false),
        "parity" => {
            let i = position(spec, len)?;
            let want = match param_str(spec, "parity")? {
                "even" => 0,
                "odd" => 1,
                other => return Err(Error::SpecInvalid(format!("parity must be even or odd, got {other}"))),
            };
            Payoff::new(name, len, move |s| s[i] % 2 == want)
        }
        "increasing" => Payoff::new(name, len, |s| s.windows(2).all(|w| w[0] < w[1])),
        "sum_at_least" => {
            let bound = param_usize(spec, "bound")?;
            Payoff::new(name, len, move |s| s.iter().sum::<usize>() >= bound)
        }
        "all_at_least" => {
            let bound = param_usize(spec, "bound")?;
            Payoff::new(name, len, move |s| s.iter().all(|&x| x >= bound))
        }
        "in_set" => {
            let i = position(spec, len)?;
            let points: Vec<usize> = serde_json::from_value(param(spec, "points")?.clone())
                .map_err(|e| Error::SpecInvalid(format!("in_set points: {e}")))?;
            let set = points_in(space, &points)?;
            Payoff::new(name, len, move |s| set.contains(s[i]))
        }
        "first_coordinate" => {
            let i = position(spec, len)?;
            let value = parse_rat(param_str(spec, "value")?).map_err(Error::SpecInvalid)?;
            let op = param_str(spec, "op")?;
            let cmp: fn(&Rat, &Rat) -> bool = match op {
                "eq" => |a, b| a == b,
                "ne" => |a, b| a != b,
                "lt" => |a, b| a < b,
                "le" => |a, b| a <= b,
                "gt" => |a, b| a > b,
                "ge" => |a, b| a >= b,
                other => return Err(Error::SpecInvalid(format!("unknown comparison {other}"))),
            };
            let table = (0..n)
                .map(|x| match &space.point(x).data {
                    PointData::Real(v) => Ok(cmp(&v[0], &value)),
                    PointData::Vector(v) => Ok(cmp(&Rat::from_integer(i64::from(v[0])), &value)),
                    _ => Err(Error::SpecInvalid("first_coordinate needs coordinates".into())),
                })
                .collect::<Result<Vec<bool>>>()?;
            Payoff::new(name, len, move |s| table[s[i]])
        }
        "counterexample" => {
            let kind: CounterexampleKind = serde_json::from_value(param(spec, "kind")?.clone())
                .map_err(|e| Error::SpecInvalid(format!("counterexample kind: {e}")))?;
            counterexample_sets(space, kind)?.payoff
        }
        "random" => {
            let density = parse_rat(param_str(spec, "density")?).map_err(Error::SpecInvalid)?;
            if density < Rat::from_integer(0) || density > Rat::from_integer(1) {
                return Err(Error::SpecInvalid(format!("density {} is not in [0, 1]", format_rat(&density))));
            }
            let total = (n as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
            if total > RANDOM_PAYOFF_LIMIT {
                return Err(Error::SpecInvalid(format!("random payoff over {total} sequences is too large")));
            }
            random_payoff(name, n, len, density, seed)
        }
        other => return Err(Error::SpecInvalid(format!("unknown payoff {other}"))),
    };
    if payoff.len() != len {
        return Err(Error::GameMismatch(format!(
            "payoff {} has length {}, the game's outcomes have length {len}",
            payoff.name(),
            payoff.len()
        )));
    }
    Ok(payoff)
}

/// Accepts each sequence over `0..alphabet` independently with probability
/// `density`, in lexicographic order of sequences.
pub fn random_payoff(name: impl Into<String>, alphabet: usize, len: usize, density: Rat, seed: u64) -> Payoff {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (num, den) = (*density.numer() as u64, *density.denom() as u64);
    let mut accepted = std::collections::HashSet::new();
    for_each_sequence(alphabet, len, |s| {
        if rng.gen_range(0..den) < num {
            accepted.insert(s.to_vec());
        }
    });
    Payoff::from_set(name, len, accepted)
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => render_table(report),
    }
}

fn render_table(report: &Report) -> String {
    let header = ["stage", "result", "nodes", "exhausted", "verified-fraction"];
    let fraction = |f: Option<f64>| f.map_or_else(|| "-".into(), |f| format!("{f:.4}"));
    let mut rows: Vec<[String; 5]> = Vec::new();
    for s in &report.stages {
        let per_q = s.details.get("rows").and_then(Value::as_array).filter(|_| s.op == "dichotomy");
        match per_q {
            // One row per palette subspace.
            Some(qs) => {
                for q in qs {
                    let side = |k: &str| q[k]["goal_won"].as_bool().unwrap_or(false);
                    let nodes = q["first"]["nodes"].as_u64().unwrap_or(0) + q["second"]["nodes"].as_u64().unwrap_or(0);
                    let result = match (side("first"), side("second")) {
                        (true, true) => "both sides",
                        (true, false) => "first side",
                        (false, true) => "second side",
                        (false, false) => "neither",
                    };
                    rows.push([
                        format!("{} dichotomy {}", s.index, q["label"].as_str().unwrap_or("?")),
                        result.into(),
                        nodes.to_string(),
                        s.exhausted.to_string(),
                        fraction(s.verified_fraction),
                    ]);
                }
            }
            None => rows.push([
                format!("{} {}", s.index, s.op),
                s.result.clone(),
                s.nodes.to_string(),
                s.exhausted.to_string(),
                fraction(s.verified_fraction),
            ]),
        }
    }
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} (seed {})", report.scenario, report.seed);
    if let Some(i) = &report.instance {
        let _ = writeln!(out, "instance {}: {} points, {} subspaces", i.name, i.points, i.subspaces);
    }
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(&header.map(String::from)));
    let _ = writeln!(out, "{}", line(&widths.map(|w| "-".repeat(w))));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r));
    }
    if let Some(p) = &report.pigeonhole {
        let _ = writeln!(out, "pigeonhole: {p}");
    }
    let _ = write!(out, "status: {:?} (exit {})", report.status, report.exit_code);
    if let Some(d) = &report.diagnostic {
        let _ = write!(out, "\n{} at {}: {}", d.code, d.stage_id, d.message);
    }
    out.push('\n');
    out
}

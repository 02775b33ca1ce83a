use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{expanded_payoff, DeltaSeq};
use crate::error::{Error, Result};
use crate::games::{GameKind, GamePosition, Move, MoveRecord, Player};
use crate::payoff::Payoff;
use crate::rat::format_rat;
use crate::space::{Admission, PointId, PointSet, SpaceInstance};
use crate::strategy::{Strategy, VerifiedStrategy};

/// A space over a dense subset `D` whose `n`-th point may be anything within
/// `Δ_n` (strictly) of an admitted point.
#[derive(Clone, Debug)]
pub struct Discretized {
    pub space: SpaceInstance,
    /// `parent[i]` is the original point behind point `i` of `space`.
    pub parent: Arc<Vec<PointId>>,
    pub delta: DeltaSeq,
}

impl Discretized {
    /// Reads a payoff on the original points as one on `D`.
    pub fn restrict(&self, payoff: &Payoff) -> Payoff {
        payoff.pull_back(self.parent.clone())
    }

    fn child_of(&self, x: PointId) -> Option<usize> {
        self.parent.iter().position(|&p| p == x)
    }
}

pub fn discretize(space: &SpaceInstance, dense: &PointSet, delta: &DeltaSeq) -> Result<Discretized> {
    space.metric().ok_or(Error::NoMetric)?;
    let parent: Vec<PointId> = dense.ones().filter(|&x| x < space.num_points()).collect();
    if parent.is_empty() {
        return Err(Error::SpecInvalid("dense subset is empty".into()));
    }
    let min = delta
        .min()
        .ok_or_else(|| Error::SpecInvalid("delta sequence is empty".into()))?;
    let radius = min / 2;
    for x in 0..space.num_points() {
        let near = parent.iter().any(|&y| space.distance(x, y).is_some_and(|d| d <= radius));
        if !near {
            return Err(Error::NotDense {
                point: x,
                radius: format_rat(&radius),
            });
        }
    }
    let palette = space.palette();
    let tables = (0..delta.len())
        .map(|n| {
            (0..palette.len())
                .map(|p| {
                    let admitted = space.next_points(&[], p);
                    let mut row = PointSet::with_capacity(parent.len());
                    for (i, &y) in parent.iter().enumerate() {
                        if admitted
                            .ones()
                            .any(|x| space.distance(x, y).is_some_and(|d| d < delta.get(n)))
                        {
                            row.insert(i);
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    let points = parent.iter().map(|&x| space.point(x).clone()).collect();
    let disc = space.derived("discretized", points, Admission::LengthIndexed { tables }, space.metric());
    Ok(Discretized {
        space: disc,
        parent: Arc::new(parent),
        delta: delta.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftDirection {
    /// I in `F`, toward the complement of the payoff.
    #[serde(rename = "F-I")]
    FI,
    /// II in `G`, toward the payoff.
    #[serde(rename = "G-II")]
    GII,
    /// I in `A`, toward the payoff.
    #[serde(rename = "A-I")]
    AI,
    /// II in `B`, toward the complement of the payoff.
    #[serde(rename = "B-II")]
    BII,
}

impl LiftDirection {
    pub fn kind(self) -> GameKind {
        match self {
            LiftDirection::FI => GameKind::F,
            LiftDirection::GII => GameKind::G,
            LiftDirection::AI => GameKind::A,
            LiftDirection::BII => GameKind::B,
        }
    }

    pub fn owner(self) -> Player {
        match self {
            LiftDirection::FI | LiftDirection::AI => Player::I,
            LiftDirection::GII | LiftDirection::BII => Player::II,
        }
    }

    /// Whether the owner aims at the payoff itself rather than its complement.
    pub fn aims_at_payoff(self) -> bool {
        matches!(self, LiftDirection::GII | LiftDirection::AI)
    }
}

/// Lifts a verified strategy of the discretized game to the original space.
/// `payoff` is the set `X` over original points; the input strategy must have
/// been verified toward `X` (or `Xᶜ`, by direction) restricted to `D`. Returns
/// the lifted strategy and the expanded target it should reach.
pub fn lift_strategy(
    space: &SpaceInstance,
    disc: &Discretized,
    strat: &VerifiedStrategy,
    direction: LiftDirection,
    payoff: &Payoff,
) -> Result<(Strategy, Payoff)> {
    let game = strat.game();
    if game.kind != direction.kind() || strat.owner() != direction.owner() {
        return Err(Error::GameMismatch(format!(
            "{direction:?} lifts need player {:?} in a {:?} game",
            direction.owner(),
            direction.kind()
        )));
    }
    if disc.delta.len() != game.outcome_len() {
        return Err(Error::GameMismatch("delta must have one entry per outcome position".into()));
    }
    let aim = if direction.aims_at_payoff() {
        payoff.clone()
    } else {
        payoff.complement()
    };
    if strat.target().name() != aim.name() {
        return Err(Error::GameMismatch(format!(
            "strategy was verified toward {:?}, expected {:?}",
            strat.target().name(),
            aim.name()
        )));
    }
    let owner = strat.owner();
    let inner = strat.strategy();
    let lifted = Strategy::from_fn(space, owner, game, |pos| {
        // Replay the original play in the discretized game.
        let mut sim: Vec<MoveRecord> = Vec::new();
        let mut sim_points: Vec<usize> = Vec::new();
        for m in &pos.moves {
            let mv = if m.player == owner {
                inner
                    .get(&sim)
                    .ok_or_else(|| Error::StrategyIncomplete(format!("discretized history {}", serde_json::to_string(&sim).unwrap())))?
                    .mv
            } else {
                match m.mv {
                    Move::Sub { .. } => m.mv,
                    Move::Point { point } => Move::Point {
                        point: round_into(space, disc, point, sim_points.len())?,
                    },
                    Move::PointSub { point, sub } => Move::PointSub {
                        point: round_into(space, disc, point, sim_points.len())?,
                        sub,
                    },
                    Move::Set { .. } => return Err(Error::GameMismatch("no sets in lifted games".into())),
                }
            };
            if let Some(y) = mv.point() {
                sim_points.push(y);
            }
            sim.push(MoveRecord { player: m.player, mv });
        }
        let answer = inner
            .get(&sim)
            .ok_or_else(|| Error::StrategyIncomplete(format!("discretized history {}", serde_json::to_string(&sim).unwrap())))?
            .mv;
        Ok(match answer {
            Move::Sub { .. } => answer,
            Move::Point { point } => Move::Point {
                point: lift_point(space, disc, pos, point)?,
            },
            Move::PointSub { point, sub } => Move::PointSub {
                point: lift_point(space, disc, pos, point)?,
                sub,
            },
            Move::Set { .. } => return Err(Error::GameMismatch("no sets in lifted games".into())),
        })
    })?;
    let target = expanded_payoff(space, &aim, &disc.delta, false)?;
    Ok((lifted, target))
}

/// The first point of `D` strictly within `Δ_n` of `x`.
fn round_into(space: &SpaceInstance, disc: &Discretized, x: PointId, n: usize) -> Result<usize> {
    let bound = disc.delta.get(n);
    disc.parent
        .iter()
        .position(|&y| space.distance(x, y).is_some_and(|d| d < bound))
        .ok_or_else(|| Error::exhaustion("lift", format!("no point of D within {} of point {x}", format_rat(&bound))))
}

/// The first admitted original point strictly within `Δ_n` of `D`-point `y`.
fn lift_point(space: &SpaceInstance, disc: &Discretized, pos: &GamePosition, y: usize) -> Result<PointId> {
    let n = pos.outcome_prefix.len();
    let bound = disc.delta.get(n);
    let prev = pos
        .moves
        .last()
        .and_then(|m| m.mv.sub())
        .ok_or_else(|| Error::Invariant("point move without a preceding subspace".into()))?;
    let target = disc.parent[y];
    let admitted = space.next_points(&pos.outcome_prefix, prev);
    if admitted.contains(target) && disc.child_of(target) == Some(y) {
        return Ok(target);
    }
    admitted
        .ones()
        .find(|&x| space.distance(x, target).is_some_and(|d| d < bound))
        .ok_or_else(|| Error::exhaustion("lift", format!("no admitted point within {} of point {target}", format_rat(&bound))))
}

//! Strategy transformations. Each one takes a verified winning strategy,
//! replays the matching construction move by move, and verifies its output.

mod asymptotic;
mod dichotomy;
mod gowers;
mod homogeneous;
mod kastanas;
mod tilde;
mod unfold;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{GameKind, Move, MoveRecord, Player};
use crate::space::{PointId, PointSet, SpaceInstance, SubspaceId};
use crate::strategy::{Strategy, VerifiedStrategy};

pub(crate) use asymptotic::{build_chain, ChainSpec};
pub use asymptotic::{asymptotic_from_gowers, reachable_set, AsymptoticOutput, SequenceState};
pub use dichotomy::{check_ramsey_dichotomy, DichotomyFlavor, DichotomyReport, DichotomyRow, GameVerdict};
pub use gowers::gowers_from_asymptotic;
pub use homogeneous::{homogeneous_from_asymptotic, homogeneous_from_thresholds, HomogeneousOutput};
pub use kastanas::{
    adversarial_from_kastanas, diagonalize_states, transfer_a_to_b, Diagonal, DiagonalRound, DiagonalWitness,
    FictiveRound, KastanasOutput,
};
pub use tilde::{tilde_a_to_f, tilde_b_to_g, tilde_lift, tilde_payoff};
pub use unfold::{projected_payoff, unfold_asymptotic, unfold_space};

/// A partial play in which the strategy owner always followed the strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateRecord {
    pub play: Vec<MoveRecord>,
    /// Point pairs realized (Kastanas) or points realized (Gowers).
    pub rank: usize,
    pub realized: Vec<PointId>,
}

impl StateRecord {
    pub fn new(kind: GameKind, play: Vec<MoveRecord>) -> Self {
        let realized: Vec<PointId> = play.iter().filter_map(|m| m.mv.point()).collect();
        let rank = if kind.is_adversarial() {
            realized.len() / 2
        } else {
            realized.len()
        };
        StateRecord { play, rank, realized }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReachableSet {
    pub state: StateRecord,
    #[serde(serialize_with = "serialize_points")]
    pub points: PointSet,
}

pub(crate) fn serialize_points<S: serde::Serializer>(set: &PointSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(set.ones())
}

/// Checks that a verified strategy belongs to `owner` in a `kind` game.
pub(crate) fn require(strat: &VerifiedStrategy, kind: GameKind, owner: Player) -> Result<()> {
    if strat.game().kind != kind || strat.owner() != owner {
        return Err(Error::GameMismatch(format!(
            "needs player {owner:?}'s strategy in a {kind:?} game, got player {:?} in {:?}",
            strat.owner(),
            strat.game().kind
        )));
    }
    Ok(())
}

/// I's subspace in an `F` game after II has played `seq`, or `None` when
/// `seq` is not a legal answer sequence or the game is already over.
pub fn tau_of_sequence(space: &SpaceInstance, tau: &Strategy, seq: &[PointId]) -> Result<Option<SubspaceId>> {
    if tau.game.kind != GameKind::F || tau.owner != Player::I {
        return Err(Error::GameMismatch("needs player I's strategy in an asymptotic game".into()));
    }
    if seq.len() >= tau.game.horizon {
        return Ok(None);
    }
    let mut history: Vec<MoveRecord> = Vec::with_capacity(2 * seq.len() + 1);
    for (i, &x) in seq.iter().enumerate() {
        let Some(p) = tau.get(&history).and_then(|m| m.mv.sub()) else {
            return Err(Error::StrategyIncomplete(serde_json::to_string(&history).unwrap()));
        };
        if !space.next_points(&seq[..i], p).contains(x) {
            return Ok(None);
        }
        history.push(MoveRecord {
            player: Player::I,
            mv: Move::Sub { sub: p },
        });
        history.push(MoveRecord {
            player: Player::II,
            mv: Move::Point { point: x },
        });
    }
    tau.get(&history)
        .and_then(|m| m.mv.sub())
        .map(Some)
        .ok_or_else(|| Error::StrategyIncomplete(serde_json::to_string(&history).unwrap()))
}

/// The meet witness of `p` and `q`, or an exhaustion naming the stage.
pub(crate) fn meet_or_exhaust(space: &SpaceInstance, p: SubspaceId, q: SubspaceId, stage: &str) -> Result<SubspaceId> {
    space.meet_witness(p, q).ok_or_else(|| {
        let pal = space.palette();
        Error::exhaustion(
            stage,
            format!(
                "no meet witness for {} and {}",
                pal.subspace(p).label,
                pal.subspace(q).label
            ),
        )
    })
}

fn rec(player: Player, mv: Move) -> MoveRecord {
    MoveRecord { player, mv }
}

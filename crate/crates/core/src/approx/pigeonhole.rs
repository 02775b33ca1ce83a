use super::{expand_point_set, expanded_payoff, DeltaSeq};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, Player};
use crate::instances::PigeonholeMode;
use crate::payoff::Payoff;
use crate::rat::format_rat;
use crate::reductions::{build_chain, require, ChainSpec, SequenceState};
use crate::space::{PointId, PointSet, SpaceInstance, SubspaceId};
use crate::strategy::{verify_exhaustive, Strategy, VerifiedStrategy};

#[derive(Clone, Debug)]
pub struct ApproxAsymptoticOutput {
    pub q: SubspaceId,
    /// I's strategy in `F_q`, verified toward `target`.
    pub strategy: VerifiedStrategy,
    /// `(X)_{3Δ}`.
    pub target: Payoff,
    pub chain: Vec<SubspaceId>,
    pub sequences: Vec<SequenceState>,
}

/// The first point of `dense` within `radius` of `x`.
fn round(space: &SpaceInstance, dense: &[PointId], x: PointId, radius: crate::rat::Rat) -> Option<PointId> {
    dense
        .iter()
        .copied()
        .find(|&y| space.distance(x, y).is_some_and(|d| d <= radius))
}

/// From II's strategy in `G_p` toward `X`, finds `q <= p` and I's strategy in
/// `F_q` toward `(X)_{3Δ}`. Sequences are enumerated over `dense`, and a
/// letter is realised by any reachable point within `2Δ` of it.
pub fn approx_asymptotic_from_gowers(
    space: &SpaceInstance,
    sigma: &VerifiedStrategy,
    dense: &PointSet,
    delta: &DeltaSeq,
    budget: u64,
) -> Result<ApproxAsymptoticOutput> {
    require(sigma, GameKind::G, Player::II)?;
    space.metric().ok_or(Error::NoMetric)?;
    let g = sigma.game();
    if delta.len() != g.horizon {
        return Err(Error::GameMismatch("delta must have one entry per outcome position".into()));
    }
    let dense: Vec<PointId> = dense.ones().filter(|&x| x < space.num_points()).collect();
    if let Some(min) = delta.min() {
        if let Some(x) = (0..space.num_points()).find(|&x| round(space, &dense, x, min).is_none()) {
            return Err(Error::NotDense {
                point: x,
                radius: format_rat(&min),
            });
        }
    }
    let spec = ChainSpec {
        alphabet: dense.clone(),
        stand_in: Box::new(|len, y, reachable| {
            let radius = delta.get(len) * 2;
            reachable
                .ones()
                .find(|&z| space.distance(y, z).is_some_and(|d| d <= radius))
        }),
        fact_target: Box::new(|len, reachable| expand_point_set(space, reachable, delta.get(len))),
        mode: Box::new(|len| PigeonholeMode::Approximate(delta.get(len))),
        stage: "approx_asymptotic_from_gowers",
        budget,
    };
    let run = build_chain(space, sigma.strategy(), &spec)?;
    let game = Game::new(GameKind::F, run.q, g.horizon);
    let strat = Strategy::from_fn(space, Player::I, game, |pos| {
        let letters = pos
            .outcome_prefix
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                round(space, &dense, x, delta.get(i))
                    .ok_or_else(|| Error::Invariant(format!("point {x} has no dense neighbour")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Move::Sub {
            sub: run.move_after(space, &letters, "approx_asymptotic_from_gowers")?,
        })
    })?;
    let target = expanded_payoff(space, sigma.target(), &delta.tripled(), false)?;
    let strategy = verify_exhaustive(space, strat, &target)?;
    Ok(ApproxAsymptoticOutput {
        q: run.q,
        strategy,
        target,
        chain: run.chain,
        sequences: run.sequences,
    })
}

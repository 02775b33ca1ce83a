use std::collections::BTreeMap;

use serde::Serialize;

use super::system::{block_sequence_payoff, for_each_block_partition};
use super::{expanded_payoff, DeltaSeq, Net};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, Player};
use crate::payoff::Payoff;
use crate::reductions::tau_of_sequence;
use crate::space::{PointId, SpaceInstance, SubspaceId};
use crate::strategy::{Strategy, VerifiedStrategy};

#[derive(Clone, Debug, Serialize)]
pub struct StrongRound {
    /// Precompact sets played so far.
    pub sets: Vec<usize>,
    pub subspace: SubspaceId,
    /// Size of the set of net block sequences the subspace had to respect.
    pub sequences: usize,
}

#[derive(Clone, Debug)]
pub struct StrongAsymptoticOutput {
    pub strategy: Strategy,
    /// Every length-`k` block sequence of the outcome lies in `(X)_Δ`.
    pub target: Payoff,
    pub rounds: Vec<StrongRound>,
}

/// Turns I's winning strategy in `F_p` toward `X` into one in `SF_p` (of the
/// given horizon) building sets whose block sequences lie in `(X)_Δ`.
/// Spaces without a metric use the discrete one.
pub fn strong_asymptotic_from_asymptotic(
    space: &SpaceInstance,
    tau: &VerifiedStrategy,
    delta: &DeltaSeq,
    horizon: usize,
    budget: u64,
) -> Result<StrongAsymptoticOutput> {
    let f_game = tau.game();
    if f_game.kind != GameKind::F || tau.owner() != Player::I {
        return Err(Error::GameMismatch("needs player I's strategy in an asymptotic game".into()));
    }
    let system = space
        .system()
        .ok_or_else(|| Error::GameMismatch("needs a precompact system".into()))?
        .clone();
    let k = f_game.horizon;
    if delta.len() != k {
        return Err(Error::GameMismatch("delta must have one entry per outcome position".into()));
    }
    let root = f_game.root;
    let pal = space.palette();
    let nets: Vec<Vec<Vec<PointId>>> = (0..k)
        .map(|i| {
            (0..system.len())
                .map(|s| Net::greedy(space, system.set(s), delta.get(i)).members)
                .collect()
        })
        .collect();

    let mut memo: BTreeMap<Vec<usize>, SubspaceId> = BTreeMap::new();
    let mut rounds = Vec::new();
    let mut subspace_for = |ks: &[usize]| -> Result<SubspaceId> {
        if let Some(&p) = memo.get(ks) {
            return Ok(p);
        }
        let j = ks.len();
        let mut items: Vec<SubspaceId> = Vec::new();
        let mut seqs = 0u64;
        for len in 0..=j.min(k.saturating_sub(1)) {
            let mut tuples = Vec::new();
            for_each_block_partition(j, len, |blocks| {
                tuples.push(
                    blocks
                        .iter()
                        .map(|b| system.sum(&b.iter().map(|&i| ks[i]).collect::<Vec<_>>()))
                        .collect::<Vec<_>>(),
                );
            });
            for tuple in tuples {
                let mut acc = Vec::with_capacity(len);
                let mut stop = None;
                net_product(&nets, &tuple, &mut acc, &mut |s| {
                    seqs += 1;
                    if seqs > budget {
                        stop = Some(Error::ExhaustionBudget { budget });
                        return false;
                    }
                    match tau_of_sequence(space, tau.strategy(), s) {
                        Ok(Some(q)) => items.push(q),
                        Ok(None) => {}
                        Err(e) => {
                            stop = Some(e);
                            return false;
                        }
                    }
                    true
                });
                if let Some(e) = stop {
                    return Err(e);
                }
            }
        }
        items.sort_unstable();
        items.dedup();
        if j > 0 {
            let (prev_ks, _) = ks.split_at(j - 1);
            let prev = *memo
                .get(prev_ks)
                .ok_or_else(|| Error::Invariant("previous round was not computed".into()))?;
            items.insert(0, prev);
        }
        let p = pal
            .lessapprox_lower_bound(&items)
            .filter(|&p| pal.lessapprox(p, root))
            .ok_or_else(|| {
                Error::exhaustion(
                    "strong_asymptotic",
                    format!("no common ⪅-lower bound for {} subspaces in round {j}", items.len()),
                )
            })?;
        memo.insert(ks.to_vec(), p);
        rounds.push(StrongRound {
            sets: ks.to_vec(),
            subspace: p,
            sequences: seqs as usize,
        });
        Ok(p)
    };

    let game = Game::new(GameKind::SF, root, horizon);
    let strategy = Strategy::from_fn(space, Player::I, game, |pos| {
        let ks = &pos.outcome_prefix;
        for j in 0..=ks.len() {
            subspace_for(&ks[..j])?;
        }
        Ok(Move::Sub {
            sub: subspace_for(ks)?,
        })
    })?;
    let expanded = expanded_payoff(space, tau.target(), delta, true)?;
    let target = block_sequence_payoff(&system, &expanded, horizon);
    rounds.sort_by(|a, b| a.sets.cmp(&b.sets));
    Ok(StrongAsymptoticOutput {
        strategy,
        target,
        rounds,
    })
}

fn net_product(nets: &[Vec<Vec<PointId>>], tuple: &[usize], acc: &mut Vec<PointId>, f: &mut dyn FnMut(&[PointId]) -> bool) -> bool {
    let i = acc.len();
    if i == tuple.len() {
        return f(acc);
    }
    for &y in &nets[i][tuple[i]] {
        acc.push(y);
        let go_on = net_product(nets, tuple, acc, f);
        acc.pop();
        if !go_on {
            return false;
        }
    }
    true
}

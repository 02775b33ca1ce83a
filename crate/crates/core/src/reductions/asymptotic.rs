use std::collections::HashMap;

use serde::Serialize;

use super::{meet_or_exhaust, rec, require, serialize_points, ReachableSet, StateRecord};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, MoveRecord, Player};
use crate::instances::{pigeonhole, PigeonholeMode, Side};
use crate::space::{PointId, PointSet, SpaceInstance, SubspaceId};
use crate::strategy::{verify_exhaustive, Strategy, VerifiedStrategy};

/// For each point II's strategy can answer after `play`, the first `r <= root`
/// that draws it.
fn reach(space: &SpaceInstance, sigma: &Strategy, play: &[MoveRecord], realized: &[PointId]) -> Result<Vec<(PointId, SubspaceId)>> {
    let mut first: Vec<Option<SubspaceId>> = vec![None; space.num_points()];
    let mut hist = play.to_vec();
    for r in space.palette().below(sigma.game.root) {
        hist.push(rec(Player::I, Move::Sub { sub: r }));
        match sigma.get(&hist) {
            Some(m) => {
                let x = m
                    .mv
                    .point()
                    .ok_or_else(|| Error::Invariant("II's answer lacks a point".into()))?;
                first[x].get_or_insert(r);
            }
            None if space.next_points(realized, r).is_clear() => {}
            None => return Err(Error::StrategyIncomplete(serde_json::to_string(&hist).unwrap())),
        }
        hist.pop();
    }
    Ok(first
        .into_iter()
        .enumerate()
        .filter_map(|(x, r)| r.map(|r| (x, r)))
        .collect())
}

/// Points II's Gowers-game strategy can be made to answer after `state`.
pub fn reachable_set(space: &SpaceInstance, state: &StateRecord, sigma: &Strategy) -> Result<ReachableSet> {
    let hits = reach(space, sigma, &state.play, &state.realized)?;
    let mut points = PointSet::with_capacity(space.num_points());
    for (x, _) in hits {
        points.insert(x);
    }
    Ok(ReachableSet {
        state: state.clone(),
        points,
    })
}

/// One entry of the enumeration of short sequences.
#[derive(Clone, Debug, Serialize)]
pub struct SequenceState {
    pub sequence: Vec<PointId>,
    pub state: Option<StateRecord>,
    #[serde(serialize_with = "serialize_points")]
    pub reachable: PointSet,
    /// The chain element chosen after this sequence.
    pub next: SubspaceId,
}

#[derive(Clone, Debug)]
pub struct AsymptoticOutput {
    pub q: SubspaceId,
    /// I's strategy in `F_q`.
    pub strategy: VerifiedStrategy,
    pub chain: Vec<SubspaceId>,
    pub sequences: Vec<SequenceState>,
}

pub(crate) struct ChainSpec<'a> {
    pub alphabet: Vec<PointId>,
    /// The reachable point that stands for letter `y` after `len` letters.
    pub stand_in: Box<dyn Fn(usize, PointId, &PointSet) -> Option<PointId> + 'a>,
    /// What every admitted point of the next chain element must lie in.
    pub fact_target: Box<dyn Fn(usize, &PointSet) -> Result<PointSet> + 'a>,
    pub mode: Box<dyn Fn(usize) -> PigeonholeMode + 'a>,
    pub stage: &'static str,
    pub budget: u64,
}

pub(crate) struct ChainRun {
    pub sequences: Vec<SequenceState>,
    pub index: HashMap<Vec<PointId>, usize>,
    pub chain: Vec<SubspaceId>,
    pub q: SubspaceId,
}

impl ChainRun {
    /// The subspace I plays once II's answers read as `letters`.
    pub fn move_after(&self, space: &SpaceInstance, letters: &[PointId], stage: &str) -> Result<SubspaceId> {
        let n = *self
            .index
            .get(letters)
            .ok_or_else(|| Error::Invariant(format!("sequence {letters:?} is not enumerated")))?;
        if self.sequences[n].state.is_none() {
            return Err(Error::Invariant(format!("no state realises {letters:?}")));
        }
        meet_or_exhaust(space, self.q, self.chain[n + 1], stage)
    }
}

fn sequences_up_to(alphabet: &[PointId], max_len: usize, budget: u64) -> Result<Vec<Vec<PointId>>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &y in alphabet {
                let mut t: Vec<PointId> = s.clone();
                t.push(y);
                next.push(t);
            }
        }
        if (out.len() + next.len()) as u64 > budget {
            return Err(Error::ExhaustionBudget { budget });
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

pub(crate) fn build_chain(space: &SpaceInstance, sigma: &Strategy, spec: &ChainSpec) -> Result<ChainRun> {
    let pal = space.palette();
    let root = sigma.game.root;
    let horizon = sigma.game.horizon;
    let seqs = sequences_up_to(&spec.alphabet, horizon.saturating_sub(1), spec.budget)?;
    let index: HashMap<Vec<PointId>, usize> = seqs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut states: Vec<Option<StateRecord>> = Vec::with_capacity(seqs.len());
    let mut reach_maps: Vec<Vec<(PointId, SubspaceId)>> = Vec::with_capacity(seqs.len());
    let mut sequences = Vec::with_capacity(seqs.len());
    let mut chain = vec![root];
    for (n, s) in seqs.iter().enumerate() {
        let state = match s.split_last() {
            None => Some(StateRecord::new(GameKind::G, Vec::new())),
            Some((&y, prefix)) => {
                let m = index[prefix];
                match &states[m] {
                    None => None,
                    Some(parent) => {
                        let mut reachable = PointSet::with_capacity(space.num_points());
                        for &(x, _) in &reach_maps[m] {
                            reachable.insert(x);
                        }
                        (spec.stand_in)(prefix.len(), y, &reachable).map(|z| {
                            let r = reach_maps[m].iter().find(|&&(x, _)| x == z).unwrap().1;
                            let mut play = parent.play.clone();
                            play.push(rec(Player::I, Move::Sub { sub: r }));
                            play.push(rec(Player::II, Move::Point { point: z }));
                            StateRecord::new(GameKind::G, play)
                        })
                    }
                }
            }
        };
        let cur = *chain.last().unwrap();
        let (hits, next) = match &state {
            None => (Vec::new(), cur),
            Some(st) => {
                let hits = reach(space, sigma, &st.play, &st.realized)?;
                let mut a = PointSet::with_capacity(space.num_points());
                for &(x, _) in &hits {
                    a.insert(x);
                }
                let target = (spec.fact_target)(s.len(), &a)?;
                let found = pal
                    .below(cur)
                    .into_iter()
                    .filter(|&r| space.next_points(&st.realized, r).is_subset(&target))
                    .max_by_key(|&r| (pal.members(r).count_ones(..), std::cmp::Reverse(r)));
                match found {
                    Some(r) => (hits, r),
                    None => return Err(fact_failure(space, cur, root, st, &a, (spec.mode)(s.len()), spec.stage, n)),
                }
            }
        };
        let mut reachable = PointSet::with_capacity(space.num_points());
        for &(x, _) in &hits {
            reachable.insert(x);
        }
        sequences.push(SequenceState {
            sequence: s.clone(),
            state: state.clone(),
            reachable,
            next,
        });
        states.push(state);
        reach_maps.push(hits);
        chain.push(next);
    }
    let q = if chain.iter().all(|&c| c == root) {
        root
    } else {
        pal.fusion_witness(&chain).map_err(|e| match e {
            Error::FiniteExhaustion { stage, detail } => Error::FiniteExhaustion {
                stage: format!("{}: {stage}", spec.stage),
                detail,
            },
            other => other,
        })?
    };
    Ok(ChainRun {
        sequences,
        index,
        chain,
        q,
    })
}

/// Explains why no chain element could be found.
#[allow(clippy::too_many_arguments)]
fn fact_failure(
    space: &SpaceInstance,
    cur: SubspaceId,
    root: SubspaceId,
    st: &StateRecord,
    reachable: &PointSet,
    mode: PigeonholeMode,
    stage: &str,
    n: usize,
) -> Error {
    match pigeonhole(space, cur, &st.realized, reachable, mode) {
        Ok((Side::Outside, r)) => Error::Invariant(format!(
            "subspace {r} avoids every point the strategy reaches after {:?}",
            st.realized
        )),
        Ok((Side::Inside, r)) => Error::Invariant(format!("pigeonhole found {r} but the chain search did not")),
        Err(e @ Error::PigeonholeUnavailable { .. }) if cur == root => e,
        Err(Error::PigeonholeUnavailable { witnesses }) => Error::exhaustion(
            stage,
            format!(
                "sequence {n} ({:?}): no subspace below {} decides the reachable set ({} split witnesses)",
                st.realized,
                space.palette().subspace(cur).label,
                witnesses.len()
            ),
        ),
        Err(e) => e,
    }
}

/// From II's strategy in `G_p` toward `X`, finds `q <= p` and I's strategy in
/// `F_q` toward `X`, using the pigeonhole principle at every state.
pub fn asymptotic_from_gowers(space: &SpaceInstance, sigma: &VerifiedStrategy, budget: u64) -> Result<AsymptoticOutput> {
    require(sigma, GameKind::G, Player::II)?;
    let spec = ChainSpec {
        alphabet: (0..space.num_points()).collect(),
        stand_in: Box::new(|_, y, reachable| reachable.contains(y).then_some(y)),
        fact_target: Box::new(|_, reachable| Ok(reachable.clone())),
        mode: Box::new(|_| PigeonholeMode::Exact),
        stage: "asymptotic_from_gowers",
        budget,
    };
    let run = build_chain(space, sigma.strategy(), &spec)?;
    let g = sigma.game();
    let game = Game::new(GameKind::F, run.q, g.horizon);
    let strat = Strategy::from_fn(space, Player::I, game, |pos| {
        Ok(Move::Sub {
            sub: run.move_after(space, &pos.outcome_prefix, "asymptotic_from_gowers")?,
        })
    })?;
    let strategy = verify_exhaustive(space, strat, sigma.target())?;
    Ok(AsymptoticOutput {
        q: run.q,
        strategy,
        chain: run.chain,
        sequences: run.sequences,
    })
}

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{meet_or_exhaust, rec, require, StateRecord};
use crate::error::{Error, Result};
use crate::games::{apply_move, legal_moves, Game, GameKind, GamePosition, Move, MoveRecord, Player};
use crate::space::{Palette, PointId, SpaceInstance, SubspaceId};
use crate::strategy::{push_move, verify_exhaustive, Strategy, VerifiedStrategy};

type Key = (usize, Option<PointId>, PointId);

/// The continuation chosen for one `(state, opponent point, owner point)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagonalWitness {
    pub state: usize,
    pub opponent_point: Option<PointId>,
    pub owner_point: PointId,
    pub opponent: MoveRecord,
    pub answer: MoveRecord,
}

impl DiagonalWitness {
    fn key(&self) -> Key {
        (self.state, self.opponent_point, self.owner_point)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagonal {
    pub r_star: SubspaceId,
    /// `r = r_0 >= r_1 >= …`, one step per witness that shrank it.
    pub chain: Vec<SubspaceId>,
    /// Sorted by key.
    pub witnesses: Vec<DiagonalWitness>,
    /// Keys having some continuation compatible with `r_star`.
    pub live: Vec<Key>,
}

impl Diagonal {
    pub fn witness(&self, state: usize, opponent_point: Option<PointId>, owner_point: PointId) -> Option<&DiagonalWitness> {
        let key = (state, opponent_point, owner_point);
        self.witnesses
            .binary_search_by(|w| w.key().cmp(&key))
            .ok()
            .map(|i| &self.witnesses[i])
    }
}

/// Keeps the larger subspace when one is below the other, then tries the
/// intersection, then the first common lower bound.
fn common_lower_bound(pal: &Palette, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
    if pal.leq(p, q) {
        return Some(p);
    }
    if pal.leq(q, p) {
        return Some(q);
    }
    let mut inter = pal.members(p).clone();
    inter.intersect_with(pal.members(q));
    pal.find(&inter).or_else(|| pal.compatible(p, q))
}

fn check_consistent(tau: &Strategy, play: &[MoveRecord]) -> Result<()> {
    for (i, m) in play.iter().enumerate() {
        if m.player == tau.owner && tau.get(&play[..i]) != Some(m) {
            return Err(Error::Invariant(format!(
                "state {} does not follow the strategy at move {i}",
                serde_json::to_string(play).unwrap()
            )));
        }
    }
    Ok(())
}

/// Walks every `(state, opponent point, owner point)` in canonical order and
/// shrinks `r` so that whichever of them still has a continuation compatible
/// with the result gets one whose subspace sits `<=*`-above it.
pub fn diagonalize_states(space: &SpaceInstance, states: &[StateRecord], tau: &Strategy, r: SubspaceId) -> Result<Diagonal> {
    let game = tau.game;
    if game.kind != GameKind::K {
        return Err(Error::GameMismatch("diagonalization runs on Kastanas strategies".into()));
    }
    let pal = space.palette();
    let mut candidates: BTreeMap<Key, Vec<(MoveRecord, MoveRecord)>> = BTreeMap::new();
    for (i, st) in states.iter().enumerate() {
        check_consistent(tau, &st.play)?;
        let pos = GamePosition::replay(space, game, &st.play)?;
        if pos.to_move() != Some(tau.owner.other()) {
            return Err(Error::Invariant("a state must leave the opponent to move".into()));
        }
        for m in legal_moves(space, &pos) {
            let mut next = pos.clone();
            push_move(&mut next, m);
            if next.is_terminal() {
                continue;
            }
            let a = *tau
                .get(&next.moves)
                .ok_or_else(|| Error::StrategyIncomplete(next.to_json()))?;
            let Some(own) = a.mv.point() else { continue };
            candidates.entry((i, m.mv.point(), own)).or_default().push((m, a));
        }
    }

    let mut chain = vec![r];
    let mut cur = r;
    let mut witnesses = Vec::new();
    for (&(state, opponent_point, owner_point), cands) in &candidates {
        for &(opponent, answer) in cands {
            let Some(v) = answer.mv.sub() else { continue };
            if let Some(next) = common_lower_bound(pal, cur, v) {
                if next != cur {
                    chain.push(next);
                    cur = next;
                }
                witnesses.push(DiagonalWitness {
                    state,
                    opponent_point,
                    owner_point,
                    opponent,
                    answer,
                });
                break;
            }
        }
    }
    let r_star = if chain.len() == 1 { r } else { pal.fusion_witness(&chain)? };

    let mut live = Vec::new();
    for (&key, cands) in &candidates {
        let compatible = cands
            .iter()
            .any(|(_, a)| a.mv.sub().is_some_and(|v| pal.compatible(v, r_star).is_some()));
        if !compatible {
            continue;
        }
        let w = witnesses
            .iter()
            .find(|w| w.key() == key)
            .ok_or_else(|| Error::Invariant(format!("diagonal lost the witness for {key:?}")))?;
        if !pal.leq_star(r_star, w.answer.mv.sub().unwrap()) {
            return Err(Error::Invariant(format!("diagonal is not <=* the witness for {key:?}")));
        }
        live.push(key);
    }
    Ok(Diagonal {
        r_star,
        chain,
        witnesses,
        live,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalRound {
    pub round: usize,
    pub states: usize,
    pub diagonal: SubspaceId,
    pub chain_len: usize,
    pub live: usize,
}

/// One round of the simulation: the moves of the adversarial game, the moves
/// added to the real Kastanas play, and the fictive moves the strategy was
/// queried on.
#[derive(Clone, Debug, Serialize)]
pub struct FictiveRound {
    pub played: Vec<MoveRecord>,
    pub real: Vec<MoveRecord>,
    pub fictive: Vec<MoveRecord>,
}

#[derive(Clone, Debug)]
pub struct KastanasOutput {
    pub q: SubspaceId,
    /// II's strategy in `B_q` or I's in `A_q`, toward the input's target.
    pub strategy: VerifiedStrategy,
    pub chain: Vec<SubspaceId>,
    pub rounds: Vec<DiagonalRound>,
    /// The simulation along the play where the opponent always makes its
    /// first legal move.
    pub sample_play: Vec<FictiveRound>,
}

struct Construction<'a> {
    space: &'a SpaceInstance,
    tau: &'a Strategy,
    horizon: usize,
    q: SubspaceId,
    start: Vec<MoveRecord>,
    diagonals: Vec<Diagonal>,
    index: Vec<HashMap<Vec<MoveRecord>, usize>>,
}

fn in_round(e: Error, n: usize) -> Error {
    match e {
        Error::FiniteExhaustion { stage, detail } => Error::FiniteExhaustion {
            stage: format!("kastanas round {n}: {stage}"),
            detail,
        },
        other => other,
    }
}

fn expect_own(played: MoveRecord, computed: Move) -> Result<()> {
    if played.mv != computed {
        return Err(Error::Invariant(format!(
            "history shows {} where the construction plays {}",
            serde_json::to_string(&played).unwrap(),
            serde_json::to_string(&computed).unwrap()
        )));
    }
    Ok(())
}

impl Construction<'_> {
    fn state_index(&self, n: usize, real: &[MoveRecord]) -> Result<usize> {
        self.index[n]
            .get(real)
            .copied()
            .ok_or_else(|| Error::Invariant(format!("real play left the state set in round {n}")))
    }

    fn query(&self, fictive: &[MoveRecord]) -> Result<MoveRecord> {
        self.tau.get(fictive).copied().ok_or_else(|| {
            Error::Invariant(format!(
                "fictive play {} is outside the strategy",
                serde_json::to_string(fictive).unwrap()
            ))
        })
    }

    fn witness(&self, n: usize, real: &[MoveRecord], opp: Option<PointId>, own: PointId) -> Result<&DiagonalWitness> {
        let k = self.state_index(n, real)?;
        self.diagonals[n]
            .witness(k, opp, own)
            .ok_or_else(|| Error::Invariant(format!("round {n} has no witness for ({opp:?}, {own})")))
    }

    /// Replays `h` and returns the owner's next move, if it is the owner's turn.
    fn simulate(&self, h: &[MoveRecord]) -> Result<(Option<Move>, Vec<FictiveRound>)> {
        match self.tau.owner {
            Player::II => self.simulate_ii(h),
            Player::I => self.simulate_i(h),
        }
    }

    fn simulate_ii(&self, h: &[MoveRecord]) -> Result<(Option<Move>, Vec<FictiveRound>)> {
        let space = self.space;
        let opening = Move::Sub { sub: self.q };
        let mut trace = Vec::new();
        let Some(&first) = h.first() else {
            return Ok((Some(opening), trace));
        };
        expect_own(first, opening)?;
        let mut real = self.start.clone();
        let mut v_real = real[0].mv.sub().unwrap();
        trace.push(FictiveRound {
            played: vec![first],
            real: real.clone(),
            fictive: Vec::new(),
        });
        for n in 0..self.horizon {
            let i_idx = 2 * n + 1;
            let Some(&their) = h.get(i_idx) else { break };
            let Move::PointSub { point: x, sub: u } = their.mv else {
                return Err(Error::Invariant("I's move lacks a point or a subspace".into()));
            };
            let u2 = meet_or_exhaust(space, u, v_real, "kastanas fictive move")?;
            let fictive_i = rec(Player::I, Move::PointSub { point: x, sub: u2 });
            let mut fictive = real.clone();
            fictive.push(fictive_i);
            let a = self.query(&fictive)?;
            let y = a
                .mv
                .point()
                .ok_or_else(|| Error::Invariant("II's answer lacks a point".into()))?;
            let (answer, added) = if n + 1 == self.horizon {
                (Move::Point { point: y }, Vec::new())
            } else {
                let w = *self.witness(n, &real, Some(x), y)?;
                real.push(w.opponent);
                real.push(w.answer);
                v_real = w.answer.mv.sub().unwrap();
                let v = meet_or_exhaust(space, self.q, v_real, "kastanas answer")?;
                (Move::PointSub { point: y, sub: v }, vec![w.opponent, w.answer])
            };
            let mut played = vec![their];
            let done = match h.get(i_idx + 1) {
                Some(&mine) => {
                    expect_own(mine, answer)?;
                    played.push(mine);
                    false
                }
                None => true,
            };
            trace.push(FictiveRound {
                played,
                real: added,
                fictive: vec![fictive_i, a],
            });
            if done {
                return Ok((Some(answer), trace));
            }
        }
        Ok((None, trace))
    }

    fn simulate_i(&self, h: &[MoveRecord]) -> Result<(Option<Move>, Vec<FictiveRound>)> {
        let space = self.space;
        let mut trace = Vec::new();
        let mut real: Vec<MoveRecord> = Vec::new();
        let mut u_real: Option<SubspaceId> = None;
        for n in 0..self.horizon {
            let Some(&their) = h.get(2 * n) else { break };
            let (opp_point, fictive_opp) = match (u_real, their.mv) {
                (None, Move::Sub { sub }) => (None, Move::Sub { sub }),
                (Some(prev), Move::PointSub { point, sub }) => (
                    Some(point),
                    Move::PointSub {
                        point,
                        sub: meet_or_exhaust(space, sub, prev, "kastanas fictive move")?,
                    },
                ),
                _ => return Err(Error::Invariant("II's move has the wrong shape".into())),
            };
            let fictive_opp = rec(Player::II, fictive_opp);
            let mut fictive = real.clone();
            fictive.push(fictive_opp);
            let a = self.query(&fictive)?;
            let x = a
                .mv
                .point()
                .ok_or_else(|| Error::Invariant("I's answer lacks a point".into()))?;
            let w = *self.witness(n, &real, opp_point, x)?;
            real.push(w.opponent);
            real.push(w.answer);
            let prev = w.answer.mv.sub().unwrap();
            u_real = Some(prev);
            let u = meet_or_exhaust(space, self.q, prev, "kastanas answer")?;
            let answer = Move::PointSub { point: x, sub: u };
            let mut played = vec![their];
            let done = match h.get(2 * n + 1) {
                Some(&mine) => {
                    expect_own(mine, answer)?;
                    played.push(mine);
                    false
                }
                None => true,
            };
            trace.push(FictiveRound {
                played,
                real: vec![w.opponent, w.answer],
                fictive: vec![fictive_opp, a],
            });
            if done {
                return Ok((Some(answer), trace));
            }
        }
        if let Some(&last) = h.get(2 * self.horizon) {
            // II's closing point carries over to the real play unchanged.
            trace.push(FictiveRound {
                played: vec![last],
                real: vec![last],
                fictive: Vec::new(),
            });
        }
        Ok((None, trace))
    }
}

/// Turns a verified Kastanas strategy into one for the same player in an
/// adversarial game below some `q <= p`: II lands in `B_q`, I in `A_q`.
pub fn adversarial_from_kastanas(space: &SpaceInstance, tau: &VerifiedStrategy) -> Result<KastanasOutput> {
    let owner = tau.owner();
    require(tau, GameKind::K, owner)?;
    let game = tau.game();
    let pal = space.palette();
    let strat = tau.strategy();
    let (start, q0, rounds) = match owner {
        Player::II => {
            let open = *strat.get(&[]).ok_or_else(|| Error::StrategyIncomplete("opening".into()))?;
            let q0 = open
                .mv
                .sub()
                .ok_or_else(|| Error::Invariant("II must open with a subspace".into()))?;
            (vec![open], q0, game.horizon.saturating_sub(1))
        }
        Player::I => (Vec::new(), game.root, game.horizon),
    };

    let mut chain = vec![q0];
    let mut states = vec![start.clone()];
    let mut diagonals = Vec::with_capacity(rounds);
    let mut index = Vec::with_capacity(rounds);
    let mut round_log = Vec::with_capacity(rounds);
    for n in 0..rounds {
        let records: Vec<StateRecord> = states.iter().map(|p| StateRecord::new(GameKind::K, p.clone())).collect();
        let diag = diagonalize_states(space, &records, strat, *chain.last().unwrap()).map_err(|e| in_round(e, n))?;
        let next: Vec<Vec<MoveRecord>> = diag
            .live
            .iter()
            .map(|&(k, opp, own)| {
                let w = diag.witness(k, opp, own).expect("live keys have witnesses");
                let mut s = states[k].clone();
                s.push(w.opponent);
                s.push(w.answer);
                s
            })
            .collect();
        round_log.push(DiagonalRound {
            round: n,
            states: states.len(),
            diagonal: diag.r_star,
            chain_len: diag.chain.len(),
            live: diag.live.len(),
        });
        index.push(states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect());
        chain.push(diag.r_star);
        diagonals.push(diag);
        states = next;
    }
    let q = if chain.len() == 1 {
        chain[0]
    } else {
        pal.fusion_witness(&chain).map_err(|e| in_round(e, rounds))?
    };

    let c = Construction {
        space,
        tau: strat,
        horizon: game.horizon,
        q,
        start,
        diagonals,
        index,
    };
    let kind = match owner {
        Player::II => GameKind::B,
        Player::I => GameKind::A,
    };
    let out_game = Game::new(kind, q, game.horizon);
    let table = Strategy::from_fn(space, owner, out_game, |pos| {
        c.simulate(&pos.moves)?
            .0
            .ok_or_else(|| Error::Invariant("the construction has no move to make".into()))
    })?;

    let mut pos = GamePosition::initial(out_game);
    while let Some(p) = pos.to_move() {
        let m = if p == owner {
            *table.get(&pos.moves).unwrap()
        } else {
            match legal_moves(space, &pos).first() {
                Some(&m) => m,
                None => break,
            }
        };
        pos = apply_move(space, &pos, m)?;
    }
    let sample_play = c.simulate(&pos.moves)?.1;

    let strategy = verify_exhaustive(space, table, tau.target())?;
    Ok(KastanasOutput {
        q,
        strategy,
        chain,
        rounds: round_log,
        sample_play,
    })
}

/// I's `A_q` strategy is also legal in `B_q`; this keeps the positions `B_q`
/// can reach and verifies them.
pub fn transfer_a_to_b(space: &SpaceInstance, a: &VerifiedStrategy) -> Result<VerifiedStrategy> {
    require(a, GameKind::A, Player::I)?;
    let g = a.game();
    let b = a.strategy().restricted_to(space, Game::new(GameKind::B, g.root, g.horizon))?;
    verify_exhaustive(space, b, a.target())
}

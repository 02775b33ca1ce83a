//! Strategies as finite tables, and their verification against every (or a
//! sampled) opponent.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{apply_move, for_each_legal, is_legal, Game, GamePosition, Move, MoveCache, MoveRecord, Player};
use crate::payoff::Payoff;
use crate::space::SpaceInstance;

/// A map from positions (as full move histories) to the owner's move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub owner: Player,
    pub game: Game,
    table: BTreeMap<Vec<MoveRecord>, MoveRecord>,
}

#[derive(Serialize, Deserialize)]
struct StrategyEntry {
    history: Vec<MoveRecord>,
    #[serde(rename = "move")]
    mv: MoveRecord,
}

#[derive(Serialize, Deserialize)]
struct StrategyFile {
    owner: Player,
    game: Game,
    table: Vec<StrategyEntry>,
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StrategyFile {
            owner: self.owner,
            game: self.game,
            table: self
                .table
                .iter()
                .map(|(h, m)| StrategyEntry {
                    history: h.clone(),
                    mv: *m,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = StrategyFile::deserialize(d)?;
        Ok(Strategy {
            owner: f.owner,
            game: f.game,
            table: f.table.into_iter().map(|e| (e.history, e.mv)).collect(),
        })
    }
}

impl Strategy {
    pub fn new(owner: Player, game: Game) -> Self {
        Strategy {
            owner,
            game,
            table: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, history: Vec<MoveRecord>, mv: MoveRecord) {
        self.table.insert(history, mv);
    }

    pub fn get(&self, history: &[MoveRecord]) -> Option<&MoveRecord> {
        self.table.get(history)
    }

    pub fn remove(&mut self, history: &[MoveRecord]) -> Option<MoveRecord> {
        self.table.remove(history)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<MoveRecord>, &MoveRecord)> {
        self.table.iter()
    }

    /// Tabulates `f` on every position reachable when the owner follows it.
    /// Each answer is checked for legality.
    pub fn from_fn(
        space: &SpaceInstance,
        owner: Player,
        game: Game,
        mut f: impl FnMut(&GamePosition) -> Result<Move>,
    ) -> Result<Strategy> {
        game.check_space(space)?;
        let mut strat = Strategy::new(owner, game);
        let cache = MoveCache::new(space, &game);
        let mut stack = vec![GamePosition::initial(game)];
        while let Some(pos) = stack.pop() {
            match pos.to_move() {
                None => {}
                Some(p) if p == owner => {
                    let mv = f(&pos)?;
                    let record = MoveRecord { player: owner, mv };
                    let next = apply_move(space, &pos, record)?;
                    strat.insert(pos.moves.clone(), record);
                    stack.push(next);
                }
                Some(p) => {
                    let mut children = Vec::new();
                    let _ = for_each_legal::<()>(
                        space,
                        &cache,
                        &game,
                        pos.moves.len(),
                        &pos.outcome_prefix,
                        pos.prev_sub(),
                        |mv| {
                            children.push(MoveRecord { player: p, mv });
                            ControlFlow::Continue(())
                        },
                    );
                    for c in children.into_iter().rev() {
                        let mut next = pos.clone();
                        push_move(&mut next, c);
                        stack.push(next);
                    }
                }
            }
        }
        Ok(strat)
    }

    /// Keeps only the entries reachable from the start when the owner follows
    /// the table in `game`, which may differ from the game it was built for.
    pub fn restricted_to(&self, space: &SpaceInstance, game: Game) -> Result<Strategy> {
        Strategy::from_fn(space, self.owner, game, |pos| {
            self.get(&pos.moves)
                .map(|m| m.mv)
                .ok_or_else(|| Error::StrategyIncomplete(pos.to_json()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("strategies serialize")
    }
}

/// Appends a move already known to be legal.
pub(crate) fn push_move(pos: &mut GamePosition, record: MoveRecord) {
    pos.moves.push(record);
    match record.mv {
        Move::Point { point } | Move::PointSub { point, .. } => pos.outcome_prefix.push(point),
        Move::Set { set } => pos.outcome_prefix.push(set),
        Move::Sub { .. } => {}
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerificationMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: VerificationMode,
    pub target: String,
    pub plays: u64,
    pub wins: u64,
    pub fraction: f64,
    /// Opponent positions with no legal move; the opponent loses there.
    pub stuck_opponent: u64,
    pub first_loss: Option<Vec<usize>>,
}

impl VerificationReport {
    pub fn all_won(&self) -> bool {
        self.wins == self.plays
    }
}

/// Plays `strat` against every opponent (or a seeded random one) and counts
/// outcomes accepted by `target`.
pub fn verify_strategy(
    space: &SpaceInstance,
    strat: &Strategy,
    target: &Payoff,
    mode: VerificationMode,
) -> Result<VerificationReport> {
    let game = strat.game;
    game.check_space(space)?;
    game.check_payoff(target)?;
    let cache = MoveCache::new(space, &game);
    let mut report = VerificationReport {
        mode,
        target: target.name().to_string(),
        plays: 0,
        wins: 0,
        fraction: 0.0,
        stuck_opponent: 0,
        first_loss: None,
    };
    let mut walker = Walker {
        space,
        strat,
        target,
        cache: &cache,
        report: &mut report,
    };
    match mode {
        VerificationMode::Exhaustive => walker.exhaustive(&mut GamePosition::initial(game))?,
        VerificationMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                walker.sample(&mut rng)?;
            }
        }
    }
    report.fraction = if report.plays == 0 {
        1.0
    } else {
        report.wins as f64 / report.plays as f64
    };
    Ok(report)
}

struct Walker<'a> {
    space: &'a SpaceInstance,
    strat: &'a Strategy,
    target: &'a Payoff,
    cache: &'a MoveCache,
    report: &'a mut VerificationReport,
}

impl Walker<'_> {
    fn owner_move(&self, pos: &GamePosition) -> Result<MoveRecord> {
        let m = *self
            .strat
            .get(&pos.moves)
            .ok_or_else(|| Error::StrategyIncomplete(pos.to_json()))?;
        let idx = pos.moves.len();
        if m.player != self.strat.owner
            || !is_legal(self.space, &pos.game, idx, &pos.outcome_prefix, pos.prev_sub(), &m.mv)
        {
            return Err(Error::IllegalMove(format!(
                "table entry {} at {}",
                serde_json::to_string(&m).unwrap(),
                pos.to_json()
            )));
        }
        Ok(m)
    }

    fn opponent_moves(&self, pos: &GamePosition, player: Player) -> Vec<MoveRecord> {
        let mut out = Vec::new();
        let _ = for_each_legal::<()>(
            self.space,
            self.cache,
            &pos.game,
            pos.moves.len(),
            &pos.outcome_prefix,
            pos.prev_sub(),
            |mv| {
                out.push(MoveRecord { player, mv });
                ControlFlow::Continue(())
            },
        );
        out
    }

    fn leaf(&mut self, pos: &GamePosition) {
        self.report.plays += 1;
        if self.target.accepts(&pos.outcome_prefix) {
            self.report.wins += 1;
        } else if self.report.first_loss.is_none() {
            self.report.first_loss = Some(pos.outcome_prefix.clone());
        }
    }

    fn stuck(&mut self) {
        self.report.plays += 1;
        self.report.wins += 1;
        self.report.stuck_opponent += 1;
    }

    fn exhaustive(&mut self, pos: &mut GamePosition) -> Result<()> {
        match pos.to_move() {
            None => self.leaf(pos),
            Some(p) if p == self.strat.owner => {
                let m = self.owner_move(pos)?;
                self.descend(pos, m)?;
            }
            Some(p) => {
                let moves = self.opponent_moves(pos, p);
                if moves.is_empty() {
                    self.stuck();
                }
                for m in moves {
                    self.descend(pos, m)?;
                }
            }
        }
        Ok(())
    }

    fn descend(&mut self, pos: &mut GamePosition, m: MoveRecord) -> Result<()> {
        let (len, depth) = (pos.moves.len(), pos.outcome_prefix.len());
        push_move(pos, m);
        let r = self.exhaustive(pos);
        pos.moves.truncate(len);
        pos.outcome_prefix.truncate(depth);
        r
    }

    fn sample(&mut self, rng: &mut ChaCha8Rng) -> Result<()> {
        let mut pos = GamePosition::initial(self.strat.game);
        loop {
            match pos.to_move() {
                None => {
                    self.leaf(&pos);
                    return Ok(());
                }
                Some(p) if p == self.strat.owner => {
                    let m = self.owner_move(&pos)?;
                    push_move(&mut pos, m);
                }
                Some(p) => {
                    let moves = self.opponent_moves(&pos, p);
                    match moves.choose(rng) {
                        Some(&m) => push_move(&mut pos, m),
                        None => {
                            self.stuck();
                            return Ok(());
                        }
                    }
                }
            }
        }
    }
}

/// A strategy that has passed exhaustive verification toward `target`.
/// Transformations only accept these.
#[derive(Clone, Debug)]
pub struct VerifiedStrategy {
    strategy: Strategy,
    target: Payoff,
}

impl VerifiedStrategy {
    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn target(&self) -> &Payoff {
        &self.target
    }

    pub fn owner(&self) -> Player {
        self.strategy.owner
    }

    pub fn game(&self) -> Game {
        self.strategy.game
    }

    pub fn into_inner(self) -> Strategy {
        self.strategy
    }
}

/// Verifies exhaustively and wraps the strategy on success.
pub fn verify_exhaustive(space: &SpaceInstance, strat: Strategy, target: &Payoff) -> Result<VerifiedStrategy> {
    let report = verify_strategy(space, &strat, target, VerificationMode::Exhaustive)?;
    if !report.all_won() {
        return Err(Error::NotVerified(format!(
            "{} of {} plays reach {:?}; first loss {:?}",
            report.wins, report.plays, report.target, report.first_loss
        )));
    }
    Ok(VerifiedStrategy {
        strategy: strat,
        target: target.clone(),
    })
}

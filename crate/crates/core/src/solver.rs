//! Backward induction for finite-horizon clopen games.

use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{apply_move, for_each_legal, legal_moves, Game, GamePosition, Move, MoveCache, MoveRecord, Player};
use crate::payoff::Payoff;
use crate::space::{SpaceInstance, SubspaceId};
use crate::strategy::{push_move, Strategy};

pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub winner: Player,
    pub goal_owner: Player,
    pub strategy: Strategy,
    /// What the winner's strategy forces: the payoff if the goal owner won,
    /// its complement otherwise.
    pub target: Payoff,
    pub nodes_expanded: u64,
}

impl SolveResult {
    pub fn goal_won(&self) -> bool {
        self.winner == self.goal_owner
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            winner: self.winner,
            goal_owner: self.goal_owner,
            target: self.target.name().to_string(),
            nodes_expanded: self.nodes_expanded,
            strategy_entries: self.strategy.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub winner: Player,
    pub goal_owner: Player,
    pub target: String,
    pub nodes_expanded: u64,
    pub strategy_entries: usize,
}

/// The part of a position the rest of the game depends on: the move index,
/// the outcome so far, and the previous subspace when the next move reads it.
type Key = (usize, Vec<usize>, Option<SubspaceId>);

struct Search<'a> {
    space: &'a SpaceInstance,
    game: Game,
    payoff: &'a Payoff,
    goal_owner: Player,
    cache: MoveCache,
    memo: HashMap<Key, bool>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn key(&self, idx: usize, history: &[usize], prev: Option<SubspaceId>) -> Key {
        let prev = if self.game.uses_prev(idx) { prev } else { None };
        (idx, history.to_vec(), prev)
    }

    /// Whether the goal owner wins from this point on.
    fn wins(&mut self, idx: usize, history: &mut Vec<usize>, prev: Option<SubspaceId>) -> Result<bool> {
        let Some((player, _)) = self.game.phase(idx) else {
            return Ok(self.payoff.accepts(history));
        };
        let key = self.key(idx, history, prev);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ExhaustionBudget { budget: self.budget });
        }
        let mut moves = Vec::new();
        let _ = for_each_legal::<()>(self.space, &self.cache, &self.game, idx, history, prev, |mv| {
            moves.push(mv);
            ControlFlow::Continue(())
        });
        let mover_is_goal = player == self.goal_owner;
        // A player without legal moves loses.
        let mut result = !mover_is_goal;
        for mv in moves {
            let child = self.child(idx, history, mv)?;
            if child == mover_is_goal {
                result = mover_is_goal;
                break;
            }
        }
        self.memo.insert(key, result);
        Ok(result)
    }

    fn child(&mut self, idx: usize, history: &mut Vec<usize>, mv: Move) -> Result<bool> {
        let pushed = match mv {
            Move::Point { point } | Move::PointSub { point, .. } => Some(point),
            Move::Set { set } => Some(set),
            Move::Sub { .. } => None,
        };
        if let Some(x) = pushed {
            history.push(x);
        }
        let r = self.wins(idx + 1, history, mv.sub());
        if pushed.is_some() {
            history.pop();
        }
        r
    }

    /// Tabulates the winner's strategy by walking the tree from the root.
    fn extract(&mut self, winner: Player) -> Result<Strategy> {
        let mut strat = Strategy::new(winner, self.game);
        let mut stack = vec![GamePosition::initial(self.game)];
        let winner_is_goal = winner == self.goal_owner;
        while let Some(pos) = stack.pop() {
            let Some(p) = pos.to_move() else { continue };
            let idx = pos.moves.len();
            let prev = pos.prev_sub();
            let mut moves = Vec::new();
            let _ = for_each_legal::<()>(self.space, &self.cache, &self.game, idx, &pos.outcome_prefix, prev, |mv| {
                moves.push(mv);
                ControlFlow::Continue(())
            });
            let mut history = pos.outcome_prefix.clone();
            if p == winner {
                let mut chosen = None;
                for mv in moves {
                    if self.child(idx, &mut history, mv)? == winner_is_goal {
                        chosen = Some(mv);
                        break;
                    }
                }
                let mv = chosen.ok_or_else(|| Error::Invariant(format!("winner has no winning move at {}", pos.to_json())))?;
                let record = MoveRecord { player: p, mv };
                strat.insert(pos.moves.clone(), record);
                let mut next = pos;
                push_move(&mut next, record);
                stack.push(next);
            } else {
                for mv in moves.into_iter().rev() {
                    let mut next = pos.clone();
                    push_move(&mut next, MoveRecord { player: p, mv });
                    stack.push(next);
                }
            }
        }
        Ok(strat)
    }
}

fn finish(payoff: &Payoff, goal_owner: Player, goal_wins: bool) -> (Player, Payoff) {
    if goal_wins {
        (goal_owner, payoff.clone())
    } else {
        (goal_owner.other(), payoff.complement())
    }
}

/// Decides whether `goal_owner` can force `payoff` and returns a winning
/// strategy for whoever wins.
pub fn solve(space: &SpaceInstance, game: Game, payoff: &Payoff, goal_owner: Player, budget: u64) -> Result<SolveResult> {
    game.check_space(space)?;
    game.check_payoff(payoff)?;
    let mut search = Search {
        space,
        game,
        payoff,
        goal_owner,
        cache: MoveCache::new(space, &game),
        memo: HashMap::new(),
        nodes: 0,
        budget,
    };
    let goal_wins = search.wins(0, &mut Vec::new(), None)?;
    let (winner, target) = finish(payoff, goal_owner, goal_wins);
    let strategy = search.extract(winner)?;
    Ok(SolveResult {
        winner,
        goal_owner,
        strategy,
        target,
        nodes_expanded: search.nodes,
    })
}

struct Naive<'a> {
    space: &'a SpaceInstance,
    payoff: &'a Payoff,
    goal_owner: Player,
    nodes: u64,
    budget: u64,
}

impl Naive<'_> {
    fn wins(&mut self, pos: &GamePosition) -> Result<bool> {
        let Some(player) = pos.to_move() else {
            return Ok(self.payoff.accepts(&pos.outcome_prefix));
        };
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ExhaustionBudget { budget: self.budget });
        }
        let mover_is_goal = player == self.goal_owner;
        for m in legal_moves(self.space, pos) {
            if self.wins(&apply_move(self.space, pos, m)?)? == mover_is_goal {
                return Ok(mover_is_goal);
            }
        }
        Ok(!mover_is_goal)
    }
}

/// Plain minimax through the public move API, without memoization.
pub fn naive_solve_oracle(
    space: &SpaceInstance,
    game: Game,
    payoff: &Payoff,
    goal_owner: Player,
    budget: u64,
) -> Result<SolveResult> {
    game.check_space(space)?;
    game.check_payoff(payoff)?;
    let mut naive = Naive {
        space,
        payoff,
        goal_owner,
        nodes: 0,
        budget,
    };
    let goal_wins = naive.wins(&GamePosition::initial(game))?;
    let (winner, target) = finish(payoff, goal_owner, goal_wins);
    let winner_is_goal = winner == goal_owner;
    let mut strategy = Strategy::new(winner, game);
    let mut stack = vec![GamePosition::initial(game)];
    while let Some(pos) = stack.pop() {
        let Some(p) = pos.to_move() else { continue };
        if p == winner {
            let mut chosen = None;
            for m in legal_moves(space, &pos) {
                let next = apply_move(space, &pos, m)?;
                if naive.wins(&next)? == winner_is_goal {
                    chosen = Some((m, next));
                    break;
                }
            }
            let (m, next) = chosen.ok_or_else(|| Error::Invariant("winner has no winning move".into()))?;
            strategy.insert(pos.moves.clone(), m);
            stack.push(next);
        } else {
            for m in legal_moves(space, &pos) {
                stack.push(apply_move(space, &pos, m)?);
            }
        }
    }
    Ok(SolveResult {
        winner,
        goal_owner,
        strategy,
        target,
        nodes_expanded: naive.nodes,
    })
}

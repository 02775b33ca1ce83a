use super::{rec, require};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, MoveRecord, Player};
use crate::payoff::Payoff;
use crate::space::{Admission, SpaceInstance};
use crate::strategy::{verify_exhaustive, Strategy, VerifiedStrategy};

/// Accepts `(x_0, y_0, x_1, y_1, …)` iff `payoff` accepts `(y_0, y_1, …)`.
pub fn tilde_payoff(payoff: &Payoff) -> Payoff {
    let inner = payoff.clone();
    Payoff::new(format!("tilde({})", payoff.name()), 2 * payoff.len(), move |s| {
        let ys: Vec<usize> = s.iter().skip(1).step_by(2).copied().collect();
        inner.accepts(&ys)
    })
}

/// The same space with parity-split admission, and the payoff read on the
/// odd positions of an interleaved outcome.
pub fn tilde_lift(space: &SpaceInstance, payoff: &Payoff) -> (SpaceInstance, Payoff) {
    let tilde = space.with_admission("tilde", Admission::Tilde(Box::new(space.admission().clone())));
    (tilde, tilde_payoff(payoff))
}

fn check_target(strat: &VerifiedStrategy, expected: &Payoff) -> Result<()> {
    if strat.target().name() != expected.name() {
        return Err(Error::GameMismatch(format!(
            "strategy was verified toward {:?}, expected {:?}",
            strat.target().name(),
            expected.name()
        )));
    }
    Ok(())
}

/// I's strategy in `A_p` of the tilde space toward the complement of the
/// lifted payoff, read as I's strategy in `F_p` of `space` toward `Xᶜ`.
/// II's subspaces in the simulated play are always `p`.
pub fn tilde_a_to_f(space: &SpaceInstance, strat: &VerifiedStrategy, payoff: &Payoff) -> Result<VerifiedStrategy> {
    require(strat, GameKind::A, Player::I)?;
    check_target(strat, &tilde_payoff(payoff).complement())?;
    let a_game = strat.game();
    let root = a_game.root;
    let table = strat.strategy();
    let game = Game::new(GameKind::F, root, a_game.horizon);
    let f = Strategy::from_fn(space, Player::I, game, |pos| {
        let mut hist = vec![rec(Player::II, Move::Sub { sub: root })];
        let mut mine = *table
            .get(&hist)
            .ok_or_else(|| Error::StrategyIncomplete(serde_json::to_string(&hist).unwrap()))?;
        for &y in &pos.outcome_prefix {
            hist.push(mine);
            hist.push(rec(Player::II, Move::PointSub { point: y, sub: root }));
            mine = *table
                .get(&hist)
                .ok_or_else(|| Error::StrategyIncomplete(serde_json::to_string(&hist).unwrap()))?;
        }
        mine.mv
            .sub()
            .map(|sub| Move::Sub { sub })
            .ok_or_else(|| Error::Invariant("I's adversarial move lacks a subspace".into()))
    })?;
    verify_exhaustive(space, f, &payoff.complement())
}

/// II's strategy in `B_p` of the tilde space toward the lifted payoff, read as
/// II's strategy in `G_p` of `space` toward `X`. I's points in the simulated
/// play are the first ones the tilde space admits.
pub fn tilde_b_to_g(
    space: &SpaceInstance,
    tilde: &SpaceInstance,
    strat: &VerifiedStrategy,
    payoff: &Payoff,
) -> Result<VerifiedStrategy> {
    require(strat, GameKind::B, Player::II)?;
    check_target(strat, &tilde_payoff(payoff))?;
    let b_game = strat.game();
    let table = strat.strategy();
    let game = Game::new(GameKind::G, b_game.root, b_game.horizon);
    let g = Strategy::from_fn(space, Player::II, game, |pos| {
        let lookup = |hist: &[MoveRecord]| {
            table
                .get(hist)
                .copied()
                .ok_or_else(|| Error::StrategyIncomplete(serde_json::to_string(hist).unwrap()))
        };
        let mut hist: Vec<MoveRecord> = Vec::new();
        let mut outcome: Vec<usize> = Vec::new();
        let mut answer = lookup(&hist)?;
        for m in &pos.moves {
            let Move::Sub { sub: q } = m.mv else { continue };
            let p = answer
                .mv
                .sub()
                .ok_or_else(|| Error::Invariant("II's adversarial move lacks a subspace".into()))?;
            hist.push(answer);
            if let Some(y) = answer.mv.point() {
                outcome.push(y);
            }
            let x = tilde.next_points(&outcome, p).ones().next().ok_or_else(|| {
                Error::exhaustion("tilde projection", format!("no point for I below subspace {p}"))
            })?;
            hist.push(rec(Player::I, Move::PointSub { point: x, sub: q }));
            outcome.push(x);
            answer = lookup(&hist)?;
        }
        answer
            .mv
            .point()
            .map(|point| Move::Point { point })
            .ok_or_else(|| Error::Invariant("II's adversarial answer lacks a point".into()))
    })?;
    verify_exhaustive(space, g, payoff)
}

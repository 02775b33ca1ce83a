use super::{meet_or_exhaust, require, tau_of_sequence};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, Player};
use crate::space::SpaceInstance;
use crate::strategy::{verify_exhaustive, Strategy, VerifiedStrategy};

/// From I's strategy in `F_p` toward `X`, builds II's strategy in `G_p`
/// toward `X`: against I's `q_n`, II plays the first point admitted by the
/// meet of `q_n` with what the asymptotic strategy would have played.
pub fn gowers_from_asymptotic(space: &SpaceInstance, tau: &VerifiedStrategy) -> Result<VerifiedStrategy> {
    require(tau, GameKind::F, Player::I)?;
    let f = tau.game();
    let game = Game::new(GameKind::G, f.root, f.horizon);
    let strat = Strategy::from_fn(space, Player::II, game, |pos| {
        let xs = &pos.outcome_prefix;
        let q = pos
            .moves
            .last()
            .and_then(|m| m.mv.sub())
            .ok_or_else(|| Error::Invariant("II moves after a subspace".into()))?;
        let p = tau_of_sequence(space, tau.strategy(), xs)?
            .ok_or_else(|| Error::Invariant(format!("history {xs:?} is not reachable in the asymptotic game")))?;
        let r = meet_or_exhaust(space, q, p, "gowers_from_asymptotic")?;
        let point = space
            .next_points(xs, r)
            .ones()
            .next()
            .ok_or_else(|| Error::exhaustion("gowers_from_asymptotic", format!("subspace {r} admits no point after {xs:?}")))?;
        Ok(Move::Point { point })
    })?;
    verify_exhaustive(space, strat, tau.target())
}

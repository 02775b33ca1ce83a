#![allow(dead_code)]

use gowers_lab::{
    build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player, SpaceInstance, SubspaceId,
    VerifiedStrategy,
};

pub const BUDGET: u64 = 20_000_000;

pub fn ms(n: usize, slack: usize, m: usize) -> SpaceInstance {
    build_instance(&InstanceSpec::mathias_silver(n, slack, m)).unwrap()
}

pub fn root(space: &SpaceInstance) -> SubspaceId {
    let all = gowers_lab::space::point_set(space.num_points(), 0..space.num_points());
    space.palette().find(&all).unwrap_or(0)
}

/// Solves `game` for `owner` and returns the winner's verified strategy.
pub fn solved(space: &SpaceInstance, game: Game, payoff: &Payoff, owner: Player) -> (Player, VerifiedStrategy) {
    let r = solve(space, game, payoff, owner, BUDGET).unwrap();
    let winner = r.winner;
    let v = verify_exhaustive(space, r.strategy, &r.target).unwrap();
    (winner, v)
}

/// The verified winning strategy of `owner`, who must win.
pub fn winning(space: &SpaceInstance, kind: GameKind, root: SubspaceId, horizon: usize, payoff: &Payoff, owner: Player) -> VerifiedStrategy {
    let (w, v) = solved(space, Game::new(kind, root, horizon), payoff, owner);
    assert_eq!(w, owner, "{owner:?} should win {kind:?} toward {}", payoff.name());
    v
}

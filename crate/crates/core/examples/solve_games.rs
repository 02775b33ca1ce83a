//! Solve all six games on a small Mathias-Silver space and certify the
//! winner's strategy by replaying it against every opponent line.

use gowers_lab::approx::PrecompactSystem;
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player};

fn main() -> gowers_lab::Result<()> {
    // 0..8, every subspace must contain 6 or 7.
    let space = build_instance(&InstanceSpec::mathias_silver(8, 6, 1))?;
    // SF plays sets from a precompact system; singletons make it F-like.
    let space = space.clone().with_system(PrecompactSystem::singletons(&space))?;
    for kind in [GameKind::A, GameKind::B, GameKind::F, GameKind::G, GameKind::K, GameKind::SF] {
        let game = Game::new(kind, 0, 1);
        let len = game.outcome_len();
        let last_even = |s: &[usize]| s[s.len() - 1] % 2 == 0;
        // SF outcomes are set ids; singleton k is {k}.
        let payoff = match kind {
            GameKind::SF => Payoff::on_sets("last point even", len, last_even),
            _ => Payoff::new("last point even", len, last_even),
        };
        let r = solve(&space, game, &payoff, Player::II, 1_000_000)?;
        let nodes = r.nodes_expanded;
        let v = verify_exhaustive(&space, r.strategy, &r.target)?;
        println!(
            "{kind:?}: {:?} wins toward {:<22} ({nodes} nodes, {} table entries)",
            v.owner(),
            v.target().name(),
            v.strategy().len()
        );
    }
    Ok(())
}

//! The colouring sets on finite-field spaces that no subspace decides, and
//! the block-pair scan for the support payoff.

use gowers_lab::instances::{block_pair_scan, counterexample_sets, pigeonhole_everywhere, CounterexampleKind, PigeonholeMode};
use gowers_lab::{build_instance, solve, Game, GameKind, InstanceSpec, Player};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::rosendal(3, 4, 0))?;
    let ce = counterexample_sets(&space, CounterexampleKind::FirstCoordOne)?;
    let set = ce.set.expect("a point set");
    let scan = pigeonhole_everywhere(&space, &set, PigeonholeMode::Exact);
    let decided = scan.iter().filter(|(_, r)| r.is_ok()).count();
    println!("first nonzero coordinate 1 on F_3^4: {decided} of {} subspaces decide it", scan.len());

    let space = build_instance(&InstanceSpec::rosendal(5, 4, 0))?;
    let ce = counterexample_sets(&space, CounterexampleKind::PhiSupport)?;
    let r = solve(&space, Game::new(GameKind::F, 0, 2), &ce.payoff, Player::I, 50_000_000)?;
    let scan = block_pair_scan(&space, &ce.payoff, 2)?;
    println!("{}: {:?} wins F at horizon 2", ce.payoff.name(), r.winner);
    println!("{} of {} subspaces with two or more blocks keep every block pair inside", scan.inside.len(), scan.checked);
    Ok(())
}

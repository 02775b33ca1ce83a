//! Turn II's Kastanas strategy into a B strategy below a diagonal subspace.

use gowers_lab::reductions::adversarial_from_kastanas;
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::mathias_silver(10, 0, 1))?;
    let payoff = Payoff::new("y_0 odd", 2, |s| s[1] % 2 == 1);
    let r = solve(&space, Game::new(GameKind::K, 0, 1), &payoff, Player::II, 10_000_000)?;
    let tau = verify_exhaustive(&space, r.strategy, &r.target)?;

    let out = adversarial_from_kastanas(&space, &tau)?;
    let pal = space.palette();
    println!("diagonal subspace: {}", pal.subspace(out.q).label);
    for (i, round) in out.rounds.iter().enumerate() {
        println!("round {i}: {}", serde_json::to_string(round).unwrap());
    }
    println!(
        "{:?} now wins {:?} toward {}",
        out.strategy.owner(),
        out.strategy.game().kind,
        out.strategy.target().name()
    );
    Ok(())
}

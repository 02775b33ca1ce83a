//! Extract a homogeneous set from I's winning asymptotic strategy.

use gowers_lab::reductions::homogeneous_from_asymptotic;
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::mathias_silver(12, 6, 1))?;
    let pay = Payoff::new("sum at least 9", 2, |s| s[0] + s[1] >= 9);
    let r = solve(&space, Game::new(GameKind::F, 0, 2), &pay, Player::I, 20_000_000)?;
    let tau = verify_exhaustive(&space, r.strategy, &r.target)?;
    let out = homogeneous_from_asymptotic(&space, &tau)?;
    println!("{:?}: every increasing pair sums to at least 9", out.set);
    println!("{} pairs checked", out.subsequences_checked);
    Ok(())
}

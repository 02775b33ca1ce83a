//! Move between the asymptotic game F and Gowers' game G.

use gowers_lab::reductions::{asymptotic_from_gowers, gowers_from_asymptotic};
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player};

const BUDGET: u64 = 20_000_000;

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::mathias_silver(9, 8, 1))?;
    let even = Payoff::new("both points even", 2, |s| s[0] % 2 == 0 && s[1] % 2 == 0);
    let r = solve(&space, Game::new(GameKind::F, 0, 2), &even, Player::I, BUDGET)?;
    let tau = verify_exhaustive(&space, r.strategy, &r.target)?;
    let sigma = gowers_from_asymptotic(&space, &tau)?;
    println!("F -> G: {:?} wins {:?} toward {}", sigma.owner(), sigma.game().kind, sigma.target().name());

    let space = build_instance(&InstanceSpec::mathias_silver(8, 6, 1))?;
    let top = Payoff::new("both points at least 6", 2, |s| s[0] >= 6 && s[1] >= 6);
    let r = solve(&space, Game::new(GameKind::G, 0, 2), &top, Player::II, BUDGET)?;
    let sigma = verify_exhaustive(&space, r.strategy, &r.target)?;
    let out = asymptotic_from_gowers(&space, &sigma, BUDGET)?;
    println!(
        "G -> F: {:?} wins {:?} below {} ({} reachable sets recorded)",
        out.strategy.owner(),
        out.strategy.game().kind,
        space.palette().subspace(out.q).label,
        out.sequences.len()
    );
    Ok(())
}

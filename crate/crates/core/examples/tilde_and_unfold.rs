//! Two ways into asymptotic games: the tilde space, where each point carries
//! the subspace it was played from, and the unfolded space, where each point
//! carries a bit.

use gowers_lab::reductions::{tilde_a_to_f, tilde_lift, unfold_asymptotic, unfold_space};
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player};

const BUDGET: u64 = 10_000_000;

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::mathias_silver(8, 7, 1))?;

    let x = Payoff::new("x_0 != 7", 1, |s| s[0] != 7);
    let (tilde, tx) = tilde_lift(&space, &x);
    println!("tilde space: {} points", tilde.num_points());
    let r = solve(&tilde, Game::new(GameKind::A, 0, 1), &tx.complement(), Player::I, BUDGET)?;
    if r.goal_won() {
        let a = verify_exhaustive(&tilde, r.strategy, &r.target)?;
        let f = tilde_a_to_f(&space, &a, &x)?;
        println!("A strategy projects to {:?} in {:?} toward {}", f.owner(), f.game().kind, f.target().name());
    }

    let unfolded = unfold_space(&space);
    let decorated = Payoff::new("some even base with bit 1", 2, |s| {
        s.iter().any(|&d| d % 2 == 1 && (d / 2) % 2 == 0)
    });
    let r = solve(&unfolded, Game::new(GameKind::F, 0, 2), &decorated.complement(), Player::I, BUDGET)?;
    let tau = verify_exhaustive(&unfolded, r.strategy, &r.target)?;
    let (out, target) = unfold_asymptotic(&space, &unfolded, &tau, &decorated)?;
    println!("unfolded strategy projects to {:?} toward {}", out.owner(), target.name());
    Ok(())
}

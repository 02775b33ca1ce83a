//! Rebuild I's asymptotic strategy over a precompact system of linear spans.

use gowers_lab::approx::{strong_asymptotic_from_asymptotic, DeltaSeq, PrecompactSystem};
use gowers_lab::space::PointData;
use gowers_lab::{build_instance, solve, verify_exhaustive, verify_strategy, Game, GameKind, InstanceSpec, Payoff, Player, VerificationMode};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::rosendal(2, 4, 1))?;
    let system = PrecompactSystem::linear_spans(&space)?;
    println!("{} sets in the system", system.len());
    let space = space.with_system(system)?;
    let zero: Vec<bool> = (0..space.num_points())
        .map(|x| matches!(&space.point(x).data, PointData::Vector(v) if v[0] == 0))
        .collect();
    let pay = Payoff::new("first coordinate of x_0 is 0", 1, move |s| zero[s[0]]);
    let r = solve(&space, Game::new(GameKind::F, 0, 1), &pay, Player::I, 1_000_000)?;
    let tau = verify_exhaustive(&space, r.strategy, &r.target)?;

    let out = strong_asymptotic_from_asymptotic(&space, &tau, &DeltaSeq::parse(&["1/2"])?, 1, 1_000_000)?;
    let rep = verify_strategy(&space, &out.strategy, &out.target, VerificationMode::Exhaustive)?;
    println!("SF strategy toward {}: fraction {}", out.target.name(), rep.fraction);
    Ok(())
}

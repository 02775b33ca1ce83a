//! Solve a game on a dense grid subset and lift the strategy to the sphere,
//! at the cost of widening the target by the radii.

use gowers_lab::approx::{discretize, lift_strategy, DeltaSeq, LiftDirection};
use gowers_lab::instances::PaletteRule;
use gowers_lab::space::{point_set, PointData};
use gowers_lab::{build_instance, solve, verify_exhaustive, verify_strategy, Game, InstanceSpec, Payoff, Rat, VerificationMode};

fn main() -> gowers_lab::Result<()> {
    let space = build_instance(&InstanceSpec::GridSphere {
        dim: 2,
        step: Rat::new(1, 4),
        slack: 0,
        palette: PaletteRule::TailBlockSubspaces { m: 1, max_blocks: 2, full: false },
    })?;
    let coords: Vec<Vec<Rat>> = (0..space.num_points())
        .map(|x| match &space.point(x).data {
            PointData::Real(v) => v.clone(),
            _ => unreachable!(),
        })
        .collect();
    let two = Rat::from_integer(2);
    let dense = point_set(
        coords.len(),
        (0..coords.len()).filter(|&x| coords[x].iter().all(|c| (c * two).is_integer())),
    );
    let first: Vec<Rat> = coords.iter().map(|v| v[0]).collect();
    let right = Payoff::new("x_0 right half", 1, move |s| first[s[0]] >= Rat::from_integer(0));

    let dir = LiftDirection::GII;
    let disc = discretize(&space, &dense, &DeltaSeq::parse(&["1/2"])?)?;
    println!("{} of {} points kept", disc.space.num_points(), space.num_points());
    let r = solve(&disc.space, Game::new(dir.kind(), 0, 1), &disc.restrict(&right), dir.owner(), 1_000_000)?;
    let sigma = verify_exhaustive(&disc.space, r.strategy, &r.target)?;
    let (lifted, target) = lift_strategy(&space, &disc, &sigma, dir, &right)?;
    let rep = verify_strategy(&space, &lifted, &target, VerificationMode::Exhaustive)?;
    println!("lifted toward {}: {} of {} plays won", target.name(), rep.wins, rep.plays);
    Ok(())
}

//! From II's Gowers strategy on the grid sphere to I's asymptotic strategy
//! toward the widened target.

use gowers_lab::approx::{approx_asymptotic_from_gowers, DeltaSeq};
use gowers_lab::instances::PaletteRule;
use gowers_lab::space::{point_set, PointData};
use gowers_lab::{build_instance, solve, verify_exhaustive, Game, GameKind, InstanceSpec, Payoff, Player, Rat};

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

    let r = solve(&space, Game::new(GameKind::G, 0, 1), &right, Player::II, 1_000_000)?;
    let sigma = verify_exhaustive(&space, r.strategy, &r.target)?;
    let out = approx_asymptotic_from_gowers(&space, &sigma, &dense, &DeltaSeq::parse(&["1/4"])?, 1_000_000)?;
    println!("below {}: I wins F toward {}", space.palette().subspace(out.q).label, out.target.name());
    Ok(())
}

mod common;

use common::*;
use gowers_lab::approx::*;
use gowers_lab::instances::PaletteRule;
use gowers_lab::reductions::homogeneous_from_asymptotic;
use gowers_lab::space::{point_set, PointData};
use gowers_lab::*;

fn grid(slack: usize) -> SpaceInstance {
    build_instance(&InstanceSpec::GridSphere {
        dim: 2,
        step: Rat::new(1, 4),
        slack,
        palette: PaletteRule::TailBlockSubspaces {
            m: 1,
            max_blocks: 2,
            full: false,
        },
    })
    .unwrap()
}

fn first_coord(space: &SpaceInstance, x: usize) -> Rat {
    match &space.point(x).data {
        PointData::Real(v) => v[0],
        _ => unreachable!(),
    }
}

/// Grid points with both coordinates multiples of 1/2.
fn half_grid(space: &SpaceInstance) -> PointSet {
    let n = space.num_points();
    point_set(
        n,
        (0..n).filter(|&i| match &space.point(i).data {
            PointData::Real(v) => v.iter().all(|c| (c * Rat::from_integer(2)).is_integer()),
            _ => false,
        }),
    )
}

fn on_first_point(space: &SpaceInstance, name: &str, len: usize, f: impl Fn(Rat) -> bool) -> Payoff {
    let table: Vec<bool> = (0..space.num_points()).map(|x| f(first_coord(space, x))).collect();
    Payoff::new(name, len, move |s| table[s[0]])
}

fn check_lift(space: &SpaceInstance, dense: &PointSet, delta: Rat, dir: LiftDirection, x: &Payoff, horizon: usize) {
    let len = if dir.kind().is_adversarial() { 2 * horizon } else { horizon };
    let disc = discretize(space, dense, &DeltaSeq::constant(delta, len).unwrap()).unwrap();
    let xr = disc.restrict(x);
    let aim = if dir.aims_at_payoff() { xr } else { xr.complement() };
    let strat = winning(&disc.space, dir.kind(), root(space), horizon, &aim, dir.owner());
    let (lifted, target) = lift_strategy(space, &disc, &strat, dir, x).unwrap();
    let rep = verify_strategy(space, &lifted, &target, VerificationMode::Exhaustive).unwrap();
    assert_eq!(rep.fraction, 1.0, "{dir:?} at horizon {horizon}: {rep:?}");
}

#[test]
fn lifts_in_all_four_directions() {
    let half = Rat::new(1, 2);
    for h in [1, 2] {
        let space = grid(0);
        let dense = half_grid(&space);
        let right = on_first_point(&space, "x_0 right half", 2 * h, |c| c >= Rat::from_integer(0));
        check_lift(&space, &dense, half, LiftDirection::AI, &right, h);
        let right = on_first_point(&space, "x_0 right half", h, |c| c >= Rat::from_integer(0));
        check_lift(&space, &dense, half, LiftDirection::GII, &right, h);

        let space = grid(1);
        let dense = half_grid(&space);
        let off_axis = on_first_point(&space, "x_0 off the axis", h, |c| c != Rat::from_integer(0));
        check_lift(&space, &dense, half, LiftDirection::FI, &off_axis, h);
        let off_axis = on_first_point(&space, "x_0 off the axis", 2 * h, |c| c != Rat::from_integer(0));
        check_lift(&space, &dense, half, LiftDirection::BII, &off_axis, h);
    }
}

#[test]
fn identity_lift_below_the_grid_step() {
    let space = grid(0);
    let all = point_set(space.num_points(), 0..space.num_points());
    let right = on_first_point(&space, "x_0 right half", 1, |c| c >= Rat::from_integer(0));
    let disc = discretize(&space, &all, &DeltaSeq::parse(&["1/8"]).unwrap()).unwrap();
    let strat = winning(&disc.space, GameKind::G, root(&space), 1, &disc.restrict(&right), Player::II);
    let (lifted, target) = lift_strategy(&space, &disc, &strat, LiftDirection::GII, &right).unwrap();
    assert_eq!(lifted.entries().count(), strat.strategy().entries().count());
    for x in 0..space.num_points() {
        assert_eq!(target.accepts(&[x]), right.accepts(&[x]));
    }
}

#[test]
fn approx_asymptotic_on_the_grid() {
    let space = grid(0);
    let p = root(&space);
    let right = on_first_point(&space, "x_0 right half", 1, |c| c >= Rat::from_integer(0));
    let sigma = winning(&space, GameKind::G, p, 1, &right, Player::II);
    let delta = DeltaSeq::parse(&["1/4"]).unwrap();
    let out = approx_asymptotic_from_gowers(&space, &sigma, &half_grid(&space), &delta, BUDGET).unwrap();
    assert!(space.leq(out.q, p));
    let rep = verify_strategy(&space, out.strategy.strategy(), &out.target, VerificationMode::Exhaustive).unwrap();
    assert_eq!(rep.fraction, 1.0);
}

#[test]
fn approx_asymptotic_with_huge_delta_is_trivial() {
    let space = grid(0);
    let p = root(&space);
    let right = on_first_point(&space, "x_0 right half", 1, |c| c >= Rat::from_integer(0));
    let sigma = winning(&space, GameKind::G, p, 1, &right, Player::II);
    let delta = DeltaSeq::parse(&["3"]).unwrap();
    let out = approx_asymptotic_from_gowers(&space, &sigma, &half_grid(&space), &delta, BUDGET).unwrap();
    assert!((0..space.num_points()).all(|x| out.target.accepts(&[x])));
}

#[test]
fn approx_asymptotic_rejects_sparse_sets() {
    let space = grid(0);
    let p = root(&space);
    let right = on_first_point(&space, "x_0 right half", 1, |c| c >= Rat::from_integer(0));
    let sigma = winning(&space, GameKind::G, p, 1, &right, Player::II);
    let delta = DeltaSeq::parse(&["1/8"]).unwrap();
    let err = approx_asymptotic_from_gowers(&space, &sigma, &half_grid(&space), &delta, BUDGET).unwrap_err();
    assert!(matches!(err, Error::NotDense { .. }), "{err}");
}

#[test]
fn strong_asymptotic_on_rosendal_with_linear_spans() {
    let space = build_instance(&InstanceSpec::rosendal(2, 4, 1)).unwrap();
    let system = PrecompactSystem::linear_spans(&space).unwrap();
    let space = space.with_system(system).unwrap();
    let p = root(&space);
    let coords: Vec<bool> = (0..space.num_points())
        .map(|x| match &space.point(x).data {
            PointData::Vector(v) => v[0] == 0,
            _ => unreachable!(),
        })
        .collect();
    let pay = Payoff::new("first coordinate of x_0 is 0", 1, move |s| coords[s[0]]);
    let tau = winning(&space, GameKind::F, p, 1, &pay, Player::I);
    let delta = DeltaSeq::parse(&["1/2"]).unwrap();
    let out = strong_asymptotic_from_asymptotic(&space, &tau, &delta, 1, BUDGET).unwrap();
    let rep = verify_strategy(&space, &out.strategy, &out.target, VerificationMode::Exhaustive).unwrap();
    assert_eq!(rep.fraction, 1.0);
}

#[test]
fn strong_asymptotic_with_singletons_matches_homogeneous_sets() {
    let space = ms(8, 6, 1);
    let space = space.clone().with_system(PrecompactSystem::singletons(&space)).unwrap();
    let p = root(&space);
    let pay = Payoff::new("sum at least 9", 2, |s| s[0] + s[1] >= 9);
    let tau = winning(&space, GameKind::F, p, 2, &pay, Player::I);
    let delta = DeltaSeq::parse(&["1/2", "1/2"]).unwrap();
    let out = strong_asymptotic_from_asymptotic(&space, &tau, &delta, 3, BUDGET).unwrap();
    let rep = verify_strategy(&space, &out.strategy, &out.target, VerificationMode::Exhaustive).unwrap();
    assert_eq!(rep.fraction, 1.0);
    let hom = homogeneous_from_asymptotic(&space, &tau).unwrap();
    // Singleton blocks read off the increasing pairs of an outcome, so every
    // increasing triple of the homogeneous set is a winning outcome.
    let n = &hom.set;
    for i in 0..n.len() {
        for j in i + 1..n.len() {
            for k in j + 1..n.len() {
                assert!(out.target.accepts(&[n[i], n[j], n[k]]));
            }
        }
    }
}

#[test]
fn discretized_admission_matches_the_definition() {
    let space = grid(0);
    let dense = half_grid(&space);
    let delta = DeltaSeq::parse(&["1/2", "3/4"]).unwrap();
    let disc = discretize(&space, &dense, &delta).unwrap();
    for p in 0..space.num_subspaces() {
        for n in 0..2 {
            let hist = vec![0; n];
            let got = disc.space.next_points(&hist, p);
            for (i, &y) in disc.parent.iter().enumerate() {
                let want = space
                    .next_points(&[], p)
                    .ones()
                    .any(|x| space.distance(x, y).unwrap() < delta.get(n));
                assert_eq!(got.contains(i), want, "p={p} n={n} y={y}");
            }
        }
    }
}

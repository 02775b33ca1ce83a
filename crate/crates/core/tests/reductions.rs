mod common;

use common::*;
use gowers_lab::instances::{counterexample_sets, CounterexampleKind};
use gowers_lab::reductions::*;
use gowers_lab::{build_instance, verify_strategy, Error, GameKind, InstanceSpec, Payoff, Player, VerificationMode};

fn exhaustive_fraction(space: &gowers_lab::SpaceInstance, v: &gowers_lab::VerifiedStrategy) -> f64 {
    verify_strategy(space, v.strategy(), v.target(), VerificationMode::Exhaustive)
        .unwrap()
        .fraction
}

#[test]
fn kastanas_ii_odd_answer_gives_b_strategy() {
    let space = ms(10, 0, 1);
    let p = root(&space);
    let pay = Payoff::new("y_0 odd", 2, |s| s[1] % 2 == 1);
    let tau = winning(&space, GameKind::K, p, 1, &pay, Player::II);
    let out = adversarial_from_kastanas(&space, &tau).unwrap();
    assert_eq!(out.strategy.game().kind, GameKind::B);
    assert!(space.leq(out.q, p));
    assert_eq!(exhaustive_fraction(&space, &out.strategy), 1.0);
    assert!(!out.sample_play.is_empty());
}

#[test]
fn kastanas_i_odd_point_gives_a_strategy_and_transfers_to_b() {
    // Every subspace holds 9, so I can always pick an odd point.
    let space = ms(10, 9, 1);
    let p = root(&space);
    let pay = Payoff::new("x_0 odd", 2, |s| s[0] % 2 == 1);
    let tau = winning(&space, GameKind::K, p, 1, &pay, Player::I);
    let out = adversarial_from_kastanas(&space, &tau).unwrap();
    assert_eq!(out.strategy.game().kind, GameKind::A);
    assert_eq!(exhaustive_fraction(&space, &out.strategy), 1.0);
    let b = transfer_a_to_b(&space, &out.strategy).unwrap();
    assert_eq!(b.game().kind, GameKind::B);
}

#[test]
fn kastanas_on_single_subspace_returns_it() {
    let space = build_instance(&InstanceSpec::gale_stewart(4)).unwrap();
    let pay = Payoff::new("sum even", 4, |s| (s[0] + s[1] + s[2] + s[3]) % 2 == 0);
    for owner in [Player::I, Player::II] {
        let (w, tau) = solved(&space, gowers_lab::Game::new(GameKind::K, 0, 2), &pay, owner);
        let out = adversarial_from_kastanas(&space, &tau).unwrap();
        assert_eq!(out.q, 0);
        assert_eq!(out.strategy.owner(), w);
    }
}

#[test]
fn diagonalize_with_no_states_keeps_r() {
    let space = ms(8, 0, 1);
    let p = root(&space);
    let pay = Payoff::new("y_0 odd", 2, |s| s[1] % 2 == 1);
    let tau = winning(&space, GameKind::K, p, 1, &pay, Player::II);
    let d = diagonalize_states(&space, &[], tau.strategy(), p).unwrap();
    assert_eq!(d.r_star, p);
    assert_eq!(d.chain, vec![p]);
}

#[test]
fn tilde_payoff_reads_odd_positions() {
    let pay = Payoff::new("x_0 even", 1, |s| s[0] % 2 == 0);
    let t = tilde_payoff(&pay);
    assert_eq!(t.len(), 2);
    assert!(t.accepts(&[1, 4]));
    assert!(!t.accepts(&[0, 3]));
}

#[test]
fn tilde_pipeline_projects_solved_strategies() {
    let space = ms(8, 7, 1);
    let p = root(&space);
    for pay in [
        Payoff::new("x_0 even", 1, |s| s[0] % 2 == 0),
        Payoff::new("x_0 != 7", 1, |s| s[0] != 7),
    ] {
        let (tilde, tpay) = tilde_lift(&space, &pay);
        let mut projected = 0;
        let (wa, a) = solved(&tilde, gowers_lab::Game::new(GameKind::A, p, 1), &tpay.complement(), Player::I);
        if wa == Player::I {
            let f = tilde_a_to_f(&space, &a, &pay).unwrap();
            assert_eq!(f.game().kind, GameKind::F);
            assert_eq!(exhaustive_fraction(&space, &f), 1.0);
            projected += 1;
        }
        let (wb, b) = solved(&tilde, gowers_lab::Game::new(GameKind::B, p, 1), &tpay, Player::II);
        if wb == Player::II {
            let g = tilde_b_to_g(&space, &tilde, &b, &pay).unwrap();
            assert_eq!(g.game().kind, GameKind::G);
            assert_eq!(exhaustive_fraction(&space, &g), 1.0);
            projected += 1;
        }
        assert!(projected > 0, "{} projected nothing", pay.name());
    }
}

#[test]
fn unfold_horizons_one_and_two() {
    let space = ms(8, 7, 1);
    let p = root(&space);
    let unfolded = unfold_space(&space);
    for k in [1, 2] {
        let decorated = Payoff::new("decorated: some even base with bit 1", k, |s| {
            s.iter().any(|&d| d % 2 == 1 && (d / 2) % 2 == 0)
        });
        let tau = winning(&unfolded, GameKind::F, p, k, &decorated.complement(), Player::I);
        let (out, target) = unfold_asymptotic(&space, &unfolded, &tau, &decorated).unwrap();
        assert_eq!(target.name(), projected_payoff(&decorated).complement().name());
        assert_eq!(exhaustive_fraction(&space, &out), 1.0);
    }
}

#[test]
fn gowers_from_asymptotic_on_even_pairs() {
    let space = ms(9, 8, 1);
    let p = root(&space);
    let pay = Payoff::new("both points even", 2, |s| s[0] % 2 == 0 && s[1] % 2 == 0);
    let tau = winning(&space, GameKind::F, p, 2, &pay, Player::I);
    let sigma = gowers_from_asymptotic(&space, &tau).unwrap();
    assert_eq!(sigma.game().kind, GameKind::G);
    assert_eq!(sigma.owner(), Player::II);
    assert_eq!(exhaustive_fraction(&space, &sigma), 1.0);
}

#[test]
fn gowers_from_asymptotic_on_rosendal() {
    let space = build_instance(&InstanceSpec::rosendal(2, 4, 1)).unwrap();
    let p = root(&space);
    let pay = {
        let coords: Vec<bool> = (0..space.num_points())
            .map(|x| match &space.point(x).data {
                gowers_lab::space::PointData::Vector(v) => v[0] == 0,
                _ => unreachable!(),
            })
            .collect();
        Payoff::new("first coordinate of x_0 is 0", 1, move |s| coords[s[0]])
    };
    let tau = winning(&space, GameKind::F, p, 1, &pay, Player::I);
    let sigma = gowers_from_asymptotic(&space, &tau).unwrap();
    assert_eq!(exhaustive_fraction(&space, &sigma), 1.0);
}

#[test]
fn reachable_set_of_least_point_strategy() {
    let space = ms(6, 0, 1);
    let p = root(&space);
    let pay = Payoff::constant(1, true);
    let sigma = gowers_lab::Strategy::from_fn(&space, Player::II, gowers_lab::Game::new(GameKind::G, p, 1), |pos| {
        let q = pos.moves.last().unwrap().mv.sub().unwrap();
        Ok(gowers_lab::Move::Point {
            point: space.palette().members(q).ones().next().unwrap(),
        })
    })
    .unwrap();
    let sigma = gowers_lab::verify_exhaustive(&space, sigma, &pay).unwrap();
    let state = StateRecord::new(GameKind::G, Vec::new());
    let r = reachable_set(&space, &state, sigma.strategy()).unwrap();
    let expected: Vec<usize> = space
        .palette()
        .below(p)
        .iter()
        .map(|&q| space.palette().members(q).ones().next().unwrap())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    assert_eq!(r.points.ones().collect::<Vec<_>>(), expected);
}

#[test]
fn asymptotic_from_gowers_on_top_band_pairs() {
    let space = ms(8, 6, 1);
    let p = root(&space);
    let pay = Payoff::new("both points at least 6", 2, |s| s[0] >= 6 && s[1] >= 6);
    let sigma = winning(&space, GameKind::G, p, 2, &pay, Player::II);
    let out = asymptotic_from_gowers(&space, &sigma, BUDGET).unwrap();
    assert!(space.leq(out.q, p));
    assert_eq!(out.strategy.game().kind, GameKind::F);
    assert_eq!(exhaustive_fraction(&space, &out.strategy), 1.0);
}

#[test]
fn increasing_pairs_split_the_forced_band() {
    // II climbs only because every subspace holds 6 and 7, and then no
    // subspace decides the reachable set.
    let space = ms(8, 6, 2);
    let p = root(&space);
    let pay = Payoff::new("strictly increasing pair", 2, |s| s[0] < s[1]);
    let sigma = winning(&space, GameKind::G, p, 2, &pay, Player::II);
    let err = asymptotic_from_gowers(&space, &sigma, BUDGET).unwrap_err();
    assert!(matches!(err, Error::PigeonholeUnavailable { .. }), "{err}");
}

#[test]
fn asymptotic_from_gowers_everything_is_trivial() {
    let space = ms(6, 0, 1);
    let p = root(&space);
    let pay = Payoff::constant(2, true);
    let sigma = winning(&space, GameKind::G, p, 2, &pay, Player::II);
    let out = asymptotic_from_gowers(&space, &sigma, BUDGET).unwrap();
    assert_eq!(exhaustive_fraction(&space, &out.strategy), 1.0);
}

#[test]
fn asymptotic_from_gowers_surfaces_missing_pigeonhole() {
    let space = build_instance(&InstanceSpec::rosendal(3, 4, 0)).unwrap();
    let p = root(&space);
    let ce = counterexample_sets(&space, CounterexampleKind::FirstCoordOne).unwrap();
    let sigma = winning(&space, GameKind::G, p, 1, &ce.payoff, Player::II);
    let err = asymptotic_from_gowers(&space, &sigma, BUDGET).unwrap_err();
    assert!(matches!(err, Error::PigeonholeUnavailable { .. }), "{err}");
}

#[test]
fn homogeneous_from_solved_strategy() {
    let space = ms(12, 6, 1);
    let p = root(&space);
    let pay = Payoff::new("sum at least 9", 2, |s| s[0] + s[1] >= 9);
    let tau = winning(&space, GameKind::F, p, 2, &pay, Player::I);
    let out = homogeneous_from_asymptotic(&space, &tau).unwrap();
    assert!(out.set.len() >= 2);
    for (i, &a) in out.set.iter().enumerate() {
        for &b in &out.set[i + 1..] {
            assert!(pay.accepts(&[a, b]));
        }
    }
}

#[test]
fn homogeneous_rejects_other_instances() {
    let space = build_instance(&InstanceSpec::rosendal(2, 3, 0)).unwrap();
    let p = root(&space);
    let tau = winning(&space, GameKind::F, p, 1, &Payoff::constant(1, true), Player::I);
    assert!(matches!(
        homogeneous_from_asymptotic(&space, &tau),
        Err(Error::KindMismatch { .. })
    ));
}

#[test]
fn strategic_dichotomy_on_even_first_point() {
    let space = ms(8, 0, 1);
    let p = root(&space);
    let pay = Payoff::new("x_0 even", 1, |s| s[0] % 2 == 0);
    let rep = check_ramsey_dichotomy(&space, &pay, p, DichotomyFlavor::Strategic, BUDGET).unwrap();
    let evens = gowers_lab::space::point_set(8, [0, 2, 4, 6]);
    let q = space.palette().find(&evens).unwrap();
    let row = rep.rows.iter().find(|r| r.q == q).unwrap();
    assert!(row.realized);
    assert!(row.second.goal_won);
}

#[test]
fn strategic_dichotomy_everything_realized_everywhere() {
    let space = ms(5, 0, 1);
    let rep = check_ramsey_dichotomy(&space, &Payoff::constant(1, true), root(&space), DichotomyFlavor::Strategic, BUDGET)
        .unwrap();
    assert!(rep.rows.iter().all(|r| r.second.goal_won));
    assert_eq!(rep.realizing.len(), rep.rows.len());
}

#[test]
fn strategic_dichotomy_on_first_coordinate_counterexample() {
    let space = build_instance(&InstanceSpec::rosendal(3, 4, 0)).unwrap();
    let ce = counterexample_sets(&space, CounterexampleKind::FirstCoordOne).unwrap();
    let rep = check_ramsey_dichotomy(&space, &ce.payoff, root(&space), DichotomyFlavor::Strategic, BUDGET).unwrap();
    assert!(rep.rows.iter().all(|r| !r.first.goal_won));
    assert!(rep.rows.iter().all(|r| r.second.goal_won));
}

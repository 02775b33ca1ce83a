//! Invariants checked on random plays, payoffs and instances.

mod common;

use common::*;
use gowers_lab::approx::{expand_point_set, expand_sequence_membership, DeltaSeq, Net};
use gowers_lab::instances::PaletteRule;
use gowers_lab::scenario::random_payoff;
use gowers_lab::space::point_set;
use gowers_lab::*;
use proptest::prelude::*;

fn grid() -> SpaceInstance {
    build_instance(&InstanceSpec::GridSphere {
        dim: 2,
        step: Rat::new(1, 4),
        slack: 0,
        palette: PaletteRule::TailBlockSubspaces {
            m: 1,
            max_blocks: 2,
            full: false,
        },
    })
    .unwrap()
}

fn instances() -> Vec<SpaceInstance> {
    vec![
        ms(6, 3, 1),
        build_instance(&InstanceSpec::rosendal(2, 3, 1)).unwrap(),
        grid(),
    ]
}

/// Plays `picks` as indices into the legal move lists, stopping at the end
/// of the game or when no move is legal.
fn random_play(space: &SpaceInstance, game: Game, picks: &[usize]) -> GamePosition {
    let mut pos = GamePosition::initial(game);
    for &i in picks {
        let moves = legal_moves(space, &pos);
        if moves.is_empty() {
            break;
        }
        pos = apply_move(space, &pos, moves[i % moves.len()]).unwrap();
    }
    pos
}

const KINDS: [GameKind; 5] = [GameKind::A, GameKind::B, GameKind::F, GameKind::G, GameKind::K];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replaying_a_move_list_gives_the_same_position(
        which in 0usize..3,
        kind in 0usize..5,
        horizon in 1usize..3,
        picks in prop::collection::vec(any::<usize>(), 0..8),
    ) {
        let space = &instances()[which];
        let game = Game::new(KINDS[kind], root(space), horizon);
        let pos = random_play(space, game, &picks);
        let again = GamePosition::replay(space, game, &pos.moves).unwrap();
        prop_assert_eq!(&again, &pos);
        let parsed: GamePosition = serde_json::from_str(&pos.to_json()).unwrap();
        prop_assert_eq!(parsed, pos);
    }

    #[test]
    fn b_plays_with_approximated_i_moves_are_a_plays(
        which in 0usize..3,
        picks in prop::collection::vec(any::<usize>(), 5),
    ) {
        let space = &instances()[which];
        let p = root(space);
        let b = random_play(space, Game::new(GameKind::B, p, 2), &picks);
        let i_ok = b
            .moves
            .iter()
            .filter(|m| m.player == Player::I)
            .filter_map(|m| m.mv.sub())
            .all(|q| space.lessapprox(q, p));
        if i_ok {
            prop_assert!(GamePosition::replay(space, Game::new(GameKind::A, p, 2), &b.moves).is_ok());
        }
    }

    #[test]
    fn f_subspace_moves_are_g_moves(which in 0usize..3, picks in prop::collection::vec(any::<usize>(), 4)) {
        let space = &instances()[which];
        let p = root(space);
        let f = random_play(space, Game::new(GameKind::F, p, 2), &picks);
        prop_assert!(GamePosition::replay(space, Game::new(GameKind::G, p, 2), &f.moves).is_ok());
    }

    #[test]
    fn exactly_one_player_wins_and_the_solvers_agree(
        kind in 0usize..5,
        seed in any::<u64>(),
        density in 1i64..4,
    ) {
        let space = ms(5, 3, 1);
        let game = Game::new(KINDS[kind], root(&space), 1);
        let len = game.outcome_len();
        let x = random_payoff("random", space.num_points(), len, Rat::new(density, 4), seed);
        let (w1, _) = solved(&space, game, &x, Player::I);
        let (w2, _) = solved(&space, game, &x.complement(), Player::II);
        // The same game seen from either side.
        prop_assert_eq!(w1, w2);
        let naive = naive_solve_oracle(&space, game, &x, Player::I, BUDGET).unwrap();
        prop_assert_eq!(naive.winner, w1);
    }

    #[test]
    fn enlarging_the_payoff_keeps_the_goal_owner_winning(
        kind in 0usize..5,
        owner in prop::bool::ANY,
        seed in any::<u64>(),
        extra in any::<u64>(),
    ) {
        let space = ms(5, 3, 1);
        let game = Game::new(KINDS[kind], root(&space), 1);
        let len = game.outcome_len();
        let owner = if owner { Player::I } else { Player::II };
        let x = random_payoff("x", space.num_points(), len, Rat::new(1, 2), seed);
        let y = random_payoff("y", space.num_points(), len, Rat::new(1, 2), extra);
        let xy = {
            let (x, y) = (x.clone(), y.clone());
            Payoff::new("x or y", len, move |s| x.accepts(s) || y.accepts(s))
        };
        let small = solve(&space, game, &x, owner, BUDGET).unwrap();
        if small.goal_won() {
            prop_assert!(solve(&space, game, &xy, owner, BUDGET).unwrap().goal_won());
        }
    }

    #[test]
    fn nets_cover_their_sets(bits in any::<u32>(), num in 1i64..9) {
        let space = grid();
        let n = space.num_points();
        let set = point_set(n, (0..n).filter(|&x| bits >> x & 1 == 1));
        let net = Net::greedy(&space, &set, Rat::new(num, 4));
        prop_assert!(net.covers(&space, &set));
        prop_assert!(net.members.iter().all(|&m| set.contains(m)));
    }

    #[test]
    fn expansion_is_monotone_in_the_radius(bits in any::<u32>(), a in 1i64..12, b in 1i64..12) {
        let space = grid();
        let n = space.num_points();
        let set = point_set(n, (0..n).filter(|&x| bits >> x & 1 == 1));
        let (lo, hi) = (a.min(b), a.max(b));
        let small = expand_point_set(&space, &set, Rat::new(lo, 8)).unwrap();
        let large = expand_point_set(&space, &set, Rat::new(hi, 8)).unwrap();
        prop_assert!(set.is_subset(&small));
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn half_expansions_twice_stay_in_the_full_expansion(
        bits in any::<u32>(),
        seq in prop::collection::vec(0usize..32, 2),
        num in 1i64..9,
    ) {
        let space = grid();
        let accepted: Vec<bool> = (0..32).map(|x| bits >> x & 1 == 1).collect();
        let x = Payoff::new("x", 2, move |s| accepted[s[0]] && accepted[s[1]]);
        let delta = DeltaSeq::constant(Rat::new(num, 4), 2).unwrap();
        let half = delta.halved();
        let inner = gowers_lab::approx::expanded_payoff(&space, &x, &half, false).unwrap();
        if expand_sequence_membership(&space, &seq, &inner, &half).unwrap() {
            prop_assert!(expand_sequence_membership(&space, &seq, &x, &delta).unwrap());
        }
    }
}

#[test]
fn meet_witnesses_approximate_their_first_argument() {
    for space in instances() {
        let pal = space.palette();
        for p in 0..pal.len() {
            for q in 0..pal.len() {
                if space.leq_star(p, q) {
                    if let Some(r) = space.meet_witness(p, q) {
                        assert!(space.lessapprox(r, p), "{} {p} {q}", space.name);
                    }
                }
            }
        }
    }
}

#[test]
fn singleton_chains_fuse_below_their_element() {
    for space in instances() {
        for p in 0..space.num_subspaces() {
            let star = space.fusion_witness(&[p]).unwrap();
            assert!(space.leq_star(star, p), "{} {p}", space.name);
        }
    }
}

#[test]
fn approximate_admission_reads_only_the_last_point() {
    let space = grid();
    let n = space.num_points();
    for p in 0..space.num_subspaces() {
        for x in 0..n {
            let alone = space.admits(&[x], p);
            for y in 0..n {
                assert_eq!(space.admits(&[y, x], p), alone);
            }
        }
    }
}

#[test]
fn built_instances_pass_the_axioms() {
    for space in instances() {
        let rep = check_axioms(&space, 2, BUDGET).unwrap();
        assert!(rep.passed(), "{}: {rep:?}", space.name);
    }
}

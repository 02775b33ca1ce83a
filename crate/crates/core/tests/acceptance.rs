//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::result::Result;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use gowers_lab::approx::*;
use gowers_lab::instances::*;
use gowers_lab::reductions::*;
use gowers_lab::scenario::{random_payoff, run_scenario, RunOptions};
use gowers_lab::space::{point_set, PointData};
use gowers_lab::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, u64, Check); 8] = [
        ("axiom suite", 60, axiom_suite),
        ("solver oracle equivalence", 300, solver_oracle),
        ("reduction correctness", 900, reduction_correctness),
        ("pigeonhole counterexamples", 30, pigeonhole_counterexamples),
        ("support payoff shadow", 120, support_payoff_shadow),
        ("homogeneous set extraction", 300, homogeneous_extraction),
        ("expansion laws", 60, expansion_laws),
        ("determinism", 600, determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(d) if took > Duration::from_secs(*limit) => Err(format!("{d}; over the {limit} s limit")),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {n} ({name}): PASS in {:.1}s: {detail}", took.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL in {:.1}s: {detail}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn block_palette() -> PaletteRule {
    PaletteRule::TailBlockSubspaces {
        m: 1,
        max_blocks: 2,
        full: false,
    }
}

fn grid(dim: usize, step: Rat, slack: usize) -> SpaceInstance {
    build_instance(&InstanceSpec::GridSphere {
        dim,
        step,
        slack,
        palette: block_palette(),
    })
    .unwrap()
}

fn coords(space: &SpaceInstance, x: PointId) -> Vec<Rat> {
    match &space.point(x).data {
        PointData::Real(v) => v.clone(),
        PointData::Vector(v) => v.iter().map(|&c| Rat::from_integer(i64::from(c))).collect(),
        _ => panic!("point {x} has no coordinates"),
    }
}

fn vector(space: &SpaceInstance, x: PointId) -> Vec<u8> {
    match &space.point(x).data {
        PointData::Vector(v) => v.clone(),
        _ => panic!("point {x} is not a vector"),
    }
}

// 1 ------------------------------------------------------------------------

fn axiom_suite() -> Result<String, String> {
    let mut specs = Vec::new();
    for n in [4, 7, 10] {
        for slack in [0, n / 2] {
            specs.push(InstanceSpec::mathias_silver(n, slack, 1));
        }
    }
    for field in [2, 3] {
        for dim in 2..=4 {
            specs.push(InstanceSpec::rosendal(field, dim, 0));
            specs.push(InstanceSpec::rosendal(field, dim, 1));
        }
    }
    for dim in 2..=4 {
        specs.push(InstanceSpec::ProjectiveRosendal {
            field: 3,
            dim,
            slack: 0,
            palette: block_palette(),
        });
    }
    specs.push(InstanceSpec::GridSphere {
        dim: 2,
        step: Rat::new(1, 4),
        slack: 0,
        palette: block_palette(),
    });
    let mut checked = 0;
    for spec in &specs {
        let space = build_instance(spec).map_err(|e| e.to_string())?;
        for horizon in 1..=3 {
            let rep = check_axioms(&space, horizon, u64::MAX).map_err(|e| format!("{}: {e}", space.name))?;
            let bad: Vec<_> = std::iter::once(&rep.preorders)
                .chain(&rep.axioms)
                .filter(|c| !c.passed())
                .collect();
            ensure(bad.is_empty(), || format!("{} at horizon {horizon}: {bad:?}", space.name))?;
            checked += 1;
        }
    }
    Ok(format!("{} instances, {checked} instance-horizon pairs, all five axioms hold", specs.len()))
}

// 2 ------------------------------------------------------------------------

fn solver_oracle() -> Result<String, String> {
    let kinds = [GameKind::A, GameKind::B, GameKind::F, GameKind::G, GameKind::K, GameKind::SF];
    let mut games = 0;
    let mut wins = [0usize; 2];
    let small = ms(4, 2, 1);
    let small = small.clone().with_system(PrecompactSystem::singletons(&small)).unwrap();
    let medium = ms(5, 3, 1);
    let medium = medium.clone().with_system(PrecompactSystem::singletons(&medium)).unwrap();
    for kind in kinds {
        for horizon in [1, 2] {
            let space = if horizon == 1 || !kind.is_adversarial() { &medium } else { &small };
            for seed in 0..5u64 {
                let game = Game::new(kind, root(space), horizon);
                let len = game.outcome_len();
                let alphabet = if kind == GameKind::SF {
                    space.system().unwrap().len()
                } else {
                    space.num_points()
                };
                let density = Rat::new(1 + (seed as i64 % 3), 4);
                let table = random_payoff("random", alphabet, len, density, seed * 31 + horizon as u64);
                let x = if kind == GameKind::SF {
                    Payoff::on_sets("random", len, move |s| table.accepts(s))
                } else {
                    table
                };
                let owner = if seed % 2 == 0 { Player::I } else { Player::II };
                let fast = solve(space, game, &x, owner, BUDGET).map_err(|e| e.to_string())?;
                let slow = naive_solve_oracle(space, game, &x, owner, u64::MAX).map_err(|e| e.to_string())?;
                ensure(fast.winner == slow.winner, || {
                    format!("{kind:?} h{horizon} seed {seed}: solve says {:?}, oracle {:?}", fast.winner, slow.winner)
                })?;
                wins[usize::from(fast.winner == Player::II)] += 1;
                games += 1;
            }
        }
    }
    ensure(games >= 50, || format!("only {games} games"))?;
    Ok(format!("{games} games agree (I wins {}, II wins {})", wins[0], wins[1]))
}

// 3 ------------------------------------------------------------------------

#[derive(Default)]
struct Tally {
    verified: usize,
    exhausted: usize,
    skipped: usize,
}

/// Records a transformation result. Exhaustion errors are explicit
/// terminations; any other error or a strategy that loses a play fails.
fn record(
    tally: &mut Tally,
    what: &str,
    space: &SpaceInstance,
    out: gowers_lab::Result<(Strategy, Payoff)>,
) -> Result<(), String> {
    match out {
        Ok((strategy, target)) => {
            let rep = verify_strategy(space, &strategy, &target, VerificationMode::Exhaustive)
                .map_err(|e| format!("{what}: verification error {e}"))?;
            ensure(rep.fraction == 1.0, || format!("{what}: output wins {} of {} plays", rep.wins, rep.plays))?;
            tally.verified += 1;
            Ok(())
        }
        Err(Error::FiniteExhaustion { .. } | Error::PigeonholeUnavailable { .. } | Error::ExhaustionBudget { .. }) => {
            tally.exhausted += 1;
            Ok(())
        }
        Err(e) => Err(format!("{what}: {e}")),
    }
}

fn solved_for(space: &SpaceInstance, game: Game, x: &Payoff, owner: Player) -> Option<VerifiedStrategy> {
    let r = solve(space, game, x, owner, BUDGET).unwrap();
    if !r.goal_won() {
        return None;
    }
    Some(verify_exhaustive(space, r.strategy, &r.target).unwrap())
}

fn winner_of(space: &SpaceInstance, game: Game, x: &Payoff) -> VerifiedStrategy {
    let (_, v) = solved(space, game, x, Player::I);
    v
}

fn pair(v: VerifiedStrategy) -> (Strategy, Payoff) {
    let t = v.target().clone();
    (v.into_inner(), t)
}

fn reduction_correctness() -> Result<String, String> {
    let mut tallies: Vec<(&str, Tally)> = Vec::new();
    let mut t = Tally::default();

    // Kastanas, both owners, plus the A to B transfer.
    let mut tb = Tally::default();
    let mut owners = [0usize; 2];
    let mut kastanas_cases: Vec<(SpaceInstance, usize, Payoff)> = Vec::new();
    for seed in 0..8u64 {
        kastanas_cases.push((ms(6, 3, 1), 1, random_payoff("random", 6, 2, Rat::new(1, 2), seed)));
    }
    for seed in 0..3u64 {
        kastanas_cases.push((ms(4, 2, 1), 2, random_payoff("random", 4, 4, Rat::new(1, 2), 100 + seed)));
    }
    kastanas_cases.push((ms(10, 0, 1), 1, Payoff::new("y_0 odd", 2, |s| s[1] % 2 == 1)));
    kastanas_cases.push((ms(10, 9, 1), 1, Payoff::new("x_0 odd", 2, |s| s[0] % 2 == 1)));
    for (space, h, x) in &kastanas_cases {
        let tau = winner_of(space, Game::new(GameKind::K, root(space), *h), x);
        owners[usize::from(tau.owner() == Player::II)] += 1;
        let out = adversarial_from_kastanas(space, &tau);
        if let Ok(o) = &out {
            if o.strategy.owner() == Player::I {
                let b = transfer_a_to_b(space, &o.strategy).map(pair);
                record(&mut tb, "transfer_a_to_b", space, b)?;
            }
        }
        record(&mut t, "adversarial_from_kastanas", space, out.map(|o| pair(o.strategy)))?;
    }
    ensure(owners[0] > 0 && owners[1] > 0, || format!("Kastanas owners covered: {owners:?}"))?;
    tallies.push(("adversarial_from_kastanas", t));
    tallies.push(("transfer_a_to_b", tb));

    // Tilde pipeline.
    let mut t = Tally::default();
    for (space, h, seeds) in [(ms(6, 4, 1), 1, 0..8u64), (ms(4, 2, 1), 2, 0..3u64)] {
        for seed in seeds {
            let n = space.num_points();
            let x = random_payoff("random", n, h, Rat::new(1, 2), 200 + seed);
            let p = root(&space);
            let (tilde, tx) = tilde_lift(&space, &x);
            if let Some(a) = solved_for(&tilde, Game::new(GameKind::A, p, h), &tx.complement(), Player::I) {
                record(&mut t, "tilde_a_to_f", &space, tilde_a_to_f(&space, &a, &x).map(pair))?;
            }
            if let Some(b) = solved_for(&tilde, Game::new(GameKind::B, p, h), &tx, Player::II) {
                record(&mut t, "tilde_b_to_g", &space, tilde_b_to_g(&space, &tilde, &b, &x).map(pair))?;
            }
        }
    }
    tallies.push(("tilde pipeline", t));

    // Unfolding.
    let mut t = Tally::default();
    let space = ms(6, 5, 1);
    let unfolded = unfold_space(&space);
    for k in [1, 2] {
        for seed in 0..6u64 {
            let decorated = random_payoff("decorated", unfolded.num_points(), k, Rat::new(1, 3), 300 + seed);
            let game = Game::new(GameKind::F, root(&space), k);
            match solved_for(&unfolded, game, &decorated.complement(), Player::I) {
                Some(tau) => {
                    let out = unfold_asymptotic(&space, &unfolded, &tau, &decorated).map(|(v, _)| pair(v));
                    record(&mut t, "unfold_asymptotic", &space, out)?;
                }
                None => t.skipped += 1,
            }
        }
    }
    tallies.push(("unfold_asymptotic", t));

    // F to G and back.
    let mut tg = Tally::default();
    let mut ta = Tally::default();
    for seed in 0..10u64 {
        let space = ms(6, 4, 1);
        let p = root(&space);
        let x = random_payoff("random", 6, 2, Rat::new(3, 4), 400 + seed);
        match solved_for(&space, Game::new(GameKind::F, p, 2), &x, Player::I) {
            Some(tau) => record(&mut tg, "gowers_from_asymptotic", &space, gowers_from_asymptotic(&space, &tau).map(pair))?,
            None => tg.skipped += 1,
        }
        match solved_for(&space, Game::new(GameKind::G, p, 2), &x, Player::II) {
            Some(sigma) => {
                let out = asymptotic_from_gowers(&space, &sigma, BUDGET).map(|o| pair(o.strategy));
                record(&mut ta, "asymptotic_from_gowers", &space, out)?;
            }
            None => ta.skipped += 1,
        }
    }
    {
        let space = ms(9, 8, 1);
        let x = Payoff::new("both points even", 2, |s| s[0] % 2 == 0 && s[1] % 2 == 0);
        let tau = solved_for(&space, Game::new(GameKind::F, root(&space), 2), &x, Player::I).unwrap();
        record(&mut tg, "gowers_from_asymptotic", &space, gowers_from_asymptotic(&space, &tau).map(pair))?;
        let space = ms(8, 6, 1);
        let x = Payoff::new("both points at least 6", 2, |s| s[0] >= 6 && s[1] >= 6);
        let sigma = solved_for(&space, Game::new(GameKind::G, root(&space), 2), &x, Player::II).unwrap();
        let out = asymptotic_from_gowers(&space, &sigma, BUDGET).map(|o| pair(o.strategy));
        record(&mut ta, "asymptotic_from_gowers", &space, out)?;
    }
    tallies.push(("gowers_from_asymptotic", tg));
    tallies.push(("asymptotic_from_gowers", ta));

    // Homogeneous sets. The extraction checks its own output exhaustively.
    let mut t = Tally::default();
    let space = ms(8, 6, 1);
    for seed in 0..12u64 {
        let x = random_payoff("random", 8, 2, Rat::new(4, 5), 500 + seed);
        match solved_for(&space, Game::new(GameKind::F, root(&space), 2), &x, Player::I) {
            Some(tau) => match homogeneous_from_asymptotic(&space, &tau) {
                Ok(out) => {
                    for (i, &a) in out.set.iter().enumerate() {
                        for &b in &out.set[i + 1..] {
                            ensure(tau.target().accepts(&[a, b]), || format!("homogeneous {:?} rejects {a},{b}", out.set))?;
                        }
                    }
                    t.verified += 1;
                }
                Err(Error::FiniteExhaustion { .. }) => t.exhausted += 1,
                Err(e) => return Err(format!("homogeneous_from_asymptotic: {e}")),
            },
            None => t.skipped += 1,
        }
    }
    tallies.push(("homogeneous_from_asymptotic", t));

    // Lifts in the four directions.
    let half = Rat::new(1, 2);
    for dir in [LiftDirection::FI, LiftDirection::GII, LiftDirection::AI, LiftDirection::BII] {
        let mut t = Tally::default();
        for slack in [0, 1] {
            let space = grid(2, Rat::new(1, 4), slack);
            let n = space.num_points();
            let dense = point_set(
                n,
                (0..n).filter(|&x| coords(&space, x).iter().all(|c| (c * Rat::from_integer(2)).is_integer())),
            );
            for h in [1, 2] {
                for seed in 0..4u64 {
                    let len = if dir.kind().is_adversarial() { 2 * h } else { h };
                    let marks = random_payoff("marks", n, 1, Rat::new(2, 3), 600 + seed);
                    let x = Payoff::new(format!("x_0 marked ({seed})"), len, move |s| marks.accepts(&s[..1]));
                    let disc = discretize(&space, &dense, &DeltaSeq::constant(half, len).unwrap()).unwrap();
                    let xr = disc.restrict(&x);
                    let aim = if dir.aims_at_payoff() { xr } else { xr.complement() };
                    match solved_for(&disc.space, Game::new(dir.kind(), root(&space), h), &aim, dir.owner()) {
                        Some(s) => record(&mut t, "lift_strategy", &space, lift_strategy(&space, &disc, &s, dir, &x))?,
                        None => t.skipped += 1,
                    }
                }
            }
        }
        let name: &'static str = match dir {
            LiftDirection::FI => "lift_strategy F-I",
            LiftDirection::GII => "lift_strategy G-II",
            LiftDirection::AI => "lift_strategy A-I",
            LiftDirection::BII => "lift_strategy B-II",
        };
        tallies.push((name, t));
    }

    // Approximate pigeonhole.
    let mut t = Tally::default();
    let space = grid(2, Rat::new(1, 4), 0);
    let n = space.num_points();
    let dense = point_set(
        n,
        (0..n).filter(|&x| coords(&space, x).iter().all(|c| (c * Rat::from_integer(2)).is_integer())),
    );
    for seed in 0..8u64 {
        let x = random_payoff("random", n, 1, Rat::new(2, 3), 700 + seed);
        match solved_for(&space, Game::new(GameKind::G, root(&space), 1), &x, Player::II) {
            Some(sigma) => {
                let out = approx_asymptotic_from_gowers(&space, &sigma, &dense, &DeltaSeq::parse(&["1/4"]).unwrap(), BUDGET)
                    .map(|o| (o.strategy.into_inner(), o.target));
                record(&mut t, "approx_asymptotic_from_gowers", &space, out)?;
            }
            None => t.skipped += 1,
        }
    }
    tallies.push(("approx_asymptotic_from_gowers", t));

    // Strong asymptotic strategies.
    let mut t = Tally::default();
    let rosendal = build_instance(&InstanceSpec::rosendal(2, 3, 1)).unwrap();
    let rosendal = rosendal.clone().with_system(PrecompactSystem::linear_spans(&rosendal).unwrap()).unwrap();
    let singles = ms(6, 4, 1);
    let singles = singles.clone().with_system(PrecompactSystem::singletons(&singles)).unwrap();
    for (space, h) in [(&rosendal, 1), (&singles, 2)] {
        for seed in 0..6u64 {
            let x = random_payoff("random", space.num_points(), h, Rat::new(3, 4), 800 + seed);
            match solved_for(space, Game::new(GameKind::F, root(space), h), &x, Player::I) {
                Some(tau) => {
                    let delta = DeltaSeq::constant(half, h).unwrap();
                    let out = strong_asymptotic_from_asymptotic(space, &tau, &delta, h, BUDGET).map(|o| (o.strategy, o.target));
                    record(&mut t, "strong_asymptotic_from_asymptotic", space, out)?;
                }
                None => t.skipped += 1,
            }
        }
    }
    tallies.push(("strong_asymptotic_from_asymptotic", t));

    let idle: Vec<&str> = tallies.iter().filter(|(_, t)| t.verified == 0).map(|(n, _)| *n).collect();
    ensure(idle.is_empty(), || format!("no verified output for {idle:?}"))?;
    let verified: usize = tallies.iter().map(|(_, t)| t.verified).sum();
    let exhausted: usize = tallies.iter().map(|(_, t)| t.exhausted).sum();
    let skipped: usize = tallies.iter().map(|(_, t)| t.skipped).sum();
    Ok(format!(
        "{} transformations, {verified} outputs verified, {exhausted} explicit exhaustions, {skipped} inputs without a winning strategy",
        tallies.len()
    ))
}

// 4 ------------------------------------------------------------------------

fn pigeonhole_counterexamples() -> Result<String, String> {
    let mut out = Vec::new();
    let cases = [
        (build_instance(&InstanceSpec::rosendal(3, 4, 0)).unwrap(), CounterexampleKind::FirstCoordOne),
        (
            build_instance(&InstanceSpec::ProjectiveRosendal {
                field: 3,
                dim: 4,
                slack: 0,
                palette: block_palette(),
            })
            .unwrap(),
            CounterexampleKind::ProjectiveFirstLast,
        ),
    ];
    for (space, kind) in cases {
        let n = space.num_points();
        // Independent description of the colouring.
        let oracle = point_set(
            n,
            (0..n).filter(|&x| {
                let v = vector(&space, x);
                let nz: Vec<u8> = v.iter().copied().filter(|&c| c != 0).collect();
                match kind {
                    CounterexampleKind::FirstCoordOne => nz[0] == 1,
                    _ => nz[0] == nz[nz.len() - 1],
                }
            }),
        );
        let set = counterexample_sets(&space, kind).map_err(|e| e.to_string())?.set.unwrap();
        ensure(set == oracle, || format!("{kind:?}: set differs from the coordinate description"))?;
        // A one-dimensional subspace of projective space is a single point.
        let lines: Vec<SubspaceId> = (0..space.num_subspaces())
            .filter(|&q| space.palette().members(q).count_ones(..) > 1)
            .collect();
        for &q in &lines {
            let members = space.palette().members(q);
            ensure(!members.is_disjoint(&set) && !members.is_subset(&set), || {
                format!("{kind:?}: {} lies on one side", space.palette().subspace(q).label)
            })?;
        }
        // Below a split subspace a single point still decides the set, so
        // the pigeonhole scan only fails everywhere when no subspace is a point.
        if lines.len() == space.num_subspaces() {
            let scan = pigeonhole_everywhere(&space, &set, PigeonholeMode::Exact);
            ensure(scan.iter().all(|(_, r)| r.is_err()), || format!("{kind:?}: some subspace decides the set"))?;
        }
        out.push(format!("{kind:?}: all {} subspaces with two or more points split", lines.len()));
    }
    Ok(out.join("; "))
}

// 5 ------------------------------------------------------------------------

fn support_payoff_shadow() -> Result<String, String> {
    // I may drop up to `slack` leading coordinates; try every slack.
    let mut rows = Vec::new();
    let mut pass = false;
    for slack in 0..4 {
        let space = build_instance(&InstanceSpec::rosendal(5, 4, slack)).unwrap();
        let ce = counterexample_sets(&space, CounterexampleKind::PhiSupport).map_err(|e| e.to_string())?;
        let r = solve(&space, Game::new(GameKind::F, root(&space), 2), &ce.payoff, Player::I, BUDGET)
            .map_err(|e| e.to_string())?;
        let scan = block_pair_scan(&space, &ce.payoff, 2).map_err(|e| e.to_string())?;
        pass |= r.goal_won() && scan.inside.is_empty() && scan.checked > 0;
        rows.push(format!(
            "slack {slack}: I wins F {}, {} of {} subspaces with two or more blocks inside",
            r.goal_won(),
            scan.inside.len(),
            scan.checked
        ));
    }
    let detail = rows.join("; ");
    ensure(pass, || detail.clone())?;
    Ok(detail)
}

// 6 ------------------------------------------------------------------------

/// Largest set all of whose increasing pairs `x` accepts, by exhaustive
/// subset search.
fn brute_max_homogeneous(n: usize, x: &Payoff) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << n) {
        if (mask.count_ones() as usize) <= best.len() {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let ok = set
            .iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| x.accepts(&[a, b])));
        if ok {
            best = set;
        }
    }
    best
}

fn homogeneous_extraction() -> Result<String, String> {
    let (n, t) = (12, 10);
    let space = ms(n, t, 1);
    let core: Vec<usize> = (t..n).collect();
    let mut i_wins = 0;
    for seed in 0..100u64 {
        let x = random_payoff(format!("random {seed}"), n, 2, Rat::new(4, 5), 9000 + seed);
        let r = solve(&space, Game::new(GameKind::F, root(&space), 2), &x, Player::I, BUDGET).map_err(|e| e.to_string())?;
        // II can always answer inside the forced core, and I can play it.
        let oracle = core.iter().all(|&a| core.iter().all(|&b| x.accepts(&[a, b])));
        ensure(r.goal_won() == oracle, || format!("seed {seed}: solver and core characterization disagree"))?;
        let brute = brute_max_homogeneous(n, &x);
        if !r.goal_won() {
            continue;
        }
        i_wins += 1;
        let tau = verify_exhaustive(&space, r.strategy, &r.target).map_err(|e| e.to_string())?;
        let out = homogeneous_from_asymptotic(&space, &tau).map_err(|e| format!("seed {seed}: {e}"))?;
        for (i, &a) in out.set.iter().enumerate() {
            for &b in &out.set[i + 1..] {
                ensure(x.accepts(&[a, b]), || format!("seed {seed}: {:?} has rejected pair {a},{b}", out.set))?;
            }
        }
        ensure(out.set.len() >= 2 && brute.len() >= out.set.len(), || {
            format!("seed {seed}: extracted {:?}, brute force best {:?}", out.set, brute)
        })?;
    }
    ensure(i_wins > 0, || "I never wins; the check is vacuous".into())?;
    Ok(format!("100 payoffs, I wins {i_wins}; every extracted set is homogeneous and brute force agrees"))
}

// 7 ------------------------------------------------------------------------

/// `seq` is within `delta` of some accepted sequence, by enumeration.
fn brute_expanded(space: &SpaceInstance, x: &dyn Fn(&[usize]) -> bool, seq: &[usize], delta: &[Rat]) -> bool {
    let n = space.num_points();
    let mut y = vec![0usize; seq.len()];
    loop {
        if (0..seq.len()).all(|i| space.distance(seq[i], y[i]).unwrap() <= delta[i]) && x(&y) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == y.len() {
                return false;
            }
            y[i] += 1;
            if y[i] < n {
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

fn expansion_laws() -> Result<String, String> {
    let instances = [
        grid(2, Rat::new(1, 4), 0),
        grid(2, Rat::new(1, 2), 0),
        grid(3, Rat::new(1, 2), 0),
    ];
    let mut sequences = 0;
    for space in &instances {
        let n = space.num_points();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        // Nets cover at every resolution.
        for _ in 0..50 {
            let set = point_set(n, (0..n).filter(|_| rng.gen_bool(0.5)));
            let res = Rat::new(rng.gen_range(1..9), 4);
            let net = Net::greedy(space, &set, res);
            for x in set.ones() {
                ensure(net.members.iter().any(|&m| space.distance(x, m).unwrap() <= res), || {
                    format!("{}: net at {res} misses {x}", space.name)
                })?;
            }
        }
        for _ in 0..1000 {
            let accepted: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
            let acc = accepted.clone();
            let x = Payoff::new("x", 2, move |s| acc[s[0]] && acc[s[1]]);
            let seq = [rng.gen_range(0..n), rng.gen_range(0..n)];
            let delta = DeltaSeq::new(vec![Rat::new(rng.gen_range(1..9), 4), Rat::new(rng.gen_range(1..9), 4)]).unwrap();
            let half = delta.halved();
            let pred = |y: &[usize]| accepted[y[0]] && accepted[y[1]];
            let in_full = expand_sequence_membership(space, &seq, &x, &delta).map_err(|e| e.to_string())?;
            ensure(in_full == brute_expanded(space, &pred, &seq, delta.values()), || {
                format!("{}: membership of {seq:?} disagrees with enumeration", space.name)
            })?;
            let inner = expanded_payoff(space, &x, &half, false).map_err(|e| e.to_string())?;
            let in_nested = expand_sequence_membership(space, &seq, &inner, &half).map_err(|e| e.to_string())?;
            ensure(!in_nested || in_full, || format!("{}: {seq:?} in the nested expansion only", space.name))?;
            // Monotone in the radius.
            let wider = DeltaSeq::new(delta.values().iter().map(|d| d + Rat::new(1, 4)).collect()).unwrap();
            let in_wider = expand_sequence_membership(space, &seq, &x, &wider).map_err(|e| e.to_string())?;
            ensure(!in_full || in_wider, || format!("{}: widening Δ lost {seq:?}", space.name))?;
            sequences += 1;
        }
    }
    Ok(format!("{} grid instances, {sequences} sequences, nets cover", instances.len()))
}

// 8 ------------------------------------------------------------------------

fn determinism() -> Result<String, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    for p in &paths {
        let a = run_scenario(p, &RunOptions::default()).to_json();
        let b = run_scenario(p, &RunOptions::default()).to_json();
        ensure(a == b, || format!("{} differs between runs", p.display()))?;
    }
    Ok(format!("{} bundled scenarios reproduce byte for byte", paths.len()))
}

use super::{require, tau_of_sequence};
use crate::error::{Error, Result};
use crate::games::{Game, GameKind, Move, Player};
use crate::payoff::Payoff;
use crate::space::{Admission, Point, PointData, SpaceInstance};
use crate::strategy::{verify_exhaustive, Strategy, VerifiedStrategy};

/// The space over `X × {0, 1}`: point `2x + b` is `x` with bit `b`, and a
/// history is admitted iff its projection is.
pub fn unfold_space(space: &SpaceInstance) -> SpaceInstance {
    let n = space.num_points();
    let mut points = Vec::with_capacity(2 * n);
    for x in 0..n {
        for bit in 0..2u8 {
            points.push(Point {
                label: format!("{}:{bit}", space.point(x).label),
                data: PointData::Decorated { base: x, bit },
            });
        }
    }
    let admission = Admission::Projected {
        inner: Box::new(space.admission().clone()),
        map: (0..2 * n).map(|i| i / 2).collect(),
        preimage: (0..n).map(|x| vec![2 * x, 2 * x + 1]).collect(),
    };
    space.derived("unfolded", points, admission, None)
}

/// Projects a payoff on decorated points: accepts `s` iff some choice of bits
/// makes the decorated sequence accepted.
pub fn projected_payoff(decorated: &Payoff) -> Payoff {
    let inner = decorated.clone();
    Payoff::new(format!("proj({})", decorated.name()), decorated.len(), move |s| {
        let k = s.len();
        (0u64..1 << k).any(|bits| {
            let d: Vec<usize> = s
                .iter()
                .enumerate()
                .map(|(i, &x)| 2 * x + ((bits >> i) & 1) as usize)
                .collect();
            inner.accepts(&d)
        })
    })
}

/// From I's strategy in `F'_q` of the unfolded space toward the complement of
/// `decorated`, builds I's strategy in `F_q` of `space` toward the complement
/// of its projection: each subspace is a common `⪅`-lower bound of the
/// answers to every bit decoration of the history.
pub fn unfold_asymptotic(
    space: &SpaceInstance,
    unfolded: &SpaceInstance,
    tau_prime: &VerifiedStrategy,
    decorated: &Payoff,
) -> Result<(VerifiedStrategy, Payoff)> {
    require(tau_prime, GameKind::F, Player::I)?;
    if tau_prime.target().name() != decorated.complement().name() {
        return Err(Error::GameMismatch(format!(
            "strategy was verified toward {:?}, expected the complement of {:?}",
            tau_prime.target().name(),
            decorated.name()
        )));
    }
    let g = tau_prime.game();
    let root = g.root;
    let pal = space.palette();
    let game = Game::new(GameKind::F, root, g.horizon);
    let strat = Strategy::from_fn(space, Player::I, game, |pos| {
        let s = &pos.outcome_prefix;
        let mut items = Vec::with_capacity(1 << s.len());
        for bits in 0u64..1 << s.len() {
            let d: Vec<usize> = s
                .iter()
                .enumerate()
                .map(|(i, &x)| 2 * x + ((bits >> i) & 1) as usize)
                .collect();
            let p = tau_of_sequence(unfolded, tau_prime.strategy(), &d)?
                .ok_or_else(|| Error::Invariant(format!("decorated history {d:?} is not reachable")))?;
            items.push(p);
        }
        items.sort_unstable();
        items.dedup();
        let sub = pal
            .lessapprox_lower_bound(&items)
            .filter(|&p| pal.lessapprox(p, root))
            .ok_or_else(|| {
                Error::exhaustion(
                    "unfold",
                    format!("no common ⪅-lower bound for {} subspaces after {s:?}", items.len()),
                )
            })?;
        Ok(Move::Sub { sub })
    })?;
    let target = projected_payoff(decorated).complement();
    Ok((verify_exhaustive(space, strat, &target)?, target))
}

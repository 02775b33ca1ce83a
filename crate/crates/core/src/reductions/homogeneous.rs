use serde::Serialize;

use super::{require, tau_of_sequence};
use crate::error::{Error, Result};
use crate::games::{GameKind, Player};
use crate::space::{InstanceKind, SpaceInstance};
use crate::strategy::VerifiedStrategy;

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneousOutput {
    /// `n_0 < n_1 < …`, every increasing subsequence of the horizon's length
    /// accepted.
    pub set: Vec<usize>,
    pub subsequences_checked: u64,
}

/// Calls `f` on every increasing index tuple of length `len` below `n`.
fn for_each_increasing(n: usize, len: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(n: usize, len: usize, start: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if acc.len() == len {
            return f(acc);
        }
        for i in start..n {
            acc.push(i);
            let keep = go(n, len, i + 1, acc, f);
            acc.pop();
            if !keep {
                return false;
            }
        }
        true
    }
    go(n, len, 0, &mut Vec::with_capacity(len), f)
}

/// Builds `n_0 < n_1 < …` inside `universe` (sorted): `n_0` is the first
/// element at least `tau0(∅)`, and `n_{i+1}` the first element at least
/// `n_i + 1` and every `tau0(s)` over subsequences `s` of length below
/// `horizon` ending in `n_i`. Stops when the universe runs out.
pub fn homogeneous_from_thresholds(
    universe: &[usize],
    horizon: usize,
    mut tau0: impl FnMut(&[usize]) -> Result<usize>,
) -> Result<Vec<usize>> {
    let first_from = |bound: usize| universe.iter().copied().find(|&m| m >= bound);
    let mut ns = Vec::new();
    let Some(n0) = first_from(tau0(&[])?) else {
        return Ok(ns);
    };
    ns.push(n0);
    loop {
        let i = ns.len() - 1;
        let mut bound = ns[i] + 1;
        for len in 0..horizon.saturating_sub(1) {
            // `len` earlier entries followed by `n_i`.
            let mut err = None;
            for_each_increasing(i, len, &mut |idx| {
                let mut s: Vec<usize> = idx.iter().map(|&j| ns[j]).collect();
                s.push(ns[i]);
                match tau0(&s) {
                    Ok(t) => {
                        bound = bound.max(t);
                        true
                    }
                    Err(e) => {
                        err = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        match first_from(bound) {
            Some(n) => ns.push(n),
            None => return Ok(ns),
        }
    }
}

/// On a Mathias–Silver instance, turns I's winning strategy in `F_M` into a
/// set `N ⊆ M` all of whose increasing subsequences of the horizon's length
/// are accepted.
pub fn homogeneous_from_asymptotic(space: &SpaceInstance, tau: &VerifiedStrategy) -> Result<HomogeneousOutput> {
    require(tau, GameKind::F, Player::I)?;
    if !matches!(space.kind, InstanceKind::MathiasSilver { .. }) {
        return Err(Error::KindMismatch {
            kind: "homogeneous".into(),
            reason: "needs a Mathias–Silver instance".into(),
        });
    }
    let game = tau.game();
    let pal = space.palette();
    let n = space.num_points();
    let universe: Vec<usize> = pal.members(game.root).ones().collect();
    let k = game.horizon;
    let set = homogeneous_from_thresholds(&universe, k, |s| {
        let p = tau_of_sequence(space, tau.strategy(), s)?
            .ok_or_else(|| Error::Invariant(format!("sequence {s:?} is not a legal answer sequence")))?;
        // The least `a` with every element of `M` from `a` on inside `τ(s)`.
        let members = pal.members(p);
        let mut a = n;
        while a > 0 && (!universe.contains(&(a - 1)) || members.contains(a - 1)) {
            a -= 1;
        }
        Ok(a)
    })?;
    if set.len() < k {
        return Err(Error::exhaustion(
            "homogeneous",
            format!("only {} points fit in the universe, fewer than the horizon {k}", set.len()),
        ));
    }
    let mut checked = 0u64;
    let mut bad = None;
    for_each_increasing(set.len(), k, &mut |idx| {
        checked += 1;
        let s: Vec<usize> = idx.iter().map(|&i| set[i]).collect();
        if tau.target().accepts(&s) {
            true
        } else {
            bad = Some(s);
            false
        }
    });
    if let Some(s) = bad {
        return Err(Error::NotVerified(format!("subsequence {s:?} of {set:?} is rejected")));
    }
    Ok(HomogeneousOutput {
        set,
        subsequences_checked: checked,
    })
}

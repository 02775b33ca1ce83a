use serde::{Deserialize, Serialize};

use super::rosendal::{first_nonzero, last_nonzero, max_support, min_support};
use crate::error::{Error, Result};
use crate::payoff::Payoff;
use crate::space::{point_set, InstanceKind, PointData, PointSet, Shape, SpaceInstance, SubspaceId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// Vectors whose first nonzero coordinate is 1.
    FirstCoordOne,
    /// Lines whose first and last nonzero coordinates agree.
    ProjectiveFirstLast,
    /// Pairs `(x, y)` with `φ(N(x)) < min supp(y)`, `N(x)` the first nonzero
    /// coordinate of `x` and `φ(k) = k - 1`.
    PhiSupport,
}

impl CounterexampleKind {
    pub fn name(self) -> &'static str {
        match self {
            CounterexampleKind::FirstCoordOne => "first_coord_one",
            CounterexampleKind::ProjectiveFirstLast => "projective_first_last",
            CounterexampleKind::PhiSupport => "phi_support",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    /// The colouring set, for the single-point counterexamples.
    pub set: Option<PointSet>,
    /// `x_0 ∈ set` for single-point kinds; the pair payoff for `PhiSupport`.
    pub payoff: Payoff,
}

fn vector(space: &SpaceInstance, x: usize) -> &[u8] {
    match &space.point(x).data {
        PointData::Vector(v) => v,
        _ => unreachable!("vector instances carry vector points"),
    }
}

fn mismatch(kind: CounterexampleKind, reason: &str) -> Error {
    Error::KindMismatch {
        kind: kind.name().into(),
        reason: reason.into(),
    }
}

pub fn counterexample_sets(space: &SpaceInstance, kind: CounterexampleKind) -> Result<Counterexample> {
    let n = space.num_points();
    match kind {
        CounterexampleKind::FirstCoordOne => {
            let InstanceKind::Rosendal { field, .. } = space.kind else {
                return Err(mismatch(kind, "needs a Rosendal instance on vectors"));
            };
            if field < 3 {
                return Err(mismatch(kind, "over F_2 every vector has first coordinate 1"));
            }
            let set = point_set(n, (0..n).filter(|&x| first_nonzero(vector(space, x)) == Some(1)));
            let members = set.clone();
            Ok(Counterexample {
                kind,
                set: Some(set),
                payoff: Payoff::new("x0 has first nonzero coordinate 1", 1, move |s| members.contains(s[0])),
            })
        }
        CounterexampleKind::ProjectiveFirstLast => {
            let InstanceKind::ProjectiveRosendal { field, .. } = space.kind else {
                return Err(mismatch(kind, "needs a projective Rosendal instance"));
            };
            if field < 3 {
                return Err(mismatch(kind, "over F_2 every line has equal first and last coordinates"));
            }
            let mut set = PointSet::with_capacity(n);
            for x in 0..n {
                let v = vector(space, x);
                if first_nonzero(v) == last_nonzero(v) {
                    set.insert(x);
                }
            }
            let members = set.clone();
            Ok(Counterexample {
                kind,
                set: Some(set),
                payoff: Payoff::new("x0 has equal first and last coordinates", 1, move |s| {
                    members.contains(s[0])
                }),
            })
        }
        CounterexampleKind::PhiSupport => {
            if !matches!(space.kind, InstanceKind::Rosendal { .. }) {
                return Err(mismatch(kind, "needs a Rosendal instance on vectors"));
            }
            Ok(Counterexample {
                kind,
                set: None,
                payoff: phi_support_payoff(space),
            })
        }
    }
}

/// `φ(N(x_0)) < min supp(x_1)` with `φ(k) = k - 1`.
pub fn phi_support_payoff(space: &SpaceInstance) -> Payoff {
    let n = space.num_points();
    let phi: Vec<usize> = (0..n)
        .map(|x| first_nonzero(vector(space, x)).map(|k| k as usize - 1).unwrap_or(0))
        .collect();
    let supp: Vec<usize> = (0..n).map(|x| min_support(vector(space, x))).collect();
    Payoff::new("phi(N(x0)) < min supp(x1)", 2, move |s| phi[s[0]] < supp[s[1]])
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockPairScan {
    pub min_blocks: usize,
    pub checked: usize,
    /// Subspaces all of whose length-2 block sequences the payoff accepts.
    pub inside: Vec<SubspaceId>,
}

/// Checks every block subspace with at least `min_blocks` blocks for one whose
/// block pairs `(x, y)`, `max supp x < min supp y`, all lie in `payoff`.
pub fn block_pair_scan(space: &SpaceInstance, payoff: &Payoff, min_blocks: usize) -> Result<BlockPairScan> {
    if !matches!(space.kind, InstanceKind::Rosendal { .. } | InstanceKind::ProjectiveRosendal { .. }) {
        return Err(Error::KindMismatch {
            kind: "block_pair_scan".into(),
            reason: "needs a block subspace palette over vectors".into(),
        });
    }
    if payoff.len() != 2 {
        return Err(Error::GameMismatch("block pair scans read payoffs of length 2".into()));
    }
    let pal = space.palette();
    let mut checked = 0;
    let mut inside = Vec::new();
    for y in 0..pal.len() {
        let Shape::Blocks { block_points, .. } = &pal.subspace(y).shape else {
            continue;
        };
        if block_points.len() < min_blocks {
            continue;
        }
        checked += 1;
        let members: Vec<usize> = pal.members(y).ones().collect();
        let all = members.iter().all(|&a| {
            members.iter().all(|&b| {
                max_support(vector(space, a)) >= min_support(vector(space, b)) || payoff.accepts(&[a, b])
            })
        });
        if all {
            inside.push(y);
        }
    }
    Ok(BlockPairScan {
        min_blocks,
        checked,
        inside,
    })
}

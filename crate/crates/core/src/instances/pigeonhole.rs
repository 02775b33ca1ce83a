use serde::Serialize;

use crate::approx::expand_point_set;
use crate::error::{Error, Result, SplitWitness};
use crate::rat::Rat;
use crate::space::{PointId, PointSet, SpaceInstance, SubspaceId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Everything admitted lies in the set (or its expansion).
    Inside,
    /// Nothing admitted lies in the set.
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PigeonholeMode {
    Exact,
    /// `q ⊆ Aᶜ` or `q ⊆ (A)_δ`.
    Approximate(Rat),
}

/// Scans `q <= p` in canonical order for a subspace whose continuations of
/// `history` all fall in `set` or all avoid it.
pub fn pigeonhole(
    space: &SpaceInstance,
    p: SubspaceId,
    history: &[PointId],
    set: &PointSet,
    mode: PigeonholeMode,
) -> Result<(Side, SubspaceId)> {
    let inside_target = match mode {
        PigeonholeMode::Exact => set.clone(),
        PigeonholeMode::Approximate(delta) => expand_point_set(space, set, delta)?,
    };
    let mut witnesses = Vec::new();
    for q in space.palette().below(p) {
        let adm = space.next_points(history, q);
        if adm.is_subset(&inside_target) {
            return Ok((Side::Inside, q));
        }
        if adm.is_disjoint(set) {
            return Ok((Side::Outside, q));
        }
        let inside = adm.intersection(set).next();
        let outside = adm.difference(&inside_target).next();
        if let (Some(inside), Some(outside)) = (inside, outside) {
            witnesses.push(SplitWitness {
                subspace: q,
                inside,
                outside,
            });
        }
    }
    Err(Error::PigeonholeUnavailable { witnesses })
}

/// Runs [`pigeonhole`] below every palette element with the empty history.
pub fn pigeonhole_everywhere(
    space: &SpaceInstance,
    set: &PointSet,
    mode: PigeonholeMode,
) -> Vec<(SubspaceId, Result<(Side, SubspaceId)>)> {
    (0..space.num_subspaces())
        .map(|p| (p, pigeonhole(space, p, &[], set, mode)))
        .collect()
}

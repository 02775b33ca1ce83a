//! Metric machinery: expansions, nets, discretization with strategy lifts,
//! the approximate pigeonhole construction, precompact systems and the strong
//! asymptotic game.

mod discretize;
mod pigeonhole;
mod strong;
mod system;

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::payoff::Payoff;
use crate::rat::{format_rat, parse_rat, Rat};
use crate::space::{PointId, PointSet, SpaceInstance};

pub use discretize::{discretize, lift_strategy, Discretized, LiftDirection};
pub use pigeonhole::{approx_asymptotic_from_gowers, ApproxAsymptoticOutput};
pub use strong::{strong_asymptotic_from_asymptotic, StrongAsymptoticOutput};
pub use system::{
    block_sequence_payoff, enumerate_block_sequences, for_each_block_partition, PrecompactSystem, SystemSpec,
};

/// Positive rationals `Δ_0, …, Δ_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSeq {
    values: Vec<Rat>,
}

impl DeltaSeq {
    pub fn new(values: Vec<Rat>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| **v <= Rat::from_integer(0)) {
            return Err(Error::SpecInvalid(format!("delta entries must be positive, got {}", format_rat(v))));
        }
        Ok(DeltaSeq { values })
    }

    pub fn constant(value: Rat, len: usize) -> Result<Self> {
        DeltaSeq::new(vec![value; len])
    }

    pub fn parse(raw: &[&str]) -> Result<Self> {
        let values = raw
            .iter()
            .map(|s| parse_rat(s).map_err(Error::SpecInvalid))
            .collect::<Result<Vec<_>>>()?;
        DeltaSeq::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Rat {
        self.values[i]
    }

    pub fn min(&self) -> Option<Rat> {
        self.values.iter().min().copied()
    }

    pub fn scaled(&self, factor: Rat) -> DeltaSeq {
        DeltaSeq {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn halved(&self) -> DeltaSeq {
        self.scaled(Rat::new(1, 2))
    }

    pub fn tripled(&self) -> DeltaSeq {
        self.scaled(Rat::from_integer(3))
    }

    pub fn strings(&self) -> Vec<String> {
        self.values.iter().map(format_rat).collect()
    }
}

impl Serialize for DeltaSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeltaSeq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let refs: Vec<&str> = raw.iter().map(String::as_str).collect();
        DeltaSeq::parse(&refs).map_err(serde::de::Error::custom)
    }
}

/// `(A)_δ`: points within `delta` of `set`.
pub fn expand_point_set(space: &SpaceInstance, set: &PointSet, delta: Rat) -> Result<PointSet> {
    space.metric().ok_or(Error::NoMetric)?;
    let n = space.num_points();
    let mut out = PointSet::with_capacity(n);
    for x in 0..n {
        if set.ones().any(|a| space.distance(x, a).is_some_and(|d| d <= delta)) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// `balls[i][x]`: points within `Δ_i` of `x`.
fn balls(space: &SpaceInstance, delta: &DeltaSeq, discrete_fallback: bool) -> Result<Vec<Vec<Vec<PointId>>>> {
    if space.metric().is_none() && !discrete_fallback {
        return Err(Error::NoMetric);
    }
    let n = space.num_points();
    Ok(delta
        .values()
        .iter()
        .map(|&r| {
            (0..n)
                .map(|x| (0..n).filter(|&y| space.distance_or_discrete(x, y) <= r).collect())
                .collect()
        })
        .collect())
}

fn search_ball_product(balls: &[Vec<Vec<PointId>>], seq: &[PointId], target: &Payoff, buf: &mut Vec<PointId>) -> bool {
    let i = buf.len();
    if i == seq.len() {
        return target.accepts(buf);
    }
    for &y in &balls[i][seq[i]] {
        buf.push(y);
        let hit = search_ball_product(balls, seq, target, buf);
        buf.pop();
        if hit {
            return true;
        }
    }
    false
}

/// Whether some accepted sequence lies coordinatewise within `Δ` of `seq`.
pub fn expand_sequence_membership(space: &SpaceInstance, seq: &[PointId], target: &Payoff, delta: &DeltaSeq) -> Result<bool> {
    if seq.len() != target.len() || seq.len() != delta.len() {
        return Err(Error::GameMismatch(format!(
            "sequence of length {} against payoff of length {} and delta of length {}",
            seq.len(),
            target.len(),
            delta.len()
        )));
    }
    let b = balls(space, delta, false)?;
    Ok(search_ball_product(&b, seq, target, &mut Vec::with_capacity(seq.len())))
}

/// `(X)_Δ` as a payoff. Without a metric this fails unless
/// `discrete_fallback` is set, in which case distinct points are at distance 1.
pub fn expanded_payoff(space: &SpaceInstance, target: &Payoff, delta: &DeltaSeq, discrete_fallback: bool) -> Result<Payoff> {
    if target.len() != delta.len() {
        return Err(Error::GameMismatch(format!(
            "payoff of length {} with delta of length {}",
            target.len(),
            delta.len()
        )));
    }
    let b = Arc::new(balls(space, delta, discrete_fallback)?);
    let inner = target.clone();
    let name = format!("({})_[{}]", target.name(), delta.strings().join(","));
    Ok(Payoff::new(name, target.len(), move |seq| {
        search_ball_product(&b, seq, &inner, &mut Vec::with_capacity(seq.len()))
    }))
}

/// A finite subset of `set` within `resolution` of every point of `set`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Net {
    #[serde(with = "crate::rat::serde_rat")]
    pub resolution: Rat,
    pub members: Vec<PointId>,
}

impl Net {
    /// Greedy net in point order; distances fall back to the discrete metric.
    pub fn greedy(space: &SpaceInstance, set: &PointSet, resolution: Rat) -> Net {
        let mut members: Vec<PointId> = Vec::new();
        for x in set.ones() {
            if !members.iter().any(|&m| space.distance_or_discrete(x, m) <= resolution) {
                members.push(x);
            }
        }
        Net { resolution, members }
    }

    pub fn covers(&self, space: &SpaceInstance, set: &PointSet) -> bool {
        set.ones().all(|x| {
            self.members
                .iter()
                .any(|&m| space.distance_or_discrete(x, m) <= self.resolution)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_instance, InstanceSpec};
    use crate::space::point_set;

    fn line_grid() -> SpaceInstance {
        // 0, 0.1, ..., 1.0 on a line.
        let spec: InstanceSpec = serde_json::from_value(serde_json::json!({
            "kind": "explicit",
            "points": (0..=10).map(|i| format!("{}/10", i)).collect::<Vec<_>>(),
            "palette": [{"members": (0..=10).collect::<Vec<_>>()}],
            "metric": true
        }))
        .unwrap();
        build_instance(&spec).unwrap()
    }

    #[test]
    fn expansion_of_a_point_on_a_tenth_grid() {
        let s = line_grid();
        let a = point_set(11, [5]);
        let e = expand_point_set(&s, &a, Rat::new(15, 100)).unwrap();
        assert_eq!(e.ones().collect::<Vec<_>>(), vec![4, 5, 6]);
        let tight = expand_point_set(&s, &a, Rat::new(1, 20)).unwrap();
        assert_eq!(tight, a);
        let all = point_set(11, 0..11);
        assert_eq!(expand_point_set(&s, &all, Rat::new(1, 20)).unwrap(), all);
    }

    #[test]
    fn coordinatewise_membership() {
        let s = line_grid();
        let target = Payoff::new("x0 = 0.5", 1, |x| x[0] == 5);
        let delta = DeltaSeq::parse(&["1/10"]).unwrap();
        let hits: Vec<usize> = (0..11)
            .filter(|&x| expand_sequence_membership(&s, &[x], &target, &delta).unwrap())
            .collect();
        assert_eq!(hits, vec![4, 5, 6]);
        let small = DeltaSeq::parse(&["1/20"]).unwrap();
        assert!(!expand_sequence_membership(&s, &[4], &target, &small).unwrap());
    }

    #[test]
    fn expansion_needs_a_metric() {
        let s = build_instance(&InstanceSpec::mathias_silver(4, 0, 1)).unwrap();
        let a = point_set(4, [0]);
        assert_eq!(expand_point_set(&s, &a, Rat::new(1, 2)), Err(Error::NoMetric));
    }

    #[test]
    fn greedy_nets_cover() {
        let s = line_grid();
        let all = point_set(11, 0..11);
        let net = Net::greedy(&s, &all, Rat::new(2, 10));
        assert_eq!(net.members, vec![0, 3, 6, 9]);
        assert!(net.covers(&s, &all));
    }

    #[test]
    fn deltas_must_be_positive() {
        assert!(DeltaSeq::parse(&["0"]).is_err());
        assert!(DeltaSeq::parse(&["1/2", "-1"]).is_err());
        let d = DeltaSeq::parse(&["3/20", "0.1"]).unwrap();
        assert_eq!(d.strings(), vec!["3/20", "1/10"]);
        assert_eq!(d.tripled().strings(), vec!["9/20", "3/10"]);
    }
}

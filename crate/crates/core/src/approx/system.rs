use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::FieldSpace;
use crate::payoff::Payoff;
use crate::space::{point_set, InstanceKind, PointData, PointId, PointSet, SpaceInstance};

/// JSON description of a precompact system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    /// `{x}` for every point, `{m} ⊕ {n} = {max(m, n)}`.
    Singletons,
    /// Nonzero vectors of every subspace, `⊕` the sum of subspaces.
    LinearSpans,
    /// `oplus[i][j]` indexes `family`.
    Explicit {
        family: Vec<Vec<PointId>>,
        oplus: Vec<Vec<usize>>,
    },
}

/// A finite family of point sets with an associative sum that preserves
/// admission.
#[derive(Clone, Debug)]
pub struct PrecompactSystem {
    name: String,
    sets: Vec<PointSet>,
    labels: Vec<String>,
    oplus: Vec<Vec<usize>>,
}

impl PrecompactSystem {
    pub fn new(name: impl Into<String>, sets: Vec<PointSet>, oplus: Vec<Vec<usize>>) -> Result<Self> {
        let n = sets.len();
        if n == 0 {
            return Err(Error::SpecInvalid("precompact system is empty".into()));
        }
        if let Some(i) = sets.iter().position(|s| s.count_ones(..) == 0) {
            return Err(Error::SpecInvalid(format!("precompact set {i} is empty")));
        }
        if oplus.len() != n || oplus.iter().any(|row| row.len() != n || row.iter().any(|&k| k >= n)) {
            return Err(Error::SpecInvalid(format!("sum table must be {n} x {n} with entries below {n}")));
        }
        let labels = sets
            .iter()
            .map(|s| {
                let ids: Vec<String> = s.ones().map(|x| x.to_string()).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        Ok(PrecompactSystem {
            name: name.into(),
            sets,
            labels,
            oplus,
        })
    }

    pub fn from_spec(space: &SpaceInstance, spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Singletons => Ok(PrecompactSystem::singletons(space)),
            SystemSpec::LinearSpans => PrecompactSystem::linear_spans(space),
            SystemSpec::Explicit { family, oplus } => {
                let n = space.num_points();
                if let Some(&x) = family.iter().flatten().find(|&&x| x >= n) {
                    return Err(Error::SpecInvalid(format!("point {x} is outside the universe")));
                }
                let sets = family.iter().map(|f| point_set(n, f.iter().copied())).collect();
                PrecompactSystem::new("explicit", sets, oplus.clone())
            }
        }
    }

    pub fn singletons(space: &SpaceInstance) -> Self {
        let n = space.num_points();
        let sets = (0..n).map(|x| point_set(n, [x])).collect();
        let oplus = (0..n).map(|i| (0..n).map(|j| i.max(j)).collect()).collect();
        PrecompactSystem::new("singletons", sets, oplus).expect("singletons form a system")
    }

    /// All nonzero subspaces of a Rosendal instance, smallest first.
    pub fn linear_spans(space: &SpaceInstance) -> Result<Self> {
        let InstanceKind::Rosendal { field, dim, .. } = space.kind else {
            return Err(Error::SpecInvalid("linear spans need a Rosendal instance".into()));
        };
        let fs = FieldSpace::new(field, dim, false)?;
        let n = space.num_points();
        let vec_of = |x: PointId| match &space.point(x).data {
            PointData::Vector(v) => v.clone(),
            _ => unreachable!("Rosendal points are vectors"),
        };
        let sum = |a: &PointSet, b: &PointSet| -> PointSet {
            // Grow an independent basis so the span enumeration stays small.
            let mut basis: Vec<Vec<u8>> = Vec::new();
            let mut span = PointSet::with_capacity(n);
            for x in a.ones().chain(b.ones()) {
                if !span.contains(x) {
                    basis.push(vec_of(x));
                    span = fs.span_members(&basis);
                }
            }
            span
        };
        let mut index: HashMap<PointSet, usize> = HashMap::new();
        let mut sets: Vec<PointSet> = Vec::new();
        for x in 0..n {
            let line = fs.span_members(&[vec_of(x)]);
            if !index.contains_key(&line) {
                index.insert(line.clone(), sets.len());
                sets.push(line);
            }
        }
        let mut i = 0;
        while i < sets.len() {
            for j in 0..i {
                let s = sum(&sets[i], &sets[j]);
                if !index.contains_key(&s) {
                    index.insert(s.clone(), sets.len());
                    sets.push(s);
                }
            }
            i += 1;
        }
        sets.sort_by(|a, b| {
            a.count_ones(..)
                .cmp(&b.count_ones(..))
                .then_with(|| a.ones().cmp(b.ones()))
        });
        let index: HashMap<&PointSet, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let oplus = sets
            .iter()
            .map(|a| sets.iter().map(|b| index[&sum(a, b)]).collect())
            .collect();
        PrecompactSystem::new("linear_spans", sets, oplus)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, k: usize) -> &PointSet {
        &self.sets[k]
    }

    pub fn label(&self, k: usize) -> &str {
        &self.labels[k]
    }

    pub fn oplus(&self, a: usize, b: usize) -> usize {
        self.oplus[a][b]
    }

    /// `K_{i_1} ⊕ … ⊕ K_{i_m}` in the given order.
    pub fn sum(&self, ids: &[usize]) -> usize {
        let (&first, rest) = ids.split_first().expect("sum over a nonempty block");
        rest.iter().fold(first, |acc, &k| self.oplus(acc, k))
    }

    pub fn check_associative(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let ab = self.oplus(a, b);
                for c in 0..n {
                    if self.oplus(ab, c) != self.oplus(a, self.oplus(b, c)) {
                        return Err(Error::SpecInvalid(format!(
                            "sum is not associative on ({}, {}, {})",
                            self.label(a),
                            self.label(b),
                            self.label(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `K ◁ p` and `L ◁ p` imply `K ⊕ L ◁ p`, for every palette element.
    pub fn check_admission(&self, space: &SpaceInstance) -> Result<()> {
        for p in 0..space.num_subspaces() {
            let admitted = space.next_points(&[], p);
            let inside: Vec<usize> = (0..self.len()).filter(|&k| self.sets[k].is_subset(&admitted)).collect();
            for &a in &inside {
                for &b in &inside {
                    if !self.sets[self.oplus(a, b)].is_subset(&admitted) {
                        return Err(Error::SpecInvalid(format!(
                            "{} and {} are admitted by {} but their sum is not",
                            self.label(a),
                            self.label(b),
                            space.palette().subspace(p).label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_against(&self, space: &SpaceInstance) -> Result<()> {
        if self.sets.iter().any(|s| s.len() > space.num_points()) {
            return Err(Error::SpecInvalid("precompact set outside the point universe".into()));
        }
        self.check_associative()?;
        self.check_admission(space)
    }
}

/// Calls `f` with every sequence `A_0 < … < A_{len-1}` of nonempty subsets
/// of `0..n`, each block listed increasingly.
pub fn for_each_block_partition(n: usize, len: usize, mut f: impl FnMut(&[Vec<usize>])) {
    fn rec(n: usize, len: usize, from: usize, acc: &mut Vec<Vec<usize>>, f: &mut dyn FnMut(&[Vec<usize>])) {
        if acc.len() == len {
            f(acc);
            return;
        }
        let width = n.saturating_sub(from);
        for mask in 1u64..(1u64 << width) {
            let block: Vec<usize> = (0..width).filter(|b| mask >> b & 1 == 1).map(|b| from + b).collect();
            let next = block.last().unwrap() + 1;
            acc.push(block);
            rec(n, len, next, acc, f);
            acc.pop();
        }
    }
    rec(n, len, 0, &mut Vec::new(), &mut f);
}

/// All length-`len` block sequences of `ks`, deduplicated and sorted.
pub fn enumerate_block_sequences(system: &PrecompactSystem, ks: &[usize], len: usize, budget: u64) -> Result<Vec<Vec<PointId>>> {
    if ks.len() < len {
        return Err(Error::GameMismatch(format!(
            "{} precompact sets cannot carry block sequences of length {len}",
            ks.len()
        )));
    }
    let mut sums: BTreeSet<Vec<usize>> = BTreeSet::new();
    for_each_block_partition(ks.len(), len, |blocks| {
        sums.insert(
            blocks
                .iter()
                .map(|b| system.sum(&b.iter().map(|&i| ks[i]).collect::<Vec<_>>()))
                .collect(),
        );
    });
    let mut out: BTreeSet<Vec<PointId>> = BTreeSet::new();
    let mut produced = 0u64;
    for tuple in sums {
        let mut overflow = false;
        product(system, &tuple, &mut Vec::new(), &mut |seq| {
            produced += 1;
            if produced > budget {
                overflow = true;
                return false;
            }
            out.insert(seq.to_vec());
            true
        });
        if overflow {
            return Err(Error::ExhaustionBudget { budget });
        }
    }
    Ok(out.into_iter().collect())
}

fn product(system: &PrecompactSystem, tuple: &[usize], acc: &mut Vec<PointId>, f: &mut dyn FnMut(&[PointId]) -> bool) -> bool {
    if acc.len() == tuple.len() {
        return f(acc);
    }
    for x in system.set(tuple[acc.len()]).ones() {
        acc.push(x);
        let go_on = product(system, tuple, acc, f);
        acc.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// "Every length-`k` block sequence of the outcome lies in `target`", as a
/// payoff on outcomes of the strong asymptotic game of the given horizon.
pub fn block_sequence_payoff(system: &PrecompactSystem, target: &Payoff, horizon: usize) -> Payoff {
    let system = system.clone();
    let inner = target.clone();
    let k = target.len();
    Payoff::on_sets(format!("block sequences in {}", target.name()), horizon, move |ks| {
        match enumerate_block_sequences(&system, ks, k, u64::MAX) {
            Ok(seqs) => seqs.iter().all(|s| inner.accepts(s)),
            Err(_) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{build_instance, InstanceSpec};

    #[test]
    fn singleton_block_sequences() {
        let s = build_instance(&InstanceSpec::mathias_silver(8, 0, 1)).unwrap();
        let sys = PrecompactSystem::singletons(&s);
        assert_eq!(enumerate_block_sequences(&sys, &[2, 5], 2, 1000).unwrap(), vec![vec![2, 5]]);
        assert_eq!(enumerate_block_sequences(&sys, &[2, 5], 1, 1000).unwrap(), vec![vec![2], vec![5]]);
        assert_eq!(enumerate_block_sequences(&sys, &[2, 5], 0, 1000).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn block_partitions_are_increasing() {
        let mut seen = Vec::new();
        for_each_block_partition(3, 2, |b| seen.push(b.to_vec()));
        assert_eq!(seen.len(), 5);
        assert!(seen.iter().all(|b| b[0].last() < b[1].first()));
    }

    #[test]
    fn linear_spans_over_f2_in_dimension_three() {
        let s = build_instance(&InstanceSpec::rosendal(2, 3, 0)).unwrap();
        let sys = PrecompactSystem::linear_spans(&s).unwrap();
        // 7 lines, 7 planes, the whole space
        assert_eq!(sys.len(), 15);
        sys.check_against(&s).unwrap();
    }

    #[test]
    fn broken_sum_tables_are_rejected() {
        let sets = (0..3).map(|x| point_set(3, [x])).collect();
        // a ⊕ b = b is associative; a ⊕ b = (a + 1) mod 3 is not
        let bad = (0..3).map(|a| vec![(a + 1) % 3; 3]).collect();
        let sys = PrecompactSystem::new("bad", sets, bad).unwrap();
        assert!(sys.check_associative().is_err());
    }
}

//! Finite Gowers spaces: points, a palette of subspaces, the two preorders,
//! admission, and the axiom checker.
//!
//! Every concrete instance is a [`SpaceInstance`]. The order structure lives in
//! a shared [`Palette`] so that derived spaces (tilde, unfolded, discretized)
//! reuse the same relations with a different point universe or admission rule.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::approx::PrecompactSystem;
use crate::error::{Error, Result};
use crate::rat::Rat;

pub type PointId = usize;
pub type SubspaceId = usize;
pub type PointSet = FixedBitSet;

/// Builds a point set of the given universe size from a list of ids.
pub fn point_set(universe: usize, ids: impl IntoIterator<Item = PointId>) -> PointSet {
    let mut s = PointSet::with_capacity(universe);
    for i in ids {
        s.insert(i);
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointData {
    /// An element of `{0..N-1}`.
    Natural(usize),
    /// Coordinates over a prime field, most significant first.
    Vector(Vec<u8>),
    /// Exact real coordinates.
    Real(Vec<Rat>),
    /// A point of an unfolded space: base point plus a bit.
    Decorated { base: PointId, bit: u8 },
    Label,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub label: String,
    pub data: PointData,
}

#[derive(Clone, Debug)]
pub enum Shape {
    /// A plain set of points; meets are intersections.
    Set,
    /// A block subspace. `segments[i]` holds the points spanned by blocks `i..`.
    Blocks {
        block_points: Vec<PointId>,
        segments: Vec<PointSet>,
    },
}

#[derive(Clone, Debug)]
pub struct Subspace {
    pub label: String,
    pub shape: Shape,
    /// The part of the subspace that must survive inside anything it is `<=*`.
    pub core: PointSet,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeqStarRule {
    /// `p <=* q` iff the core of `p` lies in `q`.
    #[default]
    Core,
    /// `p <=* q` iff `p == q`. Breaks axiom 1 whenever `<=` is not equality.
    Equality,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    /// Intersect the chain and look the result up in the palette.
    #[default]
    Intersection,
    /// No fusion is available; every request exhausts.
    Unavailable,
}

/// The order structure `(P, <=, <=*)` together with the effective witnesses.
#[derive(Clone, Debug)]
pub struct Palette {
    subspaces: Vec<Subspace>,
    members: Vec<PointSet>,
    lookup: HashMap<PointSet, SubspaceId>,
    leq_star_rule: LeqStarRule,
    fusion_rule: FusionRule,
    universe: usize,
}

impl Palette {
    /// Subspaces are given in canonical order together with their member sets.
    pub fn new(
        universe: usize,
        entries: Vec<(Subspace, PointSet)>,
        leq_star_rule: LeqStarRule,
        fusion_rule: FusionRule,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::SpecInvalid("palette is empty".into()));
        }
        let mut subspaces = Vec::with_capacity(entries.len());
        let mut members = Vec::with_capacity(entries.len());
        let mut lookup = HashMap::with_capacity(entries.len());
        for (i, (mut sub, mut set)) in entries.into_iter().enumerate() {
            set.grow(universe);
            sub.core.grow(universe);
            if set.len() != universe || set.count_ones(..) == 0 {
                return Err(Error::SpecInvalid(format!(
                    "subspace {} is empty or has the wrong universe",
                    sub.label
                )));
            }
            if !sub.core.is_subset(&set) {
                return Err(Error::SpecInvalid(format!(
                    "core of subspace {} is not contained in it",
                    sub.label
                )));
            }
            if lookup.insert(set.clone(), i).is_some() {
                return Err(Error::SpecInvalid(format!(
                    "subspace {} duplicates an earlier palette entry",
                    sub.label
                )));
            }
            subspaces.push(sub);
            members.push(set);
        }
        Ok(Palette {
            subspaces,
            members,
            lookup,
            leq_star_rule,
            fusion_rule,
            universe,
        })
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn subspace(&self, p: SubspaceId) -> &Subspace {
        &self.subspaces[p]
    }

    pub fn members(&self, p: SubspaceId) -> &PointSet {
        &self.members[p]
    }

    pub fn find(&self, set: &PointSet) -> Option<SubspaceId> {
        self.lookup.get(set).copied()
    }

    pub fn leq_star_rule(&self) -> LeqStarRule {
        self.leq_star_rule
    }

    pub fn fusion_rule(&self) -> FusionRule {
        self.fusion_rule
    }

    pub fn leq(&self, p: SubspaceId, q: SubspaceId) -> bool {
        p == q || self.members[p].is_subset(&self.members[q])
    }

    pub fn leq_star(&self, p: SubspaceId, q: SubspaceId) -> bool {
        match self.leq_star_rule {
            LeqStarRule::Core => self.subspaces[p].core.is_subset(&self.members[q]),
            LeqStarRule::Equality => p == q,
        }
    }

    /// `p ⪅ q`: `p <= q` and `q <=* p`.
    pub fn lessapprox(&self, p: SubspaceId, q: SubspaceId) -> bool {
        self.leq(p, q) && self.leq_star(q, p)
    }

    /// The effective witness for axiom 2: defined when `p <=* q`, returns
    /// `r <= p`, `r <= q` with `p <=* r`.
    pub fn meet_witness(&self, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
        if !self.leq_star(p, q) {
            return None;
        }
        if self.leq(p, q) {
            return Some(p);
        }
        let set = match &self.subspaces[p].shape {
            Shape::Set => {
                let mut s = self.members[p].clone();
                s.intersect_with(&self.members[q]);
                s
            }
            Shape::Blocks {
                block_points,
                segments,
            } => {
                let q_set = &self.members[q];
                let mut start = block_points.len();
                while start > 0 && q_set.contains(block_points[start - 1]) {
                    start -= 1;
                }
                if start == block_points.len() {
                    return None;
                }
                segments[start].clone()
            }
        };
        self.find(&set)
    }

    /// Axiom 3 at finite scale: `p* <= chain[0]` and `p* <=* chain[i]` for every `i`.
    pub fn fusion_witness(&self, chain: &[SubspaceId]) -> Result<SubspaceId> {
        let first = *chain
            .first()
            .ok_or_else(|| Error::Invariant("fusion of an empty chain".into()))?;
        match self.fusion_rule {
            FusionRule::Unavailable => Err(Error::exhaustion(
                "fusion",
                format!("fusion is unavailable for this palette (chain length {})", chain.len()),
            )),
            FusionRule::Intersection => {
                let mut set = self.members[first].clone();
                for &p in &chain[1..] {
                    set.intersect_with(&self.members[p]);
                }
                let found = self.find(&set).ok_or_else(|| {
                    Error::exhaustion(
                        "fusion",
                        format!(
                            "intersection of a chain of length {} ({} points) is not in the palette",
                            chain.len(),
                            set.count_ones(..)
                        ),
                    )
                })?;
                if self.leq(found, first) && chain.iter().all(|&p| self.leq_star(found, p)) {
                    Ok(found)
                } else {
                    Err(Error::exhaustion(
                        "fusion",
                        "intersection does not sit below every chain element",
                    ))
                }
            }
        }
    }

    /// A common `⪅`-lower bound of `items`, built by iterated meet witnesses.
    pub fn lessapprox_lower_bound(&self, items: &[SubspaceId]) -> Option<SubspaceId> {
        let (&first, rest) = items.split_first()?;
        let mut cur = first;
        for &q in rest {
            cur = self.meet_witness(cur, q).or_else(|| self.meet_witness(q, cur))?;
        }
        items.iter().all(|&q| self.lessapprox(cur, q)).then_some(cur)
    }

    /// The first palette element below both `p` and `q`, if any.
    pub fn compatible(&self, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
        if self.leq(p, q) {
            return self.first_below_both(p, q);
        }
        if self.members[p].is_disjoint(&self.members[q]) {
            return None;
        }
        self.first_below_both(p, q)
    }

    fn first_below_both(&self, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
        (0..self.len()).find(|&r| self.leq(r, p) && self.leq(r, q))
    }

    pub fn below(&self, p: SubspaceId) -> Vec<SubspaceId> {
        (0..self.len()).filter(|&r| self.leq(r, p)).collect()
    }

    pub fn lessapprox_below(&self, p: SubspaceId) -> Vec<SubspaceId> {
        (0..self.len()).filter(|&r| self.lessapprox(r, p)).collect()
    }
}

/// How much of a history the admission relation looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependence {
    LastPoint,
    LengthAndLast,
    FullHistory,
}

#[derive(Clone, Debug)]
pub enum Admission {
    /// `s ◁ p` iff the last point of `s` belongs to `p`.
    Membership,
    /// Odd-length histories are judged on their even positions, even-length
    /// ones on their odd positions.
    Tilde(Box<Admission>),
    /// Histories are mapped pointwise into an inner universe.
    Projected {
        inner: Box<Admission>,
        map: Vec<PointId>,
        preimage: Vec<Vec<PointId>>,
    },
    /// `tables[n][p]` lists the points admitted as the `n`-th entry under `p`;
    /// longer histories reuse the last table.
    LengthIndexed { tables: Vec<Vec<PointSet>> },
}

impl Admission {
    pub fn dependence(&self) -> Dependence {
        match self {
            Admission::Membership => Dependence::LastPoint,
            Admission::Tilde(_) => Dependence::FullHistory,
            Admission::Projected { inner, .. } => inner.dependence(),
            Admission::LengthIndexed { .. } => Dependence::LengthAndLast,
        }
    }

    /// All `x` with `prefix ⌢ x ◁ p`, as a set over this admission's universe.
    pub fn next_set<'a>(
        &'a self,
        palette: &'a Palette,
        prefix: &[PointId],
        p: SubspaceId,
    ) -> Cow<'a, PointSet> {
        match self {
            Admission::Membership => Cow::Borrowed(palette.members(p)),
            Admission::Tilde(inner) => {
                let parity = prefix.len() % 2;
                let sub: Vec<PointId> = prefix.iter().skip(parity).step_by(2).copied().collect();
                Cow::Owned(inner.next_set(palette, &sub, p).into_owned())
            }
            Admission::Projected {
                inner,
                map,
                preimage,
            } => {
                let base: Vec<PointId> = prefix.iter().map(|&x| map[x]).collect();
                let inner_set = inner.next_set(palette, &base, p);
                let mut out = PointSet::with_capacity(map.len());
                for b in inner_set.ones() {
                    for &x in &preimage[b] {
                        out.insert(x);
                    }
                }
                Cow::Owned(out)
            }
            Admission::LengthIndexed { tables } => {
                let n = prefix.len().min(tables.len() - 1);
                Cow::Borrowed(&tables[n][p])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Sup norm over `PointData::Real` coordinates.
    SupNorm,
    /// Distance 1 between distinct points.
    Discrete,
}

/// Which construction produced an instance; counterexamples and pigeonhole
/// providers dispatch on this.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    MathiasSilver { n: usize, slack: usize },
    Rosendal { field: u8, dim: usize, slack: usize },
    ProjectiveRosendal { field: u8, dim: usize, slack: usize },
    GridSphere { dim: usize, slack: usize },
    Explicit,
    Derived { from: String, how: String },
}

/// A finite Gowers space `(P, X, <=, <=*, ◁)`, optionally with a metric and a
/// precompact system.
#[derive(Clone, Debug)]
pub struct SpaceInstance {
    pub name: String,
    pub kind: InstanceKind,
    points: Vec<Point>,
    palette: Arc<Palette>,
    admission: Admission,
    metric: Option<Metric>,
    system: Option<Arc<PrecompactSystem>>,
}

impl SpaceInstance {
    pub fn new(
        name: impl Into<String>,
        kind: InstanceKind,
        points: Vec<Point>,
        palette: Arc<Palette>,
        admission: Admission,
        metric: Option<Metric>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::SpecInvalid("point universe is empty".into()));
        }
        if matches!(admission, Admission::Membership) && palette.universe() != points.len() {
            return Err(Error::SpecInvalid(
                "membership admission needs palette and points over the same universe".into(),
            ));
        }
        Ok(SpaceInstance {
            name: name.into(),
            kind,
            points,
            palette,
            admission,
            metric,
            system: None,
        })
    }

    pub fn with_system(mut self, system: PrecompactSystem) -> Result<Self> {
        system.check_against(&self)?;
        self.system = Some(Arc::new(system));
        Ok(self)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, x: PointId) -> &Point {
        &self.points[x]
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn palette_arc(&self) -> Arc<Palette> {
        self.palette.clone()
    }

    pub fn admission(&self) -> &Admission {
        &self.admission
    }

    pub fn metric(&self) -> Option<Metric> {
        self.metric
    }

    pub fn system(&self) -> Option<&PrecompactSystem> {
        self.system.as_deref()
    }

    pub fn num_subspaces(&self) -> usize {
        self.palette.len()
    }

    pub fn leq(&self, p: SubspaceId, q: SubspaceId) -> bool {
        self.palette.leq(p, q)
    }

    pub fn leq_star(&self, p: SubspaceId, q: SubspaceId) -> bool {
        self.palette.leq_star(p, q)
    }

    pub fn lessapprox(&self, p: SubspaceId, q: SubspaceId) -> bool {
        self.palette.lessapprox(p, q)
    }

    pub fn meet_witness(&self, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
        self.palette.meet_witness(p, q)
    }

    pub fn fusion_witness(&self, chain: &[SubspaceId]) -> Result<SubspaceId> {
        self.palette.fusion_witness(chain)
    }

    pub fn compatible(&self, p: SubspaceId, q: SubspaceId) -> Option<SubspaceId> {
        self.palette.compatible(p, q)
    }

    /// All points `x` with `prefix ⌢ x ◁ p`.
    pub fn next_points(&self, prefix: &[PointId], p: SubspaceId) -> Cow<'_, PointSet> {
        self.admission.next_set(&self.palette, prefix, p)
    }

    /// `history ◁ p` for a nonempty history.
    pub fn admits(&self, history: &[PointId], p: SubspaceId) -> bool {
        match history.split_last() {
            Some((&last, prefix)) => self.next_points(prefix, p).contains(last),
            None => false,
        }
    }

    /// Point-only admission, the relation used by approximate spaces.
    pub fn admits_point(&self, x: PointId, p: SubspaceId) -> bool {
        self.admits(&[x], p)
    }

    pub fn distance(&self, x: PointId, y: PointId) -> Option<Rat> {
        match self.metric? {
            Metric::Discrete => Some(if x == y { Rat::from_integer(0) } else { Rat::from_integer(1) }),
            Metric::SupNorm => match (&self.points[x].data, &self.points[y].data) {
                (PointData::Real(a), PointData::Real(b)) => Some(
                    a.iter()
                        .zip(b)
                        .map(|(u, v)| if u > v { u - v } else { v - u })
                        .max()
                        .unwrap_or_else(|| Rat::from_integer(0)),
                ),
                _ => None,
            },
        }
    }

    /// The metric if there is one, the discrete metric otherwise.
    pub fn distance_or_discrete(&self, x: PointId, y: PointId) -> Rat {
        self.distance(x, y).unwrap_or_else(|| {
            if x == y {
                Rat::from_integer(0)
            } else {
                Rat::from_integer(1)
            }
        })
    }

    pub(crate) fn derived(
        &self,
        how: &str,
        points: Vec<Point>,
        admission: Admission,
        metric: Option<Metric>,
    ) -> SpaceInstance {
        SpaceInstance {
            name: format!("{}/{}", self.name, how),
            kind: InstanceKind::Derived {
                from: self.name.clone(),
                how: how.to_string(),
            },
            points,
            palette: self.palette.clone(),
            admission,
            metric,
            system: None,
        }
    }

    pub(crate) fn with_admission(&self, how: &str, admission: Admission) -> SpaceInstance {
        self.derived(how, self.points.clone(), admission, self.metric)
    }
}

/// Tabulated relations over the whole palette.
#[derive(Clone, Debug, Serialize)]
pub struct Relations {
    pub leq: Vec<Vec<bool>>,
    pub leq_star: Vec<Vec<bool>>,
    pub lessapprox: Vec<Vec<bool>>,
    pub compatible: Vec<Vec<bool>>,
}

pub fn derive_relations(space: &SpaceInstance) -> Relations {
    let n = space.num_subspaces();
    let table = |f: &dyn Fn(usize, usize) -> bool| -> Vec<Vec<bool>> {
        (0..n).map(|p| (0..n).map(|q| f(p, q)).collect()).collect()
    };
    Relations {
        leq: table(&|p, q| space.leq(p, q)),
        leq_star: table(&|p, q| space.leq_star(p, q)),
        lessapprox: table(&|p, q| space.lessapprox(p, q)),
        compatible: table(&|p, q| space.compatible(p, q).is_some()),
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub exhausted: u64,
    pub first_violation: Option<String>,
}

impl AxiomCheck {
    fn new(name: &str) -> Self {
        AxiomCheck {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn violate(&mut self, what: impl FnOnce() -> String) {
        self.violations += 1;
        if self.first_violation.is_none() {
            self.first_violation = Some(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.exhausted == 0
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub instance: String,
    pub horizon: usize,
    pub preorders: AxiomCheck,
    pub axioms: [AxiomCheck; 5],
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.preorders.passed() && self.axioms.iter().all(AxiomCheck::passed)
    }

    /// Axiom `n` for `n` in `1..=5`.
    pub fn axiom(&self, n: usize) -> &AxiomCheck {
        &self.axioms[n - 1]
    }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn spend(&mut self, n: u64) -> Result<()> {
        self.used += n;
        if self.used > self.limit {
            Err(Error::ExhaustionBudget { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Representative prefixes of each length below `horizon`: histories that the
/// admission relation cannot tell apart are collapsed to one.
fn representative_prefixes(space: &SpaceInstance, horizon: usize, budget: &mut Budget) -> Result<Vec<Vec<PointId>>> {
    let n = space.num_points();
    Ok(match space.admission().dependence() {
        Dependence::LastPoint => vec![vec![]],
        Dependence::LengthAndLast => (0..horizon.max(1)).map(|len| vec![0; len]).collect(),
        Dependence::FullHistory => {
            let mut out = vec![vec![]];
            let mut frontier = vec![vec![]];
            for _ in 1..horizon.max(1) {
                let mut next = Vec::new();
                for s in &frontier {
                    for x in 0..n {
                        budget.spend(1)?;
                        let mut t: Vec<PointId> = s.clone();
                        t.push(x);
                        next.push(t);
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        }
    })
}

/// Checks axioms 1-5 over the whole palette, with histories and fusion chains
/// up to length `horizon`. `budget` caps the number of elementary checks.
pub fn check_axioms(space: &SpaceInstance, horizon: usize, budget: u64) -> Result<AxiomReport> {
    let pal = space.palette();
    let n = pal.len();
    let mut budget = Budget { used: 0, limit: budget };
    let mut pre = AxiomCheck::new("preorders");
    let mut a1 = AxiomCheck::new("leq implies leq_star");
    let mut a2 = AxiomCheck::new("leq_star has a common refinement");
    let mut a3 = AxiomCheck::new("decreasing chains fuse");
    let mut a4 = AxiomCheck::new("every subspace admits a continuation");
    let mut a5 = AxiomCheck::new("admission is upward closed");

    let below: Vec<Vec<SubspaceId>> = (0..n).map(|p| pal.below(p)).collect();

    // Transitivity of both preorders.
    let star_below: Vec<Vec<SubspaceId>> = (0..n)
        .map(|q| (0..n).filter(|&p| pal.leq_star(p, q)).collect())
        .collect();
    for q in 0..n {
        budget.spend(n as u64)?;
        for r in 0..n {
            if pal.leq_star(q, r) {
                for &p in &star_below[q] {
                    pre.checked += 1;
                    if !pal.leq_star(p, r) {
                        pre.violate(|| format!("{p} <=* {q} <=* {r} but not {p} <=* {r}"));
                    }
                }
            }
        }
    }

    for p in 0..n {
        budget.spend(n as u64)?;
        for q in 0..n {
            if pal.leq(p, q) {
                a1.checked += 1;
                if !pal.leq_star(p, q) {
                    a1.violate(|| format!("{p} <= {q} but not {p} <=* {q}"));
                }
            }
            if pal.leq_star(p, q) {
                a2.checked += 1;
                match pal.meet_witness(p, q) {
                    Some(r) if pal.leq(r, p) && pal.leq(r, q) && pal.leq_star(p, r) => {}
                    Some(r) => a2.violate(|| format!("witness {r} for ({p},{q}) is not a refinement")),
                    None => a2.violate(|| format!("no witness for {p} <=* {q}")),
                }
            }
        }
    }

    // Decreasing chains of length 1..=horizon.
    let mut chain = Vec::with_capacity(horizon);
    fn walk(
        pal: &Palette,
        below: &[Vec<SubspaceId>],
        chain: &mut Vec<SubspaceId>,
        horizon: usize,
        check: &mut AxiomCheck,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.spend(1)?;
        check.checked += 1;
        match pal.fusion_witness(chain) {
            Ok(f) => {
                if !pal.leq(f, chain[0]) || !chain.iter().all(|&c| pal.leq_star(f, c)) {
                    check.violate(|| format!("fusion of {chain:?} gave {f}"));
                }
            }
            Err(Error::FiniteExhaustion { .. }) => check.exhausted += 1,
            Err(e) => return Err(e),
        }
        if chain.len() < horizon {
            let last = *chain.last().unwrap();
            for &next in &below[last] {
                chain.push(next);
                walk(pal, below, chain, horizon, check, budget)?;
                chain.pop();
            }
        }
        Ok(())
    }
    if horizon >= 1 {
        for p in 0..n {
            chain.push(p);
            walk(pal, &below, &mut chain, horizon, &mut a3, &mut budget)?;
            chain.pop();
        }
    }

    for prefix in representative_prefixes(space, horizon, &mut budget)? {
        let sets: Vec<PointSet> = (0..n).map(|p| space.next_points(&prefix, p).into_owned()).collect();
        budget.spend(n as u64)?;
        for (p, set) in sets.iter().enumerate() {
            a4.checked += 1;
            if set.count_ones(..) == 0 {
                a4.violate(|| format!("subspace {p} admits nothing after {prefix:?}"));
            }
        }
        for q in 0..n {
            budget.spend(below[q].len() as u64)?;
            for &p in &below[q] {
                a5.checked += 1;
                if !sets[p].is_subset(&sets[q]) {
                    a5.violate(|| format!("{p} <= {q} but {p} admits more after {prefix:?}"));
                }
            }
        }
    }

    Ok(AxiomReport {
        instance: space.name.clone(),
        horizon,
        preorders: pre,
        axioms: [a1, a2, a3, a4, a5],
    })
}

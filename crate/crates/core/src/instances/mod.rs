//! Concrete finite instances and their JSON specifications.

mod counterexamples;
mod grid;
mod pigeonhole;
mod rosendal;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};
use crate::space::{
    point_set, Admission, FusionRule, InstanceKind, LeqStarRule, Metric, Palette, Point, PointData, PointSet,
    Shape, SpaceInstance, Subspace,
};

pub use counterexamples::{
    block_pair_scan, counterexample_sets, phi_support_payoff, BlockPairScan, Counterexample, CounterexampleKind,
};
pub use grid::GridSphere;
pub use pigeonhole::{pigeonhole, pigeonhole_everywhere, PigeonholeMode, Side};
pub use rosendal::{first_nonzero, last_nonzero, max_support, min_support, normalize, scale, FieldSpace};

fn one() -> usize {
    1
}

fn two() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PaletteRule {
    /// Every subset with at least `m` points at or above the slack threshold.
    AllSubsetsMinSize { m: usize },
    /// Tail subspaces (final segments for Mathias-Silver) plus block
    /// subspaces with at most `max_blocks` blocks, or all block subspaces when
    /// `full` is set.
    TailBlockSubspaces {
        #[serde(default = "one")]
        m: usize,
        #[serde(default = "two")]
        max_blocks: usize,
        #[serde(default)]
        full: bool,
    },
    /// Subsets (Mathias-Silver) or block sequences (vector instances).
    ExplicitList {
        subspaces: Vec<serde_json::Value>,
        #[serde(default = "one")]
        m: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitSubspace {
    pub members: Vec<usize>,
    /// Defaults to `members`.
    #[serde(default)]
    pub core: Option<Vec<usize>>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    MathiasSilver {
        n: usize,
        #[serde(default)]
        slack: usize,
        palette: PaletteRule,
    },
    Rosendal {
        field: u8,
        dim: usize,
        #[serde(default)]
        slack: usize,
        palette: PaletteRule,
    },
    ProjectiveRosendal {
        field: u8,
        dim: usize,
        #[serde(default)]
        slack: usize,
        palette: PaletteRule,
    },
    GridSphere {
        dim: usize,
        #[serde(with = "rat::serde_rat")]
        step: Rat,
        #[serde(default)]
        slack: usize,
        palette: PaletteRule,
    },
    Explicit {
        points: Vec<String>,
        palette: Vec<ExplicitSubspace>,
        #[serde(default)]
        leq_star: LeqStarRule,
        #[serde(default)]
        fusion: FusionRule,
        /// Metric over point labels read as rationals.
        #[serde(default)]
        metric: bool,
    },
}

impl InstanceSpec {
    pub fn mathias_silver(n: usize, slack: usize, m: usize) -> Self {
        InstanceSpec::MathiasSilver {
            n,
            slack,
            palette: PaletteRule::AllSubsetsMinSize { m },
        }
    }

    pub fn rosendal(field: u8, dim: usize, slack: usize) -> Self {
        InstanceSpec::Rosendal {
            field,
            dim,
            slack,
            palette: PaletteRule::TailBlockSubspaces {
                m: 1,
                max_blocks: 2,
                full: false,
            },
        }
    }

    pub fn projective(field: u8, dim: usize, slack: usize) -> Self {
        InstanceSpec::ProjectiveRosendal {
            field,
            dim,
            slack,
            palette: PaletteRule::TailBlockSubspaces {
                m: 2,
                max_blocks: 2,
                full: false,
            },
        }
    }

    pub fn grid_sphere(dim: usize, step: Rat) -> Self {
        InstanceSpec::GridSphere {
            dim,
            step,
            slack: 0,
            palette: PaletteRule::TailBlockSubspaces {
                m: 1,
                max_blocks: 2,
                full: false,
            },
        }
    }

    /// The degenerate space with one subspace admitting every point.
    pub fn gale_stewart(points: usize) -> Self {
        InstanceSpec::Explicit {
            points: (0..points).map(|i| i.to_string()).collect(),
            palette: vec![ExplicitSubspace {
                members: (0..points).collect(),
                core: None,
                label: Some("1".into()),
            }],
            leq_star: LeqStarRule::Core,
            fusion: FusionRule::Intersection,
            metric: false,
        }
    }
}

/// Builds a validated instance. Palettes come out in canonical order:
/// larger subspaces first, then lexicographic.
pub fn build_instance(spec: &InstanceSpec) -> Result<SpaceInstance> {
    match spec {
        InstanceSpec::MathiasSilver { n, slack, palette } => build_mathias_silver(*n, *slack, palette),
        InstanceSpec::Rosendal {
            field,
            dim,
            slack,
            palette,
        } => build_rosendal(*field, *dim, *slack, palette, false),
        InstanceSpec::ProjectiveRosendal {
            field,
            dim,
            slack,
            palette,
        } => build_rosendal(*field, *dim, *slack, palette, true),
        InstanceSpec::GridSphere {
            dim,
            step,
            slack,
            palette,
        } => build_grid(*dim, *step, *slack, palette),
        InstanceSpec::Explicit {
            points,
            palette,
            leq_star,
            fusion,
            metric,
        } => build_explicit(points, palette, *leq_star, *fusion, *metric),
    }
}

fn set_subspace(n: usize, elems: &[usize], slack: usize) -> (Subspace, PointSet) {
    let members = point_set(n, elems.iter().copied());
    let core = point_set(n, elems.iter().copied().filter(|&x| x >= slack));
    let label = format!("{{{}}}", elems.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    (
        Subspace {
            label,
            shape: Shape::Set,
            core,
        },
        members,
    )
}

fn build_mathias_silver(n: usize, slack: usize, rule: &PaletteRule) -> Result<SpaceInstance> {
    if n == 0 {
        return Err(Error::SpecInvalid("Mathias-Silver universe must be nonempty".into()));
    }
    let tail = |s: &[usize]| s.iter().filter(|&&x| x >= slack).count();
    let mut sets: Vec<Vec<usize>> = match rule {
        PaletteRule::AllSubsetsMinSize { m } => {
            if n > 16 {
                return Err(Error::SpecInvalid(format!("all-subsets palette over {n} points is too large")));
            }
            (1u32..(1 << n))
                .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
                .filter(|s| tail(s) >= (*m).max(1))
                .collect()
        }
        PaletteRule::TailBlockSubspaces { m, .. } => (0..n)
            .map(|a| (a..n).collect::<Vec<_>>())
            .filter(|s| tail(s) >= (*m).max(1))
            .collect(),
        PaletteRule::ExplicitList { subspaces, m } => {
            let mut out = Vec::new();
            for v in subspaces {
                let mut s: Vec<usize> = serde_json::from_value(v.clone())
                    .map_err(|e| Error::SpecInvalid(format!("explicit subset {v}: {e}")))?;
                s.sort_unstable();
                s.dedup();
                if s.iter().any(|&x| x >= n) {
                    return Err(Error::SpecInvalid(format!("explicit subset {v} leaves the universe")));
                }
                if tail(&s) < (*m).max(1) {
                    return Err(Error::SpecInvalid(format!(
                        "explicit subset {v} has fewer than {m} points at or above {slack}"
                    )));
                }
                out.push(s);
            }
            out
        }
    };
    if sets.is_empty() {
        return Err(Error::SpecInvalid("palette rule produces no subspaces".into()));
    }
    if !matches!(rule, PaletteRule::ExplicitList { .. }) {
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    }
    let entries = sets.iter().map(|s| set_subspace(n, s, slack)).collect();
    let palette = Palette::new(n, entries, LeqStarRule::Core, FusionRule::Intersection)?;
    if matches!(rule, PaletteRule::ExplicitList { .. }) {
        check_meet_closure(&palette)?;
    }
    let points = (0..n)
        .map(|i| Point {
            label: i.to_string(),
            data: PointData::Natural(i),
        })
        .collect();
    SpaceInstance::new(
        format!("mathias-silver(n={n},t={slack})"),
        InstanceKind::MathiasSilver { n, slack },
        points,
        Arc::new(palette),
        Admission::Membership,
        None,
    )
}

fn sort_and_dedup(entries: Vec<(Subspace, PointSet)>, keep_order: bool) -> Vec<(Subspace, PointSet)> {
    let mut entries = entries;
    if !keep_order {
        entries.sort_by(|a, b| {
            b.1.count_ones(..)
                .cmp(&a.1.count_ones(..))
                .then_with(|| a.0.label.cmp(&b.0.label))
        });
    }
    let mut seen = std::collections::HashSet::new();
    entries.retain(|(_, m)| seen.insert(m.clone()));
    entries
}

fn tail_count(sub: &Subspace) -> usize {
    match &sub.shape {
        Shape::Blocks { segments, .. } => segments
            .iter()
            .filter(|s| s.is_subset(&sub.core) && s.count_ones(..) > 0)
            .count(),
        Shape::Set => sub.core.count_ones(..),
    }
}

fn build_rosendal(field: u8, dim: usize, slack: usize, rule: &PaletteRule, projective: bool) -> Result<SpaceInstance> {
    let fs = FieldSpace::new(field, dim, projective)?;
    let (m, seqs, keep_order) = match rule {
        PaletteRule::TailBlockSubspaces { m, max_blocks, full } => {
            let limit = if *full { dim } else { *max_blocks };
            let mut seqs: Vec<Vec<Vec<u8>>> = (0..dim).map(|i| fs.tail_blocks(i)).collect();
            seqs.extend(fs.block_sequences(limit));
            (*m, seqs, false)
        }
        PaletteRule::ExplicitList { subspaces, m } => {
            let mut seqs = Vec::new();
            for v in subspaces {
                let blocks: Vec<Vec<u8>> = serde_json::from_value(v.clone())
                    .map_err(|e| Error::SpecInvalid(format!("explicit block sequence {v}: {e}")))?;
                seqs.push(blocks);
            }
            (*m, seqs, true)
        }
        PaletteRule::AllSubsetsMinSize { .. } => {
            return Err(Error::SpecInvalid(
                "all-subsets palettes only apply to Mathias-Silver instances".into(),
            ))
        }
    };
    let mut entries = Vec::new();
    for blocks in &seqs {
        let (sub, members) = fs.block_subspace(blocks, slack)?;
        if tail_count(&sub) >= m.max(1) {
            entries.push((sub, members));
        } else if keep_order {
            return Err(Error::SpecInvalid(format!(
                "explicit subspace {} has fewer than {m} blocks at or above {slack}",
                sub.label
            )));
        }
    }
    let entries = sort_and_dedup(entries, keep_order);
    if entries.is_empty() {
        return Err(Error::SpecInvalid("palette rule produces no subspaces".into()));
    }
    let palette = Palette::new(fs.len(), entries, LeqStarRule::Core, FusionRule::Intersection)?;
    if keep_order {
        check_meet_closure(&palette)?;
    }
    let (name, kind) = if projective {
        (
            format!("projective-rosendal(F{field}^{dim},t={slack})"),
            InstanceKind::ProjectiveRosendal { field, dim, slack },
        )
    } else {
        (
            format!("rosendal(F{field}^{dim},t={slack})"),
            InstanceKind::Rosendal { field, dim, slack },
        )
    };
    SpaceInstance::new(name, kind, fs.points(), Arc::new(palette), Admission::Membership, None)
}

fn build_grid(dim: usize, step: Rat, slack: usize, rule: &PaletteRule) -> Result<SpaceInstance> {
    let g = GridSphere::new(dim, step)?;
    let (m, seqs, keep_order) = match rule {
        PaletteRule::TailBlockSubspaces { m, max_blocks, full } => {
            let limit = if *full { dim } else { *max_blocks };
            let mut seqs: Vec<Vec<Vec<i64>>> = (0..dim).map(|i| g.tail_blocks(i)).collect();
            seqs.extend(g.block_sequences(limit));
            (*m, seqs, false)
        }
        PaletteRule::ExplicitList { subspaces, m } => {
            let mut seqs = Vec::new();
            for v in subspaces {
                let raw: Vec<Vec<String>> = serde_json::from_value(v.clone())
                    .map_err(|e| Error::SpecInvalid(format!("explicit block sequence {v}: {e}")))?;
                let mut blocks = Vec::new();
                for b in raw {
                    let r: Vec<Rat> = b
                        .iter()
                        .map(|s| rat::parse_rat(s).map_err(Error::SpecInvalid))
                        .collect::<Result<_>>()?;
                    blocks.push(g.parse_block(&r)?);
                }
                seqs.push(blocks);
            }
            (*m, seqs, true)
        }
        PaletteRule::AllSubsetsMinSize { .. } => {
            return Err(Error::SpecInvalid(
                "all-subsets palettes only apply to Mathias-Silver instances".into(),
            ))
        }
    };
    let mut entries = Vec::new();
    for blocks in &seqs {
        let (sub, members) = g.block_subspace(blocks, slack)?;
        if tail_count(&sub) >= m.max(1) {
            entries.push((sub, members));
        }
    }
    let entries = sort_and_dedup(entries, keep_order);
    if entries.is_empty() {
        return Err(Error::SpecInvalid("palette rule produces no subspaces".into()));
    }
    let palette = Palette::new(g.len(), entries, LeqStarRule::Core, FusionRule::Intersection)?;
    if keep_order {
        check_meet_closure(&palette)?;
    }
    SpaceInstance::new(
        format!("grid-sphere(dim={dim},step={},t={slack})", rat::format_rat(&step)),
        InstanceKind::GridSphere { dim, slack },
        g.points(),
        Arc::new(palette),
        Admission::Membership,
        Some(Metric::SupNorm),
    )
}

fn build_explicit(
    labels: &[String],
    subs: &[ExplicitSubspace],
    leq_star: LeqStarRule,
    fusion: FusionRule,
    metric: bool,
) -> Result<SpaceInstance> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::SpecInvalid("explicit instance has no points".into()));
    }
    let mut entries = Vec::new();
    for (i, s) in subs.iter().enumerate() {
        if s.members.iter().chain(s.core.iter().flatten()).any(|&x| x >= n) {
            return Err(Error::SpecInvalid(format!("explicit subspace {i} leaves the universe")));
        }
        let members = point_set(n, s.members.iter().copied());
        let core = match &s.core {
            Some(c) => point_set(n, c.iter().copied()),
            None => members.clone(),
        };
        let label = s.label.clone().unwrap_or_else(|| format!("P{i}"));
        entries.push((
            Subspace {
                label,
                shape: Shape::Set,
                core,
            },
            members,
        ));
    }
    let palette = Palette::new(n, entries, leq_star, fusion)?;
    check_meet_closure(&palette)?;
    let points = if metric {
        labels
            .iter()
            .map(|l| {
                let coords = l
                    .split(',')
                    .map(|c| rat::parse_rat(c).map_err(Error::SpecInvalid))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Point {
                    label: l.clone(),
                    data: PointData::Real(coords),
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        labels
            .iter()
            .map(|l| Point {
                label: l.clone(),
                data: PointData::Label,
            })
            .collect()
    };
    SpaceInstance::new(
        format!("explicit({n} points,{} subspaces)", subs.len()),
        InstanceKind::Explicit,
        points,
        Arc::new(palette),
        Admission::Membership,
        metric.then_some(Metric::SupNorm),
    )
}

/// Every `p <=* q` must have its meet witness inside the palette.
pub fn check_meet_closure(palette: &Palette) -> Result<()> {
    for p in 0..palette.len() {
        for q in 0..palette.len() {
            if palette.leq_star(p, q) && palette.meet_witness(p, q).is_none() {
                return Err(Error::PaletteNotClosedUnderMeet { p, q });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::check_axioms;

    #[test]
    fn mathias_silver_palette_is_size_then_lex() {
        let s = build_instance(&InstanceSpec::mathias_silver(4, 0, 2)).unwrap();
        let labels: Vec<&str> = (0..s.num_subspaces()).map(|p| s.palette().subspace(p).label.as_str()).collect();
        assert_eq!(labels[0], "{0,1,2,3}");
        assert_eq!(labels[1], "{0,1,2}");
        assert_eq!(labels.len(), 11);
        assert_eq!(labels[10], "{2,3}");
    }

    #[test]
    fn tail_palette_for_rosendal_f2_d3() {
        let spec = InstanceSpec::Rosendal {
            field: 2,
            dim: 3,
            slack: 0,
            palette: PaletteRule::ExplicitList {
                subspaces: vec![
                    serde_json::json!([[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
                    serde_json::json!([[0, 1, 0], [0, 0, 1]]),
                    serde_json::json!([[0, 0, 1]]),
                ],
                m: 1,
            },
        };
        let s = build_instance(&spec).unwrap();
        assert_eq!(s.num_subspaces(), 3);
        assert!(check_axioms(&s, 2, 1_000_000).unwrap().passed());
    }

    #[test]
    fn explicit_palette_not_closed_is_reported() {
        let spec = InstanceSpec::Explicit {
            points: vec!["a".into(), "b".into(), "c".into()],
            palette: vec![
                ExplicitSubspace {
                    members: vec![0, 1],
                    core: Some(vec![1]),
                    label: None,
                },
                ExplicitSubspace {
                    members: vec![1, 2],
                    core: None,
                    label: None,
                },
            ],
            leq_star: LeqStarRule::Core,
            fusion: FusionRule::Intersection,
            metric: false,
        };
        assert_eq!(
            build_instance(&spec).unwrap_err(),
            Error::PaletteNotClosedUnderMeet { p: 0, q: 1 }
        );
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            build_instance(&InstanceSpec::rosendal(4, 3, 0)),
            Err(Error::SpecInvalid(_))
        ));
        assert!(matches!(
            build_instance(&InstanceSpec::mathias_silver(4, 0, 5)),
            Err(Error::SpecInvalid(_))
        ));
        assert!(matches!(
            build_instance(&InstanceSpec::grid_sphere(2, Rat::new(2, 5))),
            Err(Error::SpecInvalid(_))
        ));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = InstanceSpec::grid_sphere(2, Rat::new(1, 4));
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"1/4\""));
        let back: InstanceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}

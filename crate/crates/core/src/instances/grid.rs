//! The sup-norm unit sphere of a rational grid, with block subspaces.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::space::{Point, PointData, PointId, PointSet, Shape, Subspace};

#[derive(Clone, Debug)]
pub struct GridSphere {
    pub dim: usize,
    /// Grid points are multiples of `1/steps`.
    pub steps: i64,
    coords: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, PointId>,
}

impl GridSphere {
    pub fn new(dim: usize, step: Rat) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::SpecInvalid(format!("grid sphere dimension {dim} not in 1..=3")));
        }
        if step <= Rat::from_integer(0) || *step.numer() != 1 || *step.denom() > 16 {
            return Err(Error::SpecInvalid(format!(
                "grid step {step} must be 1/k for k in 1..=16"
            )));
        }
        let steps = *step.denom();
        let mut coords = Vec::new();
        let mut c = vec![-steps; dim];
        loop {
            if c.iter().any(|x| x.abs() == steps) {
                coords.push(c.clone());
            }
            let mut i = dim;
            loop {
                if i == 0 {
                    let index = coords.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
                    return Ok(GridSphere {
                        dim,
                        steps,
                        coords,
                        index,
                    });
                }
                i -= 1;
                c[i] += 1;
                if c[i] <= steps {
                    break;
                }
                c[i] = -steps;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.coords
            .iter()
            .map(|c| {
                let real: Vec<Rat> = c.iter().map(|&x| Rat::new(x, self.steps)).collect();
                Point {
                    label: format!(
                        "({})",
                        real.iter().map(crate::rat::format_rat).collect::<Vec<_>>().join(",")
                    ),
                    data: PointData::Real(real),
                }
            })
            .collect()
    }

    fn directions(&self) -> Vec<Vec<i64>> {
        self.coords
            .iter()
            .filter(|c| c.iter().find(|&&x| x != 0).copied().unwrap_or(0) > 0)
            .cloned()
            .collect()
    }

    fn unit(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.dim];
        e[i] = self.steps;
        e
    }

    fn span_members(&self, basis: &[Vec<i64>]) -> PointSet {
        let rank = rank(basis);
        let mut out = PointSet::with_capacity(self.len());
        for (i, c) in self.coords.iter().enumerate() {
            let mut with = basis.to_vec();
            with.push(c.clone());
            if self::rank(&with) == rank {
                out.insert(i);
            }
        }
        out
    }

    pub fn block_subspace(&self, blocks: &[Vec<i64>], slack: usize) -> Result<(Subspace, PointSet)> {
        for b in blocks {
            if !self.index.contains_key(b) {
                return Err(Error::SpecInvalid(format!("block {b:?} is not a grid sphere point")));
            }
        }
        for w in blocks.windows(2) {
            if supp_max(&w[0]) >= supp_min(&w[1]) {
                return Err(Error::SpecInvalid(format!("blocks {:?} and {:?} overlap", w[0], w[1])));
            }
        }
        let segments: Vec<PointSet> = (0..blocks.len()).map(|i| self.span_members(&blocks[i..])).collect();
        let block_points = blocks.iter().map(|b| self.index[b]).collect();
        let tail_start = blocks.iter().position(|b| supp_min(b) >= slack).unwrap_or(blocks.len());
        let core = if tail_start < blocks.len() {
            segments[tail_start].clone()
        } else {
            PointSet::with_capacity(self.len())
        };
        let label = format!(
            "<{}>",
            blocks
                .iter()
                .map(|b| {
                    let parts: Vec<String> = b
                        .iter()
                        .map(|&x| crate::rat::format_rat(&Rat::new(x, self.steps)))
                        .collect();
                    format!("({})", parts.join(","))
                })
                .collect::<Vec<_>>()
                .join(",")
        );
        let members = segments[0].clone();
        Ok((
            Subspace {
                label,
                shape: Shape::Blocks {
                    block_points,
                    segments,
                },
                core,
            },
            members,
        ))
    }

    pub fn tail_blocks(&self, from: usize) -> Vec<Vec<i64>> {
        (from..self.dim).map(|i| self.unit(i)).collect()
    }

    pub fn block_sequences(&self, max_blocks: usize) -> Vec<Vec<Vec<i64>>> {
        let dirs = self.directions();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn extend(dirs: &[Vec<i64>], stack: &mut Vec<Vec<i64>>, max: usize, out: &mut Vec<Vec<Vec<i64>>>) {
            if !stack.is_empty() {
                out.push(stack.clone());
            }
            if stack.len() == max {
                return;
            }
            let floor = stack.last().map(|b| supp_max(b) as isize).unwrap_or(-1);
            for d in dirs {
                if supp_min(d) as isize > floor {
                    stack.push(d.clone());
                    extend(dirs, stack, max, out);
                    stack.pop();
                }
            }
        }
        extend(&dirs, &mut stack, max_blocks, &mut out);
        out
    }

    pub fn parse_block(&self, raw: &[Rat]) -> Result<Vec<i64>> {
        if raw.len() != self.dim {
            return Err(Error::SpecInvalid(format!("block {raw:?} has the wrong length")));
        }
        raw.iter()
            .map(|r| {
                let scaled = r * Rat::from_integer(self.steps);
                if scaled.is_integer() {
                    Ok(scaled.to_integer())
                } else {
                    Err(Error::SpecInvalid(format!("coordinate {r} is off the grid")))
                }
            })
            .collect()
    }
}

fn supp_min(v: &[i64]) -> usize {
    v.iter().position(|&x| x != 0).unwrap_or(v.len())
}

fn supp_max(v: &[i64]) -> usize {
    v.iter().rposition(|&x| x != 0).unwrap_or(0)
}

/// Rank over the rationals.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(x)).collect())
        .collect();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != Rat::from_integer(0)) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && m[r][c] != Rat::from_integer(0) {
                let f = m[r][c] / m[rank][c];
                for k in 0..cols {
                    let d = m[rank][k] * f;
                    m[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_grid_sphere_has_32_points() {
        let g = GridSphere::new(2, Rat::new(1, 4)).unwrap();
        assert_eq!(g.len(), 32);
        let g = GridSphere::new(2, Rat::new(1, 2)).unwrap();
        assert_eq!(g.len(), 16);
    }

    #[test]
    fn lines_meet_the_sphere_twice() {
        let g = GridSphere::new(2, Rat::new(1, 4)).unwrap();
        let (_, members) = g.block_subspace(&[vec![4, -2]], 0).unwrap();
        assert_eq!(members.count_ones(..), 2);
        let (_, plane) = g.block_subspace(&g.tail_blocks(0), 0).unwrap();
        assert_eq!(plane.count_ones(..), 32);
    }

    #[test]
    fn rejects_steps_that_do_not_divide_one() {
        assert!(GridSphere::new(2, Rat::new(2, 5)).is_err());
    }
}

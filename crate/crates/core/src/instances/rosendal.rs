//! Block subspaces of `F_q^d`, either on nonzero vectors or on lines.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::space::{Point, PointData, PointId, PointSet, Shape, Subspace};

/// A finite vector space `F_q^d` with its nonzero vectors (or lines) enumerated
/// in lexicographic order of coordinates.
#[derive(Clone, Debug)]
pub struct FieldSpace {
    pub field: u8,
    pub dim: usize,
    pub projective: bool,
    vectors: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, PointId>,
}

pub fn is_prime(q: u8) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

impl FieldSpace {
    pub fn new(field: u8, dim: usize, projective: bool) -> Result<Self> {
        if !is_prime(field) {
            return Err(Error::SpecInvalid(format!("field size {field} is not prime")));
        }
        if dim == 0 || (field as f64).powi(dim as i32) > 200_000.0 {
            return Err(Error::SpecInvalid(format!("dimension {dim} is out of range for F_{field}")));
        }
        let mut vectors = Vec::new();
        let mut v = vec![0u8; dim];
        loop {
            // increment little-endian from the last coordinate
            let mut i = dim;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                v[i] += 1;
                if v[i] < field {
                    break;
                }
                v[i] = 0;
            }
            if v.iter().all(|&c| c == 0) {
                break;
            }
            if !projective || first_nonzero(&v) == Some(1) {
                vectors.push(v.clone());
            }
        }
        let index = vectors.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        Ok(FieldSpace {
            field,
            dim,
            projective,
            vectors,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, x: PointId) -> &[u8] {
        &self.vectors[x]
    }

    pub fn points(&self) -> Vec<Point> {
        self.vectors
            .iter()
            .map(|v| Point {
                label: vector_label(v, self.projective),
                data: PointData::Vector(v.clone()),
            })
            .collect()
    }

    /// The point carrying a nonzero vector (its line in the projective case).
    pub fn point_of(&self, v: &[u8]) -> Option<PointId> {
        if v.iter().all(|&c| c == 0) {
            return None;
        }
        if self.projective {
            self.index.get(&normalize(v, self.field)).copied()
        } else {
            self.index.get(v).copied()
        }
    }

    /// Points inside the span of the given vectors.
    pub fn span_members(&self, basis: &[Vec<u8>]) -> PointSet {
        let mut out = PointSet::with_capacity(self.len());
        let k = basis.len();
        let mut coeff = vec![0u8; k];
        loop {
            let mut v = vec![0u8; self.dim];
            for (c, b) in coeff.iter().zip(basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = ((*vi as u16 + *c as u16 * *bi as u16) % self.field as u16) as u8;
                }
            }
            if let Some(p) = self.point_of(&v) {
                out.insert(p);
            }
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                coeff[i] += 1;
                if coeff[i] < self.field {
                    break;
                }
                coeff[i] = 0;
                i += 1;
            }
        }
    }

    /// Builds the palette entry for a block sequence; blocks must be nonzero
    /// with strictly increasing supports.
    pub fn block_subspace(&self, blocks: &[Vec<u8>], slack: usize) -> Result<(Subspace, PointSet)> {
        let blocks: Vec<Vec<u8>> = blocks.iter().map(|b| normalize(b, self.field)).collect();
        for b in &blocks {
            if b.len() != self.dim || b.iter().any(|&c| c >= self.field) || b.iter().all(|&c| c == 0) {
                return Err(Error::SpecInvalid(format!("bad block {b:?} for F_{}^{}", self.field, self.dim)));
            }
        }
        for w in blocks.windows(2) {
            if max_support(&w[0]) >= min_support(&w[1]) {
                return Err(Error::SpecInvalid(format!("blocks {:?} and {:?} overlap", w[0], w[1])));
            }
        }
        let segments: Vec<PointSet> = (0..blocks.len()).map(|i| self.span_members(&blocks[i..])).collect();
        let block_points: Vec<PointId> = blocks.iter().map(|b| self.point_of(b).unwrap()).collect();
        let tail_start = blocks
            .iter()
            .position(|b| min_support(b) >= slack)
            .unwrap_or(blocks.len());
        let core = if tail_start < blocks.len() {
            segments[tail_start].clone()
        } else {
            PointSet::with_capacity(self.len())
        };
        let members = segments[0].clone();
        let label = format!(
            "<{}>",
            blocks.iter().map(|b| vector_label(b, false)).collect::<Vec<_>>().join(",")
        );
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

    /// All block sequences with at most `max_blocks` terms, blocks normalized.
    pub fn block_sequences(&self, max_blocks: usize) -> Vec<Vec<Vec<u8>>> {
        let normalized: Vec<Vec<u8>> = if self.projective {
            self.vectors.clone()
        } else {
            self.vectors.iter().filter(|v| first_nonzero(v) == Some(1)).cloned().collect()
        };
        let mut out = Vec::new();
        let mut stack: Vec<Vec<u8>> = Vec::new();
        fn extend(
            normalized: &[Vec<u8>],
            stack: &mut Vec<Vec<u8>>,
            max_blocks: usize,
            out: &mut Vec<Vec<Vec<u8>>>,
        ) {
            if !stack.is_empty() {
                out.push(stack.clone());
            }
            if stack.len() == max_blocks {
                return;
            }
            let floor = stack.last().map(|b| max_support(b) as isize).unwrap_or(-1);
            for v in normalized {
                if min_support(v) as isize > floor {
                    stack.push(v.clone());
                    extend(normalized, stack, max_blocks, out);
                    stack.pop();
                }
            }
        }
        extend(&normalized, &mut stack, max_blocks, &mut out);
        out
    }

    pub fn tail_blocks(&self, from: usize) -> Vec<Vec<u8>> {
        (from..self.dim)
            .map(|i| {
                let mut e = vec![0u8; self.dim];
                e[i] = 1;
                e
            })
            .collect()
    }
}

pub fn first_nonzero(v: &[u8]) -> Option<u8> {
    v.iter().copied().find(|&c| c != 0)
}

pub fn last_nonzero(v: &[u8]) -> Option<u8> {
    v.iter().rev().copied().find(|&c| c != 0)
}

pub fn min_support(v: &[u8]) -> usize {
    v.iter().position(|&c| c != 0).unwrap_or(v.len())
}

pub fn max_support(v: &[u8]) -> usize {
    v.iter().rposition(|&c| c != 0).unwrap_or(0)
}

fn inverse(a: u8, q: u8) -> u8 {
    (1..q).find(|&b| (a as u16 * b as u16) % q as u16 == 1).unwrap()
}

/// Scales a vector so that its first nonzero coordinate is 1.
pub fn normalize(v: &[u8], q: u8) -> Vec<u8> {
    match first_nonzero(v) {
        None => v.to_vec(),
        Some(a) => {
            let inv = inverse(a, q) as u16;
            v.iter().map(|&c| ((c as u16 * inv) % q as u16) as u8).collect()
        }
    }
}

pub fn scale(v: &[u8], lambda: u8, q: u8) -> Vec<u8> {
    v.iter().map(|&c| ((c as u16 * lambda as u16) % q as u16) as u8).collect()
}

fn vector_label(v: &[u8], projective: bool) -> String {
    let inner = v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    if projective {
        format!("[{inner}]")
    } else {
        format!("({inner})")
    }
}

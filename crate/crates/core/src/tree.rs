//! Rooted finite trees laid out breadth-first.
//!
//! Node 0 is the root. Nodes are numbered generation by generation, and the
//! children of every node occupy a contiguous index range, so iterating the
//! indices in reverse visits every child before its parent.

use std::fmt::Write as _;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Hard cap on the number of nodes any constructor will materialize.
pub const MAX_NODES: usize = 10_000_000;

/// Offspring law of a Galton–Watson tree: a finite list of
/// `(child count, probability)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffspringDistribution {
    support: Vec<(usize, f64)>,
}

impl OffspringDistribution {
    pub fn new(support: Vec<(usize, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(domain("offspring distribution needs at least one atom"));
        }
        if let Some(&(c, p)) = support.iter().find(|(_, p)| !(p.is_finite() && *p > 0.0)) {
            return Err(domain(format!("probability of {c} children must be positive, got {p}")));
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("offspring probabilities sum to {total}, not 1")));
        }
        Ok(Self { support })
    }

    pub fn deterministic(d: usize) -> Self {
        Self { support: vec![(d, 1.0)] }
    }

    /// Parses `"c1:p1,c2:p2,..."`.
    pub fn parse(s: &str) -> Result<Self> {
        let support = s
            .split(',')
            .map(|atom| {
                let (c, p) = atom
                    .split_once(':')
                    .ok_or_else(|| domain(format!("expected count:prob, got {atom:?}")))?;
                let c = c.trim().parse::<usize>().map_err(|e| domain(format!("{c:?}: {e}")))?;
                let p = p.trim().parse::<f64>().map_err(|e| domain(format!("{p:?}: {e}")))?;
                Ok((c, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(support)
    }

    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(c, p)| c as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.support.iter().map(|&(c, p)| p * (c as f64 - m).powi(2)).sum()
    }

    pub fn max_count(&self) -> usize {
        self.support.iter().map(|&(c, _)| c).max().unwrap_or(0)
    }

    /// The single count if the law is a point mass.
    pub fn as_deterministic(&self) -> Option<usize> {
        match self.support.as_slice() {
            [(c, _)] => Some(*c),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if let Some(c) = self.as_deterministic() {
            return c;
        }
        let mut x: f64 = rng.random();
        for &(c, p) in &self.support {
            if x < p {
                return c;
            }
            x -= p;
        }
        self.support.last().map(|&(c, _)| c).unwrap_or(0)
    }
}

/// A rooted tree of explicit depth `N`. The boundary is the set of nodes at
/// depth exactly `N`; childless nodes above it carry no boundary spin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeInstance {
    parent: Vec<Option<usize>>,
    node_depth: Vec<usize>,
    first_child: Vec<usize>,
    num_children: Vec<usize>,
    /// `generation_start[k]..generation_start[k+1]` are the nodes at depth `k`.
    generation_start: Vec<usize>,
    depth: usize,
}

impl TreeInstance {
    /// Grows a tree breadth-first; `offspring(node, depth)` gives the number
    /// of children of each node above depth `depth`.
    pub fn grow<F>(depth: usize, mut offspring: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> usize,
    {
        let mut parent = vec![None];
        let mut node_depth = vec![0];
        let mut first_child = Vec::new();
        let mut num_children = Vec::new();
        let mut generation_start = vec![0, 1];
        for k in 0..depth {
            let (lo, hi) = (generation_start[k], generation_start[k + 1]);
            for v in lo..hi {
                let c = offspring(v, k);
                let start = parent.len();
                if start.checked_add(c).is_none_or(|n| n > MAX_NODES) {
                    return Err(Error::TreeTooLarge { limit: MAX_NODES });
                }
                first_child.push(start);
                num_children.push(c);
                parent.extend(std::iter::repeat_n(Some(v), c));
                node_depth.extend(std::iter::repeat_n(k + 1, c));
            }
            generation_start.push(parent.len());
        }
        let n = parent.len();
        first_child.resize(n, n);
        num_children.resize(n, 0);
        Ok(Self { parent, node_depth, first_child, num_children, generation_start, depth })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn node_depth(&self, v: usize) -> usize {
        self.node_depth[v]
    }

    pub fn children(&self, v: usize) -> Range<usize> {
        self.first_child[v]..self.first_child[v] + self.num_children[v]
    }

    pub fn num_children(&self, v: usize) -> usize {
        self.num_children[v]
    }

    pub fn generation(&self, k: usize) -> Range<usize> {
        self.generation_start[k]..self.generation_start[k + 1]
    }

    pub fn boundary(&self) -> Range<usize> {
        self.generation(self.depth)
    }

    /// True when no node reaches depth `N`.
    pub fn is_extinct(&self) -> bool {
        self.boundary().is_empty()
    }

    /// Node indices ordered so that every child precedes its parent.
    pub fn leaves_to_root(&self) -> impl Iterator<Item = usize> {
        (0..self.len()).rev()
    }

    /// Line format: `N <depth>` followed by `<index> <parent|-1> <depth>` per node.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(16 * self.len());
        writeln!(out, "N {}", self.depth).unwrap();
        for v in 0..self.len() {
            match self.parent[v] {
                Some(p) => writeln!(out, "{v} {p} {}", self.node_depth[v]).unwrap(),
                None => writeln!(out, "{v} -1 {}", self.node_depth[v]).unwrap(),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.into() };

        let (l0, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
        let depth = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["N", n] => n.parse::<usize>().map_err(|e| parse_err(l0, &e.to_string()))?,
            _ => return Err(parse_err(l0, "expected header `N <depth>`")),
        };

        let mut parents: Vec<Option<usize>> = Vec::new();
        let mut depths = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [idx, par, dep] = fields.as_slice() else {
                return Err(parse_err(ln, "expected `<index> <parent|-1> <depth>`"));
            };
            let idx: usize = idx.parse().map_err(|_| parse_err(ln, "bad index"))?;
            if idx != parents.len() {
                return Err(parse_err(ln, "node indices must be 0,1,2,... in order"));
            }
            let par: i64 = par.parse().map_err(|_| parse_err(ln, "bad parent"))?;
            let dep: usize = dep.parse().map_err(|_| parse_err(ln, "bad depth"))?;
            let par = match (idx, par) {
                (0, -1) => None,
                (0, _) => return Err(parse_err(ln, "node 0 must be the root")),
                (_, p) if p < 0 || p as usize >= idx => {
                    return Err(parse_err(ln, "parent must precede its child"))
                }
                (_, p) => Some(p as usize),
            };
            let want_depth = par.map_or(0, |p| depths[p] + 1);
            if dep != want_depth || dep > depth {
                return Err(parse_err(ln, "inconsistent depth"));
            }
            if let (Some(p), Some(Some(prev))) = (par, parents.last()) {
                if p < *prev {
                    return Err(parse_err(ln, "nodes must be listed breadth-first"));
                }
            }
            parents.push(par);
            depths.push(dep);
            if parents.len() > MAX_NODES {
                return Err(Error::TreeTooLarge { limit: MAX_NODES });
            }
        }
        if parents.is_empty() {
            return Err(parse_err(l0, "tree has no root"));
        }

        let mut counts = vec![0usize; parents.len()];
        for p in parents.iter().flatten() {
            counts[*p] += 1;
        }
        let tree = Self::grow(depth, |v, _| counts[v])?;
        if tree.len() != parents.len() || tree.parent != parents {
            return Err(parse_err(l0, "nodes must be listed breadth-first"));
        }
        Ok(tree)
    }
}

pub fn regular_tree(d: usize, depth: usize) -> Result<TreeInstance> {
    if d == 0 {
        return Err(domain("regular tree needs d >= 1"));
    }
    spherically_symmetric_tree(&vec![d; depth])
}

/// Every node at depth `k` has `d_per_generation[k]` children.
pub fn spherically_symmetric_tree(d_per_generation: &[usize]) -> Result<TreeInstance> {
    if d_per_generation.contains(&0) {
        return Err(domain("offspring counts must be >= 1"));
    }
    let mut n: usize = 1;
    let mut gen: usize = 1;
    for &d in d_per_generation {
        gen = gen.checked_mul(d).ok_or(Error::TreeTooLarge { limit: MAX_NODES })?;
        n = n.checked_add(gen).ok_or(Error::TreeTooLarge { limit: MAX_NODES })?;
        if n > MAX_NODES {
            return Err(Error::TreeTooLarge { limit: MAX_NODES });
        }
    }
    TreeInstance::grow(d_per_generation.len(), |_, k| d_per_generation[k])
}

/// Galton–Watson tree of depth `depth` with i.i.d. offspring counts.
/// Extinct trees are returned as-is; check [`TreeInstance::is_extinct`].
pub fn galton_watson_tree(
    dist: &OffspringDistribution,
    depth: usize,
    seed: u64,
) -> Result<TreeInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    galton_watson_tree_with(dist, depth, &mut rng)
}

pub fn galton_watson_tree_with<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    depth: usize,
    rng: &mut R,
) -> Result<TreeInstance> {
    TreeInstance::grow(depth, |_, _| dist.sample(rng))
}

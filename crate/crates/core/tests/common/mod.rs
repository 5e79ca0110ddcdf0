//! Independent reference implementations shared by the integration tests
//! and the acceptance suite. Nothing here calls the library's numerics; the
//! oracles work from first principles (explicit sums, dense linear algebra).

#![allow(dead_code)]

use std::collections::HashMap;

use potts_tree::tree::TreeInstance;

/// Reference `(d, ε_r, β_r, λ_r)` rows of the q = 5 reconstruction table.
pub const REFERENCE_TABLE1: [(usize, f64, f64, f64); 5] = [
    (2, 0.2348, 1.2838, 0.7065),
    (3, 0.33881, 1.0285, 0.5765),
    (4, 0.4008, 0.8942, 0.4990),
    (7, 0.4986, 0.6955, 0.3767),
    (15, 0.5955, 0.4998, 0.2556),
];

/// Reference `(d, β_c, λ_c)` rows of the q = 5 extremality bound table.
pub const REFERENCE_TABLE2: [(usize, f64, f64); 5] = [
    (2, 1.2425, 0.6875),
    (3, 0.98535, 0.5526),
    (4, 0.8520, 0.47346),
    (7, 0.65465, 0.35095),
    (15, 0.4640, 0.2342),
];

/// Second eigenvalue of the q×q channel matrix built by hand and
/// diagonalized densely.
pub fn lambda2_by_eigen(q: usize, beta: f64) -> f64 {
    let a = (2.0 * beta).exp();
    let z = a + q as f64 - 1.0;
    let m = nalgebra::DMatrix::from_fn(q, q, |i, j| if i == j { a / z } else { 1.0 / z });
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().map(|v| v.abs()).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev[1]
}

/// Kullback–Leibler divergence between two rows of the channel matrix,
/// computed directly from the row entries.
pub fn channel_row_kl(q: usize, beta: f64) -> f64 {
    let a = (2.0 * beta).exp();
    let z = a + q as f64 - 1.0;
    let row = |i: usize| -> Vec<f64> { (0..q).map(|j| if i == j { a / z } else { 1.0 / z }).collect() };
    let (r0, r1) = (row(0), row(1));
    r0.iter().zip(&r1).map(|(p, r)| p * (p / r).ln()).sum()
}

/// A rooted unlabeled tree: the list of child subtrees, kept sorted so that
/// isomorphic shapes compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Shape(pub Vec<Shape>);

impl Shape {
    pub fn size(&self) -> usize {
        1 + self.0.iter().map(Shape::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.0.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }
}

/// All rooted unlabeled trees with exactly `n` nodes.
pub fn shapes_of_size(n: usize, memo: &mut HashMap<usize, Vec<Shape>>) -> Vec<Shape> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    // children form a nonincreasing sequence of shapes with total size n-1
    fn fill(
        remaining: usize,
        bound: Option<&Shape>,
        acc: &mut Vec<Shape>,
        out: &mut Vec<Shape>,
        memo: &mut HashMap<usize, Vec<Shape>>,
    ) {
        if remaining == 0 {
            out.push(Shape(acc.clone()));
            return;
        }
        for s in (1..=remaining).rev() {
            for child in shapes_of_size(s, memo) {
                if bound.is_some_and(|b| &child > b) {
                    continue;
                }
                acc.push(child.clone());
                fill(remaining - s, Some(&child), acc, out, memo);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    fill(n - 1, None, &mut Vec::new(), &mut out, memo);
    out.sort();
    out.dedup();
    memo.insert(n, out.clone());
    out
}

/// Every rooted unlabeled tree with between 1 and `max_nodes` nodes.
pub fn all_shapes(max_nodes: usize) -> Vec<Shape> {
    let mut memo = HashMap::new();
    (1..=max_nodes).flat_map(|n| shapes_of_size(n, &mut memo)).collect()
}

/// Lays a shape out breadth-first with depth equal to its height.
pub fn shape_to_tree(shape: &Shape) -> TreeInstance {
    let mut queue: Vec<&Shape> = vec![shape];
    TreeInstance::grow(shape.height(), |v, _| {
        let node = queue[v];
        queue.extend(node.0.iter());
        node.0.len()
    })
    .unwrap()
}

/// Per-generation offspring sequences whose spherically symmetric tree has
/// at most `max_nodes` nodes (including the empty sequence).
pub fn spherical_sequences(max_nodes: usize) -> Vec<Vec<usize>> {
    fn rec(seq: &mut Vec<usize>, last_gen: usize, total: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        out.push(seq.clone());
        for d in 1.. {
            let next = last_gen * d;
            if total + next > max {
                break;
            }
            seq.push(d);
            rec(seq, next, total + next, max, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, 1, max_nodes, &mut out);
    out
}

/// Conditional root laws `P(σ_root = · | boundary)` under the Potts weights
/// `Π_edges e^{2β·1[σ_u = σ_v]}`, by summing over every assignment of the
/// non-boundary nodes. Returns one law per entry of `betas`.
pub fn brute_force_root_laws(tree: &TreeInstance, q: usize, betas: &[f64], boundary: &[usize]) -> Vec<Vec<f64>> {
    let n = tree.len();
    let bnd = tree.boundary();
    let mut spin = vec![usize::MAX; n];
    for (v, &s) in bnd.clone().zip(boundary) {
        spin[v] = s;
    }
    let free: Vec<usize> = (0..n).filter(|v| !bnd.contains(v)).collect();
    let edges = n - 1;
    // counts[root][k]: number of assignments with root symbol `root` and
    // exactly k agreeing edges
    let mut counts = vec![vec![0u64; edges + 1]; q];
    let parent: Vec<Option<usize>> = (0..n).map(|v| tree.parent(v)).collect();

    // Depth-first over the free nodes in index (breadth-first) order; a
    // node's parent is always assigned before it, so agreements on the edge
    // to a free node are counted when the node is assigned, and agreements
    // on edges into boundary nodes once all free nodes are set.
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        agree: usize,
        free: &[usize],
        spin: &mut [usize],
        parent: &[Option<usize>],
        boundary_edges: &[(usize, usize)],
        q: usize,
        counts: &mut [Vec<u64>],
    ) {
        if i == free.len() {
            let extra = boundary_edges.iter().filter(|&&(c, p)| spin[c] == spin[p]).count();
            counts[spin[0]][agree + extra] += 1;
            return;
        }
        let v = free[i];
        for s in 0..q {
            spin[v] = s;
            let a = parent[v].map_or(0, |p| usize::from(spin[p] == s));
            rec(i + 1, agree + a, free, spin, parent, boundary_edges, q, counts);
        }
    }
    let boundary_edges: Vec<(usize, usize)> = bnd.clone().filter_map(|c| parent[c].map(|p| (c, p))).collect();
    if free.is_empty() {
        // depth-0 tree whose root is its own boundary
        counts[spin[0]][0] += 1;
    } else {
        rec(0, 0, &free, &mut spin, &parent, &boundary_edges, q, &mut counts);
    }

    betas
        .iter()
        .map(|&beta| {
            let a = (2.0 * beta).exp();
            let powers: Vec<f64> = (0..=edges).map(|k| a.powi(k as i32)).collect();
            let w: Vec<f64> =
                counts.iter().map(|row| row.iter().zip(&powers).map(|(&c, &p)| c as f64 * p).sum()).collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        })
        .collect()
}

/// Exact law of the boundary configuration under the free measure, keyed
/// by the boundary symbols in boundary order.
pub fn exact_boundary_law(tree: &TreeInstance, q: usize, beta: f64) -> HashMap<Vec<usize>, f64> {
    let n = tree.len();
    let a = (2.0 * beta).exp();
    let mut spin = vec![0usize; n];
    let mut law: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut total = 0.0;
    loop {
        let agree = (1..n).filter(|&v| spin[v] == spin[tree.parent(v).unwrap()]).count();
        let w = a.powi(agree as i32);
        total += w;
        *law.entry(spin[tree.boundary()].to_vec()).or_default() += w;
        // mixed-radix increment
        let mut i = 0;
        while i < n {
            spin[i] += 1;
            if spin[i] < q {
                break;
            }
            spin[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    law.values_mut().for_each(|w| *w /= total);
    law
}

/// Upper-tail probability of the chi-square distribution.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    ChiSquared::new(dof as f64).unwrap().sf(x)
}

/// Pearson statistic of observed counts against a uniform law over `q` cells.
pub fn uniform_chi_square(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let e = n as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

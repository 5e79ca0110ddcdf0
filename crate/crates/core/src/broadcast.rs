//! Monte-Carlo engine for the broadcast chain.
//!
//! Boundary configurations are sampled from the free measure by
//! broadcasting from a uniform root. For each sample, a single leaf-to-root
//! sweep computes the exact conditional law of the root spin. The sweep uses
//! the per-node form of the log-likelihood recursion: the log-weight of
//! symbol `j` at `v` is `Σ_w u(P_w(j))`, summed over the children `w`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{entropy_integrand, MessageVector, PottsChannel, ProbVector};
use crate::error::{domain, Result};
use crate::tree::{galton_watson_tree_with, regular_tree, spherically_symmetric_tree, OffspringDistribution, TreeInstance};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "POTTS_TREE_THREADS";

/// Symbol at the root of a broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootSymbol {
    Uniform,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinConfiguration {
    spins: Vec<usize>,
}

impl SpinConfiguration {
    pub fn new(tree: &TreeInstance, q: usize, spins: Vec<usize>) -> Result<Self> {
        if spins.len() != tree.len() {
            return Err(domain(format!("{} spins for a tree of {} nodes", spins.len(), tree.len())));
        }
        if let Some(s) = spins.iter().find(|&&s| s >= q) {
            return Err(domain(format!("symbol {s} out of range for q = {q}")));
        }
        Ok(Self { spins })
    }

    pub fn spins(&self) -> &[usize] {
        &self.spins
    }

    pub fn spin(&self, v: usize) -> usize {
        self.spins[v]
    }

    /// The spins of the depth-`N` nodes, in node order.
    pub fn boundary<'a>(&'a self, tree: &TreeInstance) -> &'a [usize] {
        &self.spins[tree.boundary()]
    }
}

/// Samples the broadcast chain on `tree`.
pub fn broadcast(tree: &TreeInstance, ch: &PottsChannel, root: RootSymbol, seed: u64) -> Result<SpinConfiguration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    broadcast_with(tree, ch, root, &mut rng)
}

pub fn broadcast_with<R: Rng + ?Sized>(
    tree: &TreeInstance,
    ch: &PottsChannel,
    root: RootSymbol,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    let mut spins = vec![0usize; tree.len()];
    fill_broadcast(tree, ch, root, rng, &mut spins)?;
    Ok(SpinConfiguration { spins })
}

fn fill_broadcast<R: Rng + ?Sized>(
    tree: &TreeInstance,
    ch: &PottsChannel,
    root: RootSymbol,
    rng: &mut R,
    spins: &mut [usize],
) -> Result<()> {
    let q = ch.q();
    spins[0] = match root {
        RootSymbol::Uniform => rng.random_range(0..q),
        RootSymbol::Fixed(s) if s < q => s,
        RootSymbol::Fixed(s) => return Err(domain(format!("root symbol {s} out of range for q = {q}"))),
    };
    let stay = ch.stay_probability();
    // breadth-first order: parents are assigned before their children
    for v in 1..tree.len() {
        let parent = spins[tree.parent(v).expect("non-root has a parent")];
        spins[v] = if rng.random::<f64>() < stay {
            parent
        } else {
            let r = rng.random_range(0..q - 1);
            if r >= parent {
                r + 1
            } else {
                r
            }
        };
    }
    Ok(())
}

fn check_boundary(tree: &TreeInstance, q: usize, boundary: &[usize]) -> Result<()> {
    let expected = tree.boundary().len();
    let free_root = tree.depth() == 0 && boundary.is_empty();
    if boundary.len() != expected && !free_root {
        return Err(domain(format!("boundary has {} symbols, tree has {expected} boundary nodes", boundary.len())));
    }
    if let Some(s) = boundary.iter().find(|&&s| s >= q) {
        return Err(domain(format!("boundary symbol {s} out of range for q = {q}")));
    }
    Ok(())
}

/// Reusable buffers for the leaf-to-root sweep.
struct Sweep {
    q: usize,
    /// Row-major `n × q` conditional probabilities of each subtree root.
    probs: Vec<f64>,
    /// The same rows as max-gauged log-weights.
    logs: Vec<f64>,
    logw: Vec<f64>,
}

impl Sweep {
    fn new(q: usize) -> Self {
        Self { q, probs: Vec::new(), logs: Vec::new(), logw: vec![0.0; q] }
    }

    /// Fills one row per node; the root is row 0.
    fn run(&mut self, tree: &TreeInstance, ch: &PottsChannel, boundary: &[usize]) {
        let q = self.q;
        let am1 = ch.coupling_minus_one();
        self.probs.clear();
        self.probs.resize(tree.len() * q, 1.0 / q as f64);
        self.logs.clear();
        self.logs.resize(tree.len() * q, 0.0);
        let bnd = tree.boundary();
        if !boundary.is_empty() {
            for (v, &s) in bnd.clone().zip(boundary) {
                let row = &mut self.probs[v * q..(v + 1) * q];
                row.fill(0.0);
                row[s] = 1.0;
                let logs = &mut self.logs[v * q..(v + 1) * q];
                logs.fill(f64::NEG_INFINITY);
                logs[s] = 0.0;
            }
        }
        for v in tree.leaves_to_root() {
            if bnd.contains(&v) || tree.num_children(v) == 0 {
                continue;
            }
            self.logw.fill(0.0);
            for w in tree.children(v) {
                let pw = &self.probs[w * q..(w + 1) * q];
                for (lw, &p) in self.logw.iter_mut().zip(pw) {
                    *lw += (am1 * p).ln_1p();
                }
            }
            let max = self.logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let row = &mut self.probs[v * q..(v + 1) * q];
            let logs = &mut self.logs[v * q..(v + 1) * q];
            let mut total = 0.0;
            for ((r, l), &lw) in row.iter_mut().zip(logs.iter_mut()).zip(&self.logw) {
                *l = lw - max;
                *r = l.exp();
                total += *r;
            }
            row.iter_mut().for_each(|r| *r /= total);
        }
    }

    fn row(&self, v: usize) -> &[f64] {
        &self.probs[v * self.q..(v + 1) * self.q]
    }
}

/// Conditional law of the root spin given the boundary symbols `boundary`
/// (ordered like [`TreeInstance::boundary`]).
pub fn bp_root_marginal(tree: &TreeInstance, ch: &PottsChannel, boundary: &[usize]) -> Result<ProbVector> {
    check_boundary(tree, ch.q(), boundary)?;
    let mut sweep = Sweep::new(ch.q());
    sweep.run(tree, ch, boundary);
    ProbVector::from_weights(sweep.row(0).to_vec())
}

/// Log-likelihood messages `X^j_k(v) = log P_v(j) - log P_v(k)` at every
/// node. Boundary nodes carry a point mass, so their non-boundary entries
/// are `-∞`.
pub fn bp_all_messages(tree: &TreeInstance, ch: &PottsChannel, boundary: &[usize]) -> Result<Vec<MessageVector>> {
    check_boundary(tree, ch.q(), boundary)?;
    let mut sweep = Sweep::new(ch.q());
    sweep.run(tree, ch, boundary);
    (0..tree.len())
        .map(|v| MessageVector::from_log_weights(sweep.logs[v * sweep.q..(v + 1) * sweep.q].to_vec()))
        .collect()
}

/// How trees are produced for each Monte-Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSpec {
    Regular(usize),
    /// Offspring count per generation; only the first `depth` entries are used.
    SphericallySymmetric(Vec<usize>),
    /// A fresh Galton–Watson tree per trial (annealed), or one tree drawn
    /// from the run seed and reused for every trial (quenched).
    GaltonWatson { offspring: OffspringDistribution, quenched: bool },
    /// A fixed tree; its own depth must equal the requested depth.
    Fixed(Arc<TreeInstance>),
}

impl TreeSpec {
    /// Short label used in estimate dumps.
    pub fn label(&self) -> String {
        match self {
            Self::Regular(d) => format!("regular:{d}"),
            Self::SphericallySymmetric(ds) => {
                format!("spherical:{}", ds.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            }
            Self::GaltonWatson { offspring, quenched } => {
                let atoms: Vec<String> = offspring.support().iter().map(|(c, p)| format!("{c}:{p}")).collect();
                format!("gw{}:{}", if *quenched { "-quenched" } else { "" }, atoms.join(","))
            }
            Self::Fixed(t) => format!("fixed:{}nodes", t.len()),
        }
    }

    fn fixed_tree(&self, depth: usize, seed: u64) -> Result<Option<Arc<TreeInstance>>> {
        Ok(match self {
            Self::Regular(d) => Some(Arc::new(regular_tree(*d, depth)?)),
            Self::SphericallySymmetric(ds) => {
                if ds.len() < depth {
                    return Err(domain(format!("{} generations given for depth {depth}", ds.len())));
                }
                Some(Arc::new(spherically_symmetric_tree(&ds[..depth])?))
            }
            Self::GaltonWatson { offspring, quenched: true } => {
                Some(Arc::new(galton_watson_tree_with(offspring, depth, &mut trial_rng(seed, u64::MAX))?))
            }
            Self::GaltonWatson { quenched: false, .. } => None,
            Self::Fixed(t) => {
                if t.depth() != depth {
                    return Err(domain(format!("fixed tree has depth {}, requested {depth}", t.depth())));
                }
                Some(Arc::clone(t))
            }
        })
    }
}

/// Generator for trial `t` of a run seeded with `seed`: ChaCha8 keyed by
/// `seed`, stream `t`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] (default: rayon's global pool).
pub fn with_worker_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    with_threads(configured_threads(), f)
}

pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Runs `trials` independent trials, each producing one value, and returns
/// the values in trial order.
fn run_trials<F>(spec: &TreeSpec, ch: &PottsChannel, depth: usize, trials: usize, seed: u64, per_trial: F) -> Result<Vec<f64>>
where
    F: Fn(&TreeInstance, &[usize], &mut Sweep) -> f64 + Sync,
{
    let fixed = spec.fixed_tree(depth, seed)?;
    let q = ch.q();
    with_worker_pool(|| {
        (0..trials)
            .into_par_iter()
            .map_init(
                || (Sweep::new(q), Vec::new()),
                |(sweep, spins), t| -> Result<f64> {
                    let mut rng = trial_rng(seed, t as u64);
                    let owned;
                    let tree: &TreeInstance = match (&fixed, spec) {
                        (Some(t), _) => t,
                        (None, TreeSpec::GaltonWatson { offspring, .. }) => {
                            owned = galton_watson_tree_with(offspring, depth, &mut rng)?;
                            &owned
                        }
                        (None, _) => unreachable!("only annealed trees are drawn per trial"),
                    };
                    spins.clear();
                    spins.resize(tree.len(), 0);
                    fill_broadcast(tree, ch, RootSymbol::Uniform, &mut rng, spins)?;
                    let boundary = &spins[tree.boundary()];
                    sweep.run(tree, ch, boundary);
                    Ok(per_trial(tree, boundary, sweep))
                },
            )
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub q: usize,
    pub beta: f64,
    pub d_spec: String,
    pub depth: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
}

impl EntropyEstimate {
    pub fn channel(&self) -> PottsChannel {
        PottsChannel::new(self.q, self.beta).expect("estimate built from a valid channel")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte-Carlo estimate of the boundary relative entropy at the root,
/// `(1/(q-1)) E_ξ Σᵢ φ(q P(η(0)=i | ξ))`.
pub fn entropy_mc(spec: &TreeSpec, ch: &PottsChannel, depth: usize, trials: usize, seed: u64) -> Result<EntropyEstimate> {
    if trials == 0 {
        return Err(domain("trials must be >= 1"));
    }
    let values = run_trials(spec, ch, depth, trials, seed, |_, _, sweep| {
        entropy_integrand(&ProbVector::from_weights(sweep.row(0).to_vec()).expect("root row is a distribution"))
    })?;
    let (mean, std_error) = mean_and_std_error(&values);
    debug_assert!(mean >= -3.0 * std_error);
    Ok(EntropyEstimate {
        q: ch.q(),
        beta: ch.beta(),
        d_spec: spec.label(),
        depth,
        trials,
        seed,
        mean,
        std_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationPoint {
    pub depth: usize,
    /// Fraction of boundaries with `|P(η(0)=0 | ξ) - 1/q| >= eps`.
    pub fraction: f64,
    pub std_error: f64,
    /// The same fraction for the worst symbol `s`.
    pub max_over_symbols: f64,
}

/// Empirical probability that the root law deviates from uniform by at
/// least `eps`, at each depth in `depths`. Depth `N` uses seed
/// `seed + N`, with one stream per trial.
pub fn root_deviation_probe(
    spec: &TreeSpec,
    ch: &PottsChannel,
    depths: &[usize],
    trials: usize,
    seed: u64,
    eps: f64,
) -> Result<Vec<DeviationPoint>> {
    let q = ch.q();
    let limit = 1.0 - 1.0 / q as f64;
    if !(eps > 0.0 && eps < limit) {
        return Err(domain(format!("eps must lie in (0, {limit}), got {eps}")));
    }
    if trials == 0 {
        return Err(domain("trials must be >= 1"));
    }
    let c = 1.0 / q as f64;
    depths
        .iter()
        .map(|&depth| {
            // bit s of each value flags a deviation of symbol s
            let flags = run_trials(spec, ch, depth, trials, seed.wrapping_add(depth as u64), |_, _, sweep| {
                sweep
                    .row(0)
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| (p - c).abs() >= eps)
                    .fold(0u64, |acc, (s, _)| acc | (1 << s)) as f64
            })?;
            let counts: Vec<usize> = (0..q)
                .map(|s| flags.iter().filter(|&&f| (f as u64) >> s & 1 == 1).count())
                .collect();
            let n = trials as f64;
            let fraction = counts[0] as f64 / n;
            Ok(DeviationPoint {
                depth,
                fraction,
                std_error: (fraction * (1.0 - fraction) / n).sqrt(),
                max_over_symbols: counts.iter().copied().max().unwrap_or(0) as f64 / n,
            })
        })
        .collect()
}

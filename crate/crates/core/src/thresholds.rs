//! Analytic thresholds of the Potts model on trees.
//!
//! * the ferromagnetic ordering transition, from the scalar recursion
//!   `X ↦ d·ψ(X)` driven by an all-equal boundary;
//! * the extremality constant `c̄(β,q)`, a supremum over the probability
//!   simplex, and its one-dimensional restriction `ĉ(β,q)`;
//! * the extremality threshold `β_c` where `E[d]·λ₂·c̄ = 1`;
//! * the Kesten–Stigum threshold `E[d]·λ₂² = 1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{PottsChannel, ProbVector};
use crate::error::{domain, Error, Result};
use crate::optimize::{bisect, grid_then_golden_max, nelder_mead_max};
use crate::tree::OffspringDistribution;

/// Largest `q` for which [`cbar`] searches the full simplex.
pub const CBAR_MAX_Q: usize = 8;

/// Inset from the endpoints of the slice domain `D_q`.
const SLICE_ENDPOINT_INSET: f64 = 1e-9;

/// Bisection tolerance on inverse temperatures.
const BETA_XTOL: f64 = 1e-7;

/// Shortfall of the criterion at the Kesten–Stigum point that is attributed
/// to rounding rather than to a missing root.
const KS_ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Points of the coarse grid for 1-D searches; also the number of
    /// random simplex samples screened per restart of the `c̄` search.
    pub grid_points: usize,
    /// Golden-section steps (1-D) and Nelder–Mead iterations (simplex).
    pub refine_iterations: usize,
    pub random_restarts: usize,
    /// Relative convergence tolerance of the local refinement.
    pub tolerance: f64,
    pub rng_seed: u64,
    /// Euclidean radius around the uniform point inside which the `c̄`
    /// objective is replaced by its limit `λ₂`.
    pub center_radius: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_points: 1024,
            refine_iterations: 4000,
            random_restarts: 32,
            tolerance: 1e-13,
            rng_seed: 0x5eed,
            center_radius: 1e-6,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 16 {
            return Err(domain(format!("grid_points must be >= 16, got {}", self.grid_points)));
        }
        if !(self.tolerance > 0.0) {
            return Err(domain(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.random_restarts == 0 {
            return Err(domain("random_restarts must be >= 1"));
        }
        if !(self.center_radius >= 0.0) {
            return Err(domain("center_radius must be >= 0"));
        }
        Ok(())
    }
}

/// `ψ(X) = log((q-1+e^{2β}e^X)/(q-2+e^{2β}+e^X))`: one step of the
/// log-likelihood recursion for a child whose message is `X` in favour of
/// the boundary symbol.
pub fn psi(x: f64, ch: &PottsChannel) -> f64 {
    let q = ch.q() as f64;
    let a = ch.coupling();
    if x > 30.0 {
        let e = (-x).exp();
        ((q - 1.0) * e + a).ln() - ((q - 2.0 + a) * e + 1.0).ln()
    } else {
        // numerator - denominator = (a-1)(e^X-1)
        (ch.coupling_minus_one() * x.exp_m1() / (q - 2.0 + a + x.exp())).ln_1p()
    }
}

pub fn psi_derivative(x: f64, ch: &PottsChannel) -> f64 {
    let q = ch.q() as f64;
    let a = ch.coupling();
    let e = (-x).exp();
    a / ((q - 1.0) * e + a) - 1.0 / ((q - 2.0 + a) * e + 1.0)
}

/// `sup_{X>0} d·ψ(X)/X`, including the `X → 0` limit `d·λ₂`. A positive
/// fixed point of `X ↦ d·ψ(X)` exists iff this is at least 1.
fn max_growth_ratio(d: usize, ch: &PottsChannel) -> f64 {
    const GRID: usize = 400;
    let d = d as f64;
    let lo: f64 = 1e-8;
    let hi = (4.0 * ch.beta() * d).max(2.0 * lo);
    let ratio = (hi / lo).powf(1.0 / (GRID - 1) as f64);
    let xs: Vec<f64> = (0..GRID).map(|i| lo * ratio.powi(i as i32)).collect();
    let (_, best) = grid_then_golden_max(|x| d * psi(x, ch) / x, &xs, 200);
    best.max(d * ch.lambda2())
}

/// Smallest `β` at which an all-equal boundary condition keeps a positive
/// bias at the root of the `d`-ary tree as the depth grows.
pub fn ferro_threshold(d: usize, q: usize) -> Result<f64> {
    if d < 2 {
        return Err(domain(format!("ferro_threshold needs d >= 2, got {d}")));
    }
    PottsChannel::new(q, 0.0)?;
    let g = |beta: f64| Ok(max_growth_ratio(d, &PottsChannel::new(q, beta)?) - 1.0);
    let mut hi = 1.0;
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Bracketing { what: "ferro growth ratio", lo: 0.0, hi, f_lo: -1.0, f_hi: g(hi)? });
        }
    }
    Ok(bisect("ferro growth ratio", g, 0.0, hi, 1e-13)?.root)
}

/// Ising case: `d·tanh β = 1`.
pub fn ising_ferro_threshold(d: usize) -> f64 {
    (1.0 / d as f64).atanh()
}

/// Binary tree: `β = ½ log(1 + 2√(q-1))`.
pub fn binary_tree_ferro_threshold(q: usize) -> f64 {
    0.5 * (1.0 + 2.0 * ((q - 1) as f64).sqrt()).ln()
}

/// The interval `D_q = [-1/q, 1/(q(q-1))]` parametrizing the slice
/// `p = (1/q - (q-1)x, 1/q + x, ..., 1/q + x)`.
pub fn slice_domain(q: usize) -> (f64, f64) {
    let q = q as f64;
    (-1.0 / q, 1.0 / (q * (q - 1.0)))
}

/// The slice ratio
/// `log((1+λx)/(1-λ(q-1)x)) / log((1+qx)/(1-q(q-1)x))`, extended by its
/// limit `λ/q` at `x = 0`.
pub fn slice_ratio(x: f64, q: usize, lambda_q: f64) -> f64 {
    let qf = q as f64;
    if x == 0.0 {
        return lambda_q / qf;
    }
    let num = (lambda_q * x).ln_1p() - (-lambda_q * (qf - 1.0) * x).ln_1p();
    let den = (qf * x).ln_1p() - (-qf * (qf - 1.0) * x).ln_1p();
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceOptimum {
    pub value: f64,
    pub x: f64,
}

/// `ĉ(β,q)`: supremum of the `c̄` ratio over the symmetric slice.
pub fn chat(ch: &PottsChannel, s: &OptimizerSettings) -> f64 {
    chat_detailed(ch, s).value
}

pub fn chat_detailed(ch: &PottsChannel, s: &OptimizerSettings) -> SliceOptimum {
    let q = ch.q();
    let lq = ch.lambda_q();
    let (a, b) = slice_domain(q);
    let (a, b) = (a + SLICE_ENDPOINT_INSET, b - SLICE_ENDPOINT_INSET);
    let n = s.grid_points.max(16);
    let mut xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    xs.push(0.0);
    xs.sort_by(f64::total_cmp);
    let (x, value) = grid_then_golden_max(|x| slice_ratio(x, q, lq), &xs, s.refine_iterations.min(500));
    let center = ch.lambda2();
    if value >= center {
        SliceOptimum { value, x }
    } else {
        SliceOptimum { value: center, x: 0.0 }
    }
}

/// The ratio whose supremum over the simplex is `c̄`:
/// `Σ (q pᵢ - 1) log(1 + (e^{2β}-1) pᵢ) / Σ (q pᵢ - 1) log(q pᵢ)`,
/// set to `λ₂` within `center_radius` of the uniform point.
pub fn cbar_objective(p: &ProbVector, ch: &PottsChannel, center_radius: f64) -> f64 {
    let q = p.len() as f64;
    let lq = ch.lambda_q();
    let c = 1.0 / q;
    let mut dist2 = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    // Writing δ = p - 1/q, both sums are sums of nonnegative terms
    // q·δ·log(1 + λ_q δ) and q·δ·log(1 + q δ).
    for &pi in p.entries() {
        let delta = pi - c;
        dist2 += delta * delta;
        num += delta * (lq * delta).ln_1p();
        den += delta * if pi > 0.0 { (q * delta).ln_1p() } else { f64::NEG_INFINITY };
    }
    if dist2.sqrt() <= center_radius || den == 0.0 {
        return ch.lambda2();
    }
    if den.is_infinite() {
        return 0.0;
    }
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptimum {
    pub value: f64,
    pub argmax: ProbVector,
    pub evaluations: usize,
}

fn softmax_with_anchor(z: &[f64]) -> ProbVector {
    let m = z.iter().copied().fold(0.0f64, f64::max);
    let mut w: Vec<f64> = z.iter().map(|zi| (zi - m).exp()).collect();
    w.push((-m).exp());
    ProbVector::from_weights(w).expect("softmax weights are positive")
}

fn logits_of(p: &ProbVector) -> Vec<f64> {
    let e = p.entries();
    let last = e[e.len() - 1].max(1e-300).ln();
    e[..e.len() - 1].iter().map(|x| x.max(1e-300).ln() - last).collect()
}

/// `c̄(β,q)`: supremum of [`cbar_objective`] over the simplex.
pub fn cbar(ch: &PottsChannel, s: &OptimizerSettings) -> Result<f64> {
    Ok(cbar_detailed(ch, s)?.value)
}

/// Seeded Dirichlet screening followed by Nelder–Mead in softmax
/// coordinates, one independent substream per restart, merged by max.
pub fn cbar_detailed(ch: &PottsChannel, s: &OptimizerSettings) -> Result<SimplexOptimum> {
    s.validate()?;
    let q = ch.q();
    if q > CBAR_MAX_Q {
        return Err(Error::Unsupported(format!("c̄ simplex search supports q <= {CBAR_MAX_Q}, got {q}")));
    }
    let center = SimplexOptimum { value: ch.lambda2(), argmax: ProbVector::uniform(q), evaluations: 0 };
    if ch.beta() == 0.0 {
        return Ok(center);
    }
    let objective = |p: &ProbVector| cbar_objective(p, ch, s.center_radius);

    let runs: Vec<SimplexOptimum> = (0..s.random_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(s.rng_seed);
            rng.set_stream(r as u64);
            let mut best: Option<(ProbVector, f64)> = None;
            for _ in 0..s.grid_points {
                let w: Vec<f64> = (0..q).map(|_| Exp1.sample(&mut rng)).collect();
                let p = ProbVector::from_weights(w).expect("exponential draws are positive");
                let v = objective(&p);
                if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                    best = Some((p, v));
                }
            }
            let (start, _) = best.expect("grid_points >= 16");
            let f = |z: &[f64]| objective(&softmax_with_anchor(z));
            let mut z = logits_of(&start);
            let mut evaluations = s.grid_points;
            let mut value = f64::NEG_INFINITY;
            // restart the local search from its own optimum until it stops improving
            for _ in 0..4 {
                let res = nelder_mead_max(f, &z, 0.25, s.refine_iterations, s.tolerance);
                evaluations += res.evaluations;
                let improved = res.value > value + s.tolerance * value.abs();
                z = res.x;
                value = value.max(res.value);
                if !improved {
                    break;
                }
            }
            SimplexOptimum { value, argmax: softmax_with_anchor(&z), evaluations }
        })
        .collect();

    let total: usize = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .chain(std::iter::once(center))
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("non-empty");
    Ok(SimplexOptimum { evaluations: total, ..best })
}

/// `E[d]·λ₂·c̄`; extremality is certified when this is below 1.
pub fn criterion_value(offspring_mean: f64, ch: &PottsChannel, s: &OptimizerSettings) -> Result<f64> {
    if !(offspring_mean > 0.0 && offspring_mean.is_finite()) {
        return Err(domain(format!("offspring mean must be positive, got {offspring_mean}")));
    }
    Ok(offspring_mean * ch.lambda2() * cbar(ch, s)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCSolution {
    pub beta_c: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Root of `criterion_value = 1` in `β`.
pub fn beta_c(offspring_mean: f64, q: usize, s: &OptimizerSettings) -> Result<f64> {
    Ok(beta_c_detailed(offspring_mean, q, s)?.beta_c)
}

pub fn beta_c_detailed(offspring_mean: f64, q: usize, s: &OptimizerSettings) -> Result<BetaCSolution> {
    if !(offspring_mean >= 1.0 && offspring_mean.is_finite()) {
        return Err(domain(format!("offspring mean must be >= 1, got {offspring_mean}")));
    }
    PottsChannel::new(q, 0.0)?;
    let f = |beta: f64| criterion_value(offspring_mean, &PottsChannel::new(q, beta)?, s).map(|v| v - 1.0);
    if offspring_mean == 1.0 {
        // λ₂·c̄ < 1 at every finite β; the criterion only approaches 1
        let hi = 50.0;
        return Err(Error::Bracketing { what: "extremality criterion - 1", lo: 0.0, hi, f_lo: f(0.0)?, f_hi: f(hi)? });
    }
    // c̄ >= λ₂ puts the root at or below the Kesten–Stigum point.
    let hi = kesten_stigum(offspring_mean, q)?.beta;
    // When c̄ = λ₂ (the Ising case) the criterion equals 1 exactly at the
    // Kesten–Stigum point and rounding may leave it a few ulps below.
    let f_hi = f(hi)?;
    if f_hi < 0.0 && f_hi > -KS_ROUNDING_SLACK {
        return Ok(BetaCSolution { beta_c: hi, bracket: (hi, hi), iterations: 0 });
    }
    let trace = bisect("extremality criterion - 1", f, 0.0, hi, BETA_XTOL)?;

    let mut samples = trace.samples.clone();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in samples.windows(2) {
        if w[1].1 < w[0].1 - 1e-9 {
            return Err(Error::NonMonotone {
                what: "extremality criterion",
                beta: w[1].0,
                detail: format!("value {:.12} at beta {} after {:.12} at beta {}", w[1].1, w[1].0, w[0].1, w[0].0),
            });
        }
    }
    Ok(BetaCSolution { beta_c: trace.root, bracket: trace.bracket, iterations: trace.iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KestenStigum {
    pub beta: f64,
    /// `1/√E[d]`, the value of `λ₂` at the threshold.
    pub lambda: f64,
}

/// Inverse temperature where `E[d]·λ₂² = 1`.
pub fn kesten_stigum(d_mean: f64, q: usize) -> Result<KestenStigum> {
    if !(d_mean > 1.0) {
        return Err(domain(format!("Kesten–Stigum threshold needs mean offspring > 1, got {d_mean}")));
    }
    PottsChannel::new(q, 0.0)?;
    let lambda = 1.0 / d_mean.sqrt();
    // λ₂ = (a-1)/(a+q-1)  ⇔  a = (1+λ(q-1))/(1-λ)
    let a = (1.0 + lambda * (q as f64 - 1.0)) / (1.0 - lambda);
    Ok(KestenStigum { beta: 0.5 * a.ln(), lambda })
}

/// `c̄/λ₂ - 1`, the relative gap between the extremality constant and the
/// Kesten–Stigum value.
pub fn ks_excess(ch: &PottsChannel, s: &OptimizerSettings) -> Result<f64> {
    let l2 = ch.lambda2();
    if l2 == 0.0 {
        return Err(domain("excess over λ₂ is undefined at beta = 0"));
    }
    Ok(cbar(ch, s)? / l2 - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSweep {
    pub max_excess: f64,
    pub beta_at_max: f64,
    pub values: Vec<(f64, f64)>,
}

/// [`ks_excess`] on every point of `betas`, with the maximum flagged.
pub fn ks_excess_sweep(q: usize, betas: &[f64], s: &OptimizerSettings) -> Result<ExcessSweep> {
    let values = betas
        .iter()
        .map(|&b| Ok((b, ks_excess(&PottsChannel::new(q, b)?, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let &(beta_at_max, max_excess) = values
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| domain("empty beta grid"))?;
    Ok(ExcessSweep { max_excess, beta_at_max, values })
}

/// The grid `0.05, 0.055, ..., 3.0`.
pub fn default_excess_grid() -> Vec<f64> {
    (0..=590).map(|i| 0.05 + 0.005 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDiagnostics {
    pub beta_c_iterations: usize,
    pub beta_c_bracket: (f64, f64),
    pub cbar_evaluations: usize,
    /// `Some(x)` locates the slice optimum; `x = 0` means the symmetric point.
    pub slice_argmax_at_beta_c: f64,
    pub cbar_argmax_at_beta_c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub q: usize,
    pub offspring_mean: f64,
    pub beta_ferro: Option<f64>,
    pub beta_c: f64,
    pub lambda_c: f64,
    pub beta_ks: f64,
    pub cbar_at_beta_c: f64,
    /// `c̄/λ₂ - 1` evaluated at `beta_c`.
    pub epsilon_excess: f64,
    pub diagnostics: ThresholdDiagnostics,
}

/// All thresholds for `q` states and offspring law `dist`. The ferromagnetic
/// threshold is only defined for deterministic offspring.
pub fn threshold_report(q: usize, dist: &OffspringDistribution, s: &OptimizerSettings) -> Result<ThresholdReport> {
    let mean = dist.mean();
    let beta_ferro = match dist.as_deterministic() {
        Some(d) if d >= 2 => Some(ferro_threshold(d, q)?),
        _ => None,
    };
    let sol = beta_c_detailed(mean, q, s)?;
    let ch = PottsChannel::new(q, sol.beta_c)?;
    let opt = cbar_detailed(&ch, s)?;
    let slice = chat_detailed(&ch, s);
    let ks = kesten_stigum(mean, q)?;
    Ok(ThresholdReport {
        q,
        offspring_mean: mean,
        beta_ferro,
        beta_c: sol.beta_c,
        lambda_c: ch.lambda2(),
        beta_ks: ks.beta,
        cbar_at_beta_c: opt.value,
        epsilon_excess: opt.value / ch.lambda2() - 1.0,
        diagnostics: ThresholdDiagnostics {
            beta_c_iterations: sol.iterations,
            beta_c_bracket: sol.bracket,
            cbar_evaluations: opt.evaluations,
            slice_argmax_at_beta_c: slice.x,
            cbar_argmax_at_beta_c: opt.argmax.into_inner(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub d: usize,
    pub beta_c: f64,
    pub lambda_c: f64,
}

/// Extremality thresholds on `d`-ary trees for each `d` in `d_list`.
pub fn reproduce_table2(q: usize, d_list: &[usize], s: &OptimizerSettings) -> Result<Vec<Table2Row>> {
    d_list
        .iter()
        .map(|&d| {
            let beta_c = beta_c(d as f64, q, s)?;
            Ok(Table2Row { d, beta_c, lambda_c: PottsChannel::new(q, beta_c)?.lambda2() })
        })
        .collect()
}

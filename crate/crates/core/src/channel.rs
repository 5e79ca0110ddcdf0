//! The symmetric q-state Potts channel and the scalar functions built on it.
//!
//! A [`PottsChannel`] is the broadcast kernel of the free-boundary Potts
//! measure at inverse temperature `beta`: a symbol is kept with probability
//! `e^{2β}/(e^{2β}+q-1)` and replaced by each of the other `q-1` symbols with
//! probability `1/(e^{2β}+q-1)`. Symbols are indexed `0..q`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance on the normalization of a [`ProbVector`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Floor applied to probabilities before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-300;

/// Largest `q` accepted by [`symmetrize`] (it enumerates all `q!` permutations).
pub const SYMMETRIZE_MAX_Q: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PottsChannel {
    q: usize,
    beta: f64,
}

impl PottsChannel {
    pub fn new(q: usize, beta: f64) -> Result<Self> {
        if q < 2 {
            return Err(domain(format!("q must be at least 2, got {q}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(domain(format!("beta must be finite and >= 0, got {beta}")));
        }
        Ok(Self { q, beta })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `e^{2β}`, the Boltzmann weight of an agreeing edge.
    pub fn coupling(&self) -> f64 {
        (2.0 * self.beta).exp()
    }

    /// `e^{2β} - 1`, computed without cancellation for small `beta`.
    pub fn coupling_minus_one(&self) -> f64 {
        (2.0 * self.beta).exp_m1()
    }

    pub fn theta(&self) -> f64 {
        self.beta.tanh()
    }

    /// Second eigenvalue of the channel matrix, `(e^{2β}-1)/(e^{2β}+q-1)`.
    pub fn lambda2(&self) -> f64 {
        let am1 = self.coupling_minus_one();
        if am1.is_infinite() {
            return 1.0;
        }
        am1 / (am1 + self.q as f64)
    }

    /// The same eigenvalue written as `2θ/(q-(q-2)θ)`.
    pub fn lambda2_theta_form(&self) -> f64 {
        let t = self.theta();
        let q = self.q as f64;
        2.0 * t / (q - (q - 2.0) * t)
    }

    /// `λ_q = (e^{2β}-1)/(1+(e^{2β}-1)/q)`, the slope parameter of the
    /// symmetric-slice ratio. Equal to `q·λ₂`.
    pub fn lambda_q(&self) -> f64 {
        let am1 = self.coupling_minus_one();
        if am1.is_infinite() {
            return self.q as f64;
        }
        am1 / (1.0 + am1 / self.q as f64)
    }

    /// Probability of switching to one particular other symbol.
    pub fn epsilon_per_symbol(&self) -> f64 {
        1.0 / (self.coupling() + self.q as f64 - 1.0)
    }

    /// Probability of switching to any other symbol, `(q-1)/(e^{2β}+q-1)`.
    pub fn epsilon_total(&self) -> f64 {
        epsilon_total_of_beta(self.beta, self.q)
    }

    pub fn stay_probability(&self) -> f64 {
        let a = self.coupling();
        if a.is_infinite() {
            return 1.0;
        }
        a / (a + self.q as f64 - 1.0)
    }
}

pub fn lambda2(ch: &PottsChannel) -> f64 {
    ch.lambda2()
}

/// Total flip probability of the channel at inverse temperature `beta`.
pub fn epsilon_total_of_beta(beta: f64, q: usize) -> f64 {
    let qm1 = q as f64 - 1.0;
    qm1 / ((2.0 * beta).exp() + qm1)
}

/// Inverse temperature at which the total flip probability equals `eps`:
/// `β = -½ log(ε/((q-1)(1-ε)))`.
pub fn beta_of_epsilon(eps: f64, q: usize) -> Result<f64> {
    if q < 2 {
        return Err(domain(format!("q must be at least 2, got {q}")));
    }
    let upper = (q as f64 - 1.0) / q as f64;
    if !(eps > 0.0 && eps < upper) {
        return Err(domain(format!("eps must lie in (0, {upper}), got {eps}")));
    }
    Ok(-0.5 * (eps / ((q as f64 - 1.0) * (1.0 - eps))).ln())
}

/// Second eigenvalue expressed through the total flip probability,
/// `1 - q·ε/(q-1)`.
pub fn lambda_of_epsilon(eps: f64, q: usize) -> Result<f64> {
    if q < 2 {
        return Err(domain(format!("q must be at least 2, got {q}")));
    }
    let upper = (q as f64 - 1.0) / q as f64;
    if !(0.0..=upper).contains(&eps) {
        return Err(domain(format!("eps must lie in [0, {upper}], got {eps}")));
    }
    Ok(1.0 - q as f64 * eps / (q as f64 - 1.0))
}

/// Rows of the transition matrix of the broadcast chain.
pub fn channel_matrix(ch: &PottsChannel) -> Vec<ProbVector> {
    let stay = ch.stay_probability();
    let flip = ch.epsilon_per_symbol();
    (0..ch.q())
        .map(|i| {
            let row = (0..ch.q()).map(|j| if i == j { stay } else { flip }).collect();
            ProbVector::from_weights(row).expect("channel rows are positive")
        })
        .collect()
}

/// `u(p) = log(1 + p(e^{2β}-1))`.
pub fn u(p: f64, ch: &PottsChannel) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * ch.coupling_minus_one()).ln_1p()
}

/// `u` shifted so that it vanishes at the uniform point `p = 1/q`.
pub fn utilde(p: f64, ch: &PottsChannel) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (ch.lambda_q() * (p - 1.0 / ch.q() as f64)).ln_1p()
}

/// `φ(x) = (x-1) log x`, with `φ(0) = +∞`.
pub fn phi(x: f64) -> f64 {
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        (x - 1.0) * x.ln()
    } else {
        (x - 1.0) * (x - 1.0).ln_1p()
    }
}

/// `φ` with its argument floored at [`PROB_FLOOR`].
pub fn phi_clamped(x: f64) -> f64 {
    phi(x.max(PROB_FLOOR))
}

/// Average of `f` over all coordinate permutations of `p`.
pub fn symmetrize<F>(f: F, p: &ProbVector) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let q = p.len();
    if q > SYMMETRIZE_MAX_Q {
        return Err(Error::Unsupported(format!(
            "symmetrize enumerates q! permutations; q = {q} exceeds {SYMMETRIZE_MAX_Q}"
        )));
    }
    let mut buf = vec![0.0; q];
    let mut total = 0.0;
    let mut count = 0usize;
    for perm in (0..q).permutations(q) {
        for (slot, &i) in buf.iter_mut().zip(&perm) {
            *slot = p.entries()[i];
        }
        total += f(&buf);
        count += 1;
    }
    Ok(total / count as f64)
}

/// Closed form of the symmetrized `g(p₂,p₁) = p₂ log(p₂/p₁)`:
/// `(1/(q(q-1))) Σ (q pᵢ - 1) log(q pᵢ)`.
pub fn symmetrized_g(p: &ProbVector) -> f64 {
    let q = p.len() as f64;
    p.entries()
        .iter()
        .map(|&pi| (q * pi - 1.0) * (q * pi).max(PROB_FLOOR).ln())
        .sum::<f64>()
        / (q * (q - 1.0))
}

/// Closed form of the symmetrized `h(p₂,p₁) = q p₂ (u(p₂) - u(p₁))`:
/// `(1/(q-1)) Σ (q pᵢ - 1) u(pᵢ)`.
pub fn symmetrized_h(p: &ProbVector, ch: &PottsChannel) -> f64 {
    let q = p.len() as f64;
    p.entries()
        .iter()
        .map(|&pi| (q * pi - 1.0) * u(pi, ch))
        .sum::<f64>()
        / (q - 1.0)
}

/// Boundary-entropy integrand `(1/(q-1)) Σ φ(q pᵢ)`; its expectation under
/// the free measure is the relative entropy between boundary laws
/// conditioned on two different root symbols.
pub fn entropy_integrand(p: &ProbVector) -> f64 {
    let q = p.len() as f64;
    p.entries().iter().map(|&pi| phi_clamped(q * pi)).sum::<f64>() / (q - 1.0)
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Accepts entries summing to one within `1e-9`, then renormalizes.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum = check_weights(&entries)?;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(domain(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self::normalized(entries, sum))
    }

    /// Normalizes nonnegative weights with a positive finite sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum = check_weights(&weights)?;
        if sum <= 0.0 || !sum.is_finite() {
            return Err(domain(format!("weights must have a positive finite sum, got {sum}")));
        }
        Ok(Self::normalized(weights, sum))
    }

    pub fn uniform(q: usize) -> Self {
        Self(vec![1.0 / q as f64; q])
    }

    fn normalized(mut entries: Vec<f64>, sum: f64) -> Self {
        entries.iter_mut().for_each(|e| *e /= sum);
        Self(entries)
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&i| self.0[i]).collect())
    }

    /// Largest `|pᵢ - 1/q|`.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let c = 1.0 / self.len() as f64;
        self.0.iter().map(|p| (p - c).abs()).fold(0.0, f64::max)
    }
}

fn check_weights(w: &[f64]) -> Result<f64> {
    if w.is_empty() {
        return Err(domain("probability vector must be non-empty"));
    }
    if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(domain(format!("entries must be finite and nonnegative, got {bad}")));
    }
    Ok(w.iter().sum())
}

/// Log-weights of a root distribution, gauge-fixed so the largest entry is 0.
///
/// `X^j_k = log P(j) - log P(k)` is `ratio(j, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageVector(Vec<f64>);

impl MessageVector {
    pub fn zero(q: usize) -> Self {
        Self(vec![0.0; q])
    }

    pub fn from_log_weights(mut logweights: Vec<f64>) -> Result<Self> {
        if logweights.is_empty() {
            return Err(domain("message must be non-empty"));
        }
        if logweights.iter().any(|x| x.is_nan() || *x == f64::INFINITY) {
            return Err(domain("log-weights must not be NaN or +inf"));
        }
        let max = logweights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(domain("at least one log-weight must be finite"));
        }
        logweights.iter_mut().for_each(|x| *x -= max);
        Ok(Self(logweights))
    }

    pub fn from_probs(p: &ProbVector) -> Self {
        Self::from_log_weights(p.entries().iter().map(|x| x.max(PROB_FLOOR).ln()).collect())
            .expect("floored probabilities give finite logs")
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ratio(&self, j: usize, k: usize) -> f64 {
        self.0[j] - self.0[k]
    }

    pub fn to_probs(&self) -> ProbVector {
        let w = self.0.iter().map(|x| x.exp()).collect();
        ProbVector::from_weights(w).expect("max-gauge keeps one weight equal to 1")
    }
}

//! Small derivative-free routines used by the threshold solvers.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub(crate) fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if hi - lo <= f64::EPSILON * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Scans `xs`, then refines between the neighbours of the best sample.
pub(crate) fn grid_then_golden_max<F>(f: F, xs: &[f64], iterations: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (best_i, best_f) = xs
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = xs[best_i.saturating_sub(1)];
    let hi = xs[(best_i + 1).min(xs.len() - 1)];
    let (x, v) = golden_section_max(&f, lo, hi, iterations);
    if v >= best_f {
        (x, v)
    } else {
        (xs[best_i], best_f)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder–Mead maximization with standard coefficients. Stops when the
/// spread of simplex values falls below `ftol` or after `max_iter` steps.
pub(crate) fn nelder_mead_max<F>(f: F, x0: &[f64], step: f64, max_iter: usize, ftol: f64) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    for _ in 0..max_iter {
        // best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if (best - worst).abs() <= ftol * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect()
        };
        let worst_x = simplex[n].0.clone();
        let xr = along(1.0, &worst_x);
        let fr = eval(&xr);
        if fr > simplex[0].1 {
            let xe = along(2.0, &worst_x);
            let fe = eval(&xe);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr > worst {
                let xc = along(0.5, &worst_x);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5, &worst_x);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc > worst.max(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, evaluations }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BisectionTrace {
    pub root: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub samples: Vec<(f64, f64)>,
}

/// Bisection for a sign change of `f` on `[lo, hi]`, assuming `f(lo) < 0 <= f(hi)`.
pub(crate) fn bisect<F>(what: &'static str, f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<BisectionTrace>
where
    F: Fn(f64) -> Result<f64>,
{
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if !(f_lo < 0.0 && f_hi >= 0.0) {
        return Err(Error::Bracketing { what, lo, hi, f_lo, f_hi });
    }
    let mut samples = vec![(lo, f_lo), (hi, f_hi)];
    let mut iterations = 0;
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        samples.push((mid, fm));
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(BisectionTrace { root: 0.5 * (lo + hi), bracket: (lo, hi), iterations, samples })
}

//! Brute-force reference implementations used to cross-check the library.
//! They work on raw sample vectors and share no code with the crate.

#![allow(dead_code)]

pub fn survivors(xs: &[f64], t: f64) -> Vec<f64> {
    xs.iter().copied().filter(|&x| x > t).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn candidates(xs: &[f64]) -> Vec<f64> {
    let mut c = xs.to_vec();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

pub fn squared_loss(xs: &[f64], d: f64) -> f64 {
    xs.iter().map(|x| (x - d) * (x - d)).sum()
}

/// Largest sample `d` such that at least a fraction `alpha` of the samples
/// are `>= d`.
pub fn confidence(xs: &[f64], alpha: f64) -> f64 {
    let n = xs.len() as f64;
    candidates(xs)
        .into_iter()
        .filter(|&d| xs.iter().filter(|&&x| x >= d).count() as f64 / n >= alpha)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Total asymmetric loss: `c1` per second of underestimate, `c2` per second
/// of overestimate.
pub fn asymmetric_loss(xs: &[f64], d: f64, c1: f64, c2: f64) -> f64 {
    xs.iter()
        .map(|&x| if x > d { c1 * (x - d) } else { c2 * (d - x) })
        .sum()
}

/// Smallest sample value attaining the minimal asymmetric loss. The loss is
/// piecewise linear with kinks at the samples, so a minimizer is always
/// among them.
pub fn asymmetric(xs: &[f64], c1: f64, c2: f64) -> f64 {
    let c = candidates(xs);
    let losses: Vec<f64> = c.iter().map(|&d| asymmetric_loss(xs, d, c1, c2)).collect();
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.abs().max(1.0);
    c.into_iter().zip(losses).find(|&(_, l)| l <= best + tol).unwrap().0
}

/// Mean of `lead + left` over pairs with `lead > t`.
pub fn joint_sum_mean(pairs: &[(f64, f64)], t: f64) -> Option<f64> {
    let s: Vec<f64> = pairs.iter().filter(|p| p.0 > t).map(|p| p.0 + p.1).collect();
    (!s.is_empty()).then(|| mean(&s))
}

/// Mean of `lead + left` over pairs with `lead + left > t`.
pub fn sum_mean(pairs: &[(f64, f64)], t: f64) -> Option<f64> {
    let s: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).filter(|&x| x > t).collect();
    (!s.is_empty()).then(|| mean(&s))
}

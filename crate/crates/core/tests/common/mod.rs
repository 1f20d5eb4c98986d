//! Reference implementations used as test oracles. They favour obviousness
//! over speed and share no code with the library.
#![allow(dead_code)]

/// `Σ λ_i |b|_(i)` computed from scratch.
pub fn sorted_l1(b: &[f64], lambda: &[f64]) -> f64 {
    let mut mags: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mags.iter().zip(lambda).map(|(m, l)| m * l).sum()
}

pub fn soft_threshold(y: f64, c: f64) -> f64 {
    y.signum() * (y.abs() - c).max(0.0)
}

/// Exact prox by exhaustive search.
///
/// After sorting `|y|` decreasingly the minimizer is nonincreasing and
/// nonnegative, so its level sets are contiguous blocks. On each block the
/// optimal level is the clamped mean of `|y| − λ`. Every split of `1..p` into
/// blocks yields a candidate; the best feasible one is the prox.
pub fn brute_force_prox(y: &[f64], lambda: &[f64]) -> Vec<f64> {
    let p = y.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| y[b].abs().partial_cmp(&y[a].abs()).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| y[i].abs()).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0u32..(1 << (p.saturating_sub(1))) {
        let mut x = vec![0.0; p];
        let mut start = 0;
        for end in 1..=p {
            let boundary = end == p || cuts & (1 << (end - 1)) != 0;
            if boundary {
                let len = (end - start) as f64;
                let mean = (start..end).map(|i| w[i] - lambda[i]).sum::<f64>() / len;
                for v in &mut x[start..end] {
                    *v = mean.max(0.0);
                }
                start = end;
            }
        }
        if x.windows(2).any(|s| s[0] < s[1]) {
            continue;
        }
        let obj: f64 = 0.5 * x.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            + x.iter().zip(lambda).map(|(a, l)| a * l).sum::<f64>();
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    }
    let sorted = best
        .expect("the all-separate split with clamping is always tried")
        .1;
    let mut out = vec![0.0; p];
    for (k, &i) in order.iter().enumerate() {
        out[i] = if y[i] < 0.0 { -sorted[k] } else { sorted[k] };
    }
    out
}

/// Largest violation of the optimality conditions of `x = prox(y)`:
/// `g = y − x` must lie in the dual-norm ball (partial sums of sorted `|g|`
/// bounded by those of λ) and satisfy `⟨g, x⟩ = J_λ(x)`.
pub fn certificate_violation(y: &[f64], x: &[f64], lambda: &[f64]) -> f64 {
    let g: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let mut mags: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (mut cg, mut cl, mut worst) = (0.0, 0.0, 0.0f64);
    for (m, l) in mags.iter().zip(lambda) {
        cg += m;
        cl += l;
        worst = worst.max(cg - cl);
    }
    let inner: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    worst.max((inner - sorted_l1(x, lambda)).abs())
}

/// Random nonincreasing nonnegative sequence with a positive head, often
/// with ties and trailing zeros.
pub fn random_lambda<R: rand::Rng>(rng: &mut R, p: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..p)
        .map(|_| match rng.random_range(0..6) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..3.0),
        })
        .collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if v[0] == 0.0 {
        v[0] = rng.random_range(0.1..3.0);
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    v
}

/// Random vector with occasional zeros and repeated magnitudes.
pub fn random_y<R: rand::Rng>(rng: &mut R, p: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..p).map(|_| rng.random_range(-5.0..5.0)).collect();
    if p > 1 && rng.random_bool(0.2) {
        y[1] = -y[0];
    }
    if rng.random_bool(0.1) {
        y[p - 1] = 0.0;
    }
    y
}

//! Test-only numerical oracles, independent of the library's code paths.
#![allow(dead_code)]

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss-Legendre over `panels` equal panels of [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + h / 2.0;
        let panel: f64 = rule.iter().map(|(x, w)| w * f(mid + x * h / 2.0)).sum();
        total += panel * h / 2.0;
    }
    total
}

/// ln((s-1)!) by direct summation, integer `s` only.
pub fn ln_factorial_minus_one(s: u32) -> f64 {
    (1..s).map(|k| (k as f64).ln()).sum()
}

/// P(s, x) for integer s by quadrature of t^{s-1} e^{-t} / Gamma(s).
pub fn lower_gamma_quadrature(s: u32, x: f64) -> f64 {
    let lg = ln_factorial_minus_one(s);
    let sf = s as f64;
    integrate(|t| ((sf - 1.0) * t.ln() - t - lg).exp(), 0.0, x, 4000)
}

/// Gamma(shape n, scale) density written out directly.
pub fn gamma_density(eps: f64, n: u32, scale: f64) -> f64 {
    let lg = ln_factorial_minus_one(n);
    ((n as f64 - 1.0) * eps.ln() - eps / scale - lg - n as f64 * scale.ln()).exp()
}

/// Error probability of the threshold detector by quadrature of both
/// conditional densities.
pub fn pe_quadrature(n: u32, sr: f64, sn: f64, delta: f64) -> f64 {
    let s1 = sr + sn;
    let hi = 40.0 * s1 * (n as f64 + 10.0);
    let fa = integrate(|e| gamma_density(e, n, sn), delta, hi, 4000);
    let miss = integrate(|e| gamma_density(e, n, s1), 0.0, delta, 4000);
    0.5 * (fa + miss)
}

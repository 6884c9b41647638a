//! One-dimensional quadrature kernels shared by every integral in the crate:
//! cached Gauss-Legendre rules, an adaptive panel integrator for complex
//! integrands with an embedded error estimate, and periodic trapezoid rules.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature tolerance not reached: requested {requested:.3e}, achieved {achieved:.3e} with {evals} evaluations")]
    ToleranceNotReached {
        requested: f64,
        achieved: f64,
        evals: usize,
        /// Best value obtained before giving up.
        value: Complex64,
    },
    #[error("empty integration domain")]
    EmptyDomain,
}

/// Value, accumulated error estimate and evaluation count of a quadrature.
/// `est_error` includes both the local panel estimates and any error bounds
/// reported by nested quadratures inside the integrand.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub est_error: f64,
    pub evals: usize,
    panel_error: f64,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            evals: 0,
            panel_error: 0.0,
        }
    }

    fn accumulate(&mut self, other: QuadResult) {
        self.value += other.value;
        self.est_error += other.est_error;
        self.panel_error += other.panel_error;
        self.evals += other.evals;
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial and cached per order.
pub fn gauss_legendre(order: usize) -> &'static [(f64, f64)] {
    static CACHE: Lazy<Mutex<HashMap<usize, &'static [(f64, f64)]>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    let mut cache = CACHE.lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Box::leak(compute_gauss_legendre(order).into_boxed_slice()))
}

fn compute_gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1);
    let n = order;
    let mut rule = Vec::with_capacity(n);
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        rule.push((-x, w));
    }
    // Mirror to the full rule, keeping nodes sorted ascending.
    let mut full: Vec<(f64, f64)> = rule.clone();
    for &(x, w) in rule.iter().rev() {
        if x.abs() > 1e-14 {
            full.push((-x, w));
        }
    }
    full.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    debug_assert_eq!(full.len(), n);
    full
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrand returning a value together with an error bound inherited from
/// inner (nested) quadratures. Plain closures wrap with zero inner error.
pub trait InnerIntegrand {
    fn eval(&self, x: f64) -> (Complex64, f64);
}

impl<F: Fn(f64) -> Complex64> InnerIntegrand for F {
    fn eval(&self, x: f64) -> (Complex64, f64) {
        (self(x), 0.0)
    }
}

/// Wrapper for closures that already report an inner error estimate.
pub struct WithInnerError<F>(pub F);

impl<F: Fn(f64) -> (Complex64, f64)> InnerIntegrand for WithInnerError<F> {
    fn eval(&self, x: f64) -> (Complex64, f64) {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target absolute tolerance for the whole integral.
    pub abs_tol: f64,
    /// Hard ceiling on integrand evaluations.
    pub max_evals: usize,
    /// Maximum bisection depth per initial panel.
    pub max_depth: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            abs_tol: 1e-10,
            max_evals: 50_000_000,
            max_depth: 48,
        }
    }
}

struct PanelEval {
    value: Complex64,
    err: f64,
    inner: f64,
    evals: usize,
}

/// G15 value with |G15 - G7| as the local error estimate. The two rules do
/// not share nodes; the cost premium buys a genuinely independent estimate.
fn eval_panel<F: InnerIntegrand + ?Sized>(f: &F, a: f64, b: f64) -> PanelEval {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut g15 = Complex64::new(0.0, 0.0);
    let mut inner = 0.0f64;
    for &(x, w) in gauss_legendre(15) {
        let (v, e) = f.eval(c + h * x);
        g15 += w * v;
        inner += w * e;
    }
    let mut g7 = Complex64::new(0.0, 0.0);
    for &(x, w) in gauss_legendre(7) {
        let (v, _) = f.eval(c + h * x);
        g7 += w * v;
    }
    PanelEval {
        value: h * g15,
        err: (h * (g15 - g7)).norm(),
        inner: h.abs() * inner,
        evals: 22,
    }
}

/// Adaptive bisection over a fixed list of initial panels. Panels are
/// processed depth-first in input order so the summation order (and thus the
/// result bit pattern) is independent of timing and thread count.
pub fn adaptive_segments<F: InnerIntegrand + ?Sized>(
    f: &F,
    segments: &[(f64, f64)],
    opts: &AdaptiveOptions,
) -> Result<QuadResult, QuadError> {
    let total_len: f64 = segments.iter().map(|&(a, b)| (b - a).abs()).sum();
    if total_len == 0.0 || segments.is_empty() {
        return Ok(QuadResult::zero());
    }
    let mut out = QuadResult::zero();
    let mut evals_left = opts.max_evals as isize;
    for &(a, b) in segments {
        if a == b {
            continue;
        }
        let tol = opts.abs_tol * ((b - a).abs() / total_len).max(1e-6);
        let r = bisect(f, a, b, tol, opts.max_depth, &mut evals_left);
        out.accumulate(r);
    }
    // The failure criterion looks at the panel estimates only; errors carried
    // in from nested quadratures were already accepted at their own level.
    if out.panel_error > opts.abs_tol * 4.0 {
        return Err(QuadError::ToleranceNotReached {
            requested: opts.abs_tol,
            achieved: out.est_error,
            evals: out.evals,
            value: out.value,
        });
    }
    Ok(out)
}

fn bisect<F: InnerIntegrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    evals_left: &mut isize,
) -> QuadResult {
    let p = eval_panel(f, a, b);
    *evals_left -= p.evals as isize;
    if p.err <= tol || depth == 0 || *evals_left <= 0 {
        return QuadResult {
            value: p.value,
            est_error: p.err + p.inner,
            evals: p.evals,
            panel_error: p.err,
        };
    }
    let c = 0.5 * (a + b);
    let mut left = bisect(f, a, c, 0.5 * tol, depth - 1, evals_left);
    let right = bisect(f, c, b, 0.5 * tol, depth - 1, evals_left);
    left.accumulate(right);
    left.evals += p.evals;
    left
}

/// Splits each segment so that no panel spans more than ~pi radians of the
/// fastest local phase: `rate` bounds |d(phase)/dx| on the segment.
pub fn split_by_oscillation(segments: &[(f64, f64)], rate: f64) -> Vec<(f64, f64)> {
    split_by_oscillation_offset(segments, rate, 0.0)
}

/// Same as [`split_by_oscillation`] with the interior panel boundaries
/// shifted by `frac` of a panel width; rotating the node placement this way
/// must leave converged results unchanged (discretization-symmetry check).
pub fn split_by_oscillation_offset(
    segments: &[(f64, f64)],
    rate: f64,
    frac: f64,
) -> Vec<(f64, f64)> {
    let frac = frac.rem_euclid(1.0);
    let mut out = Vec::new();
    for &(a, b) in segments {
        let len = (b - a).abs();
        if len == 0.0 {
            continue;
        }
        let phase = rate.abs() * len;
        let k = ((phase / std::f64::consts::PI).ceil() as usize).max(1);
        let k = k.min(2_000_000);
        let h = (b - a) / k as f64;
        if frac == 0.0 || k == 1 {
            for i in 0..k {
                out.push((a + i as f64 * h, a + (i + 1) as f64 * h));
            }
        } else {
            let mut prev = a;
            for i in 0..k {
                let edge = a + (i as f64 + frac) * h;
                if edge >= b {
                    break;
                }
                out.push((prev, edge));
                prev = edge;
            }
            out.push((prev, b));
        }
    }
    out
}

/// Fixed-order composite Gauss rule, used as an independent refinement oracle
/// against the adaptive path.
pub fn fixed_gauss<F: Fn(f64) -> Complex64>(
    f: &F,
    segments: &[(f64, f64)],
    order: usize,
    panels_per_segment: usize,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let mut total = Complex64::new(0.0, 0.0);
    for &(a, b) in segments {
        let h = (b - a) / panels_per_segment as f64;
        for i in 0..panels_per_segment {
            let pa = a + i as f64 * h;
            let pb = pa + h;
            let c = 0.5 * (pa + pb);
            let half = 0.5 * (pb - pa);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(x, w) in rule {
                acc += w * f(c + half * x);
            }
            total += half * acc;
        }
    }
    total
}

/// Periodic composite trapezoid on [0, 2pi): spectrally accurate for smooth
/// periodic integrands. `offset` rotates the node set.
pub fn circle_trapezoid<F: Fn(f64) -> Complex64>(f: &F, m: usize, offset: f64) -> Complex64 {
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        acc += f(offset + i as f64 * h);
    }
    acc * h
}

/// Merges breakpoints into a sorted, deduplicated panel list covering [a, b].
pub fn panels_from_breakpoints(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-13 * (1.0 + q.abs()));
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // Order-n Gauss is exact through degree 2n-1.
        for &n in &[7usize, 15, 30] {
            let rule = gauss_legendre(n);
            assert_eq!(rule.len(), n);
            let wsum: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-14);
            let deg = 2 * n - 1;
            let val: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32 - 1)).sum();
            // integral of x^(deg-1) over [-1,1]; deg-1 is even
            let exact = 2.0 / deg as f64;
            assert_abs_diff_eq!(val, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn adaptive_handles_oscillatory_integrand() {
        // int_0^1 e^{i w x} dx = (e^{iw} - 1)/(iw)
        let w = 200.0;
        let f = move |x: f64| Complex64::new(0.0, w * x).exp();
        let segs = split_by_oscillation(&[(0.0, 1.0)], w);
        let opts = AdaptiveOptions {
            abs_tol: 1e-12,
            ..Default::default()
        };
        let r = adaptive_segments(&f, &segs, &opts).unwrap();
        let exact = (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-12, "err {}", (r.value - exact).norm());
    }

    #[test]
    fn adaptive_refines_peaked_integrand() {
        // Narrow Gaussian; exact integral sqrt(pi)*s over the real line.
        let s = 1e-3;
        let f = move |x: f64| Complex64::new((-((x - 0.3) / s).powi(2)).exp(), 0.0);
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let r = adaptive_segments(&f, &[(0.0, 1.0)], &opts).unwrap();
        let exact = std::f64::consts::PI.sqrt() * s;
        assert!((r.value.re - exact).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-15);
    }

    #[test]
    fn fixed_gauss_matches_adaptive() {
        let f = |x: f64| Complex64::new((3.0 * x).sin() * (-x).exp(), x.cos());
        let opts = AdaptiveOptions::default();
        let a = adaptive_segments(&f, &[(0.0, 2.0)], &opts).unwrap();
        let b = fixed_gauss(&f, &[(0.0, 2.0)], 30, 8);
        assert!((a.value - b).norm() < 1e-12);
    }

    #[test]
    fn circle_trapezoid_is_spectrally_accurate() {
        // int_0^{2pi} e^{3 cos t} dt = 2 pi I_0(3) = 30.66692426...
        let f = |t: f64| Complex64::new((3.0 * t.cos()).exp(), 0.0);
        let v = circle_trapezoid(&f, 64, 0.0);
        assert_abs_diff_eq!(v.re, 30.666_924_262_898_19, epsilon = 1e-10);
        // Node rotation leaves the value unchanged for smooth integrands.
        let v2 = circle_trapezoid(&f, 64, 0.37);
        assert!((v - v2).norm() < 1e-10);
    }

    #[test]
    fn panels_cover_interval() {
        let p = panels_from_breakpoints(0.0, 1.0, &[0.5, 0.25, 2.0, -1.0, 0.5]);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], (0.0, 0.25));
        assert_eq!(p[2], (0.5, 1.0));
    }
}

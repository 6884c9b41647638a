//! Test initial data specified directly in frequency space. A profile is the
//! function v0-tilde(lambda, xibar, etabar); physical-space values of v0 are
//! recovered by quadrature. Compact support with lambda_min > 0 keeps every
//! formula in the crate away from the degenerate stratum {lambda = 0}.
//!
//! Convention: v0-tilde = 2 * int e^{-i(s lambda + xbar.xibar - ybar.etabar)} v0,
//! so inversion carries the factor (1/2) (2 pi)^{-(N+1)}.

use crate::geometry::Dims;
use crate::quad::{self, AdaptiveOptions, QuadError};
use crate::smooth::{plateau_cutoff, smooth_hat01};
use num_complex::Complex64;
use thiserror::Error;

/// Cutoff radius in units of the Gaussian width; e^{-18} ~ 1.5e-8 leaks past
/// the plateau before the hard cutoff takes it to exactly zero.
const CUTOFF_SIGMAS: f64 = 6.0;
/// Fraction of the cutoff radius over which the transverse factor is exactly 1.
const PLATEAU_FRAC: f64 = 0.75;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid lambda band [{min}, {max}]: need 0 < min < max")]
    InvalidBand { min: f64, max: f64 },
    #[error("invalid width parameter a = {0}: must be positive")]
    InvalidWidth(f64),
    #[error("quadrature failure: {0}")]
    Quad(#[from] QuadError),
}

/// Smooth compactly supported frequency-space data, separable by
/// construction: a lambda band bump times an even per-axis transverse factor
/// (Gaussian under a plateau cutoff).
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    dims: Dims,
    zero: bool,
    lambda_min: f64,
    lambda_max: f64,
    mirror: bool,
    width_a: f64,
    cutoff_radius: f64,
    scale: Complex64,
    /// Multiplies the lambda factor by e^{i mu lambda}.
    lambda_modulation: f64,
    /// Multiplies the lambda factor by (power_scale * lambda)^lambda_power.
    lambda_power: u32,
    lambda_power_scale: f64,
    hermitian: bool,
}

impl SpectralProfile {
    /// Bump profile: w(lambda) on the band (mirrored with conjugate symmetry
    /// when `mirror` is set) times Gaussian-with-cutoff transverse factors.
    pub fn bump(
        dims: Dims,
        lambda_band: (f64, f64),
        width_a: f64,
        mirror: bool,
    ) -> Result<Self, SpectralError> {
        let (min, max) = lambda_band;
        if !(0.0 < min && min < max) {
            return Err(SpectralError::InvalidBand { min, max });
        }
        if width_a <= 0.0 {
            return Err(SpectralError::InvalidWidth(width_a));
        }
        Ok(SpectralProfile {
            dims,
            zero: false,
            lambda_min: min,
            lambda_max: max,
            mirror,
            width_a,
            cutoff_radius: CUTOFF_SIGMAS * width_a,
            scale: Complex64::new(1.0, 0.0),
            lambda_modulation: 0.0,
            lambda_power: 0,
            lambda_power_scale: 1.0,
            hermitian: mirror,
        })
    }

    /// The identically-zero profile.
    pub fn zero(dims: Dims) -> Self {
        SpectralProfile {
            dims,
            zero: true,
            lambda_min: 1.0,
            lambda_max: 2.0,
            mirror: false,
            width_a: 1.0,
            cutoff_radius: 1.0,
            scale: Complex64::new(0.0, 0.0),
            lambda_modulation: 0.0,
            lambda_power: 0,
            lambda_power_scale: 1.0,
            hermitian: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_separable(&self) -> bool {
        true
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Descriptive smoothness tag: polynomial smoothstep seams.
    pub fn smoothness_class(&self) -> &'static str {
        "C3 (degree-7 smoothstep seams)"
    }

    /// Returns a copy with the data scaled by a complex constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut p = self.clone();
        p.scale *= c;
        p.hermitian = self.hermitian && c.im == 0.0;
        p
    }

    /// Returns a copy modulated by e^{i mu lambda} (used by the shift
    /// identity of the asymptotic coefficient).
    pub fn modulated(&self, mu: f64) -> Self {
        let mut p = self.clone();
        p.lambda_modulation += mu;
        p.hermitian = false;
        p
    }

    /// Returns a copy reweighted by (scale * lambda)^power; along the ray
    /// lambda = r (theta_0 + omega_0) this realizes the factor r^power.
    pub fn lambda_reweighted(&self, power: u32, scale: f64) -> Self {
        let mut p = self.clone();
        p.lambda_power += power;
        p.lambda_power_scale = scale;
        p.hermitian = false;
        p
    }

    pub fn lambda_band(&self) -> (f64, f64) {
        (self.lambda_min, self.lambda_max)
    }

    pub fn mirror(&self) -> bool {
        self.mirror
    }

    pub fn width(&self) -> f64 {
        self.width_a
    }

    /// Half-width of the per-axis transverse support box.
    pub fn transverse_halfwidth(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.cutoff_radius
        }
    }

    /// Support intervals of the lambda factor (empty for the zero profile).
    pub fn lambda_support_segments(&self) -> Vec<(f64, f64)> {
        if self.zero {
            return Vec::new();
        }
        let mut segs = vec![(self.lambda_min, self.lambda_max)];
        if self.mirror {
            segs.insert(0, (-self.lambda_max, -self.lambda_min));
        }
        segs
    }

    /// Positive seam values of the lambda bump (band edges and peak), where
    /// the factor is only C^3; quadratures place panel boundaries here.
    pub fn lambda_seams(&self) -> Vec<f64> {
        if self.zero {
            return Vec::new();
        }
        let mid = 0.5 * (self.lambda_min + self.lambda_max);
        vec![self.lambda_min, mid, self.lambda_max]
    }

    /// Seam radii of the transverse factor (plateau edge and hard cutoff).
    pub fn transverse_seams(&self) -> Vec<f64> {
        if self.zero {
            return Vec::new();
        }
        vec![PLATEAU_FRAC * self.cutoff_radius, self.cutoff_radius]
    }

    pub fn lambda_in_support(&self, lambda: f64) -> bool {
        if self.zero {
            return false;
        }
        let l = if self.mirror { lambda.abs() } else { lambda };
        l > self.lambda_min && l < self.lambda_max
    }

    /// The lambda factor including scale, modulation and polynomial
    /// reweighting. Exactly zero outside the declared band.
    pub fn lambda_factor(&self, lambda: f64) -> Complex64 {
        if self.zero {
            return Complex64::new(0.0, 0.0);
        }
        let l = if self.mirror { lambda.abs() } else { lambda };
        let w = smooth_hat01((l - self.lambda_min) / (self.lambda_max - self.lambda_min));
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut v = self.scale * w;
        if self.lambda_modulation != 0.0 {
            v *= Complex64::new(0.0, self.lambda_modulation * lambda).exp();
        }
        for _ in 0..self.lambda_power {
            v *= self.lambda_power_scale * lambda;
        }
        v
    }

    /// The even per-axis transverse factor, identical on every xi- and
    /// eta-axis. Exactly zero for |q| >= cutoff radius.
    pub fn axis_factor(&self, q: f64) -> f64 {
        if self.zero {
            return 0.0;
        }
        let cut = plateau_cutoff(q / self.cutoff_radius, PLATEAU_FRAC);
        if cut == 0.0 {
            return 0.0;
        }
        (-q * q / (2.0 * self.width_a * self.width_a)).exp() * cut
    }

    /// Full evaluation of v0-tilde.
    pub fn eval(&self, lambda: f64, xibar: &[f64], etabar: &[f64]) -> Complex64 {
        debug_assert_eq!(xibar.len(), self.dims.d);
        debug_assert_eq!(etabar.len(), self.dims.n);
        let mut v = self.lambda_factor(lambda);
        if v == Complex64::new(0.0, 0.0) {
            return v;
        }
        for &q in xibar {
            let f = self.axis_factor(q);
            if f == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            v *= f;
        }
        for &q in etabar {
            let f = self.axis_factor(q);
            if f == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            v *= f;
        }
        v
    }

    /// Largest radius at which the profile can be nonzero on the cone
    /// {xi^2 = eta^2}: with |lambda| <= lambda_max and per-axis transverse
    /// bounds, |xi_0| <= (lambda_max + T/lambda_min)/2 where T bounds
    /// | |etabar|^2 - |xibar|^2 |.
    pub fn cone_support_radius(&self) -> f64 {
        if self.zero {
            return 0.0;
        }
        let t_xi = self.dims.d as f64 * self.cutoff_radius * self.cutoff_radius;
        let t_eta = self.dims.n as f64 * self.cutoff_radius * self.cutoff_radius;
        let t = t_xi.max(t_eta);
        let xi0 = 0.5 * (self.lambda_max + t / self.lambda_min);
        (xi0 * xi0 + t).sqrt()
    }
}

/// Result of a quadrature-backed pointwise evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ValueWithError {
    pub value: Complex64,
    pub est_error: f64,
    pub evals: usize,
}

/// Transverse-axis segments split at the plateau seams.
pub(crate) fn axis_segments(profile: &SpectralProfile) -> Vec<(f64, f64)> {
    let rc = profile.transverse_halfwidth();
    if rc == 0.0 {
        return Vec::new();
    }
    let q0 = PLATEAU_FRAC * rc;
    quad::panels_from_breakpoints(-rc, rc, &[-q0, 0.0, q0])
}

/// Lambda segments split at the band-peak seam.
pub(crate) fn lambda_segments(profile: &SpectralProfile) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (a, b) in profile.lambda_support_segments() {
        let mid = 0.5 * (a + b);
        out.push((a, mid));
        out.push((mid, b));
    }
    out
}

/// v0(s, xbar, ybar) = (1/2) (2 pi)^{-(N+1)} * q(s) * prod A(x_k) * prod B(y_k)
/// for separable profiles, each factor an adaptive 1D quadrature over the
/// compact support.
pub fn evaluate_v0(
    profile: &SpectralProfile,
    s: f64,
    xbar: &[f64],
    ybar: &[f64],
    opts: &AdaptiveOptions,
) -> Result<ValueWithError, SpectralError> {
    if profile.is_zero() {
        return Ok(ValueWithError {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            evals: 0,
        });
    }
    let dims = profile.dims();
    assert_eq!(xbar.len(), dims.d, "xbar length");
    assert_eq!(ybar.len(), dims.n, "ybar length");

    let factor_tol = opts.abs_tol / (2.0 + dims.big_n() as f64);
    let factor_opts = AdaptiveOptions {
        abs_tol: factor_tol,
        ..*opts
    };

    let mut factors: Vec<(Complex64, f64)> = Vec::with_capacity(dims.big_n() + 1);
    let mut evals = 0usize;

    let lam_segments =
        quad::split_by_oscillation(&lambda_segments(profile), s.abs() + profile.lambda_modulation.abs());
    let f_lambda =
        move |lambda: f64| Complex64::new(0.0, s * lambda).exp() * profile.lambda_factor(lambda);
    let q = quad::adaptive_segments(&f_lambda, &lam_segments, &factor_opts)?;
    factors.push((q.value, q.est_error));
    evals += q.evals;

    let base_axis = axis_segments(profile);
    for &xk in xbar {
        let segs = quad::split_by_oscillation(&base_axis, xk.abs());
        let f = move |q: f64| Complex64::new(0.0, xk * q).exp() * profile.axis_factor(q);
        let r = quad::adaptive_segments(&f, &segs, &factor_opts)?;
        factors.push((r.value, r.est_error));
        evals += r.evals;
    }
    for &yk in ybar {
        let segs = quad::split_by_oscillation(&base_axis, yk.abs());
        let f = move |q: f64| Complex64::new(0.0, -yk * q).exp() * profile.axis_factor(q);
        let r = quad::adaptive_segments(&f, &segs, &factor_opts)?;
        factors.push((r.value, r.est_error));
        evals += r.evals;
    }

    let prefactor = 0.5 * (2.0 * std::f64::consts::PI).powi(-(dims.big_n() as i32 + 1));
    let mut value = Complex64::new(prefactor, 0.0);
    for &(v, _) in &factors {
        value *= v;
    }
    // First-order error propagation through the product.
    let mut err = 0.0;
    for i in 0..factors.len() {
        let mut partial = prefactor;
        for (j, &(v, _)) in factors.iter().enumerate() {
            if j != i {
                partial *= v.norm().max(1e-300);
            }
        }
        err += factors[i].1 * partial;
    }
    Ok(ValueWithError {
        value,
        est_error: err,
        evals,
    })
}

/// L2 norm of v0 via Plancherel under the factor-2 convention:
/// ||v0||^2 = (1/4) (2 pi)^{-(N+1)} int |v0-tilde|^2.
pub fn v0_l2_norm(profile: &SpectralProfile, opts: &AdaptiveOptions) -> Result<f64, SpectralError> {
    if profile.is_zero() {
        return Ok(0.0);
    }
    let dims = profile.dims();
    let f_lambda = |lambda: f64| {
        let v = profile.lambda_factor(lambda);
        Complex64::new(v.norm_sqr(), 0.0)
    };
    let q = quad::adaptive_segments(&f_lambda, &lambda_segments(profile), opts)?;
    let f_axis = |q: f64| {
        let v = profile.axis_factor(q);
        Complex64::new(v * v, 0.0)
    };
    let axis = quad::adaptive_segments(&f_axis, &axis_segments(profile), opts)?;
    let norm_sq = 0.25
        * (2.0 * std::f64::consts::PI).powi(-(dims.big_n() as i32 + 1))
        * q.value.re
        * axis.value.re.powi(dims.big_n() as i32);
    Ok(norm_sq.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn dims11() -> Dims {
        Dims::new(1, 1).unwrap()
    }

    fn canonical() -> SpectralProfile {
        SpectralProfile::bump(dims11(), (1.0, 2.0), 0.75, false).unwrap()
    }

    #[test]
    fn bump_rejects_bad_parameters() {
        assert!(SpectralProfile::bump(dims11(), (0.0, 2.0), 1.0, false).is_err());
        assert!(SpectralProfile::bump(dims11(), (2.0, 1.0), 1.0, false).is_err());
        assert!(SpectralProfile::bump(dims11(), (1.0, 2.0), -1.0, false).is_err());
    }

    #[test]
    fn bump_support_examples() {
        let p = canonical();
        assert_eq!(p.eval(0.0, &[0.0], &[0.0]), Complex64::new(0.0, 0.0));
        let peak = p.eval(1.5, &[0.0], &[0.0]);
        assert!(peak.re > 0.0 && peak.im == 0.0);
        assert_abs_diff_eq!(peak.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn support_compliance_random() {
        let p = canonical();
        let rc = p.transverse_halfwidth();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100_000 {
            // Draw points guaranteed outside the support box.
            let which = rng.gen_range(0..3);
            let (lam, xi, eta) = match which {
                0 => {
                    // lambda outside the band (negative side or beyond the edges)
                    let lam = if rng.gen::<bool>() {
                        -rng.gen_range(0.0..5.0)
                    } else if rng.gen::<bool>() {
                        rng.gen_range(2.0..8.0)
                    } else {
                        rng.gen_range(0.0..1.0)
                    };
                    (lam, rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0))
                }
                1 => (
                    rng.gen_range(-3.0..3.0),
                    rc + rng.gen_range(0.0..10.0),
                    rng.gen_range(-6.0..6.0),
                ),
                _ => (
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-6.0..6.0),
                    -(rc + rng.gen_range(0.0..10.0)),
                ),
            };
            assert_eq!(p.eval(lam, &[xi], &[eta]), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn mirror_gives_hermitian_symmetry() {
        let p = SpectralProfile::bump(dims11(), (1.0, 2.0), 0.5, true).unwrap();
        assert!(p.is_hermitian());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let lam = rng.gen_range(-2.5..2.5);
            let xi = rng.gen_range(-4.0..4.0);
            let eta = rng.gen_range(-4.0..4.0);
            let a = p.eval(lam, &[xi], &[eta]);
            let b = p.eval(-lam, &[-xi], &[-eta]).conj();
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn evaluate_v0_zero_profile() {
        let z = SpectralProfile::zero(dims11());
        let v = evaluate_v0(&z, 0.3, &[0.1], &[0.2], &AdaptiveOptions::default()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn evaluate_v0_hermitian_is_real() {
        let p = SpectralProfile::bump(dims11(), (1.0, 2.0), 0.5, true).unwrap();
        let opts = AdaptiveOptions {
            abs_tol: 1e-12,
            ..Default::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let v = evaluate_v0(
                &p,
                rng.gen_range(-3.0..3.0),
                &[rng.gen_range(-3.0..3.0)],
                &[rng.gen_range(-3.0..3.0)],
                &opts,
            )
            .unwrap();
            assert!(v.value.im.abs() <= 1e-10, "im = {}", v.value.im);
        }
    }

    #[test]
    fn norm_scaling_is_homogeneous() {
        let p = canonical();
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let n1 = v0_l2_norm(&p, &opts).unwrap();
        assert!(n1 > 0.0);
        let n2 = v0_l2_norm(&p.scaled(Complex64::new(2.0, 0.0)), &opts).unwrap();
        assert_abs_diff_eq!(n2, 2.0 * n1, epsilon = 1e-10);
        let z = SpectralProfile::zero(dims11());
        assert_eq!(v0_l2_norm(&z, &opts).unwrap(), 0.0);
    }

    #[test]
    fn smoothness_proxy_finite_differences() {
        // Centered differences of the lambda factor stay bounded through
        // order 4 and converge at order ~2 for the first derivative in the
        // interior of the support.
        let p = canonical();
        let f = |l: f64| p.lambda_factor(l).re;
        let x = 1.31;
        let d1 = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let exact = d1(1e-6);
        let e1 = (d1(1e-2) - exact).abs();
        let e2 = (d1(5e-3) - exact).abs();
        let ratio = e1 / e2;
        assert!(
            (2.5..6.0).contains(&ratio),
            "first-derivative FD convergence ratio {ratio}"
        );
        for k in 1..=4u32 {
            let h = 1e-2;
            // k-th centered difference via binomial weights
            let mut acc = 0.0;
            for j in 0..=k {
                let c = (0..j).fold(1.0, |a, m| a * (k - m) as f64 / (m + 1) as f64);
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * c * f(x + (j as f64 - k as f64 / 2.0) * h);
            }
            let deriv = acc / h.powi(k as i32);
            assert!(deriv.is_finite());
            assert!(deriv.abs() < 1e5, "order-{k} difference {deriv}");
        }
    }

    #[test]
    fn plancherel_vs_direct_product_quadrature() {
        // The norm integral factorizes; evaluate the same product with an
        // independent fixed-order rule and compare.
        let p = canonical();
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let norm = v0_l2_norm(&p, &opts).unwrap();
        let lam = quad::fixed_gauss(
            &|l: f64| Complex64::new(p.lambda_factor(l).norm_sqr(), 0.0),
            &lambda_segments(&p),
            30,
            16,
        )
        .re;
        let ax = quad::fixed_gauss(
            &|q: f64| Complex64::new(p.axis_factor(q).powi(2), 0.0),
            &axis_segments(&p),
            30,
            16,
        )
        .re;
        let norm_sq = 0.25 * (2.0 * std::f64::consts::PI).powi(-3) * lam * ax * ax;
        assert_abs_diff_eq!(norm, norm_sq.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn forward_inverse_roundtrip_per_factor() {
        // Recover the lambda factor from position-space samples of its
        // transform: w(l) = (1/2pi) int e^{-i s l} q(s) ds with
        // q(s) = int e^{i s l} w(l) dl. The C^3 seams give |q(s)| ~ |s|^{-4}
        // tails, so the inversion window must be generous.
        let p = canonical();
        let opts = AdaptiveOptions {
            abs_tol: 1e-9,
            ..Default::default()
        };
        let q_of_s = |s: f64| {
            let segs = quad::split_by_oscillation(&lambda_segments(&p), s.abs());
            quad::adaptive_segments(
                &|l: f64| Complex64::new(0.0, s * l).exp() * p.lambda_factor(l),
                &segs,
                &opts,
            )
            .unwrap()
            .value
        };
        let s_max = 900.0;
        let inv_opts = AdaptiveOptions {
            abs_tol: 1e-7,
            max_evals: 20_000_000,
            ..Default::default()
        };
        for &lam in &[1.25, 1.5, 1.75] {
            let segs = quad::split_by_oscillation(&[(-s_max, s_max)], lam + 2.0);
            let f = quad::WithInnerError(|s: f64| (Complex64::new(0.0, -s * lam).exp() * q_of_s(s), 0.0));
            let rec = quad::adaptive_segments(&f, &segs, &inv_opts).unwrap().value
                / (2.0 * std::f64::consts::PI);
            let exact = p.lambda_factor(lam);
            let rel = (rec - exact).norm() / exact.norm();
            assert!(rel < 1e-6, "lambda={lam}: relative error {rel}");
        }
        // Transverse factor: Gaussian decay makes a short window sufficient.
        let g_of_x = |x: f64| {
            let segs = quad::split_by_oscillation(&axis_segments(&p), x.abs());
            quad::adaptive_segments(
                &|q: f64| Complex64::new(0.0, x * q).exp() * Complex64::new(p.axis_factor(q), 0.0),
                &segs,
                &opts,
            )
            .unwrap()
            .value
        };
        for &q0 in &[0.0, 1.1] {
            let segs = quad::split_by_oscillation(&[(-30.0, 30.0)], q0 + 5.0);
            let f = quad::WithInnerError(|x: f64| (Complex64::new(0.0, -x * q0).exp() * g_of_x(x), 0.0));
            let rec = quad::adaptive_segments(&f, &segs, &inv_opts).unwrap().value
                / (2.0 * std::f64::consts::PI);
            let exact = p.axis_factor(q0);
            assert!(
                (rec.re - exact).abs() / exact < 1e-6 && rec.im.abs() < 1e-7,
                "q={q0}: rec {rec} vs {exact}"
            );
        }
    }

    #[test]
    fn evaluate_v0_matches_factor_product() {
        // The nested evaluator must agree with an explicitly assembled
        // factor product; this pins the (1/2)(2pi)^{-(N+1)} normalization.
        let p = canonical();
        let opts = AdaptiveOptions {
            abs_tol: 1e-12,
            ..Default::default()
        };
        let (s, x1, y1) = (0.7, -0.4, 1.3);
        let v = evaluate_v0(&p, s, &[x1], &[y1], &opts).unwrap();
        let q = quad::fixed_gauss(
            &|l: f64| Complex64::new(0.0, s * l).exp() * p.lambda_factor(l),
            &lambda_segments(&p),
            30,
            32,
        );
        let ax = quad::fixed_gauss(
            &|t: f64| Complex64::new(0.0, x1 * t).exp() * p.axis_factor(t),
            &axis_segments(&p),
            30,
            32,
        );
        let ay = quad::fixed_gauss(
            &|t: f64| Complex64::new(0.0, -y1 * t).exp() * p.axis_factor(t),
            &axis_segments(&p),
            30,
            32,
        );
        let expect = 0.5 * (2.0 * std::f64::consts::PI).powi(-3) * q * ax * ay;
        assert!((v.value - expect).norm() < 1e-12);
    }
}

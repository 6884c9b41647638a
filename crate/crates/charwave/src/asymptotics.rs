//! Far-field machinery along transversal characteristic lines: the
//! asymptotic coefficient F^beta(theta, omega, p), the stationary-phase
//! leading term of the sphere integral with its Hessian signature factor,
//! and log-log decay-rate fitting used to verify the decay exponents.

use crate::geometry::{
    dot, line_point, shift_parameter, symbol_p_beta, CharacteristicLine, DirectionPair, Dims,
    MultiIndex,
};
use crate::propagator::{self, EvalOptions, PropagatorError};
use crate::quad::{self, AdaptiveOptions, QuadError};
use crate::spectral::SpectralProfile;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("G factor is singular at r = 0")]
    GFactorAtZero,
    #[error("degenerate Hessian of the restricted phase: |det| = {det:e}")]
    DegenerateHessian { det: f64 },
    #[error("decay fit needs at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("decay fit requires positive errors; sample {index} has error {value}")]
    NonPositiveError { index: usize, value: f64 },
    #[error("tau samples must be strictly increasing and positive")]
    BadTauGrid,
    #[error("all sampled values vanish (zero data); nothing to fit")]
    ZeroData,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

/// G^beta_{d,n}(r) = e^{i sgn(r) pi (n-d)/4} (sgn r)^{|beta|} |r|^{N/2+|beta|}
///                   / (2 (2 pi)^{N/2+1}).
pub fn g_factor(r: f64, dims: Dims, beta: &MultiIndex) -> Result<Complex64, AsymptoticsError> {
    if r == 0.0 {
        return Err(AsymptoticsError::GFactorAtZero);
    }
    let n_minus_d = dims.n as f64 - dims.d as f64;
    let sgn = r.signum();
    let phase = Complex64::new(0.0, sgn * PI * n_minus_d / 4.0).exp();
    let order = beta.order() as f64;
    let big_n = dims.big_n() as f64;
    let magnitude = r.abs().powf(big_n / 2.0 + order) / (2.0 * (2.0 * PI).powf(big_n / 2.0 + 1.0));
    let sign_pow = if beta.order() % 2 == 0 { 1.0 } else { sgn };
    Ok(phase * sign_pow * magnitude)
}

/// The coefficient F^beta(theta, omega, p) of the leading far-field term.
#[derive(Debug, Clone)]
pub struct AsymptoticCoefficient {
    pub value: Complex64,
    pub beta: MultiIndex,
    pub dir: DirectionPair,
    pub p: f64,
    pub quad_error: f64,
}

/// F^beta = P^beta(theta, omega) |theta_0 + omega_0|
///          int e^{i r p} G^beta_{d,n}(r) v0~(r(theta_0+omega_0), r thetabar, r omegabar) dr.
/// The integrand is supported in explicit r-intervals implied by the profile
/// band and transverse cutoffs; the r = 0 kink of G sits on a panel boundary
/// whenever an interval straddles it (with valid profiles it never does).
pub fn coefficient_f(
    profile: &SpectralProfile,
    beta: &MultiIndex,
    dir: &DirectionPair,
    p: f64,
    opts: &AdaptiveOptions,
) -> Result<AsymptoticCoefficient, AsymptoticsError> {
    let dims = profile.dims();
    let h = dir.transversality();
    if profile.is_zero() {
        return Ok(AsymptoticCoefficient {
            value: Complex64::new(0.0, 0.0),
            beta: beta.clone(),
            dir: dir.clone(),
            p,
            quad_error: 0.0,
        });
    }

    // r-intervals with nonzero amplitude: lambda = r h in the band(s), and
    // |r| small enough for every transverse cutoff along the ray.
    let (lam_min, lam_max) = profile.lambda_band();
    let rho_c = profile.transverse_halfwidth();
    let mut r_cap = f64::INFINITY;
    for &c in dir.theta()[1..].iter().chain(dir.omega()[1..].iter()) {
        if c.abs() > 1e-14 {
            r_cap = r_cap.min(rho_c / c.abs());
        }
    }
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut push_interval = |a: f64, b: f64| {
        let (lo, hi) = (a.min(b), a.max(b));
        let lo = lo.max(-r_cap);
        let hi = hi.min(r_cap);
        if lo < hi {
            intervals.push((lo, hi));
        }
    };
    push_interval(lam_min / h, lam_max / h);
    if profile.mirror() {
        push_interval(-lam_max / h, -lam_min / h);
    }
    if intervals.is_empty() {
        return Ok(AsymptoticCoefficient {
            value: Complex64::new(0.0, 0.0),
            beta: beta.clone(),
            dir: dir.clone(),
            p,
            quad_error: 0.0,
        });
    }

    // Panel boundaries at the amplitude seams and at the G kink.
    let mut bks: Vec<f64> = vec![0.0];
    for s in profile.lambda_seams() {
        bks.push(s / h);
        bks.push(-s / h);
    }
    for q in profile.transverse_seams() {
        for &c in dir.theta()[1..].iter().chain(dir.omega()[1..].iter()) {
            if c.abs() > 1e-14 {
                bks.push(q / c.abs());
                bks.push(-q / c.abs());
            }
        }
    }
    let mut segments = Vec::new();
    for &(a, b) in &intervals {
        segments.extend(quad::panels_from_breakpoints(a, b, &bks));
    }
    let segments = quad::split_by_oscillation(&segments, p.abs() + 1.0);

    let theta_bar = &dir.theta()[1..];
    let omega_bar = &dir.omega()[1..];
    let f = |r: f64| -> Complex64 {
        let g = match g_factor(r, dims, beta) {
            Ok(g) => g,
            Err(_) => return Complex64::new(0.0, 0.0),
        };
        let xb: Vec<f64> = theta_bar.iter().map(|&c| r * c).collect();
        let eb: Vec<f64> = omega_bar.iter().map(|&c| r * c).collect();
        let amp = profile.eval(r * h, &xb, &eb);
        if amp == Complex64::new(0.0, 0.0) {
            return amp;
        }
        Complex64::new(0.0, r * p).exp() * g * amp
    };
    let r = quad::adaptive_segments(&f, &segments, opts)?;
    let scale = symbol_p_beta(beta, dir) * h.abs();
    Ok(AsymptoticCoefficient {
        value: scale * r.value,
        beta: beta.clone(),
        dir: dir.clone(),
        p,
        quad_error: scale.norm() * r.est_error,
    })
}

/// Which stationary ray the expansion is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Leading stationary-phase term of int_Sigma B e^{i Lambda Phi} dS at the
/// stationary point (+-theta, +-omega):
/// (2 pi / Lambda)^{N/2} e^{+-i pi (n-d)/4} B(+-theta, +-omega).
#[derive(Debug, Clone, Copy)]
pub struct SphereLeadingTerm {
    pub value: Complex64,
    /// False when the amplitude vanishes at the stationary point, in which
    /// case the leading term is zero and carries no information.
    pub on_support: bool,
}

pub fn sphere_stationary_phase_leading<B>(
    amplitude: B,
    dir: &DirectionPair,
    lambda_big: f64,
    branch: Branch,
) -> SphereLeadingTerm
where
    B: Fn(&[f64], &[f64]) -> Complex64,
{
    let dims = Dims {
        d: dir.theta().len() - 1,
        n: dir.omega().len() - 1,
    };
    let s = branch.sign();
    let zeta: Vec<f64> = dir.theta().iter().map(|v| s * v).collect();
    let sigma: Vec<f64> = dir.omega().iter().map(|v| s * v).collect();
    let b0 = amplitude(&zeta, &sigma);
    let big_n = dims.big_n() as f64;
    let phase = Complex64::new(0.0, s * PI * (dims.n as f64 - dims.d as f64) / 4.0).exp();
    let value = (2.0 * PI / lambda_big).powf(big_n / 2.0) * phase * b0;
    SphereLeadingTerm {
        value,
        on_support: b0 != Complex64::new(0.0, 0.0),
    }
}

/// Brute-force quadrature of int_Sigma B e^{i Lambda Phi} dS with product
/// rules on the sphere factors (trapezoid circles, Gauss-Legendre x trapezoid
/// on S^2); the independent check of the stationary-phase engine.
pub fn sphere_phase_integral_brute<B>(
    amplitude: B,
    dir: &DirectionPair,
    lambda_big: f64,
    resolution: usize,
) -> Complex64
where
    B: Fn(&[f64], &[f64]) -> Complex64,
{
    let d = dir.theta().len() - 1;
    let n = dir.omega().len() - 1;
    let zeta_rule = crate::sphere::SphereRule::new(d, resolution, 0.0);
    let sigma_rule = crate::sphere::SphereRule::new(n, resolution, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for z in &zeta_rule.nodes {
        let phase_z = dot(dir.theta(), &z.coords);
        for s in &sigma_rule.nodes {
            let b = amplitude(&z.coords, &s.coords);
            if b == Complex64::new(0.0, 0.0) {
                continue;
            }
            let phi = phase_z - dot(dir.omega(), &s.coords);
            acc += z.weight * s.weight * b * Complex64::new(0.0, lambda_big * phi).exp();
        }
    }
    acc
}

/// Orthonormal basis of the tangent space of S^m at v.
fn tangent_frame(v: &[f64]) -> Vec<Vec<f64>> {
    let m = v.len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for axis in 0..m {
        if frame.len() == m - 1 {
            break;
        }
        let mut e = vec![0.0; m];
        e[axis] = 1.0;
        // Remove components along v and the accepted frame vectors.
        let proj = dot(&e, v);
        for (x, &vv) in e.iter_mut().zip(v) {
            *x -= proj * vv;
        }
        for f in &frame {
            let proj = dot(&e, f);
            for (x, &ff) in e.iter_mut().zip(f) {
                *x -= proj * ff;
            }
        }
        let nrm = dot(&e, &e).sqrt();
        if nrm > 1e-6 {
            for x in e.iter_mut() {
                *x /= nrm;
            }
            frame.push(e);
        }
    }
    assert_eq!(frame.len(), m - 1, "tangent frame construction failed");
    frame
}

/// Geodesic normal chart: w -> cos|w| v + sin|w| (sum w_i e_i)/|w|.
fn geodesic_point(v: &[f64], frame: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let r2: f64 = w.iter().map(|x| x * x).sum();
    let r = r2.sqrt();
    let (c, sinc) = if r < 1e-30 {
        (1.0, 1.0)
    } else {
        (r.cos(), r.sin() / r)
    };
    let mut out: Vec<f64> = v.iter().map(|&x| c * x).collect();
    for (wi, e) in w.iter().zip(frame) {
        for (o, &ee) in out.iter_mut().zip(e) {
            *o += sinc * wi * ee;
        }
    }
    out
}

/// Jacobi eigenvalue iteration for a small symmetric matrix.
fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Numeric Hessian signature factor of Phi restricted to Sigma at the
/// stationary point of the chosen branch: e^{i pi sig / 4}, which the
/// stationary-phase formula states equals e^{+-i pi (n-d)/4}. A degenerate
/// Hessian would contradict the nondegeneracy of the stationary points and
/// is raised as a hard failure.
pub fn hessian_phase_factor(
    dir: &DirectionPair,
    branch: Branch,
) -> Result<Complex64, AsymptoticsError> {
    let s = branch.sign();
    let zeta0: Vec<f64> = dir.theta().iter().map(|v| s * v).collect();
    let sigma0: Vec<f64> = dir.omega().iter().map(|v| s * v).collect();
    let frame_z = tangent_frame(&zeta0);
    let frame_s = tangent_frame(&sigma0);
    let dz = frame_z.len();
    let ds = frame_s.len();
    let m = dz + ds;

    let phi = |w: &[f64]| -> f64 {
        let zeta = geodesic_point(&zeta0, &frame_z, &w[..dz]);
        let sigma = geodesic_point(&sigma0, &frame_s, &w[dz..]);
        dot(dir.theta(), &zeta) - dot(dir.omega(), &sigma)
    };

    // Gradient must vanish at a stationary point.
    let hg = 1e-5;
    for i in 0..m {
        let mut wp = vec![0.0; m];
        wp[i] = hg;
        let mut wm = vec![0.0; m];
        wm[i] = -hg;
        let g = (phi(&wp) - phi(&wm)) / (2.0 * hg);
        debug_assert!(g.abs() < 1e-8, "gradient component {i} = {g}");
    }

    let h = 1e-4;
    let f0 = phi(&vec![0.0; m]);
    let mut hess = vec![vec![0.0; m]; m];
    for i in 0..m {
        let mut wp = vec![0.0; m];
        wp[i] = h;
        let mut wm = vec![0.0; m];
        wm[i] = -h;
        hess[i][i] = (phi(&wp) - 2.0 * f0 + phi(&wm)) / (h * h);
        for j in i + 1..m {
            let mut wpp = vec![0.0; m];
            wpp[i] = h;
            wpp[j] = h;
            let mut wpm = wpp.clone();
            wpm[j] = -h;
            let mut wmp = wpp.clone();
            wmp[i] = -h;
            let mut wmm = wpm.clone();
            wmm[i] = -h;
            let v = (phi(&wpp) - phi(&wpm) - phi(&wmp) + phi(&wmm)) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let eigs = symmetric_eigenvalues(hess);
    let det: f64 = eigs.iter().product();
    if det.abs() <= 1e-8 {
        return Err(AsymptoticsError::DegenerateHessian { det });
    }
    let sig: i32 = eigs
        .iter()
        .map(|&e| if e > 0.0 { 1 } else { -1 })
        .sum();
    Ok(Complex64::new(0.0, PI * sig as f64 / 4.0).exp())
}

/// Norm of the numeric tangential gradient of Phi restricted to the cone, in
/// the spherical chart coordinates (angles and log-radius) at the point
/// (r zeta, r sigma). Vanishes exactly on the stationary rays.
pub fn cone_phase_gradient_norm(dir: &DirectionPair, zeta: &[f64], sigma: &[f64], r: f64) -> f64 {
    let frame_z = tangent_frame(zeta);
    let frame_s = tangent_frame(sigma);
    let dz = frame_z.len();
    let ds = frame_s.len();
    let m = dz + ds + 1;
    let phi = |w: &[f64]| -> f64 {
        let z = geodesic_point(zeta, &frame_z, &w[..dz]);
        let sg = geodesic_point(sigma, &frame_s, &w[dz..dz + ds]);
        let rr = r * w[m - 1].exp();
        rr * (dot(dir.theta(), &z) - dot(dir.omega(), &sg))
    };
    let h = 1e-6;
    let mut norm_sq = 0.0;
    for i in 0..m {
        let mut wp = vec![0.0; m];
        wp[i] = h;
        let mut wm = vec![0.0; m];
        wm[i] = -h;
        let g = (phi(&wp) - phi(&wm)) / (2.0 * h);
        norm_sq += g * g;
    }
    norm_sq.sqrt()
}

/// Log-log least-squares fit of sampled errors against tau.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RateFitReport {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn fit_decay_rate(samples: &[(f64, f64)]) -> Result<RateFitReport, AsymptoticsError> {
    if samples.len() < 2 {
        return Err(AsymptoticsError::TooFewSamples {
            need: 2,
            got: samples.len(),
        });
    }
    for (i, &(tau, err)) in samples.iter().enumerate() {
        if err <= 0.0 {
            return Err(AsymptoticsError::NonPositiveError {
                index: i,
                value: err,
            });
        }
        if tau <= 0.0 || (i > 0 && tau <= samples[i - 1].0) {
            return Err(AsymptoticsError::BadTauGrid);
        }
    }
    let xs: Vec<f64> = samples.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let pred = intercept + slope * x;
            (y - pred) * (y - pred)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFitReport {
        samples: samples.to_vec(),
        slope,
        intercept,
        residual,
    })
}

/// One row of the verification table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyRow {
    pub tau: f64,
    pub abs_u: f64,
    pub abs_leading: f64,
    pub err: f64,
    pub propagator_est_error: f64,
}

/// Outcome of the far-field verification along one line.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// Fit of log |d^beta u - tau^{-N/2} F^beta| vs log tau; the decay bound
    /// predicts slope <= -(N+1)/2.
    pub remainder_fit: RateFitReport,
    /// Fit of log |d^beta u| vs log tau; expected ~ -N/2 when F^beta != 0.
    pub leading_fit: Option<RateFitReport>,
    pub coefficient: AsymptoticCoefficient,
    pub rows: Vec<VerifyRow>,
}

/// Evaluates d^beta u along the line at each tau, subtracts the leading term
/// tau^{-N/2} F^beta, and fits both decay rates. Per-tau evaluations run in
/// parallel; the collected order is fixed by the grid.
pub fn verify_theorem(
    profile: &SpectralProfile,
    line: &CharacteristicLine,
    beta: &MultiIndex,
    tau_grid: &[f64],
    eval_opts: &EvalOptions,
    coeff_opts: &AdaptiveOptions,
) -> Result<VerifyReport, AsymptoticsError> {
    if tau_grid.len() < 4 {
        return Err(AsymptoticsError::TooFewSamples {
            need: 4,
            got: tau_grid.len(),
        });
    }
    if tau_grid[0] <= 0.0 || tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AsymptoticsError::BadTauGrid);
    }
    let dims = profile.dims();
    let p = shift_parameter(line);
    let coefficient = coefficient_f(profile, beta, &line.dir, p, coeff_opts)?;

    let evaluations: Vec<Result<(f64, Complex64, f64), PropagatorError>> = tau_grid
        .par_iter()
        .map(|&tau| {
            let pt = line_point(line, tau);
            propagator::evaluate_dbeta_u_point(profile, &pt, beta, eval_opts)
                .map(|v| (tau, v.value, v.est_error))
        })
        .collect();

    let big_n = dims.big_n() as f64;
    let mut rows = Vec::with_capacity(tau_grid.len());
    let mut remainder_samples = Vec::with_capacity(tau_grid.len());
    let mut leading_samples = Vec::with_capacity(tau_grid.len());
    let mut any_nonzero = false;
    for ev in evaluations {
        let (tau, u, est) = ev?;
        let leading = tau.powf(-big_n / 2.0) * coefficient.value;
        let err = (u - leading).norm();
        if u.norm() > 0.0 {
            any_nonzero = true;
        }
        rows.push(VerifyRow {
            tau,
            abs_u: u.norm(),
            abs_leading: leading.norm(),
            err,
            propagator_est_error: est,
        });
        remainder_samples.push((tau, err));
        leading_samples.push((tau, u.norm()));
    }
    if !any_nonzero && coefficient.value.norm() == 0.0 {
        return Err(AsymptoticsError::ZeroData);
    }
    let remainder_fit = fit_decay_rate(&remainder_samples)?;
    let leading_fit = if leading_samples.iter().all(|&(_, v)| v > 0.0) {
        Some(fit_decay_rate(&leading_samples)?)
    } else {
        None
    };
    Ok(VerifyReport {
        remainder_fit,
        leading_fit,
        coefficient,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::plateau_cutoff;
    use approx::assert_abs_diff_eq;

    fn dims11() -> Dims {
        Dims::new(1, 1).unwrap()
    }

    fn beta0(dims: Dims) -> MultiIndex {
        MultiIndex::zero(dims)
    }

    #[test]
    fn g_factor_examples() {
        let d11 = dims11();
        let b = beta0(d11);
        // d = n = 1, beta = 0, r = 1: 1/(8 pi^2).
        let g = g_factor(1.0, d11, &b).unwrap();
        assert_abs_diff_eq!(g.re, 1.0 / (8.0 * PI * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-18);
        // Even in r for |beta| = 0 and n = d.
        let gm = g_factor(-1.0, d11, &b).unwrap();
        assert_abs_diff_eq!(gm.re, g.re, epsilon = 1e-18);

        // d = 2, n = 1: e^{-i pi/4} / (2 (2 pi)^{5/2}).
        let d21 = Dims::new(2, 1).unwrap();
        let g = g_factor(1.0, d21, &beta0(d21)).unwrap();
        let mag = 1.0 / (2.0 * (2.0 * PI).powf(2.5));
        assert_abs_diff_eq!(g.re, mag * (PI / 4.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, -mag * (PI / 4.0).sin(), epsilon = 1e-15);

        assert!(matches!(
            g_factor(0.0, d11, &b),
            Err(AsymptoticsError::GFactorAtZero)
        ));
    }

    fn canonical_line(dims: Dims) -> CharacteristicLine {
        let dir = DirectionPair::from_angles(&[0.25], &[0.55], dims).unwrap();
        CharacteristicLine::new(vec![0.3, 0.4], vec![-0.3, -0.2], dir).unwrap()
    }

    #[test]
    fn coefficient_f_basics() {
        let dims = dims11();
        let p_profile = SpectralProfile::bump(dims, (1.0, 2.0), 0.75, false).unwrap();
        let line = canonical_line(dims);
        let p = shift_parameter(&line);
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let f = coefficient_f(&p_profile, &beta0(dims), &line.dir, p, &opts).unwrap();
        assert!(f.value.norm() > 1e-6, "|F| = {}", f.value.norm());

        let z = SpectralProfile::zero(dims);
        let fz = coefficient_f(&z, &beta0(dims), &line.dir, p, &opts).unwrap();
        assert_eq!(fz.value, Complex64::new(0.0, 0.0));

        // Linearity in the data.
        let c = Complex64::new(0.7, -1.3);
        let fscaled = coefficient_f(&p_profile.scaled(c), &beta0(dims), &line.dir, p, &opts).unwrap();
        assert!((fscaled.value - c * f.value).norm() < 1e-13);
    }

    #[test]
    fn coefficient_f_shift_modulation_identity() {
        // F(p + delta) for the original data equals F(p) for the data
        // modulated by e^{i r delta}; the integrands agree pointwise.
        let dims = dims11();
        let profile = SpectralProfile::bump(dims, (1.0, 2.0), 0.75, false).unwrap();
        let line = canonical_line(dims);
        let p = shift_parameter(&line);
        let delta = 0.83;
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let shifted = coefficient_f(&profile, &beta0(dims), &line.dir, p + delta, &opts).unwrap();
        let h = line.dir.transversality();
        let modulated = coefficient_f(
            &profile.modulated(delta / h),
            &beta0(dims),
            &line.dir,
            p,
            &opts,
        )
        .unwrap();
        assert!(
            (shifted.value - modulated.value).norm() <= 1e-12,
            "diff {:.3e}",
            (shifted.value - modulated.value).norm()
        );
    }

    #[test]
    fn coefficient_f_pbeta_consistency() {
        // F^beta equals F^0 computed with the data reweighted by r^{|beta|}
        // times P^beta(theta, omega); the G-factor sign absorbs into the
        // reweighting along the ray.
        let dims = dims11();
        let profile = SpectralProfile::bump(dims, (1.0, 2.0), 0.75, false).unwrap();
        let line = canonical_line(dims);
        let p = shift_parameter(&line);
        let h = line.dir.transversality();
        let beta = MultiIndex::new(vec![1, 0, 0, 0], dims).unwrap();
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let direct = coefficient_f(&profile, &beta, &line.dir, p, &opts).unwrap();
        let reweighted = coefficient_f(
            &profile.lambda_reweighted(1, 1.0 / h),
            &beta0(dims),
            &line.dir,
            p,
            &opts,
        )
        .unwrap();
        let expect = reweighted.value * symbol_p_beta(&beta, &line.dir);
        assert!(
            (direct.value - expect).norm() <= 1e-12,
            "diff {:.3e}",
            (direct.value - expect).norm()
        );
    }

    #[test]
    fn coefficient_f_fixed_order_refinement() {
        let dims = dims11();
        let profile = SpectralProfile::bump(dims, (1.0, 2.0), 0.75, false).unwrap();
        let line = canonical_line(dims);
        let p = shift_parameter(&line);
        let opts = AdaptiveOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        let adaptive = coefficient_f(&profile, &beta0(dims), &line.dir, p, &opts).unwrap();

        // Independent fixed-order evaluation at doubled panel density.
        let h = line.dir.transversality();
        let (lam_min, lam_max) = profile.lambda_band();
        let seg_mid = 0.5 * (lam_min + lam_max) / h;
        let segments = [(lam_min / h, seg_mid), (seg_mid, lam_max / h)];
        let b = beta0(dims);
        let theta1 = line.dir.theta()[1];
        let omega1 = line.dir.omega()[1];
        let f = |r: f64| {
            let g = g_factor(r, dims, &b).unwrap();
            let amp = profile.eval(r * h, &[r * theta1], &[r * omega1]);
            Complex64::new(0.0, r * p).exp() * g * amp
        };
        let fixed = quad::fixed_gauss(&f, &segments, 30, 64) * h.abs();
        assert!(
            (adaptive.value - fixed).norm() < 1e-10,
            "diff {:.3e}",
            (adaptive.value - fixed).norm()
        );
    }

    #[test]
    fn hessian_signature_factors_all_small_dims() {
        for (d, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let dims = Dims::new(d, n).unwrap();
            let theta_angles: Vec<f64> = (0..d).map(|k| 0.3 + 0.2 * k as f64).collect();
            let omega_angles: Vec<f64> = (0..n).map(|k| 0.7 - 0.15 * k as f64).collect();
            let dir = DirectionPair::from_angles(&theta_angles, &omega_angles, dims).unwrap();
            for branch in [Branch::Plus, Branch::Minus] {
                let numeric = hessian_phase_factor(&dir, branch).unwrap();
                let expect = Complex64::new(
                    0.0,
                    branch.sign() * PI * (n as f64 - d as f64) / 4.0,
                )
                .exp();
                assert!(
                    (numeric - expect).norm() < 1e-6,
                    "d={d} n={n} {branch:?}: numeric {numeric} expect {expect}"
                );
            }
        }
    }

    #[test]
    fn phase_gradient_vanishes_only_on_stationary_rays() {
        let dims = dims11();
        let dir = DirectionPair::from_angles(&[0.25], &[0.55], dims).unwrap();
        for branch in [1.0, -1.0] {
            let zeta: Vec<f64> = dir.theta().iter().map(|v| branch * v).collect();
            let sigma: Vec<f64> = dir.omega().iter().map(|v| branch * v).collect();
            for &r in &[0.5, 1.0, 7.0] {
                let g = cone_phase_gradient_norm(&dir, &zeta, &sigma, r);
                assert!(g <= 1e-8, "gradient {g} on the stationary ray");
            }
        }
        // Generic points: gradient bounded away from zero.
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(12);
        use rand::Rng;
        let mut checked = 0;
        while checked < 50 {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            let g: f64 = rng.gen_range(0.0..2.0 * PI);
            let zeta = vec![a.cos(), a.sin()];
            let sigma = vec![g.cos(), g.sin()];
            // Skip near-stationary directions.
            let ca = (zeta[0] * dir.theta()[0] + zeta[1] * dir.theta()[1])
                .max(-(zeta[0] * dir.theta()[0] + zeta[1] * dir.theta()[1]));
            let cs = (sigma[0] * dir.omega()[0] + sigma[1] * dir.omega()[1])
                .max(-(sigma[0] * dir.omega()[0] + sigma[1] * dir.omega()[1]));
            if ca > 0.995 && cs > 0.995 {
                continue;
            }
            let r = rng.gen_range(0.3..5.0);
            let g = cone_phase_gradient_norm(&dir, &zeta, &sigma, r);
            assert!(g > 1e-8, "generic point with tiny gradient: {g}");
            checked += 1;
        }
    }

    #[test]
    fn stationary_phase_leading_and_remainder_slope() {
        // d = n = 1: remainder after subtracting the leading term should
        // decay like Lambda^{-(N+1)/2} or faster (in practice ~ Lambda^{-2}).
        let dims = dims11();
        let dir = DirectionPair::from_angles(&[0.9], &[2.2], dims).unwrap();
        let amp = |zeta: &[f64], sigma: &[f64]| {
            let dz = 1.0 - dot(zeta, dir.theta());
            let dsg = 1.0 - dot(sigma, dir.omega());
            let b = plateau_cutoff(dz / 0.5, 0.3) * plateau_cutoff(dsg / 0.5, 0.3);
            Complex64::new(b * (1.0 + 0.3 * zeta[1]) , 0.2 * b * sigma[0])
        };
        let mut samples = Vec::new();
        for &lam in &[50.0, 100.0, 200.0, 400.0, 800.0] {
            let brute = sphere_phase_integral_brute(&amp, &dir, lam, (4.0 * lam) as usize + 64);
            let lead = sphere_stationary_phase_leading(&amp, &dir, lam, Branch::Plus);
            assert!(lead.on_support);
            samples.push((lam, (brute - lead.value).norm()));
        }
        let fit = fit_decay_rate(&samples).unwrap();
        assert!(
            fit.slope <= -1.4,
            "remainder slope {} (samples {:?})",
            fit.slope,
            samples
        );

        // Amplitude vanishing near the stationary point: zero leading term.
        let amp_off = |zeta: &[f64], _sigma: &[f64]| {
            let dz = 1.0 - dot(zeta, dir.theta());
            Complex64::new(plateau_cutoff((dz - 1.0) / 0.3, 0.5), 0.0)
        };
        let lead = sphere_stationary_phase_leading(&amp_off, &dir, 100.0, Branch::Plus);
        assert!(!lead.on_support);
        assert_eq!(lead.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fit_decay_rate_examples() {
        let two = fit_decay_rate(&[(10.0, 1e-2), (100.0, 1e-3)]).unwrap();
        assert_abs_diff_eq!(two.slope, -1.0, epsilon = 1e-14);

        let c = 0.37;
        let exact: Vec<(f64, f64)> = (1..=20)
            .map(|i| {
                let tau = 10.0 * 1.2f64.powi(i);
                (tau, c * tau.powf(-1.5))
            })
            .collect();
        let fit = fit_decay_rate(&exact).unwrap();
        assert_abs_diff_eq!(fit.slope, -1.5, epsilon = 1e-12);
        assert!(fit.residual < 1e-12);

        let noisy: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let tau = 10.0 + (300.0 - 10.0) * i as f64 / 19.0;
                (tau, c * tau.powf(-1.5) * (1.0 + 0.1 * tau.sin()))
            })
            .collect();
        let fit = fit_decay_rate(&noisy).unwrap();
        assert!(
            (fit.slope + 1.5).abs() <= 0.05,
            "noisy slope {}",
            fit.slope
        );

        assert!(matches!(
            fit_decay_rate(&[(1.0, 0.5)]),
            Err(AsymptoticsError::TooFewSamples { .. })
        ));
        assert!(matches!(
            fit_decay_rate(&[(1.0, 0.5), (2.0, 0.0)]),
            Err(AsymptoticsError::NonPositiveError { .. })
        ));
        assert!(matches!(
            fit_decay_rate(&[(2.0, 0.5), (1.0, 0.2)]),
            Err(AsymptoticsError::BadTauGrid)
        ));
    }

    #[test]
    fn verify_theorem_rejects_zero_data() {
        let dims = dims11();
        let z = SpectralProfile::zero(dims);
        let line = canonical_line(dims);
        let e = verify_theorem(
            &z,
            &line,
            &beta0(dims),
            &[5.0, 10.0, 20.0, 40.0],
            &EvalOptions::default(),
            &AdaptiveOptions::default(),
        );
        assert!(matches!(e, Err(AsymptoticsError::ZeroData)));
    }
}

//! Direct quadrature of the cone representation of the solution in the
//! spherical chart, and its Littlewood-Paley decomposition into dyadic
//! shells. The amplitude |xi_0 + eta_0| v0-tilde is supported in a compact
//! region of the cone (the profile keeps lambda away from zero), so the
//! radial integral truncates exactly; the angular integrals are taken over
//! explicit arcs delimited by the amplitude seams and the kink of
//! |xi_0 + eta_0|, with Gauss panels inside each arc.

use crate::geometry::{dot, norm, LightConePoint, MultiIndex};
use crate::quad::{self, AdaptiveOptions, QuadError, WithInnerError};
use crate::smooth::dyadic_phi;
use crate::spectral::SpectralProfile;
use crate::sphere::SphereRule;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeLpError {
    #[error("point lies on the characteristic hyperplane (x0 + y0 = {0:e}); the shell series is only valid off it")]
    OnHyperplane(f64),
    #[error("invalid dyadic range [{j_min}, {j_max}]")]
    InvalidRange { j_min: i32, j_max: i32 },
    #[error("partition [{have_min}, {have_max}] does not cover shells [{need_min}, {need_max}] carrying nonzero amplitude")]
    UncoveredShells {
        need_min: i32,
        need_max: i32,
        have_min: i32,
        have_max: i32,
    },
    #[error("invalid parameter {what} = {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// The dyadic window chi-tilde and the shell index range in play.
/// chi-tilde(rho) = phi(log2 rho) with phi the smoothstep hat, so
/// sum_j chi-tilde(2^{-j} rho) = 1 holds for every rho > 0 by construction
/// and each rho meets at most `overlap` windows.
#[derive(Debug, Clone, Copy)]
pub struct DyadicPartition {
    j_min: i32,
    j_max: i32,
}

impl DyadicPartition {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self, ConeLpError> {
        if j_min > j_max {
            return Err(ConeLpError::InvalidRange { j_min, j_max });
        }
        Ok(DyadicPartition { j_min, j_max })
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// Number of windows overlapping any fixed rho.
    pub fn overlap(&self) -> usize {
        2
    }

    /// The window chi-tilde, supported in (1/2, 2).
    pub fn window(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            0.0
        } else {
            dyadic_phi(rho.log2())
        }
    }

    /// chi-tilde(2^{-j} rho).
    pub fn window_at_scale(&self, j: i32, rho: f64) -> f64 {
        self.window(rho * (-j as f64).exp2())
    }
}

/// Canonical window over a generous shell range.
pub fn make_dyadic_window() -> DyadicPartition {
    DyadicPartition::new(-24, 24).expect("static range")
}

/// Options for the cone quadratures.
#[derive(Debug, Clone, Copy)]
pub struct ConeQuadOptions {
    pub abs_tol: f64,
    pub max_evals: usize,
    /// Shifts interior panel boundaries by this fraction of a panel;
    /// converged values must not depend on it.
    pub node_offset_fraction: f64,
    /// Initial angular resolution of the product-rule path (d or n = 2).
    pub angular_resolution: usize,
}

impl Default for ConeQuadOptions {
    fn default() -> Self {
        ConeQuadOptions {
            abs_tol: 1e-8,
            max_evals: 200_000_000,
            node_offset_fraction: 0.0,
            angular_resolution: 32,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct CoreResult {
    value: Complex64,
    est_error: f64,
    evals: usize,
}

/// Truncation diagnostics of the radial integral.
#[derive(Debug, Clone, Copy)]
pub struct TailReport {
    /// Envelope bound on the neglected contribution beyond r_max.
    pub estimate: f64,
    /// Whether the estimate is below the requested tolerance.
    pub within_tol: bool,
    /// Radius at which the integration actually stopped.
    pub truncated_at: f64,
    /// Radius beyond which the amplitude vanishes identically.
    pub support_radius: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ConeIntegral {
    pub value: Complex64,
    pub est_error: f64,
    pub evals: usize,
    pub tail: TailReport,
}

/// One Littlewood-Paley shell integral I^beta_j.
#[derive(Debug, Clone, Copy)]
pub struct ShellIntegralResult {
    pub j: i32,
    pub value: Complex64,
    pub node_count: usize,
    pub est_error: f64,
}

enum RadialWindow {
    Full { r_max: f64 },
    Shell { j: i32 },
}

fn band_intervals(profile: &SpectralProfile) -> Vec<(f64, f64)> {
    let (lo, hi) = profile.lambda_band();
    if profile.mirror() {
        vec![(-hi, -lo), (lo, hi)]
    } else {
        vec![(lo, hi)]
    }
}

fn intervals_intersect(a: (f64, f64), bs: &[(f64, f64)]) -> bool {
    bs.iter().any(|&(lo, hi)| a.0 <= hi && a.1 >= lo)
}

/// Signed seam values of the lambda factor (band edges and peak, mirrored if
/// applicable), used as angular breakpoints.
fn signed_lambda_seams(profile: &SpectralProfile) -> Vec<f64> {
    let mut seams: Vec<f64> = profile.lambda_seams();
    if profile.mirror() {
        let negs: Vec<f64> = seams.iter().map(|&s| -s).collect();
        seams.extend(negs);
    }
    seams
}

/// Arcs of the circle [0, 2pi) delimited by the given angles, each arc lying
/// inside one quadrant so that cos and sin are monotone on it.
fn circle_arcs(mut bks: Vec<f64>) -> Vec<(f64, f64)> {
    bks.extend([0.0, FRAC_PI_2, PI, 1.5 * PI]);
    let tau = 2.0 * PI;
    let mut angles: Vec<f64> = bks
        .into_iter()
        .filter(|a| a.is_finite())
        .map(|a| a.rem_euclid(tau))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut arcs = Vec::with_capacity(angles.len());
    for w in angles.windows(2) {
        arcs.push((w[0], w[1]));
    }
    let first = angles[0];
    let last = *angles.last().unwrap();
    if (first + tau - last).abs() > 1e-12 {
        arcs.push((last, first + tau));
    }
    arcs
}

fn cos_range(arc: (f64, f64)) -> (f64, f64) {
    let (a, b) = (arc.0.cos(), arc.1.cos());
    (a.min(b), a.max(b))
}

fn abs_sin_min(arc: (f64, f64)) -> f64 {
    let (a, b) = (arc.0.sin().abs(), arc.1.sin().abs());
    a.min(b)
}

/// Breakpoints where cos(angle) = c has solutions.
fn acos_pair(c: f64, out: &mut Vec<f64>) {
    if c.abs() <= 1.0 {
        let a = c.acos();
        out.push(a);
        out.push(2.0 * PI - a);
    }
}

fn asin_quad(v: f64, out: &mut Vec<f64>) {
    if v.abs() <= 1.0 {
        let a = v.asin();
        out.push(a);
        out.push(PI - a);
        out.push(PI + a);
        out.push(2.0 * PI - a);
    }
}

/// The inner sigma-circle integral at fixed (rho, alpha) for d = n = 1:
/// arcs split at the kink of |xi_0 + eta_0| and at the amplitude seams.
#[allow(clippy::too_many_arguments)]
fn sigma_circle_integral(
    profile: &SpectralProfile,
    beta: &MultiIndex,
    x: &[f64],
    y: &[f64],
    rho: f64,
    cos_a: f64,
    sin_a: f64,
    bands: &[(f64, f64)],
    seams: &[f64],
    modulus: bool,
    tol: f64,
    opts: &ConeQuadOptions,
) -> (Complex64, f64, usize) {
    let xi_factor = profile.axis_factor(rho * sin_a);
    if xi_factor == 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0, 0);
    }
    let rho_c = profile.transverse_halfwidth();

    let mut bks: Vec<f64> = Vec::with_capacity(24);
    // Kink of |lambda| at lambda = 0: cos(gamma) = -cos(alpha).
    acos_pair(-cos_a, &mut bks);
    for &s in seams {
        acos_pair(s / rho - cos_a, &mut bks);
    }
    for &q in &profile.transverse_seams() {
        asin_quad(q / rho, &mut bks);
    }

    let xi0 = rho * cos_a;
    let xi1 = rho * sin_a;
    let p_x = symbol_p_beta_x_part(beta, &[xi0, xi1]);
    let phase_x = rho * (x[0] * cos_a + x[1] * sin_a);

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    let mut evals = 0usize;
    let rate = rho * norm(y);
    let qopts = AdaptiveOptions {
        abs_tol: tol,
        max_evals: opts.max_evals,
        ..Default::default()
    };

    let mut active: Vec<(f64, f64)> = Vec::new();
    for arc in circle_arcs(bks) {
        if rho * abs_sin_min(arc) >= rho_c {
            continue;
        }
        let (cmin, cmax) = cos_range(arc);
        let lam_range = (rho * (cos_a + cmin), rho * (cos_a + cmax));
        if !intervals_intersect(lam_range, bands) {
            continue;
        }
        active.push(arc);
    }
    if active.is_empty() {
        return (Complex64::new(0.0, 0.0), 0.0, 0);
    }
    let panels = quad::split_by_oscillation_offset(&active, rate, opts.node_offset_fraction);
    let f = |g: f64| -> Complex64 {
        let cg = g.cos();
        let sg = g.sin();
        let lambda = rho * (cos_a + cg);
        let lf = profile.lambda_factor(lambda);
        if lf == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let eta_factor = profile.axis_factor(rho * sg);
        if eta_factor == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p = p_x * symbol_p_beta_y_part(beta, &[rho * cg, rho * sg]);
        let amp = p * lambda.abs() * lf * xi_factor * eta_factor;
        if modulus {
            Complex64::new(amp.norm(), 0.0)
        } else {
            let phase = phase_x - rho * (y[0] * cg + y[1] * sg);
            amp * Complex64::new(0.0, phase).exp()
        }
    };
    match quad::adaptive_segments(&f, &panels, &qopts) {
        Ok(r) => {
            total += r.value;
            err += r.est_error;
            evals += r.evals;
        }
        Err(QuadError::ToleranceNotReached {
            value,
            achieved,
            evals: e,
            ..
        }) => {
            total += value;
            err += achieved;
            evals += e;
        }
        Err(_) => {}
    }
    (total, err, evals)
}

fn symbol_p_beta_x_part(beta: &MultiIndex, xi: &[f64]) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &b) in beta.x_part().iter().enumerate() {
        for _ in 0..b {
            acc *= i * xi[k];
        }
    }
    acc
}

fn symbol_p_beta_y_part(beta: &MultiIndex, eta: &[f64]) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &b) in beta.y_part().iter().enumerate() {
        for _ in 0..b {
            acc *= -i * eta[k];
        }
    }
    acc
}

/// Angular integral over Sigma = S^d x S^n at fixed radius.
#[allow(clippy::too_many_arguments)]
fn sigma_integral(
    profile: &SpectralProfile,
    beta: &MultiIndex,
    x: &[f64],
    y: &[f64],
    rho: f64,
    modulus: bool,
    tol: f64,
    opts: &ConeQuadOptions,
) -> (Complex64, f64, usize) {
    let dims = profile.dims();
    if dims.d == 1 && dims.n == 1 {
        let bands = band_intervals(profile);
        let seams = signed_lambda_seams(profile);
        let rho_c = profile.transverse_halfwidth();

        let mut bks: Vec<f64> = Vec::with_capacity(24);
        for &q in &profile.transverse_seams() {
            asin_quad(q / rho, &mut bks);
        }
        for &s in &seams {
            // gamma-arc topology changes where the seam circle is tangent to
            // the sigma-circle: cos(gamma) = +-1.
            acos_pair(s / rho - 1.0, &mut bks);
            acos_pair(s / rho + 1.0, &mut bks);
        }

        let mut active: Vec<(f64, f64)> = Vec::new();
        for arc in circle_arcs(bks) {
            if rho * abs_sin_min(arc) >= rho_c {
                continue;
            }
            let (cmin, cmax) = cos_range(arc);
            let lam_possible = (rho * (cmin - 1.0), rho * (cmax + 1.0));
            if !intervals_intersect(lam_possible, &bands) {
                continue;
            }
            active.push(arc);
        }
        if active.is_empty() {
            return (Complex64::new(0.0, 0.0), 0.0, 0);
        }
        let inner_tol = tol * 0.15;
        let f = WithInnerError(|a: f64| {
            let (v, e, _) = sigma_circle_integral(
                profile, beta, x, y, rho, a.cos(), a.sin(), &bands, &seams, modulus, inner_tol,
                opts,
            );
            (v, e)
        });
        let rate = rho * norm(x);
        let panels = quad::split_by_oscillation_offset(&active, rate, opts.node_offset_fraction);
        let qopts = AdaptiveOptions {
            abs_tol: tol,
            max_evals: opts.max_evals,
            ..Default::default()
        };
        match quad::adaptive_segments(&f, &panels, &qopts) {
            Ok(r) => (r.value, r.est_error, r.evals),
            Err(QuadError::ToleranceNotReached {
                value,
                achieved,
                evals,
                ..
            }) => (value, achieved, evals),
            Err(_) => (Complex64::new(0.0, 0.0), f64::INFINITY, 0),
        }
    } else {
        sigma_integral_product(profile, beta, x, y, rho, modulus, tol, opts)
    }
}

/// Product-rule path for d or n = 2: Gauss-Legendre x trapezoid rules on each
/// sphere factor, doubling the resolution until two consecutive levels agree.
#[allow(clippy::too_many_arguments)]
fn sigma_integral_product(
    profile: &SpectralProfile,
    beta: &MultiIndex,
    x: &[f64],
    y: &[f64],
    rho: f64,
    modulus: bool,
    tol: f64,
    opts: &ConeQuadOptions,
) -> (Complex64, f64, usize) {
    let dims = profile.dims();
    let mut res = opts.angular_resolution.max(16);
    let mut prev: Option<Complex64> = None;
    let mut evals = 0usize;
    for _level in 0..5 {
        let zeta_rule = SphereRule::new(dims.d, res, opts.node_offset_fraction * PI / res as f64);
        let sigma_rule = SphereRule::new(dims.n, res, opts.node_offset_fraction * PI / res as f64);

        // Per-node precomputation on each factor sphere.
        struct NodePre {
            coord0: f64,
            scaled: Vec<f64>,
            trans_factor: f64,
            p_part: Complex64,
            cis: Complex64,
            weight: f64,
        }
        let pre = |rule: &SphereRule, point: &[f64], is_x: bool| -> Vec<NodePre> {
            rule.nodes
                .iter()
                .map(|node| {
                    let scaled: Vec<f64> = node.coords.iter().map(|c| rho * c).collect();
                    let trans_factor = scaled[1..]
                        .iter()
                        .map(|&q| profile.axis_factor(q))
                        .product();
                    let p_part = if is_x {
                        symbol_p_beta_x_part(beta, &scaled)
                    } else {
                        symbol_p_beta_y_part(beta, &scaled)
                    };
                    let ph = dot(point, &node.coords) * rho;
                    let cis = Complex64::new(0.0, if is_x { ph } else { -ph }).exp();
                    NodePre {
                        coord0: scaled[0],
                        scaled,
                        trans_factor,
                        p_part,
                        cis,
                        weight: node.weight,
                    }
                })
                .collect()
        };
        let zn = pre(&zeta_rule, x, true);
        let sn = pre(&sigma_rule, y, false);
        let _ = &zn.first().map(|n| &n.scaled); // scaled kept for clarity

        let mut acc = Complex64::new(0.0, 0.0);
        for z in &zn {
            if z.trans_factor == 0.0 {
                continue;
            }
            for s in &sn {
                if s.trans_factor == 0.0 {
                    continue;
                }
                let lambda = z.coord0 + s.coord0;
                let lf = profile.lambda_factor(lambda);
                if lf == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let amp = z.p_part * s.p_part * lambda.abs() * lf * z.trans_factor * s.trans_factor;
                let v = if modulus {
                    Complex64::new(amp.norm(), 0.0)
                } else {
                    amp * z.cis * s.cis
                };
                acc += v * (z.weight * s.weight);
            }
        }
        evals += zn.len() * sn.len();
        if let Some(p) = prev {
            let diff = (acc - p).norm();
            if diff <= tol {
                return (acc, diff, evals);
            }
        }
        prev = Some(acc);
        res *= 2;
    }
    (prev.unwrap(), tol * 10.0, evals)
}

/// Core radial-times-angular integral
/// (1/2) int rho^{N-1} W(rho) [int_Sigma P^beta |l| v0~ e^{i rho (x.zeta - y.sigma)} dS] drho
/// with no 2 pi normalization; callers attach their own prefactors.
fn core_cone_integral(
    profile: &SpectralProfile,
    beta: &MultiIndex,
    pt: &LightConePoint,
    window: &RadialWindow,
    partition: Option<&DyadicPartition>,
    modulus: bool,
    opts: &ConeQuadOptions,
) -> Result<CoreResult, ConeLpError> {
    if profile.is_zero() {
        return Ok(CoreResult {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            evals: 0,
        });
    }
    let dims = profile.dims();
    let big_n = dims.big_n() as i32;
    let (lam_min, _) = profile.lambda_band();
    let rho_lo_support = 0.5 * lam_min;
    let rho_hi_support = profile.cone_support_radius();

    let (lo, hi, shell_j) = match window {
        RadialWindow::Full { r_max } => (rho_lo_support, rho_hi_support.min(*r_max), None),
        RadialWindow::Shell { j } => {
            let lo = (*j as f64 - 1.0).exp2().max(rho_lo_support);
            let hi = (*j as f64 + 1.0).exp2().min(rho_hi_support);
            (lo, hi, Some(*j))
        }
    };
    if hi <= lo {
        return Ok(CoreResult {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            evals: 0,
        });
    }

    // Radial breakpoints: amplitude seams over 2 (band entry at
    // cos a + cos g = 2) and at 1, transverse seams, window midpoint.
    let mut bks: Vec<f64> = Vec::new();
    for s in profile.lambda_seams() {
        bks.push(0.5 * s);
        bks.push(s);
    }
    bks.extend(profile.transverse_seams());
    if let Some(j) = shell_j {
        bks.push((j as f64).exp2());
    }
    let segments = quad::panels_from_breakpoints(lo, hi, &bks);

    // Angular budget per unit radial weight.
    let rho_weight: f64 = segments
        .iter()
        .map(|&(a, b)| (b.powi(big_n) - a.powi(big_n)) / big_n as f64)
        .sum::<f64>()
        * 0.5;
    let tol_ang = opts.abs_tol * 0.25 / rho_weight.max(1e-12);

    let rate = norm(&pt.x) + norm(&pt.y);
    let panels = quad::split_by_oscillation_offset(&segments, rate, opts.node_offset_fraction);
    let integrand = WithInnerError(|rho: f64| {
        let w = match window {
            RadialWindow::Full { .. } => 1.0,
            RadialWindow::Shell { j } => {
                let w = partition.expect("shell window requires partition").window_at_scale(*j, rho);
                if w == 0.0 {
                    return (Complex64::new(0.0, 0.0), 0.0);
                }
                w
            }
        };
        let (v, e, _) = sigma_integral(profile, beta, &pt.x, &pt.y, rho, modulus, tol_ang, opts);
        let scale = 0.5 * rho.powi(big_n - 1) * w;
        (scale * v, scale * e)
    });
    let qopts = AdaptiveOptions {
        abs_tol: opts.abs_tol,
        max_evals: opts.max_evals,
        ..Default::default()
    };
    let r = match quad::adaptive_segments(&integrand, &panels, &qopts) {
        Ok(r) => r,
        Err(QuadError::ToleranceNotReached {
            value,
            achieved,
            evals,
            ..
        }) => {
            return Ok(CoreResult {
                value,
                est_error: achieved,
                evals,
            })
        }
        Err(e) => return Err(ConeLpError::Quad(e)),
    };
    Ok(CoreResult {
        value: r.value,
        est_error: r.est_error,
        evals: r.evals,
    })
}

/// Truncated inversion of the cone representation:
/// (2 pi)^{-(N+1)} int_{C, r <= r_max} P^beta |xi_0+eta_0| v0~ e^{i(x.xi - y.eta)} dS.
/// The tail beyond r_max is reported from the support geometry: it vanishes
/// exactly once r_max passes the support radius, and is bounded by the
/// envelope integral otherwise (a flagged, not fatal, condition).
pub fn direct_cone_integral(
    profile: &SpectralProfile,
    pt: &LightConePoint,
    beta: &MultiIndex,
    r_max: f64,
    opts: &ConeQuadOptions,
) -> Result<ConeIntegral, ConeLpError> {
    if r_max <= 0.0 {
        return Err(ConeLpError::InvalidParameter {
            what: "r_max",
            value: r_max,
        });
    }
    let dims = profile.dims();
    let pref = (2.0 * std::f64::consts::PI).powi(-(dims.big_n() as i32 + 1));
    let core = core_cone_integral(
        profile,
        beta,
        pt,
        &RadialWindow::Full { r_max },
        None,
        false,
        opts,
    )?;

    let support_radius = profile.cone_support_radius();
    let tail = if profile.is_zero() || r_max >= support_radius {
        TailReport {
            estimate: 0.0,
            within_tol: true,
            truncated_at: r_max.min(support_radius),
            support_radius,
        }
    } else {
        // Envelope (modulus) integral over the neglected annulus; coarse
        // tolerance is enough for a bound.
        let tail_opts = ConeQuadOptions {
            abs_tol: (opts.abs_tol * 10.0).max(1e-10),
            ..*opts
        };
        let env = core_cone_integral(
            profile,
            beta,
            pt,
            &RadialWindow::Full {
                r_max: support_radius,
            },
            None,
            true,
            &tail_opts,
        )?;
        let env_inner = core_cone_integral(
            profile,
            beta,
            pt,
            &RadialWindow::Full { r_max },
            None,
            true,
            &tail_opts,
        )?;
        let estimate = pref * (env.value.re - env_inner.value.re).max(0.0);
        TailReport {
            estimate,
            within_tol: estimate <= opts.abs_tol,
            truncated_at: r_max,
            support_radius,
        }
    };

    Ok(ConeIntegral {
        value: pref * core.value,
        est_error: pref * core.est_error,
        evals: core.evals,
        tail,
    })
}

/// The shell integral I^beta_j = int_C chi a^beta(2^j .) e^{i 2^j (x.xi - y.eta)} dS,
/// computed in the rescaled radial variable where it reads
/// 2 pi 2^{-Nj} (1/2) int rho^{N-1} chi~(2^{-j} rho) amp(rho) e^{i rho (...)}.
pub fn shell_integral(
    profile: &SpectralProfile,
    pt: &LightConePoint,
    beta: &MultiIndex,
    j: i32,
    partition: &DyadicPartition,
    opts: &ConeQuadOptions,
) -> Result<ShellIntegralResult, ConeLpError> {
    let dims = profile.dims();
    let core = core_cone_integral(
        profile,
        beta,
        pt,
        &RadialWindow::Shell { j },
        Some(partition),
        false,
        opts,
    )?;
    let scale = 2.0 * std::f64::consts::PI * (-(dims.big_n() as f64) * j as f64).exp2();
    Ok(ShellIntegralResult {
        j,
        value: scale * core.value,
        node_count: core.evals,
        est_error: scale * core.est_error,
    })
}

/// Shell indices that can carry nonzero amplitude for this profile.
pub fn active_shell_range(profile: &SpectralProfile) -> Option<(i32, i32)> {
    if profile.is_zero() {
        return None;
    }
    let rho_lo = 0.5 * profile.lambda_band().0;
    let rho_hi = profile.cone_support_radius();
    let mut lo = None;
    let mut hi = None;
    for j in -60..=60 {
        let shell_lo = (j as f64 - 1.0).exp2();
        let shell_hi = (j as f64 + 1.0).exp2();
        if shell_lo < rho_hi && shell_hi > rho_lo {
            if lo.is_none() {
                lo = Some(j);
            }
            hi = Some(j);
        }
    }
    lo.zip(hi)
}

/// Littlewood-Paley series with per-shell breakdown:
/// sum_j (2 pi)^{-N-2} 2^{Nj} I^beta_j = d^beta u(x, y) off the hyperplane.
#[derive(Debug, Clone)]
pub struct LpSeries {
    pub value: Complex64,
    pub est_error: f64,
    pub shells: Vec<ShellIntegralResult>,
}

pub fn lp_series_sum(
    profile: &SpectralProfile,
    pt: &LightConePoint,
    beta: &MultiIndex,
    partition: &DyadicPartition,
    opts: &ConeQuadOptions,
) -> Result<LpSeries, ConeLpError> {
    let plane = pt.x[0] + pt.y[0];
    let scale = norm(&pt.x) + norm(&pt.y);
    if plane.abs() <= 1e-12 * scale.max(1.0) {
        return Err(ConeLpError::OnHyperplane(plane));
    }
    let (have_min, have_max) = partition.j_range();
    if let Some((need_min, need_max)) = active_shell_range(profile) {
        if need_min < have_min || need_max > have_max {
            return Err(ConeLpError::UncoveredShells {
                need_min,
                need_max,
                have_min,
                have_max,
            });
        }
    }
    let dims = profile.dims();
    let pref = (2.0 * std::f64::consts::PI).powi(-(dims.big_n() as i32 + 2));
    let mut shells = Vec::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut est = 0.0f64;
    let active = active_shell_range(profile);
    for j in partition.shells() {
        let in_range = active.map_or(false, |(a, b)| j >= a && j <= b);
        let shell = if in_range {
            shell_integral(profile, pt, beta, j, partition, opts)?
        } else {
            ShellIntegralResult {
                j,
                value: Complex64::new(0.0, 0.0),
                node_count: 0,
                est_error: 0.0,
            }
        };
        let weight = pref * ((dims.big_n() as f64) * j as f64).exp2();
        value += weight * shell.value;
        est += weight * shell.est_error;
        shells.push(shell);
    }
    Ok(LpSeries {
        value,
        est_error: est,
        shells,
    })
}

/// Per-shell magnitude table along a characteristic line at parameter tau.
#[derive(Debug, Clone)]
pub struct ShellDecayRow {
    pub j: i32,
    pub value: Complex64,
    pub weighted_abs: f64,
    pub node_count: usize,
    pub est_error: f64,
}

#[derive(Debug, Clone)]
pub struct ShellDecayReport {
    pub tau: f64,
    pub rows: Vec<ShellDecayRow>,
    pub dominant_j: i32,
    /// Whether |2^{Nj} I_j| decays monotonically moving away from the
    /// dominant shell (diagnostic only; constants are not asserted).
    pub monotone_away_from_peak: bool,
}

pub fn shell_decay_report(
    profile: &SpectralProfile,
    line: &crate::geometry::CharacteristicLine,
    beta: &MultiIndex,
    tau: f64,
    partition: &DyadicPartition,
    opts: &ConeQuadOptions,
) -> Result<ShellDecayReport, ConeLpError> {
    if tau <= 0.0 {
        return Err(ConeLpError::InvalidParameter {
            what: "tau",
            value: tau,
        });
    }
    let pt = crate::geometry::line_point(line, tau);
    let dims = profile.dims();
    let active = active_shell_range(profile);
    let mut rows = Vec::new();
    for j in partition.shells() {
        let in_range = active.map_or(false, |(a, b)| j >= a && j <= b);
        let shell = if in_range {
            shell_integral(profile, &pt, beta, j, partition, opts)?
        } else {
            ShellIntegralResult {
                j,
                value: Complex64::new(0.0, 0.0),
                node_count: 0,
                est_error: 0.0,
            }
        };
        let weighted_abs = ((dims.big_n() as f64) * j as f64).exp2() * shell.value.norm();
        rows.push(ShellDecayRow {
            j,
            value: shell.value,
            weighted_abs,
            node_count: shell.node_count,
            est_error: shell.est_error,
        });
    }
    let dominant_idx = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.weighted_abs.partial_cmp(&b.1.weighted_abs).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut monotone = true;
    for w in rows[dominant_idx..].windows(2) {
        if w[1].weighted_abs > w[0].weighted_abs * (1.0 + 1e-9) + 1e-300 {
            monotone = false;
        }
    }
    for w in rows[..=dominant_idx].windows(2) {
        if w[0].weighted_abs > w[1].weighted_abs * (1.0 + 1e-9) + 1e-300 {
            monotone = false;
        }
    }
    let dominant_j = rows.get(dominant_idx).map(|r| r.j).unwrap_or(0);
    Ok(ShellDecayReport {
        tau,
        rows,
        dominant_j,
        monotone_away_from_peak: monotone,
    })
}

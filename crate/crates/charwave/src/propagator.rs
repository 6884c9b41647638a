//! Exact spectral evolution of the characteristic problem. On the Fourier
//! side the equation (d^2_ts + Lap_x - Lap_y) v = 0 with data on {t = 0}
//! evolves by the unimodular multiplier e^{-i t (|xibar|^2 - |etabar|^2) / lambda},
//! defined wherever the data support keeps lambda away from zero. This module
//! provides pointwise evaluation of u and its derivatives (the primary oracle
//! for the far-field verification), grid realization of the evolution, the
//! conservation check and the PDE finite-difference residual.

use crate::geometry::{dot, Dims, LightConePoint, MultiIndex};
use crate::quad::{self, AdaptiveOptions, QuadError, WithInnerError};
use crate::spectral::{self, SpectralProfile, SpectralError, ValueWithError};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::BTreeMap;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("multiplier evaluated at lambda = 0 (outside every valid profile support)")]
    LambdaZero,
    #[error("derivative order {order} exceeds the configured maximum {max}")]
    BetaOrderTooHigh { order: u32, max: u32 },
    #[error("grid axis {axis} violates the Nyquist bound: support extends to {required:.3} but the dual lattice reaches {available:.3}")]
    NyquistViolation {
        axis: usize,
        required: f64,
        available: f64,
    },
    #[error("grid spec mismatch: expected {expected} axes, got {got}")]
    GridRank { expected: usize, got: usize },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Deliberate multiplier corruptions used by the test suite to probe which
/// checks can actually detect a wrong propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierFault {
    None,
    /// Flips the sign of the |etabar|^2 term: the evolution stays unitary but
    /// solves the wrong equation, so the PDE residual stops converging.
    FlipEtaSign,
    /// Doubles the phase: still unimodular, so conservation cannot see it.
    DoublePhase,
}

/// The evolution multiplier at time t.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionMultiplier {
    pub t: f64,
    fault: MultiplierFault,
}

impl EvolutionMultiplier {
    pub fn new(t: f64) -> Self {
        EvolutionMultiplier {
            t,
            fault: MultiplierFault::None,
        }
    }

    pub fn with_fault(t: f64, fault: MultiplierFault) -> Self {
        EvolutionMultiplier { t, fault }
    }

    pub fn symbol(
        &self,
        lambda: f64,
        xibar: &[f64],
        etabar: &[f64],
    ) -> Result<Complex64, PropagatorError> {
        if lambda == 0.0 {
            return Err(PropagatorError::LambdaZero);
        }
        Ok(self.symbol_unchecked(lambda, xibar, etabar))
    }

    #[inline]
    pub(crate) fn symbol_unchecked(&self, lambda: f64, xibar: &[f64], etabar: &[f64]) -> Complex64 {
        let xi2 = dot(xibar, xibar);
        let eta2 = dot(etabar, etabar);
        let eta2 = match self.fault {
            MultiplierFault::FlipEtaSign => -eta2,
            _ => eta2,
        };
        let mut phase = -self.t * (xi2 - eta2) / lambda;
        if self.fault == MultiplierFault::DoublePhase {
            phase *= 2.0;
        }
        Complex64::new(0.0, phase).exp()
    }
}

/// Options for pointwise evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub quad: AdaptiveOptions,
    pub max_beta_order: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            quad: AdaptiveOptions {
                abs_tol: 1e-10,
                ..Default::default()
            },
            max_beta_order: 4,
        }
    }
}

/// u(x, y) at a light-cone point, via nested 1D oscillatory quadratures of
/// the inverted Fourier representation (outer lambda, inner Fresnel-type
/// integrals per transverse axis).
pub fn evaluate_u_point(
    profile: &SpectralProfile,
    pt: &LightConePoint,
    opts: &EvalOptions,
) -> Result<ValueWithError, PropagatorError> {
    let beta = MultiIndex::zero(profile.dims());
    evaluate_dbeta_u_point(profile, pt, &beta, opts)
}

/// Monomial in the separable expansion of the derivative symbol: the factors
/// (i xi_0)^{b0} (-i eta_0)^{bd1} expand into sums over powers of lambda and
/// of the transverse coordinates because xi_0, eta_0 are polynomial in
/// (lambda, |xibar|^2, |etabar|^2, 1/lambda) on the cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct TermKey {
    lambda_pow: i32,
    xi_pows: Vec<u32>,
    eta_pows: Vec<u32>,
}

fn expand_beta_terms(beta: &MultiIndex, dims: Dims) -> Vec<(TermKey, Complex64)> {
    let half_i = Complex64::new(0.0, 0.5);
    let mut terms: BTreeMap<TermKey, Complex64> = BTreeMap::new();
    terms.insert(
        TermKey {
            lambda_pow: 0,
            xi_pows: vec![0; dims.d],
            eta_pows: vec![0; dims.n],
        },
        Complex64::new(1.0, 0.0),
    );

    // One factor of i*xi_0 (sign +1) or -i*eta_0 (sign -1):
    // i*xi_0   = (i/2) lambda + (i/2)|etabar|^2/lambda - (i/2)|xibar|^2/lambda
    // -i*eta_0 = -(i/2) lambda + (i/2)|etabar|^2/lambda - (i/2)|xibar|^2/lambda
    let apply_zeroth = |terms: &mut BTreeMap<TermKey, Complex64>, sign: f64| {
        let mut next: BTreeMap<TermKey, Complex64> = BTreeMap::new();
        for (key, coeff) in terms.iter() {
            let mut k = key.clone();
            k.lambda_pow += 1;
            *next.entry(k).or_default() += sign * half_i * coeff;
            for a in 0..dims.n {
                let mut k = key.clone();
                k.lambda_pow -= 1;
                k.eta_pows[a] += 2;
                *next.entry(k).or_default() += half_i * coeff;
            }
            for a in 0..dims.d {
                let mut k = key.clone();
                k.lambda_pow -= 1;
                k.xi_pows[a] += 2;
                *next.entry(k).or_default() -= half_i * coeff;
            }
        }
        *terms = next;
    };

    let x_part = beta.x_part().to_vec();
    let y_part = beta.y_part().to_vec();
    for _ in 0..x_part[0] {
        apply_zeroth(&mut terms, 1.0);
    }
    for _ in 0..y_part[0] {
        apply_zeroth(&mut terms, -1.0);
    }
    let i = Complex64::new(0.0, 1.0);
    let mut scalar = Complex64::new(1.0, 0.0);
    let mut xi_extra = vec![0u32; dims.d];
    let mut eta_extra = vec![0u32; dims.n];
    for (k, &b) in x_part.iter().skip(1).enumerate() {
        xi_extra[k] += b;
        for _ in 0..b {
            scalar *= i;
        }
    }
    for (k, &b) in y_part.iter().skip(1).enumerate() {
        eta_extra[k] += b;
        for _ in 0..b {
            scalar *= -i;
        }
    }
    terms
        .into_iter()
        .map(|(mut key, coeff)| {
            for (k, &e) in xi_extra.iter().enumerate() {
                key.xi_pows[k] += e;
            }
            for (k, &e) in eta_extra.iter().enumerate() {
                key.eta_pows[k] += e;
            }
            (key, coeff * scalar)
        })
        .collect()
}

/// d^beta u(x, y): the integrand of [`evaluate_u_point`] times the symbol
/// factors (i xi_0)^{b0} prod (i xibar_k)^{b_k} (-i eta_0)^{..} prod (-i etabar_k)^{..}
/// with xi_0, eta_0 taken from the graph chart of the cone.
pub fn evaluate_dbeta_u_point(
    profile: &SpectralProfile,
    pt: &LightConePoint,
    beta: &MultiIndex,
    opts: &EvalOptions,
) -> Result<ValueWithError, PropagatorError> {
    if beta.order() > opts.max_beta_order {
        return Err(PropagatorError::BetaOrderTooHigh {
            order: beta.order(),
            max: opts.max_beta_order,
        });
    }
    if profile.is_zero() {
        return Ok(ValueWithError {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            evals: 0,
        });
    }
    let dims = profile.dims();
    let t = 0.5 * (pt.x[0] + pt.y[0]);
    let s = 0.5 * (pt.x[0] - pt.y[0]);
    let xbar = &pt.x[1..];
    let ybar = &pt.y[1..];

    let terms = expand_beta_terms(beta, dims);
    // Union of the transverse monomial powers needed per axis.
    let mut xi_need: Vec<Vec<u32>> = vec![Vec::new(); dims.d];
    let mut eta_need: Vec<Vec<u32>> = vec![Vec::new(); dims.n];
    for (key, _) in &terms {
        for (k, &p) in key.xi_pows.iter().enumerate() {
            if !xi_need[k].contains(&p) {
                xi_need[k].push(p);
            }
        }
        for (k, &p) in key.eta_pows.iter().enumerate() {
            if !eta_need[k].contains(&p) {
                eta_need[k].push(p);
            }
        }
    }

    let rho_c = profile.transverse_halfwidth();
    let (lam_min, _) = profile.lambda_band();
    let axis_segments = spectral::axis_segments(profile);
    let inner_tol = opts.quad.abs_tol * 1e-3 / (1.0 + dims.big_n() as f64);
    let inner_opts = AdaptiveOptions {
        abs_tol: inner_tol,
        ..opts.quad
    };

    // The outer integrand at a fixed lambda: assemble the per-axis inner
    // oscillatory integrals, then combine the expansion terms.
    let integrand = |lambda: f64| -> (Complex64, f64) {
        let lam_factor = profile.lambda_factor(lambda);
        if lam_factor == Complex64::new(0.0, 0.0) {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let inner_rate = |z: f64| z.abs() + 2.0 * t.abs() * rho_c / lambda.abs();
        let mut xi_vals: Vec<BTreeMap<u32, (Complex64, f64)>> = Vec::with_capacity(dims.d);
        for (k, needs) in xi_need.iter().enumerate() {
            let z = xbar[k];
            let mut per_axis = BTreeMap::new();
            for &p in needs {
                let segs = quad::split_by_oscillation(&axis_segments, inner_rate(z));
                let f = move |q: f64| {
                    let phase = z * q - t * q * q / lambda;
                    Complex64::new(0.0, phase).exp() * profile.axis_factor(q) * q.powi(p as i32)
                };
                let r = quad::adaptive_segments(&f, &segs, &inner_opts);
                let (v, e) = match r {
                    Ok(r) => (r.value, r.est_error),
                    Err(QuadError::ToleranceNotReached { value, achieved, .. }) => (value, achieved),
                    Err(_) => (Complex64::new(0.0, 0.0), f64::INFINITY),
                };
                per_axis.insert(p, (v, e));
            }
            xi_vals.push(per_axis);
        }
        let mut eta_vals: Vec<BTreeMap<u32, (Complex64, f64)>> = Vec::with_capacity(dims.n);
        for (k, needs) in eta_need.iter().enumerate() {
            let z = ybar[k];
            let mut per_axis = BTreeMap::new();
            for &p in needs {
                let segs = quad::split_by_oscillation(&axis_segments, inner_rate(z));
                let f = move |q: f64| {
                    let phase = -z * q + t * q * q / lambda;
                    Complex64::new(0.0, phase).exp() * profile.axis_factor(q) * q.powi(p as i32)
                };
                let r = quad::adaptive_segments(&f, &segs, &inner_opts);
                let (v, e) = match r {
                    Ok(r) => (r.value, r.est_error),
                    Err(QuadError::ToleranceNotReached { value, achieved, .. }) => (value, achieved),
                    Err(_) => (Complex64::new(0.0, 0.0), f64::INFINITY),
                };
                per_axis.insert(p, (v, e));
            }
            eta_vals.push(per_axis);
        }

        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        for (key, coeff) in &terms {
            let mut v = *coeff * lambda.powi(key.lambda_pow);
            let mut term_err_rel = 0.0f64;
            for (k, &p) in key.xi_pows.iter().enumerate() {
                let (jv, je) = xi_vals[k][&p];
                term_err_rel += je / jv.norm().max(1e-300);
                v *= jv;
            }
            for (k, &p) in key.eta_pows.iter().enumerate() {
                let (jv, je) = eta_vals[k][&p];
                term_err_rel += je / jv.norm().max(1e-300);
                v *= jv;
            }
            total += v;
            err += v.norm() * term_err_rel;
        }
        let osc = Complex64::new(0.0, s * lambda).exp();
        (osc * lam_factor * total, err * lam_factor.norm())
    };

    // Outer oscillation: e^{i s lambda} plus the slow lambda-dependence of the
    // inner integrals (bounded by the smaller of the non-stationary and
    // stationary-phase estimates).
    let inner_lambda_rate = if t == 0.0 {
        0.0
    } else {
        let direct = t.abs() * rho_c * rho_c / (lam_min * lam_min);
        let x2: f64 = xbar.iter().map(|v| v * v).sum::<f64>() + ybar.iter().map(|v| v * v).sum::<f64>();
        direct.min(x2 / (4.0 * t.abs()) + 2.0)
    };
    let rate = s.abs() + inner_lambda_rate + 1.0;
    let segs = quad::split_by_oscillation(&spectral::lambda_segments(profile), rate);
    let outer = quad::adaptive_segments(&WithInnerError(integrand), &segs, &opts.quad)?;

    let pref = 0.5 * (2.0 * std::f64::consts::PI).powi(-(dims.big_n() as i32 + 1));
    Ok(ValueWithError {
        value: pref * outer.value,
        est_error: pref * outer.est_error,
        evals: outer.evals,
    })
}

/// Uniform periodic grid over the centered box, axes ordered (s, xbar.., ybar..).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub nodes: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl GridSpec {
    pub fn rank(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.nodes[axis] as f64
    }

    pub fn node_coordinate(&self, axis: usize, index: usize) -> f64 {
        -0.5 * self.lengths[axis] + index as f64 * self.spacing(axis)
    }

    fn validate(&self, dims: Dims) -> Result<(), PropagatorError> {
        let expected = dims.big_n() + 1;
        if self.nodes.len() != expected || self.lengths.len() != expected {
            return Err(PropagatorError::GridRank {
                expected,
                got: self.nodes.len().min(self.lengths.len()),
            });
        }
        Ok(())
    }
}

/// Complex field sampled on a [`GridSpec`], together with its discrete
/// L2 norm (rectangle rule, exact for the periodic trapezoid).
#[derive(Debug, Clone)]
pub struct GridField {
    pub values: Vec<Complex64>,
    pub spec: GridSpec,
    pub dims: Dims,
    pub t: f64,
    pub l2_norm: f64,
}

impl GridField {
    pub fn index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for (axis, &i) in multi.iter().enumerate() {
            idx = idx * self.spec.nodes[axis] + i;
        }
        idx
    }

    pub fn value(&self, multi: &[usize]) -> Complex64 {
        self.values[self.index(multi)]
    }

    /// CSV export: one row per node, coordinates then re/im.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let rank = self.spec.rank();
        let mut header: Vec<String> = (0..rank).map(|a| format!("z{a}")).collect();
        header.push("re".into());
        header.push("im".into());
        writeln!(w, "{}", header.join(","))?;
        let mut multi = vec![0usize; rank];
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            for a in (0..rank).rev() {
                multi[a] = rem % self.spec.nodes[a];
                rem /= self.spec.nodes[a];
            }
            let mut row: Vec<String> = (0..rank)
                .map(|a| crate::harness::fmt_f64(self.spec.node_coordinate(a, multi[a])))
                .collect();
            row.push(crate::harness::fmt_f64(v.re));
            row.push(crate::harness::fmt_f64(v.im));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// JSON metadata: grid shape, box, time, norm.
    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.spec.nodes,
            "box": self.spec.lengths,
            "t": self.t,
            "l2_norm": self.l2_norm,
            "axes": "s, xbar.., ybar..",
        })
    }
}

fn dual_frequencies(n: usize, length: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / length;
    (0..n)
        .map(|m| {
            let m_signed = if m <= (n - 1) / 2 {
                m as isize
            } else {
                m as isize - n as isize
            };
            base * m_signed as f64
        })
        .collect()
}

/// Evolves the profile to time t on the grid: samples v0-tilde analytically on
/// the dual lattice, applies the multiplier, inverse-transforms.
pub fn evolve_grid(
    profile: &SpectralProfile,
    spec: &GridSpec,
    t: f64,
) -> Result<GridField, PropagatorError> {
    evolve_grid_with_multiplier(profile, spec, &EvolutionMultiplier::new(t))
}

/// Same with an explicit multiplier (fault injection for the test suite).
pub fn evolve_grid_with_multiplier(
    profile: &SpectralProfile,
    spec: &GridSpec,
    mult: &EvolutionMultiplier,
) -> Result<GridField, PropagatorError> {
    let dims = profile.dims();
    spec.validate(dims)?;
    let rank = spec.rank();

    // Nyquist: dual lattice must cover the support of v0-tilde on every axis.
    if !profile.is_zero() {
        let (_, lam_max) = profile.lambda_band();
        let rho_c = profile.transverse_halfwidth();
        for axis in 0..rank {
            let required = if axis == 0 { lam_max } else { rho_c };
            let available = std::f64::consts::PI * spec.nodes[axis] as f64 / spec.lengths[axis];
            if available <= required {
                return Err(PropagatorError::NyquistViolation {
                    axis,
                    required,
                    available,
                });
            }
        }
    }

    let freqs: Vec<Vec<f64>> = (0..rank)
        .map(|a| dual_frequencies(spec.nodes[a], spec.lengths[a]))
        .collect();
    // Per-axis phase tables e^{i k z0} shifting the origin to -L/2.
    let phases: Vec<Vec<Complex64>> = (0..rank)
        .map(|a| {
            let z0 = -0.5 * spec.lengths[a];
            freqs[a]
                .iter()
                .map(|&k| Complex64::new(0.0, k * z0).exp())
                .collect()
        })
        .collect();

    let total: usize = spec.nodes.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    let mut multi = vec![0usize; rank];
    let mut xibar = vec![0.0f64; dims.d];
    let mut etabar = vec![0.0f64; dims.n];
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rem = flat;
        for a in (0..rank).rev() {
            multi[a] = rem % spec.nodes[a];
            rem /= spec.nodes[a];
        }
        let lambda = freqs[0][multi[0]];
        if !profile.lambda_in_support(lambda) {
            continue;
        }
        for k in 0..dims.d {
            xibar[k] = freqs[1 + k][multi[1 + k]];
        }
        // The inversion pairs e^{-i ybar.etabar}: the sample sits at the
        // negated lattice frequency.
        for k in 0..dims.n {
            etabar[k] = -freqs[1 + dims.d + k][multi[1 + dims.d + k]];
        }
        let amp = profile.eval(lambda, &xibar, &etabar);
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut v = amp * mult.symbol_unchecked(lambda, &xibar, &etabar);
        for a in 0..rank {
            v *= phases[a][multi[a]];
        }
        *slot = v;
    }

    inverse_fft_all_axes(&mut data, &spec.nodes);

    let vol_scale = 0.5 * spec.lengths.iter().map(|l| 1.0 / l).product::<f64>();
    for v in data.iter_mut() {
        *v *= vol_scale;
    }

    let cell: f64 = (0..rank).map(|a| spec.spacing(a)).product();
    let l2_norm = (data.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt();

    Ok(GridField {
        values: data,
        spec: spec.clone(),
        dims,
        t: mult.t,
        l2_norm,
    })
}

fn inverse_fft_all_axes(data: &mut [Complex64], shape: &[usize]) {
    let mut planner = FftPlanner::<f64>::new();
    let rank = shape.len();
    for axis in 0..rank {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft_inverse(n);
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * n * inner + i;
                for j in 0..n {
                    scratch[j] = data[base + j * inner];
                }
                fft.process(&mut scratch);
                for j in 0..n {
                    data[base + j * inner] = scratch[j];
                }
            }
        }
    }
}

/// Max over the listed times of the relative deviation of ||v(t)|| from ||v0||.
pub fn conservation_check(
    profile: &SpectralProfile,
    spec: &GridSpec,
    times: &[f64],
) -> Result<f64, PropagatorError> {
    conservation_deviations(profile, spec, times).map(|rows| {
        rows.iter()
            .map(|&(_, _, dev)| dev)
            .fold(0.0f64, f64::max)
    })
}

/// Per-time table (t, norm, relative deviation) behind [`conservation_check`].
pub fn conservation_deviations(
    profile: &SpectralProfile,
    spec: &GridSpec,
    times: &[f64],
) -> Result<Vec<(f64, f64, f64)>, PropagatorError> {
    let base = evolve_grid(profile, spec, 0.0)?;
    let n0 = base.l2_norm;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let field = evolve_grid(profile, spec, t)?;
        let dev = if n0 == 0.0 {
            0.0
        } else {
            (field.l2_norm - n0).abs() / n0
        };
        rows.push((t, field.l2_norm, dev));
    }
    Ok(rows)
}

fn axis_shift_index(
    shape: &[usize],
    multi: &[usize],
    axis: usize,
    offset: isize,
) -> usize {
    let n = shape[axis] as isize;
    let mut idx = 0usize;
    for (a, &i) in multi.iter().enumerate() {
        let j = if a == axis {
            (((i as isize + offset) % n) + n) % n
        } else {
            i as isize
        };
        idx = idx * shape[a] + j as usize;
    }
    idx
}

/// Discrete L2 norm of (d^2_ts + Lap_x - Lap_y) v computed by centered
/// differences: the t-derivative uses the fields at t - h, t, t + h, the
/// spatial derivatives use one grid node per axis. With the grid spacings
/// tied to h the residual converges as O(h^2); the fault-injected multiplier
/// keeps it O(1), which is what makes this check discriminating.
pub fn pde_residual(
    profile: &SpectralProfile,
    spec: &GridSpec,
    t: f64,
    h: f64,
) -> Result<f64, PropagatorError> {
    pde_residual_with_fault(profile, spec, t, h, MultiplierFault::None)
}

pub fn pde_residual_with_fault(
    profile: &SpectralProfile,
    spec: &GridSpec,
    t: f64,
    h: f64,
    fault: MultiplierFault,
) -> Result<f64, PropagatorError> {
    let dims = profile.dims();
    spec.validate(dims)?;
    let minus = evolve_grid_with_multiplier(profile, spec, &EvolutionMultiplier::with_fault(t - h, fault))?;
    let center = evolve_grid_with_multiplier(profile, spec, &EvolutionMultiplier::with_fault(t, fault))?;
    let plus = evolve_grid_with_multiplier(profile, spec, &EvolutionMultiplier::with_fault(t + h, fault))?;

    let rank = spec.rank();
    let shape = &spec.nodes;
    let total: usize = shape.iter().product();
    let h_s = spec.spacing(0);
    let mut residual_sq = 0.0f64;
    let mut multi = vec![0usize; rank];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..rank).rev() {
            multi[a] = rem % shape[a];
            rem /= shape[a];
        }
        // d_t d_s: centered in t (step h) of the centered s-derivative.
        let sp = axis_shift_index(shape, &multi, 0, 1);
        let sm = axis_shift_index(shape, &multi, 0, -1);
        let ds_plus = (plus.values[sp] - plus.values[sm]) / (2.0 * h_s);
        let ds_minus = (minus.values[sp] - minus.values[sm]) / (2.0 * h_s);
        let dtds = (ds_plus - ds_minus) / (2.0 * h);

        let mut lap = Complex64::new(0.0, 0.0);
        for k in 0..dims.d {
            let axis = 1 + k;
            let ha = spec.spacing(axis);
            let p = axis_shift_index(shape, &multi, axis, 1);
            let m = axis_shift_index(shape, &multi, axis, -1);
            lap += (center.values[p] - 2.0 * center.values[flat] + center.values[m]) / (ha * ha);
        }
        for k in 0..dims.n {
            let axis = 1 + dims.d + k;
            let ha = spec.spacing(axis);
            let p = axis_shift_index(shape, &multi, axis, 1);
            let m = axis_shift_index(shape, &multi, axis, -1);
            lap -= (center.values[p] - 2.0 * center.values[flat] + center.values[m]) / (ha * ha);
        }
        residual_sq += (dtds + lap).norm_sqr();
    }
    let cell: f64 = (0..rank).map(|a| spec.spacing(a)).product();
    Ok((residual_sq * cell).sqrt())
}

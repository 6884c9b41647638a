//! Coordinates and geometry of the characteristic cone: lab vs light-cone
//! variables, transversal characteristic lines, multi-index symbols, the two
//! cone charts with their induced measure weights, and the phase function.

use num_complex::Complex64;
use thiserror::Error;

pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected} components for {what}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} is not a unit vector: |v| = {norm}")]
    NotUnit { what: &'static str, norm: f64 },
    #[error("direction pair is not transversal: theta_0 + omega_0 = {value:e}")]
    NotTransversal { value: f64 },
    #[error("line base point is off the characteristic hyperplane: X_0 + Y_0 = {value:e}")]
    OffHyperplane { value: f64 },
    #[error("invalid parameter {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error("point is off the cone: |Upsilon| = {upsilon:e} exceeds tolerance {tol:e}")]
    OffCone { upsilon: f64, tol: f64 },
}

/// Split signature of the ambient space: d spatial x-directions, n spatial
/// y-directions, N = d + n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Dims {
    pub d: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(d: usize, n: usize) -> Result<Self, GeometryError> {
        if d < 1 {
            return Err(GeometryError::InvalidParameter {
                what: "d",
                value: d as f64,
            });
        }
        if n < 1 {
            return Err(GeometryError::InvalidParameter {
                what: "n",
                value: n as f64,
            });
        }
        Ok(Dims { d, n })
    }

    pub fn big_n(&self) -> usize {
        self.d + self.n
    }

    /// Length of a multi-index: one slot per x-component and per y-component.
    pub fn beta_len(&self) -> usize {
        self.big_n() + 2
    }
}

/// Point in lab coordinates (t, s, xbar, ybar).
#[derive(Debug, Clone, PartialEq)]
pub struct LabPoint {
    pub t: f64,
    pub s: f64,
    pub xbar: Vec<f64>,
    pub ybar: Vec<f64>,
}

impl LabPoint {
    pub fn new(t: f64, s: f64, xbar: Vec<f64>, ybar: Vec<f64>, dims: Dims) -> Result<Self, GeometryError> {
        check_len("xbar", &xbar, dims.d)?;
        check_len("ybar", &ybar, dims.n)?;
        Ok(LabPoint { t, s, xbar, ybar })
    }
}

/// Point in light-cone coordinates x = (x0, xbar), y = (y0, ybar).
#[derive(Debug, Clone, PartialEq)]
pub struct LightConePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl LightConePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dims: Dims) -> Result<Self, GeometryError> {
        check_len("x", &x, dims.d + 1)?;
        check_len("y", &y, dims.n + 1)?;
        Ok(LightConePoint { x, y })
    }

    pub fn lab_time(&self) -> f64 {
        0.5 * (self.x[0] + self.y[0])
    }
}

fn check_len(what: &'static str, v: &[f64], expected: usize) -> Result<(), GeometryError> {
    if v.len() != expected {
        return Err(GeometryError::DimensionMismatch {
            what,
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// x0 = t + s, y0 = t - s; the transverse components pass through.
pub fn lab_to_lightcone(p: &LabPoint) -> LightConePoint {
    let mut x = Vec::with_capacity(p.xbar.len() + 1);
    x.push(p.t + p.s);
    x.extend_from_slice(&p.xbar);
    let mut y = Vec::with_capacity(p.ybar.len() + 1);
    y.push(p.t - p.s);
    y.extend_from_slice(&p.ybar);
    LightConePoint { x, y }
}

/// Inverse of [`lab_to_lightcone`]: t = (x0+y0)/2, s = (x0-y0)/2.
pub fn lightcone_to_lab(p: &LightConePoint) -> LabPoint {
    LabPoint {
        t: 0.5 * (p.x[0] + p.y[0]),
        s: 0.5 * (p.x[0] - p.y[0]),
        xbar: p.x[1..].to_vec(),
        ybar: p.y[1..].to_vec(),
    }
}

/// Pair of unit directions (theta, omega) with theta_0 + omega_0 != 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionPair {
    theta: Vec<f64>,
    omega: Vec<f64>,
}

impl DirectionPair {
    pub fn new(theta: Vec<f64>, omega: Vec<f64>) -> Result<Self, GeometryError> {
        let nt = norm(&theta);
        if (nt - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit {
                what: "theta",
                norm: nt,
            });
        }
        let nw = norm(&omega);
        if (nw - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit {
                what: "omega",
                norm: nw,
            });
        }
        let transversality = theta[0] + omega[0];
        if transversality.abs() < UNIT_TOL {
            return Err(GeometryError::NotTransversal {
                value: transversality,
            });
        }
        Ok(DirectionPair { theta, omega })
    }

    /// Builds the pair from sphere angles: one angle for S^1, a
    /// (polar, azimuth) pair for S^2, with the 0-th component cos(polar).
    pub fn from_angles(
        theta_angles: &[f64],
        omega_angles: &[f64],
        dims: Dims,
    ) -> Result<Self, GeometryError> {
        let theta = unit_from_angles(theta_angles, dims.d, "theta_angles")?;
        let omega = unit_from_angles(omega_angles, dims.n, "omega_angles")?;
        DirectionPair::new(theta, omega)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// The transversality scalar theta_0 + omega_0.
    pub fn transversality(&self) -> f64 {
        self.theta[0] + self.omega[0]
    }
}

pub fn unit_from_angles(
    angles: &[f64],
    sphere_dim: usize,
    what: &'static str,
) -> Result<Vec<f64>, GeometryError> {
    if angles.len() != sphere_dim {
        return Err(GeometryError::DimensionMismatch {
            what: match what {
                "theta_angles" => "theta_angles",
                _ => "omega_angles",
            },
            expected: sphere_dim,
            got: angles.len(),
        });
    }
    match sphere_dim {
        1 => Ok(vec![angles[0].cos(), angles[0].sin()]),
        2 => {
            let (polar, azimuth) = (angles[0], angles[1]);
            Ok(vec![
                polar.cos(),
                polar.sin() * azimuth.cos(),
                polar.sin() * azimuth.sin(),
            ])
        }
        m => Err(GeometryError::InvalidParameter {
            what: "sphere dimension",
            value: m as f64,
        }),
    }
}

/// Characteristic line x = X + tau*theta, y = Y + tau*omega with base point
/// on the hyperplane {x0 + y0 = 0}.
#[derive(Debug, Clone)]
pub struct CharacteristicLine {
    pub base_x: Vec<f64>,
    pub base_y: Vec<f64>,
    pub dir: DirectionPair,
    /// |X| + |Y|, recorded for reporting.
    pub base_radius: f64,
}

impl CharacteristicLine {
    pub fn new(base_x: Vec<f64>, base_y: Vec<f64>, dir: DirectionPair) -> Result<Self, GeometryError> {
        check_len("X", &base_x, dir.theta.len())?;
        check_len("Y", &base_y, dir.omega.len())?;
        let plane = base_x[0] + base_y[0];
        if plane.abs() > UNIT_TOL {
            return Err(GeometryError::OffHyperplane { value: plane });
        }
        let base_radius = norm(&base_x) + norm(&base_y);
        Ok(CharacteristicLine {
            base_x,
            base_y,
            dir,
            base_radius,
        })
    }
}

/// The point of `line` at parameter tau. Lab time works out to
/// t = tau * (theta_0 + omega_0) / 2 since X_0 + Y_0 = 0.
pub fn line_point(line: &CharacteristicLine, tau: f64) -> LightConePoint {
    let x = line
        .base_x
        .iter()
        .zip(line.dir.theta())
        .map(|(b, t)| b + tau * t)
        .collect();
    let y = line
        .base_y
        .iter()
        .zip(line.dir.omega())
        .map(|(b, o)| b + tau * o)
        .collect();
    LightConePoint { x, y }
}

/// The shift parameter p = X.theta - Y.omega entering the asymptotic
/// coefficient.
pub fn shift_parameter(line: &CharacteristicLine) -> f64 {
    dot(&line.base_x, line.dir.theta()) - dot(&line.base_y, line.dir.omega())
}

/// Multi-index beta = (beta_0..beta_d, beta_{d+1}..beta_{N+1}) ordering the
/// x-derivatives first, then the y-derivatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    beta: Vec<u32>,
    d: usize,
    n: usize,
}

impl MultiIndex {
    pub fn new(beta: Vec<u32>, dims: Dims) -> Result<Self, GeometryError> {
        if beta.len() != dims.beta_len() {
            return Err(GeometryError::DimensionMismatch {
                what: "beta",
                expected: dims.beta_len(),
                got: beta.len(),
            });
        }
        Ok(MultiIndex {
            beta,
            d: dims.d,
            n: dims.n,
        })
    }

    pub fn zero(dims: Dims) -> Self {
        MultiIndex {
            beta: vec![0; dims.beta_len()],
            d: dims.d,
            n: dims.n,
        }
    }

    pub fn order(&self) -> u32 {
        self.beta.iter().sum()
    }

    pub fn components(&self) -> &[u32] {
        &self.beta
    }

    /// Exponents on (x0, xbar_1..xbar_d).
    pub fn x_part(&self) -> &[u32] {
        &self.beta[..=self.d]
    }

    /// Exponents on (y0, ybar_1..ybar_n).
    pub fn y_part(&self) -> &[u32] {
        &self.beta[self.d + 1..]
    }
}

/// The polynomial P^beta evaluated on a direction pair:
/// (i theta_0)^{beta_0} ... (-i omega_n)^{beta_{N+1}}.
pub fn symbol_p_beta(beta: &MultiIndex, dir: &DirectionPair) -> Complex64 {
    symbol_p_beta_ambient(beta, dir.theta(), dir.omega())
}

/// P^beta on an arbitrary ambient frequency point (xi, eta); used by the cone
/// quadratures where the polynomial is evaluated on unnormalized points.
pub fn symbol_p_beta_ambient(beta: &MultiIndex, xi: &[f64], eta: &[f64]) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &b) in beta.x_part().iter().enumerate() {
        for _ in 0..b {
            acc *= i * xi[k];
        }
    }
    for (k, &b) in beta.y_part().iter().enumerate() {
        for _ in 0..b {
            acc *= -i * eta[k];
        }
    }
    acc
}

/// Which parametrization produced a [`ConeChart`] point.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartKind {
    /// (zeta, sigma, r) with |zeta| = |sigma| = 1, r > 0.
    Spherical {
        zeta: Vec<f64>,
        sigma: Vec<f64>,
        r: f64,
    },
    /// (lambda, xibar, etabar) with lambda = xi_0 + eta_0 != 0.
    Graph {
        lambda: f64,
        xibar: Vec<f64>,
        etabar: Vec<f64>,
    },
}

/// A point of the characteristic cone C = {xi^2 = eta^2} carrying its chart
/// coordinates and the induced measure weight of that chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeChart {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub chart: ChartKind,
    pub measure_weight: f64,
}

impl ConeChart {
    pub fn upsilon(&self) -> f64 {
        dot(&self.xi, &self.xi) - dot(&self.eta, &self.eta)
    }

    pub fn upsilon_zero(&self) -> f64 {
        self.xi[0] + self.eta[0]
    }

    /// On-cone radius r = |xi| = |eta| (computed symmetrically).
    pub fn radius(&self) -> f64 {
        (0.5 * (dot(&self.xi, &self.xi) + dot(&self.eta, &self.eta))).sqrt()
    }
}

/// Spherical chart (zeta, sigma, r) -> (r zeta, r sigma); the induced measure
/// is (1/2) r^{N-1} dS_zeta dS_sigma dr.
pub fn cone_from_spherical(
    zeta: &[f64],
    sigma: &[f64],
    r: f64,
    dims: Dims,
) -> Result<ConeChart, GeometryError> {
    check_len("zeta", zeta, dims.d + 1)?;
    check_len("sigma", sigma, dims.n + 1)?;
    let nz = norm(zeta);
    if (nz - 1.0).abs() > 1e-10 {
        return Err(GeometryError::NotUnit {
            what: "zeta",
            norm: nz,
        });
    }
    let ns = norm(sigma);
    if (ns - 1.0).abs() > 1e-10 {
        return Err(GeometryError::NotUnit {
            what: "sigma",
            norm: ns,
        });
    }
    if r <= 0.0 {
        return Err(GeometryError::InvalidParameter { what: "r", value: r });
    }
    let xi: Vec<f64> = zeta.iter().map(|z| r * z).collect();
    let eta: Vec<f64> = sigma.iter().map(|s| r * s).collect();
    let weight = 0.5 * r.powi(dims.big_n() as i32 - 1);
    Ok(ConeChart {
        xi,
        eta,
        chart: ChartKind::Spherical {
            zeta: zeta.to_vec(),
            sigma: sigma.to_vec(),
            r,
        },
        measure_weight: weight,
    })
}

/// Graph chart away from {xi_0 + eta_0 = 0}: given lambda != 0 and the
/// transverse frequencies, solve Upsilon = 0, Upsilon_0 = lambda for
/// (xi_0, eta_0). The induced measure weight is 1/(2|lambda|), which makes
/// both charts integrate identically over the cone (checked by the
/// dual-chart quadrature test rather than assumed).
pub fn cone_from_graph(
    lambda: f64,
    xibar: &[f64],
    etabar: &[f64],
    dims: Dims,
) -> Result<ConeChart, GeometryError> {
    check_len("xibar", xibar, dims.d)?;
    check_len("etabar", etabar, dims.n)?;
    if lambda == 0.0 {
        return Err(GeometryError::InvalidParameter {
            what: "lambda",
            value: lambda,
        });
    }
    let defect = (dot(etabar, etabar) - dot(xibar, xibar)) / lambda;
    let xi0 = 0.5 * (lambda + defect);
    let eta0 = 0.5 * (lambda - defect);
    let mut xi = Vec::with_capacity(dims.d + 1);
    xi.push(xi0);
    xi.extend_from_slice(xibar);
    let mut eta = Vec::with_capacity(dims.n + 1);
    eta.push(eta0);
    eta.extend_from_slice(etabar);
    Ok(ConeChart {
        xi,
        eta,
        chart: ChartKind::Graph {
            lambda,
            xibar: xibar.to_vec(),
            etabar: etabar.to_vec(),
        },
        measure_weight: 1.0 / (2.0 * lambda.abs()),
    })
}

/// The phase Phi(xi, eta) = theta.xi - omega.eta whose stationary rays on the
/// cone are +-r(theta, omega).
pub fn phase_phi(chart: &ConeChart, dir: &DirectionPair) -> f64 {
    dot(dir.theta(), &chart.xi) - dot(dir.omega(), &chart.eta)
}

/// Stratum labels of the cone relative to a direction pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// xi_0 + eta_0 = 0 and no transverse frequencies.
    C1,
    /// xi_0 + eta_0 = 0 with nonzero transverse frequencies.
    C0,
    /// On one of the stationary rays +-r(theta, omega).
    CStationary,
    Generic,
}

/// Classifies a cone point with tolerances scaled by the on-cone radius,
/// matching the scale invariance of the strata. Precedence C1 > C0 > C_st.
pub fn classify_cone_point(
    chart: &ConeChart,
    dir: &DirectionPair,
    tol: f64,
) -> Result<Stratum, GeometryError> {
    let r = chart.radius();
    let upsilon = chart.upsilon();
    if upsilon.abs() > 100.0 * tol * (2.0 * r * r) {
        return Err(GeometryError::OffCone {
            upsilon,
            tol: 100.0 * tol * 2.0 * r * r,
        });
    }
    let lam = chart.upsilon_zero().abs();
    let trans = norm(&chart.xi[1..]) + norm(&chart.eta[1..]);
    if lam <= tol * r {
        if trans <= tol * r {
            return Ok(Stratum::C1);
        }
        return Ok(Stratum::C0);
    }
    // Angular distance to the rays +-r(theta, omega): compare unit vectors in
    // the ambient product space, where (theta, omega) has norm sqrt(2).
    let full_norm = (dot(&chart.xi, &chart.xi) + dot(&chart.eta, &chart.eta)).sqrt();
    let ip = (dot(&chart.xi, dir.theta()) + dot(&chart.eta, dir.omega()))
        / (full_norm * std::f64::consts::SQRT_2);
    let angle = ip.clamp(-1.0, 1.0).abs().acos();
    if angle <= tol {
        return Ok(Stratum::CStationary);
    }
    Ok(Stratum::Generic)
}

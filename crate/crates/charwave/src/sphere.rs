//! Product quadrature rules on unit spheres. S^1 points are stored as an
//! angle, S^2 points as (polar, azimuth); each node carries its embedded
//! coordinates (0-th component first) and quadrature weight.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct SphereNode {
    pub angles: Vec<f64>,
    pub coords: Vec<f64>,
    pub weight: f64,
}

/// Quadrature rule over S^dim, dim in {1, 2}: composite trapezoid on the
/// circle (spectrally accurate for smooth periodic integrands),
/// Gauss-Legendre in cos(polar) times trapezoid in azimuth on S^2.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub nodes: Vec<SphereNode>,
}

impl SphereRule {
    pub fn new(dim: usize, resolution: usize, offset: f64) -> SphereRule {
        assert!(resolution >= 2);
        let mut nodes = Vec::new();
        match dim {
            1 => {
                let m = resolution;
                let h = 2.0 * std::f64::consts::PI / m as f64;
                for i in 0..m {
                    let a = offset + i as f64 * h;
                    nodes.push(SphereNode {
                        angles: vec![a],
                        coords: vec![a.cos(), a.sin()],
                        weight: h,
                    });
                }
            }
            2 => {
                let m_az = 2 * resolution;
                let h_az = 2.0 * std::f64::consts::PI / m_az as f64;
                for &(c, w) in crate::quad::gauss_legendre(resolution) {
                    let polar = c.acos();
                    let sin_p = (1.0 - c * c).max(0.0).sqrt();
                    for i in 0..m_az {
                        let az = offset + i as f64 * h_az;
                        nodes.push(SphereNode {
                            angles: vec![polar, az],
                            coords: vec![c, sin_p * az.cos(), sin_p * az.sin()],
                            weight: w * h_az,
                        });
                    }
                }
            }
            other => panic!("unsupported sphere dimension {other}"),
        }
        SphereRule { dim, nodes }
    }

    pub fn integrate<F: Fn(&[f64]) -> Complex64>(&self, f: F) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for node in &self.nodes {
            acc += node.weight * f(&node.coords);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn total_measures() {
        let s1 = SphereRule::new(1, 17, 0.0);
        let area1 = s1.integrate(|_| Complex64::new(1.0, 0.0)).re;
        assert_abs_diff_eq!(area1, 2.0 * std::f64::consts::PI, epsilon = 1e-13);

        let s2 = SphereRule::new(2, 12, 0.0);
        let area2 = s2.integrate(|_| Complex64::new(1.0, 0.0)).re;
        assert_abs_diff_eq!(area2, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn low_degree_moments_are_exact() {
        // int_{S^1} cos^2 = pi; int_{S^2} z0^2 = 4 pi / 3;
        // odd moments vanish.
        let s1 = SphereRule::new(1, 16, 0.3);
        let m2 = s1.integrate(|c| Complex64::new(c[0] * c[0], 0.0)).re;
        assert_abs_diff_eq!(m2, std::f64::consts::PI, epsilon = 1e-13);
        let m1 = s1.integrate(|c| Complex64::new(c[1], 0.0)).re;
        assert_abs_diff_eq!(m1, 0.0, epsilon = 1e-13);

        let s2 = SphereRule::new(2, 10, 0.0);
        let m2 = s2.integrate(|c| Complex64::new(c[0] * c[0], 0.0)).re;
        assert_abs_diff_eq!(m2, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-12);
        let mixed = s2.integrate(|c| Complex64::new(c[1] * c[2], 0.0)).re;
        assert_abs_diff_eq!(mixed, 0.0, epsilon = 1e-12);
    }
}

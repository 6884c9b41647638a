//! Polynomial smoothstep primitives shared by the spectral bump profiles and
//! the dyadic window. Degree-7 smoothstep: exactly 0/1 outside [0,1] and C^3
//! across the seams, which is reproducible without special functions.

/// S(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7 clamped to [0, 1].
pub fn smoothstep7(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u2 = u * u;
        let u4 = u2 * u2;
        u4 * (35.0 - 84.0 * u + u2 * (70.0 - 20.0 * u))
    }
}

/// Hat on [0, 1]: rises smoothstep-fashion on [0, 1/2], falls on [1/2, 1],
/// peak value 1 at u = 1/2. C^3 everywhere, identically 0 outside (0, 1).
pub fn smooth_hat01(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else if u <= 0.5 {
        smoothstep7(2.0 * u)
    } else {
        smoothstep7(2.0 * (1.0 - u))
    }
}

/// Even plateau cutoff: 1 for |q| <= q0, smooth descent to exactly 0 at
/// |q| >= 1.
pub fn plateau_cutoff(q: f64, q0: f64) -> f64 {
    let a = q.abs();
    if a <= q0 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        1.0 - smoothstep7((a - q0) / (1.0 - q0))
    }
}

/// The dyadic window profile phi(u): supported in (-1, 1) with
/// phi(u) + phi(u - 1) = 1 on [0, 1], built from the same smoothstep so the
/// shifted-sum identity holds to the last bit.
pub fn dyadic_phi(u: f64) -> f64 {
    if u <= -1.0 || u >= 1.0 {
        0.0
    } else if u <= 0.0 {
        smoothstep7(u + 1.0)
    } else {
        1.0 - smoothstep7(u)
    }
}

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Closed-form spectral data of a real symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oracle2x2 {
    /// Nonincreasing.
    pub eigenvalues: [f64; 2],
    /// Rotation of the eigenbasis since `t = 0`.
    pub theta: f64,
}

const UNWRAP_SAMPLES: usize = 1024;

/// Eigenvalues and eigenvector angle of `A + tΔA` for real symmetric
/// `A = [[a[0], a[1]], [a[1], a[2]]]` and `ΔA` given likewise.
///
/// The angle solves `tan 2θ = 2·A(t)₁₂ / (A(t)₂₂ − A(t)₁₁)` on the branch
/// continuous in `t` with `θ(0) = 0`.
pub fn oracle_2x2_eig(a: [f64; 3], da: [f64; 3], t: f64) -> Result<Oracle2x2> {
    if a.iter().chain(&da).chain([&t]).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("oracle inputs must be finite".into()));
    }
    let at = |s: f64| [a[0] + s * da[0], a[1] + s * da[1], a[2] + s * da[2]];
    let [p, q, r] = at(t);
    let mean = 0.5 * (p + r);
    let radius = (0.5 * (p - r)).hypot(q);
    if radius == 0.0 {
        return Err(Error::InvalidSpec(
            "eigenvector angle undefined: A(t) is a multiple of the identity".into(),
        ));
    }

    let phase = |s: f64| {
        let [p, q, r] = at(s);
        (q != 0.0 || p != r).then(|| (2.0 * q).atan2(r - p))
    };
    let start = phase(0.0).unwrap_or(0.0);
    let mut prev = start;
    let mut unwrapped = start;
    for i in 1..=UNWRAP_SAMPLES {
        let Some(mut phi) = phase(t * i as f64 / UNWRAP_SAMPLES as f64) else {
            continue;
        };
        while phi - prev > PI {
            phi -= 2.0 * PI;
        }
        while phi - prev < -PI {
            phi += 2.0 * PI;
        }
        unwrapped = phi;
        prev = phi;
    }

    Ok(Oracle2x2 {
        eigenvalues: [mean + radius, mean - radius],
        theta: 0.5 * (unwrapped - start),
    })
}

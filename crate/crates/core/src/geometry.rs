//! Hyperbolic cone-manifold volumes for the two links and the
//! hyperbolicity-domain predicates.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly;
use crate::specfun::{delta_fn, lobachevsky};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Knot {
    E,
    B,
}

impl Knot {
    pub fn name(self) -> &'static str {
        match self {
            Knot::E => "E",
            Knot::B => "B",
        }
    }
}

/// Cone angles: one for the single-component link, a sorted triple for the
/// three-component one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ConeAngles {
    E { alpha: f64 },
    B { alpha: [f64; 3] },
}

impl ConeAngles {
    pub fn e(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("cone angle {alpha} is not finite")));
        }
        Ok(ConeAngles::E { alpha })
    }

    /// Triple constructor; components are sorted ascending on entry.
    pub fn b(mut alpha: [f64; 3]) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain(format!("cone angles {alpha:?} not finite")));
        }
        alpha.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(ConeAngles::B { alpha })
    }

    pub fn knot(&self) -> Knot {
        match self {
            ConeAngles::E { .. } => Knot::E,
            ConeAngles::B { .. } => Knot::B,
        }
    }

    /// Smallest cone angle (the only one for the single-component case).
    pub fn min_angle(&self) -> f64 {
        match self {
            ConeAngles::E { alpha } => *alpha,
            ConeAngles::B { alpha } => alpha[0],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        match self {
            ConeAngles::E { alpha } => std::slice::from_ref(alpha),
            ConeAngles::B { alpha } => alpha,
        }
    }
}

/// The cone manifold is hyperbolic for alpha in [0, 2pi/3) around the
/// single component, and for all three angles in [0, pi) around the rings.
pub fn is_hyperbolic(angles: &ConeAngles) -> bool {
    match angles {
        ConeAngles::E { alpha } => (0.0..2.0 * PI / 3.0).contains(alpha),
        ConeAngles::B { alpha } => alpha.iter().all(|a| (0.0..PI).contains(a)),
    }
}

/// A volume together with the principal parameter and the additive terms
/// of the closed formula (the terms sum to the volume exactly as computed).
#[derive(Clone, Debug, Serialize)]
pub struct VolumeResult {
    pub volume: f64,
    pub principal_parameter: f64,
    pub terms: Vec<(String, f64)>,
}

/// Volume of the cone manifold along the single-component link:
/// 2 { Lambda(theta + alpha/2) + Lambda(theta - alpha/2) } with
/// theta = arccos(cos alpha - 1/2) / 2.
pub fn vol_cone_e(alpha: f64) -> Result<VolumeResult> {
    let angles = ConeAngles::e(alpha)?;
    if !is_hyperbolic(&angles) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} outside the hyperbolic range [0, 2pi/3)"
        )));
    }
    let theta = 0.5 * (alpha.cos() - 0.5).acos();
    let t1 = 2.0 * lobachevsky(theta + alpha / 2.0);
    let t2 = 2.0 * lobachevsky(theta - alpha / 2.0);
    Ok(VolumeResult {
        volume: t1 + t2,
        principal_parameter: theta,
        terms: vec![
            ("2*Lambda(theta+alpha/2)".into(), t1),
            ("2*Lambda(theta-alpha/2)".into(), t2),
        ],
    })
}

/// Positive root U = T^2 of T^4 - (N1^2+N2^2+N3^2+1) T^2 - N1^2 N2^2 N3^2,
/// the principal-parameter equation. n2 are the squared half-angle tangents.
pub(crate) fn principal_quartic_u(n2: [f64; 3]) -> f64 {
    let s = n2[0] + n2[1] + n2[2];
    let p = n2[0] * n2[1] * n2[2];
    // larger quadratic root of U^2 - (s+1) U - p; always positive
    0.5 * ((s + 1.0) + ((s + 1.0) * (s + 1.0) + 4.0 * p).sqrt())
}

/// Volume of the cone manifold along the three-component link:
/// 2 { sum_i Delta(alpha_i/2, theta) - 2 Delta(pi/2, theta) - Delta(0, theta) }
/// with tan(theta) the positive root of the principal quartic.
pub fn vol_cone_b(alpha: [f64; 3]) -> Result<VolumeResult> {
    let angles = ConeAngles::b(alpha)?;
    if !is_hyperbolic(&angles) {
        return Err(Error::Domain(format!(
            "angles {alpha:?} outside the hyperbolic box [0, pi)^3"
        )));
    }
    let sorted = match angles {
        ConeAngles::B { alpha } => alpha,
        _ => unreachable!(),
    };
    let n2 = [
        (sorted[0] / 2.0).tan().powi(2),
        (sorted[1] / 2.0).tan().powi(2),
        (sorted[2] / 2.0).tan().powi(2),
    ];
    let u = principal_quartic_u(n2);
    let s = n2[0] + n2[1] + n2[2];
    let p = n2[0] * n2[1] * n2[2];
    let u = poly::polish_root(&[-p, -(s + 1.0), 1.0], u, 2);
    let theta = u.sqrt().atan();

    let mut terms: Vec<(String, f64)> = Vec::with_capacity(5);
    for (i, a) in sorted.iter().enumerate() {
        terms.push((
            format!("2*Delta(alpha{}/2,theta)", i + 1),
            2.0 * delta_fn(a / 2.0, theta),
        ));
    }
    terms.push((
        "-4*Delta(pi/2,theta)".into(),
        -4.0 * delta_fn(FRAC_PI_2, theta),
    ));
    terms.push(("-2*Delta(0,theta)".into(), -2.0 * delta_fn(0.0, theta)));
    let volume = terms.iter().map(|(_, v)| v).sum();
    Ok(VolumeResult {
        volume,
        principal_parameter: theta,
        terms,
    })
}

/// Volume for either knot from a [`ConeAngles`] value.
pub fn vol_cone(angles: &ConeAngles) -> Result<VolumeResult> {
    match angles {
        ConeAngles::E { alpha } => vol_cone_e(*alpha),
        ConeAngles::B { alpha } => vol_cone_b(*alpha),
    }
}

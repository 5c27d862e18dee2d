//! Potential functions of the two colored Jones sums on the complex plane,
//! their finite-level counterparts built from the quantum dilogarithm,
//! the real-axis imaginary parts in closed Lobachevsky form, branch-cut
//! geometry, and the critical points of Im on the real axis.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{is_hyperbolic, principal_quartic_u, ConeAngles, Knot};
use crate::poly;
use crate::specfun::{delta_fn, dilog, lobachevsky, quantum_dilog};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which potential to evaluate; wraps validated hyperbolic cone angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialSpec {
    angles: ConeAngles,
}

impl PotentialSpec {
    pub fn new(angles: ConeAngles) -> Result<Self> {
        if !is_hyperbolic(&angles) {
            return Err(Error::Domain(format!(
                "cone angles {:?} outside the hyperbolic domain",
                angles.as_slice()
            )));
        }
        Ok(PotentialSpec { angles })
    }

    pub fn e(alpha: f64) -> Result<Self> {
        Self::new(ConeAngles::e(alpha)?)
    }

    pub fn b(alpha: [f64; 3]) -> Result<Self> {
        Self::new(ConeAngles::b(alpha)?)
    }

    pub fn angles(&self) -> &ConeAngles {
        &self.angles
    }

    pub fn knot(&self) -> Knot {
        self.angles.knot()
    }
}

// ---------------------------------------------------------------------------
// Branch cuts
// ---------------------------------------------------------------------------

/// A vertical half-line cut anchored on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchCut {
    pub anchor: f64,
    /// true: the cut fills v >= 0; false: it fills v <= 0.
    pub upward: bool,
}

/// All cut anchors of the potential whose anchor lies in [u_min, u_max].
///
/// Each dilogarithm argument e^{2i(a +- z)} or e^{2i m z} crosses the cut
/// [1, oo) on a family of vertical half-lines; the direction depends on the
/// sign in front of z.
pub fn branch_cuts(spec: &PotentialSpec, u_min: f64, u_max: f64) -> Vec<BranchCut> {
    let mut cuts = Vec::new();
    let mut push_family = |offset: f64, period: f64, upward: bool| {
        let n_lo = ((u_min - offset) / period).floor() as i64 - 1;
        let n_hi = ((u_max - offset) / period).ceil() as i64 + 1;
        for n in n_lo..=n_hi {
            let anchor = offset + period * n as f64;
            if anchor >= u_min - 1e-12 && anchor <= u_max + 1e-12 {
                cuts.push(BranchCut { anchor, upward });
            }
        }
    };
    match spec.angles {
        ConeAngles::E { alpha } => {
            push_family(-alpha / 2.0, PI, false);
            push_family(alpha / 2.0, PI, true);
        }
        ConeAngles::B { alpha } => {
            for a in alpha {
                push_family(-a / 2.0, PI, false);
                push_family(a / 2.0, PI, true);
            }
            // e^{2iz} and e^{4iz} terms: anchors at every half multiple of pi
            push_family(0.0, FRAC_PI_2, false);
        }
    }
    cuts.sort_by(|a, b| a.anchor.partial_cmp(&b.anchor).unwrap());
    cuts.dedup_by(|a, b| (a.anchor - b.anchor).abs() < 1e-14 && a.upward == b.upward);
    cuts
}

/// Horizontal proximity test against the cut half-lines through z.
pub fn near_branch_cut(spec: &PotentialSpec, z: Complex64, tol: f64) -> bool {
    let cuts = branch_cuts(spec, z.re - tol - 1.0, z.re + tol + 1.0);
    cuts.iter().any(|cut| {
        let side_hit = if cut.upward { z.im >= 0.0 } else { z.im <= 0.0 };
        side_hit && (z.re - cut.anchor).abs() < tol
    })
}

// ---------------------------------------------------------------------------
// The potentials
// ---------------------------------------------------------------------------

/// Potential function at a complex point, principal branches throughout.
/// Errors within 1e-12 horizontal distance of a branch cut.
pub fn phi(spec: &PotentialSpec, z: Complex64) -> Result<Complex64> {
    if near_branch_cut(spec, z, 1e-12) {
        return Err(Error::BranchCut(format!(
            "z = {z} within 1e-12 of a vertical branch cut"
        )));
    }
    phi_unchecked(spec, z)
}

pub(crate) fn phi_unchecked(spec: &PotentialSpec, z: Complex64) -> Result<Complex64> {
    let li = |w: Complex64| dilog(w);
    match spec.angles {
        ConeAngles::E { alpha } => {
            let half = alpha / 2.0;
            let w_plus = (2.0 * I * (half + z)).exp();
            let w_minus = (2.0 * I * (half - z)).exp();
            Ok(-0.5 * li(w_plus)? + 0.5 * li(w_minus)? + alpha * z)
        }
        ConeAngles::B { alpha } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in alpha {
                let half = a / 2.0;
                let w_plus = (2.0 * I * (half + z)).exp();
                let w_minus = (2.0 * I * (half - z)).exp();
                acc += -0.5 * li(w_plus)? + 0.5 * li(w_minus)?;
            }
            acc += -li((2.0 * I * z).exp())? + li((4.0 * I * z).exp())?;
            let sum: f64 = alpha.iter().sum();
            acc += (sum + 5.0 * PI) * z - 3.0 * z * z;
            Ok(acc)
        }
    }
}

/// Im of the potential on the real axis, in closed Lobachevsky form.
/// Entire in x; no branch-cut restrictions apply.
pub fn im_phi_real(spec: &PotentialSpec, x: f64) -> f64 {
    match spec.angles {
        ConeAngles::E { alpha } => -(lobachevsky(x + alpha / 2.0) + lobachevsky(x - alpha / 2.0)),
        ConeAngles::B { alpha } => {
            let mut acc = 0.0;
            for a in alpha {
                acc -= delta_fn(a / 2.0, x);
            }
            acc + 2.0 * delta_fn(FRAC_PI_2, x) + delta_fn(0.0, x)
        }
    }
}

/// Finite-level potential built from the quantum dilogarithm; converges to
/// [`phi`] as the level grows. All shifted arguments must stay inside the
/// quantum-dilogarithm strip.
pub fn phi_finite_r(spec: &PotentialSpec, r: u32, z: Complex64) -> Result<Complex64> {
    let rf = r as f64;
    let factor = 2.0 * PI * I / rf;
    match spec.angles {
        ConeAngles::E { alpha } => {
            let half = Complex64::new(alpha / 2.0, 0.0);
            let val = -factor * quantum_dilog(r, half + z)?
                + factor * quantum_dilog(r, half - z)?
                + alpha * z;
            Ok(val)
        }
        ConeAngles::B { alpha } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in alpha {
                let half = Complex64::new(a / 2.0, 0.0);
                acc += -factor * quantum_dilog(r, half + z)? + factor * quantum_dilog(r, half - z)?;
            }
            acc += -2.0 * factor * quantum_dilog(r, z)? + 2.0 * factor * quantum_dilog(r, 2.0 * z)?;
            let sum: f64 = alpha.iter().sum();
            acc += (sum + 5.0 * PI) * z - 3.0 * z * z;
            Ok(acc)
        }
    }
}

// ---------------------------------------------------------------------------
// Critical points
// ---------------------------------------------------------------------------

/// A low-degree polynomial in T together with its real roots and the root
/// selected by the bracketing rule.
#[derive(Clone, Debug, Serialize)]
pub struct PolynomialRoots {
    /// Ascending coefficients of the polynomial in T.
    pub coeffs: Vec<f64>,
    /// All real roots with multiplicity, ascending.
    pub real_roots: Vec<f64>,
    pub selected: f64,
}

impl PolynomialRoots {
    fn check_residual(&self) -> Result<()> {
        let (p, _) = poly::eval_with_derivative(&self.coeffs, self.selected);
        let scale = poly::residual_scale(&self.coeffs, self.selected);
        if p.abs() > 1e-12 * scale {
            return Err(Error::RootNotFound(format!(
                "residual {:.3e} above 1e-12 * scale {:.3e} at T = {}",
                p.abs(),
                scale,
                self.selected
            )));
        }
        Ok(())
    }
}

/// Extremal abscissae of Im(Phi) on (0, pi).
#[derive(Clone, Debug, Serialize)]
pub enum CriticalPointSet {
    E {
        /// Interior minimum arccos(cos alpha - 1/2)/2.
        theta_min: f64,
        /// Maximum pi - theta_min whose value is half the cone volume.
        x0: f64,
        /// Secondary low maximum, present for alpha above pi/3.
        theta_max_low: Option<f64>,
    },
    B {
        /// arctan of the sextic root: the low maximum.
        t_b: f64,
        /// arctan of the quartic root: the interior minimum.
        t_a: f64,
        /// pi - arctan T_A: the maximum carrying the volume.
        x0: f64,
        quartic: PolynomialRoots,
        sextic: PolynomialRoots,
    },
}

impl CriticalPointSet {
    /// The abscissa where Im(Phi) attains the volume-carrying maximum.
    pub fn x0(&self) -> f64 {
        match self {
            CriticalPointSet::E { x0, .. } => *x0,
            CriticalPointSet::B { x0, .. } => *x0,
        }
    }
}

pub fn critical_points(spec: &PotentialSpec) -> Result<CriticalPointSet> {
    match spec.angles {
        ConeAngles::E { alpha } => {
            let theta_min = 0.5 * (alpha.cos() - 0.5).acos();
            let theta_max_low = if alpha > PI / 3.0 {
                Some(0.5 * (alpha.cos() + 0.5).acos())
            } else {
                None
            };
            Ok(CriticalPointSet::E {
                theta_min,
                x0: PI - theta_min,
                theta_max_low,
            })
        }
        ConeAngles::B { alpha } => critical_points_b(alpha),
    }
}

fn critical_points_b(alpha: [f64; 3]) -> Result<CriticalPointSet> {
    let n = [
        (alpha[0] / 2.0).tan(),
        (alpha[1] / 2.0).tan(),
        (alpha[2] / 2.0).tan(),
    ];
    let n2 = [n[0] * n[0], n[1] * n[1], n[2] * n[2]];
    let s = n2[0] + n2[1] + n2[2];
    let p = n2[0] * n2[1] * n2[2];
    let q = n2[0] * n2[1] + n2[1] * n2[2] + n2[2] * n2[0];

    // T^4 - (s+1) T^2 - p: the unique positive root.
    let quartic_coeffs = vec![-p, 0.0, -(s + 1.0), 0.0, 1.0];
    let u_a = principal_quartic_u(n2);
    let t_a = poly::polish_root(&quartic_coeffs, u_a.sqrt(), 2);
    let mut quartic_real = Vec::new();
    for u in poly::quadratic_real_roots(-(s + 1.0), -p) {
        if u > 0.0 {
            quartic_real.push(-u.sqrt());
            quartic_real.push(u.sqrt());
        } else if u == 0.0 {
            quartic_real.push(0.0);
        }
    }
    quartic_real.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quartic = PolynomialRoots {
        coeffs: quartic_coeffs,
        real_roots: quartic_real,
        selected: t_a,
    };
    quartic.check_residual()?;

    // T^6 - s T^4 + (p + 2q + s + 1) T^2 - p: positive root below tan(alpha1/2).
    let sextic_coeffs = vec![-p, 0.0, p + 2.0 * q + s + 1.0, 0.0, -s, 0.0, 1.0];
    let cubic_roots = poly::cubic_real_roots(-s, p + 2.0 * q + s + 1.0, -p);
    let mut sextic_real = Vec::new();
    for &u in &cubic_roots {
        if u > 0.0 {
            sextic_real.push(-u.sqrt());
            sextic_real.push(u.sqrt());
        } else if u == 0.0 {
            sextic_real.push(0.0);
        }
    }
    sextic_real.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let t_b = if n[0] == 0.0 {
        // degenerate: the smallest angle vanishes and the low maximum sits at 0
        0.0
    } else {
        let window_hi = n[0] * (1.0 + 1e-9);
        let mut candidates: Vec<f64> = sextic_real
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t < window_hi)
            .collect();
        candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        match candidates.len() {
            1 => poly::polish_root(&sextic_coeffs, candidates[0], 2),
            0 => {
                return Err(Error::RootNotFound(format!(
                    "no positive sextic root in (0, tan(alpha1/2) = {}); roots: {:?}",
                    n[0], sextic_real
                )))
            }
            _ => {
                return Err(Error::RootNotFound(format!(
                    "multiple sextic roots in (0, {}): {:?}",
                    n[0], candidates
                )))
            }
        }
    };
    let sextic = PolynomialRoots {
        coeffs: sextic_coeffs,
        real_roots: sextic_real,
        selected: t_b,
    };
    sextic.check_residual()?;

    let t_a_angle = t_a.atan();
    let t_b_angle = t_b.atan();
    let x0 = PI - t_a_angle;

    // ordering chain of the extremal abscissae, with equality only at
    // degenerate zero angles
    let eps = 1e-9;
    assert!(t_b_angle >= -eps && t_b_angle <= alpha[0] / 2.0 + eps);
    assert!(alpha[2] / 2.0 <= t_a_angle + eps);
    assert!(t_a_angle < FRAC_PI_2);
    assert!(x0 > FRAC_PI_2 && x0 <= PI - alpha[2] / 2.0 + eps);

    Ok(CriticalPointSet::B {
        t_b: t_b_angle,
        t_a: t_a_angle,
        x0,
        quartic,
        sextic,
    })
}

/// Central finite difference of Im(Phi) on the real axis; near zero at the
/// reported critical points.
pub fn stationary_residual(spec: &PotentialSpec, x: f64) -> f64 {
    let h = 1e-6;
    (im_phi_real(spec, x + h) - im_phi_real(spec, x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phi_vanishes_at_origin() {
        for alpha in [0.0, 0.5, 1.5] {
            let spec = PotentialSpec::e(alpha).unwrap();
            let v = phi(&spec, Complex64::new(0.0, 0.0));
            if alpha == 0.0 {
                // origin sits on the downward cut anchored at -alpha/2 = 0
                assert!(v.is_err());
            } else {
                assert!(v.unwrap().norm() < 1e-14);
            }
        }
        // three-component potential: approach the origin along the real axis
        let spec = PotentialSpec::b([0.0, 0.0, 0.0]).unwrap();
        let v = phi(&spec, Complex64::new(1e-3, 0.0)).unwrap();
        assert!(v.norm() < 1e-1, "|phi| = {}", v.norm());
        let v = phi(&spec, Complex64::new(1e-5, 0.0)).unwrap();
        assert!(v.norm() < 1e-3);
    }

    #[test]
    fn phi_real_axis_is_imaginary_at_zero_angle() {
        let spec = PotentialSpec::e(0.0).unwrap();
        for &x in &[0.3, 0.9, 2.0] {
            let v = phi(&spec, Complex64::new(x, 0.0)).unwrap();
            assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, -2.0 * lobachevsky(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_complex_evaluation() {
        let specs = [
            PotentialSpec::e(0.9).unwrap(),
            PotentialSpec::b([0.7, 1.3, 2.2]).unwrap(),
        ];
        for spec in &specs {
            let mut checked = 0;
            for i in 0..1000 {
                let x = -3.0 + 6.0 * (i as f64) / 999.0;
                if near_branch_cut(spec, Complex64::new(x, 0.0), 1e-3) {
                    continue;
                }
                let full = phi(spec, Complex64::new(x, 0.0)).unwrap().im;
                assert_abs_diff_eq!(full, im_phi_real(spec, x), epsilon = 1e-10);
                checked += 1;
            }
            assert!(checked > 900);
        }
    }

    #[test]
    fn im_phi_is_odd() {
        let spec = PotentialSpec::b([0.5, 1.0, 1.5]).unwrap();
        for i in 0..200 {
            let x = -3.0 + 6.0 * (i as f64) / 199.0;
            assert_abs_diff_eq!(
                im_phi_real(&spec, -x),
                -im_phi_real(&spec, x),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn im_phi_anchor_values() {
        let e0 = PotentialSpec::e(0.0).unwrap();
        assert_abs_diff_eq!(im_phi_real(&e0, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            im_phi_real(&e0, 5.0 * PI / 6.0),
            1.0149416064,
            epsilon = 1e-9
        );
        let b0 = PotentialSpec::b([0.0; 3]).unwrap();
        assert_abs_diff_eq!(
            im_phi_real(&b0, 3.0 * PI / 4.0),
            3.6638623767,
            epsilon = 1e-9
        );
    }

    #[test]
    fn critical_points_e() {
        let spec = PotentialSpec::e(0.0).unwrap();
        match critical_points(&spec).unwrap() {
            CriticalPointSet::E {
                theta_min,
                x0,
                theta_max_low,
            } => {
                assert_abs_diff_eq!(theta_min, PI / 6.0, epsilon = 1e-14);
                assert_abs_diff_eq!(x0, 5.0 * PI / 6.0, epsilon = 1e-14);
                assert!(theta_max_low.is_none());
            }
            _ => unreachable!(),
        }
        let spec = PotentialSpec::e(1.5).unwrap();
        match critical_points(&spec).unwrap() {
            CriticalPointSet::E { theta_max_low, .. } => assert!(theta_max_low.is_some()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn critical_points_b_anchors() {
        let spec = PotentialSpec::b([0.0; 3]).unwrap();
        match critical_points(&spec).unwrap() {
            CriticalPointSet::B { t_a, x0, t_b, .. } => {
                assert_abs_diff_eq!(t_a, PI / 4.0, epsilon = 1e-12);
                assert_abs_diff_eq!(x0, 3.0 * PI / 4.0, epsilon = 1e-12);
                assert_eq!(t_b, 0.0);
            }
            _ => unreachable!(),
        }
        let spec = PotentialSpec::b([FRAC_PI_2; 3]).unwrap();
        match critical_points(&spec).unwrap() {
            CriticalPointSet::B { t_a, .. } => {
                assert_abs_diff_eq!(t_a.tan(), 2.0581710, epsilon = 1e-6);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn ordering_chain_on_random_triples() {
        // multiplicative congruential sampling keeps the test deterministic
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut rnd = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let a = [
                1e-3 + rnd() * (PI - 2e-3),
                1e-3 + rnd() * (PI - 2e-3),
                1e-3 + rnd() * (PI - 2e-3),
            ];
            let spec = PotentialSpec::b(a).unwrap();
            let sorted = match spec.angles() {
                ConeAngles::B { alpha } => *alpha,
                _ => unreachable!(),
            };
            match critical_points(&spec).unwrap() {
                CriticalPointSet::B { t_b, t_a, x0, .. } => {
                    assert!(0.0 < t_b && t_b < sorted[0] / 2.0);
                    assert!(sorted[2] / 2.0 < t_a && t_a < FRAC_PI_2);
                    assert!(FRAC_PI_2 < x0 && x0 < PI - sorted[2] / 2.0);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn stationary_residual_detects_extrema() {
        let e0 = PotentialSpec::e(0.0).unwrap();
        assert!(stationary_residual(&e0, 5.0 * PI / 6.0).abs() <= 1e-6);
        assert!(stationary_residual(&e0, FRAC_PI_2).abs() > 0.5);
        let b0 = PotentialSpec::b([0.0; 3]).unwrap();
        assert!(stationary_residual(&b0, 3.0 * PI / 4.0).abs() <= 1e-6);
    }

    #[test]
    fn maximality_of_x0() {
        for spec in [
            PotentialSpec::e(0.4).unwrap(),
            PotentialSpec::e(1.2).unwrap(),
            PotentialSpec::b([0.5, 0.9, 1.7]).unwrap(),
        ] {
            let x0 = critical_points(&spec).unwrap().x0();
            let peak = im_phi_real(&spec, x0);
            for delta in [1e-3, 1e-2] {
                assert!(peak >= im_phi_real(&spec, x0 + delta));
                assert!(peak >= im_phi_real(&spec, x0 - delta));
            }
        }
    }

    #[test]
    fn finite_r_potential_converges() {
        // z must keep alpha/2 - z inside the quantum-dilogarithm strip
        let spec = PotentialSpec::e(0.5).unwrap();
        let z = Complex64::new(0.2, 0.0);
        let target = phi(&spec, z).unwrap();
        let mut last = f64::INFINITY;
        for &r in &[101u32, 301, 1001] {
            let err = (phi_finite_r(&spec, r, z).unwrap() - target).norm();
            assert!(err < last, "error not shrinking at r = {r}");
            last = err;
        }
        assert!(last <= 5e-3);
        // antisymmetric combination vanishes identically at z = 0
        let at_zero = phi_finite_r(&spec, 101, Complex64::new(0.0, 0.0)).unwrap();
        assert!(at_zero.norm() < 1e-12);
        // a shifted argument left of the strip is a domain error
        assert!(matches!(
            phi_finite_r(&spec, 101, Complex64::new(0.3, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn finite_r_sup_error_halves_with_level() {
        // sup over a fixed complex grid shrinks when the level doubles
        let spec = PotentialSpec::e(0.9).unwrap();
        let grid: Vec<Complex64> = (0..10)
            .flat_map(|i| {
                (0..10).map(move |j| {
                    Complex64::new(0.02 + 0.40 * i as f64 / 9.0, -0.15 + 0.30 * j as f64 / 9.0)
                })
            })
            .collect();
        let sup_err = |r: u32| -> f64 {
            grid.iter()
                .map(|&z| (phi_finite_r(&spec, r, z).unwrap() - phi(&spec, z).unwrap()).norm())
                .fold(0.0, f64::max)
        };
        let coarse = sup_err(501);
        let fine = sup_err(1001);
        assert!(fine < coarse, "sup error: {coarse} -> {fine}");
    }

    #[test]
    fn branch_cut_proximity_rejected() {
        let spec = PotentialSpec::e(1.0).unwrap();
        // downward cut anchored at -1/2 + pi
        let anchor = -0.5 + PI;
        assert!(phi(&spec, Complex64::new(anchor, -0.4)).is_err());
        assert!(phi(&spec, Complex64::new(anchor, 0.4)).is_ok());
        // upward cut anchored at +1/2
        assert!(phi(&spec, Complex64::new(0.5, 0.4)).is_err());
        assert!(phi(&spec, Complex64::new(0.5, -0.4)).is_ok());
    }

    #[test]
    fn cut_anchors_enumerated() {
        let spec = PotentialSpec::b([0.6, 1.0, 1.4]).unwrap();
        let cuts = branch_cuts(&spec, -0.1, 1.7);
        // expect upward anchors at alpha_i/2 = 0.3, 0.5, 0.7 and downward at
        // 0, pi/2 in this window
        assert!(cuts
            .iter()
            .any(|c| (c.anchor - 0.3).abs() < 1e-12 && c.upward));
        assert!(cuts
            .iter()
            .any(|c| (c.anchor - 0.5).abs() < 1e-12 && c.upward));
        assert!(cuts.iter().any(|c| c.anchor == 0.0 && !c.upward));
        assert!(cuts
            .iter()
            .any(|c| (c.anchor - FRAC_PI_2).abs() < 1e-12 && !c.upward));
    }
}

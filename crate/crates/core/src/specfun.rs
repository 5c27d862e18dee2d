//! Scalar special functions: the Lobachevsky function and its Delta
//! combination, the principal-branch complex dilogarithm, and the level-r
//! quantum dilogarithm defined by a contour integral.
//!
//! Everything here is pure and re-entrant; the only shared state is a
//! lazily built coefficient table.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const PI2_OVER_6: f64 = PI * PI / 6.0;

/// zeta(2n) / (n (2n+1)) for n = 1..=40, the Clausen series coefficients.
///
/// Closed forms are used through zeta(8); beyond that a direct sum over
/// k = 1..=200 is already exact to double precision.
fn clausen_coeffs() -> &'static [f64; 40] {
    static TABLE: OnceLock<[f64; 40]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0_f64; 40];
        for n in 1..=40usize {
            let zeta = match n {
                1 => PI * PI / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                _ => (1..=200u32)
                    .rev()
                    .map(|k| (k as f64).powi(-2 * n as i32))
                    .sum(),
            };
            t[n - 1] = zeta / (n as f64 * (2 * n + 1) as f64);
        }
        t
    })
}

/// Clausen function Cl2 for |x| <= pi.
///
/// Cl2(x) = x(1 - ln|x|) + x * sum_n zeta(2n)/(n(2n+1)) (x/2pi)^(2n).
/// The log term absorbs the endpoint singularity of the defining integral,
/// so the series converges geometrically (ratio <= 1/4 on the reduced range).
fn clausen2_reduced(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    debug_assert!(x.abs() <= PI + 1e-9);
    let r2 = (x / (2.0 * PI)) * (x / (2.0 * PI));
    let mut acc = 0.0;
    let mut p = 1.0;
    for &c in clausen_coeffs() {
        p *= r2;
        let term = c * p;
        acc += term;
        if term.abs() < 1e-18 * (1.0 + acc.abs()) {
            break;
        }
    }
    x * (1.0 - x.abs().ln() + acc)
}

/// Lobachevsky function, extended to all reals as odd and pi-periodic.
///
/// The maximum of |Lambda| over the line is Lambda(pi/6) = 0.50747...
pub fn lobachevsky(theta: f64) -> f64 {
    let t = theta - PI * (theta / PI).round();
    0.5 * clausen2_reduced(2.0 * t)
}

/// Delta(a, b) = Lambda(a + b) - Lambda(a - b).
pub fn delta_fn(a: f64, b: f64) -> f64 {
    lobachevsky(a + b) - lobachevsky(a - b)
}

/// Im(Li2(e^{2 i x})) via the identity Im Li2(e^{2ix}) = 2 Lambda(x).
pub fn im_dilog_unit_circle(x: f64) -> f64 {
    2.0 * lobachevsky(x)
}

// ---------------------------------------------------------------------------
// Complex dilogarithm
// ---------------------------------------------------------------------------

/// B_{2m} for m = 1..=15, used in the expansion of Li2 in u = -ln(1-w).
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Principal-branch dilogarithm, cut along [1, oo), continuous from below
/// on the cut. The endpoint w = 1 is admitted with value pi^2/6.
pub fn dilog(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re > 1.0 {
        return Err(Error::CutPoint(format!(
            "Li2 requested at {} + 0i on the open cut (1, oo)",
            w.re
        )));
    }
    Ok(dilog_inner(w))
}

fn dilog_inner(w: Complex64) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    if w == Complex64::new(1.0, 0.0) {
        return Complex64::new(PI2_OVER_6, 0.0);
    }
    let n = w.norm();
    if n <= 0.5 {
        return dilog_series(w);
    }
    if n > 1.0 {
        // Li2(w) = -Li2(1/w) - pi^2/6 - ln(-w)^2 / 2
        let l = (-w).ln();
        return -dilog_inner(w.inv()) - PI2_OVER_6 - 0.5 * l * l;
    }
    if w.re > 0.5 {
        // Li2(w) = -Li2(1-w) + pi^2/6 - ln(w) ln(1-w)
        let one_m = Complex64::new(1.0, 0.0) - w;
        return -dilog_inner(one_m) + PI2_OVER_6 - w.ln() * one_m.ln();
    }
    dilog_bernoulli(w)
}

/// Direct power series, |w| <= 1/2.
fn dilog_series(w: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut wp = Complex64::new(1.0, 0.0);
    for k in 1..=120u32 {
        wp *= w;
        let term = wp / (k as f64 * k as f64);
        sum += term;
        if term.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

/// Expansion in u = -ln(1 - w), valid on the remaining wedge
/// |w| <= 1, Re(w) <= 1/2 where |u| stays below 1.3.
fn dilog_bernoulli(w: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - w).ln();
    let u2 = u * u;
    let mut res = u - u2 * 0.25;
    let mut up = u;
    let mut fact = 6.0; // (2m+1)! at m = 1
    for (i, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = i + 1;
        up *= u2;
        if m > 1 {
            fact *= (2 * m * (2 * m + 1)) as f64;
        }
        let term = up * (b / fact);
        res += term;
        if term.norm() < 1e-18 * (1.0 + res.norm()) {
            break;
        }
    }
    res
}

// ---------------------------------------------------------------------------
// Quantum dilogarithm
// ---------------------------------------------------------------------------

/// Tunables for the contour quadrature behind [`quantum_dilog`].
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    /// Absolute tolerance for the whole contour integral.
    pub abs_tol: f64,
    /// Radius of the semicircle detour over the pole at the origin.
    pub semicircle_radius: f64,
    /// Tail truncation threshold for the integrand magnitude.
    pub tail_eps: f64,
    /// Maximum bisection depth of the adaptive scheme.
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-11,
            semicircle_radius: 0.5,
            tail_eps: 1e-18,
            max_depth: 48,
        }
    }
}

/// Level-r quantum dilogarithm with default quadrature settings.
///
/// Defined for odd r >= 3 on the strip -pi/r < Re(z) < pi + pi/r by the
/// integral of e^{(2z-pi)x} / (4x sinh(pi x) sinh(2 pi x / r)) along the
/// real line with an upper semicircle detour around the origin.
pub fn quantum_dilog(r: u32, z: Complex64) -> Result<Complex64> {
    quantum_dilog_with(r, z, &QuadConfig::default())
}

pub fn quantum_dilog_with(r: u32, z: Complex64, cfg: &QuadConfig) -> Result<Complex64> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::Domain(format!("level r = {r} must be odd and >= 3")));
    }
    if !(cfg.semicircle_radius > 0.0 && cfg.semicircle_radius < 1.0) {
        return Err(Error::Domain(format!(
            "semicircle radius {} must lie in (0, 1)",
            cfg.semicircle_radius
        )));
    }
    let rf = r as f64;
    let lo = -PI / rf;
    let hi = PI + PI / rf;
    if !(z.re > lo && z.re < hi) {
        return Err(Error::Domain(format!(
            "Re(z) = {} outside the strip ({lo}, {hi}) at r = {r}",
            z.re
        )));
    }

    let c = cfg.semicircle_radius;
    // Exponential decay rates of the integrand toward +oo and -oo.
    let lam_p = 2.0 * PI + 2.0 * PI / rf - 2.0 * z.re;
    let lam_m = 2.0 * z.re + 2.0 * PI / rf;
    let xp = tail_cutoff(lam_p, cfg.tail_eps).max(c + 1.0);
    let xm = tail_cutoff(lam_m, cfg.tail_eps).max(c + 1.0);

    let f = |x: f64| qd_integrand_real(rf, z, x);
    let left = adaptive_gk(&f, -xm, -c, cfg.abs_tol * 0.4, cfg.max_depth)?;
    let right = adaptive_gk(&f, c, xp, cfg.abs_tol * 0.4, cfg.max_depth)?;
    // Semicircle from -c to +c through the upper half plane.
    let g = |theta: f64| {
        let x = Complex64::from_polar(c, theta);
        qd_integrand_complex(rf, z, x) * Complex64::new(0.0, 1.0) * x
    };
    let semi = -adaptive_gk(&g, 0.0, PI, cfg.abs_tol * 0.2, cfg.max_depth)?;
    Ok(left + semi + right)
}

fn tail_cutoff(lam: f64, eps: f64) -> f64 {
    ((1.0 / (eps * lam)).ln() / lam).max(4.0)
}

/// Integrand on the real axis, with the exponentials factored so that
/// nothing overflows on long tails.
fn qd_integrand_real(rf: f64, z: Complex64, x: f64) -> Complex64 {
    if x.abs() < 3.0 {
        let num = ((2.0 * z - Complex64::new(PI, 0.0)) * x).exp();
        let den = 4.0 * x * (PI * x).sinh() * (2.0 * PI * x / rf).sinh();
        return num / den;
    }
    if x > 0.0 {
        let num = ((2.0 * z - Complex64::new(2.0 * PI + 2.0 * PI / rf, 0.0)) * x).exp();
        let den = x * (1.0 - (-2.0 * PI * x).exp()) * (1.0 - (-4.0 * PI * x / rf).exp());
        num / den
    } else {
        let num = ((2.0 * z + Complex64::new(2.0 * PI / rf, 0.0)) * x).exp();
        let den = x * (1.0 - (2.0 * PI * x).exp()) * (1.0 - (4.0 * PI * x / rf).exp());
        num / den
    }
}

fn qd_integrand_complex(rf: f64, z: Complex64, x: Complex64) -> Complex64 {
    let num = ((2.0 * z - Complex64::new(PI, 0.0)) * x).exp();
    let den = 4.0 * x * (PI * x).sinh() * (2.0 * PI * x / rf).sinh();
    num / den
}

/// The finite q-Pochhammer value predicted by the quantum dilogarithm,
/// exp(phi_r(pi/r) - phi_r((2n+1) pi/r)), equal to
/// prod_{m=1..n} (1 - s^{2m}) with s = e^{2 pi i / r}.
///
/// For n > (r-1)/2 the argument leaves the strip of the defining integral;
/// the value is continued along the real axis with the shift relation
/// phi_r(w + pi/r) - phi_r(w - pi/r) = -ln(1 - e^{2iw}).
pub fn qd_pochhammer(r: u32, n: u32) -> Result<Complex64> {
    qd_pochhammer_with(r, n, &QuadConfig::default())
}

pub fn qd_pochhammer_with(r: u32, n: u32, cfg: &QuadConfig) -> Result<Complex64> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::Domain(format!("level r = {r} must be odd and >= 3")));
    }
    if n >= r {
        return Err(Error::Range(format!("n = {n} must be below r = {r}")));
    }
    let rf = r as f64;
    let m = n.min((r - 1) / 2);
    let at = |k: u32| Complex64::new((2 * k + 1) as f64 * PI / rf, 0.0);
    let diff = quantum_dilog_with(r, at(0), cfg)? - quantum_dilog_with(r, at(m), cfg)?;
    let mut val = diff.exp();
    for k in (m + 1)..=n {
        let s2k = Complex64::from_polar(1.0, 4.0 * PI * k as f64 / rf);
        val *= Complex64::new(1.0, 0.0) - s2k;
    }
    Ok(val)
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature for complex-valued integrands
// ---------------------------------------------------------------------------

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let fsum = f1 + f2;
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).norm())
}

fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    let (value, err) = gk15(f, a, b);
    // the second acceptance clause is the double-precision floor: repeated
    // tolerance halving on long tails would otherwise demand error levels
    // below what the rule can even estimate
    if err <= tol || err <= 1e-14 * (1.0 + value.norm()) || (b - a).abs() < 1e-14 {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "estimated error {err:.3e} above tolerance {tol:.3e} on [{a}, {b}]"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_gk(f, a, mid, 0.5 * tol, depth - 1)?;
    let right = adaptive_gk(f, mid, b, 0.5 * tol, depth - 1)?;
    Ok(left + right)
}

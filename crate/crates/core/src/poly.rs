//! Closed-form real root finding for the low-degree polynomials that
//! locate the extrema of the potential functions. Everything is solved
//! through the substitution U = T^2, so only quadratics and cubics appear.

/// Real roots of the monic quadratic u^2 + b u + c, ascending.
pub fn quadratic_real_roots(b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / 2.0, -b / 2.0];
    }
    let sq = disc.sqrt();
    // avoid cancellation: compute the large-magnitude root first
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if b == 0.0 {
        (-sq / 2.0, sq / 2.0)
    } else {
        (q, c / q)
    };
    let mut roots = vec![r1, r2];
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Real roots of the monic cubic u^3 + a2 u^2 + a1 u + a0, with
/// multiplicity, ascending. Trigonometric form for the three-real-root
/// case, Cardano otherwise.
pub fn cubic_real_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    let q = (3.0 * a1 - a2 * a2) / 9.0;
    let r = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2 * a2 * a2) / 54.0;
    let disc = q * q * q + r * r;
    let shift = a2 / 3.0;
    let mut roots = if disc < 0.0 {
        let theta = (r / (-q * q * q).sqrt()).clamp(-1.0, 1.0).acos() / 3.0;
        let m = 2.0 * (-q).sqrt();
        vec![
            m * theta.cos() - shift,
            m * (theta - 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos() - shift,
            m * (theta + 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos() - shift,
        ]
    } else if disc == 0.0 {
        if r == 0.0 {
            vec![-shift, -shift, -shift]
        } else {
            let s = r.cbrt();
            vec![2.0 * s - shift, -s - shift, -s - shift]
        }
    } else {
        let sq = disc.sqrt();
        let s = (r + sq).cbrt();
        let t = (r - sq).cbrt();
        vec![s + t - shift]
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// One Newton step on p at x for the polynomial with ascending coeffs.
pub fn polish_root(coeffs: &[f64], mut x: f64, steps: u32) -> f64 {
    for _ in 0..steps {
        let (p, dp) = eval_with_derivative(coeffs, x);
        if dp == 0.0 {
            break;
        }
        let nx = x - p / dp;
        if !nx.is_finite() {
            break;
        }
        x = nx;
    }
    x
}

pub fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Residual scale for the root-quality check: sum |c_i| max(1, |x|)^i.
pub fn residual_scale(coeffs: &[f64], x: f64) -> f64 {
    let b = x.abs().max(1.0);
    let mut scale = 0.0;
    let mut p = 1.0;
    for &c in coeffs {
        scale += c.abs() * p;
        p *= b;
    }
    scale
}

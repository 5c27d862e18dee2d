#![allow(dead_code)] // each integration target uses its own subset

//! Shared oracles for the integration suites. Everything here recomputes
//! values through routes independent of the library internals: truncated
//! Fourier series for the Lobachevsky function and direct double-precision
//! complex summation for the invariants.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Truncated Fourier series (1/2) sum_{n<=N} sin(2 n theta) / n^2.
/// Dirichlet-kernel cancellation puts the truncation error far below the
/// 1e-9 comparisons it backs at N = 10^7.
pub fn lobachevsky_oracle(theta: f64, terms: u32) -> f64 {
    let mut s = 0.0;
    for n in (1..=terms).rev() {
        let nf = n as f64;
        s += (2.0 * nf * theta).sin() / (nf * nf);
    }
    0.5 * s
}

/// Complex q-factorial table: fact[n] = prod_{m<=n} (s^m - s^{-m}).
pub fn complex_factorials(r: u32) -> Vec<Complex64> {
    let s = Complex64::from_polar(1.0, 2.0 * PI / r as f64);
    let mut fact = vec![Complex64::new(1.0, 0.0); r as usize];
    for m in 1..r as usize {
        fact[m] = fact[m - 1] * (s.powi(m as i32) - s.powi(-(m as i32)));
    }
    fact
}

/// Direct summation of the single-component invariant at doubled weight j2.
pub fn direct_jones_e(r: u32, j2: u32) -> Complex64 {
    let fact = complex_factorials(r);
    let s = Complex64::from_polar(1.0, 2.0 * PI / r as f64);
    let one = s - s.inv();
    let k_max = j2.min(r - j2 - 2);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        total += fact[(j2 + 1 + k) as usize] / fact[(j2 - k) as usize];
    }
    total / one
}

/// Direct summation of the three-component invariant at doubled weights.
pub fn direct_jones_b(r: u32, j2: [u32; 3]) -> Complex64 {
    let fact = complex_factorials(r);
    let s = Complex64::from_polar(1.0, 2.0 * PI / r as f64);
    let one = s - s.inv();
    let k_max = j2.iter().map(|&v| v.min(r - v - 2)).min().unwrap();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut t = Complex64::new(sign, 0.0);
        for &v in &j2 {
            t *= fact[(v + 1 + k) as usize] / fact[(v - k) as usize];
        }
        let ratio = fact[k as usize] / fact[(2 * k + 1) as usize];
        total += t * ratio * ratio;
    }
    total / one
}

/// Small deterministic generator for reproducible sampling in tests.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

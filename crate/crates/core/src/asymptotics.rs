//! Experiment harness: growth-rate measurements against the cone volumes,
//! convergence studies with a log r / r correction model, the threshold
//! angle for the single-component link, the equal-angle bound for the
//! rings, and classification of the valid angle region.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{vol_cone, ConeAngles};
use crate::invariant::{colored_jones, weights_for_angles, Branch};
use crate::potential::{im_phi_real, PotentialSpec};
use crate::qseries::{RootContext, Weights};

/// One experiment row.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRecord {
    pub r: u32,
    pub weights: Weights,
    pub branch: Branch,
    /// (4 pi / r) ln |V|.
    pub growth: f64,
    /// The cone-manifold volume the limit should reach.
    pub target: f64,
    /// growth - target; positive in practice, shrinking like log r / r.
    pub error: f64,
    /// |sum over I1| / |sum over the last set|; +inf when the last set is
    /// empty and the alternating part carries everything.
    pub dominance: f64,
}

/// Evaluate the invariant at the weights realizing the given angles and
/// compare its growth against the cone volume.
pub fn growth_rate(r: u32, angles: &ConeAngles, branch: Branch) -> Result<GrowthRecord> {
    if r < 5 {
        return Err(Error::Range(format!("level r = {r} below 5")));
    }
    let target = vol_cone(angles)?.volume;
    let ctx = RootContext::new(r)?;
    let wc = weights_for_angles(r, angles, branch)?;
    let value = colored_jones(&ctx, &wc.weights)?;
    let growth = value.growth();
    let first = value.partials.first().map(|(_, v)| *v).unwrap();
    let last = value.partials.last().map(|(_, v)| *v).unwrap();
    let dominance = if last.is_zero() {
        f64::INFINITY
    } else {
        first.abs_ratio(last)
    };
    Ok(GrowthRecord {
        r,
        weights: wc.weights,
        branch,
        growth,
        target,
        error: growth - target,
        dominance,
    })
}

/// Growth records fitted to growth(r) = limit + a ln r / r + b / r.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceStudy {
    pub records: Vec<GrowthRecord>,
    /// Fitted constant term: the extrapolated limit.
    pub limit: f64,
    /// Coefficient of ln r / r.
    pub log_coeff: f64,
    /// Coefficient of 1 / r.
    pub inv_coeff: f64,
    pub residuals: Vec<f64>,
    pub target: f64,
    /// limit - target.
    pub limit_error: f64,
}

pub fn convergence_study(
    rs: &[u32],
    angles: &ConeAngles,
    branch: Branch,
) -> Result<ConvergenceStudy> {
    if rs.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 levels, got {}",
            rs.len()
        )));
    }
    let records: Vec<GrowthRecord> = rs
        .par_iter()
        .map(|&r| growth_rate(r, angles, branch))
        .collect::<Result<_>>()?;
    let target = records[0].target;

    // least squares for [limit, a, b] against [1, ln r / r, 1 / r]
    let rows: Vec<[f64; 3]> = records
        .iter()
        .map(|rec| {
            let rf = rec.r as f64;
            [1.0, rf.ln() / rf, 1.0 / rf]
        })
        .collect();
    let ys: Vec<f64> = records.iter().map(|rec| rec.growth).collect();
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (row, &y) in rows.iter().zip(&ys) {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            aty[i] += row[i] * y;
        }
    }
    let coeffs = solve3(ata, aty).ok_or_else(|| {
        Error::Fit("singular design matrix (duplicate or too few distinct levels)".into())
    })?;
    let residuals: Vec<f64> = rows
        .iter()
        .zip(&ys)
        .map(|(row, &y)| y - (coeffs[0] * row[0] + coeffs[1] * row[1] + coeffs[2] * row[2]))
        .collect();
    Ok(ConvergenceStudy {
        records,
        limit: coeffs[0],
        log_coeff: coeffs[1],
        inv_coeff: coeffs[2],
        residuals,
        target,
        limit_error: coeffs[0] - target,
    })
}

#[allow(clippy::needless_range_loop)] // in-place elimination over two rows
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    for i in 0..3 {
        let pivot = (i..3).max_by(|&p, &q| a[p][i].abs().partial_cmp(&a[q][i].abs()).unwrap())?;
        if a[pivot][i].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(i, pivot);
        b.swap(i, pivot);
        for k in i + 1..3 {
            let f = a[k][i] / a[i][i];
            for j in i..3 {
                a[k][j] -= f * a[i][j];
            }
            b[k] -= f * b[i];
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for j in i + 1..3 {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// A value located by scan plus bisection.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Threshold {
    pub value: f64,
    pub bracket_width: f64,
}

/// Largest cone angle below which twice the potential value at alpha/2
/// stays under the cone volume: the root of
/// g(alpha) = Vol(alpha) - 2 Im Phi(alpha/2) on [0, 2pi/3).
pub fn threshold_alpha0() -> Result<Threshold> {
    threshold_alpha0_with_scan(1024)
}

pub fn threshold_alpha0_with_scan(scan: u32) -> Result<Threshold> {
    let hi = 2.0 * PI / 3.0 - 1e-9;
    let g = |alpha: f64| -> f64 {
        let spec = PotentialSpec::e(alpha).expect("alpha inside the hyperbolic range");
        vol_cone(spec.angles()).expect("hyperbolic").volume - 2.0 * im_phi_real(&spec, alpha / 2.0)
    };
    bisect_sup(g, 0.0, hi, scan, 1e-9)
}

/// Equal-angle bound for the rings: the root of
/// h(alpha) = Vol(alpha, alpha, alpha) - 2 Im Phi(alpha/2) on [0, pi).
pub fn equal_angle_bound_b() -> Result<Threshold> {
    equal_angle_bound_b_with_scan(2048)
}

pub fn equal_angle_bound_b_with_scan(scan: u32) -> Result<Threshold> {
    let hi = PI - 1e-7;
    let h = |alpha: f64| -> f64 {
        let spec = PotentialSpec::b([alpha; 3]).expect("alpha inside the hyperbolic range");
        vol_cone(spec.angles()).expect("hyperbolic").volume - 2.0 * im_phi_real(&spec, alpha / 2.0)
    };
    bisect_sup(h, 0.0, hi, scan, 1e-9)
}

/// Locate the last sign change of f from positive to negative by a coarse
/// scan, bisect it below `tol` width, then confirm the sign on grids on
/// both sides of the bracket.
fn bisect_sup(f: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: u32, tol: f64) -> Result<Threshold> {
    let at = |i: u32| lo + (hi - lo) * i as f64 / scan as f64;
    let mut bracket = None;
    let mut prev = f(at(0));
    for i in 1..=scan {
        let cur = f(at(i));
        if prev > 0.0 && cur <= 0.0 {
            bracket = Some((at(i - 1), at(i)));
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::Bracket(format!("no positive-to-negative crossing on [{lo}, {hi}]"))
    })?;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if f(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let value = 0.5 * (a + b);
    // sign confirmation on both sides
    for i in 1..=50u32 {
        let below = a * i as f64 / 51.0;
        if f(below) <= 0.0 {
            return Err(Error::Bracket(format!(
                "sign check failed below the threshold at {below}"
            )));
        }
        let above = b + (hi - b) * i as f64 / 51.0;
        if above < hi && f(above) > 0.0 {
            return Err(Error::Bracket(format!(
                "sign check failed above the threshold at {above}"
            )));
        }
    }
    Ok(Threshold {
        value,
        bracket_width: b - a,
    })
}

/// One classified angle triple.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegionSample {
    pub angles: [f64; 3],
    /// 2 Im Phi(min angle / 2) - Vol; negative inside the valid region.
    pub condition: f64,
    pub in_omega0: bool,
}

/// Axis-aligned cube of angle triples.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridSpec3 {
    pub lo: f64,
    pub hi: f64,
    pub steps: u32,
}

impl GridSpec3 {
    pub fn axis(&self, i: u32) -> f64 {
        if self.steps <= 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }
}

/// Classify every grid point of the cube against the region condition.
/// Points are emitted in row-major axis order regardless of thread count.
pub fn omega0_classify(grid: &GridSpec3) -> Vec<RegionSample> {
    assert!(
        grid.lo >= 0.0 && grid.hi < PI && grid.lo <= grid.hi,
        "grid must sit inside [0, pi)^3"
    );
    let n = grid.steps as usize;
    (0..n * n * n)
        .into_par_iter()
        .map(|flat| {
            let i = (flat / (n * n)) as u32;
            let j = ((flat / n) % n) as u32;
            let k = (flat % n) as u32;
            classify_one([grid.axis(i), grid.axis(j), grid.axis(k)])
        })
        .collect()
}

pub fn classify_one(angles: [f64; 3]) -> RegionSample {
    let spec = PotentialSpec::b(angles).expect("grid point inside the hyperbolic box");
    let min_half = spec.angles().min_angle() / 2.0;
    let vol = vol_cone(spec.angles()).expect("hyperbolic").volume;
    let condition = 2.0 * im_phi_real(&spec, min_half) - vol;
    RegionSample {
        angles,
        condition,
        in_omega0: condition < 0.0,
    }
}

/// Grid edges straddling the zero level of the condition value, located by
/// linear interpolation along the three axis directions.
pub fn omega0_boundary(samples: &[RegionSample], grid: &GridSpec3) -> Vec<[f64; 3]> {
    let n = grid.steps as usize;
    let idx = |i: usize, j: usize, k: usize| i * n * n + j * n + k;
    let mut points = Vec::new();
    let mut push_edge = |a: &RegionSample, b: &RegionSample| {
        let (ca, cb) = (a.condition, b.condition);
        if ca == 0.0 {
            points.push(a.angles);
            return;
        }
        if (ca < 0.0) != (cb < 0.0) {
            let t = ca / (ca - cb);
            let mut p = [0.0; 3];
            for (d, coord) in p.iter_mut().enumerate() {
                *coord = a.angles[d] + t * (b.angles[d] - a.angles[d]);
            }
            points.push(p);
        }
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let cur = &samples[idx(i, j, k)];
                if i + 1 < n {
                    push_edge(cur, &samples[idx(i + 1, j, k)]);
                }
                if j + 1 < n {
                    push_edge(cur, &samples[idx(i, j + 1, k)]);
                }
                if k + 1 < n {
                    push_edge(cur, &samples[idx(i, j, k + 1)]);
                }
            }
        }
    }
    points
}

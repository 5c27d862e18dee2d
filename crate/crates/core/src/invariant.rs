//! Assembles the colored Jones values and their per-partition partial sums,
//! and picks weights realizing prescribed cone angles.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ConeAngles;
use crate::qseries::{index_partition, term, RootContext, SetLabel, SignedLogValue, Weights};

/// Sign branch of the angle-to-weight map |8 pi j / r - 2 pi| = alpha.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    #[default]
    Minus,
}

/// Outcome of rounding cone angles to admissible half-integer weights.
#[derive(Clone, Debug, Serialize)]
pub struct WeightChoice {
    pub branch: Branch,
    pub weights: Weights,
    /// Signed defect |8 pi j / r - 2 pi| - alpha per component, each within
    /// 2 pi / r of zero by the nearest-half-integer rounding.
    pub defects: Vec<f64>,
    /// Ascending order applied to the rounded triple, when sorting moved
    /// anything (identity for the single-component case).
    pub sort_permutation: Option<[usize; 3]>,
}

/// Nearest half-integer weight to r (2 pi -+ alpha) / (8 pi) per component.
/// Exact quarter-offset ties round half up on the doubled weight.
pub fn weights_for_angles(r: u32, angles: &ConeAngles, branch: Branch) -> Result<WeightChoice> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::Range(format!("level r = {r} must be odd and >= 3")));
    }
    let rf = r as f64;
    let round_one = |alpha: f64| -> Result<(u32, f64)> {
        if !(0.0..PI).contains(&alpha) {
            return Err(Error::Range(format!("cone angle {alpha} outside [0, pi)")));
        }
        let target = match branch {
            Branch::Minus => rf * (2.0 * PI - alpha) / (8.0 * PI),
            Branch::Plus => rf * (2.0 * PI + alpha) / (8.0 * PI),
        };
        let j2 = (2.0 * target + 0.5).floor();
        if j2 < 0.0 || j2 > (r - 2) as f64 {
            return Err(Error::Range(format!(
                "rounded weight {} exits {{0, 1/2, ..., {}}}",
                j2 / 2.0,
                (r - 2) as f64 / 2.0
            )));
        }
        let achieved = (8.0 * PI * (j2 / 2.0) / rf - 2.0 * PI).abs();
        Ok((j2 as u32, achieved - alpha))
    };
    match angles {
        ConeAngles::E { alpha } => {
            let (j2, defect) = round_one(*alpha)?;
            Ok(WeightChoice {
                branch,
                weights: Weights::from_doubled_single(r, j2)?,
                defects: vec![defect],
                sort_permutation: None,
            })
        }
        ConeAngles::B { alpha } => {
            let mut rounded = Vec::with_capacity(3);
            for &a in alpha {
                rounded.push(round_one(a)?);
            }
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&i| rounded[i].0);
            let j2 = [
                rounded[order[0]].0,
                rounded[order[1]].0,
                rounded[order[2]].0,
            ];
            let defects = order.iter().map(|&i| rounded[i].1).collect();
            Ok(WeightChoice {
                branch,
                weights: Weights::from_doubled_triple(r, j2)?,
                defects,
                sort_permutation: Some(order),
            })
        }
    }
}

/// A colored Jones value: total plus the per-partition partial sums, all in
/// signed-log form, with the evaluation context echoed.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantValue {
    pub r: u32,
    pub weights: Weights,
    pub total: SignedLogValue,
    pub partials: Vec<(SetLabel, SignedLogValue)>,
}

impl InvariantValue {
    /// (4 pi / r) ln |total|, the quantity the limit theorems speak about.
    pub fn growth(&self) -> f64 {
        4.0 * PI / self.r as f64 * self.total.log_mag()
    }

    pub fn partial(&self, label: SetLabel) -> Option<SignedLogValue> {
        self.partials
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
    }
}

/// Single-component colored Jones value at weight j.
pub fn colored_jones_e(ctx: &RootContext, j: f64) -> Result<InvariantValue> {
    colored_jones(ctx, &Weights::single(ctx.r(), j)?)
}

/// Three-component colored Jones value; weights are sorted on entry.
pub fn colored_jones_b(ctx: &RootContext, js: [f64; 3]) -> Result<InvariantValue> {
    colored_jones(ctx, &Weights::triple(ctx.r(), js)?)
}

/// Shared assembly: evaluate every summand, sum each partition set with the
/// scaled compensated scheme, then combine the partials.
pub fn colored_jones(ctx: &RootContext, weights: &Weights) -> Result<InvariantValue> {
    let partition = index_partition(ctx, weights);
    let k_max = weights.k_max(ctx.r());
    let terms = all_terms(ctx, weights, k_max)?;
    let mut partials = Vec::with_capacity(partition.sets().len());
    for (label, range) in partition.sets() {
        let slice = &terms[range.start as usize..range.end as usize];
        let sum = SignedLogValue::sum(slice.iter().copied());
        check_constant_sign_squeeze(*label, slice, sum);
        partials.push((*label, sum));
    }
    let total = SignedLogValue::sum(partials.iter().map(|(_, v)| *v));
    Ok(InvariantValue {
        r: ctx.r(),
        weights: *weights,
        total,
        partials,
    })
}

/// Signed-log sum over one named partition set; zero for an empty set.
pub fn partial_sum(
    ctx: &RootContext,
    weights: &Weights,
    label: SetLabel,
) -> Result<SignedLogValue> {
    let partition = index_partition(ctx, weights);
    let range = partition.range(label).ok_or_else(|| {
        Error::Range(format!(
            "label {} not present in the partition for this knot",
            label.name()
        ))
    })?;
    let mut terms = Vec::with_capacity(range.len());
    for k in range {
        terms.push(term(ctx, weights, k)?);
    }
    let sum = SignedLogValue::sum(terms.iter().copied());
    check_constant_sign_squeeze(label, &terms, sum);
    Ok(sum)
}

fn all_terms(ctx: &RootContext, weights: &Weights, k_max: u32) -> Result<Vec<SignedLogValue>> {
    // deterministic k-order regardless of the thread count: the parallel
    // path collects in index order before the sequential reduction
    if k_max >= 4096 {
        (0..=k_max)
            .into_par_iter()
            .map(|k| term(ctx, weights, k))
            .collect()
    } else {
        (0..=k_max).map(|k| term(ctx, weights, k)).collect()
    }
}

/// On constant-sign sets the sum is squeezed between the largest term and
/// the term count times it. This is sign bookkeeping, not analysis, so a
/// violation is a bug.
fn check_constant_sign_squeeze(label: SetLabel, terms: &[SignedLogValue], sum: SignedLogValue) {
    if !label.constant_sign() || terms.is_empty() {
        return;
    }
    let first_sign = terms[0].sign();
    assert!(
        terms.iter().all(|t| t.sign() == first_sign),
        "{} is not constant-sign",
        label.name()
    );
    let max_log = terms
        .iter()
        .map(|t| t.log_mag())
        .fold(f64::NEG_INFINITY, f64::max);
    let count = terms.len() as f64;
    let slack = 1e-12 * count;
    assert!(
        sum.log_mag() >= max_log - slack && sum.log_mag() <= max_log + count.ln() + slack,
        "constant-sign squeeze violated on {}",
        label.name()
    );
}

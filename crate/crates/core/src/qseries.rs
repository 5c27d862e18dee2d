//! q-arithmetic at an odd root of unity: q-integers and q-factorials,
//! the real summands of the colored Jones sums with their ratios, the
//! sign partition of the summation range, and unimodality profiling.
//!
//! Magnitudes are kept in signed-log form throughout: the summands reach
//! e^{r Vol / 4 pi}, which overflows raw doubles near r ~ 4400.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Precomputed trigonometry for one odd level r.
///
/// Holds sin(2 pi n / r) for n in [0, r) plus prefix tables for the
/// q-factorials so that any single summand evaluates in O(1).
#[derive(Clone, Debug)]
pub struct RootContext {
    r: u32,
    sin: Vec<f64>,
    log_fact: Vec<f64>,
    quarter_fact: Vec<u8>,
}

impl RootContext {
    pub fn new(r: u32) -> Result<Self> {
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::Range(format!("level r = {r} must be odd and >= 3")));
        }
        let rf = r as f64;
        let sin: Vec<f64> = (0..r).map(|n| (2.0 * PI * n as f64 / rf).sin()).collect();
        let mut log_fact = vec![0.0; r as usize];
        let mut quarter_fact = vec![0u8; r as usize];
        for m in 1..r as usize {
            let v = 2.0 * sin[m];
            log_fact[m] = log_fact[m - 1] + v.abs().ln();
            // each factor {m} = 2i sin(...) turns the phase by +pi/2 (sin > 0)
            // or -pi/2 (sin < 0); tracked exactly as quarter turns mod 4
            quarter_fact[m] = (quarter_fact[m - 1] + if v > 0.0 { 1 } else { 3 }) % 4;
        }
        Ok(RootContext {
            r,
            sin,
            log_fact,
            quarter_fact,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// The primitive root s = e^{2 pi i / r}.
    pub fn s(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / self.r as f64)
    }

    /// The deformation parameter q = s^2.
    pub fn q(&self) -> Complex64 {
        Complex64::from_polar(1.0, 4.0 * PI / self.r as f64)
    }

    /// sin(2 pi n / r) for any integer n, via the cached table.
    pub fn sin_2pi(&self, n: i64) -> f64 {
        let m = n.rem_euclid(self.r as i64) as usize;
        self.sin[m]
    }
}

// ---------------------------------------------------------------------------
// Signed-log and log-polar scalars
// ---------------------------------------------------------------------------

/// A real number stored as (sign, ln |value|); zero is (0, -inf).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedLogValue {
    sign: i8,
    log_mag: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        debug_assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLogValue { sign, log_mag }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_mag: x.abs().ln(),
            }
        }
    }

    /// May overflow to +-inf for magnitudes beyond the double range.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.log_mag.exp()
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// |self| / |other| as a plain double.
    pub fn abs_ratio(self, other: Self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        (self.log_mag - other.log_mag).exp()
    }

    /// Sum of a sequence, stable at exponential scale: the largest log
    /// magnitude m is factored out and sign_k e^{log_k - m} accumulated
    /// with compensated addition in the given order.
    pub fn sum<I: IntoIterator<Item = SignedLogValue>>(values: I) -> Self {
        let vals: Vec<SignedLogValue> = values.into_iter().filter(|v| v.sign != 0).collect();
        if vals.is_empty() {
            return Self::ZERO;
        }
        let m = vals
            .iter()
            .map(|v| v.log_mag)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for v in &vals {
            let term = v.sign as f64 * (v.log_mag - m).exp();
            let y = term - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        if acc == 0.0 {
            return Self::ZERO;
        }
        SignedLogValue {
            sign: if acc > 0.0 { 1 } else { -1 },
            log_mag: m + acc.abs().ln(),
        }
    }
}

impl std::ops::Mul for SignedLogValue {
    type Output = SignedLogValue;

    fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue {
            sign: self.sign * other.sign,
            log_mag: self.log_mag + other.log_mag,
        }
    }
}

/// A complex number stored as (ln |value|, arg value); zero is log_mag -inf.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogPolarValue {
    log_mag: f64,
    phase: f64,
}

impl LogPolarValue {
    pub const ONE: LogPolarValue = LogPolarValue {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        LogPolarValue {
            log_mag,
            phase: normalize_phase(phase),
        }
    }

    pub fn log_mag(self) -> f64 {
        self.log_mag
    }

    /// Phase in (-pi, pi].
    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn powi(self, k: i32) -> Self {
        Self::new(self.log_mag * k as f64, self.phase * k as f64)
    }

    /// Collapse to a signed real; errors when the phase is not within
    /// `tol` of a multiple of pi.
    pub fn to_signed_real(self, tol: f64) -> Result<SignedLogValue> {
        if self.log_mag == f64::NEG_INFINITY {
            return Ok(SignedLogValue::ZERO);
        }
        let ph = self.phase;
        if ph.abs() <= tol {
            Ok(SignedLogValue::new(1, self.log_mag))
        } else if (ph.abs() - PI).abs() <= tol {
            Ok(SignedLogValue::new(-1, self.log_mag))
        } else {
            Err(Error::Realness(format!(
                "phase {ph} is {:.3e} away from a multiple of pi",
                (ph.abs() - PI).abs().min(ph.abs())
            )))
        }
    }
}

impl std::ops::Mul for LogPolarValue {
    type Output = LogPolarValue;

    fn mul(self, other: Self) -> Self {
        Self::new(self.log_mag + other.log_mag, self.phase + other.phase)
    }
}

impl std::ops::Div for LogPolarValue {
    type Output = LogPolarValue;

    fn div(self, other: Self) -> Self {
        Self::new(self.log_mag - other.log_mag, self.phase - other.phase)
    }
}

fn normalize_phase(ph: f64) -> f64 {
    let mut p = ph.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

// ---------------------------------------------------------------------------
// Weights and the index partition
// ---------------------------------------------------------------------------

/// Half-integer colors; stored doubled so that all arithmetic stays exact.
/// The triple for the three-component case is kept ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Weights {
    E { j2: u32 },
    B { j2: [u32; 3] },
}

impl Weights {
    /// Single weight j in {0, 1/2, ..., (r-2)/2}.
    pub fn single(r: u32, j: f64) -> Result<Self> {
        Ok(Weights::E {
            j2: validate_doubled(r, j)?,
        })
    }

    /// Weight triple, sorted ascending on entry.
    pub fn triple(r: u32, js: [f64; 3]) -> Result<Self> {
        let mut j2 = [
            validate_doubled(r, js[0])?,
            validate_doubled(r, js[1])?,
            validate_doubled(r, js[2])?,
        ];
        j2.sort_unstable();
        Ok(Weights::B { j2 })
    }

    pub fn from_doubled_single(r: u32, j2: u32) -> Result<Self> {
        if j2 > r - 2 {
            return Err(Error::Range(format!("2j = {j2} exceeds r - 2 = {}", r - 2)));
        }
        Ok(Weights::E { j2 })
    }

    pub fn from_doubled_triple(r: u32, mut j2: [u32; 3]) -> Result<Self> {
        for &v in &j2 {
            if v > r - 2 {
                return Err(Error::Range(format!("2j = {v} exceeds r - 2 = {}", r - 2)));
            }
        }
        j2.sort_unstable();
        Ok(Weights::B { j2 })
    }

    /// Upper summation index: min over components of min{2j, r - (2j+1) - 1}.
    pub fn k_max(&self, r: u32) -> u32 {
        match self {
            Weights::E { j2 } => (*j2).min(r - j2 - 2),
            Weights::B { j2 } => j2.iter().map(|&v| v.min(r - v - 2)).min().unwrap(),
        }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            Weights::E { j2 } => vec![*j2 as f64 / 2.0],
            Weights::B { j2 } => j2.iter().map(|&v| v as f64 / 2.0).collect(),
        }
    }
}

fn validate_doubled(r: u32, j: f64) -> Result<u32> {
    let doubled = 2.0 * j;
    if !doubled.is_finite() || (doubled - doubled.round()).abs() > 1e-9 {
        return Err(Error::Range(format!(
            "weight j = {j} is not a half-integer"
        )));
    }
    let j2 = doubled.round();
    if j2 < 0.0 || j2 > (r - 2) as f64 {
        return Err(Error::Range(format!(
            "weight j = {j} outside {{0, 1/2, ..., {}}}",
            (r - 2) as f64 / 2.0
        )));
    }
    Ok(j2 as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SetLabel {
    I1,
    I2,
    I3,
    I4,
}

impl SetLabel {
    pub fn name(self) -> &'static str {
        match self {
            SetLabel::I1 => "I1",
            SetLabel::I2 => "I2",
            SetLabel::I3 => "I3",
            SetLabel::I4 => "I4",
        }
    }

    /// The sets on which the summands keep a constant sign.
    pub fn constant_sign(self) -> bool {
        matches!(self, SetLabel::I2 | SetLabel::I4)
    }
}

/// Contiguous, disjoint index ranges covering 0..=k_max. Empty ranges are
/// kept so that every expected label is always present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexPartition {
    sets: Vec<(SetLabel, Range<u32>)>,
}

impl IndexPartition {
    pub fn sets(&self) -> &[(SetLabel, Range<u32>)] {
        &self.sets
    }

    pub fn range(&self, label: SetLabel) -> Option<Range<u32>> {
        self.sets
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, r)| r.clone())
    }

    pub fn label_of(&self, k: u32) -> Option<SetLabel> {
        self.sets
            .iter()
            .find(|(_, r)| r.contains(&k))
            .map(|(l, _)| *l)
    }

    /// Last label present (the dominant constant-sign set).
    pub fn last_label(&self) -> SetLabel {
        self.sets.last().unwrap().0
    }
}

/// Index of the last alternating term: floor(|r/2 - (2j+1)|), computed in
/// exact integer arithmetic. r odd makes the boundary a half-integer, so a
/// tie at an integer index cannot occur.
fn alternation_boundary(r: u32, j2: u32) -> u32 {
    let diff = (r as i64 - 2 * (j2 as i64 + 1)).unsigned_abs();
    ((diff - 1) / 2) as u32
}

/// Sign partition of the summation range 0..=k_max.
///
/// For the single-weight sum the range splits at floor(|r/2 - (2j+1)|); for
/// the triple the three per-component boundaries are clipped to k_max and
/// sorted ascending, which reproduces the four displayed ranges whenever
/// r/2 > 2j_i + 1 for all i and extends them to the other sign patterns.
pub fn index_partition(ctx: &RootContext, weights: &Weights) -> IndexPartition {
    let r = ctx.r;
    let k_max = weights.k_max(r);
    let end = k_max + 1;
    match weights {
        Weights::E { j2 } => {
            let b = alternation_boundary(r, *j2).min(k_max);
            IndexPartition {
                sets: vec![(SetLabel::I1, 0..b + 1), (SetLabel::I2, b + 1..end)],
            }
        }
        Weights::B { j2 } => {
            let mut bs: Vec<u32> = j2
                .iter()
                .map(|&v| alternation_boundary(r, v).min(k_max))
                .collect();
            bs.sort_unstable();
            let (b1, b2, b3) = (bs[0], bs[1], bs[2]);
            IndexPartition {
                sets: vec![
                    (SetLabel::I1, 0..b1 + 1),
                    (SetLabel::I2, b1 + 1..(b2 + 1).max(b1 + 1)),
                    (SetLabel::I3, b2 + 1..(b3 + 1).max(b2 + 1)),
                    (SetLabel::I4, b3 + 1..end.max(b3 + 1)),
                ],
            }
        }
    }
}

// ---------------------------------------------------------------------------
// q-integers, q-factorials, summands, ratios
// ---------------------------------------------------------------------------

/// q-integer {n} = s^n - s^{-n} = 2i sin(2 pi n / r); purely imaginary.
pub fn q_integer(ctx: &RootContext, n: i64) -> Complex64 {
    Complex64::new(0.0, 2.0 * ctx.sin_2pi(n))
}

/// q-factorial {n}! = prod_{m=1..n} {m} in log-polar form.
///
/// Errors for n >= r, where the zero factor {r} would make the product
/// vanish identically.
pub fn q_factorial(ctx: &RootContext, n: u32) -> Result<LogPolarValue> {
    if n >= ctx.r {
        return Err(Error::Range(format!(
            "q-factorial argument {n} >= r = {} hits the zero factor {{r}}",
            ctx.r
        )));
    }
    Ok(LogPolarValue::new(
        ctx.log_fact[n as usize],
        ctx.quarter_fact[n as usize] as f64 * FRAC_PI_2,
    ))
}

/// Summand ratio for the single-weight sum:
/// R_k = 2(cos(4 pi (2j+1)/r) - cos(4 pi k / r)), nonzero on 1..=k_max.
pub fn term_ratio_e(ctx: &RootContext, j2: u32, k: u32) -> Result<f64> {
    let w = Weights::from_doubled_single(ctx.r, j2)?;
    let k_max = w.k_max(ctx.r);
    if k < 1 || k > k_max {
        return Err(Error::Range(format!("k = {k} outside [1, {k_max}]")));
    }
    let rf = ctx.r as f64;
    Ok(2.0 * ((4.0 * PI * (j2 + 1) as f64 / rf).cos() - (4.0 * PI * k as f64 / rf).cos()))
}

/// Summand ratio for the triple-weight sum.
pub fn term_ratio_b(ctx: &RootContext, j2: [u32; 3], k: u32) -> Result<f64> {
    let w = Weights::from_doubled_triple(ctx.r, j2)?;
    let k_max = w.k_max(ctx.r);
    if k < 1 || k > k_max {
        return Err(Error::Range(format!("k = {k} outside [1, {k_max}]")));
    }
    let rf = ctx.r as f64;
    let sk = (2.0 * PI * k as f64 / rf).sin();
    let s2k1 = (2.0 * PI * (2 * k + 1) as f64 / rf).sin();
    let s4k = (4.0 * PI * k as f64 / rf).sin();
    let mut prod = 1.0;
    for &v in &j2 {
        prod *= (4.0 * PI * (v + 1) as f64 / rf).cos() - (4.0 * PI * k as f64 / rf).cos();
    }
    Ok(2.0 * sk * sk / (s2k1 * s2k1 * s4k * s4k) * prod)
}

const REALNESS_TOL: f64 = 1e-9;

/// Normalized single-weight summand {2j+1+k}! / ({2j-k}! {1}) as a signed
/// real; the log-polar phase must land on a multiple of pi.
pub fn term_e(ctx: &RootContext, j2: u32, k: u32) -> Result<SignedLogValue> {
    let w = Weights::from_doubled_single(ctx.r, j2)?;
    let k_max = w.k_max(ctx.r);
    if k > k_max {
        return Err(Error::Range(format!("k = {k} above k_max = {k_max}")));
    }
    let lp = q_factorial(ctx, j2 + 1 + k)? / q_factorial(ctx, j2 - k)? / q_factorial(ctx, 1)?;
    lp.to_signed_real(REALNESS_TOL)
}

/// Normalized triple-weight summand
/// (-1)^k prod_i {2j_i+1+k}!/{2j_i-k}! ({k}!/{2k+1}!)^2 / {1}.
pub fn term_b(ctx: &RootContext, j2: [u32; 3], k: u32) -> Result<SignedLogValue> {
    let w = Weights::from_doubled_triple(ctx.r, j2)?;
    let k_max = w.k_max(ctx.r);
    if k > k_max {
        return Err(Error::Range(format!("k = {k} above k_max = {k_max}")));
    }
    let mut lp = LogPolarValue::ONE;
    for &v in &j2 {
        lp = lp * (q_factorial(ctx, v + 1 + k)? / q_factorial(ctx, v - k)?);
    }
    lp = lp * (q_factorial(ctx, k)? / q_factorial(ctx, 2 * k + 1)?).powi(2);
    lp = lp / q_factorial(ctx, 1)?;
    if k % 2 == 1 {
        lp = lp * LogPolarValue::new(0.0, PI);
    }
    lp.to_signed_real(REALNESS_TOL)
}

/// Summand for either variant.
pub fn term(ctx: &RootContext, weights: &Weights, k: u32) -> Result<SignedLogValue> {
    match weights {
        Weights::E { j2 } => term_e(ctx, *j2, k),
        Weights::B { j2 } => term_b(ctx, *j2, k),
    }
}

/// Indices at which the monotonicity of the magnitude sequence flips.
/// Plateaus inherit the preceding direction; a constant list has none.
pub fn unimodality_profile(magnitudes: &[SignedLogValue]) -> Vec<usize> {
    let mut flips = Vec::new();
    let mut prev = 0i8;
    for i in 1..magnitudes.len() {
        let a = magnitudes[i - 1].log_mag();
        let b = magnitudes[i].log_mag();
        let d = if b > a {
            1
        } else if b < a {
            -1
        } else {
            0
        };
        if d == 0 {
            continue;
        }
        if prev != 0 && d != prev {
            flips.push(i - 1);
        }
        prev = d;
    }
    flips
}

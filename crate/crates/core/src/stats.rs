//! Digit statistics of coded geodesics, certified coding constants, the
//! invariant measure of the digit map, and end-to-end verification of the
//! excursion counting bounds against exact lattice sweeps.
//!
//! The central objects are the running sums `alpha_n` of `ln |a_j|`, the
//! slack-adjusted sums `omega_n`, and the excursion counts `e(delta, n)`
//! and `f(delta, n)` of a digit sequence. For an H-reduced form the module
//! locates the base point `g(i)` on the coded geodesic, derives the shift
//! `theta` and the early-crossing count `nu`, and checks the counting
//! inequalities `count >= e - nu` and `count <= f + nu` over a radius
//! grid, with every selection and comparison certified.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::counting::{count_region, CountError, CountOptions, CountQuery, RegionKind};
use crate::forms::{lambda, BinaryForm, RealMatrix};
use crate::hurwitz::DigitSequence;
use crate::hyperbolic::{
    chi_constant, hyp_distance, mu, segment_slack_bound, trace_segments, CrossingPoint,
    HyperbolicError,
};
use crate::numerics::{certified_pi, CertifiedReal, QuadraticSurd};

/// Largest coding length [`verify_reduced_bounds`] will try before giving
/// up on covering the radius grid.
pub const SEGMENT_BUDGET: usize = 4096;

const CMP_BITS: u32 = 192;
const TIE_BITS: u32 = 96;
const TERM_BITS: u32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("digit at position {0} must satisfy |a| >= 2")]
    DigitTooSmall(usize),
    #[error("digit sequence has {have} digits, need {need}")]
    ShortDigits { have: usize, need: usize },
    #[error("statistics need at least one digit")]
    EmptyDigits,
    #[error("the averaging window must be positive")]
    BadWindow,
    #[error("form endpoints are not in reduced position; apply h_reduce first")]
    NotReduced,
    #[error("delta {0} is outside the admissible range")]
    BadDelta(BigRational),
    #[error("kappa must be positive")]
    BadKappa,
    #[error("delta {0} leaves no admissible digits for the generic counts")]
    DeltaTooLarge(BigRational),
    #[error("the radius grid must not be empty")]
    EmptyGrid,
    #[error("radius must be positive, got {0}")]
    BadRho(BigRational),
    #[error("epsilon must satisfy 0 < epsilon < 1")]
    BadEpsilon,
    #[error("the rate bound must satisfy 0 < rate <= the omega estimate")]
    BadRate,
    #[error("measure intervals must satisfy -1/2 <= lo <= hi <= 1/2 and not overlap")]
    BadMeasureInterval,
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error("the area needs delta > 0 and 0 < kappa <= tau")]
    BadArea,
    #[error("seed must satisfy 0 < |seed| <= 1/2, got {0}")]
    BadSeed(BigRational),
    #[error("coding budget of {0} segments exhausted before the shift and radius grid were covered")]
    ShortCoding(usize),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Count(#[from] CountError),
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ln_rational(x: BigRational) -> CertifiedReal {
    CertifiedReal::from_rational(x).ln()
}

/// The two digit cutoffs bracketing a cusp excursion at height
/// `2 delta^{-2}`: a digit above `certain` forces the coded segment into
/// the cusp neighborhood, a digit at or below `possible` keeps it out.
#[derive(Debug, Clone)]
pub struct DigitThresholds {
    /// `2 delta^{-2} + 1/2 + lambda`.
    pub certain: QuadraticSurd,
    /// `2 delta^{-2} - 3/2 + lambda`.
    pub possible: QuadraticSurd,
}

fn threshold_pair(base: BigRational) -> DigitThresholds {
    let lam = lambda();
    let certain = &QuadraticSurd::from_rational(&(&base + rat(1, 2))) + &lam;
    let possible = &QuadraticSurd::from_rational(&(&base - rat(3, 2))) + &lam;
    DigitThresholds { certain, possible }
}

/// Exact excursion thresholds for the height `2 delta^{-2}`.
pub fn digit_thresholds(delta: &BigRational) -> Result<DigitThresholds, StatsError> {
    if !delta.is_positive() {
        return Err(StatsError::BadDelta(delta.clone()));
    }
    Ok(threshold_pair(rat(2, 1) / (delta * delta)))
}

/// Excursion thresholds for the value band `|Q| < delta`, obtained from
/// [`digit_thresholds`] by substituting `sqrt(2 delta)` for `delta`.
pub fn band_digit_thresholds(delta: &BigRational) -> Result<DigitThresholds, StatsError> {
    if !delta.is_positive() {
        return Err(StatsError::BadDelta(delta.clone()));
    }
    Ok(threshold_pair(delta.recip()))
}

/// Window minima and maxima of the per-digit Cesaro averages of a
/// [`StatsSeries`].
#[derive(Debug, Clone, Copy)]
pub struct LimitEstimates {
    pub alpha_low: f64,
    pub alpha_high: f64,
    pub omega_low: f64,
    pub omega_high: f64,
    pub e_low: f64,
    pub e_high: f64,
    pub f_low: f64,
    pub f_high: f64,
    /// Number of trailing prefix lengths the extrema ranged over.
    pub window: usize,
}

/// Running sums and excursion counts of a digit sequence prefix.
#[derive(Debug, Clone)]
pub struct StatsSeries {
    pub source: String,
    pub digits: Vec<i64>,
    pub delta: BigRational,
    /// `alpha[n]` is the sum of `ln |a_j|` over `j < n`.
    pub alpha: Vec<CertifiedReal>,
    /// `omega[n]` is the sum of `ln |a_j| - chi_j` over `j < n`.
    pub omega: Vec<CertifiedReal>,
    /// `e_counts[n]` counts digits below index `n` above the certain
    /// threshold.
    pub e_counts: Vec<u64>,
    /// `f_counts[n]` counts digits below index `n` above the possible
    /// threshold.
    pub f_counts: Vec<u64>,
    pub estimates: LimitEstimates,
}

/// Prefix sums, excursion counts, and tail-window limit estimates for the
/// first `n` digits. Every digit must satisfy `|a| >= 2`; each term's
/// slack `ln |a| - chi(a)` is checked against its certified floors.
pub fn digit_statistics(
    digits: &DigitSequence,
    delta: &BigRational,
    n: usize,
    window: usize,
) -> Result<StatsSeries, StatsError> {
    if n == 0 {
        return Err(StatsError::EmptyDigits);
    }
    if window == 0 {
        return Err(StatsError::BadWindow);
    }
    if digits.digits.len() < n {
        return Err(StatsError::ShortDigits {
            have: digits.digits.len(),
            need: n,
        });
    }
    let thresholds = digit_thresholds(delta)?;
    let floor = quarter_ln_nine_fifths();
    let eta = eta_value();
    let mut alpha = Vec::with_capacity(n + 1);
    let mut omega = Vec::with_capacity(n + 1);
    let mut e_counts = Vec::with_capacity(n + 1);
    let mut f_counts = Vec::with_capacity(n + 1);
    alpha.push(CertifiedReal::zero());
    omega.push(CertifiedReal::zero());
    e_counts.push(0u64);
    f_counts.push(0u64);
    for (j, &a) in digits.digits[..n].iter().enumerate() {
        if a.unsigned_abs() < 2 {
            return Err(StatsError::DigitTooSmall(j));
        }
        let mag = i64::try_from(a.unsigned_abs()).unwrap_or(i64::MAX);
        let term = CertifiedReal::from_int(mag).ln();
        let chi = chi_constant(a)?;
        let slack = term.sub(&chi);
        assert_ne!(
            slack.try_cmp(&floor, TERM_BITS),
            Some(Ordering::Less),
            "digit slack fell below the quarter-log floor; this indicates an arithmetic bug"
        );
        assert_ne!(
            slack.try_cmp(&term.mul(&eta), TERM_BITS),
            Some(Ordering::Less),
            "digit slack fell below its eta share; this indicates an arithmetic bug"
        );
        alpha.push(alpha[j].add(&term));
        omega.push(omega[j].add(&slack));
        let e_hit = thresholds.certain.cmp_int(mag) == Ordering::Less;
        let f_hit = thresholds.possible.cmp_int(mag) == Ordering::Less;
        e_counts.push(e_counts[j] + u64::from(e_hit));
        f_counts.push(f_counts[j] + u64::from(f_hit));
    }
    let w = window.min(n);
    let mut est = LimitEstimates {
        alpha_low: f64::INFINITY,
        alpha_high: f64::NEG_INFINITY,
        omega_low: f64::INFINITY,
        omega_high: f64::NEG_INFINITY,
        e_low: f64::INFINITY,
        e_high: f64::NEG_INFINITY,
        f_low: f64::INFINITY,
        f_high: f64::NEG_INFINITY,
        window: w,
    };
    for np in (n - w + 1)..=n {
        let scale = 1.0 / np as f64;
        let a_rate = alpha[np].to_f64() * scale;
        let o_rate = omega[np].to_f64() * scale;
        let e_rate = e_counts[np] as f64 * scale;
        let f_rate = f_counts[np] as f64 * scale;
        est.alpha_low = est.alpha_low.min(a_rate);
        est.alpha_high = est.alpha_high.max(a_rate);
        est.omega_low = est.omega_low.min(o_rate);
        est.omega_high = est.omega_high.max(o_rate);
        est.e_low = est.e_low.min(e_rate);
        est.e_high = est.e_high.max(e_rate);
        est.f_low = est.f_low.min(f_rate);
        est.f_high = est.f_high.max(f_rate);
    }
    Ok(StatsSeries {
        source: digits.source.clone(),
        digits: digits.digits[..n].to_vec(),
        delta: delta.clone(),
        alpha,
        omega,
        e_counts,
        f_counts,
        estimates: est,
    })
}

/// `ln(9/5) / 4`, the per-digit floor of the slack `ln |a| - chi(a)`.
pub fn quarter_ln_nine_fifths() -> CertifiedReal {
    ln_rational(rat(9, 5)).scale(&rat(1, 4))
}

/// `ln(9/5) / (4 ln 3)`, the least share of `ln |a|` left after the chi
/// deduction.
pub fn eta_value() -> CertifiedReal {
    ln_rational(rat(9, 5)).div(&CertifiedReal::from_int(3).ln().scale(&rat(4, 1)))
}

/// Half the per-segment slack bound between return time and `2 ln |a|`.
pub fn c_zero() -> CertifiedReal {
    segment_slack_bound().scale(&rat(1, 2))
}

/// Certified values of the coding constants.
#[derive(Debug, Clone)]
pub struct ConstantsTable {
    pub lambda: QuadraticSurd,
    pub mu: QuadraticSurd,
    pub c_zero: CertifiedReal,
    pub eta: CertifiedReal,
    /// Per-digit slack floor `ln(9/5) / 4`.
    pub slack_floor: CertifiedReal,
    /// Chi value `ln(3 sqrt 5) / 2` shared by all digits with `|a| >= 3`.
    pub chi_large: CertifiedReal,
    pub chi_two: CertifiedReal,
    /// Lower end `ln(16/11) / 2` of the bracket enclosing `chi_two`.
    pub chi_two_low: CertifiedReal,
    /// Upper end `ln(3/2) / 2` of the bracket enclosing `chi_two`.
    pub chi_two_high: CertifiedReal,
    /// `(1 - mu^2)^{1/4}`, the least section height over the arc.
    pub arc_clearance: CertifiedReal,
    /// `sqrt(2/pi)`, the cap on admissible band heights.
    pub delta_cap: CertifiedReal,
    /// Normalizing constant `2 / ln(5/3)` of the invariant digit measure.
    pub gauss_constant: CertifiedReal,
}

/// Builds the table of coding constants.
pub fn constants() -> ConstantsTable {
    let mu_surd = mu();
    let mu_sq = &mu_surd * &mu_surd;
    let one_minus = &QuadraticSurd::one() - &mu_sq;
    ConstantsTable {
        lambda: lambda(),
        mu: mu_surd,
        c_zero: c_zero(),
        eta: eta_value(),
        slack_floor: quarter_ln_nine_fifths(),
        chi_large: chi_constant(3).expect("digit three is admissible"),
        chi_two: chi_constant(2).expect("digit two is admissible"),
        chi_two_low: ln_rational(rat(16, 11)).scale(&rat(1, 2)),
        chi_two_high: ln_rational(rat(3, 2)).scale(&rat(1, 2)),
        arc_clearance: CertifiedReal::from_surd(&one_minus).sqrt().sqrt(),
        delta_cap: CertifiedReal::from_int(2).div(&certified_pi()).sqrt(),
        gauss_constant: gauss_constant(),
    }
}

impl ConstantsTable {
    /// Name and value rows for tabular display.
    pub fn rows(&self) -> Vec<(&'static str, CertifiedReal)> {
        vec![
            ("lambda", CertifiedReal::from_surd(&self.lambda)),
            ("mu", CertifiedReal::from_surd(&self.mu)),
            ("c0", self.c_zero.clone()),
            ("eta", self.eta.clone()),
            ("slack_floor", self.slack_floor.clone()),
            ("chi_large", self.chi_large.clone()),
            ("chi_two", self.chi_two.clone()),
            ("chi_two_low", self.chi_two_low.clone()),
            ("chi_two_high", self.chi_two_high.clone()),
            ("arc_clearance", self.arc_clearance.clone()),
            ("delta_cap", self.delta_cap.clone()),
            ("gauss_constant", self.gauss_constant.clone()),
        ]
    }
}

/// `2 / ln(5/3)`, the normalizing constant of the invariant digit measure.
pub fn gauss_constant() -> CertifiedReal {
    CertifiedReal::from_int(2).div(&ln_rational(rat(5, 3)))
}

/// The invariant measure of the digit map: density `c / (4 - x^2)` on
/// `[-1/2, 1/2]` with `c = 2 / ln(5/3)`.
#[derive(Debug, Clone)]
pub struct GaussMeasure {
    pub constant: CertifiedReal,
}

impl Default for GaussMeasure {
    fn default() -> Self {
        Self::new()
    }
}

impl GaussMeasure {
    pub fn new() -> Self {
        GaussMeasure {
            constant: gauss_constant(),
        }
    }

    /// Measure of `[lo, hi]` through the antiderivative
    /// `ln((2 + x) / (2 - x)) / 4`, folded into a single logarithm of an
    /// exact rational.
    pub fn interval(&self, lo: &BigRational, hi: &BigRational) -> Result<CertifiedReal, StatsError> {
        let half = rat(1, 2);
        if lo < &-half.clone() || hi < lo || hi > &half {
            return Err(StatsError::BadMeasureInterval);
        }
        let two = rat(2, 1);
        let ratio = ((&two + hi) * (&two - lo)) / ((&two - hi) * (&two + lo));
        Ok(ln_rational(ratio).div(&ln_rational(rat(5, 3)).scale(&two)))
    }

    /// Total measure of non-overlapping intervals; shared endpoints are
    /// allowed.
    pub fn union(
        &self,
        intervals: &[(BigRational, BigRational)],
    ) -> Result<CertifiedReal, StatsError> {
        let mut sorted: Vec<&(BigRational, BigRational)> = intervals.iter().collect();
        sorted.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        for pair in sorted.windows(2) {
            if pair[0].1 > pair[1].0 {
                return Err(StatsError::BadMeasureInterval);
            }
        }
        let parts = sorted
            .iter()
            .map(|(lo, hi)| self.interval(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CertifiedReal::sum(parts.iter()))
    }
}

/// Generic per-digit values under the invariant measure.
#[derive(Debug, Clone)]
pub struct GaussGeneric {
    /// Mean of `ln |a|`: the series over digit magnitudes is summed until
    /// a term drops below the tolerance, then completed with the integral
    /// tail of the summand, so the total is far more accurate than the
    /// stopping tolerance.
    pub alpha: f64,
    /// Last digit magnitude included in the explicit sum.
    pub cutoff: u64,
    /// Measure of the digit tail `|a| > k`.
    pub e_generic: CertifiedReal,
    /// Measure of the digit tail `|a| > l`.
    pub f_generic: CertifiedReal,
    /// `floor(2/delta + 1)`.
    pub k: BigInt,
    /// `floor(2/delta - 3/2)`.
    pub l: BigInt,
}

/// Expected excursion statistics of a measure-typical digit sequence.
pub fn gauss_generic(delta: &BigRational, tol: f64) -> Result<GaussGeneric, StatsError> {
    if !delta.is_positive() {
        return Err(StatsError::BadDelta(delta.clone()));
    }
    if tol <= 0.0 || !tol.is_finite() || tol.is_nan() {
        return Err(StatsError::BadTolerance);
    }
    let two_over = rat(2, 1) / delta;
    let k = (&two_over + rat(1, 1)).floor().to_integer();
    let l = (&two_over - rat(3, 2)).floor().to_integer();
    if l < BigInt::from(2) {
        return Err(StatsError::DeltaTooLarge(delta.clone()));
    }
    let measure = GaussMeasure::new();
    let k_inv = BigRational::new(BigInt::from(1), k.clone());
    let l_inv = BigRational::new(BigInt::from(1), l.clone());
    let e_generic = measure.interval(&-k_inv.clone(), &k_inv)?;
    let f_generic = measure.interval(&-l_inv.clone(), &l_inv)?;

    let c = 2.0 / (5.0f64 / 3.0).ln();
    let anti = |x: f64| 0.25 * ((2.0 + x) / (2.0 - x)).ln();
    let mut alpha = 0.0;
    let mut a = 2u64;
    loop {
        let hi = (1.0 / (a as f64 - 0.5)).min(0.5);
        let lo = 1.0 / (a as f64 + 0.5);
        let term = 2.0 * (a as f64).ln() * c * (anti(hi) - anti(lo));
        alpha += term;
        if term < tol {
            break;
        }
        a += 1;
    }
    let edge = a as f64 + 0.5;
    alpha += 0.5 * c * (edge.ln() + 1.0) / edge;
    Ok(GaussGeneric {
        alpha,
        cutoff: a,
        e_generic,
        f_generic,
        k,
        l,
    })
}

/// Area `delta * ln(tau / kappa)` of the band
/// `{0 < Q < delta, kappa < L- <= tau}`; the unimodular change of
/// variables sending the factors to coordinates identifies the band with
/// `{0 < uv < delta, kappa < v <= tau}`.
pub fn region_area(
    delta: &BigRational,
    kappa: &BigRational,
    tau: &BigRational,
) -> Result<CertifiedReal, StatsError> {
    if !delta.is_positive() || !kappa.is_positive() || tau < kappa {
        return Err(StatsError::BadArea);
    }
    Ok(ln_rational(tau / kappa).scale(delta))
}

/// Orbit average of `ln |a|` along the digit map `x -> -1/x - a`.
#[derive(Debug, Clone, Copy)]
pub struct BirkhoffRun {
    pub average: f64,
    /// Steps actually taken.
    pub steps: usize,
    /// True when the orbit reached an exact pole and stopped early.
    pub terminated: bool,
}

/// Iterates the digit map from a rational seed, averaging `ln |a|` over
/// the digits produced. The iteration is gcd-free: a state `p/q` steps to
/// `(-q - a p) / p` whose parts never grow, so deep orbits of seeds with
/// huge denominators stay cheap.
pub fn birkhoff_average(seed: &BigRational, steps: usize) -> Result<BirkhoffRun, StatsError> {
    if seed.is_zero() || seed.abs() > rat(1, 2) {
        return Err(StatsError::BadSeed(seed.clone()));
    }
    let mut p = seed.numer().clone();
    let mut q = seed.denom().clone();
    let mut total = 0.0;
    let mut done = 0usize;
    while done < steps {
        if p.is_zero() {
            break;
        }
        let neg_q = -&q;
        let a = nearest_of_pair(&neg_q, &p);
        total += a
            .to_f64()
            .expect("digits of bounded states fit in floating point")
            .abs()
            .ln();
        let numer = neg_q - &a * &p;
        q = std::mem::replace(&mut p, numer);
        if q.is_negative() {
            q = -q;
            p = -p;
        }
        done += 1;
    }
    let average = if done == 0 { 0.0 } else { total / done as f64 };
    Ok(BirkhoffRun {
        average,
        steps: done,
        terminated: done < steps,
    })
}

/// Nearest integer to `n / d` for `d != 0`, ties toward positive infinity.
fn nearest_of_pair(n: &BigInt, d: &BigInt) -> BigInt {
    use num_integer::Integer;
    let (n, d) = if d.is_negative() {
        (-n, -d)
    } else {
        (n.clone(), d.clone())
    };
    let two = BigInt::from(2);
    (&n * &two + &d).div_floor(&(&d * &two))
}

/// Asymptotic bracket for `count / ln rho` built from window estimates.
#[derive(Debug, Clone, Copy)]
pub struct SlopeBracket {
    pub lower: f64,
    pub upper: f64,
    /// True when the lower bound was floored to zero because the running
    /// `alpha` average had no finite estimate.
    pub lower_floored: bool,
}

/// Bracket `[(1 - eps) e_low / (alpha_high + c0), (1 + eps)(f_high + eps) / rate]`
/// for the asymptotic count per unit of `ln rho`.
pub fn slope_bracket(
    series: &StatsSeries,
    epsilon: f64,
    rate: f64,
) -> Result<SlopeBracket, StatsError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(StatsError::BadEpsilon);
    }
    let est = &series.estimates;
    if rate <= 0.0 || rate.is_nan() || rate > est.omega_high {
        return Err(StatsError::BadRate);
    }
    let c0 = c_zero().to_f64();
    let (lower, lower_floored) = if est.alpha_high.is_finite() {
        ((1.0 - epsilon) * est.e_low / (est.alpha_high + c0), false)
    } else {
        (0.0, true)
    };
    let upper = (1.0 + epsilon) * (est.f_high + epsilon) / rate;
    Ok(SlopeBracket {
        lower,
        upper,
        lower_floored,
    })
}

/// One side of the counting inequality at a grid radius.
#[derive(Debug, Clone, Copy)]
pub struct BoundRow {
    /// Prefix length whose hypothesis the radius satisfies.
    pub n: usize,
    /// Excursion count `e` or `f` at that prefix length.
    pub excursions: u64,
    /// The implied bound on the lattice count.
    pub bound: i64,
    pub pass: bool,
}

/// Lattice count at one radius together with both counting bounds.
#[derive(Debug, Clone)]
pub struct VerificationRow {
    pub rho: BigRational,
    pub log_rho: f64,
    pub count: u64,
    /// `count >= excursions - nu` at the largest admissible prefix.
    pub lower: Option<BoundRow>,
    /// `count <= excursions + nu` at the smallest admissible prefix.
    pub upper: Option<BoundRow>,
}

/// Outcome of checking the counting inequalities over a radius grid.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub form: String,
    pub delta: BigRational,
    pub kappa: QuadraticSurd,
    /// Shift `|t'|` locating the base point `g(i)` on the coded geodesic.
    pub theta: CertifiedReal,
    /// True when the base point sits at or before the first section
    /// crossing, making every return time late.
    pub base_before_entry: bool,
    /// Section crossings with return time below the shift.
    pub nu: u64,
    /// Segments coded to cover the shift and the radius grid.
    pub segments: usize,
    pub series: StatsSeries,
    pub rows: Vec<VerificationRow>,
    /// Least-squares slope of count against `ln rho`, through the origin.
    pub fitted_slope: f64,
    pub epsilon: f64,
    /// Rate divisor used for the upper end of the bracket.
    pub rate: f64,
    pub bracket: SlopeBracket,
    pub wall: Duration,
}

/// The image of `i` under the matrix, in exact coordinates.
fn base_point(m: &RealMatrix) -> Result<CrossingPoint, StatsError> {
    let m11 = m.entry(0, 0);
    let m12 = m.entry(0, 1);
    let m21 = m.entry(1, 0);
    let m22 = m.entry(1, 1);
    let norm = &(m21 * m21) + &(m22 * m22);
    let x = &(&(m11 * m21) + &(m12 * m22)) / &norm;
    let y_sq = (&norm * &norm).inv();
    Ok(CrossingPoint::new(x, y_sq)?)
}

fn delta_below_cap(delta: &BigRational) -> bool {
    let scaled = certified_pi().scale(&(delta * delta));
    scaled.try_cmp(&CertifiedReal::from_int(2), CMP_BITS) == Some(Ordering::Less)
}

/// Counts lattice points of the band `0 < |Q| < delta^2 / 2` past the cut
/// `L- > kappa` at each radius, and checks the counting inequalities
/// `count >= e(delta, n) - nu` and `count <= f(delta, n) + nu` at the
/// prefix lengths `n` the radius admits. The shift `theta` and crossing
/// count `nu` are computed from the coded geodesic, not assumed; every
/// prefix selection is certified, with indecision resolved toward the
/// weaker claim.
pub fn verify_reduced_bounds(
    form: &BinaryForm,
    delta: &BigRational,
    kappa: &QuadraticSurd,
    rho_grid: &[BigRational],
) -> Result<VerificationReport, StatsError> {
    let start = Instant::now();
    if !form.is_h_reduced() {
        return Err(StatsError::NotReduced);
    }
    if !delta.is_positive() || !delta_below_cap(delta) {
        return Err(StatsError::BadDelta(delta.clone()));
    }
    if !kappa.is_positive() {
        return Err(StatsError::BadKappa);
    }
    if rho_grid.is_empty() {
        return Err(StatsError::EmptyGrid);
    }
    for rho in rho_grid {
        if !rho.is_positive() {
            return Err(StatsError::BadRho(rho.clone()));
        }
    }
    let (u_pt, w_pt) = form.endpoints();
    let (u, w) = match (u_pt.finite(), w_pt.finite()) {
        (Some(u), Some(w)) => (u.clone(), w.clone()),
        _ => return Err(StatsError::NotReduced),
    };
    let base = base_point(form.matrix())?;
    let rho_max = rho_grid.iter().max().expect("grid is nonempty");
    let ln_rho_max = ln_rational(rho_max.clone());
    let c0 = c_zero();

    let mut n_trace = 16usize;
    let (series, theta, forward, crossing_times) = loop {
        let records = trace_segments(&u, &w, n_trace, &[])?;
        let digits: Vec<i64> = records.iter().map(|r| r.digit).collect();
        let seq = DigitSequence {
            digits,
            period: None,
            source: format!("{w}"),
            exhausted: false,
        };
        let series = digit_statistics(&seq, delta, n_trace, n_trace.div_ceil(2))?;
        let entry = &records[0].entry;
        let theta = hyp_distance(entry, &base)?;
        let forward = (&base.x - &entry.x).signum() * (&w - &u).signum() > 0;
        let mut crossing_times = Vec::with_capacity(n_trace + 1);
        crossing_times.push(CertifiedReal::zero());
        for record in &records {
            let last = crossing_times.last().expect("seeded with zero");
            crossing_times.push(last.add(&record.time));
        }
        let shift_covered = !forward
            || crossing_times[n_trace].try_cmp(&theta, CMP_BITS) == Some(Ordering::Greater);
        let alpha_end = series.alpha[n_trace]
            .add(&c0.scale(&BigRational::from_integer(BigInt::from(n_trace))))
            .add(&theta);
        let omega_end = series.omega[n_trace].sub(&theta);
        let grid_covered = alpha_end.try_cmp(&ln_rho_max, CMP_BITS) == Some(Ordering::Greater)
            && omega_end.try_cmp(&ln_rho_max, CMP_BITS) == Some(Ordering::Greater);
        if shift_covered && grid_covered {
            break (series, theta, forward, crossing_times);
        }
        if n_trace >= SEGMENT_BUDGET {
            return Err(StatsError::ShortCoding(SEGMENT_BUDGET));
        }
        n_trace = (n_trace * 2).min(SEGMENT_BUDGET);
    };

    let nu = if forward {
        crossing_times
            .iter()
            .filter(|t| !matches!(t.try_cmp(&theta, TIE_BITS), Some(Ordering::Greater)))
            .count() as u64
    } else {
        0
    };

    let mut lower_side = Vec::with_capacity(n_trace + 1);
    let mut upper_side = Vec::with_capacity(n_trace + 1);
    for n in 0..=n_trace {
        let weight = BigRational::from_integer(BigInt::from(n));
        lower_side.push(series.alpha[n].add(&c0.scale(&weight)).add(&theta));
        upper_side.push(series.omega[n].sub(&theta));
    }

    let rows = rho_grid
        .par_iter()
        .map(|rho| {
            let ln_rho = ln_rational(rho.clone());
            let query = CountQuery {
                form: form.clone(),
                delta: delta.clone(),
                kappa: kappa.clone(),
                rho: rho.clone(),
                kind: RegionKind::ReducedBand,
            };
            let counted = count_region(&query, &CountOptions::default())?;
            let count = counted.count;
            let mut lower = None;
            for (n, side) in lower_side.iter().enumerate() {
                match side.try_cmp(&ln_rho, CMP_BITS) {
                    Some(Ordering::Less) | Some(Ordering::Equal) => {
                        let bound = series.e_counts[n] as i64 - nu as i64;
                        lower = Some(BoundRow {
                            n,
                            excursions: series.e_counts[n],
                            bound,
                            pass: count as i64 >= bound,
                        });
                    }
                    _ => break,
                }
            }
            let mut upper = None;
            for (n, side) in upper_side.iter().enumerate() {
                match ln_rho.try_cmp(side, CMP_BITS) {
                    Some(Ordering::Less) | Some(Ordering::Equal) => {
                        let bound = series.f_counts[n] as i64 + nu as i64;
                        upper = Some(BoundRow {
                            n,
                            excursions: series.f_counts[n],
                            bound,
                            pass: (count as i64) <= bound,
                        });
                        break;
                    }
                    _ => {}
                }
            }
            Ok(VerificationRow {
                rho: rho.clone(),
                log_rho: ln_rho.to_f64(),
                count,
                lower,
                upper,
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;

    let mut slope_num = 0.0;
    let mut slope_den = 0.0;
    for row in &rows {
        slope_num += row.count as f64 * row.log_rho;
        slope_den += row.log_rho * row.log_rho;
    }
    let fitted_slope = if slope_den > 0.0 {
        slope_num / slope_den
    } else {
        0.0
    };

    let epsilon = 0.1;
    let rate = series.estimates.omega_low;
    let bracket = slope_bracket(&series, epsilon, rate)?;

    Ok(VerificationReport {
        form: form.to_string(),
        delta: delta.clone(),
        kappa: kappa.clone(),
        theta,
        base_before_entry: !forward,
        nu,
        segments: n_trace,
        series,
        rows,
        fitted_slope,
        epsilon,
        rate,
        bracket,
        wall: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::periodic_value;
    use crate::hyperbolic::{digit_cusp_criterion, CuspVerdict};
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    fn seq(digits: &[i64]) -> DigitSequence {
        DigitSequence {
            digits: digits.to_vec(),
            period: None,
            source: "test digits".into(),
            exhausted: false,
        }
    }

    fn assert_close(x: &CertifiedReal, want: f64, tol: f64) {
        let got = x.to_f64();
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} within {tol}"
        );
    }

    fn periodic_form(block: &[i64]) -> BinaryForm {
        let w = periodic_value(block).expect("block is a valid cycle");
        let (p, q, d, r) = w.parts();
        let u = QuadraticSurd::new(p.clone(), -q.clone(), d.clone(), r.clone())
            .expect("conjugate shares the radicand");
        BinaryForm::from_endpoints(&u, &w).expect("endpoints are distinct")
    }

    #[test]
    fn threshold_values() {
        let t = digit_thresholds(&rat(1, 2)).unwrap();
        let lam = lambda();
        assert_eq!(
            &t.certain - &lam,
            QuadraticSurd::from_rational(&rat(17, 2))
        );
        assert_eq!(
            &t.possible - &lam,
            QuadraticSurd::from_rational(&rat(13, 2))
        );
        assert!((t.certain.to_f64() - 8.881_966).abs() < 1e-5);
        assert!((t.possible.to_f64() - 6.881_966).abs() < 1e-5);
        let band = band_digit_thresholds(&rat(7, 10)).unwrap();
        assert_eq!(
            &band.certain - &lam,
            QuadraticSurd::from_rational(&rat(27, 14))
        );
        assert!(digit_thresholds(&rat(0, 1)).is_err());
        assert!(band_digit_thresholds(&rat(-1, 2)).is_err());
    }

    #[test]
    fn thresholds_agree_with_cusp_verdicts() {
        for delta in [rat(3, 10), rat(1, 2), rat(7, 10), rat(1, 1)] {
            let t = digit_thresholds(&delta).unwrap();
            for mag in 2i64..=40 {
                for a in [mag, -mag] {
                    let verdict = digit_cusp_criterion(a, &delta).unwrap();
                    let e_hit = t.certain.cmp_int(mag) == Ordering::Less;
                    let f_hit = t.possible.cmp_int(mag) == Ordering::Less;
                    match verdict {
                        CuspVerdict::Intersects => assert!(e_hit && f_hit, "digit {a}"),
                        CuspVerdict::Indeterminate => assert!(!e_hit && f_hit, "digit {a}"),
                        CuspVerdict::Misses => assert!(!e_hit && !f_hit, "digit {a}"),
                    }
                }
            }
        }
    }

    #[test]
    fn stats_of_constant_threes() {
        let series = digit_statistics(&seq(&[3, 3, 3, 3]), &rat(1, 2), 4, 4).unwrap();
        assert_close(&series.alpha[4], 4.394_449_154_672_439, 1e-9);
        assert_close(&series.omega[4], 0.587_786_664_902_119, 1e-9);
        assert_eq!(series.e_counts, vec![0, 0, 0, 0, 0]);
        assert_eq!(series.f_counts, vec![0, 0, 0, 0, 0]);
        let est = &series.estimates;
        assert!((est.alpha_low - est.alpha_high).abs() < 1e-12);
        assert!((est.alpha_low - 1.098_612_288_668_11).abs() < 1e-9);
        assert!((est.omega_low - 0.146_946_666_225_53).abs() < 1e-9);
        assert_eq!(est.window, 4);
    }

    #[test]
    fn stats_of_alternating_twos() {
        let series = digit_statistics(&seq(&[2, -2, 2, -2]), &rat(1, 2), 4, 2).unwrap();
        assert_close(&series.alpha[4], 2.772_588_722_239_781, 1e-9);
        let omega = series.omega[4].to_f64();
        assert!(
            (1.961_658_506..=2.023_201_824).contains(&omega),
            "omega ended at {omega}"
        );
        assert_eq!(series.e_counts[4], 0);
        assert_eq!(series.f_counts[4], 0);
        assert_eq!(series.estimates.window, 2);
    }

    #[test]
    fn excursion_counts_at_unit_delta() {
        let series = digit_statistics(&seq(&[2, 3, -2, 5]), &rat(1, 1), 4, 4).unwrap();
        assert_eq!(series.e_counts, vec![0, 0, 1, 1, 2]);
        assert_eq!(series.f_counts, vec![0, 1, 2, 3, 4]);
        for n in 0..=4 {
            assert!(series.e_counts[n] <= series.f_counts[n]);
            assert!(series.f_counts[n] <= n as u64);
        }
    }

    #[test]
    fn digit_statistics_rejections() {
        let err = digit_statistics(&seq(&[2, 3, 1, 5]), &rat(1, 2), 4, 4).unwrap_err();
        assert!(matches!(err, StatsError::DigitTooSmall(2)));
        assert!(matches!(
            digit_statistics(&seq(&[2, 3]), &rat(1, 2), 3, 2),
            Err(StatsError::ShortDigits { have: 2, need: 3 })
        ));
        assert!(matches!(
            digit_statistics(&seq(&[2, 3]), &rat(1, 2), 0, 1),
            Err(StatsError::EmptyDigits)
        ));
        assert!(matches!(
            digit_statistics(&seq(&[2, 3]), &rat(1, 2), 2, 0),
            Err(StatsError::BadWindow)
        ));
        assert!(matches!(
            digit_statistics(&seq(&[2, 3]), &rat(0, 1), 2, 2),
            Err(StatsError::BadDelta(_))
        ));
    }

    #[test]
    fn estimates_range_over_the_window() {
        let series = digit_statistics(&seq(&[2, 2, 2, 9, 9, 9]), &rat(1, 1), 6, 3).unwrap();
        let est = &series.estimates;
        assert!((est.alpha_low - 1.069_166_529_754_013_8).abs() < 1e-9);
        assert!((est.alpha_high - 1.445_185_878_948_082_4).abs() < 1e-9);
        assert!((est.e_low - 0.25).abs() < 1e-12);
        assert!((est.e_high - 0.5).abs() < 1e-12);
        assert_eq!(est.window, 3);
    }

    #[test]
    fn constants_table_values() {
        let table = constants();
        assert_close(&table.c_zero, 1.139_892_028_902_177_7, 1e-12);
        assert_close(&table.eta, 0.133_756_619_820_518_2, 1e-12);
        assert_close(&table.slack_floor, 0.146_946_666_225_529_75, 1e-12);
        assert_close(&table.chi_large, 0.951_665_622_442_579_9, 1e-12);
        assert_close(&table.chi_two, 0.199_673_828_796_547_5, 1e-12);
        assert_close(&table.arc_clearance, 0.819_766_117_289_024_1, 1e-12);
        assert_close(&table.delta_cap, 0.797_884_560_802_865_4, 1e-12);
        assert_close(&table.gauss_constant, 3.915_230_377_942_435_4, 1e-12);
        let eighth = CertifiedReal::from_rational(rat(1, 8));
        assert_eq!(table.eta.try_cmp(&eighth, 64), Some(Ordering::Greater));
        assert_eq!(
            table.delta_cap.try_cmp(&table.arc_clearance, 64),
            Some(Ordering::Less)
        );
        assert_eq!(
            table.chi_two.try_cmp(&table.chi_two_low, 64),
            Some(Ordering::Greater)
        );
        assert_eq!(
            table.chi_two.try_cmp(&table.chi_two_high, 64),
            Some(Ordering::Less)
        );
        assert_eq!(table.rows().len(), 12);
    }

    #[test]
    fn slack_identities_at_digit_three() {
        let term = CertifiedReal::from_int(3).ln();
        let slack = term.sub(&chi_constant(3).unwrap());
        let floor = quarter_ln_nine_fifths();
        assert_eq!(slack.try_cmp(&floor, 80), None);
        let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(20));
        let (lo, hi) = slack.sub(&floor).refine_until(&eps);
        assert!(!lo.is_positive() && !hi.is_negative());
        let eta_share = term.mul(&eta_value());
        assert_eq!(slack.try_cmp(&eta_share, 80), None);
    }

    #[test]
    fn gauss_measure_values() {
        let measure = GaussMeasure::new();
        let full = measure.interval(&rat(-1, 2), &rat(1, 2)).unwrap();
        let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(13));
        let (lo, hi) = full.refine_until(&eps);
        let one = BigRational::one();
        assert!((&one - &lo).abs() < rat(1, 1) / BigRational::from_integer(BigInt::from(10).pow(12)));
        assert!((&hi - &one).abs() < rat(1, 1) / BigRational::from_integer(BigInt::from(10).pow(12)));
        let third = measure.interval(&rat(-1, 3), &rat(1, 3)).unwrap();
        assert_close(&third, 0.658_683_161_076_804, 1e-12);
        let fifth = measure.interval(&rat(-1, 5), &rat(1, 5)).unwrap();
        assert_close(&fifth, 0.392_836_001_418_124_7, 1e-12);
        let tails = measure
            .union(&[(rat(1, 3), rat(1, 2)), (rat(-1, 2), rat(-1, 3))])
            .unwrap();
        assert_close(&tails, 1.0 - 0.658_683_161_076_804, 1e-12);
        assert!(measure.interval(&rat(1, 3), &rat(1, 4)).is_err());
        assert!(measure.interval(&rat(0, 1), &rat(3, 5)).is_err());
        assert!(measure
            .union(&[(rat(0, 1), rat(1, 2)), (rat(1, 4), rat(1, 3))])
            .is_err());
    }

    #[test]
    fn gauss_generic_values() {
        let generic = gauss_generic(&rat(1, 2), 1e-6).unwrap();
        assert_eq!(generic.k, BigInt::from(5));
        assert_eq!(generic.l, BigInt::from(2));
        assert_close(&generic.e_generic, 0.392_836_001_418_124_7, 1e-12);
        assert_close(&generic.f_generic, 1.0, 1e-12);
        assert!((generic.alpha - 1.665_565_450_592_3).abs() < 2e-6);
        assert!(generic.cutoff > 1_000);
        let finer = gauss_generic(&rat(1, 2), 1e-8).unwrap();
        assert!((generic.alpha - finer.alpha).abs() < 1e-6);
        assert!(matches!(
            gauss_generic(&rat(1, 1), 1e-6),
            Err(StatsError::DeltaTooLarge(_))
        ));
        assert!(matches!(
            gauss_generic(&rat(2, 3), 1e-6),
            Err(StatsError::DeltaTooLarge(_))
        ));
        assert!(matches!(
            gauss_generic(&rat(1, 2), 0.0),
            Err(StatsError::BadTolerance)
        ));
        assert!(matches!(
            gauss_generic(&rat(0, 1), 1e-6),
            Err(StatsError::BadDelta(_))
        ));
    }

    #[test]
    fn region_area_values() {
        let two_ln = region_area(&rat(1, 2), &rat(1, 1), &rat(4, 1)).unwrap();
        assert_close(&two_ln, std::f64::consts::LN_2, 1e-12);
        let near_square = region_area(
            &rat(1, 2),
            &rat(1, 1),
            &BigRational::new(BigInt::from(7_389_056_099i64), BigInt::from(1_000_000_000i64)),
        )
        .unwrap();
        assert_close(&near_square, 1.0, 1e-9);
        let empty = region_area(&rat(1, 2), &rat(3, 1), &rat(3, 1)).unwrap();
        assert!(empty.to_f64().abs() < 1e-15);
        assert!(region_area(&rat(1, 2), &rat(4, 1), &rat(3, 1)).is_err());
        assert!(region_area(&rat(0, 1), &rat(1, 1), &rat(2, 1)).is_err());
        assert!(region_area(&rat(1, 2), &rat(0, 1), &rat(2, 1)).is_err());
    }

    #[test]
    fn birkhoff_average_matches_generic() {
        let bits = 72_000u64;
        let q: BigInt = BigInt::one() << bits;
        let mut p = BigInt::from(3).modpow(&BigInt::from(50_001), &q);
        if &p * 2 > q {
            p = &q - &p;
        }
        let seed = BigRational::new(p, q);
        let run = birkhoff_average(&seed, 20_000).unwrap();
        assert_eq!(run.steps, 20_000);
        assert!(!run.terminated);
        let generic = gauss_generic(&rat(1, 2), 1e-8).unwrap();
        let relative = (run.average - generic.alpha).abs() / generic.alpha;
        assert!(
            relative < 0.08,
            "orbit average {} vs generic {}",
            run.average,
            generic.alpha
        );
        assert!(matches!(
            birkhoff_average(&rat(0, 1), 10),
            Err(StatsError::BadSeed(_))
        ));
        assert!(matches!(
            birkhoff_average(&rat(3, 4), 10),
            Err(StatsError::BadSeed(_))
        ));
    }

    #[test]
    fn short_orbits_terminate() {
        let run = birkhoff_average(&rat(1, 2), 50).unwrap();
        assert!(run.terminated);
        assert!(run.steps < 50);
    }

    #[test]
    fn slope_bracket_values() {
        let series = digit_statistics(&seq(&[9, 9, 9, 9]), &rat(1, 1), 4, 4).unwrap();
        let rate = series.estimates.omega_low;
        let bracket = slope_bracket(&series, 0.1, rate).unwrap();
        let alpha = 9.0f64.ln();
        let c0 = 1.139_892_028_902_177_7;
        let omega = alpha - 0.951_665_622_442_579_9;
        assert!((bracket.lower - 0.9 / (alpha + c0)).abs() < 1e-9);
        assert!((bracket.upper - 1.1 * 1.1 / omega).abs() < 1e-9);
        assert!(!bracket.lower_floored);
        let wider = slope_bracket(&series, 0.2, rate).unwrap();
        assert!(wider.lower < bracket.lower);
        assert!(wider.upper > bracket.upper);
        assert!(matches!(
            slope_bracket(&series, 0.0, rate),
            Err(StatsError::BadEpsilon)
        ));
        assert!(matches!(
            slope_bracket(&series, 1.0, rate),
            Err(StatsError::BadEpsilon)
        ));
        assert!(matches!(
            slope_bracket(&series, 0.1, 0.0),
            Err(StatsError::BadRate)
        ));
        assert!(matches!(
            slope_bracket(&series, 0.1, series.estimates.omega_high + 1.0),
            Err(StatsError::BadRate)
        ));
    }

    #[test]
    fn verify_constant_threes_form() {
        let form = periodic_form(&[3]);
        let report = verify_reduced_bounds(
            &form,
            &rat(1, 2),
            &QuadraticSurd::one(),
            &[rat(100, 1), rat(1000, 1)],
        )
        .unwrap();
        assert!(report.series.digits.iter().all(|&a| a == 3));
        for row in &report.rows {
            assert_eq!(row.count, 0, "no value of this form falls in the band");
            let lower = row.lower.expect("radius admits a lower prefix");
            assert_eq!(lower.excursions, 0);
            assert!(lower.bound <= 0);
            assert!(lower.pass);
            let upper = row.upper.expect("coding covers the radius");
            assert_eq!(upper.excursions, 0);
            assert!(upper.pass);
        }
        assert_eq!(report.fitted_slope, 0.0);
        assert_eq!(report.bracket.lower, 0.0);
        assert!(report.bracket.upper > 0.0);
    }

    #[test]
    fn verify_constant_tens_form() {
        let form = periodic_form(&[10]);
        let report = verify_reduced_bounds(
            &form,
            &rat(7, 10),
            &QuadraticSurd::one(),
            &[
                rat(100, 1),
                rat(500, 1),
                rat(2000, 1),
                rat(20_000, 1),
                rat(200_000, 1),
            ],
        )
        .unwrap();
        assert!(report.series.digits.iter().all(|&a| a == 10));
        for row in &report.rows {
            let lower = row.lower.expect("radius admits a lower prefix");
            assert!(lower.pass, "lower bound failed at rho {}", row.rho);
            let upper = row.upper.expect("coding covers the radius");
            assert!(upper.pass, "upper bound failed at rho {}", row.rho);
        }
        assert!(!report.base_before_entry);
        assert_eq!(report.nu, 1);
        let last = report.rows.last().unwrap();
        assert!(last.count >= 1, "the band should contain points");
        assert!(
            report.rows.iter().any(|r| r.lower.unwrap().bound >= 1),
            "the lower bound should bite somewhere on the grid"
        );
        assert!(report.fitted_slope > 0.0);
        assert!(report.bracket.lower <= report.fitted_slope);
        assert!(report.fitted_slope <= report.bracket.upper);
    }

    #[test]
    fn verify_rejections() {
        let form = periodic_form(&[3]);
        let grid = [rat(100, 1)];
        assert!(matches!(
            verify_reduced_bounds(&BinaryForm::standard(), &rat(1, 2), &QuadraticSurd::one(), &grid),
            Err(StatsError::NotReduced)
        ));
        assert!(matches!(
            verify_reduced_bounds(&form, &rat(4, 5), &QuadraticSurd::one(), &grid),
            Err(StatsError::BadDelta(_))
        ));
        assert!(matches!(
            verify_reduced_bounds(&form, &rat(0, 1), &QuadraticSurd::one(), &grid),
            Err(StatsError::BadDelta(_))
        ));
        assert!(matches!(
            verify_reduced_bounds(&form, &rat(1, 2), &QuadraticSurd::zero(), &grid),
            Err(StatsError::BadKappa)
        ));
        assert!(matches!(
            verify_reduced_bounds(&form, &rat(1, 2), &QuadraticSurd::one(), &[]),
            Err(StatsError::EmptyGrid)
        ));
        assert!(matches!(
            verify_reduced_bounds(&form, &rat(1, 2), &QuadraticSurd::one(), &[rat(0, 1)]),
            Err(StatsError::BadRho(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

        #[test]
        fn prefix_sums_respect_floors(
            digits in prop::collection::vec(
                (2i64..=60, any::<bool>()).prop_map(|(m, s)| if s { -m } else { m }),
                1..32,
            ),
            tenths in 1i64..=20,
        ) {
            let delta = rat(tenths, 10);
            let n = digits.len();
            let series = digit_statistics(&seq(&digits), &delta, n, n).unwrap();
            let ln2 = 2.0f64.ln();
            for k in 0..=n {
                prop_assert!(series.alpha[k].to_f64() >= k as f64 * ln2 - 1e-9);
                prop_assert!(series.omega[k].to_f64() >= k as f64 * 0.146_946_666 - 1e-9);
                prop_assert!(series.e_counts[k] <= series.f_counts[k]);
                prop_assert!(series.f_counts[k] <= k as u64);
                if k > 0 {
                    prop_assert!(series.alpha[k].to_f64() >= series.alpha[k - 1].to_f64() - 1e-12);
                }
            }
        }

        #[test]
        fn measure_is_additive(a in -500i64..=500, b in -500i64..=500, c in -500i64..=500) {
            let mut ends = [rat(a, 1000), rat(b, 1000), rat(c, 1000)];
            ends.sort();
            let measure = GaussMeasure::new();
            let whole = measure.interval(&ends[0], &ends[2]).unwrap().to_f64();
            let first = measure.interval(&ends[0], &ends[1]).unwrap().to_f64();
            let second = measure.interval(&ends[1], &ends[2]).unwrap().to_f64();
            prop_assert!((whole - first - second).abs() < 1e-10);
        }

        #[test]
        fn area_accumulates(
            tenths in 1i64..=9,
            k in 1i64..=50,
            first in 0u32..=6,
            second in 0u32..=6,
        ) {
            let delta = rat(tenths, 10);
            let kappa = rat(k, 7);
            let mid = &kappa * BigRational::from_integer(BigInt::from(1i64 << first));
            let top = &mid * BigRational::from_integer(BigInt::from(1i64 << second));
            let whole = region_area(&delta, &kappa, &top).unwrap().to_f64();
            let lo = region_area(&delta, &kappa, &mid).unwrap().to_f64();
            let hi = region_area(&delta, &mid, &top).unwrap().to_f64();
            prop_assert!((whole - lo - hi).abs() < 1e-10);
        }
    }
}

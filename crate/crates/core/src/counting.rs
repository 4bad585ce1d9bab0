//! Primitive lattice points in thin quadratic regions, and the component
//! count of flow times at which a sheared triangle meets the lattice.
//!
//! The counting side enumerates primitive integer vectors `p` with
//! `|p| <= rho` whose form value `Q(p)` falls in a prescribed band, with
//! optional cuts on the linear factors. Candidates come from narrow windows
//! around the two vanishing lines of `Q`, located in floating point with a
//! safety margin; every accept or reject decision is made in exact
//! arithmetic, and points that sit exactly on a defining boundary are
//! reported separately rather than silently classified.
//!
//! The flow side works with the triangle `W(sigma) = {0 < y < x <= sigma}`
//! pushed by the diagonal flow `a_t = diag(e^{t/2}, e^{-t/2})`. For a
//! lattice point `p` and unimodular `g`, the visit times
//! `{t >= 0 : a_{-t} g^{-1} p in W(sigma)}` form an interval computed here
//! exactly from `(x, y) = g^{-1} p`; merging the intervals of all primitive
//! candidates and clipping to `[0, 2 log(tau/sigma)]` yields the component
//! count that mirrors a lattice count near the geodesic. The triangle
//! parameter enters as its square `sigma_sq` so that `sigma = sqrt(epsilon)`
//! stays exact when only `epsilon` is rational.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::forms::{BinaryForm, RealMatrix};
use crate::numerics::{CertifiedReal, QuadraticSurd};

/// Which region of form values a [`CountQuery`] asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RegionKind {
    /// `0 < Q(p) < delta` with the cut `L-(p) > kappa`.
    MainBand,
    /// `0 < |Q(p)| < delta^2 / 2` with the cut `L-(p) > kappa`.
    ReducedBand,
    /// `0 < Q(p) < delta` with no cut; the result carries the split
    /// comparison against the two `sqrt(delta)`-cut halves.
    FullBand,
    /// `0 < Q(p) < delta` with the cut `L+(p) > kappa`.
    PlusCut,
}

/// A lattice counting request: form, value band, cut level, and ball radius.
#[derive(Debug, Clone)]
pub struct CountQuery {
    pub form: BinaryForm,
    pub delta: BigRational,
    pub kappa: QuadraticSurd,
    pub rho: BigRational,
    pub kind: RegionKind,
}

/// Options controlling a counting sweep.
#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Record every counted point, not just the total.
    pub witnesses: bool,
    /// Abort with [`CountError::Budget`] after this many columns.
    pub max_columns: Option<u64>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            witnesses: false,
            max_columns: None,
        }
    }
}

/// A counted lattice point together with its exact form value.
#[derive(Debug, Clone)]
pub struct Witness {
    pub x: i64,
    pub y: i64,
    pub value: QuadraticSurd,
}

/// Count of the full band next to the counts of its two cut halves, with
/// the cut level at `sqrt(delta)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SplitCheck {
    pub full: u64,
    pub minus_cut: u64,
    pub plus_cut: u64,
    /// `|full - 2 (minus_cut + plus_cut)|`.
    pub discrepancy: u64,
}

/// Outcome of a counting sweep.
#[derive(Debug, Clone)]
pub struct CountResult {
    pub count: u64,
    pub witnesses: Option<Vec<Witness>>,
    /// Points rejected because they sit exactly on a defining boundary
    /// (value equal to a band edge, or a linear factor equal to the cut).
    pub boundary: Vec<(i64, i64)>,
    pub split: Option<SplitCheck>,
    /// Columns `x` actually swept, including the `x = 0` column.
    pub columns: u64,
    pub wall: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum CountError {
    #[error("delta must be positive, got {0}")]
    BadDelta(BigRational),
    #[error("rho must be positive and representable, got {0}")]
    BadRho(BigRational),
    #[error("kappa must be nonnegative")]
    BadKappa,
    #[error("sigma_sq must satisfy 0 < sigma_sq < 1, got {0}")]
    BadSigmaSq(BigRational),
    #[error("the window needs tau > sigma > 0, got tau {0}")]
    BadTau(BigRational),
    #[error("column budget of {budget} exhausted; partial totals attached")]
    Budget {
        budget: u64,
        partial: Box<CountResult>,
    },
}

fn gcd_is_one(x: i64, y: i64) -> bool {
    num_integer::gcd(x.unsigned_abs(), y.unsigned_abs()) == 1
}

/// Exact test `x^2 + y^2 <= rho^2` for a rational `rho`, with an integer
/// fast path when `rho^2` has denominator one and fits `i128`.
struct NormBound {
    fast: Option<i128>,
    num: BigInt,
    den: BigInt,
}

impl NormBound {
    fn new(rho: &BigRational) -> Self {
        let sq = rho * rho;
        let fast = if sq.denom().is_one() {
            sq.numer().to_i128()
        } else {
            None
        };
        NormBound {
            fast,
            num: sq.numer().clone(),
            den: sq.denom().clone(),
        }
    }

    fn contains(&self, x: i64, y: i64) -> bool {
        let n = (x as i128) * (x as i128) + (y as i128) * (y as i128);
        match self.fast {
            Some(cap) => n <= cap,
            None => BigInt::from(n) * &self.den <= self.num,
        }
    }
}

#[derive(Clone)]
struct SweepCoeffs {
    a: QuadraticSurd,
    b: QuadraticSurd,
    c: QuadraticSurd,
    d: QuadraticSurd,
    ratio_plus: f64,
    ratio_minus: f64,
    ac_abs: f64,
    a_zero: bool,
    c_zero: bool,
}

impl SweepCoeffs {
    fn new(form: &BinaryForm) -> Self {
        let (a, b, c, d) = form.coefficients();
        let a_zero = a.is_zero();
        let c_zero = c.is_zero();
        let ratio_plus = if a_zero {
            0.0
        } else {
            (&-b.clone() / &a).to_f64()
        };
        let ratio_minus = if c_zero {
            0.0
        } else {
            (&-d.clone() / &c).to_f64()
        };
        let ac_abs = (&a * &c).abs().to_f64();
        SweepCoeffs {
            a,
            b,
            c,
            d,
            ratio_plus,
            ratio_minus,
            ac_abs,
            a_zero,
            c_zero,
        }
    }

    fn linear_plus(&self, x: i64, y: i64) -> QuadraticSurd {
        &(&self.a * &QuadraticSurd::from_int(y)) + &(&self.b * &QuadraticSurd::from_int(x))
    }

    fn linear_minus(&self, x: i64, y: i64) -> QuadraticSurd {
        &(&self.c * &QuadraticSurd::from_int(y)) + &(&self.d * &QuadraticSurd::from_int(x))
    }

    /// Centers and half-widths of the value windows in column `x`, in
    /// floating point with the safety margin added by the caller. The
    /// half-width is an upper bound for the connected piece of
    /// `{|Q(x, .)| < vbound}` around each vanishing line: writing `s` for
    /// the offset from the line of `L+`, the value is `s x + a c s^2`
    /// (determinant one), so `|s| > h` forces `|Q| >= |ac| s^2 - |s||x|`
    /// past the bound; the line of `L-` gives the mirrored polynomial.
    fn windows(&self, x: i64, vbound: f64) -> Vec<(f64, f64)> {
        let xf = x as f64;
        if self.a_zero {
            return vec![(self.ratio_minus * xf, vbound / xf.abs().max(1.0))];
        }
        if self.c_zero {
            return vec![(self.ratio_plus * xf, vbound / xf.abs().max(1.0))];
        }
        let half = if xf * xf >= 4.0 * self.ac_abs * vbound {
            2.0 * vbound / xf.abs()
        } else {
            2.5 * (vbound / self.ac_abs).sqrt()
        };
        vec![
            (self.ratio_plus * xf, half),
            (self.ratio_minus * xf, half),
        ]
    }

    /// Visits each candidate row of column `x` exactly once, walking the
    /// union of the value windows clipped to `|y| <= ymax`.
    fn candidate_rows(&self, x: i64, vbound: f64, ymax: f64, visit: &mut impl FnMut(i64)) {
        let mut ranges: Vec<(i64, i64)> = self
            .windows(x, vbound)
            .iter()
            .map(|(center, half)| {
                (
                    (center - half - WINDOW_PAD).max(-ymax).ceil() as i64,
                    (center + half + WINDOW_PAD).min(ymax).floor() as i64,
                )
            })
            .collect();
        ranges.sort();
        let mut done_hi = i64::MIN;
        for (lo, hi) in ranges {
            let lo = lo.max(done_hi.saturating_add(1));
            if lo > hi {
                continue;
            }
            done_hi = hi;
            for y in lo..=hi {
                visit(y);
            }
        }
    }
}

enum PointClass {
    Miss,
    Edge,
    Hit {
        value: QuadraticSurd,
        minus_cut: bool,
        plus_cut: bool,
    },
}

struct RegionTest {
    coeffs: SweepCoeffs,
    kind: RegionKind,
    vbound: BigRational,
    kappa: QuadraticSurd,
    split_cut: Option<QuadraticSurd>,
}

impl RegionTest {
    fn new(query: &CountQuery) -> Result<Self, CountError> {
        if !query.delta.is_positive() {
            return Err(CountError::BadDelta(query.delta.clone()));
        }
        if query.kappa.is_negative() {
            return Err(CountError::BadKappa);
        }
        let vbound = match query.kind {
            RegionKind::ReducedBand => {
                &(&query.delta * &query.delta) / &BigRational::from_integer(BigInt::from(2))
            }
            _ => query.delta.clone(),
        };
        let split_cut = match query.kind {
            RegionKind::FullBand => {
                Some(QuadraticSurd::sqrt_rational(&query.delta).expect("delta is positive"))
            }
            _ => None,
        };
        Ok(RegionTest {
            coeffs: SweepCoeffs::new(&query.form),
            kind: query.kind,
            vbound,
            kappa: query.kappa.clone(),
            split_cut,
        })
    }

    fn assess(&self, x: i64, y: i64) -> PointClass {
        let plus = self.coeffs.linear_plus(x, y);
        let minus = self.coeffs.linear_minus(x, y);
        let value = &plus * &minus;

        let band = match self.kind {
            RegionKind::ReducedBand => {
                if value.is_zero() {
                    return PointClass::Miss;
                }
                value.abs().cmp_rational(&self.vbound)
            }
            _ => {
                if !value.is_positive() {
                    return PointClass::Miss;
                }
                value.cmp_rational(&self.vbound)
            }
        };
        match band {
            Ordering::Greater => return PointClass::Miss,
            Ordering::Equal => return PointClass::Edge,
            Ordering::Less => {}
        }

        match self.kind {
            RegionKind::MainBand | RegionKind::ReducedBand => {
                match minus.cmp_value(&self.kappa) {
                    Ordering::Greater => {}
                    Ordering::Equal => return PointClass::Edge,
                    Ordering::Less => return PointClass::Miss,
                }
            }
            RegionKind::PlusCut => match plus.cmp_value(&self.kappa) {
                Ordering::Greater => {}
                Ordering::Equal => return PointClass::Edge,
                Ordering::Less => return PointClass::Miss,
            },
            RegionKind::FullBand => {}
        }

        let (minus_cut, plus_cut) = match &self.split_cut {
            None => (false, false),
            Some(cut) => {
                let m = minus.cmp_value(cut);
                let p = plus.cmp_value(cut);
                if m == Ordering::Equal || p == Ordering::Equal {
                    return PointClass::Edge;
                }
                (m == Ordering::Greater, p == Ordering::Greater)
            }
        };
        PointClass::Hit {
            value,
            minus_cut,
            plus_cut,
        }
    }
}

#[derive(Default)]
struct Tally {
    count: u64,
    minus_cut: u64,
    plus_cut: u64,
    witnesses: Vec<Witness>,
    boundary: Vec<(i64, i64)>,
}

impl Tally {
    fn absorb(&mut self, mut other: Tally) {
        self.count += other.count;
        self.minus_cut += other.minus_cut;
        self.plus_cut += other.plus_cut;
        self.witnesses.append(&mut other.witnesses);
        self.boundary.append(&mut other.boundary);
    }

    fn record(&mut self, test: &RegionTest, keep: bool, x: i64, y: i64) {
        match test.assess(x, y) {
            PointClass::Miss => {}
            PointClass::Edge => self.boundary.push((x, y)),
            PointClass::Hit {
                value,
                minus_cut,
                plus_cut,
            } => {
                self.count += 1;
                if minus_cut {
                    self.minus_cut += 1;
                }
                if plus_cut {
                    self.plus_cut += 1;
                }
                if keep {
                    self.witnesses.push(Witness { x, y, value });
                }
            }
        }
    }
}

const WINDOW_PAD: f64 = 3.0;
const SWEEP_CHUNK: i64 = 4096;

fn column_rows(
    test: &RegionTest,
    norm: &NormBound,
    keep: bool,
    vbound_f: f64,
    rho_f: f64,
    x: i64,
    tally: &mut Tally,
) {
    let xf = x as f64;
    let ymax = (rho_f * rho_f - xf * xf).max(0.0).sqrt() + 2.0;
    test.coeffs.candidate_rows(x, vbound_f, ymax, &mut |y| {
        if !gcd_is_one(x, y) || !norm.contains(x, y) {
            return;
        }
        tally.record(test, keep, x, y);
        tally.record(test, keep, -x, -y);
    });
}

fn finish(
    tally: Tally,
    kind: RegionKind,
    keep: bool,
    columns: u64,
    start: Instant,
) -> CountResult {
    let split = match kind {
        RegionKind::FullBand => {
            let doubled = 2 * (tally.minus_cut + tally.plus_cut);
            Some(SplitCheck {
                full: tally.count,
                minus_cut: tally.minus_cut,
                plus_cut: tally.plus_cut,
                discrepancy: tally.count.abs_diff(doubled),
            })
        }
        _ => None,
    };
    CountResult {
        count: tally.count,
        witnesses: if keep { Some(tally.witnesses) } else { None },
        boundary: tally.boundary,
        split,
        columns,
        wall: start.elapsed(),
    }
}

/// Counts primitive lattice points of norm at most `rho` whose form values
/// satisfy the region predicate, sweeping narrow windows around the two
/// vanishing lines and deciding each candidate exactly.
///
/// Points lying exactly on a boundary of the region are excluded from the
/// count and listed in [`CountResult::boundary`].
pub fn count_region(query: &CountQuery, options: &CountOptions) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let test = RegionTest::new(query)?;
    if !query.rho.is_positive() {
        return Err(CountError::BadRho(query.rho.clone()));
    }
    let rho_f = crate::numerics::rational_to_f64(&query.rho);
    let radius = query.rho.to_integer().to_i64().ok_or_else(|| CountError::BadRho(query.rho.clone()))?;
    let norm = NormBound::new(&query.rho);
    let vbound_f = crate::numerics::rational_to_f64(&test.vbound) * 1.0001 + 1e-12;
    let keep = options.witnesses;

    let mut tally = Tally::default();
    if radius >= 1 {
        tally.record(&test, keep, 0, 1);
        tally.record(&test, keep, 0, -1);
    }

    let budget = options.max_columns.unwrap_or(u64::MAX);
    let swept_cols = radius.min(budget.saturating_sub(1).min(i64::MAX as u64) as i64);
    let chunks: Vec<(i64, i64)> = (0i64..)
        .map(|k| (1 + k * SWEEP_CHUNK, ((k + 1) * SWEEP_CHUNK).min(swept_cols)))
        .take_while(|(lo, _)| *lo <= swept_cols)
        .collect();

    let parts: Vec<Tally> = chunks
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut part = Tally::default();
            for x in lo..=hi {
                column_rows(&test, &norm, keep, vbound_f, rho_f, x, &mut part);
            }
            part
        })
        .collect();
    for part in parts {
        tally.absorb(part);
    }

    let columns = 1 + swept_cols as u64;
    if swept_cols < radius {
        return Err(CountError::Budget {
            budget,
            partial: Box::new(finish(tally, query.kind, keep, columns, start)),
        });
    }
    Ok(finish(tally, query.kind, keep, columns, start))
}

/// Reference implementation of [`count_region`] that scans every column in
/// full. Slow; intended for cross-checking the windowed sweep.
pub fn count_region_brute(query: &CountQuery) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let test = RegionTest::new(query)?;
    if !query.rho.is_positive() {
        return Err(CountError::BadRho(query.rho.clone()));
    }
    let rho_f = crate::numerics::rational_to_f64(&query.rho);
    let radius = query.rho.to_integer().to_i64().ok_or_else(|| CountError::BadRho(query.rho.clone()))?;
    let norm = NormBound::new(&query.rho);

    let mut tally = Tally::default();
    if radius >= 1 {
        tally.record(&test, true, 0, 1);
        tally.record(&test, true, 0, -1);
    }
    for x in 1..=radius {
        let xf = x as f64;
        let ymax = ((rho_f * rho_f - xf * xf).max(0.0).sqrt() + 2.0) as i64;
        for y in -ymax..=ymax {
            if !gcd_is_one(x, y) || !norm.contains(x, y) {
                continue;
            }
            tally.record(&test, true, x, y);
            tally.record(&test, true, -x, -y);
        }
    }
    Ok(finish(tally, query.kind, true, 1 + radius as u64, start))
}

/// Streams the primitive integer vectors of norm at most `rho`, ordered by
/// first coordinate and then second. Requires `rho >= 1`.
pub fn primitive_points(
    rho: &BigRational,
) -> Result<impl Iterator<Item = (i64, i64)>, CountError> {
    if rho < &BigRational::one() {
        return Err(CountError::BadRho(rho.clone()));
    }
    let radius = rho
        .to_integer()
        .to_i64()
        .ok_or_else(|| CountError::BadRho(rho.clone()))?;
    let norm = NormBound::new(rho);
    let rho_f = crate::numerics::rational_to_f64(rho);
    Ok((-radius..=radius).flat_map(move |x| {
        let xf = x as f64;
        let ymax = ((rho_f * rho_f - xf * xf).max(0.0).sqrt() + 2.0) as i64;
        let norm = NormBound {
            fast: norm.fast,
            num: norm.num.clone(),
            den: norm.den.clone(),
        };
        (-ymax..=ymax)
            .filter(move |&y| (x, y) != (0, 0) && gcd_is_one(x, y) && norm.contains(x, y))
            .map(move |y| (x, y))
    }))
}

/// A lattice point with its exact flow coordinates `(x, y) = g^{-1} p`.
#[derive(Debug, Clone)]
pub struct FlowPoint {
    pub point: (i64, i64),
    pub x: QuadraticSurd,
    pub y: QuadraticSurd,
}

/// The visit interval `[start, end)` of one lattice point, with
/// `start = max(2 log(x / sigma), 0)` and `end = log(x / y)`.
#[derive(Debug, Clone)]
pub struct TimeInterval {
    pub start: CertifiedReal,
    pub end: CertifiedReal,
    pub point: FlowPoint,
}

fn check_sigma_sq(sigma_sq: &BigRational) -> Result<(), CountError> {
    if !sigma_sq.is_positive() || sigma_sq >= &BigRational::one() {
        return Err(CountError::BadSigmaSq(sigma_sq.clone()));
    }
    Ok(())
}

fn check_sigma_sq_positive(sigma_sq: &BigRational) -> Result<(), CountError> {
    if !sigma_sq.is_positive() {
        return Err(CountError::BadSigmaSq(sigma_sq.clone()));
    }
    Ok(())
}

/// Membership of the flow coordinates in the candidate region
/// `{0 < y < x, x y < sigma^2}`, decided exactly.
fn flow_candidate(x: &QuadraticSurd, y: &QuadraticSurd, sigma_sq: &BigRational) -> bool {
    x.is_positive()
        && y.is_positive()
        && y.cmp_value(x) == Ordering::Less
        && (x * y).cmp_rational(sigma_sq) == Ordering::Less
}

fn interval_from_coords(x: &QuadraticSurd, y: &QuadraticSurd, sigma_sq: &BigRational) -> (CertifiedReal, CertifiedReal) {
    let start = if (x * x).cmp_rational(sigma_sq) != Ordering::Greater {
        CertifiedReal::zero()
    } else {
        CertifiedReal::from_surd(&(x * x))
            .scale(&sigma_sq.recip())
            .ln()
    };
    let end = CertifiedReal::from_surd(x).div(&CertifiedReal::from_surd(y)).ln();
    (start, end)
}

/// Computes the visit interval of a single lattice point under the diagonal
/// flow, or `None` when the point never enters the triangle at a
/// nonnegative time. `sigma_sq` is the square of the triangle parameter and
/// must be positive; the interval is defined for any triangle size.
pub fn interval_for_point(
    g: &RealMatrix,
    point: (i64, i64),
    sigma_sq: &BigRational,
) -> Result<Option<TimeInterval>, CountError> {
    check_sigma_sq_positive(sigma_sq)?;
    let inv = g.inverse();
    let (x, y) = inv.apply(
        &QuadraticSurd::from_int(point.0),
        &QuadraticSurd::from_int(point.1),
    );
    Ok(interval_for_coords(&x, &y, sigma_sq)?.map(|(start, end)| TimeInterval {
        start,
        end,
        point: FlowPoint { point, x, y },
    }))
}

/// The visit interval from already transformed coordinates; see
/// [`interval_for_point`].
pub fn interval_for_coords(
    x: &QuadraticSurd,
    y: &QuadraticSurd,
    sigma_sq: &BigRational,
) -> Result<Option<(CertifiedReal, CertifiedReal)>, CountError> {
    check_sigma_sq_positive(sigma_sq)?;
    if !flow_candidate(x, y, sigma_sq) {
        return Ok(None);
    }
    Ok(Some(interval_from_coords(x, y, sigma_sq)))
}

/// One merged component of visit times, with the lattice points whose
/// intervals form it.
#[derive(Debug, Clone)]
pub struct FlowComponent {
    pub start: CertifiedReal,
    pub end: CertifiedReal,
    /// The component was cut off by the right end of the time window.
    pub capped: bool,
    pub points: Vec<(i64, i64)>,
}

/// All components of visit times in the window `[0, 2 log(tau/sigma)]`.
#[derive(Debug)]
pub struct FlowComponents {
    pub window_end: CertifiedReal,
    pub components: Vec<FlowComponent>,
    /// Number of primitive lattice points contributing an interval.
    pub candidates: usize,
    pub wall: Duration,
}

struct FlowCand {
    point: (i64, i64),
    x: QuadraticSurd,
    y: QuadraticSurd,
}

fn cross(p: (i64, i64), q: (i64, i64)) -> i128 {
    (p.0 as i128) * (q.1 as i128) - (p.1 as i128) * (q.0 as i128)
}

/// Compares clipped starts `max(2 log(x/sigma), 0)` exactly: both are zero
/// when `x <= sigma`, otherwise they order like `x`.
fn cmp_starts(a: &FlowCand, b: &FlowCand, sigma_sq: &BigRational) -> Ordering {
    let a_low = (&a.x * &a.x).cmp_rational(sigma_sq) != Ordering::Greater;
    let b_low = (&b.x * &b.x).cmp_rational(sigma_sq) != Ordering::Greater;
    match (a_low, b_low) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.x.cmp_value(&b.x),
    }
}

/// Compares ends `log(x/y)` exactly through the cross products `x y'`
/// versus `x' y`.
fn cmp_ends(a: &FlowCand, b: &FlowCand) -> Ordering {
    (&a.x * &b.y).cmp_value(&(&b.x * &a.y))
}

fn enumerate_flow_candidates(
    g: &RealMatrix,
    sigma_sq: &BigRational,
    tau: &BigRational,
) -> Vec<FlowCand> {
    let inv = g.inverse();
    let tau_f = crate::numerics::rational_to_f64(tau);
    let sigma_f = crate::numerics::rational_to_f64(sigma_sq).sqrt();
    let g00 = g.entry(0, 0).to_f64();
    let g01 = g.entry(0, 1).to_f64();

    let corners = [
        (0.0, 0.0),
        (tau_f, 0.0),
        (0.0, sigma_f),
        (tau_f, sigma_f),
    ];
    let p1s: Vec<f64> = corners.iter().map(|(x, y)| g00 * x + g01 * y).collect();
    let lo = p1s.iter().cloned().fold(f64::INFINITY, f64::min).floor() as i64 - 2;
    let hi = p1s.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 2;

    // Inverse entries: (x, y) = (i00 p1 + i01 p2, i10 p1 + i11 p2).
    let i00 = inv.entry(0, 0).to_f64();
    let i01 = inv.entry(0, 1).to_f64();
    let i10 = inv.entry(1, 0).to_f64();
    let i11 = inv.entry(1, 1).to_f64();

    let fuzz = 1e-7 * (1.0 + tau_f.abs());
    let mut out = Vec::new();
    for p1 in lo..=hi {
        let p1f = p1 as f64;
        // Intersect the p2 ranges allowed by 0 - fuzz <= x <= tau + fuzz
        // and 0 - fuzz <= y <= sigma + fuzz; a nearly vanishing
        // coefficient leaves that constraint to the exact stage.
        let mut p2_lo = f64::NEG_INFINITY;
        let mut p2_hi = f64::INFINITY;
        let mut clamp = |coef: f64, base: f64, upper: f64| {
            if coef.abs() < 1e-12 {
                return;
            }
            let r0 = (-fuzz - base) / coef;
            let r1 = (upper + fuzz - base) / coef;
            p2_lo = p2_lo.max(r0.min(r1));
            p2_hi = p2_hi.min(r0.max(r1));
        };
        clamp(i01, i00 * p1f, tau_f);
        clamp(i11, i10 * p1f, sigma_f);
        if !(p2_lo.is_finite() && p2_hi.is_finite()) || p2_lo > p2_hi {
            continue;
        }
        let lo2 = (p2_lo - WINDOW_PAD).ceil() as i64;
        let hi2 = (p2_hi + WINDOW_PAD).floor() as i64;
        for p2 in lo2..=hi2 {
            if (p1, p2) == (0, 0) || !gcd_is_one(p1, p2) {
                continue;
            }
            let (x, y) = inv.apply(&QuadraticSurd::from_int(p1), &QuadraticSurd::from_int(p2));
            if !flow_candidate(&x, &y, sigma_sq) {
                continue;
            }
            if x.cmp_rational(tau) == Ordering::Greater {
                continue;
            }
            out.push(FlowCand {
                point: (p1, p2),
                x,
                y,
            });
        }
    }
    out
}

/// Merges the visit intervals of all primitive lattice points over the
/// window `[0, 2 log(tau/sigma)]` and returns the connected components.
///
/// `sigma_sq` is the square of the triangle parameter, in `(0, 1)` so the
/// triangle has area below one half; `tau` must exceed `sigma`. Two exact
/// invariants are asserted on every run: lattice points in distinct
/// components are linearly independent while points sharing a component are
/// pairwise dependent, and consecutive components are separated by at least
/// `-log sigma`.
pub fn flow_components(
    g: &RealMatrix,
    sigma_sq: &BigRational,
    tau: &BigRational,
) -> Result<FlowComponents, CountError> {
    let start_t = Instant::now();
    check_sigma_sq(sigma_sq)?;
    if !tau.is_positive() || &(tau * tau) <= sigma_sq {
        return Err(CountError::BadTau(tau.clone()));
    }

    let mut cands = enumerate_flow_candidates(g, sigma_sq, tau);
    cands.sort_by(|a, b| {
        cmp_starts(a, b, sigma_sq)
            .then_with(|| cmp_ends(a, b))
            .then_with(|| a.point.cmp(&b.point))
    });

    struct Open {
        first: FlowCand,
        end_holder: FlowCand,
        points: Vec<(i64, i64)>,
    }
    let mut merged: Vec<Open> = Vec::new();
    for cand in cands {
        let mergeable = merged.last().map_or(false, |open| {
            let low_start = (&cand.x * &cand.x).cmp_rational(sigma_sq) != Ordering::Greater;
            low_start || {
                // start(cand) <= end(open) exactly: x'^2 y* <= sigma^2 x*.
                let lhs = &(&cand.x * &cand.x) * &open.end_holder.y;
                let rhs = &QuadraticSurd::from_rational(sigma_sq) * &open.end_holder.x;
                lhs.cmp_value(&rhs) != Ordering::Greater
            }
        });
        if mergeable {
            let open = merged.last_mut().unwrap();
            open.points.push(cand.point);
            if cmp_ends(&cand, &open.end_holder) == Ordering::Greater {
                open.end_holder = cand;
            }
        } else {
            merged.push(Open {
                points: vec![cand.point],
                end_holder: FlowCand {
                    point: cand.point,
                    x: cand.x.clone(),
                    y: cand.y.clone(),
                },
                first: cand,
            });
        }
    }

    let all_points: Vec<(i64, i64, usize)> = merged
        .iter()
        .enumerate()
        .flat_map(|(i, open)| open.points.iter().map(move |p| (p.0, p.1, i)))
        .collect();
    for (i, &(px, py, pc)) in all_points.iter().enumerate() {
        for &(qx, qy, qc) in &all_points[i + 1..] {
            let dependent = cross((px, py), (qx, qy)) == 0;
            assert_eq!(
                dependent,
                pc == qc,
                "component structure violated the dependence dichotomy at ({px},{py}) vs ({qx},{qy})"
            );
        }
    }
    for pair in merged.windows(2) {
        // gap >= -log sigma exactly: (x'^2 y*)^2 >= sigma^2 x*^2.
        let lhs = &(&pair[1].first.x * &pair[1].first.x) * &pair[0].end_holder.y;
        let lhs_sq = &lhs * &lhs;
        let rhs = &QuadraticSurd::from_rational(sigma_sq)
            * &(&pair[0].end_holder.x * &pair[0].end_holder.x);
        assert_ne!(
            lhs_sq.cmp_value(&rhs),
            Ordering::Less,
            "consecutive components closer than the separation gap"
        );
    }

    let window_rat = &(tau * tau) / sigma_sq;
    let window_end = CertifiedReal::from_rational(window_rat.clone()).ln();
    let candidates = merged.iter().map(|open| open.points.len()).sum();
    let components = merged
        .into_iter()
        .map(|open| {
            let (start, _) = interval_from_coords(&open.first.x, &open.first.y, sigma_sq);
            let (_, end) = interval_from_coords(&open.end_holder.x, &open.end_holder.y, sigma_sq);
            // end > window end exactly when x* sigma^2 > y* tau^2.
            let lhs = &open.end_holder.x * &QuadraticSurd::from_rational(sigma_sq);
            let rhs = &open.end_holder.y * &QuadraticSurd::from_rational(&(tau * tau));
            let capped = lhs.cmp_value(&rhs) == Ordering::Greater;
            FlowComponent {
                start,
                end: if capped {
                    CertifiedReal::from_rational(window_rat.clone()).ln()
                } else {
                    end
                },
                capped,
                points: open.points,
            }
        })
        .collect();
    Ok(FlowComponents {
        window_end,
        components,
        candidates,
        wall: start_t.elapsed(),
    })
}

/// The number of components of visit times; see [`flow_components`].
pub fn component_count(
    g: &RealMatrix,
    sigma_sq: &BigRational,
    tau: &BigRational,
) -> Result<usize, CountError> {
    Ok(flow_components(g, sigma_sq, tau)?.components.len())
}

/// Floating point cross-check of [`component_count`]: marks a dense grid of
/// times whose flowed triangle contains a lattice point and counts runs of
/// marked cells. Near-boundary components shorter than `step` can be missed,
/// so callers should compare with that tolerance in mind.
pub fn grid_component_oracle(
    g: &RealMatrix,
    sigma_sq: &BigRational,
    tau: &BigRational,
    step: f64,
) -> Result<usize, CountError> {
    check_sigma_sq(sigma_sq)?;
    if !tau.is_positive() || &(tau * tau) <= sigma_sq {
        return Err(CountError::BadTau(tau.clone()));
    }
    let sigma_f = crate::numerics::rational_to_f64(sigma_sq).sqrt();
    let tau_f = crate::numerics::rational_to_f64(tau);
    let window = 2.0 * (tau_f / sigma_f).ln();
    let cells = (window / step).ceil() as usize + 1;
    let mut marked = vec![false; cells + 1];
    for cand in enumerate_flow_candidates(g, sigma_sq, tau) {
        let xf = cand.x.to_f64();
        let yf = cand.y.to_f64();
        let s = (2.0 * (xf / sigma_f).ln()).max(0.0);
        let e = (xf / yf).ln();
        let first = (s / step).ceil() as usize;
        let last = ((e / step).ceil() as usize).min(cells + 1);
        for cell in marked.iter_mut().take(last).skip(first.min(cells + 1)) {
            *cell = true;
        }
    }
    let mut runs = 0;
    let mut inside = false;
    for cell in marked {
        if cell && !inside {
            runs += 1;
        }
        inside = cell;
    }
    Ok(runs)
}

/// The guaranteed separation between consecutive components, `-log sigma`,
/// from the enlarged-triangle construction: stretching the triangle by
/// `e^{kappa/2}` horizontally and to slope `e^kappa` keeps its area below
/// one half exactly when `kappa < -log sigma`.
pub fn separation_gap(sigma_sq: &BigRational) -> Result<CertifiedReal, CountError> {
    check_sigma_sq(sigma_sq)?;
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    Ok(CertifiedReal::from_rational(sigma_sq.clone())
        .ln()
        .scale(&half))
}

/// Comparison of a lattice count against the matching component count.
#[derive(Debug)]
pub struct FlowCountComparison {
    /// Primitive points with `0 < L+(p) < L-(p)`, `Q(p) < epsilon`,
    /// `|p| <= rho`.
    pub lattice_count: u64,
    /// Component counts at the two rational bracket ends of
    /// `tau = rho / |g e_1|`.
    pub components_low: usize,
    pub components_high: usize,
    pub tau_low: BigRational,
    pub tau_high: BigRational,
    /// Whether `|lattice_count - components| <= 1`; `None` when the two
    /// bracket ends disagree on the component count.
    pub within_one: Option<bool>,
    pub wall: Duration,
}

/// Counts the wedge region `{0 < L+(p) < L-(p), Q(p) < epsilon, |p| <= rho}`
/// over primitive points and compares it with the component count of the
/// flow over `[0, 2 log(tau/sigma)]` where `sigma^2 = epsilon` and
/// `tau = rho / |g e_1|`. The two counts agree up to one for all
/// sufficiently large `rho`.
pub fn flow_count_comparison(
    form: &BinaryForm,
    epsilon: &BigRational,
    rho: &BigRational,
) -> Result<FlowCountComparison, CountError> {
    let start = Instant::now();
    check_sigma_sq(epsilon).map_err(|_| CountError::BadDelta(epsilon.clone()))?;
    if rho < &BigRational::one() {
        return Err(CountError::BadRho(rho.clone()));
    }

    let coeffs = SweepCoeffs::new(form);
    let radius = rho
        .to_integer()
        .to_i64()
        .ok_or_else(|| CountError::BadRho(rho.clone()))?;
    let norm = NormBound::new(rho);
    let rho_f = crate::numerics::rational_to_f64(rho);
    let eps_f = crate::numerics::rational_to_f64(epsilon) * 1.0001 + 1e-12;

    let wedge_member = |x: i64, y: i64| -> bool {
        let plus = coeffs.linear_plus(x, y);
        if !plus.is_positive() {
            return false;
        }
        let minus = coeffs.linear_minus(x, y);
        if minus.cmp_value(&plus) != Ordering::Greater {
            return false;
        }
        (&plus * &minus).cmp_rational(epsilon) == Ordering::Less
    };
    let mut lattice_count = 0u64;
    for (x, y) in [(0i64, 1i64), (0, -1)] {
        if wedge_member(x, y) {
            lattice_count += 1;
        }
    }
    for x in 1..=radius {
        let xf = x as f64;
        let ymax = (rho_f * rho_f - xf * xf).max(0.0).sqrt() + 2.0;
        coeffs.candidate_rows(x, eps_f, ymax, &mut |y| {
            if !gcd_is_one(x, y) || !norm.contains(x, y) {
                return;
            }
            if wedge_member(x, y) {
                lattice_count += 1;
            }
            if wedge_member(-x, -y) {
                lattice_count += 1;
            }
        });
    }

    let g = form.matrix();
    let col_norm_sq = &(g.entry(0, 0) * g.entry(0, 0)) + &(g.entry(1, 0) * g.entry(1, 0));
    let tau_real = CertifiedReal::from_rational(rho.clone())
        .div(&CertifiedReal::from_surd(&col_norm_sq).sqrt());
    let width = BigRational::new(BigInt::one(), BigInt::from(10).pow(30));
    let (tau_low, tau_high) = tau_real.refine_until(&width);

    let components_low = component_count(g, epsilon, &tau_low)?;
    let components_high = component_count(g, epsilon, &tau_high)?;
    let within_one = if components_low == components_high {
        let n = components_low as i64;
        Some((lattice_count as i64 - n).abs() <= 1)
    } else {
        None
    };
    Ok(FlowCountComparison {
        lattice_count,
        components_low,
        components_high,
        tau_low,
        tau_high,
        within_one,
        wall: start.elapsed(),
    })
}

//! Upper-half-plane geometry for geodesic coding.
//!
//! Geodesics are semicircles determined by an endpoint pair `(u, w)` on
//! the real line. A reduced geodesic crosses the unit-circle arc
//! `C = {|z| = 1, |x| < mu}` with `mu = (23 - 3 sqrt 5)/22`; following the
//! attracting endpoint's digits, each segment runs from its crossing of
//! `C` to its crossing of the translated arc `a + C`, and the hyperbolic
//! length of that segment is the return time `t_j`. Crossings have exact
//! surd coordinates `(x, y^2)`; only distances need certified brackets.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::forms::is_h_reduced;
use crate::numerics::{CertifiedReal, QuadraticSurd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperbolicError {
    #[error("point lies outside the open upper half plane")]
    NotInUpperHalfPlane,
    #[error("endpoints are not in reduced position; apply h_reduce first")]
    NotReduced,
    #[error("attracting endpoint must be irrational")]
    RationalAttractor,
    #[error("digit at segment {0} does not fit in 64 bits")]
    DigitOverflow(usize),
    #[error("geodesic does not cross the section at segment {index}: {what}")]
    OffSection { index: usize, what: &'static str },
    #[error("endpoint pair left reduced position at segment {0}; this indicates an arithmetic bug")]
    LostReduction(usize),
    #[error("chi is defined for digits with |a| >= 2, got {0}")]
    DigitTooSmall(i64),
    #[error("delta must satisfy 0 < delta <= 1, got {0}")]
    BadDelta(BigRational),
}

/// A point of the upper half plane with exact coordinates `(x, y^2)`.
/// Circle intersections and Moebius images of such points stay exact;
/// taking `y` itself is deferred to certified arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingPoint {
    pub x: QuadraticSurd,
    pub y_sq: QuadraticSurd,
}

impl CrossingPoint {
    pub fn new(x: QuadraticSurd, y_sq: QuadraticSurd) -> Result<Self, HyperbolicError> {
        if !y_sq.is_positive() {
            return Err(HyperbolicError::NotInUpperHalfPlane);
        }
        Ok(CrossingPoint { x, y_sq })
    }

    /// The point `i`.
    pub fn apex() -> Self {
        CrossingPoint {
            x: QuadraticSurd::zero(),
            y_sq: QuadraticSurd::one(),
        }
    }

    pub fn x_f64(&self) -> f64 {
        self.x.to_f64()
    }

    pub fn y_f64(&self) -> f64 {
        self.y_sq.to_f64().max(0.0).sqrt()
    }

    /// Image under `z -> -1/(z - a)`, exactly.
    pub fn digit_move(&self, a: i64) -> CrossingPoint {
        let am = QuadraticSurd::from_int(a);
        let dx = &self.x - &am;
        let norm = &(&dx * &dx) + &self.y_sq;
        CrossingPoint {
            x: -(&dx / &norm),
            y_sq: &self.y_sq / &(&norm * &norm),
        }
    }
}

/// Hyperbolic distance between two exact points, as a certified real:
/// `cosh d = ((x1-x2)^2 + y1^2 + y2^2) / (2 y1 y2)`.
pub fn hyp_distance(
    p: &CrossingPoint,
    q: &CrossingPoint,
) -> Result<CertifiedReal, HyperbolicError> {
    if !p.y_sq.is_positive() || !q.y_sq.is_positive() {
        return Err(HyperbolicError::NotInUpperHalfPlane);
    }
    let dx = &p.x - &q.x;
    let num = &(&dx * &dx) + &(&p.y_sq + &q.y_sq);
    let prod = &p.y_sq * &q.y_sq;
    let two = BigRational::from_integer(BigInt::from(2));
    let cosh = CertifiedReal::from_surd(&num)
        .div(&CertifiedReal::from_surd(&prod).sqrt().scale(&two));
    Ok(cosh.arccosh())
}

/// Right edge `mu = (23 - 3 sqrt 5)/22` of the cross-section arc.
pub fn mu() -> QuadraticSurd {
    QuadraticSurd::new(23, -3, 5, 22).unwrap()
}

/// The cross-section arc `{|z - shift| = 1, |x - shift| < mu}` and its
/// integer translates.
#[derive(Debug, Clone)]
pub struct CrossSectionArc {
    pub mu: QuadraticSurd,
}

pub fn cross_section_arc() -> CrossSectionArc {
    CrossSectionArc { mu: mu() }
}

impl CrossSectionArc {
    /// Membership in the translate by `shift`: on the unit circle around
    /// `shift` and strictly inside the arc.
    pub fn contains(&self, p: &CrossingPoint, shift: i64) -> bool {
        let dx = &p.x - &QuadraticSurd::from_int(shift);
        let on_circle = &(&dx * &dx) + &p.y_sq == QuadraticSurd::one();
        on_circle && dx.abs().cmp_value(&self.mu) == Ordering::Less
    }

    /// The arc's right endpoint `mu + i sqrt(1 - mu^2)`.
    pub fn edge_point(&self) -> CrossingPoint {
        let y_sq = &QuadraticSurd::one() - &(&self.mu * &self.mu);
        CrossingPoint {
            x: self.mu.clone(),
            y_sq,
        }
    }

    /// Distance from the arc edge to the apex `i`; equals
    /// `(1/2) ln(3 sqrt 5)` because `(1 + mu)/(1 - mu) = 3 sqrt 5`.
    pub fn edge_distance(&self) -> CertifiedReal {
        hyp_distance(&self.edge_point(), &CrossingPoint::apex())
            .expect("arc points lie in the upper half plane")
    }
}

/// `chi(a)` for `|a| >= 3`: half the length of the arc `C`'s distance
/// budget, `(1/2) ln(3 sqrt 5) = (1/4) ln 45`.
fn chi_large() -> CertifiedReal {
    CertifiedReal::from_int(45)
        .ln()
        .scale(&BigRational::new(BigInt::one(), BigInt::from(4)))
}

/// The per-segment constant `chi_j`, depending only on `|a_j|`.
///
/// For `|a| >= 3` it is `(1/2) ln(3 sqrt 5)`; for `|a| = 2` it is
/// `ln 2 - (1/2) d(mu + i sqrt(1-mu^2), (3 + i sqrt 3)/2)`, which lies in
/// `[(1/2) ln(16/11), (1/2) ln(3/2)]`.
pub fn chi_constant(a: i64) -> Result<CertifiedReal, HyperbolicError> {
    match a.abs() {
        0 | 1 => Err(HyperbolicError::DigitTooSmall(a)),
        2 => {
            let corner = CrossingPoint {
                x: QuadraticSurd::new(3, 0, 0, 2).unwrap(),
                y_sq: QuadraticSurd::new(3, 0, 0, 4).unwrap(),
            };
            let d = hyp_distance(&cross_section_arc().edge_point(), &corner)
                .expect("both points lie in the upper half plane");
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            Ok(CertifiedReal::from_int(2).ln().sub(&d.scale(&half)))
        }
        _ => Ok(chi_large()),
    }
}

/// Upper bound for `t_j - 2 ln |a_j|` over all segments:
/// `ln(3 sqrt 5) + ln(3/4 + sqrt(1/2))`.
pub fn segment_slack_bound() -> CertifiedReal {
    let half_ln45 = CertifiedReal::from_int(45)
        .ln()
        .scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let inner = CertifiedReal::from_rational(BigRational::new(BigInt::one(), BigInt::from(2)))
        .sqrt()
        .add(&CertifiedReal::from_rational(BigRational::new(
            BigInt::from(3),
            BigInt::from(4),
        )));
    half_ln45.add(&inner.ln())
}

/// Verdict of the digit-size test for a segment's excursion into the
/// cusp region `{y > delta^{-2}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CuspVerdict {
    Intersects,
    Misses,
    Indeterminate,
}

fn delta_in_range(delta: &BigRational) -> Result<(), HyperbolicError> {
    if delta.is_positive() && *delta <= BigRational::one() {
        Ok(())
    } else {
        Err(HyperbolicError::BadDelta(delta.clone()))
    }
}

/// Classifies a segment by its digit alone: `Intersects` when
/// `|a| > 2 delta^{-2} + lambda + 1/2`, `Misses` when
/// `|a| <= 2 delta^{-2} + lambda - 3/2`, else `Indeterminate`.
/// Decided exactly.
pub fn digit_cusp_criterion(a: i64, delta: &BigRational) -> Result<CuspVerdict, HyperbolicError> {
    assert!(a.abs() >= 2, "cusp criterion needs a tail digit, got {a}");
    delta_in_range(delta)?;
    let lambda = crate::forms::lambda();
    // 2 delta^{-2} is rational; compare |a| - 2 delta^{-2} -+ const with
    // lambda in exact arithmetic.
    let two_inv_sq = BigRational::from_integer(BigInt::from(2)) / (delta * delta);
    let abs_a = BigRational::from_integer(BigInt::from(a.abs()));
    let gap = QuadraticSurd::from_rational(&(&abs_a - &two_inv_sq));
    let half = QuadraticSurd::new(1, 0, 0, 2).unwrap();
    let three_half = QuadraticSurd::new(3, 0, 0, 2).unwrap();
    // |a| > 2 d^{-2} + lambda + 1/2  <=>  gap - 1/2 > lambda
    if (&gap - &half).cmp_value(&lambda) == Ordering::Greater {
        return Ok(CuspVerdict::Intersects);
    }
    // |a| <= 2 d^{-2} + lambda - 3/2  <=>  gap + 3/2 <= lambda
    if (&gap + &three_half).cmp_value(&lambda) != Ordering::Greater {
        return Ok(CuspVerdict::Misses);
    }
    Ok(CuspVerdict::Indeterminate)
}

/// The cusp excursion interval of a semicircular geodesic, when it exists.
#[derive(Debug, Clone)]
pub struct ExcursionArc {
    /// `x` range of the part of the semicircle above height `delta^{-2}`.
    pub x_enter: CertifiedReal,
    pub x_exit: CertifiedReal,
}

/// Exact geometric cusp test for the semicircle over `(u, w)`.
#[derive(Debug, Clone)]
pub struct CuspGeometry {
    /// Whether the apex exceeds height `delta^{-2}` (radius > delta^{-2}).
    pub intersects: bool,
    pub arc: Option<ExcursionArc>,
    /// Whether `delta^4 < 1 - mu^2`, the regime in which an excursion is
    /// a single connected component of the segment.
    pub unique_component: bool,
}

pub fn segment_cusp_geometry(
    u: &QuadraticSurd,
    w: &QuadraticSurd,
    delta: &BigRational,
) -> Result<CuspGeometry, HyperbolicError> {
    delta_in_range(delta)?;
    let two = QuadraticSurd::from_int(2);
    let center = &(u + w) / &two;
    let radius = &(w - u).abs() / &two;
    let inv_sq = QuadraticSurd::from_rational(&(BigRational::one() / (delta * delta)));
    let intersects = radius.cmp_value(&inv_sq) == Ordering::Greater;
    let arc = if intersects {
        // x = center -+ sqrt(r^2 - delta^{-4})
        let r_sq = &radius * &radius;
        let gap = &r_sq - &(&inv_sq * &inv_sq);
        let half_width = CertifiedReal::from_surd(&gap).sqrt();
        let c = CertifiedReal::from_surd(&center);
        Some(ExcursionArc {
            x_enter: c.sub(&half_width),
            x_exit: c.add(&half_width),
        })
    } else {
        None
    };
    let delta4 = QuadraticSurd::from_rational(&(delta * delta * delta * delta));
    let mu = mu();
    let one_minus_mu_sq = &QuadraticSurd::one() - &(&mu * &mu);
    let unique_component = delta4.cmp_value(&one_minus_mu_sq) == Ordering::Less;
    Ok(CuspGeometry {
        intersects,
        arc,
        unique_component,
    })
}

/// Cusp assessment of one segment for one `delta`.
#[derive(Debug, Clone)]
pub struct CuspAssessment {
    pub delta: BigRational,
    pub verdict: CuspVerdict,
    pub geometry: CuspGeometry,
}

/// One coded segment of a reduced geodesic.
#[derive(Debug, Clone)]
pub struct SegmentRecord {
    pub index: usize,
    pub digit: i64,
    /// Endpoint pair `(u_j, w_j)` whose geodesic carries this segment.
    pub endpoints: (QuadraticSurd, QuadraticSurd),
    /// Crossing of the geodesic with the section arc `C`.
    pub entry: CrossingPoint,
    /// Crossing with the translated arc `a_j + C`.
    pub exit: CrossingPoint,
    /// Hyperbolic length from entry to exit.
    pub time: CertifiedReal,
    pub chi: CertifiedReal,
    pub cusp: Vec<CuspAssessment>,
}

/// Intersection of the semicircle over `(u, w)` with the unit circle
/// centered at `shift`; unique in the upper half plane.
fn circle_crossing(
    center: &QuadraticSurd,
    r_sq: &QuadraticSurd,
    shift: i64,
    index: usize,
) -> Result<CrossingPoint, HyperbolicError> {
    let m = QuadraticSurd::from_int(shift);
    let two = QuadraticSurd::from_int(2);
    let denom = &two * &(&m - center);
    if denom.is_zero() {
        return Err(HyperbolicError::OffSection {
            index,
            what: "radical line undefined (concentric circles)",
        });
    }
    let num = &(&(r_sq - &QuadraticSurd::one()) - &(center * center)) + &(&m * &m);
    let x = &num / &denom;
    let dx = &x - &m;
    let y_sq = &QuadraticSurd::one() - &(&dx * &dx);
    if !y_sq.is_positive() {
        return Err(HyperbolicError::OffSection {
            index,
            what: "circles do not meet in the upper half plane",
        });
    }
    Ok(CrossingPoint { x, y_sq })
}

/// Codes the reduced geodesic `(u, w)` into `n` segments, returning the
/// crossing points, return times, chi constants, and cusp assessments
/// for each requested `delta`.
pub fn trace_segments(
    u: &QuadraticSurd,
    w: &QuadraticSurd,
    n: usize,
    deltas: &[BigRational],
) -> Result<Vec<SegmentRecord>, HyperbolicError> {
    if w.is_rational() {
        return Err(HyperbolicError::RationalAttractor);
    }
    if !is_h_reduced(u, w) {
        return Err(HyperbolicError::NotReduced);
    }
    for d in deltas {
        delta_in_range(d)?;
    }
    let two = QuadraticSurd::from_int(2);
    let mut records = Vec::with_capacity(n);
    let mut u_j = u.clone();
    let mut w_j = w.clone();
    let arc = cross_section_arc();
    for index in 0..n {
        if index > 0 && !is_h_reduced(&u_j, &w_j) {
            return Err(HyperbolicError::LostReduction(index));
        }
        let digit = w_j
            .nearest_int()
            .to_i64()
            .ok_or(HyperbolicError::DigitOverflow(index))?;
        let center = &(&u_j + &w_j) / &two;
        let span = &(&w_j - &u_j).abs() / &two;
        let r_sq = &span * &span;
        let entry = circle_crossing(&center, &r_sq, 0, index)?;
        if !arc.contains(&entry, 0) {
            return Err(HyperbolicError::OffSection {
                index,
                what: "entry point misses the section arc",
            });
        }
        let exit = circle_crossing(&center, &r_sq, digit, index)?;
        if !arc.contains(&exit, digit) {
            return Err(HyperbolicError::OffSection {
                index,
                what: "exit point misses the translated arc",
            });
        }
        let time = hyp_distance(&entry, &exit).expect("crossings lie in the upper half plane");
        let chi = chi_constant(digit)?;
        let mut cusp = Vec::with_capacity(deltas.len());
        for delta in deltas {
            cusp.push(CuspAssessment {
                delta: delta.clone(),
                verdict: digit_cusp_criterion(digit, delta)?,
                geometry: segment_cusp_geometry(&u_j, &w_j, delta)?,
            });
        }
        let record = SegmentRecord {
            index,
            digit,
            endpoints: (u_j.clone(), w_j.clone()),
            entry,
            exit,
            time,
            chi,
            cusp,
        };
        // advance the endpoint pair by z -> -1/(z - a)
        let am = QuadraticSurd::from_int(digit);
        u_j = (&u_j - &am).inv();
        u_j = -u_j;
        w_j = (&w_j - &am).inv();
        w_j = -w_j;
        // the next entry must be the moved image of this exit
        if n > index + 1 {
            let moved = record.exit.digit_move(digit);
            let next_center = &(&u_j + &w_j) / &two;
            let next_span = &(&w_j - &u_j).abs() / &two;
            let next_entry =
                circle_crossing(&next_center, &(&next_span * &next_span), 0, index + 1)?;
            assert_eq!(
                moved, next_entry,
                "segment chaining broke at index {index}"
            );
        }
        records.push(record);
    }
    Ok(records)
}

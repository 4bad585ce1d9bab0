//! End-to-end acceptance checks: expansion validity on random surds,
//! periodic round-trips, certified return-time brackets, cusp-criterion
//! consistency, counting-oracle equivalence, band splits, excursion
//! counting bounds, vacuity below the minimum, invariant-measure
//! statistics, and certified constant inequalities.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hurwitz_core::counting::{
    component_count, count_region, count_region_brute, flow_count_comparison,
    grid_component_oracle, CountOptions, CountQuery, RegionKind,
};
use hurwitz_core::forms::BinaryForm;
use hurwitz_core::hurwitz::{expand, periodic_value};
use hurwitz_core::hyperbolic::{chi_constant, segment_slack_bound, trace_segments, CuspVerdict};
use hurwitz_core::stats::{
    birkhoff_average, c_zero, constants, digit_thresholds, gauss_constant, gauss_generic,
    quarter_ln_nine_fifths, verify_reduced_bounds, GaussMeasure,
};
use hurwitz_core::{CertifiedReal, QuadraticSurd};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn periodic_form(block: &[i64]) -> BinaryForm {
    let w = periodic_value(block).expect("block is a valid cycle");
    let (p, q, d, r) = w.parts();
    let u = QuadraticSurd::new(p.clone(), -q.clone(), d.clone(), r.clone())
        .expect("conjugate shares the radicand");
    BinaryForm::from_endpoints(&u, &w).expect("endpoints are distinct")
}

fn endpoints_of(form: &BinaryForm) -> (QuadraticSurd, QuadraticSurd) {
    let (u, w) = form.endpoints();
    (
        u.finite().expect("endpoint is finite").clone(),
        w.finite().expect("endpoint is finite").clone(),
    )
}

/// Cyclic digit validity: every magnitude at least two, and a magnitude-two
/// digit is followed (cyclically) by a digit of the opposite sign.
fn cyclically_valid(block: &[i64]) -> bool {
    block.iter().enumerate().all(|(i, &d)| {
        d.unsigned_abs() >= 2 && (d.unsigned_abs() != 2 || d * block[(i + 1) % block.len()] < 0)
    })
}

fn random_valid_block(rng: &mut ChaCha8Rng) -> Vec<i64> {
    loop {
        let len = rng.gen_range(3..=7);
        let block: Vec<i64> = (0..len)
            .map(|_| {
                let mag = rng.gen_range(2i64..=9);
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        if cyclically_valid(&block) {
            return block;
        }
    }
}

fn is_square(n: i64) -> bool {
    let r = (n as f64).sqrt().round() as i64;
    r * r == n
}

#[test]
fn digit_validity_on_random_surds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD16175);
    let start = Instant::now();
    let mut checked = 0u32;
    let mut digits_seen = 0usize;
    while checked < 1000 {
        let d = rng.gen_range(2i64..=600);
        if is_square(d) {
            continue;
        }
        let p = rng.gen_range(-50i64..=50);
        let q = rng.gen_range(1i64..=30) * if rng.gen::<bool>() { 1 } else { -1 };
        let r = rng.gen_range(1i64..=40) * if rng.gen::<bool>() { 1 } else { -1 };
        let x = QuadraticSurd::new(p, q, d, r).expect("denominator is nonzero");
        if x.is_rational() {
            continue;
        }
        let seq = expand(&x, 40).expect("irrational input expands");
        for j in 1..seq.digits.len() {
            let a = seq.digits[j];
            assert!(a.unsigned_abs() >= 2, "digit {a} at index {j} of {x}");
            if a.unsigned_abs() == 2 && j + 1 < seq.digits.len() {
                assert!(
                    a * seq.digits[j + 1] < 0,
                    "magnitude-two digit at index {j} of {x} not followed by opposite sign"
                );
            }
        }
        digits_seen += seq.digits.len();
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "1000 expansions took {elapsed:?}"
    );
    eprintln!("digit validity: 1000 surds, {digits_seen} digits, {elapsed:?}");
}

#[test]
fn periodic_blocks_round_trip() {
    let symbols: [i64; 10] = [-6, -5, -4, -3, -2, 2, 3, 4, 5, 6];
    let mut round_trips = 0u32;
    for len in 1usize..=4 {
        let total = 10usize.pow(len as u32);
        for code in 0..total {
            let mut block = Vec::with_capacity(len);
            let mut rest = code;
            for _ in 0..len {
                block.push(symbols[rest % 10]);
                rest /= 10;
            }
            if !cyclically_valid(&block) {
                continue;
            }
            let w = periodic_value(&block).expect("valid cycles are hyperbolic");
            let n = 3 * len + 2;
            let seq = expand(&w, n).expect("periodic points are irrational");
            for (j, &digit) in seq.digits.iter().enumerate() {
                assert_eq!(
                    digit,
                    block[j % len],
                    "expansion of {w} diverged from block {block:?} at index {j}"
                );
            }
            round_trips += 1;
        }
    }
    assert!(round_trips > 3000, "only {round_trips} valid blocks");
    eprintln!("periodic round-trips: {round_trips} blocks reproduced exactly");
}

#[test]
fn return_time_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E9);
    let blocks: Vec<Vec<i64>> = (0..100).map(|_| random_valid_block(&mut rng)).collect();
    let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(9));
    let two = rat(2, 1);
    blocks.par_iter().for_each(|block| {
        let (u, w) = endpoints_of(&periodic_form(block));
        let records = trace_segments(&u, &w, 50, &[]).expect("periodic geodesics trace");
        for rec in &records {
            let two_ln = CertifiedReal::from_int(rec.digit.abs()).ln().scale(&two);
            let slack = rec.time.sub(&two_ln);
            let chi = chi_constant(rec.digit).expect("traced digits are admissible");
            let above = slack.add(&chi.scale(&two));
            let (_, hi) = above.refine_until(&eps);
            assert!(
                !hi.is_negative(),
                "slack below -2 chi for digit {} of {block:?}",
                rec.digit
            );
            let below = segment_slack_bound().sub(&slack);
            let (_, hi) = below.refine_until(&eps);
            assert!(
                !hi.is_negative(),
                "slack above the segment bound for digit {} of {block:?}",
                rec.digit
            );
        }
    });

    let (u, w) = endpoints_of(&periodic_form(&[3]));
    let records = trace_segments(&u, &w, 50, &[]).expect("the [3] cycle traces");
    let target = CertifiedReal::from_rational(rat(3, 2)).arccosh().scale(&two);
    for rec in &records {
        let diff = rec.time.sub(&target);
        let (lo, hi) = diff.refine_until(&eps);
        assert!(
            !lo.is_positive() && !hi.is_negative(),
            "return time of the [3] cycle differs from 2 arccosh(3/2) at index {}",
            rec.index
        );
    }
    eprintln!("return times: 100 geodesics x 50 segments bracketed to 1e-9");
}

#[test]
fn cusp_criterion_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA57);
    let blocks: Vec<Vec<i64>> = (0..40).map(|_| random_valid_block(&mut rng)).collect();
    let deltas = [rat(3, 10), rat(1, 2), rat(7, 10)];
    let assessed: usize = blocks
        .par_iter()
        .map(|block| {
            let (u, w) = endpoints_of(&periodic_form(block));
            let records = trace_segments(&u, &w, 30, &deltas).expect("periodic geodesics trace");
            let mut seen = 0usize;
            for rec in &records {
                let mag = rec.digit.abs();
                for assess in &rec.cusp {
                    let t = digit_thresholds(&assess.delta).expect("delta is positive");
                    match assess.verdict {
                        CuspVerdict::Intersects => assert!(
                            assess.geometry.intersects,
                            "digit {mag} claimed intersection but geometry misses"
                        ),
                        CuspVerdict::Misses => assert!(
                            !assess.geometry.intersects,
                            "digit {mag} claimed miss but geometry intersects"
                        ),
                        CuspVerdict::Indeterminate => {
                            assert_eq!(
                                t.possible.cmp_int(mag),
                                Ordering::Less,
                                "indeterminate digit {mag} below the possible threshold"
                            );
                            assert_ne!(
                                t.certain.cmp_int(mag),
                                Ordering::Less,
                                "indeterminate digit {mag} above the certain threshold"
                            );
                        }
                    }
                    seen += 1;
                }
            }
            seen
        })
        .sum();
    assert_eq!(assessed, 40 * 30 * 3);
    eprintln!("cusp criterion: {assessed} assessments consistent with geometry");
}

#[test]
fn component_oracle_equivalence() {
    let blocks: Vec<Vec<i64>> = vec![
        vec![3],
        vec![4],
        vec![5],
        vec![6],
        vec![7],
        vec![2, -2],
        vec![2, -3],
        vec![3, -4],
        vec![4, 5],
        vec![10],
    ];
    let sigma_sq = rat(2, 5);
    let taus = [rat(35, 1), rat(700, 1), rat(13_900, 1)];
    let rho_grid: [i64; 7] = [10, 30, 100, 300, 1_000, 3_000, 10_000];
    blocks.par_iter().for_each(|block| {
        let form = periodic_form(block);
        let g = form.matrix();
        for tau in &taus {
            let merged = component_count(g, &sigma_sq, tau).expect("window is admissible");
            let grid =
                grid_component_oracle(g, &sigma_sq, tau, 2e-5).expect("window is admissible");
            assert_eq!(
                merged, grid,
                "merge and grid disagree for {block:?} at tau {tau}"
            );
        }
        let mut pass_from: Option<usize> = None;
        for (i, &rho) in rho_grid.iter().enumerate() {
            let cmp = flow_count_comparison(&form, &sigma_sq, &rat(rho, 1))
                .expect("comparison parameters are admissible");
            if cmp.within_one == Some(true) {
                pass_from.get_or_insert(i);
            } else {
                pass_from = None;
            }
        }
        let threshold =
            pass_from.unwrap_or_else(|| panic!("no radius threshold found for {block:?}"));
        assert!(
            threshold + 2 <= rho_grid.len(),
            "threshold for {block:?} leaves fewer than two passing radii"
        );
    });
    eprintln!("component oracles: 10 forms, 3 windows each, counts within one past thresholds");
}

#[test]
fn full_band_split() {
    let blocks: Vec<Vec<i64>> = vec![vec![3], vec![10], vec![2, -2], vec![4, -5], vec![6, 7]];
    let delta = rat(3, 10);
    let radii: [i64; 4] = [100, 1_000, 10_000, 100_000];
    let start = Instant::now();
    blocks.par_iter().for_each(|block| {
        let form = periodic_form(block);
        for &rho in &radii {
            let query = CountQuery {
                form: form.clone(),
                delta: delta.clone(),
                kappa: QuadraticSurd::zero(),
                rho: rat(rho, 1),
                kind: RegionKind::FullBand,
            };
            let swept = count_region(&query, &CountOptions::default()).expect("query is valid");
            let split = swept.split.expect("full-band queries carry the split");
            assert!(
                split.discrepancy <= 2,
                "split discrepancy {} for {block:?} at rho {rho}",
                split.discrepancy
            );
            if rho == 100 {
                let brute = count_region_brute(&query).expect("query is valid");
                assert_eq!(brute.count, swept.count, "brute count differs for {block:?}");
                let brute_split = brute.split.expect("full-band queries carry the split");
                assert_eq!(brute_split.discrepancy, split.discrepancy);
            }
        }
    });
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "split checks took {elapsed:?}"
    );
    eprintln!("full-band split: 5 forms x 4 radii within 2, brute-checked at 100, {elapsed:?}");
}

#[test]
fn reduced_band_counting_bounds() {
    let blocks: Vec<Vec<i64>> = vec![vec![3], vec![4], vec![2, -2], vec![10], vec![5, -6]];
    let delta = rat(7, 10);
    let kappa = QuadraticSurd::one();
    let grid = [rat(1_000, 1), rat(10_000, 1), rat(100_000, 1), rat(1_000_000, 1)];
    let (lower_pairs, upper_pairs): (usize, usize) = blocks
        .par_iter()
        .map(|block| {
            let form = periodic_form(block);
            let report = verify_reduced_bounds(&form, &delta, &kappa, &grid)
                .unwrap_or_else(|e| panic!("verification failed for {block:?}: {e}"));
            let c0 = c_zero();
            let mut lower_side = Vec::with_capacity(report.segments + 1);
            let mut upper_side = Vec::with_capacity(report.segments + 1);
            for n in 0..=report.segments {
                let weight = BigRational::from_integer(BigInt::from(n));
                lower_side.push(report.series.alpha[n].add(&c0.scale(&weight)).add(&report.theta));
                upper_side.push(report.series.omega[n].sub(&report.theta));
            }
            let nu = report.nu as i64;
            let mut lower_pairs = 0usize;
            let mut upper_pairs = 0usize;
            for row in &report.rows {
                let lower = row.lower.expect("grid radii admit a lower prefix");
                assert!(lower.pass, "lower bound failed for {block:?} at rho {}", row.rho);
                let upper = row.upper.expect("coding covers every grid radius");
                assert!(upper.pass, "upper bound failed for {block:?} at rho {}", row.rho);
                let ln_rho = CertifiedReal::from_rational(row.rho.clone()).ln();
                for n in 0..=report.segments {
                    if matches!(
                        lower_side[n].try_cmp(&ln_rho, 192),
                        Some(Ordering::Less) | Some(Ordering::Equal)
                    ) {
                        let bound = report.series.e_counts[n] as i64 - nu;
                        assert!(
                            row.count as i64 >= bound,
                            "count {} below e - nu = {bound} at n = {n}, rho {} for {block:?}",
                            row.count,
                            row.rho
                        );
                        lower_pairs += 1;
                    }
                    if matches!(
                        ln_rho.try_cmp(&upper_side[n], 192),
                        Some(Ordering::Less) | Some(Ordering::Equal)
                    ) {
                        let bound = report.series.f_counts[n] as i64 + nu;
                        assert!(
                            (row.count as i64) <= bound,
                            "count {} above f + nu = {bound} at n = {n}, rho {} for {block:?}",
                            row.count,
                            row.rho
                        );
                        upper_pairs += 1;
                    }
                }
            }
            (lower_pairs, upper_pairs)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    assert!(lower_pairs > 0, "no admissible lower pairs were certified");
    assert!(upper_pairs > 0, "no admissible upper pairs were certified");
    eprintln!(
        "counting bounds: 5 forms, {lower_pairs} lower and {upper_pairs} upper admissible pairs"
    );
}

#[test]
fn vacuous_band_below_minimum() {
    for block in [vec![3], vec![2, -2]] {
        let form = periodic_form(&block);
        let mut min_value: Option<QuadraticSurd> = None;
        for x in -60i64..=60 {
            for y in -60i64..=60 {
                if (x, y) == (0, 0) || num_integer::gcd(x.unsigned_abs(), y.unsigned_abs()) != 1 {
                    continue;
                }
                let v = form.evaluate_i64(x, y).abs();
                if v.is_zero() {
                    continue;
                }
                let smaller = match &min_value {
                    None => true,
                    Some(m) => v.cmp_value(m) == Ordering::Less,
                };
                if smaller {
                    min_value = Some(v);
                }
            }
        }
        let minimum = min_value.expect("the sweep finds nonzero values");
        let mut delta = rat(
            ((2.0 * minimum.to_f64()).sqrt() * 950.0).floor() as i64,
            1000,
        );
        if delta > rat(78, 100) {
            delta = rat(78, 100);
        }
        let half_sq = &(&delta * &delta) / &rat(2, 1);
        assert_eq!(
            QuadraticSurd::from_rational(&half_sq).cmp_value(&minimum),
            Ordering::Less,
            "chosen delta does not sit below the minimum for {block:?}"
        );
        [rat(10_000, 1), rat(100_000, 1), rat(1_000_000, 1)]
            .par_iter()
            .for_each(|rho| {
                let query = CountQuery {
                    form: form.clone(),
                    delta: delta.clone(),
                    kappa: QuadraticSurd::one(),
                    rho: rho.clone(),
                    kind: RegionKind::ReducedBand,
                };
                let res = count_region(&query, &CountOptions::default()).expect("query is valid");
                assert_eq!(res.count, 0, "band below the minimum is nonempty for {block:?}");
                assert!(res.boundary.is_empty(), "boundary points below the minimum");
            });
        eprintln!(
            "vacuity: {block:?} minimum {:.6}, delta {delta}, zero counts to 1e6",
            minimum.to_f64()
        );
    }
}

#[test]
fn invariant_measure_statistics() {
    let c = gauss_constant();
    let closed = 2.0 / (5.0f64 / 3.0).ln();
    assert!((c.to_f64() - closed).abs() < 1e-9);

    let full = GaussMeasure::new()
        .interval(&rat(-1, 2), &rat(1, 2))
        .expect("the full interval is admissible");
    let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(13));
    let (lo, hi) = full.refine_until(&eps);
    let one = BigRational::one();
    let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(12));
    assert!((&one - &lo).abs() < tol && (&hi - &one).abs() < tol);

    let coarse = gauss_generic(&rat(1, 2), 1e-6).expect("delta and tolerance are admissible");
    let fine = gauss_generic(&rat(1, 2), 1e-8).expect("delta and tolerance are admissible");
    assert!(
        (coarse.alpha - fine.alpha).abs() < 1e-6,
        "series unstable: {} vs {}",
        coarse.alpha,
        fine.alpha
    );

    let bits = 330_000u64;
    let q: BigInt = BigInt::one() << bits;
    let mut p = BigInt::from(3).modpow(&BigInt::from(230_001), &q);
    if &p * 2 > q {
        p = &q - &p;
    }
    let seed = BigRational::new(p, q);
    let run = birkhoff_average(&seed, 100_000).expect("seed is admissible");
    assert_eq!(run.steps, 100_000);
    assert!(!run.terminated);
    let relative = (run.average - fine.alpha).abs() / fine.alpha;
    assert!(
        relative < 0.05,
        "orbit average {} is {relative:.4} away from generic {}",
        run.average,
        fine.alpha
    );
    eprintln!(
        "invariant measure: c ok, mass ok, alpha {} vs orbit {} ({:.2}%)",
        fine.alpha,
        run.average,
        relative * 100.0
    );
}

#[test]
fn certified_constant_inequalities() {
    let table = constants();
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

    let floor = quarter_ln_nine_fifths();
    let two_slack = CertifiedReal::from_int(2)
        .ln()
        .sub(&chi_constant(2).expect("digit two is admissible"));
    assert_eq!(two_slack.try_cmp(&floor, 64), Some(Ordering::Greater));

    // For |a| >= 3 the chi deduction is the constant ln(45)/4, so the
    // per-digit floor holds exactly when 4 ln|a| >= ln 45 + ln(9/5),
    // that is a^4 >= 81, with equality at three.
    assert_eq!(81u32 * 5, 45 * 9);
    for a in 3u64..=1_000_000 {
        assert!((a as u128).pow(4) >= 81);
    }
    for a in [2i64, 3, 4, 10, 1_000, 1_000_000] {
        let slack = CertifiedReal::from_int(a)
            .ln()
            .sub(&chi_constant(a).expect("digit is admissible"));
        assert_ne!(
            slack.try_cmp(&floor, 64),
            Some(Ordering::Less),
            "slack fell below the floor at digit {a}"
        );
    }
    eprintln!("certified constants: eta, caps, chi bracket, and slack floor to 1e6");
}

//! Lazy enumeration of the dangerous set, bucketed by level.
//!
//! A level-`n` point has `H_n <= q B < H_{n+1}` with `B >= 1` and `B <= q^t`,
//! so its denominator lies in `[H_n^{1/(1+t)}, H_{n+1})`. Each level's
//! candidate denominators (the walker output over that window) are cached
//! once; queries against an interval then cost two divisions per candidate.
//! Global enumeration over the whole start interval is astronomically large
//! at certified scales, so every consumer asks per (level, interval) under a
//! budget and the field answers exactly or refuses with `TooMany`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::diophantine::{cf_expand, small_fractional_parts, CFExpansion, CfError, WalkError};
use crate::exactnum::{rat_ceil, rat_floor, rat_pow_int, Rational};
use crate::interval::IntervalQ;

use super::classify::{classify, ClassifiedPoint, ClassifyError};
use super::constants::{CMode, GameConstants};
use super::line::{find_line, LineError};
use super::point::{DeltaNbhd, RatPoint};

/// Candidate denominator with its nearest numerator.
#[derive(Debug, Clone)]
pub struct QCand {
    pub q: BigInt,
    pub p: BigInt,
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("candidate estimate {estimate} exceeds the budget {budget} for level {level}")]
    TooMany {
        level: u32,
        estimate: BigInt,
        budget: usize,
    },
    #[error("window does not cover level {level} over {interval}")]
    OutsideCoverage { level: u32, interval: String },
    #[error("line search failed in certified mode for ({p}/{q}, {r}/{q}): {source}")]
    LineFailure {
        p: BigInt,
        q: BigInt,
        r: BigInt,
        source: LineError,
    },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("witness search budget exhausted at level {0}")]
    WitnessBudget(u32),
}

/// Point source abstraction: the lazy field or a materialized window.
pub trait DangerProbe: Sync {
    fn constants(&self) -> &GameConstants;

    /// Cheap global check: `true` means level `n` is certainly empty.
    fn provably_empty(&self, level: u32) -> bool;

    /// Exact list of level-`n` points whose danger interval meets `interval`.
    fn probe(
        &self,
        level: u32,
        interval: &IntervalQ,
        budget: usize,
    ) -> Result<Vec<ClassifiedPoint>, ProbeError>;
}

/// Lazy, exact view of the dangerous set for one constants tuple.
pub struct DangerField {
    constants: Arc<GameConstants>,
    cf: Mutex<CFExpansion>,
    buckets: Mutex<HashMap<u32, Arc<Vec<QCand>>>>,
    empties: Mutex<HashMap<u32, bool>>,
    /// Points in C with no admissible line (possible in override mode only).
    lines_missing: Mutex<u64>,
    scan_failures: Mutex<HashMap<u64, Arc<Vec<(BigInt, BigInt)>>>>,
}

impl DangerField {
    pub fn new(constants: Arc<GameConstants>) -> Result<Self, CfError> {
        let cf = cf_expand(constants.theta())?;
        Ok(DangerField {
            constants,
            cf: Mutex::new(cf),
            buckets: Mutex::new(HashMap::new()),
            empties: Mutex::new(HashMap::new()),
            lines_missing: Mutex::new(0),
            scan_failures: Mutex::new(HashMap::new()),
        })
    }

    pub fn constants_arc(&self) -> Arc<GameConstants> {
        Arc::clone(&self.constants)
    }

    /// Count of in-C points skipped because no line exists (override mode).
    pub fn lines_missing(&self) -> u64 {
        *self.lines_missing.lock().unwrap()
    }

    /// Denominator window `[q_lo, q_hi]` of level `n`.
    fn q_window(&self, n: u32) -> (BigInt, BigInt) {
        let c = &self.constants;
        let (_, v, w) = c.exponents();
        // q_hi: largest integer strictly below H_{n+1}.
        let h_hi = c.h(n + 1);
        let f = rat_floor(h_hi);
        let q_hi = if &Rational::from_integer(f.clone()) == h_hi {
            f - 1
        } else {
            f
        };
        // q_lo: smallest q >= 1 with q^{v+w} >= H_n^v.
        let z = rat_pow_int(c.h(n), v as i64);
        let guess = rat_ceil(&z).max(BigInt::one()).nth_root(v + w);
        let mut q_lo = guess.max(BigInt::one());
        while Rational::from_integer(q_lo.pow(v + w)) < z {
            q_lo += 1;
        }
        while q_lo > BigInt::one() {
            let below: BigInt = &q_lo - 1;
            if Rational::from_integer(below.pow(v + w)) >= z {
                q_lo -= 1;
            } else {
                break;
            }
        }
        (q_lo, q_hi)
    }

    /// Walker candidates for level `n`, cached.
    pub fn bucket(&self, n: u32) -> Result<Arc<Vec<QCand>>, ProbeError> {
        if let Some(hit) = self.buckets.lock().unwrap().get(&n) {
            return Ok(Arc::clone(hit));
        }
        let (q_lo, q_hi) = self.q_window(n);
        let cands = if q_hi < q_lo {
            Vec::new()
        } else {
            let mut cf = self.cf.lock().unwrap();
            small_fractional_parts(&mut cf, self.constants.c(), self.constants.s(), &q_lo, &q_hi)?
                .into_iter()
                .map(|(q, p)| QCand { q, p })
                .collect()
        };
        let arc = Arc::new(cands);
        self.buckets.lock().unwrap().insert(n, Arc::clone(&arc));
        Ok(arc)
    }

    /// `B` window of level `n` for denominator `q`: `[lo, hi]` with
    /// `H_n <= q B < H_{n+1}` and `1 <= B <= q^t`; `None` if empty.
    fn b_window(&self, n: u32, q: &BigInt) -> Option<(BigInt, BigInt)> {
        let c = &self.constants;
        let (_, v, w) = c.exponents();
        let q_rat = Rational::from_integer(q.clone());
        let lo = rat_ceil(&(c.h(n) / &q_rat)).max(BigInt::one());
        let hi_rat = c.h(n + 1) / &q_rat;
        let f = rat_floor(&hi_rat);
        let mut hi = if Rational::from_integer(f.clone()) == hi_rat {
            f - 1
        } else {
            f
        };
        let cap = q.pow(w).nth_root(v);
        if hi > cap {
            hi = cap;
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// `true` when level `n` certainly holds no point: empty denominator
    /// bucket, or every candidate's `B` window is empty.
    pub fn level_provably_empty(&self, n: u32) -> bool {
        if let Some(&hit) = self.empties.lock().unwrap().get(&n) {
            return hit;
        }
        let verdict = match self.bucket(n) {
            Ok(bucket) => bucket.iter().all(|c| self.b_window(n, &c.q).is_none()),
            Err(_) => false,
        };
        self.empties.lock().unwrap().insert(n, verdict);
        verdict
    }

    /// Candidate-count estimate for a probe, before materializing anything.
    fn estimate(&self, n: u32, interval: &IntervalQ) -> Result<BigInt, ProbeError> {
        let margin = rat_ceil(self.constants.c()).max(BigInt::one());
        let bucket = self.bucket(n)?;
        let mut total = BigInt::zero();
        for cand in bucket.iter() {
            if self.b_window(n, &cand.q).is_none() {
                continue;
            }
            let q_rat = Rational::from_integer(cand.q.clone());
            let r_lo = rat_floor(&(interval.left() * &q_rat)) - &margin;
            let r_hi = rat_ceil(&(interval.right() * &q_rat)) + &margin;
            total += r_hi - r_lo + 1;
        }
        Ok(total)
    }

    fn points_for_candidate(
        &self,
        n: u32,
        cand: &QCand,
        interval: &IntervalQ,
        margin: &BigInt,
    ) -> Result<Vec<ClassifiedPoint>, ProbeError> {
        let mut out = Vec::new();
        if self.b_window(n, &cand.q).is_none() {
            return Ok(out);
        }
        let q_rat = Rational::from_integer(cand.q.clone());
        let r_lo = rat_floor(&(interval.left() * &q_rat)) - margin;
        let r_hi = rat_ceil(&(interval.right() * &q_rat)) + margin;
        let mut r = r_lo;
        while r <= r_hi {
            let step_done = || ();
            step_done();
            let point = match RatPoint::new(cand.p.clone(), cand.q.clone(), r.clone()) {
                Ok(p) => p,
                Err(_) => {
                    r += 1;
                    continue;
                }
            };
            if !DeltaNbhd::of(point.clone()).meets(&self.constants, interval) {
                r += 1;
                continue;
            }
            match find_line(&self.constants, &point) {
                Ok(line) => {
                    let cp = classify(&self.constants, &point, &line)?;
                    if cp.level == n {
                        out.push(cp);
                    }
                }
                Err(err) => {
                    if self.constants.c_mode() == CMode::Certified {
                        return Err(ProbeError::LineFailure {
                            p: point.p().clone(),
                            q: point.q().clone(),
                            r: point.r().clone(),
                            source: err,
                        });
                    }
                    *self.lines_missing.lock().unwrap() += 1;
                }
            }
            r += 1;
        }
        Ok(out)
    }

    /// Exact level-`n` dangers meeting `interval`, sorted by (center, q).
    pub fn dangers_in(
        &self,
        n: u32,
        interval: &IntervalQ,
        budget: usize,
    ) -> Result<Vec<ClassifiedPoint>, ProbeError> {
        let estimate = self.estimate(n, interval)?;
        if estimate > BigInt::from(budget) {
            return Err(ProbeError::TooMany {
                level: n,
                estimate,
                budget,
            });
        }
        let bucket = self.bucket(n)?;
        let margin = rat_ceil(self.constants.c()).max(BigInt::one());
        let mut points = collect_candidates(self, n, &bucket, interval, &margin)?;
        points.sort_by(|a, b| {
            a.point
                .center()
                .cmp(&b.point.center())
                .then_with(|| a.point.q().cmp(b.point.q()))
        });
        Ok(points)
    }

    /// Materializes a window: every point of level `<= n_max` whose danger
    /// interval meets `region`.
    pub fn enumerate_window(
        &self,
        n_max: u32,
        region: &IntervalQ,
        budget: usize,
    ) -> Result<PointWindow, ProbeError> {
        let mut points = Vec::new();
        for n in 1..=n_max {
            if self.level_provably_empty(n) {
                continue;
            }
            points.extend(self.dangers_in(n, region, budget)?);
        }
        points.sort_by(|a, b| {
            a.point
                .center()
                .cmp(&b.point.center())
                .then_with(|| a.point.q().cmp(b.point.q()))
                .then_with(|| a.level.cmp(&b.level))
        });
        Ok(PointWindow {
            constants: Arc::clone(&self.constants),
            n_max,
            region: region.clone(),
            points,
        })
    }

    /// First level with a verified point, with the witness; scans levels
    /// `1..=cap`. Exhaustive per level under `pair_budget` admissible pairs.
    pub fn first_nonempty_level(
        &self,
        cap: u32,
        pair_budget: usize,
    ) -> Result<Option<(u32, ClassifiedPoint)>, ProbeError> {
        for n in 1..=cap {
            if self.level_provably_empty(n) {
                continue;
            }
            if let Some(witness) = self.level_witness(n, pair_budget)? {
                return Ok(Some((n, witness)));
            }
        }
        Ok(None)
    }

    /// Searches level `n` for a witness point by enumerating admissible
    /// `(A, B)` pairs per candidate denominator and solving for `r`.
    fn level_witness(
        &self,
        n: u32,
        pair_budget: usize,
    ) -> Result<Option<ClassifiedPoint>, ProbeError> {
        let (u, v, _) = self.constants.exponents();
        let bucket = self.bucket(n)?;
        let mut spent = 0usize;
        for cand in bucket.iter() {
            let Some((b_lo, b_hi)) = self.b_window(n, &cand.q) else {
                continue;
            };
            let a_max = cand.q.pow(u).nth_root(v);
            let mut b = b_lo;
            while b <= b_hi {
                let g = b.gcd(&cand.q);
                let q_red = &cand.q / &g;
                let b_red = &b / &g;
                let inv = if q_red.is_one() {
                    BigInt::zero()
                } else {
                    b_red.extended_gcd(&q_red).x.mod_floor(&q_red)
                };
                let mut a = BigInt::zero();
                while a <= a_max {
                    for signed_a in [a.clone(), -&a] {
                        if signed_a.is_negative() && a.is_zero() {
                            continue;
                        }
                        spent += 1;
                        if spent > pair_budget {
                            return Err(ProbeError::WitnessBudget(n));
                        }
                        let ap = &signed_a * &cand.p;
                        if !(&ap % &g).is_zero() {
                            continue;
                        }
                        let r0 = ((ap / &g) * &inv).mod_floor(&q_red);
                        let mut k = BigInt::zero();
                        while &k < &g {
                            let r = &r0 + &k * &q_red;
                            k += 1;
                            let Ok(point) = RatPoint::new(cand.p.clone(), cand.q.clone(), r)
                            else {
                                continue;
                            };
                            let Ok(line) = find_line(&self.constants, &point) else {
                                continue;
                            };
                            let cp = classify(&self.constants, &point, &line)?;
                            if cp.level == n {
                                return Ok(Some(cp));
                            }
                        }
                    }
                    a += 1;
                }
                b += 1;
            }
        }
        Ok(None)
    }

    /// `n* + 2`: two levels past the first inhabited one.
    pub fn auto_depth(&self, cap: u32, pair_budget: usize) -> Result<Option<u32>, ProbeError> {
        Ok(self
            .first_nonempty_level(cap, pair_budget)?
            .map(|(n, _)| n + 2))
    }

    /// Denominators `q <= bound` whose cleared theta term stays below `c`
    /// (`q^u |q theta - p|^v < c^v` for the nearest `p`); certificates must
    /// test these against the witness. Cached per bound.
    pub fn scan_theta_failures(&self, bound: u64) -> Arc<Vec<(BigInt, BigInt)>> {
        if let Some(hit) = self.scan_failures.lock().unwrap().get(&bound) {
            return Arc::clone(hit);
        }
        let out = Arc::new(scan_theta_failures_impl(&self.constants, bound));
        self.scan_failures
            .lock()
            .unwrap()
            .insert(bound, Arc::clone(&out));
        out
    }
}

fn scan_theta_range(
    constants: &GameConstants,
    lo: u64,
    hi: u64,
) -> Vec<(BigInt, BigInt)> {
    use crate::exactnum::{rat_pow_int, FieldReal};
    let (u, v, _) = constants.exponents();
    let c_pow = rat_pow_int(constants.c(), v as i64);
    let theta = constants.theta();
    let theta_floor = theta.floor();
    let theta_frac = theta - &FieldReal::from_bigint(theta_floor.clone());
    let one = FieldReal::one();
    let start = BigInt::from(lo - 1);
    let x0 = theta.scale(&Rational::from_integer(start));
    let mut int_part = x0.floor();
    let mut frac = &x0 - &FieldReal::from_bigint(int_part.clone());
    let mut out = Vec::new();
    for q in lo..=hi {
        int_part += &theta_floor;
        frac = &frac + &theta_frac;
        if (&frac - &one).sign() >= 0 {
            frac = &frac - &one;
            int_part += 1;
        }
        let comp = &one - &frac;
        let (err, p) = if (&frac - &comp).sign() <= 0 {
            (frac.clone(), int_part.clone())
        } else {
            (comp, &int_part + 1)
        };
        let lhs = err
            .pow(v)
            .scale(&rat_pow_int(&Rational::from_integer(q.into()), u as i64));
        if (&lhs - &FieldReal::from_rational(c_pow.clone())).sign() < 0 {
            out.push((BigInt::from(q), p));
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn scan_theta_failures_impl(constants: &GameConstants, bound: u64) -> Vec<(BigInt, BigInt)> {
    use rayon::prelude::*;
    const CHUNK: u64 = 8192;
    let chunks: Vec<(u64, u64)> = (1..=bound)
        .step_by(CHUNK as usize)
        .map(|lo| (lo, (lo + CHUNK - 1).min(bound)))
        .collect();
    chunks
        .into_par_iter()
        .map(|(lo, hi)| scan_theta_range(constants, lo, hi))
        .reduce(Vec::new, |mut a, b| {
            a.extend(b);
            a
        })
}

#[cfg(not(feature = "parallel"))]
fn scan_theta_failures_impl(constants: &GameConstants, bound: u64) -> Vec<(BigInt, BigInt)> {
    scan_theta_range(constants, 1, bound)
}

/// Sequential variant, exposed for the bench comparison.
pub fn scan_theta_failures_seq(constants: &GameConstants, bound: u64) -> Vec<(BigInt, BigInt)> {
    scan_theta_range(constants, 1, bound)
}

/// Parallel variant, exposed for the bench comparison.
#[cfg(feature = "parallel")]
pub fn scan_theta_failures_par(constants: &GameConstants, bound: u64) -> Vec<(BigInt, BigInt)> {
    scan_theta_failures_impl(constants, bound)
}

#[cfg(feature = "parallel")]
fn collect_candidates(
    field: &DangerField,
    n: u32,
    bucket: &[QCand],
    interval: &IntervalQ,
    margin: &BigInt,
) -> Result<Vec<ClassifiedPoint>, ProbeError> {
    use rayon::prelude::*;
    let results: Result<Vec<Vec<ClassifiedPoint>>, ProbeError> = bucket
        .par_iter()
        .map(|cand| field.points_for_candidate(n, cand, interval, margin))
        .collect();
    Ok(results?.into_iter().flatten().collect())
}

#[cfg(not(feature = "parallel"))]
fn collect_candidates(
    field: &DangerField,
    n: u32,
    bucket: &[QCand],
    interval: &IntervalQ,
    margin: &BigInt,
) -> Result<Vec<ClassifiedPoint>, ProbeError> {
    let mut out = Vec::new();
    for cand in bucket {
        out.extend(field.points_for_candidate(n, cand, interval, margin)?);
    }
    Ok(out)
}

impl DangerProbe for DangerField {
    fn constants(&self) -> &GameConstants {
        &self.constants
    }

    fn provably_empty(&self, level: u32) -> bool {
        self.level_provably_empty(level)
    }

    fn probe(
        &self,
        level: u32,
        interval: &IntervalQ,
        budget: usize,
    ) -> Result<Vec<ClassifiedPoint>, ProbeError> {
        self.dangers_in(level, interval, budget)
    }
}

/// A materialized enumeration with explicit coverage.
#[derive(Clone)]
pub struct PointWindow {
    constants: Arc<GameConstants>,
    n_max: u32,
    region: IntervalQ,
    points: Vec<ClassifiedPoint>,
}

impl PointWindow {
    pub fn n_max(&self) -> u32 {
        self.n_max
    }
    pub fn region(&self) -> &IntervalQ {
        &self.region
    }
    pub fn points(&self) -> &[ClassifiedPoint] {
        &self.points
    }

    pub fn covers(&self, level: u32, interval: &IntervalQ) -> bool {
        level <= self.n_max && self.region.contains(interval)
    }

    /// Line-delimited `p q r A B C n k` records.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            s.push_str(&p.record());
            s.push('\n');
        }
        s
    }
}

impl DangerProbe for PointWindow {
    fn constants(&self) -> &GameConstants {
        &self.constants
    }

    fn provably_empty(&self, _level: u32) -> bool {
        // A window only vouches for its own region; never claim global
        // emptiness.
        false
    }

    fn probe(
        &self,
        level: u32,
        interval: &IntervalQ,
        _budget: usize,
    ) -> Result<Vec<ClassifiedPoint>, ProbeError> {
        if !self.covers(level, interval) {
            return Err(ProbeError::OutsideCoverage {
                level,
                interval: interval.to_string(),
            });
        }
        Ok(self
            .points
            .iter()
            .filter(|p| p.level == level && p.delta().meets(&self.constants, interval))
            .cloned()
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_rational, FieldReal};
    use crate::pointset::{in_c, make_constants};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    /// Dense override config: theta = sqrt 2, beta = 9/10, l = 39, c = 1/3.
    fn dense() -> DangerField {
        let c = make_constants(
            &r("1/2"),
            &r("1/2"),
            &r("9/10"),
            &FieldReal::sqrt_of(2),
            &r("39"),
            CMode::Override,
            Some(&r("1/3")),
        )
        .unwrap();
        DangerField::new(Arc::new(c)).unwrap()
    }

    #[test]
    fn dangers_match_naive_double_loop() {
        let field = dense();
        let constants = field.constants_arc();
        let region = IntervalQ::new(r("0"), r("1/40"));
        let n_max = 3u32;
        let window = field.enumerate_window(n_max, &region, 1_000_000).unwrap();

        // Naive oracle: all q <= 10^3, all r, in_C + line + classify.
        let mut naive = Vec::new();
        for q in 1i64..=1000 {
            let qt = constants.q_theta(&BigInt::from(q));
            let p = qt.nearest_integer().unwrap();
            for r_num in -2i64..=(q / 40 + 2) {
                let Ok(point) = RatPoint::new(p.clone(), q.into(), r_num.into()) else {
                    continue;
                };
                if !in_c(&constants, &point) {
                    continue;
                }
                if !DeltaNbhd::of(point.clone()).meets(&constants, &region) {
                    continue;
                }
                let line = find_line(&constants, &point).unwrap();
                let cp = classify(&constants, &point, &line).unwrap();
                if cp.level <= n_max {
                    naive.push(cp);
                }
            }
        }
        let from_window: Vec<_> = window
            .points()
            .iter()
            .filter(|cp| cp.point.q() <= &BigInt::from(1000))
            .cloned()
            .collect();
        naive.sort_by(|a, b| {
            a.point
                .center()
                .cmp(&b.point.center())
                .then_with(|| a.point.q().cmp(b.point.q()))
                .then_with(|| a.level.cmp(&b.level))
        });
        assert_eq!(from_window, naive);
        assert!(!naive.is_empty(), "dense config must produce points");
    }

    #[test]
    fn window_monotone_in_depth() {
        let field = dense();
        let region = IntervalQ::new(r("0"), r("1/40"));
        let w3 = field.enumerate_window(2, &region, 1_000_000).unwrap();
        let w4 = field.enumerate_window(3, &region, 1_000_000).unwrap();
        assert!(w4.points().len() >= w3.points().len());
        for p in w3.points() {
            assert!(w4.points().contains(p));
        }
    }

    #[test]
    fn budget_refusal() {
        let field = dense();
        let region = IntervalQ::new(r("0"), r("39/2"));
        match field.dangers_in(5, &region, 10) {
            Err(ProbeError::TooMany { .. }) => {}
            other => panic!("expected TooMany, got {other:?}"),
        }
    }

    #[test]
    fn window_coverage_errors() {
        let field = dense();
        let region = IntervalQ::new(r("0"), r("1/40"));
        let w = field.enumerate_window(3, &region, 1_000_000).unwrap();
        let inside = IntervalQ::new(r("0"), r("1/80"));
        assert!(w.probe(2, &inside, 1024).is_ok());
        let outside = IntervalQ::new(r("0"), r("1/2"));
        assert!(matches!(
            w.probe(2, &outside, 1024),
            Err(ProbeError::OutsideCoverage { .. })
        ));
        assert!(matches!(
            w.probe(9, &inside, 1024),
            Err(ProbeError::OutsideCoverage { .. })
        ));
    }

    #[test]
    fn g1_low_levels_provably_empty() {
        // Literal G1: c = 1/1024 leaves levels 1 and 2 with no points at all
        // (the smallest qualifying denominator is 195025 >= H_3).
        let c = make_constants(
            &r("1/2"),
            &r("1/2"),
            &r("1/2"),
            &FieldReal::sqrt_of(2),
            &r("1"),
            CMode::Override,
            Some(&r("1/1024")),
        )
        .unwrap();
        let field = DangerField::new(Arc::new(c)).unwrap();
        assert!(field.level_provably_empty(1));
        assert!(field.level_provably_empty(2));
        let (n_star, witness) = field
            .first_nonempty_level(6, 2_000_000)
            .unwrap()
            .expect("G1 has points by level 3");
        assert_eq!(n_star, 3);
        assert_eq!(witness.level, 3);
        assert_eq!(field.auto_depth(6, 2_000_000).unwrap(), Some(5));
    }
}

//! End-to-end avoidance certificates.
//!
//! A certificate witnesses, in exact arithmetic, that a played game's final
//! interval avoids every enumerated danger interval up to the horizon:
//! (a) final interval vs every enumerated point, (b) the cleared pair test
//! `max(q^s |q theta - p|, q^t |q y - r|) >= c` for the witness `y` against
//! every candidate denominator below `H_{D+1}`, and (c) an independent
//! small-denominator scan to a configurable bound. Every check is a cleared
//! power comparison; nothing is sampled.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, rat_pow_int, FieldReal, Rational};
use crate::game::{Transcript, TranscriptStatus};
use crate::interval::IntervalQ;
use crate::pointset::{CMode, DangerField, PointWindow, ProbeError};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("transcript did not complete cleanly; nothing to certify")]
    IncompleteTranscript,
    #[error("window region {region} does not cover the final interval {interval}")]
    WindowTooSmall { region: String, interval: String },
    #[error("window depth {have} is below the requested horizon {want}")]
    CoverageTooShallow { have: u32, want: u32 },
    #[error("witness point {0} lies outside the final interval")]
    WitnessOutside(String),
    #[error("avoidance failed at P = ({p}/{q}, {r}/{q}) in stage {stage}")]
    CertificationFailed {
        p: BigInt,
        q: BigInt,
        r: BigInt,
        stage: &'static str,
    },
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("malformed transcript: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointVerdict {
    pub p: String,
    pub q: String,
    pub r: String,
    pub level: u32,
    pub class_k: u32,
    pub line: String,
    pub avoided: bool,
}

/// Self-contained avoidance certificate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Certificate {
    pub mode: String,
    pub constants: Vec<(String, String)>,
    pub horizon: u32,
    pub points_digest: String,
    pub points_count: usize,
    pub transcript_digest: String,
    pub final_left: String,
    pub final_right: String,
    pub witness: String,
    pub verdicts: Vec<PointVerdict>,
    pub pair_checks: u64,
    pub scan_bound: u64,
    pub scan_ok: bool,
    /// Provenance note for the certified badness floor, when present.
    pub floor_note: Option<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn digest_of(data: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(data.as_bytes()))
}

/// `q^u |q theta - p|^v >= c^v`, the cleared first pair term.
fn theta_term_large(field: &DangerField, q: &BigInt, p: &BigInt, c_pow: &Rational) -> bool {
    let constants = field.constants_arc();
    let (u, v, _) = constants.exponents();
    let err = (&constants.q_theta(q) - &FieldReal::from_bigint(p.clone())).abs();
    let lhs = err
        .pow(v)
        .scale(&rat_pow_int(&Rational::from_integer(q.clone()), u as i64));
    (&lhs - &FieldReal::from_rational(c_pow.clone())).sign() >= 0
}

/// `q^w |q y - r|^v >= c^v`, the cleared second pair term (all rational).
fn y_term_large(
    constants: &crate::pointset::GameConstants,
    q: &BigInt,
    y: &Rational,
    r: &BigInt,
    c_pow: &Rational,
) -> bool {
    let (_, v, w) = constants.exponents();
    let err = (Rational::from_integer(q.clone()) * y - Rational::from_integer(r.clone())).abs();
    let lhs = rat_pow_int(&err, v as i64)
        * rat_pow_int(&Rational::from_integer(q.clone()), w as i64);
    &lhs >= c_pow
}

/// Nearest integer to a rational (ties toward even are irrelevant here; the
/// test below also probes the neighbors when `c >= 1/2`).
fn nearest_int(x: &Rational) -> BigInt {
    (x + Rational::new(BigInt::one(), 2.into())).floor().to_integer()
}

/// Issues a certificate for a cleanly finished transcript.
pub fn certify(
    field: &DangerField,
    window: &PointWindow,
    transcript: &Transcript,
    horizon: u32,
    scan_bound: u64,
    witness_override: Option<Rational>,
) -> Result<Certificate, CertifyError> {
    if transcript.status != TranscriptStatus::Ok {
        return Err(CertifyError::IncompleteTranscript);
    }
    let constants = field.constants_arc();
    let final_iv = transcript
        .final_interval()
        .map_err(|e| CertifyError::Malformed(e.to_string()))?;
    if !window.region().contains(&final_iv) {
        return Err(CertifyError::WindowTooSmall {
            region: window.region().to_string(),
            interval: final_iv.to_string(),
        });
    }
    if window.n_max() < horizon {
        return Err(CertifyError::CoverageTooShallow {
            have: window.n_max(),
            want: horizon,
        });
    }
    let witness = match witness_override {
        Some(w) => {
            if !final_iv.contains_point(&w) {
                return Err(CertifyError::WitnessOutside(format_rational(&w)));
            }
            w
        }
        None => final_iv.midpoint(),
    };

    // (a) the final interval avoids every enumerated danger interval.
    let mut verdicts = Vec::with_capacity(window.points().len());
    for cp in window.points() {
        if cp.level > horizon {
            continue;
        }
        let avoided = !cp.delta().meets(&constants, &final_iv);
        verdicts.push(PointVerdict {
            p: cp.point.p().to_string(),
            q: cp.point.q().to_string(),
            r: cp.point.r().to_string(),
            level: cp.level,
            class_k: cp.class_k,
            line: cp.line.to_string(),
            avoided,
        });
        if !avoided {
            return Err(CertifyError::CertificationFailed {
                p: cp.point.p().clone(),
                q: cp.point.q().clone(),
                r: cp.point.r().clone(),
                stage: "final interval meets an enumerated danger interval",
            });
        }
    }

    // (b) pair test at the witness for every candidate denominator < H_{D+1}.
    let (_, v, _) = constants.exponents();
    let c_pow = rat_pow_int(constants.c(), v as i64);
    let wide_c = constants.c() >= &Rational::new(BigInt::one(), 2.into());
    let mut pair_checks = 0u64;
    let mut seen_q: std::collections::BTreeSet<BigInt> = std::collections::BTreeSet::new();
    for level in 1..=horizon {
        for cand in field.bucket(level)?.iter() {
            if !seen_q.insert(cand.q.clone()) {
                continue;
            }
            pair_checks += 1;
            let r0 = nearest_int(&(Rational::from_integer(cand.q.clone()) * &witness));
            let p_shifts: &[i64] = if wide_c { &[-1, 0, 1] } else { &[0] };
            for &dp in p_shifts {
                let p = &cand.p + dp;
                if theta_term_large(field, &cand.q, &p, &c_pow) {
                    continue;
                }
                for &dr in p_shifts {
                    let r = &r0 + dr;
                    if !y_term_large(&constants, &cand.q, &witness, &r, &c_pow) {
                        return Err(CertifyError::CertificationFailed {
                            p,
                            q: cand.q.clone(),
                            r,
                            stage: "pair test at the witness",
                        });
                    }
                }
            }
        }
    }

    // (c) independent small-denominator scan: every q <= scan_bound passes
    // max(q^s ||q theta||, q^t ||q y||) >= c. Denominators whose theta term
    // already clears c are cached per configuration.
    let failures = field.scan_theta_failures(scan_bound);
    for (q, p) in failures.iter() {
        let r0 = nearest_int(&(Rational::from_integer(q.clone()) * &witness));
        if !y_term_large(&constants, q, &witness, &r0, &c_pow) {
            return Err(CertifyError::CertificationFailed {
                p: p.clone(),
                q: q.clone(),
                r: r0,
                stage: "independent small-denominator scan",
            });
        }
    }
    let scan_ok = true;

    Ok(Certificate {
        mode: match constants.c_mode() {
            CMode::Certified => "certified".into(),
            CMode::Override => "override".into(),
        },
        constants: constants.snapshot(),
        horizon,
        points_digest: digest_of(&window.to_records()),
        points_count: verdicts.len(),
        transcript_digest: transcript.digest(),
        final_left: transcript.final_left.clone(),
        final_right: transcript.final_right.clone(),
        witness: format_rational(&witness),
        verdicts,
        pair_checks,
        scan_bound,
        scan_ok,
        floor_note: constants.badness().map(|b| b.provenance.clone()),
    })
}

/// Re-derives the per-point verdicts of a stored certificate from its own
/// embedded data (exact arithmetic, no game replay) and compares.
pub fn recheck(cert: &Certificate, field: &DangerField) -> Result<bool, CertifyError> {
    let constants = field.constants_arc();
    let final_iv = IntervalQ::new(
        parse_rational(&cert.final_left).map_err(|e| CertifyError::Malformed(e.to_string()))?,
        parse_rational(&cert.final_right).map_err(|e| CertifyError::Malformed(e.to_string()))?,
    );
    for v in &cert.verdicts {
        let p: BigInt = v.p.parse().map_err(|_| CertifyError::Malformed(v.p.clone()))?;
        let q: BigInt = v.q.parse().map_err(|_| CertifyError::Malformed(v.q.clone()))?;
        let r: BigInt = v.r.parse().map_err(|_| CertifyError::Malformed(v.r.clone()))?;
        let point = crate::pointset::RatPoint::new(p, q, r)
            .map_err(|e| CertifyError::Malformed(e.to_string()))?;
        let avoided = !crate::pointset::DeltaNbhd::of(point).meets(&constants, &final_iv);
        if avoided != v.avoided {
            return Ok(false);
        }
    }
    Ok(true)
}

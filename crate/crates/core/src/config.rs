//! Flat `key = value` run configuration.
//!
//! One static file per run; every rational is a string, so the whole
//! configuration is canonically hashable and certificates can embed it.
//! Unknown keys are rejected. `l` must equal half the opening interval:
//! the interval map is anchored at Alice's centered first move.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, FieldReal, Rational};
use crate::interval::IntervalQ;
use crate::pointset::{make_constants, CMode, ConstantsError, GameConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthSpec {
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub theta: FieldReal,
    pub s: Rational,
    pub t: Rational,
    pub beta: Rational,
    pub l: Rational,
    pub b0: IntervalQ,
    pub c_mode: CMode,
    pub c_override: Option<Rational>,
    pub depth: DepthSpec,
    pub seed: u64,
    pub scan_bound: u64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value for `{key}`: {detail}")]
    BadValue { key: &'static str, detail: String },
    #[error("b0 must be a nondegenerate interval")]
    BadOpening,
    #[error("l = {l} must equal half the opening interval length {b0_len} (the map anchors at Alice's centered first move)")]
    LengthMismatch { l: String, b0_len: String },
    #[error(transparent)]
    Constants(#[from] ConstantsError),
}

impl ConfigError {
    /// Degenerate exponents carry their own exit code downstream.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            ConfigError::Constants(ConstantsError::DegenerateExponent)
        )
    }
}

const KEYS: &[&str] = &[
    "theta", "s", "t", "beta", "l", "b0_left", "b0_right", "c_mode", "c_override", "depth",
    "seed", "scan_bound",
];

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(idx + 1))?;
            let k = k.trim().to_string();
            let v = v.trim().to_string();
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey(k));
            }
            if map.insert(k.clone(), v).is_some() {
                return Err(ConfigError::DuplicateKey(k));
            }
        }
        let get = |key: &'static str| -> Result<&String, ConfigError> {
            map.get(key).ok_or(ConfigError::MissingKey(key))
        };
        let rat = |key: &'static str| -> Result<Rational, ConfigError> {
            parse_rational(get(key)?).map_err(|e| ConfigError::BadValue {
                key,
                detail: e.to_string(),
            })
        };

        let theta = FieldReal::parse(get("theta")?).map_err(|e| ConfigError::BadValue {
            key: "theta",
            detail: e.to_string(),
        })?;
        let s = rat("s")?;
        let t = rat("t")?;
        let beta = rat("beta")?;
        let l = rat("l")?;
        let b0_left = rat("b0_left")?;
        let b0_right = rat("b0_right")?;
        if b0_left >= b0_right {
            return Err(ConfigError::BadOpening);
        }
        let b0 = IntervalQ::new(b0_left, b0_right);
        let two = Rational::from_integer(BigInt::from(2));
        if &b0.length() / &two != l {
            return Err(ConfigError::LengthMismatch {
                l: format_rational(&l),
                b0_len: format_rational(&b0.length()),
            });
        }
        let c_mode = match get("c_mode")?.as_str() {
            "certified" => CMode::Certified,
            "override" => CMode::Override,
            other => {
                return Err(ConfigError::BadValue {
                    key: "c_mode",
                    detail: format!("expected certified|override, got `{other}`"),
                })
            }
        };
        let c_override = match map.get("c_override") {
            Some(v) => Some(parse_rational(v).map_err(|e| ConfigError::BadValue {
                key: "c_override",
                detail: e.to_string(),
            })?),
            None => None,
        };
        let depth = match map.get("depth").map(|s| s.as_str()) {
            None | Some("auto") => DepthSpec::Auto,
            Some(v) => DepthSpec::Fixed(v.parse().map_err(|_| ConfigError::BadValue {
                key: "depth",
                detail: format!("expected auto or an integer, got `{v}`"),
            })?),
        };
        let seed = match map.get("seed") {
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: "seed",
                detail: format!("expected an integer, got `{v}`"),
            })?,
            None => 0,
        };
        let scan_bound = match map.get("scan_bound") {
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: "scan_bound",
                detail: format!("expected an integer, got `{v}`"),
            })?,
            None => 100_000,
        };
        Ok(Config {
            theta,
            s,
            t,
            beta,
            l,
            b0,
            c_mode,
            c_override,
            depth,
            seed,
            scan_bound,
        })
    }

    /// Builds the constants tuple (degenerate exponents surface here).
    pub fn constants(&self) -> Result<GameConstants, ConfigError> {
        Ok(make_constants(
            &self.s,
            &self.t,
            &self.beta,
            &self.theta,
            &self.l,
            self.c_mode,
            self.c_override.as_ref(),
        )?)
    }

    /// `A_0`: the centered half of the opening interval.
    pub fn a0(&self) -> IntervalQ {
        let quarter = self.b0.length() / Rational::from_integer(BigInt::from(4));
        IntervalQ::new(self.b0.left() + &quarter, self.b0.right() - &quarter)
    }

    /// Canonical form: sorted `key = value` of the parsed values.
    pub fn canonical(&self) -> String {
        let mut lines = vec![
            format!("b0_left = {}", format_rational(self.b0.left())),
            format!("b0_right = {}", format_rational(self.b0.right())),
            format!(
                "c_mode = {}",
                match self.c_mode {
                    CMode::Certified => "certified",
                    CMode::Override => "override",
                }
            ),
            format!(
                "depth = {}",
                match self.depth {
                    DepthSpec::Auto => "auto".to_string(),
                    DepthSpec::Fixed(d) => d.to_string(),
                }
            ),
            format!("beta = {}", format_rational(&self.beta)),
            format!("l = {}", format_rational(&self.l)),
            format!("s = {}", format_rational(&self.s)),
            format!("scan_bound = {}", self.scan_bound),
            format!("seed = {}", self.seed),
            format!("t = {}", format_rational(&self.t)),
            format!("theta = {}", self.theta.to_surd_string()),
        ];
        if let Some(c) = &self.c_override {
            lines.push(format!("c_override = {}", format_rational(c)));
        }
        lines.sort();
        lines.join("\n") + "\n"
    }

    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G2: &str = "\
# certified golden-ratio run
theta = (1+1*sqrt(5))/2
s = 1/4
t = 3/4
beta = 9/10
l = 1
b0_left = -1/2
b0_right = 3/2
c_mode = certified
seed = 0
";

    #[test]
    fn parses_and_digests() {
        let c = Config::parse(G2).unwrap();
        assert_eq!(c.scan_bound, 100_000);
        assert_eq!(c.depth, DepthSpec::Auto);
        assert_eq!(c.a0(), IntervalQ::new(parse_rational("0").unwrap(), parse_rational("1").unwrap()));
        let d1 = c.digest();
        // re-parse: same digest
        let c2 = Config::parse(G2).unwrap();
        assert_eq!(d1, c2.digest());
        let constants = c.constants().unwrap();
        assert_eq!(constants.bracket_r(), 24);
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            Config::parse("nonsense\n"),
            Err(ConfigError::Syntax(1))
        ));
        assert!(matches!(
            Config::parse("mystery = 1\n"),
            Err(ConfigError::UnknownKey(_))
        ));
        let missing_l = G2.replace("l = 1\n", "");
        assert!(matches!(
            Config::parse(&missing_l),
            Err(ConfigError::MissingKey("l"))
        ));
        let bad_l = G2.replace("l = 1\n", "l = 2\n");
        assert!(matches!(
            Config::parse(&bad_l),
            Err(ConfigError::LengthMismatch { .. })
        ));
        let degenerate = G2.replace("s = 1/4", "s = 0").replace("t = 3/4", "t = 1");
        let cfg = Config::parse(&degenerate).unwrap();
        let err = cfg.constants().unwrap_err();
        assert!(err.is_degenerate());
        // rational theta rejected in certified mode
        let rational = G2.replace("theta = (1+1*sqrt(5))/2", "theta = 3/2");
        let cfg = Config::parse(&rational).unwrap();
        assert!(cfg.constants().is_err());
    }
}

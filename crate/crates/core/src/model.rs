//! Queue parameters and traffic-light schedules.
//!
//! Steps are indexed from 1. Under an ℓ-block schedule steps `1..=ℓ` are
//! red, `ℓ+1..=2ℓ` are green, and the pattern repeats with period `2ℓ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::precision::parse_decimal_ratio;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("schedule spec {spec:?}: {reason} (at byte {position})")]
    ScheduleParse { spec: String, position: usize, reason: String },
    #[error("invalid probability {0:?}: expected a fraction a/b or a decimal")]
    ProbabilityParse(String),
    #[error("probability {0} is outside (0, 1)")]
    ProbabilityRange(String),
    #[error("asymptotic formulas need p < 1/2, got p = {0}")]
    NotSubcritical(String),
    #[error("block length must be at least 1")]
    BlockLength,
    #[error("an exact rational probability is required here; {0} was given as a decimal")]
    InexactProbability(String),
    #[error("{0}")]
    Contract(String),
}

/// Arrival probability, kept exact.
///
/// Decimal text is stored exactly as well, but remembers that it was written
/// as a decimal so that paths needing a genuinely rational input can refuse it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probability {
    value: BigRational,
    from_decimal: bool,
}

impl Probability {
    pub fn rational(num: i64, den: i64) -> Self {
        Probability { value: BigRational::new(num.into(), den.into()), from_decimal: false }
    }

    pub fn from_ratio(value: BigRational) -> Self {
        Probability { value, from_decimal: false }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn is_decimal(&self) -> bool {
        self.from_decimal
    }

    /// The exact value, or an error if the input was decimal text.
    pub fn exact(&self) -> Result<&BigRational, ModelError> {
        if self.from_decimal {
            Err(ModelError::InexactProbability(self.to_string()))
        } else {
            Ok(&self.value)
        }
    }

    pub fn complement(&self) -> BigRational {
        BigRational::one() - &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for Probability {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ModelError::ProbabilityParse(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Probability { value: BigRational::new(num, den), from_decimal: false })
        } else {
            let value = parse_decimal_ratio(s).ok_or_else(bad)?;
            // integers such as "0" or "1" are exact too
            let from_decimal = s.contains(['.', 'e', 'E']);
            Ok(Probability { value, from_decimal })
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.from_decimal {
            write!(f, "{}", self.to_f64())
        } else if self.value.is_integer() {
            write!(f, "{}", self.value.numer())
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelParams {
    pub p: Probability,
    pub ell: u32,
}

impl ModelParams {
    pub fn new(p: Probability, ell: u32) -> Result<Self, ModelError> {
        if ell == 0 {
            return Err(ModelError::BlockLength);
        }
        Ok(ModelParams { p, ell })
    }

    pub fn q(&self) -> BigRational {
        self.p.complement()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Simulation,
    Asymptotics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamWarning {
    /// `p >= 1/2`: the queue has no downward drift and `M_n` grows linearly
    /// or like `sqrt(n)`.
    Supercritical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedParams {
    pub params: ModelParams,
    pub warnings: Vec<ParamWarning>,
}

/// Checks `p` against what the requested computation can handle.
///
/// Simulation needs `0 < p < 1` only; asymptotic formulas need `p < 1/2`.
pub fn validate_params(params: &ModelParams, purpose: Purpose) -> Result<CheckedParams, ModelError> {
    let p = params.p.value();
    if !p.is_positive() || *p >= BigRational::one() {
        return Err(ModelError::ProbabilityRange(params.p.to_string()));
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut warnings = Vec::new();
    if *p >= half {
        match purpose {
            Purpose::Asymptotics => return Err(ModelError::NotSubcritical(params.p.to_string())),
            Purpose::Simulation => warnings.push(ParamWarning::Supercritical),
        }
    }
    Ok(CheckedParams { params: params.clone(), warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Red,
    Green,
}

impl Phase {
    fn letter(self) -> char {
        match self {
            Phase::Red => 'R',
            Phase::Green => 'G',
        }
    }
}

#[derive(Clone, Debug, Eq)]
pub enum Schedule {
    /// `ℓ` red steps followed by `ℓ` green steps, repeated.
    DeterministicBlocks(u32),
    /// A finite red/green word, repeated.
    Pattern(Vec<Phase>),
    /// Each step independently red or green with probability 1/2.
    RandomLights,
}

impl Schedule {
    /// One period of a deterministic schedule; `None` for random lights.
    pub fn period_word(&self) -> Option<Vec<Phase>> {
        match self {
            Schedule::DeterministicBlocks(ell) => {
                let ell = *ell as usize;
                let mut word = vec![Phase::Red; ell];
                word.extend(std::iter::repeat_n(Phase::Green, ell));
                Some(word)
            }
            Schedule::Pattern(word) => Some(word.clone()),
            Schedule::RandomLights => None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Schedule::RandomLights)
    }

    /// A pattern that lacks either colour never lets cars in or never lets
    /// them out.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Schedule::Pattern(word) => !(word.contains(&Phase::Red) && word.contains(&Phase::Green)),
            _ => false,
        }
    }

    /// Number of red steps among `1..=n` (for random lights, `n`).
    pub fn red_steps(&self, n: u64) -> u64 {
        match self.period_word() {
            None => n,
            Some(word) => {
                let len = word.len() as u64;
                let reds = word.iter().filter(|&&ph| ph == Phase::Red).count() as u64;
                let partial = word[..(n % len) as usize].iter().filter(|&&ph| ph == Phase::Red).count() as u64;
                (n / len) * reds + partial
            }
        }
    }

    /// Canonical text form accepted by [`parse_schedule`].
    pub fn render(&self) -> String {
        match self {
            Schedule::DeterministicBlocks(ell) => format!("block:{ell}"),
            Schedule::Pattern(word) => {
                let mut s = String::from("pattern:");
                s.extend(word.iter().map(|ph| ph.letter()));
                s
            }
            Schedule::RandomLights => "random".to_string(),
        }
    }
}

/// Shortest word whose repetition gives `word`.
fn primitive_root(word: &[Phase]) -> &[Phase] {
    let n = word.len();
    (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| word[i] == word[i - d])).map(|d| &word[..d]).unwrap_or(word)
}

impl PartialEq for Schedule {
    /// Deterministic schedules are equal when they generate the same
    /// infinite light sequence.
    fn eq(&self, other: &Self) -> bool {
        match (self.period_word(), other.period_word()) {
            (Some(a), Some(b)) => primitive_root(&a) == primitive_root(&b),
            (None, None) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Schedule {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_schedule(s)
    }
}

/// Parses `block:<ell>`, `pattern:<word over R,G>` or `random`.
pub fn parse_schedule(spec: &str) -> Result<Schedule, ModelError> {
    let err = |position: usize, reason: &str| ModelError::ScheduleParse {
        spec: spec.to_string(),
        position,
        reason: reason.to_string(),
    };
    if spec == "random" {
        return Ok(Schedule::RandomLights);
    }
    if let Some(rest) = spec.strip_prefix("block:") {
        let offset = "block:".len();
        if let Some(pos) = rest.find(|c: char| !c.is_ascii_digit()) {
            return Err(err(offset + pos, "expected a decimal integer"));
        }
        let ell: u32 = rest.parse().map_err(|_| err(offset, "expected a block length"))?;
        if ell == 0 {
            return Err(err(offset, "block length must be at least 1"));
        }
        return Ok(Schedule::DeterministicBlocks(ell));
    }
    if let Some(rest) = spec.strip_prefix("pattern:") {
        let offset = "pattern:".len();
        if rest.is_empty() {
            return Err(err(offset, "pattern must be nonempty"));
        }
        let word = rest
            .char_indices()
            .map(|(i, c)| match c {
                'R' => Ok(Phase::Red),
                'G' => Ok(Phase::Green),
                other => Err(err(offset + i, &format!("invalid character {other:?}, expected R or G"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Schedule::Pattern(word));
    }
    Err(err(0, "expected block:<ell>, pattern:<RG word> or random"))
}

/// Light colour at step `i` (1-based) of a deterministic schedule.
pub fn phase_at(schedule: &Schedule, i: u64) -> Result<Phase, ModelError> {
    if i == 0 {
        return Err(ModelError::Contract("step indices start at 1".into()));
    }
    match schedule {
        Schedule::DeterministicBlocks(ell) => {
            let ell = u64::from(*ell);
            Ok(if (i - 1) % (2 * ell) < ell { Phase::Red } else { Phase::Green })
        }
        Schedule::Pattern(word) => Ok(word[((i - 1) % word.len() as u64) as usize]),
        Schedule::RandomLights => Err(ModelError::Contract("random lights have no deterministic phase".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_the_three_forms() {
        assert_eq!(parse_schedule("block:2").unwrap(), Schedule::DeterministicBlocks(2));
        assert_eq!(parse_schedule("block:2").unwrap(), parse_schedule("pattern:RRGG").unwrap());
        assert_eq!(parse_schedule("pattern:RG").unwrap(), Schedule::DeterministicBlocks(1));
        assert_eq!(parse_schedule("pattern:RGRG").unwrap(), Schedule::DeterministicBlocks(1));
        assert_ne!(parse_schedule("pattern:RGG").unwrap(), Schedule::DeterministicBlocks(1));
        assert_eq!(parse_schedule("random").unwrap(), Schedule::RandomLights);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_schedule("pattern:RGB") {
            Err(ModelError::ScheduleParse { position, .. }) => assert_eq!(position, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_schedule("block:0").is_err());
        assert!(parse_schedule("block:x").is_err());
        assert!(parse_schedule("pattern:").is_err());
        assert!(parse_schedule("blocks").is_err());
    }

    #[test]
    fn degenerate_patterns_are_flagged() {
        assert!(parse_schedule("pattern:RRR").unwrap().is_degenerate());
        assert!(!parse_schedule("pattern:RGG").unwrap().is_degenerate());
    }

    #[test]
    fn phases() {
        let b3 = Schedule::DeterministicBlocks(3);
        assert_eq!(phase_at(&b3, 4).unwrap(), Phase::Green);
        assert_eq!(phase_at(&b3, 3).unwrap(), Phase::Red);
        assert_eq!(phase_at(&Schedule::DeterministicBlocks(1), 7).unwrap(), Phase::Red);
        assert_eq!(phase_at(&parse_schedule("pattern:RRGG").unwrap(), 3).unwrap(), Phase::Green);
        assert!(phase_at(&Schedule::RandomLights, 1).is_err());
        assert!(phase_at(&b3, 0).is_err());
    }

    #[test]
    fn red_step_counts() {
        let b2 = Schedule::DeterministicBlocks(2);
        assert_eq!(b2.red_steps(0), 0);
        assert_eq!(b2.red_steps(3), 2);
        assert_eq!(b2.red_steps(5), 3);
        assert_eq!(b2.red_steps(200), 100);
        assert_eq!(Schedule::RandomLights.red_steps(7), 7);
    }

    #[test]
    fn probability_parsing() {
        let p: Probability = "1/3".parse().unwrap();
        assert!(!p.is_decimal());
        assert_eq!(p.complement(), BigRational::new(2.into(), 3.into()));
        let d: Probability = "0.25".parse().unwrap();
        assert!(d.is_decimal());
        assert!(d.exact().is_err());
        assert_eq!(d.value(), &BigRational::new(1.into(), 4.into()));
        assert!("1/0".parse::<Probability>().is_err());
        assert!("x".parse::<Probability>().is_err());
        assert_eq!(p.to_string(), "1/3");
    }

    #[test]
    fn validation() {
        let params = |s: &str| ModelParams::new(s.parse().unwrap(), 1).unwrap();
        assert!(validate_params(&params("1/3"), Purpose::Asymptotics).is_ok());
        assert!(matches!(validate_params(&params("1/2"), Purpose::Asymptotics), Err(ModelError::NotSubcritical(_))));
        let warned = validate_params(&params("0.7"), Purpose::Simulation).unwrap();
        assert_eq!(warned.warnings, vec![ParamWarning::Supercritical]);
        assert!(validate_params(&params("0"), Purpose::Simulation).is_err());
        assert!(validate_params(&params("7/3"), Purpose::Simulation).is_err());
        assert!(ModelParams::new(Probability::rational(1, 3), 0).is_err());
    }

    fn arb_schedule() -> impl Strategy<Value = Schedule> {
        prop_oneof![
            (1u32..6).prop_map(Schedule::DeterministicBlocks),
            proptest::collection::vec(prop_oneof![Just(Phase::Red), Just(Phase::Green)], 1..10)
                .prop_map(Schedule::Pattern),
            Just(Schedule::RandomLights),
        ]
    }

    proptest! {
        #[test]
        fn block_phase_is_periodic_and_balanced(ell in 1u32..8, i in 1u64..10_000) {
            let s = Schedule::DeterministicBlocks(ell);
            let period = 2 * u64::from(ell);
            prop_assert_eq!(phase_at(&s, i).unwrap(), phase_at(&s, i + period).unwrap());
            let reds = (i..i + period).filter(|&j| phase_at(&s, j).unwrap() == Phase::Red).count();
            prop_assert_eq!(reds as u32, ell);
        }

        #[test]
        fn render_round_trips(s in arb_schedule()) {
            let text = s.render();
            let back = parse_schedule(&text).unwrap();
            prop_assert_eq!(back.render(), text);
            prop_assert_eq!(back, s);
        }
    }
}

//! Commutative semirings and exact weight arithmetic.
//!
//! The registry is closed: boolean, natural, integer, tropical
//! `(ℕ ∪ {∞}, min, +, ∞, 0)`, arctic `(ℕ ∪ {−∞}, max, +, −∞, 0)` and the
//! residue rings `ℤ_k` for `k ≥ 2`. Natural and integer carriers are
//! arbitrary precision, so no arithmetic in this crate ever rounds or
//! overflows.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemiringError {
    #[error("semiring mismatch: {left} vs {right}")]
    Mismatch { left: Semiring, right: Semiring },
    #[error("invalid {semiring} literal `{text}`")]
    Syntax { semiring: Semiring, text: String },
    #[error("rule weight must not be the semiring zero `{0}`")]
    ZeroRuleWeight(String),
    #[error("semiring {0} is infinite")]
    Infinite(Semiring),
    #[error("unknown semiring `{0}`")]
    Unknown(String),
}

/// Identifier of a built-in semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semiring {
    Boolean,
    Natural,
    Integer,
    Tropical,
    Arctic,
    /// `ℤ_k`, residues modulo `k ≥ 2`.
    Modular(u32),
}

/// Static facts about a semiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiringDescriptor {
    pub id: String,
    pub carrier: &'static str,
    pub zero: Weight,
    pub one: Weight,
    pub zero_sum_free: bool,
    pub finite: bool,
    pub zero_divisor_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Value {
    Bool(bool),
    Int(BigInt),
    /// Tropical/arctic carrier; `None` is ∞ resp. −∞.
    Ext(Option<BigUint>),
    Residue(u32),
}

/// An element of one of the built-in semirings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    semiring: Semiring,
    value: Value,
}

fn is_prime(k: u32) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

impl Semiring {
    pub fn id(&self) -> String {
        match self {
            Semiring::Boolean => "boolean".into(),
            Semiring::Natural => "natural".into(),
            Semiring::Integer => "integer".into(),
            Semiring::Tropical => "tropical".into(),
            Semiring::Arctic => "arctic".into(),
            Semiring::Modular(k) => format!("mod{k}"),
        }
    }

    pub fn zero(&self) -> Weight {
        let value = match self {
            Semiring::Boolean => Value::Bool(false),
            Semiring::Natural | Semiring::Integer => Value::Int(BigInt::zero()),
            Semiring::Tropical | Semiring::Arctic => Value::Ext(None),
            Semiring::Modular(_) => Value::Residue(0),
        };
        Weight { semiring: *self, value }
    }

    pub fn one(&self) -> Weight {
        let value = match self {
            Semiring::Boolean => Value::Bool(true),
            Semiring::Natural | Semiring::Integer => Value::Int(BigInt::one()),
            Semiring::Tropical | Semiring::Arctic => Value::Ext(Some(BigUint::zero())),
            Semiring::Modular(_) => Value::Residue(1),
        };
        Weight { semiring: *self, value }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Semiring::Boolean | Semiring::Modular(_))
    }

    pub fn is_zero_sum_free(&self) -> bool {
        !matches!(self, Semiring::Integer | Semiring::Modular(_))
    }

    pub fn is_zero_divisor_free(&self) -> bool {
        match self {
            Semiring::Modular(k) => is_prime(*k),
            _ => true,
        }
    }

    pub fn descriptor(&self) -> SemiringDescriptor {
        let carrier = match self {
            Semiring::Boolean => "{0, 1} with (or, and)",
            Semiring::Natural => "nonnegative integers with (+, *)",
            Semiring::Integer => "integers with (+, *)",
            Semiring::Tropical => "N u {inf} with (min, +)",
            Semiring::Arctic => "N u {-inf} with (max, +)",
            Semiring::Modular(_) => "residues 0..k-1 with (+, *) mod k",
        };
        SemiringDescriptor {
            id: self.id(),
            carrier,
            zero: self.zero(),
            one: self.one(),
            zero_sum_free: self.is_zero_sum_free(),
            finite: self.is_finite(),
            zero_divisor_free: self.is_zero_divisor_free(),
        }
    }

    /// All carrier elements of a finite semiring.
    pub fn elements(&self) -> Result<Vec<Weight>, SemiringError> {
        match self {
            Semiring::Boolean => Ok(vec![self.zero(), self.one()]),
            Semiring::Modular(k) => Ok((0..*k)
                .map(|r| Weight { semiring: *self, value: Value::Residue(r) })
                .collect()),
            _ => Err(SemiringError::Infinite(*self)),
        }
    }

    /// Builds a weight from a machine integer. Negative values are only
    /// meaningful for the integer semiring; residues are reduced.
    pub fn from_i64(&self, n: i64) -> Result<Weight, SemiringError> {
        let bad = || SemiringError::Syntax { semiring: *self, text: n.to_string() };
        let value = match self {
            Semiring::Boolean => match n {
                0 => Value::Bool(false),
                1 => Value::Bool(true),
                _ => return Err(bad()),
            },
            Semiring::Natural if n < 0 => return Err(bad()),
            Semiring::Natural | Semiring::Integer => Value::Int(BigInt::from(n)),
            Semiring::Tropical | Semiring::Arctic => {
                Value::Ext(Some(BigUint::try_from(n).map_err(|_| bad())?))
            }
            Semiring::Modular(k) => Value::Residue(n.rem_euclid(*k as i64) as u32),
        };
        Ok(Weight { semiring: *self, value })
    }

    /// Parses a weight literal (see [`Weight`]'s `Display` for the syntax).
    pub fn parse_weight(&self, text: &str) -> Result<Weight, SemiringError> {
        let text = text.trim();
        let bad = || SemiringError::Syntax { semiring: *self, text: text.to_string() };
        let decimal = |s: &str| -> bool {
            !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
        };
        let value = match self {
            Semiring::Boolean => match text {
                "0" => Value::Bool(false),
                "1" => Value::Bool(true),
                _ => return Err(bad()),
            },
            Semiring::Natural => {
                if !decimal(text) {
                    return Err(bad());
                }
                Value::Int(BigInt::from_str(text).map_err(|_| bad())?)
            }
            Semiring::Integer => {
                let digits = text.strip_prefix('-').unwrap_or(text);
                if !decimal(digits) {
                    return Err(bad());
                }
                Value::Int(BigInt::from_str(text).map_err(|_| bad())?)
            }
            Semiring::Tropical | Semiring::Arctic => {
                let zero = if *self == Semiring::Tropical { "inf" } else { "-inf" };
                if text == zero {
                    Value::Ext(None)
                } else if decimal(text) {
                    Value::Ext(Some(BigUint::from_str(text).map_err(|_| bad())?))
                } else {
                    return Err(bad());
                }
            }
            Semiring::Modular(k) => {
                if !decimal(text) {
                    return Err(bad());
                }
                let r: u64 = text.parse().map_err(|_| bad())?;
                if r >= *k as u64 {
                    return Err(bad());
                }
                Value::Residue(r as u32)
            }
        };
        Ok(Weight { semiring: *self, value })
    }

    /// Like [`Semiring::parse_weight`] but rejects the additive zero, which
    /// is not a legal rule weight.
    pub fn parse_rule_weight(&self, text: &str) -> Result<Weight, SemiringError> {
        let w = self.parse_weight(text)?;
        if w.is_zero() {
            return Err(SemiringError::ZeroRuleWeight(w.to_string()));
        }
        Ok(w)
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Semiring {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let sr = match lower.as_str() {
            "boolean" | "bool" | "b" => Semiring::Boolean,
            "natural" | "nat" | "n" => Semiring::Natural,
            "integer" | "int" | "z" => Semiring::Integer,
            "tropical" | "t" => Semiring::Tropical,
            "arctic" | "a" => Semiring::Arctic,
            other => {
                let k = other
                    .strip_prefix("mod")
                    .or_else(|| other.strip_prefix('z'))
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|k| *k >= 2)
                    .ok_or_else(|| SemiringError::Unknown(s.trim().to_string()))?;
                Semiring::Modular(k)
            }
        };
        Ok(sr)
    }
}

impl Weight {
    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn is_zero(&self) -> bool {
        *self == self.semiring.zero()
    }

    pub fn is_one(&self) -> bool {
        *self == self.semiring.one()
    }

    fn check(&self, other: &Weight) -> Result<(), SemiringError> {
        if self.semiring != other.semiring {
            return Err(SemiringError::Mismatch { left: self.semiring, right: other.semiring });
        }
        Ok(())
    }

    /// Semiring sum; fails when the operands live in different semirings.
    pub fn try_add(&self, other: &Weight) -> Result<Weight, SemiringError> {
        self.check(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a || *b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a + b),
            (Value::Ext(a), Value::Ext(b)) => Value::Ext(match (a, b) {
                (None, x) | (x, None) => x.clone(),
                (Some(x), Some(y)) if self.semiring == Semiring::Tropical => Some(x.min(y).clone()),
                (Some(x), Some(y)) => Some(x.max(y).clone()),
            }),
            (Value::Residue(a), Value::Residue(b)) => {
                let Semiring::Modular(k) = self.semiring else { unreachable!() };
                Value::Residue(((*a as u64 + *b as u64) % k as u64) as u32)
            }
            _ => unreachable!("value shape is fixed by the semiring"),
        };
        Ok(Weight { semiring: self.semiring, value })
    }

    /// Semiring product; fails when the operands live in different semirings.
    pub fn try_mul(&self, other: &Weight) -> Result<Weight, SemiringError> {
        self.check(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(*a && *b),
            (Value::Int(a), Value::Int(b)) => Value::Int(a * b),
            (Value::Ext(a), Value::Ext(b)) => Value::Ext(match (a, b) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            }),
            (Value::Residue(a), Value::Residue(b)) => {
                let Semiring::Modular(k) = self.semiring else { unreachable!() };
                Value::Residue(((*a as u64 * *b as u64) % k as u64) as u32)
            }
            _ => unreachable!("value shape is fixed by the semiring"),
        };
        Ok(Weight { semiring: self.semiring, value })
    }

    pub fn pow(&self, exp: usize) -> Weight {
        let mut acc = self.semiring.one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest `(index, period)` with `s^(index + period) = s^index`.
    ///
    /// Only defined for finite semirings, where the sequence of powers is
    /// eventually periodic.
    pub fn power_index_period(&self) -> Result<(usize, usize), SemiringError> {
        if !self.semiring.is_finite() {
            return Err(SemiringError::Infinite(self.semiring));
        }
        let mut seen: Vec<Weight> = Vec::new();
        let mut cur = self.semiring.one();
        loop {
            if let Some(i) = seen.iter().position(|w| *w == cur) {
                return Ok((i, seen.len() - i));
            }
            let next = &cur * self;
            seen.push(cur);
            cur = next;
        }
    }

    /// The integer value of a natural/integer weight.
    pub fn as_bigint(&self) -> Option<&BigInt> {
        match &self.value {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }
}

impl std::ops::Add for &Weight {
    type Output = Weight;

    /// Panics on a semiring mismatch; use [`Weight::try_add`] for a checked sum.
    fn add(self, rhs: &Weight) -> Weight {
        self.try_add(rhs).expect("weights from different semirings")
    }
}

impl std::ops::Mul for &Weight {
    type Output = Weight;

    /// Panics on a semiring mismatch; use [`Weight::try_mul`] for a checked product.
    fn mul(self, rhs: &Weight) -> Weight {
        self.try_mul(rhs).expect("weights from different semirings")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Bool(b) => write!(f, "{}", u8::from(*b)),
            Value::Int(n) => write!(f, "{n}"),
            Value::Ext(Some(n)) => write!(f, "{n}"),
            Value::Ext(None) if self.semiring == Semiring::Tropical => f.write_str("inf"),
            Value::Ext(None) => f.write_str("-inf"),
            Value::Residue(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Sum of an iterator of weights, starting from the semiring zero.
pub fn sum<'a>(semiring: Semiring, it: impl IntoIterator<Item = &'a Weight>) -> Weight {
    it.into_iter().fold(semiring.zero(), |acc, w| &acc + w)
}

/// Product of an iterator of weights, starting from the semiring one.
pub fn product<'a>(semiring: Semiring, it: impl IntoIterator<Item = &'a Weight>) -> Weight {
    it.into_iter().fold(semiring.one(), |acc, w| &acc * w)
}

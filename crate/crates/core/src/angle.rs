//! Angles as rational fractions of a full turn, and the Niven classification
//! of their cosines.
//!
//! For a rational number of turns `t = n/d` in lowest terms, `cos 2πt` is
//! rational exactly when `d ∈ {1, 2, 3, 4, 6}`; the value is then one of
//! `0, ±1/2, ±1`. Every other rational angle has an irrational cosine.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::Result;
use crate::numeric::Real;
use crate::rational::{ratio, ExactRational};

/// An angle `2π · turns`, normalised so that `0 <= turns < 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleTurns {
    turns: ExactRational,
}

impl AngleTurns {
    /// Wraps any rational number of turns into `[0, 1)`.
    pub fn new(turns: ExactRational) -> Self {
        Self {
            turns: turns.fract_positive(),
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        Ok(Self::new(ExactRational::new(n, d)?))
    }

    pub fn zero() -> Self {
        Self {
            turns: ExactRational::zero(),
        }
    }

    pub fn turns(&self) -> &ExactRational {
        &self.turns
    }

    /// Reduced denominator of the turn fraction.
    pub fn denominator(&self) -> &BigInt {
        self.turns.denom()
    }

    /// `2φ`.
    pub fn doubled(&self) -> Self {
        Self::new(&self.turns + &self.turns)
    }

    /// `-φ`, i.e. `1 - turns`.
    pub fn negated(&self) -> Self {
        Self::new(-&self.turns)
    }

    pub fn is_zero(&self) -> bool {
        self.turns.is_zero()
    }

    pub fn is_half_turn(&self) -> bool {
        self.turns == ratio(1, 2)
    }

    /// The angle in radians at high precision.
    pub fn radians(&self) -> Real {
        &Real::two_pi() * &Real::from_rational(&self.turns)
    }
}

impl fmt::Debug for AngleTurns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AngleTurns({:?})", self.turns)
    }
}

impl fmt::Display for AngleTurns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} turn", self.turns)
    }
}

/// Whether the cosine of a rational angle is rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NivenClass {
    /// Always one of `0, ±1/2, ±1`.
    RationalCos(ExactRational),
    IrrationalCos,
}

impl NivenClass {
    pub fn is_rational(&self) -> bool {
        matches!(self, NivenClass::RationalCos(_))
    }
}

/// Exact cosine when it exists, otherwise a numeric value for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosValue {
    Exact(ExactRational),
    Irrational(Real),
}

impl fmt::Display for CosValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosValue::Exact(v) => write!(f, "rational {v}"),
            CosValue::Irrational(x) => write!(f, "irrational {x}"),
        }
    }
}

/// Table lookup keyed on `(numerator, denominator)` of the reduced turns.
pub fn classify_cos(angle: &AngleTurns) -> NivenClass {
    let t = angle.turns();
    let (Some(n), Some(d)) = (t.numer().to_i64(), t.denom().to_i64()) else {
        return NivenClass::IrrationalCos;
    };
    let value = match (n, d) {
        (0, 1) => ratio(1, 1),
        (1, 6) | (5, 6) => ratio(1, 2),
        (1, 4) | (3, 4) => ratio(0, 1),
        (1, 3) | (2, 3) => ratio(-1, 2),
        (1, 2) => ratio(-1, 1),
        _ => return NivenClass::IrrationalCos,
    };
    NivenClass::RationalCos(value)
}

pub fn cos_exact(angle: &AngleTurns) -> CosValue {
    match classify_cos(angle) {
        NivenClass::RationalCos(v) => CosValue::Exact(v),
        NivenClass::IrrationalCos => CosValue::Irrational(Real::cos_turns(angle.turns())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{reconstruct_rational, reconstruction_tolerance};
    use proptest::prelude::*;

    fn turns(n: i64, d: i64) -> AngleTurns {
        AngleTurns::from_ratio(n, d).unwrap()
    }

    #[test]
    fn normalisation() {
        assert_eq!(turns(7, 6), turns(1, 6));
        assert_eq!(turns(-1, 4), turns(3, 4));
        assert_eq!(turns(17, 17), AngleTurns::zero());
        assert_eq!(turns(3, 17).doubled(), turns(6, 17));
        assert_eq!(turns(10, 17).doubled(), turns(3, 17));
    }

    #[test]
    fn table_values() {
        assert_eq!(classify_cos(&turns(1, 6)), NivenClass::RationalCos(ratio(1, 2)));
        assert_eq!(classify_cos(&AngleTurns::zero()), NivenClass::RationalCos(ratio(1, 1)));
        assert_eq!(classify_cos(&turns(1, 17)), NivenClass::IrrationalCos);
        assert_eq!(classify_cos(&turns(2, 5)), NivenClass::IrrationalCos);
        assert_eq!(classify_cos(&turns(1, 12)), NivenClass::IrrationalCos);
    }

    #[test]
    fn seventeenth_turn_has_no_small_rational_cosine() {
        let c = Real::cos_turns(&ratio(1, 17));
        assert!(reconstruct_rational(&c, 1_000_000, &reconstruction_tolerance()).is_none());
    }

    #[test]
    fn cos_exact_values() {
        assert_eq!(cos_exact(&turns(1, 4)), CosValue::Exact(ExactRational::zero()));
        assert_eq!(cos_exact(&turns(1, 3)), CosValue::Exact(ratio(-1, 2)));
        match cos_exact(&turns(5, 17)) {
            CosValue::Irrational(x) => {
                let want = (10.0 * std::f64::consts::PI / 17.0).cos();
                assert!((x.to_f64() - want).abs() < 1e-15);
            }
            other => panic!("expected irrational, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn evenness(n in 0i64..1000, d in 1i64..1000) {
            let a = turns(n, d);
            prop_assert_eq!(classify_cos(&a), classify_cos(&a.negated()));
        }
    }
}

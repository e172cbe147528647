//! p-adic valuation, truncated p-adic trajectory labels, and the piecewise
//! state-space metric.
//!
//! Two points that both lie on the invariant set are `p^-(k+1)` apart, where
//! `k` is the first fractal level at which their labels differ; any other
//! pair of distinct points is exactly `p` apart.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;
use crate::rng::trial_rng;

/// Default number of fractal levels kept in a label.
pub const DEFAULT_DEPTH: usize = 8;

/// `v_p(x)`; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => f.write_str("infinite"),
        }
    }
}

/// Largest `k` with `p^k | x`.
pub fn valuation(x: &BigInt, p: DiscretisationParam) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p.get());
    let mut x = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(k);
        }
        x = q;
        k += 1;
    }
}

/// `v_p(a/b) = v_p(a) - v_p(b)`.
pub fn rational_valuation(x: &ExactRational, p: DiscretisationParam) -> Valuation {
    match (valuation(x.numer(), p), valuation(x.denom(), p)) {
        (Valuation::Infinite, _) => Valuation::Infinite,
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        (Valuation::Finite(_), Valuation::Infinite) => unreachable!("denominator is nonzero"),
    }
}

/// `|x|_p = p^-v_p(x)`, with `|0|_p = 0`.
pub fn padic_abs(x: &ExactRational, p: DiscretisationParam) -> ExactRational {
    match rational_valuation(x, p) {
        Valuation::Infinite => ExactRational::zero(),
        Valuation::Finite(k) => p_pow(p, -k),
    }
}

/// `p^k` for any integer `k`.
fn p_pow(p: DiscretisationParam, k: i64) -> ExactRational {
    let base = num_traits::pow(BigInt::from(p.get()), k.unsigned_abs() as usize);
    if k >= 0 {
        ExactRational::from_integer(base)
    } else {
        ExactRational::new(1, base).expect("p^k > 0")
    }
}

/// Digits of a truncated p-adic integer, coarsest fractal level first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PAdicLabel {
    p: DiscretisationParam,
    digits: Vec<u64>,
}

impl PAdicLabel {
    pub fn new(p: DiscretisationParam, digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::out_of_range("depth", 0, 1, "∞"));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= p.get()) {
            return Err(Error::out_of_range("digit", d, 0, p.get() - 1));
        }
        Ok(Self { p, digits })
    }

    pub fn p(&self) -> DiscretisationParam {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// This label with one more, finer digit.
    pub fn extended(&self, digit: u64) -> Result<Self> {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Self::new(self.p, digits)
    }

    pub fn is_prefix_of(&self, other: &PAdicLabel) -> bool {
        self.p == other.p && other.digits.starts_with(&self.digits)
    }

    /// The p-adic integer `Σ digits[i] p^i` these digits encode.
    pub fn to_integer(&self) -> BigInt {
        let p = BigInt::from(self.p.get());
        self.digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * &p + d)
    }
}

impl fmt::Display for PAdicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `p^-(k+1)` for first difference at index `k`; `0` for identical labels.
pub fn label_distance(a: &PAdicLabel, b: &PAdicLabel) -> Result<ExactRational> {
    if a.p != b.p {
        return Err(Error::Mismatch(format!("labels for p = {} and p = {}", a.p, b.p)));
    }
    if a.depth() != b.depth() {
        return Err(Error::Mismatch(format!("label depths {} and {}", a.depth(), b.depth())));
    }
    Ok(match a.digits.iter().zip(&b.digits).position(|(x, y)| x != y) {
        None => ExactRational::zero(),
        Some(k) => p_pow(a.p, -(k as i64 + 1)),
    })
}

/// A point of state space with an optional invariant-set label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatePoint {
    pub embedding: Vec<f64>,
    /// `None` means the point is off the invariant set.
    pub label: Option<PAdicLabel>,
}

impl StatePoint {
    pub fn on_set(embedding: Vec<f64>, label: PAdicLabel) -> Self {
        Self {
            embedding,
            label: Some(label),
        }
    }

    pub fn off_set(embedding: Vec<f64>) -> Self {
        Self { embedding, label: None }
    }

    pub fn is_on_set(&self) -> bool {
        self.label.is_some()
    }

    /// On-set points are identified by their label at the configured depth;
    /// off-set points by their coordinates.
    pub fn same_point(&self, other: &StatePoint) -> bool {
        match (&self.label, &other.label) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.embedding == other.embedding,
            _ => false,
        }
    }

    pub fn euclidean_distance(&self, other: &StatePoint) -> f64 {
        self.embedding
            .iter()
            .zip(&other.embedding)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A seeded on-set point: uniform label digits, coordinates in `[-1, 1)^dims`.
pub fn sample_on_set_point(p: DiscretisationParam, depth: usize, dims: usize, seed: u64) -> Result<StatePoint> {
    let mut rng = trial_rng(seed, 0);
    let digits = (0..depth).map(|_| rng.gen_range(0..p.get())).collect();
    let embedding = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ok(StatePoint::on_set(embedding, PAdicLabel::new(p, digits)?))
}

pub fn state_distance(x: &StatePoint, y: &StatePoint, p: DiscretisationParam) -> Result<ExactRational> {
    if x.same_point(y) {
        return Ok(ExactRational::zero());
    }
    match (&x.label, &y.label) {
        (Some(a), Some(b)) => {
            if a.p != p || b.p != p {
                return Err(Error::Mismatch(format!("labels are not {p}-adic")));
            }
            label_distance(a, b)
        }
        _ => Ok(ExactRational::from_integer(p.get())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FineTuningReport {
    pub epsilon: f64,
    pub euclidean_distance: f64,
    pub state_distance: ExactRational,
    /// `state_distance / euclidean_distance`.
    pub ratio: f64,
    pub euclidean_within_epsilon: bool,
    pub ratio_at_least_p_over_epsilon: bool,
}

/// Places an off-set point `epsilon / 2` from `x` along the first axis and
/// compares Euclidean and state-space distances.
pub fn fine_tuning_demo(x: &StatePoint, epsilon: f64, p: DiscretisationParam) -> Result<FineTuningReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::out_of_range("epsilon", epsilon, "0 (exclusive)", "∞"));
    }
    if !x.is_on_set() {
        return Err(Error::Mismatch("fine-tuning demo needs an on-set point".into()));
    }
    if x.embedding.is_empty() {
        return Err(Error::Mismatch("point has no coordinates".into()));
    }
    let mut moved = x.embedding.clone();
    moved[0] += epsilon / 2.0;
    let y = StatePoint::off_set(moved);
    let euclidean = x.euclidean_distance(&y);
    let d = state_distance(x, &y, p)?;
    let ratio = d.to_f64() / euclidean;
    Ok(FineTuningReport {
        epsilon,
        euclidean_distance: euclidean,
        euclidean_within_epsilon: euclidean <= epsilon,
        ratio_at_least_p_over_epsilon: ratio >= p.get() as f64 / epsilon,
        state_distance: d,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(v: u64) -> DiscretisationParam {
        DiscretisationParam::new(v).unwrap()
    }

    fn label(pv: u64, digits: &[u64]) -> PAdicLabel {
        PAdicLabel::new(p(pv), digits.to_vec()).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(34), p(17)), Valuation::Finite(1));
        assert_eq!(valuation(&BigInt::from(0), p(17)), Valuation::Infinite);
        assert_eq!(valuation(&BigInt::from(289), p(17)), Valuation::Finite(2));
        assert_eq!(valuation(&BigInt::from(-289 * 5), p(17)), Valuation::Finite(2));
        assert_eq!(valuation(&BigInt::from(5), p(17)), Valuation::Finite(0));
        assert_eq!(rational_valuation(&ratio(3, 289), p(17)), Valuation::Finite(-2));
        assert_eq!(padic_abs(&ratio(34, 5), p(17)), ratio(1, 17));
        assert_eq!(padic_abs(&ratio(1, 17), p(17)), ratio(17, 1));
    }

    #[test]
    fn label_distances() {
        let a = label(17, &[1, 2, 3, 4]);
        assert_eq!(label_distance(&a, &a).unwrap(), ExactRational::zero());
        assert_eq!(label_distance(&a, &label(17, &[0, 2, 3, 4])).unwrap(), ratio(1, 17));
        assert_eq!(label_distance(&a, &label(17, &[1, 2, 0, 4])).unwrap(), ratio(1, 4913));
        assert!(label_distance(&a, &label(17, &[1, 2, 3])).is_err());
        assert!(label_distance(&a, &label(13, &[1, 2, 3, 4])).is_err());
        assert!(PAdicLabel::new(p(13), vec![13]).is_err());
        assert!(PAdicLabel::new(p(13), vec![]).is_err());
    }

    #[test]
    fn label_integer_value() {
        assert_eq!(label(17, &[3, 1]).to_integer(), BigInt::from(3 + 17));
        // labels agreeing on k digits encode integers congruent mod p^k
        let a = label(13, &[4, 7, 1]);
        let b = label(13, &[4, 7, 9]);
        let diff = a.to_integer() - b.to_integer();
        assert_eq!(padic_abs(&ExactRational::from_integer(diff), p(13)), label_distance(&a, &b).unwrap() * ratio(13, 1) * ratio(1, 13) * ratio(13, 1));
    }

    #[test]
    fn state_distances() {
        let pp = p(17);
        let x = StatePoint::on_set(vec![0.0, 0.0], label(17, &[1, 2]));
        let y = StatePoint::on_set(vec![0.5, 0.0], label(17, &[1, 5]));
        assert_eq!(state_distance(&x, &y, pp).unwrap(), ratio(1, 289));
        let z = StatePoint::on_set(vec![0.5, 0.0], label(17, &[3, 5]));
        assert_eq!(state_distance(&x, &z, pp).unwrap(), ratio(1, 17));
        let off = StatePoint::off_set(vec![1e-9, 0.0]);
        assert_eq!(state_distance(&x, &off, pp).unwrap(), ratio(17, 1));
        assert_eq!(state_distance(&x, &x, pp).unwrap(), ExactRational::zero());
        assert_eq!(state_distance(&off, &off, pp).unwrap(), ExactRational::zero());
        let off2 = StatePoint::off_set(vec![2e-9, 0.0]);
        assert_eq!(state_distance(&off, &off2, pp).unwrap(), ratio(17, 1));
        assert!(state_distance(&x, &y, p(13)).is_err());
    }

    #[test]
    fn demo_reports() {
        let x = StatePoint::on_set(vec![0.25, -1.0, 3.0], label(1009, &[5; DEFAULT_DEPTH]));
        let r = fine_tuning_demo(&x, 1e-6, p(1009)).unwrap();
        assert!(r.euclidean_within_epsilon && r.ratio_at_least_p_over_epsilon);
        assert!(r.ratio >= 1.009e9);
        assert_eq!(r.state_distance, ratio(1009, 1));
        assert_eq!(fine_tuning_demo(&x, 1e-6, p(1009)).unwrap(), r);

        let x = StatePoint::on_set(vec![0.0], label(13, &[0]));
        let r = fine_tuning_demo(&x, 1.0, p(13)).unwrap();
        assert!(r.ratio >= 13.0);
        assert!(fine_tuning_demo(&x, 0.0, p(13)).is_err());
        assert!(fine_tuning_demo(&StatePoint::off_set(vec![0.0]), 1.0, p(13)).is_err());
    }

    #[test]
    fn ultrametric_random_triples() {
        for pv in [13u64, 17, 101] {
            let mut rng = trial_rng(21, pv);
            let draw = |rng: &mut crate::rng::TrialRng| {
                // small digit alphabet so shared prefixes are common
                let digits = (0..DEFAULT_DEPTH).map(|_| rng.gen_range(0..3)).collect();
                PAdicLabel::new(p(pv), digits).unwrap()
            };
            for _ in 0..2000 {
                let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
                let ab = label_distance(&a, &b).unwrap();
                let bc = label_distance(&b, &c).unwrap();
                let ac = label_distance(&a, &c).unwrap();
                assert!(ac <= ab.clone().max(bc));
                assert!(ab < 1);
            }
        }
    }
}

//! Bit-string ensembles: `p` labels in `{+1, -1}` with `m` plus-entries,
//! cyclically rotated by `n`. The mean is `cos θ` and the standard deviation
//! `|sin θ|` of the associated lattice state.

use std::sync::Arc;

use crate::angle::AngleTurns;
use crate::bloch::DiscreteQubit;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::numeric::Real;
use crate::prime::DiscretisationParam;
use crate::rational::{ratio, ExactRational};
use crate::spherical::{classify_third_side, orthogonal_colatitudes_trig, SphericalTriangle, ThirdSideVerdict};

/// Strings up to this length keep their entries in memory.
pub const MATERIALISE_LIMIT: u64 = 1_000_000;

/// `ζ^offset S(m)`: entry `i` is `+1` iff `(i - offset) mod p < m`.
#[derive(Debug, Clone)]
pub struct BitString {
    p: DiscretisationParam,
    m: u64,
    offset: u64,
    entries: Option<Arc<[i8]>>,
}

impl PartialEq for BitString {
    fn eq(&self, other: &Self) -> bool {
        // entries are a function of (p, m, offset)
        self.p == other.p && self.m == other.m && self.offset == other.offset
    }
}

impl Eq for BitString {}

fn entry_at(p: u64, m: u64, offset: u64, i: u64) -> i8 {
    let shifted = (i % p + p - offset) % p;
    if shifted < m {
        1
    } else {
        -1
    }
}

impl BitString {
    /// `m` entries `+1` followed by `p - m` entries `-1`.
    pub fn new(p: DiscretisationParam, m: u64) -> Result<Self> {
        if m > p.get() {
            return Err(Error::out_of_range("m", m, 0, p.get()));
        }
        Ok(Self::build(p, m, 0))
    }

    fn build(p: DiscretisationParam, m: u64, offset: u64) -> Self {
        let pv = p.get();
        let entries = (pv <= MATERIALISE_LIMIT).then(|| (0..pv).map(|i| entry_at(pv, m, offset, i)).collect());
        Self { p, m, offset, entries }
    }

    pub fn p(&self) -> DiscretisationParam {
        self.p
    }

    /// Number of `+1` entries.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn is_materialised(&self) -> bool {
        self.entries.is_some()
    }

    pub fn len(&self) -> u64 {
        self.p.get()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self, i: u64) -> i8 {
        match &self.entries {
            Some(e) => e[(i % self.p.get()) as usize],
            None => entry_at(self.p.get(), self.m, self.offset, i),
        }
    }

    pub fn entries(&self) -> Box<dyn Iterator<Item = i8> + '_> {
        match &self.entries {
            Some(e) => Box::new(e.iter().copied()),
            None => Box::new((0..self.p.get()).map(|i| entry_at(self.p.get(), self.m, self.offset, i))),
        }
    }

    /// Sum of entries `start .. start + len` (indices taken mod `p`) by iteration.
    pub fn window_sum(&self, start: u64, len: u64) -> i64 {
        (start..start + len).map(|i| self.entry(i) as i64).sum()
    }

    /// Mean by direct summation over all `p` entries. O(p).
    pub fn mean(&self) -> ExactRational {
        let sum: i64 = self.entries().map(i64::from).sum();
        ExactRational::new(sum, self.p.get()).expect("p > 0")
    }

    /// `2m/p - 1`.
    pub fn mean_closed_form(&self) -> ExactRational {
        ExactRational::new(2 * self.m as i128 - self.p.get() as i128, self.p.get()).expect("p > 0")
    }

    /// `⟨S²⟩ - ⟨S⟩²` by direct summation. O(p).
    pub fn variance(&self) -> ExactRational {
        let (sum, sum_sq) = self
            .entries()
            .fold((0i64, 0i64), |(s, q), e| (s + e as i64, q + (e as i64) * (e as i64)));
        let p = self.p.get();
        let mean = ExactRational::new(sum, p).expect("p > 0");
        ExactRational::new(sum_sq, p).expect("p > 0") - mean.square()
    }

    /// `1 - (2m/p - 1)²`.
    pub fn variance_closed_form(&self) -> ExactRational {
        ExactRational::one() - self.mean_closed_form().square()
    }

    /// Turns the string is rotated by, `offset/p`.
    pub fn phase(&self) -> AngleTurns {
        AngleTurns::new(ExactRational::new(self.offset, self.p.get()).expect("p > 0"))
    }
}

pub fn bit_string(p: DiscretisationParam, m: u64) -> Result<BitString> {
    BitString::new(p, m)
}

/// `ζ^n S`: entry `i` of the result is entry `i - n` of `s`.
pub fn rotate(s: &BitString, n: i64) -> BitString {
    let pv = s.p.get();
    let shift = n.rem_euclid(pv as i64) as u64;
    let offset = (s.offset + shift) % pv;
    let entries = s.entries.as_ref().map(|e| {
        let mut v = e.to_vec();
        v.rotate_right(shift as usize);
        Arc::from(v)
    });
    BitString {
        p: s.p,
        m: s.m,
        offset,
        entries,
    }
}

/// The rotated string of a lattice state; its mean is the state's `cos θ`.
pub fn from_qubit(q: &DiscreteQubit) -> BitString {
    let base = BitString::build(q.p(), q.m(), 0);
    rotate(&base, q.n() as i64)
}

/// A bit string whose entries are `±scale` (`ħ/2` with `ħ = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledBitString {
    pub base: BitString,
    pub scale: ExactRational,
}

impl ScaledBitString {
    pub fn half_hbar(base: BitString) -> Self {
        Self {
            base,
            scale: ratio(1, 2),
        }
    }

    pub fn entry(&self, i: u64) -> ExactRational {
        if self.base.entry(i) > 0 {
            self.scale.clone()
        } else {
            -&self.scale
        }
    }

    pub fn mean(&self) -> ExactRational {
        &self.scale * &self.base.mean()
    }

    pub fn variance(&self) -> ExactRational {
        self.scale.square() * self.base.variance()
    }
}

/// Both sides of `ΔS_x ΔS_y >= (ħ/2) |⟨S_z⟩|` for one lattice state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyReport {
    pub state: DiscreteQubit,
    /// `(ħ/2)² |sin θ'| |sin θ''|`.
    pub lhs: Real,
    /// `(ħ/2) |⟨S_z⟩|` with `⟨S_z⟩ = (ħ/2) cos θ`.
    pub rhs: Real,
    /// `lhs >= rhs - 1e-12`.
    pub holds: bool,
    /// Equality is expected here: at the poles, or where `sin 2φ = 0`
    /// (on the lattice with odd prime `p`, only `n ≡ 0 mod p`).
    pub analytic_equality: bool,
}

impl UncertaintyReport {
    pub fn slack(&self) -> Real {
        &self.lhs - &self.rhs
    }
}

pub fn uncertainty_tolerance() -> Real {
    Real::pow10_neg(12)
}

pub fn uncertainty_product(q: &DiscreteQubit) -> UncertaintyReport {
    let cos_theta = q.cos_theta();
    let sin_theta = Real::from_rational(&(ExactRational::one() - cos_theta.square())).sqrt();
    let (sin_phi, cos_phi) = Real::sin_cos_turns(q.phase().turns());
    let c = orthogonal_colatitudes_trig(&sin_theta, &Real::from_rational(&cos_theta), &sin_phi, &cos_phi);
    let (product, abs_cos) = c.uncertainty_sides();
    let scale = Real::from_rational(&ratio(1, 2));
    let scale_sq = &scale * &scale;
    let lhs = &scale_sq * &product;
    let rhs = &scale * &(&scale * &abs_cos);
    let holds = lhs >= &rhs - &uncertainty_tolerance();
    UncertaintyReport {
        state: *q,
        lhs,
        rhs,
        holds,
        analytic_equality: q.is_pole() || q.n() % q.p().get() == 0,
    }
}

/// [`uncertainty_product`] over the full `(p + 1)²` grid, in grid order.
pub fn uncertainty_scan(p: DiscretisationParam, exec: Execution) -> Vec<UncertaintyReport> {
    let side = p.get() + 1;
    map_indexed(exec, side * side, |i| {
        let q = DiscreteQubit::new(p, i / side, i % side).expect("in range");
        uncertainty_product(&q)
    })
}

/// A point with rational `cos θ` relative to `p_z` cannot also have a
/// rational cosine relative to a second pole at rational angular distance
/// `cos_pole_sep`, when the angle at `p_z` is `2πn/p`.
pub fn complementarity_check(
    cos_theta: &ExactRational,
    cos_pole_sep: &ExactRational,
    vertex_angle: &AngleTurns,
    p: DiscretisationParam,
) -> Result<ThirdSideVerdict> {
    let triangle = SphericalTriangle::new(cos_theta.clone(), cos_pole_sep.clone(), vertex_angle.clone())?;
    classify_third_side(&triangle, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{enumerate_grid, make_state};
    use crate::spherical::ThirdSide;

    fn p(v: u64) -> DiscretisationParam {
        DiscretisationParam::new(v).unwrap()
    }

    fn entries(s: &BitString) -> Vec<i8> {
        s.entries().collect()
    }

    #[test]
    fn layout() {
        let s = bit_string(p(17), 13).unwrap();
        let mut want = vec![1i8; 13];
        want.extend([-1i8; 4]);
        assert_eq!(entries(&s), want);
        assert!(entries(&bit_string(p(13), 0).unwrap()).iter().all(|&e| e == -1));
        assert!(entries(&bit_string(p(13), 13).unwrap()).iter().all(|&e| e == 1));
        assert!(bit_string(p(13), 14).is_err());
    }

    #[test]
    fn rotation_group() {
        let s = bit_string(p(17), 13).unwrap();
        assert_eq!(entries(&rotate(&s, 17)), entries(&s));
        assert_eq!(rotate(&s, 17), s);
        assert_eq!(entries(&rotate(&rotate(&s, 4), 9)), entries(&rotate(&s, 13)));
        assert_eq!(entries(&rotate(&s, -3)), entries(&rotate(&s, 14)));
        let r = rotate(&s, 5);
        for i in 0..17u64 {
            assert_eq!(r.entry(i), s.entry((i + 17 - 5) % 17));
        }
    }

    #[test]
    fn rotation_order_is_p() {
        for pv in [13u64, 17] {
            for m in 1..pv {
                let s = bit_string(p(pv), m).unwrap();
                for k in 1..(2 * pv as i64 + 1) {
                    let same = entries(&rotate(&s, k)) == entries(&s);
                    assert_eq!(same, k % pv as i64 == 0, "p={pv} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn statistics_examples() {
        let s = bit_string(p(17), 13).unwrap();
        assert_eq!(s.mean(), ratio(9, 17));
        assert_eq!(s.variance(), ratio(208, 289));
        assert_eq!(bit_string(p(17), 4).unwrap().variance(), ratio(208, 289));
        assert_eq!(bit_string(p(17), 17).unwrap().mean(), ratio(1, 1));
        assert_eq!(bit_string(p(17), 17).unwrap().variance(), ExactRational::zero());
        assert_eq!(bit_string(p(17), 0).unwrap().mean(), ratio(-1, 1));
    }

    #[test]
    fn statistics_match_closed_forms() {
        for pv in [13u64, 17, 101] {
            for m in 0..=pv {
                let s = bit_string(p(pv), m).unwrap();
                assert_eq!(s.mean(), s.mean_closed_form());
                assert_eq!(s.variance(), s.variance_closed_form());
                let r = rotate(&s, (m * 7) as i64);
                assert_eq!(r.mean(), s.mean());
                assert_eq!(r.variance(), s.variance());
            }
        }
    }

    #[test]
    fn implicit_strings_above_limit() {
        let big = crate::prime::next_prime(MATERIALISE_LIMIT + 1).unwrap();
        let s = rotate(&bit_string(p(big), 700_001).unwrap(), 12_345);
        assert!(!s.is_materialised());
        assert_eq!(s.mean(), s.mean_closed_form());
        // window [offset, offset + m) is exactly the block of +1 entries
        assert_eq!(s.window_sum(12_345, 700_001), 700_001);
        assert_eq!(s.window_sum(12_345 + 700_001, big - 700_001), -((big - 700_001) as i64));
    }

    #[test]
    fn from_qubit_round_trip() {
        let q = make_state(p(17), 13, 5).unwrap();
        let s = from_qubit(&q);
        assert_eq!(s.mean(), ratio(9, 17));
        assert_eq!(s.offset(), 5);
        assert!(entries(&from_qubit(&make_state(p(13), 13, 0).unwrap())).iter().all(|&e| e == 1));
        for q in enumerate_grid(p(13)) {
            assert_eq!(from_qubit(&q).mean(), q.cos_theta());
        }
    }

    #[test]
    fn scaled_strings() {
        let s = ScaledBitString::half_hbar(bit_string(p(17), 13).unwrap());
        assert_eq!(s.entry(0), ratio(1, 2));
        assert_eq!(s.entry(16), ratio(-1, 2));
        assert_eq!(s.mean(), ratio(9, 34));
        assert_eq!(s.variance(), ratio(52, 289));
    }

    #[test]
    fn uncertainty_at_pole_is_equality() {
        let r = uncertainty_product(&make_state(p(17), 17, 0).unwrap());
        let quarter = Real::from_rational(&ratio(1, 4));
        assert_eq!(r.lhs, quarter);
        assert_eq!(r.rhs, quarter);
        assert!(r.holds && r.analytic_equality);
    }

    #[test]
    fn uncertainty_near_equator_is_strict() {
        let r = uncertainty_product(&make_state(p(17), 8, 3).unwrap());
        assert!(r.holds && !r.analytic_equality);
        assert!(r.slack() > uncertainty_tolerance());
        assert!(r.rhs < Real::from_rational(&ratio(1, 60)));
    }

    #[test]
    fn uncertainty_full_grid() {
        let reports = uncertainty_scan(p(17), Execution::Parallel);
        assert_eq!(reports.len(), 324);
        for r in &reports {
            assert!(r.holds, "{:?}", r.state);
            if r.analytic_equality {
                assert!(r.slack().abs() < Real::pow10_neg(40), "{:?}", r.state);
            } else {
                assert!(r.slack() > Real::pow10_neg(40), "{:?}", r.state);
            }
        }
    }

    #[test]
    fn complementarity() {
        let v = complementarity_check(&ratio(9, 17), &ExactRational::zero(), &AngleTurns::from_ratio(3, 17).unwrap(), p(17)).unwrap();
        assert_eq!(v.kind, ThirdSide::ProvablyIrrational);
        let v = complementarity_check(&ratio(9, 17), &ratio(1, 3), &AngleTurns::from_ratio(1, 4).unwrap(), p(17)).unwrap();
        assert!(matches!(v.kind, ThirdSide::ExceptionPossible(_)));
        assert!(complementarity_check(&ratio(1, 1), &ratio(1, 3), &AngleTurns::from_ratio(1, 17).unwrap(), p(17)).is_err());
    }
}

//! Discretised Bloch sphere: states with `cos²(θ/2) = m/p` and `φ/2π = n/p`.

use serde::Serialize;

use crate::angle::AngleTurns;
use crate::error::{Error, Result};
use crate::numeric::Real;
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;

/// One lattice point `(p, m, n)` with `0 <= m, n <= p`.
///
/// The raw `n` is kept as given; `n = p` and `n = 0` describe the same phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DiscreteQubit {
    p: DiscretisationParam,
    m: u64,
    n: u64,
}

impl DiscreteQubit {
    pub fn new(p: DiscretisationParam, m: u64, n: u64) -> Result<Self> {
        let pv = p.get();
        if m > pv {
            return Err(Error::out_of_range("m", m, 0, pv));
        }
        if n > pv {
            return Err(Error::out_of_range("n", n, 0, pv));
        }
        Ok(Self { p, m, n })
    }

    pub fn p(&self) -> DiscretisationParam {
        self.p
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `2m/p - 1`.
    pub fn cos_theta(&self) -> ExactRational {
        ExactRational::new(2 * self.m as i128 - self.p.get() as i128, self.p.get()).expect("p > 0")
    }

    /// `n/p` turns, with `n = p` folded to zero.
    pub fn phase(&self) -> AngleTurns {
        AngleTurns::new(ExactRational::new(self.n, self.p.get()).expect("p > 0"))
    }

    /// True at `m = 0` or `m = p`.
    pub fn is_pole(&self) -> bool {
        self.m == 0 || self.m == self.p.get()
    }

    /// Equal as rays, i.e. up to a global phase. Every `(m, n)` with `0 < m < p`
    /// is a distinct ray; at the poles the relative phase is unobservable.
    pub fn same_ray(&self, other: &Self) -> bool {
        if self.p != other.p || self.m != other.m {
            return false;
        }
        self.is_pole() || self.phase() == other.phase()
    }
}

pub fn make_state(p: DiscretisationParam, m: u64, n: u64) -> Result<DiscreteQubit> {
    DiscreteQubit::new(p, m, n)
}

/// `a0 = √(m/p)` and `a1 = √((p-m)/p) · e^{2πin/p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amplitudes {
    pub a0: Real,
    pub a1_re: Real,
    pub a1_im: Real,
}

impl Amplitudes {
    /// `a0² + |a1|²`.
    pub fn norm_sqr(&self) -> Real {
        &(&(&self.a0 * &self.a0) + &(&self.a1_re * &self.a1_re)) + &(&self.a1_im * &self.a1_im)
    }
}

pub fn amplitudes(q: &DiscreteQubit) -> Amplitudes {
    let p = q.p.get();
    let a0 = Real::from_rational(&ExactRational::new(q.m, p).expect("p > 0")).sqrt();
    let modulus = Real::from_rational(&ExactRational::new(p - q.m, p).expect("p > 0")).sqrt();
    let (sin, cos) = Real::sin_cos_turns(q.phase().turns());
    Amplitudes {
        a0,
        a1_re: &modulus * &cos,
        a1_im: &modulus * &sin,
    }
}

/// `(m/p, (p-m)/p)`.
pub fn born_probabilities(q: &DiscreteQubit) -> (ExactRational, ExactRational) {
    let p = q.p.get();
    (
        ExactRational::new(q.m, p).expect("p > 0"),
        ExactRational::new(p - q.m, p).expect("p > 0"),
    )
}

/// Lattice index `round(x)` with ties to even.
pub(crate) fn round_half_even(x: f64) -> i64 {
    x.round_ties_even() as i64
}

/// `m` for which `2m/p - 1` is nearest to `target_cos`, clamped to `[0, p]`.
pub(crate) fn snap_cos_index(p: u64, target_cos: f64) -> u64 {
    round_half_even(p as f64 * (1.0 + target_cos) / 2.0).clamp(0, p as i64) as u64
}

/// Nearest lattice state to a target `(cos θ, φ/2π)`.
///
/// The result satisfies `|2m/p - 1 - cos θ| <= 1/p` and the phase is within
/// `1/(2p)` turns of the target, measured around the circle.
pub fn nearest_admissible(p: DiscretisationParam, target_cos_theta: f64, target_turns: f64) -> Result<DiscreteQubit> {
    if !(-1.0..=1.0).contains(&target_cos_theta) {
        return Err(Error::out_of_range("cos θ", target_cos_theta, -1, 1));
    }
    if !(0.0..1.0).contains(&target_turns) {
        return Err(Error::out_of_range("φ/2π", target_turns, 0, 1));
    }
    let pv = p.get();
    let m = snap_cos_index(pv, target_cos_theta);
    let n = round_half_even(pv as f64 * target_turns).rem_euclid(pv as i64) as u64;
    DiscreteQubit::new(p, m, n)
}

/// All `(p + 1)²` lattice states, `m` major, starting from `(0, 0)`.
pub fn enumerate_grid(p: DiscretisationParam) -> impl Iterator<Item = DiscreteQubit> {
    let pv = p.get();
    (0..=pv).flat_map(move |m| (0..=pv).map(move |n| DiscreteQubit { p, m, n }))
}

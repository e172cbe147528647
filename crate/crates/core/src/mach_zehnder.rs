//! Admissibility of the two Mach-Zehnder configurations for a given phase
//! difference, and the support-level Statistical Independence check.
//!
//! A which-way measurement needs `Δφ/2π` rational; an interferometric one
//! needs `cos Δφ` rational. Outside `cos Δφ ∈ {0, ±1/2, ±1}` no phase has
//! both, so each phase supports exactly one configuration.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::angle::{classify_cos, AngleTurns, NivenClass};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::prime::DiscretisationParam;
use crate::rational::{ratio, ExactRational};
use crate::rng::trial_rng;

/// `X = 1` interferometric, `X = 0` which-way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MzConfig {
    Interferometric,
    WhichWay,
}

impl MzConfig {
    pub fn other(self) -> Self {
        match self {
            MzConfig::Interferometric => MzConfig::WhichWay,
            MzConfig::WhichWay => MzConfig::Interferometric,
        }
    }

    /// The setting label `X`.
    pub fn setting(self) -> u8 {
        match self {
            MzConfig::Interferometric => 1,
            MzConfig::WhichWay => 0,
        }
    }
}

impl fmt::Display for MzConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MzConfig::Interferometric => "interferometric",
            MzConfig::WhichWay => "which-way",
        })
    }
}

/// How the phase difference `Δφ` is pinned down.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PhaseSpec {
    /// `Δφ = 2πn/p`, `n ≢ 0`.
    RationalTurns(AngleTurns),
    /// `cos Δφ = c`, rational, `|c| <= 1`, `c ∉ {0, ±1/2, ±1}`.
    RationalCosine(ExactRational),
}

impl PhaseSpec {
    pub fn rational_turns(angle: AngleTurns, p: DiscretisationParam) -> Result<Self> {
        if angle.is_zero() {
            return Err(Error::Inadmissible("Δφ must be nonzero".into()));
        }
        if angle.denominator() != &p.get().into() {
            return Err(Error::Mismatch(format!("phase {angle} does not have reduced denominator {p}")));
        }
        Ok(PhaseSpec::RationalTurns(angle))
    }

    pub fn rational_cosine(c: ExactRational) -> Result<Self> {
        if c.abs() > 1 {
            return Err(Error::out_of_range("cos Δφ", &c, -1, 1));
        }
        let exceptional = [ratio(0, 1), ratio(1, 2), ratio(-1, 2), ratio(1, 1), ratio(-1, 1)];
        if exceptional.contains(&c) {
            return Err(Error::Inadmissible(format!("cos Δφ = {c} is a Niven exceptional value")));
        }
        Ok(PhaseSpec::RationalCosine(c))
    }

    /// `Δφ/2π` is rational.
    fn has_rational_turns(&self) -> bool {
        match self {
            PhaseSpec::RationalTurns(_) => true,
            // a rational angle would have cos in {0, ±1/2, ±1}, which is excluded
            PhaseSpec::RationalCosine(_) => false,
        }
    }

    /// `cos Δφ` is rational.
    fn has_rational_cosine(&self) -> bool {
        match self {
            PhaseSpec::RationalTurns(a) => matches!(classify_cos(a), NivenClass::RationalCos(_)),
            PhaseSpec::RationalCosine(_) => true,
        }
    }
}

impl fmt::Display for PhaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSpec::RationalTurns(a) => write!(f, "Δφ/2π = {}", a.turns()),
            PhaseSpec::RationalCosine(c) => write!(f, "cos Δφ = {c}"),
        }
    }
}

pub fn admissible(phase: &PhaseSpec, config: MzConfig) -> bool {
    match config {
        MzConfig::WhichWay => phase.has_rational_turns(),
        MzConfig::Interferometric => phase.has_rational_cosine(),
    }
}

/// `(P(A), P(B)) = ((1 + cos Δφ)/2, (1 - cos Δφ)/2)`.
pub fn interferometer_probabilities(phase: &PhaseSpec) -> Result<(ExactRational, ExactRational)> {
    match phase {
        PhaseSpec::RationalCosine(c) => {
            let one = ExactRational::one();
            let half = ratio(1, 2);
            Ok(((&one + c) * &half, (&one - c) * &half))
        }
        PhaseSpec::RationalTurns(_) => Err(Error::Inadmissible(format!(
            "{phase} has no rational cos Δφ, so the interferometer outputs are undefined"
        ))),
    }
}

/// Support indicators `ρ(λ|X)` and `ρ(λ|X')`, `X' = 1 - X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SiRecord {
    pub rho_given_x: u8,
    pub rho_given_x_prime: u8,
    pub violates_si: bool,
}

impl SiRecord {
    /// Builds the record and checks `ρ(λ|X) ≠ 0 ⟹ ρ(λ|X') = 0`.
    pub(crate) fn from_support(given_x: bool, given_x_prime: bool) -> Result<Self> {
        if given_x && given_x_prime {
            return Err(Error::InvariantBreach(
                "hidden variable supported under both settings".into(),
            ));
        }
        Ok(Self {
            rho_given_x: given_x as u8,
            rho_given_x_prime: given_x_prime as u8,
            violates_si: given_x != given_x_prime,
        })
    }
}

pub fn statistical_independence_check(phase: &PhaseSpec, x: MzConfig) -> Result<SiRecord> {
    SiRecord::from_support(admissible(phase, x), admissible(phase, x.other()))
}

/// Draws a phase: with equal odds `n/p` turns (`1 <= n < p`) or a rational
/// cosine `a/b`, `2 <= b <= max_den`, outside the exceptional set.
pub fn sample_phase<R: Rng>(rng: &mut R, p: DiscretisationParam, max_den: u64) -> PhaseSpec {
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(1..p.get()) as i64;
        let angle = AngleTurns::from_ratio(n, p.get() as i64).expect("p > 0");
        PhaseSpec::rational_turns(angle, p).expect("prime denominator")
    } else {
        loop {
            let b = rng.gen_range(2..=max_den) as i64;
            let a = rng.gen_range(-(b - 1)..=b - 1);
            if let Ok(spec) = PhaseSpec::rational_cosine(ratio(a, b)) {
                return spec;
            }
        }
    }
}

/// Outcome of checking many sampled phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SiScan {
    pub samples: u64,
    /// Phases admissible in exactly one configuration.
    pub exclusive: u64,
    /// Records with `violates_si`, counted over both settings per phase.
    pub violations: u64,
    pub records: u64,
}

pub fn si_scan(p: DiscretisationParam, samples: u64, max_den: u64, seed: u64, exec: Execution) -> Result<SiScan> {
    let per_phase = map_indexed(exec, samples, |i| {
        let mut rng = trial_rng(seed, i);
        let phase = sample_phase(&mut rng, p, max_den);
        let exclusive = admissible(&phase, MzConfig::Interferometric) ^ admissible(&phase, MzConfig::WhichWay);
        let a = statistical_independence_check(&phase, MzConfig::Interferometric)?;
        let b = statistical_independence_check(&phase, MzConfig::WhichWay)?;
        Ok((exclusive, a.violates_si as u64 + b.violates_si as u64))
    });
    let mut scan = SiScan {
        samples,
        exclusive: 0,
        violations: 0,
        records: 2 * samples,
    };
    for r in per_phase {
        let (exclusive, v) = r?;
        scan.exclusive += exclusive as u64;
        scan.violations += v;
    }
    Ok(scan)
}

//! Spherical triangles on the unit sphere: the cosine rule, orthogonal
//! colatitudes, and the rational-third-side classifier.
//!
//! For a triangle `ABC` with rational `cos AC`, `cos BC` and a vertex angle
//! `c = 2πn/p` at `C` (`p` prime, `p > 12`), `cos AB` cannot be rational: if
//! it were, `sin AC · sin BC · cos c` would be rational, hence so would
//! `cos² c` and `cos 2c`, which contradicts the Niven classification of
//! `2c = 2π · 2n/p`. The classifier below re-checks every one of those
//! conditions exactly before returning a verdict.

use rand::Rng;

use crate::angle::{classify_cos, AngleTurns};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::numeric::{reconstruct_rational, reconstruction_tolerance, Real};
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;
use crate::rng::trial_rng;

/// Two sides given by their rational cosines and the angle between them at `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalTriangle {
    cos_ac: ExactRational,
    cos_bc: ExactRational,
    vertex_angle_c: AngleTurns,
}

fn check_non_degenerate(cos_ac: &ExactRational, cos_bc: &ExactRational, c: &AngleTurns) -> Result<()> {
    for (name, v) in [("cos AC", cos_ac), ("cos BC", cos_bc)] {
        if v.abs() > 1 {
            return Err(Error::out_of_range(name, v, -1, 1));
        }
        if v.abs() == 1 {
            return Err(Error::Degenerate(format!("{name} = {v}")));
        }
    }
    if c.is_zero() || c.is_half_turn() {
        return Err(Error::Degenerate(format!("vertex angle c = {c}")));
    }
    Ok(())
}

impl SphericalTriangle {
    pub fn new(cos_ac: ExactRational, cos_bc: ExactRational, vertex_angle_c: AngleTurns) -> Result<Self> {
        check_non_degenerate(&cos_ac, &cos_bc, &vertex_angle_c)?;
        Ok(Self {
            cos_ac,
            cos_bc,
            vertex_angle_c,
        })
    }

    pub fn cos_ac(&self) -> &ExactRational {
        &self.cos_ac
    }

    pub fn cos_bc(&self) -> &ExactRational {
        &self.cos_bc
    }

    pub fn vertex_angle_c(&self) -> &AngleTurns {
        &self.vertex_angle_c
    }

    /// `cos AB` at high precision.
    pub fn numeric_cos_ab(&self) -> Real {
        let cos_c = Real::cos_turns(self.vertex_angle_c.turns());
        cosine_rule_numeric(&self.cos_ac, &self.cos_bc, &cos_c).expect("validated on construction")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThirdSide {
    /// `cos AB` is irrational; every precondition was checked exactly.
    ProvablyIrrational,
    /// The argument does not apply; `cos AB` may or may not be rational.
    ExceptionPossible(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThirdSideVerdict {
    pub kind: ThirdSide,
    pub numeric_cos_ab: Real,
}

impl ThirdSideVerdict {
    pub fn is_provably_irrational(&self) -> bool {
        self.kind == ThirdSide::ProvablyIrrational
    }
}

/// `cos AB = cos AC cos BC + sin AC sin BC cos c` with non-negative sines.
pub fn cosine_rule_numeric(cos_ac: &ExactRational, cos_bc: &ExactRational, cos_c: &Real) -> Result<Real> {
    for (name, v) in [("cos AC", cos_ac), ("cos BC", cos_bc)] {
        if v.abs() > 1 {
            return Err(Error::out_of_range(name, v, -1, 1));
        }
    }
    if cos_c.abs() > Real::one() {
        return Err(Error::out_of_range("cos c", cos_c, -1, 1));
    }
    let one = ExactRational::one();
    let sin_ac = Real::from_rational(&(&one - &cos_ac.square())).sqrt();
    let sin_bc = Real::from_rational(&(&one - &cos_bc.square())).sqrt();
    let cos_product = Real::from_rational(&(cos_ac * cos_bc));
    Ok(&cos_product + &(&(&sin_ac * &sin_bc) * cos_c))
}

pub fn classify_third_side(t: &SphericalTriangle, p: DiscretisationParam) -> Result<ThirdSideVerdict> {
    check_non_degenerate(&t.cos_ac, &t.cos_bc, &t.vertex_angle_c)?;
    let numeric_cos_ab = t.numeric_cos_ab();
    let c = &t.vertex_angle_c;

    let kind = if classify_cos(&c.doubled()).is_rational() {
        ThirdSide::ExceptionPossible("Niven exception for 2c".into())
    } else if c.denominator() != &p.get().into() {
        ThirdSide::ExceptionPossible(format!("vertex angle {c} is not of the form n/{p}"))
    } else {
        ThirdSide::ProvablyIrrational
    };
    Ok(ThirdSideVerdict { kind, numeric_cos_ab })
}

/// Cosines of the colatitudes of one point relative to three orthogonal poles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colatitudes {
    /// Relative to `p_z`.
    pub cos_theta: Real,
    /// Relative to `p_x` (equator, longitude 0).
    pub cos_theta_x: Real,
    /// Relative to `p_y` (equator, longitude π/2).
    pub cos_theta_y: Real,
}

impl Colatitudes {
    /// `(|sin θ'| |sin θ''|, |cos θ|)`; the first is never smaller.
    pub fn uncertainty_sides(&self) -> (Real, Real) {
        let one = Real::one();
        let sin_x = (&one - &(&self.cos_theta_x * &self.cos_theta_x)).sqrt();
        let sin_y = (&one - &(&self.cos_theta_y * &self.cos_theta_y)).sqrt();
        (&sin_x * &sin_y, self.cos_theta.abs())
    }
}

/// Same as [`orthogonal_colatitudes`] from precomputed sines and cosines.
pub fn orthogonal_colatitudes_trig(sin_theta: &Real, cos_theta: &Real, sin_phi: &Real, cos_phi: &Real) -> Colatitudes {
    Colatitudes {
        cos_theta: cos_theta.clone(),
        cos_theta_x: sin_theta * cos_phi,
        cos_theta_y: sin_theta * sin_phi,
    }
}

pub fn orthogonal_colatitudes(theta: &Real, phi: &Real) -> Colatitudes {
    let (sin_theta, cos_theta) = theta.sin_cos();
    let (sin_phi, cos_phi) = phi.sin_cos();
    orthogonal_colatitudes_trig(&sin_theta, &cos_theta, &sin_phi, &cos_phi)
}

/// One randomly drawn conforming triangle and what was concluded about it.
#[derive(Debug, Clone)]
pub struct TriangleSample {
    pub triangle: SphericalTriangle,
    pub verdict: ThirdSideVerdict,
    /// A rational with small denominator matching the numeric `cos AB`, if any.
    pub reconstructed: Option<ExactRational>,
}

fn random_cosine<R: Rng>(rng: &mut R, max_den: u64) -> ExactRational {
    let den = rng.gen_range(2..=max_den) as i64;
    let num = rng.gen_range(-(den - 1)..=den - 1);
    ExactRational::new(num, den).expect("den >= 2")
}

/// Draws `count` conforming triangles (side-cosine denominators up to
/// `max_den`, vertex angle `2πn/p`), classifies each, and tries to match its
/// numeric third-side cosine with a rational of denominator up to
/// `reconstruction_bound`.
pub fn survey_conforming_triangles(
    p: DiscretisationParam,
    count: u64,
    max_den: u64,
    reconstruction_bound: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<TriangleSample>> {
    let tol = reconstruction_tolerance();
    map_indexed(exec, count, |i| {
        let mut rng = trial_rng(seed, i);
        let cos_ac = random_cosine(&mut rng, max_den);
        let cos_bc = random_cosine(&mut rng, max_den);
        let n = rng.gen_range(1..p.get()) as i64;
        let c = AngleTurns::from_ratio(n, p.get() as i64)?;
        let triangle = SphericalTriangle::new(cos_ac, cos_bc, c)?;
        let verdict = classify_third_side(&triangle, p)?;
        let reconstructed = reconstruct_rational(&verdict.numeric_cos_ab, reconstruction_bound, &tol);
        Ok(TriangleSample {
            triangle,
            verdict,
            reconstructed,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(v: u64) -> DiscretisationParam {
        DiscretisationParam::new(v).unwrap()
    }

    #[test]
    fn cosine_rule_hand_values() {
        let v = cosine_rule_numeric(&ratio(0, 1), &ratio(0, 1), &Real::one()).unwrap();
        assert_eq!(v, Real::one());
        let v = cosine_rule_numeric(&ratio(3, 5), &ratio(4, 5), &Real::zero()).unwrap();
        assert!((&v - &Real::from_rational(&ratio(12, 25))).abs() < Real::pow10_neg(100));
    }

    #[test]
    fn cosine_rule_rejects_out_of_range() {
        assert!(cosine_rule_numeric(&ratio(6, 5), &ratio(0, 1), &Real::zero()).is_err());
        assert!(cosine_rule_numeric(&ratio(0, 1), &ratio(0, 1), &Real::from_integer(2)).is_err());
    }

    #[test]
    fn cosine_rule_symmetric() {
        let c = Real::cos_turns(&ratio(5, 17));
        let a = cosine_rule_numeric(&ratio(3, 5), &ratio(-4, 7), &c).unwrap();
        let b = cosine_rule_numeric(&ratio(-4, 7), &ratio(3, 5), &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conforming_triangle_is_irrational() {
        let t = SphericalTriangle::new(ratio(3, 5), ratio(4, 5), AngleTurns::from_ratio(5, 17).unwrap()).unwrap();
        let v = classify_third_side(&t, p(17)).unwrap();
        assert_eq!(v.kind, ThirdSide::ProvablyIrrational);
        let want = 0.48 + 0.48 * (10.0 * std::f64::consts::PI / 17.0).cos();
        assert!((v.numeric_cos_ab.to_f64() - want).abs() < 1e-15);
        assert!(reconstruct_rational(&v.numeric_cos_ab, 1_000_000, &reconstruction_tolerance()).is_none());
    }

    #[test]
    fn quarter_turn_is_a_niven_exception() {
        let t = SphericalTriangle::new(ratio(3, 5), ratio(4, 5), AngleTurns::from_ratio(1, 4).unwrap()).unwrap();
        let v = classify_third_side(&t, p(17)).unwrap();
        assert_eq!(v.kind, ThirdSide::ExceptionPossible("Niven exception for 2c".into()));
        // c = π/2 so cos AB = cos AC cos BC exactly
        assert!((&v.numeric_cos_ab - &Real::from_rational(&ratio(12, 25))).abs() < Real::pow10_neg(100));
    }

    #[test]
    fn wrong_denominator_is_an_exception() {
        let t = SphericalTriangle::new(ratio(1, 3), ratio(1, 5), AngleTurns::from_ratio(2, 19).unwrap()).unwrap();
        let v = classify_third_side(&t, p(17)).unwrap();
        assert!(matches!(v.kind, ThirdSide::ExceptionPossible(_)));
        let t = SphericalTriangle::new(ratio(1, 3), ratio(1, 5), AngleTurns::from_ratio(1, 5).unwrap()).unwrap();
        assert!(!classify_third_side(&t, p(17)).unwrap().is_provably_irrational());
    }

    #[test]
    fn degenerate_inputs() {
        let c = AngleTurns::from_ratio(1, 17).unwrap();
        assert!(matches!(SphericalTriangle::new(ratio(1, 1), ratio(0, 1), c.clone()), Err(Error::Degenerate(_))));
        assert!(matches!(SphericalTriangle::new(ratio(0, 1), ratio(-1, 1), c), Err(Error::Degenerate(_))));
        assert!(matches!(SphericalTriangle::new(ratio(0, 1), ratio(0, 1), AngleTurns::zero()), Err(Error::Degenerate(_))));
        assert!(matches!(
            SphericalTriangle::new(ratio(0, 1), ratio(0, 1), AngleTurns::from_ratio(1, 2).unwrap()),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            SphericalTriangle::new(ratio(3, 2), ratio(0, 1), AngleTurns::from_ratio(1, 17).unwrap()),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn exhaustive_p13_small_denominators() {
        let p13 = p(13);
        let mut cosines = Vec::new();
        for d in 2..=50i64 {
            for n in -(d - 1)..d {
                let c = ratio(n, d);
                if c.denom() == &d.into() {
                    cosines.push(c);
                }
            }
        }
        // all n, a strided subset of side pairs to keep the scan short
        for n in 1..13 {
            let c = AngleTurns::from_ratio(n, 13).unwrap();
            for a in cosines.iter().step_by(53) {
                for b in cosines.iter().step_by(59) {
                    let t = SphericalTriangle::new(a.clone(), b.clone(), c.clone()).unwrap();
                    assert!(classify_third_side(&t, p13).unwrap().is_provably_irrational());
                }
            }
        }
    }

    #[test]
    fn colatitude_poles() {
        let c = orthogonal_colatitudes(&Real::zero(), &Real::zero());
        assert_eq!((c.cos_theta.clone(), c.cos_theta_x.clone(), c.cos_theta_y.clone()), (Real::one(), Real::zero(), Real::zero()));
        let (lhs, rhs) = c.uncertainty_sides();
        assert_eq!(lhs, rhs);

        let half_pi = &Real::pi() * &Real::from_rational(&ratio(1, 2));
        let c = orthogonal_colatitudes(&half_pi, &Real::zero());
        let tiny = Real::pow10_neg(100);
        assert!(c.cos_theta.abs() < tiny);
        assert!((&c.cos_theta_x - &Real::one()).abs() < tiny);
        assert!(c.cos_theta_y.abs() < tiny);
        let (lhs, rhs) = c.uncertainty_sides();
        assert!((&lhs - &rhs).abs() < Real::pow10_neg(40));
    }

    #[test]
    fn colatitude_generic_point_strict() {
        let pi = Real::pi();
        let theta = &pi * &Real::from_rational(&ratio(1, 3));
        let phi = &pi * &Real::from_rational(&ratio(1, 5));
        let c = orthogonal_colatitudes(&theta, &phi);
        let (t, f) = (std::f64::consts::FRAC_PI_3, std::f64::consts::PI / 5.0);
        assert!((c.cos_theta_x.to_f64() - t.sin() * f.cos()).abs() < 1e-15);
        assert!((c.cos_theta_y.to_f64() - t.sin() * f.sin()).abs() < 1e-15);
        let (lhs, rhs) = c.uncertainty_sides();
        assert!(lhs > &rhs + &Real::pow10_neg(12));
    }

    #[test]
    fn survey_is_deterministic() {
        let a = survey_conforming_triangles(p(17), 20, 1000, 1_000_000, 5, Execution::Sequential).unwrap();
        let b = survey_conforming_triangles(p(17), 20, 1000, 1_000_000, 5, Execution::Parallel).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.triangle, y.triangle);
            assert_eq!(x.verdict, y.verdict);
            assert!(x.verdict.is_provably_irrational());
            assert!(x.reconstructed.is_none());
        }
    }
}

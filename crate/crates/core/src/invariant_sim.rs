//! Deterministic hidden-variable model on a helix of trajectories.
//!
//! At the coarsest level the `p` trajectories `λ = 0..p` are split into a
//! cluster of `m` labelled `+1` and `p - m` labelled `-1`, rotated by `n`.
//! Each refinement replaces every trajectory by `p` finer ones, split again
//! with its own `(m, n)`. A trajectory at depth `L` is named by `L` digits,
//! which are exactly its p-adic label.

use serde::Serialize;

use crate::bloch::DiscreteQubit;
use crate::error::{Error, Result};
use crate::exec::{count_indexed, Execution};
use crate::padic::{PAdicLabel, DEFAULT_DEPTH};
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;

/// Most fractal levels a helix may carry.
pub const DEPTH_CAP: usize = DEFAULT_DEPTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClusterOutcome {
    Plus,
    Minus,
}

impl ClusterOutcome {
    pub fn sign(self) -> i8 {
        match self {
            ClusterOutcome::Plus => 1,
            ClusterOutcome::Minus => -1,
        }
    }
}

/// One fractal level: `m` of `p` trajectories are `+1`, starting at `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Level {
    pub m: u64,
    pub n: u64,
}

fn outcome_at(p: u64, level: Level, digit: u64) -> ClusterOutcome {
    if (digit % p + p - level.n % p) % p < level.m {
        ClusterOutcome::Plus
    } else {
        ClusterOutcome::Minus
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HelixEnsemble {
    p: DiscretisationParam,
    levels: Vec<Level>,
}

impl HelixEnsemble {
    /// Single-level helix reproducing the statistics of `q`.
    pub fn new(q: &DiscreteQubit) -> Self {
        Self {
            p: q.p(),
            levels: vec![Level { m: q.m(), n: q.n() % q.p().get() }],
        }
    }

    pub fn p(&self) -> DiscretisationParam {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Adds a finer level with `sub_m` plus-trajectories rotated by
    /// `sub_rotation`.
    pub fn refine(&self, sub_m: u64, sub_rotation: u64) -> Result<Self> {
        if self.depth() >= DEPTH_CAP {
            return Err(Error::DepthCap(DEPTH_CAP));
        }
        let p = self.p.get();
        if sub_m > p {
            return Err(Error::out_of_range("m", sub_m, 0, p));
        }
        let mut levels = self.levels.clone();
        levels.push(Level {
            m: sub_m,
            n: sub_rotation % p,
        });
        Ok(Self { p: self.p, levels })
    }

    /// Outcome of coarse trajectory `λ`, `0 <= λ < p`.
    pub fn assign_cluster(&self, lambda: u64) -> Result<ClusterOutcome> {
        self.outcome_at_level(0, lambda)
    }

    pub fn outcome_at_level(&self, level: usize, digit: u64) -> Result<ClusterOutcome> {
        let p = self.p.get();
        if digit >= p {
            return Err(Error::out_of_range("λ", digit, 0, p - 1));
        }
        let lv = *self
            .levels
            .get(level)
            .ok_or_else(|| Error::out_of_range("level", level, 0, self.depth() - 1))?;
        Ok(outcome_at(p, lv, digit))
    }

    /// Outcomes along a trajectory, one per level.
    pub fn trajectory_outcomes(&self, label: &PAdicLabel) -> Result<Vec<ClusterOutcome>> {
        if label.p() != self.p {
            return Err(Error::Mismatch(format!("label is {}-adic, helix has p = {}", label.p(), self.p)));
        }
        if label.depth() != self.depth() {
            return Err(Error::Mismatch(format!(
                "label depth {} does not match helix depth {}",
                label.depth(),
                self.depth()
            )));
        }
        let p = self.p.get();
        Ok(self
            .levels
            .iter()
            .zip(label.digits())
            .map(|(&lv, &d)| outcome_at(p, lv, d))
            .collect())
    }

    /// Label of the trajectory numbered `index` among the `p^depth` at full
    /// depth; the coarsest digit is the most significant.
    pub fn label(&self, index: u128) -> Result<PAdicLabel> {
        let p = self.p.get() as u128;
        let total = p
            .checked_pow(self.depth() as u32)
            .ok_or_else(|| Error::Mismatch("trajectory count overflows".into()))?;
        if index >= total {
            return Err(Error::out_of_range("trajectory", index, 0, total - 1));
        }
        let mut digits = vec![0u64; self.depth()];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % p) as u64;
            rest /= p;
        }
        PAdicLabel::new(self.p, digits)
    }

    /// `(P(+1), P(-1))` at `level`, by enumerating all `p` trajectories.
    pub fn level_frequencies(&self, level: usize, exec: Execution) -> Result<(ExactRational, ExactRational)> {
        let p = self.p.get();
        let lv = *self
            .levels
            .get(level)
            .ok_or_else(|| Error::out_of_range("level", level, 0, self.depth() - 1))?;
        let plus = count_indexed(exec, p, |d| outcome_at(p, lv, d) == ClusterOutcome::Plus);
        Ok((ExactRational::new(plus, p)?, ExactRational::new(p - plus, p)?))
    }

    /// Born frequencies of the coarse measurement.
    pub fn born_frequencies(&self, exec: Execution) -> Result<(ExactRational, ExactRational)> {
        self.level_frequencies(0, exec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{born_probabilities, enumerate_grid, make_state};
    use crate::padic::label_distance;
    use crate::rational::ratio;

    fn p(v: u64) -> DiscretisationParam {
        DiscretisationParam::new(v).unwrap()
    }

    #[test]
    fn born_rule_on_full_grid() {
        for q in enumerate_grid(p(13)) {
            let h = HelixEnsemble::new(&q);
            let f = h.born_frequencies(Execution::Sequential).unwrap();
            assert_eq!(f, born_probabilities(&q));
            assert_eq!(f, h.born_frequencies(Execution::Parallel).unwrap());
        }
    }

    #[test]
    fn cluster_is_contiguous_from_rotation() {
        let h = HelixEnsemble::new(&make_state(p(17), 5, 15).unwrap());
        let plus: Vec<u64> = (0..17)
            .filter(|&l| h.assign_cluster(l).unwrap() == ClusterOutcome::Plus)
            .collect();
        assert_eq!(plus, vec![0, 1, 2, 15, 16]);
        assert!(h.assign_cluster(17).is_err());
    }

    #[test]
    fn refinement_and_cap() {
        let mut h = HelixEnsemble::new(&make_state(p(13), 4, 0).unwrap());
        for k in 1..DEPTH_CAP {
            h = h.refine(k as u64, 3).unwrap();
        }
        assert_eq!(h.depth(), DEPTH_CAP);
        assert_eq!(h.refine(1, 0).unwrap_err(), Error::DepthCap(DEPTH_CAP));
        assert_eq!(h.level_frequencies(2, Execution::Parallel).unwrap(), (ratio(2, 13), ratio(11, 13)));
        assert!(HelixEnsemble::new(&make_state(p(13), 4, 0).unwrap()).refine(14, 0).is_err());
    }

    #[test]
    fn siblings_are_close_in_label_metric() {
        let mut h = HelixEnsemble::new(&make_state(p(17), 9, 2).unwrap());
        h = h.refine(3, 1).unwrap().refine(8, 0).unwrap();
        // trajectories 17k and 17k+1 share their first two digits
        let a = h.label(17 * 40).unwrap();
        let b = h.label(17 * 40 + 1).unwrap();
        assert_eq!(label_distance(&a, &b).unwrap(), ratio(1, 4913));
        let c = h.label(0).unwrap();
        let d = h.label(289).unwrap();
        assert_eq!(label_distance(&c, &d).unwrap(), ratio(1, 17));
        assert!(h.label(4913).is_err());
        assert_eq!(h.trajectory_outcomes(&a).unwrap().len(), 3);
    }
}

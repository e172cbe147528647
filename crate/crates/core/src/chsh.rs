//! CHSH trials on the lattice.
//!
//! Each trial fixes which settings were actually chosen and snaps the
//! relevant geometry to the lattice: the three pair cosines become `2m/p - 1`
//! and the angle at Bob's actual direction becomes `2πn/p`. The triangle
//! (Alice actual, Bob actual, Bob counterfactual) then has two rational
//! sides and a `2πn/p` vertex angle, so its third side has an irrational
//! cosine and the double-counterfactual cell of the lookup table is
//! undefined.
//!
//! Correlations use nearest-lattice rounding of the singlet value `-cos θ`:
//! `E = -(2m/p - 1)` with `m = round(p (1 + cos θ) / 2)`. This rounding rule
//! is a modelling choice; it keeps `|E - (-cos θ)| <= 1/p`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::angle::AngleTurns;
use crate::bloch::{round_half_even, snap_cos_index};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::mach_zehnder::SiRecord;
use crate::numeric::Real;
use crate::prime::DiscretisationParam;
use crate::rational::ExactRational;
use crate::rng::{trial_rng, TrialRng};
use crate::spherical::{classify_third_side, SphericalTriangle, ThirdSide};

/// Default jitter radius in radians.
pub const DEFAULT_JITTER: f64 = 1e-3;

/// Alice's setting `X` and Bob's setting `Y`, each 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SettingPair {
    alice: u8,
    bob: u8,
}

impl SettingPair {
    pub fn new(alice: u8, bob: u8) -> Result<Self> {
        if alice > 1 {
            return Err(Error::out_of_range("X", alice, 0, 1));
        }
        if bob > 1 {
            return Err(Error::out_of_range("Y", bob, 0, 1));
        }
        Ok(Self { alice, bob })
    }

    pub fn alice(self) -> u8 {
        self.alice
    }

    pub fn bob(self) -> u8 {
        self.bob
    }

    /// `(X, 1 - Y)`.
    pub fn bob_flipped(self) -> Self {
        Self {
            alice: self.alice,
            bob: 1 - self.bob,
        }
    }

    pub fn all() -> [SettingPair; 4] {
        [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(a, b)| SettingPair { alice: a, bob: b })
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={} Y={}", self.alice, self.bob)
    }
}

/// Detector orientations, radians, all in one great circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorAngles {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl DetectorAngles {
    /// `a0 = 0, a1 = π/2, b0 = π/4, b1 = -π/4`.
    pub fn optimal() -> Self {
        Self {
            alice: [0.0, FRAC_PI_2],
            bob: [FRAC_PI_4, -FRAC_PI_4],
        }
    }

    /// From `[a0, a1, b0, b1]`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v {
            [a0, a1, b0, b1] if v.iter().all(|x| x.is_finite()) => Ok(Self {
                alice: [*a0, *a1],
                bob: [*b0, *b1],
            }),
            _ => Err(Error::Parse(format!("expected four finite angles, got {v:?}"))),
        }
    }

    /// `cos(a_X - b_Y)`.
    pub fn separation_cos(&self, xy: SettingPair) -> f64 {
        (self.alice[xy.alice as usize] - self.bob[xy.bob as usize]).cos()
    }
}

/// The snapped geometry of one trial, in terms of roles rather than labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialGeometry {
    pub p: DiscretisationParam,
    /// Alice actual to Bob actual.
    pub cos_actual_pair: ExactRational,
    /// Bob actual to Bob counterfactual.
    pub cos_bob_pair: ExactRational,
    /// Alice actual to Alice counterfactual.
    pub cos_alice_pair: ExactRational,
    /// Angle at Bob actual between the arcs to Alice actual and Bob counterfactual.
    #[serde(serialize_with = "serialize_turns")]
    pub vertex_angle_at_bob: AngleTurns,
}

fn serialize_turns<S: serde::Serializer>(a: &AngleTurns, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.turns().to_fraction_string())
}

impl TrialGeometry {
    /// The triangle whose third side is the double counterfactual.
    pub fn counterfactual_triangle(&self) -> Result<SphericalTriangle> {
        SphericalTriangle::new(
            self.cos_actual_pair.clone(),
            self.cos_bob_pair.clone(),
            self.vertex_angle_at_bob.clone(),
        )
        .map_err(|e| Error::Nonconforming(e.to_string()))
    }

    /// `None` when every lattice condition holds; otherwise the reason.
    pub fn nonconformity(&self) -> Result<Option<String>> {
        let t = self.counterfactual_triangle()?;
        Ok(match classify_third_side(&t, self.p)?.kind {
            ThirdSide::ProvablyIrrational => None,
            ThirdSide::ExceptionPossible(reason) => Some(reason),
        })
    }
}

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn axpy(a: f64, x: Vec3, y: Vec3) -> Vec3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

/// Unit vector at angle `alpha` from the pole in the x-z great circle,
/// tilted by up to `jitter` radians in a uniformly random direction.
fn jittered_direction(alpha: f64, jitter: f64, rng: &mut TrialRng) -> Vec3 {
    let v = [alpha.sin(), 0.0, alpha.cos()];
    let e1 = [alpha.cos(), 0.0, -alpha.sin()];
    let e2 = [0.0, 1.0, 0.0];
    let psi = rng.gen_range(0.0..2.0 * PI);
    // uniform on the (small) cap
    let r = jitter * rng.gen::<f64>().sqrt();
    let t = axpy(psi.cos(), e1, [0.0; 3]);
    let t = axpy(psi.sin(), e2, t);
    axpy(r.sin(), t, axpy(r.cos(), v, [0.0; 3]))
}

/// Rational `2m/p - 1` nearest to `c`, moved one step inward if it lands on ±1.
fn snap_pair_cosine(p: u64, c: f64) -> Result<ExactRational> {
    let mut m = snap_cos_index(p, c.clamp(-1.0, 1.0));
    if m == 0 {
        m = 1;
    } else if m == p {
        m = p - 1;
    }
    if m == 0 || m == p {
        return Err(Error::SnapFailed(format!("cosine {c}")));
    }
    Ok(ExactRational::new(2 * m as i128 - p as i128, p).expect("p > 0"))
}

/// Oriented angle at `b` from the arc towards `a` to the arc towards `c`, in turns.
fn vertex_turns(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let t1 = axpy(-dot(a, b), b, a);
    let t2 = axpy(-dot(c, b), b, c);
    let angle = dot(b, cross(t1, t2)).atan2(dot(t1, t2));
    (angle / (2.0 * PI)).rem_euclid(1.0)
}

/// Nearest `n/p` to `turns`, skipping `0` (a degenerate vertex).
fn snap_vertex(p: u64, turns: f64) -> Result<AngleTurns> {
    let mut n = round_half_even(p as f64 * turns).rem_euclid(p as i64);
    if n == 0 {
        n = if turns < 0.5 { 1 } else { p as i64 - 1 };
    }
    let angle = AngleTurns::from_ratio(n, p as i64)?;
    if angle.is_zero() || angle.is_half_turn() {
        return Err(Error::SnapFailed(format!("vertex angle {turns} turns")));
    }
    Ok(angle)
}

/// Jitters the nominal directions for the chosen settings and snaps the
/// resulting geometry to the lattice. Deterministic in `seed`.
pub fn build_trial_geometry(
    p: DiscretisationParam,
    angles: &DetectorAngles,
    chosen: SettingPair,
    jitter: f64,
    seed: u64,
) -> Result<TrialGeometry> {
    let mut rng = trial_rng(seed, 0);
    geometry_from_rng(p, angles, chosen, jitter, &mut rng)
}

fn geometry_from_rng(
    p: DiscretisationParam,
    angles: &DetectorAngles,
    chosen: SettingPair,
    jitter: f64,
    rng: &mut TrialRng,
) -> Result<TrialGeometry> {
    if !(0.0..=0.1).contains(&jitter) {
        return Err(Error::out_of_range("jitter", jitter, 0, 0.1));
    }
    let (x, y) = (chosen.alice as usize, chosen.bob as usize);
    let alice_actual = jittered_direction(angles.alice[x], jitter, rng);
    let alice_cf = jittered_direction(angles.alice[1 - x], jitter, rng);
    let bob_actual = jittered_direction(angles.bob[y], jitter, rng);
    let bob_cf = jittered_direction(angles.bob[1 - y], jitter, rng);

    let pv = p.get();
    Ok(TrialGeometry {
        p,
        cos_actual_pair: snap_pair_cosine(pv, dot(alice_actual, bob_actual))?,
        cos_bob_pair: snap_pair_cosine(pv, dot(bob_actual, bob_cf))?,
        cos_alice_pair: snap_pair_cosine(pv, dot(alice_actual, alice_cf))?,
        vertex_angle_at_bob: snap_vertex(pv, vertex_turns(alice_actual, bob_actual, bob_cf))?,
    })
}

/// One cell of Alice's lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CellState {
    /// Measured outcome.
    Observed(i8),
    /// Opposite of what the partner measured along the same direction.
    Inferred(i8),
    /// Definite, but not known.
    DefiniteUnknown,
    /// No outcome is consistent with the lattice.
    Undefined,
}

impl CellState {
    pub fn is_undefined(self) -> bool {
        self == CellState::Undefined
    }

    /// `+`/`-` observed, `(+)`/`(-)` inferred, `?` unknown, `_` undefined.
    pub fn symbol(self) -> &'static str {
        match self {
            CellState::Observed(1) => "+",
            CellState::Observed(_) => "-",
            CellState::Inferred(1) => "(+)",
            CellState::Inferred(_) => "(-)",
            CellState::DefiniteUnknown => "?",
            CellState::Undefined => "_",
        }
    }
}

/// Row labels of a column, in storage order.
pub const ROW_LABELS: [&str; 4] = ["X=0", "X=1", "Y=0", "Y=1"];

/// Cells for rows `X=0, X=1, Y=0, Y=1`.
pub type Column = [CellState; 4];

fn check_outcome(v: i8, who: &'static str) -> Result<()> {
    if v == 1 || v == -1 {
        Ok(())
    } else {
        Err(Error::out_of_range(who, v, -1, 1))
    }
}

/// Fills one lookup-table column for a trial with the given settings and outcomes.
pub fn fill_column(g: &TrialGeometry, chosen: SettingPair, alice_outcome: i8, bob_outcome: i8) -> Result<Column> {
    check_outcome(alice_outcome, "Alice's outcome")?;
    check_outcome(bob_outcome, "Bob's outcome")?;
    if let Some(reason) = g.nonconformity()? {
        return Err(Error::Nonconforming(reason));
    }
    // the alice pair is rational by construction; re-check rather than assume
    if g.cos_alice_pair.abs() >= 1 {
        return Err(Error::Nonconforming(format!("cos of Alice's pair = {}", g.cos_alice_pair)));
    }
    let mut column = [CellState::Undefined; 4];
    column[chosen.alice as usize] = CellState::Observed(alice_outcome);
    column[1 - chosen.alice as usize] = CellState::DefiniteUnknown;
    column[2 + chosen.bob as usize] = CellState::Inferred(-bob_outcome);
    column[2 + (1 - chosen.bob) as usize] = CellState::Undefined;
    Ok(column)
}

/// Alice's table: one column per trial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LookupTable {
    pub columns: Vec<Column>,
}

impl LookupTable {
    pub fn undefined_cells(&self) -> usize {
        self.columns.iter().flatten().filter(|c| c.is_undefined()).count()
    }

    /// Columns with no undefined cell.
    pub fn completable_columns(&self) -> usize {
        self.columns.iter().filter(|c| !c.iter().any(|s| s.is_undefined())).count()
    }

    /// Every column has exactly three defined cells.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.columns.iter().enumerate() {
            let undefined = c.iter().filter(|s| s.is_undefined()).count();
            if undefined != 1 {
                return Err(Error::InvariantBreach(format!("column {i} has {undefined} undefined cells")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for LookupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (row, label) in ROW_LABELS.iter().enumerate() {
            write!(f, "{label}")?;
            for c in &self.columns {
                write!(f, " {:>3}", c[row].symbol())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `-(2m/p - 1)` with `m = round(p (1 + cos θ) / 2)`, ties to even.
pub fn singlet_correlation(p: DiscretisationParam, target_separation_cos: f64) -> Result<ExactRational> {
    if !(-1.0..=1.0).contains(&target_separation_cos) {
        return Err(Error::out_of_range("cos θ_ab", target_separation_cos, -1, 1));
    }
    let pv = p.get();
    let m = snap_cos_index(pv, target_separation_cos);
    Ok(ExactRational::new(pv as i128 - 2 * m as i128, pv).expect("p > 0"))
}

/// `S = E00 + E01 + E10 - E11`.
pub fn chsh_s_value(p: DiscretisationParam, angles: &DetectorAngles) -> Result<ExactRational> {
    let mut s = ExactRational::zero();
    for xy in SettingPair::all() {
        let e = singlet_correlation(p, angles.separation_cos(xy))?;
        s = if xy.alice == 1 && xy.bob == 1 { s - e } else { s + e };
    }
    Ok(s)
}

/// `2√2`.
pub fn tsirelson_bound() -> Real {
    &Real::from_integer(2) * &Real::from_integer(2).sqrt()
}

/// `| |S| - 2√2 |` at high precision.
pub fn tsirelson_gap(s: &ExactRational) -> Real {
    (&Real::from_rational(&s.abs()) - &tsirelson_bound()).abs()
}

/// Largest `|E_p - (-cos θ)|` over the four setting pairs.
pub fn correlation_max_error(p: DiscretisationParam, angles: &DetectorAngles) -> Result<Real> {
    let mut worst = Real::zero();
    for xy in SettingPair::all() {
        let diff = angles.alice[xy.alice as usize] - angles.bob[xy.bob as usize];
        let target = Real::from_f64(diff).cos();
        let e = singlet_correlation(p, angles.separation_cos(xy))?;
        let err = (&Real::from_rational(&e) + &target).abs();
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}

/// Result of the support-level Statistical Independence check for one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SiOutcome {
    Decided(SiRecord),
    /// The geometry does not meet the lattice conditions; no claim is made.
    Undecided(String),
}

/// `ρ(λ|XY) = 1` for the consistent settings; `ρ(λ|XY') = 0` because the
/// `XY'` counterfactual needs the irrational third side.
pub fn si_violation_chsh(g: &TrialGeometry, _xy: SettingPair) -> Result<SiOutcome> {
    let t = match g.counterfactual_triangle() {
        Ok(t) => t,
        Err(e) => return Ok(SiOutcome::Undecided(e.to_string())),
    };
    match classify_third_side(&t, g.p)?.kind {
        ThirdSide::ProvablyIrrational => Ok(SiOutcome::Decided(SiRecord::from_support(true, false)?)),
        ThirdSide::ExceptionPossible(reason) => Ok(SiOutcome::Undecided(reason)),
    }
}

/// One simulated trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub chosen: SettingPair,
    pub geometry: TrialGeometry,
    pub alice_outcome: i8,
    pub bob_outcome: i8,
    pub column: Column,
}

/// Trial `index` under `seed`: settings uniform, Alice's outcome a fair
/// coin, Bob's equal to Alice's with probability `(1 + E)/2` where `E` is
/// the lattice correlation of the actual pair.
pub fn run_trial(p: DiscretisationParam, angles: &DetectorAngles, jitter: f64, seed: u64, index: u64) -> Result<Trial> {
    let mut rng = trial_rng(seed, index);
    let chosen = SettingPair::new(rng.gen_range(0..2), rng.gen_range(0..2))?;
    let geometry = geometry_from_rng(p, angles, chosen, jitter, &mut rng)?;
    let alice_outcome: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
    // E = -cos, so P(same) = (1 - cos)/2 = (p - m)/p with cos = 2m/p - 1
    let pv = p.get() as i128;
    let m = (geometry.cos_actual_pair.numer() + pv) / 2;
    let same_below: i128 = pv - i128::try_from(m).expect("m <= p");
    let same = (rng.gen_range(0..pv as u64) as i128) < same_below;
    let bob_outcome = if same { alice_outcome } else { -alice_outcome };
    let column = fill_column(&geometry, chosen, alice_outcome, bob_outcome)?;
    Ok(Trial {
        chosen,
        geometry,
        alice_outcome,
        bob_outcome,
        column,
    })
}

pub fn run_trials(
    p: DiscretisationParam,
    angles: &DetectorAngles,
    jitter: f64,
    n_trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Trial>> {
    map_indexed(exec, n_trials, |i| run_trial(p, angles, jitter, seed, i))
        .into_iter()
        .collect()
}

pub fn build_table(trials: &[Trial]) -> LookupTable {
    LookupTable {
        columns: trials.iter().map(|t| t.column).collect(),
    }
}

/// Aggregate of a batch of trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub p: u64,
    pub trials: u64,
    pub completable_columns: u64,
    pub undefined_cells: u64,
    pub total_cells: u64,
    /// Trials whose `ρ(λ|XY) ≠ 0 ⟹ ρ(λ|XY') = 0` check was decided and held.
    pub si_violations: u64,
}

impl ScanSummary {
    pub fn completable_fraction(&self) -> ExactRational {
        ExactRational::new(self.completable_columns, self.trials.max(1)).expect("nonzero")
    }

    pub fn undefined_cell_fraction(&self) -> ExactRational {
        ExactRational::new(self.undefined_cells, self.total_cells.max(1)).expect("nonzero")
    }
}

/// Runs `n_trials` seeded trials with optimal angles and default jitter and
/// tallies how many columns could be completed to four definite rows.
pub fn completability_scan(p: DiscretisationParam, n_trials: u64, seed: u64, exec: Execution) -> Result<ScanSummary> {
    scan_with(p, &DetectorAngles::optimal(), DEFAULT_JITTER, n_trials, seed, exec)
}

pub fn scan_with(
    p: DiscretisationParam,
    angles: &DetectorAngles,
    jitter: f64,
    n_trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<ScanSummary> {
    let per_trial = map_indexed(exec, n_trials, |i| {
        let t = run_trial(p, angles, jitter, seed, i)?;
        let undefined = t.column.iter().filter(|c| c.is_undefined()).count() as u64;
        let si = match si_violation_chsh(&t.geometry, t.chosen)? {
            SiOutcome::Decided(r) => r.violates_si,
            SiOutcome::Undecided(_) => false,
        };
        Ok((undefined, si))
    });
    let mut summary = ScanSummary {
        p: p.get(),
        trials: n_trials,
        completable_columns: 0,
        undefined_cells: 0,
        total_cells: 4 * n_trials,
        si_violations: 0,
    };
    for r in per_trial {
        let (undefined, si) = r?;
        summary.undefined_cells += undefined;
        summary.completable_columns += (undefined == 0) as u64;
        summary.si_violations += si as u64;
    }
    Ok(summary)
}

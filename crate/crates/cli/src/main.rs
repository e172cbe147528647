//! `dhs`: command-line front end for the discretised Hilbert space library.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dhs_core::angle::cos_exact;
use dhs_core::bloch::{make_state, DiscreteQubit};
use dhs_core::chsh::{
    build_table, chsh_s_value, run_trials, scan_with, tsirelson_gap, DetectorAngles, DEFAULT_JITTER, ROW_LABELS,
};
use dhs_core::ensemble::{from_qubit, uncertainty_scan, uncertainty_tolerance};
use dhs_core::mach_zehnder::{admissible, si_scan, statistical_independence_check, MzConfig, PhaseSpec};
use dhs_core::padic::{fine_tuning_demo, sample_on_set_point, state_distance, PAdicLabel, StatePoint, DEFAULT_DEPTH};
use dhs_core::spherical::{classify_third_side, survey_conforming_triangles, SphericalTriangle, ThirdSide};
use dhs_core::sweep::{check_sweep, sweep};
use dhs_core::{AngleTurns, CosValue, DiscretisationParam, Error, ExactRational, Execution, Real};

const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_BREACH: u8 = 4;

/// Digits shown for high-precision reals.
const REAL_DIGITS: usize = 50;

#[derive(Parser)]
#[command(name = "dhs", version, about = "Exact arithmetic on a discretised qubit state space")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; single results default to plain text, tables to CSV.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rationality of cos 2πr.
    Niven {
        #[command(subcommand)]
        cmd: NivenCmd,
    },
    /// Rationality of the third side of a spherical triangle.
    Triangle {
        #[command(subcommand)]
        cmd: TriangleCmd,
    },
    /// Mach-Zehnder counterfactuals.
    Mz {
        #[command(subcommand)]
        cmd: MzCmd,
    },
    /// CHSH lookup tables and correlations.
    Chsh {
        #[command(subcommand)]
        cmd: ChshCmd,
    },
    /// p-adic state-space metric.
    Padic {
        #[command(subcommand)]
        cmd: PadicCmd,
    },
    /// Bit-string ensembles.
    Ensemble {
        #[command(subcommand)]
        cmd: EnsembleCmd,
    },
    /// Uncertainty relation on the lattice.
    Uncertainty {
        #[command(subcommand)]
        cmd: UncertaintyCmd,
    },
    /// CHSH statistics over a list of primes.
    Sweep {
        /// Comma-separated primes.
        #[arg(long = "p-list", value_delimiter = ',', required = true)]
        p_list: Vec<u64>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum NivenCmd {
    /// Prints "rational v" or "irrational x".
    Classify {
        /// Angle in turns, n/d.
        #[arg(long, value_parser = parse_turns)]
        turns: AngleTurns,
    },
}

#[derive(Subcommand)]
enum TriangleCmd {
    /// Classify one triangle (two --cos and --turns), or survey random ones (--trials).
    Check {
        #[arg(long)]
        p: u64,
        /// Cosines of the two sides meeting at the vertex, given twice.
        #[arg(long = "cos", value_parser = parse_rational, num_args = 1)]
        cos: Vec<ExactRational>,
        /// Vertex angle in turns.
        #[arg(long, value_parser = parse_turns)]
        turns: Option<AngleTurns>,
        #[arg(long, conflicts_with_all = ["cos", "turns"])]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest side-cosine denominator in a survey.
        #[arg(long, default_value_t = 1000)]
        max_den: u64,
    },
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    p: u64,
    /// Phase difference in turns (denominator p).
    #[arg(long, value_parser = parse_turns, conflicts_with = "cos")]
    turns: Option<AngleTurns>,
    /// Rational cosine of the phase difference.
    #[arg(long, value_parser = parse_rational)]
    cos: Option<ExactRational>,
}

#[derive(Subcommand)]
enum MzCmd {
    /// Which configurations a phase admits.
    Admissible {
        #[command(flatten)]
        phase: PhaseArgs,
    },
    /// Support-level independence check for one phase, or a sampled scan (--trials).
    SiCheck {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_den: u64,
    },
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// "optimal" or four radians a0,a1,b0,b1.
    #[arg(long, value_parser = parse_angles, default_value = "optimal")]
    angles: DetectorAngles,
}

#[derive(Subcommand)]
enum ChshCmd {
    /// Alice's lookup table, one column per trial.
    Table {
        #[command(flatten)]
        args: TrialArgs,
        #[arg(long, default_value_t = 8)]
        trials: u64,
    },
    /// S = E00 + E01 + E10 - E11 on the lattice.
    Svalue {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_angles, default_value = "optimal")]
        angles: DetectorAngles,
    },
    /// Completability of lookup-table columns.
    Scan {
        #[command(flatten)]
        args: TrialArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum PadicCmd {
    /// Distance between two points: digit lists, or "off" for an off-set point.
    Dist {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Required label depth.
        #[arg(long)]
        depth: Option<u8>,
    },
    /// Euclidean versus state-space distance for a small displacement.
    Demo {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH as u8)]
        depth: u8,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
    },
}

#[derive(Subcommand)]
enum EnsembleCmd {
    /// Mean and variance of the bit string for (m, n).
    Stats {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 0)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum UncertaintyCmd {
    /// Both sides of the inequality on every lattice state.
    Scan {
        #[arg(long)]
        p: u64,
    },
}

fn parse_rational(s: &str) -> Result<ExactRational, String> {
    s.parse::<ExactRational>().map_err(|e| e.to_string())
}

fn parse_turns(s: &str) -> Result<AngleTurns, String> {
    parse_rational(s).map(AngleTurns::new)
}

fn parse_angles(s: &str) -> Result<DetectorAngles, String> {
    if s == "optimal" {
        return Ok(DetectorAngles::optimal());
    }
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    DetectorAngles::from_slice(&v).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvariantBreach(_) => EXIT_BREACH,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

fn breach(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_BREACH,
        message: format!("invariant breach: {}", message.into()),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn prime(p: u64) -> Result<DiscretisationParam, Failure> {
    DiscretisationParam::new(p).map_err(|e| Failure {
        code: EXIT_INVALID,
        message: format!("invalid p = {p}: {e}"),
    })
}

fn real(x: &Real) -> String {
    x.to_sig_string(REAL_DIGITS)
}

/// Rendered output plus an optional breach detected while producing it.
struct Report {
    text: String,
    breach: Option<Failure>,
}

impl From<String> for Report {
    fn from(text: String) -> Self {
        Report { text, breach: None }
    }
}

fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| breach(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| breach(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&serde_json::to_string(r).map_err(|e| breach(e.to_string()))?);
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Renders `rows` in `format`, or `text()` when no format was requested.
fn output<T: Serialize>(rows: &[T], format: Option<Format>, text: impl FnOnce() -> String) -> Result<String, Failure> {
    match format {
        Some(f) => render(rows, f),
        None => Ok(text()),
    }
}

#[derive(Serialize)]
struct NivenRow {
    turns: ExactRational,
    class: &'static str,
    value: String,
}

fn niven_classify(turns: &AngleTurns, format: Option<Format>) -> Result<Report, Failure> {
    let v = cos_exact(turns);
    let row = match &v {
        CosValue::Exact(c) => NivenRow {
            turns: turns.turns().clone(),
            class: "rational",
            value: c.to_string(),
        },
        CosValue::Irrational(x) => NivenRow {
            turns: turns.turns().clone(),
            class: "irrational",
            value: real(x),
        },
    };
    let text = format!("{} {}\n", row.class, row.value);
    output(&[row], format, || text).map(Report::from)
}

#[derive(Serialize)]
struct TriangleRow {
    p: u64,
    cos_ac: ExactRational,
    cos_bc: ExactRational,
    vertex_turns: ExactRational,
    verdict: &'static str,
    reason: String,
    cos_ab: String,
    reconstructed: String,
}

fn triangle_row(p: DiscretisationParam, t: &SphericalTriangle, kind: &ThirdSide, cos_ab: &Real, rec: Option<&ExactRational>) -> TriangleRow {
    let (verdict, reason) = match kind {
        ThirdSide::ProvablyIrrational => ("provably-irrational", String::new()),
        ThirdSide::ExceptionPossible(r) => ("exception-possible", r.clone()),
    };
    TriangleRow {
        p: p.get(),
        cos_ac: t.cos_ac().clone(),
        cos_bc: t.cos_bc().clone(),
        vertex_turns: t.vertex_angle_c().turns().clone(),
        verdict,
        reason,
        cos_ab: real(cos_ab),
        reconstructed: rec.map(ExactRational::to_fraction_string).unwrap_or_default(),
    }
}

fn rows_breach(rows: &[TriangleRow]) -> Option<Failure> {
    rows.iter()
        .find(|r| r.verdict == "provably-irrational" && !r.reconstructed.is_empty())
        .map(|r| breach(format!("cos AB matched {} for a provably irrational side", r.reconstructed)))
}

#[allow(clippy::too_many_arguments)]
fn triangle_check(
    p: u64,
    cos: &[ExactRational],
    turns: Option<&AngleTurns>,
    trials: Option<u64>,
    seed: u64,
    max_den: u64,
    format: Option<Format>,
) -> Result<Report, Failure> {
    let p = prime(p)?;
    let bound = 1_000_000;
    let tol = dhs_core::numeric::reconstruction_tolerance();
    if let Some(n) = trials {
        if max_den < 2 {
            return Err(usage("--max-den must be at least 2"));
        }
        let samples = survey_conforming_triangles(p, n, max_den, bound, seed, Execution::default())?;
        let rows: Vec<TriangleRow> = samples
            .iter()
            .map(|s| triangle_row(p, &s.triangle, &s.verdict.kind, &s.verdict.numeric_cos_ab, s.reconstructed.as_ref()))
            .collect();
        let breach = rows_breach(&rows);
        let text = render(&rows, format.unwrap_or(Format::Csv))?;
        return Ok(Report { text, breach });
    }
    let [cos_ac, cos_bc] = cos else {
        return Err(usage("give --cos twice (the two sides at the vertex) and --turns, or --trials"));
    };
    let turns = turns.ok_or_else(|| usage("--turns is required"))?;
    let t = SphericalTriangle::new(cos_ac.clone(), cos_bc.clone(), turns.clone())?;
    let v = classify_third_side(&t, p)?;
    let rec = dhs_core::numeric::reconstruct_rational(&v.numeric_cos_ab, bound, &tol);
    let row = triangle_row(p, &t, &v.kind, &v.numeric_cos_ab, rec.as_ref());
    let text = match &v.kind {
        ThirdSide::ProvablyIrrational => format!("provably-irrational cos AB = {}\n", row.cos_ab),
        ThirdSide::ExceptionPossible(r) => format!("exception-possible ({r}) cos AB = {}\n", row.cos_ab),
    };
    let rows = [row];
    let breach = rows_breach(&rows);
    let text = output(&rows, format, || text)?;
    Ok(Report { text, breach })
}

fn phase_spec(a: &PhaseArgs) -> Result<(DiscretisationParam, PhaseSpec), Failure> {
    let p = prime(a.p)?;
    let spec = match (&a.turns, &a.cos) {
        (Some(t), None) => PhaseSpec::rational_turns(t.clone(), p)?,
        (None, Some(c)) => PhaseSpec::rational_cosine(c.clone())?,
        _ => return Err(usage("give exactly one of --turns or --cos")),
    };
    Ok((p, spec))
}

#[derive(Serialize)]
struct MzRow {
    phase: String,
    config: String,
    setting: u8,
    admissible: bool,
}

const CONFIGS: [MzConfig; 2] = [MzConfig::WhichWay, MzConfig::Interferometric];

fn mz_admissible(a: &PhaseArgs, format: Option<Format>) -> Result<Report, Failure> {
    let (_, spec) = phase_spec(a)?;
    let rows: Vec<MzRow> = CONFIGS
        .iter()
        .map(|&c| MzRow {
            phase: spec.to_string(),
            config: c.to_string(),
            setting: c.setting(),
            admissible: admissible(&spec, c),
        })
        .collect();
    let admitted = rows.iter().filter(|r| r.admissible).count();
    let breach = (admitted != 1).then(|| breach(format!("{spec} is admissible in {admitted} configurations")));
    let text = output(&rows, format, || {
        rows.iter()
            .map(|r| format!("{} {}\n", r.config, if r.admissible { "admissible" } else { "inadmissible" }))
            .collect()
    })?;
    Ok(Report { text, breach })
}

#[derive(Serialize)]
struct SiRow {
    phase: String,
    config: String,
    rho_given_x: u8,
    rho_given_x_prime: u8,
    violates_si: bool,
}

fn mz_si_check(a: &PhaseArgs, trials: Option<u64>, seed: u64, max_den: u64, format: Option<Format>) -> Result<Report, Failure> {
    if let Some(n) = trials {
        let p = prime(a.p)?;
        if a.turns.is_some() || a.cos.is_some() {
            return Err(usage("--trials samples phases; do not also give --turns or --cos"));
        }
        if max_den < 3 {
            return Err(usage("--max-den must be at least 3"));
        }
        let scan = si_scan(p, n, max_den, seed, Execution::default())?;
        let breach = (scan.exclusive != scan.samples || scan.violations != scan.records)
            .then(|| breach(format!("{scan:?}")));
        let text = output(&[scan], format, || {
            format!(
                "{} phases, {} admissible in exactly one configuration, {} of {} records violate SI\n",
                scan.samples, scan.exclusive, scan.violations, scan.records
            )
        })?;
        return Ok(Report { text, breach });
    }
    let (_, spec) = phase_spec(a)?;
    let mut rows = Vec::new();
    for c in CONFIGS {
        let r = statistical_independence_check(&spec, c)?;
        rows.push(SiRow {
            phase: spec.to_string(),
            config: c.to_string(),
            rho_given_x: r.rho_given_x,
            rho_given_x_prime: r.rho_given_x_prime,
            violates_si: r.violates_si,
        });
    }
    let text = output(&rows, format, || {
        rows.iter()
            .map(|r| {
                format!(
                    "X = {}: rho(X) = {}, rho(X') = {}, {}\n",
                    r.config,
                    r.rho_given_x,
                    r.rho_given_x_prime,
                    if r.violates_si { "violates SI" } else { "consistent with SI" }
                )
            })
            .collect()
    })?;
    Ok(text.into())
}

#[derive(Serialize)]
struct TableRow {
    trial: u64,
    x: u8,
    y: u8,
    alice_outcome: i8,
    bob_outcome: i8,
    x0: &'static str,
    x1: &'static str,
    y0: &'static str,
    y1: &'static str,
    cos_actual_pair: ExactRational,
    cos_bob_pair: ExactRational,
    cos_alice_pair: ExactRational,
    vertex_angle_at_bob: ExactRational,
}

fn chsh_table(a: &TrialArgs, trials: u64, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(a.p)?;
    let ts = run_trials(p, &a.angles, DEFAULT_JITTER, trials, a.seed, Execution::default())?;
    let table = build_table(&ts);
    let breach = table.validate().err().map(Failure::from);
    let rows: Vec<TableRow> = ts
        .iter()
        .enumerate()
        .map(|(i, t)| TableRow {
            trial: i as u64,
            x: t.chosen.alice(),
            y: t.chosen.bob(),
            alice_outcome: t.alice_outcome,
            bob_outcome: t.bob_outcome,
            x0: t.column[0].symbol(),
            x1: t.column[1].symbol(),
            y0: t.column[2].symbol(),
            y1: t.column[3].symbol(),
            cos_actual_pair: t.geometry.cos_actual_pair.clone(),
            cos_bob_pair: t.geometry.cos_bob_pair.clone(),
            cos_alice_pair: t.geometry.cos_alice_pair.clone(),
            vertex_angle_at_bob: t.geometry.vertex_angle_at_bob.turns().clone(),
        })
        .collect();
    let text = output(&rows, format, || {
        let mut s = String::from("XY ");
        for t in &ts {
            s.push_str(&format!(" {:>3}", format!("{}{}", t.chosen.alice(), t.chosen.bob())));
        }
        s.push('\n');
        s.push_str(&table.to_string());
        s.push_str(&format!(
            "{} columns, {} undefined cells of {}, {} completable; rows: {}\n",
            table.columns.len(),
            table.undefined_cells(),
            4 * table.columns.len(),
            table.completable_columns(),
            ROW_LABELS.join(" ")
        ));
        s
    })?;
    Ok(Report { text, breach })
}

#[derive(Serialize)]
struct SvalueRow {
    p: u64,
    s_value: ExactRational,
    s_value_abs: f64,
    s_error: f64,
    bound: f64,
    within_bound: bool,
}

fn chsh_svalue(p: u64, angles: &DetectorAngles, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(p)?;
    let s = chsh_s_value(p, angles)?;
    let gap = tsirelson_gap(&s);
    let bound = ExactRational::new(4, p.get())?;
    let within = gap <= Real::from_rational(&bound);
    let optimal = *angles == DetectorAngles::optimal();
    let row = SvalueRow {
        p: p.get(),
        s_value_abs: s.abs().to_f64(),
        s_value: s.clone(),
        s_error: gap.to_f64(),
        bound: bound.to_f64(),
        within_bound: within,
    };
    let breach = if optimal && !within {
        Some(breach(format!("| |S| - 2√2 | = {} exceeds 4/p", row.s_error)))
    } else if optimal && s.abs() <= 2 {
        Some(breach(format!("|S| = {} does not exceed 2", s.abs())))
    } else {
        None
    };
    let text = format!(
        "S = {} (|S| = {})\n| |S| - 2√2 | = {} {} 4/p = {}: {}\n",
        row.s_value,
        row.s_value_abs,
        row.s_error,
        if within { "<=" } else { ">" },
        row.bound,
        if within { "within bound" } else { "outside bound" }
    );
    let text = output(&[row], format, || text)?;
    Ok(Report { text, breach })
}

#[derive(Serialize)]
struct ScanRow {
    p: u64,
    trials: u64,
    completable_columns: u64,
    completable_fraction: ExactRational,
    undefined_cells: u64,
    total_cells: u64,
    undefined_cell_fraction: ExactRational,
    si_violations: u64,
}

fn chsh_scan(a: &TrialArgs, trials: u64, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(a.p)?;
    let s = scan_with(p, &a.angles, DEFAULT_JITTER, trials, a.seed, Execution::default())?;
    let row = ScanRow {
        p: s.p,
        trials: s.trials,
        completable_columns: s.completable_columns,
        completable_fraction: s.completable_fraction(),
        undefined_cells: s.undefined_cells,
        total_cells: s.total_cells,
        undefined_cell_fraction: s.undefined_cell_fraction(),
        si_violations: s.si_violations,
    };
    let quarter = ExactRational::new(1, 4)?;
    let breach = if row.completable_columns != 0 {
        Some(breach(format!("{} columns were completable", row.completable_columns)))
    } else if trials > 0 && row.undefined_cell_fraction != quarter {
        Some(breach(format!("undefined cell fraction {}", row.undefined_cell_fraction)))
    } else {
        None
    };
    let text = format!(
        "p = {}: {} trials, {} completable columns, undefined cell fraction {}, {} SI violations\n",
        row.p, row.trials, row.completable_columns, row.undefined_cell_fraction, row.si_violations
    );
    let text = output(&[row], format, || text)?;
    Ok(Report { text, breach })
}

fn parse_point(s: &str, p: DiscretisationParam, depth: Option<u8>, coordinate: f64) -> Result<StatePoint, Failure> {
    if s == "off" {
        return Ok(StatePoint::off_set(vec![coordinate]));
    }
    let digits = s
        .split(',')
        .map(|d| d.trim().parse::<u64>().map_err(|e| usage(format!("label digit {d:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(d) = depth {
        if digits.len() != d as usize {
            return Err(usage(format!("label {s} does not have depth {d}")));
        }
    }
    Ok(StatePoint::on_set(vec![coordinate], PAdicLabel::new(p, digits)?))
}

#[derive(Serialize)]
struct DistRow {
    p: u64,
    a: String,
    b: String,
    distance: ExactRational,
}

fn padic_dist(p: u64, a: &str, b: &str, depth: Option<u8>, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(p)?;
    // distinct coordinates: two "off" arguments name two different points
    let x = parse_point(a, p, depth, 0.0)?;
    let y = parse_point(b, p, depth, 1.0)?;
    let d = state_distance(&x, &y, p)?;
    let row = DistRow {
        p: p.get(),
        a: a.to_string(),
        b: b.to_string(),
        distance: d,
    };
    let text = format!("{}\n", row.distance);
    output(&[row], format, || text).map(Report::from)
}

#[derive(Serialize)]
struct DemoRow {
    p: u64,
    label: String,
    epsilon: f64,
    euclidean_distance: f64,
    state_distance: ExactRational,
    ratio: f64,
    p_over_epsilon: f64,
    ratio_at_least_p_over_epsilon: bool,
}

fn padic_demo(p: u64, seed: u64, depth: u8, epsilon: f64, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(p)?;
    if depth == 0 {
        return Err(usage("--depth must be at least 1"));
    }
    let x = sample_on_set_point(p, depth as usize, 3, seed)?;
    let label = x.label.clone().expect("on-set point");
    let r = fine_tuning_demo(&x, epsilon, p)?;
    let row = DemoRow {
        p: p.get(),
        label: label.to_string(),
        epsilon: r.epsilon,
        euclidean_distance: r.euclidean_distance,
        state_distance: r.state_distance.clone(),
        ratio: r.ratio,
        p_over_epsilon: p.get() as f64 / epsilon,
        ratio_at_least_p_over_epsilon: r.ratio_at_least_p_over_epsilon,
    };
    let breach = (!r.ratio_at_least_p_over_epsilon || !r.euclidean_within_epsilon)
        .then(|| breach(format!("ratio {} below p/epsilon", r.ratio)));
    let text = format!(
        "on-set point {} moved off the set by {}: Euclidean distance {}, state distance {}, ratio {} >= p/epsilon = {}\n",
        row.label, row.epsilon, row.euclidean_distance, row.state_distance, row.ratio, row.p_over_epsilon
    );
    let text = output(&[row], format, || text)?;
    Ok(Report { text, breach })
}

#[derive(Serialize)]
struct StatsRow {
    p: u64,
    m: u64,
    n: u64,
    mean: ExactRational,
    variance: ExactRational,
    cos_theta: ExactRational,
    sin_theta_squared: ExactRational,
    std_dev: f64,
}

fn ensemble_stats(p: u64, m: u64, n: u64, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(p)?;
    let q: DiscreteQubit = make_state(p, m, n)?;
    let s = from_qubit(&q);
    let cos = q.cos_theta();
    let sin_sq = ExactRational::one() - cos.square();
    let row = StatsRow {
        p: p.get(),
        m,
        n,
        mean: s.mean(),
        variance: s.variance(),
        std_dev: s.variance().to_f64().sqrt(),
        cos_theta: cos,
        sin_theta_squared: sin_sq,
    };
    let breach = (row.mean != row.cos_theta
        || row.mean != s.mean_closed_form()
        || row.variance != row.sin_theta_squared
        || row.variance != s.variance_closed_form())
    .then(|| breach("summed moments differ from the closed forms"));
    let text = format!(
        "mean {} = cos θ {}\nvariance {} = sin²θ {}\n",
        row.mean, row.cos_theta, row.variance, row.sin_theta_squared
    );
    let text = output(&[row], format, || text)?;
    Ok(Report { text, breach })
}

#[derive(Serialize)]
struct UncertaintyRow {
    p: u64,
    m: u64,
    n: u64,
    lhs: f64,
    rhs: f64,
    slack: f64,
    holds: bool,
    analytic_equality: bool,
}

fn uncertainty(p: u64, format: Option<Format>) -> Result<Report, Failure> {
    let p = prime(p)?;
    let tol = uncertainty_tolerance();
    let reports = uncertainty_scan(p, Execution::default());
    let mut breach_msg = None;
    let rows: Vec<UncertaintyRow> = reports
        .iter()
        .map(|r| {
            let at_equality = r.slack().abs() <= tol;
            if breach_msg.is_none() && (!r.holds || at_equality != r.analytic_equality) {
                breach_msg = Some(format!("state m = {}, n = {}", r.state.m(), r.state.n()));
            }
            UncertaintyRow {
                p: p.get(),
                m: r.state.m(),
                n: r.state.n(),
                lhs: r.lhs.to_f64(),
                rhs: r.rhs.to_f64(),
                slack: r.slack().to_f64(),
                holds: r.holds,
                analytic_equality: r.analytic_equality,
            }
        })
        .collect();
    let text = render(&rows, format.unwrap_or(Format::Csv))?;
    Ok(Report {
        text,
        breach: breach_msg.map(breach),
    })
}

fn run_sweep(p_list: &[u64], trials: u64, seed: u64, format: Option<Format>) -> Result<Report, Failure> {
    let ps = p_list.iter().map(|&p| prime(p)).collect::<Result<Vec<_>, _>>()?;
    let rows = sweep(&ps, trials, seed, Execution::default())?;
    let breach = check_sweep(&rows).err().map(Failure::from);
    let text = render(&rows, format.unwrap_or(Format::Csv))?;
    Ok(Report { text, breach })
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    let f = cli.format;
    match &cli.command {
        Command::Niven {
            cmd: NivenCmd::Classify { turns },
        } => niven_classify(turns, f),
        Command::Triangle {
            cmd:
                TriangleCmd::Check {
                    p,
                    cos,
                    turns,
                    trials,
                    seed,
                    max_den,
                },
        } => triangle_check(*p, cos, turns.as_ref(), *trials, *seed, *max_den, f),
        Command::Mz { cmd } => match cmd {
            MzCmd::Admissible { phase } => mz_admissible(phase, f),
            MzCmd::SiCheck {
                phase,
                trials,
                seed,
                max_den,
            } => mz_si_check(phase, *trials, *seed, *max_den, f),
        },
        Command::Chsh { cmd } => match cmd {
            ChshCmd::Table { args, trials } => chsh_table(args, *trials, f),
            ChshCmd::Svalue { p, angles } => chsh_svalue(*p, angles, f),
            ChshCmd::Scan { args, trials } => chsh_scan(args, *trials, f),
        },
        Command::Padic { cmd } => match cmd {
            PadicCmd::Dist { p, a, b, depth } => padic_dist(*p, a, b, *depth, f),
            PadicCmd::Demo {
                p,
                seed,
                depth,
                epsilon,
            } => padic_demo(*p, *seed, *depth, *epsilon, f),
        },
        Command::Ensemble {
            cmd: EnsembleCmd::Stats { p, m, n },
        } => ensemble_stats(*p, *m, *n, f),
        Command::Uncertainty {
            cmd: UncertaintyCmd::Scan { p },
        } => uncertainty(*p, f),
        Command::Sweep { p_list, trials, seed } => run_sweep(p_list, *trials, *seed, f),
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => File::create(path)?.write_all(text.as_bytes()),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = dispatch(&cli).and_then(|report| {
        write_output(cli.out.as_ref(), &report.text)?;
        report.breach.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dhs: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

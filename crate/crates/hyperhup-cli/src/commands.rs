//! The subcommands. Each returns its result as JSON plus CSV plot data.

use crate::config::{CommandKind, RunConfig};
use crate::error::{
    CliError, CliResult, EXIT_FAILURE, EXIT_INCONCLUSIVE, EXIT_INFEASIBLE, EXIT_PASS,
};
use crate::report::{float, key_value_csv};
use hyperhup_core::certify::{
    annulus_poincare, critical_structure, one_sided_probe, subcritical_chain, CertifyTolerances,
    Verdict,
};
use hyperhup_core::counterexample::{banach_solve, poisson_counterexample, WitnessConfig};
use hyperhup_core::grid::inversion_pullback;
use hyperhup_core::lattice::{gap_stats, RealSequence};
use hyperhup_core::suite::{verify_t_suite, SuiteTolerances};
use hyperhup_core::transforms::{extension_on_grid, fourier_pi, kg_residual, Direction, Extension};
use hyperhup_core::{Grid, GridFunction};
use log::info;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::Path;

pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub pass: bool,
    pub exit_code: i32,
}

impl Outcome {
    fn new(result: Value, csv: String, exit_code: i32) -> Self {
        Self {
            result,
            csv,
            pass: exit_code == EXIT_PASS,
            exit_code,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// ψ from a source string: gaussian, odd_gaussian, zero,
/// poisson:α:β or file:PATH.
pub fn load_psi(source: &str, grid: Grid) -> CliResult<GridFunction> {
    let (kind, rest) = source.split_once(':').unwrap_or((source, ""));
    match kind {
        "gaussian" => Ok(GridFunction::from_real_fn(grid, |t| (-PI * t * t).exp())),
        "odd_gaussian" => Ok(GridFunction::from_real_fn(grid, |t| {
            t * (-PI * t * t).exp()
        })),
        "zero" => Ok(GridFunction::zeros(grid)),
        "poisson" => {
            let (a, b) = rest
                .split_once(':')
                .and_then(|(a, b)| {
                    Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?))
                })
                .ok_or_else(|| {
                    CliError::Input(format!("expected poisson:alpha:beta, got {source:?}"))
                })?;
            Ok(poisson_counterexample(a, b, grid)?.psi)
        }
        "file" => {
            let text = std::fs::read_to_string(Path::new(rest))
                .map_err(|e| CliError::Input(format!("{rest}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{rest}: {e}")))
        }
        _ => Err(CliError::Input(format!("unknown psi source {source:?}"))),
    }
}

fn grid_of(cfg: &RunConfig) -> CliResult<Grid> {
    cfg.grid.expect("resolved config has a grid").grid()
}

pub fn run(cmd: CommandKind, cfg: &RunConfig) -> CliResult<Outcome> {
    match cmd {
        CommandKind::VerifyT => verify_t(cfg),
        CommandKind::Certify => certify(cfg),
        CommandKind::Construct => construct(cfg),
        CommandKind::Annulus => annulus(cfg),
        CommandKind::Kg => kg(cfg),
        CommandKind::Onesided => onesided(cfg),
    }
}

fn verify_t(cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = SuiteTolerances {
        involution: cfg.tol("involution"),
        isometry: cfg.tol("isometry"),
        leakage: cfg.tol("leakage"),
        agreement: cfg.tol("agreement"),
        agreement_radius: cfg.tol("agreement_radius"),
    };
    let report = verify_t_suite(grid_of(cfg)?, &tol);
    for c in report.failures() {
        log::warn!(
            "{} {}: {:e} exceeds {:e}",
            c.fixture,
            c.check,
            c.value,
            c.tolerance
        );
    }
    let mut csv = String::from("fixture,check,value,tolerance,pass\n");
    for c in &report.checks {
        csv.push_str(&format!(
            "\"{}\",{},{},{},{}\n",
            c.fixture,
            c.check,
            float(c.value),
            float(c.tolerance),
            c.pass
        ));
    }
    let code = if report.pass { EXIT_PASS } else { EXIT_FAILURE };
    Ok(Outcome::new(to_value(&report), csv, code))
}

fn certify(cfg: &RunConfig) -> CliResult<Outcome> {
    let grid = grid_of(cfg)?;
    let psi = load_psi(cfg.psi.as_deref().expect("resolved"), grid)?;
    let cross = cfg.cross.as_ref().expect("resolved").build()?;
    let tol = CertifyTolerances {
        vanishing: cfg.tol("vanishing"),
        zero_l2: cfg.tol("zero_l2"),
        pw_endpoint: cfg.tol("pw_endpoint"),
    };
    let report = subcritical_chain(&psi, &cross, tol)?;
    let gap = cfg.tol("critical_gap");
    let critical_cross =
        (report.sup_gap_a - 1.0).abs() <= gap && (report.sup_gap_b - 1.0).abs() <= gap;
    let mut critical = Value::Null;
    let mut critical_note = Value::Null;
    if critical_cross && report.verdict != Verdict::ConsistentUniqueness {
        let theta = fourier_pi(&psi, Direction::Forward);
        let t_theta = fourier_pi(&inversion_pullback(&psi)?, Direction::Forward);
        match critical_structure(
            &theta,
            &cross.a,
            Some((&t_theta, &cross.b)),
            cfg.tol("critical_vanishing"),
        ) {
            Ok(r) => critical = to_value(&r),
            Err(e) => critical_note = Value::String(format!("critical structure skipped: {e}")),
        }
    }
    let code = match report.verdict {
        Verdict::ConsistentUniqueness => EXIT_PASS,
        Verdict::VanishingViolated if cfg.expect_uniqueness == Some(true) => EXIT_FAILURE,
        Verdict::VanishingViolated => EXIT_PASS,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    info!("certify: verdict {}", report.verdict.as_str());
    let result = json!({
        "certificate": to_value(&report),
        "critical": critical,
        "critical_note": critical_note,
    });
    let csv = key_value_csv(&result);
    Ok(Outcome::new(result, csv, code))
}

/// Tail gap of each half-line of a sequence, reflected to ℝ₊.
fn half_line_gaps(s: &RealSequence, name: &str) -> CliResult<[f64; 2]> {
    let s = s.without_zero(1e-12);
    let mut out = [0.0; 2];
    for (slot, (part, side)) in out.iter_mut().zip([
        (s.positive_part(), "positive"),
        (s.negative_part_reflected(), "negative"),
    ]) {
        *slot = gap_stats(&part)
            .map_err(|e| CliError::Input(format!("{name} ({side} half): {e}")))?
            .liminf_tail;
    }
    Ok(out)
}

fn construct(cfg: &RunConfig) -> CliResult<Outcome> {
    let cross = cfg.cross.as_ref().expect("resolved").build()?;
    let gaps_a = half_line_gaps(&cross.a, "A")?;
    let gaps_b = half_line_gaps(&cross.b, "B")?;
    let worst = gaps_a
        .iter()
        .chain(&gaps_b)
        .copied()
        .fold(f64::INFINITY, f64::min);
    if worst <= 1.0 + 1e-9 {
        let msg = format!(
            "tail gap estimate {worst:.6} ≤ 1: witness construction needs every half-line of A and B to have tail gaps above 1"
        );
        let result = json!({"error": msg, "gaps_a": gaps_a, "gaps_b": gaps_b});
        return Ok(Outcome::new(
            result.clone(),
            key_value_csv(&result),
            EXIT_INFEASIBLE,
        ));
    }
    let wcfg = WitnessConfig {
        grid: grid_of(cfg)?,
        tol: cfg.tol("solver"),
        ..WitnessConfig::default()
    };
    let w = banach_solve(&cross.a, &cross.b, &wcfg)?;
    let residual = cfg.tol("residual");
    let pass = w.contraction_factor <= cfg.tol("contraction") && w.is_witness(residual);
    info!(
        "construct: factor {:.4}, residuals {:e} {:e}",
        w.contraction_factor, w.residual_a, w.residual_b
    );
    let result = to_value(&w);
    let summary = json!({
        "contraction_factor": w.contraction_factor,
        "residual_a": w.residual_a,
        "residual_b": w.residual_b,
        "residual_b_resampled": w.residual_b_resampled,
        "support_leakage": w.support_leakage,
        "psi_l2": w.psi_l2,
        "psi_l1": w.psi_l1,
        "l1_bound": w.l1_bound,
        "iterations": w.contraction_history.len(),
        "gaps_a": gaps_a,
        "gaps_b": gaps_b,
    });
    let csv = key_value_csv(&summary);
    let result = json!({"summary": summary, "witness": result});
    Ok(Outcome::new(
        result,
        csv,
        if pass { EXIT_PASS } else { EXIT_FAILURE },
    ))
}

fn annulus(cfg: &RunConfig) -> CliResult<Outcome> {
    let p = cfg.annulus.as_ref().expect("resolved");
    let mut rows = Vec::new();
    for &a in &p.radii {
        for &q in &p.ratios {
            for &d in &p.dims {
                rows.push(annulus_poincare(a, a * q, d)?);
            }
        }
    }
    let mut csv = String::from("a,b,d,lambda1,c_computed,c_bound,pass\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            float(r.a),
            float(r.b),
            r.d,
            float(r.lambda1),
            float(r.c_computed),
            float(r.c_bound),
            r.pass
        ));
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(Outcome::new(
        json!({ "rows": to_value(&rows) }),
        csv,
        if pass { EXIT_PASS } else { EXIT_FAILURE },
    ))
}

fn kg(cfg: &RunConfig) -> CliResult<Outcome> {
    let psi = load_psi(cfg.psi.as_deref().expect("resolved"), grid_of(cfg)?)?;
    let p = cfg.kg.expect("resolved");
    let coarse = Grid::new(p.extent, p.points)?;
    let fine = Grid::new(p.extent, 2 * p.points)?;
    let u_coarse = extension_on_grid(&psi, coarse, coarse, false)?;
    let u_fine = extension_on_grid(&psi, fine, fine, false)?;
    let r_coarse = kg_residual(&u_coarse);
    let r_fine = kg_residual(&u_fine);
    let ratio = r_coarse / r_fine;
    let drift = Extension::new(&psi, false)?.cross_check(cfg.seed.unwrap_or(0));
    let pass = (cfg.tol("ratio_min")..=cfg.tol("ratio_max")).contains(&ratio);
    info!("kg: residuals {r_coarse:e} -> {r_fine:e}, ratio {ratio}");
    let result = json!({
        "residual_coarse": r_coarse,
        "residual_fine": r_fine,
        "h_coarse": coarse.step(),
        "h_fine": fine.step(),
        "ratio": ratio,
        "split_cross_check": drift,
    });
    Ok(Outcome::new(
        result,
        u_fine.to_csv(),
        if pass { EXIT_PASS } else { EXIT_FAILURE },
    ))
}

fn onesided(cfg: &RunConfig) -> CliResult<Outcome> {
    let psi = load_psi(cfg.psi.as_deref().expect("resolved"), grid_of(cfg)?)?;
    let cross = cfg.cross.as_ref().expect("resolved").build()?;
    let a = RealSequence::new(
        cross
            .a
            .values()
            .iter()
            .copied()
            .filter(|&x| x >= 0.0)
            .collect(),
        0,
    )?;
    let b = RealSequence::new(
        cross
            .b
            .values()
            .iter()
            .copied()
            .filter(|&y| y <= 0.0)
            .collect(),
        0,
    )?;
    let r = one_sided_probe(&psi, &a, &b)?;
    let applicable = r.mean_ratio <= cfg.tol("mean_zero");
    let pass = !applicable || r.invariance_residual <= cfg.tol("invariance");
    let mut csv = String::from("x,y,re,im,abs\n");
    for (j, row) in r.quadrant.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                float(r.quadrant_x[i]),
                float(r.quadrant_y[j]),
                float(v.re),
                float(v.im),
                float(v.norm())
            ));
        }
    }
    let result = json!({ "probe": to_value(&r), "invariance_applicable": applicable });
    Ok(Outcome::new(
        result,
        csv,
        if pass { EXIT_PASS } else { EXIT_FAILURE },
    ))
}

//! Counting inequality checks for a reduced form over a radius grid.

use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Value};

use hurwitz_core::forms::BinaryForm;
use hurwitz_core::stats::{slope_bracket, verify_reduced_bounds, BoundRow, SlopeBracket};
use hurwitz_core::QuadraticSurd;

use crate::config::{merge_parse, merge_text, Common, Settings};
use crate::grid::{RadiusFlags, RadiusGrid};
use crate::literals::{
    csv_rational, parse_exact, parse_form, parse_positive_rational, render_rational, render_surd,
};
use crate::output::{write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Form literal: form(a=..., b=..., c=..., d=...).
    #[arg(long)]
    pub form: Option<String>,
    /// Band height delta; the counted band is 0 < |Q| < delta^2 / 2.
    #[arg(long)]
    pub delta: Option<String>,
    /// Cut level kappa for the linear factor.
    #[arg(long)]
    pub kappa: Option<String>,
    #[command(flatten)]
    pub radius: RadiusFlags,
    /// Relative margin of the slope bracket, in (0, 1).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Rate divisor for the bracket upper end.
    #[arg(long)]
    pub rate: Option<f64>,
}

#[derive(Debug)]
pub struct VerifyRun {
    form_text: String,
    form: BinaryForm,
    delta: BigRational,
    kappa: QuadraticSurd,
    grid: RadiusGrid,
    epsilon: Option<f64>,
    rate: Option<f64>,
}

pub fn resolve(args: VerifyArgs, settings: &mut Settings) -> CliResult<VerifyRun> {
    let form_text = merge_text(args.form, settings, "form")
        .ok_or_else(|| CliError::Validation("verify needs a form literal".to_string()))?
        .trim()
        .to_string();
    let form = parse_form(&form_text)?;
    let delta_text = merge_text(args.delta, settings, "delta")
        .ok_or_else(|| CliError::Validation("verify needs a band height delta".to_string()))?;
    let delta = parse_positive_rational(&delta_text, "delta")?;
    let kappa_text = merge_text(args.kappa, settings, "kappa")
        .ok_or_else(|| CliError::Validation("verify needs a cut level kappa".to_string()))?;
    let kappa = parse_exact(&kappa_text, "kappa")?;
    let epsilon = merge_parse(args.epsilon, settings, "epsilon")?;
    if let Some(eps) = epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(CliError::Validation(format!(
                "epsilon must lie strictly between zero and one, got {eps}"
            )));
        }
    }
    let rate = merge_parse(args.rate, settings, "rate")?;
    if let Some(r) = rate {
        if !(r > 0.0) {
            return Err(CliError::Validation(format!(
                "rate must be positive, got {r}"
            )));
        }
    }
    let grid = args.radius.resolve(settings)?;
    Ok(VerifyRun {
        form_text,
        form,
        delta,
        kappa,
        grid,
        epsilon,
        rate,
    })
}

fn bound_cells(bound: &Option<BoundRow>) -> String {
    match bound {
        Some(b) => format!("{},{},{},{}", b.n, b.excursions, b.bound, b.pass),
        None => ",,,".to_string(),
    }
}

fn bound_json(bound: &Option<BoundRow>) -> Value {
    match bound {
        Some(b) => json!({
            "n": b.n,
            "excursions": b.excursions,
            "bound": b.bound,
            "pass": b.pass,
        }),
        None => Value::Null,
    }
}

pub fn execute(common: &Common, run: VerifyRun) -> CliResult<()> {
    let start = Instant::now();
    let report = verify_reduced_bounds(&run.form, &run.delta, &run.kappa, &run.grid.values)
        .map_err(|e| CliError::Validation(format!("verify: {e}")))?;
    let epsilon = run.epsilon.unwrap_or(report.epsilon);
    let rate = run.rate.unwrap_or(report.rate);
    let bracket: SlopeBracket = if epsilon != report.epsilon || rate != report.rate {
        slope_bracket(&report.series, epsilon, rate)
            .map_err(|e| CliError::Validation(format!("verify: {e}")))?
    } else {
        report.bracket
    };

    let mut doc = Document::new("verify", common);
    doc.setting("form", &run.form_text);
    doc.setting("delta", render_rational(&run.delta));
    doc.setting("kappa", render_surd(&run.kappa));
    doc.setting("epsilon", epsilon.to_string());
    doc.setting("rate", rate.to_string());
    for (key, value) in &run.grid.header {
        doc.setting(key, value.clone());
    }
    doc.columns(
        "rho,log_rho,count,lower_n,lower_excursions,lower_bound,lower_pass,\
         upper_n,upper_excursions,upper_bound,upper_pass",
    );

    let mut rows_json = Vec::with_capacity(report.rows.len());
    let mut all_passed = true;
    for row in &report.rows {
        for bound in [&row.lower, &row.upper].into_iter().flatten() {
            all_passed &= bound.pass;
        }
        doc.row(format!(
            "{},{},{},{},{}",
            csv_rational(&row.rho),
            row.log_rho,
            row.count,
            bound_cells(&row.lower),
            bound_cells(&row.upper),
        ));
        rows_json.push(json!({
            "rho": render_rational(&row.rho),
            "log_rho": row.log_rho,
            "count": row.count,
            "lower": bound_json(&row.lower),
            "upper": bound_json(&row.upper),
        }));
    }

    let precision = &common.precision;
    let est = &report.series.estimates;
    let summary = [
        ("theta_lo", precision.lo(&report.theta)),
        ("theta_hi", precision.hi(&report.theta)),
        ("base_before_entry", report.base_before_entry.to_string()),
        ("nu", report.nu.to_string()),
        ("segments", report.segments.to_string()),
        ("fitted_slope", report.fitted_slope.to_string()),
        ("bracket_lower", bracket.lower.to_string()),
        ("bracket_upper", bracket.upper.to_string()),
        ("bracket_lower_floored", bracket.lower_floored.to_string()),
        ("alpha_low", est.alpha_low.to_string()),
        ("alpha_high", est.alpha_high.to_string()),
        ("omega_low", est.omega_low.to_string()),
        ("omega_high", est.omega_high.to_string()),
        ("e_low", est.e_low.to_string()),
        ("e_high", est.e_high.to_string()),
        ("f_low", est.f_low.to_string()),
        ("f_high", est.f_high.to_string()),
        ("window", est.window.to_string()),
        ("all_passed", all_passed.to_string()),
    ];
    for (key, value) in &summary {
        doc.trailer(key, value.clone());
    }

    doc.field("theta_lo", Value::from(precision.lo(&report.theta)));
    doc.field("theta_hi", Value::from(precision.hi(&report.theta)));
    doc.field("base_before_entry", Value::from(report.base_before_entry));
    doc.field("nu", Value::from(report.nu));
    doc.field("segments", Value::from(report.segments));
    doc.field(
        "estimates",
        json!({
            "alpha_low": est.alpha_low,
            "alpha_high": est.alpha_high,
            "omega_low": est.omega_low,
            "omega_high": est.omega_high,
            "e_low": est.e_low,
            "e_high": est.e_high,
            "f_low": est.f_low,
            "f_high": est.f_high,
            "window": est.window,
        }),
    );
    doc.field("rows", Value::Array(rows_json));
    doc.field("fitted_slope", Value::from(report.fitted_slope));
    doc.field(
        "bracket",
        json!({
            "lower": bracket.lower,
            "upper": bracket.upper,
            "lower_floored": bracket.lower_floored,
        }),
    );
    doc.field("all_passed", Value::from(all_passed));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

//! Primitive lattice point counts of a value band over a radius grid.

use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Value};

use hurwitz_core::counting::{
    count_region, CountError, CountOptions, CountQuery, CountResult, RegionKind,
};
use hurwitz_core::forms::BinaryForm;
use hurwitz_core::QuadraticSurd;

use crate::config::{merge_flag, merge_parse, merge_text, Common, Format, Settings};
use crate::grid::{RadiusFlags, RadiusGrid};
use crate::literals::{
    csv_rational, parse_exact, parse_form, parse_positive_rational, render_rational, render_surd,
};
use crate::output::{cell, write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct CountArgs {
    /// Form literal: form(a=..., b=..., c=..., d=...).
    #[arg(long)]
    pub form: Option<String>,
    /// Band height delta.
    #[arg(long)]
    pub delta: Option<String>,
    /// Cut level for the linear factor; the full band splits at
    /// sqrt(delta) internally and ignores it.
    #[arg(long)]
    pub kappa: Option<String>,
    /// Region kind: main, reduced, full, or plus.
    #[arg(long)]
    pub kind: Option<String>,
    #[command(flatten)]
    pub radius: RadiusFlags,
    /// Record every counted point (json format only).
    #[arg(long)]
    pub witnesses: bool,
    /// Column budget per radius; exceeding it stops the sweep.
    #[arg(long = "max-columns", value_name = "N")]
    pub max_columns: Option<u64>,
}

#[derive(Debug)]
pub struct CountRun {
    form_text: String,
    form: BinaryForm,
    delta: BigRational,
    kappa: QuadraticSurd,
    kappa_text: Option<String>,
    kind: RegionKind,
    kind_name: &'static str,
    grid: RadiusGrid,
    witnesses: bool,
    max_columns: Option<u64>,
}

fn parse_kind(text: &str) -> CliResult<(RegionKind, &'static str)> {
    match text.trim() {
        "main" => Ok((RegionKind::MainBand, "main")),
        "reduced" => Ok((RegionKind::ReducedBand, "reduced")),
        "full" => Ok((RegionKind::FullBand, "full")),
        "plus" => Ok((RegionKind::PlusCut, "plus")),
        other => Err(CliError::Validation(format!(
            "kind must be main, reduced, full, or plus, got {other}"
        ))),
    }
}

pub fn resolve(args: CountArgs, settings: &mut Settings, format: Format) -> CliResult<CountRun> {
    let form_text = merge_text(args.form, settings, "form")
        .ok_or_else(|| CliError::Validation("count needs a form literal".to_string()))?
        .trim()
        .to_string();
    let form = parse_form(&form_text)?;
    let delta_text = merge_text(args.delta, settings, "delta")
        .ok_or_else(|| CliError::Validation("count needs a band height delta".to_string()))?;
    let delta = parse_positive_rational(&delta_text, "delta")?;
    let kind_text = merge_text(args.kind, settings, "kind").unwrap_or_else(|| "main".to_string());
    let (kind, kind_name) = parse_kind(&kind_text)?;
    let kappa_text = merge_text(args.kappa, settings, "kappa");
    let kappa = match &kappa_text {
        Some(text) => parse_exact(text, "kappa")?,
        None if kind == RegionKind::FullBand => QuadraticSurd::zero(),
        None => {
            return Err(CliError::Validation(format!(
                "kappa is required for kind {kind_name}"
            )))
        }
    };
    let witnesses = merge_flag(args.witnesses, settings, "witnesses")?;
    if witnesses && format == Format::Csv {
        return Err(CliError::Validation(
            "witness dumps require json format".to_string(),
        ));
    }
    let max_columns = merge_parse(args.max_columns, settings, "max-columns")?;
    let grid = args.radius.resolve(settings)?;
    Ok(CountRun {
        form_text,
        form,
        delta,
        kappa,
        kappa_text,
        kind,
        kind_name,
        grid,
        witnesses,
        max_columns,
    })
}

fn result_row(rho: &BigRational, kind_name: &str, result: &CountResult, partial: bool) -> String {
    let (full, minus, plus, disc) = match result.split {
        Some(split) => (
            Some(split.full),
            Some(split.minus_cut),
            Some(split.plus_cut),
            Some(split.discrepancy),
        ),
        None => (None, None, None, None),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        csv_rational(rho),
        kind_name,
        result.count,
        result.columns,
        result.boundary.len(),
        cell(full),
        cell(minus),
        cell(plus),
        cell(disc),
        partial,
    )
}

fn result_json(rho: &BigRational, kind_name: &str, result: &CountResult, partial: bool, witnesses: bool) -> Value {
    let split = result.split.map(|s| {
        json!({
            "full": s.full,
            "minus_cut": s.minus_cut,
            "plus_cut": s.plus_cut,
            "discrepancy": s.discrepancy,
        })
    });
    let boundary: Vec<Value> = result
        .boundary
        .iter()
        .map(|(x, y)| json!([x, y]))
        .collect();
    let mut row = json!({
        "rho": render_rational(rho),
        "kind": kind_name,
        "count": result.count,
        "columns": result.columns,
        "boundary_points": boundary,
        "split": split.unwrap_or(Value::Null),
        "partial": partial,
    });
    if witnesses {
        let points: Vec<Value> = result
            .witnesses
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .map(|w| {
                json!({
                    "x": w.x,
                    "y": w.y,
                    "value": render_surd(&w.value),
                })
            })
            .collect();
        row["witnesses"] = Value::Array(points);
    }
    row
}

pub fn execute(common: &Common, run: CountRun) -> CliResult<()> {
    let start = Instant::now();
    let options = CountOptions {
        witnesses: run.witnesses,
        max_columns: run.max_columns,
    };

    let mut doc = Document::new("count", common);
    doc.setting("form", &run.form_text);
    doc.setting("delta", render_rational(&run.delta));
    doc.setting("kind", run.kind_name);
    if run.kappa_text.is_some() || run.kind != RegionKind::FullBand {
        doc.setting("kappa", render_surd(&run.kappa));
    }
    if run.witnesses {
        doc.setting("witnesses", "true");
    }
    if let Some(budget) = run.max_columns {
        doc.setting("max-columns", budget.to_string());
    }
    for (key, value) in &run.grid.header {
        doc.setting(key, value.clone());
    }
    doc.columns("rho,kind,count,columns,boundary,full,minus_cut,plus_cut,discrepancy,partial");

    let mut rows_json = Vec::with_capacity(run.grid.values.len());
    let mut budget_hit: Option<(u64, BigRational)> = None;
    for rho in &run.grid.values {
        let query = CountQuery {
            form: run.form.clone(),
            delta: run.delta.clone(),
            kappa: run.kappa.clone(),
            rho: rho.clone(),
            kind: run.kind,
        };
        match count_region(&query, &options) {
            Ok(result) => {
                doc.row(result_row(rho, run.kind_name, &result, false));
                rows_json.push(result_json(rho, run.kind_name, &result, false, run.witnesses));
            }
            Err(CountError::Budget { budget, partial }) => {
                doc.row(result_row(rho, run.kind_name, &partial, true));
                rows_json.push(result_json(rho, run.kind_name, &partial, true, run.witnesses));
                budget_hit = Some((budget, rho.clone()));
                break;
            }
            Err(e) => return Err(CliError::Validation(format!("count: {e}"))),
        }
    }
    doc.field("rows", Value::Array(rows_json));
    doc.field("partial", Value::from(budget_hit.is_some()));
    if budget_hit.is_some() {
        doc.trailer("partial", "true");
    }

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)?;
    match budget_hit {
        Some((budget, rho)) => Err(CliError::Budget(format!(
            "column budget {budget} exhausted at rho {}; partial output written",
            render_rational(&rho)
        ))),
        None => Ok(()),
    }
}

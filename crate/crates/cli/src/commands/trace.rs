//! Segment coding of a reduced geodesic with return times, excursion
//! heights, and cusp verdicts per requested band.

use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Value};

use hurwitz_core::forms::BinaryForm;
use hurwitz_core::hyperbolic::{trace_segments, CuspAssessment, CuspVerdict};

use crate::config::{merge_parse, merge_text, Common, Precision, Settings};
use crate::literals::{
    csv_rational, parse_form, parse_positive_rational, render_rational, render_surd,
    split_top_level,
};
use crate::output::{write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct TraceArgs {
    /// Form literal: form(a=..., b=..., c=..., d=...).
    #[arg(long)]
    pub form: Option<String>,
    /// Number of segments to code.
    #[arg(long)]
    pub segments: Option<usize>,
    /// Cusp band height in (0, 1]; repeat for several bands.
    #[arg(long = "delta", value_name = "DELTA")]
    pub deltas: Vec<String>,
}

#[derive(Debug)]
pub struct TraceRun {
    form_text: String,
    form: BinaryForm,
    segments: usize,
    deltas: Vec<BigRational>,
}

pub fn resolve(args: TraceArgs, settings: &mut Settings) -> CliResult<TraceRun> {
    let form_text = merge_text(args.form, settings, "form")
        .ok_or_else(|| CliError::Validation("trace needs a form literal".to_string()))?
        .trim()
        .to_string();
    let form = parse_form(&form_text)?;
    let segments = merge_parse(args.segments, settings, "segments")?
        .ok_or_else(|| CliError::Validation("trace needs a segment count".to_string()))?;
    if segments == 0 {
        return Err(CliError::Validation(
            "segment count must be at least one".to_string(),
        ));
    }
    let delta_texts: Vec<String> = if args.deltas.is_empty() {
        settings
            .take("delta")
            .map(|text| {
                split_top_level(&text)
                    .into_iter()
                    .map(str::to_string)
                    .collect()
            })
            .unwrap_or_default()
    } else {
        settings.take("delta");
        args.deltas
    };
    let deltas = delta_texts
        .iter()
        .map(|text| parse_positive_rational(text, "delta"))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(TraceRun {
        form_text,
        form,
        segments,
        deltas,
    })
}

fn verdict_name(verdict: CuspVerdict) -> &'static str {
    match verdict {
        CuspVerdict::Intersects => "intersects",
        CuspVerdict::Misses => "misses",
        CuspVerdict::Indeterminate => "indeterminate",
    }
}

fn cusp_json(assessment: &CuspAssessment, precision: &Precision) -> Value {
    let arc = assessment.geometry.arc.as_ref().map(|arc| {
        json!({
            "x_enter_lo": precision.lo(&arc.x_enter),
            "x_enter_hi": precision.hi(&arc.x_enter),
            "x_exit_lo": precision.lo(&arc.x_exit),
            "x_exit_hi": precision.hi(&arc.x_exit),
        })
    });
    json!({
        "delta": render_rational(&assessment.delta),
        "verdict": verdict_name(assessment.verdict),
        "intersects": assessment.geometry.intersects,
        "unique_component": assessment.geometry.unique_component,
        "arc": arc.unwrap_or(Value::Null),
    })
}

pub fn execute(common: &Common, run: TraceRun) -> CliResult<()> {
    let start = Instant::now();
    let (u_pt, w_pt) = run.form.endpoints();
    let (Some(u), Some(w)) = (u_pt.finite(), w_pt.finite()) else {
        return Err(CliError::Validation(
            "geodesic endpoints must be finite; reduce the form first".to_string(),
        ));
    };
    let records = trace_segments(u, w, run.segments, &run.deltas)
        .map_err(|e| CliError::Validation(format!("trace: {e}")))?;

    let mut doc = Document::new("trace", common);
    doc.setting("form", &run.form_text);
    doc.setting("segments", run.segments.to_string());
    if !run.deltas.is_empty() {
        let joined = run
            .deltas
            .iter()
            .map(render_rational)
            .collect::<Vec<_>>()
            .join(",");
        doc.setting("delta", joined);
    }

    let mut columns = String::from("index,digit,time_lo,time_hi,chi_lo,chi_hi");
    for delta in &run.deltas {
        columns.push_str(&format!(",cusp_{}", csv_rational(delta)));
    }
    doc.columns(&columns);

    let precision = &common.precision;
    let mut rows_json = Vec::with_capacity(records.len());
    for record in &records {
        let mut row = format!(
            "{},{},{},{},{},{}",
            record.index,
            record.digit,
            precision.lo(&record.time),
            precision.hi(&record.time),
            precision.lo(&record.chi),
            precision.hi(&record.chi),
        );
        for assessment in &record.cusp {
            row.push(',');
            row.push_str(verdict_name(assessment.verdict));
        }
        doc.row(row);

        let cusp: Vec<Value> = record
            .cusp
            .iter()
            .map(|a| cusp_json(a, precision))
            .collect();
        rows_json.push(json!({
            "index": record.index,
            "digit": record.digit,
            "u": render_surd(&record.endpoints.0),
            "w": render_surd(&record.endpoints.1),
            "entry": {
                "x": render_surd(&record.entry.x),
                "y_sq": render_surd(&record.entry.y_sq),
            },
            "exit": {
                "x": render_surd(&record.exit.x),
                "y_sq": render_surd(&record.exit.y_sq),
            },
            "time_lo": precision.lo(&record.time),
            "time_hi": precision.hi(&record.time),
            "chi_lo": precision.lo(&record.chi),
            "chi_hi": precision.hi(&record.chi),
            "cusp": cusp,
        }));
    }
    doc.field("segments", Value::Array(rows_json));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

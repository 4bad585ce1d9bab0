//! Reduction of a binary quadratic form to its H-reduced representative.

use std::time::Instant;

use serde_json::{json, Value};

use hurwitz_core::forms::{h_reduce, BinaryForm, FormError, Reduction, DEFAULT_REDUCTION_BUDGET};

use crate::config::{merge_parse, merge_text, Common, Settings};
use crate::literals::{parse_form, render_point, render_surd};
use crate::output::{write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct ReduceArgs {
    /// Form literal: form(a=..., b=..., c=..., d=...).
    #[arg(long)]
    pub form: Option<String>,
    /// Reduction step budget.
    #[arg(long = "max-steps", value_name = "N")]
    pub max_steps: Option<usize>,
}

#[derive(Debug)]
pub struct ReduceRun {
    form_text: String,
    form: BinaryForm,
    max_steps: usize,
}

pub fn resolve(args: ReduceArgs, settings: &mut Settings) -> CliResult<ReduceRun> {
    let form_text = merge_text(args.form, settings, "form")
        .ok_or_else(|| CliError::Validation("reduce needs a form literal".to_string()))?
        .trim()
        .to_string();
    let form = parse_form(&form_text)?;
    let max_steps = merge_parse(args.max_steps, settings, "max-steps")?
        .unwrap_or(DEFAULT_REDUCTION_BUDGET);
    if max_steps == 0 {
        return Err(CliError::Validation(
            "max-steps must be at least one".to_string(),
        ));
    }
    Ok(ReduceRun {
        form_text,
        form,
        max_steps,
    })
}

fn form_json(form: &BinaryForm) -> Value {
    let (a, b, c, d) = form.coefficients();
    let (u, w) = form.endpoints();
    json!({
        "coefficients": {
            "a": render_surd(&a),
            "b": render_surd(&b),
            "c": render_surd(&c),
            "d": render_surd(&d),
        },
        "endpoints": {
            "u": render_point(&u),
            "w": render_point(&w),
        },
    })
}

fn push_form_rows(doc: &mut Document, prefix: &str, form: &BinaryForm) {
    let (a, b, c, d) = form.coefficients();
    let (u, w) = form.endpoints();
    doc.row(format!("{prefix}_a,{}", render_surd(&a)));
    doc.row(format!("{prefix}_b,{}", render_surd(&b)));
    doc.row(format!("{prefix}_c,{}", render_surd(&c)));
    doc.row(format!("{prefix}_d,{}", render_surd(&d)));
    doc.row(format!("{prefix}_u,{}", render_point(&u)));
    doc.row(format!("{prefix}_w,{}", render_point(&w)));
}

fn join_digits(digits: &[i64]) -> String {
    digits
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn write_reduction(common: &Common, run: &ReduceRun, reduction: &Reduction) -> CliResult<()> {
    let start = Instant::now();
    let mut doc = new_doc(common, run);
    let (m11, m12, m21, m22) = reduction.word.entries();

    doc.columns("key,value");
    doc.row(format!("steps,{}", reduction.steps));
    doc.row(format!("word_digits,{}", join_digits(&reduction.digits)));
    doc.row(format!("word_m11,{m11}"));
    doc.row(format!("word_m12,{m12}"));
    doc.row(format!("word_m21,{m21}"));
    doc.row(format!("word_m22,{m22}"));
    push_form_rows(&mut doc, "input", &run.form);
    push_form_rows(&mut doc, "reduced", &reduction.form);
    doc.row(format!("h_reduced,{}", reduction.form.is_h_reduced()));

    doc.field("steps", Value::from(reduction.steps));
    doc.field(
        "word",
        json!({
            "digits": reduction.digits.clone(),
            "matrix": [
                [m11.to_string(), m12.to_string()],
                [m21.to_string(), m22.to_string()],
            ],
        }),
    );
    doc.field("input", form_json(&run.form));
    doc.field("reduced", form_json(&reduction.form));
    doc.field("h_reduced", Value::from(reduction.form.is_h_reduced()));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

fn write_partial(common: &Common, run: &ReduceRun, limit: usize, digits: &[i64]) -> CliResult<()> {
    let start = Instant::now();
    let mut doc = new_doc(common, run);
    doc.columns("key,value");
    doc.row(format!("steps,{limit}"));
    doc.row(format!("word_digits,{}", join_digits(digits)));
    doc.trailer("partial", "true");
    doc.field("steps", Value::from(limit));
    doc.field("word", json!({ "digits": digits }));
    doc.field("partial", Value::from(true));
    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

fn new_doc(common: &Common, run: &ReduceRun) -> Document {
    let mut doc = Document::new("reduce", common);
    doc.setting("form", &run.form_text);
    doc.setting("max-steps", run.max_steps.to_string());
    doc
}

pub fn execute(common: &Common, run: ReduceRun) -> CliResult<()> {
    match h_reduce(&run.form, run.max_steps) {
        Ok(reduction) => write_reduction(common, &run, &reduction),
        Err(FormError::ReductionBudget { limit, digits }) => {
            write_partial(common, &run, limit, &digits)?;
            Err(CliError::Budget(format!(
                "reduction budget of {limit} steps exhausted; partial digits written"
            )))
        }
        Err(e) => Err(CliError::Validation(format!("form: {e}"))),
    }
}

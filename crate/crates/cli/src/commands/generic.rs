//! Expected excursion statistics of a measure typical digit sequence.

use std::time::Instant;

use num_rational::BigRational;
use serde_json::Value;

use hurwitz_core::stats::gauss_generic;

use crate::config::{merge_parse, merge_text, Common, Settings};
use crate::literals::{csv_rational, parse_positive_rational, render_rational};
use crate::output::{write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct GenericArgs {
    /// Band height delta.
    #[arg(long)]
    pub delta: Option<String>,
    /// Stopping tolerance for the digit series tail.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug)]
pub struct GenericRun {
    delta: BigRational,
    tol: f64,
}

pub fn resolve(args: GenericArgs, settings: &mut Settings) -> CliResult<GenericRun> {
    let delta_text = merge_text(args.delta, settings, "delta")
        .ok_or_else(|| CliError::Validation("generic needs a band height delta".to_string()))?;
    let delta = parse_positive_rational(&delta_text, "delta")?;
    let tol = merge_parse(args.tol, settings, "tol")?.unwrap_or(1e-9);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Validation(format!(
            "tol must be positive and finite, got {tol}"
        )));
    }
    Ok(GenericRun { delta, tol })
}

pub fn execute(common: &Common, run: GenericRun) -> CliResult<()> {
    let start = Instant::now();
    let generic = gauss_generic(&run.delta, run.tol)
        .map_err(|e| CliError::Validation(format!("generic: {e}")))?;

    let mut doc = Document::new("generic", common);
    doc.setting("delta", render_rational(&run.delta));
    doc.setting("tol", run.tol.to_string());

    let precision = &common.precision;
    doc.columns("delta,tol,alpha,cutoff,k,l,e_lo,e_hi,f_lo,f_hi");
    doc.row(format!(
        "{},{},{},{},{},{},{},{},{},{}",
        csv_rational(&run.delta),
        run.tol,
        generic.alpha,
        generic.cutoff,
        generic.k,
        generic.l,
        precision.lo(&generic.e_generic),
        precision.hi(&generic.e_generic),
        precision.lo(&generic.f_generic),
        precision.hi(&generic.f_generic),
    ));

    doc.field("alpha", Value::from(generic.alpha));
    doc.field("cutoff", Value::from(generic.cutoff));
    doc.field("k", Value::from(generic.k.to_string()));
    doc.field("l", Value::from(generic.l.to_string()));
    doc.field("e_lo", Value::from(precision.lo(&generic.e_generic)));
    doc.field("e_hi", Value::from(precision.hi(&generic.e_generic)));
    doc.field("f_lo", Value::from(precision.lo(&generic.f_generic)));
    doc.field("f_hi", Value::from(precision.hi(&generic.f_generic)));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

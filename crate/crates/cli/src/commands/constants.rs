//! The coding constants with certified enclosures.

use std::time::Instant;

use serde_json::{json, Value};

use hurwitz_core::stats::constants;

use crate::config::{Common, Settings};
use crate::literals::render_surd;
use crate::output::{write_out, Document};
use crate::CliResult;

#[derive(Debug, clap::Args)]
pub struct ConstantsArgs {}

#[derive(Debug)]
pub struct ConstantsRun {}

pub fn resolve(_args: ConstantsArgs, _settings: &mut Settings) -> CliResult<ConstantsRun> {
    Ok(ConstantsRun {})
}

pub fn execute(common: &Common, _run: ConstantsRun) -> CliResult<()> {
    let start = Instant::now();
    let table = constants();

    let mut doc = Document::new("constants", common);
    doc.columns("name,lo,hi");
    let precision = &common.precision;
    let mut rows_json = Vec::new();
    for (name, value) in table.rows() {
        let lo = precision.lo(&value);
        let hi = precision.hi(&value);
        doc.row(format!("{name},{lo},{hi}"));
        rows_json.push(json!({ "name": name, "lo": lo, "hi": hi }));
    }
    doc.trailer("lambda_exact", render_surd(&table.lambda));
    doc.trailer("mu_exact", render_surd(&table.mu));
    doc.field("constants", Value::Array(rows_json));
    doc.field("lambda_exact", Value::from(render_surd(&table.lambda)));
    doc.field("mu_exact", Value::from(render_surd(&table.mu)));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

//! Lattice counts in the wedge next to flow component counts over a
//! radius grid.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use hurwitz_core::counting::{flow_count_comparison, separation_gap};
use hurwitz_core::forms::BinaryForm;
use hurwitz_core::numerics::decimal_string;

use crate::config::{merge_text, Common, Settings};
use crate::grid::{RadiusFlags, RadiusGrid};
use crate::literals::{csv_rational, parse_form, parse_positive_rational, render_rational};
use crate::output::{cell, write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct ComponentsArgs {
    /// Form literal: form(a=..., b=..., c=..., d=...).
    #[arg(long)]
    pub form: Option<String>,
    /// Band height epsilon in (0, 1) for the wedge.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[command(flatten)]
    pub radius: RadiusFlags,
}

#[derive(Debug)]
pub struct ComponentsRun {
    form_text: String,
    form: BinaryForm,
    epsilon: BigRational,
    grid: RadiusGrid,
}

pub fn resolve(args: ComponentsArgs, settings: &mut Settings) -> CliResult<ComponentsRun> {
    let form_text = merge_text(args.form, settings, "form")
        .ok_or_else(|| CliError::Validation("components needs a form literal".to_string()))?
        .trim()
        .to_string();
    let form = parse_form(&form_text)?;
    let epsilon_text = merge_text(args.epsilon, settings, "epsilon").ok_or_else(|| {
        CliError::Validation("components needs a band height epsilon".to_string())
    })?;
    let epsilon = parse_positive_rational(&epsilon_text, "epsilon")?;
    if epsilon >= BigRational::one() {
        return Err(CliError::Validation(format!(
            "epsilon must lie strictly between zero and one, got {epsilon_text}"
        )));
    }
    let grid = args.radius.resolve(settings)?;
    Ok(ComponentsRun {
        form_text,
        form,
        epsilon,
        grid,
    })
}

pub fn execute(common: &Common, run: ComponentsRun) -> CliResult<()> {
    let start = Instant::now();
    let separation = separation_gap(&run.epsilon)
        .map_err(|e| CliError::Validation(format!("components: {e}")))?;

    let mut doc = Document::new("components", common);
    doc.setting("form", &run.form_text);
    doc.setting("epsilon", render_rational(&run.epsilon));
    for (key, value) in &run.grid.header {
        doc.setting(key, value.clone());
    }
    doc.columns("rho,tau_lo,tau_hi,lattice_count,components_low,components_high,within_one");

    let precision = &common.precision;
    let mut rows_json = Vec::with_capacity(run.grid.values.len());
    for rho in &run.grid.values {
        let row = flow_count_comparison(&run.form, &run.epsilon, rho)
            .map_err(|e| CliError::Validation(format!("components: {e}")))?;
        let tau_lo = decimal_string(&row.tau_low, precision.places, false);
        let tau_hi = decimal_string(&row.tau_high, precision.places, true);
        doc.row(format!(
            "{},{},{},{},{},{},{}",
            csv_rational(rho),
            tau_lo,
            tau_hi,
            row.lattice_count,
            row.components_low,
            row.components_high,
            cell(row.within_one),
        ));
        rows_json.push(json!({
            "rho": render_rational(rho),
            "tau_lo": tau_lo,
            "tau_hi": tau_hi,
            "lattice_count": row.lattice_count,
            "components_low": row.components_low,
            "components_high": row.components_high,
            "within_one": row.within_one,
        }));
    }
    doc.trailer("separation_lo", precision.lo(&separation));
    doc.trailer("separation_hi", precision.hi(&separation));
    doc.field("rows", Value::Array(rows_json));
    doc.field("separation_lo", Value::from(precision.lo(&separation)));
    doc.field("separation_hi", Value::from(precision.hi(&separation)));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

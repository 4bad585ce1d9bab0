//! Digit expansion of a value literal.

use std::time::Instant;

use serde_json::{json, Value};

use hurwitz_core::hurwitz::{expand, expand_bracket, validate, DigitSequence, ValidityRule};
use hurwitz_core::ValueLiteral;

use crate::config::{merge_parse, merge_text, Common, Settings};
use crate::literals::parse_literal;
use crate::output::{write_out, Document};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct ExpandArgs {
    /// Value to expand: an integer, rat(p,q), surd(p,q,d,r), a decimal,
    /// or inf.
    #[arg(long)]
    pub value: Option<String>,
    /// Number of digits to produce.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug)]
pub struct ExpandRun {
    value_text: String,
    literal: ValueLiteral,
    n: usize,
}

pub fn resolve(args: ExpandArgs, settings: &mut Settings) -> CliResult<ExpandRun> {
    let value_text = merge_text(args.value, settings, "value")
        .ok_or_else(|| CliError::Validation("expand needs a value".to_string()))?
        .trim()
        .to_string();
    let literal = parse_literal(&value_text, "value")?;
    if matches!(literal, ValueLiteral::Infinity) {
        return Err(CliError::Validation(
            "value must be finite, got inf".to_string(),
        ));
    }
    let n = merge_parse(args.n, settings, "n")?
        .ok_or_else(|| CliError::Validation("expand needs a digit count n".to_string()))?;
    if n == 0 {
        return Err(CliError::Validation(
            "digit count n must be at least one".to_string(),
        ));
    }
    Ok(ExpandRun {
        value_text,
        literal,
        n,
    })
}

fn expand_literal(run: &ExpandRun) -> CliResult<DigitSequence> {
    let result = match &run.literal {
        ValueLiteral::Exact(s) if !s.is_rational() => expand(s, run.n),
        other => {
            let (lo, hi) = other.as_interval().expect("finite literal has an interval");
            expand_bracket(&lo, &hi, run.n, run.value_text.clone())
        }
    };
    result.map_err(|e| CliError::Validation(format!("value: {e}")))
}

fn rule_name(rule: ValidityRule) -> &'static str {
    match rule {
        ValidityRule::TooSmall => "too-small",
        ValidityRule::SignPair => "sign-pair",
    }
}

pub fn execute(common: &Common, run: ExpandRun) -> CliResult<()> {
    let start = Instant::now();
    let seq = expand_literal(&run)?;
    let validity = validate(&seq.digits);

    let mut doc = Document::new("expand", common);
    doc.setting("value", &run.value_text);
    doc.setting("n", run.n.to_string());

    doc.columns("index,digit");
    for (index, digit) in seq.digits.iter().enumerate() {
        doc.row(format!("{index},{digit}"));
    }
    if let Some((start, len)) = seq.period {
        doc.trailer("period", format!("{start},{len}"));
    }
    doc.trailer("exhausted", seq.exhausted.to_string());
    doc.trailer("valid", validity.is_valid().to_string());
    for v in &validity.violations {
        doc.trailer(
            "violation",
            format!("{}:{}:{}", v.index, v.digit, rule_name(v.rule)),
        );
    }

    doc.field("source", Value::from(seq.source.clone()));
    doc.field("digits", Value::from(seq.digits.clone()));
    doc.field(
        "period",
        match seq.period {
            Some((start, len)) => json!([start, len]),
            None => Value::Null,
        },
    );
    doc.field("exhausted", Value::from(seq.exhausted));
    doc.field("valid", Value::from(validity.is_valid()));
    let violations: Vec<Value> = validity
        .violations
        .iter()
        .map(|v| {
            json!({
                "index": v.index,
                "digit": v.digit,
                "rule": rule_name(v.rule),
            })
        })
        .collect();
    doc.field("violations", Value::Array(violations));

    let text = doc.render(common.format, start.elapsed());
    write_out(common.output.as_deref(), &text)
}

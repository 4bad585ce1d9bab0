//! Run settings: a key=value file merged under command line flags, the
//! shared flags every subcommand accepts, and the printing precision
//! derived from the precision cap.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use hurwitz_core::CertifiedReal;

use crate::{CliError, CliResult};

/// Least accepted value of the precision cap.
pub const MIN_PRECISION_BITS: u32 = 128;

/// Default precision cap in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 192;

/// Output format of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(text: &str) -> CliResult<Format> {
        match text.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Validation(format!(
                "format must be csv or json, got {other}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Settings read from a key=value file. Keys mirror the long flag names;
/// a flag given on the command line overrides the file entry. Lines that
/// are empty or start with `#` are skipped.
#[derive(Debug, Default)]
pub struct Settings {
    entries: BTreeMap<String, String>,
}

impl Settings {
    pub fn empty() -> Settings {
        Settings::default()
    }

    pub fn from_file(path: &Path) -> CliResult<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("config file {}: {e}", path.display()))
        })?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "config file {} line {}: expected key=value, got {line}",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Validation(format!(
                    "config file {} line {}: duplicate key {key}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        Ok(Settings { entries })
    }

    /// Removes and returns the entry for `key`.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Fails if any entry was never consumed, naming the stray keys.
    pub fn finish(&self) -> CliResult<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        Err(CliError::Validation(format!(
            "config keys not recognized for this command: {}",
            keys.join(", ")
        )))
    }
}

/// Returns the flag when given, otherwise the settings entry for `key`.
pub fn merge_text(
    flag: Option<String>,
    settings: &mut Settings,
    key: &str,
) -> Option<String> {
    let file = settings.take(key);
    flag.or(file)
}

/// Merges a typed flag with a settings entry parsed through `FromStr`.
pub fn merge_parse<T: FromStr>(
    flag: Option<T>,
    settings: &mut Settings,
    key: &str,
) -> CliResult<Option<T>> {
    let file = settings.take(key);
    if let Some(v) = flag {
        return Ok(Some(v));
    }
    match file {
        None => Ok(None),
        Some(text) => text.trim().parse().map(Some).map_err(|_| {
            CliError::Validation(format!("config entry {key} is not valid: {text}"))
        }),
    }
}

/// Merges a boolean flag with a true/false settings entry.
pub fn merge_flag(flag: bool, settings: &mut Settings, key: &str) -> CliResult<bool> {
    let file = settings.take(key);
    if flag {
        return Ok(true);
    }
    match file.as_deref().map(str::trim) {
        None => Ok(false),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(other) => Err(CliError::Validation(format!(
            "config entry {key} must be true or false, got {other}"
        ))),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, clap::Args)]
pub struct CommonFlags {
    /// Settings file with one key=value per line; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    pub format: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Working precision cap in bits; at least 128.
    #[arg(long = "precision-bits", global = true, value_name = "BITS")]
    pub precision_bits: Option<u32>,
    /// Worker threads for counting sweeps; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
}

/// Decimal printing precision for certified values: enclosures are
/// refined below `eps` and printed to `places` digits, the lower end
/// rounded down and the upper end rounded up.
#[derive(Debug, Clone)]
pub struct Precision {
    pub places: usize,
    pub eps: BigRational,
}

impl Precision {
    pub fn from_bits(bits: u32) -> Precision {
        let places = (bits / 8) as usize;
        let eps = BigRational::new(
            BigInt::one(),
            BigInt::from(10u32).pow(places as u32 + 2),
        );
        Precision { places, eps }
    }

    pub fn lo(&self, x: &CertifiedReal) -> String {
        x.decimal_lo(self.places, &self.eps)
    }

    pub fn hi(&self, x: &CertifiedReal) -> String {
        x.decimal_hi(self.places, &self.eps)
    }
}

/// Shared settings after merging flags, file entries, and defaults.
#[derive(Debug)]
pub struct Common {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub precision_bits: u32,
    pub precision: Precision,
    pub workers: Option<usize>,
}

impl Common {
    pub fn resolve(flags: &CommonFlags, settings: &mut Settings) -> CliResult<Common> {
        let format = match merge_text(flags.format.clone(), settings, "format") {
            Some(text) => Format::parse(&text)?,
            None => Format::Csv,
        };
        let output = flags
            .output
            .clone()
            .or_else(|| settings.take("output").map(PathBuf::from));
        let precision_bits = merge_parse(flags.precision_bits, settings, "precision-bits")?
            .unwrap_or(DEFAULT_PRECISION_BITS);
        if precision_bits < MIN_PRECISION_BITS {
            return Err(CliError::Validation(format!(
                "precision-bits must be at least {MIN_PRECISION_BITS}, got {precision_bits}"
            )));
        }
        let workers = merge_parse(flags.workers, settings, "workers")?;
        if workers == Some(0) {
            return Err(CliError::Validation(
                "workers must be at least one".to_string(),
            ));
        }
        Ok(Common {
            format,
            output,
            precision_bits,
            precision: Precision::from_bits(precision_bits),
            workers,
        })
    }

    /// Header entries for the shared settings.
    pub fn header(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("format".to_string(), self.format.name().to_string());
        map.insert(
            "output".to_string(),
            self.output
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".to_string()),
        );
        map.insert(
            "precision-bits".to_string(),
            self.precision_bits.to_string(),
        );
        map.insert(
            "workers".to_string(),
            self.workers
                .map(|w| w.to_string())
                .unwrap_or_else(|| "auto".to_string()),
        );
        map
    }
}

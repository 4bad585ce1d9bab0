//! Radius grids: a single radius, or a geometric sweep from a start to a
//! stop with a multiplier above one.

use num_rational::BigRational;

use crate::config::Settings;
use crate::literals::{parse_positive_rational, render_rational};
use crate::{CliError, CliResult};

/// Most grid points a sweep may request.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Resolved radius grid with its header entries.
#[derive(Debug)]
pub struct RadiusGrid {
    pub values: Vec<BigRational>,
    pub header: Vec<(String, String)>,
}

/// Radius flags before resolution.
#[derive(Debug, Default, clap::Args)]
pub struct RadiusFlags {
    /// Single radius; exclusive with the grid flags.
    #[arg(long)]
    pub rho: Option<String>,
    /// First radius of a geometric grid.
    #[arg(long = "rho-start", value_name = "RHO")]
    pub rho_start: Option<String>,
    /// Last radius of a geometric grid; points above it are dropped.
    #[arg(long = "rho-stop", value_name = "RHO")]
    pub rho_stop: Option<String>,
    /// Ratio between consecutive radii; must exceed one.
    #[arg(long = "rho-multiplier", value_name = "M")]
    pub rho_multiplier: Option<String>,
}

impl RadiusFlags {
    /// Merges the flags with settings entries and builds the grid.
    pub fn resolve(self, settings: &mut Settings) -> CliResult<RadiusGrid> {
        let rho = self.rho.or_else(|| settings.take("rho"));
        let start = self.rho_start.or_else(|| settings.take("rho-start"));
        let stop = self.rho_stop.or_else(|| settings.take("rho-stop"));
        let multiplier = self
            .rho_multiplier
            .or_else(|| settings.take("rho-multiplier"));

        if let Some(rho_text) = rho {
            if start.is_some() || stop.is_some() || multiplier.is_some() {
                return Err(CliError::Validation(
                    "give either a single rho or a rho-start/rho-stop grid, not both"
                        .to_string(),
                ));
            }
            let value = parse_positive_rational(&rho_text, "rho")?;
            let header = vec![("rho".to_string(), render_rational(&value))];
            return Ok(RadiusGrid {
                values: vec![value],
                header,
            });
        }

        let (Some(start_text), Some(stop_text)) = (start, stop) else {
            return Err(CliError::Validation(
                "a radius is required: rho, or both rho-start and rho-stop".to_string(),
            ));
        };
        let start = parse_positive_rational(&start_text, "rho-start")?;
        let stop = parse_positive_rational(&stop_text, "rho-stop")?;
        if stop < start {
            return Err(CliError::Validation(format!(
                "rho-stop must not be below rho-start, got {stop_text} < {start_text}"
            )));
        }
        let multiplier = match multiplier {
            Some(text) => parse_positive_rational(&text, "rho-multiplier")?,
            None => BigRational::from_integer(10.into()),
        };
        if multiplier <= BigRational::from_integer(1.into()) {
            return Err(CliError::Validation(format!(
                "rho-multiplier must exceed one, got {}",
                render_rational(&multiplier)
            )));
        }

        let mut values = Vec::new();
        let mut current = start.clone();
        while current <= stop {
            values.push(current.clone());
            if values.len() > MAX_GRID_POINTS {
                return Err(CliError::Validation(format!(
                    "radius grid has more than {MAX_GRID_POINTS} points"
                )));
            }
            current *= &multiplier;
        }
        let header = vec![
            ("rho-start".to_string(), render_rational(&start)),
            ("rho-stop".to_string(), render_rational(&stop)),
            ("rho-multiplier".to_string(), render_rational(&multiplier)),
        ];
        Ok(RadiusGrid { values, header })
    }
}

use serde_json::{json, Value};

/// Failures of a CLI run. Exit status 2 for hypothesis violations, 1 otherwise.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] ingham::Error),
    #[error("invalid config: {0}")]
    Config(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("invalid sweep axis: {0}")]
    Axis(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        if self.is_validation() {
            2
        } else {
            1
        }
    }

    pub fn is_validation(&self) -> bool {
        match self {
            CliError::Library(e) => e.is_validation(),
            CliError::Axis(_) => true,
            _ => false,
        }
    }

    /// Stable identifier of the failure, e.g. `gap_violation`.
    pub fn code(&self) -> String {
        match self {
            CliError::Library(e) => library_code(e),
            CliError::Config(_) => "config".into(),
            CliError::Usage(_) => "usage".into(),
            CliError::Axis(_) => "invalid_axis".into(),
            CliError::Io(_) => "io".into(),
            CliError::Csv(_) => "csv".into(),
        }
    }

    /// Structured payload of the error, where it carries one.
    pub fn details(&self) -> Option<Value> {
        use ingham::Error as E;
        let CliError::Library(e) = self else { return None };
        Some(match e {
            E::GapViolation(report) => serde_json::to_value(report).ok()?,
            E::BandViolation { indices } | E::FilterRange { indices } => json!({ "indices": indices }),
            E::ModeCapExceeded { modes } => json!({ "modes": modes }),
            E::SingularPencil { min_eig, max_eig } => json!({ "min_eig": min_eig, "max_eig": max_eig }),
            E::HorizonViolated { j_delta, required } => json!({ "j_delta": j_delta, "required": required }),
            E::WindowExceedsPeriod { gamma, half_period } => json!({ "gamma": gamma, "half_period": half_period }),
            E::FormulaBoundViolated { empirical, formula } => json!({ "empirical": empirical, "formula": formula }),
            E::RankDeficient { samples, exponents, min_eig } => {
                json!({ "samples": samples, "exponents": exponents, "min_eig": min_eig })
            }
            _ => return None,
        })
    }
}

/// Snake-case variant name taken from the Debug form.
fn library_code(e: &ingham::Error) -> String {
    let debug = format!("{e:?}");
    let name = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default();
    let mut out = String::new();
    for (i, ch) in name.chars().enumerate() {
        if ch.is_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.extend(ch.to_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

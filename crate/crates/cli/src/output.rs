//! Exit codes, float formatting and the error carried to `main`.

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INAPPLICABLE: u8 = 3;
pub const EXIT_NONCONVERGENCE: u8 = 4;
pub const EXIT_UNWRITABLE: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is zero.
pub fn rel_discrepancy(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub fn oracle_config() -> Result<besselrad::QuadratureConfig, CliError> {
    besselrad::QuadratureConfig::from_env().map_err(CliError::from)
}

use std::fmt;

/// Errors reported by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter violated its domain (value and what was expected).
    InvalidParameter { name: &'static str, value: f64, expected: &'static str },
    /// A pinching antenna was requested upstream of its feed point.
    AntennaBeforeFeed { feed_x: f64, pa_x: f64 },
    /// The user projection falls outside the waveguide span.
    UserOutsideRegion { u_x: f64, lo: f64, hi: f64 },
    /// Subset enumeration was asked for more segments than it supports.
    TooManySegments { segments: usize, max: usize },
    /// A closed form that assumes a symmetric layout was called on an
    /// asymmetric one.
    AsymmetricLayout(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value, expected } => {
                write!(f, "invalid parameter {name} = {value}: expected {expected}")
            }
            Error::AntennaBeforeFeed { feed_x, pa_x } => {
                write!(f, "antenna at x = {pa_x} lies upstream of its feed at x = {feed_x}")
            }
            Error::UserOutsideRegion { u_x, lo, hi } => {
                write!(f, "user x = {u_x} outside the waveguide span [{lo}, {hi}]")
            }
            Error::TooManySegments { segments, max } => {
                write!(f, "subset enumeration supports at most {max} segments, got {segments}")
            }
            Error::AsymmetricLayout(msg) => write!(f, "asymmetric layout: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, expected })
    }
}

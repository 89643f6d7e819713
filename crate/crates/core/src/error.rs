use std::fmt;

use thiserror::Error;

use crate::model::Coord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which branch of the witness construction was active at a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    CaseI,
    CaseII,
    CaseIII,
    OffSupport,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::CaseI => "case I",
            CaseTag::CaseII => "case II",
            CaseTag::CaseIII => "case III",
            CaseTag::OffSupport => "off support",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("space mismatch: {left} vs {right}")]
    ModelMismatch { left: String, right: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("witness {index} is not in its slice (slice margin {slice_margin:e}, ball margin {ball_margin:e})")]
    NotInSlice {
        index: usize,
        slice_margin: f64,
        ball_margin: f64,
    },

    #[error("point is not in the neighborhood: {0}")]
    OutsideNeighborhood(String),

    #[error("construction failure at {coord} ({case}): {detail}")]
    ConstructionFailure {
        coord: Coord,
        case: CaseTag,
        detail: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("cannot assign disjoint cells to densities {deficient:?}")]
    NoDisjointCells { deficient: Vec<usize> },

    /// Malformed scenario or payload, with location context.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

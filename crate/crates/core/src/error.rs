use thiserror::Error;

use crate::instance::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no clusters")]
    NoClusters,
    #[error("cluster {0} has no arms")]
    EmptyCluster(usize),
    #[error("mean {value} of arm {arm} in cluster {cluster} is outside [0, 1]")]
    MeanOutOfRange {
        cluster: usize,
        arm: usize,
        value: f64,
    },
    #[error("width {value} of cluster {cluster} is outside [0, 1]")]
    WidthOutOfRange { cluster: usize, value: f64 },
    #[error("cluster width constraint violated: {}", format_violations(.0))]
    ConstraintViolation(Vec<Violation>),
    #[error("best arm is not unique (mean {0})")]
    NonUniqueOptimum(f64),
    #[error("expected {expected} widths, got {got}")]
    WidthCount { expected: usize, got: usize },
    #[error("degenerate divergence in cluster {cluster}: {what}")]
    DegenerateDivergence { cluster: usize, what: &'static str },
    #[error("cluster of {size} arms exceeds the LP enumeration limit of {limit}")]
    EnumerationLimit { size: usize, limit: usize },
    #[error("horizon {horizon} is shorter than the {arms} initialization rounds")]
    HorizonTooShort { horizon: u64, arms: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| {
            format!(
                "cluster {} spread {} vs width {}",
                v.cluster, v.spread, v.width
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

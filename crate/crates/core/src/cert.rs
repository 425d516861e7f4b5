use serde::{Deserialize, Serialize};

/// A checked inequality with its measured and theoretical sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Certificate {
    /// `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Certificate { name: name.into(), measured, bound, holds: measured <= bound }
    }

    /// `measured >= bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Certificate { name: name.into(), measured, bound, holds: measured >= bound }
    }

    /// A yes/no property, recorded as 1/0 against 1.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Certificate { name: name.into(), measured: f64::from(u8::from(holds)), bound: 1.0, holds }
    }
}

pub fn all_hold(certs: &[Certificate]) -> bool {
    certs.iter().all(|c| c.holds)
}

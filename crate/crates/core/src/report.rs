use serde::{Deserialize, Serialize};

use crate::geometry::{Circle, Segment};

/// The probe that attains a reported discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Segment { ax: f64, ay: f64, bx: f64, by: f64 },
    Circle { cx: f64, cy: f64, t: f64 },
}

impl From<Segment> for Witness {
    fn from(s: Segment) -> Self {
        Witness::Segment {
            ax: s.a.x,
            ay: s.a.y,
            bx: s.b.x,
            by: s.b.y,
        }
    }
}

impl From<Circle> for Witness {
    fn from(c: Circle) -> Self {
        Witness::Circle {
            cx: c.center.x,
            cy: c.center.y,
            t: c.radius,
        }
    }
}

impl Witness {
    pub fn segment(&self) -> Option<Segment> {
        match *self {
            Witness::Segment { ax, ay, bx, by } => Some(Segment::new(ax, ay, bx, by)),
            Witness::Circle { .. } => None,
        }
    }

    pub fn circle(&self) -> Option<Circle> {
        match *self {
            Witness::Circle { cx, cy, t } => Some(Circle::new(cx, cy, t)),
            Witness::Segment { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Sampled,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Sampled => "sampled",
        }
    }
}

/// Result of a supremum search: the largest absolute discrepancy found and
/// the probe attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub value: f64,
    pub witness: Witness,
    pub method: Method,
    /// Number of candidate probes evaluated.
    pub search_size: u64,
}

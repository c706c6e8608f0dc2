//! Pass/fail records shared by symbolic and numerical checks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::{ZeroCheck, ZeroVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One named residual with its observed maximum and verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_abs: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, f64>>,
}

impl Check {
    /// A residual that is supposed to vanish identically.
    pub fn vanishing(name: impl Into<String>, z: &ZeroCheck) -> Check {
        let (verdict, witness) = match &z.verdict {
            ZeroVerdict::Zero => (Verdict::Pass, None),
            ZeroVerdict::Nonzero(w) => (Verdict::Fail, Some(w.point.clone())),
            ZeroVerdict::Inconclusive => (Verdict::Inconclusive, None),
        };
        Check {
            name: name.into(),
            max_abs: z.max_abs,
            tolerance: z.epsilon,
            verdict,
            witness,
        }
    }

    /// A numerical maximum compared against an absolute tolerance.
    pub fn bounded(
        name: impl Into<String>,
        max_abs: f64,
        tolerance: f64,
        witness: Option<BTreeMap<String, f64>>,
    ) -> Check {
        let pass = max_abs <= tolerance;
        Check {
            name: name.into(),
            max_abs: Some(max_abs),
            tolerance,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            witness: if pass { None } else { witness },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

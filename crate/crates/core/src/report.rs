//! Criterion reports: a verdict on the tested condition, what the theorem
//! behind it lets one conclude, and every number with its certification.

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::sequences::CertKind;

/// Status of the tested condition itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    HoldsCertified,
    HoldsNumeric,
    FailsNumeric,
    Inconclusive,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::HoldsCertified | Verdict::HoldsNumeric)
    }

    pub fn fails(self) -> bool {
        self == Verdict::FailsNumeric
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::HoldsCertified | Verdict::HoldsNumeric => "HOLDS",
            Verdict::FailsNumeric => "FAILS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// What the condition's status implies for the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    Hypercyclic,
    NotHypercyclic,
    Mixing,
    Chaotic,
    /// No non-trivial periodic vector.
    NoPeriodicVectors,
    BackwardShiftChaotic,
    Bounded,
    CompactPerturbation,
    NotCompactPerturbation,
    PreconditionNotMet,
    Unsupported,
    NoConclusion,
}

/// A reported number: value, optional error bound, certification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub bound: Option<f64>,
    pub cert: CertKind,
}

impl Quantity {
    pub fn certified(value: f64) -> Self {
        Quantity { value, bound: None, cert: CertKind::Certified }
    }

    pub fn heuristic(value: f64) -> Self {
        Quantity { value, bound: None, cert: CertKind::Heuristic }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn new(value: f64, cert: CertKind) -> Self {
        Quantity { value, bound: None, cert }
    }
}

/// Non-finite numbers have no JSON form; they serialize as strings.
pub(crate) fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        struct F(f64);
        impl Serialize for F {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                ser_f64(&self.0, s)
            }
        }
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("value", &F(self.value))?;
        if let Some(b) = self.bound {
            m.serialize_entry("bound", &F(b))?;
        }
        m.serialize_entry("cert", &self.cert)?;
        m.end()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Scan {
    pub nu_max: usize,
    pub n_max: usize,
    pub series_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion_id: String,
    pub verdict: Verdict,
    pub conclusion: Conclusion,
    pub quantities: IndexMap<String, Quantity>,
    pub scan: Scan,
    pub implication: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn new(id: &str, verdict: Verdict, conclusion: Conclusion, implication: impl Into<String>) -> Self {
        CriterionReport {
            criterion_id: id.to_string(),
            verdict,
            conclusion,
            quantities: IndexMap::new(),
            scan: Scan::default(),
            implication: implication.into(),
            notes: Vec::new(),
        }
    }

    pub fn quantity(mut self, name: &str, q: Quantity) -> Self {
        self.quantities.insert(name.to_string(), q);
        self
    }

    pub fn scan(mut self, scan: Scan) -> Self {
        self.scan = scan;
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).map(|q| q.value)
    }

    /// Every quantity certified.
    pub fn all_certified(&self) -> bool {
        self.quantities.values().all(|q| q.cert == CertKind::Certified)
    }

    /// Report for a request outside the theorems' range.
    pub fn unsupported(id: &str, why: impl Into<String>) -> Self {
        CriterionReport::new(id, Verdict::Inconclusive, Conclusion::Unsupported, why)
    }

    pub fn precondition_not_met(id: &str, why: impl Into<String>) -> Self {
        CriterionReport::new(id, Verdict::Inconclusive, Conclusion::PreconditionNotMet, why)
    }
}

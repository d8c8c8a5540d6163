//! Bell expressions in correlator form, exact local bounds, lifting, and
//! entanglement-depth bookkeeping.

mod depth;
mod local;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use depth::{
    certify_depth, lift, producible_to_separable, separable_to_producible, DepthCertificate,
    DEFAULT_EXCEED_MARGIN,
};
pub use local::{
    local_bound, local_bound_with, paradox_local_bound, DeterministicStrategy, LocalBound,
    LocalBoundOptions, DEFAULT_ENUMERATION_CAP,
};

use crate::error::{Error, Result};
use crate::qcore::{correlator, ObservableAssignment, StateVector};

/// Setting labels per party, `0` standing for the trivial setting ∅.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SettingVector(Vec<u8>);

impl SettingVector {
    pub const TRIVIAL: u8 = 0;

    pub fn new(entries: Vec<u8>) -> Self {
        Self(entries)
    }

    pub fn trivial(n: usize) -> Self {
        Self(vec![Self::TRIVIAL; n])
    }

    /// All-`label` vector, e.g. `2⃗_n`.
    pub fn constant(n: usize, label: u8) -> Self {
        Self(vec![label; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The 1-based label of `party`, or `None` for ∅.
    pub fn get(&self, party: usize) -> Option<usize> {
        match self.0[party] {
            Self::TRIVIAL => None,
            s => Some(s as usize),
        }
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Number of parties with a nontrivial setting.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s != Self::TRIVIAL).count()
    }

    fn padded(&self, n: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(n, Self::TRIVIAL);
        Self(v)
    }
}

impl fmt::Display for SettingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match *s {
                Self::TRIVIAL => f.write_str("∅")?,
                s => write!(f, "{s}")?,
            }
        }
        f.write_str(")")
    }
}

impl FromStr for SettingVector {
    type Err = Error;

    /// Accepts `(1,2,∅)`, `1,2,0` or `1 2 -`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut out = Vec::new();
        for tok in inner.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            match tok {
                "∅" | "0" | "-" | "_" => out.push(Self::TRIVIAL),
                t => out.push(
                    t.parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad setting label {t:?}")))?,
                ),
            }
        }
        if out.is_empty() {
            return Err(Error::Parse(format!("empty setting vector {s:?}")));
        }
        Ok(Self(out))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub settings: SettingVector,
}

impl Term {
    pub fn new(coeff: f64, settings: SettingVector) -> Self {
        Self { coeff, settings }
    }
}

/// Where a known bound came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Enumerated,
    ReferenceTable,
    Seesaw,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Enumerated => "enumerated",
            Provenance::ReferenceTable => "reference_table",
            Provenance::Seesaw => "seesaw",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownBound {
    pub value: f64,
    pub provenance: Provenance,
}

impl KnownBound {
    pub fn new(value: f64, provenance: Provenance) -> Self {
        Self { value, provenance }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KnownBounds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<KnownBound>,
    /// k-producible bounds keyed by k.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub producible: BTreeMap<usize, KnownBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsirelson: Option<KnownBound>,
}

impl KnownBounds {
    pub fn is_empty(&self) -> bool {
        self.local.is_none() && self.producible.is_empty() && self.tsirelson.is_none()
    }
}

/// A linear combination of (full or marginal) correlators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpression")]
pub struct BellExpression {
    name: String,
    n: usize,
    settings_per_party: Vec<usize>,
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "KnownBounds::is_empty")]
    known_bounds: KnownBounds,
}

#[derive(Deserialize)]
struct RawExpression {
    name: String,
    n: usize,
    settings_per_party: Vec<usize>,
    terms: Vec<Term>,
    #[serde(default)]
    known_bounds: KnownBounds,
}

impl TryFrom<RawExpression> for BellExpression {
    type Error = Error;

    fn try_from(raw: RawExpression) -> Result<Self> {
        if raw.settings_per_party.len() != raw.n {
            return Err(Error::InvalidParameter(format!(
                "settings_per_party has {} entries for n = {}",
                raw.settings_per_party.len(),
                raw.n
            )));
        }
        let mut e = BellExpression::new(raw.name, raw.settings_per_party, raw.terms)?;
        e.known_bounds = raw.known_bounds;
        Ok(e)
    }
}

impl BellExpression {
    /// Builds an expression, merging coefficients of repeated setting vectors
    /// (first occurrence keeps its position).
    pub fn new(name: impl Into<String>, settings_per_party: Vec<usize>, terms: Vec<Term>) -> Result<Self> {
        let n = settings_per_party.len();
        if n == 0 {
            return Err(Error::InvalidParameter("expression needs at least one party".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidParameter("expression needs at least one term".into()));
        }
        if settings_per_party.iter().any(|&s| s == 0 || s > u8::MAX as usize) {
            return Err(Error::InvalidParameter("setting counts must be in 1..=255".into()));
        }
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        let mut index: BTreeMap<SettingVector, usize> = BTreeMap::new();
        for t in terms {
            if t.settings.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: t.settings.len(),
                });
            }
            for (party, (&s, &count)) in t.settings.entries().iter().zip(&settings_per_party).enumerate() {
                if s as usize > count {
                    return Err(Error::SettingOutOfRange {
                        party: party + 1,
                        setting: s as usize,
                        count,
                    });
                }
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidParameter("coefficients must be finite".into()));
            }
            match index.get(&t.settings) {
                Some(&i) => merged[i].coeff += t.coeff,
                None => {
                    index.insert(t.settings.clone(), merged.len());
                    merged.push(t);
                }
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            settings_per_party,
            terms: merged,
            known_bounds: KnownBounds::default(),
        })
    }

    /// Parses terms like `+E(1,2,∅) - 0.5 E(2,2,1) + 1`.
    pub fn parse_terms(name: impl Into<String>, settings_per_party: Vec<usize>, text: &str) -> Result<Self> {
        let n = settings_per_party.len();
        let mut terms = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let (sign, after) = match rest.as_bytes()[0] {
                b'+' => (1.0, &rest[1..]),
                b'-' => (-1.0, &rest[1..]),
                _ if terms.is_empty() => (1.0, rest),
                _ => return Err(Error::Parse(format!("expected '+' or '-' at {rest:?}"))),
            };
            let after = after.trim_start();
            let end = after[1..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(after.len());
            let chunk = after[..end].trim();
            rest = after[end..].trim_start();
            let (coeff, settings) = match chunk.find('E') {
                Some(pos) => {
                    let c = chunk[..pos].trim().trim_end_matches('*').trim();
                    let c = if c.is_empty() {
                        1.0
                    } else {
                        c.parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?
                    };
                    let body = &chunk[pos + 1..];
                    let open = body.find('(').ok_or_else(|| Error::Parse(format!("missing '(' in {chunk:?}")))?;
                    (c, body[open..].parse::<SettingVector>()?)
                }
                None => (
                    chunk.parse::<f64>().map_err(|_| Error::Parse(format!("bad term {chunk:?}")))?,
                    SettingVector::trivial(n),
                ),
            };
            terms.push(Term::new(sign * coeff, settings));
        }
        Self::new(name, settings_per_party, terms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn settings_per_party(&self) -> &[usize] {
        &self.settings_per_party
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn known_bounds(&self) -> &KnownBounds {
        &self.known_bounds
    }

    pub fn known_bounds_mut(&mut self) -> &mut KnownBounds {
        &mut self.known_bounds
    }

    /// Sum of absolute coefficients (the algebraic maximum).
    pub fn algebraic_maximum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Quantum value `Σ c_t ⟨ψ| ⊗ A_{x} |ψ⟩`.
    pub fn quantum_value(&self, state: &StateVector, assignment: &ObservableAssignment) -> Result<f64> {
        if state.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: state.n(),
            });
        }
        let mut total = 0.0;
        for t in &self.terms {
            total += t.coeff * correlator(state, assignment, &t.settings)?;
        }
        Ok(total)
    }

    /// Terms sorted by setting vector, for order-independent comparison.
    pub fn canonical_terms(&self) -> Vec<Term> {
        let mut v = self.terms.clone();
        v.sort_by(|a, b| a.settings.cmp(&b.settings));
        v
    }

    /// Whether both expressions have the same term set within `tol`.
    pub fn same_terms(&self, other: &BellExpression, tol: f64) -> bool {
        let a = self.canonical_terms();
        let b = other.canonical_terms();
        self.n == other.n
            && a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.settings == y.settings && (x.coeff - y.coeff).abs() <= tol)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Expansion into the probability form: for each term, coefficients
    /// `c·∏ a_i` over the outcomes of the nontrivial parties.
    pub fn probability_form(&self) -> Vec<ProbabilityCoefficient> {
        let mut out = Vec::new();
        for t in &self.terms {
            let active: Vec<usize> = (0..self.n).filter(|&p| t.settings.get(p).is_some()).collect();
            for mask in 0..(1u64 << active.len()) {
                let mut outcomes = vec![0i8; self.n];
                let mut parity = 1.0;
                for (bit, &p) in active.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        outcomes[p] = -1;
                        parity = -parity;
                    } else {
                        outcomes[p] = 1;
                    }
                }
                out.push(ProbabilityCoefficient {
                    settings: t.settings.clone(),
                    outcomes,
                    beta: t.coeff * parity,
                });
            }
        }
        out
    }
}

/// One `β^x_a` weight; outcome `0` marks a party with the trivial setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityCoefficient {
    pub settings: SettingVector,
    pub outcomes: Vec<i8>,
    pub beta: f64,
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.coeff < 0.0 { "-" } else { "+" };
            if i > 0 || t.coeff < 0.0 {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    f.write_str(" ")?;
                }
            }
            let mag = t.coeff.abs();
            if t.settings.weight() == 0 {
                write!(f, "{mag}")?;
            } else if (mag - 1.0).abs() < 1e-15 {
                write!(f, "E{}", t.settings)?;
            } else {
                write!(f, "{mag}*E{}", t.settings)?;
            }
        }
        Ok(())
    }
}

/// Value of `expr` for the given state and observables.
pub fn bell_value(expr: &BellExpression, state: &StateVector, assignment: &ObservableAssignment) -> Result<f64> {
    expr.quantum_value(state, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh() -> BellExpression {
        BellExpression::parse_terms(
            "CHSH",
            vec![2, 2],
            "0.5 E(1,1) + 0.5 E(1,2) + 0.5 E(2,1) - 0.5 E(2,2)",
        )
        .unwrap()
    }

    #[test]
    fn parse_and_display() {
        let e = chsh();
        assert_eq!(e.terms().len(), 4);
        assert_eq!(e.terms()[3].coeff, -0.5);
        assert_eq!(e.to_string(), "0.5*E(1,1) + 0.5*E(1,2) + 0.5*E(2,1) - 0.5*E(2,2)");
    }

    #[test]
    fn merges_duplicates() {
        let e = BellExpression::parse_terms("m", vec![2, 2], "E(1,1) + E(1,1) - E(2,∅)").unwrap();
        assert_eq!(e.terms().len(), 2);
        assert_eq!(e.terms()[0].coeff, 2.0);
    }

    #[test]
    fn constant_term() {
        let e = BellExpression::parse_terms("c", vec![3, 3], "E(1,2) + 1").unwrap();
        assert_eq!(e.terms()[1].settings, SettingVector::trivial(2));
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(matches!(
            BellExpression::parse_terms("x", vec![2, 2], "E(3,1)"),
            Err(Error::SettingOutOfRange { .. })
        ));
        assert!(BellExpression::new("x", vec![2], vec![]).is_err());
        assert!(BellExpression::parse_terms("x", vec![2, 2], "E(1,1,1)").is_err());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut e = BellExpression::parse_terms(
            "odd",
            vec![2, 3],
            "0.1 E(1,3) - 0.30000000000000004 E(2,∅) + 0.7071067811865476 E(∅,2)",
        )
        .unwrap();
        e.known_bounds_mut().local = Some(KnownBound::new(1.0 / 3.0, Provenance::Enumerated));
        e.known_bounds_mut()
            .producible
            .insert(2, KnownBound::new(std::f64::consts::SQRT_2, Provenance::ReferenceTable));
        let text = e.to_json().unwrap();
        let back = BellExpression::from_json(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_json().unwrap(), text);
        assert!(text.contains("\"settings\": [\n"));
    }

    #[test]
    fn json_rejects_inconsistent_n() {
        let text = r#"{"name":"x","n":3,"settings_per_party":[2,2],"terms":[{"coeff":1.0,"settings":[1,1]}]}"#;
        assert!(BellExpression::from_json(text).is_err());
    }

    #[test]
    fn probability_form_reproduces_correlators() {
        let e = chsh();
        let beta = e.probability_form();
        assert_eq!(beta.len(), 16);
        let sum: f64 = beta.iter().map(|b| b.beta.abs()).sum();
        assert!((sum - 8.0).abs() < 1e-15);
        // CHSH weights: (-1)^{(x1-1)(x2-1)} a1 a2 / 2.
        for b in &beta {
            let x = b.settings.entries();
            let sign = if x == [2, 2] { -1.0 } else { 1.0 };
            let expected = 0.5 * sign * (b.outcomes[0] * b.outcomes[1]) as f64;
            assert_eq!(b.beta, expected);
        }
    }
}

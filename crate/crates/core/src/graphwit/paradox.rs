use serde::{Deserialize, Serialize};

use super::{stabilizer_element, Graph, Pauli, PauliString};
use crate::bellexpr::{BellExpression, SettingVector, Term};
use crate::error::{Error, Result};
use crate::qcore::{correlator, make_graph_state, ObservableAssignment, StateVector, DEFAULT_TOL};

/// Per party, the Pauli letter measured for each setting (`letters[p][s-1]`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingDictionary {
    letters: Vec<Vec<Pauli>>,
}

impl SettingDictionary {
    pub fn new(letters: Vec<Vec<Pauli>>) -> Result<Self> {
        if letters.iter().flatten().any(|&l| l == Pauli::I) {
            return Err(Error::InvalidParameter("identity is the trivial setting, not a label".into()));
        }
        Ok(Self { letters })
    }

    /// X, Y, Z as settings 1, 2, 3 on every party.
    pub fn full(n: usize) -> Self {
        Self {
            letters: vec![vec![Pauli::X, Pauli::Y, Pauli::Z]; n],
        }
    }

    pub fn letters(&self) -> &[Vec<Pauli>] {
        &self.letters
    }

    pub fn settings_per_party(&self) -> Vec<usize> {
        self.letters.iter().map(Vec::len).collect()
    }

    /// Setting label of `letter` at `party`; `Some(0)` for the identity.
    pub fn setting_of(&self, party: usize, letter: Pauli) -> Option<u8> {
        if letter == Pauli::I {
            return Some(SettingVector::TRIVIAL);
        }
        self.letters[party].iter().position(|&l| l == letter).map(|i| i as u8 + 1)
    }

    /// Letters of a setting vector as an unsigned Pauli string.
    pub fn pauli_of(&self, settings: &SettingVector) -> PauliString {
        let letters = (0..settings.len())
            .map(|p| settings.get(p).map_or(Pauli::I, |s| self.letters[p][s - 1]))
            .collect();
        PauliString::new(1, letters)
    }

    pub fn assignment(&self) -> ObservableAssignment {
        ObservableAssignment::new(
            self.letters
                .iter()
                .map(|ls| ls.iter().map(|l| l.operator()).collect())
                .collect(),
        )
        .expect("Pauli observables are valid")
    }

    /// Text form: `1:X/Z 2:Y/Z …`.
    pub fn describe(&self) -> String {
        self.letters
            .iter()
            .enumerate()
            .map(|(p, ls)| {
                let l: Vec<String> = ls.iter().map(|l| l.as_char().to_string()).collect();
                format!("{}:{}", p + 1, l.join("/"))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Maps signed Pauli strings to a two-setting correlator expression. Per
/// party the letters used are ordered X < Y < Z and labelled 1, 2.
pub fn map_to_correlator(name: &str, strings: &[PauliString]) -> Result<(BellExpression, SettingDictionary)> {
    let n = strings
        .first()
        .ok_or_else(|| Error::InvalidParameter("no Pauli strings given".into()))?
        .n();
    let mut used = vec![Vec::<Pauli>::new(); n];
    for s in strings {
        if s.n() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: s.n() });
        }
        for (p, &l) in s.letters().iter().enumerate() {
            if l != Pauli::I && !used[p].contains(&l) {
                used[p].push(l);
            }
        }
    }
    for (p, ls) in used.iter_mut().enumerate() {
        ls.sort();
        if ls.len() > 2 {
            return Err(Error::Precondition(format!(
                "party {} uses {} distinct letters",
                p + 1,
                ls.len()
            )));
        }
        if ls.is_empty() {
            return Err(Error::Precondition(format!("party {} is never measured", p + 1)));
        }
    }
    let dict = SettingDictionary::new(used)?;
    let expr = strings_to_expression(name, strings, &dict)?;
    Ok((expr, dict))
}

fn strings_to_expression(name: &str, strings: &[PauliString], dict: &SettingDictionary) -> Result<BellExpression> {
    let terms = strings
        .iter()
        .map(|s| {
            let settings = s
                .letters()
                .iter()
                .enumerate()
                .map(|(p, &l)| dict.setting_of(p, l).expect("letter is in the dictionary"))
                .collect();
            Ok(Term::new(s.sign()? as f64, SettingVector::new(settings)))
        })
        .collect::<Result<Vec<_>>>()?;
    BellExpression::new(name, dict.settings_per_party(), terms)
}

/// All `2^n` stabilizer elements with X, Y, Z as settings 1, 2, 3; the
/// identity element becomes the constant term.
pub fn three_setting_expression(graph: &Graph) -> Result<(BellExpression, SettingDictionary)> {
    let n = graph.n();
    if n > 10 {
        return Err(Error::InvalidParameter(format!("2^{n} stabilizer terms is too many")));
    }
    let strings = (0..1u64 << n)
        .map(|mask| stabilizer_element(graph, mask))
        .collect::<Result<Vec<_>>>()?;
    let dict = SettingDictionary::full(n);
    let expr = strings_to_expression("full", &strings, &dict)?;
    Ok((expr, dict))
}

/// A set of stabilizers whose perfect correlations, together with one more
/// stabilizer (the product term), form a GHZ paradox.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParadoxSelection {
    pub name: String,
    pub graph: Graph,
    /// Vertex-set bitmasks of the selected stabilizers.
    pub subsets: Vec<u64>,
    /// Vertex-set bitmask of the product term.
    pub product: u64,
}

impl ParadoxSelection {
    /// Validates the selection: the product term must be a product of some
    /// of the selected stabilizers with the signs of that circuit
    /// multiplying to −1, and every party may use at most two letters.
    pub fn new(name: impl Into<String>, graph: Graph, subsets: Vec<u64>, product: u64) -> Result<Self> {
        let sel = Self {
            name: name.into(),
            graph,
            subsets,
            product,
        };
        if sel.subsets.len() < 2 {
            return Err(Error::Precondition("a paradox needs at least two stabilizers".into()));
        }
        if sel.subsets.contains(&0) || sel.product == 0 {
            return Err(Error::Precondition("the identity cannot be part of a paradox".into()));
        }
        let circuit = sel.circuit()?;
        let strings = sel.strings()?;
        let mut sign = strings.last().expect("product term").sign()?;
        for &j in &circuit {
            sign *= strings[j].sign()?;
        }
        if sign != -1 {
            return Err(Error::Precondition(format!(
                "{}: the paradox circuit has sign product {sign}, expected -1",
                sel.name
            )));
        }
        let usage = sel.letter_usage()?;
        if let Some(p) = usage.iter().position(|u| u.len() > 2) {
            return Err(Error::Precondition(format!("{}: party {} uses three letters", sel.name, p + 1)));
        }
        Ok(sel)
    }

    /// From 1-based vertex lists.
    pub fn from_vertices(name: impl Into<String>, graph: Graph, subsets: &[&[usize]], product: &[usize]) -> Result<Self> {
        let masks = subsets.iter().map(|s| super::vertex_mask(s)).collect();
        Self::new(name, graph, masks, super::vertex_mask(product))
    }

    /// Indices of the selected stabilizers whose product is the product term
    /// (smallest such set in lexicographic order of index masks).
    pub fn circuit(&self) -> Result<Vec<usize>> {
        let m = self.subsets.len();
        if m > 24 {
            return Err(Error::InvalidParameter("too many stabilizers in selection".into()));
        }
        (1u32..1 << m)
            .filter(|&pick| {
                (0..m)
                    .filter(|&j| pick >> j & 1 == 1)
                    .fold(0u64, |acc, j| acc ^ self.subsets[j])
                    == self.product
            })
            .min_by_key(|pick| pick.count_ones())
            .map(|pick| (0..m).filter(|&j| pick >> j & 1 == 1).collect())
            .ok_or_else(|| Error::Precondition(format!("{}: product term is not generated by the selection", self.name)))
    }

    /// Selected stabilizers followed by the product term.
    pub fn strings(&self) -> Result<Vec<PauliString>> {
        self.subsets
            .iter()
            .chain(std::iter::once(&self.product))
            .map(|&m| stabilizer_element(&self.graph, m))
            .collect()
    }

    /// Distinct non-identity letters per party over all strings.
    pub fn letter_usage(&self) -> Result<Vec<Vec<Pauli>>> {
        let strings = self.strings()?;
        let mut usage = vec![Vec::new(); self.graph.n()];
        for s in &strings {
            for (p, &l) in s.letters().iter().enumerate() {
                if l != Pauli::I && !usage[p].contains(&l) {
                    usage[p].push(l);
                }
            }
        }
        usage.iter_mut().for_each(|u: &mut Vec<Pauli>| u.sort());
        Ok(usage)
    }

    /// Parties (0-based) measured with a single letter.
    pub fn fixed_setting_parties(&self) -> Result<Vec<usize>> {
        Ok(self
            .letter_usage()?
            .iter()
            .enumerate()
            .filter(|(_, u)| u.len() == 1)
            .map(|(p, _)| p)
            .collect())
    }

    pub fn m(&self) -> usize {
        self.subsets.len()
    }
}

/// The selected stabilizers plus the product term, each with its own sign.
pub fn build_paradox_expression(sel: &ParadoxSelection) -> Result<(BellExpression, SettingDictionary)> {
    map_to_correlator(&sel.name, &sel.strings()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub term_values: Vec<f64>,
    pub total: f64,
    pub algebraic_maximum: f64,
}

/// Evaluates every term on the graph state with the dictionary's Pauli
/// observables; each must reach `|coeff|`.
pub fn verify_paradox(expr: &BellExpression, dict: &SettingDictionary, graph: &Graph) -> Result<ParadoxReport> {
    let state = make_graph_state(graph)?;
    let assignment = dict.assignment();
    let mut term_values = Vec::with_capacity(expr.terms().len());
    for t in expr.terms() {
        let v = t.coeff * correlator(&state, &assignment, &t.settings)?;
        if (v - t.coeff.abs()).abs() > DEFAULT_TOL {
            let mut s = dict.pauli_of(&t.settings);
            if t.coeff < 0.0 {
                s = s.negated();
            }
            return Err(Error::ParadoxCheck(format!(
                "term {s} evaluates to {v} on the graph state, expected {}",
                t.coeff.abs()
            )));
        }
        term_values.push(v);
    }
    let total: f64 = term_values.iter().sum();
    let algebraic_maximum = expr.algebraic_maximum();
    if (total - algebraic_maximum).abs() > DEFAULT_TOL {
        return Err(Error::ParadoxCheck(format!("total {total} differs from {algebraic_maximum}")));
    }
    Ok(ParadoxReport {
        term_values,
        total,
        algebraic_maximum,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiseparableReport {
    /// 1-based party measured with a single letter.
    pub party: usize,
    pub letter: Pauli,
    pub projection_probability: f64,
    pub biseparable_value: f64,
    pub graph_state_value: f64,
}

/// Projects the fixed-setting party of the graph state onto the +1
/// eigenvector of its letter, re-attaches that eigenvector, and evaluates the
/// expression on the resulting biseparable state.
pub fn biseparable_saturation(sel: &ParadoxSelection) -> Result<BiseparableReport> {
    let fixed = sel.fixed_setting_parties()?;
    let &party = fixed.first().ok_or_else(|| {
        Error::Precondition(format!("{}: every party uses two measurement settings", sel.name))
    })?;
    let letter = sel.letter_usage()?[party][0];
    let (expr, dict) = build_paradox_expression(sel)?;
    let graph_state = make_graph_state(&sel.graph)?;
    let assignment = dict.assignment();
    let plus = letter.plus_eigenvector();
    let (dims, rest, prob) = graph_state.project_party(party, &plus)?;
    if prob < 1e-12 {
        return Err(Error::Precondition(format!("projection of party {} has zero probability", party + 1)));
    }
    let rest = StateVector::normalized(dims, rest)?;
    let plus_state = StateVector::normalized(vec![2], nalgebra::DVector::from_row_slice(&plus))?;
    let n = sel.graph.n();
    let joined = StateVector::product(&[rest, plus_state]);
    let order: Vec<usize> = (0..n)
        .map(|j| match j.cmp(&party) {
            std::cmp::Ordering::Less => j,
            std::cmp::Ordering::Equal => n - 1,
            std::cmp::Ordering::Greater => j - 1,
        })
        .collect();
    let rho = joined.permuted(&order)?;
    let biseparable_value = expr.quantum_value(&rho, &assignment)?;
    let graph_state_value = expr.quantum_value(&graph_state, &assignment)?;
    if (biseparable_value - graph_state_value).abs() > 1e-9 {
        return Err(Error::ParadoxCheck(format!(
            "biseparable value {biseparable_value} differs from {graph_state_value}"
        )));
    }
    Ok(BiseparableReport {
        party: party + 1,
        letter,
        projection_probability: prob,
        biseparable_value,
        graph_state_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellexpr::local_bound;
    use crate::graphwit::generator;

    #[test]
    fn ring3_mapping() {
        let g = Graph::ring(3).unwrap();
        let strings: Vec<PauliString> = ["XZZ", "ZXZ", "ZZX", "-XXX"].iter().map(|s| s.parse().unwrap()).collect();
        let (e, dict) = map_to_correlator("RG3", &strings).unwrap();
        assert_eq!(e.to_string(), "E(1,2,2) + E(2,1,2) + E(2,2,1) - E(1,1,1)");
        assert_eq!(dict.describe(), "1:X/Z 2:X/Z 3:X/Z");
        assert_eq!(local_bound(&e).unwrap().value, 2.0);
        assert!((verify_paradox(&e, &dict, &g).unwrap().total - 4.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_and_constant_terms() {
        let strings: Vec<PauliString> = ["IXIX", "ZIZX", "IIII"].iter().map(|s| s.parse().unwrap()).collect();
        // Parties 1 and 3 use only Z, so they have one setting each.
        let (e, _) = map_to_correlator("m", &strings).unwrap();
        assert_eq!(e.terms()[0].settings.entries(), &[0, 1, 0, 1]);
        assert_eq!(e.terms()[2].settings, SettingVector::trivial(4));
    }

    #[test]
    fn mapping_errors() {
        let three: Vec<PauliString> = ["XZ", "YZ", "ZZ"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(matches!(map_to_correlator("x", &three), Err(Error::Precondition(_))));
        let idle: Vec<PauliString> = ["XI", "ZI"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(map_to_correlator("x", &idle).is_err());
    }

    #[test]
    fn selection_sign_is_checked() {
        let g = Graph::ring(3).unwrap();
        assert!(ParadoxSelection::from_vertices("ok", g.clone(), &[&[1], &[2], &[3]], &[1, 2, 3]).is_ok());
        // g1 g2 = YYI has positive sign: no paradox.
        assert!(ParadoxSelection::from_vertices("bad", g.clone(), &[&[1], &[2]], &[1, 2]).is_err());
        assert!(ParadoxSelection::from_vertices("bad", g, &[&[1], &[2]], &[3]).is_err());
    }

    #[test]
    fn biseparable_complete4_without_g4() {
        let g = Graph::complete(4).unwrap();
        let sel = ParadoxSelection::from_vertices("FG4-g4", g.clone(), &[&[1], &[2], &[3]], &[1, 2, 3]).unwrap();
        let strings = sel.strings().unwrap();
        assert_eq!(strings[3].compact(), "-XXXZ");
        assert_eq!(strings[0], generator(&g, 1).unwrap());
        let r = biseparable_saturation(&sel).unwrap();
        assert_eq!((r.party, r.letter), (4, Pauli::Z));
        assert!((r.biseparable_value - 4.0).abs() < 1e-9);
        assert!((r.graph_state_value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn biseparable_needs_fixed_party() {
        let g = Graph::ring(3).unwrap();
        let sel = ParadoxSelection::from_vertices("RG3", g, &[&[1], &[2], &[3]], &[1, 2, 3]).unwrap();
        assert!(matches!(biseparable_saturation(&sel), Err(Error::Precondition(_))));
    }

    #[test]
    fn full_ring3() {
        let g = Graph::ring(3).unwrap();
        let (e, dict) = three_setting_expression(&g).unwrap();
        assert_eq!(e.terms().len(), 8);
        assert_eq!(local_bound(&e).unwrap().value, 6.0);
        assert!((verify_paradox(&e, &dict, &g).unwrap().total - 8.0).abs() < 1e-12);
    }
}

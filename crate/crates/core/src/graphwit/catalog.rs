use std::sync::OnceLock;

use serde::Deserialize;

use super::{build_paradox_expression, three_setting_expression, vertex_mask, Graph, ParadoxSelection, SettingDictionary};
use crate::bellexpr::{BellExpression, SettingVector, Term};
use crate::error::{Error, Result};

/// A named inequality regenerated from its stabilizer selection.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub graph: Graph,
    /// `None` for three-setting expressions built from the full stabilizer set.
    pub selection: Option<ParadoxSelection>,
    pub expression: BellExpression,
    pub dictionary: SettingDictionary,
}

impl CatalogEntry {
    /// Number of perfect correlations `m`; the local bound is `m − 1` and the
    /// graph-state value `m + 1`.
    pub fn m(&self) -> Option<usize> {
        self.selection.as_ref().map(ParadoxSelection::m)
    }

    /// Published term list, when one ships with the crate.
    pub fn printed_form(&self) -> Option<BellExpression> {
        printed_form(&self.name)
    }

    /// Whether the regenerated terms equal the published ones exactly.
    pub fn matches_printed(&self) -> Option<bool> {
        self.printed_form().map(|p| p.same_terms(&self.expression, 0.0))
    }
}

/// Names accepted by [`catalog`] for the two-setting paradox expressions.
pub const PARADOX_NAMES: &[&str] = &[
    "RG3", "RG4", "RG5", "RG6", "FG3", "FG4", "FG5", "FG6", "LG5", "LG5_alt", "LG6", "G3", "G4",
];

/// Names accepted by [`catalog`] for the three-setting expressions.
pub const FULL_NAMES: &[&str] = &["RG3_full", "RG4_full", "RG5_full", "LG5_full"];

/// Looks up a catalog inequality. `RG<n>` and `FG<n>` accept any `n ≥ 3`.
pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let key = name.trim();
    if let Some(base) = key.strip_suffix("_full").or_else(|| key.strip_suffix("_FULL")) {
        let graph = Graph::from_family(base)?;
        let (expr, dict) = three_setting_expression(&graph)?;
        let canonical = format!("{}_full", canonical_name(base));
        return Ok(CatalogEntry {
            name: canonical.clone(),
            graph,
            selection: None,
            expression: expr.with_name(canonical),
            dictionary: dict,
        });
    }
    let sel = selection(key)?;
    let (expression, dictionary) = build_paradox_expression(&sel)?;
    Ok(CatalogEntry {
        name: sel.name.clone(),
        graph: sel.graph.clone(),
        selection: Some(sel),
        expression,
        dictionary,
    })
}

fn canonical_name(base: &str) -> String {
    let upper = base.to_ascii_uppercase();
    match upper.as_str() {
        "LG5_ALT" => "LG5_alt".into(),
        _ => upper,
    }
}

/// Stabilizer selection behind a two-setting catalog entry.
pub fn selection(name: &str) -> Result<ParadoxSelection> {
    let canonical = canonical_name(name.trim());
    let unknown = || Error::UnknownName(name.to_string());
    let v = vertex_mask;
    match canonical.as_str() {
        "LG5" => ParadoxSelection::new(
            "LG5",
            Graph::linear(5)?,
            vec![v(&[3]), v(&[5]), v(&[1, 5]), v(&[1, 3, 4]), v(&[1, 2, 3, 4])],
            v(&[1, 2, 3]),
        ),
        "LG5_alt" => ParadoxSelection::new(
            "LG5_alt",
            Graph::linear(5)?,
            vec![v(&[1]), v(&[3]), v(&[5]), v(&[1, 3, 4]), v(&[2, 3, 5])],
            v(&[2, 3, 4]),
        ),
        "LG6" => ParadoxSelection::new(
            "LG6",
            Graph::linear(6)?,
            vec![v(&[4]), v(&[5]), v(&[6]), v(&[2, 5]), v(&[2, 3, 5]), v(&[1, 2, 4, 6])],
            v(&[1, 2, 3, 5]),
        ),
        "G3" => ParadoxSelection::new(
            "G3",
            Graph::g3(),
            vec![v(&[4]), v(&[1, 5]), v(&[2, 3]), v(&[2, 4]), v(&[2, 5])],
            v(&[1, 2, 3]),
        ),
        "G4" => ParadoxSelection::new(
            "G4",
            Graph::g4(),
            vec![v(&[2]), v(&[4]), v(&[6]), v(&[1, 3]), v(&[3, 5])],
            v(&[1, 2, 4, 5, 6]),
        ),
        other => {
            let (family, num) = other.split_at(2.min(other.len()));
            let n: usize = num.parse().map_err(|_| unknown())?;
            match family {
                "RG" => ring_selection(n),
                "FG" => complete_selection(n),
                _ => Err(unknown()),
            }
        }
    }
}

/// Odd `n`: all generators and their product. Even `n`: `g_n`, every
/// `g_i g_n`, and the product of `g_1 … g_{n-1}`.
fn ring_selection(n: usize) -> Result<ParadoxSelection> {
    let graph = Graph::ring(n)?;
    let all = (1u64 << n) - 1;
    let gn = 1u64 << (n - 1);
    let (subsets, product) = if n % 2 == 1 {
        ((0..n).map(|i| 1u64 << i).collect(), all)
    } else {
        let mut s = vec![gn];
        s.extend((0..n - 1).map(|i| 1u64 << i | gn));
        (s, all & !gn)
    };
    ParadoxSelection::new(format!("RG{n}"), graph, subsets, product)
}

/// All generators plus `g_1 g_2 g_3`.
fn complete_selection(n: usize) -> Result<ParadoxSelection> {
    let graph = Graph::complete(n)?;
    ParadoxSelection::new(format!("FG{n}"), graph, (0..n).map(|i| 1u64 << i).collect(), 0b111)
}

#[derive(Deserialize)]
struct PrintedFile {
    forms: Vec<PrintedForm>,
}

#[derive(Deserialize)]
struct PrintedForm {
    name: String,
    n: usize,
    #[serde(default = "two")]
    settings: usize,
    #[serde(default)]
    terms: Vec<String>,
    #[serde(default)]
    cyclic: Vec<String>,
    #[serde(default)]
    reflected: Vec<String>,
}

fn two() -> usize {
    2
}

fn printed_forms() -> &'static [PrintedForm] {
    static FORMS: OnceLock<Vec<PrintedForm>> = OnceLock::new();
    FORMS.get_or_init(|| {
        let file: PrintedFile =
            serde_json::from_str(include_str!("../../data/printed_forms.json")).expect("bundled fixture parses");
        file.forms
    })
}

/// The published term list of a catalog entry with orbit shorthands
/// expanded.
pub fn printed_form(name: &str) -> Option<BellExpression> {
    let form = printed_forms().iter().find(|f| f.name == name)?;
    let n = form.n;
    let parse = |t: &str| -> Term {
        let e = BellExpression::parse_terms("t", vec![form.settings; n], t).expect("fixture term parses");
        e.terms()[0].clone()
    };
    let mut terms: Vec<Term> = Vec::new();
    let mut push = |t: Term| {
        if !terms.iter().any(|u| u.settings == t.settings) {
            terms.push(t);
        }
    };
    for t in &form.cyclic {
        let base = parse(t);
        for shift in 0..n {
            let e = base.settings.entries();
            let rotated: Vec<u8> = (0..n).map(|j| e[(j + n - shift) % n]).collect();
            push(Term::new(base.coeff, SettingVector::new(rotated)));
        }
    }
    for t in &form.reflected {
        let base = parse(t);
        push(base.clone());
        let mut r = base.settings.entries().to_vec();
        r.reverse();
        push(Term::new(base.coeff, SettingVector::new(r)));
    }
    for t in &form.terms {
        push(parse(t));
    }
    let spp = vec![form.settings; n];
    BellExpression::new(format!("{name} (printed)"), spp, terms).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellexpr::local_bound;

    #[test]
    fn ring_letter_usage() {
        use crate::graphwit::Pauli::*;
        for n in [3, 5] {
            let sel = selection(&format!("RG{n}")).unwrap();
            assert!(sel.letter_usage().unwrap().iter().all(|u| u == &vec![X, Z]));
        }
        for n in [4, 6] {
            let u = selection(&format!("RG{n}")).unwrap().letter_usage().unwrap();
            assert_eq!(u[0], vec![Y, Z]);
            assert_eq!(u[n - 2], vec![Y, Z]);
            assert_eq!(u[n - 1], vec![X, Y]);
            assert!(u[1..n - 2].iter().all(|l| l == &vec![X, Z]));
        }
    }

    #[test]
    fn ring4_matches_printed() {
        let e = catalog("RG4").unwrap();
        assert_eq!(e.matches_printed(), Some(true));
        assert_eq!(local_bound(&e.expression).unwrap().value, 3.0);
        assert_eq!(
            e.expression.to_string(),
            "E(2,∅,2,1) + E(1,2,2,2) + E(∅,1,∅,1) + E(2,2,1,2) - E(1,1,1,∅)"
        );
    }

    #[test]
    fn case_insensitive_and_unknown() {
        assert_eq!(catalog("rg3").unwrap().name, "RG3");
        assert_eq!(catalog("lg5_alt").unwrap().name, "LG5_alt");
        assert_eq!(catalog("rg3_full").unwrap().name, "RG3_full");
        assert!(matches!(catalog("XY9"), Err(Error::UnknownName(_))));
        assert!(catalog("RG2").is_err());
    }

    #[test]
    fn printed_forms_expand() {
        assert_eq!(printed_form("RG5").unwrap().terms().len(), 6);
        assert_eq!(printed_form("RG3_full").unwrap().terms().len(), 8);
        assert_eq!(printed_form("RG4_full").unwrap().terms().len(), 16);
        assert_eq!(printed_form("RG5_full").unwrap().terms().len(), 32);
        assert!(printed_form("nope").is_none());
    }
}

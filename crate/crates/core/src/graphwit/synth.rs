use rayon::prelude::*;
use serde::Serialize;

use super::{build_paradox_expression, stabilizer_element, Graph, ParadoxSelection, SettingDictionary};
use crate::bellexpr::BellExpression;
use crate::error::{Error, Result};

/// Largest graph the subset search accepts.
pub const MAX_SYNTH_VERTICES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthOptions {
    /// Stop after this many inequalities.
    pub max_results: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { max_results: 10_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthesizedInequality {
    pub selection: ParadoxSelection,
    #[serde(skip)]
    pub expression: BellExpression,
    pub dictionary: SettingDictionary,
    /// Some party is measured with a single setting, so a biseparable state
    /// already reaches the graph-state value.
    pub biseparably_saturated: bool,
}

/// Per-element data for the search: letters as `(x, z)` vertex bitmasks.
#[derive(Clone, Copy)]
struct Element {
    mask: u64,
    x: u64,
    z: u64,
    negative: bool,
}

impl Element {
    /// Bitmask over `3n` bits: bit `3p + k` for letter X/Y/Z (`k` = 0/1/2)
    /// at party `p`.
    fn letter_bits(&self, n: usize) -> u64 {
        (0..n).fold(0, |acc, p| {
            let (x, z) = (self.x >> p & 1 == 1, self.z >> p & 1 == 1);
            match (x, z) {
                (true, false) => acc | 1 << (3 * p),
                (true, true) => acc | 1 << (3 * p + 1),
                (false, true) => acc | 1 << (3 * p + 2),
                _ => acc,
            }
        })
    }
}

fn fits(letters: u64, n: usize) -> bool {
    (0..n).all(|p| (letters >> (3 * p) & 0b111).count_ones() <= 2)
}

fn covers(letters: u64, n: usize) -> bool {
    (0..n).all(|p| letters >> (3 * p) & 0b111 != 0)
}

struct Search<'a> {
    n: usize,
    elements: &'a [Element],
    bits: Vec<u64>,
    cap: usize,
}

impl Search<'_> {
    /// Extends the independent set `chosen` with elements after `start`.
    fn dfs(&self, chosen: &mut Vec<usize>, basis: &mut Vec<u64>, xor: u64, letters: u64, negatives: u32, out: &mut Vec<Vec<usize>>) {
        if out.len() >= self.cap {
            return;
        }
        if chosen.len() >= 2 {
            let w = xor as usize;
            let last = *chosen.last().expect("nonempty");
            if w > last {
                let all = letters | self.bits[w];
                let neg = negatives + self.elements[w].negative as u32;
                if fits(all, self.n) && covers(all, self.n) && neg % 2 == 1 {
                    let mut c = chosen.clone();
                    c.push(w);
                    out.push(c);
                }
            }
        }
        if chosen.len() >= self.n {
            return;
        }
        let start = chosen.last().map_or(1, |&l| l + 1);
        for idx in start..self.elements.len() {
            let next = letters | self.bits[idx];
            if !fits(next, self.n) {
                continue;
            }
            let Some(reduced) = reduce(basis, self.elements[idx].mask) else { continue };
            basis.push(reduced);
            chosen.push(idx);
            self.dfs(chosen, basis, xor ^ self.elements[idx].mask, next, negatives + self.elements[idx].negative as u32, out);
            chosen.pop();
            basis.pop();
        }
    }
}

/// Reduces `v` against a basis with distinct leading bits; `None` if `v`
/// lies in its span. The result's leading bit is new to the basis.
fn reduce(basis: &[u64], mut v: u64) -> Option<u64> {
    let mut sorted = basis.to_vec();
    sorted.sort_by_key(|b| std::cmp::Reverse(*b));
    for b in sorted {
        let lead = 63 - b.leading_zeros();
        if v >> lead & 1 == 1 {
            v ^= b;
        }
    }
    (v != 0).then_some(v)
}

/// Every minimal GHZ paradox over the graph's stabilizer group: sets
/// `C ∪ {∏C}` with `C` independent, at most two letters per party, every
/// party measured, and the signs multiplying to −1. Each circuit is reported
/// once with its largest element as the product term.
pub fn synthesize(graph: &Graph, opts: SynthOptions) -> Result<Vec<SynthesizedInequality>> {
    let n = graph.n();
    if n > MAX_SYNTH_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "subset search supports up to {MAX_SYNTH_VERTICES} vertices, got {n}"
        )));
    }
    let elements = (0..1u64 << n)
        .map(|mask| {
            let s = stabilizer_element(graph, mask)?;
            let (mut x, mut z) = (0u64, 0u64);
            for (p, l) in s.letters().iter().enumerate() {
                let (bx, bz) = l.bits();
                x |= (bx as u64) << p;
                z |= (bz as u64) << p;
            }
            Ok(Element {
                mask,
                x,
                z,
                negative: s.sign()? < 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let search = Search {
        n,
        elements: &elements,
        bits: elements.iter().map(|e| e.letter_bits(n)).collect(),
        cap: opts.max_results,
    };
    let per_first: Vec<Vec<Vec<usize>>> = (1..elements.len())
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![first];
            let mut basis = vec![elements[first].mask];
            search.dfs(
                &mut chosen,
                &mut basis,
                elements[first].mask,
                search.bits[first],
                elements[first].negative as u32,
                &mut out,
            );
            out
        })
        .collect();
    let mut results = Vec::new();
    for (k, circuit) in per_first.into_iter().flatten().take(opts.max_results).enumerate() {
        let (product, rest) = circuit.split_last().expect("circuit has a product");
        let sel = ParadoxSelection::new(
            format!("paradox{}-{}", n, k + 1),
            graph.clone(),
            rest.iter().map(|&i| elements[i].mask).collect(),
            elements[*product].mask,
        )?;
        let (expression, dictionary) = build_paradox_expression(&sel)?;
        let biseparably_saturated = !sel.fixed_setting_parties()?.is_empty();
        results.push(SynthesizedInequality {
            selection: sel,
            expression,
            dictionary,
            biseparably_saturated,
        });
    }
    Ok(results)
}

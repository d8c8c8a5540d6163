use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BellExpression;
use crate::error::{Error, Result};

/// Default cap on `∏ 2^{s_i}`.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalBoundOptions {
    pub cap: u128,
    /// Split the search over the first party's sign tables.
    pub parallel: bool,
}

impl Default for LocalBoundOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            parallel: true,
        }
    }
}

/// Deterministic ±1 outcome for every party and setting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    signs: Vec<Vec<i8>>,
}

impl DeterministicStrategy {
    pub fn new(signs: Vec<Vec<i8>>) -> Result<Self> {
        if signs.iter().flatten().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("deterministic outcomes must be ±1".into()));
        }
        Ok(Self { signs })
    }

    /// `signs[party][setting - 1]`.
    pub fn signs(&self) -> &[Vec<i8>] {
        &self.signs
    }

    pub fn evaluate(&self, expr: &BellExpression) -> Result<f64> {
        if self.signs.len() != expr.n()
            || self.signs.iter().zip(expr.settings_per_party()).any(|(s, &c)| s.len() != c)
        {
            return Err(Error::DimensionMismatch {
                expected: expr.n(),
                actual: self.signs.len(),
            });
        }
        Ok(expr
            .terms()
            .iter()
            .map(|t| {
                let sign: i32 = t
                    .settings
                    .entries()
                    .iter()
                    .zip(&self.signs)
                    .filter(|(&x, _)| x != 0)
                    .map(|(&x, s)| s[x as usize - 1] as i32)
                    .product();
                t.coeff * sign as f64
            })
            .sum())
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, party) in self.signs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            for &s in party {
                f.write_str(if s > 0 { "+" } else { "-" })?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBound {
    pub value: f64,
    pub strategy: DeterministicStrategy,
}

/// Exact local bound with default options.
pub fn local_bound(expr: &BellExpression) -> Result<LocalBound> {
    local_bound_with(expr, LocalBoundOptions::default())
}

/// Exact maximum over deterministic strategies. Among maximizers the
/// lexicographically smallest assignment (party-major, setting-minor,
/// `+1 < −1`) is reported.
pub fn local_bound_with(expr: &BellExpression, opts: LocalBoundOptions) -> Result<LocalBound> {
    let spp = expr.settings_per_party();
    let bits: u32 = spp.iter().map(|&s| s as u32).sum();
    let size = if bits >= 128 { u128::MAX } else { 1u128 << bits };
    if size > opts.cap {
        return Err(Error::EnumerationCap { size, cap: opts.cap });
    }
    let search = Search::new(expr);
    let n = expr.n();
    let best = if n == 1 {
        search.run_from(&[], &vec![1; search.terms.len()])
    } else {
        let tables = 0..(1u32 << spp[0]);
        let root = |table: u32| {
            let mut prods = vec![1i8; search.terms.len()];
            search.apply_table(0, table, &mut prods);
            search.run_from(&[table], &prods)
        };
        let results: Vec<Option<Found>> = if opts.parallel {
            tables.into_par_iter().map(root).collect()
        } else {
            tables.map(root).collect()
        };
        results.into_iter().flatten().fold(None, |acc: Option<Found>, f| match acc {
            Some(a) if !search.improves(f.value, a.value) => Some(a),
            _ => Some(f),
        })
    };
    let found = best.ok_or_else(|| Error::Numerical("enumeration found no strategy".into()))?;
    let signs = found
        .tables
        .iter()
        .zip(spp)
        .map(|(&tab, &s)| (0..s).map(|j| table_sign(tab, s, j)).collect())
        .collect();
    Ok(LocalBound {
        value: found.value,
        strategy: DeterministicStrategy { signs },
    })
}

/// Local bound of a GHZ-paradox expression with `m` perfect correlations.
pub fn paradox_local_bound(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("paradox needs m ≥ 2, got {m}")));
    }
    Ok((m - 1) as f64)
}

/// Sign of setting `j` (0-based) in sign table `tab`; setting 1 is the most
/// significant bit so increasing `tab` is lexicographic order.
fn table_sign(tab: u32, s: usize, j: usize) -> i8 {
    if tab >> (s - 1 - j) & 1 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug)]
struct Found {
    value: f64,
    tables: Vec<u32>,
}

struct TermData {
    coeff: f64,
    settings: Vec<u8>,
    /// Last party with a nontrivial setting; `None` for constants.
    last_active: Option<usize>,
}

struct Search {
    spp: Vec<usize>,
    terms: Vec<TermData>,
    /// Ties closer than this are treated as equal.
    tie_tol: f64,
}

impl Search {
    fn new(expr: &BellExpression) -> Self {
        let terms = expr
            .terms()
            .iter()
            .map(|t| TermData {
                coeff: t.coeff,
                settings: t.settings.entries().to_vec(),
                last_active: t.settings.entries().iter().rposition(|&x| x != 0),
            })
            .collect();
        Self {
            spp: expr.settings_per_party().to_vec(),
            terms,
            tie_tol: 1e-12 * (1.0 + expr.algebraic_maximum()),
        }
    }

    fn improves(&self, candidate: f64, incumbent: f64) -> bool {
        candidate > incumbent + self.tie_tol
    }

    fn apply_table(&self, party: usize, table: u32, prods: &mut [i8]) {
        let s = self.spp[party];
        for (t, p) in self.terms.iter().zip(prods.iter_mut()) {
            let x = t.settings[party];
            if x != 0 {
                *p *= table_sign(table, s, x as usize - 1);
            }
        }
    }

    /// Upper bound on the final value given parties `0..depth` fixed. Exact
    /// once only the last party remains.
    fn bound(&self, depth: usize, prods: &[i8], buckets: &mut [f64]) -> f64 {
        let last = self.spp.len() - 1;
        buckets.iter_mut().for_each(|b| *b = 0.0);
        let mut total = 0.0;
        for (t, &p) in self.terms.iter().zip(prods) {
            match t.last_active {
                None => total += t.coeff,
                Some(l) if l < depth => total += t.coeff * p as f64,
                Some(l) if l == last && t.settings[depth..last].iter().all(|&x| x == 0) => {
                    buckets[t.settings[last] as usize - 1] += t.coeff * p as f64;
                }
                Some(_) => total += t.coeff.abs(),
            }
        }
        total + buckets.iter().map(|b| b.abs()).sum::<f64>()
    }

    /// Best completion of the prefix `tables`, or `None` if none strictly
    /// beats nothing (never happens for a full search).
    fn run_from(&self, tables: &[u32], prods: &[i8]) -> Option<Found> {
        let mut best: Option<Found> = None;
        let mut path = tables.to_vec();
        let mut buckets = vec![0.0; self.spp[self.spp.len() - 1]];
        self.dfs(tables.len(), prods, &mut path, &mut best, &mut buckets);
        best
    }

    fn dfs(&self, depth: usize, prods: &[i8], path: &mut Vec<u32>, best: &mut Option<Found>, buckets: &mut [f64]) {
        let last = self.spp.len() - 1;
        let ub = self.bound(depth, prods, buckets);
        if let Some(b) = best {
            if !self.improves(ub, b.value) {
                return;
            }
        }
        if depth == last {
            // `buckets` now holds the last party's per-setting fields.
            let s = self.spp[last];
            let mut table = 0u32;
            for (j, &h) in buckets.iter().enumerate() {
                if h < 0.0 {
                    table |= 1 << (s - 1 - j);
                }
            }
            path.push(table);
            *best = Some(Found {
                value: ub,
                tables: path.clone(),
            });
            path.pop();
            return;
        }
        let mut next = prods.to_vec();
        for table in 0..(1u32 << self.spp[depth]) {
            next.copy_from_slice(prods);
            self.apply_table(depth, table, &mut next);
            path.push(table);
            self.dfs(depth + 1, &next, path, best, buckets);
            path.pop();
        }
    }
}

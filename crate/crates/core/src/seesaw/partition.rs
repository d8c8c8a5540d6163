use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint groups of 0-based parties covering `0..n`; groups are sorted
/// internally and by their first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for g in &mut groups {
            if g.is_empty() {
                return Err(Error::InvalidParameter("partition has an empty group".into()));
            }
            g.sort_unstable();
            for &p in g.iter() {
                if p >= n || std::mem::replace(&mut seen[p], true) {
                    return Err(Error::InvalidParameter(format!("party {p} repeated or out of range")));
                }
            }
        }
        groups.sort_by_key(|g| g[0]);
        Ok(Self { groups })
    }

    /// One group containing every party.
    pub fn whole(n: usize) -> Self {
        Self {
            groups: vec![(0..n).collect()],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            groups: (0..n).map(|p| vec![p]).collect(),
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn n(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn max_group(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Every set partition of `0..n` with groups of size at most `k`, in
    /// restricted-growth order.
    pub fn all(n: usize, k: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        fill(0, n, k.max(1), &mut groups, &mut out);
        out
    }

    /// Partitions with groups of size at most `k` in which no two groups can
    /// be merged without exceeding `k`. Every k-producible product state is a
    /// product over one of these, so optimizing over them suffices.
    pub fn maximal(n: usize, k: usize) -> Vec<Partition> {
        Self::all(n, k)
            .into_iter()
            .filter(|p| {
                let mut sizes: Vec<usize> = p.groups.iter().map(Vec::len).collect();
                sizes.sort_unstable();
                sizes.len() < 2 || sizes[0] + sizes[1] > k
            })
            .collect()
    }
}

fn fill(p: usize, n: usize, k: usize, groups: &mut Vec<Vec<usize>>, out: &mut Vec<Partition>) {
    if p == n {
        out.push(Partition { groups: groups.clone() });
        return;
    }
    for g in 0..groups.len() {
        if groups[g].len() < k {
            groups[g].push(p);
            fill(p + 1, n, k, groups, out);
            groups[g].pop();
        }
    }
    groups.push(vec![p]);
    fill(p + 1, n, k, groups, out);
    groups.pop();
}

impl fmt::Display for Partition {
    /// 1-based, e.g. `{1,2}{3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let items: Vec<String> = g.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|n| Partition::all(n, n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn size_limited() {
        // Partitions of 4 into pairs and singletons: 1 + 6 + 3.
        assert_eq!(Partition::all(4, 2).len(), 10);
        // Maximal ones are the three perfect matchings.
        assert_eq!(Partition::maximal(4, 2).len(), 3);
        assert_eq!(Partition::maximal(3, 2).len(), 3);
        assert_eq!(Partition::maximal(5, 5), vec![Partition::whole(5)]);
    }

    #[test]
    fn validation_and_display() {
        let p = Partition::new(vec![vec![2], vec![1, 0]]).unwrap();
        assert_eq!(p.to_string(), "{1,2}{3}");
        assert!(Partition::new(vec![vec![0, 0]]).is_err());
        assert!(Partition::new(vec![vec![0], vec![]]).is_err());
    }
}

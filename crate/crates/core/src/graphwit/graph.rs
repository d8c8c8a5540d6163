use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<bool>>,
}

impl Graph {
    /// Graph from 1-based edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        let mut adjacency = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::InvalidParameter(format!("edge {i}-{j} outside 1..={n}")));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {i}")));
            }
            adjacency[i - 1][j - 1] = true;
            adjacency[j - 1][i - 1] = true;
        }
        Ok(Self { n, adjacency })
    }

    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
            if row[i] {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", i + 1)));
            }
            if (0..n).any(|j| row[j] != adjacency[j][i]) {
                return Err(Error::InvalidParameter("adjacency matrix is not symmetric".into()));
            }
        }
        Ok(Self { n, adjacency })
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("ring needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn linear(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        Self::new(n, &edges)
    }

    /// The five-vertex graph with edges 1-2, 1-5, 2-3, 2-5, 3-4, 4-5.
    pub fn g3() -> Self {
        Self::new(5, &[(1, 2), (1, 5), (2, 3), (2, 5), (3, 4), (4, 5)]).expect("valid edges")
    }

    /// The six-vertex graph with edges 1-2, 1-3, 2-4, 3-4, 3-5, 4-6, 5-6.
    pub fn g4() -> Self {
        Self::new(6, &[(1, 2), (1, 3), (2, 4), (3, 4), (3, 5), (4, 6), (5, 6)]).expect("valid edges")
    }

    /// Family shorthand: `ring N`, `linear N`, `complete N`, `G3`, `G4`
    /// (also `ring:N`, `RG5`, `LG5`, `FG4`).
    pub fn from_family(spec: &str) -> Result<Self> {
        let s = spec.trim().to_ascii_lowercase();
        let (family, num) = match s.split_once([' ', ':']) {
            Some((f, k)) => (f.trim().to_string(), k.trim().to_string()),
            None => {
                let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
                (s[..split].to_string(), s[split..].to_string())
            }
        };
        let size = || {
            num.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad graph size in {spec:?}")))
        };
        match family.as_str() {
            "ring" | "rg" => Self::ring(size()?),
            "linear" | "lg" | "path" => Self::linear(size()?),
            "complete" | "fg" => Self::complete(size()?),
            "g" if num == "3" => Ok(Self::g3()),
            "g" if num == "4" => Ok(Self::g4()),
            _ => Err(Error::UnknownName(spec.to_string())),
        }
    }

    /// Parses `n; i j; i j; …` or a whitespace-separated 0/1 adjacency matrix
    /// (one row per line).
    pub fn parse(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        if body.contains(';') {
            Self::parse_edge_list(&body)
        } else {
            Self::parse_adjacency(&body)
        }
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut parts = text.split(';').map(str::trim).filter(|p| !p.is_empty());
        let n = parts
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?
            .parse::<usize>()
            .map_err(|_| Error::Parse("edge list must start with the vertex count".into()))?;
        let mut edges = Vec::new();
        for p in parts {
            let v: Vec<usize> = p
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad edge {p:?}"))))
                .collect::<Result<_>>()?;
            match v.as_slice() {
                [i, j] => edges.push((*i, *j)),
                _ => return Err(Error::Parse(format!("edge {p:?} needs two vertices"))),
            }
        }
        Self::new(n, &edges)
    }

    pub fn parse_adjacency(text: &str) -> Result<Self> {
        let rows: Vec<Vec<bool>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| match t {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(Error::Parse(format!("adjacency entry {t:?} is not 0/1"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::from_adjacency(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether 1-based vertices `i` and `j` are adjacent.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i - 1][j - 1]
    }

    /// 1-based neighbours of vertex `i`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i - 1]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(j, _)| j + 1)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (1..=self.n)
            .flat_map(|i| (i + 1..=self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacent(i, j))
            .collect()
    }
}

impl fmt::Display for Graph {
    /// Edge-list form, parseable by [`Graph::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)?;
        for (i, j) in self.edges() {
            write!(f, "; {i} {j}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let r = Graph::ring(4).unwrap();
        assert_eq!(r.edges(), vec![(1, 2), (1, 4), (2, 3), (3, 4)]);
        assert_eq!(Graph::linear(3).unwrap().edges(), vec![(1, 2), (2, 3)]);
        assert_eq!(Graph::complete(4).unwrap().edges().len(), 6);
        assert_eq!(Graph::g3().neighbors(5).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(Graph::ring(2).is_err());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = Graph::g4();
        let back = Graph::parse(&g.to_string()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn adjacency_input() {
        let g = Graph::parse("0 1 1\n1 0 1\n1 1 0\n").unwrap();
        assert_eq!(g, Graph::complete(3).unwrap());
        assert!(Graph::parse("0 1\n0 0\n").is_err());
        assert!(Graph::parse("1 0\n0 0\n").is_err());
    }

    #[test]
    fn family_specs() {
        assert_eq!(Graph::from_family("ring 5").unwrap(), Graph::ring(5).unwrap());
        assert_eq!(Graph::from_family("LG5").unwrap(), Graph::linear(5).unwrap());
        assert_eq!(Graph::from_family("complete:4").unwrap(), Graph::complete(4).unwrap());
        assert_eq!(Graph::from_family("G3").unwrap(), Graph::g3());
        assert!(Graph::from_family("star 4").is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::parse("3; 1 4").is_err());
        assert!(Graph::parse("3; 2 2").is_err());
        assert!(Graph::parse("3; 1").is_err());
    }
}

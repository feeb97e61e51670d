//! ADE Dynkin data and positive root systems.
//!
//! Vertices are numbered `0..rank` internally and `1..=rank` in anything a
//! user sees. The fixed layouts are:
//!
//! * `A_n`: the path `1 - 2 - ... - n`.
//! * `D_n`: the two short legs `1` and `2` and the long leg `3 - 4 - ... - (n-1)`
//!   all attached to the nodal vertex `n`.
//! * `E_n`: Bourbaki layout `1 - 3 - 4 - 5 - ... - n` with `2` attached to `4`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{fmt_q, parse_q, q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSysError {
    #[error("unsupported Dynkin type {family}_{rank}")]
    UnsupportedType { family: Family, rank: usize },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("type {0} has no nodal vertex")]
    NoNodalVertex(String),
    #[error("cannot parse weight {0:?}")]
    BadWeight(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "D" | "d" => Ok(Family::D),
            "E" | "e" => Ok(Family::E),
            other => Err(format!("unknown family {other:?}; expected A, D or E")),
        }
    }
}

/// Dynkin diagram of a simply-laced type together with its bipartite signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    pub family: Family,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub adjacency: Vec<Vec<i64>>,
    /// Edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub epsilon: Vec<i64>,
}

impl CartanDatum {
    pub fn name(&self) -> String {
        format!("{}_{}", self.family, self.rank)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&x| x != 0).count()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.rank).filter(|&j| self.adjacency[i][j] != 0).collect()
    }
}

pub fn build_cartan(family: Family, rank: usize) -> Result<CartanDatum, RootSysError> {
    let edges: Vec<(usize, usize)> = match (family, rank) {
        (Family::A, n) if n >= 1 => (0..n - 1).map(|i| (i, i + 1)).collect(),
        (Family::D, n) if n >= 4 => {
            let nodal = n - 1;
            let mut e = vec![(0, nodal), (1, nodal)];
            e.extend((2..n - 1).map(|i| (i, i + 1)));
            e
        }
        (Family::E, n @ 6..=8) => {
            let mut e = vec![(0, 2), (1, 3), (2, 3)];
            e.extend((3..n - 1).map(|i| (i, i + 1)));
            e
        }
        _ => return Err(RootSysError::UnsupportedType { family, rank }),
    };
    let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();

    let mut adjacency = vec![vec![0i64; rank]; rank];
    for &(a, b) in &edges {
        adjacency[a][b] = 1;
        adjacency[b][a] = 1;
    }
    let cartan = (0..rank)
        .map(|i| (0..rank).map(|j| if i == j { 2 } else { -adjacency[i][j] }).collect())
        .collect();

    let mut epsilon = vec![0i64; rank];
    epsilon[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..rank {
            if adjacency[i][j] != 0 && epsilon[j] == 0 {
                epsilon[j] = -epsilon[i];
                queue.push_back(j);
            }
        }
    }

    Ok(CartanDatum {
        family,
        rank,
        cartan,
        adjacency,
        edges,
        epsilon,
    })
}

/// Positive root written in the basis of simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub coords: Vec<u32>,
    pub height: u32,
}

impl Root {
    fn new(coords: Vec<u32>) -> Self {
        let height = coords.iter().sum();
        Self { coords, height }
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Self::new(c)
    }

    pub fn is_simple(&self) -> bool {
        self.height == 1
    }

    /// Index of the simple root when this root is simple.
    pub fn simple_index(&self) -> Option<usize> {
        if self.height == 1 {
            self.coords.iter().position(|&c| c == 1)
        } else {
            None
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coords.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub datum: CartanDatum,
    /// Sorted by height, then by coordinates.
    pub roots: Vec<Root>,
    index: HashMap<Vec<u32>, usize>,
    /// `by_height[k]` lists indices of roots of height `k` (`by_height[0]` is empty).
    pub by_height: Vec<Vec<usize>>,
    pub coxeter: usize,
    pub theta: usize,
    /// Ascending.
    pub exponents: Vec<usize>,
    pub nodal_vertex: Option<usize>,
    /// Leg lengths around the nodal vertex, ascending.
    pub legs: Option<[usize; 3]>,
}

pub fn build_root_system(datum: &CartanDatum) -> RootSystem {
    let r = datum.rank;
    let mut roots: Vec<Root> = (0..r).map(|i| Root::simple(r, i)).collect();
    let mut index: HashMap<Vec<u32>, usize> = roots.iter().enumerate().map(|(k, a)| (a.coords.clone(), k)).collect();
    let mut frontier: Vec<usize> = (0..r).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &k in &frontier {
            for j in 0..r {
                if pair_with_simple(datum, &roots[k], j) == -1 {
                    let mut c = roots[k].coords.clone();
                    c[j] += 1;
                    if !index.contains_key(&c) {
                        index.insert(c.clone(), roots.len());
                        next.push(roots.len());
                        roots.push(Root::new(c));
                    }
                }
            }
        }
        frontier = next;
    }
    roots.sort_by(|a, b| a.height.cmp(&b.height).then_with(|| a.coords.cmp(&b.coords)));
    let index: HashMap<Vec<u32>, usize> = roots.iter().enumerate().map(|(k, a)| (a.coords.clone(), k)).collect();

    let max_height = roots.last().map_or(0, |a| a.height as usize);
    let mut by_height = vec![Vec::new(); max_height + 1];
    for (k, a) in roots.iter().enumerate() {
        by_height[a.height as usize].push(k);
    }
    let coxeter = max_height + 1;
    let theta = *by_height[max_height].first().expect("nonempty root system");

    // exponent m occurs (#height m) - (#height m+1) times
    let mut exponents = Vec::new();
    for m in 1..=max_height {
        let here = by_height[m].len();
        let above = by_height.get(m + 1).map_or(0, Vec::len);
        exponents.extend(std::iter::repeat_n(m, here - above));
    }

    let nodal_vertex = (0..r).find(|&i| datum.degree(i) == 3);
    let legs = nodal_vertex.map(|c| {
        let mut lens: Vec<usize> = datum
            .neighbors(c)
            .into_iter()
            .map(|start| {
                let (mut prev, mut cur, mut len) = (c, start, 1);
                loop {
                    let nxt: Vec<usize> = datum.neighbors(cur).into_iter().filter(|&x| x != prev).collect();
                    match nxt.as_slice() {
                        [n] => {
                            prev = cur;
                            cur = *n;
                            len += 1;
                        }
                        _ => break len,
                    }
                }
            })
            .collect();
        lens.sort_unstable();
        [lens[0], lens[1], lens[2]]
    });

    RootSystem {
        datum: datum.clone(),
        roots,
        index,
        by_height,
        coxeter,
        theta,
        exponents,
        nodal_vertex,
        legs,
    }
}

/// `(alpha, alpha_j)` under the normalization `(alpha_j, alpha_j) = 2`.
fn pair_with_simple(datum: &CartanDatum, alpha: &Root, j: usize) -> i64 {
    (0..datum.rank).map(|i| alpha.coords[i] as i64 * datum.cartan[i][j]).sum()
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    /// Number of positive roots.
    pub fn num_positive(&self) -> usize {
        self.roots.len()
    }

    pub fn max_height(&self) -> usize {
        self.coxeter - 1
    }

    pub fn index_of(&self, coords: &[u32]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn simple(&self, i: usize) -> usize {
        self.index_of(&Root::simple(self.rank(), i).coords).expect("simple root")
    }

    pub fn pair_with_simple(&self, alpha: usize, j: usize) -> i64 {
        pair_with_simple(&self.datum, &self.roots[alpha], j)
    }

    pub fn pair(&self, a: usize, b: usize) -> i64 {
        let (x, y) = (&self.roots[a].coords, &self.roots[b].coords);
        let mut acc = 0i64;
        for i in 0..self.rank() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.rank() {
                acc += x[i] as i64 * self.datum.cartan[i][j] * y[j] as i64;
            }
        }
        acc
    }

    /// Index of `alpha + alpha_j` when that is a root.
    pub fn add_simple(&self, alpha: usize, j: usize) -> Option<usize> {
        let mut c = self.roots[alpha].coords.clone();
        c[j] += 1;
        self.index_of(&c)
    }

    /// Index of `alpha - alpha_j` when that is a root.
    pub fn sub_simple(&self, alpha: usize, j: usize) -> Option<usize> {
        let c = &self.roots[alpha].coords;
        if c[j] == 0 {
            return None;
        }
        let mut c = c.clone();
        c[j] -= 1;
        self.index_of(&c)
    }

    /// Index of `alpha + beta` when that is a root.
    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        let c: Vec<u32> = self.roots[a].coords.iter().zip(&self.roots[b].coords).map(|(x, y)| x + y).collect();
        self.index_of(&c)
    }

    /// `N_p` = number of roots of height `p + 1`, for `p = 0 ..= h - 2`.
    pub fn height_counts(&self) -> Vec<usize> {
        (1..self.coxeter).map(|k| self.by_height[k].len()).collect()
    }

    /// `N'_p` = number of roots of height `p + 1` involving the nodal simple root.
    pub fn nodal_counts(&self) -> Result<Vec<usize>, RootSysError> {
        let c = self.nodal_vertex.ok_or_else(|| RootSysError::NoNodalVertex(self.datum.name()))?;
        let legs = self.legs.expect("legs accompany a nodal vertex");
        let counts: Vec<usize> = (1..self.coxeter)
            .map(|k| self.by_height[k].iter().filter(|&&a| self.roots[a].coords[c] > 0).count())
            .collect();
        for (p, (&np, &npp)) in self.height_counts().iter().zip(&counts).enumerate() {
            let off: usize = legs.iter().map(|&l| l.saturating_sub(p)).sum();
            assert_eq!(npp + off, np, "N'_p identity failed at p = {p}");
        }
        Ok(counts)
    }

    /// Fails unless `mu` has the rank of this system.
    pub fn check_rank(&self, mu: &Weight) -> Result<(), RootSysError> {
        if mu.rank() != self.rank() {
            return Err(RootSysError::RankMismatch {
                expected: self.rank(),
                got: mu.rank(),
            });
        }
        Ok(())
    }

    /// `(mu, alpha)` for the root with index `alpha`.
    pub fn inner_index(&self, mu: &Weight, alpha: usize) -> Q {
        mu.coords
            .iter()
            .zip(&self.roots[alpha].coords)
            .filter(|(_, &c)| c != 0)
            .fold(Q::zero(), |acc, (m, &c)| acc + m * q(c as i64))
    }
}

/// Root counts by height, with the nodal refinement where it exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootCounts {
    pub n: Vec<usize>,
    pub n_prime: Option<Vec<usize>>,
}

pub fn root_counts(rs: &RootSystem, with_nodal: bool) -> Result<RootCounts, RootSysError> {
    let n_prime = if with_nodal { Some(rs.nodal_counts()?) } else { None };
    Ok(RootCounts {
        n: rs.height_counts(),
        n_prime,
    })
}

/// Weight in the basis of fundamental weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub coords: Vec<Q>,
}

impl Weight {
    pub fn new(coords: Vec<Q>) -> Self {
        Self { coords }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&x| q(x)).collect())
    }

    pub fn rho(rank: usize) -> Self {
        Self::from_ints(&vec![1; rank])
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_rho(&self) -> bool {
        self.coords.iter().all(|c| *c == q(1))
    }

    /// Parses comma-separated rationals, e.g. `"3/2,1,5"`.
    pub fn parse(s: &str) -> Result<Self, RootSysError> {
        let coords: Result<Vec<Q>, _> = s.split(',').map(parse_q).collect();
        coords.map(Self::new).map_err(|_| RootSysError::BadWeight(s.to_string()))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(fmt_q).collect()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(","))
    }
}

/// `(x, alpha) = sum_i x_i alpha_i`, since `(omega_i, alpha_j) = delta_ij`.
pub fn inner(x: &Weight, alpha: &Root) -> Result<Q, RootSysError> {
    if x.rank() != alpha.coords.len() {
        return Err(RootSysError::RankMismatch {
            expected: alpha.coords.len(),
            got: x.rank(),
        });
    }
    Ok(x
        .coords
        .iter()
        .zip(&alpha.coords)
        .fold(Q::zero(), |acc, (m, &c)| acc + m * q(c as i64)))
}

pub fn is_regular(mu: &Weight, rs: &RootSystem) -> Result<bool, RootSysError> {
    rs.check_rank(mu)?;
    Ok((0..rs.num_positive()).all(|a| !rs.inner_index(mu, a).is_zero()))
}

/// Whether every `(mu, alpha)` is positive.
pub fn is_dominant_regular(mu: &Weight, rs: &RootSystem) -> bool {
    (0..rs.num_positive()).all(|a| rs.inner_index(mu, a).is_positive())
}

/// Every supported `(family, rank)` with rank at most `max_rank`.
pub fn supported_types(max_rank: usize) -> Vec<(Family, usize)> {
    let mut out: Vec<(Family, usize)> = (1..=max_rank).map(|n| (Family::A, n)).collect();
    out.extend((4..=max_rank).map(|n| (Family::D, n)));
    out.extend((6..=max_rank.min(8)).map(|n| (Family::E, n)));
    out
}

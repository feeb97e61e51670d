//! The maximal nilpotent subalgebra `n` with a Chevalley basis `F_alpha`,
//! the operators `L = ad(-h_lambda + F) ad(h_mu)^{-1}` and `T_i`, and the
//! polynomial conditions describing the space `W(lambda)`.
//!
//! `F_alpha` has weight `-alpha`, so `ad(h_mu) F_alpha = -(mu, alpha) F_alpha`.
//! Structure constants come from the bimultiplicative asymmetry function with
//! `eps(a_i, a_j) = -1` when `i = j` or `i < j` are adjacent, `+1` otherwise.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactlin::{q, rref, RationalMatrix, SparseVec, Subspace, Q};
use crate::rootsys::{is_regular, RootSystem, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("Jacobi identity fails on roots {0:?}")]
    JacobiFailure(Vec<usize>),
    #[error("structure check failed: {0}")]
    StructureFailure(String),
    #[error("rescaling is inconsistent at root {root}")]
    InconsistentScaling { root: usize },
    #[error("weight {0} is not regular")]
    IrregularWeight(String),
    #[error("weight rank {got} does not match rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("lambda is not generic: {0}")]
    NonGenericLambda(String),
}

/// `eps(alpha, beta)` for root coordinate vectors.
pub fn asymmetry(rs: &RootSystem, a: &[u32], b: &[u32]) -> i64 {
    let adj = &rs.datum.adjacency;
    let mut parity = 0u64;
    for i in 0..a.len() {
        if a[i] == 0 {
            continue;
        }
        for j in i..b.len() {
            if i == j || adj[i][j] != 0 {
                parity += a[i] as u64 * b[j] as u64;
            }
        }
    }
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `n` with basis `F_alpha` indexed like the positive roots.
#[derive(Clone, Debug)]
pub struct NilpotentAlgebra {
    pub rs: RootSystem,
    /// `bracket[a][b] = Some((c, sign))` when `[F_a, F_b] = sign F_c`.
    bracket: Vec<Vec<Option<(usize, i64)>>>,
}

/// Counts from [`NilpotentAlgebra::verify`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub antisymmetric_pairs: usize,
    pub jacobi_nonzero_triples: usize,
    pub jacobi_random_triples: usize,
    pub serre_pairs: usize,
    pub generated: usize,
}

pub fn build_nilpotent(rs: &RootSystem) -> NilpotentAlgebra {
    let n = rs.num_positive();
    let mut bracket = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if let Some(c) = rs.add(a, b) {
                let s = asymmetry(rs, &rs.roots[a].coords, &rs.roots[b].coords);
                bracket[a][b] = Some((c, s));
            }
        }
    }
    NilpotentAlgebra { rs: rs.clone(), bracket }
}

impl NilpotentAlgebra {
    pub fn dim(&self) -> usize {
        self.rs.num_positive()
    }

    pub fn basis_bracket(&self, a: usize, b: usize) -> Option<(usize, i64)> {
        self.bracket[a][b]
    }

    pub fn bracket(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, xa) in x.iter() {
            for (b, yb) in y.iter() {
                if let Some((c, s)) = self.bracket[a][b] {
                    out.axpy(&(xa * yb * q(s)), &SparseVec::unit(c));
                }
            }
        }
        out
    }

    fn jacobi(&self, a: usize, b: usize, c: usize) -> bool {
        let (x, y, z) = (SparseVec::unit(a), SparseVec::unit(b), SparseVec::unit(c));
        let t1 = self.bracket(&x, &self.bracket(&y, &z));
        let t2 = self.bracket(&y, &self.bracket(&z, &x));
        let t3 = self.bracket(&z, &self.bracket(&x, &y));
        t1.add(&t2).add(&t3).is_zero()
    }

    /// Antisymmetry, Jacobi on every triple whose weights sum to a root plus
    /// `random_triples` seeded samples, Serre relations and generation.
    pub fn verify(&self, random_triples: usize, seed: u64) -> Result<StructureReport, LieError> {
        let n = self.dim();
        let rs = &self.rs;
        let mut rep = StructureReport::default();
        for a in 0..n {
            for b in 0..n {
                let ok = match (self.bracket[a][b], self.bracket[b][a]) {
                    (None, None) => true,
                    (Some((c1, s1)), Some((c2, s2))) => c1 == c2 && s1 == -s2,
                    _ => false,
                };
                if !ok {
                    return Err(LieError::StructureFailure(format!("antisymmetry fails on ({a}, {b})")));
                }
                rep.antisymmetric_pairs += 1;
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let sum: Vec<u32> = (0..rs.rank())
                        .map(|i| rs.roots[a].coords[i] + rs.roots[b].coords[i] + rs.roots[c].coords[i])
                        .collect();
                    if rs.index_of(&sum).is_none() {
                        continue;
                    }
                    if !self.jacobi(a, b, c) {
                        return Err(LieError::JacobiFailure(vec![a, b, c]));
                    }
                    rep.jacobi_nonzero_triples += 1;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random_triples {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if !self.jacobi(a, b, c) {
                return Err(LieError::JacobiFailure(vec![a, b, c]));
            }
            rep.jacobi_random_triples += 1;
        }
        let r = rs.rank();
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                let (fi, fj) = (SparseVec::unit(rs.simple(i)), SparseVec::unit(rs.simple(j)));
                let ok = if rs.datum.adjacency[i][j] != 0 {
                    let once = self.bracket(&fi, &fj);
                    !once.is_zero() && self.bracket(&fi, &once).is_zero()
                } else {
                    self.bracket(&fi, &fj).is_zero()
                };
                if !ok {
                    return Err(LieError::StructureFailure(format!("Serre relation fails for ({i}, {j})")));
                }
                rep.serre_pairs += 1;
            }
        }
        // span of iterated brackets of the simple generators, height by height
        let mut span = Subspace::zero(n);
        let mut frontier: Vec<SparseVec> = (0..r).map(|i| SparseVec::unit(rs.simple(i))).collect();
        for v in &frontier {
            span.insert(v.clone());
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in &frontier {
                for i in 0..r {
                    let w = self.bracket(&SparseVec::unit(rs.simple(i)), v);
                    if span.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        if span.dim() != n {
            return Err(LieError::StructureFailure(format!("simple generators span only {} of {n}", span.dim())));
        }
        rep.generated = span.dim();
        Ok(rep)
    }
}

/// Scalars `c_alpha` with `[F_i, c_alpha F_alpha] = eps_i c_{alpha + alpha_i} F_{alpha + alpha_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LusztigScaling {
    pub scalars: Vec<Q>,
    pub checked_decompositions: usize,
}

pub fn lusztig_rescale(na: &NilpotentAlgebra, epsilon: &[i64]) -> Result<LusztigScaling, LieError> {
    let rs = &na.rs;
    let n = na.dim();
    let mut scalars: Vec<Option<Q>> = vec![None; n];
    for i in 0..rs.rank() {
        scalars[rs.simple(i)] = Some(Q::one());
    }
    let mut checked = 0;
    for h in 1..rs.by_height.len() {
        for &alpha in &rs.by_height[h] {
            for i in 0..rs.rank() {
                let Some(beta) = rs.add_simple(alpha, i) else { continue };
                let (_, s) = na.bracket[rs.simple(i)][alpha].expect("sum is a root");
                let c = scalars[alpha].clone().expect("lower height already scaled") * q(s * epsilon[i]);
                match &scalars[beta] {
                    None => scalars[beta] = Some(c),
                    Some(prev) if *prev == c => checked += 1,
                    Some(_) => return Err(LieError::InconsistentScaling { root: beta }),
                }
            }
        }
    }
    Ok(LusztigScaling {
        scalars: scalars.into_iter().map(|c| c.expect("every root reached")).collect(),
        checked_decompositions: checked,
    })
}

fn check_mu(rs: &RootSystem, mu: &Weight) -> Result<(), LieError> {
    if mu.rank() != rs.rank() {
        return Err(LieError::RankMismatch {
            expected: rs.rank(),
            got: mu.rank(),
        });
    }
    if !is_regular(mu, rs).expect("rank checked") {
        return Err(LieError::IrregularWeight(mu.to_string()));
    }
    Ok(())
}

/// Matrix of `ad(-h_lambda + F) ad(h_mu)^{-1}` (or `ad(F) ad(h_mu)^{-1}`
/// without lambda) acting on coordinates, in the basis `F_alpha` or the
/// rescaled basis `c_alpha F_alpha`.
pub fn l_operator(
    na: &NilpotentAlgebra,
    scaling: Option<&LusztigScaling>,
    mu: &Weight,
    lambda: Option<&Weight>,
) -> Result<RationalMatrix, LieError> {
    let rs = &na.rs;
    check_mu(rs, mu)?;
    if let Some(l) = lambda {
        if l.rank() != rs.rank() {
            return Err(LieError::RankMismatch {
                expected: rs.rank(),
                got: l.rank(),
            });
        }
    }
    let n = na.dim();
    let eps = &rs.datum.epsilon;
    let c = |a: usize| scaling.map_or(Q::one(), |s| s.scalars[a].clone());
    let mut cols = Vec::with_capacity(n);
    for a in 0..n {
        // basis vector b_a = c_a F_a
        let inv = -rs.inner_index(mu, a).recip();
        let mut col = SparseVec::new();
        if let Some(l) = lambda {
            col.axpy(&(rs.inner_index(l, a) * &inv), &SparseVec::unit(a));
        }
        for i in 0..rs.rank() {
            if let Some((b, s)) = na.bracket[rs.simple(i)][a] {
                // [F_i, c_a F_a] = s c_a F_b = (s c_a / c_b) b_b
                let coef = q(eps[i] * s) * c(a) / c(b) * &inv;
                col.axpy(&coef, &SparseVec::unit(b));
            }
        }
        cols.push(col);
    }
    Ok(RationalMatrix::from_columns(n, &cols))
}

/// Functions on roots of each height and the maps `T_i: V_i -> V_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSpaces {
    /// `heights[k]` lists the roots of height `k + 1`; height 1 is in vertex order.
    pub heights: Vec<Vec<usize>>,
    /// `t[k]` is `T_{k+1}`.
    pub t: Vec<RationalMatrix>,
}

impl HeightSpaces {
    /// `T_s ... T_1` as a matrix from `V_1`.
    pub fn chain(&self, s: usize) -> RationalMatrix {
        let mut m = RationalMatrix::identity(self.heights[0].len());
        for k in 0..s.min(self.t.len()) {
            m = self.t[k].mul(&m).expect("composable");
        }
        if s > self.t.len() {
            return RationalMatrix::zeros(0, self.heights[0].len());
        }
        m
    }
}

/// `(T_i f)(gamma) = sum_j f(gamma - alpha_j) / (mu, gamma - alpha_j)`.
pub fn t_matrices(rs: &RootSystem, mu: &Weight) -> Result<HeightSpaces, LieError> {
    check_mu(rs, mu)?;
    let h = rs.coxeter;
    let mut heights: Vec<Vec<usize>> = vec![(0..rs.rank()).map(|i| rs.simple(i)).collect()];
    for k in 2..h {
        heights.push(rs.by_height[k].clone());
    }
    let mut t = Vec::with_capacity(h - 2);
    for k in 0..h - 2 {
        let pos: HashMap<usize, usize> = heights[k].iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut m = RationalMatrix::zeros(heights[k + 1].len(), heights[k].len());
        for (row, &gamma) in heights[k + 1].iter().enumerate() {
            for j in 0..rs.rank() {
                if let Some(beta) = rs.sub_simple(gamma, j) {
                    let col = pos[&beta];
                    let v = m.get(row, col) + rs.inner_index(mu, beta).recip();
                    m.set(row, col, v);
                }
            }
        }
        t.push(m);
    }
    Ok(HeightSpaces { heights, t })
}

/// Whether `T_s ... T_1 phi = 0`.
pub fn membership(rs: &RootSystem, mu: &Weight, phi: &[Q], s: usize) -> Result<bool, LieError> {
    if phi.len() != rs.rank() {
        return Err(LieError::RankMismatch {
            expected: rs.rank(),
            got: phi.len(),
        });
    }
    let hs = t_matrices(rs, mu)?;
    if s > hs.t.len() {
        return Ok(true);
    }
    Ok(hs.chain(s).apply(&SparseVec::from_dense(phi)).is_zero())
}

/// `{phi : T_s ... T_1 phi = 0}`.
pub fn t_kernel(hs: &HeightSpaces, s: usize) -> Subspace {
    let r = hs.heights[0].len();
    if s > hs.t.len() {
        return Subspace::full(r);
    }
    Subspace::span(r, rref(&hs.chain(s)).nullspace)
}

/// `{phi : L^s (sum_i phi_i F_i)` vanishes at height `s + 1`}, computed from
/// the full operator matrix.
pub fn l_kernel(rs: &RootSystem, l: &RationalMatrix, s: usize) -> Subspace {
    let r = rs.rank();
    let simple: Vec<usize> = (0..r).map(|i| rs.simple(i)).collect();
    let target: Vec<usize> = if s + 1 < rs.by_height.len() { rs.by_height[s + 1].clone() } else { Vec::new() };
    let ls = l.pow(s);
    let cols: Vec<SparseVec> = simple
        .iter()
        .map(|&a| {
            let v = ls.apply(&SparseVec::unit(a));
            SparseVec::from_pairs(target.iter().enumerate().map(|(k, &g)| (k, v.get(g))))
        })
        .collect();
    let m = RationalMatrix::from_columns(target.len(), &cols);
    Subspace::span(r, rref(&m).nullspace)
}

/// Sum of `prod_{k < h-1} 1/(mu, beta_k)` over chains `alpha_i = beta_1 <
/// ... < beta_{h-1} = theta` adding one simple root at a time.
pub fn path_trace(rs: &RootSystem, mu: &Weight, i: usize) -> Result<Q, LieError> {
    check_mu(rs, mu)?;
    let mut w: Vec<Q> = vec![Q::zero(); rs.num_positive()];
    w[rs.simple(i)] = Q::one();
    for h in 1..rs.coxeter - 1 {
        for &a in &rs.by_height[h] {
            if w[a].is_zero() {
                continue;
            }
            let step = &w[a] * rs.inner_index(mu, a).recip();
            for j in 0..rs.rank() {
                if let Some(b) = rs.add_simple(a, j) {
                    w[b] += &step;
                }
            }
        }
    }
    Ok(w[rs.theta].clone())
}

/// Number `n_i` of chains from `alpha_i` to the highest root.
pub fn count_paths(rs: &RootSystem, i: usize) -> u128 {
    let mut w = vec![0u128; rs.num_positive()];
    w[rs.simple(i)] = 1;
    for h in 1..rs.coxeter - 1 {
        for &a in &rs.by_height[h] {
            for j in 0..rs.rank() {
                if let Some(b) = rs.add_simple(a, j) {
                    w[b] += w[a];
                }
            }
        }
    }
    w[rs.theta]
}

/// `-(lambda, alpha) / (mu, alpha)` for every positive root.
pub fn eigen_ratios(rs: &RootSystem, mu: &Weight, lambda: &Weight) -> Vec<Q> {
    (0..rs.num_positive())
        .map(|a| -rs.inner_index(lambda, a) / rs.inner_index(mu, a))
        .collect()
}

pub fn check_generic(rs: &RootSystem, mu: &Weight, lambda: &Weight) -> Result<(), LieError> {
    check_mu(rs, mu)?;
    if lambda.rank() != rs.rank() {
        return Err(LieError::RankMismatch {
            expected: rs.rank(),
            got: lambda.rank(),
        });
    }
    let mut vals = eigen_ratios(rs, mu, lambda);
    vals.sort();
    if vals.windows(2).any(|w| w[0] == w[1]) {
        return Err(LieError::NonGenericLambda(format!("repeated ratio for lambda = {lambda}")));
    }
    Ok(())
}

/// A tuple of `r` polynomials, `coeffs[i][k]` multiplying `z^k`.
pub type PolyTuple = Vec<Vec<Q>>;

fn coefficient_index(h: usize, i: usize, k: usize) -> usize {
    i * (h - 1) + k
}

/// Matrix of the conditions `sum_i f_i(x_alpha) eps_i (alpha, omega_i) = 0`
/// on the `(h-1) r` coefficients.
pub fn w_lambda_conditions(rs: &RootSystem, mu: &Weight, lambda: &Weight) -> Result<RationalMatrix, LieError> {
    check_generic(rs, mu, lambda)?;
    let h = rs.coxeter;
    let r = rs.rank();
    let eps = &rs.datum.epsilon;
    let ratios = eigen_ratios(rs, mu, lambda);
    let rows = (0..rs.num_positive())
        .map(|a| {
            let mut pairs = Vec::new();
            for i in 0..r {
                let coef = rs.roots[a].coords[i];
                if coef == 0 {
                    continue;
                }
                let mut pw = q(eps[i] * coef as i64);
                for k in 0..h - 1 {
                    pairs.push((coefficient_index(h, i, k), pw.clone()));
                    pw *= &ratios[a];
                }
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    Ok(RationalMatrix::from_rows((h - 1) * r, rows))
}

/// Matrix of `f -> sum_i f_i(L) F_i` on the `(h-1) r` coefficients.
pub fn w_lambda_operator_conditions(
    na: &NilpotentAlgebra,
    mu: &Weight,
    lambda: &Weight,
) -> Result<RationalMatrix, LieError> {
    let rs = &na.rs;
    check_generic(rs, mu, lambda)?;
    let h = rs.coxeter;
    let l = l_operator(na, None, mu, Some(lambda))?;
    let mut cols = vec![SparseVec::new(); (h - 1) * rs.rank()];
    for i in 0..rs.rank() {
        let mut v = SparseVec::unit(rs.simple(i));
        for k in 0..h - 1 {
            cols[coefficient_index(h, i, k)] = v.clone();
            v = l.apply(&v);
        }
    }
    Ok(RationalMatrix::from_columns(na.dim(), &cols))
}

fn flatten(rs: &RootSystem, f: &PolyTuple) -> Result<SparseVec, LieError> {
    let h = rs.coxeter;
    if f.len() != rs.rank() || f.iter().any(|p| p.len() > h - 1) {
        return Err(LieError::RankMismatch {
            expected: rs.rank(),
            got: f.len(),
        });
    }
    Ok(SparseVec::from_pairs(
        f.iter()
            .enumerate()
            .flat_map(|(i, p)| p.iter().enumerate().map(move |(k, c)| (coefficient_index(h, i, k), c.clone()))),
    ))
}

pub fn w_lambda_eval(rs: &RootSystem, mu: &Weight, lambda: &Weight, f: &PolyTuple) -> Result<bool, LieError> {
    let m = w_lambda_conditions(rs, mu, lambda)?;
    Ok(m.apply(&flatten(rs, f)?).is_zero())
}

pub fn w_lambda_operator_eval(
    na: &NilpotentAlgebra,
    mu: &Weight,
    lambda: &Weight,
    f: &PolyTuple,
) -> Result<bool, LieError> {
    let m = w_lambda_operator_conditions(na, mu, lambda)?;
    Ok(m.apply(&flatten(&na.rs, f)?).is_zero())
}

/// Solution space of a condition matrix inside the coefficient space.
pub fn solution_space(m: &RationalMatrix) -> Subspace {
    Subspace::span(m.ncols(), rref(m).nullspace)
}

/// The tuple `f_i(z) = eps_i (mu_i z + lambda_i)`.
pub fn trivial_tuple(rs: &RootSystem, mu: &Weight, lambda: &Weight) -> PolyTuple {
    (0..rs.rank())
        .map(|i| {
            let e = q(rs.datum.epsilon[i]);
            vec![&e * &lambda.coords[i], &e * &mu.coords[i]]
        })
        .collect()
}

fn random_weight(rank: usize, rng: &mut ChaCha8Rng) -> Weight {
    Weight::from_ints(&(0..rank).map(|_| rng.gen_range(1..=100)).collect::<Vec<i64>>())
}

/// Seeded regular weight with integer coordinates in `[1, 100]`; returns the
/// weight and the number of draws.
pub fn sample_regular_weight(rs: &RootSystem, seed: u64) -> (Weight, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1.. {
        let w = random_weight(rs.rank(), &mut rng);
        if is_regular(&w, rs).expect("rank matches") {
            return (w, attempt);
        }
    }
    unreachable!()
}

/// Seeded lambda making all ratios `-(lambda, alpha)/(mu, alpha)` distinct.
pub fn sample_generic_lambda(rs: &RootSystem, mu: &Weight, seed: u64) -> (Weight, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1.. {
        let w = random_weight(rs.rank(), &mut rng);
        if check_generic(rs, mu, &w).is_ok() {
            return (w, attempt);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q_frac;
    use crate::rootsys::{build_cartan, build_root_system, Family};

    fn rs(f: Family, n: usize) -> RootSystem {
        build_root_system(&build_cartan(f, n).unwrap())
    }

    #[test]
    fn a2_brackets() {
        let rs = rs(Family::A, 2);
        let na = build_nilpotent(&rs);
        let (f1, f2) = (rs.simple(0), rs.simple(1));
        let (c, s) = na.basis_bracket(f1, f2).unwrap();
        assert_eq!(c, rs.theta);
        assert_eq!(s.abs(), 1);
        assert!(na.basis_bracket(f1, rs.theta).is_none());
        na.verify(100, 1).unwrap();
    }

    #[test]
    fn structure_all_small_types() {
        for (f, n) in [(Family::A, 3), (Family::A, 5), (Family::D, 4), (Family::D, 6), (Family::E, 6)] {
            let rs = rs(f, n);
            let na = build_nilpotent(&rs);
            let rep = na.verify(1000, 7).unwrap();
            assert_eq!(rep.generated, rs.num_positive());
            lusztig_rescale(&na, &rs.datum.epsilon).unwrap();
        }
        let rs = rs(Family::A, 3);
        let na = build_nilpotent(&rs);
        assert!(na.basis_bracket(rs.simple(0), rs.simple(2)).is_none());
    }

    #[test]
    fn lusztig_d4_checks_two_decompositions() {
        let rs = rs(Family::D, 4);
        let na = build_nilpotent(&rs);
        let sc = lusztig_rescale(&na, &rs.datum.epsilon).unwrap();
        for i in 0..4 {
            assert_eq!(sc.scalars[rs.simple(i)], Q::one());
        }
        assert!(sc.checked_decompositions > 0);
    }

    #[test]
    fn a2_l_operator_lusztig() {
        let rs = rs(Family::A, 2);
        let na = build_nilpotent(&rs);
        let sc = lusztig_rescale(&na, &rs.datum.epsilon).unwrap();
        let l = l_operator(&na, Some(&sc), &Weight::rho(2), None).unwrap();
        for i in 0..2 {
            assert_eq!(l.apply(&SparseVec::unit(rs.simple(i))), SparseVec::unit(rs.theta).scaled(&q(-1)));
        }
        assert!(l.apply(&SparseVec::unit(rs.theta)).is_zero());
    }

    #[test]
    fn l_kills_weighted_principal() {
        for (f, n) in [(Family::A, 4), (Family::D, 5)] {
            let rs = rs(f, n);
            let na = build_nilpotent(&rs);
            let (mu, _) = sample_regular_weight(&rs, 3);
            let l = l_operator(&na, None, &mu, None).unwrap();
            let v = SparseVec::from_pairs((0..n).map(|i| (rs.simple(i), q(rs.datum.epsilon[i]) * &mu.coords[i])));
            assert!(l.apply(&v).is_zero());
        }
    }

    #[test]
    fn t_matrices_small() {
        let a2 = rs(Family::A, 2);
        let hs = t_matrices(&a2, &Weight::rho(2)).unwrap();
        assert_eq!(hs.t[0], RationalMatrix::from_i64(&[vec![1, 1]]));
        let a3 = rs(Family::A, 3);
        let hs = t_matrices(&a3, &Weight::rho(3)).unwrap();
        assert_eq!(hs.t[1].to_dense(), vec![vec![q_frac(1, 2), q_frac(1, 2)]]);
    }

    #[test]
    fn height_blocks_are_minus_t() {
        for (f, n) in [(Family::A, 4), (Family::D, 4), (Family::E, 6)] {
            let rs = rs(f, n);
            let na = build_nilpotent(&rs);
            let sc = lusztig_rescale(&na, &rs.datum.epsilon).unwrap();
            let (mu, _) = sample_regular_weight(&rs, 11);
            let l = l_operator(&na, Some(&sc), &mu, None).unwrap();
            let hs = t_matrices(&rs, &mu).unwrap();
            for (k, t) in hs.t.iter().enumerate() {
                for (row, &g) in hs.heights[k + 1].iter().enumerate() {
                    for (col, &b) in hs.heights[k].iter().enumerate() {
                        assert_eq!(l.get(g, b), -t.get(row, col));
                    }
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let a3 = rs(Family::A, 3);
        let rho = Weight::rho(3);
        assert!(!membership(&a3, &rho, &[q(1), q(0), q(0)], 2).unwrap());
        assert!(membership(&a3, &rho, &[q(1), q(-1), q(1)], 1).unwrap());
        assert!(membership(&a3, &rho, &[q(1), q(5), q(2)], 3).unwrap());
        assert!(!membership(&a3, &rho, &[q(1), q(0), q(0)], 0).unwrap());
        let mu = Weight::from_ints(&[4, 9, 2]);
        let phi: Vec<Q> = (0..3).map(|i| q(a3.datum.epsilon[i]) * &mu.coords[i]).collect();
        assert!(membership(&a3, &mu, &phi, 1).unwrap());
    }

    #[test]
    fn surjectivity_chain() {
        for (f, n) in [(Family::A, 6), (Family::D, 5), (Family::E, 7)] {
            let rs = rs(f, n);
            let hs = t_matrices(&rs, &Weight::rho(n)).unwrap();
            let counts = rs.height_counts();
            for s in 0..rs.coxeter - 1 {
                assert_eq!(hs.chain(s).rank(), counts[s], "{f:?}{n} s={s}");
            }
        }
    }

    #[test]
    fn paths() {
        let a3 = rs(Family::A, 3);
        let n: Vec<u128> = (0..3).map(|i| count_paths(&a3, i)).collect();
        assert_eq!(n, vec![1, 2, 1]);
        let a2 = rs(Family::A, 2);
        let mu = Weight::from_ints(&[3, 7]);
        assert_eq!(path_trace(&a2, &mu, 0).unwrap(), q_frac(1, 3));
        assert_eq!(path_trace(&a2, &mu, 1).unwrap(), q_frac(1, 7));
        let d4 = rs(Family::D, 4);
        for i in 0..4 {
            let pt = path_trace(&d4, &Weight::rho(4), i).unwrap();
            assert_eq!(pt, Q::from_integer((count_paths(&d4, i) as i64).into()) / q(24));
        }
    }

    /// Explicit depth-first enumeration of chains.
    fn enumerate_paths(rs: &RootSystem, mu: &Weight, a: usize, acc: Q, out: &mut (u128, Q)) {
        if a == rs.theta {
            out.0 += 1;
            out.1 += acc;
            return;
        }
        let w = &acc * rs.inner_index(mu, a).recip();
        for j in 0..rs.rank() {
            if let Some(b) = rs.add_simple(a, j) {
                enumerate_paths(rs, mu, b, w.clone(), out);
            }
        }
    }

    #[test]
    fn path_dp_matches_enumeration() {
        for (f, n) in [(Family::A, 4), (Family::D, 5), (Family::E, 6)] {
            let rs = rs(f, n);
            let (mu, _) = sample_regular_weight(&rs, 5);
            for i in 0..n {
                let mut out = (0u128, Q::zero());
                enumerate_paths(&rs, &mu, rs.simple(i), Q::one(), &mut out);
                assert_eq!(out.0, count_paths(&rs, i));
                assert_eq!(out.1, path_trace(&rs, &mu, i).unwrap());
                assert!(out.0 >= 1);
            }
        }
    }

    #[test]
    fn w_lambda_small() {
        let a2 = rs(Family::A, 2);
        let na = build_nilpotent(&a2);
        let mu = Weight::rho(2);
        let (lambda, _) = sample_generic_lambda(&a2, &mu, 9);
        let triv = trivial_tuple(&a2, &mu, &lambda);
        assert!(w_lambda_eval(&a2, &mu, &lambda, &triv).unwrap());
        assert!(w_lambda_operator_eval(&na, &mu, &lambda, &triv).unwrap());
        let zero: PolyTuple = vec![vec![], vec![]];
        assert!(w_lambda_eval(&a2, &mu, &lambda, &zero).unwrap());
        assert!(w_lambda_operator_eval(&na, &mu, &lambda, &zero).unwrap());
        let consts: PolyTuple = vec![vec![q(1)], vec![]];
        assert!(!w_lambda_eval(&a2, &mu, &lambda, &consts).unwrap());
        assert!(matches!(
            w_lambda_eval(&a2, &mu, &Weight::from_ints(&[1, 1]), &zero),
            Err(LieError::NonGenericLambda(_))
        ));
    }

    #[test]
    fn w_lambda_solution_spaces_agree() {
        for (f, n) in [(Family::A, 2), (Family::A, 3), (Family::D, 4)] {
            let rs = rs(f, n);
            let na = build_nilpotent(&rs);
            let (mu, _) = sample_regular_weight(&rs, 2);
            for seed in 0..3 {
                let (lambda, _) = sample_generic_lambda(&rs, &mu, seed);
                let s1 = solution_space(&w_lambda_conditions(&rs, &mu, &lambda).unwrap());
                let s2 = solution_space(&w_lambda_operator_conditions(&na, &mu, &lambda).unwrap());
                assert_eq!(s1.dim(), (rs.coxeter - 1) * n - rs.num_positive());
                assert_eq!(s1, s2);
            }
        }
    }

    #[test]
    fn eigenvalues_are_ratios() {
        let rs = rs(Family::A, 3);
        let na = build_nilpotent(&rs);
        let mu = Weight::from_ints(&[2, 3, 5]);
        let (lambda, _) = sample_generic_lambda(&rs, &mu, 4);
        let l = l_operator(&na, None, &mu, Some(&lambda)).unwrap();
        // triangular in the height order, so the diagonal is the spectrum
        let ratios = eigen_ratios(&rs, &mu, &lambda);
        for a in 0..rs.num_positive() {
            assert_eq!(l.get(a, a), ratios[a]);
            for b in 0..rs.num_positive() {
                if rs.roots[b].height <= rs.roots[a].height && a != b {
                    assert!(l.get(b, a).is_zero());
                }
            }
        }
    }
}

//! Trace functional, trace pairing, center and commutator quotient of a built
//! graded quotient, plus the three-term complex
//! `0 -> D_0 -> D_1 -> D_2 -> 0` that computes outer derivations.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactlin::{fmt_q, nilpotent_block_sizes, solve, RationalMatrix, SparseVec, Subspace, Q};
use crate::gradealg::{Element, GradeAlgError, GradedQuotient, Monomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace functional is not unique: annihilator has dimension {dim}")]
    NonUniqueTrace { dim: usize },
    #[error("the build does not reach past the top degree")]
    MissingTopDegree,
    #[error("degenerate pairing in degree {degree}: {reason}")]
    DegeneratePairing { degree: usize, reason: String },
    #[error("d1 . d0 is nonzero in degree {degree}")]
    ComplexNotChain { degree: usize },
    #[error("not a derivation: {0}")]
    NotADerivation(String),
    #[error("no inner derivation witness found")]
    NoSolution,
    #[error("presentation is not of preprojective shape: {0}")]
    NotPreprojective(String),
    #[error(transparent)]
    Algebra(#[from] GradeAlgError),
}

/// Highest nonzero degree, known once the build shows the vanishing range.
pub fn socle_degree(gq: &GradedQuotient) -> Result<usize, TraceError> {
    match gq.vanishes_from() {
        Some(v) if v > 0 => Ok(v - 1),
        _ => Err(TraceError::MissingTopDegree),
    }
}

/// Commutator subspaces and centers of every degree up to the socle.
#[derive(Clone, Debug)]
pub struct AlgebraSpaces {
    pub top: usize,
    pub commutators: Vec<Subspace>,
    pub centers: Vec<Subspace>,
}

impl AlgebraSpaces {
    pub fn compute(gq: &GradedQuotient) -> Result<Self, TraceError> {
        let top = socle_degree(gq)?;
        let mut commutators = Vec::with_capacity(top + 1);
        let mut centers = Vec::with_capacity(top + 1);
        for d in 0..=top {
            commutators.push(gq.commutator_subspace(d)?);
            centers.push(gq.center_subspace(d)?);
        }
        Ok(Self {
            top,
            commutators,
            centers,
        })
    }

    /// `dim (A/[A,A])[d]`.
    pub fn quotient_dim(&self, d: usize) -> usize {
        self.commutators[d].ambient() - self.commutators[d].dim()
    }
}

/// Values `Tr(z^k e_i)` at the socle together with the functional itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceVector {
    pub values: Vec<Q>,
    /// Functional on the top slice in canonical coordinates.
    pub functional: Vec<Q>,
    pub top_degree: usize,
    pub normalization: String,
}

impl TraceVector {
    pub fn eval(&self, x: &Element) -> Q {
        if x.degree == self.top_degree {
            x.coords.dot_dense(&self.functional)
        } else {
            Q::zero()
        }
    }
}

/// The trace: the annihilator of `[A,A]` in the dual of the top slice.
///
/// With `peg`, the first vertex where both the trace and the peg are nonzero
/// is scaled to the peg value; otherwise the first nonzero value is set to 1.
pub fn trace_functional(
    gq: &GradedQuotient,
    spaces: &AlgebraSpaces,
    peg: Option<&[Q]>,
) -> Result<TraceVector, TraceError> {
    let top = spaces.top;
    let ann = spaces.commutators[top].annihilator();
    if ann.dim() != 1 || !top.is_multiple_of(2) {
        return Err(TraceError::NonUniqueTrace { dim: ann.dim() });
    }
    let mut functional = ann.basis()[0].to_dense(gq.dim(top));
    let mut values: Vec<Q> = (0..gq.vertices())
        .map(|i| Ok(gq.monomial(&Monomial::zpure(i, top / 2))?.coords.dot_dense(&functional)))
        .collect::<Result<_, GradeAlgError>>()?;
    let pegged = peg.and_then(|p| (0..values.len()).find(|&i| !values[i].is_zero() && !p[i].is_zero()));
    let (scale, normalization) = match (pegged, peg) {
        (Some(i), Some(p)) => (&p[i] / &values[i], format!("vertex {} pegged to {}", i + 1, fmt_q(&p[i]))),
        _ => match values.iter().position(|v| !v.is_zero()) {
            Some(i) => (values[i].recip(), format!("vertex {} scaled to 1", i + 1)),
            None => (Q::one(), "functional vanishes on z^k e_i".to_string()),
        },
    };
    values.iter_mut().for_each(|v| *v *= &scale);
    functional.iter_mut().for_each(|v| *v *= &scale);
    Ok(TraceVector {
        values,
        functional,
        top_degree: top,
        normalization,
    })
}

/// Gram matrices `Tr(x y)` between `Z[d]` and `(A/[A,A])[top - d]`.
#[derive(Clone, Debug)]
pub struct PairingData {
    pub grams: Vec<RationalMatrix>,
    pub sampled_triples: usize,
}

pub fn pairing_check(
    gq: &GradedQuotient,
    spaces: &AlgebraSpaces,
    tv: &TraceVector,
    seed: u64,
    samples: usize,
) -> Result<PairingData, TraceError> {
    let top = spaces.top;
    let mut grams = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let zb = spaces.centers[d].basis();
        let reps = spaces.commutators[top - d].complement_coordinates();
        if zb.len() != reps.len() {
            return Err(TraceError::DegeneratePairing {
                degree: d,
                reason: format!("dim Z = {} but quotient has dimension {}", zb.len(), reps.len()),
            });
        }
        let mut rows = Vec::with_capacity(zb.len());
        for x in &zb {
            let xe = Element { degree: d, coords: x.clone() };
            let row: Vec<Q> = reps
                .iter()
                .map(|&c| Ok(tv.eval(&gq.product(&xe, &gq.basis_element(top - d, c))?)))
                .collect::<Result<_, GradeAlgError>>()?;
            rows.push(row);
        }
        let g = RationalMatrix::from_dense(&rows);
        let g = if rows.is_empty() { RationalMatrix::zeros(0, 0) } else { g };
        if g.rank() != zb.len() {
            return Err(TraceError::DegeneratePairing {
                degree: d,
                reason: "Gram matrix is singular".into(),
            });
        }
        grams.push(g);
    }
    // (x, [y1, y2]) = 0 for central x
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = 0;
    for _ in 0..samples {
        let d = rng.gen_range(0..=top);
        let zb = spaces.centers[d].basis();
        if zb.is_empty() {
            continue;
        }
        let x = Element {
            degree: d,
            coords: zb[rng.gen_range(0..zb.len())].clone(),
        };
        let a = rng.gen_range(0..=top - d);
        let b = top - d - a;
        if gq.dim(a) == 0 || gq.dim(b) == 0 {
            continue;
        }
        let y1 = gq.basis_element(a, rng.gen_range(0..gq.dim(a)));
        let y2 = gq.basis_element(b, rng.gen_range(0..gq.dim(b)));
        let v = tv.eval(&gq.product(&x, &gq.commutator(&y1, &y2)?)?);
        if !v.is_zero() {
            return Err(TraceError::DegeneratePairing {
                degree: d,
                reason: "central element pairs nontrivially with a commutator".into(),
            });
        }
        sampled += 1;
    }
    Ok(PairingData {
        grams,
        sampled_triples: sampled,
    })
}

/// Hilbert polynomials of `A/[A,A]` and `Z` (indexed by degree) and the
/// Jordan blocks of multiplication by `z` on both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTraceData {
    pub p: Vec<usize>,
    pub p_star: Vec<usize>,
    pub quotient_blocks: Vec<usize>,
    pub center_blocks: Vec<usize>,
}

impl GradedTraceData {
    pub fn top(&self) -> usize {
        self.p.len() - 1
    }

    /// `p*(t) = t^top p(1/t)`.
    pub fn is_palindromic_pair(&self) -> bool {
        let top = self.top();
        (0..=top).all(|d| self.p_star[d] == self.p[top - d])
    }

    pub fn has_even_support(&self) -> bool {
        let even = |v: &[usize]| v.iter().enumerate().all(|(k, &c)| c == 0 || k % 2 == 0);
        even(&self.p) && even(&self.p_star)
    }

    /// `t^2 p*(t) + p(t) = r (1 - t^{2h}) / (1 - t^2)`.
    pub fn satisfies_complex_identity(&self, rank: usize, coxeter: usize) -> bool {
        let top = self.top();
        (0..=top + 2).all(|d| {
            let lhs = if d >= 2 { self.p_star[d - 2] } else { 0 } + self.p.get(d).copied().unwrap_or(0);
            let rhs = if d % 2 == 0 && d < 2 * coxeter { rank } else { 0 };
            lhs == rhs
        })
    }

    pub fn total_quotient(&self) -> usize {
        self.p.iter().sum()
    }

    pub fn total_center(&self) -> usize {
        self.p_star.iter().sum()
    }
}

pub fn graded_trace_data(gq: &GradedQuotient, spaces: &AlgebraSpaces) -> Result<GradedTraceData, TraceError> {
    let top = spaces.top;
    let p: Vec<usize> = (0..=top).map(|d| spaces.quotient_dim(d)).collect();
    let p_star: Vec<usize> = (0..=top).map(|d| spaces.centers[d].dim()).collect();
    let z = gq.central_element()?;

    let offsets = |dims: &[usize]| -> Vec<usize> {
        dims.iter()
            .scan(0, |acc, &x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect()
    };
    let (qoff, coff) = (offsets(&p), offsets(&p_star));
    let (qtot, ctot) = (p.iter().sum::<usize>(), p_star.iter().sum::<usize>());

    let mut qcols = vec![SparseVec::new(); qtot];
    let mut ccols = vec![SparseVec::new(); ctot];
    for d in 0..=top {
        let reps = spaces.commutators[d].complement_coordinates();
        for (k, &c) in reps.iter().enumerate() {
            if d + 2 > top {
                continue;
            }
            let img = gq.product(&z, &gq.basis_element(d, c))?;
            let coords = spaces.commutators[d + 2].quotient_coordinates(&img.coords);
            qcols[qoff[d] + k] = coords.remap(|i| Some(i + qoff[d + 2]));
        }
        for (k, x) in spaces.centers[d].basis().into_iter().enumerate() {
            if d + 2 > top {
                continue;
            }
            let img = gq.product(&z, &Element { degree: d, coords: x })?;
            let coords = spaces.centers[d + 2].coordinates(&img.coords);
            ccols[coff[d] + k] = coords.remap(|i| Some(i + coff[d + 2]));
        }
    }
    let blocks = |n: usize, cols: &[SparseVec]| -> Vec<usize> {
        let mut b = nilpotent_block_sizes(&RationalMatrix::from_columns(n, cols)).expect("z is nilpotent");
        b.sort_unstable();
        b
    };
    Ok(GradedTraceData {
        quotient_blocks: blocks(qtot, &qcols),
        center_blocks: blocks(ctot, &ccols),
        p,
        p_star,
    })
}

/// `{phi : z^s sum_i eps_i phi_i e_i in [A,A]}`.
pub fn e_membership_bruteforce(
    gq: &GradedQuotient,
    spaces: &AlgebraSpaces,
    eps: &[i64],
    s: usize,
) -> Result<Subspace, TraceError> {
    if 2 * s > spaces.top {
        return Err(GradeAlgError::DegreeOverflow {
            degree: 2 * s,
            max_degree: spaces.top,
        }
        .into());
    }
    let comm = &spaces.commutators[2 * s];
    let r = gq.vertices();
    let mut cols = Vec::with_capacity(r);
    for (i, &e) in eps.iter().enumerate() {
        let v = gq.monomial(&Monomial::zpure(i, s))?.coords.scaled(&Q::from_integer(e.into()));
        cols.push(comm.quotient_coordinates(&v));
    }
    let m = RationalMatrix::from_columns(spaces.quotient_dim(2 * s), &cols);
    Ok(Subspace::span(r, crate::exactlin::rref(&m).nullspace))
}

/// `dim (B/[B,B])[2p]` for `p = 0 ..= top/2`.
pub fn b_commutator_dimensions(gq: &GradedQuotient) -> Result<Vec<usize>, TraceError> {
    let top = socle_degree(gq)?;
    (0..=top / 2)
        .map(|p| Ok(gq.dim(2 * p) - gq.commutator_subspace(2 * p)?.dim()))
        .collect()
}

/// Per-degree data of the complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexDegree {
    pub degree: usize,
    pub dims: [usize; 3],
    pub ranks: [usize; 2],
    pub homology: [usize; 3],
}

impl ComplexDegree {
    pub fn euler(&self) -> i64 {
        self.dims[0] as i64 - self.dims[1] as i64 + self.dims[2] as i64
    }
}

struct ComplexMaps {
    /// slice indices spanning `A^R` in degrees `d - 2` and `d`
    d0_basis: Vec<usize>,
    d2_basis: Vec<usize>,
    /// `(generator, slice index)` spanning `D_1[d]`
    d1_basis: Vec<(usize, usize)>,
    d0: RationalMatrix,
    d1: RationalMatrix,
}

fn check_preprojective_shape(gq: &GradedQuotient) -> Result<(), TraceError> {
    let gens = &gq.presentation().generators;
    if !gens.len().is_multiple_of(2) {
        return Err(TraceError::NotPreprojective("odd number of arrows".into()));
    }
    for pair in gens.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.degree != 1 || b.degree != 1 || a.tail != b.head || a.head != b.tail {
            return Err(TraceError::NotPreprojective(format!("{} and {} are not a doubled pair", a.name, b.name)));
        }
    }
    Ok(())
}

fn diagonal_indices(gq: &GradedQuotient, d: Option<usize>) -> Vec<usize> {
    match d {
        Some(d) if d <= gq.max_degree() => {
            gq.basis(d).iter().enumerate().filter(|(_, m)| m.head == m.tail).map(|(i, _)| i).collect()
        }
        _ => Vec::new(),
    }
}

fn d1_indices(gq: &GradedQuotient, d: usize) -> Vec<(usize, usize)> {
    if d == 0 || d - 1 > gq.max_degree() {
        return Vec::new();
    }
    let gens = &gq.presentation().generators;
    let mut out = Vec::new();
    for (b, g) in gens.iter().enumerate() {
        for (t, m) in gq.basis(d - 1).iter().enumerate() {
            if m.head == g.tail && m.tail == g.head {
                out.push((b, t));
            }
        }
    }
    out
}

/// Partner arrow and the sign with which `[x, a]` enters the slot of the partner.
fn partner(b: usize) -> (usize, i64) {
    if b.is_multiple_of(2) {
        (b + 1, 1)
    } else {
        (b - 1, -1)
    }
}

fn complex_maps(gq: &GradedQuotient, d: usize) -> Result<ComplexMaps, TraceError> {
    let d0_basis = diagonal_indices(gq, d.checked_sub(2));
    let d2_basis = diagonal_indices(gq, Some(d));
    let d1_basis = d1_indices(gq, d);
    let slot = |b: usize, t: usize| d1_basis.iter().position(|&x| x == (b, t));
    let ngen = gq.presentation().generators.len();
    let gens: Vec<Element> = (0..ngen).map(|g| gq.generator(g)).collect::<Result<_, _>>()?;

    let mut d0_cols = Vec::with_capacity(d0_basis.len());
    for &x in &d0_basis {
        let xe = gq.basis_element(d - 2, x);
        let mut col = SparseVec::new();
        for (a, ge) in gens.iter().enumerate() {
            // [x, a] lands in the slot of a's partner
            let (b, sign) = partner(a);
            let c = gq.commutator(&xe, ge)?;
            for (t, v) in c.coords.iter() {
                let k = slot(b, t).expect("typed commutator");
                col.axpy(&(v * Q::from_integer(sign.into())), &SparseVec::unit(k));
            }
        }
        d0_cols.push(col);
    }
    let pos2 = |i: usize| d2_basis.iter().position(|&x| x == i);
    let mut d1_cols = Vec::with_capacity(d1_basis.len());
    for &(b, t) in &d1_basis {
        let c = gq.commutator(&gq.basis_element(d - 1, t), &gens[b])?;
        let col = c.coords.remap(|i| Some(pos2(i).expect("commutator lies in the diagonal part")));
        d1_cols.push(col);
    }
    Ok(ComplexMaps {
        d0: RationalMatrix::from_columns(d1_basis.len(), &d0_cols),
        d1: RationalMatrix::from_columns(d2_basis.len(), &d1_cols),
        d0_basis,
        d2_basis,
        d1_basis,
    })
}

/// Homology of `0 -> D_0 -> D_1 -> D_2 -> 0` in degrees `0 ..= top + 2`.
pub fn complex_homology(gq: &GradedQuotient) -> Result<Vec<ComplexDegree>, TraceError> {
    check_preprojective_shape(gq)?;
    let top = socle_degree(gq)?;
    let mut out = Vec::new();
    for d in 0..=top + 2 {
        let maps = complex_maps(gq, d)?;
        let comp = maps.d1.mul(&maps.d0).expect("shapes agree");
        if !comp.is_zero() {
            return Err(TraceError::ComplexNotChain { degree: d });
        }
        let dims = [maps.d0_basis.len(), maps.d1_basis.len(), maps.d2_basis.len()];
        let ranks = [maps.d0.rank(), maps.d1.rank()];
        out.push(ComplexDegree {
            degree: d,
            dims,
            ranks,
            homology: [dims[0] - ranks[0], dims[1] - ranks[0] - ranks[1], dims[2] - ranks[1]],
        });
    }
    Ok(out)
}

/// Finds `y` with `D = ad y`, where `D` is given by its images on the arrows
/// (indexed like the generators) and kills `z` and the idempotents.
pub fn inner_derivation_witness(gq: &GradedQuotient, images: &[Element]) -> Result<Element, TraceError> {
    check_preprojective_shape(gq)?;
    let pres = gq.presentation();
    if images.len() != pres.generators.len() {
        return Err(TraceError::NotADerivation(format!(
            "expected {} images, got {}",
            pres.generators.len(),
            images.len()
        )));
    }
    let mut shift: Option<usize> = None;
    for (g, img) in images.iter().enumerate() {
        if img.is_zero() {
            continue;
        }
        let gen = &pres.generators[g];
        let s = img
            .degree
            .checked_sub(gen.degree)
            .ok_or_else(|| TraceError::NotADerivation("images must not lower degree below the arrow".into()))?;
        if shift.is_some_and(|x| x != s) {
            return Err(TraceError::NotADerivation("images are not homogeneous of one degree".into()));
        }
        shift = Some(s);
        for (t, _) in img.coords.iter() {
            let m = &gq.basis(img.degree)[t];
            if m.head != gen.head || m.tail != gen.tail {
                return Err(TraceError::NotADerivation(format!("image of {} is not typed like it", gen.name)));
            }
        }
    }
    let Some(shift) = shift else {
        return Ok(Element::zero(0));
    };
    // D applied to every relation must vanish
    for (ri, rel) in pres.relations.iter().enumerate() {
        let mut total: Option<Element> = None;
        for (c, m) in &rel.terms {
            for j in 0..m.word.len() {
                let mut x = images[m.word[j]].clone();
                for &g in m.word[j + 1..].iter().rev() {
                    x = gq.product(&x, &gq.generator(g)?)?;
                }
                for _ in 0..m.zpow {
                    x = gq.left_central(&x)?;
                }
                for &g in m.word[..j].iter().rev() {
                    x = gq.left_generator(g, &x)?;
                }
                let x = x.scaled(c);
                total = Some(match total {
                    None => x,
                    Some(t) if t.degree == x.degree => t.add(&x),
                    Some(t) => t,
                });
            }
        }
        if total.is_some_and(|t| !t.is_zero()) {
            return Err(TraceError::NotADerivation(format!("relation {} is not preserved", ri + 1)));
        }
    }
    let d = shift + 2;
    let maps = complex_maps(gq, d)?;
    let mut rhs = SparseVec::new();
    for (a, img) in images.iter().enumerate() {
        let (b, sign) = partner(a);
        for (t, v) in img.coords.iter() {
            let k = maps.d1_basis.iter().position(|&x| x == (b, t)).expect("typed image");
            rhs.axpy(&(v * Q::from_integer(sign.into())), &SparseVec::unit(k));
        }
    }
    let sol = solve(&maps.d0, &rhs).ok_or(TraceError::NoSolution)?;
    let y = Element {
        degree: shift,
        coords: sol.remap(|k| Some(maps.d0_basis[k])),
    };
    for (g, img) in images.iter().enumerate() {
        let c = gq.commutator(&y, &gq.generator(g)?)?;
        let expected = if img.is_zero() { Element::zero(c.degree) } else { img.clone() };
        if c != expected {
            return Err(TraceError::NotADerivation(format!(
                "ad y disagrees with D on {}",
                pres.generators[g].name
            )));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q;
    use crate::gradealg::{build_graded, preprojective_presentation};
    use crate::rootsys::{build_cartan, build_root_system, Family, Weight};

    fn build(f: Family, n: usize, mu: &Weight) -> (GradedQuotient, AlgebraSpaces, Vec<i64>) {
        let d = build_cartan(f, n).unwrap();
        let h = build_root_system(&d).coxeter;
        let gq = build_graded(&preprojective_presentation(&d, mu, true).unwrap(), 2 * (h - 2) + 2).unwrap();
        let spaces = AlgebraSpaces::compute(&gq).unwrap();
        (gq, spaces, d.epsilon.clone())
    }

    #[test]
    fn a2_trace_and_ratio() {
        let (gq, sp, _) = build(Family::A, 2, &Weight::rho(2));
        let tv = trace_functional(&gq, &sp, None).unwrap();
        assert_eq!(tv.values, vec![q(1), q(-1)]);
        let (gq, sp, _) = build(Family::A, 2, &Weight::from_ints(&[3, 7]));
        let tv = trace_functional(&gq, &sp, None).unwrap();
        assert_eq!(&tv.values[1] / &tv.values[0], crate::exactlin::q_frac(-3, 7));
    }

    #[test]
    fn a3_trace() {
        let (gq, sp, _) = build(Family::A, 3, &Weight::rho(3));
        let tv = trace_functional(&gq, &sp, None).unwrap();
        assert_eq!(tv.values, vec![q(1), q(-2), q(1)]);
    }

    #[test]
    fn a2_graded_data_and_pairing() {
        let (gq, sp, _) = build(Family::A, 2, &Weight::rho(2));
        let tv = trace_functional(&gq, &sp, None).unwrap();
        let pd = pairing_check(&gq, &sp, &tv, 1, 50).unwrap();
        assert_eq!(pd.grams[0].nrows(), 1);
        assert_eq!(pd.grams[2].nrows(), 2);
        let g = graded_trace_data(&gq, &sp).unwrap();
        assert_eq!(g.p, vec![2, 0, 1]);
        assert_eq!(g.p_star, vec![1, 0, 2]);
        assert_eq!(g.quotient_blocks, vec![1, 2]);
        assert_eq!(g.center_blocks, vec![1, 2]);
        assert!(g.is_palindromic_pair() && g.has_even_support() && g.satisfies_complex_identity(2, 3));
    }

    #[test]
    fn d4_blocks() {
        let (gq, sp, _) = build(Family::D, 4, &Weight::rho(4));
        let g = graded_trace_data(&gq, &sp).unwrap();
        assert_eq!(g.p, vec![4, 0, 3, 0, 3, 0, 1, 0, 1]);
        assert_eq!(g.quotient_blocks, vec![1, 3, 3, 5]);
        assert_eq!(g.center_blocks, vec![1, 3, 3, 5]);
    }

    #[test]
    fn membership_small() {
        let (gq, sp, eps) = build(Family::A, 2, &Weight::rho(2));
        assert_eq!(e_membership_bruteforce(&gq, &sp, &eps, 0).unwrap().dim(), 0);
        let k = e_membership_bruteforce(&gq, &sp, &eps, 1).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&SparseVec::from_dense(&[q(eps[0]), q(eps[1])])));
        let (gq, sp, eps) = build(Family::A, 3, &Weight::rho(3));
        let k = e_membership_bruteforce(&gq, &sp, &eps, 1).unwrap();
        assert_eq!(k, Subspace::span(3, [SparseVec::from_dense(&[q(1), q(-1), q(1)])]));
    }

    #[test]
    fn a2_complex() {
        let (gq, _, _) = build(Family::A, 2, &Weight::rho(2));
        let c = complex_homology(&gq).unwrap();
        assert!(c.iter().all(|x| x.homology[1] == 0));
        assert_eq!(c[2].euler(), 2);
        assert_eq!(c[2].dims, [2, 2, 2]);
    }

    fn assert_witness(gq: &GradedQuotient, x: &Element) {
        let ngen = gq.presentation().generators.len();
        let images: Vec<Element> = (0..ngen)
            .map(|g| gq.commutator(x, &gq.generator(g).unwrap()).unwrap())
            .collect();
        let y = inner_derivation_witness(gq, &images).unwrap();
        for (g, img) in images.iter().enumerate() {
            let c = gq.commutator(&y, &gq.generator(g).unwrap()).unwrap();
            assert_eq!(c.coords, img.coords);
        }
    }

    #[test]
    fn inner_witness() {
        let (gq, _, _) = build(Family::A, 2, &Weight::rho(2));
        assert_witness(&gq, &gq.idempotent(0));
        let zero = vec![Element::zero(1), Element::zero(1)];
        assert!(inner_derivation_witness(&gq, &zero).unwrap().is_zero());
        let (gq, _, _) = build(Family::A, 3, &Weight::from_ints(&[2, 1, 5]));
        for d in 0..=2 {
            for (i, m) in gq.basis(d).iter().enumerate() {
                if m.head == m.tail {
                    assert_witness(&gq, &gq.basis_element(d, i));
                }
            }
        }
    }

    #[test]
    fn not_a_derivation() {
        let (gq, _, _) = build(Family::A, 2, &Weight::rho(2));
        // D(a) = a, D(a*) = 0 breaks a a* = z e2
        let images = vec![gq.generator(0).unwrap(), Element::zero(1)];
        assert!(matches!(inner_derivation_witness(&gq, &images), Err(TraceError::NotADerivation(_))));
    }
}

//! Finitely presented graded algebras over the vertex ring, built degree by
//! degree as exact quotients.
//!
//! A presentation has vertex idempotents `e_i`, typed generators of positive
//! degree, optionally one central generator `z` of degree 2, and homogeneous
//! relations. Monomials keep every power of `z` outside the word, so the free
//! object is the path algebra tensored with `Q[z]`.
//!
//! Composition convention: a monomial `x` satisfies `x = e_head(x) x e_tail(x)`
//! and the product `xy` is nonzero in the free algebra only when
//! `tail(x) = head(y)`.
//!
//! # Construction
//!
//! Monomials of a fixed degree are ordered lexicographically on their letter
//! sequence (the word followed by `z^k`), with `z` above every generator and
//! generators ranked by declaration order; the final tie-break is the vertex.
//! Because the order is decided by the first letter, the degree-`d` part `I_d`
//! of the ideal contains `g . I_{d - deg g}` block by block, and the leading
//! monomials of `I_d` are `g . LM(I_{d - deg g})` together with the leading
//! monomials of the remaining relation multiples. Consequently the standard
//! (non-pivot) monomials of degree `d` are found among the candidates
//! `g . s` (`s` standard of lower degree) and `z^{d/2} e_i`, and the ideal is
//! generated modulo those blocks by `rel . z^k . s` with `s` standard. Each
//! degree therefore only needs an RREF over candidate columns, and the result
//! is the same canonical basis the full free-algebra elimination would give.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{fmt_q, parse_q, q, Echelon, PolyMatrix, RationalMatrix, SparseVec, Subspace, Q};
use crate::rootsys::{build_root_system, is_regular, CartanDatum, Weight};

/// Default cap on free monomials in one degree.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradeAlgError {
    #[error("weight {0} is not regular")]
    IrregularWeight(String),
    #[error("weight rank {got} does not match diagram rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("budget exceeded in degree {degree}: {count} monomials > budget {budget}")]
    BudgetExceeded { degree: usize, count: usize, budget: usize },
    #[error("relation {index} is not composable: {reason}")]
    IncomposableRelation { index: usize, reason: String },
    #[error("relation {index} is not homogeneous")]
    InhomogeneousRelation { index: usize },
    #[error("degree {degree} exceeds the built range 0..={max_degree}")]
    DegreeOverflow { degree: usize, max_degree: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub tail: usize,
    pub head: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralGenerator {
    pub name: String,
}

/// Word in non-central generators times a power of the central generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub word: Vec<usize>,
    pub zpow: usize,
    pub tail: usize,
    pub head: usize,
}

impl Monomial {
    pub fn idempotent(v: usize) -> Self {
        Self {
            word: Vec::new(),
            zpow: 0,
            tail: v,
            head: v,
        }
    }

    pub fn zpure(v: usize, k: usize) -> Self {
        Self {
            word: Vec::new(),
            zpow: k,
            tail: v,
            head: v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Q, Monomial)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub vertices: usize,
    pub generators: Vec<Generator>,
    pub central: Option<CentralGenerator>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    pub fn monomial_degree(&self, m: &Monomial) -> usize {
        m.word.iter().map(|&g| self.generators[g].degree).sum::<usize>() + 2 * m.zpow
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Builds a monomial from a word, checking composability.
    pub fn word(&self, word: &[usize], zpow: usize) -> Option<Monomial> {
        let (&first, &last) = (word.first()?, word.last()?);
        for w in word.windows(2) {
            if self.generators[w[0]].tail != self.generators[w[1]].head {
                return None;
            }
        }
        Some(Monomial {
            word: word.to_vec(),
            zpow,
            tail: self.generators[last].tail,
            head: self.generators[first].head,
        })
    }

    /// Degree, tail and head of a relation after validation.
    pub fn relation_shape(&self, index: usize) -> Result<(usize, usize, usize), GradeAlgError> {
        let rel = &self.relations[index];
        let mut shape: Option<(usize, usize, usize)> = None;
        for (_, m) in &rel.terms {
            if m.zpow > 0 && self.central.is_none() {
                return Err(GradeAlgError::InvalidPresentation(format!(
                    "relation {index} uses a central generator that was not declared"
                )));
            }
            if m.tail >= self.vertices || m.head >= self.vertices {
                return Err(GradeAlgError::IncomposableRelation {
                    index,
                    reason: "vertex out of range".into(),
                });
            }
            if !m.word.is_empty() {
                let check = self.word(&m.word, m.zpow).ok_or_else(|| GradeAlgError::IncomposableRelation {
                    index,
                    reason: format!("word {} does not compose", self.render(m)),
                })?;
                if check.tail != m.tail || check.head != m.head {
                    return Err(GradeAlgError::IncomposableRelation {
                        index,
                        reason: "recorded endpoints disagree with the word".into(),
                    });
                }
            } else if m.tail != m.head {
                return Err(GradeAlgError::IncomposableRelation {
                    index,
                    reason: "empty word with distinct endpoints".into(),
                });
            }
            let s = (self.monomial_degree(m), m.tail, m.head);
            match shape {
                None => shape = Some(s),
                Some(prev) if prev.0 != s.0 => return Err(GradeAlgError::InhomogeneousRelation { index }),
                Some(prev) if prev != s => {
                    return Err(GradeAlgError::IncomposableRelation {
                        index,
                        reason: "terms connect different vertex pairs".into(),
                    })
                }
                _ => {}
            }
        }
        let shape = shape.ok_or_else(|| GradeAlgError::InvalidPresentation(format!("relation {index} is empty")))?;
        if shape.0 == 0 {
            return Err(GradeAlgError::InvalidPresentation(format!("relation {index} has degree 0")));
        }
        Ok(shape)
    }

    pub fn validate(&self) -> Result<(), GradeAlgError> {
        if self.vertices == 0 {
            return Err(GradeAlgError::InvalidPresentation("no vertices".into()));
        }
        for g in &self.generators {
            if g.degree == 0 || g.tail >= self.vertices || g.head >= self.vertices {
                return Err(GradeAlgError::InvalidPresentation(format!("bad generator {}", g.name)));
            }
        }
        for i in 0..self.relations.len() {
            self.relation_shape(i)?;
        }
        Ok(())
    }

    /// Human-readable monomial such as `a1.a1*.z^2` or `z.e2`.
    pub fn render(&self, m: &Monomial) -> String {
        let zname = self.central.as_ref().map_or("z", |c| c.name.as_str());
        let mut parts: Vec<String> = m.word.iter().map(|&g| self.generators[g].name.clone()).collect();
        match m.zpow {
            0 => {}
            1 => parts.push(zname.to_string()),
            k => parts.push(format!("{zname}^{k}")),
        }
        if m.word.is_empty() {
            parts.push(format!("e{}", m.tail + 1));
        }
        parts.join(".")
    }

    /// Serializes to the line-oriented text format (see the README for the grammar).
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertices);
        for g in &self.generators {
            out += &format!("gen {} {} {} {}\n", g.name, g.tail + 1, g.head + 1, g.degree);
        }
        if let Some(c) = &self.central {
            out += &format!("central {} 2\n", c.name);
        }
        for rel in &self.relations {
            let mut line = String::from("rel");
            for (k, (c, m)) in rel.terms.iter().enumerate() {
                let neg = *c < Q::zero();
                let abs = if neg { -c.clone() } else { c.clone() };
                if k == 0 {
                    if neg {
                        line += " -";
                    }
                } else {
                    line += if neg { " -" } else { " +" };
                }
                if !abs.is_one() {
                    line += &format!(" {}", fmt_q(&abs));
                }
                line += &format!(" {}", self.render(m));
            }
            out += &line;
            out.push('\n');
        }
        out
    }

    /// Parses the line-oriented text format.
    pub fn from_text(text: &str) -> Result<Presentation, GradeAlgError> {
        let mut p = Presentation {
            vertices: 0,
            generators: Vec::new(),
            central: None,
            relations: Vec::new(),
        };
        let err = |line: usize, message: String| GradeAlgError::Parse { line, message };
        let mut rel_lines = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let kw = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();
            let num = |s: &str| -> Result<usize, GradeAlgError> {
                s.parse::<usize>().map_err(|_| err(ln, format!("expected a number, got {s:?}")))
            };
            match kw {
                "vertices" => {
                    let [n] = rest.as_slice() else {
                        return Err(err(ln, "usage: vertices <count>".into()));
                    };
                    p.vertices = num(n)?;
                }
                "gen" => {
                    let (name, tail, head, degree) = match rest.as_slice() {
                        [n, t, h] => (*n, num(t)?, num(h)?, 1),
                        [n, t, h, d] => (*n, num(t)?, num(h)?, num(d)?),
                        _ => return Err(err(ln, "usage: gen <name> <tail> <head> [degree]".into())),
                    };
                    if tail == 0 || head == 0 || tail > p.vertices || head > p.vertices {
                        return Err(err(ln, format!("vertex out of range 1..={}", p.vertices)));
                    }
                    if !valid_name(name) || p.generator_index(name).is_some() {
                        return Err(err(ln, format!("bad or duplicate generator name {name:?}")));
                    }
                    p.generators.push(Generator {
                        name: name.to_string(),
                        tail: tail - 1,
                        head: head - 1,
                        degree,
                    });
                }
                "central" => {
                    let name = match rest.as_slice() {
                        [n] => *n,
                        [n, "2"] => *n,
                        _ => return Err(err(ln, "usage: central <name> [2]".into())),
                    };
                    if p.central.is_some() || !valid_name(name) {
                        return Err(err(ln, "at most one central generator with a valid name".into()));
                    }
                    p.central = Some(CentralGenerator { name: name.to_string() });
                }
                "rel" => rel_lines.push((ln, rest.join(" "))),
                other => return Err(err(ln, format!("unknown keyword {other:?}"))),
            }
        }
        for (ln, body) in rel_lines {
            let rel = parse_relation(&p, &body).map_err(|m| err(ln, m))?;
            p.relations.push(rel);
        }
        p.validate()?;
        Ok(p)
    }
}

fn valid_name(name: &str) -> bool {
    let is_idem = name.len() > 1 && name.starts_with('e') && name[1..].chars().all(|c| c.is_ascii_digit());
    !name.is_empty()
        && !is_idem
        && !name.starts_with(|c: char| c.is_ascii_digit() || c == '+' || c == '-')
        && !name.contains(['.', '^', '#'])
}

fn parse_monomial(p: &Presentation, tok: &str) -> Result<Monomial, String> {
    let zname = p.central.as_ref().map(|c| c.name.as_str());
    let mut word = Vec::new();
    let mut zpow = 0usize;
    let mut vertex: Option<usize> = None;
    for f in tok.split('.') {
        if let Some(z) = zname {
            if f == z {
                zpow += 1;
                continue;
            }
            if let Some(k) = f.strip_prefix(z).and_then(|s| s.strip_prefix('^')) {
                zpow += k.parse::<usize>().map_err(|_| format!("bad exponent in {f:?}"))?;
                continue;
            }
        }
        if let Some(v) = f.strip_prefix('e').and_then(|s| s.parse::<usize>().ok()) {
            if v == 0 || v > p.vertices {
                return Err(format!("idempotent {f} out of range"));
            }
            vertex = Some(v - 1);
            continue;
        }
        let g = p.generator_index(f).ok_or_else(|| format!("unknown generator {f:?}"))?;
        word.push(g);
    }
    if word.is_empty() {
        let v = match (vertex, p.vertices) {
            (Some(v), _) => v,
            (None, 1) => 0,
            _ => return Err(format!("monomial {tok:?} needs an idempotent e<i>")),
        };
        return Ok(Monomial::zpure(v, zpow));
    }
    let m = p.word(&word, zpow).ok_or_else(|| format!("word {tok:?} does not compose"))?;
    if let Some(v) = vertex {
        if m.tail != v && m.head != v {
            return Err(format!("idempotent in {tok:?} kills the word"));
        }
    }
    Ok(m)
}

fn parse_relation(p: &Presentation, body: &str) -> Result<Relation, String> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let mut sign = Q::one();
        if toks[i] == "+" || toks[i] == "-" {
            if toks[i] == "-" {
                sign = -sign;
            }
            i += 1;
        } else if !terms.is_empty() {
            return Err(format!("expected + or - before {:?}", toks[i]));
        }
        let tok = *toks.get(i).ok_or("dangling sign")?;
        let (coef, mono_tok) = match parse_q(tok) {
            Ok(c) => {
                i += 1;
                (c, *toks.get(i).ok_or("coefficient without monomial")?)
            }
            Err(_) => (Q::one(), tok),
        };
        i += 1;
        terms.push((sign * coef, parse_monomial(p, mono_tok)?));
    }
    if terms.is_empty() {
        return Err("empty relation".into());
    }
    Ok(Relation { terms })
}

/// Presentation of `A^mu` (or of the ordinary preprojective algebra when
/// `include_z` is false) with every edge oriented from lower to higher index.
pub fn preprojective_presentation(
    datum: &CartanDatum,
    mu: &Weight,
    include_z: bool,
) -> Result<Presentation, GradeAlgError> {
    preprojective_presentation_oriented(datum, mu, include_z, &vec![false; datum.edges.len()])
}

/// Same as [`preprojective_presentation`], reversing the edges flagged in `flip`.
pub fn preprojective_presentation_oriented(
    datum: &CartanDatum,
    mu: &Weight,
    include_z: bool,
    flip: &[bool],
) -> Result<Presentation, GradeAlgError> {
    let r = datum.rank;
    if mu.rank() != r {
        return Err(GradeAlgError::RankMismatch {
            expected: r,
            got: mu.rank(),
        });
    }
    if include_z {
        let rs = build_root_system(datum);
        if !is_regular(mu, &rs).expect("rank checked") {
            return Err(GradeAlgError::IrregularWeight(mu.to_string()));
        }
    }
    let mut generators = Vec::new();
    for (k, &(i, j)) in datum.edges.iter().enumerate() {
        let (t, h) = if flip.get(k).copied().unwrap_or(false) { (j, i) } else { (i, j) };
        generators.push(Generator {
            name: format!("a{}", k + 1),
            tail: t,
            head: h,
            degree: 1,
        });
        generators.push(Generator {
            name: format!("a{}*", k + 1),
            tail: h,
            head: t,
            degree: 1,
        });
    }
    let mut p = Presentation {
        vertices: r,
        generators,
        central: include_z.then(|| CentralGenerator { name: "z".into() }),
        relations: Vec::new(),
    };
    for v in 0..r {
        let mut terms = Vec::new();
        for k in 0..datum.edges.len() {
            let (a, astar) = (2 * k, 2 * k + 1);
            if p.generators[a].head == v {
                terms.push((Q::one(), p.word(&[a, astar], 0).unwrap()));
            }
            if p.generators[a].tail == v {
                terms.push((-Q::one(), p.word(&[astar, a], 0).unwrap()));
            }
        }
        if include_z {
            terms.push((-mu.coords[v].clone(), Monomial::zpure(v, 1)));
        }
        p.relations.push(Relation { terms });
    }
    Ok(p)
}

fn elementary_symmetric(values: &[i64]) -> Vec<Q> {
    // coefficients of prod (x + v), e_k multiplies x^{n-k}
    let mut e = vec![Q::one()];
    for &v in values {
        let mut next = vec![Q::zero(); e.len() + 1];
        for (k, c) in e.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * q(v);
        }
        e = next;
    }
    e
}

/// Presentation of the nodal corner algebra at `mu = rho`: generators
/// `U1, U2, U3` of degree 2 and central `z`, with `U1 + U2 + U3 = z` and
/// `prod_{m=0}^{l_i} (U_i + m z) = 0`. With `eliminate`, `U3` is replaced by
/// `z - U1 - U2`.
pub fn b_presentation(legs: [usize; 3], eliminate: bool) -> Presentation {
    let ngen = if eliminate { 2 } else { 3 };
    let generators = (0..ngen)
        .map(|i| Generator {
            name: format!("U{}", i + 1),
            tail: 0,
            head: 0,
            degree: 2,
        })
        .collect();
    let mut p = Presentation {
        vertices: 1,
        generators,
        central: Some(CentralGenerator { name: "z".into() }),
        relations: Vec::new(),
    };
    let mono = |word: Vec<usize>, zpow: usize| Monomial {
        word,
        zpow,
        tail: 0,
        head: 0,
    };
    if !eliminate {
        p.relations.push(Relation {
            terms: vec![
                (Q::one(), mono(vec![0], 0)),
                (Q::one(), mono(vec![1], 0)),
                (Q::one(), mono(vec![2], 0)),
                (-Q::one(), mono(vec![], 1)),
            ],
        });
    }
    for (i, &l) in legs.iter().enumerate() {
        if i < ngen {
            // prod_{m=0}^{l} (U + m z) = sum_k e_k U^{l+1-k} z^k
            let e = elementary_symmetric(&(0..=l as i64).collect::<Vec<_>>());
            let terms = e
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (c.clone(), mono(vec![i; l + 1 - k], k)))
                .collect();
            p.relations.push(Relation { terms });
        } else {
            // prod_{m=0}^{l} ((m + 1) z - U1 - U2), expanded as a noncommutative product
            let mut acc: Vec<(Q, Vec<usize>, usize)> = vec![(Q::one(), Vec::new(), 0)];
            for m in 0..=l as i64 {
                let mut next = Vec::new();
                for (c, w, zp) in &acc {
                    next.push((c * q(m + 1), w.clone(), zp + 1));
                    for g in 0..2 {
                        let mut w2 = w.clone();
                        w2.push(g);
                        next.push((-c.clone(), w2, *zp));
                    }
                }
                acc = next;
            }
            let pairs = acc.into_iter().map(|(c, w, zp)| (c, mono(w, zp)));
            p.relations.push(Relation {
                terms: combine_terms(pairs),
            });
        }
    }
    p
}

fn combine_terms<I: IntoIterator<Item = (Q, Monomial)>>(terms: I) -> Vec<(Q, Monomial)> {
    let mut out: Vec<(Q, Monomial)> = Vec::new();
    for (c, m) in terms {
        if let Some(slot) = out.iter_mut().find(|(_, x)| *x == m) {
            slot.0 += c;
        } else {
            out.push((c, m));
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    out
}

/// Where a standard monomial comes from: `g . s` for a standard `s`, or the
/// pure power `z^k e_v` (`k = 0` gives the idempotent).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Left { generator: usize, source: usize },
    ZPure { vertex: usize },
}

#[derive(Clone, Debug)]
struct Slice {
    basis: Vec<Monomial>,
    origin: Vec<Origin>,
    keys: Vec<Vec<u32>>,
    /// `lmul[g][s]`: normal form of `g . s` for `s` in degree `d - deg g`.
    lmul: Vec<Vec<SparseVec>>,
    /// `zmul[s]`: normal form of `z . s` for `s` in degree `d - 2`.
    zmul: Vec<SparseVec>,
    candidates: usize,
    ideal_rank: usize,
}

/// Degree-truncated quotient of a presentation with canonical monomial bases.
#[derive(Clone, Debug)]
pub struct GradedQuotient {
    presentation: Presentation,
    max_degree: usize,
    slices: Vec<Slice>,
}

/// Homogeneous element in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: usize,
    pub coords: SparseVec,
}

impl Element {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coords: SparseVec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn scaled(&self, c: &Q) -> Self {
        Self {
            degree: self.degree,
            coords: self.coords.scaled(c),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.degree, other.degree, "adding elements of different degrees");
        Element {
            degree: self.degree,
            coords: self.coords.add(&other.coords),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        assert_eq!(self.degree, other.degree, "subtracting elements of different degrees");
        Element {
            degree: self.degree,
            coords: self.coords.sub(&other.coords),
        }
    }
}

pub fn build_graded(p: &Presentation, max_degree: usize) -> Result<GradedQuotient, GradeAlgError> {
    build_graded_with_budget(p, max_degree, DEFAULT_BUDGET)
}

pub fn build_graded_with_budget(
    p: &Presentation,
    max_degree: usize,
    budget: usize,
) -> Result<GradedQuotient, GradeAlgError> {
    p.validate()?;
    for (d, &count) in free_monomial_counts(p, max_degree).iter().enumerate() {
        if count > budget as u128 {
            return Err(GradeAlgError::BudgetExceeded {
                degree: d,
                count: usize::try_from(count).unwrap_or(usize::MAX),
                budget,
            });
        }
    }
    let mut gq = GradedQuotient {
        presentation: p.clone(),
        max_degree,
        slices: Vec::with_capacity(max_degree + 1),
    };
    let shapes: Vec<(usize, usize, usize)> = (0..p.relations.len())
        .map(|i| p.relation_shape(i))
        .collect::<Result<_, _>>()?;
    for d in 0..=max_degree {
        let slice = gq.build_slice(d, &shapes, budget)?;
        gq.slices.push(slice);
    }
    Ok(gq)
}

/// Number of monomials of the free algebra in each degree `0..=max_degree`
/// (composable words times powers of the central generator), saturating.
pub fn free_monomial_counts(p: &Presentation, max_degree: usize) -> Vec<u128> {
    // words[d][v]: composable words of degree d with head v
    let mut words: Vec<Vec<u128>> = Vec::with_capacity(max_degree + 1);
    let mut counts: Vec<u128> = Vec::with_capacity(max_degree + 1);
    for d in 0..=max_degree {
        let mut w = vec![0u128; p.vertices];
        if d == 0 {
            w.iter_mut().for_each(|x| *x = 1);
        } else {
            for g in p.generators.iter().filter(|g| g.degree <= d) {
                w[g.head] = w[g.head].saturating_add(words[d - g.degree][g.tail]);
            }
        }
        let mut total = w.iter().fold(0u128, |acc, &x| acc.saturating_add(x));
        if p.central.is_some() && d >= 2 {
            total = total.saturating_add(counts[d - 2]);
        }
        words.push(w);
        counts.push(total);
    }
    counts
}

/// Candidate columns of one degree.
struct Columns {
    /// `left[g][s]` column of `g . s`.
    left: Vec<Vec<Option<usize>>>,
    zpure: Vec<Option<usize>>,
    origin: Vec<Origin>,
}

impl GradedQuotient {
    fn zrank(&self) -> u32 {
        self.presentation.generators.len() as u32
    }

    fn build_slice(&self, d: usize, shapes: &[(usize, usize, usize)], budget: usize) -> Result<Slice, GradeAlgError> {
        let p = &self.presentation;
        let ngen = p.generators.len();
        if d == 0 {
            let basis: Vec<Monomial> = (0..p.vertices).map(Monomial::idempotent).collect();
            return Ok(Slice {
                origin: (0..p.vertices).map(|v| Origin::ZPure { vertex: v }).collect(),
                keys: (0..p.vertices).map(|v| vec![v as u32]).collect(),
                basis,
                lmul: vec![Vec::new(); ngen],
                zmul: Vec::new(),
                candidates: p.vertices,
                ideal_rank: 0,
            });
        }

        // candidates with their order keys
        let mut cands: Vec<(Vec<u32>, Origin, Monomial)> = Vec::new();
        for (g, gen) in p.generators.iter().enumerate() {
            if gen.degree > d {
                continue;
            }
            let src = &self.slices[d - gen.degree];
            for (s, m) in src.basis.iter().enumerate() {
                if m.head != gen.tail {
                    continue;
                }
                let mut key = Vec::with_capacity(src.keys[s].len() + 1);
                key.push(g as u32);
                key.extend_from_slice(&src.keys[s]);
                let mut word = Vec::with_capacity(m.word.len() + 1);
                word.push(g);
                word.extend_from_slice(&m.word);
                cands.push((
                    key,
                    Origin::Left { generator: g, source: s },
                    Monomial {
                        word,
                        zpow: m.zpow,
                        tail: m.tail,
                        head: gen.head,
                    },
                ));
            }
        }
        if p.central.is_some() && d.is_multiple_of(2) {
            for v in 0..p.vertices {
                let mut key = vec![self.zrank(); d / 2];
                key.push(v as u32);
                cands.push((key, Origin::ZPure { vertex: v }, Monomial::zpure(v, d / 2)));
            }
        }
        if cands.len() > budget {
            return Err(GradeAlgError::BudgetExceeded {
                degree: d,
                count: cands.len(),
                budget,
            });
        }
        // descending monomial order: column 0 is the largest monomial
        cands.sort_by(|a, b| b.0.cmp(&a.0));

        let mut cols = Columns {
            left: p
                .generators
                .iter()
                .map(|g| {
                    if g.degree <= d {
                        vec![None; self.slices[d - g.degree].basis.len()]
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
            zpure: vec![None; p.vertices],
            origin: Vec::with_capacity(cands.len()),
        };
        for (c, (_, o, _)) in cands.iter().enumerate() {
            match *o {
                Origin::Left { generator, source } => cols.left[generator][source] = Some(c),
                Origin::ZPure { vertex } => cols.zpure[vertex] = Some(c),
            }
            cols.origin.push(*o);
        }

        // relation multiples rel . z^k . s with s standard
        let mut ech = Echelon::new(cands.len());
        for (ri, &(rdeg, rtail, _)) in shapes.iter().enumerate() {
            let mut k = 0;
            while rdeg + 2 * k <= d {
                if k > 0 && p.central.is_none() {
                    break;
                }
                let sdeg = d - rdeg - 2 * k;
                for (s, m) in self.slices[sdeg].basis.iter().enumerate() {
                    if m.head != rtail {
                        continue;
                    }
                    let row = self.relation_row(ri, k, sdeg, s, &cols)?;
                    ech.insert(row);
                }
                k += 1;
            }
        }

        // standard monomials are the free columns
        let free = ech.free_columns();
        let mut basis_index = vec![None; cands.len()];
        for (b, &c) in free.iter().enumerate() {
            basis_index[c] = Some(b);
        }
        let nf_col = |c: usize| -> SparseVec {
            match basis_index[c] {
                Some(b) => SparseVec::unit(b),
                None => {
                    let row = ech.pivot_row(c).expect("pivot column");
                    let mut v = SparseVec::new();
                    for (j, x) in row.iter() {
                        if j != c {
                            v.axpy(&-x.clone(), &SparseVec::unit(basis_index[j].expect("free column")));
                        }
                    }
                    v
                }
            }
        };
        let lmul: Vec<Vec<SparseVec>> = cols
            .left
            .iter()
            .map(|per_src| per_src.iter().map(|c| c.map(nf_col).unwrap_or_default()).collect())
            .collect();
        let zpure_nf: Vec<Option<SparseVec>> = cols.zpure.iter().map(|c| c.map(nf_col)).collect();

        let mut basis = Vec::with_capacity(free.len());
        let mut origin = Vec::with_capacity(free.len());
        let mut keys = Vec::with_capacity(free.len());
        for &c in &free {
            basis.push(cands[c].2.clone());
            origin.push(cands[c].1);
            keys.push(cands[c].0.clone());
        }

        // z . s for s in degree d - 2
        let mut zmul = Vec::new();
        if p.central.is_some() && d >= 2 {
            let src = &self.slices[d - 2];
            zmul = (0..src.basis.len())
                .map(|s| match src.origin[s] {
                    Origin::ZPure { vertex } => zpure_nf[vertex].clone().expect("even degree"),
                    Origin::Left { generator, source } => {
                        let deg_g = p.generators[generator].degree;
                        // z . (g . t) = g . (z . t)
                        let zt = &self.slices[d - deg_g].zmul[source];
                        let mut acc = SparseVec::new();
                        for (t, c) in zt.iter() {
                            acc.axpy(c, &lmul[generator][t]);
                        }
                        acc
                    }
                })
                .collect();
        }

        Ok(Slice {
            basis,
            origin,
            keys,
            lmul,
            zmul,
            candidates: cands.len(),
            ideal_rank: ech.rank(),
        })
    }

    /// Image of `rel . z^k . s` in candidate coordinates of degree `d`.
    fn relation_row(&self, ri: usize, k: usize, sdeg: usize, s: usize, cols: &Columns) -> Result<SparseVec, GradeAlgError> {
        let p = &self.presentation;
        let mut row = SparseVec::new();
        for (c, m) in &p.relations[ri].terms {
            let zk = m.zpow + k;
            if let Some((&first, rest)) = m.word.split_first() {
                // first . (rest . z^zk . s)
                let mut v = SparseVec::unit(s);
                let mut deg = sdeg;
                for _ in 0..zk {
                    v = self.zmul_vec(deg, &v);
                    deg += 2;
                }
                for &g in rest.iter().rev() {
                    v = self.lmul_vec(g, deg, &v);
                    deg += p.generators[g].degree;
                }
                for (t, x) in v.iter() {
                    let col = cols.left[first][t].expect("composable candidate");
                    row.axpy(&(c * x), &SparseVec::unit(col));
                }
            } else {
                // z^zk . s with zk >= 1
                match self.slices[sdeg].origin[s] {
                    Origin::ZPure { vertex } => {
                        let col = cols.zpure[vertex].expect("even degree");
                        row.axpy(c, &SparseVec::unit(col));
                    }
                    Origin::Left { generator, source } => {
                        let mut v = SparseVec::unit(source);
                        let mut deg = sdeg - p.generators[generator].degree;
                        for _ in 0..zk {
                            v = self.zmul_vec(deg, &v);
                            deg += 2;
                        }
                        for (t, x) in v.iter() {
                            let col = cols.left[generator][t].expect("composable candidate");
                            row.axpy(&(c * x), &SparseVec::unit(col));
                        }
                    }
                }
            }
        }
        Ok(row)
    }

    /// Left multiplication by generator `g` of a vector in degree `deg`.
    fn lmul_vec(&self, g: usize, deg: usize, v: &SparseVec) -> SparseVec {
        let target = deg + self.presentation.generators[g].degree;
        let table = &self.slices[target].lmul[g];
        let mut acc = SparseVec::new();
        for (t, c) in v.iter() {
            acc.axpy(c, &table[t]);
        }
        acc
    }

    fn zmul_vec(&self, deg: usize, v: &SparseVec) -> SparseVec {
        let table = &self.slices[deg + 2].zmul;
        let mut acc = SparseVec::new();
        for (t, c) in v.iter() {
            acc.axpy(c, &table[t]);
        }
        acc
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn vertices(&self) -> usize {
        self.presentation.vertices
    }

    /// Dimension of the degree-`d` slice; zero above the built range when the
    /// algebra is known to vanish there.
    pub fn dim(&self, d: usize) -> usize {
        self.slices.get(d).map_or(0, |s| s.basis.len())
    }

    pub fn total_dim(&self) -> usize {
        self.slices.iter().map(|s| s.basis.len()).sum()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slices.iter().map(|s| s.basis.len()).collect()
    }

    pub fn basis(&self, d: usize) -> &[Monomial] {
        &self.slices[d].basis
    }

    /// Number of candidate monomials and ideal rank in degree `d`.
    pub fn slice_stats(&self, d: usize) -> (usize, usize) {
        (self.slices[d].candidates, self.slices[d].ideal_rank)
    }

    /// `table[d][i][j] = dim e_i A_d e_j` (head `i`, tail `j`).
    pub fn dimension_table(&self) -> Vec<Vec<Vec<usize>>> {
        let n = self.vertices();
        self.slices
            .iter()
            .map(|s| {
                let mut t = vec![vec![0usize; n]; n];
                for m in &s.basis {
                    t[m.head][m.tail] += 1;
                }
                t
            })
            .collect()
    }

    /// Smallest degree from which the algebra is provably zero, if the built
    /// range shows it: enough consecutive zero slices to cover every generator
    /// degree.
    pub fn vanishes_from(&self) -> Option<usize> {
        let p = &self.presentation;
        let mut span = p.generators.iter().map(|g| g.degree).max().unwrap_or(1);
        if p.central.is_some() {
            span = span.max(2);
        }
        let mut run = 0;
        for d in 0..=self.max_degree {
            if self.dim(d) == 0 {
                run += 1;
                if run >= span {
                    return Some(d + 1 - run);
                }
            } else {
                run = 0;
            }
        }
        None
    }

    /// Whether degree `d` is known to be zero (inside or beyond the built range).
    pub fn is_zero_degree(&self, d: usize) -> bool {
        if d <= self.max_degree {
            self.dim(d) == 0
        } else {
            self.vanishes_from().is_some_and(|v| d >= v)
        }
    }

    fn check_degree(&self, d: usize) -> Result<bool, GradeAlgError> {
        if d <= self.max_degree {
            Ok(true)
        } else if self.is_zero_degree(d) {
            Ok(false)
        } else {
            Err(GradeAlgError::DegreeOverflow {
                degree: d,
                max_degree: self.max_degree,
            })
        }
    }

    pub fn basis_element(&self, d: usize, i: usize) -> Element {
        Element {
            degree: d,
            coords: SparseVec::unit(i),
        }
    }

    pub fn idempotent(&self, v: usize) -> Element {
        self.basis_element(0, v)
    }

    pub fn one(&self) -> Element {
        Element {
            degree: 0,
            coords: SparseVec::from_pairs((0..self.vertices()).map(|v| (v, Q::one()))),
        }
    }

    /// The generator `g` as an element.
    pub fn generator(&self, g: usize) -> Result<Element, GradeAlgError> {
        let gen = &self.presentation.generators[g];
        let e = Element {
            degree: 0,
            coords: SparseVec::unit(gen.tail),
        };
        self.left_generator(g, &e)
    }

    /// `z` as an element, i.e. `sum_i z e_i`.
    pub fn central_element(&self) -> Result<Element, GradeAlgError> {
        self.left_central(&self.one())
    }

    /// Normal form of a monomial of the free algebra.
    pub fn monomial(&self, m: &Monomial) -> Result<Element, GradeAlgError> {
        let mut e = Element {
            degree: 0,
            coords: SparseVec::unit(m.tail),
        };
        for _ in 0..m.zpow {
            e = self.left_central(&e)?;
        }
        for &g in m.word.iter().rev() {
            e = self.left_generator(g, &e)?;
        }
        Ok(e)
    }

    pub fn left_generator(&self, g: usize, x: &Element) -> Result<Element, GradeAlgError> {
        let d = x.degree + self.presentation.generators[g].degree;
        if !self.check_degree(d)? {
            return Ok(Element::zero(d));
        }
        Ok(Element {
            degree: d,
            coords: self.lmul_vec(g, x.degree, &x.coords),
        })
    }

    pub fn left_central(&self, x: &Element) -> Result<Element, GradeAlgError> {
        if self.presentation.central.is_none() {
            return Err(GradeAlgError::InvalidPresentation("no central generator".into()));
        }
        let d = x.degree + 2;
        if !self.check_degree(d)? {
            return Ok(Element::zero(d));
        }
        Ok(Element {
            degree: d,
            coords: self.zmul_vec(x.degree, &x.coords),
        })
    }

    /// Product of two homogeneous elements.
    pub fn product(&self, x: &Element, y: &Element) -> Result<Element, GradeAlgError> {
        let d = x.degree + y.degree;
        if !self.check_degree(d)? {
            return Ok(Element::zero(d));
        }
        let mut acc = SparseVec::new();
        for (s, c) in x.coords.iter() {
            let m = &self.slices[x.degree].basis[s];
            let mut v = Element {
                degree: y.degree,
                coords: y.coords.remap(|t| (self.slices[y.degree].basis[t].head == m.tail).then_some(t)),
            };
            for _ in 0..m.zpow {
                v = self.left_central(&v)?;
            }
            for &g in m.word.iter().rev() {
                v = self.left_generator(g, &v)?;
            }
            acc.axpy(c, &v.coords);
        }
        Ok(Element { degree: d, coords: acc })
    }

    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element, GradeAlgError> {
        Ok(self.product(x, y)?.sub(&self.product(y, x)?))
    }

    /// Elements generating the algebra: idempotents and generators.
    fn algebra_generators(&self) -> Result<Vec<Element>, GradeAlgError> {
        let mut out: Vec<Element> = (0..self.vertices()).map(|v| self.idempotent(v)).collect();
        for g in 0..self.presentation.generators.len() {
            if self.presentation.generators[g].degree <= self.max_degree {
                out.push(self.generator(g)?);
            }
        }
        Ok(out)
    }

    /// `[A, A]` in degree `d`, spanned by `[g, y]` for algebra generators `g`
    /// (idempotents included) and basis elements `y`; this equals the span of
    /// all commutators of homogeneous elements.
    pub fn commutator_subspace(&self, d: usize) -> Result<Subspace, GradeAlgError> {
        if d > self.max_degree {
            return Err(GradeAlgError::DegreeOverflow {
                degree: d,
                max_degree: self.max_degree,
            });
        }
        let mut sub = Subspace::zero(self.dim(d));
        for g in self.algebra_generators()? {
            if g.degree > d {
                continue;
            }
            for y in 0..self.dim(d - g.degree) {
                let c = self.commutator(&g, &self.basis_element(d - g.degree, y))?;
                sub.insert(c.coords);
            }
        }
        Ok(sub)
    }

    /// `[A, A]` in degree `d` from every pair of basis elements. Quadratic in
    /// the slice sizes; meant as a cross-check on small algebras.
    pub fn commutator_subspace_all_pairs(&self, d: usize) -> Result<Subspace, GradeAlgError> {
        if d > self.max_degree {
            return Err(GradeAlgError::DegreeOverflow {
                degree: d,
                max_degree: self.max_degree,
            });
        }
        let mut sub = Subspace::zero(self.dim(d));
        for a in 0..=d {
            for x in 0..self.dim(a) {
                for y in 0..self.dim(d - a) {
                    let c = self.commutator(&self.basis_element(a, x), &self.basis_element(d - a, y))?;
                    sub.insert(c.coords);
                }
            }
        }
        Ok(sub)
    }

    /// Center in degree `d`: solutions of `[x, g] = 0` for all algebra generators.
    pub fn center_subspace(&self, d: usize) -> Result<Subspace, GradeAlgError> {
        if d > self.max_degree {
            return Err(GradeAlgError::DegreeOverflow {
                degree: d,
                max_degree: self.max_degree,
            });
        }
        let gens = self.algebra_generators()?;
        // column s = concatenated images [basis_s, g] over all generators
        let mut columns = Vec::with_capacity(self.dim(d));
        let mut offsets = Vec::with_capacity(gens.len());
        let mut total = 0;
        for g in &gens {
            offsets.push(total);
            let td = d + g.degree;
            total += if td <= self.max_degree { self.dim(td) } else { 0 };
        }
        for s in 0..self.dim(d) {
            let x = self.basis_element(d, s);
            let mut col = Vec::new();
            for (g, off) in gens.iter().zip(&offsets) {
                let c = self.commutator(&x, g)?;
                col.extend(c.coords.iter().map(|(i, v)| (i + off, v.clone())));
            }
            columns.push(SparseVec::from_pairs(col));
        }
        let m = RationalMatrix::from_columns(total, &columns);
        let r = crate::exactlin::rref(&m);
        Ok(Subspace::span(self.dim(d), r.nullspace))
    }

    /// Renders an element as a sum of monomials.
    pub fn render(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.coords
            .iter()
            .map(|(i, c)| format!("{}*{}", fmt_q(c), self.presentation.render(&self.slices[x.degree].basis[i])))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for GradedQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in 0..=self.max_degree {
            let names: Vec<String> = self.slices[d].basis.iter().map(|m| self.presentation.render(m)).collect();
            writeln!(f, "degree {d} (dim {}): {}", names.len(), names.join(", "))?;
        }
        Ok(())
    }
}

/// Predicted matrix Hilbert series `(1 - t^{2h})/(1 - t^2) (1 - C t + t^2)^{-1}`,
/// expanded through degree `2(h-2) + 2`.
pub fn hilbert_matrix_predicted(datum: &CartanDatum) -> PolyMatrix {
    let h = build_root_system(datum).coxeter;
    let r = datum.rank;
    let top = 2 * (h - 2);
    let trunc = top + 2;
    let neg_adj = RationalMatrix::from_i64(&datum.adjacency.iter().map(|row| row.iter().map(|x| -x).collect()).collect::<Vec<_>>());
    let pencil = PolyMatrix::from_coefficients(trunc, vec![RationalMatrix::identity(r), neg_adj, RationalMatrix::identity(r)]);
    let inv = crate::exactlin::series_inverse(&pencil, trunc).expect("constant term is the identity");
    let geometric: Vec<Q> = (0..=trunc).map(|k| if k % 2 == 0 && k < 2 * h { Q::one() } else { Q::zero() }).collect();
    let hm = inv.mul_scalar_poly(&geometric);
    for k in 0..=trunc {
        for i in 0..r {
            for j in 0..r {
                let c = hm.coeff(k, i, j);
                assert!(c.is_integer() && *c >= Q::zero(), "Hilbert coefficient not a nonnegative integer");
                if k > top {
                    assert!(c.is_zero(), "Hilbert series does not vanish above the socle");
                }
            }
        }
    }
    hm
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.word.len(), &self.word, self.zpow, self.tail, self.head).cmp(&(
            other.word.len(),
            &other.word,
            other.zpow,
            other.tail,
            other.head,
        ))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_cartan, Family};

    fn a_mu(f: Family, n: usize, mu: &Weight, max: usize) -> GradedQuotient {
        let d = build_cartan(f, n).unwrap();
        build_graded(&preprojective_presentation(&d, mu, true).unwrap(), max).unwrap()
    }

    #[test]
    fn a2_relations() {
        let d = build_cartan(Family::A, 2).unwrap();
        let p = preprojective_presentation(&d, &Weight::rho(2), true).unwrap();
        let text = p.to_text();
        assert!(text.contains("rel - a1*.a1 - z.e1"), "{text}");
        assert!(text.contains("rel a1.a1* - z.e2"), "{text}");
        let p0 = preprojective_presentation(&d, &Weight::rho(2), false).unwrap();
        assert!(p0.to_text().contains("rel a1.a1*\n"));
        assert!(matches!(
            preprojective_presentation(&d, &Weight::from_ints(&[1, -1]), true),
            Err(GradeAlgError::IrregularWeight(_))
        ));
    }

    #[test]
    fn a2_dimensions() {
        let gq = a_mu(Family::A, 2, &Weight::rho(2), 4);
        assert_eq!(gq.dims(), vec![2, 2, 2, 0, 0]);
        assert_eq!(gq.total_dim(), 6);
        assert_eq!(gq.vanishes_from(), Some(3));
    }

    #[test]
    fn a2_product_reduces_relation() {
        let gq = a_mu(Family::A, 2, &Weight::rho(2), 4);
        let (a, astar) = (gq.generator(0).unwrap(), gq.generator(1).unwrap());
        let z = gq.central_element().unwrap();
        let ze2 = gq.product(&z, &gq.idempotent(1)).unwrap();
        assert_eq!(gq.product(&a, &astar).unwrap(), ze2);
        let ze1 = gq.product(&z, &gq.idempotent(0)).unwrap();
        assert_eq!(gq.product(&astar, &a).unwrap(), ze1.scaled(&q(-1)));
    }

    #[test]
    fn idempotents_multiply() {
        let gq = a_mu(Family::A, 3, &Weight::rho(3), 2);
        for i in 0..3 {
            for j in 0..3 {
                let p = gq.product(&gq.idempotent(i), &gq.idempotent(j)).unwrap();
                let expected = if i == j { gq.idempotent(i) } else { Element::zero(0) };
                assert_eq!(p, expected);
            }
        }
    }

    #[test]
    fn z_is_central() {
        let gq = a_mu(Family::A, 3, &Weight::from_ints(&[2, 5, 3]), 6);
        let z = gq.central_element().unwrap();
        for d in 0..=4 {
            for i in 0..gq.dim(d) {
                let x = gq.basis_element(d, i);
                assert!(gq.commutator(&z, &x).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn free_algebra_count() {
        // no relations: degree 2 = paths of length 2 plus z e_i
        let d = build_cartan(Family::A, 2).unwrap();
        let mut p = preprojective_presentation(&d, &Weight::rho(2), true).unwrap();
        p.relations.clear();
        let gq = build_graded(&p, 2).unwrap();
        assert_eq!(gq.dim(2), 2 + 2);
        assert_eq!(free_monomial_counts(&p, 3), vec![2, 2, 4, 4]);
    }

    #[test]
    fn free_counts_b() {
        // words in two degree-2 letters times powers of z
        let p = b_presentation([1, 2, 4], true);
        assert_eq!(free_monomial_counts(&p, 6), vec![1, 0, 3, 0, 7, 0, 15]);
    }

    #[test]
    fn b_d4_relations_and_dims() {
        let p = b_presentation([1, 1, 1], false);
        assert_eq!(p.relations.len(), 4);
        let text = p.to_text();
        assert!(text.contains("rel U1.U1 + U1.z"), "{text}");
        let gq = build_graded(&p, 2).unwrap();
        assert_eq!(gq.dim(2), 3);
        let e = b_presentation([1, 1, 1], true);
        assert_eq!(e.generators.len(), 2);
    }

    #[test]
    fn b_e6_relation_degrees() {
        let p = b_presentation([1, 2, 2], false);
        let degs: Vec<usize> = (1..4).map(|i| p.relation_shape(i).unwrap().0).collect();
        assert_eq!(degs, vec![4, 6, 6]);
    }

    #[test]
    fn center_and_commutators_a2() {
        let gq = a_mu(Family::A, 2, &Weight::rho(2), 4);
        assert_eq!(gq.commutator_subspace(0).unwrap().dim(), 0);
        let c2 = gq.commutator_subspace(2).unwrap();
        assert_eq!(c2.dim(), 1);
        assert!(c2.contains(&gq.central_element().unwrap().coords));
        let z0 = gq.center_subspace(0).unwrap();
        assert_eq!(z0.dim(), 1);
        assert!(z0.contains(&gq.one().coords));
        assert_eq!(gq.center_subspace(2).unwrap().dim(), 2);
    }

    #[test]
    fn commutator_generators_match_all_pairs() {
        let gq = a_mu(Family::A, 3, &Weight::from_ints(&[3, 1, 7]), 6);
        for d in 0..=6 {
            assert_eq!(gq.commutator_subspace(d).unwrap(), gq.commutator_subspace_all_pairs(d).unwrap());
        }
    }

    #[test]
    fn degree_overflow() {
        let d = build_cartan(Family::A, 3).unwrap();
        let gq = build_graded(&preprojective_presentation(&d, &Weight::rho(3), true).unwrap(), 2).unwrap();
        let a = gq.generator(0).unwrap();
        let x = gq.basis_element(2, 0);
        assert!(matches!(gq.product(&a, &x), Err(GradeAlgError::DegreeOverflow { .. })));
    }

    #[test]
    fn budget_refusal() {
        let d = build_cartan(Family::D, 4).unwrap();
        let p = preprojective_presentation(&d, &Weight::rho(4), true).unwrap();
        match build_graded_with_budget(&p, 8, 10) {
            Err(GradeAlgError::BudgetExceeded { degree, count, budget }) => {
                assert_eq!(budget, 10);
                assert!(count > 10);
                assert!(degree >= 1);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn hilbert_a2() {
        let d = build_cartan(Family::A, 2).unwrap();
        let h = hilbert_matrix_predicted(&d);
        assert_eq!(h.entry(0, 0), vec![q(1), q(0), q(1), q(0), q(0)]);
        assert_eq!(h.entry(0, 1), vec![q(0), q(1), q(0), q(0), q(0)]);
        let total: Q = (0..=h.trunc()).flat_map(|k| (0..2).flat_map(move |i| (0..2).map(move |j| (k, i, j)))).map(|(k, i, j)| h.coeff(k, i, j).clone()).sum();
        assert_eq!(total, q(6));
        assert_eq!(h.coeff_matrix(0), RationalMatrix::identity(2));
    }

    #[test]
    fn text_round_trip() {
        let d = build_cartan(Family::D, 4).unwrap();
        let p = preprojective_presentation(&d, &Weight::parse("3/2,1,5,2").unwrap(), true).unwrap();
        assert_eq!(Presentation::from_text(&p.to_text()).unwrap(), p);
        let b = b_presentation([1, 2, 2], true);
        assert_eq!(Presentation::from_text(&b.to_text()).unwrap(), b);
    }

    #[test]
    fn text_errors() {
        assert!(matches!(
            Presentation::from_text("vertices 2\ngen a 1 2\ngen b 1 2\nrel a.b\n"),
            Err(GradeAlgError::Parse { line: 4, .. })
        ));
        assert!(matches!(
            Presentation::from_text("vertices 2\ngen a 1 2\nrel a - e1\n"),
            Err(GradeAlgError::InhomogeneousRelation { .. })
        ));
        assert!(matches!(
            Presentation::from_text("vertices 1\nfoo\n"),
            Err(GradeAlgError::Parse { line: 2, .. })
        ));
    }
}

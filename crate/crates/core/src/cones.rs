//! Cones generated by a finite set `f`: quadratic module `Q(f)`,
//! preordering `T(f)`, semiring `S(f)` and the S-module
//! `C(f,g) = g_0 S(f) + ⋯ + g_r S(f)`.
//!
//! Only finite, LP-representable pieces of these cones are ever built. An
//! Archimedean witness found here is an exact certificate; failing to find
//! one says nothing.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certs::{self, Certificate, Extra, LinearProgram, LpOutcome, Term, Variant};
use crate::poly::{monomials_up_to, MultiIndex, Polynomial};
use crate::rational::{self, Rational};

pub const DEFAULT_MAX_BASIS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("basis exceeds the cap of {cap} elements")]
    TooLarge { cap: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cone has no generators to fix its dimension")]
    Empty,
    #[error("generator {0} is constant; semiring powers would be unbounded")]
    ConstantGenerator(usize),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(String),
    #[error("bounded-element identity failed to expand exactly")]
    IdentityFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    #[serde(alias = "quadratic-module", alias = "qm")]
    QuadraticModule,
    Preordering,
    Semiring,
    #[serde(rename = "smodule", alias = "s_module", alias = "s-module")]
    SModule,
}

impl ConeKind {
    fn is_quadratic(self) -> bool {
        matches!(self, ConeKind::QuadraticModule | ConeKind::Preordering)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConeSpecJson")]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub f: Vec<Polynomial>,
    /// Multipliers besides the implied `g_0 = 1`; only used by S-modules.
    #[serde(default)]
    pub g: Vec<Polynomial>,
}

#[derive(Deserialize)]
struct ConeSpecJson {
    kind: ConeKind,
    f: Vec<Polynomial>,
    #[serde(default)]
    g: Vec<Polynomial>,
}

impl TryFrom<ConeSpecJson> for ConeSpec {
    type Error = ConeError;
    fn try_from(j: ConeSpecJson) -> Result<Self, ConeError> {
        ConeSpec::new(j.kind, j.f, j.g)
    }
}

impl ConeSpec {
    /// Validates dimensions. Polynomials parsed from text get the smallest
    /// dimension that fits them, so everything is lifted to the largest
    /// dimension present.
    pub fn new(kind: ConeKind, f: Vec<Polynomial>, g: Vec<Polynomial>) -> Result<Self, ConeError> {
        let dim = f
            .iter()
            .chain(&g)
            .map(Polynomial::dim)
            .max()
            .ok_or(ConeError::Empty)?;
        let lift = |v: Vec<Polynomial>| -> Result<Vec<Polynomial>, ConeError> {
            v.into_iter()
                .map(|p| p.embed(dim).map_err(|_| ConeError::DimensionMismatch(dim, p.dim())))
                .collect()
        };
        let f = lift(f)?;
        let one = Polynomial::one(dim);
        let g = lift(g)?.into_iter().filter(|p| *p != one).collect();
        Ok(ConeSpec { kind, f, g })
    }

    pub fn dim(&self) -> usize {
        self.f
            .first()
            .or(self.g.first())
            .map_or(0, Polynomial::dim)
    }

    /// `[1, g_1, …, g_r]`.
    pub fn multipliers(&self) -> Vec<Polynomial> {
        let mut m = vec![Polynomial::one(self.dim())];
        if self.kind == ConeKind::SModule {
            m.extend(self.g.iter().cloned());
        }
        m
    }

    /// Membership in `K`: every `f_j ≥ 0`, and for S-modules every `g_j ≥ 0`.
    pub fn contains_point(&self, t: &[Rational]) -> bool {
        let defining = self
            .f
            .iter()
            .chain(if self.kind == ConeKind::SModule { &self.g[..] } else { &[] });
        defining
            .into_iter()
            .all(|p| p.eval(t).is_ok_and(|v| !v.is_negative()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub exponents: Vec<u32>,
    pub multiplier_index: usize,
    pub value: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConeElementBasis {
    pub elements: Vec<BasisElement>,
}

impl ConeElementBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn enumerate_basis(c: &ConeSpec, degree_bound: u32) -> Result<ConeElementBasis, ConeError> {
    enumerate_basis_capped(c, degree_bound, DEFAULT_MAX_BASIS)
}

/// Generator products of degree `≤ degree_bound`:
/// preordering → square-free products `f^e`, `e ∈ {0,1}^k`;
/// semiring → all `f^n`; S-module → `g_j · f^n`;
/// quadratic module → `1` and the generators themselves.
pub fn enumerate_basis_capped(
    c: &ConeSpec,
    degree_bound: u32,
    cap: usize,
) -> Result<ConeElementBasis, ConeError> {
    let dim = c.dim();
    let k = c.f.len();
    let degs: Vec<i64> = c.f.iter().map(Polynomial::total_degree).collect();
    let mut elements = Vec::new();
    let mut push = |exponents: Vec<u32>, multiplier_index: usize, value: Polynomial| {
        if elements.len() >= cap {
            return Err(ConeError::TooLarge { cap });
        }
        elements.push(BasisElement {
            exponents,
            multiplier_index,
            value,
        });
        Ok(())
    };
    match c.kind {
        ConeKind::QuadraticModule => {
            push(vec![0; k], 0, Polynomial::one(dim))?;
            for (i, f) in c.f.iter().enumerate() {
                let mut e = vec![0; k];
                e[i] = 1;
                push(e, 0, f.clone())?;
            }
        }
        ConeKind::Preordering => {
            if k > 24 {
                return Err(ConeError::TooLarge { cap });
            }
            for mask in 0..(1usize << k) {
                let e: Vec<u32> = (0..k).map(|i| ((mask >> i) & 1) as u32).collect();
                let deg: i64 = (0..k).filter(|i| e[*i] == 1).map(|i| degs[i].max(0)).sum();
                if deg > degree_bound as i64 {
                    continue;
                }
                let value = c
                    .f
                    .iter()
                    .zip(&e)
                    .filter(|(_, x)| **x == 1)
                    .fold(Polynomial::one(dim), |acc, (f, _)| &acc * f);
                push(e, 0, value)?;
            }
        }
        ConeKind::Semiring | ConeKind::SModule => {
            if let Some(i) = degs.iter().position(|d| *d <= 0) {
                return Err(ConeError::ConstantGenerator(i));
            }
            for (j, g) in c.multipliers().iter().enumerate() {
                let room = degree_bound as i64 - g.total_degree().max(0);
                if room < 0 {
                    continue;
                }
                for e in exponent_vectors(&degs, room as u32, cap)? {
                    let value = c
                        .f
                        .iter()
                        .zip(e.exponents())
                        .fold(g.clone(), |acc, (f, &n)| if n > 0 { &acc * &f.pow(n) } else { acc });
                    push(e.exponents().to_vec(), j, value)?;
                }
            }
        }
    }
    Ok(ConeElementBasis { elements })
}

/// Exponent vectors `n` with `Σ n_i deg f_i ≤ bound`, in graded-lex order.
fn exponent_vectors(degs: &[i64], bound: u32, cap: usize) -> Result<Vec<MultiIndex>, ConeError> {
    fn rec(
        degs: &[i64],
        i: usize,
        left: i64,
        cur: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
        cap: usize,
    ) -> Result<(), ConeError> {
        if i == degs.len() {
            if out.len() >= cap {
                return Err(ConeError::TooLarge { cap });
            }
            out.push(MultiIndex::new(cur.clone()));
            return Ok(());
        }
        let mut n = 0;
        while n as i64 * degs[i] <= left {
            cur.push(n);
            rec(degs, i + 1, left - n as i64 * degs[i], cur, out, cap)?;
            cur.pop();
            n += 1;
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(degs, 0, bound as i64, &mut Vec::new(), &mut out, cap)?;
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessShape {
    /// `λ − x_k² ∈ C`
    LambdaMinusSquare,
    /// `λ + x_k ∈ C` and `λ − x_k ∈ C`
    LambdaPlusMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArchimedeanWitness {
    /// 0-based variable index.
    pub variable: usize,
    #[serde(with = "rational::as_string")]
    pub lambda: Rational,
    pub shape: WitnessShape,
    /// One certificate for `λ − x_k²`, or two for `λ + x_k` and `λ − x_k`.
    pub certificates: Vec<Certificate>,
}

impl ArchimedeanWitness {
    pub fn verify(&self) -> bool {
        !self.certificates.is_empty() && self.certificates.iter().all(Certificate::verify)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Witness(ArchimedeanWitness),
    /// No witness of the searched shapes within the degree bound. Not a
    /// proof that the cone fails to be Archimedean.
    Inconclusive { variable: usize },
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&ArchimedeanWitness> {
        match self {
            WitnessOutcome::Witness(w) => Some(w),
            WitnessOutcome::Inconclusive { .. } => None,
        }
    }
}

/// LP-searchable cone elements: for quadratic kinds the basis products
/// times diagonal squares `x^{2β}`, for semiring kinds the basis itself.
struct SearchBasis {
    terms: Vec<Term>,
    values: Vec<Polynomial>,
}

fn search_basis(c: &ConeSpec, degree_bound: u32) -> Result<SearchBasis, ConeError> {
    let base = enumerate_basis(c, degree_bound)?;
    let mut terms = Vec::new();
    let mut values = Vec::new();
    for b in &base.elements {
        let room = degree_bound as i64 - b.value.total_degree().max(0);
        if room < 0 {
            continue;
        }
        let squares: Vec<Option<MultiIndex>> = if c.kind.is_quadratic() {
            monomials_up_to(c.dim(), room as u32 / 2)
                .into_iter()
                .map(|beta| (beta.degree() > 0).then(|| beta.scale(2)))
                .collect()
        } else {
            vec![None]
        };
        for sq in squares {
            if terms.len() >= DEFAULT_MAX_BASIS {
                return Err(ConeError::TooLarge {
                    cap: DEFAULT_MAX_BASIS,
                });
            }
            values.push(match &sq {
                Some(e) => b.value.shift_by(e),
                None => b.value.clone(),
            });
            terms.push(Term {
                coeff: Rational::zero(),
                exponents: b.exponents.clone(),
                multiplier_index: b.multiplier_index,
                monomial: sq,
            });
        }
    }
    Ok(SearchBasis { terms, values })
}

/// Smallest `λ ≥ 0` with `λ + p ∈ span₊(basis)`, returned as a certificate
/// for `λ + p` (λ bumped to 1 when the LP returns 0). `basis` contains the
/// constant `1` first.
fn lambda_certificate(
    c: &ConeSpec,
    sb: &SearchBasis,
    p: &Polynomial,
    degree_bound: u32,
) -> Option<(Rational, Certificate)> {
    let dim = c.dim();
    // unknowns: basis coefficients, then λ; Σ c_i b_i − λ = p
    let monos: std::collections::BTreeSet<MultiIndex> = std::iter::once(MultiIndex::zero(dim))
        .chain(p.terms().map(|(e, _)| e.clone()))
        .chain(sb.values.iter().flat_map(|b| b.terms().map(|(e, _)| e.clone())))
        .collect();
    let n = sb.values.len();
    let zero = MultiIndex::zero(dim);
    let rows = monos
        .iter()
        .map(|e| {
            let mut r: Vec<Rational> = sb.values.iter().map(|b| b.coeff(e)).collect();
            r.push(if *e == zero { -Rational::one() } else { Rational::zero() });
            r
        })
        .collect();
    let rhs = monos.iter().map(|e| p.coeff(e)).collect();
    let mut objective = vec![Rational::zero(); n];
    objective.push(Rational::one());
    let lp = LinearProgram {
        num_vars: n + 1,
        rows,
        rhs,
        objective: Some(objective),
    };
    let LpOutcome::Feasible { mut assignment, .. } = certs::solve(&lp).ok()? else {
        return None;
    };
    let mut lambda = assignment.pop().expect("lambda column");
    if lambda.is_zero() {
        // 1 is always the first search element
        lambda = Rational::one();
        assignment[0] += Rational::one();
    }
    let target = p + &Polynomial::constant(dim, lambda.clone());
    let terms = sb
        .terms
        .iter()
        .zip(&assignment)
        .filter(|(_, a)| !a.is_zero())
        .map(|(t, a)| Term {
            coeff: a.clone(),
            ..t.clone()
        })
        .collect();
    let cert = Certificate {
        variant: Variant::Archimedean,
        target,
        generators: c.f.clone(),
        multipliers: c.multipliers(),
        terms,
        extra: Extra {
            degree_bound: Some(degree_bound),
            ..Extra::default()
        },
    };
    cert.verify().then_some((lambda, cert))
}

/// Raises the constant of an Archimedean certificate from its λ to `to`.
fn raise_lambda(cert: &mut Certificate, from: &Rational, to: &Rational) {
    let bump = to - from;
    if bump.is_zero() {
        return;
    }
    let dim = cert.dim();
    cert.target = &cert.target + &Polynomial::constant(dim, bump.clone());
    let k = cert.generators.len();
    match cert
        .terms
        .iter_mut()
        .find(|t| t.multiplier_index == 0 && t.monomial.is_none() && t.exponents.iter().all(|e| *e == 0))
    {
        Some(t) => t.coeff += bump,
        None => cert.terms.insert(
            0,
            Term {
                coeff: bump,
                exponents: vec![0; k],
                multiplier_index: 0,
                monomial: None,
            },
        ),
    }
}

fn plus_minus_witness(
    c: &ConeSpec,
    sb: &SearchBasis,
    k: usize,
    degree_bound: u32,
) -> Option<ArchimedeanWitness> {
    let x = Polynomial::var(c.dim(), k);
    let (lp, mut cp) = lambda_certificate(c, sb, &x, degree_bound)?;
    let (lm, mut cm) = lambda_certificate(c, sb, &-&x, degree_bound)?;
    let lambda = if lp > lm { lp.clone() } else { lm.clone() };
    raise_lambda(&mut cp, &lp, &lambda);
    raise_lambda(&mut cm, &lm, &lambda);
    let w = ArchimedeanWitness {
        variable: k,
        lambda,
        shape: WitnessShape::LambdaPlusMinus,
        certificates: vec![cp, cm],
    };
    w.verify().then_some(w)
}

/// Per-variable search for bounded-element witnesses. Quadratic kinds try
/// `λ − x_k²` first and then `λ ± x_k`; semiring kinds try `λ ± x_k`. Every
/// returned witness has passed exact verification.
pub fn archimedean_witness_search(c: &ConeSpec, degree_bound: u32) -> Vec<WitnessOutcome> {
    let dim = c.dim();
    let sb = search_basis(c, degree_bound).ok();
    (0..dim)
        .map(|k| {
            let Some(sb) = &sb else {
                return WitnessOutcome::Inconclusive { variable: k };
            };
            if c.kind.is_quadratic() {
                let x = Polynomial::var(dim, k);
                if let Some((lambda, cert)) = lambda_certificate(c, sb, &-&(&x * &x), degree_bound) {
                    return WitnessOutcome::Witness(ArchimedeanWitness {
                        variable: k,
                        lambda,
                        shape: WitnessShape::LambdaMinusSquare,
                        certificates: vec![cert],
                    });
                }
            }
            match plus_minus_witness(c, sb, k, degree_bound) {
                Some(w) => WitnessOutcome::Witness(w),
                None => WitnessOutcome::Inconclusive { variable: k },
            }
        })
        .collect()
}

/// Expansions behind the bounded-element lemma, each checked exactly:
/// `λ ± a = (1/2λ)[(λ² − a²) + (λ ± a)²]` and
/// `λ² − a² = (1/2λ)[(λ + a)²(λ − a) + (λ − a)²(λ + a)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedIdentities {
    pub plus: (Polynomial, Polynomial),
    pub minus: (Polynomial, Polynomial),
    pub converse: (Polynomial, Polynomial),
}

pub fn bounded_element_identities(
    lambda: &Rational,
    a: &Polynomial,
) -> Result<BoundedIdentities, ConeError> {
    if !lambda.is_positive() {
        return Err(ConeError::NonPositiveLambda(lambda.to_string()));
    }
    let dim = a.dim();
    let l = Polynomial::constant(dim, lambda.clone());
    let half_inv = Polynomial::constant(dim, (lambda * Rational::from_integer(2.into())).recip());
    let diff_sq = &(&l * &l) - &(a * a);
    let lp = &l + a;
    let lm = &l - a;
    let plus_rhs = &half_inv * &(&diff_sq + &(&lp * &lp));
    let minus_rhs = &half_inv * &(&diff_sq + &(&lm * &lm));
    let conv_rhs = &half_inv * &(&(&(&lp * &lp) * &lm) + &(&(&lm * &lm) * &lp));
    let ids = BoundedIdentities {
        plus: (lp, plus_rhs),
        minus: (lm, minus_rhs),
        converse: (diff_sq, conv_rhs),
    };
    if ids.plus.0 != ids.plus.1 || ids.minus.0 != ids.minus.1 || ids.converse.0 != ids.converse.1 {
        return Err(ConeError::IdentityFailed);
    }
    Ok(ids)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    /// `h ≥ 0` at every sample inside `K`; a necessary condition only.
    ConsistentNecessary { feasible_samples: usize },
    /// `h` is negative at a point of `K`, so it lies in none of the cones.
    RefutedAt {
        #[serde(with = "rational::vec_as_string")]
        point: Vec<Rational>,
        #[serde(with = "rational::as_string")]
        value: Rational,
    },
}

/// Evaluates `h` at the samples lying in `K` (see [`ConeSpec::contains_point`]).
pub fn membership_by_evaluation(c: &ConeSpec, h: &Polynomial, samples: &[Vec<Rational>]) -> Membership {
    let mut feasible = 0;
    for t in samples.iter().filter(|t| t.len() == c.dim() && c.contains_point(t)) {
        feasible += 1;
        if let Ok(v) = h.eval(t) {
            if v.is_negative() {
                return Membership::RefutedAt {
                    point: t.clone(),
                    value: v,
                };
            }
        }
    }
    Membership::ConsistentNecessary {
        feasible_samples: feasible,
    }
}

/// Uniform grid `{lo + i (hi − lo)/steps}^d`.
pub fn grid(dim: usize, lo: &Rational, hi: &Rational, steps: u32) -> Vec<Vec<Rational>> {
    let step = (hi - lo) / Rational::from_integer(steps.max(1).into());
    let axis: Vec<Rational> = (0..=steps)
        .map(|i| lo + &step * Rational::from_integer(i.into()))
        .collect();
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(a.clone());
                    q
                })
            })
            .collect();
    }
    out
}

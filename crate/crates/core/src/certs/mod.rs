//! Positivity certificates backed by an exact LP.
//!
//! Every constructor returns a [`Certificate`] whose identity has already
//! been re-expanded and checked with [`Certificate::verify`]; nothing here
//! trusts the LP's output without that second pass.

mod certificate;
pub mod lp;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use certificate::{Certificate, Extra, Term, Variant};
pub use lp::{solve, LinearProgram, LpError, LpOutcome};

use crate::cones::{enumerate_basis, ConeElementBasis, ConeError, ConeKind, ConeSpec};
use crate::poly::{binomial, MultiIndex, Polynomial};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("generator {index} is not linear (degree {degree})")]
    NonLinear { index: usize, degree: i64 },
    #[error("target has degree {0}, expected at most 1")]
    NonLinearTarget(i64),
    #[error("degree bound {bound} is below the target degree {degree}")]
    DegreeBound { bound: u32, degree: i64 },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("Bernstein identity needs k >= 2, got {0}")]
    InvalidK(u32),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("constructed identity failed exact verification")]
    VerificationFailed,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarkasResult {
    Certified(Certificate),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Certified(Certificate),
    NotFoundAtDegree(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyaResult {
    Certified { n: u32, certificate: Certificate },
    NotFoundUpTo(u32),
}

impl SearchResult {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SearchResult::Certified(c) => Some(c),
            SearchResult::NotFoundAtDegree(_) => None,
        }
    }
}

/// Solves `Σ c_i basis_i = target` over `c ≥ 0` by matching coefficients,
/// one LP row per monomial in graded-lex order.
pub fn match_coefficients(
    target: &Polynomial,
    basis: &[Polynomial],
) -> Result<Option<Vec<Rational>>, CertError> {
    for b in basis {
        if b.dim() != target.dim() {
            return Err(CertError::DimensionMismatch(target.dim(), b.dim()));
        }
    }
    let monos: BTreeSet<&MultiIndex> = target
        .terms()
        .map(|(e, _)| e)
        .chain(basis.iter().flat_map(|b| b.terms().map(|(e, _)| e)))
        .collect();
    let rows = monos
        .iter()
        .map(|e| basis.iter().map(|b| b.coeff(e)).collect())
        .collect();
    let rhs = monos.iter().map(|e| target.coeff(e)).collect();
    let lp = LinearProgram::feasibility(basis.len(), rows, rhs);
    match solve(&lp)? {
        LpOutcome::Feasible { assignment, .. } => Ok(Some(assignment)),
        _ => Ok(None),
    }
}

fn check_linear(f: &[Polynomial], dim: usize) -> Result<(), CertError> {
    for (index, g) in f.iter().enumerate() {
        if g.dim() != dim {
            return Err(CertError::DimensionMismatch(dim, g.dim()));
        }
        if g.total_degree() > 1 {
            return Err(CertError::NonLinear {
                index,
                degree: g.total_degree(),
            });
        }
    }
    Ok(())
}

fn checked(c: Certificate) -> Result<Certificate, CertError> {
    if c.verify() {
        Ok(c)
    } else {
        Err(CertError::VerificationFailed)
    }
}

/// Certificate from a cone basis and an LP solution; zero coefficients are
/// dropped.
fn from_basis(
    variant: Variant,
    target: &Polynomial,
    spec: &ConeSpec,
    basis: &ConeElementBasis,
    coeffs: &[Rational],
    degree_bound: u32,
) -> Result<Certificate, CertError> {
    let terms = basis
        .elements
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(b, c)| Term {
            coeff: c.clone(),
            exponents: b.exponents.clone(),
            multiplier_index: b.multiplier_index,
            monomial: None,
        })
        .collect();
    checked(Certificate {
        variant,
        target: target.clone(),
        generators: spec.f.clone(),
        multipliers: spec.multipliers(),
        terms,
        extra: Extra {
            degree_bound: Some(degree_bound),
            ..Extra::default()
        },
    })
}

/// `h = λ_0 + Σ λ_j f_j` with `λ ≥ 0`, for linear `h` and `f_j`. An
/// infeasible LP means no such identity exists; when `K(f)` is nonempty that
/// says `h` takes a negative value somewhere on it.
pub fn farkas_certify(h: &Polynomial, f: &[Polynomial]) -> Result<FarkasResult, CertError> {
    let dim = h.dim();
    if h.total_degree() > 1 {
        return Err(CertError::NonLinearTarget(h.total_degree()));
    }
    check_linear(f, dim)?;
    let mut basis = vec![Polynomial::one(dim)];
    basis.extend(f.iter().cloned());
    let Some(lambda) = match_coefficients(h, &basis)? else {
        return Ok(FarkasResult::Infeasible);
    };
    let k = f.len();
    let terms = lambda
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let mut exponents = vec![0; k];
            if i > 0 {
                exponents[i - 1] = 1;
            }
            Term {
                coeff: c.clone(),
                exponents,
                multiplier_index: 0,
                monomial: None,
            }
        })
        .collect();
    checked(Certificate {
        variant: Variant::Farkas,
        target: h.clone(),
        generators: f.to_vec(),
        multipliers: vec![Polynomial::one(dim)],
        terms,
        extra: Extra::default(),
    })
    .map(FarkasResult::Certified)
}

/// Nonnegative combination of products `f_1^{n_1}⋯f_k^{n_k}` of degree
/// `≤ degree_bound` equal to `h`.
pub fn handelman_certify(
    h: &Polynomial,
    f: &[Polynomial],
    degree_bound: u32,
) -> Result<SearchResult, CertError> {
    smodule_search(Variant::Handelman, h, f, &[], degree_bound)
}

/// Nonnegative combination of `g_j · f_1^{n_1}⋯f_k^{n_k}` equal to `h`;
/// the multiplier `g_0 = 1` is always present.
pub fn smodule_certify(
    h: &Polynomial,
    f: &[Polynomial],
    g: &[Polynomial],
    degree_bound: u32,
) -> Result<SearchResult, CertError> {
    smodule_search(Variant::SModule, h, f, g, degree_bound)
}

fn smodule_search(
    variant: Variant,
    h: &Polynomial,
    f: &[Polynomial],
    g: &[Polynomial],
    degree_bound: u32,
) -> Result<SearchResult, CertError> {
    let dim = h.dim();
    check_linear(f, dim)?;
    if (degree_bound as i64) < h.total_degree() {
        return Err(CertError::DegreeBound {
            bound: degree_bound,
            degree: h.total_degree(),
        });
    }
    let kind = if variant == Variant::Handelman {
        ConeKind::Semiring
    } else {
        ConeKind::SModule
    };
    let spec = ConeSpec::new(kind, f.to_vec(), g.to_vec())?;
    if spec.dim() != dim {
        return Err(CertError::DimensionMismatch(dim, spec.dim()));
    }
    let basis = enumerate_basis(&spec, degree_bound)?;
    let values: Vec<Polynomial> = basis.elements.iter().map(|b| b.value.clone()).collect();
    match match_coefficients(h, &values)? {
        None => Ok(SearchResult::NotFoundAtDegree(degree_bound)),
        Some(c) => from_basis(variant, h, &spec, &basis, &c, degree_bound)
            .map(SearchResult::Certified),
    }
}

/// Smallest `n ≤ n_max` such that `(x_1+⋯+x_d)^n f` has only nonnegative
/// coefficients.
pub fn polya_certify(f: &Polynomial, n_max: u32) -> Result<PolyaResult, CertError> {
    if !f.is_homogeneous() {
        return Err(CertError::NotHomogeneous);
    }
    let d = f.dim();
    let simplex = (0..d).fold(Polynomial::zero(d), |acc, j| &acc + &Polynomial::var(d, j));
    let mut current = f.clone();
    for n in 0..=n_max {
        if current.has_nonneg_coefficients() {
            let terms = current
                .terms()
                .map(|(e, c)| Term {
                    coeff: c.clone(),
                    exponents: vec![],
                    multiplier_index: 0,
                    monomial: Some(e.clone()),
                })
                .collect();
            let certificate = checked(Certificate {
                variant: Variant::Polya,
                target: f.clone(),
                generators: vec![],
                multipliers: vec![Polynomial::one(d)],
                terms,
                extra: Extra {
                    polya_n: Some(n),
                    ..Extra::default()
                },
            })?;
            return Ok(PolyaResult::Certified { n, certificate });
        }
        current = &current * &simplex;
    }
    Ok(PolyaResult::NotFoundUpTo(n_max))
}

/// `x² + 1/(k−1) = 1/(2^k k(k−1)) Σ_ℓ C(k,ℓ)(k−2ℓ)² (1+x)^{k−ℓ}(1−x)^ℓ`,
/// built term by term and checked exactly.
pub fn bernstein_identity(k: u32) -> Result<Certificate, CertError> {
    if k < 2 {
        return Err(CertError::InvalidK(k));
    }
    let x = Polynomial::var(1, 0);
    let one = Polynomial::one(1);
    let target = &(&x * &x) + &Polynomial::constant(1, Rational::new(BigInt::one(), BigInt::from(k - 1)));
    let denom = BigInt::from(2u32).pow(k) * BigInt::from(k) * BigInt::from(k - 1);
    let terms = (0..=k)
        .filter_map(|l| {
            let w = k as i64 - 2 * l as i64;
            let num = binomial(k, l) * BigInt::from(w * w);
            (!num.is_zero()).then(|| Term {
                coeff: Rational::new(num, denom.clone()),
                exponents: vec![k - l, l],
                multiplier_index: 0,
                monomial: None,
            })
        })
        .collect();
    checked(Certificate {
        variant: Variant::Bernstein,
        target,
        generators: vec![&one + &x, &one - &x],
        multipliers: vec![one],
        terms,
        extra: Extra {
            bernstein_k: Some(k),
            ..Extra::default()
        },
    })
}

/// Default degree bound for Handelman / S-module searches: `2·deg h`
/// (at least 1).
pub fn default_degree_bound(h: &Polynomial) -> u32 {
    (2 * h.total_degree()).max(1) as u32
}

//! Truncated moment sequences, localized functionals and their Hankel
//! matrices, plus the finite checks built on them: PSD tests of localized
//! Hankel blocks, the Hausdorff difference criterion on the unit cube,
//! support growth diagnostics and ideal annihilation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{jacobi_eigen, Matrix};
use crate::poly::{binomial, monomials_of_degree, monomials_up_to, MultiIndex, Polynomial};
use crate::rational::{self, JsonInt, Rational};

/// Default PSD tolerance, relative to the largest absolute diagonal entry.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentError {
    #[error("truncation insufficient: need moments up to degree {needed}, have {available}")]
    Truncation { needed: i64, available: u32 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("missing moment value for exponent {0}")]
    MissingValue(MultiIndex),
    #[error("moment value for exponent {0} exceeds the truncation degree")]
    ExtraValue(MultiIndex),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// `s = (s_α)` for all `|α| ≤ N`; defines `L_s(x^α) = s_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    dim: usize,
    max_degree: u32,
    values: BTreeMap<MultiIndex, Rational>,
}

impl MomentSequence {
    pub fn new(
        dim: usize,
        max_degree: u32,
        values: BTreeMap<MultiIndex, Rational>,
    ) -> Result<Self, MomentError> {
        for e in values.keys() {
            if e.dim() != dim {
                return Err(MomentError::DimensionMismatch(dim, e.dim()));
            }
            if e.degree() > max_degree {
                return Err(MomentError::ExtraValue(e.clone()));
            }
        }
        for e in monomials_up_to(dim, max_degree) {
            if !values.contains_key(&e) {
                return Err(MomentError::MissingValue(e));
            }
        }
        Ok(MomentSequence {
            dim,
            max_degree,
            values,
        })
    }

    pub fn from_fn(dim: usize, max_degree: u32, f: impl Fn(&MultiIndex) -> Rational) -> Self {
        let values = monomials_up_to(dim, max_degree)
            .into_iter()
            .map(|e| {
                let v = f(&e);
                (e, v)
            })
            .collect();
        MomentSequence {
            dim,
            max_degree,
            values,
        }
    }

    /// One-dimensional sequence `(s_0, …, s_N)`.
    pub fn univariate(values: Vec<Rational>) -> Result<Self, MomentError> {
        if values.is_empty() {
            return Err(MomentError::InvalidArgument("empty sequence".into()));
        }
        let n = values.len() as u32 - 1;
        Ok(MomentSequence {
            dim: 1,
            max_degree: n,
            values: values
                .into_iter()
                .enumerate()
                .map(|(k, v)| (MultiIndex::new(vec![k as u32]), v))
                .collect(),
        })
    }

    /// `s_α = Σ_i w_i t_i^α` for `|α| ≤ N`.
    pub fn from_atomic_measure(m: &AtomicMeasure, max_degree: u32) -> Self {
        Self::from_fn(m.dim, max_degree, |e| {
            m.atoms
                .iter()
                .fold(Rational::zero(), |acc, a| acc + &a.weight * e.eval(&a.point))
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn get(&self, e: &MultiIndex) -> Option<&Rational> {
        self.values.get(e)
    }

    pub fn values(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.values.iter()
    }

    pub fn mass(&self) -> &Rational {
        &self.values[&MultiIndex::zero(self.dim)]
    }

    /// Same sequence restricted to degree `≤ n`.
    pub fn truncate(&self, n: u32) -> MomentSequence {
        let n = n.min(self.max_degree);
        MomentSequence {
            dim: self.dim,
            max_degree: n,
            values: self
                .values
                .iter()
                .filter(|(e, _)| e.degree() <= n)
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }
    }

    fn need(&self, degree: i64) -> Result<(), MomentError> {
        if degree > self.max_degree as i64 {
            return Err(MomentError::Truncation {
                needed: degree,
                available: self.max_degree,
            });
        }
        Ok(())
    }

    fn check_dim(&self, p: &Polynomial) -> Result<(), MomentError> {
        if p.dim() != self.dim {
            return Err(MomentError::DimensionMismatch(self.dim, p.dim()));
        }
        Ok(())
    }

    /// `L_s(p) = Σ_α p_α s_α`.
    pub fn apply(&self, p: &Polynomial) -> Result<Rational, MomentError> {
        self.check_dim(p)?;
        self.need(p.total_degree())?;
        Ok(p
            .terms()
            .fold(Rational::zero(), |acc, (e, c)| acc + c * &self.values[e]))
    }

    /// `(g(E)s)_α = Σ_γ g_γ s_{α+γ}`, the sequence of the localized
    /// functional `L_g(p) = L_s(g p)`, truncated at `N − deg g`.
    pub fn shift(&self, g: &Polynomial) -> Result<MomentSequence, MomentError> {
        self.check_dim(g)?;
        let dg = g.total_degree().max(0);
        self.need(dg)?;
        let top = self.max_degree - dg as u32;
        Ok(Self::from_fn(self.dim, top, |a| {
            g.terms()
                .fold(Rational::zero(), |acc, (e, c)| acc + c * &self.values[&a.add(e)])
        }))
    }
}

#[derive(Serialize, Deserialize)]
struct MomentValueJson {
    exp: Vec<u32>,
    num: JsonInt,
    den: JsonInt,
}

#[derive(Serialize, Deserialize)]
struct MomentSequenceJson {
    dim: usize,
    max_degree: u32,
    values: Vec<MomentValueJson>,
}

impl Serialize for MomentSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MomentSequenceJson {
            dim: self.dim,
            max_degree: self.max_degree,
            values: self
                .values
                .iter()
                .map(|(e, v)| MomentValueJson {
                    exp: e.exponents().to_vec(),
                    num: JsonInt(v.numer().clone()),
                    den: JsonInt(v.denom().clone()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = MomentSequenceJson::deserialize(d)?;
        let mut values = BTreeMap::new();
        for v in j.values {
            if v.den.0.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            let e = MultiIndex::new(v.exp);
            if values
                .insert(e.clone(), Rational::new(v.num.0, v.den.0))
                .is_some()
            {
                return Err(D::Error::custom(format!("duplicate exponent {e}")));
            }
        }
        MomentSequence::new(j.dim, j.max_degree, values).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "rational::vec_as_string")]
    pub point: Vec<Rational>,
    #[serde(with = "rational::as_string")]
    pub weight: Rational,
}

/// Finite positive combination of point masses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AtomicMeasureJson")]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct AtomicMeasureJson {
    dim: usize,
    atoms: Vec<Atom>,
}

impl TryFrom<AtomicMeasureJson> for AtomicMeasure {
    type Error = MomentError;
    fn try_from(j: AtomicMeasureJson) -> Result<Self, Self::Error> {
        AtomicMeasure::new(j.dim, j.atoms)
    }
}

impl AtomicMeasure {
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self, MomentError> {
        for (i, a) in atoms.iter().enumerate() {
            if a.point.len() != dim {
                return Err(MomentError::DimensionMismatch(dim, a.point.len()));
            }
            if !a.weight.is_positive() {
                return Err(MomentError::InvalidMeasure(format!(
                    "atom {i} has non-positive weight {}",
                    a.weight
                )));
            }
            if atoms[..i].iter().any(|b| b.point == a.point) {
                return Err(MomentError::InvalidMeasure(format!(
                    "atom {i} repeats an earlier point"
                )));
            }
        }
        Ok(AtomicMeasure { dim, atoms })
    }

    pub fn from_points(dim: usize, atoms: Vec<(Vec<Rational>, Rational)>) -> Result<Self, MomentError> {
        Self::new(
            dim,
            atoms
                .into_iter()
                .map(|(point, weight)| Atom { point, weight })
                .collect(),
        )
    }

    pub fn dirac(point: Vec<Rational>) -> Self {
        let dim = point.len();
        AtomicMeasure {
            dim,
            atoms: vec![Atom {
                point,
                weight: Rational::one(),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Localized Hankel matrix `H(gs)_{α,β} = Σ_γ g_γ s_{α+β+γ}` over the
/// monomials of degree `≤ n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelBlock {
    pub row_basis: Vec<MultiIndex>,
    pub matrix: Vec<Vec<Rational>>,
    pub localizer: Polynomial,
}

impl HankelBlock {
    pub fn size(&self) -> usize {
        self.row_basis.len()
    }

    pub fn to_f64(&self) -> Matrix {
        self.matrix
            .iter()
            .map(|row| row.iter().map(rational::to_f64).collect())
            .collect()
    }

    /// `vᵀ H v`, exact.
    pub fn quadratic_form(&self, v: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc += vi * vj * &self.matrix[i][j];
            }
        }
        acc
    }
}

pub fn localized_hankel(
    s: &MomentSequence,
    g: &Polynomial,
    n: u32,
) -> Result<HankelBlock, MomentError> {
    s.check_dim(g)?;
    s.need(2 * n as i64 + g.total_degree().max(0))?;
    let basis = monomials_up_to(s.dim, n);
    let k = basis.len();
    let mut matrix = vec![vec![Rational::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let ab = basis[i].add(&basis[j]);
            let v = g
                .terms()
                .fold(Rational::zero(), |acc, (e, c)| acc + c * &s.values[&ab.add(e)]);
            matrix[j][i] = v.clone();
            matrix[i][j] = v;
        }
    }
    Ok(HankelBlock {
        row_basis: basis,
        matrix,
        localizer: g.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Eigenvalues below `-threshold` count as negative.
    pub threshold: f64,
    /// Unit eigenvector of the most negative eigenvalue, in the block's
    /// row-basis coordinates, when the block is not PSD.
    pub witness: Option<Vec<f64>>,
}

/// Floating-point PSD test of an exact Hankel block via Jacobi
/// eigenvalues; `tol` is relative to the largest absolute diagonal entry.
pub fn psd_check(b: &HankelBlock, tol: f64) -> PsdVerdict {
    psd_check_matrix(&b.to_f64(), tol)
}

pub fn psd_check_matrix(m: &Matrix, tol: f64) -> PsdVerdict {
    let scale = (0..m.len()).fold(0.0_f64, |acc, i| acc.max(m[i][i].abs()));
    let threshold = tol * scale;
    if m.is_empty() {
        return PsdVerdict {
            psd: true,
            min_eigenvalue: 0.0,
            threshold,
            witness: None,
        };
    }
    let eig = jacobi_eigen(m);
    let (min, vec) = eig.min().expect("non-empty matrix");
    let psd = min >= -threshold;
    PsdVerdict {
        psd,
        min_eigenvalue: min,
        threshold,
        witness: (!psd).then(|| vec.to_vec()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub localizer: String,
    pub size: usize,
    pub verdict: PsdVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub level: u32,
    pub blocks: Vec<BlockReport>,
    pub all_psd: bool,
}

/// Builds `H(s)` and every `H(g_j s)` at level `n` and tests each for
/// positive semidefiniteness. All-PSD is the truncated form of
/// `L(g p²) ≥ 0` for every generator and every `p` of degree `≤ n`.
pub fn cone_positivity_check(
    s: &MomentSequence,
    generators: &[Polynomial],
    n: u32,
    tol: f64,
) -> Result<PositivityReport, MomentError> {
    let max_deg = generators
        .iter()
        .map(Polynomial::total_degree)
        .max()
        .unwrap_or(0)
        .max(0);
    s.need(2 * n as i64 + max_deg)?;
    let mut localizers = vec![Polynomial::one(s.dim)];
    localizers.extend(generators.iter().cloned());
    let mut blocks = Vec::with_capacity(localizers.len());
    for g in &localizers {
        let h = localized_hankel(s, g, n)?;
        blocks.push(BlockReport {
            localizer: g.to_string(),
            size: h.size(),
            verdict: psd_check(&h, tol),
        });
    }
    let all_psd = blocks.iter().all(|b| b.verdict.psd);
    Ok(PositivityReport {
        level: n,
        blocks,
        all_psd,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HausdorffViolation {
    pub m: MultiIndex,
    pub n: MultiIndex,
    #[serde(with = "rational::as_string")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HausdorffVerdict {
    pub accepted: bool,
    /// Number of `(m, n)` pairs evaluated.
    pub checked: usize,
    pub first_violation: Option<HausdorffViolation>,
}

/// `Σ_{j ≤ n} (-1)^{|j|} C(n_1,j_1)…C(n_d,j_d) s_{m+j}`, i.e.
/// `((I−E_1)^{n_1}…(I−E_d)^{n_d} s)_m = L_s(x^m (1−x)^n)`.
pub fn hausdorff_difference(s: &MomentSequence, m: &MultiIndex, n: &MultiIndex) -> Rational {
    let d = s.dim;
    let mut j = vec![0u32; d];
    let mut acc = Rational::zero();
    loop {
        let jm = MultiIndex::new(j.clone());
        let mut c = BigInt::one();
        for i in 0..d {
            c *= binomial(n.exponents()[i], j[i]);
        }
        let term = Rational::from_integer(c) * &s.values[&m.add(&jm)];
        if jm.degree().is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
        // odometer over the box 0 ≤ j ≤ n
        let mut i = 0;
        loop {
            if i == d {
                return acc;
            }
            if j[i] < n.exponents()[i] {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
    }
}

/// Checks the cube difference condition for all `|m| + |n| ≤ min(N, up_to)`.
/// Pairs are visited by total degree, then `m` before `n` in graded-lex
/// order, so the reported violation is the first one in that order.
pub fn hausdorff_check(s: &MomentSequence, up_to: u32) -> HausdorffVerdict {
    let top = s.max_degree.min(up_to);
    let mut checked = 0;
    for t in 0..=top {
        for dm in 0..=t {
            for m in monomials_of_degree(s.dim, dm) {
                for n in monomials_of_degree(s.dim, t - dm) {
                    checked += 1;
                    let v = hausdorff_difference(s, &m, &n);
                    if v.is_negative() {
                        return HausdorffVerdict {
                            accepted: false,
                            checked,
                            first_violation: Some(HausdorffViolation { m, n, value: v }),
                        };
                    }
                }
            }
        }
    }
    HausdorffVerdict {
        accepted: true,
        checked,
        first_violation: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Growth {
    Bounded,
    Growing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    /// `r_n / c^{2n}` with `r_n = L_s(g^{2n})`, for `n = 1, 2, …`.
    #[serde(with = "rational::vec_as_string")]
    pub ratios: Vec<Rational>,
    pub verdict: Growth,
    /// Always true: finitely many `n` cannot decide a condition on all `n`.
    pub heuristic: bool,
}

/// Finite look at `L_s(g^{2n}) ≤ M c^{2n}`. `Growing` means the tail of the
/// ratio sequence is strictly increasing and ends above its first value;
/// anything else is reported `Bounded`.
pub fn support_growth_diagnostic(
    s: &MomentSequence,
    g: &Polynomial,
    c: &Rational,
) -> Result<GrowthReport, MomentError> {
    s.check_dim(g)?;
    if !c.is_positive() {
        return Err(MomentError::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let dg = g.total_degree().max(1);
    s.need(2 * dg)?;
    let g2 = g * g;
    let c2 = c * c;
    let mut ratios = Vec::new();
    let mut power = g2.clone();
    let mut cpow = c2.clone();
    let mut n = 1;
    while 2 * n * dg <= s.max_degree as i64 {
        ratios.push(s.apply(&power)? / &cpow);
        power = &power * &g2;
        cpow *= &c2;
        n += 1;
    }
    let verdict = if ratios.len() >= 2 {
        let tail = (ratios.len() / 2).max(2);
        let t = &ratios[ratios.len() - tail..];
        let increasing = t.windows(2).all(|w| w[1] > w[0]);
        if increasing && ratios.last() > ratios.first() {
            Growth::Growing
        } else {
            Growth::Bounded
        }
    } else {
        Growth::Bounded
    };
    Ok(GrowthReport {
        ratios,
        verdict,
        heuristic: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilationVerdict {
    pub accepted: bool,
    /// First `α` (graded-lex) with `L_s(h x^α) ≠ 0`, and that value.
    pub first_violation: Option<(MultiIndex, String)>,
}

/// Accepts iff `L_s(h·x^α) = 0` exactly for all `|α| ≤ n`.
pub fn ideal_annihilation_check(
    s: &MomentSequence,
    h: &Polynomial,
    n: u32,
) -> Result<AnnihilationVerdict, MomentError> {
    s.check_dim(h)?;
    s.need(h.total_degree().max(0) + n as i64)?;
    for a in monomials_up_to(s.dim, n) {
        let v = s.apply(&h.shift_by(&a))?;
        if !v.is_zero() {
            return Ok(AnnihilationVerdict {
                accepted: false,
                first_violation: Some((a, rational::format_rational(&v))),
            });
        }
    }
    Ok(AnnihilationVerdict {
        accepted: true,
        first_violation: None,
    })
}

//! Truncated GNS construction for a positive moment functional.
//!
//! The Gram matrix `G_{α,β} = s_{α+β}` over monomials of degree `≤ n` is
//! assembled exactly. Its eigendecomposition gives the quotient by the null
//! space and an orthonormal basis of what remains; multiplication by `x_j`
//! is compressed to that basis as `X_j = Pᵀ S_j P` with
//! `(S_j)_{α,β} = s_{α+β+e_j}`. For flat data coming from finitely many
//! atoms the `X_j` commute and their joint eigenvectors are the atoms.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, jacobi_eigen, Matrix};
use crate::moments::{AtomicMeasure, MomentError, MomentSequence};
use crate::poly::{monomials_up_to, MultiIndex, Polynomial};
use crate::rational::{self, Rational};

/// Eigenvalues at most this fraction of the largest count as null.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Commutation tolerance and the weight below which atoms are dropped.
pub const DEFAULT_EXTRACT_TOL: f64 = 1e-6;
const COLLISION_GAP: f64 = 1e-8;
const RESEEDS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GnsError {
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("Gram matrix has eigenvalue {min_eigenvalue:e}: functional is not positive")]
    NotPositive {
        min_eigenvalue: f64,
        witness: Vec<f64>,
    },
    #[error("multiplication matrices do not commute (max entry {max_offdiag:e})")]
    Commutation { max_offdiag: f64 },
    #[error("eigenvalue collision persisted after {0} reseeds")]
    EigenCollision(usize),
}

#[derive(Debug, Clone)]
pub struct GnsModel {
    pub dim: usize,
    pub level: u32,
    pub basis: Vec<MultiIndex>,
    pub gram: Vec<Vec<Rational>>,
    pub gram_eigenvalues: Vec<f64>,
    pub quotient_rank: usize,
    /// `basis.len() × r`; column `i` is `u_i / √λ_i`.
    pub quotient_map: Matrix,
    /// Image of the constant polynomial `1` in the quotient.
    pub unit: Vec<f64>,
    pub mult_matrices: Vec<Matrix>,
    /// `rank G_n = rank G_{n−1}`.
    pub flat: bool,
    pub moments: MomentSequence,
    sqrt_eigen: Vec<f64>,
    kept_vectors: Vec<Vec<f64>>,
}

fn rational_matrix_f64(m: &[Vec<Rational>]) -> Matrix {
    m.iter()
        .map(|r| r.iter().map(rational::to_f64).collect())
        .collect()
}

fn numerical_rank(eigenvalues: &[f64], threshold: f64) -> usize {
    eigenvalues.iter().filter(|v| **v > threshold).count()
}

pub fn build(s: &MomentSequence, n: u32, tol: f64) -> Result<GnsModel, GnsError> {
    let d = s.dim();
    let needed = 2 * n + 1;
    if needed > s.max_degree() {
        return Err(MomentError::Truncation {
            needed: needed as i64,
            available: s.max_degree(),
        }
        .into());
    }
    let basis = monomials_up_to(d, n);
    let k = basis.len();
    let entry = |a: &MultiIndex| s.get(a).expect("within truncation").clone();
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..k).map(|j| entry(&basis[i].add(&basis[j]))).collect())
        .collect();
    let gf = rational_matrix_f64(&gram);
    let eig = jacobi_eigen(&gf);
    let norm = eig.spectral_radius();
    let threshold = tol * norm;
    if let Some((min, v)) = eig.min() {
        if min < -threshold {
            return Err(GnsError::NotPositive {
                min_eigenvalue: min,
                witness: v.to_vec(),
            });
        }
    }

    let kept: Vec<usize> = (0..k).filter(|&i| eig.values[i] > threshold).collect();
    let r = kept.len();
    let sqrt_eigen: Vec<f64> = kept.iter().map(|&i| eig.values[i].sqrt()).collect();
    let kept_vectors: Vec<Vec<f64>> = kept.iter().map(|&i| eig.vectors[i].clone()).collect();
    let quotient_map: Matrix = (0..k)
        .map(|row| (0..r).map(|c| kept_vectors[c][row] / sqrt_eigen[c]).collect())
        .collect();
    let unit: Vec<f64> = (0..r).map(|c| sqrt_eigen[c] * kept_vectors[c][0]).collect();

    let pt = linalg::transpose(&quotient_map);
    let mult_matrices = (0..d)
        .map(|j| {
            let ej = MultiIndex::unit(d, j);
            let shifted: Matrix = (0..k)
                .map(|a| {
                    (0..k)
                        .map(|b| rational::to_f64(&entry(&basis[a].add(&basis[b]).add(&ej))))
                        .collect()
                })
                .collect();
            let x = linalg::matmul(&linalg::matmul(&pt, &shifted), &quotient_map);
            // symmetric in exact arithmetic; remove rounding asymmetry
            (0..r)
                .map(|a| (0..r).map(|b| 0.5 * (x[a][b] + x[b][a])).collect())
                .collect()
        })
        .collect();

    let flat = if n == 0 {
        true
    } else {
        let lower = monomials_up_to(d, n - 1).len();
        let sub: Matrix = gf[..lower].iter().map(|row| row[..lower].to_vec()).collect();
        numerical_rank(&jacobi_eigen(&sub).values, threshold) == r
    };

    Ok(GnsModel {
        dim: d,
        level: n,
        basis,
        gram,
        gram_eigenvalues: eig.values,
        quotient_rank: r,
        quotient_map,
        unit,
        mult_matrices,
        flat,
        moments: s.clone(),
        sqrt_eigen,
        kept_vectors,
    })
}

impl GnsModel {
    /// Quotient coordinates of a polynomial of degree `≤ n`; the Euclidean
    /// inner product of two images is `L(ab)` up to the rank truncation.
    pub fn coordinates(&self, p: &Polynomial) -> Option<Vec<f64>> {
        if p.total_degree() > self.level as i64 || p.dim() != self.dim {
            return None;
        }
        let c: Vec<f64> = self
            .basis
            .iter()
            .map(|e| rational::to_f64(&p.coeff(e)))
            .collect();
        Some(
            self.kept_vectors
                .iter()
                .zip(&self.sqrt_eigen)
                .map(|(u, sq)| sq * linalg::dot(u, &c))
                .collect(),
        )
    }

    /// `⟨π(p) 1, 1⟩` for `deg p ≤ 1`, computed through the `X_j`.
    pub fn functional_via_operators(&self, p: &Polynomial) -> Option<f64> {
        if p.total_degree() > 1 || p.dim() != self.dim {
            return None;
        }
        let q = &self.unit;
        let mut acc = rational::to_f64(&p.constant_term()) * linalg::dot(q, q);
        for j in 0..self.dim {
            let c = p.coeff(&MultiIndex::unit(self.dim, j));
            if !c.is_zero() {
                acc += rational::to_f64(&c) * linalg::quad_form(&self.mult_matrices[j], q);
            }
        }
        Some(acc)
    }

    pub fn operator_norms(&self) -> Vec<f64> {
        self.mult_matrices
            .iter()
            .map(|x| jacobi_eigen(x).spectral_radius())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutationReport {
    pub max_offdiag: f64,
    pub warn: bool,
}

/// Largest entry of any `X_j X_k − X_k X_j`.
pub fn check_commutation(m: &GnsModel, tol: f64) -> CommutationReport {
    let mut worst = 0.0_f64;
    for j in 0..m.dim {
        for k in (j + 1)..m.dim {
            let a = linalg::matmul(&m.mult_matrices[j], &m.mult_matrices[k]);
            let b = linalg::matmul(&m.mult_matrices[k], &m.mult_matrices[j]);
            for (ra, rb) in a.iter().zip(&b) {
                for (x, y) in ra.iter().zip(rb) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    CommutationReport {
        max_offdiag: worst,
        warn: worst > tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedAtom {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedMeasure {
    pub dim: usize,
    pub atoms: Vec<ExtractedAtom>,
}

impl ExtractedMeasure {
    pub fn moment(&self, e: &MultiIndex) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * e.eval_f64(&a.point))
            .sum()
    }

    /// Exact binary values of the floating atoms.
    pub fn to_atomic_measure(&self) -> Result<AtomicMeasure, MomentError> {
        let conv = |x: f64| {
            rational::from_f64(x)
                .ok_or_else(|| MomentError::InvalidMeasure(format!("non-finite value {x}")))
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let point = a.point.iter().map(|x| conv(*x)).collect::<Result<Vec<_>, _>>()?;
            atoms.push((point, conv(a.weight)?));
        }
        AtomicMeasure::from_points(self.dim, atoms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    #[serde(flatten)]
    pub measure: ExtractedMeasure,
    pub residual: f64,
    pub flat: bool,
}

fn max_moment_mismatch(
    measure: &ExtractedMeasure,
    s: &MomentSequence,
    degree: u32,
) -> (f64, MultiIndex) {
    let mut worst = (0.0, MultiIndex::zero(s.dim()));
    for e in monomials_up_to(s.dim(), degree) {
        let target = rational::to_f64(s.get(&e).expect("within truncation"));
        let diff = (measure.moment(&e) - target).abs();
        if diff > worst.0 {
            worst = (diff, e);
        }
    }
    worst
}

/// Joint eigenvectors of the `X_j` via a random combination `Σ c_j X_j`.
/// Atom coordinates are Rayleigh quotients `vᵀ X_j v` and weights are
/// `(vᵀ q)²` with `q` the image of `1`.
pub fn extract(m: &GnsModel, tol: f64, seed: u64) -> Result<ExtractionResult, GnsError> {
    let comm = check_commutation(m, tol);
    if comm.warn {
        return Err(GnsError::Commutation {
            max_offdiag: comm.max_offdiag,
        });
    }
    extract_best_effort(m, tol, seed)
}

/// [`extract`] without the commutation gate. On non-commuting matrices the
/// result is only a heuristic; its residual shows how far off it is.
pub fn extract_best_effort(m: &GnsModel, tol: f64, seed: u64) -> Result<ExtractionResult, GnsError> {
    let s = &m.moments;
    let r = m.quotient_rank;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = None;
    for _ in 0..=RESEEDS {
        let c: Vec<f64> = (0..m.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![vec![0.0; r]; r];
        for (cj, xj) in c.iter().zip(&m.mult_matrices) {
            for a in 0..r {
                for b in 0..r {
                    y[a][b] += cj * xj[a][b];
                }
            }
        }
        let eig = jacobi_eigen(&y);
        let scale = eig.spectral_radius().max(f64::MIN_POSITIVE);
        let collided = eig
            .values
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() < COLLISION_GAP * scale);
        if !collided {
            vectors = Some(eig.vectors);
            break;
        }
    }
    let vectors = vectors.ok_or(GnsError::EigenCollision(RESEEDS))?;

    let atoms = vectors
        .iter()
        .filter_map(|v| {
            let w = linalg::dot(v, &m.unit).powi(2);
            (w >= tol).then(|| ExtractedAtom {
                point: m.mult_matrices.iter().map(|x| linalg::quad_form(x, v)).collect(),
                weight: w,
            })
        })
        .collect();
    let measure = ExtractedMeasure { dim: m.dim, atoms };
    let top = (2 * m.level).min(s.max_degree());
    let (residual, _) = max_moment_mismatch(&measure, s, top);
    Ok(ExtractionResult {
        measure,
        residual,
        flat: m.flat,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub degree: u32,
    pub max_mismatch: f64,
    pub worst_exponent: MultiIndex,
}

/// Recomputes the extracted measure's moments up to `degree` and reports
/// the largest absolute difference from `s`.
pub fn verify_representation(
    r: &ExtractionResult,
    s: &MomentSequence,
    degree: u32,
) -> Result<RepresentationReport, GnsError> {
    if degree > s.max_degree() {
        return Err(MomentError::Truncation {
            needed: degree as i64,
            available: s.max_degree(),
        }
        .into());
    }
    if r.measure.dim != s.dim() {
        return Err(MomentError::DimensionMismatch(s.dim(), r.measure.dim).into());
    }
    let (max_mismatch, worst_exponent) = max_moment_mismatch(&r.measure, s, degree);
    Ok(RepresentationReport {
        degree,
        max_mismatch,
        worst_exponent,
    })
}

use serde::{Deserialize, Serialize};

use num_traits::Signed;

use crate::poly::{MultiIndex, Polynomial};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Farkas,
    Handelman,
    #[serde(rename = "smodule")]
    SModule,
    Polya,
    Bernstein,
    /// Bounded-element identity `λ − x_k² ∈ C` or `λ ± x_k ∈ C`.
    Archimedean,
}

/// One summand `coeff · g_j · f^e · x^β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "rational::as_string")]
    pub coeff: Rational,
    /// Exponent of each generator `f_i`.
    pub exponents: Vec<u32>,
    /// Index into `multipliers`; `0` is the constant `1`.
    pub multiplier_index: usize,
    /// Extra monomial factor: a diagonal square `x^{2β}` for quadratic-module
    /// witnesses, or the expansion monomial of a Polya certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<MultiIndex>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extra {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polya_n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bernstein_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
}

/// A self-contained algebraic identity. For every variant except Polya it
/// claims `target = Σ coeff · multiplier · Π f_i^{e_i} · x^β` with all
/// coefficients nonnegative. A Polya certificate claims
/// `(x_1+…+x_d)^n · target = Σ coeff · x^β`, nonnegative coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub variant: Variant,
    pub target: Polynomial,
    pub generators: Vec<Polynomial>,
    /// Always starts with the constant `1`.
    pub multipliers: Vec<Polynomial>,
    pub terms: Vec<Term>,
    #[serde(default)]
    pub extra: Extra,
}

impl Certificate {
    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// The polynomial a term stands for, or `None` when its description is
    /// malformed (wrong lengths, bad indices, dimension mismatch).
    pub fn term_value(&self, t: &Term) -> Option<Polynomial> {
        let dim = self.dim();
        if t.exponents.len() != self.generators.len() {
            return None;
        }
        let mut v = self.multipliers.get(t.multiplier_index)?.clone();
        if v.dim() != dim {
            return None;
        }
        for (f, &e) in self.generators.iter().zip(&t.exponents) {
            if f.dim() != dim {
                return None;
            }
            if e > 0 {
                v = &v * &f.pow(e);
            }
        }
        if let Some(b) = &t.monomial {
            if b.dim() != dim {
                return None;
            }
            v = v.shift_by(b);
        }
        Some(v)
    }

    /// Sum of all terms, `None` if any term is malformed.
    pub fn expansion(&self) -> Option<Polynomial> {
        let mut acc = Polynomial::zero(self.dim());
        for t in &self.terms {
            acc = &acc + &self.term_value(t)?.scale(&t.coeff);
        }
        Some(acc)
    }

    /// Exact re-check of the claimed identity.
    pub fn verify(&self) -> bool {
        if self.multipliers.first().is_none_or(|m| *m != Polynomial::one(self.dim())) {
            return false;
        }
        if self.terms.iter().any(|t| t.coeff.is_negative()) {
            return false;
        }
        let Some(sum) = self.expansion() else {
            return false;
        };
        match self.variant {
            Variant::Polya => {
                let Some(n) = self.extra.polya_n else {
                    return false;
                };
                if !self.generators.is_empty() || !self.target.is_homogeneous() {
                    return false;
                }
                let d = self.dim();
                let simplex = (0..d).fold(Polynomial::zero(d), |acc, j| &acc + &Polynomial::var(d, j));
                let lhs = &simplex.pow(n) * &self.target;
                lhs.has_nonneg_coefficients() && lhs == sum
            }
            _ => sum == self.target,
        }
    }
}

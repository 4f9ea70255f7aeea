//! Exact rational simplex for `A x = b, x ≥ 0`, with Bland's rule in both
//! phases. Phase one minimizes the sum of artificial variables; phase two
//! runs only when an objective is supplied.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("row {row} has {got} entries, expected {expected}")]
    RowWidth {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("{rows} rows but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("objective has {got} entries, expected {expected}")]
    ObjectiveWidth { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    /// Minimized when present; otherwise any feasible vertex is returned.
    pub objective: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible {
        assignment: Vec<Rational>,
        objective_value: Option<Rational>,
    },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn feasibility(num_vars: usize, rows: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Self {
        LinearProgram {
            num_vars,
            rows,
            rhs,
            objective: None,
        }
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.rows.len() != self.rhs.len() {
            return Err(LpError::RhsLength {
                rows: self.rows.len(),
                rhs: self.rhs.len(),
            });
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.num_vars {
                return Err(LpError::RowWidth {
                    row: i,
                    got: r.len(),
                    expected: self.num_vars,
                });
            }
        }
        if let Some(c) = &self.objective {
            if c.len() != self.num_vars {
                return Err(LpError::ObjectiveWidth {
                    got: c.len(),
                    expected: self.num_vars,
                });
            }
        }
        Ok(())
    }

    /// True when `x ≥ 0` and every row holds exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                row.iter()
                    .zip(x)
                    .fold(Rational::zero(), |acc, (a, v)| acc + a * v)
                    == *b
            })
    }
}

struct Tableau {
    /// `rows[i]` has `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j − c_Bᵀ B⁻¹ A_j` and objective value for cost `c`.
    fn reduced_costs(&self, cost: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut red: Vec<Rational> = cost.to_vec();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in red.iter_mut().enumerate() {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    *r -= cb * a;
                }
            }
            value += cb * self.rhs(i);
        }
        (red, value)
    }

    /// Bland's rule minimization over the columns allowed by `allowed`.
    /// Returns false if unbounded.
    fn minimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let (red, _) = self.reduced_costs(cost);
            let entering = (0..self.cols).find(|&j| allowed(j) && red[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.num_vars;
    let m = lp.rows.len();
    let cols = n + m;

    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|a| if flip { -a.clone() } else { a.clone() })
            .collect();
        r.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        r.push(if flip { -b.clone() } else { b.clone() });
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        basis: (n..cols).collect(),
        cols,
    };

    let phase_one: Vec<Rational> = (0..cols)
        .map(|j| if j >= n { Rational::one() } else { Rational::zero() })
        .collect();
    t.minimize(&phase_one, &|_| true);
    let (_, infeas) = t.reduced_costs(&phase_one);
    if infeas.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }

    // drive zero-valued artificials out of the basis; rows where that is
    // impossible are redundant
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut objective_value = None;
    if let Some(c) = &lp.objective {
        let mut cost = c.clone();
        cost.extend((0..m).map(|_| Rational::zero()));
        if !t.minimize(&cost, &|j| j < n) {
            return Ok(LpOutcome::Unbounded);
        }
        objective_value = Some(t.reduced_costs(&cost).1);
    }

    let mut x = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).clone();
        }
    }
    Ok(LpOutcome::Feasible {
        assignment: x,
        objective_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn feasible(out: LpOutcome) -> Vec<Rational> {
        match out {
            LpOutcome::Feasible { assignment, .. } => assignment,
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn single_equation() {
        let lp = LinearProgram::feasibility(1, vec![vec![int(1)]], vec![int(1)]);
        assert_eq!(feasible(solve(&lp).unwrap()), vec![int(1)]);
        let lp = LinearProgram::feasibility(1, vec![vec![int(1)]], vec![int(-1)]);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn two_by_two() {
        let lp = LinearProgram::feasibility(
            2,
            vec![vec![int(1), int(1)], vec![int(1), int(-1)]],
            vec![int(1), int(0)],
        );
        let x = feasible(solve(&lp).unwrap());
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
        assert!(lp.is_feasible_point(&x));
    }

    #[test]
    fn redundant_rows_and_degeneracy() {
        let lp = LinearProgram::feasibility(
            3,
            vec![
                vec![int(1), int(1), int(0)],
                vec![int(2), int(2), int(0)],
                vec![int(0), int(0), int(0)],
            ],
            vec![int(1), int(2), int(0)],
        );
        let x = feasible(solve(&lp).unwrap());
        assert!(lp.is_feasible_point(&x));
    }

    #[test]
    fn optimization() {
        // min x - y  s.t. x + y + s = 2
        let mut lp = LinearProgram::feasibility(3, vec![vec![int(1), int(1), int(1)]], vec![int(2)]);
        lp.objective = Some(vec![int(1), int(-1), int(0)]);
        match solve(&lp).unwrap() {
            LpOutcome::Feasible {
                assignment,
                objective_value,
            } => {
                assert_eq!(assignment, vec![int(0), int(2), int(0)]);
                assert_eq!(objective_value, Some(int(-2)));
            }
            other => panic!("{other:?}"),
        }
        // min -x s.t. x - y = 0 is unbounded
        let mut lp = LinearProgram::feasibility(2, vec![vec![int(1), int(-1)]], vec![int(0)]);
        lp.objective = Some(vec![int(-1), int(0)]);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn malformed() {
        let lp = LinearProgram::feasibility(2, vec![vec![int(1)]], vec![int(1)]);
        assert!(matches!(solve(&lp), Err(LpError::RowWidth { .. })));
        let lp = LinearProgram::feasibility(1, vec![vec![int(1)]], vec![]);
        assert!(matches!(solve(&lp), Err(LpError::RhsLength { .. })));
    }
}

//! Test-side oracles, independent of the library's own algorithms.
#![allow(dead_code, clippy::needless_range_loop)]

use moment_core::moments::{AtomicMeasure, MomentSequence};
use moment_core::rational::{int, rat};
use moment_core::{MultiIndex, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn poly(text: &str) -> Polynomial {
    Polynomial::parse(text).unwrap()
}

pub fn poly_d(text: &str, dim: usize) -> Polynomial {
    Polynomial::parse_with_dim(text, dim).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational `p/q` uniform on the grid `{0, 1/q, …, 1}` scaled into `[lo, hi]`.
pub fn grid_rational(r: &mut ChaCha8Rng, lo: &Rational, hi: &Rational, q: i64) -> Rational {
    let k = r.gen_range(0..=q);
    lo + (hi - lo) * rat(k, q)
}

pub fn unit_rational(r: &mut ChaCha8Rng, q: i64) -> Rational {
    rat(r.gen_range(0..=q), q)
}

pub fn positive_weight(r: &mut ChaCha8Rng) -> Rational {
    rat(r.gen_range(1..=20), 20)
}

/// Moments of an atomic measure by direct summation `Σ w · x^α`.
pub fn atomic_moment(atoms: &[(Vec<Rational>, Rational)], e: &MultiIndex) -> Rational {
    let mut acc = Rational::zero();
    for (pt, w) in atoms {
        let mut term = w.clone();
        for (x, k) in pt.iter().zip(e.exponents()) {
            for _ in 0..*k {
                term *= x;
            }
        }
        acc += term;
    }
    acc
}

pub fn sequence_from_atoms(dim: usize, atoms: &[(Vec<Rational>, Rational)], n: u32) -> MomentSequence {
    MomentSequence::from_fn(dim, n, |e| atomic_moment(atoms, e))
}

pub fn measure(dim: usize, atoms: &[(Vec<Rational>, Rational)]) -> AtomicMeasure {
    AtomicMeasure::from_points(dim, atoms.to_vec()).unwrap()
}

/// Lebesgue measure on `[0,1]^d`: `Π 1/(α_i+1)`.
pub fn lebesgue_cube(dim: usize, n: u32) -> MomentSequence {
    MomentSequence::from_fn(dim, n, |e| {
        e.exponents()
            .iter()
            .fold(Rational::one(), |acc, &k| acc * rat(1, k as i64 + 1))
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Uniform probability measure on the unit circle:
/// `E[x^{2a} y^{2b}] = (2a)!(2b)! / (4^{a+b} a! b! (a+b)!)`, odd moments vanish.
pub fn circle_moment(e: &MultiIndex) -> Rational {
    let (i, j) = (e.exponents()[0], e.exponents()[1]);
    if i % 2 == 1 || j % 2 == 1 {
        return Rational::zero();
    }
    let (a, b) = (i / 2, j / 2);
    let num = factorial(2 * a) * factorial(2 * b);
    let den = BigInt::from(4u32).pow(a + b) * factorial(a) * factorial(b) * factorial(a + b);
    Rational::new(num, den)
}

pub fn circle_sequence(n: u32) -> MomentSequence {
    MomentSequence::from_fn(2, n, circle_moment)
}

/// Trapezoid rule for `(1/2π) ∫ cos^i sin^j`, exact to round-off for
/// trigonometric polynomials of degree below `samples`.
pub fn circle_quadrature(i: u32, j: u32, samples: usize) -> f64 {
    (0..samples)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            t.cos().powi(i as i32) * t.sin().powi(j as i32)
        })
        .sum::<f64>()
        / samples as f64
}

/// Exact Gaussian elimination. Returns the unique solution of `A x = b`,
/// or `None` if the system is inconsistent or the columns are dependent.
fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    let mut row = 0;
    for col in 0..n {
        let pivot = (row..m).find(|&i| !rows[i][col].is_zero())?;
        rows.swap(row, pivot);
        let p = rows[row][col].clone();
        for v in rows[row].iter_mut() {
            *v /= &p;
        }
        for i in 0..m {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..=n {
                    let delta = &f * &rows[row][c];
                    rows[i][c] -= delta;
                }
            }
        }
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| rows[i][n].clone()).collect())
}

/// `{x ≥ 0 : A x = b}` is nonempty iff some column subset with independent
/// columns solves the system with a nonnegative solution (basic feasible
/// solutions). Exhaustive over all `2^n` subsets.
pub fn brute_force_feasible(rows: &[Vec<Rational>], rhs: &[Rational], num_vars: usize) -> bool {
    if rhs.iter().all(Zero::is_zero) {
        return true;
    }
    for mask in 1u32..(1 << num_vars) {
        let cols: Vec<usize> = (0..num_vars).filter(|c| mask & (1 << c) != 0).collect();
        if cols.len() > rows.len() {
            continue;
        }
        let sub: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        if let Some(x) = solve_unique(&sub, rhs) {
            if x.iter().all(|v| !v.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Random small integer feasibility system; about half are built feasible
/// by construction from a nonnegative point.
pub fn random_lp(r: &mut ChaCha8Rng) -> (usize, Vec<Vec<Rational>>, Vec<Rational>) {
    let n = r.gen_range(1..=6);
    let m = r.gen_range(1..=4);
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|_| (0..n).map(|_| int(r.gen_range(-3..=3))).collect())
        .collect();
    let rhs = if r.gen_bool(0.5) {
        let x: Vec<Rational> = (0..n).map(|_| int(r.gen_range(0..=3))).collect();
        rows.iter()
            .map(|row| row.iter().zip(&x).map(|(a, v)| a * v).sum())
            .collect()
    } else {
        (0..m).map(|_| int(r.gen_range(-4..=4))).collect()
    };
    (n, rows, rhs)
}

/// Exact minimum of `a x² + b x + c` over `[0, 1]`.
pub fn quadratic_min_on_unit(a: &Rational, b: &Rational, c: &Rational) -> Rational {
    let f = |x: &Rational| a * x * x + b * x + c;
    let mut best = f(&Rational::zero()).min(f(&Rational::one()));
    if a.is_positive() {
        let v = -b / (int(2) * a);
        if !v.is_negative() && v <= Rational::one() {
            best = best.min(f(&v));
        }
    }
    best
}

/// Pairwise Euclidean separation of floating points.
pub fn min_separation(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            best = best.min(d);
        }
    }
    best
}

pub fn to_f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(moment_core::rational::to_f64).collect()
}

/// `count` atoms in `[0,1]^dim` on a `1/20` grid, pairwise at least `sep`
/// apart. Restarts when a partial placement leaves no room.
pub fn separated_atoms(
    r: &mut ChaCha8Rng,
    dim: usize,
    count: usize,
    sep: f64,
) -> Vec<(Vec<Rational>, Rational)> {
    let mut atoms: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut misses = 0;
    while atoms.len() < count {
        if misses > 200 {
            atoms.clear();
            misses = 0;
        }
        let pt: Vec<Rational> = (0..dim).map(|_| unit_rational(r, 20)).collect();
        let mut pts: Vec<Vec<f64>> = atoms.iter().map(|a| to_f64s(&a.0)).collect();
        pts.push(to_f64s(&pt));
        if min_separation(&pts) >= sep - 1e-12 {
            atoms.push((pt, positive_weight(r)));
        } else {
            misses += 1;
        }
    }
    atoms
}

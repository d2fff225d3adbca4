//! Exact linear systems: rank, nullspace and consistency.
//!
//! Rank is computed by elimination modulo the prime `2^61 - 1`, which gives a
//! lower bound on the rational rank. The matching upper bound comes from a
//! nullspace basis lifted back to rationals and checked against every row in
//! exact arithmetic. If lifting or the check fails, the system is reduced
//! over the rationals directly.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let r = (x as u64 & P) + (x >> 61) as u64;
    let r = (r & P) + (r >> 61);
    if r >= P {
        r - P
    } else {
        r
    }
}

fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

fn to_mod(q: &Rational) -> Option<u64> {
    let p = BigInt::from(P);
    let num = q.numer().mod_floor(&p).to_u64()?;
    let den = q.denom().mod_floor(&p).to_u64()?;
    (den != 0).then(|| mul_mod(num, inv_mod(den)))
}

/// Rational `a/b` with `|a|, b <= sqrt(P/2)` congruent to `x`, if one exists.
fn reconstruct(x: u64) -> Option<Rational> {
    let bound = ((P / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (P as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    Some(Rational::new(BigInt::from(r1), BigInt::from(t1)))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(piv) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, piv);
        let inv = S::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, p) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{x : m x = 0}` from a matrix already in reduced row echelon
/// form with the given pivot columns.
pub fn nullspace_from_rref<S: Scalar>(m: &[Vec<S>], pivots: &[usize], cols: usize) -> Vec<Vec<S>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

mod terms_text {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::super::scalar::as_text;
    use super::Rational;

    #[derive(Serialize, Deserialize)]
    struct Term(usize, #[serde(with = "as_text")] Rational);

    pub fn serialize<S: Serializer>(v: &[(usize, Rational)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|(i, q)| Term(*i, q.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(usize, Rational)>, D::Error> {
        Ok(Vec::<Term>::deserialize(d)?.into_iter().map(|Term(i, q)| (i, q)).collect())
    }
}

/// A sparse row `Σ coef·x_var = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    #[serde(with = "terms_text")]
    pub terms: Vec<(usize, Rational)>,
    #[serde(with = "super::scalar::as_text")]
    pub rhs: Rational,
}

impl Equation {
    /// Merges duplicate variables and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) -> Self {
        let mut terms: Vec<(usize, Rational)> = terms.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.last_mut() {
                Some((w, d)) if *w == v => *d += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Self { terms: merged, rhs }
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty() && self.rhs.is_zero()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(v, c)| c * &x[*v]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Modular elimination certified by an exactly verified nullspace.
    CertifiedModular,
    /// Rational elimination.
    Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub rank: usize,
    pub solution_space_dim: usize,
    pub consistent: bool,
    pub method: RankMethod,
    /// Basis of the homogeneous solution space.
    #[serde(skip)]
    pub nullspace: Vec<Vec<Rational>>,
}

impl LinearSystem {
    pub fn new(variables: Vec<String>) -> Self {
        Self {
            variables,
            equations: Vec::new(),
        }
    }

    pub fn push(&mut self, eq: Equation) -> Result<()> {
        if let Some((v, _)) = eq.terms.iter().find(|(v, _)| *v >= self.variables.len()) {
            return Err(Error::LengthMismatch(format!(
                "variable {v} outside 0..{}",
                self.variables.len()
            )));
        }
        self.equations.push(eq);
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.equations.iter().all(|e| e.rhs.is_zero())
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len() && self.equations.iter().all(|e| e.eval(x) == e.rhs)
    }

    /// Exact rank, nullspace and consistency.
    pub fn solve(&self) -> Solution {
        let cols = self.variables.len();
        let (rank, nullspace, method) = match self.modular(cols) {
            Some((r, ns)) => (r, ns, RankMethod::CertifiedModular),
            None => {
                let (r, ns) = self.rational(cols);
                (r, ns, RankMethod::Rational)
            }
        };
        let consistent = self.is_homogeneous() || self.augmented_rank() == rank;
        Solution {
            rank,
            solution_space_dim: cols - rank,
            consistent,
            method,
            nullspace,
        }
    }

    fn augmented_rank(&self) -> usize {
        let cols = self.variables.len() + 1;
        let mut m: Vec<Vec<Rational>> = self
            .equations
            .iter()
            .map(|e| {
                let mut row = vec![Rational::zero(); cols];
                for (v, c) in &e.terms {
                    row[*v] = c.clone();
                }
                row[cols - 1] = e.rhs.clone();
                row
            })
            .collect();
        rref(&mut m).len()
    }

    fn rational(&self, cols: usize) -> (usize, Vec<Vec<Rational>>) {
        let mut m: Vec<Vec<Rational>> = self
            .equations
            .iter()
            .filter(|e| !e.terms.is_empty())
            .map(|e| {
                let mut row = vec![Rational::zero(); cols];
                for (v, c) in &e.terms {
                    row[*v] = c.clone();
                }
                row
            })
            .collect();
        let pivots = rref(&mut m);
        let ns = nullspace_from_rref(&m, &pivots, cols);
        (pivots.len(), ns)
    }

    /// Incremental reduced echelon basis over GF(P), then an exact check of
    /// the lifted nullspace. `None` when the certificate cannot be built.
    fn modular(&self, cols: usize) -> Option<(usize, Vec<Vec<Rational>>)> {
        let mut basis: Vec<Vec<u64>> = Vec::new();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut pivots: Vec<usize> = Vec::new();
        let mut v = vec![0u64; cols];
        for e in &self.equations {
            if e.terms.is_empty() {
                continue;
            }
            v.iter_mut().for_each(|x| *x = 0);
            for (i, c) in &e.terms {
                v[*i] = to_mod(c)?;
            }
            for &(i, _) in &e.terms {
                if let Some(b) = pivot_of_col[i] {
                    let f = v[i];
                    if f != 0 {
                        for (x, y) in v.iter_mut().zip(&basis[b]) {
                            if *y != 0 {
                                *x = sub_mod(*x, mul_mod(f, *y));
                            }
                        }
                    }
                }
            }
            let Some(col) = v.iter().position(|&x| x != 0) else {
                continue;
            };
            let inv = inv_mod(v[col]);
            v.iter_mut().for_each(|x| *x = mul_mod(*x, inv));
            for row in basis.iter_mut() {
                let f = row[col];
                if f != 0 {
                    for (x, y) in row.iter_mut().zip(&v) {
                        if *y != 0 {
                            *x = sub_mod(*x, mul_mod(f, *y));
                        }
                    }
                }
            }
            pivot_of_col[col] = Some(basis.len());
            pivots.push(col);
            basis.push(v.clone());
        }
        let rank = basis.len();
        let mut nullspace = Vec::with_capacity(cols - rank);
        for f in (0..cols).filter(|&c| pivot_of_col[c].is_none()) {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (b, &p) in pivots.iter().enumerate() {
                let val = sub_mod(0, basis[b][f]);
                if val != 0 {
                    x[p] = reconstruct(val)?;
                }
            }
            nullspace.push(x);
        }
        if !self.annihilates(&nullspace) {
            return None;
        }
        Some((rank, nullspace))
    }
}

fn small_integer(q: &Rational) -> Option<i128> {
    q.is_integer().then(|| q.numer().to_i128()).flatten()
}

/// Integer multiple of `x` as `i128`, if it fits.
fn scaled_i128(x: &[Rational]) -> Option<Vec<i128>> {
    let mut lcm: i128 = 1;
    for q in x {
        let d = q.denom().to_i128()?;
        lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
    }
    x.iter()
        .map(|q| q.numer().to_i128()?.checked_mul(lcm / q.denom().to_i128()?))
        .collect()
}

impl LinearSystem {
    /// Exact check that every equation's homogeneous part vanishes on each
    /// vector, in `i128` where it fits.
    fn annihilates(&self, vectors: &[Vec<Rational>]) -> bool {
        let rows: Option<Vec<Vec<(usize, i128)>>> = self
            .equations
            .iter()
            .map(|e| e.terms.iter().map(|(v, c)| Some((*v, small_integer(c)?))).collect())
            .collect();
        let zero = Rational::zero();
        for x in vectors {
            let fast = rows.as_ref().zip(scaled_i128(x));
            let ok = match fast {
                Some((rows, xi)) => rows.iter().all(|r| {
                    r.iter()
                        .try_fold(0i128, |acc, (v, c)| acc.checked_add(c.checked_mul(xi[*v])?))
                        .map_or_else(|| false, |s| s == 0)
                }),
                None => false,
            };
            if !ok && self.equations.iter().any(|e| e.eval(x) != zero) {
                return false;
            }
        }
        true
    }
}

/// `true` when some vector of the span gives different values to any two
/// coordinates with different labels. Holds exactly when no two such
/// coordinates have the same profile across the spanning vectors.
pub fn generic_element_separates(basis: &[Vec<Rational>], labels: &[u32]) -> bool {
    let mut seen: HashMap<Vec<&Rational>, u32> = HashMap::new();
    labels.iter().enumerate().all(|(v, &c)| {
        let profile: Vec<&Rational> = basis.iter().map(|b| &b[v]).collect();
        *seen.entry(profile).or_insert(c) == c
    })
}

/// Integer-scaled copy of a rational vector, for compact reporting.
pub fn primitive_integer_vector(x: &[Rational]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = x.iter().map(|q| (q * &lcm).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return scaled;
    }
    let sign = scaled.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    scaled
        .into_iter()
        .map(|v| if sign { -(v / &g) } else { v / &g })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::scalar::{integer, rational, Float};

    fn sys(cols: usize, rows: &[(&[i64], i64)]) -> LinearSystem {
        let mut s = LinearSystem::new((0..cols).map(|i| format!("x{i}")).collect());
        for (r, b) in rows {
            s.push(Equation::new(
                r.iter().enumerate().map(|(i, &c)| (i, integer(c))),
                integer(*b),
            ))
            .unwrap();
        }
        s
    }

    #[test]
    fn reconstruction_round_trips() {
        for q in [rational(3, 7), rational(-22, 5), integer(0), integer(-1), rational(1, 1_000_000)] {
            assert_eq!(reconstruct(to_mod(&q).unwrap()), Some(q));
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let s = sys(3, &[(&[1, 2, 3], 0), (&[2, 4, 6], 0), (&[1, 0, 1], 0)]);
        let sol = s.solve();
        assert_eq!((sol.rank, sol.solution_space_dim), (2, 1));
        assert_eq!(sol.method, RankMethod::CertifiedModular);
        assert!(sol.consistent);
        assert!(s.satisfied_by(&sol.nullspace[0]));
        assert_eq!(
            primitive_integer_vector(&sol.nullspace[0]),
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(-1)]
        );
    }

    #[test]
    fn inconsistent_system() {
        let s = sys(2, &[(&[1, 1], 1), (&[1, 1], 2)]);
        let sol = s.solve();
        assert_eq!(sol.rank, 1);
        assert!(!sol.consistent);
    }

    #[test]
    fn modular_agrees_with_rational_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let rows = rng.random_range(1..8);
            let cols = rng.random_range(1..8);
            let mut s = LinearSystem::new((0..cols).map(|i| format!("x{i}")).collect());
            for _ in 0..rows {
                let base: Vec<i64> = (0..cols).map(|_| rng.random_range(-3..=3)).collect();
                s.push(Equation::new(base.iter().enumerate().map(|(i, &c)| (i, integer(c))), integer(0)))
                    .unwrap();
            }
            let m = s.modular(cols).unwrap();
            let r = s.rational(cols);
            assert_eq!(m.0, r.0);
            assert_eq!(m.1, r.1);
        }
    }

    #[test]
    fn float_rref() {
        let mut m = vec![
            vec![Float::from(2.0), Float::from(4.0)],
            vec![Float::from(1.0), Float::from(2.0)],
        ];
        assert_eq!(rref(&mut m), vec![0]);
        assert_eq!(m[0], vec![Float::from(1.0), Float::from(2.0)]);
    }

    #[test]
    fn separation() {
        let basis = vec![vec![integer(1), integer(1), integer(0)]];
        assert!(generic_element_separates(&basis, &[0, 0, 1]));
        assert!(!generic_element_separates(&basis, &[0, 1, 1]));
    }
}

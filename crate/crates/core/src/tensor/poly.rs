use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// `P(t) = c_0 + c_1 t + … + c_{d-1} t^{d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "S: std::fmt::Display", deserialize = "S: std::str::FromStr"))]
pub struct PolynomialTransform<S> {
    #[serde(with = "super::scalar::as_text::seq")]
    pub coefficients: Vec<S>,
}

impl<S: Scalar> PolynomialTransform<S> {
    pub fn eval(&self, t: &S) -> S {
        self.coefficients
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    /// Degree of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }
}

/// The unique polynomial of degree below `a.len()` with `P(a_i) = b_i`,
/// solved from the Vandermonde system by Gaussian elimination.
pub fn vandermonde_transform<S: Scalar>(a: &[S], b: &[S]) -> Result<PolynomialTransform<S>> {
    let d = a.len();
    if b.len() != d {
        return Err(Error::LengthMismatch(format!(
            "{d} interpolation points but {} values",
            b.len()
        )));
    }
    for i in 0..d {
        if a[i + 1..].contains(&a[i]) {
            return Err(Error::LevelTransformUndefined);
        }
    }
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(ai, bi)| {
            let mut row = Vec::with_capacity(d + 1);
            let mut p = S::one();
            for _ in 0..d {
                row.push(p.clone());
                p = p * ai.clone();
            }
            row.push(bi.clone());
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::LevelTransformUndefined)?;
        m.swap(col, piv);
        let inv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = x.clone() / inv.clone();
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
    }
    Ok(PolynomialTransform {
        coefficients: m.into_iter().map(|row| row[d].clone()).collect(),
    })
}

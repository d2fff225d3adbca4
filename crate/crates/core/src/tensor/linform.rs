use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;

/// A formal sum `Σ c_p x_p` over parameter slots `x_0, x_1, …`; zero
/// coefficients are never stored, so equal forms compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm<S: Ord> {
    pub coefficients: BTreeMap<usize, S>,
}

impl<S: Scalar> LinearForm<S> {
    pub fn new() -> Self {
        Self {
            coefficients: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, param: usize, coef: S) {
        let c = self.coefficients.entry(param).or_insert_with(S::zero);
        *c = c.clone() + coef;
        if c.is_zero() {
            self.coefficients.remove(&param);
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, S)>) -> Self {
        let mut f = Self::new();
        for (p, c) in terms {
            f.add_term(p, c);
        }
        f
    }

    pub fn coefficient(&self, param: usize) -> S {
        self.coefficients.get(&param).cloned().unwrap_or_else(S::zero)
    }

    /// Substitutes `params[p]` for `x_p`; missing parameters count as zero.
    pub fn eval(&self, params: &[S]) -> S {
        self.coefficients
            .iter()
            .filter_map(|(&p, c)| params.get(p).map(|v| c.clone() * v.clone()))
            .fold(S::zero(), |a, b| a + b)
    }
}

impl<S: Scalar> fmt::Display for LinearForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·x{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::scalar::{integer, Rational};

    #[test]
    fn zero_terms_vanish() {
        let mut f: LinearForm<Rational> = LinearForm::new();
        f.add_term(1, integer(3));
        f.add_term(1, integer(-3));
        assert_eq!(f, LinearForm::new());
        let g = LinearForm::from_terms([(0, integer(2)), (2, integer(1))]);
        assert_eq!(g.eval(&[integer(5), integer(100), integer(7)]), integer(17));
        assert_eq!(g.coefficient(1), integer(0));
        assert_eq!(g.to_string(), "2·x0 + 1·x2");
    }
}

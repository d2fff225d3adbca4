//! Coloring tensors over V^(k) and the operations that build one level from
//! another.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::linform::LinearForm;
use super::poly::{vandermonde_transform, PolynomialTransform};
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ops::drop_coord;
use crate::tuple::{Coords, KPartition, KTuple, TupleSpace, Vertex};

/// A total function on V^(k), stored by tuple rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorTensor<V> {
    space: TupleSpace,
    values: Vec<V>,
}

impl<V> ColorTensor<V> {
    pub fn new(space: TupleSpace, values: Vec<V>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::SizeMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(&[Vertex]) -> V) -> Result<Self> {
        let space = TupleSpace::new(n, k)?;
        let mut values = Vec::with_capacity(space.len());
        let mut it = space.iter();
        while let Some(t) = it.next_slice() {
            values.push(f(t));
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn arity(&self) -> usize {
        self.space.arity()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    #[inline]
    pub fn get(&self, t: &[Vertex]) -> &V {
        &self.values[self.space.rank(t)]
    }

    pub fn get_tuple(&self, t: &KTuple) -> Result<&V> {
        Ok(&self.values[self.space.checked_rank(t.coords())?])
    }

    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> ColorTensor<W> {
        ColorTensor {
            space: self.space,
            values: self.values.iter().map(f).collect(),
        }
    }

    fn same_space<W>(&self, other: &ColorTensor<W>) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        if self.n() != other.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }
}

impl<V: Hash + Eq + Clone> ColorTensor<V> {
    /// The partition into level sets.
    pub fn level_partition(&self) -> KPartition {
        KPartition::from_rank_labels(self.space, self.values.iter().cloned())
    }

    /// The value on each class of `l`, failing on the first class where the
    /// tensor is not constant.
    pub fn class_values(&self, l: &KPartition) -> Result<Vec<V>> {
        if l.space() != self.space() {
            return Err(Error::ArityMismatch {
                expected: l.arity(),
                found: self.arity(),
            });
        }
        let mut out: Vec<Option<V>> = vec![None; l.class_count()];
        for (r, v) in self.values.iter().enumerate() {
            let c = l.class_of_rank(r) as usize;
            match &out[c] {
                None => out[c] = Some(v.clone()),
                Some(w) if w != v => return Err(Error::NotClassConstant { class: c }),
                _ => {}
            }
        }
        Ok(out.into_iter().map(|v| v.expect("classes are nonempty")).collect())
    }
}

/// Class id plus one on every tuple, so no class is colored zero.
pub fn class_tensor<S: Scalar>(l: &KPartition) -> ColorTensor<S> {
    ColorTensor {
        space: *l.space(),
        values: l
            .class_ids()
            .iter()
            .map(|&c| S::from_count(c as usize + 1))
            .collect(),
    }
}

/// The 0/1 indicator of one class.
pub fn indicator<S: Scalar>(l: &KPartition, class: u32) -> ColorTensor<S> {
    ColorTensor {
        space: *l.space(),
        values: l
            .class_ids()
            .iter()
            .map(|&c| if c == class { S::one() } else { S::zero() })
            .collect(),
    }
}

/// The 0/1 adjacency tensor on ordered pairs of distinct vertices.
pub fn adjacency_tensor<S: Scalar>(g: &Graph) -> Result<ColorTensor<S>> {
    ColorTensor::from_fn(g.n(), 2, |t| {
        if g.has_edge(t[0], t[1]) {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// Equal level sets.
pub fn level_equivalent<V, W>(a: &ColorTensor<V>, b: &ColorTensor<W>) -> Result<bool>
where
    V: Hash + Eq + Clone,
    W: Hash + Eq + Clone,
{
    a.same_space(b)?;
    Ok(a.level_partition() == b.level_partition())
}

/// Factors of a product, each tagged with the coordinate it omits.
pub type TaggedProduct<V> = Vec<(u8, V)>;

fn check_bound<V: Hash + Eq + Clone>(sigma: &ColorTensor<V>, l: &KPartition) -> Result<()> {
    sigma.class_values(l)?;
    if l.arity() + 1 > l.n() {
        return Err(Error::NoExtension(l.arity() + 1, l.n()));
    }
    Ok(())
}

/// Colors each (k+1)-tuple by the product of its drop-projection colors,
/// kept symbolically as position-tagged factors.
pub fn product_assemble<V: Hash + Eq + Clone>(
    sigma: &ColorTensor<V>,
    l: &KPartition,
) -> Result<ColorTensor<TaggedProduct<V>>> {
    check_bound(sigma, l)?;
    ColorTensor::from_fn(l.n(), l.arity() + 1, |beta| {
        (0..beta.len())
            .map(|j| (j as u8, sigma.get(&drop_coord(beta, j)).clone()))
            .collect()
    })
}

/// The product with untagged factors: the sorted multiset of the
/// drop-projection colors.
pub fn commutative_product_assemble<V: Hash + Eq + Clone + Ord>(
    sigma: &ColorTensor<V>,
    l: &KPartition,
) -> Result<ColorTensor<Vec<V>>> {
    check_bound(sigma, l)?;
    ColorTensor::from_fn(l.n(), l.arity() + 1, |beta| {
        let mut f: Vec<V> = (0..beta.len())
            .map(|j| sigma.get(&drop_coord(beta, j)).clone())
            .collect();
        f.sort();
        f
    })
}

/// Colors each (k+1)-tuple `β` by `σ(β without its last coordinate)·x_0 +
/// Σ_m σ(β without coordinate m)·x_{m+1}`.
pub fn linear_assemble<S: Scalar>(sigma: &ColorTensor<S>) -> Result<ColorTensor<LinearForm<S>>> {
    let k = sigma.arity();
    if k + 1 > sigma.n() {
        return Err(Error::NoExtension(k + 1, sigma.n()));
    }
    ColorTensor::from_fn(sigma.n(), k + 1, |beta| {
        LinearForm::from_terms((0..=k).map(|m| {
            let slot = if m == k { 0 } else { m + 1 };
            (slot, sigma.get(&drop_coord(beta, m)).clone())
        }))
    })
}

/// Parameter values of very different magnitudes for generic evaluation.
pub const GENERIC_PRIMES: [i64; 5] = [
    1_009,
    1_000_003,
    1_000_000_007,
    1_000_000_000_039,
    1_000_000_000_000_037,
];

pub fn evaluate_forms<S: Scalar>(t: &ColorTensor<LinearForm<S>>, params: &[S]) -> ColorTensor<S> {
    t.map(|f| f.eval(params))
}

/// `(σ¹ ◇ … ◇ σᵏ)(t) = Σ_{l ∉ t} Π_j σʲ(t without coordinate j, then l)`.
pub fn projective_convolution<S: Scalar>(tensors: &[ColorTensor<S>]) -> Result<ColorTensor<S>> {
    let first = tensors.first().ok_or(Error::ArityTooSmall { min: 1, found: 0 })?;
    let k = first.arity();
    if tensors.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            found: tensors.len(),
        });
    }
    for t in tensors {
        first.same_space(t)?;
    }
    let n = first.n();
    let mut buf = Coords::new();
    ColorTensor::from_fn(n, k, |t| {
        let mut sum = S::zero();
        for l in (0..n).filter(|l| !t.contains(l)) {
            let mut prod = S::one();
            for (j, s) in tensors.iter().enumerate() {
                buf.clear();
                buf.extend(t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
                buf.push(l);
                prod = prod * s.get(&buf).clone();
                if prod.is_zero() {
                    break;
                }
            }
            sum = sum + prod;
        }
        sum
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWitness {
    pub class: u32,
    pub tuples: [KTuple; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: std::fmt::Display", deserialize = "S: std::str::FromStr"))]
pub struct ClassFunctionCheck<S> {
    pub constant: bool,
    pub witness: Option<ClassWitness>,
    /// `P` with `τ = P(σ)` on every class, when `σ` separates the classes.
    pub transform: Option<PolynomialTransform<S>>,
}

/// Whether `tau` is constant on the classes of `l`, and if so a polynomial
/// carrying the class-constant `sigma` onto it.
pub fn check_class_function<S: Scalar>(
    tau: &ColorTensor<S>,
    l: &KPartition,
    sigma: &ColorTensor<S>,
) -> Result<ClassFunctionCheck<S>> {
    let sv = sigma.class_values(l)?;
    tau.same_space(sigma)?;
    let mut first: Vec<Option<usize>> = vec![None; l.class_count()];
    for r in 0..l.tuple_count() {
        let c = l.class_of_rank(r);
        match first[c as usize] {
            None => first[c as usize] = Some(r),
            Some(r0) if tau.values[r0] != tau.values[r] => {
                return Ok(ClassFunctionCheck {
                    constant: false,
                    witness: Some(ClassWitness {
                        class: c,
                        tuples: [l.space().unrank(r0), l.space().unrank(r)],
                    }),
                    transform: None,
                })
            }
            _ => {}
        }
    }
    let tv: Vec<S> = first
        .iter()
        .map(|r| tau.values[r.expect("classes are nonempty")].clone())
        .collect();
    let transform = match vandermonde_transform(&sv, &tv) {
        Ok(p) => Some(p),
        Err(Error::LevelTransformUndefined) => None,
        Err(e) => return Err(e),
    };
    Ok(ClassFunctionCheck {
        constant: true,
        witness: None,
        transform,
    })
}

/// Counts of each value, for quick histogram comparisons.
pub fn value_histogram<V: Hash + Eq + Clone>(t: &ColorTensor<V>) -> HashMap<V, usize> {
    let mut h = HashMap::new();
    for v in &t.values {
        *h.entry(v.clone()).or_insert(0) += 1;
    }
    h
}

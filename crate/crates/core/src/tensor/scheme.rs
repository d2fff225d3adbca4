//! Intersection numbers of k-partitions and strongly regular graph parameters.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::color::{adjacency_tensor, projective_convolution};
use super::poly::{vandermonde_transform, PolynomialTransform};
use super::scalar::{integer, Rational};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tuple::{Coords, KPartition, KTuple};

/// `λ[factors][class]`: for any tuple of `class`, the number of `l` such that
/// each drop-projection extended by `l` lies in the matching factor class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionTable {
    pub k: usize,
    pub classes: usize,
    /// Nonzero entries, sorted by factors then class.
    pub entries: Vec<IntersectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionEntry {
    pub factors: Vec<u32>,
    pub class: u32,
    pub value: usize,
}

impl IntersectionTable {
    pub fn get(&self, factors: &[u32], class: u32) -> usize {
        self.entries
            .binary_search_by(|e| (e.factors.as_slice(), e.class).cmp(&(factors, class)))
            .map_or(0, |i| self.entries[i].value)
    }

    /// One row per nonzero entry: `f1,…,fk,class,value`.
    pub fn to_csv(&self) -> String {
        let mut out: Vec<String> = (1..=self.k).map(|i| format!("f{i}")).collect();
        out.push("class".into());
        out.push("value".into());
        let mut s = out.join(",");
        s.push('\n');
        for e in &self.entries {
            let mut row: Vec<String> = e.factors.iter().map(u32::to_string).collect();
            row.push(e.class.to_string());
            row.push(e.value.to_string());
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Two tuples of one class with different counts for the same factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    pub class: u32,
    pub factors: Vec<u32>,
    pub tuples: [KTuple; 2],
    pub values: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IntersectionNumbers {
    Table(IntersectionTable),
    NotConstant(IntersectionWitness),
}

type Counts = BTreeMap<Vec<u32>, usize>;

fn counts_at(l: &KPartition, t: &[usize], buf: &mut Coords) -> Counts {
    let mut out = BTreeMap::new();
    for x in (0..l.n()).filter(|x| !t.contains(x)) {
        let key: Vec<u32> = (0..t.len())
            .map(|j| {
                buf.clear();
                buf.extend(t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
                buf.push(x);
                l.class_of_coords(buf)
            })
            .collect();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// Expands the convolution of class indicators in the indicator basis,
/// failing on the first cell that is not constant on a class.
pub fn intersection_numbers(l: &KPartition) -> Result<IntersectionNumbers> {
    // first tuple of each class and its counts
    let mut reference: Vec<Option<(usize, Counts)>> = vec![None; l.class_count()];
    let mut buf = Coords::new();
    let mut it = l.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        let c = l.class_of_rank(r);
        let counts = counts_at(l, t, &mut buf);
        match &reference[c as usize] {
            None => reference[c as usize] = Some((r, counts)),
            Some((r0, m0)) if *m0 != counts => {
                let factors = m0
                    .keys()
                    .chain(counts.keys())
                    .filter(|f| m0.get(*f) != counts.get(*f))
                    .min()
                    .expect("maps differ")
                    .clone();
                return Ok(IntersectionNumbers::NotConstant(IntersectionWitness {
                    class: c,
                    values: [
                        m0.get(&factors).copied().unwrap_or(0),
                        counts.get(&factors).copied().unwrap_or(0),
                    ],
                    factors,
                    tuples: [l.space().unrank(*r0), l.space().unrank(r)],
                }));
            }
            _ => {}
        }
        r += 1;
    }
    let mut entries = Vec::new();
    for (c, slot) in reference.into_iter().enumerate() {
        let (_, m) = slot.expect("classes are nonempty");
        entries.extend(m.into_iter().map(|(factors, value)| IntersectionEntry {
            factors,
            class: c as u32,
            value,
        }));
    }
    entries.sort_by(|a, b| (&a.factors, a.class).cmp(&(&b.factors, b.class)));
    Ok(IntersectionNumbers::Table(IntersectionTable {
        k: l.arity(),
        classes: l.class_count(),
        entries,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrgReport {
    pub n: usize,
    pub m: usize,
    /// Common neighbors of adjacent pairs, if constant; `None` also when
    /// there are no edges.
    pub lambda: Option<usize>,
    /// Common neighbors of non-adjacent pairs, if constant; `None` also when
    /// there are no non-edges.
    pub mu: Option<usize>,
    pub strongly_regular: bool,
    /// The convolution of the adjacency tensor with itself equals
    /// `μ + (λ − μ)·A` off the diagonal.
    pub convolution_identity: bool,
    /// The affine map `x + y·t` carrying the 0/1 colors onto `(μ, λ)`.
    pub transform: Option<PolynomialTransform<Rational>>,
}

fn constant(values: impl Iterator<Item = usize>) -> (bool, Option<usize>) {
    let mut seen: Option<usize> = None;
    for v in values {
        match seen {
            None => seen = Some(v),
            Some(s) if s != v => return (false, None),
            _ => {}
        }
    }
    (true, seen)
}

pub fn srg_parameters(g: &Graph) -> Result<SrgReport> {
    if g.is_directed() {
        return Err(Error::Directed);
    }
    let m = g.regular_degree().ok_or(Error::NonRegular)?;
    let n = g.n();
    let common = |u: usize, v: usize| (0..n).filter(|&w| g.has_edge(u, w) && g.has_edge(v, w)).count();
    let pairs = || (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let (lc, lambda) = constant(pairs().filter(|&(u, v)| g.has_edge(u, v)).map(|(u, v)| common(u, v)));
    let (mc, mu) = constant(pairs().filter(|&(u, v)| !g.has_edge(u, v)).map(|(u, v)| common(u, v)));
    let strongly_regular = lc && mc;
    let mut convolution_identity = false;
    let mut transform = None;
    if strongly_regular && n >= 2 {
        let a = adjacency_tensor::<Rational>(g)?;
        let conv = projective_convolution(&[a.clone(), a.clone()])?;
        let (l, u) = (lambda.unwrap_or(0) as i64, mu.unwrap_or(0) as i64);
        convolution_identity = conv
            .values()
            .iter()
            .zip(a.values())
            .all(|(c, s)| *c == integer(u) + integer(l - u) * s.clone());
        if let (Some(l), Some(u)) = (lambda, mu) {
            let p = vandermonde_transform(
                &[integer(1), integer(0)],
                &[integer(l as i64), integer(u as i64)],
            )?;
            transform = Some(p);
        }
    }
    Ok(SrgReport {
        n,
        m,
        lambda,
        mu,
        strongly_regular,
        convolution_identity,
        transform,
    })
}

/// Histogram of values per class of a partition, for reports.
pub fn class_value_counts(l: &KPartition, values: &[usize]) -> Vec<HashMap<usize, usize>> {
    let mut out = vec![HashMap::new(); l.class_count()];
    for (r, v) in values.iter().enumerate() {
        *out[l.class_of_rank(r) as usize].entry(*v).or_insert(0) += 1;
    }
    out
}

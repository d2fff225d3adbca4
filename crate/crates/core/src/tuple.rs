//! Vertices, tuples of pairwise-distinct vertices and canonical partitions of
//! the tuple space `V^(k)`.
//!
//! Tuples are addressed by their rank in lexicographic order, so a partition
//! is stored as a flat vector of class identifiers indexed by rank. The tuple
//! space itself is never materialized; ranks are computed arithmetically.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Largest supported tuple arity.
pub const MAX_ARITY: usize = 8;

pub type Vertex = usize;

pub(crate) type Coords = SmallVec<[Vertex; MAX_ARITY]>;

/// A vertex set `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    n: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVertexSet);
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// An ordered tuple of pairwise-distinct vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KTuple(Coords);

impl KTuple {
    /// Builds a tuple, checking distinctness and range against `n`.
    pub fn new(coords: &[Vertex], n: usize) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroArity);
        }
        if coords.len() > MAX_ARITY {
            return Err(Error::ArityTooLarge(coords.len()));
        }
        for (i, &v) in coords.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidTuple {
                    coords: coords.to_vec(),
                    n,
                    reason: "coordinate out of range",
                });
            }
            if coords[..i].contains(&v) {
                return Err(Error::InvalidTuple {
                    coords: coords.to_vec(),
                    n,
                    reason: "repeated coordinate",
                });
            }
        }
        Ok(Self(Coords::from_slice(coords)))
    }

    pub(crate) fn from_coords(coords: Coords) -> Self {
        Self(coords)
    }

    pub(crate) fn from_slice_unchecked(coords: &[Vertex]) -> Self {
        Self(Coords::from_slice(coords))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Vertex] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.0.to_vec()
    }
}

impl fmt::Debug for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "⟩")
    }
}

impl fmt::Display for KTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (n - k + 1..=n).product()
}

/// Rank/unrank arithmetic for `V^(k)` in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TupleSpace {
    n: usize,
    k: usize,
    len: usize,
    weights: [usize; MAX_ARITY],
}

impl TupleSpace {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroArity);
        }
        if k > MAX_ARITY {
            return Err(Error::ArityTooLarge(k));
        }
        if k > n {
            return Err(Error::EmptyTupleSpace { n, k });
        }
        let mut weights = [0; MAX_ARITY];
        for (j, w) in weights.iter_mut().enumerate().take(k) {
            *w = falling(n - j - 1, k - j - 1);
        }
        Ok(Self {
            n,
            k,
            len: falling(n, k),
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Lexicographic rank of a distinct-coordinate tuple. The caller guarantees
    /// validity; use [`TupleSpace::checked_rank`] for untrusted input.
    #[inline]
    pub fn rank(&self, t: &[Vertex]) -> usize {
        debug_assert_eq!(t.len(), self.k);
        let mut r = 0;
        for j in 0..self.k {
            let v = t[j];
            let smaller_used = t[..j].iter().filter(|&&u| u < v).count();
            r += (v - smaller_used) * self.weights[j];
        }
        r
    }

    pub fn checked_rank(&self, t: &[Vertex]) -> Result<usize> {
        if t.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: t.len(),
            });
        }
        KTuple::new(t, self.n)?;
        Ok(self.rank(t))
    }

    pub fn unrank(&self, mut r: usize) -> KTuple {
        debug_assert!(r < self.len);
        let mut used = vec![false; self.n];
        let mut out = Coords::new();
        for j in 0..self.k {
            let w = self.weights[j];
            let mut c = r / w;
            r %= w;
            let v = (0..self.n)
                .find(|&v| {
                    if used[v] {
                        return false;
                    }
                    if c == 0 {
                        return true;
                    }
                    c -= 1;
                    false
                })
                .expect("rank within range");
            used[v] = true;
            out.push(v);
        }
        KTuple(out)
    }

    /// Lexicographic iterator over all tuples.
    pub fn iter(&self) -> TupleIter {
        TupleIter::new(self.n, self.k)
    }
}

/// Lazy lexicographic enumeration of `V^(k)`.
pub struct TupleIter {
    n: usize,
    coords: Coords,
    used: Vec<bool>,
    started: bool,
    done: bool,
}

impl TupleIter {
    fn new(n: usize, k: usize) -> Self {
        let mut used = vec![false; n];
        let coords: Coords = (0..k).collect();
        for &v in &coords {
            used[v] = true;
        }
        Self {
            n,
            coords,
            used,
            started: false,
            done: k > n,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.coords.len();
        let mut j = k;
        while j > 0 {
            j -= 1;
            let cur = self.coords[j];
            self.used[cur] = false;
            if let Some(next) = (cur + 1..self.n).find(|&v| !self.used[v]) {
                self.coords[j] = next;
                self.used[next] = true;
                let mut fill = 0;
                for slot in j + 1..k {
                    while self.used[fill] {
                        fill += 1;
                    }
                    self.coords[slot] = fill;
                    self.used[fill] = true;
                }
                return true;
            }
        }
        false
    }

    /// Current tuple without allocation; valid until the next call.
    pub fn next_slice(&mut self) -> Option<&[Vertex]> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(&self.coords)
    }
}

impl Iterator for TupleIter {
    type Item = KTuple;

    fn next(&mut self) -> Option<KTuple> {
        self.next_slice().map(KTuple::from_slice_unchecked)
    }
}

/// All tuples of `V^(k)` in lexicographic order.
pub fn enumerate_tuples(n: usize, k: usize) -> Result<Vec<KTuple>> {
    Ok(TupleSpace::new(n, k)?.iter().collect())
}

/// A partition of `V^(k)` with canonical class identifiers: classes are
/// numbered by the rank of their lexicographically smallest member.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KPartition {
    space: TupleSpace,
    class_of: Vec<u32>,
    class_count: usize,
}

impl fmt::Debug for KPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KPartition")
            .field("n", &self.n())
            .field("k", &self.arity())
            .field("classes", &self.class_count)
            .finish()
    }
}

impl KPartition {
    /// Canonicalizes an arbitrary labelling given in rank order.
    pub fn from_rank_labels<L, I>(space: TupleSpace, labels: I) -> Self
    where
        L: Hash + Eq,
        I: IntoIterator<Item = L>,
    {
        let mut ids: HashMap<L, u32> = HashMap::new();
        let mut class_of = Vec::with_capacity(space.len());
        for label in labels {
            let next = ids.len() as u32;
            class_of.push(*ids.entry(label).or_insert(next));
        }
        assert_eq!(class_of.len(), space.len(), "one label per tuple");
        Self {
            space,
            class_count: ids.len(),
            class_of,
        }
    }

    /// Relabels raw class ids into canonical order.
    pub fn from_class_ids(space: TupleSpace, raw: &[u32]) -> Self {
        Self::from_rank_labels(space, raw.iter().copied())
    }

    pub fn single_class(n: usize, k: usize) -> Result<Self> {
        let space = TupleSpace::new(n, k)?;
        Ok(Self {
            space,
            class_of: vec![0; space.len()],
            class_count: 1,
        })
    }

    pub fn discrete(n: usize, k: usize) -> Result<Self> {
        let space = TupleSpace::new(n, k)?;
        Ok(Self {
            space,
            class_of: (0..space.len() as u32).collect(),
            class_count: space.len(),
        })
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

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn tuple_count(&self) -> usize {
        self.class_of.len()
    }

    /// Class ids indexed by tuple rank.
    pub fn class_ids(&self) -> &[u32] {
        &self.class_of
    }

    #[inline]
    pub fn class_of_rank(&self, rank: usize) -> u32 {
        self.class_of[rank]
    }

    #[inline]
    pub fn class_of_coords(&self, t: &[Vertex]) -> u32 {
        self.class_of[self.space.rank(t)]
    }

    pub fn class_of(&self, t: &KTuple) -> Result<u32> {
        Ok(self.class_of[self.space.checked_rank(t.coords())?])
    }

    pub fn is_discrete(&self) -> bool {
        self.class_count == self.class_of.len()
    }

    /// Member ranks per class, each in ascending order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (r, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(r);
        }
        out
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.class_count];
        for &c in &self.class_of {
            out[c as usize] += 1;
        }
        out
    }

    /// Members of one class as tuples, in lexicographic order (the matrix
    /// view of the class).
    pub fn members(&self, class: usize) -> Vec<KTuple> {
        let mut out = Vec::new();
        let mut it = self.space.iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            if self.class_of[r] as usize == class {
                out.push(KTuple::from_slice_unchecked(t));
            }
            r += 1;
        }
        out
    }

    /// Members of every class as tuples.
    pub fn class_tuples(&self) -> Vec<Vec<KTuple>> {
        let mut out = vec![Vec::new(); self.class_count];
        let mut it = self.space.iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            out[self.class_of[r] as usize].push(KTuple::from_slice_unchecked(t));
            r += 1;
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
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

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PartitionDoc::from(self.clone())).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PartitionDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            format: "partition json",
            offset: 0,
            message: e.to_string(),
        })?;
        Self::try_from(doc)
    }
}

/// Builds a partition by grouping tuples with equal labels.
pub fn partition_from_labels<L, F>(n: usize, k: usize, mut label: F) -> Result<KPartition>
where
    L: Hash + Eq,
    F: FnMut(&[Vertex]) -> Option<L>,
{
    let space = TupleSpace::new(n, k)?;
    let mut labels = Vec::with_capacity(space.len());
    let mut it = space.iter();
    while let Some(t) = it.next_slice() {
        match label(t) {
            Some(l) => labels.push(l),
            None => return Err(Error::MissingLabel(t.to_vec())),
        }
    }
    Ok(KPartition::from_rank_labels(space, labels))
}

/// `true` iff every class of `p` lies inside one class of `q`.
pub fn refines(p: &KPartition, q: &KPartition) -> Result<bool> {
    p.check_compatible(q)?;
    let mut image = vec![u32::MAX; p.class_count()];
    for (&cp, &cq) in p.class_of.iter().zip(&q.class_of) {
        let slot = &mut image[cp as usize];
        if *slot == u32::MAX {
            *slot = cq;
        } else if *slot != cq {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Common refinement: classes are the nonempty pairwise intersections.
pub fn meet(p: &KPartition, q: &KPartition) -> Result<KPartition> {
    p.check_compatible(q)?;
    Ok(KPartition::from_rank_labels(
        p.space,
        p.class_of.iter().zip(&q.class_of).map(|(&a, &b)| (a, b)),
    ))
}

/// Finest common coarsening: connected components of the class-overlap
/// relation.
pub fn join(p: &KPartition, q: &KPartition) -> Result<KPartition> {
    p.check_compatible(q)?;
    let dp = p.class_count();
    let mut uf = UnionFind::new(dp + q.class_count());
    for (&a, &b) in p.class_of.iter().zip(&q.class_of) {
        uf.union(a as usize, dp + b as usize);
    }
    let roots: Vec<u32> = p
        .class_of
        .iter()
        .map(|&a| uf.find(a as usize) as u32)
        .collect();
    Ok(KPartition::from_class_ids(p.space, &roots))
}

/// Serialized form: `{"n":…, "k":…, "classes":[[[t…],…],…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub n: usize,
    pub k: usize,
    pub classes: Vec<Vec<Vec<Vertex>>>,
}

impl From<KPartition> for PartitionDoc {
    fn from(p: KPartition) -> Self {
        Self {
            n: p.n(),
            k: p.arity(),
            classes: p
                .class_tuples()
                .into_iter()
                .map(|c| c.into_iter().map(|t| t.to_vec()).collect())
                .collect(),
        }
    }
}

impl TryFrom<PartitionDoc> for KPartition {
    type Error = Error;

    fn try_from(doc: PartitionDoc) -> Result<Self> {
        let space = TupleSpace::new(doc.n, doc.k)?;
        let mut raw = vec![u32::MAX; space.len()];
        for (c, class) in doc.classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::MalformedPartition(format!("class {c} is empty")));
            }
            for t in class {
                let r = space.checked_rank(t)?;
                if raw[r] != u32::MAX {
                    return Err(Error::MalformedPartition(format!(
                        "tuple {t:?} appears in more than one class"
                    )));
                }
                raw[r] = c as u32;
            }
        }
        if let Some(r) = raw.iter().position(|&c| c == u32::MAX) {
            return Err(Error::MalformedPartition(format!(
                "tuple {:?} is not covered",
                space.unrank(r)
            )));
        }
        Ok(KPartition::from_class_ids(space, &raw))
    }
}

impl Serialize for KPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionDoc::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for KPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PartitionDoc::deserialize(d)?;
        KPartition::try_from(doc).map_err(serde::de::Error::custom)
    }
}

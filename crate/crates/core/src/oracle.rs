//! Brute-force automorphism groups of k-partitions and their orbit partitions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ops::{assemble, is_l_full};
use crate::stabilize::initial_partition;
use crate::tuple::{Coords, KPartition, TupleSpace, Vertex};
use crate::unionfind::UnionFind;

/// Exhaustive search visits all n! permutations.
pub const EXHAUSTIVE_LIMIT: usize = 10;
/// Default vertex limit of the backtracking search.
pub const BACKTRACK_LIMIT: usize = 20;
/// Exhaustive search keeps the element list up to this group order.
pub const ELEMENT_CAP: u128 = 40_320;
/// k-closure checks act on n-tuples, so they are restricted to small n.
pub const CLOSURE_LIMIT: usize = 6;

/// A bijection of `0..n`, stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<Vertex>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn new(images: Vec<Vertex>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidTuple {
                    coords: images.clone(),
                    n,
                    reason: "not a permutation",
                });
            }
        }
        Ok(Self(images))
    }

    pub fn images(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: Vertex) -> Vertex {
        self.0[v]
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Self(self.0.iter().map(|&v| other.0[v]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (v, &x) in self.0.iter().enumerate() {
            inv[x] = v;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    #[default]
    Backtrack,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleConfig {
    pub mode: SearchMode,
    /// Overrides [`BACKTRACK_LIMIT`]; the exhaustive limit is fixed.
    pub limit: Option<usize>,
}

impl OracleConfig {
    pub fn exhaustive() -> Self {
        Self {
            mode: SearchMode::Exhaustive,
            limit: None,
        }
    }

    pub fn backtrack(limit: Option<usize>) -> Self {
        Self {
            mode: SearchMode::Backtrack,
            limit,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let limit = match self.mode {
            SearchMode::Exhaustive => EXHAUSTIVE_LIMIT,
            SearchMode::Backtrack => self.limit.unwrap_or(BACKTRACK_LIMIT),
        };
        if n > limit {
            return Err(Error::OracleLimit { n, limit });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutGroup {
    pub n: usize,
    pub order: u128,
    /// A generating set: coset representatives along the point stabilizer
    /// chain of `0, 1, …`.
    pub generators: Vec<Permutation>,
    /// All elements in lexicographic order; exhaustive mode only, up to
    /// [`ELEMENT_CAP`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Permutation>>,
    /// Permutations tested one by one; exhaustive mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub examined: Option<u128>,
}

impl AutGroup {
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            order: 1,
            generators: Vec::new(),
            elements: Some(vec![Permutation::identity(n)]),
            examined: None,
        }
    }

    /// Elements generated by `generators`, by closure; `None` above `cap`.
    pub fn enumerate(&self, cap: usize) -> Option<Vec<Permutation>> {
        let mut seen: HashSet<Permutation> = HashSet::from([Permutation::identity(self.n)]);
        let mut frontier = vec![Permutation::identity(self.n)];
        while let Some(g) = frontier.pop() {
            for s in &self.generators {
                let h = g.then(s);
                if seen.insert(h.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    frontier.push(h);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort();
        Some(out)
    }
}

/// `perm` maps every tuple into its own class.
pub fn is_automorphism(l: &KPartition, perm: &Permutation) -> bool {
    let mut img = Coords::new();
    let mut it = l.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        img.clear();
        img.extend(t.iter().map(|&v| perm.apply(v)));
        if l.class_of_coords(&img) != l.class_of_rank(r) {
            return false;
        }
        r += 1;
    }
    true
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn exhaustive(l: &KPartition) -> AutGroup {
    let n = l.n();
    let mut a: Vec<usize> = (0..n).collect();
    let mut order: u128 = 0;
    let mut elements = Vec::new();
    let mut generators = Vec::new();
    let mut seen = HashSet::new();
    let mut examined: u128 = 0;
    loop {
        examined += 1;
        let p = Permutation(a.clone());
        if is_automorphism(l, &p) {
            order += 1;
            if order <= ELEMENT_CAP {
                elements.push(p.clone());
            }
            if let Some(i) = (0..n).find(|&i| a[i] != i) {
                if seen.insert((i, a[i])) {
                    generators.push(p);
                }
            }
        }
        if !next_permutation(&mut a) {
            break;
        }
    }
    AutGroup {
        n,
        order,
        generators,
        elements: (order <= ELEMENT_CAP).then_some(elements),
        examined: Some(examined),
    }
}

/// Every tuple over `0..=v` that contains `v` keeps its class under the
/// partial map `img`.
fn consistent(l: &KPartition, img: &[Vertex], v: Vertex) -> bool {
    let k = l.arity();
    if k == 1 {
        return l.class_of_coords(&[v]) == l.class_of_coords(&[img[v]]);
    }
    if v + 1 < k {
        return true;
    }
    let rest = TupleSpace::new(v, k - 1).expect("v >= k - 1 >= 1");
    let mut t = Coords::new();
    let mut u = Coords::new();
    let mut it = rest.iter();
    while let Some(r) = it.next_slice() {
        for pos in 0..k {
            t.clear();
            t.extend_from_slice(&r[..pos]);
            t.push(v);
            t.extend_from_slice(&r[pos..]);
            u.clear();
            u.extend(t.iter().map(|&x| img[x]));
            if l.class_of_coords(&t) != l.class_of_coords(&u) {
                return false;
            }
        }
    }
    true
}

fn extend(l: &KPartition, img: &mut Vec<Vertex>, used: &mut [bool]) -> bool {
    let v = img.len();
    if v == l.n() {
        return true;
    }
    for x in 0..l.n() {
        if used[x] {
            continue;
        }
        img.push(x);
        used[x] = true;
        if consistent(l, img, v) && extend(l, img, used) {
            return true;
        }
        img.pop();
        used[x] = false;
    }
    false
}

/// An automorphism fixing `0..i` pointwise and sending `i` to `w`.
fn search(l: &KPartition, i: Vertex, w: Vertex) -> Option<Permutation> {
    let n = l.n();
    let mut img: Vec<Vertex> = (0..i).collect();
    let mut used = vec![false; n];
    used[..i].iter_mut().for_each(|u| *u = true);
    img.push(w);
    used[w] = true;
    for v in 0..=i {
        if !consistent(l, &img, v) {
            return None;
        }
    }
    extend(l, &mut img, &mut used).then_some(Permutation(img))
}

fn orbit_of(v: Vertex, n: usize, gens: &[Permutation]) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Walks the point stabilizer chain from the deepest level up; at level `i`
/// the known generators fix `0..i` and a representative is searched for every
/// image of `i` not yet in their orbit.
fn backtrack(l: &KPartition) -> AutGroup {
    let n = l.n();
    let mut generators: Vec<Permutation> = Vec::new();
    let mut order: u128 = 1;
    for i in (0..n).rev() {
        let mut orbit = orbit_of(i, n, &generators);
        for w in i + 1..n {
            if orbit[w] {
                continue;
            }
            if let Some(g) = search(l, i, w) {
                generators.push(g);
                orbit = orbit_of(i, n, &generators);
            }
        }
        order *= orbit.iter().filter(|&&b| b).count() as u128;
    }
    generators.sort();
    AutGroup {
        n,
        order,
        generators,
        elements: None,
        examined: None,
    }
}

/// The group of permutations keeping every class of `l` in place.
pub fn automorphisms(l: &KPartition, cfg: OracleConfig) -> Result<AutGroup> {
    cfg.check(l.n())?;
    Ok(match cfg.mode {
        SearchMode::Exhaustive => exhaustive(l),
        SearchMode::Backtrack => backtrack(l),
    })
}

/// Automorphisms of a graph, respecting vertex colors and arc direction.
pub fn graph_automorphisms(g: &Graph, cfg: OracleConfig) -> Result<AutGroup> {
    cfg.check(g.n())?;
    if g.n() < 2 {
        return Ok(AutGroup::trivial(g.n()));
    }
    let l = initial_partition(g, 2)?;
    automorphisms(&l, cfg)
}

/// Orbits of the componentwise action of the group on k-tuples.
pub fn orbit_partition(group: &AutGroup, n: usize, k: usize) -> Result<KPartition> {
    if group.n != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: group.n,
        });
    }
    let space = TupleSpace::new(n, k)?;
    let mut uf = UnionFind::new(space.len());
    let mut img = Coords::new();
    for g in &group.generators {
        let mut it = space.iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            img.clear();
            img.extend(t.iter().map(|&v| g.apply(v)));
            uf.union(r, space.rank(&img));
            r += 1;
        }
    }
    Ok(KPartition::from_rank_labels(
        space,
        (0..space.len()).map(|r| uf.find(r)),
    ))
}

/// `l` equals the orbit partition of its own automorphism group.
pub fn is_automorphic(l: &KPartition, cfg: OracleConfig) -> Result<bool> {
    let g = automorphisms(l, cfg)?;
    Ok(orbit_partition(&g, l.n(), l.arity())? == *l)
}

/// Assembles an automorphic `l` `i` times and re-checks automorphy.
pub fn assembly_stays_automorphic(l: &KPartition, i: usize, cfg: OracleConfig) -> Result<bool> {
    let mut up = l.clone();
    for _ in 0..i {
        up = assemble(&up)?;
    }
    is_automorphic(&up, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KClosure {
    /// The group equals the automorphism group of its k-orbit partition.
    pub closed: bool,
    /// The n-orbit partition of the group is k-full.
    pub n_orbit_k_full: bool,
}

pub fn is_k_closed(group: &AutGroup, n: usize, k: usize) -> Result<KClosure> {
    if n > CLOSURE_LIMIT {
        return Err(Error::OracleLimit {
            n,
            limit: CLOSURE_LIMIT,
        });
    }
    let orbits = orbit_partition(group, n, k)?;
    let closure = automorphisms(&orbits, OracleConfig::exhaustive())?;
    let n_orbit_k_full = if k >= n {
        true
    } else {
        is_l_full(&orbit_partition(group, n, n)?, k)?
    };
    Ok(KClosure {
        closed: closure.order == group.order,
        n_orbit_k_full,
    })
}

/// The automorphism group of `g` has a single vertex orbit.
pub fn vertex_transitive(g: &Graph, cfg: OracleConfig) -> Result<bool> {
    if g.n() < 2 {
        return Ok(true);
    }
    let group = graph_automorphisms(g, cfg)?;
    Ok(orbit_partition(&group, g.n(), 1)?.class_count() == 1)
}

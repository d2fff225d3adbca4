//! Fixpoint refinement of k-partitions and graph-level entry points.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::cert::mp_subspaces;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ops::{pq_round, round_signatures, Mode};
use crate::tuple::{Coords, KPartition, TupleSpace, MAX_ARITY};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationTrace {
    pub mode: Mode,
    /// Rounds that refined the partition.
    pub iterations: usize,
    /// Class count of the input, after each refining round, and after the
    /// final round that changed nothing.
    pub class_counts: Vec<usize>,
    #[serde(rename = "final")]
    pub final_partition: KPartition,
}

/// Iterates `pq_round` until a round leaves the partition unchanged.
pub fn pq_stabilize(l: &KPartition, mode: Mode) -> Result<StabilizationTrace> {
    if l.arity() + 1 > l.n() {
        return Err(Error::NoExtension(l.arity() + 1, l.n()));
    }
    let mut cur = l.clone();
    let mut class_counts = vec![cur.class_count()];
    let mut iterations = 0;
    loop {
        let next = pq_round(&cur, mode)?;
        class_counts.push(next.class_count());
        // rounds only refine, so an equal count means an equal partition
        if next.class_count() == cur.class_count() {
            break;
        }
        iterations += 1;
        cur = next;
    }
    Ok(StabilizationTrace {
        mode,
        iterations,
        class_counts,
        final_partition: cur,
    })
}

type InitialLabel = (SmallVec<[u32; MAX_ARITY]>, u64);

fn initial_labels(g: &Graph, space: &TupleSpace) -> Vec<InitialLabel> {
    let mut out = Vec::with_capacity(space.len());
    let mut it = space.iter();
    while let Some(t) = it.next_slice() {
        let colors = t.iter().map(|&v| g.color(v)).collect();
        let mut bits = 0u64;
        let mut b = 0;
        for &u in t {
            for &v in t {
                if u != v {
                    if g.has_edge(u, v) {
                        bits |= 1 << b;
                    }
                    b += 1;
                }
            }
        }
        out.push((colors, bits));
    }
    out
}

/// Labels each k-tuple by its vertex colors and its ordered adjacency pattern.
pub fn initial_partition(g: &Graph, k: usize) -> Result<KPartition> {
    let space = TupleSpace::new(g.n(), k)?;
    Ok(KPartition::from_rank_labels(space, initial_labels(g, &space)))
}

pub fn stabilize_graph(g: &Graph, k: usize, mode: Mode) -> Result<StabilizationTrace> {
    pq_stabilize(&initial_partition(g, k)?, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    S,
    Mp,
    Pq,
}

pub const DEFAULT_STEPS: [Step; 3] = [Step::S, Step::Mp, Step::Pq];

fn s_step(l: &KPartition) -> KPartition {
    let k = l.arity();
    let mut labels = Vec::with_capacity(l.tuple_count());
    let mut buf = Coords::new();
    let mut it = l.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        let mut lab: SmallVec<[u32; MAX_ARITY]> = SmallVec::new();
        lab.push(l.class_of_rank(r));
        for i in 0..k - 1 {
            buf.clear();
            buf.extend_from_slice(t);
            buf.swap(i, i + 1);
            lab.push(l.class_of_coords(&buf));
        }
        labels.push(lab);
        r += 1;
    }
    KPartition::from_rank_labels(*l.space(), labels)
}

fn mp_step(l: &KPartition) -> KPartition {
    let (subspaces, _) = mp_subspaces(l.arity());
    let mut labels: Vec<Vec<u32>> = (0..l.tuple_count())
        .map(|r| vec![l.class_of_rank(r)])
        .collect();
    for w in subspaces {
        let mut counts: HashMap<(u32, Coords), u32> = HashMap::new();
        let mut rows = Vec::with_capacity(l.tuple_count());
        let mut it = l.space().iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            let key = (l.class_of_rank(r), w.project(t));
            *counts.entry(key.clone()).or_insert(0) += 1;
            rows.push(key);
            r += 1;
        }
        for (lab, key) in labels.iter_mut().zip(&rows) {
            lab.push(counts[key]);
        }
    }
    KPartition::from_rank_labels(*l.space(), labels)
}

/// Refines until the s-, mp- and pq-steps all leave the partition unchanged.
pub fn regularize(l: &KPartition, mode: Mode) -> Result<KPartition> {
    regularize_with(l, mode, &DEFAULT_STEPS)
}

/// [`regularize`] with an explicit step order. The pq-step is skipped when no
/// (k+1)-tuples exist.
pub fn regularize_with(l: &KPartition, mode: Mode, steps: &[Step]) -> Result<KPartition> {
    if l.arity() < 2 {
        return Err(Error::ArityTooSmall {
            min: 2,
            found: l.arity(),
        });
    }
    let extendable = l.arity() < l.n();
    let mut cur = l.clone();
    loop {
        let before = cur.class_count();
        for step in steps {
            cur = match step {
                Step::S => s_step(&cur),
                Step::Mp => mp_step(&cur),
                Step::Pq if extendable => pq_round(&cur, mode)?,
                Step::Pq => cur,
            };
        }
        if cur.class_count() == before {
            return Ok(cur);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The graphs differ in some class-size histogram.
    Distinguished,
    /// Not separated at this level; says nothing about isomorphism.
    Equivalent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub k: usize,
    pub mode: Mode,
    /// Round at which the histograms first differed.
    pub distinguished_at: Option<usize>,
    /// Per-round class counts of the two graphs.
    pub class_counts: Vec<(usize, usize)>,
}

fn histogram(ids: &[u32], names: usize) -> Vec<usize> {
    let mut h = vec![0; names];
    for &c in ids {
        h[c as usize] += 1;
    }
    h
}

fn distinct(ids: &[u32]) -> usize {
    ids.iter().collect::<BTreeSet<_>>().len()
}

/// Assigns shared ids to the label values of both graphs in sorted order.
fn name_jointly<L: Ord + Clone>(a: &[L], b: &[L]) -> (Vec<u32>, Vec<u32>, usize) {
    let names: BTreeMap<L, u32> = a
        .iter()
        .chain(b)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .zip(0..)
        .collect();
    let ids = |x: &[L]| x.iter().map(|l| names[l]).collect::<Vec<_>>();
    (ids(a), ids(b), names.len())
}

/// Stabilizes both graphs in lockstep, naming classes by their signature
/// values so that class-size histograms are comparable across the graphs.
pub fn compare_graphs(g: &Graph, h: &Graph, k: usize, mode: Mode) -> Result<Comparison> {
    let mut out = Comparison {
        verdict: Verdict::Distinguished,
        k,
        mode,
        distinguished_at: Some(0),
        class_counts: Vec::new(),
    };
    if g.n() != h.n() {
        return Ok(out);
    }
    let space = TupleSpace::new(g.n(), k)?;
    if k + 1 > g.n() {
        return Err(Error::NoExtension(k + 1, g.n()));
    }
    let (mut a, mut b, mut names) =
        name_jointly(&initial_labels(g, &space), &initial_labels(h, &space));
    let mut round = 0;
    loop {
        let (ca, cb) = (distinct(&a), distinct(&b));
        out.class_counts.push((ca, cb));
        if histogram(&a, names) != histogram(&b, names) {
            out.distinguished_at = Some(round);
            return Ok(out);
        }
        if round > 0 && out.class_counts[round - 1] == (ca, cb) {
            break;
        }
        let (na, nb, nn) = name_jointly(
            &round_signatures(&space, &a, mode),
            &round_signatures(&space, &b, mode),
        );
        (a, b, names) = (na, nb, nn);
        round += 1;
    }
    out.verdict = Verdict::Equivalent;
    out.distinguished_at = None;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::{check_mp_symmetry, check_pq_stable, check_s_symmetry};
    use crate::corpus::{gen_complete, gen_cycle, gen_path, gen_petersen};
    use crate::tuple::partition_from_labels;

    #[test]
    fn complete_graph_is_immediately_stable() {
        let t = stabilize_graph(&gen_complete(5), 2, Mode::Count).unwrap();
        assert_eq!(t.iterations, 0);
        assert_eq!(t.class_counts, vec![1, 1]);
        let t3 = stabilize_graph(&gen_complete(5), 3, Mode::Count).unwrap();
        assert_eq!((t3.iterations, t3.final_partition.class_count()), (0, 1));
    }

    #[test]
    fn path_p4_reaches_reflection_orbits() {
        let t = stabilize_graph(&gen_path(4), 2, Mode::Count).unwrap();
        // orbits of the reflection on 12 ordered pairs: 6 classes of size 2
        assert_eq!(t.final_partition.class_count(), 6);
        assert_eq!(t.final_partition.class_sizes(), vec![2; 6]);
        assert!(t.iterations >= 1);
        assert!(t.class_counts.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(t.class_counts.last(), t.class_counts.iter().rev().nth(1));
    }

    #[test]
    fn errors_without_extension() {
        let l = KPartition::single_class(3, 3).unwrap();
        assert!(pq_stabilize(&l, Mode::Count).is_err());
    }

    #[test]
    fn initial_partitions() {
        let p3 = initial_partition(&gen_path(3), 2).unwrap();
        assert_eq!(p3.class_count(), 2);
        let k4 = initial_partition(&gen_complete(4), 3).unwrap();
        assert_eq!(k4.class_count(), 1);
        // Petersen has no triangles: no 3-tuple carries all six arc bits
        let pet = gen_petersen();
        let l = initial_partition(&pet, 3).unwrap();
        let mut triangles = 0;
        for t in l.space().iter() {
            let c = t.coords();
            if pet.has_edge(c[0], c[1]) && pet.has_edge(c[1], c[2]) && pet.has_edge(c[0], c[2]) {
                triangles += 1;
            }
        }
        assert_eq!(triangles, 0);
        // patterns present: independent, one edge (3 placements), a path (3 centres)
        assert_eq!(l.class_count(), 7);
    }

    #[test]
    fn regularize_outputs_pass_checks() {
        let l = initial_partition(&gen_path(5), 3).unwrap();
        let r = regularize(&l, Mode::Count).unwrap();
        assert!(check_s_symmetry(&r).holds);
        assert!(check_mp_symmetry(&r).holds);
        assert!(check_pq_stable(&r, Mode::Count).unwrap().holds);
        assert!(crate::tuple::refines(&r, &l).unwrap());
    }

    #[test]
    fn regularize_fixes_oriented_triangle() {
        let arcs = partition_from_labels(3, 2, |t| Some((t[0] + 1) % 3 == t[1])).unwrap();
        assert_eq!(regularize(&arcs, Mode::Count).unwrap(), arcs);
        // one-way arc 1→2 next to a symmetric pair 0↔1: the s-step splits
        let mixed = [(0, 1), (1, 0), (1, 2)];
        let l = partition_from_labels(3, 2, |t| Some(mixed.contains(&(t[0], t[1])))).unwrap();
        let r = regularize(&l, Mode::Count).unwrap();
        assert!(r.class_count() > l.class_count());
        assert!(check_s_symmetry(&r).holds);
    }

    #[test]
    fn compare_basics() {
        let c = compare_graphs(&gen_cycle(5), &gen_cycle(5), 2, Mode::Count).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        let d = compare_graphs(&gen_complete(4), &gen_cycle(4), 2, Mode::Count).unwrap();
        assert_eq!(d.verdict, Verdict::Distinguished);
        assert_eq!(d.distinguished_at, Some(0));
        let e = compare_graphs(&gen_complete(4), &gen_cycle(5), 2, Mode::Count).unwrap();
        assert_eq!(e.verdict, Verdict::Distinguished);
    }

    #[test]
    fn two_triangles_versus_hexagon() {
        // both 2-regular on 6 vertices; separated once distances propagate
        let two = Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let d = compare_graphs(&two, &gen_cycle(6), 2, Mode::Count).unwrap();
        assert_eq!(d.verdict, Verdict::Distinguished);
        assert!(d.distinguished_at.unwrap() >= 1);
    }
}

//! Decision procedures for the symmetry properties of k-partitions, each
//! returning a concrete, re-checkable witness on failure.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{
    assemble, drop_coord, for_each_extension, full_closure, l_full_witness, multiproject,
    pq_round, project_partition, FullnessWitness, Mode, Subspace,
};
use crate::tuple::{Coords, KPartition, KTuple, Vertex};

/// Subspace enumeration is exhaustive up to this arity.
pub const MP_FULL_SUBSPACE_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two members of `class` whose images under the swap of `positions`
    /// fall into different classes.
    SwapSplit {
        class: u32,
        positions: [usize; 2],
        tuples: [KTuple; 2],
        image_classes: [u32; 2],
    },
    /// The drop-projection sets `first` and `second` (each `(class,
    /// position)`) both contain `shared`, but only `first` contains
    /// `exclusive`.
    ProjectionOverlap {
        first: (u32, usize),
        second: (u32, usize),
        shared: KTuple,
        exclusive: KTuple,
    },
    /// Two rows of a multiprojection of `class` with different multiplicities.
    Multiplicity {
        class: u32,
        subspace: Subspace,
        rows: [KTuple; 2],
        multiplicities: [usize; 2],
    },
    Fullness(FullnessWitness),
    /// Two tuples of one class separated by a project∘assemble round.
    RoundSplit { mode: Mode, tuples: [KTuple; 2] },
}

fn swapped(t: &[Vertex], i: usize) -> Coords {
    let mut c: Coords = Coords::from_slice(t);
    c.swap(i, i + 1);
    c
}

/// Set of `(class, position)` whose drop-projection set contains `alpha`.
fn membership(p: &KPartition, alpha: &[Vertex]) -> BTreeSet<(u32, usize)> {
    let mut beta = Coords::new();
    let mut out = BTreeSet::new();
    for_each_extension(alpha, p.n(), &mut beta, |j, b| {
        out.insert((p.class_of_coords(b), j));
    });
    out
}

impl Witness {
    /// Re-evaluates the violation directly against `p`.
    pub fn recheck(&self, p: &KPartition) -> bool {
        let cls = |t: &KTuple| p.class_of(t).ok();
        match self {
            Witness::SwapSplit {
                class,
                positions,
                tuples,
                ..
            } => {
                let i = positions[0];
                let img: Vec<_> = tuples
                    .iter()
                    .map(|t| p.class_of_coords(&swapped(t.coords(), i)))
                    .collect();
                tuples.iter().all(|t| cls(t) == Some(*class)) && img[0] != img[1]
            }
            Witness::ProjectionOverlap {
                first,
                second,
                shared,
                exclusive,
            } => {
                let a = membership(p, shared.coords());
                let b = membership(p, exclusive.coords());
                a.contains(first) && a.contains(second) && b.contains(first) && !b.contains(second)
            }
            Witness::Multiplicity {
                class,
                subspace,
                rows,
                multiplicities,
            } => {
                let members = p.members(*class as usize);
                match multiproject(&members, subspace) {
                    Ok(mp) => {
                        mp.rows.get(&rows[0]) == Some(&multiplicities[0])
                            && mp.rows.get(&rows[1]) == Some(&multiplicities[1])
                            && multiplicities[0] != multiplicities[1]
                    }
                    Err(_) => false,
                }
            }
            Witness::Fullness(w) => {
                let members = p.members(w.foreign_class as usize);
                cls(&w.tuple) == Some(w.own_class)
                    && w.own_class != w.foreign_class
                    && full_closure(&members, p.n(), w.l)
                        .map(|c| c.contains(&w.tuple))
                        .unwrap_or(false)
            }
            Witness::RoundSplit { mode, tuples } => match pq_round(p, *mode) {
                Ok(next) => {
                    cls(&tuples[0]).is_some()
                        && cls(&tuples[0]) == cls(&tuples[1])
                        && next.class_of(&tuples[0]).ok() != next.class_of(&tuples[1]).ok()
                }
                Err(_) => false,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn from_witness(w: Option<Witness>) -> Self {
        Self {
            holds: w.is_none(),
            witness: w,
        }
    }
}

/// Closure of every class under every coordinate permutation, tested through
/// the adjacent transpositions. A transposition is a bijection on tuples, so a
/// class mapping into a single class maps onto it.
pub fn check_s_symmetry(p: &KPartition) -> Verdict {
    Verdict::from_witness(s_witness(p))
}

fn s_witness(p: &KPartition) -> Option<Witness> {
    let k = p.arity();
    for i in 0..k.saturating_sub(1) {
        let mut image: Vec<Option<(u32, KTuple)>> = vec![None; p.class_count()];
        let mut it = p.space().iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            let c = p.class_of_rank(r);
            r += 1;
            let ic = p.class_of_coords(&swapped(t, i));
            match &image[c as usize] {
                None => image[c as usize] = Some((ic, KTuple::new(t, p.n()).ok()?)),
                Some((seen, first)) if *seen != ic => {
                    return Some(Witness::SwapSplit {
                        class: c,
                        positions: [i, i + 1],
                        tuples: [first.clone(), KTuple::new(t, p.n()).ok()?],
                        image_classes: [*seen, ic],
                    })
                }
                _ => {}
            }
        }
    }
    None
}

/// Drop-projection sets of all classes are pairwise equal or disjoint.
pub fn check_p_symmetry(p: &KPartition) -> Result<Verdict> {
    let k = p.arity();
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: k });
    }
    let sets = project_partition(p, Mode::Set)?;
    let mut first: HashMap<(u32, usize), (u32, Coords)> = HashMap::new();
    let mut it = p.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        let c = p.class_of_rank(r);
        r += 1;
        for j in 0..k {
            let alpha = drop_coord(t, j);
            let sid = sets.class_of_coords(&alpha);
            match first.get(&(c, j)) {
                None => {
                    first.insert((c, j), (sid, alpha));
                }
                Some((seen, a0)) if *seen != sid => {
                    let m0 = membership(p, a0);
                    let m1 = membership(p, &alpha);
                    let (other, shared, exclusive) = match m0.difference(&m1).next() {
                        Some(&o) => (o, a0.clone(), alpha),
                        None => (*m1.difference(&m0).next().unwrap(), alpha, a0.clone()),
                    };
                    return Ok(Verdict::from_witness(Some(Witness::ProjectionOverlap {
                        first: (c, j),
                        second: other,
                        shared: KTuple::from_slice_unchecked(&shared),
                        exclusive: KTuple::from_slice_unchecked(&exclusive),
                    })));
                }
                _ => {}
            }
        }
    }
    Ok(Verdict::from_witness(None))
}

/// Subspaces inspected by the mp check and whether the set was restricted.
pub fn mp_subspaces(arity: usize) -> (Vec<Subspace>, bool) {
    if arity <= MP_FULL_SUBSPACE_ARITY {
        (Subspace::all_proper(arity), false)
    } else {
        let mut w = Subspace::of_dim(arity, 1);
        w.extend(Subspace::of_dim(arity, arity - 1));
        (w, true)
    }
}

/// Every multiprojection of every class has homogeneous multiplicities.
pub fn check_mp_symmetry(p: &KPartition) -> Verdict {
    Verdict::from_witness(mp_witness(p))
}

fn mp_witness(p: &KPartition) -> Option<Witness> {
    let (subspaces, _) = mp_subspaces(p.arity());
    for w in subspaces {
        let mut counts: HashMap<(u32, Coords), usize> = HashMap::new();
        let mut it = p.space().iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            *counts.entry((p.class_of_rank(r), w.project(t))).or_insert(0) += 1;
            r += 1;
        }
        let mut reference: Vec<Option<(Coords, usize)>> = vec![None; p.class_count()];
        let mut it = p.space().iter();
        let mut r = 0;
        while let Some(t) = it.next_slice() {
            let c = p.class_of_rank(r);
            r += 1;
            let row = w.project(t);
            let m = counts[&(c, row.clone())];
            match &reference[c as usize] {
                None => reference[c as usize] = Some((row, m)),
                Some((r0, m0)) if *m0 != m => {
                    return Some(Witness::Multiplicity {
                        class: c,
                        subspace: w,
                        rows: [
                            KTuple::from_slice_unchecked(r0),
                            KTuple::from_slice_unchecked(&row),
                        ],
                        multiplicities: [*m0, m],
                    })
                }
                _ => {}
            }
        }
    }
    None
}

/// `p` is a fixpoint of one project∘assemble round.
pub fn check_pq_stable(p: &KPartition, mode: Mode) -> Result<Verdict> {
    let next = pq_round(p, mode)?;
    if next.class_count() == p.class_count() {
        return Ok(Verdict::from_witness(None));
    }
    let mut first: Vec<Option<(u32, usize)>> = vec![None; p.class_count()];
    for r in 0..p.tuple_count() {
        let c = p.class_of_rank(r) as usize;
        let nc = next.class_of_rank(r);
        match first[c] {
            None => first[c] = Some((nc, r)),
            Some((seen, r0)) if seen != nc => {
                return Ok(Verdict::from_witness(Some(Witness::RoundSplit {
                    mode,
                    tuples: [p.space().unrank(r0), p.space().unrank(r)],
                })))
            }
            _ => {}
        }
    }
    unreachable!("a finer partition splits some class")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelVerdict {
    pub l: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Symmetry verdicts of the one-level assembly of a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyCheck {
    pub classes: usize,
    pub s: Verdict,
    pub p: Verdict,
    pub mp: Verdict,
    pub regular: bool,
    /// Projecting the assembly reproduces the partition.
    pub projects_back: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub k: usize,
    pub classes: usize,
    pub mode: Mode,
    pub s: Verdict,
    pub p: Verdict,
    pub mp: Verdict,
    /// Only subspaces of dimension 1 and k-1 were inspected.
    pub mp_subspaces_restricted: bool,
    pub l_full: Vec<LevelVerdict>,
    /// `None` when no (k+1)-tuples exist.
    pub pq_stable: Option<Verdict>,
    pub regular: bool,
    /// Certified through the one-level assembly; `None` when no
    /// (k+1)-tuples exist.
    pub strongly_regular: Option<bool>,
    pub assembly: Option<AssemblyCheck>,
    /// Regular and pq-stable, yet the assembly witness fails.
    pub regular_stable_not_strongly_regular: bool,
}

fn regular_parts(p: &KPartition) -> Result<(Verdict, Verdict, Verdict)> {
    Ok((check_s_symmetry(p), check_p_symmetry(p)?, check_mp_symmetry(p)))
}

/// All symmetry checks on one partition.
pub fn certify(p: &KPartition, mode: Mode) -> Result<SymmetryReport> {
    let k = p.arity();
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: k });
    }
    let (s, pv, mp) = regular_parts(p)?;
    let regular = s.holds && pv.holds && mp.holds;
    let l_full = (1..k)
        .map(|l| {
            let w = l_full_witness(p, l)?;
            Ok(LevelVerdict {
                l,
                holds: w.is_none(),
                witness: w.map(Witness::Fullness),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let extendable = k < p.n();
    let pq_stable = if extendable {
        Some(check_pq_stable(p, mode)?)
    } else {
        None
    };
    let assembly = if extendable {
        let a = assemble(p)?;
        let (as_, ap, amp) = regular_parts(&a)?;
        let regular = as_.holds && ap.holds && amp.holds;
        let projects_back = project_partition(&a, mode)? == *p;
        Some(AssemblyCheck {
            classes: a.class_count(),
            s: as_,
            p: ap,
            mp: amp,
            regular,
            projects_back,
        })
    } else {
        None
    };
    let strongly_regular = assembly.as_ref().map(|a| a.regular && a.projects_back);
    let stable = pq_stable.as_ref().is_some_and(|v| v.holds);
    Ok(SymmetryReport {
        n: p.n(),
        k,
        classes: p.class_count(),
        mode,
        s,
        p: pv,
        mp,
        mp_subspaces_restricted: mp_subspaces(k).1,
        l_full,
        pq_stable,
        regular,
        strongly_regular,
        regular_stable_not_strongly_regular: regular && stable && strongly_regular == Some(false),
        assembly,
    })
}

/// Implications between the symmetry notions, evaluated on one partition.
/// Each field is `None` when its premise fails, otherwise whether the
/// conclusion holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Implications {
    /// p-symmetric with k ≥ 3 ⇒ the projection is p-symmetric.
    pub projection_keeps_p: Option<bool>,
    /// p-symmetric with k ≥ 3 ⇒ s-symmetric.
    pub p_implies_s: Option<bool>,
    /// pq-stable and (k−1)-full ⇒ projecting the assembly and assembling
    /// the projection both give the partition back.
    pub stable_full_round_trips: Option<bool>,
}

impl Implications {
    /// No premise held with a failing conclusion.
    pub fn all_hold(&self) -> bool {
        [self.projection_keeps_p, self.p_implies_s, self.stable_full_round_trips]
            .iter()
            .all(|v| v.unwrap_or(true))
    }
}

pub fn check_implications(p: &KPartition, mode: Mode) -> Result<Implications> {
    let k = p.arity();
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: k });
    }
    let p_sym = check_p_symmetry(p)?.holds;
    let (projection_keeps_p, p_implies_s) = if p_sym && k >= 3 {
        let down = project_partition(p, mode)?;
        (
            Some(check_p_symmetry(&down)?.holds),
            Some(check_s_symmetry(p).holds),
        )
    } else {
        (None, None)
    };
    let stable_full_round_trips = if k < p.n()
        && check_pq_stable(p, mode)?.holds
        && l_full_witness(p, k - 1)?.is_none()
    {
        let pq = project_partition(&assemble(p)?, mode)?;
        let qp = assemble(&project_partition(p, mode)?)?;
        Some(pq == *p && qp == *p)
    } else {
        None
    };
    Ok(Implications {
        projection_keeps_p,
        p_implies_s,
        stable_full_round_trips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuple::partition_from_labels;

    fn graph_pairs(n: usize, adj: impl Fn(usize, usize) -> bool) -> KPartition {
        partition_from_labels(n, 2, |t| Some(adj(t[0], t[1]))).unwrap()
    }

    #[test]
    fn implications_on_orbit_like_partitions() {
        // single class and the discrete partition are both orbit partitions
        for p in [
            KPartition::single_class(5, 3).unwrap(),
            KPartition::discrete(4, 3).unwrap(),
        ] {
            let imp = check_implications(&p, Mode::Count).unwrap();
            assert_eq!(imp.projection_keeps_p, Some(true));
            assert_eq!(imp.p_implies_s, Some(true));
            assert!(imp.all_hold(), "{imp:?}");
        }
        let imp = check_implications(&KPartition::single_class(5, 3).unwrap(), Mode::Count).unwrap();
        assert_eq!(imp.stable_full_round_trips, Some(true));
    }

    #[test]
    fn undirected_edge_partition_is_s_symmetric() {
        let p = graph_pairs(5, |a, b| a.abs_diff(b) == 1);
        assert!(check_s_symmetry(&p).holds);
    }

    #[test]
    fn oriented_triangle_arcs_are_s_symmetric() {
        // oriented K3 0→1→2→0: swapping maps the arc class onto the non-arc class
        let arc = |a: usize, b: usize| (a + 1) % 3 == b;
        let p = partition_from_labels(3, 2, |t| Some(arc(t[0], t[1]))).unwrap();
        assert!(check_s_symmetry(&p).holds);
    }

    #[test]
    fn mixed_digraph_fails_s_symmetry() {
        // 0↔1 symmetric, 1→2 one-way: the arc class swaps onto no class
        let arcs = [(0, 1), (1, 0), (1, 2)];
        let p = partition_from_labels(3, 2, |t| Some(arcs.contains(&(t[0], t[1])))).unwrap();
        let v = check_s_symmetry(&p);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.recheck(&p));
        assert!(matches!(w, Witness::SwapSplit { .. }));
    }

    #[test]
    fn single_class_is_p_symmetric() {
        let s = KPartition::single_class(5, 3).unwrap();
        assert!(check_p_symmetry(&s).unwrap().holds);
        let one = KPartition::single_class(3, 1).unwrap();
        assert!(check_p_symmetry(&one).is_err());
    }

    #[test]
    fn moving_one_tuple_breaks_p_symmetry() {
        // start from the single-class 3-partition on 4 points and isolate one tuple
        let p = partition_from_labels(4, 3, |t| Some(t == [0, 1, 2])).unwrap();
        let v = check_p_symmetry(&p).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().recheck(&p));
    }

    #[test]
    fn mp_witness_rechecks() {
        // class {⟨0,1⟩,⟨0,2⟩,⟨1,2⟩}: column 0 holds 0 twice and 1 once
        let p = partition_from_labels(3, 2, |t| Some(t[0] < t[1])).unwrap();
        let v = check_mp_symmetry(&p);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.recheck(&p));
        match w {
            Witness::Multiplicity { multiplicities, .. } => {
                assert_ne!(multiplicities[0], multiplicities[1])
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn pq_stable_split_witness() {
        // path P4 edge partition refines on the first round
        let p = graph_pairs(4, |a, b| a.abs_diff(b) == 1);
        let v = check_pq_stable(&p, Mode::Count).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().recheck(&p));
    }

    #[test]
    fn certify_single_class() {
        let s = KPartition::single_class(5, 2).unwrap();
        let r = certify(&s, Mode::Count).unwrap();
        assert!(r.regular);
        assert_eq!(r.strongly_regular, Some(true));
        assert!(r.l_full.iter().all(|l| l.holds));
        assert!(!r.regular_stable_not_strongly_regular);
        let top = KPartition::single_class(3, 3).unwrap();
        let r = certify(&top, Mode::Count).unwrap();
        assert_eq!(r.pq_stable, None);
        assert_eq!(r.strongly_regular, None);
    }
}

//! Projection, assembly, multiprojection and fullness of k-relations and
//! k-partitions.
//!
//! Positions inside a tuple are zero-based throughout.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::tuple::{Coords, KPartition, KTuple, TupleSpace, Vertex, MAX_ARITY};

/// How a `(k-1)`-tuple's membership in the drop-projections of the classes
/// of a k-partition is summarized when projecting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Number of members of each class projecting onto the tuple.
    #[default]
    Count,
    /// Only whether some member of the class projects onto the tuple.
    Set,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Mode::Count),
            "set" => Ok(Mode::Set),
            other => Err(Error::Usage(format!("unknown mode `{other}` (count|set)"))),
        }
    }
}

/// A strictly increasing, nonempty set of coordinate positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subspace(SmallVec<[usize; MAX_ARITY]>);

impl Subspace {
    pub fn new(positions: &[usize], arity: usize) -> Result<Self> {
        let valid = !positions.is_empty()
            && positions.windows(2).all(|w| w[0] < w[1])
            && positions.iter().all(|&p| p < arity);
        if !valid {
            return Err(Error::InvalidSubspace {
                positions: positions.to_vec(),
                arity,
            });
        }
        Ok(Self(SmallVec::from_slice(positions)))
    }

    fn from_mask(mask: u32, arity: usize) -> Self {
        Self((0..arity).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_proper(&self, arity: usize) -> bool {
        self.0.len() < arity
    }

    /// All proper nonempty subspaces, ordered by bitmask.
    pub fn all_proper(arity: usize) -> Vec<Subspace> {
        (1..(1u32 << arity) - 1)
            .map(|m| Self::from_mask(m, arity))
            .collect()
    }

    /// All subspaces of dimension `dim`, ordered by bitmask.
    pub fn of_dim(arity: usize, dim: usize) -> Vec<Subspace> {
        (1..1u32 << arity)
            .filter(|m| m.count_ones() as usize == dim)
            .map(|m| Self::from_mask(m, arity))
            .collect()
    }

    #[inline]
    pub(crate) fn project(&self, t: &[Vertex]) -> Coords {
        self.0.iter().map(|&p| t[p]).collect()
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        if self.0.iter().any(|&p| p >= arity) {
            return Err(Error::InvalidSubspace {
                positions: self.0.to_vec(),
                arity,
            });
        }
        Ok(())
    }
}

/// Coordinates of `t` at the positions of `w`, in natural order.
pub fn project_tuple(t: &KTuple, w: &Subspace) -> Result<KTuple> {
    w.check_arity(t.arity())?;
    Ok(KTuple::from_coords(w.project(t.coords())))
}

#[inline]
pub(crate) fn drop_coord(t: &[Vertex], j: usize) -> Coords {
    t.iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &v)| v)
        .collect()
}

/// The k drop-projections of a k-tuple; entry `j` omits coordinate `j`.
pub fn drop_projections(t: &KTuple) -> Result<Vec<KTuple>> {
    if t.arity() < 2 {
        return Err(Error::ArityTooSmall {
            min: 2,
            found: t.arity(),
        });
    }
    Ok((0..t.arity())
        .map(|j| KTuple::from_coords(drop_coord(t.coords(), j)))
        .collect())
}

pub(crate) type ExtSignature = SmallVec<[u32; MAX_ARITY + 1]>;

/// Ordered drop-projection class signature of a (k+1)-tuple under a
/// k-partition.
#[inline]
pub(crate) fn drop_signature(beta: &[Vertex], space: &TupleSpace, class_of: &[u32]) -> ExtSignature {
    let mut buf: Coords = SmallVec::new();
    (0..beta.len())
        .map(|j| {
            buf.clear();
            buf.extend(beta.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
            class_of[space.rank(&buf)]
        })
        .collect()
}

/// Groups `(k+1)`-tuples by the classes of their drop-projections.
pub fn assemble(l: &KPartition) -> Result<KPartition> {
    let n = l.n();
    let k = l.arity();
    if k + 1 > n {
        return Err(Error::NoExtension(k + 1, n));
    }
    let up = TupleSpace::new(n, k + 1)?;
    let mut sigs = Vec::with_capacity(up.len());
    let mut it = up.iter();
    while let Some(beta) = it.next_slice() {
        sigs.push(drop_signature(beta, l.space(), l.class_ids()));
    }
    Ok(KPartition::from_rank_labels(up, sigs))
}

/// Summarized membership of a tuple in the drop-projections of classes:
/// sorted `(class, position, multiplicity)`; multiplicity is 1 in set mode.
pub(crate) type MemberSignature = Vec<(u32, u8, u32)>;

fn summarize(mut hits: Vec<(u32, u8)>, mode: Mode) -> MemberSignature {
    hits.sort_unstable();
    let mut out: MemberSignature = Vec::new();
    for (c, j) in hits {
        match out.last_mut() {
            Some(last) if last.0 == c && last.1 == j => {
                if mode == Mode::Count {
                    last.2 += 1;
                }
            }
            _ => out.push((c, j, 1)),
        }
    }
    out
}

/// Projects a k-partition to arity `k-1` by membership signature.
pub fn project_partition(l: &KPartition, mode: Mode) -> Result<KPartition> {
    let k = l.arity();
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, found: k });
    }
    let n = l.n();
    let down = TupleSpace::new(n, k - 1)?;
    let mut sigs = Vec::with_capacity(down.len());
    let mut it = down.iter();
    let mut beta: Coords = SmallVec::new();
    while let Some(alpha) = it.next_slice() {
        let mut hits = Vec::with_capacity(k * (n + 1 - k));
        for_each_extension(alpha, n, &mut beta, |j, beta| {
            hits.push((l.class_of_coords(beta), j as u8));
        });
        sigs.push(summarize(hits, mode));
    }
    Ok(KPartition::from_rank_labels(down, sigs))
}

/// Visits every `(k+1)`-tuple whose `j`-th drop-projection is `alpha`.
#[inline]
pub(crate) fn for_each_extension<F>(alpha: &[Vertex], n: usize, beta: &mut Coords, mut f: F)
where
    F: FnMut(usize, &[Vertex]),
{
    let k = alpha.len();
    for j in 0..=k {
        for v in 0..n {
            if alpha.contains(&v) {
                continue;
            }
            beta.clear();
            beta.extend_from_slice(&alpha[..j]);
            beta.push(v);
            beta.extend_from_slice(&alpha[j..]);
            f(j, beta);
        }
    }
}

/// Per-tuple signatures of one project∘assemble round, expressed through the
/// values of the current class ids. Tuples with equal signatures share a class
/// of `project_partition(assemble(l), mode)`.
pub(crate) fn round_signatures(
    space: &TupleSpace,
    class_of: &[u32],
    mode: Mode,
) -> Vec<Vec<(ExtSignature, u8, u32)>> {
    let n = space.n();
    let k = space.arity();
    let up = TupleSpace::new(n, k + 1).expect("caller checked k+1 <= n");
    let mut ids: HashMap<ExtSignature, u32> = HashMap::new();
    let mut up_class = Vec::with_capacity(up.len());
    let mut it = up.iter();
    while let Some(beta) = it.next_slice() {
        let sig = drop_signature(beta, space, class_of);
        let next = ids.len() as u32;
        up_class.push(*ids.entry(sig).or_insert(next));
    }
    let mut by_id = vec![ExtSignature::new(); ids.len()];
    for (sig, id) in ids {
        by_id[id as usize] = sig;
    }
    let mut out = Vec::with_capacity(space.len());
    let mut it = space.iter();
    let mut beta: Coords = SmallVec::new();
    while let Some(alpha) = it.next_slice() {
        let mut hits = Vec::with_capacity((k + 1) * (n - k));
        for_each_extension(alpha, n, &mut beta, |j, beta| {
            hits.push((up_class[up.rank(beta)], j as u8));
        });
        let mut sig: Vec<(ExtSignature, u8, u32)> = summarize(hits, mode)
            .into_iter()
            .map(|(c, j, m)| (by_id[c as usize].clone(), j, m))
            .collect();
        sig.sort_unstable();
        out.push(sig);
    }
    out
}

/// One pq-round: `project_partition(assemble(l), mode)` without building the
/// assembled partition explicitly.
pub fn pq_round(l: &KPartition, mode: Mode) -> Result<KPartition> {
    if l.arity() + 1 > l.n() {
        return Err(Error::NoExtension(l.arity() + 1, l.n()));
    }
    let sigs = round_signatures(l.space(), l.class_ids(), mode);
    Ok(KPartition::from_rank_labels(*l.space(), sigs))
}

/// Rows of a column-restricted relation with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiProjection {
    pub arity: usize,
    pub rows: BTreeMap<KTuple, usize>,
}

impl MultiProjection {
    pub fn total(&self) -> usize {
        self.rows.values().sum()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut m = self.rows.values();
        match m.next() {
            Some(first) => m.all(|x| x == first),
            None => true,
        }
    }

    /// First two rows with different multiplicities, in row order.
    pub fn inhomogeneity(&self) -> Option<((KTuple, usize), (KTuple, usize))> {
        let mut it = self.rows.iter();
        let (r0, &m0) = it.next()?;
        it.find(|(_, &m)| m != m0)
            .map(|(r, &m)| ((r0.clone(), m0), (r.clone(), m)))
    }
}

/// Multiset of rows of the relation restricted to the columns in `w`.
pub fn multiproject(u: &[KTuple], w: &Subspace) -> Result<MultiProjection> {
    let first = u.first().ok_or(Error::EmptyRelation)?;
    let k = first.arity();
    w.check_arity(k)?;
    if !w.is_proper(k) {
        return Err(Error::InvalidSubspace {
            positions: w.positions().to_vec(),
            arity: k,
        });
    }
    let mut rows = BTreeMap::new();
    for t in u {
        if t.arity() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                found: t.arity(),
            });
        }
        *rows.entry(KTuple::from_coords(w.project(t.coords()))).or_insert(0) += 1;
    }
    Ok(MultiProjection { arity: w.dim(), rows })
}

fn check_level(l: usize, k: usize) -> Result<()> {
    if l == 0 || l >= k {
        return Err(Error::LevelOutOfRange { l, k });
    }
    Ok(())
}

/// All k-tuples whose projection on every l-subspace occurs among the
/// projections of `u` on that subspace.
pub fn full_closure(u: &[KTuple], n: usize, l: usize) -> Result<Vec<KTuple>> {
    let first = u.first().ok_or(Error::EmptyRelation)?;
    let k = first.arity();
    check_level(l, k)?;
    let subspaces = Subspace::of_dim(k, l);
    let seen: Vec<HashSet<Coords>> = subspaces
        .iter()
        .map(|w| u.iter().map(|t| w.project(t.coords())).collect())
        .collect();
    let space = TupleSpace::new(n, k)?;
    let mut it = space.iter();
    let mut out = Vec::new();
    while let Some(t) = it.next_slice() {
        if subspaces
            .iter()
            .zip(&seen)
            .all(|(w, s)| s.contains(&w.project(t)))
        {
            out.push(KTuple::from_slice_unchecked(t));
        }
    }
    Ok(out)
}

/// A tuple that lies in the l-closure of a class other than its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullnessWitness {
    pub l: usize,
    pub tuple: KTuple,
    pub own_class: u32,
    pub foreign_class: u32,
}

/// First violation of l-fullness, or `None` if every class is l-full.
pub fn l_full_witness(p: &KPartition, l: usize) -> Result<Option<FullnessWitness>> {
    let k = p.arity();
    check_level(l, k)?;
    let subspaces = Subspace::of_dim(k, l);
    let mut index: Vec<HashMap<Coords, Vec<u32>>> = vec![HashMap::new(); subspaces.len()];
    let mut it = p.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        let c = p.class_of_rank(r);
        for (w, map) in subspaces.iter().zip(index.iter_mut()) {
            map.entry(w.project(t)).or_default().push(c);
        }
        r += 1;
    }
    for map in index.iter_mut() {
        for v in map.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
    }
    let mut it = p.space().iter();
    let mut r = 0;
    while let Some(t) = it.next_slice() {
        let own = p.class_of_rank(r);
        r += 1;
        let mut lists: Vec<&Vec<u32>> = subspaces
            .iter()
            .zip(&index)
            .map(|(w, map)| &map[&w.project(t)])
            .collect();
        if lists.iter().all(|v| v.len() == 1) {
            continue;
        }
        lists.sort_by_key(|v| v.len());
        let foreign = lists[0]
            .iter()
            .copied()
            .find(|&c| c != own && lists[1..].iter().all(|v| v.binary_search(&c).is_ok()));
        if let Some(c) = foreign {
            return Ok(Some(FullnessWitness {
                l,
                tuple: KTuple::from_slice_unchecked(t),
                own_class: own,
                foreign_class: c,
            }));
        }
    }
    Ok(None)
}

pub fn is_l_full(p: &KPartition, l: usize) -> Result<bool> {
    Ok(l_full_witness(p, l)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuple::{partition_from_labels, refines};

    fn t(c: &[usize]) -> KTuple {
        KTuple::from_slice_unchecked(c)
    }

    fn path3_edges() -> KPartition {
        partition_from_labels(3, 2, |t| Some(t[0].abs_diff(t[1]) == 1)).unwrap()
    }

    #[test]
    fn project_tuple_examples() {
        let a = t(&[4, 7, 2]);
        let w = |p: &[usize]| Subspace::new(p, 3).unwrap();
        assert_eq!(project_tuple(&a, &w(&[0, 2])).unwrap(), t(&[4, 2]));
        assert_eq!(project_tuple(&a, &w(&[0, 1, 2])).unwrap(), a);
        assert_eq!(project_tuple(&a, &w(&[1])).unwrap(), t(&[7]));
        let wide = Subspace::new(&[3], 4).unwrap();
        assert!(project_tuple(&a, &wide).is_err());
        assert!(Subspace::new(&[2, 1], 3).is_err());
        assert!(Subspace::new(&[], 3).is_err());
    }

    #[test]
    fn drop_projection_order() {
        let d = drop_projections(&t(&[1, 2, 3])).unwrap();
        assert_eq!(d, vec![t(&[2, 3]), t(&[1, 3]), t(&[1, 2])]);
        let d = drop_projections(&t(&[5, 9])).unwrap();
        assert_eq!(d, vec![t(&[9]), t(&[5])]);
        let d = drop_projections(&t(&[0, 1, 2, 3])).unwrap();
        assert_eq!(d.len(), 4);
        for (j, x) in d.iter().enumerate() {
            assert!(!x.coords().contains(&j));
        }
        assert!(drop_projections(&t(&[0])).is_err());
    }

    #[test]
    fn assemble_single_class_k3() {
        let s = KPartition::single_class(3, 2).unwrap();
        assert_eq!(assemble(&s).unwrap().class_count(), 1);
    }

    #[test]
    fn assemble_path_p3() {
        let a = assemble(&path3_edges()).unwrap();
        assert_eq!(a.class_count(), 3);
        assert_eq!(a.class_sizes(), vec![2, 2, 2]);
        // classes are keyed by which slot holds the non-edge {0,2}
        for class in a.class_tuples() {
            let slot = |x: &KTuple| {
                drop_projections(x)
                    .unwrap()
                    .iter()
                    .position(|d| d.coords()[0].abs_diff(d.coords()[1]) == 2)
            };
            assert_eq!(slot(&class[0]), slot(&class[1]));
        }
        assert!(matches!(
            assemble(&a),
            Err(Error::NoExtension(4, 3))
        ));
    }

    #[test]
    fn project_single_class_k4() {
        let s = KPartition::single_class(4, 3).unwrap();
        for mode in [Mode::Count, Mode::Set] {
            assert_eq!(project_partition(&s, mode).unwrap().class_count(), 1);
        }
    }

    #[test]
    fn assemble_then_project_path_p3() {
        let p = path3_edges();
        let a = assemble(&p).unwrap();
        for mode in [Mode::Count, Mode::Set] {
            let back = project_partition(&a, mode).unwrap();
            assert!(refines(&back, &p).unwrap());
            let classes: Vec<Vec<Vec<usize>>> = back
                .class_tuples()
                .into_iter()
                .map(|c| c.into_iter().map(|t| t.to_vec()).collect())
                .collect();
            assert_eq!(
                classes,
                vec![
                    vec![vec![0, 1], vec![2, 1]],
                    vec![vec![0, 2], vec![2, 0]],
                    vec![vec![1, 0], vec![1, 2]],
                ]
            );
            assert_eq!(pq_round(&p, mode).unwrap(), back);
        }
    }

    #[test]
    fn project_arity_one_is_error() {
        let s = KPartition::single_class(3, 1).unwrap();
        assert!(project_partition(&s, Mode::Count).is_err());
    }

    #[test]
    fn multiproject_examples() {
        let u = vec![t(&[1, 2]), t(&[1, 3])];
        let mp = multiproject(&u, &Subspace::new(&[0], 2).unwrap()).unwrap();
        assert_eq!(mp.rows.len(), 1);
        assert_eq!(mp.rows[&t(&[1])], 2);
        assert_eq!(mp.total(), 2);
        assert!(mp.is_homogeneous());
        assert_eq!(
            multiproject(&[], &Subspace::new(&[0], 2).unwrap()),
            Err(Error::EmptyRelation)
        );
        assert!(multiproject(&u, &Subspace::new(&[0, 1], 2).unwrap()).is_err());
    }

    #[test]
    fn single_class_is_full_at_every_level() {
        let s = KPartition::single_class(5, 3).unwrap();
        assert!(is_l_full(&s, 1).unwrap());
        assert!(is_l_full(&s, 2).unwrap());
        assert!(matches!(
            is_l_full(&s, 3),
            Err(Error::LevelOutOfRange { .. })
        ));
        assert!(is_l_full(&s, 0).is_err());
    }

    #[test]
    fn merged_class_breaks_one_fullness() {
        // singleton classes are their own 1-closure
        let d = KPartition::discrete(4, 3).unwrap();
        assert!(is_l_full(&d, 1).unwrap());
        let merged = |x: &[usize]| x == [0, 1, 2] || x == [1, 0, 3];
        let p = partition_from_labels(4, 3, |x| {
            Some(if merged(x) { vec![9] } else { x.to_vec() })
        })
        .unwrap();
        let closure = full_closure(&[t(&[0, 1, 2]), t(&[1, 0, 3])], 4, 1).unwrap();
        assert_eq!(
            closure,
            vec![t(&[0, 1, 2]), t(&[0, 1, 3]), t(&[1, 0, 2]), t(&[1, 0, 3])]
        );
        let w = l_full_witness(&p, 1).unwrap().unwrap();
        assert_eq!(w.tuple, t(&[0, 1, 3]));
        assert_eq!(w.foreign_class, p.class_of(&t(&[0, 1, 2])).unwrap());
        // 2-closure of the merged class is the class itself
        assert!(is_l_full(&p, 2).unwrap());
    }
}

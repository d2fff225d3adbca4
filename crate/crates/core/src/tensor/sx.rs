//! The row-subsum system of a 3-partition.
//!
//! For a 3-tuple `t` and a coordinate `c`, the subsum `v_c(t)` adds the pair
//! unknowns `x(t_c, l)` over every vertex `l` outside `t`. Tuples in one class
//! must have equal subsums; each class contributes the chain
//! `v_c(t_1) = v_c(t_2)`, `v_c(t_2) = v_c(t_3)`, … which implies every other
//! equality inside the class.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{generic_element_separates, Equation, LinearSystem, RankMethod};
use super::scalar::Rational;
use crate::error::{Error, Result};
use crate::ops::{project_partition, Mode};
use crate::oracle::{orbit_partition, AutGroup};
use crate::tuple::{KPartition, TupleSpace};

#[derive(Debug, Clone, Copy)]
pub enum PairSource<'a> {
    /// One unknown per ordered vertex pair.
    All,
    /// One unknown per orbit of ordered pairs, and one tuple per 3-orbit
    /// inside each class. Only solutions invariant under the group remain.
    OrbitReduced(&'a AutGroup),
}

impl PairSource<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            PairSource::All => "all",
            PairSource::OrbitReduced(_) => "orbit-reduced",
        }
    }
}

/// Which tuple coordinate owns the subsum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    fn index(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
            Component::Z => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SxSystem {
    pub n: usize,
    pub system: LinearSystem,
    pub source: &'static str,
    pub component: Component,
    /// Equations of the unreduced form, one per unordered same-class pair.
    pub pair_equations: usize,
    /// Chain equations whose two subsums cancel identically.
    pub trivial_equations: usize,
    /// Class of each unknown's pair in the 2-partition below `l`.
    pub variable_class: Vec<u32>,
}

fn pair_name(u: usize, v: usize) -> String {
    format!("x[{u},{v}]")
}

pub fn build_sx_system(l: &KPartition, source: PairSource<'_>, component: Component) -> Result<SxSystem> {
    if l.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: l.arity(),
        });
    }
    let n = l.n();
    let pairs = TupleSpace::new(n, 2)?;
    let l2 = project_partition(l, Mode::Count)?;
    // unknown index of every ordered pair
    let (var_of_pair, variables, variable_class): (Vec<usize>, Vec<String>, Vec<u32>) = match source {
        PairSource::All => (
            (0..pairs.len()).collect(),
            pairs.iter().map(|t| pair_name(t.coords()[0], t.coords()[1])).collect(),
            (0..pairs.len()).map(|r| l2.class_of_rank(r)).collect(),
        ),
        PairSource::OrbitReduced(group) => {
            let orbits = orbit_partition(group, n, 2)?;
            let mut names = vec![String::new(); orbits.class_count()];
            let mut classes = vec![0; orbits.class_count()];
            for r in (0..pairs.len()).rev() {
                let o = orbits.class_of_rank(r) as usize;
                let t = pairs.unrank(r);
                names[o] = pair_name(t.coords()[0], t.coords()[1]);
                classes[o] = l2.class_of_rank(r);
            }
            (
                (0..pairs.len()).map(|r| orbits.class_of_rank(r) as usize).collect(),
                names,
                classes,
            )
        }
    };
    let representatives: Option<KPartition> = match source {
        PairSource::All => None,
        PairSource::OrbitReduced(group) => Some(orbit_partition(group, n, 3)?),
    };
    let c = component.index();
    let row = |t: &[usize]| -> Vec<(usize, Rational)> {
        (0..n)
            .filter(|x| !t.contains(x))
            .map(|x| (var_of_pair[pairs.rank(&[t[c], x])], Rational::one()))
            .collect()
    };
    let mut system = LinearSystem::new(variables);
    let mut pair_equations = 0;
    let mut trivial_equations = 0;
    for class in l.classes() {
        pair_equations += class.len() * (class.len() - 1) / 2;
        let members: Vec<usize> = match &representatives {
            None => class,
            Some(orbits) => {
                let mut seen = HashMap::new();
                class
                    .into_iter()
                    .filter(|&r| seen.insert(orbits.class_of_rank(r), ()).is_none())
                    .collect()
            }
        };
        for w in members.windows(2) {
            let a = row(l.space().unrank(w[0]).coords());
            let b = row(l.space().unrank(w[1]).coords());
            let eq = Equation::new(a.into_iter().chain(b.into_iter().map(|(v, q)| (v, -q))), Rational::zero());
            if eq.terms.is_empty() {
                trivial_equations += 1;
            } else {
                system.push(eq)?;
            }
        }
    }
    Ok(SxSystem {
        n,
        system,
        source: source.name(),
        component,
        pair_equations,
        trivial_equations,
        variable_class,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SxReport {
    pub source: String,
    pub component: Component,
    pub n: usize,
    pub variables: usize,
    /// Nontrivial chain equations in the system.
    pub equations: usize,
    pub pair_equations: usize,
    pub trivial_equations: usize,
    pub rank: usize,
    pub solution_space_dim: usize,
    pub rank_method: RankMethod,
    pub constants_solve: bool,
    pub l2_classes: usize,
    /// Some solution gives different values to any two unknowns whose pairs
    /// lie in different classes.
    pub separating_solution: bool,
    /// Some solution is constant on each class and different across classes.
    pub class_valued_solution: bool,
    pub fewer_equations_than_variables: bool,
    pub notes: Vec<String>,
}

pub fn analyze(sx: &SxSystem) -> SxReport {
    let sys = &sx.system;
    let vars = sys.variables.len();
    let sol = sys.solve();
    let ones = vec![Rational::one(); vars];
    let constants_solve = sys.satisfied_by(&ones);
    let classes = {
        let mut c = sx.variable_class.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    let separating_solution = generic_element_separates(&sol.nullspace, &sx.variable_class);
    let mut tied = sys.clone();
    let mut rep: HashMap<u32, usize> = HashMap::new();
    for (v, c) in sx.variable_class.iter().enumerate() {
        let r = *rep.entry(*c).or_insert(v);
        if r != v {
            tied.equations.push(Equation::new(
                [(v, Rational::one()), (r, -Rational::one())],
                Rational::zero(),
            ));
        }
    }
    let tied_sol = tied.solve();
    let class_valued_solution = generic_element_separates(&tied_sol.nullspace, &sx.variable_class);
    SxReport {
        source: sx.source.to_string(),
        component: sx.component,
        n: sx.n,
        variables: vars,
        equations: sys.equations.len(),
        pair_equations: sx.pair_equations,
        trivial_equations: sx.trivial_equations,
        rank: sol.rank,
        solution_space_dim: sol.solution_space_dim,
        rank_method: sol.method,
        constants_solve,
        l2_classes: classes,
        separating_solution,
        class_valued_solution,
        fewer_equations_than_variables: sys.equations.len() < vars,
        notes: vec![
            "unknowns are ordered vertex pairs, not class values".into(),
            "each class contributes a chain of equalities; other pairs follow by transitivity".into(),
        ],
    }
}

/// The systems of all three components have one row space. Meant for
/// s-symmetric partitions, where swapping coordinates permutes classes.
pub fn components_agree(l: &KPartition) -> Result<bool> {
    let systems = [Component::X, Component::Y, Component::Z]
        .map(|c| build_sx_system(l, PairSource::All, c).map(|s| s.system));
    let [x, y, z] = systems;
    let (x, y, z) = (x?, y?, z?);
    let rank = |s: &LinearSystem| s.solve().rank;
    let rx = rank(&x);
    let mut joint = x.clone();
    joint.equations.extend(y.equations.iter().cloned());
    joint.equations.extend(z.equations.iter().cloned());
    Ok(rank(&y) == rx && rank(&z) == rx && rank(&joint) == rx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gen_complete, gen_cube, gen_path};
    use crate::oracle::{graph_automorphisms, OracleConfig};
    use crate::stabilize::stabilize_graph;

    #[test]
    fn single_class_on_k4() {
        let l = KPartition::single_class(4, 3).unwrap();
        let sx = build_sx_system(&l, PairSource::All, Component::X).unwrap();
        assert_eq!(sx.system.variables.len(), 12);
        assert_eq!(sx.pair_equations, 24 * 23 / 2);
        let r = analyze(&sx);
        assert!(r.constants_solve);
        // every x[i,*] row sum with one summand: all unknowns equal
        assert_eq!(r.solution_space_dim, 1);
        assert!(r.rank <= r.equations.min(r.variables));
    }

    #[test]
    fn rejects_other_arities() {
        let l = KPartition::single_class(4, 2).unwrap();
        assert!(build_sx_system(&l, PairSource::All, Component::X).is_err());
    }

    #[test]
    fn cube_orbits_regression() {
        let g = gen_cube();
        let group = graph_automorphisms(&g, OracleConfig::exhaustive()).unwrap();
        let l = orbit_partition(&group, 8, 3).unwrap();
        let all = analyze(&build_sx_system(&l, PairSource::All, Component::X).unwrap());
        assert_eq!(all.variables, 56);
        assert!(all.constants_solve);
        // rank cross-checked by exact elimination over all same-class pairs
        assert_eq!((all.rank, all.solution_space_dim), (53, 3));
        let red = analyze(&build_sx_system(&l, PairSource::OrbitReduced(&group), Component::X).unwrap());
        // pair orbits of the cube: distance 1, 2, 3
        assert_eq!(red.variables, 3);
        assert!(red.constants_solve);
        assert!(red.equations <= all.equations);
    }

    #[test]
    fn components_share_a_row_space() {
        for g in [gen_path(5), gen_complete(4), gen_cube()] {
            let l = stabilize_graph(&g, 3, Mode::Count).unwrap().final_partition;
            assert!(components_agree(&l).unwrap());
        }
    }
}

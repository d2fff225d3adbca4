//! Deterministic generators for the named test graphs.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn gen_complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, edges).expect("valid by construction")
}

pub fn gen_path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("valid by construction")
}

/// Cycle on `n >= 3` vertices; smaller `n` gives the path.
pub fn gen_cycle(n: usize) -> Graph {
    if n < 3 {
        return gen_path(n);
    }
    Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid by construction")
}

/// The 3-cube: vertices are 3-bit words, adjacent when they differ in one bit.
pub fn gen_cube() -> Graph {
    let edges: Vec<_> = (0..8usize)
        .flat_map(|u| (0..3).map(move |b| (u, u ^ (1 << b))))
        .filter(|&(u, v)| u < v)
        .collect();
    Graph::new(8, edges).expect("valid by construction")
}

/// The cube with the parallel edges {0,1} and {2,3} of the face 0-1-3-2
/// replaced by that face's diagonals {0,3} and {1,2}.
pub fn gen_twisted_cube() -> Graph {
    let edges: Vec<_> = gen_cube()
        .edges()
        .filter(|e| *e != (0, 1) && *e != (2, 3))
        .chain([(0, 3), (1, 2)])
        .collect();
    Graph::new(8, edges).expect("valid by construction")
}

pub fn gen_petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::new(10, edges).expect("valid by construction")
}

/// The 4×4 rook's graph: cells sharing a row or a column.
pub fn gen_rook4() -> Graph {
    let mut edges = Vec::new();
    for u in 0..16usize {
        for v in u + 1..16 {
            if u / 4 == v / 4 || u % 4 == v % 4 {
                edges.push((u, v));
            }
        }
    }
    Graph::new(16, edges).expect("valid by construction")
}

/// Cayley graph of Z4×Z4 with connection set ±(0,1), ±(1,0), ±(1,1).
pub fn gen_shrikhande() -> Graph {
    let conn = [(0, 1), (0, 3), (1, 0), (3, 0), (1, 1), (3, 3)];
    let mut edges = Vec::new();
    for u in 0..16usize {
        for v in u + 1..16 {
            let d = (((v / 4) + 4 - u / 4) % 4, ((v % 4) + 4 - u % 4) % 4);
            if conn.contains(&d) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(16, edges).expect("valid by construction")
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Paley graph on a prime `p ≡ 1 (mod 4)`.
pub fn gen_paley(p: usize) -> Result<Graph> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::UnknownGenerator(format!(
            "paley:{p} (needs a prime congruent to 1 mod 4)"
        )));
    }
    let mut square = vec![false; p];
    for x in 1..p {
        square[x * x % p] = true;
    }
    let mut edges = Vec::new();
    for u in 0..p {
        for v in u + 1..p {
            if square[v - u] {
                edges.push((u, v));
            }
        }
    }
    Graph::new(p, edges)
}

/// A connected 6-vertex graph with trivial automorphism group.
pub fn gen_rigid6() -> Graph {
    Graph::new(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (3, 5)]).expect("valid by construction")
}

/// Resolves generator names such as `cycle:5`, `cube` or `paley:13`.
pub fn generate(spec: &str) -> Result<Graph> {
    let (name, arg) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let size = || -> Result<usize> {
        arg.and_then(|a| a.parse().ok())
            .ok_or_else(|| Error::UnknownGenerator(format!("{spec} (expected {name}:<n>)")))
    };
    let fixed = |g: Graph| -> Result<Graph> {
        match arg {
            None => Ok(g),
            Some(_) => Err(Error::UnknownGenerator(format!("{spec} ({name} takes no size)"))),
        }
    };
    match name {
        "complete" => Ok(gen_complete(size()?)),
        "path" => Ok(gen_path(size()?)),
        "cycle" => Ok(gen_cycle(size()?)),
        "paley" => gen_paley(size()?),
        "cube" => fixed(gen_cube()),
        "twisted-cube" => fixed(gen_twisted_cube()),
        "petersen" => fixed(gen_petersen()),
        "rook4" => fixed(gen_rook4()),
        "shrikhande" => fixed(gen_shrikhande()),
        "rigid6" => fixed(gen_rigid6()),
        _ => Err(Error::UnknownGenerator(spec.to_string())),
    }
}

/// Names accepted by [`generate`], with sample sizes for the sized ones.
pub const GENERATOR_NAMES: &[&str] = &[
    "complete:N",
    "path:N",
    "cycle:N",
    "cube",
    "twisted-cube",
    "petersen",
    "rook4",
    "shrikhande",
    "paley:P",
    "rigid6",
];

/// The fixed named graphs plus small members of each family.
pub fn corpus() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for n in 2..=6 {
        out.push((format!("complete:{n}"), gen_complete(n)));
        out.push((format!("path:{n}"), gen_path(n)));
    }
    for n in 3..=8 {
        out.push((format!("cycle:{n}"), gen_cycle(n)));
    }
    for name in ["cube", "twisted-cube", "petersen", "rook4", "shrikhande", "rigid6"] {
        out.push((name.to_string(), generate(name).unwrap()));
    }
    for p in [5, 13] {
        out.push((format!("paley:{p}"), gen_paley(p).unwrap()));
    }
    out
}

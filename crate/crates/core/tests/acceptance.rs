//! Acceptance gate: one PASS/FAIL line per criterion, each with a pinned
//! time bound. Runs without the libtest harness so the lines always print.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kpart::cert::{
    check_implications, check_mp_symmetry, check_p_symmetry, check_pq_stable, check_s_symmetry,
};
use kpart::commands::{cmd_probe7, RunConfig, Source};
use kpart::corpus::{corpus, gen_cube, gen_petersen, gen_rook4, gen_shrikhande, gen_twisted_cube};
use kpart::io::write_graph6;
use kpart::ops::assemble;
use kpart::oracle::{
    assembly_stays_automorphic, graph_automorphisms, orbit_partition, vertex_transitive, OracleConfig,
};
use kpart::stabilize::{compare_graphs, initial_partition, stabilize_graph, Verdict};
use kpart::tensor::color::{
    adjacency_tensor, class_tensor, evaluate_forms, level_equivalent, linear_assemble, product_assemble,
    projective_convolution, GENERIC_PRIMES,
};
use kpart::tensor::scalar::{integer, rational};
use kpart::tensor::scheme::{intersection_numbers, srg_parameters, IntersectionNumbers};
use kpart::tensor::{vandermonde_transform, ColorTensor};
use kpart::tuple::refines;
use kpart::{Graph, KPartition, Mode, Rational};

type Check = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
        Graph::new(n, edges).unwrap()
    })
}

fn c1_twisted_cube() -> Check {
    let g = gen_twisted_cube();
    ensure(g.regular_degree() == Some(3), || "not 3-regular".into())?;
    ensure(g.is_connected(), || "not connected".into())?;
    let group = graph_automorphisms(&g, OracleConfig::exhaustive()).map_err(|e| e.to_string())?;
    ensure(group.examined == Some(40_320), || format!("examined {:?} permutations", group.examined))?;
    ensure(vertex_transitive(&g, OracleConfig::exhaustive()).unwrap(), || "not vertex-transitive".into())?;
    ensure(!g.is_bipartite(), || "no odd cycle".into())?;
    let cmp = compare_graphs(&g, &gen_cube(), 2, Mode::Count).unwrap();
    ensure(cmp.verdict == Verdict::Distinguished, || "not separated from the cube".into())?;
    let l2 = initial_partition(&g, 2).unwrap();
    let pq = check_pq_stable(&l2, Mode::Set).unwrap();
    ensure(pq.holds, || format!("edge partition not pq-stable: {:?}", pq.witness))?;
    let q = assemble(&l2).unwrap();
    let mp = check_mp_symmetry(&q);
    let w = mp.witness.as_ref().ok_or("assembly is mp-symmetric")?;
    ensure(!mp.holds && w.recheck(&q), || "mp witness does not recheck".into())?;
    println!("    |Aut| = {}, mp witness: {}", group.order, serde_json::to_string(w).unwrap());
    Ok(())
}

fn c2_refinement_bound() -> Check {
    let mut checked = 0;
    for n in 3..=5 {
        for g in all_graphs(n) {
            let group = graph_automorphisms(&g, OracleConfig::exhaustive()).unwrap();
            let elements = group.elements.as_ref().ok_or("elements not enumerated")?;
            for k in 2..=3 {
                if k >= n {
                    continue;
                }
                let fin = stabilize_graph(&g, k, Mode::Count).unwrap().final_partition;
                let orb = orbit_partition(&group, n, k).unwrap();
                ensure(refines(&orb, &fin).unwrap(), || format!("orbits not finer on {g:?} k={k}"))?;
                for p in elements {
                    for t in fin.space().iter() {
                        let img: Vec<usize> = t.coords().iter().map(|&v| p.apply(v)).collect();
                        ensure(fin.class_of_coords(&img) == fin.class_of(&t).unwrap(), || {
                            format!("{p:?} moves a class of {g:?} k={k}")
                        })?;
                    }
                }
                checked += 1;
            }
        }
    }
    println!("    {checked} (graph, k) instances");
    Ok(())
}

fn c3_orbit_partitions() -> Check {
    let mut seen: HashSet<KPartition> = HashSet::new();
    let mut round_trip_premises = 0;
    for n in 3..=5 {
        for g in all_graphs(n) {
            let group = graph_automorphisms(&g, OracleConfig::exhaustive()).unwrap();
            for k in 2..=3usize.min(n - 1) {
                let orb = orbit_partition(&group, n, k).unwrap();
                if !seen.insert(orb.clone()) {
                    continue;
                }
                let tag = || format!("{g:?} k={k}");
                ensure(check_s_symmetry(&orb).holds, || format!("s fails on {}", tag()))?;
                ensure(check_p_symmetry(&orb).unwrap().holds, || format!("p fails on {}", tag()))?;
                ensure(check_mp_symmetry(&orb).holds, || format!("mp fails on {}", tag()))?;
                for mode in [Mode::Count, Mode::Set] {
                    ensure(check_pq_stable(&orb, mode).unwrap().holds, || format!("pq fails on {}", tag()))?;
                    let imp = check_implications(&orb, mode).unwrap();
                    ensure(imp.all_hold(), || format!("{imp:?} on {}", tag()))?;
                    if k >= 3 {
                        ensure(imp.projection_keeps_p == Some(true), || format!("projection on {}", tag()))?;
                        ensure(imp.p_implies_s == Some(true), || format!("p => s on {}", tag()))?;
                    }
                    round_trip_premises += usize::from(imp.stable_full_round_trips.is_some());
                }
                ensure(
                    assembly_stays_automorphic(&orb, 1, OracleConfig::exhaustive()).unwrap(),
                    || format!("assembly not automorphic on {}", tag()),
                )?;
            }
        }
    }
    println!(
        "    {} distinct orbit partitions; round-trip premise held {round_trip_premises} times",
        seen.len()
    );
    Ok(())
}

fn c4_srg_algebra() -> Check {
    let g = gen_petersen();
    let r = srg_parameters(&g).map_err(|e| e.to_string())?;
    ensure((r.n, r.m, r.lambda, r.mu) == (10, 3, Some(0), Some(1)), || format!("{r:?}"))?;
    let a = adjacency_tensor::<Rational>(&g).unwrap();
    let conv = projective_convolution(&[a.clone(), a.clone()]).unwrap();
    let (lam, mu) = (integer(0), integer(1));
    for t in a.space().iter() {
        let expect = mu.clone() + (lam.clone() - mu.clone()) * a.get(t.coords()).clone();
        ensure(*conv.get(t.coords()) == expect, || format!("cell {t:?}"))?;
    }
    let l = initial_partition(&g, 2).unwrap();
    let IntersectionNumbers::Table(table) = intersection_numbers(&l).unwrap() else {
        return Err("intersection numbers not constant".into());
    };
    // class 0 holds the edges: <0,1> is the first tuple and an edge
    ensure(table.get(&[0, 0], 0) == 0 && table.get(&[0, 0], 1) == 1, || "λ/μ cells".into())?;
    ensure(table.get(&[1, 1], 0) == 4, || "non-edge pairs around an edge".into())?;
    Ok(())
}

fn random_01(n: usize, rng: &mut StdRng) -> ColorTensor<Rational> {
    ColorTensor::from_fn(n, 2, |_| if rng.random_bool(0.5) { Rational::one() } else { Rational::zero() }).unwrap()
}

fn c5_convolution_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    for case in 0..100 {
        let n = rng.random_range(3..=20);
        let s1 = random_01(n, &mut rng);
        let s2 = random_01(n, &mut rng);
        let conv = projective_convolution(&[s1.clone(), s2.clone()]).unwrap();
        // dense matrices with a zero diagonal; the value at <i,j> is row i of
        // the second factor against row j of the first
        let dense = |t: &ColorTensor<Rational>| -> Vec<Vec<i64>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0 } else { i64::from(!t.get(&[i, j]).is_zero()) }).collect())
                .collect()
        };
        let (m1, m2) = (dense(&s1), dense(&s2));
        for (i, row2) in m2.iter().enumerate() {
            for j in (0..n).filter(|&j| j != i) {
                let v: i64 = row2.iter().zip(&m1[j]).map(|(a, b)| a * b).sum();
                ensure(*conv.get(&[i, j]) == integer(v), || format!("case {case} cell ({i},{j})"))?;
            }
        }
    }
    Ok(())
}

fn c6_distinguishing() -> Check {
    let (s, r) = (gen_shrikhande(), gen_rook4());
    let two = compare_graphs(&s, &r, 2, Mode::Count).unwrap();
    ensure(two.verdict == Verdict::Equivalent, || format!("k=2: {two:?}"))?;
    let three = compare_graphs(&s, &r, 3, Mode::Count).unwrap();
    ensure(three.verdict == Verdict::Distinguished, || format!("k=3: {three:?}"))?;
    Ok(())
}

fn c7_level_transforms() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let mut distinct_b = 0;
    for case in 0..1000 {
        let d = rng.random_range(1..=12);
        let mut a: Vec<Rational> = Vec::new();
        while a.len() < d {
            let q = rational(rng.random_range(-40..=40), rng.random_range(1..=6));
            if !a.contains(&q) {
                a.push(q);
            }
        }
        let b: Vec<Rational> = (0..d)
            .map(|_| rational(rng.random_range(-9..=9), rng.random_range(1..=4)))
            .collect();
        let p = vandermonde_transform(&a, &b).map_err(|e| e.to_string())?;
        for (x, y) in a.iter().zip(&b) {
            ensure(p.eval(x) == *y, || format!("case {case}: P({x}) != {y}"))?;
        }
        let unique: HashSet<&Rational> = b.iter().collect();
        if unique.len() == d {
            distinct_b += 1;
            let sigma = ColorTensor::from_fn(5, 2, |t| a[(t[0] * 5 + t[1]) % d].clone()).unwrap();
            let image = sigma.map(|v| p.eval(v));
            ensure(level_equivalent(&sigma, &image).unwrap(), || format!("case {case}: levels differ"))?;
        }
    }
    println!("    {distinct_b} cases with distinct values checked for level equivalence");
    Ok(())
}

fn c8_assembly_equivalences() -> Check {
    let primes: Vec<Rational> = GENERIC_PRIMES.iter().map(|&p| integer(p)).collect();
    let mut graphs = 0;
    for (name, g) in corpus() {
        if g.n() < 3 {
            continue;
        }
        let l = stabilize_graph(&g, 2, Mode::Count).unwrap().final_partition;
        let q = assemble(&l).unwrap();
        let sigma = class_tensor::<Rational>(&l);
        let prod = product_assemble(&sigma, &l).unwrap().level_partition();
        ensure(prod == q, || format!("{name}: product assembly differs"))?;
        let lin = linear_assemble(&sigma).unwrap();
        ensure(lin.level_partition() == q, || format!("{name}: linear assembly differs"))?;
        let generic = evaluate_forms(&lin, &primes);
        ensure(generic.level_partition() == q, || format!("{name}: generic evaluation differs"))?;
        graphs += 1;
    }
    println!("    {graphs} corpus graphs");
    Ok(())
}

fn c9_probe() -> Check {
    let dir = std::env::temp_dir().join(format!("kpart-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let extra = dir.join("probe_inputs.g6");
    let lines: Vec<String> = [gen_petersen(), gen_rook4(), gen_shrikhande(), gen_cube()]
        .iter()
        .map(|g| write_graph6(g).unwrap())
        .collect();
    std::fs::write(&extra, lines.join("\n") + "\n").map_err(|e| e.to_string())?;
    let rigid = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/srg25_rigid.g6");
    for (path, limit) in [(rigid.into(), Some(25)), (extra.clone(), None)] {
        let cfg = RunConfig {
            sources: vec![Source::File(path)],
            oracle_limit: limit,
            ..RunConfig::default()
        };
        let out = cmd_probe7(&cfg).map_err(|e| e.to_string())?;
        let reports = match &out.data {
            serde_json::Value::Array(v) => v.clone(),
            other => vec![other.clone()],
        };
        for r in &reports {
            for key in ["trace", "certificate", "sx", "aut", "flag", "srg", "discrete"] {
                ensure(r.get(key).is_some(), || format!("missing {key}"))?;
            }
            let sx = &r["sx"];
            let num = |v: &serde_json::Value| v.as_u64().unwrap();
            let (rank, eqs, vars) = (num(&sx["rank"]), num(&sx["equations"]), num(&sx["variables"]));
            ensure(rank <= eqs.min(vars), || format!("rank {rank} > min({eqs}, {vars})"))?;
            ensure(num(&sx["solution_space_dim"]) == vars - rank, || "nullity".into())?;
            ensure(sx["constants_solve"] == true, || "constants do not solve".into())?;
            ensure(r["aut"]["computed"] == true, || "automorphisms not computed".into())?;
            ensure(!r["flag"].is_null(), || "flag not populated".into())?;
            ensure(!r["trace"]["class_counts"].as_array().unwrap().is_empty(), || "empty trace".into())?;
        }
        if limit.is_some() {
            let r = &reports[0];
            ensure(r["n"] == 25 && r["aut"]["order"] == "1", || "rigid input changed".into())?;
            ensure(r["srg"]["lambda"] == 5 && r["srg"]["mu"] == 6, || "not srg(25,12,5,6)".into())?;
            println!(
                "    srg(25,12,5,6): classes {}, equations {}, rank {}, flag {}",
                r["certificate"]["classes"], r["sx"]["equations"], r["sx"]["rank"], r["flag"]
            );
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn data_section(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kpart"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&doc["data"]).unwrap())
}

fn c10_determinism() -> Check {
    let rigid = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/srg25_rigid.g6");
    let runs: &[&[&str]] = &[
        &["stabilize", "--gen", "petersen", "--k", "3"],
        &["stabilize", "--gen", "twisted-cube", "--k", "2", "--mode", "set", "--emit-partition"],
        &["certify", "--gen", "twisted-cube", "--k", "3", "--partition", "assembled"],
        &["certify", "--gen", "cycle:6", "--k", "2", "--partition", "raw"],
        &["orbits", "--gen", "cube", "--k", "2"],
        &["compare", "--gen", "shrikhande", "--gen2", "rook4", "--k", "2"],
        &["srg", "--gen", "petersen"],
        &["probe7", "--gen", "petersen"],
        &["probe7", "--input", rigid, "--oracle-limit", "25"],
        &["sx", "--gen", "cube", "--pairs", "orbit-reduced"],
        &["sx", "--gen", "paley:13", "--component", "y"],
    ];
    for args in runs {
        let a = data_section(args)?;
        let b = data_section(args)?;
        ensure(a == b, || format!("{args:?} differs between runs"))?;
    }
    println!("    {} command lines", runs.len());
    Ok(())
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("twisted cube", Duration::from_secs(5), c1_twisted_cube),
        ("oracle refinement bound", Duration::from_secs(300), c2_refinement_bound),
        ("automorphic partition symmetry suite", Duration::from_secs(600), c3_orbit_partitions),
        ("srg algebra", Duration::from_secs(1), c4_srg_algebra),
        ("convolution oracle", Duration::from_secs(10), c5_convolution_oracle),
        ("distinguishing power", Duration::from_secs(60), c6_distinguishing),
        ("level-transform exactness", Duration::from_secs(5), c7_level_transforms),
        ("assembly equivalences", Duration::from_secs(60), c8_assembly_equivalences),
        ("rigidity probe", Duration::from_secs(120), c9_probe),
        ("determinism", Duration::from_secs(300), c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, bound, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed <= bound, || format!("took {elapsed:.2?}, bound {bound:?}"))
        });
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({elapsed:.2?} <= {bound:?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

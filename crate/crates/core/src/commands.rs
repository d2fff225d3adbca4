//! The command-line pipelines, independent of argument parsing.

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cert::{certify, check_implications, Implications, SymmetryReport};
use crate::corpus::generate;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::parse_graphs;
use crate::ops::{assemble, Mode};
use crate::oracle::{graph_automorphisms, orbit_partition, OracleConfig, SearchMode};
use crate::stabilize::{compare_graphs, initial_partition, stabilize_graph, Verdict};
use crate::tensor::probe::rigidity_probe;
use crate::tensor::scheme::{intersection_numbers, srg_parameters, IntersectionNumbers};
use crate::tensor::sx::{analyze, build_sx_system, Component, PairSource};
use crate::tuple::KPartition;

pub const MIN_K: usize = 2;
pub const MAX_K: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Stdin,
    Generator(String),
}

impl Source {
    /// `-` reads standard input.
    pub fn from_parts(input: Option<&str>, generator: Option<&str>, slot: &str) -> Result<Self> {
        match (input, generator) {
            (Some(_), Some(_)) => Err(Error::Usage(format!(
                "graph slot {slot} has both an input file and a generator"
            ))),
            (Some("-"), None) => Ok(Source::Stdin),
            (Some(p), None) => Ok(Source::File(p.into())),
            (None, Some(g)) => Ok(Source::Generator(g.to_string())),
            (None, None) => Err(Error::Usage(format!("graph slot {slot} needs an input file or a generator"))),
        }
    }

    pub fn load(&self) -> Result<Vec<Graph>> {
        match self {
            Source::Generator(g) => Ok(vec![generate(g)?]),
            Source::File(p) => parse_graphs(&std::fs::read_to_string(p)?),
            Source::Stdin => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                parse_graphs(&s)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Stdin => "stdin".into(),
            Source::Generator(g) => format!("gen:{g}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Which k-partition `certify` inspects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionChoice {
    /// The graph's own k-partition before refinement.
    Raw,
    #[default]
    Stabilized,
    /// The assembly of the stable (k-1)-partition.
    Assembled,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sources: Vec<Source>,
    pub k: usize,
    pub mode: Mode,
    pub format: Format,
    pub oracle_limit: Option<usize>,
    pub exhaustive: bool,
    pub partition: PartitionChoice,
    pub pairs_reduced: bool,
    pub component: Component,
    pub emit_partition: bool,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sources: Vec::new(),
            k: 2,
            mode: Mode::Count,
            format: Format::Text,
            oracle_limit: None,
            exhaustive: false,
            partition: PartitionChoice::Stabilized,
            pairs_reduced: false,
            component: Component::X,
            emit_partition: false,
            csv: None,
        }
    }
}

impl RunConfig {
    pub fn with_gen(name: &str) -> Self {
        Self {
            sources: vec![Source::Generator(name.into())],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_K..=MAX_K).contains(&self.k) {
            return Err(Error::Usage(format!("k = {} outside {MIN_K}..={MAX_K}", self.k)));
        }
        Ok(())
    }

    fn oracle(&self) -> OracleConfig {
        OracleConfig {
            mode: if self.exhaustive { SearchMode::Exhaustive } else { SearchMode::Backtrack },
            limit: self.oracle_limit,
        }
    }

    fn graphs(&self, slot: usize) -> Result<Vec<Graph>> {
        let src = self
            .sources
            .get(slot)
            .ok_or_else(|| Error::Usage(format!("missing graph slot {}", slot + 1)))?;
        let gs = src.load()?;
        if gs.is_empty() {
            return Err(Error::Parse {
                format: "input",
                offset: 0,
                message: format!("{} holds no graph", src.describe()),
            });
        }
        Ok(gs)
    }
}

/// A finished analysis: the stable data section and its text rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: &'static str,
    pub data: Value,
    pub text: String,
}

impl Output {
    /// JSON envelope; only `meta` carries run-dependent fields.
    pub fn to_json(&self, elapsed_ms: u128) -> String {
        let doc = json!({
            "meta": {
                "command": self.command,
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_ms": elapsed_ms as u64,
            },
            "data": self.data,
        });
        serde_json::to_string_pretty(&doc).expect("values serialize")
    }

    pub fn render(&self, format: Format, elapsed_ms: u128) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => self.to_json(elapsed_ms) + "\n",
        }
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Runs `f` per input graph; several graphs give a list.
fn per_graph(
    cfg: &RunConfig,
    command: &'static str,
    mut f: impl FnMut(&Graph) -> Result<(Value, String)>,
) -> Result<Output> {
    cfg.validate()?;
    let graphs = cfg.graphs(0)?;
    let mut data = Vec::new();
    let mut text = String::new();
    for (i, g) in graphs.iter().enumerate() {
        let (d, t) = f(g)?;
        if graphs.len() > 1 {
            text.push_str(&format!("# graph {i}\n"));
        }
        text.push_str(&t);
        data.push(d);
    }
    let data = if data.len() == 1 { data.pop().unwrap() } else { Value::Array(data) };
    Ok(Output { command, data, text })
}

fn graph_summary(g: &Graph) -> Value {
    json!({ "n": g.n(), "edges": g.edge_count(), "directed": g.is_directed() })
}

fn sorted_sizes(p: &KPartition) -> Vec<usize> {
    let mut s = p.class_sizes();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_stabilize(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "stabilize", |g| {
        let trace = stabilize_graph(g, cfg.k, cfg.mode)?;
        let l = &trace.final_partition;
        let mut data = json!({
            "graph": graph_summary(g),
            "k": cfg.k,
            "mode": cfg.mode,
            "iterations": trace.iterations,
            "class_counts": trace.class_counts,
            "classes": l.class_count(),
            "class_sizes": sorted_sizes(l),
            "discrete": l.is_discrete(),
        });
        if cfg.emit_partition {
            data["partition"] = value(l);
        }
        let text = format!(
            "n = {}, k = {}, mode = {:?}\nrounds that refined: {}\nclass counts: {:?}\nfinal classes: {}\n",
            g.n(),
            cfg.k,
            cfg.mode,
            trace.iterations,
            trace.class_counts,
            l.class_count()
        );
        Ok((data, text))
    })
}

fn certify_target(g: &Graph, cfg: &RunConfig) -> Result<KPartition> {
    match cfg.partition {
        PartitionChoice::Raw => initial_partition(g, cfg.k),
        PartitionChoice::Stabilized => Ok(stabilize_graph(g, cfg.k, cfg.mode)?.final_partition),
        PartitionChoice::Assembled => {
            if cfg.k < 3 {
                return Err(Error::Usage("--partition assembled needs k >= 3".into()));
            }
            assemble(&stabilize_graph(g, cfg.k - 1, cfg.mode)?.final_partition)
        }
    }
}

fn verdict_line(name: &str, v: &crate::cert::Verdict) -> String {
    match &v.witness {
        None => format!("{name}: {}\n", yes(v.holds)),
        Some(w) => format!("{name}: {} (witness: {})\n", yes(v.holds), serde_json::to_string(w).unwrap()),
    }
}

fn certify_text(r: &SymmetryReport, imp: &Implications) -> String {
    let mut t = format!("n = {}, k = {}, classes = {}\n", r.n, r.k, r.classes);
    t += &verdict_line("s-symmetric", &r.s);
    t += &verdict_line("p-symmetric", &r.p);
    t += &verdict_line("mp-symmetric", &r.mp);
    if let Some(pq) = &r.pq_stable {
        t += &verdict_line("pq-stable", pq);
    }
    for l in &r.l_full {
        t += &format!("{}-full: {}\n", l.l, yes(l.holds));
    }
    t += &format!("regular: {}\n", yes(r.regular));
    if let Some(sr) = r.strongly_regular {
        t += &format!("strongly regular: {}\n", yes(sr));
    }
    t += &format!("implications hold: {}\n", yes(imp.all_hold()));
    t
}

pub fn cmd_certify(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "certify", |g| {
        let l = certify_target(g, cfg)?;
        let report = certify(&l, cfg.mode)?;
        let imp = check_implications(&l, cfg.mode)?;
        let text = certify_text(&report, &imp);
        let data = json!({
            "graph": graph_summary(g),
            "partition": cfg.partition,
            "report": value(&report),
            "implications": value(&imp),
        });
        Ok((data, text))
    })
}

pub fn cmd_orbits(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "orbits", |g| {
        let group = graph_automorphisms(g, cfg.oracle())?;
        let orbits = orbit_partition(&group, g.n(), cfg.k)?;
        let stable = stabilize_graph(g, cfg.k, cfg.mode)?.final_partition;
        let automorphic = orbits == stable;
        let data = json!({
            "graph": graph_summary(g),
            "k": cfg.k,
            "order": group.order.to_string(),
            "generators": value(&group.generators),
            "orbits": orbits.class_count(),
            "orbit_sizes": sorted_sizes(&orbits),
            "stabilized_classes": stable.class_count(),
            "stabilized_is_automorphic": automorphic,
        });
        let text = format!(
            "|Aut| = {}\n{}-orbits: {}\nstabilized classes: {}\nstabilized partition automorphic: {}\n",
            group.order,
            cfg.k,
            orbits.class_count(),
            stable.class_count(),
            yes(automorphic)
        );
        Ok((data, text))
    })
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Output> {
    cfg.validate()?;
    let g = cfg.graphs(0)?.swap_remove(0);
    let h = cfg.graphs(1)?.swap_remove(0);
    let c = compare_graphs(&g, &h, cfg.k, cfg.mode)?;
    let text = match c.verdict {
        Verdict::Distinguished => format!(
            "Distinguished at k = {} (round {})\n",
            c.k,
            c.distinguished_at.unwrap_or(0)
        ),
        Verdict::Equivalent => format!(
            "Equivalent at k = {}: not distinguished by refinement; this is not an isomorphism proof\n",
            c.k
        ),
    };
    Ok(Output {
        command: "compare",
        data: json!({ "first": graph_summary(&g), "second": graph_summary(&h), "comparison": value(&c) }),
        text,
    })
}

pub fn cmd_srg(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "srg", |g| {
        let r = srg_parameters(g)?;
        let table = intersection_numbers(&initial_partition(g, 2)?)?;
        if let (Some(path), IntersectionNumbers::Table(t)) = (&cfg.csv, &table) {
            std::fs::write(path, t.to_csv())?;
        }
        let show = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        let text = format!(
            "n = {}, m = {}, lambda = {}, mu = {}\nstrongly regular: {}\nconvolution identity: {}\n",
            r.n,
            r.m,
            show(r.lambda),
            show(r.mu),
            yes(r.strongly_regular),
            yes(r.convolution_identity)
        );
        Ok((json!({ "srg": value(&r), "intersection_numbers": value(&table) }), text))
    })
}

pub fn cmd_probe7(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "probe7", |g| {
        let r = rigidity_probe(g, cfg.mode, cfg.oracle())?;
        let aut = match r.aut.order {
            Some(o) => o.to_string(),
            None => "not computed".into(),
        };
        let flag = match r.flag {
            Some(f) => yes(f).to_string(),
            None => "not computed".into(),
        };
        let text = format!(
            "n = {}, strongly regular graph: {}\nstable 3-partition: {} classes after {} rounds\n\
             strongly regular partition: {}\n|Aut| = {}\n\
             system: {} unknowns, {} equations, rank {}, solution space {}\nflag: {}\n",
            r.n,
            yes(r.srg.as_ref().is_some_and(|s| s.strongly_regular)),
            r.trace.final_partition.class_count(),
            r.trace.iterations,
            r.certificate.strongly_regular.map_or("-", yes),
            aut,
            r.sx.variables,
            r.sx.equations,
            r.sx.rank,
            r.sx.solution_space_dim,
            flag
        );
        let mut data = value(&r);
        // u128 orders travel as strings
        data["aut"]["order"] = r.aut.order.map_or(Value::Null, |o| Value::String(o.to_string()));
        Ok((data, text))
    })
}

pub fn cmd_sx(cfg: &RunConfig) -> Result<Output> {
    per_graph(cfg, "sx", |g| {
        let l = stabilize_graph(g, 3, cfg.mode)?.final_partition;
        let group;
        let source = if cfg.pairs_reduced {
            group = graph_automorphisms(g, cfg.oracle())?;
            PairSource::OrbitReduced(&group)
        } else {
            PairSource::All
        };
        let r = analyze(&build_sx_system(&l, source, cfg.component)?);
        let text = format!(
            "unknowns: {}\nequations: {} ({} trivial, {} same-class pairs)\nrank: {}\nsolution space: {}\n\
             constants solve: {}\nseparating solution: {}\nclass-valued solution: {}\n",
            r.variables,
            r.equations,
            r.trivial_equations,
            r.pair_equations,
            r.rank,
            r.solution_space_dim,
            yes(r.constants_solve),
            yes(r.separating_solution),
            yes(r.class_valued_solution)
        );
        Ok((value(&r), text))
    })
}

/// Runs a command by name and renders it in the configured format.
pub fn run(command: &str, cfg: &RunConfig) -> Result<String> {
    let start = Instant::now();
    let out = match command {
        "stabilize" => cmd_stabilize(cfg),
        "certify" => cmd_certify(cfg),
        "orbits" => cmd_orbits(cfg),
        "compare" => cmd_compare(cfg),
        "srg" => cmd_srg(cfg),
        "probe7" => cmd_probe7(cfg),
        "sx" => cmd_sx(cfg),
        other => Err(Error::Usage(format!("unknown command `{other}`"))),
    }?;
    Ok(out.render(cfg.format, start.elapsed().as_millis()))
}

//! The stable 3-partition of a graph next to its automorphism group.

use serde::{Deserialize, Serialize};

use super::scheme::{srg_parameters, SrgReport};
use super::sx::{analyze, build_sx_system, Component, PairSource, SxReport};
use crate::cert::{certify, SymmetryReport};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ops::Mode;
use crate::oracle::{graph_automorphisms, OracleConfig};
use crate::stabilize::{stabilize_graph, StabilizationTrace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutStatus {
    pub computed: bool,
    pub order: Option<u128>,
    pub generators: Option<usize>,
    /// Why the group was not computed.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub n: usize,
    pub edges: usize,
    /// `None` for directed or non-regular graphs.
    pub srg: Option<SrgReport>,
    pub trace: StabilizationTrace,
    pub certificate: SymmetryReport,
    pub discrete: bool,
    /// Automorphisms of the graph, which are exactly those of its stable
    /// 3-partition.
    pub aut: AutStatus,
    pub sx: SxReport,
    /// A strongly regular, non-discrete stable 3-partition whose group is
    /// trivial. `None` when the group was not computed.
    pub flag: Option<bool>,
}

pub fn rigidity_probe(g: &Graph, mode: Mode, oracle: OracleConfig) -> Result<ProbeReport> {
    let srg = match srg_parameters(g) {
        Ok(r) => Some(r),
        Err(Error::NonRegular | Error::Directed) => None,
        Err(e) => return Err(e),
    };
    let trace = stabilize_graph(g, 3, mode)?;
    let l = &trace.final_partition;
    let certificate = certify(l, mode)?;
    let aut = match graph_automorphisms(g, oracle) {
        Ok(group) => AutStatus {
            computed: true,
            order: Some(group.order),
            generators: Some(group.generators.len()),
            reason: None,
        },
        Err(e @ Error::OracleLimit { .. }) => AutStatus {
            computed: false,
            order: None,
            generators: None,
            reason: Some(e.to_string()),
        },
        Err(e) => return Err(e),
    };
    let sx = analyze(&build_sx_system(l, PairSource::All, Component::X)?);
    let discrete = l.is_discrete();
    let flag = aut
        .order
        .map(|o| certificate.strongly_regular == Some(true) && !discrete && o == 1);
    Ok(ProbeReport {
        n: g.n(),
        edges: g.edge_count(),
        srg,
        discrete,
        flag,
        trace,
        certificate,
        aut,
        sx,
    })
}

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{may_reach, Justification, ProcessorResult};
use crate::adp::{Adp, AdpProblem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    /// Maximal cycles, each sorted, ordered by smallest member. Single nodes
    /// count only with a self-loop.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let ids: Vec<_> = (0..self.nodes).map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            g.add_edge(ids[a], ids[b], ());
        }
        let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .filter(|c| c.len() > 1 || self.edges.contains(&(c[0], c[0])))
            .collect();
        out.sort();
        out
    }
}

pub fn dependency_graph(p: &AdpProblem) -> DependencyGraph {
    let np_defined = p.np_defined_symbols();
    let idx = p.redex_index();
    let mut edges = BTreeSet::new();
    for (i, a) in p.adps().iter().enumerate() {
        let subs = a.annotated_subterms();
        for (k, b) in p.adps().iter().enumerate() {
            if subs.iter().any(|(_, _, t)| may_reach(t, &a.lhs, b, &np_defined, &idx)) {
                edges.insert((i, k));
            }
        }
    }
    DependencyGraph { nodes: p.len(), edges }
}

/// One child per SCC: the SCC's ADPs unchanged, all others flattened.
pub fn proc_dependency_graph(p: &AdpProblem) -> ProcessorResult {
    let g = dependency_graph(p);
    let sccs = g.sccs();
    let children = if sccs.is_empty() {
        vec![p.flatten()]
    } else {
        sccs.iter()
            .map(|scc| {
                let adps: Vec<Adp> = p
                    .adps()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| if scc.contains(&i) { a.clone() } else { a.flatten() })
                    .collect();
                AdpProblem::new(adps).with_classical(p.is_classical())
            })
            .collect()
    };
    ProcessorResult {
        children,
        justification: Justification::DependencyGraph { edges: g.edges.into_iter().collect(), sccs },
    }
}

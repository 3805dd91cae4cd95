//! Repeated partitioning of the component graph with growing capacity.

use super::{grow, CdagLevel, HeuristicParams, LevelGraph, Partition};
use crate::cdag::{Cdag, Csr, VertexId};
use crate::error::Result;

/// Components of one level seen as the nodes of the next.
#[derive(Debug, Clone)]
pub struct MacroGraph {
    pub(super) succ: Csr,
    pub(super) pred: Csr,
    /// CDAG vertices of each macro node, in addition order.
    pub(super) base: Csr,
}

impl MacroGraph {
    /// Contracts the components of `p` (a partition of `prev`) into nodes.
    /// Parallel arcs between two components collapse into one.
    pub fn from_level<G: LevelGraph>(prev: &G, p: &Partition) -> Self {
        let k = p.len();
        let mut arcs = Vec::new();
        for u in 0..prev.num_nodes() as u32 {
            let cu = p.assignment[u as usize];
            for &s in prev.successors(u) {
                let cs = p.assignment[s as usize];
                if cu != cs {
                    arcs.push((cu, cs));
                }
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let succ = Csr::from_pairs(k, &arcs);
        let pred = succ.transpose();

        let mut base_pairs = Vec::new();
        for (c, comp) in p.components.iter().enumerate() {
            for &m in &comp.members {
                base_pairs.extend(prev.base_nodes(m).iter().map(|&b| (c as u32, b)));
            }
        }
        let base = Csr::from_pairs(k, &base_pairs);
        Self { succ, pred, base }
    }

    pub fn num_arcs(&self) -> usize {
        self.succ.len()
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub partition: Partition,
    pub capacity: u64,
    /// CDAG vertices of each component.
    base: Csr,
}

impl Level {
    fn new<G: LevelGraph>(graph: &G, partition: Partition) -> Self {
        let mut pairs = Vec::new();
        for (c, comp) in partition.components.iter().enumerate() {
            for &m in &comp.members {
                pairs.extend(graph.base_nodes(m).iter().map(|&b| (c as u32, b)));
            }
        }
        Self {
            capacity: partition.capacity,
            base: Csr::from_pairs(partition.len(), &pairs),
            partition,
        }
    }

    /// CDAG vertices of component `k`, in addition order.
    pub fn base_members(&self, k: usize) -> &[VertexId] {
        self.base.row(k as u32)
    }

    /// CDAG vertex -> component index at this level.
    pub fn base_assignment(&self, num_vertices: usize) -> Vec<u32> {
        let mut a = vec![u32::MAX; num_vertices];
        for k in 0..self.base.rows() {
            for &v in self.base.row(k as u32) {
                a[v as usize] = k as u32;
            }
        }
        a
    }
}

/// Partitions from the finest level (over CDAG vertices) to the coarsest.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
}

impl Hierarchy {
    /// Wraps a partition of the CDAG itself.
    pub fn single(p: Partition) -> Self {
        let base = Csr::from_pairs(
            p.len(),
            &p.components
                .iter()
                .enumerate()
                .flat_map(|(c, comp)| comp.members.iter().map(move |&m| (c as u32, m)))
                .collect::<Vec<_>>(),
        );
        Self {
            levels: vec![Level {
                capacity: p.capacity,
                partition: p,
                base,
            }],
        }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &Level {
        &self.levels[0]
    }

    pub fn top(&self) -> &Level {
        self.levels
            .last()
            .expect("hierarchy has at least one level")
    }
}

/// Grows components at `params.capacity`, then repeatedly contracts them and
/// partitions the contracted graph with the capacity multiplied by
/// `params.factor`, until the capacity reaches the CDAG footprint.
pub fn multi_level_partitioning(cdag: &Cdag, params: &HeuristicParams) -> Result<Hierarchy> {
    params.validate()?;
    let footprint = cdag.footprint() as u64;
    let (prio, count_inputs) = (params.priority, params.count_inputs);

    let first = CdagLevel::new(cdag);
    let mut capacity = params.capacity;
    let p = grow(&first, cdag, capacity, prio, count_inputs);
    let mut graph = MacroGraph::from_level(&first, &p);
    let mut levels = vec![Level::new(&first, p)];

    while capacity < footprint {
        capacity = capacity.saturating_mul(params.factor);
        let p = grow(&graph, cdag, capacity, prio, count_inputs);
        let next = MacroGraph::from_level(&graph, &p);
        levels.push(Level::new(&graph, p));
        graph = next;
    }
    Ok(Hierarchy { levels })
}

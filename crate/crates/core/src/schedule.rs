//! Turning a partition hierarchy into a total order of trace records.

use std::collections::VecDeque;
use std::io::Write;

use crate::cdag::{Cdag, Csr};
use crate::error::{Error, Result};
use crate::partition::Hierarchy;

/// A reordering of the trace, as record ids in execution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub order: Vec<usize>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// One record id per line.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.order {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }
}

/// Executes the top-level components in creation order. Each component
/// expands into its sub-components in the order they were added to it, down
/// to the first level, where operations run in original record order. Input
/// vertices emit nothing.
pub fn linearize(cdag: &Cdag, h: &Hierarchy) -> Schedule {
    let mut order = Vec::with_capacity(cdag.num_ops());
    let top = h.num_levels() - 1;
    let mut scratch = Vec::new();
    for k in 0..h.top().partition.len() as u32 {
        expand(cdag, h, top, k, &mut scratch, &mut order);
    }
    debug_assert_eq!(order.len(), cdag.num_ops());
    Schedule { order }
}

fn expand(
    cdag: &Cdag,
    h: &Hierarchy,
    level: usize,
    comp: u32,
    scratch: &mut Vec<usize>,
    out: &mut Vec<usize>,
) {
    let members = &h.levels[level].partition.components[comp as usize].members;
    if level == 0 {
        scratch.clear();
        scratch.extend(members.iter().filter_map(|&v| cdag.record(v)));
        scratch.sort_unstable();
        out.extend_from_slice(scratch);
    } else {
        for &m in members {
            expand(cdag, h, level - 1, m, scratch, out);
        }
    }
}

/// Quotient graph of `assignment` over the CDAG, deduplicated.
pub fn component_graph(cdag: &Cdag, assignment: &[u32]) -> Csr {
    let k = assignment
        .iter()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut arcs = Vec::new();
    for u in 0..cdag.num_vertices() as u32 {
        let cu = assignment[u as usize];
        for &s in cdag.succs(u) {
            let cs = assignment[s as usize];
            if cu != cs {
                arcs.push((cu, cs));
            }
        }
    }
    arcs.sort_unstable();
    arcs.dedup();
    Csr::from_pairs(k, &arcs)
}

/// A topological order of the component graph, or an error if it is cyclic.
pub fn component_order(cdag: &Cdag, assignment: &[u32]) -> Result<Vec<u32>> {
    let g = component_graph(cdag, assignment);
    let k = g.rows();
    let mut indeg = vec![0u32; k];
    for c in 0..k as u32 {
        for &s in g.row(c) {
            indeg[s as usize] += 1;
        }
    }
    let mut queue: VecDeque<u32> = (0..k as u32).filter(|&c| indeg[c as usize] == 0).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(c) = queue.pop_front() {
        order.push(c);
        for &s in g.row(c) {
            indeg[s as usize] -= 1;
            if indeg[s as usize] == 0 {
                queue.push_back(s);
            }
        }
    }
    if order.len() != k {
        return Err(Error::CyclicComponents);
    }
    Ok(order)
}

/// Checks that `order` is a permutation of the records that runs every
/// producer before its consumers.
pub fn respects_dependencies(cdag: &Cdag, order: &[usize]) -> bool {
    let n = cdag.num_ops();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &r) in order.iter().enumerate() {
        if r >= n || pos[r] != usize::MAX {
            return false;
        }
        pos[r] = i;
    }
    cdag.ops().iter().all(|&v| {
        let pv = pos[cdag.record(v).expect("op vertex")];
        cdag.preds(v)
            .iter()
            .filter_map(|&p| cdag.record(p))
            .all(|rp| pos[rp] < pv)
    })
}

//! Convexity check for a partition: no path may leave a component and come
//! back into it.

use std::collections::VecDeque;

use super::{LevelGraph, Partition};

/// A path that leaves component `component` through `exit` and re-enters it
/// at `reentry`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexityViolation {
    pub component: u32,
    pub exit: u32,
    pub reentry: u32,
}

pub fn verify_convexity<G: LevelGraph>(g: &G, p: &Partition) -> bool {
    find_convexity_violation(g, &p.assignment).is_none()
}

/// Searches every component for an outside path back into it.
///
/// The search from a component is limited to nodes that come before its last
/// member in a topological order, since nothing after that can reach it.
pub fn find_convexity_violation<G: LevelGraph>(
    g: &G,
    assignment: &[u32],
) -> Option<ConvexityViolation> {
    let n = g.num_nodes();
    assert_eq!(assignment.len(), n, "assignment must cover every node");
    let rank = topo_rank(g);

    let k = assignment
        .iter()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (v, &c) in assignment.iter().enumerate() {
        members[c as usize].push(v as u32);
    }

    let mut seen = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for (c, ms) in members.iter().enumerate() {
        let c = c as u32;
        let Some(limit) = ms.iter().map(|&v| rank[v as usize]).max() else {
            continue;
        };
        queue.clear();
        for &m in ms {
            for &s in g.successors(m) {
                if assignment[s as usize] != c && seen[s as usize] != c {
                    seen[s as usize] = c;
                    queue.push_back((s, s));
                }
            }
        }
        while let Some((v, exit)) = queue.pop_front() {
            for &s in g.successors(v) {
                if assignment[s as usize] == c {
                    return Some(ConvexityViolation {
                        component: c,
                        exit,
                        reentry: s,
                    });
                }
                if rank[s as usize] < limit && seen[s as usize] != c {
                    seen[s as usize] = c;
                    queue.push_back((s, exit));
                }
            }
        }
    }
    None
}

/// Position of each node in a Kahn topological order.
fn topo_rank<G: LevelGraph>(g: &G) -> Vec<u32> {
    let n = g.num_nodes();
    let mut indeg: Vec<u32> = (0..n as u32)
        .map(|v| g.predecessors(v).len() as u32)
        .collect();
    let mut queue: VecDeque<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
    let mut rank = vec![u32::MAX; n];
    let mut next = 0;
    while let Some(v) = queue.pop_front() {
        rank[v as usize] = next;
        next += 1;
        for &s in g.successors(v) {
            indeg[s as usize] -= 1;
            if indeg[s as usize] == 0 {
                queue.push_back(s);
            }
        }
    }
    assert_eq!(next as usize, n, "graph has a cycle");
    rank
}

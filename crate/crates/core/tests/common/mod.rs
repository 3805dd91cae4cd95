//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use locpot::cdag::{Cdag, VertexId};
use locpot::trace::{Addr, Trace};

/// Quadratic reuse distance: scan back to the previous use of the same
/// address and count the distinct addresses in between.
pub fn brute_reuse_distances(seq: &[Addr]) -> Vec<Option<u64>> {
    (0..seq.len())
        .map(|i| {
            let prev = (0..i).rev().find(|&j| seq[j] == seq[i])?;
            let between: HashSet<Addr> = seq[prev + 1..i].iter().copied().collect();
            Some(between.len() as u64)
        })
        .collect()
}

/// Misses of a fully associative LRU cache of `cap` words, by simulation.
pub fn lru_misses(seq: &[Addr], cap: usize) -> u64 {
    let mut stack: Vec<Addr> = Vec::new();
    let mut misses = 0;
    for &a in seq {
        match stack.iter().position(|&x| x == a) {
            Some(p) => {
                stack.remove(p);
            }
            None => {
                misses += 1;
                if stack.len() == cap {
                    stack.remove(0);
                }
            }
        }
        stack.push(a);
    }
    misses
}

/// A value is named by the address it lives at and how many writes to that
/// address preceded it; program inputs have ordinal 0.
pub type ValueName = (Addr, u32);

/// Flow arcs between named values, read straight off the trace.
pub fn named_arcs_from_trace(t: &Trace) -> BTreeSet<(ValueName, ValueName)> {
    let mut version: HashMap<Addr, u32> = HashMap::new();
    let mut arcs = BTreeSet::new();
    for r in &t.records {
        let dst = (r.write, version.get(&r.write).copied().unwrap_or(0) + 1);
        for &a in &r.reads {
            let src = (a, version.get(&a).copied().unwrap_or(0));
            arcs.insert((src, dst));
        }
        version.insert(r.write, dst.1);
    }
    arcs
}

/// Names of every CDAG vertex under the same address/ordinal scheme.
pub fn vertex_names(g: &Cdag, t: &Trace) -> Vec<ValueName> {
    let mut ordinal = vec![0u32; t.len()];
    let mut count: HashMap<Addr, u32> = HashMap::new();
    for (i, r) in t.records.iter().enumerate() {
        let c = count.entry(r.write).or_insert(0);
        *c += 1;
        ordinal[i] = *c;
    }
    (0..g.num_vertices() as VertexId)
        .map(|v| match g.record(v) {
            Some(rec) => (g.addr(v), ordinal[rec]),
            None => (g.addr(v), 0),
        })
        .collect()
}

pub fn named_arcs_from_cdag(g: &Cdag, t: &Trace) -> BTreeSet<(ValueName, ValueName)> {
    let names = vertex_names(g, t);
    let mut arcs = BTreeSet::new();
    for u in 0..g.num_vertices() as VertexId {
        for &s in g.succs(u) {
            arcs.insert((names[u as usize], names[s as usize]));
        }
    }
    arcs
}

/// Liveset replay with plain sets. Processing state persists across
/// components; `clear` starts a new component.
#[derive(Clone)]
pub struct SimLive<'g> {
    g: &'g Cdag,
    pub live: HashSet<VertexId>,
    remaining: Vec<u32>,
}

impl<'g> SimLive<'g> {
    pub fn new(g: &'g Cdag) -> Self {
        Self {
            g,
            live: HashSet::new(),
            remaining: (0..g.num_vertices() as VertexId)
                .map(|v| g.succs(v).len() as u32)
                .collect(),
        }
    }

    pub fn clear(&mut self) {
        self.live.clear();
    }

    /// Fires `v` and returns the liveset size afterwards.
    pub fn fire(&mut self, v: VertexId) -> usize {
        if self.remaining[v as usize] > 0 {
            self.live.insert(v);
        }
        for &p in self.g.preds(v) {
            self.remaining[p as usize] -= 1;
            if self.remaining[p as usize] > 0 {
                self.live.insert(p);
            } else {
                self.live.remove(&p);
            }
        }
        self.live.len()
    }
}

//! Single-level component growth.

use std::collections::VecDeque;

use super::{
    CdagLevel, ConvexComponent, HeuristicParams, LevelGraph, LiveSet, Partition, Priority,
};
use crate::cdag::Cdag;
use crate::error::Result;

/// Mutable state of one growth pass over a [`LevelGraph`].
///
/// The ready list is a FIFO with lazy deletion: assigned nodes stay in the
/// deque and are skipped when they reach the front. The per-component
/// neighbor and successor queues work the same way.
pub struct Grower<'g, G: LevelGraph> {
    graph: &'g G,
    live: LiveSet<'g>,
    capacity: u64,
    priority: Priority,
    assigned: Vec<bool>,
    /// Unassigned predecessor count.
    pending: Vec<u32>,
    ready: VecDeque<u32>,
    ready_len: usize,
    nbr_q: VecDeque<u32>,
    succ_q: VecDeque<u32>,
    in_nbr: Vec<u32>,
    in_succ: Vec<u32>,
    epoch: u32,
    current: ConvexComponent,
    components: Vec<ConvexComponent>,
    assignment: Vec<u32>,
}

impl<'g, G: LevelGraph> Grower<'g, G> {
    pub fn new(
        graph: &'g G,
        cdag: &'g Cdag,
        capacity: u64,
        priority: Priority,
        count_inputs: bool,
    ) -> Self {
        let n = graph.num_nodes();
        let pending: Vec<u32> = (0..n as u32)
            .map(|v| graph.predecessors(v).len() as u32)
            .collect();
        let ready: VecDeque<u32> = (0..n as u32)
            .filter(|&v| pending[v as usize] == 0)
            .collect();
        Self {
            graph,
            live: LiveSet::new(cdag, count_inputs),
            capacity,
            priority,
            assigned: vec![false; n],
            pending,
            ready_len: ready.len(),
            ready,
            nbr_q: VecDeque::new(),
            succ_q: VecDeque::new(),
            in_nbr: vec![0; n],
            in_succ: vec![0; n],
            epoch: 0,
            current: empty_component(),
            components: Vec::new(),
            assignment: vec![u32::MAX; n],
        }
    }

    /// Ready and not yet assigned.
    #[inline]
    pub fn is_ready(&self, v: u32) -> bool {
        !self.assigned[v as usize] && self.pending[v as usize] == 0
    }

    pub fn ready_len(&self) -> usize {
        self.ready_len
    }

    /// The ready list in FIFO order.
    pub fn ready_nodes(&self) -> Vec<u32> {
        self.ready
            .iter()
            .copied()
            .filter(|&v| !self.assigned[v as usize])
            .collect()
    }

    pub fn liveset(&self) -> &LiveSet<'g> {
        &self.live
    }

    pub fn current(&self) -> &ConvexComponent {
        &self.current
    }

    /// Oldest ready node, left in the list until it is assigned.
    pub fn select_ready_node(&mut self) -> Option<u32> {
        while let Some(&v) = self.ready.front() {
            if self.assigned[v as usize] {
                self.ready.pop_front();
            } else {
                return Some(v);
            }
        }
        None
    }

    pub fn open_component(&mut self) {
        self.epoch += 1;
        self.live.reset();
        self.nbr_q.clear();
        self.succ_q.clear();
        self.current = empty_component();
    }

    /// Tries to fire the base nodes of `n` into the open component's
    /// liveset. On failure the liveset is unchanged.
    pub fn update_live_set(&mut self, n: u32) -> bool {
        match self.live.try_add(self.graph.base_nodes(n), self.capacity) {
            Some(peak) => {
                self.current.peak_live = self.current.peak_live.max(peak);
                true
            }
            None => false,
        }
    }

    /// Adds `n` to the open component even though it overflows the liveset.
    pub fn force_first(&mut self, n: u32) {
        debug_assert!(self.current.members.is_empty());
        let peak = self.live.force_add(self.graph.base_nodes(n));
        self.current.peak_live = peak;
        self.current.forced_first = true;
        self.add_to_component(n);
    }

    /// Assigns `n` to the open component and releases its successors.
    pub fn add_to_component(&mut self, n: u32) {
        debug_assert!(self.is_ready(n));
        self.assigned[n as usize] = true;
        self.ready_len -= 1;
        self.assignment[n as usize] = self.components.len() as u32;
        self.current.members.push(n);
        self.update_ready(n);
    }

    fn update_ready(&mut self, n: u32) {
        for &s in self.graph.successors(n) {
            let p = &mut self.pending[s as usize];
            *p -= 1;
            if *p == 0 {
                self.ready.push_back(s);
                self.ready_len += 1;
            }
        }
    }

    /// Queues the ready neighbors and ready successors of `n` (just added)
    /// and picks the next candidate according to the priority ratio.
    pub fn select_best_node(&mut self, n: u32) -> Option<u32> {
        let g = self.graph;
        let epoch = self.epoch;
        for &w in g.successors(n) {
            for &u in g.predecessors(w) {
                if u != n && self.is_ready(u) && self.in_nbr[u as usize] != epoch {
                    self.in_nbr[u as usize] = epoch;
                    self.nbr_q.push_back(u);
                }
            }
        }
        for &s in g.successors(n) {
            if self.is_ready(s) && self.in_succ[s as usize] != epoch {
                self.in_succ[s as usize] = epoch;
                self.succ_q.push_back(s);
            }
        }
        purge_front(&mut self.nbr_q, &self.assigned);
        purge_front(&mut self.succ_q, &self.assigned);

        let c = &mut self.current;
        if self
            .priority
            .prefers_neighbor(c.taken_neighbors, c.taken_successors)
        {
            if let Some(v) = self.nbr_q.pop_front() {
                c.taken_neighbors += 1;
                return Some(v);
            }
        }
        if let Some(v) = self.succ_q.pop_front() {
            c.taken_successors += 1;
            return Some(v);
        }
        self.select_ready_node()
    }

    pub fn close_component(&mut self) {
        let c = std::mem::replace(&mut self.current, empty_component());
        if !c.members.is_empty() {
            self.components.push(c);
        }
    }

    /// Grows components until every node is assigned.
    pub fn run(mut self) -> Partition {
        while let Some(first) = self.select_ready_node() {
            self.open_component();
            if !self.update_live_set(first) {
                self.force_first(first);
                self.close_component();
                continue;
            }
            let mut n = first;
            loop {
                self.add_to_component(n);
                if self.ready_len == 0 {
                    break;
                }
                n = self
                    .select_best_node(n)
                    .expect("non-empty ready list yields a node");
                if !self.update_live_set(n) {
                    break;
                }
            }
            self.close_component();
        }
        self.finish()
    }

    pub fn finish(mut self) -> Partition {
        self.close_component();
        debug_assert!(self.assigned.iter().all(|&a| a), "unassigned nodes remain");
        Partition {
            components: self.components,
            assignment: self.assignment,
            capacity: self.capacity,
        }
    }
}

fn empty_component() -> ConvexComponent {
    ConvexComponent {
        members: Vec::new(),
        peak_live: 0,
        forced_first: false,
        taken_neighbors: 0,
        taken_successors: 0,
    }
}

fn purge_front(q: &mut VecDeque<u32>, assigned: &[bool]) {
    while q.front().is_some_and(|&v| assigned[v as usize]) {
        q.pop_front();
    }
}

/// One growth pass over `graph` at the given capacity.
pub fn grow<G: LevelGraph>(
    graph: &G,
    cdag: &Cdag,
    capacity: u64,
    priority: Priority,
    count_inputs: bool,
) -> Partition {
    Grower::new(graph, cdag, capacity, priority, count_inputs).run()
}

/// Single-level convex partitioning of `cdag`.
pub fn generate_convex_components(cdag: &Cdag, params: &HeuristicParams) -> Result<Partition> {
    params.validate()?;
    let level = CdagLevel::new(cdag);
    Ok(grow(
        &level,
        cdag,
        params.capacity,
        params.priority,
        params.count_inputs,
    ))
}

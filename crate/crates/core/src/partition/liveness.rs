//! Liveset bookkeeping for a component under construction.
//!
//! A vertex is born when it fires and still has unprocessed successors, a
//! predecessor of a fired vertex is resurrected while it has other
//! unprocessed successors, and a vertex dies once its last successor fires.
//! Processing state is global across components; the liveset itself is
//! per component.

use crate::cdag::{Cdag, VertexId};

#[derive(Debug, Clone, Copy)]
enum Undo {
    Fired(VertexId),
    Mark(VertexId, u32),
}

pub struct LiveSet<'g> {
    cdag: &'g Cdag,
    /// Unprocessed successor count per CDAG vertex.
    remaining: Vec<u32>,
    /// `mark[v] == epoch` iff `v` is in the current liveset.
    mark: Vec<u32>,
    epoch: u32,
    len: usize,
    count_inputs: bool,
    undo: Vec<Undo>,
}

impl<'g> LiveSet<'g> {
    pub fn new(cdag: &'g Cdag, count_inputs: bool) -> Self {
        let n = cdag.num_vertices();
        Self {
            cdag,
            remaining: (0..n as VertexId)
                .map(|v| cdag.succ_count(v) as u32)
                .collect(),
            mark: vec![0; n],
            epoch: 1,
            len: 0,
            count_inputs,
            undo: Vec::new(),
        }
    }

    /// Empties the liveset for a new component.
    pub fn reset(&mut self) {
        self.epoch += 1;
        self.len = 0;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mark[v as usize] == self.epoch
    }

    /// Current members in id order. Linear in the CDAG size.
    pub fn members(&self) -> Vec<VertexId> {
        (0..self.mark.len() as VertexId)
            .filter(|&v| self.contains(v))
            .collect()
    }

    pub fn unprocessed_successors(&self, v: VertexId) -> u32 {
        self.remaining[v as usize]
    }

    fn insert(&mut self, v: VertexId) {
        if !self.count_inputs && self.cdag.is_input(v) {
            return;
        }
        let m = &mut self.mark[v as usize];
        if *m != self.epoch {
            self.undo.push(Undo::Mark(v, *m));
            *m = self.epoch;
            self.len += 1;
        }
    }

    fn remove(&mut self, v: VertexId) {
        let m = &mut self.mark[v as usize];
        if *m == self.epoch {
            self.undo.push(Undo::Mark(v, *m));
            *m = 0;
            self.len -= 1;
        }
    }

    /// Fires `v`: marks it processed and applies birth, resurrection and
    /// death. Returns the liveset size afterwards.
    fn fire(&mut self, v: VertexId) -> usize {
        let cdag = self.cdag;
        if self.remaining[v as usize] > 0 {
            self.insert(v);
        }
        for &p in cdag.preds(v) {
            let r = &mut self.remaining[p as usize];
            *r -= 1;
            let left = *r;
            self.undo.push(Undo::Fired(p));
            if left > 0 {
                self.insert(p);
            } else {
                self.remove(p);
            }
        }
        self.len
    }

    fn rollback(&mut self, len_before: usize) {
        while let Some(u) = self.undo.pop() {
            match u {
                Undo::Fired(p) => self.remaining[p as usize] += 1,
                Undo::Mark(v, old) => self.mark[v as usize] = old,
            }
        }
        self.len = len_before;
    }

    /// Fires `bases` in order. If the liveset exceeds `capacity` after any
    /// of them, everything is rolled back and `None` is returned; otherwise
    /// the peak size reached is returned.
    pub fn try_add(&mut self, bases: &[VertexId], capacity: u64) -> Option<usize> {
        self.undo.clear();
        let before = self.len;
        let mut peak = before;
        for &v in bases {
            let size = self.fire(v);
            if size as u64 > capacity {
                self.rollback(before);
                return None;
            }
            peak = peak.max(size);
        }
        self.undo.clear();
        Some(peak)
    }

    /// Fires `bases` without a capacity check. Returns the peak size.
    pub fn force_add(&mut self, bases: &[VertexId]) -> usize {
        let mut peak = self.len;
        for &v in bases {
            peak = peak.max(self.fire(v));
        }
        self.undo.clear();
        peak
    }
}

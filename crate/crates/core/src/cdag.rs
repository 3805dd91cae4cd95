//! Computational DAG built from a trace by last-writer value flow.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use crate::error::{Error, Result};
use crate::trace::{Addr, Trace};

/// Dense vertex handle, valid for the [`Cdag`] that produced it.
pub type VertexId = u32;

const NO_RECORD: u32 = u32::MAX;

/// Compressed adjacency rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    /// Builds rows from `(row, target)` pairs; target order inside a row
    /// follows the input order.
    pub fn from_pairs(rows: usize, pairs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0u32; rows + 1];
        for &(r, _) in pairs {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; pairs.len()];
        for &(r, t) in pairs {
            let slot = &mut fill[r as usize];
            targets[*slot as usize] = t;
            *slot += 1;
        }
        Self { offsets, targets }
    }

    #[inline]
    pub fn row(&self, r: u32) -> &[u32] {
        let r = r as usize;
        &self.targets[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    pub fn rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Transposed adjacency. Rows of the result list sources in increasing
    /// order.
    pub fn transpose(&self) -> Self {
        let mut pairs = Vec::with_capacity(self.len());
        for r in 0..self.rows() as u32 {
            for &t in self.row(r) {
                pairs.push((t, r));
            }
        }
        Self::from_pairs(self.rows(), &pairs)
    }
}

#[derive(Debug, Clone)]
pub struct Cdag {
    preds: Csr,
    succs: Csr,
    /// Record id for operation vertices, `NO_RECORD` for inputs.
    record: Vec<u32>,
    addr: Vec<Addr>,
    inputs: Vec<VertexId>,
    op_of_record: Vec<VertexId>,
    outputs: Vec<VertexId>,
    footprint: usize,
}

/// Builds the CDAG of `trace`.
///
/// Every record becomes one operation vertex with an arc from the current
/// last writer of each distinct address it reads; the first read of a
/// never-written address creates an input vertex. Vertex ids follow trace
/// order, so every arc goes from a smaller to a larger id.
pub fn build_cdag(trace: &Trace) -> Cdag {
    let mut last_writer: HashMap<Addr, VertexId> = HashMap::new();
    let mut record = Vec::new();
    let mut addr = Vec::new();
    let mut inputs = Vec::new();
    let mut op_of_record = Vec::with_capacity(trace.len());
    let mut arcs: Vec<(u32, u32)> = Vec::new();
    let mut seen: Vec<Addr> = Vec::new();

    for r in &trace.records {
        seen.clear();
        let mut preds: Vec<VertexId> = Vec::with_capacity(r.reads.len());
        for &a in &r.reads {
            if seen.contains(&a) {
                continue;
            }
            seen.push(a);
            let p = *last_writer.entry(a).or_insert_with(|| {
                let v = record.len() as VertexId;
                record.push(NO_RECORD);
                addr.push(a);
                inputs.push(v);
                v
            });
            preds.push(p);
        }
        let v = record.len() as VertexId;
        record.push(r.id as u32);
        addr.push(r.write);
        op_of_record.push(v);
        arcs.extend(preds.into_iter().map(|p| (v, p)));
        last_writer.insert(r.write, v);
    }

    let n = record.len();
    let preds = Csr::from_pairs(n, &arcs);
    let succs = preds.transpose();
    let mut outputs: Vec<VertexId> = trace
        .records
        .iter()
        .map(|r| last_writer[&r.write])
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    outputs.sort_unstable();
    let footprint = last_writer.len();

    Cdag {
        preds,
        succs,
        record,
        addr,
        inputs,
        op_of_record,
        outputs,
        footprint,
    }
}

impl Cdag {
    pub fn num_vertices(&self) -> usize {
        self.record.len()
    }

    pub fn num_ops(&self) -> usize {
        self.op_of_record.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.preds.len()
    }

    pub fn inputs(&self) -> &[VertexId] {
        &self.inputs
    }

    /// Final last writer of every written address.
    pub fn outputs(&self) -> &[VertexId] {
        &self.outputs
    }

    /// Operation vertices in original order.
    pub fn ops(&self) -> &[VertexId] {
        &self.op_of_record
    }

    #[inline]
    pub fn is_input(&self, v: VertexId) -> bool {
        self.record[v as usize] == NO_RECORD
    }

    /// Original trace position of an operation vertex.
    #[inline]
    pub fn record(&self, v: VertexId) -> Option<usize> {
        match self.record[v as usize] {
            NO_RECORD => None,
            r => Some(r as usize),
        }
    }

    pub fn op_vertex(&self, record: usize) -> VertexId {
        self.op_of_record[record]
    }

    /// Written address for operations, read address for inputs.
    pub fn addr(&self, v: VertexId) -> Addr {
        self.addr[v as usize]
    }

    #[inline]
    pub fn preds(&self, v: VertexId) -> &[VertexId] {
        self.preds.row(v)
    }

    #[inline]
    pub fn succs(&self, v: VertexId) -> &[VertexId] {
        self.succs.row(v)
    }

    pub fn pred_count(&self, v: VertexId) -> usize {
        self.preds(v).len()
    }

    pub fn succ_count(&self, v: VertexId) -> usize {
        self.succs(v).len()
    }

    pub fn pred_csr(&self) -> &Csr {
        &self.preds
    }

    pub fn succ_csr(&self) -> &Csr {
        &self.succs
    }

    /// Vertices with no predecessors, in id order.
    pub fn sources(&self) -> Vec<VertexId> {
        (0..self.num_vertices() as VertexId)
            .filter(|&v| self.preds(v).is_empty())
            .collect()
    }

    /// Distinct addresses among inputs and writes.
    pub fn footprint(&self) -> usize {
        self.footprint
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Vertices other than `v` sharing at least one successor with `v`,
    /// sorted by id.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check(v)?;
        let mut out: Vec<VertexId> = self
            .succs(v)
            .iter()
            .flat_map(|&w| self.preds(w).iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Debug dump: one `# v <id> <kind> addr=<a> [rec=<r>]` line per vertex,
    /// then one `u v` line per arc.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for v in 0..self.num_vertices() as VertexId {
            match self.record(v) {
                Some(r) => writeln!(w, "# v {v} op addr={} rec={r}", self.addr(v))?,
                None => writeln!(w, "# v {v} input addr={}", self.addr(v))?,
            }
        }
        for u in 0..self.num_vertices() as VertexId {
            for &s in self.succs(u) {
                writeln!(w, "{u} {s}")?;
            }
        }
        Ok(())
    }
}

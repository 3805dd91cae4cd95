//! Convex partitioning of a CDAG under a maxlive bound.
//!
//! Components are grown one at a time from the ready list: a vertex becomes
//! ready once all of its predecessors are assigned, and only ready vertices
//! are ever added, so every component is convex and the creation order of the
//! components is a topological order of the component graph.
//!
//! The multi-level variant treats the components of one level as the
//! macro-nodes of the next, multiplying the capacity by a constant factor
//! until it reaches the memory footprint of the CDAG.

mod convexity;
mod grow;
mod liveness;
mod multilevel;

use std::fmt;
use std::str::FromStr;

use crate::cdag::{Cdag, VertexId};
use crate::error::{Error, Result};

pub use convexity::{find_convexity_violation, verify_convexity, ConvexityViolation};
pub use grow::{generate_convex_components, grow, Grower};
pub use liveness::LiveSet;
pub use multilevel::{multi_level_partitioning, Hierarchy, Level, MacroGraph};

/// Ratio of selected ready-neighbors to selected ready-successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Priority {
    num: u32,
    den: u32,
}

impl Priority {
    pub const BREADTH: Priority = Priority { num: 2, den: 1 };
    pub const DEPTH: Priority = Priority { num: 1, den: 2 };
    pub const EQUAL: Priority = Priority { num: 1, den: 1 };

    pub fn ratio(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidPriority(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    /// `taken_neighbors < taken_successors * ratio`, exactly.
    #[inline]
    pub fn prefers_neighbor(self, taken_neighbors: u64, taken_successors: u64) -> bool {
        u128::from(taken_neighbors) * u128::from(self.den)
            < u128::from(taken_successors) * u128::from(self.num)
    }

    /// Short name for file names and tables.
    pub fn label(self) -> String {
        match self {
            Priority::BREADTH => "breadth".into(),
            Priority::DEPTH => "depth".into(),
            Priority::EQUAL => "equal".into(),
            Priority { num, den } => format!("{num}-{den}"),
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Default for Priority {
    fn default() -> Self {
        Priority::EQUAL
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Priority::BREADTH => f.write_str("breadth"),
            Priority::DEPTH => f.write_str("depth"),
            Priority::EQUAL => f.write_str("equal"),
            Priority { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl FromStr for Priority {
    type Err = Error;

    /// Accepts `breadth`, `depth`, `equal`, `a/b` or a positive decimal.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPriority(s.to_string());
        match s {
            "breadth" => return Ok(Priority::BREADTH),
            "depth" => return Ok(Priority::DEPTH),
            "equal" => return Ok(Priority::EQUAL),
            _ => {}
        }
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Priority::ratio(a, b).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let int: u32 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u32 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Priority::ratio(num, den).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicParams {
    /// Maxlive bound in words.
    pub capacity: u64,
    pub priority: Priority,
    pub multilevel: bool,
    /// Capacity multiplier between levels.
    pub factor: u64,
    /// Whether input vertices count toward the liveset.
    pub count_inputs: bool,
}

impl HeuristicParams {
    pub fn new(capacity: u64, priority: Priority) -> Self {
        Self {
            capacity,
            priority,
            multilevel: false,
            factor: 2,
            count_inputs: true,
        }
    }

    pub fn multilevel(mut self, on: bool) -> Self {
        self.multilevel = on;
        self
    }

    pub fn with_factor(mut self, factor: u64) -> Self {
        self.factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity < 1 {
            return Err(Error::InvalidParams("capacity must be at least 1".into()));
        }
        if self.factor < 2 {
            return Err(Error::InvalidParams(
                "level factor must be greater than 1".into(),
            ));
        }
        Ok(())
    }
}

/// One grown component, as seen at its own level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexComponent {
    /// Nodes of this level's graph, in the order they were added.
    pub members: Vec<u32>,
    /// Largest liveset observed after an accepted addition.
    pub peak_live: usize,
    /// The first node alone exceeded the capacity and was added anyway.
    pub forced_first: bool,
    pub taken_neighbors: u64,
    pub taken_successors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Components in creation order.
    pub components: Vec<ConvexComponent>,
    /// Node -> index into `components`.
    pub assignment: Vec<u32>,
    pub capacity: u64,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn forced_count(&self) -> usize {
        self.components.iter().filter(|c| c.forced_first).count()
    }

    /// Peak liveset over components that were not force-started.
    pub fn peak_live(&self) -> usize {
        self.components
            .iter()
            .filter(|c| !c.forced_first)
            .map(|c| c.peak_live)
            .max()
            .unwrap_or(0)
    }

    /// Debug dump: `component <k>: <ids...>` followed by a stats line.
    pub fn write_dump<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for (k, c) in self.components.iter().enumerate() {
            write!(w, "component {k}:")?;
            for m in &c.members {
                write!(w, " {m}")?;
            }
            writeln!(
                w,
                "\n  size={} peak_live={} forced_first={}",
                c.members.len(),
                c.peak_live,
                c.forced_first
            )?;
        }
        Ok(())
    }
}

/// The graph a growth pass runs on: either the CDAG itself or a macro-node
/// graph whose nodes stand for sets of CDAG vertices.
pub trait LevelGraph {
    fn num_nodes(&self) -> usize;
    fn successors(&self, v: u32) -> &[u32];
    fn predecessors(&self, v: u32) -> &[u32];
    /// CDAG vertices this node comprises, in their addition order.
    fn base_nodes(&self, v: u32) -> &[VertexId];
}

/// The CDAG viewed as the first level, where every node is its own base.
pub struct CdagLevel<'g> {
    cdag: &'g Cdag,
    ids: Vec<VertexId>,
}

impl<'g> CdagLevel<'g> {
    pub fn new(cdag: &'g Cdag) -> Self {
        Self {
            cdag,
            ids: (0..cdag.num_vertices() as VertexId).collect(),
        }
    }
}

impl LevelGraph for CdagLevel<'_> {
    fn num_nodes(&self) -> usize {
        self.ids.len()
    }

    fn successors(&self, v: u32) -> &[u32] {
        self.cdag.succs(v)
    }

    fn predecessors(&self, v: u32) -> &[u32] {
        self.cdag.preds(v)
    }

    fn base_nodes(&self, v: u32) -> &[VertexId] {
        std::slice::from_ref(&self.ids[v as usize])
    }
}

impl LevelGraph for MacroGraph {
    fn num_nodes(&self) -> usize {
        self.succ.rows()
    }

    fn successors(&self, v: u32) -> &[u32] {
        self.succ.row(v)
    }

    fn predecessors(&self, v: u32) -> &[u32] {
        self.pred.row(v)
    }

    fn base_nodes(&self, v: u32) -> &[VertexId] {
        self.base.row(v)
    }
}

/// Single-level or multi-level partitioning depending on `params.multilevel`.
pub fn partition(cdag: &Cdag, params: &HeuristicParams) -> Result<Hierarchy> {
    if params.multilevel {
        multi_level_partitioning(cdag, params)
    } else {
        let p = generate_convex_components(cdag, params)?;
        Ok(Hierarchy::single(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_parsing() {
        assert_eq!("breadth".parse::<Priority>().unwrap(), Priority::BREADTH);
        assert_eq!("depth".parse::<Priority>().unwrap(), Priority::DEPTH);
        assert_eq!("1".parse::<Priority>().unwrap(), Priority::EQUAL);
        assert_eq!("0.5".parse::<Priority>().unwrap(), Priority::DEPTH);
        assert_eq!("4/2".parse::<Priority>().unwrap(), Priority::BREADTH);
        assert_eq!("3/2".parse::<Priority>().unwrap().to_string(), "3/2");
        assert_eq!("3/2".parse::<Priority>().unwrap().label(), "3-2");
        for bad in ["", "0", "x", "1/0", "-1", "0.0000001"] {
            assert!(bad.parse::<Priority>().is_err(), "{bad}");
        }
    }

    #[test]
    fn priority_inequality() {
        let eq = Priority::EQUAL;
        assert!(!eq.prefers_neighbor(0, 0));
        assert!(eq.prefers_neighbor(0, 1));
        assert!(!eq.prefers_neighbor(1, 1));
        let depth = Priority::DEPTH;
        assert!(depth.prefers_neighbor(0, 1));
        assert!(!depth.prefers_neighbor(1, 2));
        assert!(depth.prefers_neighbor(1, 3));
    }

    #[test]
    fn params_validation() {
        assert!(HeuristicParams::new(0, Priority::EQUAL).validate().is_err());
        assert!(HeuristicParams::new(4, Priority::EQUAL)
            .with_factor(1)
            .validate()
            .is_err());
        assert!(HeuristicParams::new(4, Priority::EQUAL).validate().is_ok());
    }
}

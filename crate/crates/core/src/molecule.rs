//! The molecule data model: typed nodes with ordered, directed ports, edges
//! running out-port to in-port, free ends and free-standing loops.
//!
//! Molecules are value-semantic: every operation that changes a molecule
//! returns a new one and leaves its input untouched. Node and edge ids are
//! allocated from per-molecule counters, so identical build sequences produce
//! identical ids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Identifier of a node within one molecule.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

/// Identifier of an edge within one molecule.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Direction of a port: edges always run from an `Out` port to an `In` port.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Polarity {
    In,
    Out,
}

/// Node species.
///
/// Port conventions (port index, name, polarity) are fixed per kind and are
/// the single place in the crate where the orientation of each node is
/// recorded:
///
/// * `Lambda`  — 0 `body` In, 1 `var` Out, 2 `root` Out
/// * `Apply`   — 0 `fun` In, 1 `arg` In, 2 `out` Out
/// * `FanOut`  — 0 `in` In, 1 `out1` Out, 2 `out2` Out
/// * `FanIn`   — 0 `in1` In, 1 `in2` In, 2 `out` Out
/// * `Term`    — 0 `in` In
/// * `Arrow`   — 0 `in` In, 1 `out` Out
/// * `Opaque`  — declared polarity per port, arity >= 1; no move matches
///   inside an opaque node
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NodeKind {
    Lambda,
    Apply,
    FanOut,
    FanIn,
    Term,
    Arrow,
    Opaque(Vec<Polarity>),
}

/// Port indices for the fixed-signature kinds.
pub mod ports {
    pub const LAM_BODY: u8 = 0;
    pub const LAM_VAR: u8 = 1;
    pub const LAM_ROOT: u8 = 2;

    pub const APP_FUN: u8 = 0;
    pub const APP_ARG: u8 = 1;
    pub const APP_OUT: u8 = 2;

    pub const FO_IN: u8 = 0;
    pub const FO_OUT1: u8 = 1;
    pub const FO_OUT2: u8 = 2;

    pub const FI_IN1: u8 = 0;
    pub const FI_IN2: u8 = 1;
    pub const FI_OUT: u8 = 2;

    pub const T_IN: u8 = 0;

    pub const ARROW_IN: u8 = 0;
    pub const ARROW_OUT: u8 = 1;
}

impl NodeKind {
    pub fn arity(&self) -> usize {
        match self {
            NodeKind::Lambda | NodeKind::Apply | NodeKind::FanOut | NodeKind::FanIn => 3,
            NodeKind::Term => 1,
            NodeKind::Arrow => 2,
            NodeKind::Opaque(sig) => sig.len(),
        }
    }

    pub fn polarity(&self, port: u8) -> Polarity {
        use Polarity::*;
        match self {
            NodeKind::Lambda => [In, Out, Out][port as usize],
            NodeKind::Apply => [In, In, Out][port as usize],
            NodeKind::FanOut => [In, Out, Out][port as usize],
            NodeKind::FanIn => [In, In, Out][port as usize],
            NodeKind::Term => [In][port as usize],
            NodeKind::Arrow => [In, Out][port as usize],
            NodeKind::Opaque(sig) => sig[port as usize],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Lambda => "L",
            NodeKind::Apply => "A",
            NodeKind::FanOut => "FO",
            NodeKind::FanIn => "FI",
            NodeKind::Term => "T",
            NodeKind::Arrow => "ARROW",
            NodeKind::Opaque(_) => "OPAQUE",
        }
    }

    /// Small integer tag used by canonicalization and DOT export.
    pub(crate) fn tag(&self) -> u8 {
        match self {
            NodeKind::Lambda => 1,
            NodeKind::Apply => 2,
            NodeKind::FanOut => 3,
            NodeKind::FanIn => 4,
            NodeKind::Term => 5,
            NodeKind::Arrow => 6,
            NodeKind::Opaque(_) => 7,
        }
    }
}

/// One end of an edge: either a node port or a free end.
///
/// Free ends may carry a label. Labels are data (they name free variables and
/// the term root) and are ignored by isomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Endpoint {
    Free(Option<String>),
    Port(NodeId, u8),
}

impl Endpoint {
    pub fn free() -> Self {
        Endpoint::Free(None)
    }

    pub fn labeled(label: impl Into<String>) -> Self {
        Endpoint::Free(Some(label.into()))
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Endpoint::Free(_))
    }

    pub fn port(&self) -> Option<(NodeId, u8)> {
        match self {
            Endpoint::Port(n, p) => Some((*n, *p)),
            Endpoint::Free(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    /// `ports[i]` is the edge attached at port `i`. Every port is attached
    /// to exactly one edge end.
    pub ports: Vec<EdgeId>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub source: Endpoint,
    pub target: Endpoint,
}

/// A single violation found by [`Molecule::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    DanglingPort { node: NodeId, port: u8 },
    PortEdgeMismatch { node: NodeId, port: u8, edge: EdgeId },
    EdgeEndpointMissing { edge: EdgeId },
    PolarityViolation { edge: EdgeId },
    PortArityMismatch { node: NodeId },
    PortSharedByEdges { node: NodeId, port: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingPort { node, port } => {
                write!(f, "dangling port {node}:{port}")
            }
            Violation::PortEdgeMismatch { node, port, edge } => {
                write!(f, "port {node}:{port} names {edge} but the edge does not end there")
            }
            Violation::EdgeEndpointMissing { edge } => {
                write!(f, "edge {edge} references a missing node or port")
            }
            Violation::PolarityViolation { edge } => {
                write!(f, "edge {edge} does not run out-port to in-port")
            }
            Violation::PortArityMismatch { node } => {
                write!(f, "node {node} has the wrong number of ports for its kind")
            }
            Violation::PortSharedByEdges { node, port } => {
                write!(f, "port {node}:{port} is attached to more than one edge end")
            }
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConnectError {
    #[error("edge {0} does not exist")]
    NoSuchEdge(EdgeId),
    #[error("edge {0} has no free target end (expected a dangling out-flowing edge)")]
    NotFreeOut(EdgeId),
    #[error("edge {0} has no free source end (expected a dangling in-flowing edge)")]
    NotFreeIn(EdgeId),
}

/// A trivalent port-graph: nodes, directed edges and free-standing loops.
#[derive(Clone, Debug, Default)]
pub struct Molecule {
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    loops: u32,
    next_node: u32,
    next_edge: u32,
}

impl Molecule {
    pub fn new() -> Self {
        Molecule::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> u32 {
        self.loops
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty() && self.loops == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(id, n)| (*id, n))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    /// Edge attached at a given port.
    pub fn port_edge(&self, node: NodeId, port: u8) -> Option<EdgeId> {
        self.nodes.get(&node).and_then(|n| n.ports.get(port as usize)).copied()
    }

    /// Kind of a node, panicking if absent (internal convenience).
    pub(crate) fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[&id].kind
    }

    // ------------------------------------------------------------------
    // Construction primitives. `add_node` keeps the molecule valid by
    // giving every port of the new node a fresh dangling edge.
    // ------------------------------------------------------------------

    /// Add a node whose every port hangs on a fresh free edge. Returns the
    /// node id and the edges in port order.
    pub fn add_node(&mut self, kind: NodeKind) -> (NodeId, Vec<EdgeId>) {
        let id = self.fresh_node_id();
        let arity = kind.arity();
        let mut port_edges = Vec::with_capacity(arity);
        for port in 0..arity {
            let eid = self.fresh_edge_id();
            let (source, target) = match kind.polarity(port as u8) {
                Polarity::Out => (Endpoint::Port(id, port as u8), Endpoint::free()),
                Polarity::In => (Endpoint::free(), Endpoint::Port(id, port as u8)),
            };
            self.edges.insert(eid, Edge { source, target });
            port_edges.push(eid);
        }
        self.nodes.insert(id, Node { kind, ports: port_edges.clone() });
        (id, port_edges)
    }

    /// Add `k` free-standing loops.
    pub fn add_loops(&mut self, k: u32) {
        self.loops += k;
    }

    /// Add an isolated wire (an edge with both ends free).
    pub fn add_wire(
        &mut self,
        source_label: Option<String>,
        target_label: Option<String>,
    ) -> EdgeId {
        let eid = self.fresh_edge_id();
        self.edges.insert(
            eid,
            Edge { source: Endpoint::Free(source_label), target: Endpoint::Free(target_label) },
        );
        eid
    }

    /// Join a dangling out-flowing edge (free target) to a dangling
    /// in-flowing edge (free source). Joining the two ends of the same
    /// isolated wire closes it into a loop.
    pub fn connect(&self, from: EdgeId, to: EdgeId) -> Result<Molecule, ConnectError> {
        let f = self.edges.get(&from).ok_or(ConnectError::NoSuchEdge(from))?;
        if !f.target.is_free() {
            return Err(ConnectError::NotFreeOut(from));
        }
        let t = self.edges.get(&to).ok_or(ConnectError::NoSuchEdge(to))?;
        if !t.source.is_free() {
            return Err(ConnectError::NotFreeIn(to));
        }
        let mut m = self.clone();
        if from == to {
            m.edges.remove(&from);
            m.loops += 1;
            return Ok(m);
        }
        let new_target = m.edges[&to].target.clone();
        m.edges.remove(&to);
        if let Endpoint::Port(n, p) = new_target {
            m.nodes.get_mut(&n).unwrap().ports[p as usize] = from;
        }
        m.edges.get_mut(&from).unwrap().target = new_target;
        Ok(m)
    }

    /// Concatenate two molecules, renaming the ids of `other` so they do not
    /// collide. Also returns the node and edge id maps for `other`.
    pub fn disjoint_union_with_maps(
        &self,
        other: &Molecule,
    ) -> (Molecule, BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>) {
        let mut m = self.clone();
        let mut node_map = BTreeMap::new();
        let mut edge_map = BTreeMap::new();
        for (&id, _) in other.nodes.iter() {
            let fresh = m.fresh_node_id();
            node_map.insert(id, fresh);
        }
        for (&id, _) in other.edges.iter() {
            let fresh = m.fresh_edge_id();
            edge_map.insert(id, fresh);
        }
        let remap_ep = |ep: &Endpoint| match ep {
            Endpoint::Free(l) => Endpoint::Free(l.clone()),
            Endpoint::Port(n, p) => Endpoint::Port(node_map[n], *p),
        };
        for (&id, node) in other.nodes.iter() {
            let ports = node.ports.iter().map(|e| edge_map[e]).collect();
            m.nodes.insert(node_map[&id], Node { kind: node.kind.clone(), ports });
        }
        for (&id, edge) in other.edges.iter() {
            m.edges.insert(
                edge_map[&id],
                Edge { source: remap_ep(&edge.source), target: remap_ep(&edge.target) },
            );
        }
        m.loops += other.loops;
        (m, node_map, edge_map)
    }

    pub fn disjoint_union(&self, other: &Molecule) -> Molecule {
        self.disjoint_union_with_maps(other).0
    }

    /// Connected components by edge adjacency. Each free-standing loop is its
    /// own component; an isolated wire is a component with one edge.
    pub fn split_components(&self) -> Vec<Molecule> {
        let mut comps = Vec::new();
        let mut seen_nodes: BTreeSet<NodeId> = BTreeSet::new();
        let mut seen_edges: BTreeSet<EdgeId> = BTreeSet::new();

        for (&start, _) in self.nodes.iter() {
            if seen_nodes.contains(&start) {
                continue;
            }
            let mut comp_nodes = BTreeSet::new();
            let mut comp_edges = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(n) = stack.pop() {
                if !comp_nodes.insert(n) {
                    continue;
                }
                for &e in &self.nodes[&n].ports {
                    comp_edges.insert(e);
                    for ep in [&self.edges[&e].source, &self.edges[&e].target] {
                        if let Endpoint::Port(n2, _) = ep {
                            if !comp_nodes.contains(n2) {
                                stack.push(*n2);
                            }
                        }
                    }
                }
            }
            seen_nodes.extend(comp_nodes.iter().copied());
            seen_edges.extend(comp_edges.iter().copied());
            comps.push(self.extract(&comp_nodes, &comp_edges));
        }

        // Isolated wires.
        for (&e, edge) in self.edges.iter() {
            if !seen_edges.contains(&e) && edge.source.is_free() && edge.target.is_free() {
                let mut m = Molecule::new();
                m.add_wire(
                    match &edge.source {
                        Endpoint::Free(l) => l.clone(),
                        _ => None,
                    },
                    match &edge.target {
                        Endpoint::Free(l) => l.clone(),
                        _ => None,
                    },
                );
                comps.push(m);
            }
        }

        for _ in 0..self.loops {
            let mut m = Molecule::new();
            m.add_loops(1);
            comps.push(m);
        }
        comps
    }

    fn extract(&self, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> Molecule {
        let mut m = Molecule::new();
        let mut node_map = BTreeMap::new();
        let mut edge_map = BTreeMap::new();
        for &n in nodes {
            node_map.insert(n, NodeId(node_map.len() as u32));
        }
        for &e in edges {
            edge_map.insert(e, EdgeId(edge_map.len() as u32));
        }
        let remap_ep = |ep: &Endpoint| match ep {
            Endpoint::Free(l) => Endpoint::Free(l.clone()),
            Endpoint::Port(n, p) => Endpoint::Port(node_map[n], *p),
        };
        for &n in nodes {
            let node = &self.nodes[&n];
            m.nodes.insert(
                node_map[&n],
                Node {
                    kind: node.kind.clone(),
                    ports: node.ports.iter().map(|e| edge_map[e]).collect(),
                },
            );
        }
        for &e in edges {
            let edge = &self.edges[&e];
            m.edges.insert(
                edge_map[&e],
                Edge { source: remap_ep(&edge.source), target: remap_ep(&edge.target) },
            );
        }
        m.next_node = node_map.len() as u32;
        m.next_edge = edge_map.len() as u32;
        m
    }

    // ------------------------------------------------------------------
    // Validation
    // ------------------------------------------------------------------

    /// Check every structural invariant; an empty report means the molecule
    /// is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut port_owners: BTreeMap<(NodeId, u8), Vec<EdgeId>> = BTreeMap::new();

        for (&eid, edge) in self.edges.iter() {
            for (ep, want) in [(&edge.source, Polarity::Out), (&edge.target, Polarity::In)] {
                match ep {
                    Endpoint::Free(_) => {}
                    Endpoint::Port(n, p) => match self.nodes.get(n) {
                        None => out.push(Violation::EdgeEndpointMissing { edge: eid }),
                        Some(node) => {
                            if (*p as usize) >= node.kind.arity() {
                                out.push(Violation::EdgeEndpointMissing { edge: eid });
                            } else {
                                if node.kind.polarity(*p) != want {
                                    out.push(Violation::PolarityViolation { edge: eid });
                                }
                                port_owners.entry((*n, *p)).or_default().push(eid);
                            }
                        }
                    },
                }
            }
        }

        for (&nid, node) in self.nodes.iter() {
            if node.ports.len() != node.kind.arity() {
                out.push(Violation::PortArityMismatch { node: nid });
                continue;
            }
            for (p, &e) in node.ports.iter().enumerate() {
                let owners = port_owners.get(&(nid, p as u8));
                match owners {
                    None => out.push(Violation::DanglingPort { node: nid, port: p as u8 }),
                    Some(v) => {
                        if v.len() > 1 {
                            out.push(Violation::PortSharedByEdges { node: nid, port: p as u8 });
                        }
                        if !v.contains(&e) {
                            out.push(Violation::PortEdgeMismatch { node: nid, port: p as u8, edge: e });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    // ------------------------------------------------------------------
    // Free-edge helpers
    // ------------------------------------------------------------------

    /// Edges whose target end is free (they flow out of the molecule).
    pub fn free_out_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| e.target.is_free())
            .map(|(&id, _)| id)
            .collect()
    }

    /// Edges whose source end is free (they flow into the molecule).
    pub fn free_in_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| e.source.is_free())
            .map(|(&id, _)| id)
            .collect()
    }

    /// Find a free out-flowing edge by the label on its free end.
    pub fn free_out_labeled(&self, label: &str) -> Option<EdgeId> {
        self.edges.iter().find_map(|(&id, e)| match &e.target {
            Endpoint::Free(Some(l)) if l == label => Some(id),
            _ => None,
        })
    }

    /// Find a free in-flowing edge by the label on its free end.
    pub fn free_in_labeled(&self, label: &str) -> Option<EdgeId> {
        self.edges.iter().find_map(|(&id, e)| match &e.source {
            Endpoint::Free(Some(l)) if l == label => Some(id),
            _ => None,
        })
    }

    // ------------------------------------------------------------------
    // Raw mutation, used by the move engine and format parsers. These can
    // leave the molecule transiently inconsistent; callers restore the
    // invariants before returning.
    // ------------------------------------------------------------------

    pub(crate) fn fresh_node_id(&mut self) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        id
    }

    pub(crate) fn fresh_edge_id(&mut self) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        id
    }

    pub(crate) fn insert_node_raw(&mut self, kind: NodeKind, ports: Vec<EdgeId>) -> NodeId {
        let id = self.fresh_node_id();
        self.nodes.insert(id, Node { kind, ports });
        id
    }

    pub(crate) fn insert_edge_raw(&mut self, source: Endpoint, target: Endpoint) -> EdgeId {
        let id = self.fresh_edge_id();
        self.edges.insert(id, Edge { source, target });
        id
    }

    pub(crate) fn remove_node_raw(&mut self, id: NodeId) {
        self.nodes.remove(&id);
    }

    pub(crate) fn remove_edge_raw(&mut self, id: EdgeId) {
        self.edges.remove(&id);
    }

    /// Point an edge end at a new endpoint, keeping the port-to-edge index in
    /// sync for the new endpoint (the old endpoint's node, if any, is assumed
    /// to be rewired or removed by the caller).
    pub(crate) fn set_source(&mut self, edge: EdgeId, ep: Endpoint) {
        if let Endpoint::Port(n, p) = ep {
            self.nodes.get_mut(&n).unwrap().ports[p as usize] = edge;
        }
        self.edges.get_mut(&edge).unwrap().source = ep;
    }

    pub(crate) fn set_target(&mut self, edge: EdgeId, ep: Endpoint) {
        if let Endpoint::Port(n, p) = ep {
            self.nodes.get_mut(&n).unwrap().ports[p as usize] = edge;
        }
        self.edges.get_mut(&edge).unwrap().target = ep;
    }

    pub(crate) fn take_loop(&mut self) -> bool {
        if self.loops > 0 {
            self.loops -= 1;
            true
        } else {
            false
        }
    }

    /// Fuse one arrow node into its surrounding wiring: the in-edge and the
    /// out-edge become one edge, or a loop when they are the same edge.
    /// Returns the surviving edge, if any, plus the edge id that was removed.
    pub(crate) fn fuse_arrow(&mut self, arrow: NodeId) -> (Option<EdgeId>, Option<EdgeId>) {
        debug_assert!(matches!(self.nodes[&arrow].kind, NodeKind::Arrow));
        let in_edge = self.nodes[&arrow].ports[ports::ARROW_IN as usize];
        let out_edge = self.nodes[&arrow].ports[ports::ARROW_OUT as usize];
        self.nodes.remove(&arrow);
        if in_edge == out_edge {
            self.edges.remove(&in_edge);
            self.loops += 1;
            return (None, Some(in_edge));
        }
        let new_target = self.edges[&out_edge].target.clone();
        self.edges.remove(&out_edge);
        self.set_target(in_edge, new_target);
        (Some(in_edge), Some(out_edge))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_molecule() -> Molecule {
        // λx.λy.x as a molecule: outer lambda's var feeds the inner body,
        // the inner var is terminated.
        let mut m = Molecule::new();
        let (outer, oe) = m.add_node(NodeKind::Lambda);
        let (inner, ie) = m.add_node(NodeKind::Lambda);
        let (_t, te) = m.add_node(NodeKind::Term);
        let _ = outer;
        let _ = inner;
        let m = m.connect(ie[ports::LAM_ROOT as usize], oe[ports::LAM_BODY as usize]).unwrap();
        let m = m.connect(oe[ports::LAM_VAR as usize], ie[ports::LAM_BODY as usize]).unwrap();
        let m = m.connect(ie[ports::LAM_VAR as usize], te[ports::T_IN as usize]).unwrap();
        m
    }

    #[test]
    fn build_and_validate_k() {
        let m = k_molecule();
        assert_eq!(m.node_count(), 3);
        assert!(m.validate().is_empty());
        assert_eq!(m.free_out_edges().len(), 1);
        assert!(m.free_in_edges().is_empty());
    }

    #[test]
    fn connect_same_wire_closes_loop() {
        let mut m = Molecule::new();
        let w = m.add_wire(None, None);
        let m2 = m.connect(w, w).unwrap();
        assert_eq!(m2.loop_count(), 1);
        assert_eq!(m2.edge_count(), 0);
    }

    #[test]
    fn connect_polarity_mismatch_is_error() {
        let mut m = Molecule::new();
        let (_a, ae) = m.add_node(NodeKind::Apply);
        // Both fun and arg are in-flowing; joining them must fail.
        let err = m.connect(ae[0], ae[1]).unwrap_err();
        assert!(matches!(err, ConnectError::NotFreeOut(_)));
    }

    #[test]
    fn union_and_split() {
        let k = k_molecule();
        let both = k.disjoint_union(&k);
        assert_eq!(both.node_count(), 6);
        let comps = both.split_components();
        assert_eq!(comps.len(), 2);
        for c in comps {
            assert_eq!(c.node_count(), 3);
            assert!(c.is_valid());
        }
    }

    #[test]
    fn loops_are_their_own_components() {
        let mut m = Molecule::new();
        m.add_loops(2);
        let comps = m.split_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.loop_count() == 1 && c.node_count() == 0));
    }

    #[test]
    fn validate_reports_dangling_port() {
        let mut m = Molecule::new();
        let e = m.insert_edge_raw(Endpoint::free(), Endpoint::free());
        m.insert_node_raw(NodeKind::Apply, vec![e, e, e]);
        let report = m.validate();
        assert!(!report.is_empty());
    }

    #[test]
    fn validate_reports_polarity_violation() {
        let mut m = Molecule::new();
        let (fi, fie) = m.add_node(NodeKind::FanIn);
        let _ = fie;
        // Force an edge joining two in-ports.
        let bad = m.insert_edge_raw(Endpoint::Port(fi, ports::FI_IN1), Endpoint::Port(fi, ports::FI_IN2));
        m.nodes.get_mut(&fi).unwrap().ports[0] = bad;
        m.nodes.get_mut(&fi).unwrap().ports[1] = bad;
        let report = m.validate();
        assert!(report.iter().any(|v| matches!(v, Violation::PolarityViolation { .. })));
    }
}

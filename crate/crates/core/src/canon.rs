//! Canonical codes: an exact isomorphism invariant for molecules.
//!
//! Two molecules get the same code iff there is a kind- and port-preserving
//! node bijection between them (loop counts must agree; free-end labels are
//! ignored). The code is computed by iterated neighborhood color refinement
//! seeded by node kind, with backtracking over refinement ties: every member
//! of the first non-singleton color class is individualized in turn and the
//! lexicographically smallest resulting code wins. Exact over fast; the
//! molecules handled here are small.

use std::collections::BTreeMap;

use crate::molecule::{Endpoint, Molecule, NodeId, NodeKind, Polarity};

/// A byte string identifying a molecule up to isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Short deterministic fingerprint used in trace files.
    pub fn fingerprint(&self) -> String {
        // FNV-1a folded to 128 bits over two staggered passes.
        let mut h1: u64 = 0xcbf29ce484222325;
        let mut h2: u64 = 0x9dc5bb0badc0ffee;
        for (i, &b) in self.0.iter().enumerate() {
            h1 ^= b as u64;
            h1 = h1.wrapping_mul(0x100000001b3);
            h2 ^= (b as u64).rotate_left((i % 57) as u32);
            h2 = h2.wrapping_mul(0x100000001b3);
        }
        format!("{h1:016x}{h2:016x}")
    }
}

/// Canonical labeling: nodes in canonical order plus the code.
pub struct Labeling {
    /// `order[i]` is the node placed at canonical position `i`.
    pub order: Vec<NodeId>,
    /// position of each node in the canonical order
    pub position: BTreeMap<NodeId, usize>,
    pub code: CanonicalCode,
}

pub fn canonical_form(m: &Molecule) -> CanonicalCode {
    canonical_labeling(m).code
}

pub fn is_isomorphic(a: &Molecule, b: &Molecule) -> bool {
    if a.node_count() != b.node_count()
        || a.edge_count() != b.edge_count()
        || a.loop_count() != b.loop_count()
    {
        return false;
    }
    canonical_form(a) == canonical_form(b)
}

struct Ctx {
    ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    kinds: Vec<Vec<u8>>,
    /// adjacency: for node i, port p: Some((neighbor index, neighbor port)) or None when free
    adj: Vec<Vec<Option<(usize, u8)>>>,
}

pub fn canonical_labeling(m: &Molecule) -> Labeling {
    let ids: Vec<NodeId> = m.nodes().map(|(id, _)| id).collect();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = ids.len();

    let mut kinds = Vec::with_capacity(n);
    let mut adj = Vec::with_capacity(n);
    for &id in &ids {
        let node = m.node(id).unwrap();
        kinds.push(kind_bytes(&node.kind));
        let mut row = Vec::with_capacity(node.ports.len());
        for (p, &e) in node.ports.iter().enumerate() {
            let edge = m.edge(e).unwrap();
            let here = Endpoint::Port(id, p as u8);
            let other = if edge.source == here { &edge.target } else { &edge.source };
            row.push(match other {
                Endpoint::Free(_) => None,
                Endpoint::Port(n2, p2) => Some((index[n2], *p2)),
            });
        }
        adj.push(row);
    }

    let ctx = Ctx { ids, index, kinds, adj };
    let init: Vec<u32> = initial_colors(&ctx);
    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    search(&ctx, init, &mut best);

    let (code_body, perm) = best.unwrap_or((Vec::new(), Vec::new()));

    let mut code = Vec::with_capacity(code_body.len() + 12);
    code.extend_from_slice(&(n as u32).to_be_bytes());
    code.extend_from_slice(&m.loop_count().to_be_bytes());
    // Count of free-free wires: structure not captured by node adjacency.
    let isolated = m
        .edges()
        .filter(|(_, e)| e.source.is_free() && e.target.is_free())
        .count() as u32;
    code.extend_from_slice(&isolated.to_be_bytes());
    code.extend_from_slice(&code_body);

    let order: Vec<NodeId> = perm.iter().map(|&i| ctx.ids[i]).collect();
    let position: BTreeMap<NodeId, usize> =
        order.iter().enumerate().map(|(pos, &id)| (id, pos)).collect();
    Labeling { order, position, code: CanonicalCode(code) }
}

fn kind_bytes(kind: &NodeKind) -> Vec<u8> {
    let mut v = vec![kind.tag()];
    if let NodeKind::Opaque(sig) = kind {
        v.push(sig.len() as u8);
        for p in sig {
            v.push(if matches!(p, Polarity::In) { 0 } else { 1 });
        }
    }
    v
}

fn initial_colors(ctx: &Ctx) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u8>> = ctx.kinds.iter().collect();
    sorted.sort();
    sorted.dedup();
    ctx.kinds
        .iter()
        .map(|k| sorted.binary_search(&k).unwrap() as u32)
        .collect()
}

/// One round of refinement. Colors are renumbered into a stable order on
/// (old color, port signatures), so equal inputs give equal outputs.
fn refine(ctx: &Ctx, colors: &[u32]) -> Vec<u32> {
    let n = colors.len();
    let mut sigs: Vec<(u32, Vec<(u8, i64)>)> = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<(u8, i64)> = ctx.adj[i]
            .iter()
            .map(|slot| match slot {
                None => (u8::MAX, -1),
                Some((j, p)) => (*p, colors[*j] as i64),
            })
            .collect();
        sigs.push((colors[i], row));
    }
    let mut uniq: Vec<&(u32, Vec<(u8, i64)>)> = sigs.iter().collect();
    uniq.sort();
    uniq.dedup();
    sigs.iter()
        .map(|s| uniq.binary_search(&s).unwrap() as u32)
        .collect()
}

fn refine_to_fixpoint(ctx: &Ctx, mut colors: Vec<u32>) -> Vec<u32> {
    loop {
        let next = refine(ctx, &colors);
        if next == colors {
            return colors;
        }
        colors = next;
    }
}

fn class_sizes(colors: &[u32]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &c in colors {
        *m.entry(c).or_insert(0usize) += 1;
    }
    m
}

fn search(ctx: &Ctx, colors: Vec<u32>, best: &mut Option<(Vec<u8>, Vec<usize>)>) {
    let colors = refine_to_fixpoint(ctx, colors);
    let sizes = class_sizes(&colors);

    if sizes.values().all(|&s| s == 1) {
        // Discrete: colors give the canonical position directly.
        let n = colors.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| colors[i]);
        let code = encode(ctx, &perm);
        match best {
            Some((b, _)) if *b <= code => {}
            _ => *best = Some((code, perm)),
        }
        return;
    }

    // Individualize each member of the first non-singleton class.
    let target = *sizes.iter().find(|(_, &s)| s > 1).unwrap().0;
    let fresh = colors.iter().max().copied().unwrap_or(0) + 1;
    for i in 0..colors.len() {
        if colors[i] == target {
            let mut branched = colors.clone();
            branched[i] = fresh;
            search(ctx, branched, best);
        }
    }
}

fn encode(ctx: &Ctx, perm: &[usize]) -> Vec<u8> {
    // inverse permutation: original index -> canonical position
    let mut pos = vec![0usize; perm.len()];
    for (p, &i) in perm.iter().enumerate() {
        pos[i] = p;
    }
    let mut out = Vec::with_capacity(perm.len() * 8);
    for &i in perm {
        out.extend_from_slice(&ctx.kinds[i]);
        for slot in &ctx.adj[i] {
            match slot {
                None => {
                    out.push(0xFF);
                    out.push(0xFF);
                    out.push(0xFF);
                }
                Some((j, p)) => {
                    let cp = pos[*j] as u16;
                    out.extend_from_slice(&cp.to_be_bytes());
                    out.push(*p);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mol::parse_mol;

    #[test]
    fn renaming_invariance() {
        let a = parse_mol("L a x r\nL x y a\nT y").unwrap();
        let b = parse_mol("L q w z\nL w k q\nT k").unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert!(is_isomorphic(&a, &b));
    }

    #[test]
    fn k_differs_from_identity() {
        let k = parse_mol("L a x r\nL x y a\nT y").unwrap();
        let i = parse_mol("L e e r").unwrap();
        assert_ne!(canonical_form(&k), canonical_form(&i));
    }

    #[test]
    fn fanout_differs_from_fanin() {
        let fo = parse_mol("FO a b c").unwrap();
        let fi = parse_mol("FI a b c").unwrap();
        assert_ne!(canonical_form(&fo), canonical_form(&fi));
    }

    #[test]
    fn union_with_empty_is_isomorphic() {
        let k = parse_mol("L a x r\nL x y a\nT y").unwrap();
        let u = k.disjoint_union(&Molecule::new());
        assert!(is_isomorphic(&k, &u));
    }

    #[test]
    fn out_order_matters() {
        // Swapping the two fan-out branches attached to different kinds must
        // change the code: out1 into T vs out2 into T are distinct molecules.
        let a = parse_mol("FO i t u\nT t\nL u u2 r\nT2ERR").err();
        let _ = a; // keep parse simple below
        let m1 = parse_mol("FO i t u\nT t").unwrap();
        let m2 = parse_mol("FO i u t\nT t").unwrap();
        assert_ne!(canonical_form(&m1), canonical_form(&m2));
    }

    #[test]
    fn loops_distinguish() {
        let mut a = Molecule::new();
        a.add_loops(1);
        let mut b = Molecule::new();
        b.add_loops(2);
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn symmetric_pair_of_copies() {
        let k = parse_mol("L a x r\nL x y a\nT y").unwrap();
        let kk = k.disjoint_union(&k);
        let k2 = parse_mol("L p q s\nL q t p\nT t").unwrap();
        let kk2 = k2.disjoint_union(&k);
        assert!(is_isomorphic(&kk, &kk2));
    }

    #[test]
    fn labels_do_not_matter() {
        let a = parse_mol("A f a r").unwrap();
        let b = parse_mol("A x y z").unwrap();
        assert!(is_isomorphic(&a, &b));
    }

    #[test]
    fn wire_vs_arrow_node_differ() {
        let w = parse_mol("WIRE a b").unwrap();
        let arrow = parse_mol("ARROW a b").unwrap();
        assert!(!is_isomorphic(&w, &arrow));
    }
}

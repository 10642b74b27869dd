//! The mol text format.
//!
//! One node per line: `KIND e1 e2 ... ek`, where the `ei` are edge names in
//! port order. A name used twice joins the two ports; a name used once
//! leaves a free end carrying that name as its label. Extra line forms:
//!
//! * `LOOP` — one free-standing loop
//! * `WIRE a b` — an isolated wire from free end `a` to free end `b`
//! * `OPAQUE <sig> e1 ... ek` — opaque node, `<sig>` a string of `i`/`o`
//!   giving the polarity of each port
//!
//! `#` starts a comment; tokens are whitespace separated; text is UTF-8 with
//! `\n` newlines.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::molecule::{
    ports, Edge, Endpoint, Molecule, NodeId, NodeKind, Polarity,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MolParseError {
    #[error("line {line}: unknown kind `{kind}`")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: `{kind}` takes {expected} edge names, found {found}")]
    ArityMismatch { line: usize, kind: String, expected: usize, found: usize },
    #[error("line {line}: edge name `{name}` used more than twice")]
    NameUsedTooOften { line: usize, name: String },
    #[error("edge name `{name}` joins two {kind}-ports")]
    PolarityClash { name: String, kind: &'static str },
    #[error("line {line}: bad opaque signature `{sig}` (expected a string of `i`/`o`)")]
    BadOpaqueSignature { line: usize, sig: String },
    #[error("line {line}: `{form}` takes {expected} names, found {found}")]
    BadLineForm { line: usize, form: &'static str, expected: usize, found: usize },
}

struct PortRef {
    node: NodeId,
    port: u8,
    polarity: Polarity,
}

/// Parse mol text into a molecule.
pub fn parse_mol(text: &str) -> Result<Molecule, MolParseError> {
    let mut m = Molecule::new();
    // name -> port refs seen so far
    let mut uses: BTreeMap<String, Vec<PortRef>> = BTreeMap::new();
    let mut wires: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();

        let kind = match head {
            "L" => NodeKind::Lambda,
            "A" => NodeKind::Apply,
            "FO" => NodeKind::FanOut,
            "FI" => NodeKind::FanIn,
            "T" => NodeKind::Term,
            "ARROW" => NodeKind::Arrow,
            "LOOP" => {
                if !rest.is_empty() {
                    return Err(MolParseError::BadLineForm {
                        line: line_no,
                        form: "LOOP",
                        expected: 0,
                        found: rest.len(),
                    });
                }
                m.add_loops(1);
                continue;
            }
            "WIRE" => {
                if rest.len() != 2 {
                    return Err(MolParseError::BadLineForm {
                        line: line_no,
                        form: "WIRE",
                        expected: 2,
                        found: rest.len(),
                    });
                }
                wires.push((rest[0].to_string(), rest[1].to_string()));
                continue;
            }
            "OPAQUE" => {
                if rest.is_empty() {
                    return Err(MolParseError::BadLineForm {
                        line: line_no,
                        form: "OPAQUE",
                        expected: 1,
                        found: 0,
                    });
                }
                let sig_str = rest[0];
                let mut sig = Vec::with_capacity(sig_str.len());
                for ch in sig_str.chars() {
                    match ch {
                        'i' => sig.push(Polarity::In),
                        'o' => sig.push(Polarity::Out),
                        _ => {
                            return Err(MolParseError::BadOpaqueSignature {
                                line: line_no,
                                sig: sig_str.to_string(),
                            })
                        }
                    }
                }
                if sig.is_empty() {
                    return Err(MolParseError::BadOpaqueSignature {
                        line: line_no,
                        sig: sig_str.to_string(),
                    });
                }
                let names = &rest[1..];
                let kind = NodeKind::Opaque(sig);
                if names.len() != kind.arity() {
                    return Err(MolParseError::ArityMismatch {
                        line: line_no,
                        kind: "OPAQUE".into(),
                        expected: kind.arity(),
                        found: names.len(),
                    });
                }
                register_node(&mut m, kind, names, line_no, &mut uses)?;
                continue;
            }
            other => {
                return Err(MolParseError::UnknownKind { line: line_no, kind: other.to_string() })
            }
        };

        if rest.len() != kind.arity() {
            return Err(MolParseError::ArityMismatch {
                line: line_no,
                kind: head.to_string(),
                expected: kind.arity(),
                found: rest.len(),
            });
        }
        register_node(&mut m, kind, &rest, line_no, &mut uses)?;
    }

    // Materialize edges from name usage.
    for (name, refs) in uses {
        match refs.len() {
            1 => {
                let r = &refs[0];
                let eid = match r.polarity {
                    Polarity::Out => m.insert_edge_raw(
                        Endpoint::Port(r.node, r.port),
                        Endpoint::Free(Some(name.clone())),
                    ),
                    Polarity::In => m.insert_edge_raw(
                        Endpoint::Free(Some(name.clone())),
                        Endpoint::Port(r.node, r.port),
                    ),
                };
                set_port(&mut m, r, eid);
            }
            2 => {
                let (a, b) = (&refs[0], &refs[1]);
                let (out_ref, in_ref) = match (a.polarity, b.polarity) {
                    (Polarity::Out, Polarity::In) => (a, b),
                    (Polarity::In, Polarity::Out) => (b, a),
                    (Polarity::Out, Polarity::Out) => {
                        return Err(MolParseError::PolarityClash { name, kind: "out" })
                    }
                    (Polarity::In, Polarity::In) => {
                        return Err(MolParseError::PolarityClash { name, kind: "in" })
                    }
                };
                let eid = m.insert_edge_raw(
                    Endpoint::Port(out_ref.node, out_ref.port),
                    Endpoint::Port(in_ref.node, in_ref.port),
                );
                set_port(&mut m, out_ref, eid);
                set_port(&mut m, in_ref, eid);
            }
            _ => unreachable!("checked at registration"),
        }
    }

    for (a, b) in wires {
        m.add_wire(Some(a), Some(b));
    }

    debug_assert!(m.is_valid(), "parse produced an invalid molecule");
    Ok(m)
}

fn register_node(
    m: &mut Molecule,
    kind: NodeKind,
    names: &[&str],
    line_no: usize,
    uses: &mut BTreeMap<String, Vec<PortRef>>,
) -> Result<(), MolParseError> {
    // Placeholder edge ids; fixed up when edges are materialized.
    let placeholder: Vec<_> = (0..kind.arity()).map(|_| crate::molecule::EdgeId(u32::MAX)).collect();
    let id = m.insert_node_raw(kind.clone(), placeholder);
    for (port, name) in names.iter().enumerate() {
        let entry = uses.entry(name.to_string()).or_default();
        if entry.len() >= 2 {
            return Err(MolParseError::NameUsedTooOften { line: line_no, name: name.to_string() });
        }
        entry.push(PortRef { node: id, port: port as u8, polarity: kind.polarity(port as u8) });
    }
    Ok(())
}

fn set_port(m: &mut Molecule, r: &PortRef, eid: crate::molecule::EdgeId) {
    match r.polarity {
        Polarity::Out => m.set_source(eid, Endpoint::Port(r.node, r.port)),
        Polarity::In => m.set_target(eid, Endpoint::Port(r.node, r.port)),
    }
}

/// Serialize a molecule to mol text. Free-end labels are kept as edge names
/// where possible; everything else gets generated names.
pub fn serialize_mol(m: &Molecule) -> String {
    let mut names: BTreeMap<crate::molecule::EdgeId, String> = BTreeMap::new();
    let mut used: std::collections::BTreeSet<String> = Default::default();
    let mut counter = 0usize;

    let mut fresh = |used: &mut std::collections::BTreeSet<String>, counter: &mut usize| loop {
        let cand = format!("e{}", *counter);
        *counter += 1;
        if used.insert(cand.clone()) {
            break cand;
        }
    };

    // Prefer free-end labels as names (only when unique).
    for (eid, edge) in m.edges() {
        let label = match (&edge.source, &edge.target) {
            (Endpoint::Free(Some(l)), Endpoint::Port(..)) => Some(l.clone()),
            (Endpoint::Port(..), Endpoint::Free(Some(l))) => Some(l.clone()),
            _ => None,
        };
        if let Some(l) = label {
            if !l.contains(char::is_whitespace) && !l.contains('#') && used.insert(l.clone()) {
                names.insert(eid, l);
            }
        }
    }
    let all_edges: Vec<_> = m.edges().map(|(id, _)| id).collect();
    for eid in all_edges {
        names.entry(eid).or_insert_with(|| fresh(&mut used, &mut counter));
    }

    let mut out = String::new();
    for (_, node) in m.nodes() {
        match &node.kind {
            NodeKind::Opaque(sig) => {
                let sig_str: String = sig
                    .iter()
                    .map(|p| if matches!(p, Polarity::In) { 'i' } else { 'o' })
                    .collect();
                out.push_str("OPAQUE ");
                out.push_str(&sig_str);
            }
            k => out.push_str(k.name()),
        }
        for &e in &node.ports {
            out.push(' ');
            out.push_str(&names[&e]);
        }
        out.push('\n');
    }
    for (eid, edge) in m.edges() {
        if edge.source.is_free() && edge.target.is_free() {
            let s = match &edge.source {
                Endpoint::Free(Some(l)) => l.clone(),
                _ => format!("{}s", names[&eid]),
            };
            let t = match &edge.target {
                Endpoint::Free(Some(l)) => l.clone(),
                _ => format!("{}t", names[&eid]),
            };
            out.push_str(&format!("WIRE {} {}\n", s, t));
        }
    }
    for _ in 0..m.loop_count() {
        out.push_str("LOOP\n");
    }
    out
}

/// Convenience re-export used by tests: parse, panicking on failure.
#[cfg(test)]
pub(crate) fn mol(text: &str) -> Molecule {
    parse_mol(text).expect("mol text must parse")
}

#[allow(unused_imports)]
pub(crate) use crate::molecule::Edge as _EdgeAlias;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;

    #[test]
    fn single_apply_node_with_three_free_edges() {
        let m = parse_mol("A f a r").unwrap();
        assert_eq!(m.node_count(), 1);
        assert_eq!(m.edge_count(), 3);
        assert_eq!(m.free_in_edges().len(), 2);
        assert_eq!(m.free_out_edges().len(), 1);
        assert!(m.is_valid());
    }

    #[test]
    fn k_molecule_parses() {
        let m = parse_mol("L a x r\nL x y a\nT y").unwrap();
        assert_eq!(m.node_count(), 3);
        assert!(m.is_valid());
        assert_eq!(m.free_out_edges().len(), 1);
    }

    #[test]
    fn identity_wires_var_to_body() {
        let m = parse_mol("L e e r").unwrap();
        assert_eq!(m.node_count(), 1);
        assert_eq!(m.edge_count(), 2);
    }

    #[test]
    fn two_in_ports_clash() {
        let err = parse_mol("FI a a c").unwrap_err();
        assert!(matches!(err, MolParseError::PolarityClash { .. }));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_mol("L a b").unwrap_err();
        assert!(matches!(err, MolParseError::ArityMismatch { .. }));
    }

    #[test]
    fn unknown_kind() {
        let err = parse_mol("Q a b c").unwrap_err();
        assert!(matches!(err, MolParseError::UnknownKind { .. }));
    }

    #[test]
    fn name_used_three_times() {
        let err = parse_mol("FO a b c\nFI b b a").unwrap_err();
        // `b` appears twice in the FI line and once in FO.
        assert!(matches!(
            err,
            MolParseError::NameUsedTooOften { .. } | MolParseError::PolarityClash { .. }
        ));
    }

    #[test]
    fn empty_serializes_to_empty() {
        let m = Molecule::new();
        assert_eq!(serialize_mol(&m), "");
    }

    #[test]
    fn loop_round_trip() {
        let mut m = Molecule::new();
        m.add_loops(1);
        assert_eq!(serialize_mol(&m), "LOOP\n");
        let back = parse_mol("LOOP").unwrap();
        assert_eq!(back.loop_count(), 1);
    }

    #[test]
    fn k_round_trip_is_isomorphic() {
        let m = parse_mol("L a x r\nL x y a\nT y").unwrap();
        let text = serialize_mol(&m);
        let back = parse_mol(&text).unwrap();
        assert!(is_isomorphic(&m, &back));
    }

    #[test]
    fn wire_round_trip() {
        let m = parse_mol("WIRE z r").unwrap();
        assert_eq!(m.edge_count(), 1);
        let text = serialize_mol(&m);
        let back = parse_mol(&text).unwrap();
        assert!(is_isomorphic(&m, &back));
    }

    #[test]
    fn opaque_round_trip() {
        let m = parse_mol("OPAQUE io a b").unwrap();
        assert_eq!(m.node_count(), 1);
        let back = parse_mol(&serialize_mol(&m)).unwrap();
        assert!(is_isomorphic(&m, &back));
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_mol("# the identity\nL e e r  # one node\n\n").unwrap();
        assert_eq!(m.node_count(), 1);
    }
}

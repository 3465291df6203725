//! Function-preserving netlist restructuring.
//!
//! Dissolves module boundaries after locking: gates are decomposed to
//! two-input form, structurally identical subexpressions are shared, a
//! random sample of nodes is rewritten through local equivalences each
//! round, and every internal signal name is regenerated from a seeded
//! counter. PI and PO names and order are preserved; function is preserved
//! (callers verify with an equivalence miter).

use super::{Circuit, CircuitBuilder, GateKind};
use rand::Rng;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Pi(u32),
    Const(bool),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Xor(u32, u32),
}

#[derive(Default)]
struct Dag {
    nodes: Vec<Node>,
    cache: HashMap<Node, u32>,
}

impl Dag {
    /// Hash-consing constructor with light constant folding. Double
    /// negation is deliberately not folded here so it can be inserted and
    /// removed as a rewrite.
    fn mk(&mut self, node: Node) -> u32 {
        let node = match node {
            Node::And(a, b) | Node::Or(a, b) | Node::Xor(a, b) => {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                match (node, self.nodes[x as usize], self.nodes[y as usize]) {
                    (Node::And(..), Node::Const(false), _) => return self.mk(Node::Const(false)),
                    (Node::And(..), _, Node::Const(false)) => return self.mk(Node::Const(false)),
                    (Node::And(..), Node::Const(true), _) => return y,
                    (Node::And(..), _, Node::Const(true)) => return x,
                    (Node::Or(..), Node::Const(true), _) => return self.mk(Node::Const(true)),
                    (Node::Or(..), _, Node::Const(true)) => return self.mk(Node::Const(true)),
                    (Node::Or(..), Node::Const(false), _) => return y,
                    (Node::Or(..), _, Node::Const(false)) => return x,
                    (Node::Xor(..), Node::Const(false), _) => return y,
                    (Node::Xor(..), _, Node::Const(false)) => return x,
                    (Node::Xor(..), Node::Const(true), _) => return self.mk(Node::Not(y)),
                    (Node::Xor(..), _, Node::Const(true)) => return self.mk(Node::Not(x)),
                    _ => {}
                }
                if x == y {
                    match node {
                        Node::And(..) | Node::Or(..) => return x,
                        Node::Xor(..) => return self.mk(Node::Const(false)),
                        _ => unreachable!(),
                    }
                }
                match node {
                    Node::And(..) => Node::And(x, y),
                    Node::Or(..) => Node::Or(x, y),
                    Node::Xor(..) => Node::Xor(x, y),
                    _ => unreachable!(),
                }
            }
            Node::Not(a) => {
                if let Node::Const(b) = self.nodes[a as usize] {
                    return self.mk(Node::Const(!b));
                }
                node
            }
            _ => node,
        };
        if let Some(&id) = self.cache.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.cache.insert(node, id);
        id
    }

    fn fold_balanced(&mut self, ids: &[u32], f: fn(u32, u32) -> Node) -> u32 {
        match ids.len() {
            0 => unreachable!("gates always have fanins here"),
            1 => ids[0],
            _ => {
                let mid = ids.len() / 2;
                let l = self.fold_balanced(&ids[..mid], f);
                let r = self.fold_balanced(&ids[mid..], f);
                self.mk(f(l, r))
            }
        }
    }
}

fn import(c: &Circuit) -> (Dag, Vec<u32>) {
    let mut dag = Dag::default();
    let mut signal: HashMap<&str, u32> = HashMap::new();
    for (i, pi) in c.primary_inputs().iter().enumerate() {
        let id = dag.mk(Node::Pi(i as u32));
        signal.insert(pi.as_str(), id);
    }
    for name in c.topo_order() {
        let g = c.gate(&name).unwrap();
        let ins: Vec<u32> = g.fanins.iter().map(|f| signal[f.as_str()]).collect();
        let id = match g.kind {
            GateKind::And => dag.fold_balanced(&ins, Node::And),
            GateKind::Or => dag.fold_balanced(&ins, Node::Or),
            GateKind::Xor => dag.fold_balanced(&ins, Node::Xor),
            GateKind::Nand => {
                let t = dag.fold_balanced(&ins, Node::And);
                dag.mk(Node::Not(t))
            }
            GateKind::Nor => {
                let t = dag.fold_balanced(&ins, Node::Or);
                dag.mk(Node::Not(t))
            }
            GateKind::Xnor => {
                let t = dag.fold_balanced(&ins, Node::Xor);
                dag.mk(Node::Not(t))
            }
            GateKind::Not => dag.mk(Node::Not(ins[0])),
            GateKind::Buff => ins[0],
            GateKind::Const0 => dag.mk(Node::Const(false)),
            GateKind::Const1 => dag.mk(Node::Const(true)),
        };
        signal.insert(g.name.as_str(), id);
    }
    let pos = c
        .primary_outputs()
        .iter()
        .map(|p| signal[p.as_str()])
        .collect();
    (dag, pos)
}

/// One rewrite pass: rebuild the DAG bottom-up, replacing a random sample
/// of nodes by local equivalences (De Morgan duals, XOR decomposition,
/// double-negation insertion and removal).
fn rewrite_round(dag: &Dag, pos: &[u32], rng: &mut impl Rng) -> (Dag, Vec<u32>) {
    const P_REWRITE: f64 = 0.4;
    const P_WRAP: f64 = 0.12;
    let mut out = Dag::default();
    let mut map = vec![0u32; dag.nodes.len()];
    for (id, node) in dag.nodes.iter().enumerate() {
        let new_id = match *node {
            Node::Pi(i) => out.mk(Node::Pi(i)),
            Node::Const(b) => out.mk(Node::Const(b)),
            Node::Not(a) => {
                let a = map[a as usize];
                if let Node::Not(inner) = out.nodes[a as usize] {
                    if rng.gen_bool(0.5) {
                        inner // double-negation removal
                    } else {
                        out.mk(Node::Not(a))
                    }
                } else {
                    out.mk(Node::Not(a))
                }
            }
            Node::And(a, b) => {
                let (a, b) = (map[a as usize], map[b as usize]);
                if rng.gen_bool(P_REWRITE) {
                    let na = out.mk(Node::Not(a));
                    let nb = out.mk(Node::Not(b));
                    let or = out.mk(Node::Or(na, nb));
                    out.mk(Node::Not(or))
                } else {
                    out.mk(Node::And(a, b))
                }
            }
            Node::Or(a, b) => {
                let (a, b) = (map[a as usize], map[b as usize]);
                if rng.gen_bool(P_REWRITE) {
                    let na = out.mk(Node::Not(a));
                    let nb = out.mk(Node::Not(b));
                    let and = out.mk(Node::And(na, nb));
                    out.mk(Node::Not(and))
                } else {
                    out.mk(Node::Or(a, b))
                }
            }
            Node::Xor(a, b) => {
                let (a, b) = (map[a as usize], map[b as usize]);
                if rng.gen_bool(P_REWRITE) {
                    if rng.gen_bool(0.5) {
                        // a^b = (a & !b) | (!a & b)
                        let na = out.mk(Node::Not(a));
                        let nb = out.mk(Node::Not(b));
                        let l = out.mk(Node::And(a, nb));
                        let r = out.mk(Node::And(na, b));
                        out.mk(Node::Or(l, r))
                    } else {
                        // a^b = (a | b) & !(a & b)
                        let or = out.mk(Node::Or(a, b));
                        let and = out.mk(Node::And(a, b));
                        let nand = out.mk(Node::Not(and));
                        out.mk(Node::And(or, nand))
                    }
                } else {
                    out.mk(Node::Xor(a, b))
                }
            }
        };
        let new_id = if rng.gen_bool(P_WRAP) && !matches!(*node, Node::Pi(_) | Node::Const(_)) {
            let n1 = out.mk(Node::Not(new_id));
            out.mk(Node::Not(n1))
        } else {
            new_id
        };
        map[id] = new_id;
    }
    (out, pos.iter().map(|&p| map[p as usize]).collect())
}

/// Emit the DAG back as a circuit. Internal names are regenerated as
/// `g<seq>` from a seeded offset; a gate driving a primary output takes the
/// output's name when it can, otherwise a BUFF bridges the binding.
/// NOT-over-AND/OR/XOR pairs with single fanout are folded back into
/// NAND/NOR/XNOR some of the time to keep the emitted gate mix varied.
fn emit(dag: &Dag, pos: &[u32], c: &Circuit, rng: &mut impl Rng) -> Circuit {
    let n = dag.nodes.len();
    let mut reachable = vec![false; n];
    let mut stack: Vec<u32> = pos.to_vec();
    while let Some(id) = stack.pop() {
        if reachable[id as usize] {
            continue;
        }
        reachable[id as usize] = true;
        match dag.nodes[id as usize] {
            Node::Not(a) => stack.push(a),
            Node::And(a, b) | Node::Or(a, b) | Node::Xor(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            _ => {}
        }
    }
    let mut uses = vec![0usize; n];
    for (id, node) in dag.nodes.iter().enumerate() {
        if !reachable[id] {
            continue;
        }
        match *node {
            Node::Not(a) => uses[a as usize] += 1,
            Node::And(a, b) | Node::Or(a, b) | Node::Xor(a, b) => {
                uses[a as usize] += 1;
                uses[b as usize] += 1;
            }
            _ => {}
        }
    }
    for &p in pos {
        uses[p as usize] += 1;
    }

    // Which gate name each primary output claims; first output bound to a
    // non-PI node gets the node itself.
    let mut claimed: HashMap<u32, String> = HashMap::new();
    for (po, &node) in c.primary_outputs().iter().zip(pos) {
        if !matches!(dag.nodes[node as usize], Node::Pi(_)) {
            claimed.entry(node).or_insert_with(|| po.clone());
        }
    }

    let mut b = CircuitBuilder::default_interface(c);
    b.seed_namer(rng.gen_range(100..100_000));

    // Decide NAND/NOR/XNOR refolds: a NOT node absorbs its operand when the
    // operand is a single-use And/Or/Xor and the coin lands that way.
    let mut fused = vec![false; n];
    for (id, node) in dag.nodes.iter().enumerate() {
        if !reachable[id] {
            continue;
        }
        if let Node::Not(a) = *node {
            let a = a as usize;
            if uses[a] == 1
                && !claimed.contains_key(&(a as u32))
                && matches!(
                    dag.nodes[a],
                    Node::And(..) | Node::Or(..) | Node::Xor(..)
                )
                && rng.gen_bool(0.5)
            {
                fused[a] = true;
            }
        }
    }

    let mut name_of: Vec<Option<String>> = vec![None; n];
    for id in 0..n {
        if !reachable[id] || fused[id] {
            continue;
        }
        let resolve = |name_of: &[Option<String>], x: u32| name_of[x as usize].clone().unwrap();
        let (kind, fanins) = match dag.nodes[id] {
            Node::Pi(i) => {
                name_of[id] = Some(c.primary_inputs()[i as usize].clone());
                continue;
            }
            Node::Const(false) => (GateKind::Const0, vec![]),
            Node::Const(true) => (GateKind::Const1, vec![]),
            Node::Not(a) => {
                if fused[a as usize] {
                    let (k, f) = match dag.nodes[a as usize] {
                        Node::And(x, y) => (
                            GateKind::Nand,
                            vec![resolve(&name_of, x), resolve(&name_of, y)],
                        ),
                        Node::Or(x, y) => (
                            GateKind::Nor,
                            vec![resolve(&name_of, x), resolve(&name_of, y)],
                        ),
                        Node::Xor(x, y) => (
                            GateKind::Xnor,
                            vec![resolve(&name_of, x), resolve(&name_of, y)],
                        ),
                        _ => unreachable!(),
                    };
                    (k, f)
                } else {
                    (GateKind::Not, vec![resolve(&name_of, a)])
                }
            }
            Node::And(x, y) => (
                GateKind::And,
                vec![resolve(&name_of, x), resolve(&name_of, y)],
            ),
            Node::Or(x, y) => (
                GateKind::Or,
                vec![resolve(&name_of, x), resolve(&name_of, y)],
            ),
            Node::Xor(x, y) => (
                GateKind::Xor,
                vec![resolve(&name_of, x), resolve(&name_of, y)],
            ),
        };
        let name = match claimed.get(&(id as u32)) {
            Some(po_name) => b.add_named_gate(po_name, kind, fanins).unwrap(),
            None => b.gate(kind, fanins),
        };
        name_of[id] = Some(name);
    }

    // Bind outputs that could not claim their driver directly.
    for (po, &node) in c.primary_outputs().iter().zip(pos) {
        let driver = name_of[node as usize].clone().unwrap();
        if driver != *po {
            b.add_named_gate(po, GateKind::Buff, vec![driver]).unwrap();
        }
    }

    b.build().expect("blend rebuild is structurally valid")
}

impl CircuitBuilder {
    /// Empty builder carrying over only the interface of `c`.
    fn default_interface(c: &Circuit) -> CircuitBuilder {
        let mut b = CircuitBuilder {
            pis: Vec::new(),
            pos: c.primary_outputs().to_vec(),
            gates: Vec::new(),
            names: Default::default(),
            seq: 0,
        };
        for pi in c.primary_inputs() {
            b.add_pi(pi).unwrap();
        }
        b
    }
}

/// See module docs. `rounds = 0` still decomposes, shares and renames; each
/// extra round applies one random rewrite pass.
pub fn structural_blend(c: &Circuit, rng: &mut impl Rng, rounds: usize) -> Circuit {
    let (mut dag, mut pos) = import(c);
    for _ in 0..rounds {
        let (d, p) = rewrite_round(&dag, &pos, rng);
        dag = d;
        pos = p;
    }
    emit(&dag, &pos, c, rng)
}

/// Convenience check used by tests: exhaustive functional equality for
/// small circuits with matching interfaces.
#[cfg(test)]
pub(crate) fn exhaustively_equal(a: &Circuit, b: &Circuit) -> bool {
    use super::BitVector;
    let names: Vec<String> = a.primary_inputs().to_vec();
    assert!(names.len() <= 16);
    assert_eq!(a.primary_inputs(), b.primary_inputs());
    for v in 0..1u64 << names.len() {
        let input = BitVector::from_u64(names.len(), v).assignment(&names);
        if a.simulate(&input).unwrap() != b.simulate(&input).unwrap() {
            return false;
        }
    }
    true
}

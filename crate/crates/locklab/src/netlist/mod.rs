//! Gate-level combinational netlists in bench format: parsing, validation,
//! simulation, cone analysis and structural transforms.

mod bench;
mod blend;

pub use bench::{parse_bench, structurally_identical, write_bench};
pub use blend::structural_blend;

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// Map from signal name to a logic value. Used both for circuit inputs and
/// for observed outputs.
pub type Assignment = BTreeMap<String, bool>;

#[derive(Error, Debug)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unsupported gate keyword `{word}`")]
    UnsupportedKeyword { line: usize, word: String },
    #[error("duplicate signal definition `{0}`")]
    DuplicateSignal(String),
    #[error("gate `{gate}` reads undefined signal `{fanin}`")]
    UndefinedFanin { gate: String, fanin: String },
    #[error("gate `{gate}`: {kind} does not take {got} fanin(s)")]
    BadArity {
        gate: String,
        kind: GateKind,
        got: usize,
    },
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
    #[error("primary output `{0}` does not resolve to any signal")]
    UnresolvedOutput(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("missing input bit for primary input `{0}`")]
    MissingInput(String),
    #[error("signal name `{0}` already in use")]
    NameCollision(String),
    #[error("splicing `{node}` with `{other}` would create a cycle")]
    SpliceCycle { node: String, other: String },
    #[error("no primary output has a cone with >= {required} primary inputs (max available: {max_available})")]
    NoEligibleOutput {
        required: usize,
        max_available: usize,
    },
    #[error("circuit has {available} internal wires, {needed} needed")]
    NotEnoughWires { needed: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buff,
    Const0,
    Const1,
}

impl GateKind {
    pub fn from_keyword(word: &str) -> Option<GateKind> {
        match word.to_ascii_uppercase().as_str() {
            "AND" => Some(GateKind::And),
            "OR" => Some(GateKind::Or),
            "NAND" => Some(GateKind::Nand),
            "NOR" => Some(GateKind::Nor),
            "XOR" => Some(GateKind::Xor),
            "XNOR" => Some(GateKind::Xnor),
            "NOT" => Some(GateKind::Not),
            "BUF" | "BUFF" => Some(GateKind::Buff),
            "CONST0" => Some(GateKind::Const0),
            "CONST1" => Some(GateKind::Const1),
            _ => None,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buff => "BUFF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    /// NOT/BUFF take exactly one fanin, constants none, everything else two
    /// or more. Multi-input XOR/XNOR read as odd/even parity.
    pub fn arity_ok(&self, fanins: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buff => fanins == 1,
            GateKind::Const0 | GateKind::Const1 => fanins == 0,
            _ => fanins >= 2,
        }
    }

    /// Evaluate 64 patterns at once, one per bit position.
    pub fn eval_words(&self, fanins: &[u64]) -> u64 {
        match self {
            GateKind::And => fanins.iter().fold(!0u64, |a, &b| a & b),
            GateKind::Or => fanins.iter().fold(0u64, |a, &b| a | b),
            GateKind::Nand => !fanins.iter().fold(!0u64, |a, &b| a & b),
            GateKind::Nor => !fanins.iter().fold(0u64, |a, &b| a | b),
            GateKind::Xor => fanins.iter().fold(0u64, |a, &b| a ^ b),
            GateKind::Xnor => !fanins.iter().fold(0u64, |a, &b| a ^ b),
            GateKind::Not => !fanins[0],
            GateKind::Buff => fanins[0],
            GateKind::Const0 => 0,
            GateKind::Const1 => !0u64,
        }
    }

    pub fn eval(&self, fanins: &[bool]) -> bool {
        let words: Vec<u64> = fanins.iter().map(|&b| if b { !0 } else { 0 }).collect();
        self.eval_words(&words) & 1 == 1
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub name: String,
    pub kind: GateKind,
    pub fanins: Vec<String>,
}

/// Where a signal name points inside a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SignalRef {
    Pi(usize),
    Gate(usize),
}

/// An immutable combinational circuit. Construction validates name
/// uniqueness, fanin resolution, gate arities and acyclicity; the
/// topological order is computed once and cached.
#[derive(Debug, Clone)]
pub struct Circuit {
    pis: Vec<String>,
    pos: Vec<String>,
    gates: Vec<Gate>,
    index: HashMap<String, SignalRef>,
    topo: Vec<usize>,
}

impl Circuit {
    pub fn new(
        pis: Vec<String>,
        pos: Vec<String>,
        gates: Vec<Gate>,
    ) -> Result<Circuit, NetlistError> {
        let mut index = HashMap::with_capacity(pis.len() + gates.len());
        for (i, pi) in pis.iter().enumerate() {
            if index.insert(pi.clone(), SignalRef::Pi(i)).is_some() {
                return Err(NetlistError::DuplicateSignal(pi.clone()));
            }
        }
        for (i, g) in gates.iter().enumerate() {
            if index.insert(g.name.clone(), SignalRef::Gate(i)).is_some() {
                return Err(NetlistError::DuplicateSignal(g.name.clone()));
            }
        }
        for g in &gates {
            if !g.kind.arity_ok(g.fanins.len()) {
                return Err(NetlistError::BadArity {
                    gate: g.name.clone(),
                    kind: g.kind,
                    got: g.fanins.len(),
                });
            }
            for f in &g.fanins {
                if !index.contains_key(f) {
                    return Err(NetlistError::UndefinedFanin {
                        gate: g.name.clone(),
                        fanin: f.clone(),
                    });
                }
            }
        }
        for po in &pos {
            if !index.contains_key(po) {
                return Err(NetlistError::UnresolvedOutput(po.clone()));
            }
        }
        let topo = toposort(&gates, &index)?;
        Ok(Circuit {
            pis,
            pos,
            gates,
            index,
            topo,
        })
    }

    pub fn primary_inputs(&self) -> &[String] {
        &self.pis
    }

    pub fn primary_outputs(&self) -> &[String] {
        &self.pos
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn contains_signal(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn is_primary_input(&self, name: &str) -> bool {
        matches!(self.index.get(name), Some(SignalRef::Pi(_)))
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        match self.index.get(name) {
            Some(SignalRef::Gate(i)) => Some(&self.gates[*i]),
            _ => None,
        }
    }

    /// Gate names in dependency order: every gate appears after everything
    /// in its fanin cone.
    pub fn topo_order(&self) -> Vec<String> {
        self.topo
            .iter()
            .map(|&i| self.gates[i].name.clone())
            .collect()
    }

    /// Evaluate the circuit on one input assignment and return the values
    /// of the primary outputs.
    pub fn simulate(&self, input: &Assignment) -> Result<Assignment, NetlistError> {
        let full = self.simulate_full(input)?;
        Ok(self
            .pos
            .iter()
            .map(|po| (po.clone(), full[po]))
            .collect())
    }

    /// Evaluate and return every signal value, keyed by name.
    pub fn simulate_full(&self, input: &Assignment) -> Result<Assignment, NetlistError> {
        let pi_words: Vec<u64> = self
            .pis
            .iter()
            .map(|pi| {
                input
                    .get(pi)
                    .map(|&b| if b { !0u64 } else { 0 })
                    .ok_or_else(|| NetlistError::MissingInput(pi.clone()))
            })
            .collect::<Result<_, _>>()?;
        let words = self.eval_words(&pi_words);
        let mut out = Assignment::new();
        for (i, pi) in self.pis.iter().enumerate() {
            out.insert(pi.clone(), pi_words[i] & 1 == 1);
        }
        for (i, g) in self.gates.iter().enumerate() {
            out.insert(g.name.clone(), words[self.pis.len() + i] & 1 == 1);
        }
        Ok(out)
    }

    /// Word-level evaluation: bit position j of every word carries pattern j,
    /// so 64 patterns are simulated per pass. `pi_words` follows the primary
    /// input order; the result holds one word per signal, primary inputs
    /// first, then gates in declaration order.
    pub fn eval_words(&self, pi_words: &[u64]) -> Vec<u64> {
        assert_eq!(pi_words.len(), self.pis.len(), "one word per primary input");
        let mut values = vec![0u64; self.pis.len() + self.gates.len()];
        values[..self.pis.len()].copy_from_slice(pi_words);
        let mut buf = Vec::new();
        for &gi in &self.topo {
            let g = &self.gates[gi];
            buf.clear();
            for f in &g.fanins {
                let w = match self.index[f] {
                    SignalRef::Pi(i) => values[i],
                    SignalRef::Gate(i) => values[self.pis.len() + i],
                };
                buf.push(w);
            }
            values[self.pis.len() + gi] = g.kind.eval_words(&buf);
        }
        values
    }

    /// Word of a single signal from an `eval_words` result.
    pub fn word_of(&self, values: &[u64], name: &str) -> Option<u64> {
        match self.index.get(name)? {
            SignalRef::Pi(i) => Some(values[*i]),
            SignalRef::Gate(i) => Some(values[self.pis.len() + i]),
        }
    }

    /// Batch evaluation, elementwise equal to `simulate`.
    pub fn simulate_batch(
        &self,
        inputs: &[Assignment],
    ) -> Result<Vec<Assignment>, NetlistError> {
        let mut results = Vec::with_capacity(inputs.len());
        for chunk in inputs.chunks(64) {
            let mut pi_words = vec![0u64; self.pis.len()];
            for (j, asn) in chunk.iter().enumerate() {
                for (i, pi) in self.pis.iter().enumerate() {
                    let b = *asn
                        .get(pi)
                        .ok_or_else(|| NetlistError::MissingInput(pi.clone()))?;
                    if b {
                        pi_words[i] |= 1u64 << j;
                    }
                }
            }
            let values = self.eval_words(&pi_words);
            for j in 0..chunk.len() {
                let mut out = Assignment::new();
                for po in &self.pos {
                    let w = self.word_of(&values, po).unwrap();
                    out.insert(po.clone(), w >> j & 1 == 1);
                }
                results.push(out);
            }
        }
        Ok(results)
    }

    /// All gates and primary inputs on some path into `node`. A primary
    /// input has an empty gate set and itself as the only cone input.
    pub fn fanin_cone(
        &self,
        node: &str,
    ) -> Result<(BTreeSet<String>, BTreeSet<String>), NetlistError> {
        let start = *self
            .index
            .get(node)
            .ok_or_else(|| NetlistError::UnknownSignal(node.to_string()))?;
        let mut gates = BTreeSet::new();
        let mut pis = BTreeSet::new();
        let mut stack = vec![start];
        let mut seen = HashSet::new();
        while let Some(r) = stack.pop() {
            match r {
                SignalRef::Pi(i) => {
                    pis.insert(self.pis[i].clone());
                }
                SignalRef::Gate(i) => {
                    if !seen.insert(i) {
                        continue;
                    }
                    gates.insert(self.gates[i].name.clone());
                    for f in &self.gates[i].fanins {
                        stack.push(self.index[f]);
                    }
                }
            }
        }
        Ok((gates, pis))
    }

    /// Pick a primary output whose cone spans at least `min_cone_pis`
    /// primary inputs, uniformly at random among the eligible ones.
    pub fn select_target(
        &self,
        min_cone_pis: usize,
        rng: &mut impl Rng,
    ) -> Result<String, NetlistError> {
        let mut eligible = Vec::new();
        let mut max_available = 0;
        for po in &self.pos {
            let (_, pis) = self.fanin_cone(po)?;
            max_available = max_available.max(pis.len());
            if pis.len() >= min_cone_pis {
                eligible.push(po.clone());
            }
        }
        if eligible.is_empty() {
            return Err(NetlistError::NoEligibleOutput {
                required: min_cone_pis,
                max_available,
            });
        }
        let pick = rng.gen_range(0..eligible.len());
        Ok(eligible.swap_remove(pick))
    }

    /// Rewire every consumer of `node` (gates and output bindings) to a new
    /// gate `fresh_name = XOR(node, other)`.
    pub fn splice_xor(
        &self,
        node: &str,
        other: &str,
        fresh_name: &str,
    ) -> Result<Circuit, NetlistError> {
        self.splice_gate(node, other, fresh_name, GateKind::Xor)
    }

    pub(crate) fn splice_gate(
        &self,
        node: &str,
        other: &str,
        fresh_name: &str,
        kind: GateKind,
    ) -> Result<Circuit, NetlistError> {
        if !self.contains_signal(node) {
            return Err(NetlistError::UnknownSignal(node.to_string()));
        }
        if !self.contains_signal(other) {
            return Err(NetlistError::UnknownSignal(other.to_string()));
        }
        if self.contains_signal(fresh_name) {
            return Err(NetlistError::NameCollision(fresh_name.to_string()));
        }
        // `other` must not depend on `node`, else the new gate closes a loop.
        if !self.is_primary_input(other) {
            let (gates, _) = self.fanin_cone(other)?;
            if other == node || gates.contains(node) {
                return Err(NetlistError::SpliceCycle {
                    node: node.to_string(),
                    other: other.to_string(),
                });
            }
        }
        let mut gates: Vec<Gate> = self
            .gates
            .iter()
            .map(|g| {
                let mut g = g.clone();
                for f in &mut g.fanins {
                    if f == node {
                        *f = fresh_name.to_string();
                    }
                }
                g
            })
            .collect();
        gates.push(Gate {
            name: fresh_name.to_string(),
            kind,
            fanins: vec![node.to_string(), other.to_string()],
        });
        let pos = self
            .pos
            .iter()
            .map(|p| {
                if p == node {
                    fresh_name.to_string()
                } else {
                    p.clone()
                }
            })
            .collect();
        Circuit::new(self.pis.clone(), pos, gates)
    }
}

fn toposort(
    gates: &[Gate],
    index: &HashMap<String, SignalRef>,
) -> Result<Vec<usize>, NetlistError> {
    let mut indegree = vec![0usize; gates.len()];
    let mut fanouts: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for f in &g.fanins {
            if let SignalRef::Gate(j) = index[f] {
                indegree[i] += 1;
                fanouts[j].push(i);
            }
        }
    }
    let mut ready: Vec<usize> = (0..gates.len()).filter(|&i| indegree[i] == 0).collect();
    ready.reverse(); // pop from the back keeps declaration order
    let mut order = Vec::with_capacity(gates.len());
    while let Some(i) = ready.pop() {
        order.push(i);
        for &j in &fanouts[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len())
            .find(|&i| indegree[i] > 0)
            .map(|i| gates[i].name.clone())
            .unwrap_or_default();
        return Err(NetlistError::Cycle(stuck));
    }
    Ok(order)
}

/// Fixed-width bit string. Bit `i` pairs with the `i`-th name of whatever
/// ordered name list the vector travels with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn zeros(width: usize) -> BitVector {
        BitVector {
            bits: vec![false; width],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> BitVector {
        BitVector { bits }
    }

    /// Low `width` bits of `value`, bit 0 first.
    pub fn from_u64(width: usize, value: u64) -> BitVector {
        assert!(width <= 64);
        BitVector {
            bits: (0..width).map(|i| value >> i & 1 == 1).collect(),
        }
    }

    pub fn random(width: usize, rng: &mut impl Rng) -> BitVector {
        BitVector {
            bits: (0..width).map(|_| rng.gen()).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.bits[i] = b;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.width() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)
    }

    /// Hex rendering, most significant digit first; bit 0 is the least
    /// significant bit of the value.
    pub fn to_hex(&self) -> String {
        if self.bits.is_empty() {
            return "0".to_string();
        }
        let digits = self.bits.len().div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for k in 0..4 {
                let i = d * 4 + k;
                if i < self.bits.len() && self.bits[i] {
                    nib |= 1 << k;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    /// Concatenate, `self` bits first.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitVector { bits }
    }

    /// Pair the bits with an equally long name list.
    pub fn assignment(&self, names: &[String]) -> Assignment {
        assert_eq!(names.len(), self.width(), "bit width must match name list");
        names
            .iter()
            .zip(self.bits.iter())
            .map(|(n, &b)| (n.clone(), b))
            .collect()
    }

    pub fn from_assignment(names: &[String], asn: &Assignment) -> BitVector {
        BitVector {
            bits: names.iter().map(|n| asn[n]).collect(),
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Incremental construction of circuits, used by the locking transforms.
/// Fresh names come from a `g<seq>` counter that skips collisions.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    pis: Vec<String>,
    pos: Vec<String>,
    gates: Vec<Gate>,
    names: HashSet<String>,
    seq: u64,
}

impl CircuitBuilder {
    pub fn from_circuit(c: &Circuit) -> CircuitBuilder {
        let mut names = HashSet::new();
        for pi in &c.pis {
            names.insert(pi.clone());
        }
        for g in &c.gates {
            names.insert(g.name.clone());
        }
        CircuitBuilder {
            pis: c.pis.clone(),
            pos: c.pos.clone(),
            gates: c.gates.clone(),
            names,
            seq: 0,
        }
    }

    /// Start the fresh-name counter at an arbitrary offset so generated
    /// names do not line up across designs.
    pub fn seed_namer(&mut self, offset: u64) {
        self.seq = offset;
    }

    pub fn fresh(&mut self) -> String {
        loop {
            let name = format!("g{}", self.seq);
            self.seq += 1;
            if !self.names.contains(&name) {
                return name;
            }
        }
    }

    pub fn add_pi(&mut self, name: &str) -> Result<(), NetlistError> {
        if !self.names.insert(name.to_string()) {
            return Err(NetlistError::NameCollision(name.to_string()));
        }
        self.pis.push(name.to_string());
        Ok(())
    }

    pub fn add_named_gate(
        &mut self,
        name: &str,
        kind: GateKind,
        fanins: Vec<String>,
    ) -> Result<String, NetlistError> {
        if !self.names.insert(name.to_string()) {
            return Err(NetlistError::NameCollision(name.to_string()));
        }
        self.gates.push(Gate {
            name: name.to_string(),
            kind,
            fanins,
        });
        Ok(name.to_string())
    }

    /// Add a gate under a fresh generated name and return that name.
    pub fn gate(&mut self, kind: GateKind, fanins: Vec<String>) -> String {
        let name = self.fresh();
        self.gates.push(Gate {
            name: name.clone(),
            kind,
            fanins,
        });
        name
    }

    /// Rewire consumers of `from` to read `to` instead. Gates listed in
    /// `except` keep their original fanins; output bindings follow too.
    pub fn redirect(&mut self, from: &str, to: &str, except: &[&str]) {
        for g in &mut self.gates {
            if except.contains(&g.name.as_str()) {
                continue;
            }
            for f in &mut g.fanins {
                if f == from {
                    *f = to.to_string();
                }
            }
        }
        for p in &mut self.pos {
            if p == from {
                *p = to.to_string();
            }
        }
    }

    pub fn build(self) -> Result<Circuit, NetlistError> {
        Circuit::new(self.pis, self.pos, self.gates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// The four-gate circuit used across the test suite:
    /// n1 = AND(a, b); n2 = OR(c, d); y = XOR(n1, n2).
    pub(crate) fn toy() -> Circuit {
        parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(y)\n\
             n1 = AND(a, b)\nn2 = OR(c, d)\ny = XOR(n1, n2)",
        )
        .unwrap()
    }

    fn asn(pairs: &[(&str, bool)]) -> Assignment {
        pairs.iter().map(|(n, b)| (n.to_string(), *b)).collect()
    }

    #[test]
    fn simulate_toy_by_hand() {
        let c = toy();
        let out = c
            .simulate(&asn(&[("a", true), ("b", true), ("c", false), ("d", false)]))
            .unwrap();
        assert_eq!(out["y"], true);
        let out = c
            .simulate(&asn(&[("a", false), ("b", false), ("c", false), ("d", false)]))
            .unwrap();
        assert_eq!(out["y"], false);
    }

    #[test]
    fn simulate_missing_input_errors() {
        let c = toy();
        let err = c.simulate(&asn(&[("a", true)])).unwrap_err();
        assert!(matches!(err, NetlistError::MissingInput(_)));
    }

    /// Independent oracle: memoized recursive evaluation straight off the
    /// gate definitions, no topological order involved.
    fn recursive_eval(c: &Circuit, input: &Assignment, name: &str, memo: &mut Assignment) -> bool {
        if let Some(&v) = input.get(name) {
            return v;
        }
        if let Some(&v) = memo.get(name) {
            return v;
        }
        let g = c.gate(name).expect("signal must be a gate");
        let fanins: Vec<bool> = g
            .fanins
            .iter()
            .map(|f| recursive_eval(c, input, f, memo))
            .collect();
        let v = g.kind.eval(&fanins);
        memo.insert(name.to_string(), v);
        v
    }

    #[test]
    fn simulate_matches_recursive_oracle_on_random_vectors() {
        let c = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let inputs: Vec<Assignment> = (0..1000)
            .map(|_| {
                c.primary_inputs()
                    .iter()
                    .map(|pi| (pi.clone(), rng.gen()))
                    .collect()
            })
            .collect();
        let batch = c.simulate_batch(&inputs).unwrap();
        for (input, got) in inputs.iter().zip(&batch) {
            let mut memo = Assignment::new();
            for po in c.primary_outputs() {
                assert_eq!(got[po], recursive_eval(&c, input, po, &mut memo));
            }
            assert_eq!(&c.simulate(input).unwrap(), got);
        }
    }

    #[test]
    fn batch_of_exhaustive_toy_inputs_is_truth_table() {
        let c = toy();
        let names: Vec<String> = c.primary_inputs().to_vec();
        let inputs: Vec<Assignment> = (0..16u64)
            .map(|v| BitVector::from_u64(4, v).assignment(&names))
            .collect();
        let outs = c.simulate_batch(&inputs).unwrap();
        for (v, out) in outs.iter().enumerate() {
            let a = v & 1 == 1;
            let b = v >> 1 & 1 == 1;
            let cc = v >> 2 & 1 == 1;
            let d = v >> 3 & 1 == 1;
            assert_eq!(out["y"], (a && b) ^ (cc || d));
        }
        assert!(c.simulate_batch(&[]).unwrap().is_empty());
    }

    #[test]
    fn topo_order_is_linear_extension() {
        let c = toy();
        let order = c.topo_order();
        let pos_of = |n: &str| order.iter().position(|x| x == n).unwrap();
        assert!(pos_of("n1") < pos_of("y"));
        assert!(pos_of("n2") < pos_of("y"));

        // replay check: every fanin is a PI or already seen
        let mut seen = HashSet::new();
        for name in &order {
            let g = c.gate(name).unwrap();
            for f in &g.fanins {
                assert!(c.is_primary_input(f) || seen.contains(f));
            }
            seen.insert(name.clone());
        }
    }

    #[test]
    fn cycle_is_rejected() {
        let gates = vec![
            Gate {
                name: "p".into(),
                kind: GateKind::And,
                fanins: vec!["q".into(), "a".into()],
            },
            Gate {
                name: "q".into(),
                kind: GateKind::And,
                fanins: vec!["p".into(), "a".into()],
            },
        ];
        let err = Circuit::new(vec!["a".into()], vec!["p".into()], gates).unwrap_err();
        assert!(matches!(err, NetlistError::Cycle(_)));
    }

    #[test]
    fn fanin_cone_toy() {
        let c = toy();
        let (gates, pis) = c.fanin_cone("y").unwrap();
        assert_eq!(
            pis,
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(
            gates,
            ["n1", "n2", "y"].iter().map(|s| s.to_string()).collect()
        );
        let (_, pis) = c.fanin_cone("n1").unwrap();
        assert_eq!(pis, ["a", "b"].iter().map(|s| s.to_string()).collect());
        let (gates, pis) = c.fanin_cone("a").unwrap();
        assert!(gates.is_empty());
        assert_eq!(pis, ["a"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn cone_monotone_along_fanout() {
        let c = toy();
        for g in c.gates() {
            let (_, sub) = c.fanin_cone(&g.name).unwrap();
            for f in &g.fanins {
                let (_, fs) = c.fanin_cone(f).unwrap();
                assert!(fs.is_subset(&sub));
            }
        }
    }

    #[test]
    fn select_target_toy() {
        let c = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        assert_eq!(c.select_target(4, &mut rng).unwrap(), "y");
        match c.select_target(5, &mut rng).unwrap_err() {
            NetlistError::NoEligibleOutput {
                required,
                max_available,
            } => {
                assert_eq!(required, 5);
                assert_eq!(max_available, 4);
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn splice_with_constants() {
        let c = toy();
        // x ^ 0 = x
        let mut b = CircuitBuilder::from_circuit(&c);
        let z = b.gate(GateKind::Const0, vec![]);
        let c0 = b.build().unwrap();
        let spliced = c0.splice_xor("y", &z, "ylk").unwrap();
        let names: Vec<String> = c.primary_inputs().to_vec();
        for v in 0..16u64 {
            let input = BitVector::from_u64(4, v).assignment(&names);
            assert_eq!(
                c.simulate(&input).unwrap()["y"],
                spliced.simulate(&input).unwrap()["ylk"]
            );
        }
        // x ^ 1 = !x
        let mut b = CircuitBuilder::from_circuit(&c);
        let one = b.gate(GateKind::Const1, vec![]);
        let c1 = b.build().unwrap();
        let spliced = c1.splice_xor("y", &one, "ylk").unwrap();
        for v in 0..16u64 {
            let input = BitVector::from_u64(4, v).assignment(&names);
            assert_eq!(
                c.simulate(&input).unwrap()["y"],
                !spliced.simulate(&input).unwrap()["ylk"]
            );
        }
    }

    #[test]
    fn splice_internal_node_with_fresh_pi() {
        let c = toy();
        let mut b = CircuitBuilder::from_circuit(&c);
        b.add_pi("p").unwrap();
        let c2 = b.build().unwrap();
        let spliced = c2.splice_gate("n1", "p", "n1x", GateKind::Xor).unwrap();
        let names: Vec<String> = spliced.primary_inputs().to_vec();
        for v in 0..32u64 {
            let input = BitVector::from_u64(5, v).assignment(&names);
            let got = spliced.simulate(&input).unwrap()["y"];
            let a = input["a"];
            let bb = input["b"];
            let cc = input["c"];
            let d = input["d"];
            let p = input["p"];
            assert_eq!(got, ((a && bb) ^ p) ^ (cc || d));
        }
    }

    #[test]
    fn splice_cycle_detected() {
        let c = toy();
        let err = c.splice_gate("n1", "y", "bad", GateKind::Xor).unwrap_err();
        assert!(matches!(err, NetlistError::SpliceCycle { .. }));
        let err = c.splice_gate("n1", "n2", "n2", GateKind::Xor).unwrap_err();
        assert!(matches!(err, NetlistError::NameCollision(_)));
    }

    #[test]
    fn bitvector_hex_and_u64() {
        let bv = BitVector::from_u64(8, 0xa5);
        assert_eq!(bv.to_u64(), 0xa5);
        assert_eq!(bv.to_hex(), "a5");
        assert_eq!(bv.to_string(), "10100101");
        let bv = BitVector::from_u64(5, 0b10011);
        assert_eq!(bv.to_hex(), "13");
    }
}

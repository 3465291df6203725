//! locklab: a workbench for locking combinational bench netlists and
//! measuring how the locked designs hold up against oracle-guided and
//! structural attacks.
//!
//! The crate is organized around five pieces:
//! * [`netlist`] — bench parsing, simulation, cone analysis and the
//!   structural blend pass that stands in for logic synthesis;
//! * [`cnf`] — Tseitin encoding, attack and equivalence miters, and the
//!   propositional solver interface;
//! * [`locking`] — the locking transforms (RLL, Anti-SAT, SARLock, TTLock,
//!   CAC, Double CAC, PPI obfuscation, CAC 2.0);
//! * [`attacks`] — the oracle-guided SAT attack, brute-force key search,
//!   mapping/removal probes and corruption measurement;
//! * [`analysis`] — experiment sweeps and report files.

pub mod analysis;
pub mod attacks;
pub mod cli;
pub mod cnf;
pub mod locking;
pub mod netlist;

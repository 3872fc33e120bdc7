//! Bounded model checking of MITL properties (one-sided time bounds) for
//! networks of timed automata over super-dense time.

pub mod formula;
pub mod ratset;
pub mod trace;

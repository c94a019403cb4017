//! Ordered Büchi automata: tiles, determinization to parity automata,
//! translations and oracle-backed checks on ultimately-periodic words.

pub mod automata;
pub mod cli;
pub mod convert;
pub mod determinize;
pub mod error;
pub mod io;
pub mod samples;
pub mod tile;
pub mod verify;

pub use automata::{
    dpa_member_up, npa_member_up, npa_member_up_literal, oba_member_up, omega_power_accepts, residual_initial_set,
    Morphism, OrderedBuchiAutomaton, ParityAutomaton, ParityTransition, Symbol, UpLanguage, UpWord, ValidationReport,
};
pub use convert::{
    build_eps_tree, check_eps_complete, horizontal_complete_alphabet, intertwine, parity_to_oba, rabin_to_oba,
    EpsReport, EpsTree, EpsViolation, RabinPair, RabinSpec,
};
pub use determinize::{
    candidate_records, delta, determinize, eps_complete_det, initial_record, reachable_residuals, record_count_bound,
    Determinization, Record,
};
pub use error::{Error, Result};
pub use tile::{State, StateUniverse, Tile, Transition};
pub use verify::{check_local_preference, equiv_up, skeleton_oracle, Equivalence, GenBuchi};

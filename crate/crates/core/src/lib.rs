//! Detection and counting of string regularities — runs (maximal
//! repetitions), square occurrences, gapped palindromes — plus
//! longest-common-extension and pattern-occurrence queries, all computed
//! directly on grammar-compressed strings without decompressing them.
//!
//! Strings are represented as straight-line programs (SLPs): context-free
//! grammars in Chomsky normal form deriving exactly one string. All query
//! answers are exact and are kept in compact, verifiable encodings
//! (arithmetic progressions of occurrences, quintuplet families of runs,
//! linear families of palindromes).

pub mod ap_match;
pub mod doubling;
pub mod grammar_io;
pub mod interval_queries;
pub mod lce;
pub mod reference_oracle;
pub mod regularities;
pub mod slp_core;

pub use ap_match::{compute_ap_table, local_search, ApTable, ArithProg, Ratio};
pub use doubling::{prefix_chain_stats, suffix_chain_stats, ChainStats};
pub use grammar_io::{
    add_sentinels, build_balanced_slp, concat_slps, parse_slp, reverse_slp, serialize_slp,
    substring_slp, ParseError,
};
pub use interval_queries::{
    count_gpals_in, count_runs_in, count_squares_in, interval_report, IntervalCountReport,
    TypeBreakdown,
};
pub use lce::{LceDirection, LceEngine};
pub use regularities::{
    all_gpals, all_runs, count_square_occurrences, expand_gpals, expand_runs, CompactGPals,
    CompactRuns, GPalGroup, GappedPal, Run, RunQuintuplet,
};
pub use slp_core::{Interval, NodeLocator, Pos, Production, Slp, SlpError, VarId};

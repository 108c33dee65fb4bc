pub mod alpha;
pub mod av;
pub mod cli;
pub mod envmatch;
pub mod freshness;
pub mod graph;
pub mod matching;
pub mod name;
pub mod oracle;
pub mod pattern;
pub mod perm;
pub mod permgroup;
pub mod sexp;
pub mod syntax;
pub mod term;
pub mod unify;

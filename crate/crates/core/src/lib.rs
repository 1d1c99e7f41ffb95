pub mod choosability;
pub mod cli;
pub mod engine;
pub mod gen;
pub mod graph;
pub mod lists;
pub mod local;
pub mod structure;

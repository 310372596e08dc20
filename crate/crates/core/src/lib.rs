pub mod coloring;
pub mod embedding;
pub mod graph;
pub mod graph6;
pub mod solver;
pub mod classify;
pub mod discharge;
pub mod lemmas;

//! Cellular automata over finitely generated groups.
//!
//! The library works with finite alphabets (plain sets, finite groups and
//! `F_p`-vector spaces) over finite groups, free abelian groups `Z^d` and
//! free groups. Infinite configurations are never stored: every question is
//! asked of a finite window map or of the automaton's action on periodic
//! configurations, and every answer is a [`Verdict`] carrying a witness that
//! [`replay`] can check without searching.

pub mod alphabets;
pub mod ca;
pub mod cli;
pub mod deciders;
pub mod error;
pub mod exact_1d;
pub mod fp;
pub mod group_ring;
pub mod groups;
pub mod lattice;
pub mod records;
pub mod replay;
pub mod verdict;

pub use error::{GcaError, Result};
pub use verdict::{Status, Verdict, Witness};

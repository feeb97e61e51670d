//! Exact workbench for centrally extended preprojective algebras of ADE
//! quivers: graded quotients, trace functionals, centers, commutator
//! quotients, and the matching nilpotent Lie algebra computations.

#![allow(clippy::needless_range_loop)]

pub mod exactlin;
pub mod gradealg;
pub mod lietheory;
pub mod rootsys;
pub mod traceform;
pub mod verify;

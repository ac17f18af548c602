//! Quantum relations and noncommutative graphs on finite-dimensional
//! *-algebras.
//!
//! A quantum relation on a unital *-algebra `M ⊆ M_m` is an operator space
//! `V ⊆ M_m` that is a bimodule over the commutant `M'`. The crate builds
//! such spaces, moves them along completely positive maps, checks
//! Knill-Laflamme conditions and constructs separating witnesses.
//!
//! Every "equals zero" decision goes through a [`Tolerance`].

pub mod algebra;
pub mod channel;
pub mod classical;
pub mod cli;
pub mod error;
pub mod format;
pub mod linalg;
pub mod random;
pub mod relation;
pub mod space;
pub mod transport;
pub mod witness;

pub use algebra::{Compression, StarAlgebra};
pub use channel::{classical_channel, compose, CPMap};
pub use classical::ClassicalRelation;
pub use error::{Error, Result};
pub use linalg::{
    hermitian_eig, hs_inner, join, kron, range_projection, vanishes, ComplexMatrix, HermitianEigen,
    Projection, Tolerance, C64,
};
pub use relation::{
    bimodule_closure, classical_to_quantum, diagonal_relation, is_bimodule, quantum_to_classical,
    QuantumRelation, RelationProperties, Restriction,
};
pub use space::OperatorSpace;
pub use transport::{
    bipartite_connects, bipartite_graph, confusability, dual_confusability, is_cp_morphism,
    kl_check, pullback, pushforward, KlReport, MorphismVerdict,
};
pub use witness::{
    recover_space, separate_projections, separate_vectors, WitnessProjections, WitnessVectors,
};

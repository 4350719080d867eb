//! Finite-window models of Zappa-Szép products of semigroups, product
//! systems of C*-correspondences, Zappa-Szép actions on them and their
//! truncated Fock representations, with exhaustive axiom checkers.

pub mod action;
pub mod bowtie;
pub mod error;
pub mod generators;
pub mod module;
pub mod product_system;
pub mod rep;
pub mod report;
pub mod scalar;
pub mod semigroup;
pub mod zs;

pub use action::{is_homogeneous, validate_zs_action, BetaSource, ZsSystem};
pub use bowtie::{build_bowtie, build_crossed_product, build_tilde_bowtie, BowtieSystem, CrossedProduct, TildeBowtieSystem};
pub use error::{AlgebraError, Result};
pub use generators::{cal_e_system, kgraph_system, selfsimilar_beta, trivial_system, Convention, KGraph, SelfSimilarKGraphAction};
pub use module::{validate_correspondence, Correspondence};
pub use product_system::{check_compactly_aligned, validate_product_system, IndexWindow, LcmEntry, ProductSystem};
pub use rep::{
    build_fock_rep, build_fock_unitary, check_cp_equivalence, check_iota, check_nica, check_nica_equivalence, cp_defect, fock_for_system, iota,
    nica_check, pi_backward, pi_forward, pi_tilde_backward, pi_tilde_forward, transport_rep, validate_covariance, validate_toeplitz,
    validate_unitary_rep, FockState, JointRep, SafeDomain, ToeplitzRep, UnitaryRep,
};
pub use report::{Tally, Violation, ViolationReport};
pub use scalar::{ComplexMatrix, FiniteCStarAlgebra, Tolerance};
pub use semigroup::{Ball, Group, GroupElement, IndexMonoid, Semigroup, SemigroupElement};
pub use zs::{odometer_zs, zs_axiom_check, ZsData, ZsElement, ZsProduct};

//! Incidence algebras of finite connected posets: ½-derivations of their
//! commutator Lie algebras and transposed Poisson structures.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod golden;
pub mod halfder;
pub mod linalg;
pub mod oracle;
pub mod poset;
pub mod rational;
pub mod tpstruct;

pub use algebra::{canonical_bases, CanonicalBases, ElementRecord, IncidenceElement, SubspaceBasis};
pub use error::{Error, Result};
pub use poset::{Elem, Pair, Poset, Walk};
pub use rational::Q;
pub use halfder::{
    decompose, half_derivation_dimension, half_derivation_space, is_admissible, predicted_dimension, structural_basis,
    CentralElement, HalfDerDecomposition, KappaMap, LinearOperator, SigmaMap, DEFAULT_ORACLE_CAP,
};
pub use tpstruct::{
    decompose_tp, lambda_structure, mutational, normalize_nu, poisson_type, random_tp, random_tp_params, verify_tp,
    LambdaMap, MuMap, RandomTpConfig, Rescaling, TPDecomposition, TPProduct, VerifyReport,
};

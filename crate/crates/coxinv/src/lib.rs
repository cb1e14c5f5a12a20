//! Symbolic computation of mod-2 cohomological invariants of Weyl groups of
//! classical type.
//!
//! The crate models the fragment of mod-2 Galois cohomology generated by
//! square-class symbols ([`symbols`]), classical root systems and their Weyl
//! groups as signed permutations ([`coxeter`]), pointed étale algebras as
//! torsor models ([`torsors`]), Stiefel-Whitney invariants and their
//! fingerprints on the canonical versal family ([`stiefel`]), and
//! machine-checkable verification suites for the classical basis,
//! restriction and vanishing statements ([`verify`]), backed by exact
//! linear algebra over F2 ([`f2mat`]).

pub mod config;
pub mod coxeter;
pub mod f2mat;
pub mod stiefel;
pub mod symbols;
pub mod torsors;
pub mod verify;

pub use config::{Caps, Config};
pub use stiefel::{Fingerprint, InvariantExpr, InvariantType};
pub use symbols::{CohClass, ContextBuilder, Monomial, SquareClass, SymbolContext};
pub use torsors::{QuadraticForm, Torsor};
pub use verify::{VerificationReport, VerifyError};

// contexts are immutable after construction and every value type is plain
// data, so everything is shareable across threads
const _: () = {
    const fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<SymbolContext>();
    assert_send_sync::<CohClass>();
    assert_send_sync::<SquareClass>();
    assert_send_sync::<Torsor>();
    assert_send_sync::<Fingerprint>();
    assert_send_sync::<coxeter::ReflectionSubgroup>();
    assert_send_sync::<VerificationReport>();
};

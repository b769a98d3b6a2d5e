//! Exact arithmetic and verification machinery for chiral and regular
//! polytopes whose rotation or automorphism groups live in PSL(3,q).
//!
//! The crate is layered bottom-up:
//!
//! - [`gf`]: the finite fields GF(p^n)
//! - [`linalg`]: Gaussian elimination over those fields
//! - [`projmat`]: PGL(3,q), the projective plane PG(2,q) and quadratic forms
//! - [`grp`]: closure, Schreier-Sims, membership and intersection
//! - [`cgroup`]: string property, intersection properties, Schläfli types, chirality
//! - [`catalogue`]: the explicit generator families
//! - [`verify`]: end-to-end verification producing serializable reports

pub mod catalogue;
pub mod cgroup;
pub mod gf;
pub mod grp;
pub mod linalg;
pub mod projmat;
pub mod verify;

pub use gf::{make_field, Fe, Field, FieldElement, FieldError, FieldSpec};
pub use projmat::{Pgl3, ProjMatrix, QuadraticForm};

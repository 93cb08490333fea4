//! Certifying NP-hardness of promise constraint satisfaction templates.
//!
//! The pipeline: define a relation in each template structure by a
//! pp-formula, build the complex of maximal boxes on its tuples, present
//! the edge-path group of the target complex, and exhibit a cyclic
//! symmetry together with a symmetric cycle whose image under every
//! polymorphism stays essential. When all hypotheses check out the
//! certifier emits a machine-readable certificate; each hypothesis is
//! verified independently and failures carry concrete witnesses.

pub mod complexes;
pub mod corpus;
pub mod groups;
pub mod mu;
pub mod polymorphisms;
pub mod structures;

pub mod certifier;

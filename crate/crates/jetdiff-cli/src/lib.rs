//! Library surface of the CLI crate: the expression parser, shared
//! with integration tests.

pub mod expr;

//! Numerical laboratory for lower bounds on the Morse index of closed minimal
//! hypersurfaces in terms of their first Betti number.

// `!(x > 0.0)` is deliberate: NaN must fail positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ambient;
pub mod bounds;
pub mod cli;
pub mod hypersurface;
pub mod error;
pub mod numerics;
pub mod hodge;
pub mod spectral;
pub mod testfns;

pub use error::{LabError, Result};

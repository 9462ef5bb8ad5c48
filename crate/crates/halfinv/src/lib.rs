//! Half-inverse Sturm-Liouville solver.
//!
//! Given the potential of `-y'' + q y = lambda y` on the right half of
//! `(0, 2pi)`, the far Robin coefficient, and a prefix of the spectrum of
//! the full problem, this crate reconstructs the potential on the left
//! half and the near Robin coefficient — and measures, empirically, how
//! stably it does so.
//!
//! The pieces, in the order the solver uses them:
//!
//! * [`sl_direct`] — the direct engine: a fixed-step integrator whose cost
//!   scales with `sqrt(|lambda|)`, characteristic values computed along two
//!   algebraic routes that must agree, and bracketed eigenvalue searches in
//!   the `lambda` plane (negative eigenvalues are first-class).
//! * [`asymptotics`] — the exact split of a spectrum prefix into its
//!   constant term and square-summable remainder, the mixed-data distance,
//!   and the a-priori ball norms.
//! * [`char_product`] — the characteristic function rebuilt from its zeros
//!   as a ratio against the free problem, plus kernel extraction from
//!   samples at the frequencies where boundary terms collapse.
//! * [`moment_solver`] — truncated nonharmonic moment problems on
//!   `(0, pi)` solved through closed-form Gram matrices, with the extreme
//!   singular values exposed as the conditioning diagnostic.
//! * [`cauchy_inverse`] — boundary functions from Cauchy data, eigenvalue
//!   and norming-constant extraction, and the integral-equation
//!   reconstruction of the potential.
//! * [`pipeline`] — the five-stage solve, data synthesis, and seeded
//!   stability sweeps.
//!
//! The companion guide under `book/` walks through each stage with
//! runnable examples; its code blocks compile and run as part of
//! `cargo test --doc`.

pub mod asymptotics;
pub mod cauchy_inverse;
pub mod char_product;
pub mod error;
pub mod grid;
pub mod moment_solver;
pub mod pipeline;
pub mod sl_direct;
pub mod trig;

pub use error::{PipelineError, Result, SolverError};

// Run the guide's code blocks as doc-tests so the book cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/direct-problem.md")]
    pub mod direct_problem {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    pub mod spectra {}
    #[doc = include_str!("../../../book/src/characteristic-function.md")]
    pub mod characteristic_function {}
    #[doc = include_str!("../../../book/src/moment-problems.md")]
    pub mod moment_problems {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    pub mod reconstruction {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    pub mod pipeline_guide {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}

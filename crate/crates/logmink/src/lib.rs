//! Solver and verification toolkit for the discrete logarithmic Minkowski
//! problem: given a discrete measure on the unit sphere, decide whether it
//! satisfies the essential subspace concentration condition and, if so,
//! construct a polytope whose cone-volume measure equals the input.
//!
//! The crate is organised around the pipeline
//!
//! 1. [`measure`] — discrete spherical measures and every hypothesis check
//!    (hemisphere concentration, general position, essential subspaces,
//!    the concentration condition itself);
//! 2. [`geometry`] — a low-dimensional convex polytope kernel (halfspace
//!    intersection by polar duality, facet areas, volumes, cone-volume
//!    measures, direct sums, linear images);
//! 3. [`logcenter`] — the strictly concave log-functional Φ_P and its unique
//!    interior maximizer ξ(P), found by damped Newton iteration;
//! 4. [`solver`] — the outer variational descent over support vectors that
//!    drives the cone-volume measure of the iterate onto the target;
//! 5. [`splitter`] — the full existence pipeline, recursing into
//!    complementary subspaces when the condition holds with equality;
//! 6. [`inequalities`] — the opposite-facet cone-volume inequalities, their
//!    equality cases, and the truncated-pyramid family.
//!
//! A narrative guide with runnable snippets lives in `book/`; its code
//! blocks are compiled as doc-tests (see `book_doctests`).
//!
//! ```
//! use logmink::measure::DiscreteMeasure;
//! use logmink::splitter;
//!
//! // Unit weights on ±e1, ±e2: the cone-volume measure of [-1,1]^2.
//! let m = DiscreteMeasure::from_rows(
//!     2,
//!     &[
//!         (vec![1.0, 0.0], 1.0),
//!         (vec![-1.0, 0.0], 1.0),
//!         (vec![0.0, 1.0], 1.0),
//!         (vec![0.0, -1.0], 1.0),
//!     ],
//! )
//! .unwrap();
//! let p = splitter::solve(&m).unwrap();
//! assert!((p.volume() - 4.0).abs() < 1e-9);
//! ```

pub mod geometry;
pub mod hemisphere;
pub mod inequalities;
pub mod io;
pub mod linalg;
pub mod logcenter;
pub mod measure;
pub mod sampling;
pub mod simplex;
pub mod solver;
pub mod splitter;

mod book_doctests;

pub use geometry::{FacetData, Polytope};
pub use measure::{ConditionStatus, ConditionVerdict, DiscreteMeasure, SubspaceReport};
pub use solver::{SolveOptions, SolveTrace};

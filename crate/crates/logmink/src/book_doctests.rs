//! Compiles the code blocks of the mdbook guide as doc-tests so the book
//! can never drift from the library API.

#![allow(unused)]

#[cfg(doctest)]
macro_rules! book_chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub struct $name;
    };
}

#[cfg(doctest)]
book_chapter!(Introduction, "../../../book/src/introduction.md");
#[cfg(doctest)]
book_chapter!(Measures, "../../../book/src/measures.md");
#[cfg(doctest)]
book_chapter!(Polytopes, "../../../book/src/polytopes.md");
#[cfg(doctest)]
book_chapter!(LogCenter, "../../../book/src/log-center.md");
#[cfg(doctest)]
book_chapter!(Solver, "../../../book/src/solver.md");
#[cfg(doctest)]
book_chapter!(Splitting, "../../../book/src/splitting.md");
#[cfg(doctest)]
book_chapter!(Inequalities, "../../../book/src/inequalities.md");

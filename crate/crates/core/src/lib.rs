pub mod correspondence;
pub mod cstar;
pub mod error;
pub mod hilbmod;
pub mod matcore;
pub mod graph;
pub mod repcert;
pub mod sample;
pub mod cli;
pub mod selftest;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/algebras-and-modules.md")]
    struct AlgebrasAndModules;
    #[doc = include_str!("../../../book/src/correspondences.md")]
    struct Correspondences;
    #[doc = include_str!("../../../book/src/graphs.md")]
    struct Graphs;
    #[doc = include_str!("../../../book/src/certificate.md")]
    struct Certificate;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}

//! Numerical checks of the hypotheses behind the dimension formula: local
//! ubiquity of the resonant systems and a mass distribution on a Cantor subset.

mod holder;
mod masstree;
mod ubiquity;

pub use holder::{ball_mass, holder_test, HolderBin, HolderReport};
pub use masstree::{
    assign_mass, build_mass_tree, check_conservation, check_containment, check_separation,
    plan_stages, MassTree, Node, NodeKind, Stage, TreeConfig,
};
pub use ubiquity::{
    min_covering_level, ubiquity_coverage, Ball, CoverageMethod, CoverageReport, Rho, SystemKind,
    UbiquitySystemSpec,
};

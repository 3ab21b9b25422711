//! Covering geometry of rectangle levels: singular-function costs, the
//! three-regime cover-count model, and a grid-counting oracle on exactly built
//! shrinking-target levels.

mod model;
mod oracle;
mod singular;

pub use model::{cover_count, critical_exponent, CriticalReport, LevelSpec};
pub use oracle::{
    build_shrinking_level, build_shrinking_level_at, default_resolution,
    empirical_critical_exponent, grid_count, DirectionUnion, EmpiricalReport, GridCount,
    LevelEstimate, LevelRow, ProductIntervalUnion,
};
pub use singular::{singular_cover_cost, RectangleSpec};

//! Composite sustainability index over recovery-plan common indicators.
//!
//! Pipeline: ingest a tidy panel, derive goalposts from pooled distributions,
//! normalize onto 0..=100 with polarity, aggregate by weighted geometric mean,
//! then decompose changes and measure cross-country gaps. The [`mapping`]
//! module reports over the measure to indicator to goal catalog.

pub mod analysis;
pub mod composite;
pub mod config;
pub mod goalposts;
pub mod ingest;
pub mod mapping;
pub mod model;
pub mod normalize;
pub mod pipeline;

pub use model::*;

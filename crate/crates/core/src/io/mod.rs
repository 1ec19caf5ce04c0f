//! Run configuration, CSV tables and SVG figures.

pub mod config;
pub mod svg;
pub mod table;

pub use config::{ChartChoice, RunConfig};
pub use table::{fmt_f64, Cell, Table};

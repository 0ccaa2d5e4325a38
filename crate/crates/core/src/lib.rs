//! Contact representations of fixed-size axis-aligned rectangles.
//!
//! Given boxes with fixed widths and heights and a profit-weighted supporting
//! graph, place the boxes without overlap so that adjacent vertices touch.

pub mod cycle;
pub mod extremal;
pub mod gap;
pub mod geometry;
pub mod graph;
pub mod hier;
pub mod io;
pub mod pipeline;
pub mod rational;
pub mod star;
pub mod triangulation;

pub use geometry::{BoxId, BoxSpec, Contact, Layout, Orientation, Placed};
pub use graph::ProfitGraph;
pub use rational::Q;

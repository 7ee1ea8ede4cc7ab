//! Tournament performance-rating toolkit: file formats, bundled fixtures,
//! report emission, and the `perfeq` command-line interface on top of
//! [`perfeq_core`].

pub mod cli;
pub mod fixtures;
pub mod io;
pub mod realize;
pub mod report;

//! File formats and command-line front end for the seat-allocation
//! engine in `mrda-core`.

pub mod tables_io;

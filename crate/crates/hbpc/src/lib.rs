//! File formats and the command-line driver for `hbpc-core`.
//!
//! * [`fol`]: the `.fol` problem format (parser and printer)
//! * [`mln_file`]: the MLN input format
//! * [`model`]: model files for `hbpc check`
//! * [`report`]: text and JSON reports
//! * [`cli`]: the `hbpc` command

pub mod cli;
pub mod fol;
pub mod lex;
pub mod mln_file;
pub mod model;
pub mod report;

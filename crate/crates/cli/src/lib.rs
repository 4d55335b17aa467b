//! Command-line front end for `srheat-core`: expression parser, frame and
//! structure-constant files, subcommands, and the acceptance suite.

pub mod acceptance;
pub mod cli;
pub mod frame_spec;
pub mod parser;
pub mod structure;

pub use cli::run_cli;
pub use frame_spec::{parse_frame, FrameError, FrameSpec};
pub use parser::{parse_polynomial, ParseError};
pub use structure::StructureSpec;

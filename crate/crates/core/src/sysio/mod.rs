//! Expression and system-file parsing, JSON/CSV output.

mod emit;
mod parse;
mod system;

pub use emit::{emit, fmt_float, poly_from_json, poly_json, EmitError, Format, Record, Table, SCHEMA_VERSION};
pub use parse::{parse_poly, parse_poly_in, ParseError};
pub use system::{
    parse_system, read_system_file, Param, Perturbation, PlanarSystem, ReversibleSplit, SystemError,
    SystemFile,
};

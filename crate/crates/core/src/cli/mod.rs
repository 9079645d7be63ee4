//! Text formats and command dispatch for the `autinv` front end.

pub mod command;
pub mod config;
pub mod parse;
pub mod record;
pub mod render;
pub mod session;

pub use command::{invert_record, run_command, taylor_table, verify_pair, Command, Inputs, Report};
pub use config::{Kind, SessionConfig};
pub use parse::{parse_element, parse_syntax, Ident, SyntaxTree};
pub use record::{parse_automorphism, required_generators, AutMap, AutRecord};
pub use session::{Element, Session};

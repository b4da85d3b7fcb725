//! Parsing, JSON and rendering for every algebra object.

pub mod json;
pub mod parse;
pub mod render;

pub use json::{from_json_str, to_json_string, Json};
pub use parse::{parse_forest, parse_graph, parse_perm, parse_tree, parse_tree_comb};
pub use render::{render, BasisName, Format, Render};

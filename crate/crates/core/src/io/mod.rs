//! Configuration and serialization.

pub mod atlas;
pub mod config;
pub mod csv;
pub mod svg;

pub use atlas::{atlas_jsonl_string, read_atlas_jsonl, write_atlas_jsonl};
pub use config::{parse_config, Outputs, RunConfig, Tolerances};
pub use csv::{format_real, read_trajectory_csv, trajectory_csv_string, write_trajectory_csv};
pub use svg::{render_phase_svg, Plane, SvgOptions};

//! File formats: text inputs and the binary session file.

mod state;
mod text;

pub use state::{read_session, write_session, MAGIC, VERSION};
pub use text::{
    fmt_real, format_update, parse_update, read_graph, read_updates, read_values, write_graph,
    write_updates, write_values,
};

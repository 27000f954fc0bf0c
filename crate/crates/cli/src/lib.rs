//! Library side of the `dfsctl` command-line tool: the channel-file format,
//! report documents and subcommand implementations.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::{DemoCase, DemoOptions, OutputFormat, EXIT_INPUT, EXIT_PASS, EXIT_VIOLATION};
pub use format::{parse_channel_str, read_channel_file, ChannelFile, InputError};
pub use report::{ReportDocument, SampleDocument, VerifyDocument};

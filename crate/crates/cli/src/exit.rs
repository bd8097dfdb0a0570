//! Mapping from failures to process exit codes.

use std::fmt;

pub const USAGE: i32 = 1;
pub const IO: i32 = 2;
pub const DATA: i32 = 3;

/// A bad invocation or configuration.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn code(err: &anyhow::Error) -> i32 {
    use usable_speech::Error as E;
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<toml::de::Error>() {
            return USAGE;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::MissingFile(_) | E::Io { .. } => IO,
                E::Config(_) => USAGE,
                E::Csv(c) if c.is_io_error() => IO,
                _ => DATA,
            };
        }
        if cause.is::<serde_json::Error>() {
            return DATA;
        }
        if cause.is::<std::io::Error>() {
            return IO;
        }
    }
    DATA
}

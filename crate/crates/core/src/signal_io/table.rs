use std::fs::File;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

/// A serializable record with a fixed CSV header.
///
/// The header is declared up front so that an empty row set still produces a
/// header-only file.
pub trait Tabular: Serialize {
    const HEADER: &'static [&'static str];
}

/// Write `rows` as comma-separated values with a header row and LF line endings.
pub fn write_csv<T: Tabular>(rows: &[T], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    writer.write_record(T::HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Read every record of a headed CSV file.
pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use serde::Deserialize;

    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        name: String,
        value: f64,
        maybe: Option<u32>,
    }

    impl Tabular for Row {
        const HEADER: &'static [&'static str] = &["name", "value", "maybe"];
    }

    #[test]
    fn empty_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv::<Row>(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "name,value,maybe\n");
        assert!(read_csv::<Row>(&p).unwrap().is_empty());
    }

    #[test]
    fn rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let rows = vec![
            Row {
                name: "a,b".into(),
                value: 1.0 / 3.0,
                maybe: None,
            },
            Row {
                name: "c".into(),
                value: f64::INFINITY,
                maybe: Some(4),
            },
        ];
        write_csv(&rows, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(!text.contains('\r'));
        assert_eq!(read_csv::<Row>(&p).unwrap(), rows);
    }

    #[test]
    fn unwritable_path() {
        let r = write_csv::<Row>(&[], "/nonexistent-dir/x/y.csv");
        assert!(r.is_err());
    }
}

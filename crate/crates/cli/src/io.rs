use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{input, CliError};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let parsed = if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input(format!("reading standard input: {e}")))?;
        serde_json::from_str(&text)
    } else {
        let file = File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        serde_json::from_reader(BufReader::new(file))
    };
    parsed.map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Standard output when `path` is absent.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
    }
}

/// Pretty JSON plus a trailing newline.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::Solver(format!("serializing output: {e}")))?;
    writeln!(out).and_then(|_| out.flush()).map_err(write_error)
}

pub fn write_error(e: std::io::Error) -> CliError {
    input(format!("writing output: {e}"))
}

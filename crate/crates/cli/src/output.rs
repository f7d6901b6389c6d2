//! Output sinks and number formatting.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

/// Shortest representation that parses back to the same f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn open(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// CSV writer on a file or standard output.
pub struct Sink {
    w: csv::Writer<Box<dyn Write>>,
}

impl Sink {
    pub fn csv(path: &Option<PathBuf>) -> Result<Self> {
        Ok(Sink { w: csv::Writer::from_writer(open(path)?) })
    }

    pub fn row(&mut self, fields: &[&str]) -> Result<()> {
        self.w.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
        let mut w = open(path)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn text(path: &Option<PathBuf>, text: &str) -> Result<()> {
        let mut w = open(path)?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0, -2.5e-300, 1e22, std::f64::consts::PI, 0.035822448] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}

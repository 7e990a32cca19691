use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One emitted document: the JSON form plus a flat table for CSV.
pub struct Doc {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Doc {
    pub fn new(json: Value, header: Vec<&'static str>) -> Self {
        Self {
            json,
            header,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, r: Vec<String>) {
        debug_assert_eq!(r.len(), self.header.len());
        self.rows.push(r);
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_vec_pretty(&self.json).map_err(io::Error::other)?;
                s.push(b'\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.into_inner().map_err(|e| io::Error::other(e.to_string()))
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let bytes = self.render(format)?;
        match out {
            Some(p) => File::create(p)?.write_all(&bytes),
            None => io::stdout().lock().write_all(&bytes),
        }
    }
}

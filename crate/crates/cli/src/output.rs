//! Output plumbing: CSV and JSON writers and the run manifest written next
//! to every output file.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

/// Full-precision CSV cell: 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Self::default();
        csv.row(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let line: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable output");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, P: Serialize, S: Serialize> {
    pub subcommand: &'a str,
    pub argv: Vec<String>,
    pub params: &'a P,
    pub version: &'static str,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
    pub summary: Option<S>,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `output` (or stdout) and, for a file, its manifest.
pub fn emit<P: Serialize, S: Serialize>(
    output: Option<&Path>,
    body: &str,
    subcommand: &str,
    params: &P,
    summary: Option<S>,
    elapsed: Duration,
) -> io::Result<()> {
    let Some(path) = output else {
        let mut out = io::stdout().lock();
        out.write_all(body.as_bytes())?;
        return out.flush();
    };
    fs::write(path, body)?;
    let manifest = Manifest {
        subcommand,
        argv: std::env::args().collect(),
        params,
        version: holistic::VERSION,
        outputs: vec![path.to_path_buf()],
        duration_seconds: elapsed.as_secs_f64(),
        summary,
    };
    fs::write(manifest_path(path), json(&manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -12.0, 1.0 / 3.0, 6.02e23, 5e-324] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.csv.manifest.json")
        );
    }

    #[test]
    fn csv_rows() {
        let mut c = Csv::new(&["a", "b"]);
        c.row([num(1.0), opt_num(None)]);
        assert_eq!(c.into_string(), "a,b\n1.0000000000000000e0,\n");
    }
}

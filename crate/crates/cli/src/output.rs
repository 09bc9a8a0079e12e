use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Shortest round-trip-safe form with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// CSV text with a header line and `\n` line endings.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(f);
        }
        self.buf.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let fields: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.row(&fields);
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(dir, name, &text)
}

pub fn scan_plot_script(csv_name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {csv_name}");
    let _ = writeln!(s, "# columns: 1 rho (units of sigma), 2 i1 = |T1|^2, 3 i2 = |T2|^2,");
    let _ = writeln!(s, "#          4 phase2 = arg T2 at phi = 0, 5 flags (1 degenerate, 2 adiabaticity)");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'rho / sigma'");
    let _ = writeln!(s, "set ylabel 'transmission probability'");
    let _ = writeln!(s, "set yrange [0:1]");
    let _ = writeln!(
        s,
        "plot '{csv_name}' every ::1 using 1:2 with lines dashtype 2 lc rgb 'dark-green' title '|T1|^2', \\"
    );
    let _ = writeln!(s, "     '' every ::1 using 1:3 with lines lc rgb 'red' title '|T2|^2'");
    s
}

pub fn map_plot_script(csv_name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {csv_name}");
    let _ = writeln!(s, "# columns: 1 rho, 2 phi, 3 i2 = |T2|^2, 4 phase2 = arg T2");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set view map");
    let _ = writeln!(s, "set xlabel 'x / sigma'");
    let _ = writeln!(s, "set ylabel 'y / sigma'");
    let _ = writeln!(
        s,
        "splot '{csv_name}' every ::1 using ($1*cos($2)):($1*sin($2)):4 with points pt 5 ps 0.3 palette title 'arg T2'"
    );
    s
}

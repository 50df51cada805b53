//! Fixed-width numeric formatting and `#`-commented CSV tables.

use std::io::Write;

use num_complex::Complex64;

pub const DEFAULT_DIGITS: usize = 6;
const REAL_CUTOFF: f64 = 1e-12;

/// Significant-digit formatter. Plain notation for magnitudes in
/// `[1e-5, 1e15)`, scientific otherwise.
#[derive(Debug, Clone, Copy)]
pub struct NumberFormat {
    pub digits: usize,
}

impl Default for NumberFormat {
    fn default() -> Self {
        Self {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl NumberFormat {
    pub fn new(digits: usize) -> Self {
        Self {
            digits: digits.max(1),
        }
    }

    pub fn real(&self, x: f64) -> String {
        if x.is_nan() {
            return "nan".into();
        }
        if x.is_infinite() {
            return if x > 0.0 { "inf" } else { "-inf" }.into();
        }
        if x == 0.0 {
            return "0".into();
        }
        let exp = x.abs().log10().floor() as i32;
        let text = if (-5..15).contains(&exp) {
            let decimals = (self.digits as i32 - 1 - exp).max(0) as usize;
            format!("{x:.decimals$}")
        } else {
            format!("{:.*e}", self.digits - 1, x)
        };
        // rounding can leave "-0.000"
        if text.starts_with('-') && text.trim_start_matches(['-', '0', '.']).is_empty() {
            text[1..].to_string()
        } else {
            text
        }
    }

    /// `a+bi` / `a-bi`. Imaginary parts below `1e-12·max(1, |a|)` are
    /// round-off on real values and are dropped.
    pub fn complex(&self, z: Complex64) -> String {
        if z.im.abs() < REAL_CUTOFF * z.re.abs().max(1.0) {
            return self.real(z.re);
        }
        let im = self.real(z.im.abs());
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{im}i", self.real(z.re))
    }
}

/// One CSV block: `# title`, optional `# notes`, a header row and data.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub notes: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            notes: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# {}", self.title)?;
        for n in &self.notes {
            writeln!(out, "# {n}")?;
        }
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Writes tables separated by blank lines.
pub fn write_tables(tables: &[Table], out: &mut dyn Write) -> std::io::Result<()> {
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        t.write(out)?;
    }
    Ok(())
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('j', "i");
    if !s.ends_with('i') {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    }
    let body = &s[..s.len() - 1];
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse().ok()?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().ok()?,
    };
    Some(Complex64::new(re, im))
}

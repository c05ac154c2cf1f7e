//! Spectrum CSV files.
//!
//! ```text
//! # eddyeq spectrum
//! # model = thin_plate
//! # normalized = true
//! # ...more key = value lines...
//! freq_hz,dL_re,dL_im
//! 1.0000000000000000e3,-1.2345678901234567e-3,...
//! ```
//!
//! Numbers carry 17 significant digits, so every `f64` reads back exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use eddyeq_core::model::{InductanceSpectrum, ModelTag};
use eddyeq_core::Complex64;

use crate::CliError;

pub const HEADER: [&str; 3] = ["freq_hz", "dL_re", "dL_im"];
const MAGIC: &str = "eddyeq spectrum";

/// Ordered `key = value` metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata(pub Vec<(String, String)>);

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the spectrum. `model` and `normalized` are taken from the spectrum
/// and must not also appear in `meta`.
pub fn write(out: &mut dyn Write, spectrum: &InductanceSpectrum, meta: &Metadata) -> std::io::Result<()> {
    writeln!(out, "# {MAGIC}")?;
    writeln!(out, "# model = {}", spectrum.model().as_str())?;
    writeln!(out, "# normalized = {}", spectrum.is_normalized())?;
    for (k, v) in &meta.0 {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (f, v) in spectrum.iter() {
        w.write_record([format_f64(f), format_f64(v.re), format_f64(v.im)])?;
    }
    w.flush()
}

pub fn write_path(path: &Path, spectrum: &InductanceSpectrum, meta: &Metadata) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write(&mut buf, spectrum, meta).map_err(|e| CliError::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn read(input: &mut dyn BufRead, origin: &str) -> Result<(InductanceSpectrum, Metadata), CliError> {
    let bad = |msg: String| CliError::Invalid(format!("{origin}: {msg}"));
    let mut text = String::new();
    input.read_to_string(&mut text).map_err(|e| bad(e.to_string()))?;

    let mut meta = Metadata::default();
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((k, v)) = line.split_once('=') {
            meta.push(k.trim(), v.trim());
        }
    }
    let model = meta.get("model").ok_or_else(|| bad("missing '# model = ...' line".into()))?;
    let model = ModelTag::parse(model).ok_or_else(|| bad(format!("unknown model '{model}'")))?;
    let normalized = match meta.get("normalized") {
        Some("true") => true,
        Some("false") => false,
        _ => return Err(bad("missing or malformed '# normalized = true|false' line".into())),
    };
    meta.0.retain(|(k, _)| k != "model" && k != "normalized");

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad(format!("expected header {}", HEADER.join(","))));
    }
    let (mut freqs, mut values) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |j: usize| -> Result<f64, CliError> {
            rec.get(j)
                .ok_or_else(|| bad(format!("row {}: missing column {}", i + 1, HEADER[j])))?
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: {}: {e}", i + 1, HEADER[j])))
        };
        freqs.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    let spectrum = InductanceSpectrum::new(freqs, values, normalized, model).map_err(|e| bad(e.to_string()))?;
    Ok((spectrum, meta))
}

pub fn read_path(path: &Path) -> Result<(InductanceSpectrum, Metadata), CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read(&mut std::io::BufReader::new(f), &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> InductanceSpectrum {
        InductanceSpectrum::new(
            vec![1e3, 22360.679774997898, 5e5],
            vec![
                Complex64::new(-1.0 / 3.0, -0.1),
                Complex64::new(-2.0e-9, f64::MIN_POSITIVE),
                Complex64::new(0.0, -0.0),
            ],
            true,
            ModelTag::ThinPlate,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let mut meta = Metadata::default();
        meta.push("plate", "copper");
        let mut buf = Vec::new();
        write(&mut buf, &sample(), &meta).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
        let (back, m) = read(&mut buf.as_slice(), "mem").unwrap();
        assert_eq!(back, sample());
        assert_eq!(m.get("plate"), Some("copper"));
        assert_eq!(m.get("model"), None);
    }

    #[test]
    fn rejects_malformed() {
        let ok = "# model = thin_plate\n# normalized = true\nfreq_hz,dL_re,dL_im\n1,0,0\n";
        assert!(read(&mut ok.as_bytes(), "m").is_ok());
        for bad in [
            ok.replace("# model = thin_plate\n", ""),
            ok.replace("thin_plate", "fem"),
            ok.replace("true", "yes"),
            ok.replace("dL_im", "dL_imag"),
            ok.replace("1,0,0", "1,0"),
            ok.replace("1,0,0", "x,0,0"),
            ok.replace("1,0,0", "2,0,0\n1,0,0"),
        ] {
            assert!(read(&mut bad.as_bytes(), "m").is_err(), "{bad}");
        }
    }
}

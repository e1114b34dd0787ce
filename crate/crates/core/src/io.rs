//! CSV and JSON writers for spectra, waveforms and spin waves.
//!
//! Every number is written with `{:.14e}`, fifteen significant digits, so
//! identical runs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::dressed::SusceptibilitySpectrum;
use crate::error::{Error, Result};
use crate::memory::SpinWave;

pub const SPECTRUM_HEADER: [&str; 4] = ["delta_bar_gamma", "chi_re", "chi_im", "model"];
pub const WAVEFORM_HEADER: [&str; 4] = ["t_gamma", "re_alpha", "im_alpha", "abs2"];
pub const SPIN_WAVE_HEADER: [&str; 4] = ["zeta", "re_sigma", "im_sigma", "abs2"];

pub fn format_number(x: f64) -> String {
    format!("{x:.14e}")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn complex_rows<W: Write>(
    out: W,
    header: [&str; 4],
    abscissa: &[f64],
    values: &[Complex64],
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (x, v) in abscissa.iter().zip(values) {
        w.write_record([
            format_number(*x),
            format_number(v.re),
            format_number(v.im),
            format_number(v.norm_sqr()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum<W: Write>(out: W, spectrum: &SusceptibilitySpectrum) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPECTRUM_HEADER)?;
    let label = spectrum.model().label();
    for (x, chi) in spectrum.grid.iter().zip(&spectrum.values) {
        w.write_record([format_number(*x), format_number(chi.re), format_number(chi.im), label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_waveform<W: Write>(out: W, times: &[f64], alpha: &[Complex64]) -> std::result::Result<(), csv::Error> {
    complex_rows(out, WAVEFORM_HEADER, times, alpha)
}

pub fn write_spin_wave<W: Write>(out: W, wave: &SpinWave) -> std::result::Result<(), csv::Error> {
    complex_rows(out, SPIN_WAVE_HEADER, &wave.zeta, &wave.sigma)
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn save_spectrum(path: &Path, spectrum: &SusceptibilitySpectrum) -> Result<()> {
    write_spectrum(create(path)?, spectrum).map_err(|e| csv_error(path, e))
}

pub fn save_waveform(path: &Path, times: &[f64], alpha: &[Complex64]) -> Result<()> {
    write_waveform(create(path)?, times, alpha).map_err(|e| csv_error(path, e))
}

pub fn save_spin_wave(path: &Path, wave: &SpinWave) -> Result<()> {
    write_spin_wave(create(path)?, wave).map_err(|e| csv_error(path, e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn save_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a three-column complex table written by [`write_waveform`] or
/// [`write_spin_wave`] back into `(abscissa, values)`.
pub fn read_complex_table(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("{}: malformed row {:?}", path.display(), record)))
        };
        xs.push(field(0)?);
        vs.push(Complex64::new(field(1)?, field(2)?));
    }
    Ok((xs, vs))
}

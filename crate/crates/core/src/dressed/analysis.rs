//! Peak, transparency-window and optical-depth diagnostics of sampled spectra.

use serde::{Deserialize, Serialize};

use super::spectrum::{scan_spectrum, uniform_grid, DressedMedium, SusceptibilitySpectrum};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub center: f64,
    pub height: f64,
    /// `None` when a half-height crossing falls outside the grid.
    pub fwhm: Option<f64>,
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d0 = (y[1] - y[0]) / (x[1] - x[0]);
    let d1 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d1 - d0) / (x[2] - x[0]);
    if !(a < 0.0) {
        return None;
    }
    let b = d0 - a * (x[0] + x[1]);
    let xv = -b / (2.0 * a);
    let yv = y[1] + (xv - x[1]) * (d0 + a * (xv - x[0]));
    // Fall back if the interpolant leaves the bracketing interval.
    (xv >= x[0] && xv <= x[2]).then_some((xv, yv))
}

fn half_crossing(grid: &[f64], y: &[f64], peak: usize, half: f64, step: isize) -> Option<f64> {
    let mut i = peak as isize;
    loop {
        let j = i + step;
        if j < 0 || j as usize >= y.len() {
            return None;
        }
        let (a, b) = (i as usize, j as usize);
        if y[b] < half {
            let t = (y[a] - half) / (y[a] - y[b]);
            return Some(grid[a] + t * (grid[b] - grid[a]));
        }
        i = j;
    }
}

/// Local maxima of the absorption, refined by a parabola through the
/// logarithm of the three samples around each maximum.
///
/// Maxima on the grid boundary are not reported.
pub fn find_at_resonances(spectrum: &SusceptibilitySpectrum) -> Vec<Resonance> {
    let x = &spectrum.grid;
    let y = spectrum.absorption();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < y.len() {
        if !(y[i] > y[i - 1]) {
            i += 1;
            continue;
        }
        // Walk over a flat top, if any.
        let mut k = i;
        while k + 1 < y.len() && y[k + 1] == y[i] {
            k += 1;
        }
        if k + 1 < y.len() && y[k + 1] < y[i] {
            let c = (i + k) / 2;
            let xs = [x[c - 1], x[c], x[c + 1]];
            let refined = if y[c - 1] > 0.0 && y[c + 1] > 0.0 {
                parabola_vertex(xs, [y[c - 1].ln(), y[c].ln(), y[c + 1].ln()]).map(|(xv, lv)| (xv, lv.exp()))
            } else {
                parabola_vertex(xs, [y[c - 1], y[c], y[c + 1]])
            };
            let (center, height) = refined.unwrap_or((x[c], y[c]));
            let half = 0.5 * height;
            let fwhm = match (half_crossing(x, &y, c, half, -1), half_crossing(x, &y, c, half, 1)) {
                (Some(l), Some(r)) => Some(r - l),
                _ => None,
            };
            peaks.push(Resonance { center, height, fwhm });
        }
        i = k + 1;
    }
    peaks
}

/// The tallest absorption peak within `half_width` of `center`, from a scan
/// with the given spacing.
pub fn find_resonance_near(medium: &DressedMedium, center: f64, half_width: f64, spacing: f64) -> Result<Resonance> {
    if !(half_width > 0.0 && spacing > 0.0 && spacing < half_width) {
        return Err(Error::InvalidParameter("resonance search needs 0 < spacing < half_width".into()));
    }
    let count = (2.0 * half_width / spacing).ceil() as usize + 1;
    let spectrum = scan_spectrum(medium, &uniform_grid(center - half_width, center + half_width, count))?;
    find_at_resonances(&spectrum)
        .into_iter()
        .max_by(|a, b| a.height.total_cmp(&b.height))
        .ok_or_else(|| Error::InvalidParameter(format!("no absorption peak within {half_width} of {center}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EitDiagnostics {
    /// Probe detuning of the absorption minimum.
    pub location: f64,
    /// `location - Delta`; negative means a red shift.
    pub shift: f64,
    pub residual_absorption: f64,
}

/// Locate the transparency minimum between the two dressed peaks that
/// bracket the two-photon resonance.
///
/// The grid minimum is polished by bisection on the analytic derivative of
/// the absorption, so the result does not depend on the grid spacing.
pub fn eit_diagnostics(spectrum: &SusceptibilitySpectrum) -> Result<EitDiagnostics> {
    let delta = spectrum.control().detuning;
    let peaks = find_at_resonances(spectrum);
    let pair = peaks
        .windows(2)
        .find(|w| w[0].center <= delta && delta <= w[1].center)
        .ok_or(Error::NoTransparencyWindow)?;
    let x = &spectrum.grid;
    let y = spectrum.absorption();
    let inside: Vec<usize> = (0..x.len())
        .filter(|&i| x[i] > pair[0].center && x[i] < pair[1].center)
        .collect();
    let &k = inside
        .iter()
        .min_by(|&&a, &&b| y[a].total_cmp(&y[b]))
        .ok_or(Error::NoTransparencyWindow)?;
    if k == 0 || k + 1 >= x.len() || !(y[k] <= y[k - 1] && y[k] <= y[k + 1]) {
        return Err(Error::NoTransparencyWindow);
    }

    let medium = &spectrum.medium;
    let slope = |v: f64| medium.susceptibility_derivative(v).map(|d| d.im);
    let (mut lo, mut hi) = (x[k - 1], x[k + 1]);
    let (s_lo, s_hi) = (slope(lo)?, slope(hi)?);
    let location = if s_lo <= 0.0 && s_hi >= 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = medium.susceptibility(lo)?.im;
        let b = medium.susceptibility(hi)?.im;
        if a <= b {
            lo
        } else {
            hi
        }
    } else {
        x[k]
    };
    let residual_absorption = medium.susceptibility(location)?.im;
    Ok(EitDiagnostics {
        location,
        shift: location - delta,
        residual_absorption,
    })
}

/// Resonant optical depth `b = 4 pi chi'' b0` for a scaled absorption.
pub fn optical_depth_from_absorption(chi_im: f64, depth: f64) -> f64 {
    4.0 * std::f64::consts::PI * chi_im * depth
}

/// Optical depth of the spectrum's medium at `detuning_bar`, for a sample
/// with resonance scale `depth = n0 lambdabar^2 L`.
pub fn optical_depth(spectrum: &SusceptibilitySpectrum, detuning_bar: f64, depth: f64) -> Result<f64> {
    if !(depth.is_finite() && depth > 0.0) {
        return Err(Error::InvalidParameter(format!("optical depth scale must be > 0, got {depth}")));
    }
    let chi = spectrum.medium.susceptibility(detuning_bar)?;
    Ok(optical_depth_from_absorption(chi.im, depth))
}

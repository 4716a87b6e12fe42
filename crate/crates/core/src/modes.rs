//! Resonance detection and Lorentzian fitting: turns a transmission trace
//! into a catalog of mode frequencies ω_i, linewidths κ_i and quality
//! factors Q_i.
//!
//! Fits are done on |S21|² (power): A (κ/2)² / ((ω−ω₀)² + (κ/2)²) + B.

use crate::error::{Error, Result};
use crate::fit::{levenberg_marquardt, LmConfig};
use crate::hybrid::SpectrumTrace;

#[derive(Debug, Clone, Copy)]
pub struct ModeRecord {
    /// Center angular frequency (rad/s).
    pub omega: f64,
    /// Full linewidth κ (rad/s).
    pub kappa: f64,
    /// Quality factor ω/κ.
    pub q: f64,
    /// Peak |S21| at the fitted center.
    pub peak: f64,
    /// RMS residual of the power fit, in normalized power units.
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ModeCatalog {
    /// Fitted modes, ascending in ω.
    pub modes: Vec<ModeRecord>,
    /// Peaks that failed to fit, with the reason.
    pub warnings: Vec<String>,
}

impl ModeCatalog {
    /// Intermode spacings Δω_i = ω_{i+1} − ω_i (one fewer than modes).
    pub fn spacings(&self) -> Vec<f64> {
        self.modes.windows(2).map(|m| m[1].omega - m[0].omega).collect()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetectionParams {
    /// Minimum prominence of a peak in |S21| magnitude units.
    pub prominence: f64,
    /// Absolute |S21| floor a peak must clear; models a measurement
    /// noise floor. Zero keeps every prominent peak.
    pub min_peak: f64,
    /// Minimum spacing between accepted peaks (rad/s).
    pub min_spacing: f64,
    /// Half-width multiple used for the fit window.
    pub window_halfwidths: f64,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            prominence: 1e-3,
            min_peak: 0.0,
            min_spacing: 0.0,
            window_halfwidths: 3.0,
        }
    }
}

/// Indices of local maxima of |S21| exceeding the prominence threshold and
/// separated by at least `min_spacing`.
pub fn find_peaks(trace: &SpectrumTrace, params: &DetectionParams) -> Result<Vec<usize>> {
    let mags = trace.magnitudes();
    if mags.len() < 3 {
        return Err(Error::domain("peak search needs at least 3 points"));
    }
    let mut candidates = Vec::new();
    for i in 1..mags.len() - 1 {
        if mags[i] > mags[i - 1] && mags[i] >= mags[i + 1] && mags[i] >= params.min_peak {
            let prom = prominence(&mags, i);
            if prom >= params.prominence {
                candidates.push((i, prom));
            }
        }
    }
    // enforce min spacing, keeping the more prominent peak
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let omegas = trace.grid.points();
    let mut kept: Vec<usize> = Vec::new();
    for (i, _) in candidates {
        if kept
            .iter()
            .all(|&j| (omegas[i] - omegas[j]).abs() >= params.min_spacing)
        {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Topographic prominence of the local maximum at `i`.
fn prominence(mags: &[f64], i: usize) -> f64 {
    let h = mags[i];
    let mut left_min = h;
    for j in (0..i).rev() {
        if mags[j] > h {
            break;
        }
        left_min = left_min.min(mags[j]);
    }
    let mut right_min = h;
    for m in mags.iter().skip(i + 1) {
        if *m > h {
            break;
        }
        right_min = right_min.min(*m);
    }
    h - left_min.max(right_min)
}

/// Estimate the half-width at half maximum (in grid index units converted
/// to rad/s) by walking down from the peak.
fn estimate_halfwidth(omegas: &[f64], power: &[f64], i: usize) -> f64 {
    let baseline = local_baseline(power, i);
    let half = baseline + 0.5 * (power[i] - baseline);
    let mut left = omegas[i] - omegas[i.saturating_sub(1)].min(omegas[i]);
    for j in (0..i).rev() {
        if power[j] <= half {
            left = omegas[i] - omegas[j];
            break;
        }
        if j == 0 {
            left = omegas[i] - omegas[0];
        }
    }
    let mut right = omegas[(i + 1).min(omegas.len() - 1)] - omegas[i];
    for j in i + 1..omegas.len() {
        if power[j] <= half {
            right = omegas[j] - omegas[i];
            break;
        }
        if j == omegas.len() - 1 {
            right = omegas[j] - omegas[i];
        }
    }
    0.5 * (left + right).max(omegas[1] - omegas[0])
}

fn local_baseline(power: &[f64], i: usize) -> f64 {
    let reach = (power.len() / 10).max(200);
    let lo = i.saturating_sub(reach);
    let hi = (i + reach).min(power.len() - 1);
    power[lo..=hi].iter().cloned().fold(f64::INFINITY, f64::min)
}

fn lorentzian_power(omega: f64, w0: f64, kappa: f64, amp: f64, base: f64) -> f64 {
    let hk = kappa / 2.0;
    amp * hk * hk / ((omega - w0).powi(2) + hk * hk) + base
}

/// Fit one Lorentzian around the candidate peak index. The window spans
/// ±`window_halfwidths` estimated half-widths.
pub fn fit_lorentzian(
    trace: &SpectrumTrace,
    peak_index: usize,
    params: &DetectionParams,
) -> Result<ModeRecord> {
    let omegas = trace.grid.points();
    let power: Vec<f64> = trace.s21.iter().map(|s| s.norm_sqr()).collect();
    if peak_index == 0 || peak_index + 1 >= omegas.len() {
        return Err(Error::fit("peak at trace boundary"));
    }
    if power[peak_index] <= power[peak_index - 1] && power[peak_index] <= power[peak_index + 1] {
        return Err(Error::fit("window has no interior maximum"));
    }
    let hw = estimate_halfwidth(omegas, &power, peak_index);
    let span = params.window_halfwidths * 2.0 * hw;
    let w_peak = omegas[peak_index];
    let lo = omegas.partition_point(|w| *w < w_peak - span);
    let hi = omegas.partition_point(|w| *w <= w_peak + span);
    if hi - lo < 7 {
        return Err(Error::fit("fit window has fewer than 7 points"));
    }
    let ws = &omegas[lo..hi];
    let ys = &power[lo..hi];
    let base0 = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let amp0 = power[peak_index] - base0;
    if amp0 <= 0.0 {
        return Err(Error::fit("no peak above baseline in window"));
    }
    let scale = amp0;
    // nondimensionalize: frequencies in window spans, powers in peak units
    let w_c = w_peak;
    let s_w = (ws[ws.len() - 1] - ws[0]).max(1e-12);
    let p0 = [0.0, 2.0 * hw / s_w, 1.0, base0 / scale];
    let ws_v = ws.to_vec();
    let ys_v = ys.to_vec();
    let fit = levenberg_marquardt(
        move |p| {
            if p[1] <= 0.0 || p[2] < 0.0 {
                return Err(Error::fit("nonphysical trial parameters"));
            }
            Ok(ws_v
                .iter()
                .zip(&ys_v)
                .map(|(w, y)| {
                    let u = (w - w_c) / s_w;
                    lorentzian_power(u, p[0], p[1], p[2], p[3]) - y / scale
                })
                .collect())
        },
        &p0,
        &LmConfig::default(),
    )?;
    if !fit.converged {
        return Err(Error::fit(format!(
            "Lorentzian fit did not converge after {} iterations (rms {:.3e})",
            fit.iterations, fit.rms
        )));
    }
    let w0 = w_c + fit.params[0] * s_w;
    let kappa = fit.params[1] * s_w;
    let amp = fit.params[2] * scale;
    let base = fit.params[3] * scale;
    if !(ws[0]..=ws[ws.len() - 1]).contains(&w0) || kappa <= 0.0 {
        return Err(Error::fit("fit wandered outside the window"));
    }
    Ok(ModeRecord {
        omega: w0,
        kappa,
        q: w0 / kappa,
        peak: (amp + base).max(0.0).sqrt(),
        residual: fit.rms,
    })
}

/// Joint two-Lorentzian fit for a pair of nearly overlapping peaks.
fn fit_pair(
    trace: &SpectrumTrace,
    i1: usize,
    i2: usize,
    params: &DetectionParams,
) -> Result<(ModeRecord, ModeRecord)> {
    let omegas = trace.grid.points();
    let power: Vec<f64> = trace.s21.iter().map(|s| s.norm_sqr()).collect();
    let hw1 = estimate_halfwidth(omegas, &power, i1);
    let hw2 = estimate_halfwidth(omegas, &power, i2);
    let span = params.window_halfwidths * 2.0 * hw1.max(hw2);
    let lo = omegas.partition_point(|w| *w < omegas[i1] - span);
    let hi = omegas.partition_point(|w| *w <= omegas[i2] + span);
    if hi - lo < 10 {
        return Err(Error::fit("joint fit window too small"));
    }
    let ws = omegas[lo..hi].to_vec();
    let ys = power[lo..hi].to_vec();
    let base0 = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = (power[i1] - base0).max(power[i2] - base0).max(1e-30);
    let w_c = 0.5 * (omegas[i1] + omegas[i2]);
    let s_w = (ws[ws.len() - 1] - ws[0]).max(1e-12);
    // nondimensional: frequencies in window spans, powers in peak units
    let p0 = [
        (omegas[i1] - w_c) / s_w,
        2.0 * hw1 / s_w,
        (power[i1] - base0) / scale,
        (omegas[i2] - w_c) / s_w,
        2.0 * hw2 / s_w,
        (power[i2] - base0) / scale,
        base0 / scale,
    ];
    let fit = levenberg_marquardt(
        move |p| {
            if p[1] <= 0.0 || p[4] <= 0.0 {
                return Err(Error::fit("nonphysical trial parameters"));
            }
            Ok(ws
                .iter()
                .zip(&ys)
                .map(|(w, y)| {
                    let u = (w - w_c) / s_w;
                    lorentzian_power(u, p[0], p[1], p[2], 0.0)
                        + lorentzian_power(u, p[3], p[4], p[5], p[6])
                        - y / scale
                })
                .collect())
        },
        &p0,
        &LmConfig::default(),
    )?;
    if !fit.converged {
        return Err(Error::fit("joint Lorentzian fit did not converge"));
    }
    let p = &fit.params;
    let mk = |u0: f64, uk: f64, ua: f64| {
        let w0 = w_c + u0 * s_w;
        let k = uk * s_w;
        ModeRecord {
            omega: w0,
            kappa: k,
            q: w0 / k,
            peak: ((ua + p[6]) * scale).max(0.0).sqrt(),
            residual: fit.rms,
        }
    };
    let m1 = mk(p[0], p[1], p[2]);
    let m2 = mk(p[3], p[4], p[5]);
    if m1.kappa <= 0.0 || m2.kappa <= 0.0 {
        return Err(Error::fit("joint fit produced nonpositive linewidth"));
    }
    Ok(if m1.omega <= m2.omega { (m1, m2) } else { (m2, m1) })
}

/// Detect and fit every resonance in the trace. Failed fits are excluded
/// from the catalog and recorded as warnings.
pub fn catalog(trace: &SpectrumTrace, params: &DetectionParams) -> Result<ModeCatalog> {
    let peaks = find_peaks(trace, params)?;
    let omegas = trace.grid.points();
    let power: Vec<f64> = trace.s21.iter().map(|s| s.norm_sqr()).collect();
    let mut out = ModeCatalog::default();
    let mut i = 0usize;
    while i < peaks.len() {
        // peaks closer than 1.5 summed half-widths are fit jointly
        let joint = if i + 1 < peaks.len() {
            let hw_a = estimate_halfwidth(omegas, &power, peaks[i]);
            let hw_b = estimate_halfwidth(omegas, &power, peaks[i + 1]);
            omegas[peaks[i + 1]] - omegas[peaks[i]] < 1.5 * (hw_a + hw_b)
        } else {
            false
        };
        if joint {
            match fit_pair(trace, peaks[i], peaks[i + 1], params) {
                Ok((m1, m2)) => {
                    out.modes.push(m1);
                    out.modes.push(m2);
                }
                Err(e) => out.warnings.push(format!(
                    "joint fit of peaks at indices {} and {} failed: {e}",
                    peaks[i],
                    peaks[i + 1]
                )),
            }
            i += 2;
        } else {
            match fit_lorentzian(trace, peaks[i], params) {
                Ok(m) => out.modes.push(m),
                Err(e) => out
                    .warnings
                    .push(format!("fit of peak at index {} failed: {e}", peaks[i])),
            }
            i += 1;
        }
    }
    out.modes
        .sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
    Ok(out)
}

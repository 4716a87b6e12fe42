//! End-to-end acceptance gate. Each test covers one release criterion,
//! prints a single pass line with its pinned tolerance and fails loudly
//! otherwise. Run with `--nocapture` to see the lines.

use metaqed::coupled::{CoupledSystemSpec, ModeSpec};
use metaqed::coupling::{
    extract_g_participation, extract_g_semiclassical, fit_g_quantum, superstrong_ratios,
    SplittingObservation,
};
use metaqed::device::{DeviceDescription, PAPER_DEVICE_JSON, TABLE2_DEVICE_JSON};
use metaqed::grid::FrequencyGrid;
use metaqed::hybrid::{HybridResonatorSpec, Rhtl, TapPosition};
use metaqed::lhtl::LhtlCell;
use metaqed::modes::{catalog, find_peaks, DetectionParams};
use metaqed::purcell::t1_curve;
use metaqed::stark::{chi, mean_photons, power_sweep, stark_shift, ChiFormula, StarkScenario};
use metaqed::transmon::TransmonSpec;
use metaqed::units::{ff, ghz_to_rads, mhz_to_rads, nh, rads_to_ghz};

fn paper_device() -> DeviceDescription {
    DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap()
}

fn table2_device() -> DeviceDescription {
    DeviceDescription::from_json(TABLE2_DEVICE_JSON).unwrap()
}

#[test]
fn criterion_1_transmon_frequency() {
    let t = TransmonSpec::new(0.31, 37.0).unwrap();
    let f01 = t.f01(0.0);
    let rel = (f01 - 9.25).abs() / 9.25;
    assert!(rel < 0.01, "f01 = {f01} GHz, rel err {rel:.4}");
    println!("criterion 1 PASS: zero-flux f01 = {f01:.4} GHz within 1% of 9.25");
}

/// N-cell left-handed line with weak couplers so every resonance stays a
/// distinct narrow peak across the whole passband.
fn lhtl_only(n: usize) -> HybridResonatorSpec {
    HybridResonatorSpec {
        n_cells: n,
        cell: LhtlCell::new(ff(250.0), nh(0.7), nh(0.03), ff(25.0), 23e-6).unwrap(),
        c_in: ff(5.0),
        c_out: ff(5.0),
        rhtl: Rhtl::Distributed {
            z0: 50.0,
            length: 1e-6,
            epsilon: 1.0,
        },
        tap: TapPosition::FromOutput(0.0),
        r0: 50.0,
        internal_q: 1e5,
    }
}

/// Peak count over the full passband. Modes pile up just above the
/// low-frequency band edge, so that stretch gets its own dense grid.
fn count_modes(spec: &HybridResonatorSpec) -> usize {
    let params = DetectionParams {
        prominence: 1e-4,
        ..DetectionParams::default()
    };
    let mut total = 0;
    for (fmin, fmax, points) in [(5.88, 6.45, 600_001), (6.45, 38.5, 2_000_001)] {
        let grid = FrequencyGrid::linspace_ghz(fmin, fmax, points).unwrap();
        let trace = spec.spectrum(&grid).unwrap();
        total += find_peaks(&trace, &params).unwrap().len();
    }
    total
}

#[test]
fn criterion_2_mode_counts() {
    // (a) an N-cell left-handed line supports exactly N passband modes
    for n in [5usize, 10, 42] {
        let found = count_modes(&lhtl_only(n));
        assert_eq!(found, n, "N = {n}: found {found} passband resonances");
    }

    // (b) the full device shows 21 +/- 2 modes below the qubit sweet spot,
    // counting only peaks above the measurement floor
    let dev = paper_device();
    let spec = dev.hybrid_spec().unwrap();
    let s = &dev.sweep_defaults;
    let grid = FrequencyGrid::linspace_ghz(s.fmin_ghz, s.fmax_ghz, s.points).unwrap();
    let trace = spec.spectrum(&grid).unwrap();
    let cat = catalog(
        &trace,
        &DetectionParams {
            min_peak: s.min_peak,
            ..DetectionParams::default()
        },
    )
    .unwrap();
    let below = cat
        .modes
        .iter()
        .filter(|m| rads_to_ghz(m.omega) < 9.25)
        .count();
    assert!(
        (19..=23).contains(&below),
        "{below} hybrid modes below 9.25 GHz"
    );
    println!("criterion 2 PASS: exact N for N in {{5, 10, 42}}; hybrid shows {below} modes below 9.25 GHz (21 +/- 2)");
}

fn crossing_flux(t: &TransmonSpec, f_target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 0.49);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if t.f01(mid) > f_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn synthetic_obs(t: TransmonSpec, mode_freq: f64, g: f64) -> SplittingObservation {
    let phi_c = crossing_flux(&t, mode_freq);
    let mut m = ModeSpec::new(mode_freq, g);
    m.n_fock = 5;
    let sys = CoupledSystemSpec::new(t, vec![m]).unwrap();
    let flux: Vec<f64> = (0..21)
        .map(|i| phi_c - 0.01 + 0.02 * i as f64 / 20.0)
        .collect();
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for &phi in &flux {
        let (ev, _) = sys.lowest_levels(phi, 3).unwrap();
        lower.push(ev[1] - ev[0]);
        upper.push(ev[2] - ev[0]);
    }
    SplittingObservation {
        flux,
        lower,
        upper,
        mode_freq_ghz: mode_freq,
    }
}

#[test]
fn criterion_3_coupling_round_trip() {
    let mut t = TransmonSpec::new(0.31, 37.0).unwrap();
    t.n_max = 6;

    // round trip at three coupling scales
    for g_mhz in [5.0, 22.0, 100.0] {
        let g = g_mhz / 1e3;
        let obs = synthetic_obs(t, 7.07, g);
        let fit = fit_g_quantum(&obs, t, 5).unwrap();
        let rel = (fit.g_prefactor_ghz - g).abs() / g;
        assert!(
            rel < 0.01,
            "g = {g_mhz} MHz recovered as {} MHz",
            fit.g_prefactor_ghz * 1e3
        );
    }

    // single-mode fit of two-mode data stays within 5% when the second
    // mode is far detuned
    let g = 0.022;
    let mut m1 = ModeSpec::new(7.07, g);
    m1.n_fock = 4;
    let mut m2 = ModeSpec::new(7.90, g);
    m2.n_fock = 4;
    let sys = CoupledSystemSpec::new(t, vec![m1, m2]).unwrap();
    let phi_c = crossing_flux(&t, 7.07);
    let flux: Vec<f64> = (0..21)
        .map(|i| phi_c - 0.01 + 0.02 * i as f64 / 20.0)
        .collect();
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for &phi in &flux {
        let (ev, _) = sys.lowest_levels(phi, 3).unwrap();
        lower.push(ev[1] - ev[0]);
        upper.push(ev[2] - ev[0]);
    }
    let obs = SplittingObservation {
        flux,
        lower,
        upper,
        mode_freq_ghz: 7.07,
    };
    let fit = fit_g_quantum(&obs, t, 5).unwrap();
    let rel = (fit.g_prefactor_ghz - g).abs() / g;
    assert!(rel < 0.05, "two-mode data fit drifted {:.2}%", rel * 100.0);
    println!("criterion 3 PASS: g round trip within 1% at 5/22/100 MHz; single-mode fit of two-mode data within 5%");
}

#[test]
fn criterion_4_semiclassical_coupling_shape() {
    let dev = paper_device();
    let spec = dev.hybrid_spec().unwrap();
    let qubit = dev.semiclassical_qubit(false);

    // catalog over an extended band so dips past the sweet spot are visible
    let grid = FrequencyGrid::linspace_ghz(5.9, 30.0, 240_001).unwrap();
    let trace = spec.spectrum(&grid).unwrap();
    let cat = catalog(
        &trace,
        &DetectionParams {
            min_peak: 0.25,
            ..DetectionParams::default()
        },
    )
    .unwrap();
    let freqs: Vec<f64> = cat.modes.iter().map(|m| rads_to_ghz(m.omega)).collect();

    let mut gs: Vec<(f64, f64)> = Vec::new();
    for (i, &f) in freqs.iter().enumerate() {
        let left = if i > 0 { f - freqs[i - 1] } else { f64::MAX };
        let right = if i + 1 < freqs.len() {
            freqs[i + 1] - f
        } else {
            f64::MAX
        };
        let half = (0.4 * left.min(right)).min(0.35);
        if let Ok(ex) = extract_g_semiclassical(&spec, &qubit, f, half, 1201) {
            gs.push((f, ex.coupling.g_halfsplit_ghz));
        }
    }
    assert!(gs.len() > 15, "only {} modes extracted", gs.len());

    // the turnover claim applies to the qubit-accessible band
    let (f_max, g_max) = gs
        .iter()
        .copied()
        .filter(|&(f, _)| f < 9.3)
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert!(
        (7.3..=8.3).contains(&f_max),
        "coupling maximum at {f_max} GHz"
    );
    let ratio = g_max / 0.022;
    assert!(
        (1.0 / 1.5..=1.5).contains(&ratio),
        "max coupling {} MHz vs 22 MHz",
        g_max * 1e3
    );

    // interior local minima of the coupling envelope
    let dips = gs
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .count();
    assert!(dips >= 2, "only {dips} dips in the extended sweep");
    println!(
        "criterion 4 PASS: coupling max {:.1} MHz at {:.3} GHz (within 1.5x of 22 MHz), {dips} dips over the extended band",
        g_max * 1e3,
        f_max
    );
}

#[test]
fn criterion_5_superstrong_design() {
    let dev = table2_device();
    let spec = dev.hybrid_spec().unwrap();
    let qubit = dev.semiclassical_qubit(false);
    let s = &dev.sweep_defaults;
    let grid = FrequencyGrid::linspace_ghz(s.fmin_ghz, s.fmax_ghz, s.points).unwrap();
    let trace = spec.spectrum(&grid).unwrap();
    let cat = catalog(&trace, &DetectionParams::default()).unwrap();
    let freqs: Vec<f64> = cat.modes.iter().map(|m| rads_to_ghz(m.omega)).collect();

    let targets_f = [7.91, 8.04, 8.17, 8.31];
    let targets_g = [0.220, 0.193, 0.180, 0.178];
    assert_eq!(freqs.len(), 4, "expected the 4-mode comb, got {freqs:?}");
    let mut gs = Vec::new();
    for (i, &f) in freqs.iter().enumerate() {
        assert!(
            (f - targets_f[i]).abs() < 0.050,
            "mode {i} at {f} GHz vs target {}",
            targets_f[i]
        );
        let g = extract_g_participation(&spec, &qubit, f, 0.05)
            .unwrap()
            .g_halfsplit_ghz;
        let rel = (g - targets_g[i]).abs() / targets_g[i];
        assert!(
            rel < 0.15,
            "mode {i}: g = {:.1} MHz vs target {:.0} MHz ({:.1}%)",
            g * 1e3,
            targets_g[i] * 1e3,
            rel * 100.0
        );
        gs.push(g);
    }
    let ratios = superstrong_ratios(&gs, &freqs).unwrap();
    for r in ratios.iter().flatten() {
        assert!(*r > 1.0, "ratio {r} not superstrong");
    }
    let shown: Vec<f64> = ratios.iter().flatten().copied().collect();
    println!(
        "criterion 5 PASS: comb within 50 MHz of targets, g within 15%, g/spacing = {shown:.3?} (> 1)"
    );
}

#[test]
fn criterion_6_purcell_curve() {
    let dev = paper_device();
    let env = dev.environment_spec().unwrap();
    let grid = FrequencyGrid::linspace_ghz(4.0, 8.5, 90_001).unwrap();
    let curve = t1_curve(&env, dev.c_shunt(), dev.sweep_defaults.t1_floor_a, &grid).unwrap();

    // (a) background-dominated plateau below the metamaterial band
    for (i, &w) in grid.points().iter().enumerate() {
        if rads_to_ghz(w) < 4.5 {
            let t1_us = curve.t1_total[i] * 1e6;
            assert!(
                (10.0..=19.0).contains(&t1_us),
                "T1 = {t1_us} us at {} GHz",
                rads_to_ghz(w)
            );
        }
    }

    // catalog the modes once for dip alignment
    let spec = dev.hybrid_spec().unwrap();
    let mgrid = FrequencyGrid::linspace_ghz(5.8, 8.6, 60_001).unwrap();
    // no measurement floor here: band-edge modes too weak to show in
    // transmission still open relaxation channels
    let cat = catalog(&spec.spectrum(&mgrid).unwrap(), &DetectionParams::default()).unwrap();

    // (b) sub-microsecond dips sit on catalog modes within one linewidth
    let mut dips: Vec<usize> = Vec::new();
    for i in 1..grid.len() - 1 {
        if curve.t1_total[i] < 1e-6
            && curve.t1_total[i] <= curve.t1_total[i - 1]
            && curve.t1_total[i] < curve.t1_total[i + 1]
        {
            dips.push(i);
        }
    }
    assert!(!dips.is_empty(), "no sub-microsecond relaxation dips");
    let f_readout = dev.readout.as_ref().unwrap().f_r_ghz;
    for &i in &dips {
        let w = grid.points()[i];
        let aligned = cat
            .modes
            .iter()
            .any(|m| (m.omega - w).abs() < m.kappa.max(mhz_to_rads(2.0)));
        // the readout branch opens its own channel, pulled slightly below
        // the bare readout frequency by the coupling capacitance
        let readout = (rads_to_ghz(w) - f_readout).abs() < 0.1;
        assert!(
            aligned || readout,
            "dip at {:.4} GHz not aligned with any catalog mode",
            rads_to_ghz(w)
        );
    }

    // (c) recovery by at least 5x between consecutive dips
    for pair in dips.windows(2) {
        let dip = curve.t1_total[pair[0]].min(curve.t1_total[pair[1]]);
        let peak = curve.t1_total[pair[0]..=pair[1]]
            .iter()
            .fold(0.0f64, |a, &b| a.max(b));
        assert!(
            peak >= 5.0 * dip,
            "recovery only {:.1}x between dips",
            peak / dip
        );
    }
    println!(
        "criterion 6 PASS: plateau 10-19 us below 4.5 GHz, {} aligned sub-us dips, >= 5x recovery between dips",
        dips.len()
    );
}

#[test]
fn criterion_7_stark_model() {
    // linearity in drive power on noiseless model data
    let omega_i = ghz_to_rads(6.003);
    let base = StarkScenario {
        omega_q: ghz_to_rads(6.275),
        eta: mhz_to_rads(-320.0),
        omega_i,
        kappa: mhz_to_rads(1.0),
        g: mhz_to_rads(10.0),
        omega_d: omega_i,
        amplitude: 0.0,
    };
    let powers: Vec<f64> = (0..51).map(|i| i as f64 / 50.0).collect();
    let map = power_sweep(&base, &powers, 1e15, ChiFormula::Primary).unwrap();
    let q0 = map.qubit_line_ghz[0];
    let slope = (map.qubit_line_ghz[50] - q0) / powers[50];
    let scale = (map.qubit_line_ghz[50] - q0).abs();
    for (i, &p) in powers.iter().enumerate() {
        let resid = (map.qubit_line_ghz[i] - (q0 + slope * p)).abs() / scale;
        assert!(resid < 1e-9, "linearity residual {resid:.2e} at power {p}");
    }

    // exact on-resonance photon number
    let mut s = base;
    s.amplitude = mhz_to_rads(0.25);
    let nbar = mean_photons(&s).unwrap();
    let expect = 4.0 * s.amplitude * s.amplitude / (s.kappa * s.kappa);
    assert!(((nbar - expect) / expect).abs() < 1e-14);

    // straddling vs non-straddling drive cases carry opposite-sign shifts;
    // the tuned transmon's anharmonicity magnitude exceeds the 313 MHz
    // upper-mode detuning, so the 6.588 GHz case sits past the delta = eta
    // sign boundary of the implemented per-photon formula
    let t = TransmonSpec::new(0.31, 37.0).unwrap();
    let phi = crossing_flux(&t, 6.275);
    let (_, _, eta_ghz) = t.transitions(phi);
    assert!(eta_ghz < -0.313, "eta = {eta_ghz} GHz");
    let make = |mode_ghz: f64| {
        let omega_i = ghz_to_rads(mode_ghz);
        StarkScenario {
            omega_q: ghz_to_rads(6.275),
            eta: ghz_to_rads(eta_ghz),
            omega_i,
            kappa: mhz_to_rads(1.0),
            g: mhz_to_rads(10.0),
            omega_d: omega_i,
            amplitude: mhz_to_rads(0.25),
        }
    };
    let low = stark_shift(&make(6.003), ChiFormula::Primary).unwrap();
    let high = stark_shift(&make(6.588), ChiFormula::Primary).unwrap();
    assert!(low * high < 0.0, "shifts {low} and {high} share a sign");
    // the alternate dispersive denominator flips the boundary, still
    // yielding opposite signs for this pair
    let low_std = chi(&make(6.003), ChiFormula::Standard).unwrap();
    let high_std = chi(&make(6.588), ChiFormula::Standard).unwrap();
    assert!(low_std * high_std < 0.0);
    println!("criterion 7 PASS: power linearity < 1e-9, on-resonance nbar exact, opposite-sign shifts at 6.003 vs 6.588 GHz");
}

#[test]
fn criterion_8_oracle_suites() {
    // (a) ABCD cascade vs modified nodal analysis, up to 5 cells
    oracle_mna();
    // (b) analytic left-handed input impedance vs explicit ladder is a
    // unit suite in the line module; re-run its core identity here
    oracle_ladder();
    // (c) truncation convergence of the lowest levels
    oracle_truncation();
    println!("criterion 8 PASS: MNA agreement 1e-9, ladder identity 1e-6, truncation drift < 1e-4 GHz");
}

/// S21 of the capacitively coupled N-cell line by modified nodal analysis:
/// unknowns are the node voltages with the source folded in as a Norton
/// equivalent at the input port.
fn mna_s21(cell: &LhtlCell, n: usize, c_in: f64, c_out: f64, r0: f64, omega: f64) -> num_complex::Complex64 {
    use num_complex::Complex64;
    let dim = n + 3; // source node, cell nodes 0..n, load node
    let mut y = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    let mut stamp = |a: usize, b: Option<usize>, adm: Complex64| {
        y[(a, a)] += adm;
        if let Some(b) = b {
            y[(b, b)] += adm;
            y[(a, b)] -= adm;
            y[(b, a)] -= adm;
        }
    };
    let jw = Complex64::new(0.0, omega);
    let g0 = Complex64::new(1.0 / r0, 0.0);
    stamp(0, None, g0); // source resistance
    stamp(0, Some(1), jw * c_in);
    for i in 0..n {
        // cell input node is 1 + i: shunt branch there, series to the next
        stamp(1 + i, None, cell.shunt_admittance(omega));
        stamp(1 + i, Some(2 + i), 1.0 / cell.series_impedance(omega));
    }
    stamp(1 + n, Some(2 + n), jw * c_out);
    stamp(2 + n, None, g0); // load
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(dim);
    rhs[0] = g0; // unit-EMF source behind r0
    let v = y.lu().solve(&rhs).expect("nodal matrix solvable");
    2.0 * v[2 + n]
}

fn oracle_mna() {
    use metaqed::network::{cascade, TwoPort};
    use num_complex::Complex64;
    let cell = LhtlCell::new(ff(250.0), nh(0.7), nh(0.03), ff(25.0), 23e-6).unwrap();
    for n in 1..=5usize {
        for fghz in [4.0, 6.2, 7.5, 9.0, 12.0] {
            let w = ghz_to_rads(fghz);
            let jw = Complex64::new(0.0, w);
            let mut ports = vec![TwoPort::series(1.0 / (jw * ff(30.0)))];
            for _ in 0..n {
                ports.push(TwoPort::shunt(cell.shunt_admittance(w)));
                ports.push(TwoPort::series(cell.series_impedance(w)));
            }
            ports.push(TwoPort::series(1.0 / (jw * ff(25.0))));
            let s_abcd = cascade(&ports).unwrap().s21(50.0, 50.0).unwrap();
            let s_mna = mna_s21(&cell, n, ff(30.0), ff(25.0), 50.0, w);
            let rel = (s_abcd - s_mna).norm() / s_mna.norm().max(1e-30);
            assert!(rel < 1e-9, "N = {n}, {fghz} GHz: rel {rel:.2e}");
        }
    }
}

fn oracle_ladder() {
    use metaqed::network::{cascade, TwoPort};
    use num_complex::Complex64;
    let cell = LhtlCell::new(ff(250.0), nh(0.7), nh(0.03), ff(25.0), 23e-6).unwrap();
    for n in 1..=8usize {
        for fghz in [6.2, 7.0, 8.5, 11.0] {
            let w = ghz_to_rads(fghz);
            let z_s = Complex64::new(50.0, -1.0 / (w * ff(30.0)));
            let analytic = metaqed::lhtl::lhtl_input_impedance(&cell, n, z_s, w).unwrap();
            // reversed cascade: from the output each cell is series branch
            // then shunt branch, ending at the source chain
            let mut ports = Vec::new();
            for _ in 0..n {
                ports.push(TwoPort::series(cell.series_impedance(w)));
                ports.push(TwoPort::shunt(cell.shunt_admittance(w)));
            }
            let explicit = cascade(&ports).unwrap().input_impedance(z_s).unwrap();
            let rel = (analytic - explicit).norm() / explicit.norm();
            assert!(rel < 1e-6, "N = {n}, {fghz} GHz: rel {rel:.2e}");
        }
    }
}

fn oracle_truncation() {
    let mut t = TransmonSpec::new(0.31, 37.0).unwrap();
    t.n_max = 6;
    let levels = |n_fock: usize| {
        let mut m1 = ModeSpec::new(7.07, 0.065);
        m1.n_fock = n_fock;
        let mut m2 = ModeSpec::new(7.31, 0.050);
        m2.n_fock = n_fock;
        let sys = CoupledSystemSpec::new(t, vec![m1, m2]).unwrap();
        let (ev, _) = sys.lowest_levels(0.2, 5).unwrap();
        ev.iter().map(|e| e - ev[0]).collect::<Vec<f64>>()
    };
    let coarse = levels(4);
    let fine = levels(7);
    for (i, (a, b)) in coarse.iter().zip(&fine).enumerate().skip(1) {
        assert!(
            (a - b).abs() < 1e-4,
            "level {i} drifts {:.2e} GHz under truncation",
            (a - b).abs()
        );
    }
}

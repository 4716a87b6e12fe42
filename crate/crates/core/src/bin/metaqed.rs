//! Command-line front end: loads a device description, runs one sweep job
//! and writes plot-ready CSV. Outputs embed the input hash, seed and tool
//! version and are cached by content hash, so identical invocations are
//! byte-identical whether computed or replayed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use metaqed::coupled::{eigenladder_over_flux, CoupledSystemSpec, ModeSpec};
use metaqed::coupling::{extract_g_participation, superstrong_ratios};
use metaqed::device::DeviceDescription;
use metaqed::grid::FrequencyGrid;
use metaqed::lhtl::dispersion;
use metaqed::modes::{catalog, DetectionParams, ModeCatalog};
use metaqed::purcell::t1_curve;
use metaqed::stark::{power_sweep, ChiFormula, StarkScenario};
use metaqed::units::{ghz_to_rads, mhz_to_rads, rads_to_ghz, rads_to_mhz};
use metaqed::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "metaqed", version, about = "Metamaterial circuit-QED workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Device description: a JSON path or a bundled name
    /// (`paper-device`, `table2-device`).
    #[arg(long, global = true, default_value = "paper-device")]
    device: String,

    /// Output directory for CSV artifacts and the result cache.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Grid lower edge (GHz); defaults to the device's sweep section.
    #[arg(long, global = true)]
    fmin: Option<f64>,

    /// Grid upper edge (GHz); defaults to the device's sweep section.
    #[arg(long, global = true)]
    fmax: Option<f64>,

    /// Grid point count; defaults to the device's sweep section.
    #[arg(long, global = true)]
    points: Option<usize>,

    /// Seed recorded in outputs and used by any randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Recompute even when a cached result exists.
    #[arg(long, global = true, default_value_t = false)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Two-port transmission |S21| of the bare resonator.
    Spectrum,
    /// Per-cell dispersion kΔx of the left-handed line.
    Dispersion,
    /// Catalog of fitted resonances (center, linewidth, Q, peak).
    Modes,
    /// Coupled qubit-multimode eigenladder over flux.
    RabiMap {
        /// Flux sweep lower edge (Φ/Φ0).
        #[arg(long, default_value_t = 0.0)]
        flux_min: f64,
        /// Flux sweep upper edge (Φ/Φ0).
        #[arg(long, default_value_t = 0.45)]
        flux_max: f64,
        /// Flux sweep points.
        #[arg(long, default_value_t = 31)]
        flux_points: usize,
        /// Excited levels reported above the ground state.
        #[arg(long, default_value_t = 6)]
        levels: usize,
        /// Modes kept from the catalog window (nearest first).
        #[arg(long, default_value_t = 4)]
        max_modes: usize,
        /// Fock truncation per mode.
        #[arg(long, default_value_t = 3)]
        n_fock: usize,
    },
    /// Per-mode coupling strengths from the tap-admittance model.
    FitG,
    /// Multimode Purcell relaxation time over frequency.
    T1,
    /// ac Stark shift of the qubit line versus drive power.
    Stark {
        /// Unshifted qubit frequency (GHz).
        #[arg(long, default_value_t = 6.275)]
        qubit_ghz: f64,
        /// Driven mode frequency (GHz).
        #[arg(long, default_value_t = 6.003)]
        mode_ghz: f64,
        /// Driven mode linewidth (MHz).
        #[arg(long, default_value_t = 1.0)]
        kappa_mhz: f64,
        /// Qubit anharmonicity (MHz, negative for a transmon).
        #[arg(long, default_value_t = -310.0)]
        eta_mhz: f64,
        /// Coupling to the driven mode (MHz).
        #[arg(long, default_value_t = 10.0)]
        g_mhz: f64,
        /// Fitted Ω² per unit drive power (rad²/s² per power unit).
        #[arg(long, default_value_t = 1e17)]
        omega2_per_unit: f64,
        /// Use the standard dispersive denominator δ(δ+η) instead of δη−δ².
        #[arg(long, default_value_t = false)]
        standard_chi: bool,
    },
    /// Mode comb, couplings and g/Δω ratios for a candidate design.
    DesignScan,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(&cli) {
        Ok(path) => {
            println!("wrote {}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Config(_) | Error::Domain(_) | Error::Io(_)
                | Error::Parse(_) => 1,
                Error::Numeric(_) | Error::Fit(_) | Error::Resolution(_) => 2,
            }
        }
    });
}

fn run(cli: &Cli) -> Result<PathBuf> {
    let device_text = load_device_text(&cli.device)?;
    let dev = DeviceDescription::from_json(&device_text)?;
    let (fmin, fmax, points) = (
        cli.fmin.unwrap_or(dev.sweep_defaults.fmin_ghz),
        cli.fmax.unwrap_or(dev.sweep_defaults.fmax_ghz),
        cli.points.unwrap_or(dev.sweep_defaults.points),
    );

    let (name, manifest) = manifest_for(cli, fmin, fmax, points);
    let key = cache_key(&device_text, &manifest);
    let out_path = cli.out.join(format!("{name}.csv"));
    std::fs::create_dir_all(&cli.out)?;
    let cache_path = cli.out.join(".cache").join(format!("{key}.csv"));
    if !cli.no_cache && cache_path.exists() {
        std::fs::copy(&cache_path, &out_path)?;
        return Ok(out_path);
    }

    let mut body = String::new();
    writeln!(body, "# input_sha256={key} seed={} version={VERSION}", cli.seed).unwrap();
    let grid = FrequencyGrid::linspace_ghz(fmin, fmax, points)?;
    match &cli.cmd {
        Cmd::Spectrum => {
            let spec = dev.hybrid_spec()?;
            let trace = spec.spectrum(&grid)?;
            body.push_str("freq_GHz,s21_re,s21_im,s21_abs\n");
            for (w, s) in grid.iter().zip(trace.s21.iter()) {
                writeln!(
                    body,
                    "{:.9},{:.9e},{:.9e},{:.9e}",
                    rads_to_ghz(w),
                    s.re,
                    s.im,
                    s.norm()
                )
                .unwrap();
            }
        }
        Cmd::Dispersion => {
            let cell = dev.lhtl_cell()?;
            let disp = dispersion(&cell, &grid);
            body.push_str("freq_GHz,k_dx_re,k_dx_im,passband\n");
            for p in &disp.points {
                writeln!(
                    body,
                    "{:.9},{:.9e},{:.9e},{}",
                    rads_to_ghz(p.omega),
                    p.k_dx.re,
                    p.k_dx.im,
                    p.passband as u8
                )
                .unwrap();
            }
        }
        Cmd::Modes => {
            let cat = device_catalog(&dev, &grid)?;
            body.push_str("freq_GHz,kappa_MHz,Q,peak,residual\n");
            for m in &cat.modes {
                writeln!(
                    body,
                    "{:.9},{:.6},{:.3},{:.6},{:.3e}",
                    rads_to_ghz(m.omega),
                    rads_to_mhz(m.kappa),
                    m.q,
                    m.peak,
                    m.residual
                )
                .unwrap();
            }
        }
        Cmd::RabiMap {
            flux_min,
            flux_max,
            flux_points,
            levels,
            max_modes,
            n_fock,
        } => {
            let cat = device_catalog(&dev, &grid)?;
            let spec = dev.hybrid_spec()?;
            let qubit = dev.semiclassical_qubit(false);
            let mut modes: Vec<ModeSpec> = Vec::new();
            for m in cat.modes.iter().take(*max_modes) {
                let f = rads_to_ghz(m.omega);
                let g = extract_g_participation(&spec, &qubit, f, half_window(&cat))?;
                modes.push(ModeSpec {
                    freq_ghz: f,
                    g_ghz: g.g_halfsplit_ghz,
                    n_fock: *n_fock,
                });
            }
            if modes.is_empty() {
                return Err(Error::resolution("no catalog modes in the sweep window"));
            }
            let coupled = CoupledSystemSpec::new(dev.transmon_spec()?, modes)?;
            if *flux_points < 2 || flux_max <= flux_min {
                return Err(Error::domain("flux sweep needs an increasing range"));
            }
            let flux: Vec<f64> = (0..*flux_points)
                .map(|i| flux_min + (flux_max - flux_min) * i as f64 / (*flux_points - 1) as f64)
                .collect();
            let ladder = eigenladder_over_flux(&coupled, &flux, *levels)?;
            body.push_str("flux");
            for k in 0..*levels {
                write!(body, ",level{k}_GHz,level{k}_flagged").unwrap();
            }
            body.push('\n');
            for (i, phi) in flux.iter().enumerate() {
                write!(body, "{phi:.9}").unwrap();
                for lvl in &ladder {
                    write!(body, ",{:.9},{}", lvl.energies[i], lvl.flagged[i] as u8).unwrap();
                }
                body.push('\n');
            }
        }
        Cmd::FitG => {
            let cat = device_catalog(&dev, &grid)?;
            let spec = dev.hybrid_spec()?;
            let qubit = dev.semiclassical_qubit(false);
            body.push_str("mode_GHz,g_MHz,method\n");
            for m in &cat.modes {
                let f = rads_to_ghz(m.omega);
                let g = extract_g_participation(&spec, &qubit, f, half_window(&cat))?;
                writeln!(body, "{:.9},{:.6},semiclassical", f, g.g_halfsplit_ghz * 1e3).unwrap();
            }
        }
        Cmd::T1 => {
            let env = dev.environment_spec()?;
            let curve = t1_curve(&env, dev.c_shunt(), dev.sweep_defaults.t1_floor_a, &grid)?;
            body.push_str("freq_GHz,t1_total_us,t1_purcell_us,t1_floor_us,flagged\n");
            for i in 0..grid.len() {
                writeln!(
                    body,
                    "{:.9},{:.6},{:.6e},{:.6},{}",
                    rads_to_ghz(grid.points()[i]),
                    curve.t1_total[i] * 1e6,
                    curve.t1_purcell[i] * 1e6,
                    curve.t1_floor[i] * 1e6,
                    curve.flagged[i] as u8
                )
                .unwrap();
            }
        }
        Cmd::Stark {
            qubit_ghz,
            mode_ghz,
            kappa_mhz,
            eta_mhz,
            g_mhz,
            omega2_per_unit,
            standard_chi,
        } => {
            let scenario = StarkScenario {
                omega_q: ghz_to_rads(*qubit_ghz),
                eta: mhz_to_rads(*eta_mhz),
                omega_i: ghz_to_rads(*mode_ghz),
                kappa: mhz_to_rads(*kappa_mhz),
                g: mhz_to_rads(*g_mhz),
                omega_d: ghz_to_rads(*mode_ghz),
                amplitude: 0.0,
            };
            let formula = if *standard_chi {
                ChiFormula::Standard
            } else {
                ChiFormula::Primary
            };
            let powers: Vec<f64> =
                (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
            let map = power_sweep(&scenario, &powers, *omega2_per_unit, formula)?;
            body.push_str(&map.to_csv());
        }
        Cmd::DesignScan => {
            let cat = device_catalog(&dev, &grid)?;
            let spec = dev.hybrid_spec()?;
            let qubit = dev.semiclassical_qubit(false);
            let mut freqs = Vec::new();
            let mut gs = Vec::new();
            for m in &cat.modes {
                let f = rads_to_ghz(m.omega);
                let g = extract_g_participation(&spec, &qubit, f, half_window(&cat))?;
                freqs.push(f);
                gs.push(g.g_halfsplit_ghz);
            }
            let ratios = superstrong_ratios(&gs, &freqs)?;
            body.push_str("mode_GHz,g_MHz,spacing_MHz,g_over_spacing\n");
            for i in 0..freqs.len() {
                match ratios[i] {
                    Some(r) => writeln!(
                        body,
                        "{:.9},{:.6},{:.6},{:.6}",
                        freqs[i],
                        gs[i] * 1e3,
                        (freqs[i + 1] - freqs[i]) * 1e3,
                        r
                    )
                    .unwrap(),
                    None => {
                        writeln!(body, "{:.9},{:.6},,", freqs[i], gs[i] * 1e3).unwrap()
                    }
                }
            }
        }
    }

    std::fs::create_dir_all(cache_path.parent().unwrap())?;
    std::fs::write(&cache_path, &body)?;
    std::fs::write(&out_path, &body)?;
    Ok(out_path)
}

/// Half the median intermode spacing (GHz), used as the search window for
/// per-mode extraction.
fn half_window(cat: &ModeCatalog) -> f64 {
    let mut sp = cat.spacings();
    if sp.is_empty() {
        return 0.05;
    }
    sp.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rads_to_ghz(sp[sp.len() / 2]) / 2.0
}

fn device_catalog(dev: &DeviceDescription, grid: &FrequencyGrid) -> Result<ModeCatalog> {
    let spec = dev.hybrid_spec()?;
    let trace = spec.spectrum(grid)?;
    catalog(
        &trace,
        &DetectionParams {
            min_peak: dev.sweep_defaults.min_peak,
            ..DetectionParams::default()
        },
    )
}

fn load_device_text(arg: &str) -> Result<String> {
    match arg {
        "paper-device" => Ok(metaqed::device::PAPER_DEVICE_JSON.to_string()),
        "table2-device" => Ok(metaqed::device::TABLE2_DEVICE_JSON.to_string()),
        path => Ok(std::fs::read_to_string(Path::new(path))?),
    }
}

fn manifest_for(cli: &Cli, fmin: f64, fmax: f64, points: usize) -> (String, String) {
    let name = match &cli.cmd {
        Cmd::Spectrum => "spectrum".to_string(),
        Cmd::Dispersion => "dispersion".to_string(),
        Cmd::Modes => "modes".to_string(),
        Cmd::RabiMap { .. } => "rabi-map".to_string(),
        Cmd::FitG => "fit-g".to_string(),
        Cmd::T1 => "t1".to_string(),
        Cmd::Stark { .. } => "stark".to_string(),
        Cmd::DesignScan => "design-scan".to_string(),
    };
    let extra = match &cli.cmd {
        Cmd::RabiMap {
            flux_min,
            flux_max,
            flux_points,
            levels,
            max_modes,
            n_fock,
        } => format!(
            "flux={flux_min}..{flux_max}x{flux_points};levels={levels};modes={max_modes};fock={n_fock}"
        ),
        Cmd::Stark {
            qubit_ghz,
            mode_ghz,
            kappa_mhz,
            eta_mhz,
            g_mhz,
            omega2_per_unit,
            standard_chi,
        } => format!(
            "q={qubit_ghz};m={mode_ghz};k={kappa_mhz};eta={eta_mhz};g={g_mhz};cal={omega2_per_unit};std={standard_chi}"
        ),
        _ => String::new(),
    };
    let manifest = format!(
        "{name};fmin={fmin};fmax={fmax};points={points};seed={};{extra};v={VERSION}",
        cli.seed
    );
    (name, manifest)
}

fn cache_key(device_text: &str, manifest: &str) -> String {
    let mut h = Sha256::new();
    h.update(device_text.as_bytes());
    h.update([0u8]);
    h.update(manifest.as_bytes());
    format!("{:x}", h.finalize())
}

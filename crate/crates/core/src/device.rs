//! Device-description files: a JSON schema with unit suffixes baked into
//! the field names, full-file validation that collects every failure, and
//! conversions into the circuit, environment and qubit specs the solver
//! modules consume.

use serde::{Deserialize, Serialize};

use crate::coupling::SemiclassicalQubit;
use crate::error::{Error, Result};
use crate::hybrid::{HybridResonatorSpec, Rhtl, TapPosition};
use crate::lhtl::LhtlCell;
use crate::purcell::{EnvironmentSpec, MetamaterialBranch, ReadoutBranch};
use crate::transmon::TransmonSpec;
use crate::units::{ff, mm, nh};

/// Bundled description of the measured device.
pub const PAPER_DEVICE_JSON: &str = include_str!("../fixtures/paper-device.json");
/// Bundled description of the hypothetical high-impedance design.
pub const TABLE2_DEVICE_JSON: &str = include_str!("../fixtures/table2-device.json");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeviceDescription {
    pub metamaterial: MetamaterialSection,
    pub qubit: QubitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<ReadoutSection>,
    pub sweep_defaults: SweepDefaults,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetamaterialSection {
    pub n_cells: usize,
    #[serde(rename = "L_l_nH")]
    pub l_l_nh: f64,
    #[serde(rename = "C_l_fF")]
    pub c_l_ff: f64,
    #[serde(rename = "L_r_nH")]
    pub l_r_nh: f64,
    #[serde(rename = "C_r_fF")]
    pub c_r_ff: f64,
    pub dx_um: f64,
    #[serde(rename = "C_cM_in_fF")]
    pub c_cm_in_ff: f64,
    #[serde(rename = "C_cM_out_fF")]
    pub c_cm_out_ff: f64,
    pub rhtl: RhtlSection,
    pub tap: TapSection,
    #[serde(rename = "R0_ohm")]
    pub r0_ohm: f64,
    #[serde(rename = "internal_Q")]
    pub internal_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RhtlSection {
    Distributed {
        #[serde(rename = "Z0_ohm")]
        z0_ohm: f64,
        length_mm: f64,
        epsilon: f64,
    },
    Lumped {
        n_cells: usize,
        #[serde(rename = "L_RH_nH")]
        l_rh_nh: f64,
        #[serde(rename = "C_RH_fF")]
        c_rh_ff: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TapSection {
    FromOutputMm(f64),
    CellsFromOutput(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    #[serde(rename = "E_C_GHz")]
    pub ec_ghz: f64,
    #[serde(rename = "E_J0_GHz")]
    pub ej0_ghz: f64,
    #[serde(rename = "f01_max_GHz")]
    pub f01_max_ghz: f64,
    #[serde(rename = "C_Q_fF")]
    pub c_q_ff: f64,
    #[serde(rename = "C_J_fF")]
    pub c_j_ff: f64,
    #[serde(rename = "C_QM_fF")]
    pub c_qm_ff: f64,
    /// Cross-check against C_Q + 2 C_J + C_QM (+ C_QR with a readout).
    #[serde(rename = "C_Sigma_fF")]
    pub c_sigma_ff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    #[serde(rename = "f_R_GHz")]
    pub f_r_ghz: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "C_QR_fF")]
    pub c_qr_ff: f64,
    #[serde(rename = "l_A_mm")]
    pub l_a_mm: f64,
    #[serde(rename = "l_B_mm")]
    pub l_b_mm: f64,
    #[serde(rename = "Z0_ohm")]
    pub z0_ohm: f64,
    pub epsilon: f64,
    #[serde(rename = "C_cR_in_fF")]
    pub c_cr_in_ff: f64,
    #[serde(rename = "C_cR_out_fF")]
    pub c_cr_out_ff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepDefaults {
    #[serde(rename = "fmin_GHz")]
    pub fmin_ghz: f64,
    #[serde(rename = "fmax_GHz")]
    pub fmax_ghz: f64,
    pub points: usize,
    /// Background-loss floor calibration: T1_floor = A / ω.
    #[serde(rename = "t1_floor_A")]
    pub t1_floor_a: f64,
    /// Absolute |S21| detection floor for mode cataloging.
    pub min_peak: f64,
}

impl DeviceDescription {
    /// Parse and validate a JSON description. Serde errors already name
    /// the offending field; invariant violations are collected en masse.
    pub fn from_json(text: &str) -> Result<Self> {
        let desc: DeviceDescription = serde_json::from_str(text)?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        // infallible for this schema
        serde_json::to_string_pretty(self).expect("device description serializes")
    }

    /// Checks every invariant and reports all violations, each prefixed
    /// with the JSON field path.
    pub fn validate(&self) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let m = &self.metamaterial;
        let positive = |errs: &mut Vec<String>, path: &str, v: f64| {
            if !(v > 0.0) {
                errs.push(format!("{path}: must be positive, got {v}"));
            }
        };
        if m.n_cells == 0 {
            errs.push("metamaterial.n_cells: must be at least 1".into());
        }
        positive(&mut errs, "metamaterial.L_l_nH", m.l_l_nh);
        positive(&mut errs, "metamaterial.C_l_fF", m.c_l_ff);
        positive(&mut errs, "metamaterial.L_r_nH", m.l_r_nh);
        positive(&mut errs, "metamaterial.C_r_fF", m.c_r_ff);
        positive(&mut errs, "metamaterial.dx_um", m.dx_um);
        positive(&mut errs, "metamaterial.C_cM_in_fF", m.c_cm_in_ff);
        positive(&mut errs, "metamaterial.C_cM_out_fF", m.c_cm_out_ff);
        positive(&mut errs, "metamaterial.R0_ohm", m.r0_ohm);
        positive(&mut errs, "metamaterial.internal_Q", m.internal_q);
        match &m.rhtl {
            RhtlSection::Distributed { z0_ohm, length_mm, epsilon } => {
                positive(&mut errs, "metamaterial.rhtl.Z0_ohm", *z0_ohm);
                positive(&mut errs, "metamaterial.rhtl.length_mm", *length_mm);
                if *epsilon < 1.0 {
                    errs.push(format!(
                        "metamaterial.rhtl.epsilon: effective permittivity must be >= 1, got {epsilon}"
                    ));
                }
                match &m.tap {
                    TapSection::FromOutputMm(d) => {
                        if *d < 0.0 || *d > *length_mm {
                            errs.push(format!(
                                "metamaterial.tap.from_output_mm: {d} outside [0, {length_mm}]"
                            ));
                        }
                    }
                    TapSection::CellsFromOutput(_) => {
                        errs.push(
                            "metamaterial.tap: cells_from_output requires a lumped rhtl".into(),
                        );
                    }
                }
            }
            RhtlSection::Lumped { n_cells, l_rh_nh, c_rh_ff } => {
                if *n_cells == 0 {
                    errs.push("metamaterial.rhtl.n_cells: must be at least 1".into());
                }
                positive(&mut errs, "metamaterial.rhtl.L_RH_nH", *l_rh_nh);
                positive(&mut errs, "metamaterial.rhtl.C_RH_fF", *c_rh_ff);
                match &m.tap {
                    TapSection::CellsFromOutput(k) => {
                        if *k > *n_cells {
                            errs.push(format!(
                                "metamaterial.tap.cells_from_output: {k} exceeds rhtl.n_cells {n_cells}"
                            ));
                        }
                    }
                    TapSection::FromOutputMm(_) => {
                        errs.push(
                            "metamaterial.tap: from_output_mm requires a distributed rhtl".into(),
                        );
                    }
                }
            }
        }

        let q = &self.qubit;
        positive(&mut errs, "qubit.E_C_GHz", q.ec_ghz);
        positive(&mut errs, "qubit.E_J0_GHz", q.ej0_ghz);
        positive(&mut errs, "qubit.f01_max_GHz", q.f01_max_ghz);
        positive(&mut errs, "qubit.C_Q_fF", q.c_q_ff);
        positive(&mut errs, "qubit.C_J_fF", q.c_j_ff);
        positive(&mut errs, "qubit.C_QM_fF", q.c_qm_ff);
        let mut c_sum = q.c_q_ff + 2.0 * q.c_j_ff + q.c_qm_ff;
        if let Some(r) = &self.readout {
            c_sum += r.c_qr_ff;
            positive(&mut errs, "readout.f_R_GHz", r.f_r_ghz);
            positive(&mut errs, "readout.Q", r.q);
            positive(&mut errs, "readout.C_QR_fF", r.c_qr_ff);
            positive(&mut errs, "readout.l_A_mm", r.l_a_mm);
            positive(&mut errs, "readout.l_B_mm", r.l_b_mm);
            positive(&mut errs, "readout.Z0_ohm", r.z0_ohm);
            if r.epsilon < 1.0 {
                errs.push(format!(
                    "readout.epsilon: effective permittivity must be >= 1, got {}",
                    r.epsilon
                ));
            }
            positive(&mut errs, "readout.C_cR_in_fF", r.c_cr_in_ff);
            positive(&mut errs, "readout.C_cR_out_fF", r.c_cr_out_ff);
        }
        if (q.c_sigma_ff - c_sum).abs() > 0.05 {
            errs.push(format!(
                "qubit.C_Sigma_fF: {} inconsistent with summed capacitances {c_sum}",
                q.c_sigma_ff
            ));
        }

        let s = &self.sweep_defaults;
        positive(&mut errs, "sweep_defaults.fmin_GHz", s.fmin_ghz);
        if s.fmax_ghz <= s.fmin_ghz {
            errs.push(format!(
                "sweep_defaults.fmax_GHz: {} must exceed fmin_GHz {}",
                s.fmax_ghz, s.fmin_ghz
            ));
        }
        if s.points < 2 {
            errs.push("sweep_defaults.points: need at least 2 grid points".into());
        }
        positive(&mut errs, "sweep_defaults.t1_floor_A", s.t1_floor_a);
        if s.min_peak < 0.0 || s.min_peak >= 1.0 {
            errs.push(format!(
                "sweep_defaults.min_peak: {} outside [0, 1)",
                s.min_peak
            ));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn lhtl_cell(&self) -> Result<LhtlCell> {
        let m = &self.metamaterial;
        LhtlCell::new(
            ff(m.c_l_ff),
            nh(m.l_l_nh),
            nh(m.l_r_nh),
            ff(m.c_r_ff),
            m.dx_um * 1e-6,
        )
    }

    /// Full two-port resonator network for transmission sweeps.
    pub fn hybrid_spec(&self) -> Result<HybridResonatorSpec> {
        let m = &self.metamaterial;
        let rhtl = match &m.rhtl {
            RhtlSection::Distributed { z0_ohm, length_mm, epsilon } => Rhtl::Distributed {
                z0: *z0_ohm,
                length: mm(*length_mm),
                epsilon: *epsilon,
            },
            RhtlSection::Lumped { n_cells, l_rh_nh, c_rh_ff } => Rhtl::Lumped {
                n_cells: *n_cells,
                l_series: nh(*l_rh_nh),
                c_shunt: ff(*c_rh_ff),
            },
        };
        let tap = match &m.tap {
            TapSection::FromOutputMm(d) => TapPosition::FromOutput(mm(*d)),
            TapSection::CellsFromOutput(k) => TapPosition::CellsFromOutput(*k),
        };
        let spec = HybridResonatorSpec {
            n_cells: m.n_cells,
            cell: self.lhtl_cell()?,
            c_in: ff(m.c_cm_in_ff),
            c_out: ff(m.c_cm_out_ff),
            rhtl,
            tap,
            r0: m.r0_ohm,
            internal_q: m.internal_q,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn transmon_spec(&self) -> Result<TransmonSpec> {
        TransmonSpec::new(self.qubit.ec_ghz, self.qubit.ej0_ghz)
    }

    /// Total qubit island capacitance (F).
    pub fn c_sigma(&self) -> f64 {
        ff(self.qubit.c_sigma_ff)
    }

    /// Shunt capacitance governing the Purcell rate: the qubit's own
    /// capacitance without the coupling capacitors.
    pub fn c_shunt(&self) -> f64 {
        ff(self.qubit.c_q_ff + 2.0 * self.qubit.c_j_ff)
    }

    /// Readout branch as seen from the qubit node, if the device has one.
    pub fn readout_branch(&self) -> Option<ReadoutBranch> {
        self.readout.as_ref().map(|r| ReadoutBranch {
            c_qr: ff(r.c_qr_ff),
            l_a: mm(r.l_a_mm),
            l_b: mm(r.l_b_mm),
            z0: r.z0_ohm,
            c_in: ff(r.c_cr_in_ff),
            c_out: ff(r.c_cr_out_ff),
            r0: self.metamaterial.r0_ohm,
            // pi/2 radians per resonator length with loss tangent 1e-5
            alpha: 1e-5 * std::f64::consts::PI / (2.0 * mm(r.l_a_mm)),
            epsilon: r.epsilon,
        })
    }

    /// Lumped LC stand-in for the qubit used by the semiclassical
    /// coupling extraction. The readout branch contaminates the
    /// branch-pair detection near its own resonance, so it is opt-in.
    pub fn semiclassical_qubit(&self, include_readout: bool) -> SemiclassicalQubit {
        SemiclassicalQubit {
            c_sigma: self.c_sigma(),
            c_qm: ff(self.qubit.c_qm_ff),
            readout: if include_readout {
                self.readout_branch()
            } else {
                None
            },
        }
    }

    /// Two-branch admittance environment for the Purcell calculation.
    /// Requires a readout section and a distributed RHTL.
    pub fn environment_spec(&self) -> Result<EnvironmentSpec> {
        let m = &self.metamaterial;
        let readout = self.readout_branch().ok_or_else(|| {
            Error::Config("relaxation environment requires a readout section".into())
        })?;
        let (z0, length, epsilon) = match &m.rhtl {
            RhtlSection::Distributed { z0_ohm, length_mm, epsilon } => {
                (*z0_ohm, mm(*length_mm), *epsilon)
            }
            RhtlSection::Lumped { .. } => {
                return Err(Error::Config(
                    "relaxation environment requires a distributed rhtl".into(),
                ));
            }
        };
        let l_out = match &m.tap {
            TapSection::FromOutputMm(d) => mm(*d),
            TapSection::CellsFromOutput(_) => unreachable!("validated against rhtl kind"),
        };
        let env = EnvironmentSpec {
            readout,
            metamaterial: MetamaterialBranch {
                c_qm: ff(self.qubit.c_qm_ff),
                cell: self.lhtl_cell()?,
                n_cells: m.n_cells,
                l_out,
                l_in: length - l_out,
                z0,
                c_cm_in: ff(m.c_cm_in_ff),
                c_cm_out: ff(m.c_cm_out_ff),
                r0: m.r0_ohm,
                alpha: readout.alpha,
                epsilon,
            },
        };
        env.validate()?;
        Ok(env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rads_to_ghz;

    #[test]
    fn paper_fixture_parses_to_table_values() {
        let d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        assert_eq!(d.metamaterial.n_cells, 42);
        assert_eq!(d.metamaterial.l_l_nh, 0.7);
        assert_eq!(d.metamaterial.c_l_ff, 250.0);
        assert_eq!(d.metamaterial.l_r_nh, 0.03);
        assert_eq!(d.metamaterial.c_r_ff, 25.0);
        assert_eq!(d.metamaterial.dx_um, 23.0);
        assert_eq!(d.metamaterial.c_cm_in_ff, 30.0);
        assert_eq!(d.metamaterial.c_cm_out_ff, 25.0);
        assert_eq!(d.qubit.ec_ghz, 0.31);
        assert_eq!(d.qubit.ej0_ghz, 37.0);
        assert_eq!(d.qubit.f01_max_ghz, 9.25);
        assert_eq!(d.qubit.c_sigma_ff, 62.1);
        let r = d.readout.as_ref().unwrap();
        assert_eq!(r.f_r_ghz, 7.07);
        assert_eq!(r.q, 15463.0);
    }

    #[test]
    fn table2_fixture_parses() {
        let d = DeviceDescription::from_json(TABLE2_DEVICE_JSON).unwrap();
        assert_eq!(d.metamaterial.n_cells, 82);
        match d.metamaterial.rhtl {
            RhtlSection::Lumped { n_cells, l_rh_nh, c_rh_ff } => {
                assert_eq!(n_cells, 20);
                assert_eq!(l_rh_nh, 0.35);
                assert_eq!(c_rh_ff, 9.5);
            }
            _ => panic!("hypothetical design uses a lumped rhtl"),
        }
        assert_eq!(d.qubit.c_qm_ff, 50.0);
        assert_eq!(d.qubit.c_q_ff, 50.0);
        assert!(d.readout.is_none());
    }

    #[test]
    fn missing_field_names_it() {
        let broken = PAPER_DEVICE_JSON.replacen("\"L_l_nH\"", "\"L_l_nHx\"", 1);
        let err = DeviceDescription::from_json(&broken).unwrap_err();
        assert!(err.to_string().contains("L_l_nH"), "error was: {err}");
    }

    #[test]
    fn round_trip_identity() {
        let d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        let d2 = DeviceDescription::from_json(&d.to_json()).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn validation_collects_all_failures() {
        let mut d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        d.metamaterial.l_l_nh = -1.0;
        d.qubit.ec_ghz = 0.0;
        d.sweep_defaults.points = 1;
        match d.validate() {
            Err(Error::Validation(v)) => {
                assert!(v.len() >= 3, "got {v:?}");
                assert!(v.iter().any(|e| e.contains("metamaterial.L_l_nH")));
                assert!(v.iter().any(|e| e.contains("qubit.E_C_GHz")));
                assert!(v.iter().any(|e| e.contains("sweep_defaults.points")));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn c_sigma_cross_check_rejects() {
        let mut d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        d.qubit.c_sigma_ff = 70.0;
        assert!(d.validate().is_err());
    }

    #[test]
    fn tap_kind_must_match_rhtl() {
        let mut d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        d.metamaterial.tap = TapSection::CellsFromOutput(3);
        assert!(d.validate().is_err());
    }

    #[test]
    fn conversions_produce_consistent_specs() {
        let d = DeviceDescription::from_json(PAPER_DEVICE_JSON).unwrap();
        let hybrid = d.hybrid_spec().unwrap();
        assert_eq!(hybrid.n_cells, 42);
        let cutoff = rads_to_ghz(hybrid.cell.omega_ir());
        assert!((cutoff - 6.015).abs() < 0.01, "IR cutoff {cutoff} GHz");
        let env = d.environment_spec().unwrap();
        assert!((env.metamaterial.l_in - 4.0e-3).abs() < 1e-9);
        let sq = d.semiclassical_qubit(false);
        assert!((sq.c_sigma - 62.1e-15).abs() < 1e-20);
        assert!(sq.readout.is_none());
        assert!(d.semiclassical_qubit(true).readout.is_some());
        assert!((d.c_shunt() - 53.0e-15).abs() < 1e-20);
    }

    #[test]
    fn lumped_design_has_no_relaxation_environment() {
        let d = DeviceDescription::from_json(TABLE2_DEVICE_JSON).unwrap();
        assert!(d.environment_spec().is_err());
    }
}

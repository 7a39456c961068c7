//! Experiment configuration: file schema, per-figure defaults, and the
//! translation into core types.
//!
//! Config files are TOML (or JSON, by extension); unknown keys are
//! rejected. Every run embeds its fully resolved config in the summary so
//! an output can be reproduced from the summary alone.

use std::path::Path;

use serde::{Deserialize, Serialize};
use upwave::medium::{GuideMedium, LorentzParams};
use upwave::propagation::{PvScheme, QuadratureConfig, TimeGrid};
use upwave::receiver::ReceiverConfig;
use upwave::source::{PulseTrain, SourceSpec, TrainTerm, WindowKind, WindowSpec};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub medium: MediumCfg,
    pub source: SourceCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainCfg>,
    pub quadrature: QuadCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<ReceiverCfg>,
    pub sweep: SweepCfg,
    #[serde(default)]
    pub output: OutputCfg,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MediumCfg {
    pub omega_c: f64,
    pub n1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lorentz: Option<LorentzCfg>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LorentzCfg {
    pub omega_p: f64,
    pub omega_l: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SourceCfg {
    pub omega0: f64,
    /// One of "sharp", "linear-edge", "smooth-edge".
    pub kind: WindowKind,
    #[serde(default)]
    pub delta_omega: f64,
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrainCfg {
    pub weights: Vec<f64>,
    /// Delays in seconds, first must be 0.
    pub t_shifts: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadCfg {
    pub n_omega: usize,
    pub tolerance: f64,
    pub t_start: f64,
    pub t_step: f64,
    pub n_t: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReceiverCfg {
    pub l0: f64,
    pub hold_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, untagged)]
pub enum SweepCfg {
    List { z: Vec<f64> },
    Range { z_start: f64, z_stop: f64, n_z: usize },
}

impl SweepCfg {
    pub fn positions(&self) -> Result<Vec<f64>, CliError> {
        let zs = match self {
            SweepCfg::List { z } => z.clone(),
            SweepCfg::Range { z_start, z_stop, n_z } => {
                if *n_z < 1 || z_stop < z_start {
                    return Err(CliError::Config("sweep range must be non-empty".into()));
                }
                if *n_z == 1 {
                    vec![*z_start]
                } else {
                    (0..*n_z)
                        .map(|i| z_start + (z_stop - z_start) * i as f64 / (*n_z - 1) as f64)
                        .collect()
                }
            }
        };
        if zs.is_empty() {
            return Err(CliError::Config("sweep has no positions".into()));
        }
        if zs.iter().any(|z| *z < 0.0 || !z.is_finite()) {
            return Err(CliError::Config("sweep positions must be finite and >= 0".into()));
        }
        Ok(zs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    /// Keep every n-th time sample in series CSVs.
    pub decimate: usize,
}

impl Default for OutputCfg {
    fn default() -> Self {
        Self { decimate: 1 }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&body)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&body)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        cfg.core_medium()?;
        cfg.core_source()?;
        cfg.core_quadrature()?;
        cfg.sweep.positions()?;
        if cfg.output.decimate == 0 {
            return Err(CliError::Config("output.decimate must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn core_medium(&self) -> Result<GuideMedium<f64>, CliError> {
        let m = GuideMedium::new(self.medium.omega_c, self.medium.n1)
            .map_err(|e| CliError::Config(format!("medium: {e}")))?;
        match &self.medium.lorentz {
            None => Ok(m),
            Some(l) => {
                let p = LorentzParams::new(l.omega_p, l.omega_l, l.delta)
                    .map_err(|e| CliError::Config(format!("medium.lorentz: {e}")))?;
                m.with_lorentz(p)
                    .map_err(|e| CliError::Config(format!("medium.lorentz: {e}")))
            }
        }
    }

    pub fn core_source(&self) -> Result<SourceSpec<f64>, CliError> {
        let w = if self.source.kind == WindowKind::Sharp {
            WindowSpec::sharp()
        } else {
            WindowSpec::new(self.source.kind, self.source.delta_omega, self.source.alpha)
                .map_err(|e| CliError::Config(format!("source: {e}")))?
        };
        SourceSpec::new(self.source.omega0, w)
            .map_err(|e| CliError::Config(format!("source: {e}")))
    }

    /// Source with the same band but a different edge family/width, used by
    /// the multi-window figures.
    pub fn source_variant(&self, kind: WindowKind, alpha: f64) -> Result<SourceSpec<f64>, CliError> {
        let w = WindowSpec::new(kind, self.source.delta_omega, alpha)
            .map_err(|e| CliError::Config(format!("source: {e}")))?;
        SourceSpec::new(self.source.omega0, w)
            .map_err(|e| CliError::Config(format!("source: {e}")))
    }

    pub fn core_train(&self) -> Result<PulseTrain<f64>, CliError> {
        let t = self
            .train
            .as_ref()
            .ok_or_else(|| CliError::Config("this run needs a [train] section".into()))?;
        if t.weights.len() != t.t_shifts.len() {
            return Err(CliError::Config(
                "train.weights and train.t_shifts must have equal length".into(),
            ));
        }
        let terms = t
            .weights
            .iter()
            .zip(&t.t_shifts)
            .map(|(&weight, &t_shift)| TrainTerm { weight, t_shift })
            .collect();
        PulseTrain::new(self.core_source()?, terms)
            .map_err(|e| CliError::Config(format!("train: {e}")))
    }

    pub fn core_quadrature(&self) -> Result<QuadratureConfig, CliError> {
        let q = QuadratureConfig {
            n_omega: self.quadrature.n_omega,
            pv_scheme: PvScheme::PlemeljSubtraction,
            tolerance: self.quadrature.tolerance,
            t_grid: TimeGrid {
                t_start: self.quadrature.t_start,
                t_step: self.quadrature.t_step,
                n_t: self.quadrature.n_t,
            },
        };
        q.validate(&self.core_source()?.window)
            .map_err(|e| CliError::Config(format!("quadrature: {e}")))?;
        Ok(q)
    }

    pub fn core_receiver(&self) -> Result<ReceiverConfig, CliError> {
        let r = self
            .receiver
            .as_ref()
            .ok_or_else(|| CliError::Config("this run needs a [receiver] section".into()))?;
        ReceiverConfig::new(r.l0, r.hold_time, self.quadrature.t_step)
            .map_err(|e| CliError::Config(format!("receiver: {e}")))
    }
}

/// Built-in defaults per run target, matching the published parameter sets.
pub fn default_config(target: &str) -> ExperimentConfig {
    let medium = MediumCfg { omega_c: 9.5e9, n1: 0.2e6, lorentz: None };
    let narrow = SourceCfg {
        omega0: 9.49e9,
        kind: WindowKind::SmoothEdge,
        delta_omega: 0.8e9,
        alpha: 0.8e9,
    };
    let wide = SourceCfg {
        omega0: 9.49e9,
        kind: WindowKind::SmoothEdge,
        delta_omega: 2.0e9,
        alpha: 0.4e9,
    };
    // 4x Nyquist margin for the narrow band, 6 us span.
    let quad_narrow = QuadCfg {
        n_omega: 1 << 17,
        tolerance: 1e-4,
        t_start: 0.0,
        t_step: 4.9e-10,
        n_t: 12_245,
    };
    // Long grid covering the whole pulse train.
    let quad_train = QuadCfg {
        n_omega: 1 << 20,
        tolerance: 1e-5,
        t_start: 0.0,
        t_step: 1e-9,
        n_t: 250_000,
    };
    let train = Some(TrainCfg {
        weights: vec![1.0, -0.5, 1.0, -0.5],
        t_shifts: vec![0.0, 80e-6, 150e-6, 240e-6],
    });
    let receiver = Some(ReceiverCfg { l0: 0.5e-5, hold_time: 1e-7 });

    match target {
        "fig5" | "fig6" | "decode" => ExperimentConfig {
            medium,
            source: wide,
            train,
            quadrature: quad_train,
            receiver,
            sweep: SweepCfg::List { z: vec![200.0, 250.0, 300.0] },
            output: OutputCfg { decimate: 10 },
        },
        "fig3" => ExperimentConfig {
            medium,
            source: narrow,
            train: None,
            quadrature: QuadCfg { n_omega: 1 << 18, ..quad_narrow },
            receiver: None,
            sweep: SweepCfg::Range { z_start: 160.0, z_stop: 300.0, n_z: 15 },
            output: OutputCfg::default(),
        },
        // The above-cut-off carrier in fig4 converges slowly; give it a
        // denser grid and a looser residual bound.
        "fig4" => ExperimentConfig {
            medium,
            source: narrow,
            train: None,
            quadrature: QuadCfg { n_omega: 1 << 18, tolerance: 1e-3, ..quad_narrow },
            receiver: None,
            sweep: SweepCfg::Range { z_start: 120.0, z_stop: 280.0, n_z: 9 },
            output: OutputCfg::default(),
        },
        // fig1, fig2, validate
        _ => ExperimentConfig {
            medium,
            source: narrow,
            train: None,
            quadrature: quad_narrow,
            receiver: None,
            sweep: SweepCfg::List { z: vec![150.0] },
            output: OutputCfg::default(),
        },
    }
}

//! Versioned JSON model files and fit reports.

use std::fs;
use std::path::Path;

use quasifit_core::estimator::FitStats;
use quasifit_core::{FittedModel, SolveStatus};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: &str = "quasifit-model-v1";

/// On-disk form of a fitted model. The model carries the design points,
/// fitted values, sort permutation, shape, rescaling maps and solver
/// statistics; floats are written so that they read back bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: String,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn new(model: FittedModel) -> Self {
        Self { version: FORMAT_VERSION.into(), model }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        #[derive(Deserialize)]
        struct Probe {
            version: Option<String>,
        }
        let probe: Probe =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("model file is not valid JSON: {e}")))?;
        match probe.version.as_deref() {
            Some(FORMAT_VERSION) => {}
            Some(v) => return Err(CliError::Input(format!("unsupported model format {v:?}"))),
            None => return Err(CliError::Input("model file has no version tag".into())),
        }
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed model file: {e}")))?;
        let m = &file.model;
        let d = m.dim();
        let ok = m.fitted.len() == m.points.len()
            && m.levels.len() == m.sorted_points.len()
            && m.order.len() == m.levels.len()
            && m.sorted_points.dim() == d
            && m.x_offset.len() == d
            && m.x_scale.len() == d;
        if !ok {
            return Err(CliError::Input("model file is internally inconsistent".into()));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Summary printed after a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub wall_ms: f64,
    pub status: SolveStatus,
    pub m_z: f64,
    pub m_xi: f64,
    pub eps: f64,
    pub gamma: f64,
    pub min_margin: Option<f64>,
}

impl From<&FitStats> for FitReport {
    fn from(s: &FitStats) -> Self {
        Self {
            objective: s.objective,
            lower_bound: s.lower_bound,
            gap: s.gap,
            nodes: s.nodes,
            wall_ms: s.wall_ms,
            status: s.status,
            m_z: s.m_z,
            m_xi: s.m_xi,
            eps: s.eps,
            gamma: s.gamma,
            min_margin: s.min_margin,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasifit_core::{fit, DataSet, ShapeSpec, SolverParams};

    fn example() -> FittedModel {
        let d = DataSet::from_rows(
            &[vec![1.0, 0.0], vec![0.75, 0.75], vec![0.0, 1.0], vec![0.3, 0.1]],
            vec![0.0, 1.0, 0.0, 1.0 / 3.0],
        )
        .unwrap();
        fit(&d, ShapeSpec::QUASICONVEX_DECREASING, &SolverParams::default()).unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = example();
        let back = ModelFile::from_json(&ModelFile::new(m.clone()).to_json()).unwrap();
        assert_eq!(back.model, m);
        for (i, p) in m.points.iter().enumerate() {
            assert_eq!(back.model.predict(p).unwrap().to_bits(), m.fitted[i].to_bits());
        }
    }

    #[test]
    fn version_is_checked() {
        let text = ModelFile::new(example()).to_json().replace(FORMAT_VERSION, "quasifit-model-v0");
        assert!(matches!(ModelFile::from_json(&text), Err(CliError::Input(_))));
        assert!(ModelFile::from_json("{}").is_err());
        assert!(ModelFile::from_json("not json").is_err());
    }
}

//! Return-mapping interface for elasto-plastic extensions.

use super::tensor::{Mat4, SymTensor};
use super::MaterialParams;
use crate::error::Result;

/// Corrected state returned by a plasticity model.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMapping {
    pub elastic_strain: SymTensor,
    pub internal_vars: Vec<f64>,
    /// Algorithmic tangent `∂ε_e/∂ε_trial` in Mandel form. `None` means identity.
    pub tangent: Option<Mat4>,
}

/// Maps a trial elastic strain onto the admissible set.
pub trait PlasticityModel: Send + Sync {
    fn return_map(
        &self,
        trial_elastic_strain: &SymTensor,
        internal_vars: &[f64],
        params: &MaterialParams,
    ) -> Result<ReturnMapping>;
}

/// Purely elastic behaviour: the trial state is always admissible.
#[derive(Debug, Clone, Copy, Default)]
pub struct Elastic;

impl PlasticityModel for Elastic {
    fn return_map(
        &self,
        trial_elastic_strain: &SymTensor,
        internal_vars: &[f64],
        _params: &MaterialParams,
    ) -> Result<ReturnMapping> {
        Ok(ReturnMapping {
            elastic_strain: *trial_elastic_strain,
            internal_vars: internal_vars.to_vec(),
            tangent: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elastic_passes_through() {
        let trial = SymTensor::new(0.1, 0.0, -0.02, 0.03);
        let out = Elastic.return_map(&trial, &[1.0, 2.0], &MaterialParams::default()).unwrap();
        assert_eq!(out.elastic_strain, trial);
        assert_eq!(out.internal_vars, vec![1.0, 2.0]);
        assert!(out.tangent.is_none());
    }
}

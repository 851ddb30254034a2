//! JSON input format: a sparse description of `(g, R, K, H, M)` together with
//! tolerances and sampling parameters.

use serde::{Deserialize, Serialize};

use crate::bialgebra::{validate_setup_with, ReductionSetup, ValidationTolerances};
use crate::error::{Error, Result};
use crate::lie_core::{LieAlgebra, Subspace, Tensor2, ANTISYMMETRY_TOL};
use crate::linalg::{Matrix, Vector};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    /// `[i, j, k, value]` meaning `[e_i, e_j] ∋ value e_k`.
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub jacobi: f64,
    pub residual: f64,
    pub cond_threshold: f64,
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi: 1e-10,
            residual: 1e-6,
            cond_threshold: 1e8,
            fd_step: 1e-5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampling {
    pub seed: u64,
    pub num_points: usize,
    pub box_radius: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            seed: 20240611,
            num_points: 10,
            box_radius: 1.0,
        }
    }
}

/// `subalgebra_K`, `subalgebra_H` and `complement_M` are lists of coordinate
/// vectors in the basis of `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub schema_version: String,
    pub scalars: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
    /// `[a, b, value]` entries of `R`; each is mirrored to `(b, a, -value)`.
    #[serde(default)]
    pub r_matrix: Vec<(usize, usize, f64)>,
    #[serde(rename = "subalgebra_K")]
    pub subalgebra_k: Vec<Vec<f64>>,
    #[serde(rename = "subalgebra_H")]
    pub subalgebra_h: Vec<Vec<f64>>,
    #[serde(rename = "complement_M", default)]
    pub complement_m: Vec<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: Sampling,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if spec.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version `{}`", spec.schema_version)));
        }
        if spec.scalars != "real" {
            return Err(Error::Parse(format!("unsupported scalars `{}`", spec.scalars)));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files always serialize")
    }

    pub fn algebra(&self) -> Result<LieAlgebra> {
        LieAlgebra::from_triplets(self.algebra.dim, &self.algebra.structure_constants, self.algebra.labels.clone())
    }

    pub fn r(&self) -> Result<Tensor2> {
        let n = self.algebra.dim;
        let mut m = Matrix::zeros(n, n);
        let mut seen = vec![false; n * n];
        for &(a, b, v) in &self.r_matrix {
            if a >= n || b >= n {
                return Err(Error::InputShape(format!("r-matrix index ({a}, {b}) out of range for dimension {n}")));
            }
            if a == b {
                if v != 0.0 {
                    return Err(Error::NotAntisymmetric { residual: v.abs() });
                }
                continue;
            }
            if seen[a * n + b] {
                if m[(a, b)] == v {
                    continue;
                }
                let residual = (m[(a, b)] - v).abs();
                return Err(Error::NotAntisymmetric { residual });
            }
            seen[a * n + b] = true;
            seen[b * n + a] = true;
            m[(a, b)] = v;
            m[(b, a)] = -v;
        }
        Tensor2::antisymmetric(m)
    }

    fn vectors(&self, rows: &[Vec<f64>], name: &str) -> Result<Vec<Vector>> {
        rows.iter()
            .map(|r| {
                if r.len() != self.algebra.dim {
                    Err(Error::InputShape(format!(
                        "{name} vector of length {} in a {}-dimensional algebra",
                        r.len(),
                        self.algebra.dim
                    )))
                } else {
                    Ok(Vector::from_column_slice(r))
                }
            })
            .collect()
    }

    /// Parse and validate every hypothesis, returning the setup or the first
    /// violated condition.
    pub fn to_setup(&self) -> Result<ReductionSetup> {
        let g = self.algebra()?;
        let r = self.r()?;
        let k = Subspace::new("K", g.dim(), &self.vectors(&self.subalgebra_k, "K")?)?;
        let h = self.vectors(&self.subalgebra_h, "H")?;
        let m = self.vectors(&self.complement_m, "M")?;
        let tol = ValidationTolerances {
            antisymmetry: ANTISYMMETRY_TOL,
            jacobi: self.tolerances.jacobi,
        };
        validate_setup_with(&g, &r, &k, &h, &m, tol)
    }

    /// Assemble a spec file from dense data.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: &str,
        g: &LieAlgebra,
        r: &Tensor2,
        k: &[Vector],
        h: &[Vector],
        m: &[Vector],
        tolerances: Tolerances,
        sampling: Sampling,
    ) -> Self {
        let n = g.dim();
        let mut r_entries = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let v = r.get(a, b);
                if v != 0.0 {
                    r_entries.push((a, b, v));
                }
            }
        }
        let rows = |vs: &[Vector]| vs.iter().map(|v| v.iter().copied().collect()).collect();
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            scalars: "real".to_string(),
            name: Some(name.to_string()),
            algebra: AlgebraSpec {
                dim: n,
                labels: g.labels().to_vec(),
                structure_constants: g.triplets(),
            },
            r_matrix: r_entries,
            subalgebra_k: rows(k),
            subalgebra_h: rows(h),
            complement_m: rows(m),
            tolerances,
            sampling,
        }
    }
}

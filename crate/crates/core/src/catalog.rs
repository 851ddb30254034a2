//! Built-in setups: the abelian plane, sl2 with and without the standard
//! r-matrix, and split sl3 reduced to a Levi or a Cartan subalgebra.

use crate::bialgebra::ReductionSetup;
use crate::error::{Error, Result};
use crate::lie_core::{LieAlgebra, Tensor2};
use crate::linalg::{Matrix, Vector};
use crate::specfile::{Sampling, SpecFile, Tolerances};

/// Chevalley basis of sl3 in the order `h1, h2, e1, e2, e3, f1, f2, f3` with
/// `h1 = E11 - E22`, `h2 = E22 - E33`, `e1 = E12`, `e2 = E23`, `e3 = E13`
/// and `f_i` the transposes. Entries are `(i, j, k, c)` with `i < j`.
const SL3_TABLE: [(usize, usize, usize, f64); 22] = [
    (0, 2, 2, 2.0),
    (0, 3, 3, -1.0),
    (0, 4, 4, 1.0),
    (0, 5, 5, -2.0),
    (0, 6, 6, 1.0),
    (0, 7, 7, -1.0),
    (1, 2, 2, -1.0),
    (1, 3, 3, 2.0),
    (1, 4, 4, 1.0),
    (1, 5, 5, 1.0),
    (1, 6, 6, -2.0),
    (1, 7, 7, -1.0),
    (2, 3, 4, 1.0),
    (2, 5, 0, 1.0),
    (2, 7, 6, -1.0),
    (3, 6, 1, 1.0),
    (3, 7, 5, 1.0),
    (4, 5, 3, -1.0),
    (4, 6, 2, 1.0),
    (4, 7, 0, 1.0),
    (4, 7, 1, 1.0),
    (5, 6, 7, -1.0),
];

/// Positive/negative root vector pairs `(e_α, f_α)` of sl3.
const SL3_ROOT_PAIRS: [(usize, usize); 3] = [(2, 5), (3, 6), (4, 7)];

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// sl2 in the basis `h, e, f`.
pub fn sl2() -> LieAlgebra {
    LieAlgebra::from_triplets(3, &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)], labels(&["h", "e", "f"])).expect("static table")
}

pub fn sl3() -> LieAlgebra {
    LieAlgebra::from_triplets(8, &SL3_TABLE, labels(&["h1", "h2", "e1", "e2", "e3", "f1", "f2", "f3"])).expect("static table")
}

/// The 3x3 matrices of the sl3 basis, in the order used by [`sl3`].
pub fn sl3_defining_rep() -> Vec<Matrix> {
    let unit = |i: usize, j: usize| {
        let mut m = Matrix::zeros(3, 3);
        m[(i, j)] = 1.0;
        m
    };
    vec![
        unit(0, 0) - unit(1, 1),
        unit(1, 1) - unit(2, 2),
        unit(0, 1),
        unit(1, 2),
        unit(0, 2),
        unit(1, 0),
        unit(2, 1),
        unit(2, 0),
    ]
}

fn dj_r(dim: usize, pairs: &[(usize, usize)]) -> Tensor2 {
    let mut m = Matrix::zeros(dim, dim);
    for &(e, f) in pairs {
        m[(e, f)] += 0.5;
        m[(f, e)] -= 0.5;
    }
    Tensor2::from_matrix(m)
}

/// `½ (e ⊗ f - f ⊗ e)`
pub fn sl2_dj_r() -> Tensor2 {
    dj_r(3, &[(1, 2)])
}

/// `½ Σ_{α > 0} (e_α ⊗ f_α - f_α ⊗ e_α)`
pub fn sl3_dj_r() -> Tensor2 {
    dj_r(8, &SL3_ROOT_PAIRS)
}

pub(crate) fn units(dim: usize, idx: &[usize]) -> Vec<Vector> {
    idx.iter()
        .map(|&i| {
            let mut v = Vector::zeros(dim);
            v[i] = 1.0;
            v
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub notes: &'static str,
    pub spec: SpecFile,
}

const ENTRIES: [&str; 5] = ["abelian2", "sl2_classical", "sl2_dj", "sl3_dj_levi", "sl3_dj_cartan"];

pub fn list_entries() -> &'static [&'static str] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    let tol = Tolerances::default();
    let sampling = Sampling::default();
    let (notes, spec) = match name {
        "abelian2" => {
            let g = LieAlgebra::abelian(2);
            let all = units(2, &[0, 1]);
            (
                "2-dimensional abelian algebra, R = 0, H = K = g; every reduced quantity vanishes",
                SpecFile::from_parts(name, &g, &Tensor2::zeros(2), &all, &all, &[], tol, sampling),
            )
        }
        "sl2_classical" => (
            "sl2 with R = 0 and H the Cartan line: the dual group is abelian and the reduction yields the classical dynamical r-matrix",
            SpecFile::from_parts(
                name,
                &sl2(),
                &Tensor2::zeros(3),
                &units(3, &[0, 1, 2]),
                &units(3, &[0]),
                &units(3, &[1, 2]),
                tol,
                sampling,
            ),
        ),
        "sl2_dj" => (
            "sl2 with R = ½(e∧f), K = g, H the Cartan line",
            SpecFile::from_parts(
                name,
                &sl2(),
                &sl2_dj_r(),
                &units(3, &[0, 1, 2]),
                &units(3, &[0]),
                &units(3, &[1, 2]),
                tol,
                sampling,
            ),
        ),
        "sl3_dj_levi" => (
            "split sl3 with the standard antisymmetric R, K = g, H = gl2-type Levi subalgebra {h1, h2, e1, f1}",
            SpecFile::from_parts(
                name,
                &sl3(),
                &sl3_dj_r(),
                &units(8, &[0, 1, 2, 3, 4, 5, 6, 7]),
                &units(8, &[0, 1, 2, 5]),
                &units(8, &[3, 4, 6, 7]),
                tol,
                sampling,
            ),
        ),
        "sl3_dj_cartan" => (
            "split sl3 with the standard antisymmetric R, K = g, H the Cartan subalgebra",
            SpecFile::from_parts(
                name,
                &sl3(),
                &sl3_dj_r(),
                &units(8, &[0, 1, 2, 3, 4, 5, 6, 7]),
                &units(8, &[0, 1]),
                &units(8, &[2, 3, 4, 5, 6, 7]),
                tol,
                sampling,
            ),
        ),
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    Ok(CatalogEntry {
        name: ENTRIES.iter().find(|e| **e == name).expect("matched above"),
        notes,
        spec,
    })
}

/// Load and validate a built-in setup.
pub fn load_entry(name: &str) -> Result<ReductionSetup> {
    entry(name)?.spec.to_setup()
}

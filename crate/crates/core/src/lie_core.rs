//! Structure-constant Lie algebras, subspaces, and the two- and three-fold
//! tensor algebra used by the Yang-Baxter type equations.

use std::ops::{Add, AddAssign, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

pub const JACOBI_TOL: f64 = 1e-10;
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// A finite-dimensional real Lie algebra given by structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<f64>,
    labels: Vec<String>,
    /// `ad(e_i)` for every basis element.
    ad_basis: Vec<Matrix>,
}

impl LieAlgebra {
    /// Build from a dense `dim^3` array indexed `(i * dim + j) * dim + k`.
    pub fn new(dim: usize, c: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InputShape("algebra dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::InputShape(format!(
                "expected {} structure constants, got {}",
                dim * dim * dim,
                c.len()
            )));
        }
        let labels = if labels.is_empty() {
            (0..dim).map(|i| format!("e{i}")).collect()
        } else if labels.len() == dim {
            labels
        } else {
            return Err(Error::InputShape(format!(
                "{} basis labels for a {dim}-dimensional algebra",
                labels.len()
            )));
        };
        let ad_basis = (0..dim).map(|i| Matrix::from_fn(dim, dim, |k, j| c[(i * dim + j) * dim + k])).collect();
        Ok(Self { dim, c, labels, ad_basis })
    }

    /// Build from sparse `(i, j, k, value)` entries meaning `[e_i, e_j] ∋ value e_k`.
    /// The `(j, i, k)` entry is filled in with the opposite sign. Repeating an
    /// entry consistently is allowed; diagonal or contradictory entries are
    /// rejected.
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, usize, f64)], labels: Vec<String>) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InputShape(format!(
                    "structure constant index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(Error::InputShape(format!("diagonal structure constant [{i}, {i}]")));
            }
            let a = (i * dim + j) * dim + k;
            let b = (j * dim + i) * dim + k;
            if seen[a] {
                if c[a] == v {
                    continue;
                }
                return Err(Error::InputShape(format!("contradictory structure constants for ({i}, {j}, {k})")));
            }
            seen[a] = true;
            seen[b] = true;
            c[a] = v;
            c[b] = -v;
        }
        Self::new(dim, c, labels)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim, vec![0.0; dim * dim * dim], Vec::new()).expect("positive dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero `(i, j, k, value)` entries with `i < j`.
    pub fn triplets(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.structure_constant(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn ad_basis(&self, i: usize) -> &Matrix {
        &self.ad_basis[i]
    }

    fn check_len(&self, x: &Vector, what: &str) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InputShape(format!(
                "{what} has length {} but the algebra has dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_len(x, "x")?;
        self.check_len(y, "y")?;
        Ok(self.ad_unchecked(x) * y)
    }

    /// The matrix of `ad_x`, so that `ad_matrix(x) * y == bracket(x, y)`.
    pub fn ad_matrix(&self, x: &Vector) -> Result<Matrix> {
        self.check_len(x, "x")?;
        Ok(self.ad_unchecked(x))
    }

    pub(crate) fn ad_unchecked(&self, x: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                m += &self.ad_basis[i] * *xi;
            }
        }
        m
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Max over `i, j, k, l` of the cyclic Jacobi sum of structure constants.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.structure_constant(i, j, m) * self.structure_constant(m, k, l)
                                + self.structure_constant(j, k, m) * self.structure_constant(m, i, l)
                                + self.structure_constant(k, i, m) * self.structure_constant(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Checks antisymmetry and the Jacobi identity at the given tolerances.
    pub fn validate(&self, antisymmetry_tol: f64, jacobi_tol: f64) -> Result<()> {
        let a = self.antisymmetry_residual();
        if a > antisymmetry_tol {
            return Err(Error::InvalidAlgebra {
                what: "antisymmetry",
                residual: a,
                tol: antisymmetry_tol,
            });
        }
        let j = self.jacobi_residual();
        if j > jacobi_tol {
            return Err(Error::InvalidAlgebra {
                what: "Jacobi identity",
                residual: j,
                tol: jacobi_tol,
            });
        }
        Ok(())
    }

    /// Trace form `tr(ad_x ad_y)` on basis elements.
    pub fn trace_form(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| (&self.ad_basis[i] * &self.ad_basis[j]).trace())
    }
}

/// A linear subspace of some ambient coordinate space, stored as a column basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn new(name: &str, ambient_dim: usize, vectors: &[Vector]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::InputShape(format!(
                    "{name}: basis vector of length {} in a {ambient_dim}-dimensional space",
                    v.len()
                )));
            }
        }
        let basis = if vectors.is_empty() {
            Matrix::zeros(ambient_dim, 0)
        } else {
            Matrix::from_columns(vectors)
        };
        Self::from_matrix(name, basis)
    }

    pub fn from_matrix(name: &str, basis: Matrix) -> Result<Self> {
        let r = linalg::rank(&basis, 1e-10);
        if r < basis.ncols() {
            return Err(Error::DependentBasis {
                name: name.to_string(),
                rank: r,
                len: basis.ncols(),
            });
        }
        Ok(Self { basis })
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.vector(i)).collect()
    }

    /// Least-squares coordinates of each column of `m` and the worst residual.
    pub fn coordinates(&self, m: &Matrix) -> (Matrix, f64) {
        linalg::coordinates(&self.basis, m)
    }
}

/// Which pair of tensor slots two 2-tensors occupy in a bracket `[s_ab, t_cd]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotPair {
    /// `[s_12, t_13]`
    S12T13,
    /// `[s_12, t_23]`
    S12T23,
    /// `[s_13, t_23]`
    S13T23,
}

/// An element of `g ⊗ g` in the fixed algebra basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor2 {
    m: Matrix,
}

impl Tensor2 {
    pub fn zeros(dim: usize) -> Self {
        Self { m: Matrix::zeros(dim, dim) }
    }

    pub fn from_matrix(m: Matrix) -> Self {
        assert!(m.is_square());
        Self { m }
    }

    /// Like [`Tensor2::from_matrix`] but refuses matrices that are not
    /// antisymmetric to `ANTISYMMETRY_TOL`.
    pub fn antisymmetric(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InputShape("2-tensor must be square".into()));
        }
        let t = Self { m };
        let r = t.antisymmetry_residual();
        if r > ANTISYMMETRY_TOL {
            return Err(Error::NotAntisymmetric { residual: r });
        }
        Ok(t)
    }

    /// `x ⊗ y - y ⊗ x`
    pub fn wedge(x: &Vector, y: &Vector) -> Self {
        Self {
            m: x * y.transpose() - y * x.transpose(),
        }
    }

    pub fn outer(x: &Vector, y: &Vector) -> Self {
        Self { m: x * y.transpose() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[(a, b)]
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.m + self.m.transpose()))
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.m)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * s }
    }

    /// Transpose the two tensor factors.
    pub fn flip(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    /// `(ad_x ⊗ 1 + 1 ⊗ ad_x) t` in the algebra `alg`.
    pub fn ad_action(&self, alg: &LieAlgebra, x: &Vector) -> Self {
        let ad = alg.ad_unchecked(x);
        Self {
            m: &ad * &self.m + &self.m * ad.transpose(),
        }
    }

    /// Pushforward along a linear map (columns = images of basis vectors).
    pub fn push_forward(&self, map: &Matrix) -> Self {
        Self {
            m: map * &self.m * map.transpose(),
        }
    }

    /// `sum_ab t^ab u_a v_b`
    pub fn contract(&self, u: &Vector, v: &Vector) -> f64 {
        (u.transpose() * &self.m * v)[(0, 0)]
    }
}

impl Add for &Tensor2 {
    type Output = Tensor2;
    fn add(self, rhs: &Tensor2) -> Tensor2 {
        Tensor2 { m: &self.m + &rhs.m }
    }
}

impl Sub for &Tensor2 {
    type Output = Tensor2;
    fn sub(self, rhs: &Tensor2) -> Tensor2 {
        Tensor2 { m: &self.m - &rhs.m }
    }
}

impl Neg for &Tensor2 {
    type Output = Tensor2;
    fn neg(self) -> Tensor2 {
        Tensor2 { m: -&self.m }
    }
}

/// An element of `g ⊗ g ⊗ g`, stored densely with index `(a, b, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    t.data[(a * dim + b) * dim + c] = f(a, b, c);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    fn at(&mut self, a: usize, b: usize, c: usize) -> &mut f64 {
        &mut self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `x ⊗ t` with `x` in the first slot.
    pub fn vector_tensor(x: &Vector, t: &Tensor2) -> Self {
        let n = x.len();
        Self::from_fn(n, |a, b, c| x[a] * t.get(b, c))
    }

    /// Sum of the three cyclic placements `T_123 + T_231 + T_312`, i.e. the
    /// tensor whose `(a, b, c)` entry is `T(a,b,c) + T(c,a,b) + T(b,c,a)`.
    pub fn cyclic_sum(&self) -> Self {
        Self::from_fn(self.dim, |a, b, c| self.get(a, b, c) + self.get(c, a, b) + self.get(b, c, a))
    }

    /// Max deviation from total antisymmetry.
    pub fn alternation_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.get(a, b, c);
                    worst = worst
                        .max((v + self.get(b, a, c)).abs())
                        .max((v + self.get(a, c, b)).abs())
                        .max((v + self.get(c, b, a)).abs());
                }
            }
        }
        worst
    }

    /// `(ad_x ⊗ 1 ⊗ 1 + 1 ⊗ ad_x ⊗ 1 + 1 ⊗ 1 ⊗ ad_x) t`
    pub fn ad_action(&self, alg: &LieAlgebra, x: &Vector) -> Self {
        let n = self.dim;
        let ad = alg.ad_unchecked(x);
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for p in 0..n {
                        s += ad[(a, p)] * self.get(p, b, c) + ad[(b, p)] * self.get(a, p, c) + ad[(c, p)] * self.get(a, b, p);
                    }
                    *out.at(a, b, c) = s;
                }
            }
        }
        out
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&Tensor3> for Tensor3 {
    fn add_assign(&mut self, rhs: &Tensor3) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

fn check_tensor_dim(alg: &LieAlgebra, t: &Tensor2, name: &str) -> Result<()> {
    if t.dim() != alg.dim() {
        return Err(Error::InputShape(format!(
            "{name} is a {}-dimensional tensor over a {}-dimensional algebra",
            t.dim(),
            alg.dim()
        )));
    }
    Ok(())
}

/// The bracket of `s` and `t` embedded in the given slots, contracted through
/// the shared slot.
pub fn mixed_bracket_terms(alg: &LieAlgebra, s: &Tensor2, t: &Tensor2, slots: SlotPair) -> Result<Tensor3> {
    check_tensor_dim(alg, s, "s")?;
    check_tensor_dim(alg, t, "t")?;
    let n = alg.dim();
    let mut out = Tensor3::zeros(n);
    // [e_p, e_q] = sum_k c(p,q,k) e_k; each case sums s^{ab} t^{cd} over the
    // bracketed pair and places the result.
    for p in 0..n {
        for q in 0..n {
            let bracket: Vec<(usize, f64)> = (0..n).map(|k| (k, alg.structure_constant(p, q, k))).filter(|(_, v)| *v != 0.0).collect();
            if bracket.is_empty() {
                continue;
            }
            match slots {
                SlotPair::S12T13 => {
                    // s^{p b} t^{q d} [e_p, e_q] ⊗ e_b ⊗ e_d
                    for b in 0..n {
                        let spb = s.get(p, b);
                        if spb == 0.0 {
                            continue;
                        }
                        for d in 0..n {
                            let w = spb * t.get(q, d);
                            if w == 0.0 {
                                continue;
                            }
                            for &(k, c) in &bracket {
                                *out.at(k, b, d) += w * c;
                            }
                        }
                    }
                }
                SlotPair::S12T23 => {
                    // s^{a p} t^{q d} e_a ⊗ [e_p, e_q] ⊗ e_d
                    for a in 0..n {
                        let sap = s.get(a, p);
                        if sap == 0.0 {
                            continue;
                        }
                        for d in 0..n {
                            let w = sap * t.get(q, d);
                            if w == 0.0 {
                                continue;
                            }
                            for &(k, c) in &bracket {
                                *out.at(a, k, d) += w * c;
                            }
                        }
                    }
                }
                SlotPair::S13T23 => {
                    // s^{a p} t^{c q} e_a ⊗ e_c ⊗ [e_p, e_q]
                    for a in 0..n {
                        let sap = s.get(a, p);
                        if sap == 0.0 {
                            continue;
                        }
                        for c2 in 0..n {
                            let w = sap * t.get(c2, q);
                            if w == 0.0 {
                                continue;
                            }
                            for &(k, c) in &bracket {
                                *out.at(a, c2, k) += w * c;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `[R12, R13] + [R12, R23] + [R13, R23]`.
pub fn cybe_lhs(alg: &LieAlgebra, r: &Tensor2) -> Result<Tensor3> {
    let mut out = mixed_bracket_terms(alg, r, r, SlotPair::S12T13)?;
    out += &mixed_bracket_terms(alg, r, r, SlotPair::S12T23)?;
    out += &mixed_bracket_terms(alg, r, r, SlotPair::S13T23)?;
    Ok(out)
}

/// Whether `t` is annihilated by the diagonal adjoint action of every basis
/// element, up to `tol * (1 + |t|)` in max-norm.
pub fn is_invariant3(alg: &LieAlgebra, t: &Tensor3, tol: f64) -> bool {
    invariance_residual3(alg, t) <= tol * (1.0 + t.max_abs())
}

/// Worst max-norm of the diagonal adjoint action over basis elements.
pub fn invariance_residual3(alg: &LieAlgebra, t: &Tensor3) -> f64 {
    (0..alg.dim())
        .map(|i| {
            let mut x = Vector::zeros(alg.dim());
            x[i] = 1.0;
            t.ad_action(alg, &x).max_abs()
        })
        .fold(0.0, f64::max)
}

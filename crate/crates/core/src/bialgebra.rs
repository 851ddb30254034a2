//! Coboundary Lie bialgebras, their Drinfeld doubles, and the validated
//! `K = H + M` decomposition consumed by the reduction.
//!
//! Conventions: a subalgebra `K ⊆ g` with basis `k_1..k_n` (columns of the
//! embedding) gets the cobracket `δ(X) = [R, X⊗1 + 1⊗X]`, and the dual
//! algebra `K*` (basis `κ^1..κ^n` dual to the `k_i`) the bracket
//! `<[α, β], X> = <α ⊗ β, δ(X)>`. The double has basis `k_1..k_n, κ^1..κ^n`,
//! pairs `K` with `K*` canonically, and its mixed brackets are the unique ones
//! making that pairing ad-invariant.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie_core::{LieAlgebra, Subspace, Tensor2, ANTISYMMETRY_TOL, JACOBI_TOL};
use crate::linalg::{self, Matrix, Vector};

/// Sign in front of `(ad_X ⊗ 1 + 1 ⊗ ad_X) R` in the cobracket. The negative
/// sign is the one compatible with the dual-group bracket used throughout
/// the crate; the other sign still yields a valid double, which is why it is
/// kept selectable for tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CobracketSign {
    /// `δ(X) = [R, X⊗1 + 1⊗X]`
    Standard,
    /// `δ(X) = [X⊗1 + 1⊗X, R]`
    Opposite,
}

impl CobracketSign {
    fn factor(self) -> f64 {
        match self {
            CobracketSign::Standard => -1.0,
            CobracketSign::Opposite => 1.0,
        }
    }
}

/// A sub-bialgebra `K ⊆ g` together with its dual algebra.
#[derive(Clone, Debug)]
pub struct BialgebraData {
    /// `K` in its own basis.
    pub k: LieAlgebra,
    /// `K*` in the dual basis.
    pub kstar: LieAlgebra,
    /// `δ(k_i)` expressed in `K ⊗ K`.
    pub cobracket: Vec<Tensor2>,
    /// Basis of `K` inside `g` (columns).
    pub embedding: Subspace,
    /// Residual of expressing `δ(K)` inside `K ∧ K`.
    pub sub_bialgebra_residual: f64,
}

impl BialgebraData {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Worst violation of `δ([x,y]) = x.δ(y) - y.δ(x)` over basis pairs.
    pub fn cocycle_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let xi = unit(n, i);
            for j in 0..n {
                let xj = unit(n, j);
                let bracket = self.k.bracket(&xi, &xj).expect("basis vectors");
                let mut lhs = Matrix::zeros(n, n);
                for (k, c) in bracket.iter().enumerate() {
                    lhs += self.cobracket[k].matrix() * *c;
                }
                let rhs = &self.cobracket[j].ad_action(&self.k, &xi) - &self.cobracket[i].ad_action(&self.k, &xj);
                worst = worst.max(linalg::max_abs(&(lhs - rhs.matrix())));
            }
        }
        worst
    }

    /// Round trip: `<[κ^p, κ^q], k_i>` against `δ(k_i)^{pq}`.
    pub fn duality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                let b = self.kstar.bracket(&unit(n, p), &unit(n, q)).expect("basis");
                for i in 0..n {
                    worst = worst.max((b[i] - self.cobracket[i].get(p, q)).abs());
                }
            }
        }
        worst
    }
}

pub(crate) fn unit(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

/// Restrict the bracket of `g` to the subalgebra spanned by `k_embed`,
/// returning structure constants in that basis.
pub(crate) fn restrict_algebra(g: &LieAlgebra, k_embed: &Subspace, name: &str, tol: f64) -> Result<LieAlgebra> {
    let n = k_embed.dim();
    if n == 0 {
        return Err(Error::InputShape(format!("{name} must be nonzero")));
    }
    let mut c = vec![0.0; n * n * n];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let b = g.bracket(&k_embed.vector(i), &k_embed.vector(j))?;
            let (coords, resid) = k_embed.coordinates(&Matrix::from_column_slice(b.len(), 1, b.as_slice()));
            worst = worst.max(resid);
            for k in 0..n {
                c[(i * n + j) * n + k] = coords[(k, 0)];
            }
        }
    }
    if worst > tol {
        return Err(Error::Subalgebra {
            name: name.to_string(),
            residual: worst,
        });
    }
    LieAlgebra::new(n, c, Vec::new())
}

/// The coboundary cobracket on `K ⊆ g` and the dual bracket it induces.
pub fn derive_cobracket(g: &LieAlgebra, r: &Tensor2, k_embed: &Subspace) -> Result<BialgebraData> {
    derive_cobracket_with(g, r, k_embed, "K", CobracketSign::Standard, JACOBI_TOL)
}

pub fn derive_cobracket_with(g: &LieAlgebra, r: &Tensor2, k_embed: &Subspace, name: &str, sign: CobracketSign, tol: f64) -> Result<BialgebraData> {
    if r.dim() != g.dim() || k_embed.ambient_dim() != g.dim() {
        return Err(Error::InputShape(format!(
            "r-matrix ({}) and {name} embedding ({}) must match the algebra dimension {}",
            r.dim(),
            k_embed.ambient_dim(),
            g.dim()
        )));
    }
    let k = restrict_algebra(g, k_embed, name, tol)?;
    let n = k.dim();
    let basis = k_embed.basis();
    // Left inverse of the embedding: pinv(B) B = I.
    let pinv = basis.clone().pseudo_inverse(1e-13).map_err(|e| Error::InputShape(e.to_string()))?;

    let mut cobracket = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let t = r.ad_action(g, &k_embed.vector(i)).scale(sign.factor());
        let d = &pinv * t.matrix() * pinv.transpose();
        let back = basis * &d * basis.transpose();
        worst = worst.max(linalg::max_abs(&(back - t.matrix())));
        cobracket.push(Tensor2::from_matrix(d));
    }
    if worst > tol {
        return Err(Error::NotSubBialgebra {
            name: name.to_string(),
            residual: worst,
        });
    }

    // [κ^p, κ^q] = sum_i δ(k_i)^{pq} κ^i
    let mut cs = vec![0.0; n * n * n];
    for p in 0..n {
        for q in 0..n {
            for (i, d) in cobracket.iter().enumerate() {
                cs[(p * n + q) * n + i] = d.get(p, q);
            }
        }
    }
    let kstar = LieAlgebra::new(n, cs, Vec::new())?;
    let data = BialgebraData {
        k,
        kstar,
        cobracket,
        embedding: k_embed.clone(),
        sub_bialgebra_residual: worst,
    };
    let cj = data.kstar.jacobi_residual();
    if cj > tol {
        return Err(Error::InvalidAlgebra {
            what: "co-Jacobi identity of the dual",
            residual: cj,
            tol,
        });
    }
    let cc = data.cocycle_residual();
    if cc > tol {
        return Err(Error::InvalidAlgebra {
            what: "cocycle condition",
            residual: cc,
            tol,
        });
    }
    Ok(data)
}

/// The Drinfeld double `D(K, K*)` with its invariant pairing.
#[derive(Clone, Debug)]
pub struct DoubleAlgebra {
    algebra: Arc<LieAlgebra>,
    n: usize,
    pairing: Matrix,
    proj_k: Matrix,
    proj_kstar: Matrix,
}

impl DoubleAlgebra {
    /// Half dimension, `dim K`.
    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }

    pub fn proj_k(&self) -> &Matrix {
        &self.proj_k
    }

    pub fn proj_kstar(&self) -> &Matrix {
        &self.proj_kstar
    }

    /// `<<x, y>>`
    pub fn pair(&self, x: &Vector, y: &Vector) -> f64 {
        let n = self.n;
        x.rows(0, n).dot(&y.rows(n, n)) + x.rows(n, n).dot(&y.rows(0, n))
    }

    /// Embed a `K` coordinate vector.
    pub fn from_k(&self, x: &Vector) -> Vector {
        let mut v = Vector::zeros(2 * self.n);
        v.rows_mut(0, self.n).copy_from(x);
        v
    }

    /// Embed a `K*` coordinate vector.
    pub fn from_kstar(&self, a: &Vector) -> Vector {
        let mut v = Vector::zeros(2 * self.n);
        v.rows_mut(self.n, self.n).copy_from(a);
        v
    }

    pub fn k_part(&self, y: &Vector) -> Vector {
        y.rows(0, self.n).into_owned()
    }

    pub fn kstar_part(&self, y: &Vector) -> Vector {
        y.rows(self.n, self.n).into_owned()
    }

    /// `max |<<[z,a],b>> + <<a,[z,b]>>|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim();
        let p = &self.pairing;
        let mut worst: f64 = 0.0;
        for z in 0..d {
            let ad = self.algebra.ad_basis(z);
            // (ad^T P + P ad) must vanish
            let m = ad.transpose() * p + p * ad;
            worst = worst.max(linalg::max_abs(&m));
        }
        worst
    }

    pub fn projector_residual(&self) -> f64 {
        let d = self.dim();
        let id = Matrix::identity(d, d);
        let sum = linalg::max_abs(&(&self.proj_k + &self.proj_kstar - &id));
        let i1 = linalg::max_abs(&(&self.proj_k * &self.proj_k - &self.proj_k));
        let i2 = linalg::max_abs(&(&self.proj_kstar * &self.proj_kstar - &self.proj_kstar));
        sum.max(i1).max(i2)
    }

    /// Isotropy of `K` and `K*` and the canonical cross pairing.
    pub fn pairing_residual(&self) -> f64 {
        let n = self.n;
        let p = &self.pairing;
        let mut worst: f64 = 0.0;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let expected = if (i < n) != (j < n) && i % n == j % n { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - expected).abs());
            }
        }
        worst
    }
}

/// Assemble the double of a validated bialgebra.
pub fn build_double(b: &BialgebraData) -> Result<DoubleAlgebra> {
    build_double_with_tol(b, JACOBI_TOL)
}

pub fn build_double_with_tol(b: &BialgebraData, tol: f64) -> Result<DoubleAlgebra> {
    let n = b.dim();
    let d = 2 * n;
    let mut c = vec![0.0; d * d * d];
    let mut set = |i: usize, j: usize, k: usize, v: f64| {
        c[(i * d + j) * d + k] = v;
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                set(i, j, k, b.k.structure_constant(i, j, k));
                set(n + i, n + j, n + k, b.kstar.structure_constant(i, j, k));
            }
        }
    }
    // [k_i, κ^p]: the κ^j coefficient is <<[k_i, κ^p], k_j>> = -<κ^p, [k_i, k_j]>,
    // the k_q coefficient is <<[k_i, κ^p], κ^q>> = <k_i, [κ^p, κ^q]>.
    for i in 0..n {
        for p in 0..n {
            for j in 0..n {
                let v = -b.k.structure_constant(i, j, p);
                set(i, n + p, n + j, v);
                set(n + p, i, n + j, -v);
            }
            for q in 0..n {
                let v = b.kstar.structure_constant(p, q, i);
                set(i, n + p, q, v);
                set(n + p, i, q, -v);
            }
        }
    }
    let algebra = LieAlgebra::new(d, c, Vec::new())?;

    let mut pairing = Matrix::zeros(d, d);
    let mut proj_k = Matrix::zeros(d, d);
    for i in 0..n {
        pairing[(i, n + i)] = 1.0;
        pairing[(n + i, i)] = 1.0;
        proj_k[(i, i)] = 1.0;
    }
    let proj_kstar = Matrix::identity(d, d) - &proj_k;
    let double = DoubleAlgebra {
        algebra: Arc::new(algebra),
        n,
        pairing,
        proj_k,
        proj_kstar,
    };

    let inv = double.invariance_residual();
    if inv > tol {
        return Err(Error::DoubleJacobi {
            what: "pairing invariance",
            residual: inv,
        });
    }
    let jac = double.algebra.jacobi_residual();
    if jac > tol {
        return Err(Error::DoubleJacobi {
            what: "Jacobi identity",
            residual: jac,
        });
    }
    Ok(double)
}

/// A Poisson-Lie subgroup pair `K ⊆ G` at the Lie algebra level: the ambient
/// algebra, the constant r-matrix, the sub-bialgebra and its double.
#[derive(Clone, Debug)]
pub struct PlPair {
    pub g: Arc<LieAlgebra>,
    pub r: Tensor2,
    pub bialgebra: BialgebraData,
    pub double: Arc<DoubleAlgebra>,
}

impl PlPair {
    pub fn new(g: Arc<LieAlgebra>, r: Tensor2, sub: &Subspace, name: &str) -> Result<Self> {
        let bialgebra = derive_cobracket_with(&g, &r, sub, name, CobracketSign::Standard, JACOBI_TOL)?;
        let double = Arc::new(build_double(&bialgebra)?);
        Ok(Self { g, r, bialgebra, double })
    }

    /// Basis of the subalgebra inside `g` (columns).
    pub fn embedding(&self) -> &Matrix {
        self.bialgebra.embedding.basis()
    }

    pub fn sub_dim(&self) -> usize {
        self.bialgebra.dim()
    }

    /// Map a subalgebra coordinate vector into `g`.
    pub fn to_g(&self, x: &Vector) -> Vector {
        self.embedding() * x
    }
}

/// Residuals measured while validating a [`ReductionSetup`].
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct SetupDiagnostics {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub r_antisymmetry: f64,
    pub double_jacobi: f64,
    pub double_invariance: f64,
    pub reductivity: f64,
    pub dual_subalgebra: f64,
    pub ideal: f64,
    /// `<<[H*, H], M>>`
    pub closure_h_m: f64,
    /// `<<[H, H*], M*>>`
    pub closure_h_mstar: f64,
    /// `D(H, H*) -> D(K, K*)` homomorphism defect.
    pub subdouble_embedding: f64,
}

/// The validated data for reducing from `K*` to `H*`.
#[derive(Clone, Debug)]
pub struct ReductionSetup {
    pub k_pair: PlPair,
    /// Native pair `H ⊆ G` with its own double.
    pub h_pair: PlPair,
    /// `H` and `M` bases in `K` coordinates (columns).
    h_in_k: Matrix,
    m_in_k: Matrix,
    /// `H* = M^⊥` and `M* = H^⊥` in `K*` coordinates, each dual to the
    /// corresponding `H` / `M` basis.
    hstar: Matrix,
    mstar: Matrix,
    pub diagnostics: SetupDiagnostics,
}

/// Tolerances used by [`validate_setup_with`].
#[derive(Clone, Copy, Debug)]
pub struct ValidationTolerances {
    pub antisymmetry: f64,
    pub jacobi: f64,
}

impl Default for ValidationTolerances {
    fn default() -> Self {
        Self {
            antisymmetry: ANTISYMMETRY_TOL,
            jacobi: JACOBI_TOL,
        }
    }
}

pub fn validate_setup(g: &LieAlgebra, r: &Tensor2, k_embed: &Subspace, h_embed: &[Vector], m_embed: &[Vector]) -> Result<ReductionSetup> {
    validate_setup_with(g, r, k_embed, h_embed, m_embed, ValidationTolerances::default())
}

/// Check every hypothesis of the reduction, in order, and assemble the setup.
/// `h_embed` and `m_embed` are given in `g` coordinates and must lie in `K`.
pub fn validate_setup_with(
    g: &LieAlgebra,
    r: &Tensor2,
    k_embed: &Subspace,
    h_embed: &[Vector],
    m_embed: &[Vector],
    tol: ValidationTolerances,
) -> Result<ReductionSetup> {
    let mut diag = SetupDiagnostics {
        antisymmetry: g.antisymmetry_residual(),
        ..Default::default()
    };
    if diag.antisymmetry > tol.antisymmetry {
        return Err(Error::InvalidAlgebra {
            what: "antisymmetry",
            residual: diag.antisymmetry,
            tol: tol.antisymmetry,
        });
    }
    diag.jacobi = g.jacobi_residual();
    if diag.jacobi > tol.jacobi {
        return Err(Error::InvalidAlgebra {
            what: "Jacobi identity",
            residual: diag.jacobi,
            tol: tol.jacobi,
        });
    }
    if r.dim() != g.dim() {
        return Err(Error::InputShape(format!(
            "r-matrix of dimension {} over a {}-dimensional algebra",
            r.dim(),
            g.dim()
        )));
    }
    diag.r_antisymmetry = r.antisymmetry_residual();
    if diag.r_antisymmetry > tol.antisymmetry {
        return Err(Error::NotAntisymmetric {
            residual: diag.r_antisymmetry,
        });
    }

    let g_arc = Arc::new(g.clone());
    let bialg = derive_cobracket_with(g, r, k_embed, "K", CobracketSign::Standard, tol.jacobi)?;
    let double = Arc::new(build_double_with_tol(&bialg, tol.jacobi)?);
    diag.double_jacobi = double.algebra().jacobi_residual();
    diag.double_invariance = double.invariance_residual();
    let k_pair = PlPair {
        g: g_arc.clone(),
        r: r.clone(),
        bialgebra: bialg,
        double,
    };
    let n = k_pair.sub_dim();
    let kalg = &k_pair.bialgebra.k;
    let kstar = &k_pair.bialgebra.kstar;

    let to_k = |vs: &[Vector], name: &str| -> Result<Matrix> {
        if vs.is_empty() {
            return Ok(Matrix::zeros(n, 0));
        }
        let sub = Subspace::new(name, g.dim(), vs)?;
        let (coords, resid) = k_embed.coordinates(sub.basis());
        if resid > tol.jacobi {
            return Err(Error::NotContained {
                name: name.to_string(),
                ambient: "K".to_string(),
                residual: resid,
            });
        }
        Ok(coords)
    };
    let h_in_k = to_k(h_embed, "H")?;
    let m_in_k = to_k(m_embed, "M")?;
    let hd = h_in_k.ncols();
    let md = m_in_k.ncols();
    if hd == 0 {
        return Err(Error::InputShape("H must be nonzero".into()));
    }

    // H closed under the K bracket
    let h_sub = Subspace::from_matrix("H", h_in_k.clone())?;
    restrict_algebra(kalg, &h_sub, "H", tol.jacobi)?;

    // K = H ⊕ M
    let mut b = Matrix::zeros(n, hd + md);
    b.view_mut((0, 0), (n, hd)).copy_from(&h_in_k);
    b.view_mut((0, hd), (n, md)).copy_from(&m_in_k);
    let rk = linalg::rank(&b, 1e-10);
    if hd + md != n || rk != n {
        return Err(Error::Complement { rank: rk, expected: n });
    }
    let b_inv = b.clone().try_inverse().ok_or(Error::Complement { rank: rk, expected: n })?;
    // Rows of B^{-1} are the dual basis: first the H* rows, then the M* rows.
    let hstar = b_inv.rows(0, hd).transpose();
    let mstar = b_inv.rows(hd, md).transpose();

    // [H, M] ⊆ M: H-coordinates of [h_a, m_c]
    for a in 0..hd {
        for c in 0..md {
            let v = kalg.bracket(&h_in_k.column(a).into_owned(), &m_in_k.column(c).into_owned())?;
            let coords = &b_inv * v;
            for i in 0..hd {
                diag.reductivity = diag.reductivity.max(coords[i].abs());
            }
        }
    }
    if diag.reductivity > tol.jacobi {
        return Err(Error::Reductivity { residual: diag.reductivity });
    }

    // H* = M^⊥ closed: the M-pairing of [H*_a, H*_b] vanishes.
    for a in 0..hd {
        for bb in 0..hd {
            let v = kstar.bracket(&hstar.column(a).into_owned(), &hstar.column(bb).into_owned())?;
            let m_part = m_in_k.transpose() * v;
            diag.dual_subalgebra = diag.dual_subalgebra.max(linalg::max_abs_vec(&m_part));
        }
    }
    if diag.dual_subalgebra > tol.jacobi {
        return Err(Error::DualSubalgebra {
            residual: diag.dual_subalgebra,
        });
    }

    // M* = H^⊥ an ideal: [κ^p, M*_c] pairs to zero with H.
    for p in 0..n {
        for c in 0..md {
            let v = kstar.bracket(&unit(n, p), &mstar.column(c).into_owned())?;
            let h_part = h_in_k.transpose() * v;
            diag.ideal = diag.ideal.max(linalg::max_abs_vec(&h_part));
        }
    }
    if diag.ideal > tol.jacobi {
        return Err(Error::Ideal { residual: diag.ideal });
    }

    // H + H* closed inside the double, measured through both pairings.
    let dbl = &k_pair.double;
    for a in 0..hd {
        let x = dbl.from_k(&h_in_k.column(a).into_owned());
        for bb in 0..hd {
            let alpha = dbl.from_kstar(&hstar.column(bb).into_owned());
            let br = dbl.algebra().bracket(&x, &alpha)?;
            for c in 0..md {
                let mv = dbl.from_k(&m_in_k.column(c).into_owned());
                diag.closure_h_m = diag.closure_h_m.max(dbl.pair(&br, &mv).abs());
                let ms = dbl.from_kstar(&mstar.column(c).into_owned());
                diag.closure_h_mstar = diag.closure_h_mstar.max(dbl.pair(&br, &ms).abs());
            }
        }
    }
    let closure = diag.closure_h_m.max(diag.closure_h_mstar);
    if closure > tol.jacobi {
        return Err(Error::SubdoubleClosure { residual: closure });
    }

    let h_in_g = k_pair.embedding() * &h_in_k;
    let h_pair = PlPair::new(g_arc, r.clone(), &Subspace::from_matrix("H", h_in_g)?, "H")?;

    let mut setup = ReductionSetup {
        k_pair,
        h_pair,
        h_in_k,
        m_in_k,
        hstar,
        mstar,
        diagnostics: diag,
    };
    setup.diagnostics.subdouble_embedding = setup.subdouble_embedding_residual();
    if setup.diagnostics.subdouble_embedding > tol.jacobi {
        return Err(Error::SubdoubleClosure {
            residual: setup.diagnostics.subdouble_embedding,
        });
    }
    Ok(setup)
}

impl ReductionSetup {
    pub fn k_dim(&self) -> usize {
        self.k_pair.sub_dim()
    }

    pub fn h_dim(&self) -> usize {
        self.h_in_k.ncols()
    }

    pub fn m_dim(&self) -> usize {
        self.m_in_k.ncols()
    }

    pub fn h_in_k(&self) -> &Matrix {
        &self.h_in_k
    }

    pub fn m_in_k(&self) -> &Matrix {
        &self.m_in_k
    }

    /// `H*` basis in `K*` coordinates, dual to `h_in_k`.
    pub fn hstar_in_kstar(&self) -> &Matrix {
        &self.hstar
    }

    /// `M*` basis in `K*` coordinates, dual to `m_in_k`.
    pub fn mstar_in_kstar(&self) -> &Matrix {
        &self.mstar
    }

    pub fn k_double(&self) -> &Arc<DoubleAlgebra> {
        &self.k_pair.double
    }

    /// Linear map `D(H, H*) -> D(K, K*)` identifying the native double of `H`
    /// with `H + H*` inside the double of `K`.
    pub fn subdouble_map(&self) -> Matrix {
        let n = self.k_dim();
        let h = self.h_dim();
        let mut m = Matrix::zeros(2 * n, 2 * h);
        m.view_mut((0, 0), (n, h)).copy_from(&self.h_in_k);
        m.view_mut((n, h), (n, h)).copy_from(&self.hstar);
        m
    }

    /// `max |φ([x, y]) - [φ x, φ y]|` over native basis pairs.
    pub fn subdouble_embedding_residual(&self) -> f64 {
        let phi = self.subdouble_map();
        let hd = self.h_pair.double.algebra();
        let kd = self.k_pair.double.algebra();
        let d = hd.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let lhs = &phi * hd.bracket(&unit(d, i), &unit(d, j)).expect("basis");
                let rhs = kd.bracket(&phi.column(i).into_owned(), &phi.column(j).into_owned()).expect("dimension");
                worst = worst.max(linalg::max_abs_vec(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Split a `K` vector into its `H` and `M` coordinates.
    pub fn split_k(&self, x: &Vector) -> (Vector, Vector) {
        // <H*_a, x> and <M*_c, x> are the coordinates.
        (self.hstar.transpose() * x, self.mstar.transpose() * x)
    }

    /// `M`-component of a `K` vector, as a `K` vector.
    pub fn proj_m(&self, x: &Vector) -> Vector {
        &self.m_in_k * (self.mstar.transpose() * x)
    }

    /// `H`-component of a `K` vector.
    pub fn proj_h(&self, x: &Vector) -> Vector {
        &self.h_in_k * (self.hstar.transpose() * x)
    }

    /// `M*`-component of a `K*` vector.
    pub fn proj_mstar(&self, a: &Vector) -> Vector {
        &self.mstar * (self.m_in_k.transpose() * a)
    }

    /// `H*`-component of a `K*` vector.
    pub fn proj_hstar(&self, a: &Vector) -> Vector {
        &self.hstar * (self.h_in_k.transpose() * a)
    }

    /// Native `H*` coordinates of a `K*` vector: the quotient map
    /// `K* -> K*/M* ≅ H*`, i.e. pairing with the `H` basis.
    pub fn quotient_to_hstar(&self, a: &Vector) -> Vector {
        self.h_in_k.transpose() * a
    }
}

/// Suggest `M` as the orthogonal complement of `H` in `K` under the trace
/// form of `K`. Returns `None` when the form restricted to `H` is degenerate.
/// Input and output are in `K` coordinates.
pub fn suggest_complement(k: &LieAlgebra, h_in_k: &Matrix) -> Option<Matrix> {
    let b = k.trace_form();
    let restricted = h_in_k.transpose() * &b * h_in_k;
    if restricted.nrows() > 0 && linalg::cond(&restricted) > 1e10 {
        return None;
    }
    let constraint = h_in_k.transpose() * &b;
    Some(linalg::null_space(&constraint, 1e-10))
}

//! Second-class constraints on `K*`, the matrix of their brackets, and the
//! reduced r-matrix `r* = r + ρ` on the open set of `H*` where that matrix
//! is invertible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bialgebra::{unit, ReductionSetup};
use crate::dual_group::{gradients, pb_dual, pb_from_gradients, DualFunction, GroupWord};
use crate::error::{Error, Result};
use crate::fd::Stencil;
use crate::lie_core::Tensor2;
use crate::linalg::{self, Matrix, Vector};

/// Default bound on `cond(C)` for a point to count as second class.
pub const COND_THRESHOLD: f64 = 1e8;
/// Attempts allowed per accepted sample point.
pub const MAX_ATTEMPTS: usize = 100;

/// `{M^i} ⊂ M` and the dual basis `{M_i} ⊂ M* = H^⊥`.
#[derive(Clone, Debug)]
pub struct ConstraintBasis {
    /// `K` coordinates, one column per `M^i`.
    pub m_basis: Matrix,
    /// `K*` coordinates, one column per `M_i`.
    pub m_dual: Matrix,
}

impl ConstraintBasis {
    pub fn from_setup(s: &ReductionSetup) -> Self {
        Self {
            m_basis: s.m_in_k().clone(),
            m_dual: s.mstar_in_kstar().clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.m_basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `max |<M_i, M^j> - δ_ij|`
    pub fn duality_residual(&self) -> f64 {
        let m = self.len();
        linalg::max_abs(&(self.m_dual.transpose() * &self.m_basis - Matrix::identity(m, m)))
    }
}

/// `C^{ij}(λ) = <<(λ M^j λ⁻¹)_{M*}, (λ M^i λ⁻¹)_M>>`.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub entries: Matrix,
    pub cond: f64,
    /// Difference from the other form `<<(λ M^i λ⁻¹)_M, λ M^j λ⁻¹>>`.
    pub form_residual: f64,
}

impl CMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        linalg::max_abs(&(&self.entries + self.entries.transpose()))
    }

    pub fn is_odd(&self) -> bool {
        self.dim() % 2 == 1
    }

    /// The error describing why `λ` is not second class, if it is not.
    pub fn require_second_class(&self, cond_threshold: f64) -> Result<()> {
        if check_second_class(self, cond_threshold) {
            Ok(())
        } else {
            Err(Error::CDegenerate {
                cond: self.cond,
                odd_dimension: self.is_odd(),
            })
        }
    }
}

/// `(Ad_λ M^i)` split as `(K-part restricted to M, K*-part)` for every `i`.
fn adjoint_images(s: &ReductionSetup, lambda: &GroupWord) -> (Matrix, Matrix) {
    let d = s.k_double();
    let n = s.k_dim();
    let m = s.m_dim();
    let mut vm = Matrix::zeros(n, m);
    let mut va = Matrix::zeros(n, m);
    for i in 0..m {
        let y = lambda.ad() * d.from_k(&s.m_in_k().column(i).into_owned());
        vm.set_column(i, &s.proj_m(&d.k_part(&y)));
        va.set_column(i, &d.kstar_part(&y));
    }
    (vm, va)
}

pub fn constraint_matrix(s: &ReductionSetup, lambda: &GroupWord) -> CMatrix {
    let m = s.m_dim();
    let (vm, va) = adjoint_images(s, lambda);
    let mut entries = Matrix::zeros(m, m);
    let mut other = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let aj_mstar = s.proj_mstar(&va.column(j).into_owned());
            entries[(i, j)] = aj_mstar.dot(&vm.column(i));
            other[(i, j)] = vm.column(i).dot(&va.column(j));
        }
    }
    let cond = if m == 0 { 1.0 } else { linalg::cond(&entries) };
    CMatrix {
        form_residual: linalg::max_abs(&(&entries - other)),
        entries,
        cond,
    }
}

/// Membership test for the second-class region: `cond(C) ≤ threshold`.
/// Odd-dimensional `C` is antisymmetric, hence singular, and always fails.
pub fn check_second_class(c: &CMatrix, cond_threshold: f64) -> bool {
    if c.dim() == 0 {
        return true;
    }
    !c.is_odd() && c.cond <= cond_threshold
}

fn checked_c(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<CMatrix> {
    let c = constraint_matrix(s, lambda);
    c.require_second_class(cond_threshold)?;
    Ok(c)
}

/// `ρ(λ)` in `K ⊗ K` coordinates.
pub fn rho_k(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<Matrix> {
    let n = s.k_dim();
    if s.m_dim() == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let c = checked_c(s, lambda, cond_threshold)?;
    let (vm, _) = adjoint_images(s, lambda);
    // Σ (C⁻¹)_{ij} v_i ⊗ v_j = V C⁻¹ Vᵀ
    let (x, _) = linalg::solve(&c.entries, &vm.transpose(), cond_threshold)?;
    Ok(&vm * x)
}

/// `ρ(λ) = Σ (C⁻¹)_{ij} (λ M^i λ⁻¹)_M ⊗ (λ M^j λ⁻¹)_M`, pushed into `g ⊗ g`.
pub fn rho(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<Tensor2> {
    let rk = rho_k(s, lambda, cond_threshold)?;
    Ok(Tensor2::from_matrix(rk).push_forward(s.k_pair.embedding()))
}

/// `N_i(λ) ∈ M` (columns, `K` coordinates) with
/// `λ⁻¹ M_i λ = (λ⁻¹ N_i λ)_{M*}`.
pub fn n_vectors(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<Matrix> {
    let n = s.k_dim();
    let m = s.m_dim();
    if m == 0 {
        return Ok(Matrix::zeros(n, 0));
    }
    let d = s.k_double();
    // Coordinates of an M* element in the basis {M_i} are its pairings with {M^i}.
    let mcoords = |alpha: &Vector| s.m_in_k().transpose() * alpha;
    let mut w = Matrix::zeros(m, m);
    let mut rhs = Matrix::zeros(m, m);
    for k in 0..m {
        let y = lambda.ad_inv() * d.from_k(&s.m_in_k().column(k).into_owned());
        w.set_column(k, &mcoords(&d.kstar_part(&y)));
        let z = lambda.ad_inv() * d.from_kstar(&s.mstar_in_kstar().column(k).into_owned());
        rhs.set_column(k, &mcoords(&d.kstar_part(&z)));
    }
    let (coef, _) = linalg::solve(&w, &rhs, cond_threshold)?;
    Ok(s.m_in_k() * coef)
}

/// `max |λ⁻¹ M_i λ - (λ⁻¹ N_i λ)_{M*}|` over `i`.
pub fn n_vectors_residual(s: &ReductionSetup, lambda: &GroupWord, nvec: &Matrix) -> f64 {
    let d = s.k_double();
    let mut worst: f64 = 0.0;
    for i in 0..nvec.ncols() {
        let lhs = lambda.ad_inv() * d.from_kstar(&s.mstar_in_kstar().column(i).into_owned());
        let y = lambda.ad_inv() * d.from_k(&nvec.column(i).into_owned());
        let rhs = d.from_kstar(&s.proj_mstar(&d.kstar_part(&y)));
        worst = worst.max(linalg::max_abs_vec(&(lhs - rhs)));
    }
    worst
}

/// The two expressions `-Σ N_i ⊗ M^i` and `Σ M^i ⊗ N_i`, in `g ⊗ g`.
pub fn rho_via_n(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<(Tensor2, Tensor2)> {
    let nvec = n_vectors(s, lambda, cond_threshold)?;
    let mb = s.m_in_k();
    let first = -(&nvec * mb.transpose());
    let second = mb * nvec.transpose();
    let e = s.k_pair.embedding();
    Ok((Tensor2::from_matrix(first).push_forward(e), Tensor2::from_matrix(second).push_forward(e)))
}

/// `max_k |ρ̂(M_k) + N_k|` where `ρ̂(α) = ρ(·, α)` contracts the second slot.
pub fn rho_operator_residual(s: &ReductionSetup, lambda: &GroupWord, cond_threshold: f64) -> Result<f64> {
    let rk = rho_k(s, lambda, cond_threshold)?;
    let nvec = n_vectors(s, lambda, cond_threshold)?;
    let image = &rk * s.mstar_in_kstar();
    Ok(linalg::max_abs(&(image + nvec)))
}

/// The identity characterizing the reduced r-matrix among expressions of the
/// form `Σ M^i ⊗ N_i`:
/// `<<(λ⁻¹uλ)_M, λ⁻¹vλ>> = Σ_i <<(λ⁻¹uλ)_M, λ⁻¹M^iλ>> <<(λ⁻¹vλ)_M, λ⁻¹N_iλ>>`
/// for `u, v ∈ M` (in `K` coordinates). Returns `|lhs - rhs|`.
pub fn characterization_residual(s: &ReductionSetup, lambda: &GroupWord, nvec: &Matrix, u: &Vector, v: &Vector) -> f64 {
    let d = s.k_double();
    let conj = |x: &Vector| lambda.ad_inv() * d.from_k(x);
    let m_part = |y: &Vector| d.from_k(&s.proj_m(&d.k_part(y)));
    let (cu, cv) = (conj(u), conj(v));
    let (um, vm) = (m_part(&cu), m_part(&cv));
    let lhs = d.pair(&um, &cv);
    let mut rhs = 0.0;
    for i in 0..nvec.ncols() {
        let cmi = conj(&s.m_in_k().column(i).into_owned());
        let cni = conj(&nvec.column(i).into_owned());
        rhs += d.pair(&um, &cmi) * d.pair(&vm, &cni);
    }
    (lhs - rhs).abs()
}

/// A dynamical r-matrix on the dual group of a setup, valued in `g ⊗ g`.
/// Arguments are words over the double of `K`.
pub trait DynamicalRMatrix: Sync {
    fn eval(&self, lambda: &GroupWord) -> Result<Tensor2>;
}

/// `r = 0` on a `dim`-dimensional algebra.
#[derive(Clone, Copy, Debug)]
pub struct ZeroR {
    pub dim: usize,
}

impl DynamicalRMatrix for ZeroR {
    fn eval(&self, _lambda: &GroupWord) -> Result<Tensor2> {
        Ok(Tensor2::zeros(self.dim))
    }
}

/// `r*(λ) = r(λ) + sign · ρ(λ)`; `sign = -1` gives a deliberately wrong
/// r-matrix for control tests.
pub struct Reduced<'a> {
    pub setup: &'a ReductionSetup,
    pub base: &'a dyn DynamicalRMatrix,
    pub cond_threshold: f64,
    pub rho_sign: f64,
}

impl<'a> Reduced<'a> {
    pub fn new(setup: &'a ReductionSetup, base: &'a dyn DynamicalRMatrix, cond_threshold: f64) -> Self {
        Self {
            setup,
            base,
            cond_threshold,
            rho_sign: 1.0,
        }
    }

    pub fn corrupted(setup: &'a ReductionSetup, base: &'a dyn DynamicalRMatrix, cond_threshold: f64) -> Self {
        Self {
            rho_sign: -1.0,
            ..Self::new(setup, base, cond_threshold)
        }
    }
}

impl DynamicalRMatrix for Reduced<'_> {
    fn eval(&self, lambda: &GroupWord) -> Result<Tensor2> {
        let rho = rho(self.setup, lambda, self.cond_threshold)?;
        let base = self.base.eval(lambda)?;
        Ok(&base + &rho.scale(self.rho_sign))
    }
}

/// `r*(λ) = r(λ) + ρ(λ)`
pub fn reduced_r(s: &ReductionSetup, r: &dyn DynamicalRMatrix, lambda: &GroupWord, cond_threshold: f64) -> Result<Tensor2> {
    Reduced::new(s, r, cond_threshold).eval(lambda)
}

/// Reads an r-matrix defined on the dual group of `setup.h_pair` (as produced
/// by reducing `setup`) as a function on the dual group of a following step
/// whose `K` is that `H`.
pub struct Lifted<'a> {
    pub setup: &'a ReductionSetup,
    pub inner: &'a dyn DynamicalRMatrix,
}

impl DynamicalRMatrix for Lifted<'_> {
    fn eval(&self, lambda: &GroupWord) -> Result<Tensor2> {
        self.inner.eval(&self.setup.lift_native(lambda)?)
    }
}

impl ReductionSetup {
    /// A word in the native dual group of `H` as a word in `K*` with factors
    /// in `H* = M^⊥`.
    pub fn lift_native(&self, w: &GroupWord) -> Result<GroupWord> {
        let hd = self.h_pair.double.as_ref();
        let factors: Vec<Vector> = w.factors().iter().map(|f| self.hstar_in_kstar() * hd.kstar_part(f)).collect();
        GroupWord::from_dual_coords(self.k_double(), &factors)
    }

    /// The homomorphism `K* -> K*/M* = H*` applied factor by factor.
    pub fn project_native(&self, w: &GroupWord) -> Result<GroupWord> {
        let d = self.k_double();
        let factors: Vec<Vector> = w.factors().iter().map(|f| self.quotient_to_hstar(&d.kstar_part(f))).collect();
        GroupWord::from_dual_coords(&self.h_pair.double, &factors)
    }

    /// A native `H*` word from `H*` coordinates of a single factor.
    pub fn native_word(&self, coords: &[Vector]) -> Result<GroupWord> {
        GroupWord::from_dual_coords(&self.h_pair.double, coords)
    }
}

/// A function on `H*` (a test function of the native double of `H`) extended
/// to `K*` by composing with the quotient map, so it is constant along `M*`.
pub struct Extended<'a> {
    pub setup: &'a ReductionSetup,
    pub f: &'a dyn DualFunction,
}

impl DualFunction for Extended<'_> {
    fn value(&self, w: &GroupWord) -> Result<f64> {
        self.f.value(&self.setup.project_native(w)?)
    }
}

/// `{f, ξ_M}(λ) = <<∇f, λ M λ⁻¹>>`, using `∇'ξ_M = M`.
pub fn constraint_pb_check(s: &ReductionSetup, lambda: &GroupWord, f: &dyn DualFunction, m_vec: &Vector, h: f64, stencil: Stencil) -> Result<f64> {
    let d = s.k_double();
    let (grad, _) = gradients(lambda, f, h, stencil)?;
    Ok(d.pair(&d.from_k(&grad), &(lambda.ad() * d.from_k(m_vec))))
}

/// `M`-component of `∇f` for an extended function; vanishes on `H*`.
pub fn extended_gradient_m_residual(s: &ReductionSetup, lambda: &GroupWord, f: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<f64> {
    let (grad, _) = gradients(lambda, f, h, stencil)?;
    Ok(linalg::max_abs_vec(&s.proj_m(&grad)))
}

/// Dirac bracket `{f1, f2} - Σ {f1, ξ_i} (C⁻¹)_{ij} {ξ_j, f2}` of the
/// extensions of two `H*` test functions, at `λ ∈ H*` given as a `K*` word.
pub fn dirac_bracket(
    s: &ReductionSetup,
    lambda: &GroupWord,
    f1: &dyn DualFunction,
    f2: &dyn DualFunction,
    h: f64,
    stencil: Stencil,
    cond_threshold: f64,
) -> Result<f64> {
    let d = s.k_double();
    let e1 = Extended { setup: s, f: f1 };
    let e2 = Extended { setup: s, f: f2 };
    let (g1, _) = gradients(lambda, &e1, h, stencil)?;
    let (_, g2p) = gradients(lambda, &e2, h, stencil)?;
    let base = pb_from_gradients(lambda, &g1, &g2p);
    let m = s.m_dim();
    if m == 0 {
        return Ok(base);
    }
    let c = checked_c(s, lambda, cond_threshold)?;
    let mut left = Vector::zeros(m);
    let mut right = Vector::zeros(m);
    let grad1 = d.from_k(&g1);
    let ad_g2p = lambda.ad() * d.from_k(&g2p);
    for i in 0..m {
        let adm = lambda.ad() * d.from_k(&s.m_in_k().column(i).into_owned());
        // {f1, ξ_i} = <<∇f1, Ad M^i>>
        left[i] = d.pair(&grad1, &adm);
        // {ξ_i, f2} = <<(Ad M^i)_M, Ad ∇'f2>>
        let adm_m = d.from_k(&s.proj_m(&d.k_part(&adm)));
        right[i] = d.pair(&adm_m, &ad_g2p);
    }
    let (x, _) = linalg::solve(&c.entries, &Matrix::from_column_slice(m, 1, right.as_slice()), cond_threshold)?;
    Ok(base - left.dot(&x.column(0)))
}

/// `{F1, F2}` computed in the dual group of `H` itself.
pub fn native_bracket(s: &ReductionSetup, lambda: &GroupWord, f1: &dyn DualFunction, f2: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<f64> {
    let w = s.project_native(lambda)?;
    pb_dual(&w, f1, f2, h, stencil)
}

/// Sampling parameters for points of the second-class region.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    pub num_points: usize,
    pub box_radius: f64,
    pub max_attempts: usize,
    pub cond_threshold: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            num_points: 10,
            box_radius: 1.0,
            max_attempts: MAX_ATTEMPTS,
            cond_threshold: COND_THRESHOLD,
        }
    }
}

/// An accepted sample `λ = exp(Σ ξ_a H_a)`, `ξ` uniform in the box.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub index: usize,
    /// Draws consumed for this point, including the accepted one.
    pub attempts: usize,
    /// `H*` coordinates of the single factor.
    pub coords: Vector,
    /// The point as a word in the native dual group of `H`.
    pub native: GroupWord,
    /// The same point as a word in `K*`.
    pub word: GroupWord,
    pub cond: f64,
}

pub fn sample_points(s: &ReductionSetup, cfg: &SampleConfig) -> Result<Vec<SamplePoint>> {
    sample_points_where(s, cfg, |_| true)
}

/// Sample points where `accept` also holds (e.g. a base r-matrix is defined).
pub fn sample_points_where(s: &ReductionSetup, cfg: &SampleConfig, accept: impl Fn(&GroupWord) -> bool) -> Result<Vec<SamplePoint>> {
    if s.m_dim() % 2 == 1 {
        // No point can pass; say why instead of exhausting the attempts.
        return Err(Error::CDegenerate {
            cond: f64::INFINITY,
            odd_dimension: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let hd = s.h_dim();
    let mut out = Vec::with_capacity(cfg.num_points);
    for index in 0..cfg.num_points {
        let mut found = None;
        for attempt in 1..=cfg.max_attempts {
            let coords = Vector::from_fn(hd, |_, _| rng.random_range(-cfg.box_radius..=cfg.box_radius));
            let native = s.native_word(std::slice::from_ref(&coords))?;
            let word = s.lift_native(&native)?;
            let c = constraint_matrix(s, &word);
            if check_second_class(&c, cfg.cond_threshold) && accept(&word) {
                found = Some(SamplePoint {
                    index,
                    attempts: attempt,
                    coords,
                    native,
                    word,
                    cond: c.cond,
                });
                break;
            }
        }
        match found {
            Some(p) => out.push(p),
            None => return Err(Error::SamplingExhausted { attempts: cfg.max_attempts }),
        }
    }
    Ok(out)
}

/// Random vector of `M` in `K` coordinates, coefficients uniform in `[-1, 1]`.
pub fn random_m_vector(s: &ReductionSetup, rng: &mut impl Rng) -> Vector {
    let coef = Vector::from_fn(s.m_dim(), |_, _| rng.random_range(-1.0..=1.0));
    s.m_in_k() * coef
}

/// Unit vector helper re-exported for callers assembling `M^i`.
pub fn m_basis_vector(s: &ReductionSetup, i: usize) -> Vector {
    s.m_in_k() * unit(s.m_dim(), i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, load_entry};
    use crate::dual_group::{AbelianCoordinate, TestFunction};

    fn classical_point(s: &ReductionSetup, x: f64) -> GroupWord {
        let native = s.native_word(&[Vector::from_vec(vec![x])]).unwrap();
        s.lift_native(&native).unwrap()
    }

    #[test]
    fn constraint_basis_is_dual() {
        for name in catalog::list_entries() {
            let s = load_entry(name).unwrap();
            assert!(ConstraintBasis::from_setup(&s).duality_residual() < 1e-12);
        }
    }

    #[test]
    fn identity_is_degenerate() {
        let s = load_entry("sl2_dj").unwrap();
        let id = GroupWord::identity(s.k_double());
        let c = constraint_matrix(&s, &id);
        assert_eq!(linalg::max_abs(&c.entries), 0.0);
        assert!(!check_second_class(&c, COND_THRESHOLD));
        assert!(matches!(
            rho(&s, &id, COND_THRESHOLD),
            Err(Error::CDegenerate { odd_dimension: false, .. })
        ));
    }

    #[test]
    fn empty_m_is_vacuous() {
        let s = load_entry("abelian2").unwrap();
        let id = GroupWord::identity(s.k_double());
        let c = constraint_matrix(&s, &id);
        assert_eq!(c.dim(), 0);
        assert!(check_second_class(&c, COND_THRESHOLD));
        assert_eq!(rho(&s, &id, COND_THRESHOLD).unwrap().max_abs(), 0.0);
        assert_eq!(n_vectors(&s, &id, COND_THRESHOLD).unwrap().ncols(), 0);
        let r = ZeroR { dim: 2 };
        assert_eq!(reduced_r(&s, &r, &id, COND_THRESHOLD).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn classical_c_and_rho() {
        let s = load_entry("sl2_classical").unwrap();
        for x in [0.5, 1.0, 2.0] {
            let w = classical_point(&s, x);
            let c = constraint_matrix(&s, &w);
            // C^{12} = <ξ, [f, e]> = -x
            let expected = Matrix::from_row_slice(2, 2, &[0.0, -x, x, 0.0]);
            assert!(linalg::max_abs(&(&c.entries - expected)) < 1e-14);
            assert!((c.cond - 1.0).abs() < 1e-12);
            assert!(c.form_residual < 1e-14);
            let r = rho(&s, &w, COND_THRESHOLD).unwrap();
            let mut expected = Matrix::zeros(3, 3);
            expected[(1, 2)] = 1.0 / x;
            expected[(2, 1)] = -1.0 / x;
            assert!(linalg::max_abs(&(r.matrix() - expected)) < 1e-14);
        }
    }

    #[test]
    fn odd_m_is_diagnosed() {
        let g = crate::LieAlgebra::abelian(3);
        let e = catalog::units(3, &[0, 1, 2]);
        let s = crate::bialgebra::validate_setup(&g, &Tensor2::zeros(3), &crate::Subspace::full(3), &e[..2], &e[2..]).unwrap();
        let w = s.lift_native(&s.native_word(&[Vector::from_vec(vec![0.3, 0.2])]).unwrap()).unwrap();
        let c = constraint_matrix(&s, &w);
        assert!(!check_second_class(&c, COND_THRESHOLD));
        match rho(&s, &w, COND_THRESHOLD) {
            Err(e @ Error::CDegenerate { odd_dimension: true, .. }) => assert!(e.to_string().contains("odd-dimensional")),
            other => panic!("{other:?}"),
        }
        let cfg = SampleConfig {
            num_points: 1,
            ..Default::default()
        };
        assert!(matches!(sample_points(&s, &cfg), Err(Error::CDegenerate { odd_dimension: true, .. })));
    }

    #[test]
    fn sampling_respects_attempt_bound() {
        let s = load_entry("sl2_dj").unwrap();
        // cond >= 1 always, so nothing passes.
        let none = SampleConfig {
            num_points: 1,
            cond_threshold: 0.5,
            ..Default::default()
        };
        assert_eq!(sample_points(&s, &none).unwrap_err(), Error::SamplingExhausted { attempts: MAX_ATTEMPTS });
        // Accept only x > 0.9: roughly one draw in twenty succeeds.
        let cfg = SampleConfig {
            num_points: 5,
            ..Default::default()
        };
        let pts = sample_points_where(&s, &cfg, |w| s.project_native(w).unwrap().dual_factors()[0][0] > 0.9).unwrap();
        assert!(pts.iter().all(|p| p.attempts <= MAX_ATTEMPTS && p.coords[0] > 0.9));
        assert!(pts.iter().any(|p| p.attempts > 1));
        let never = sample_points_where(&s, &cfg, |_| false).unwrap_err();
        assert_eq!(never, Error::SamplingExhausted { attempts: MAX_ATTEMPTS });
    }

    #[test]
    fn n_vectors_and_forms_agree_on_levi() {
        let s = load_entry("sl3_dj_levi").unwrap();
        let cfg = SampleConfig {
            num_points: 3,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in sample_points(&s, &cfg).unwrap() {
            let r = rho(&s, &p.word, COND_THRESHOLD).unwrap();
            assert!(r.antisymmetry_residual() < 1e-12);
            let nvec = n_vectors(&s, &p.word, COND_THRESHOLD).unwrap();
            assert!(n_vectors_residual(&s, &p.word, &nvec) < 1e-10);
            let (a, b) = rho_via_n(&s, &p.word, COND_THRESHOLD).unwrap();
            let scale = 1.0 + r.max_abs();
            assert!((&r - &a).max_abs() < 1e-9 * scale);
            assert!((&r - &b).max_abs() < 1e-9 * scale);
            assert!(rho_operator_residual(&s, &p.word, COND_THRESHOLD).unwrap() < 1e-9 * scale);
            for _ in 0..5 {
                let u = random_m_vector(&s, &mut rng);
                let v = random_m_vector(&s, &mut rng);
                assert!(characterization_residual(&s, &p.word, &nvec, &u, &v) < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = load_entry("sl2_dj").unwrap();
        let cfg = SampleConfig::default();
        let a = sample_points(&s, &cfg).unwrap();
        let b = sample_points(&s, &cfg).unwrap();
        assert_eq!(a.len(), 10);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.coords, q.coords);
            assert_eq!(p.cond, q.cond);
        }
    }

    fn dirac_case(name: &str, fs: &[&dyn DualFunction]) {
        let s = load_entry(name).unwrap();
        let cfg = SampleConfig {
            num_points: 2,
            ..Default::default()
        };
        for p in sample_points(&s, &cfg).unwrap() {
            for f1 in fs {
                for f2 in fs {
                    let dirac = dirac_bracket(&s, &p.word, *f1, *f2, 1e-4, Stencil::Central4, COND_THRESHOLD).unwrap();
                    let native = native_bracket(&s, &p.word, *f1, *f2, 1e-4, Stencil::Central4).unwrap();
                    assert!((dirac - native).abs() < 1e-6, "{name}: {dirac} vs {native}");
                }
                let e = Extended { setup: &s, f: *f1 };
                for i in 0..s.m_dim() {
                    let v = constraint_pb_check(&s, &p.word, &e, &m_basis_vector(&s, i), 1e-4, Stencil::Central4).unwrap();
                    assert!(v.abs() < 1e-7, "{name}: {v}");
                }
                assert!(extended_gradient_m_residual(&s, &p.word, &e, 1e-4, Stencil::Central4).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn dirac_matches_native_on_levi() {
        let f1 = TestFunction::entry(2, 6);
        let f2 = TestFunction::entry(1, 5).times(&TestFunction::entry(3, 7));
        let f3 = TestFunction::entry(0, 4).plus(&TestFunction::entry(2, 7).scaled(0.5));
        dirac_case("sl3_dj_levi", &[&f1, &f2, &f3]);
    }

    #[test]
    fn dirac_matches_native_on_abelian_h() {
        let s = load_entry("sl2_dj").unwrap();
        let x = AbelianCoordinate::new(&s.h_pair.double, 0).unwrap();
        let sq = |w: &GroupWord| Ok(x.value(w)?.powi(2));
        dirac_case("sl2_dj", &[&x, &sq]);
        dirac_case("sl2_classical", &[&x, &sq]);
    }
}

//! Elements of a group as words of exponentials, acting on the Lie algebra
//! through `Ad = Π exp(ad ξ_i)`, and the Poisson structure of the dual group.

use std::sync::Arc;

use crate::bialgebra::DoubleAlgebra;
use crate::error::{Error, Result};
use crate::fd::{self, Stencil};
use crate::lie_core::LieAlgebra;
use crate::linalg::{self, Matrix, Vector};

/// Largest `K`-component tolerated in a factor of a dual-group word.
pub const FACTOR_TOL: f64 = 1e-12;

/// `exp(ξ_1) exp(ξ_2) ...` in the group of a Lie algebra, with the adjoint
/// action and its inverse computed at construction.
#[derive(Clone, Debug)]
pub struct Word {
    alg: Arc<LieAlgebra>,
    factors: Vec<Vector>,
    ad: Matrix,
    ad_inv: Matrix,
}

impl Word {
    pub fn new(alg: Arc<LieAlgebra>, factors: Vec<Vector>) -> Result<Self> {
        let n = alg.dim();
        let mut ad = Matrix::identity(n, n);
        let mut ad_inv = Matrix::identity(n, n);
        for (i, f) in factors.iter().enumerate() {
            if f.len() != n {
                return Err(Error::InputShape(format!(
                    "factor {i} has length {} in a {n}-dimensional algebra",
                    f.len()
                )));
            }
            let a = alg.ad_unchecked(f);
            ad *= linalg::expm(&a);
            ad_inv = linalg::expm(&(-a)) * ad_inv;
        }
        Ok(Self { alg, factors, ad, ad_inv })
    }

    pub fn identity(alg: Arc<LieAlgebra>) -> Self {
        Self::new(alg, Vec::new()).expect("empty word")
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.alg
    }

    pub fn factors(&self) -> &[Vector] {
        &self.factors
    }

    pub fn ad(&self) -> &Matrix {
        &self.ad
    }

    pub fn ad_inv(&self) -> &Matrix {
        &self.ad_inv
    }

    /// `exp(t ξ) · self`
    pub fn prepend(&self, xi: &Vector, t: f64) -> Self {
        let a = self.alg.ad_unchecked(xi) * t;
        let mut factors = Vec::with_capacity(self.factors.len() + 1);
        factors.push(xi * t);
        factors.extend(self.factors.iter().cloned());
        Self {
            alg: self.alg.clone(),
            factors,
            ad: linalg::expm(&a) * &self.ad,
            ad_inv: &self.ad_inv * linalg::expm(&(-a)),
        }
    }

    /// `self · exp(t ξ)`
    pub fn append(&self, xi: &Vector, t: f64) -> Self {
        let a = self.alg.ad_unchecked(xi) * t;
        let mut factors = self.factors.clone();
        factors.push(xi * t);
        Self {
            alg: self.alg.clone(),
            factors,
            ad: &self.ad * linalg::expm(&a),
            ad_inv: linalg::expm(&(-a)) * &self.ad_inv,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            factors: self.factors.iter().rev().map(|f| -f).collect(),
            ad: self.ad_inv.clone(),
            ad_inv: self.ad.clone(),
        }
    }

    /// `self · other`
    pub fn concat(&self, other: &Word) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self {
            alg: self.alg.clone(),
            factors,
            ad: &self.ad * &other.ad,
            ad_inv: &other.ad_inv * &self.ad_inv,
        }
    }
}

/// An element of the dual group `K*`, a word whose factors lie in `K*`
/// inside the double.
#[derive(Clone, Debug)]
pub struct GroupWord {
    double: Arc<DoubleAlgebra>,
    word: Word,
}

/// Build a dual-group element from factors given in double coordinates.
pub fn ad_of_word(double: &Arc<DoubleAlgebra>, factors: &[Vector]) -> Result<GroupWord> {
    let n = double.half_dim();
    for (index, f) in factors.iter().enumerate() {
        if f.len() != 2 * n {
            return Err(Error::InputShape(format!("factor {index} has length {}, expected {}", f.len(), 2 * n)));
        }
        let residual = linalg::max_abs_vec(&f.rows(0, n).into_owned());
        if residual > FACTOR_TOL {
            return Err(Error::FactorNotInDual {
                index,
                target: "K*",
                residual,
            });
        }
    }
    Ok(GroupWord {
        double: double.clone(),
        word: Word::new(double.algebra().clone(), factors.to_vec())?,
    })
}

impl GroupWord {
    /// Factors given by their `K*` coordinates.
    pub fn from_dual_coords(double: &Arc<DoubleAlgebra>, factors: &[Vector]) -> Result<Self> {
        let n = double.half_dim();
        let lifted: Vec<Vector> = factors
            .iter()
            .map(|f| {
                if f.len() != n {
                    Err(Error::InputShape(format!("dual factor of length {}, expected {n}", f.len())))
                } else {
                    Ok(double.from_kstar(f))
                }
            })
            .collect::<Result<_>>()?;
        ad_of_word(double, &lifted)
    }

    /// Wrap a word already known to lie in `K*`.
    pub(crate) fn from_word(double: &Arc<DoubleAlgebra>, word: Word) -> Self {
        Self {
            double: double.clone(),
            word,
        }
    }

    pub fn identity(double: &Arc<DoubleAlgebra>) -> Self {
        Self {
            double: double.clone(),
            word: Word::identity(double.algebra().clone()),
        }
    }

    pub fn double(&self) -> &Arc<DoubleAlgebra> {
        &self.double
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn factors(&self) -> &[Vector] {
        self.word.factors()
    }

    /// `K*` coordinates of each factor.
    pub fn dual_factors(&self) -> Vec<Vector> {
        self.word.factors().iter().map(|f| self.double.kstar_part(f)).collect()
    }

    pub fn ad(&self) -> &Matrix {
        self.word.ad()
    }

    pub fn ad_inv(&self) -> &Matrix {
        self.word.ad_inv()
    }

    /// `exp(t X) · λ` for `X` in double coordinates (assumed in `K*`).
    pub fn prepend(&self, x: &Vector, t: f64) -> Self {
        Self {
            double: self.double.clone(),
            word: self.word.prepend(x, t),
        }
    }

    /// `λ · exp(t X)`
    pub fn append(&self, x: &Vector, t: f64) -> Self {
        Self {
            double: self.double.clone(),
            word: self.word.append(x, t),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            double: self.double.clone(),
            word: self.word.inverse(),
        }
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        Self {
            double: self.double.clone(),
            word: self.word.concat(&other.word),
        }
    }

    /// `max |Adᵀ P Ad - P|`
    pub fn pairing_residual(&self) -> f64 {
        let p = self.double.pairing();
        linalg::max_abs(&(self.ad().transpose() * p * self.ad() - p))
    }

    /// `K`-block of `Ad` restricted to `K*`; vanishes since `K*` is a subgroup.
    pub fn stability_residual(&self) -> f64 {
        linalg::max_abs(&(self.double.proj_k() * self.ad() * self.double.proj_kstar()))
    }

    pub fn inverse_residual(&self) -> f64 {
        let d = self.double.dim();
        linalg::max_abs(&(self.ad() * self.ad_inv() - Matrix::identity(d, d)))
    }
}

/// A function on a group given as a polynomial in the entries of `Ad`:
/// `Σ_t c_t Π_{(a,b) ∈ t} Ad[a, b]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TestFunction {
    terms: Vec<(f64, Vec<(usize, usize)>)>,
}

impl TestFunction {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: vec![(c, Vec::new())],
        }
    }

    pub fn entry(a: usize, b: usize) -> Self {
        Self {
            terms: vec![(1.0, vec![(a, b)])],
        }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= s;
        }
        self
    }

    pub fn plus(mut self, other: &TestFunction) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn times(&self, other: &TestFunction) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, p1) in &self.terms {
            for (c2, p2) in &other.terms {
                let mut p = p1.clone();
                p.extend(p2.iter().copied());
                terms.push((c1 * c2, p));
            }
        }
        Self { terms }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(c, p)| p.is_empty() || *c == 0.0)
    }

    pub fn eval(&self, ad: &Matrix) -> f64 {
        self.terms
            .iter()
            .map(|(c, p)| c * p.iter().map(|&(a, b)| ad[(a, b)]).product::<f64>())
            .sum()
    }

    /// Directional derivative at `ad` along the tangent `d_ad` (product rule).
    pub fn differential(&self, ad: &Matrix, d_ad: &Matrix) -> f64 {
        let mut total = 0.0;
        for (c, p) in &self.terms {
            for k in 0..p.len() {
                let mut prod = *c;
                for (l, &(a, b)) in p.iter().enumerate() {
                    prod *= if l == k { d_ad[(a, b)] } else { ad[(a, b)] };
                }
                total += prod;
            }
        }
        total
    }
}

/// Anything that can be evaluated on a dual-group word.
pub trait DualFunction {
    fn value(&self, w: &GroupWord) -> Result<f64>;
}

impl DualFunction for TestFunction {
    fn value(&self, w: &GroupWord) -> Result<f64> {
        Ok(self.eval(w.ad()))
    }
}

impl<F: Fn(&GroupWord) -> Result<f64>> DualFunction for F {
    fn value(&self, w: &GroupWord) -> Result<f64> {
        self(w)
    }
}

/// A linear coordinate `ξ_i` on an abelian dual group, where
/// `exp(ξ) exp(η) = exp(ξ + η)`. Test functions built from `Ad` are constant
/// when the whole double is abelian; this one is not.
#[derive(Clone, Copy, Debug)]
pub struct AbelianCoordinate {
    index: usize,
}

impl AbelianCoordinate {
    pub fn new(double: &DoubleAlgebra, index: usize) -> Result<Self> {
        let n = double.half_dim();
        if index >= n {
            return Err(Error::InputShape(format!("coordinate {index} of a {n}-dimensional dual")));
        }
        let alg = double.algebra();
        for p in n..2 * n {
            for q in n..2 * n {
                for k in 0..2 * n {
                    if alg.structure_constant(p, q, k) != 0.0 {
                        return Err(Error::InputShape("dual algebra is not abelian".into()));
                    }
                }
            }
        }
        Ok(Self { index })
    }
}

impl DualFunction for AbelianCoordinate {
    fn value(&self, w: &GroupWord) -> Result<f64> {
        let n = w.double().half_dim();
        Ok(w.factors().iter().map(|f| f[n + self.index]).sum())
    }
}

/// `(ℒ_X f)(λ) = d/dt f(e^{tX} λ)`, `X` in double coordinates.
pub fn left_derivative(w: &GroupWord, x: &Vector, f: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<f64> {
    fd::derivative(|t| f.value(&w.prepend(x, t)), h, stencil)
}

/// `d/dt f(λ e^{tX})`
pub fn right_derivative(w: &GroupWord, x: &Vector, f: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<f64> {
    fd::derivative(|t| f.value(&w.append(x, t)), h, stencil)
}

/// Left and right gradients `∇f, ∇'f ∈ K`, in `K` coordinates.
pub fn gradients(w: &GroupWord, f: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<(Vector, Vector)> {
    let d = w.double();
    let n = d.half_dim();
    let mut grad = Vector::zeros(n);
    let mut grad_p = Vector::zeros(n);
    for p in 0..n {
        let x = d.from_kstar(&crate::bialgebra::unit(n, p));
        grad[p] = left_derivative(w, &x, f, h, stencil)?;
        grad_p[p] = right_derivative(w, &x, f, h, stencil)?;
    }
    Ok((grad, grad_p))
}

/// `(Ad_λ⁻¹ ∇f)_K`, the right gradient predicted by the left one.
pub fn right_from_left(w: &GroupWord, grad: &Vector) -> Vector {
    let d = w.double();
    d.k_part(&(w.ad_inv() * d.from_k(grad)))
}

/// `{f1, f2}(λ) = <<∇f1, Ad_λ ∇'f2>>`
pub fn pb_dual(w: &GroupWord, f1: &dyn DualFunction, f2: &dyn DualFunction, h: f64, stencil: Stencil) -> Result<f64> {
    let (g1, _) = gradients(w, f1, h, stencil)?;
    let (_, g2p) = gradients(w, f2, h, stencil)?;
    Ok(pb_from_gradients(w, &g1, &g2p))
}

pub fn pb_from_gradients(w: &GroupWord, grad1: &Vector, grad2_prime: &Vector) -> f64 {
    let d = w.double();
    d.pair(&d.from_k(grad1), &(w.ad() * d.from_k(grad2_prime)))
}

/// Infinitesimal dressing by `X ∈ K`: `(Ad_λ⁻¹ X)_{K*}` in `K*` coordinates,
/// so the flow through `λ` is `t ↦ λ exp(t Y)` to first order.
pub fn dressing_vector(w: &GroupWord, x: &Vector) -> Vector {
    let d = w.double();
    d.kstar_part(&(w.ad_inv() * d.from_k(x)))
}

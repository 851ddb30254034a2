//! Central finite differences for scalar and matrix valued curves.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Default step for first derivatives.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Number of times a step is halved when a stencil point leaves the domain.
pub const MAX_HALVINGS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// `(f(h) - f(-h)) / 2h`, error `O(h^2)`.
    Central2,
    /// `(f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h`, error `O(h^4)`.
    #[default]
    Central4,
    /// Six evaluations, error `O(h^6)`.
    Central6,
    /// Eight evaluations, error `O(h^8)`.
    Central8,
}

impl Stencil {
    fn weights(self) -> &'static [(f64, f64)] {
        match self {
            Stencil::Central2 => &[(1.0, 0.5), (-1.0, -0.5)],
            Stencil::Central4 => &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
            Stencil::Central6 => &[
                (-3.0, -1.0 / 60.0),
                (-2.0, 9.0 / 60.0),
                (-1.0, -45.0 / 60.0),
                (1.0, 45.0 / 60.0),
                (2.0, -9.0 / 60.0),
                (3.0, 1.0 / 60.0),
            ],
            Stencil::Central8 => &[
                (-4.0, 3.0 / 840.0),
                (-3.0, -32.0 / 840.0),
                (-2.0, 168.0 / 840.0),
                (-1.0, -672.0 / 840.0),
                (1.0, 672.0 / 840.0),
                (2.0, -168.0 / 840.0),
                (3.0, 32.0 / 840.0),
                (4.0, -3.0 / 840.0),
            ],
        }
    }
}

/// `d/dt f(t)` at `t = 0`.
pub fn derivative<T, F>(f: F, h: f64, stencil: Stencil) -> Result<T>
where
    F: Fn(f64) -> Result<T>,
    T: Add<Output = T> + Mul<f64, Output = T>,
{
    let mut acc: Option<T> = None;
    for &(offset, w) in stencil.weights() {
        let term = f(offset * h)? * (w / h);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("stencils are nonempty"))
}

/// Like [`derivative`], but halves the step (at most [`MAX_HALVINGS`] times)
/// when a stencil point reports a degenerate constraint matrix. Returns the
/// derivative and the step actually used.
pub fn derivative_halving<T, F>(f: F, h: f64, stencil: Stencil) -> Result<(T, f64)>
where
    F: Fn(f64) -> Result<T>,
    T: Add<Output = T> + Mul<f64, Output = T>,
{
    let mut step = h;
    for _ in 0..=MAX_HALVINGS {
        match derivative(&f, step, stencil) {
            Ok(v) => return Ok((v, step)),
            Err(Error::CDegenerate { .. }) => step *= 0.5,
            Err(e) => return Err(e),
        }
    }
    // One last attempt so the caller sees the real error.
    derivative(&f, step, stencil).map(|v| (v, step))
}

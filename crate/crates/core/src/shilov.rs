//! Spectral data of Shilov-hyperbolic elements and contracting powers.

use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::bergmann::{is_maximal_tuple, IsotropicLine};
use crate::error::{Error, Result};
use crate::form::{GroupElement, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShilovData {
    pub lambda1: f64,
    /// Modulus of the second largest eigenvalue.
    pub lambda2_abs: f64,
    /// `|lambda1| / |lambda2|`.
    pub gap: f64,
    pub plus: IsotropicLine,
    pub minus: IsotropicLine,
}

/// Right singular vector of the smallest singular value, with that value.
pub(crate) fn null_vector(m: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    (v_t.row(k).transpose(), s)
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues sorted by decreasing modulus, as `(re, im)`. `None` when the
/// Schur iteration does not converge.
pub(crate) fn sorted_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<(f64, f64)>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)?;
    let mut eig: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    eig.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    Some(eig)
}

fn eigenline(g: &GroupElement<f64>, lambda: f64) -> Result<IsotropicLine> {
    let d = g.form().dim();
    let shifted = g.matrix() - DMatrix::identity(d, d) * lambda;
    let (v, _) = null_vector(&shifted);
    let resid = (&shifted * &v).norm() / g.matrix().norm().max(1.0);
    if resid > 1e-8 {
        return Err(Error::NotShilov(format!("eigenvector residual {resid:e}")));
    }
    IsotropicLine::new(*g.form(), v, &Tolerances { iso_tol: 1e-8, ..Tolerances::default() })
        .map_err(|_| Error::NotShilov("eigenline is not isotropic".into()))
}

pub fn shilov_analyze(g: &GroupElement<f64>, tol: f64) -> Result<ShilovData> {
    if g.form().p() != 2 {
        return Err(Error::UnsupportedSignature(format!("p = {}", g.form().p())));
    }
    let eig = sorted_eigenvalues(g.matrix())
        .ok_or_else(|| Error::NotShilov("eigenvalue iteration did not converge".into()))?;
    let (re, im) = eig[0];
    let m1 = re.hypot(im);
    let m2 = eig.get(1).map(|e| e.0.hypot(e.1)).unwrap_or(0.0);
    if m1 <= 1.0 + tol {
        return Err(Error::NotShilov(format!("spectral radius {m1}")));
    }
    if m1 - m2 < tol {
        return Err(Error::SpectralGapTooSmall { gap: m1 - m2 });
    }
    if im.abs() > tol * m1 {
        return Err(Error::NotShilov("dominant eigenvalue is not real".into()));
    }
    let plus = eigenline(g, re)?;
    // The repelling line is the attracting line of the inverse.
    let minus = eigenline(&g.inverse(), re)?;
    Ok(ShilovData { lambda1: re, lambda2_abs: m2, gap: m1 / m2, plus, minus })
}

const WINDOW: usize = 5;

/// Smallest `n <= n_max` such that `(y, g^n x, g+, g^n t, z)` is maximal for
/// every power in `[n, n + 5]` that can still be decided numerically. The
/// input `(x, y, g+, z, t, g-)` must be maximal.
#[allow(clippy::too_many_arguments)]
pub fn find_contraction_power(
    g: &GroupElement<f64>,
    data: &ShilovData,
    x: &IsotropicLine,
    y: &IsotropicLine,
    z: &IsotropicLine,
    t: &IsotropicLine,
    n_max: usize,
    allow_zero: bool,
) -> Result<usize> {
    let six = [x.clone(), y.clone(), data.plus.clone(), z.clone(), t.clone(), data.minus.clone()];
    if !is_maximal_tuple(&six)? {
        return Err(Error::NotMaximal);
    }
    let mut gx = vec![x.clone()];
    let mut gt = vec![t.clone()];
    for _ in 0..n_max + WINDOW {
        gx.push(gx.last().unwrap().transform(g)?);
        gt.push(gt.last().unwrap().transform(g)?);
    }
    // `None`: undecidable, typically because the contracted points have
    // collapsed onto g+ numerically.
    let status: Vec<Option<bool>> = (0..=n_max + WINDOW)
        .map(|n| is_maximal_tuple(&[y.clone(), gx[n].clone(), data.plus.clone(), gt[n].clone(), z.clone()]).ok())
        .collect();
    let start = if allow_zero { 0 } else { 1 };
    (start..=n_max)
        .find(|&n| status[n] == Some(true) && status[n..=n + WINDOW].iter().all(|&b| b != Some(false)))
        .ok_or(Error::NoPowerFound { n_max })
}

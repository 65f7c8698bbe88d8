//! Truncated Fourier model of the representations `pi_s` of the disc
//! automorphism group on functions of the circle, the quadratic form they
//! preserve, and the tangent computation showing their Toledo invariant
//! vanishes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const S_RANGE: &str = "(1.5, 2.5)";

fn check_s(s: f64) -> Result<()> {
    if s > 1.5 && s < 2.5 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "s", value: s, range: S_RANGE })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourierBasis {
    C,
    E(usize),
    F(usize),
}

/// Real trigonometric basis `c = 1`, `e_n = Re z^n`, `f_n = Im z^n` for
/// `n <= N`, ordered `(c, e_1, f_1, ..., e_N, f_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierTruncation {
    pub n: usize,
}

impl FourierTruncation {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInput("truncation N = 0".into()));
        }
        Ok(FourierTruncation { n })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn index(&self, b: FourierBasis) -> usize {
        match b {
            FourierBasis::C => 0,
            FourierBasis::E(n) => 2 * n - 1,
            FourierBasis::F(n) => 2 * n,
        }
    }

    pub fn basis(&self, i: usize) -> FourierBasis {
        match i {
            0 => FourierBasis::C,
            i if i % 2 == 1 => FourierBasis::E(i.div_ceil(2)),
            i => FourierBasis::F(i / 2),
        }
    }

    /// Frequency of basis index `i`.
    pub fn frequency(i: usize) -> usize {
        i.div_ceil(2)
    }
}

/// Disc automorphism `z -> (alpha z + beta) / (conj(beta) z + conj(alpha))`
/// with `|alpha|^2 - |beta|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Mobius {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let det = alpha.norm_sqr() - beta.norm_sqr();
        if (det - 1.0).abs() > 1e-12 * alpha.norm_sqr().max(1.0) {
            return Err(Error::NotInGroup { residual: (det - 1.0).abs(), tol: 1e-12 });
        }
        Ok(Mobius { alpha, beta })
    }

    pub fn identity() -> Self {
        Mobius { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) }
    }

    /// `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        Mobius { alpha: Complex64::from_polar(1.0, theta / 2.0), beta: Complex64::new(0.0, 0.0) }
    }

    /// `g_t(z) = (z + tanh t) / (tanh t z + 1)`.
    pub fn hyperbolic(t: f64) -> Self {
        Mobius { alpha: Complex64::new(t.cosh(), 0.0), beta: Complex64::new(t.sinh(), 0.0) }
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        let (a, b) = (self.alpha, self.beta);
        let (c, d) = (other.alpha, other.beta);
        Mobius { alpha: a * c + b * d.conj(), beta: a * d + b * c.conj() }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { alpha: self.alpha.conj(), beta: -self.beta }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / (self.beta.conj() * z + self.alpha.conj())
    }

    /// `|(g^-1)'(z)|` on the circle.
    pub fn inverse_jacobian(&self, z: Complex64) -> f64 {
        1.0 / (self.alpha - self.beta.conj() * z).norm_sqr()
    }

    pub fn is_rotation(&self) -> bool {
        self.beta.norm() == 0.0
    }
}

/// Displayed product `-prod_{i<n} (i + 1/2 - s) / (i - 1/2 + s)`, with the
/// constant function assigned `-1`.
pub fn qs_coefficient(s: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    Ok(-(0..n).map(|i| (i as f64 + 0.5 - s) / (i as f64 - 0.5 + s)).product::<f64>())
}

/// Diagonal of the form actually preserved by `pi_s` in the real basis:
/// `-1/2 prod_{i<n} (i + 1/2 - s) / (i + 1/2 + s)` on `e_n`, `f_n` and `-1`
/// on `c`.
pub fn qs_invariant_coefficient(s: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    if n == 0 {
        return Ok(-1.0);
    }
    Ok(-0.5 * (0..n).map(|i| (i as f64 + 0.5 - s) / (i as f64 + 0.5 + s)).product::<f64>())
}

/// Whether the displayed coefficients for `n <= n_max` are positive exactly
/// at `n = 1`.
pub fn qs_sign_pattern_ok(s: f64, n_max: usize) -> Result<bool> {
    for n in 0..=n_max {
        if (qs_coefficient(s, n)? > 0.0) != (n == 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QsWeights {
    Displayed,
    Invariant,
}

pub fn qs_diagonal(s: f64, trunc: &FourierTruncation, weights: QsWeights) -> Result<DVector<f64>> {
    let coef = |n| match weights {
        QsWeights::Displayed => qs_coefficient(s, n),
        QsWeights::Invariant => qs_invariant_coefficient(s, n),
    };
    let mut d = DVector::zeros(trunc.dim());
    for i in 0..trunc.dim() {
        d[i] = coef(FourierTruncation::frequency(i))?;
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiSMatrix {
    pub matrix: DMatrix<f64>,
    /// Largest L2 norm of the frequencies above N dropped from the image of
    /// a basis vector of frequency at most N/2.
    pub leakage: f64,
    pub quadrature: usize,
}

fn basis_value(i: usize, phi: f64) -> f64 {
    let n = FourierTruncation::frequency(i) as f64;
    match i {
        0 => 1.0,
        i if i % 2 == 1 => (n * phi).cos(),
        _ => (n * phi).sin(),
    }
}

/// First `ncols` columns of the matrix of
/// `pi_s(g) f = Jac(g^-1)^{1/2 + s} f o g^-1`.
pub fn pi_s_columns(
    s: f64,
    g: &Mobius,
    trunc: &FourierTruncation,
    ncols: usize,
    quadrature: Option<usize>,
    leak_tol: Option<f64>,
) -> Result<PiSMatrix> {
    let dim = trunc.dim();
    let ncols = ncols.min(dim);
    let m = quadrature.unwrap_or(8 * trunc.n);
    if g.is_rotation() {
        let theta = 2.0 * g.alpha.arg();
        let mut out = DMatrix::zeros(dim, ncols);
        for j in 0..ncols {
            if j == 0 {
                out[(0, 0)] = 1.0;
                continue;
            }
            let (sn, cs) = (FourierTruncation::frequency(j) as f64 * theta).sin_cos();
            let (e, f) = if j % 2 == 1 { (j, j + 1) } else { (j - 1, j) };
            if j == e {
                out[(e, j)] = cs;
                if f < dim {
                    out[(f, j)] = sn;
                }
            } else {
                out[(e, j)] = -sn;
                out[(f, j)] = cs;
            }
        }
        return Ok(PiSMatrix { matrix: out, leakage: 0.0, quadrature: 0 });
    }
    if m < 4 * trunc.n {
        return Err(Error::QuadratureTooCoarse(format!("M = {m} < 4N = {}", 4 * trunc.n)));
    }
    let zs: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
    let ginv = g.inverse();
    let (phis, mults): (Vec<f64>, Vec<f64>) =
        zs.iter().map(|&z| (ginv.apply(z).arg(), g.inverse_jacobian(z).powf(0.5 + s))).unzip();

    // Image samples, one row per input basis vector.
    let rows: Vec<Vec<f64>> =
        (0..ncols).into_par_iter().map(|j| (0..m).map(|k| mults[k] * basis_value(j, phis[k])).collect()).collect();
    let img = DMatrix::from_fn(ncols, m, |j, k| rows[j][k]);
    let proj = DMatrix::from_fn(dim, m, |i, k| {
        let w = if i == 0 { 1.0 } else { 2.0 };
        w * basis_value(i, 2.0 * PI * k as f64 / m as f64) / m as f64
    });
    let matrix = proj * img.transpose();

    let inner = FourierTruncation::frequency(ncols - 1).min(trunc.n / 2);
    let mut leakage: f64 = 0.0;
    for j in 0..ncols {
        if FourierTruncation::frequency(j) > inner.max(1) && j > 0 {
            continue;
        }
        let total = rows[j].iter().map(|x| x * x).sum::<f64>() / m as f64;
        let kept = matrix[(0, j)].powi(2) + 0.5 * (1..dim).map(|i| matrix[(i, j)].powi(2)).sum::<f64>();
        leakage = leakage.max((total - kept).max(0.0).sqrt());
    }
    if let Some(tol) = leak_tol {
        if leakage > tol {
            return Err(Error::QuadratureTooCoarse(format!("leakage {leakage:e} > {tol:e}")));
        }
    }
    Ok(PiSMatrix { matrix, leakage, quadrature: m })
}

pub fn pi_s_matrix(
    s: f64,
    g: &Mobius,
    trunc: &FourierTruncation,
    quadrature: Option<usize>,
    leak_tol: Option<f64>,
) -> Result<PiSMatrix> {
    pi_s_columns(s, g, trunc, trunc.dim(), quadrature, leak_tol)
}

/// Max-abs entry of `pi^T D pi - D` on the indices of frequency at most `k`.
pub fn check_qs_invariance(s: f64, g: &Mobius, trunc: &FourierTruncation, k: usize, weights: QsWeights) -> Result<f64> {
    if 2 * k > trunc.n {
        return Err(Error::DegenerateInput(format!("inner block K = {k} > N/2")));
    }
    let d = qs_diagonal(s, trunc, weights)?;
    let cols = 2 * k + 1;
    let pi = pi_s_columns(s, g, trunc, cols, None, None)?.matrix;
    let dp = DMatrix::from_fn(pi.nrows(), cols, |i, j| d[i] * pi[(i, j)]);
    let r = pi.transpose() * dp - DMatrix::from_diagonal(&d.rows(0, cols).into_owned());
    Ok(r.amax())
}

/// The 2x3 matrices of the tangent vectors, rows `(e_1, f_1)` and columns
/// `(c, e_2, f_2)`, as displayed alongside `-1 + (2 + 2s) z^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentMatrices {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub ib: DMatrix<f64>,
}

pub fn tangent_matrices(s: f64) -> TangentMatrices {
    let k = 2.0 + 2.0 * s;
    TangentMatrices {
        a: DMatrix::from_row_slice(2, 3, &[-1.0, k, 0.0, 0.0, 0.0, k]),
        b: DMatrix::from_row_slice(2, 3, &[-1.0, -k, 0.0, 0.0, 0.0, -k]),
        ib: DMatrix::from_row_slice(2, 3, &[0.0, 0.0, -k, 1.0, k, 0.0]),
    }
}

/// `d/dt pi_s(g_t) z` at `t = 0` as given alongside the tangent matrices:
/// `-1 + (2 + 2s) z^2`, as `(c, e_2, f_2)` coefficients of the image of
/// `e_1`.
pub fn displayed_tangent(s: f64) -> [f64; 3] {
    [-1.0, 2.0 + 2.0 * s, 0.0]
}

/// Closed form of the same derivative with the real Jacobian:
/// `(s - 1/2) + (s + 3/2) z^2`.
pub fn analytic_tangent(s: f64) -> [f64; 3] {
    [s - 0.5, s + 1.5, 0.0]
}

/// Central difference of `pi_s(g_t)` at `t = 0` restricted to the rows
/// `(c, e_2, f_2)` and columns `(e_1, f_1)`, transposed into the 2x3 layout
/// of [`tangent_matrices`].
pub fn tangent_finite_difference(
    s: f64,
    t_step: f64,
    trunc: &FourierTruncation,
    conj: Option<&Mobius>,
) -> Result<DMatrix<f64>> {
    let d = finite_difference_generator(s, t_step, trunc, conj, 3)?;
    let cols = [0, 3, 4];
    Ok(DMatrix::from_fn(2, 3, |r, c| d[(cols[c], r + 1)]))
}

/// `(pi_s(h_t) - pi_s(h_-t)) / 2t` on the first `ncols` columns, with
/// `h_t = k g_t k^-1` (or `g_t` when `k` is absent).
fn finite_difference_generator(
    s: f64,
    t_step: f64,
    trunc: &FourierTruncation,
    k: Option<&Mobius>,
    ncols: usize,
) -> Result<DMatrix<f64>> {
    let path = |t: f64| match k {
        Some(k) => k.compose(&Mobius::hyperbolic(t)).compose(&k.inverse()),
        None => Mobius::hyperbolic(t),
    };
    let plus = pi_s_columns(s, &path(t_step), trunc, ncols, None, None)?.matrix;
    let minus = pi_s_columns(s, &path(-t_step), trunc, ncols, None, None)?.matrix;
    Ok((plus - minus) / (2.0 * t_step))
}

/// Trace pairing of the symmetric lifts `[[0, X], [X^T, 0]]`, which equals
/// `2 <X, Y>_F`.
pub fn symmetric_lift_pairing(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let lift = |m: &DMatrix<f64>| {
        let (r, c) = m.shape();
        let mut out = DMatrix::zeros(r + c, r + c);
        out.view_mut((0, r), (r, c)).copy_from(m);
        out.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
        out
    };
    (lift(x) * lift(y)).trace()
}

/// Trace pairing of `[[0, X], [X^T, 0]]` against `[[0, Y], [-Y^T, 0]]`.
/// Identically zero: a symmetric and an antisymmetric matrix are always
/// trace-orthogonal.
pub fn mixed_lift_pairing(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let (r, c) = x.shape();
    let mut sx = DMatrix::zeros(r + c, r + c);
    sx.view_mut((0, r), (r, c)).copy_from(x);
    sx.view_mut((r, 0), (c, r)).copy_from(&x.transpose());
    let mut ay = DMatrix::zeros(r + c, r + c);
    ay.view_mut((0, r), (r, c)).copy_from(y);
    ay.view_mut((r, 0), (c, r)).copy_from(&(-y.transpose()));
    (sx * ay).trace()
}

pub fn pairing_vanishes(s: f64) -> f64 {
    let t = tangent_matrices(s);
    symmetric_lift_pairing(&t.a, &t.ib)
}

/// `J`: the rotation by a quarter turn.
pub fn quarter_turn() -> Mobius {
    Mobius::rotation(PI / 2.0)
}

/// `g(J_0 df(Jv), df(v))` rebuilt from finite differences along `g_t` and
/// `J g_t J^-1`. Both tangent vectors are restricted to the block between
/// the positive plane `(e_1, f_1)` and `(c, e_2, f_2)`, written in
/// `Q_s`-orthonormal coordinates, and `J_0` acts on the positive plane by
/// the quarter turn.
pub fn toledo_density(s: f64, t_step: f64, trunc: &FourierTruncation) -> Result<f64> {
    check_s(s)?;
    let d = qs_diagonal(s, trunc, QsWeights::Invariant)?;
    let block = |m: &DMatrix<f64>| {
        let rows = [0usize, 3, 4];
        DMatrix::from_fn(2, 3, |r, c| {
            let (i, j) = (rows[c], r + 1);
            d[i].abs().sqrt() * m[(i, j)] / d[j].abs().sqrt()
        })
    };
    let jq = quarter_turn();
    let xv = block(&finite_difference_generator(s, t_step, trunc, None, 3)?);
    let xjv = block(&finite_difference_generator(s, t_step, trunc, Some(&jq), 3)?);
    let i2 = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    Ok((i2 * xjv).dot(&xv))
}

/// Value of [`toledo_density`] in exact arithmetic:
/// `(2 (s + 3/2)^2 |Q(e_2)| - (s - 1/2)^2 |Q(c)|) / Q(e_1)` with the
/// invariant weights.
pub fn toledo_density_closed_form(s: f64) -> Result<f64> {
    let (a, b) = (s - 0.5, s + 1.5);
    let (qc, q1, q2) =
        (qs_invariant_coefficient(s, 0)?, qs_invariant_coefficient(s, 1)?, qs_invariant_coefficient(s, 2)?);
    Ok((2.0 * b * b * q2.abs() - a * a * qc.abs()) / q1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(n: usize) -> FourierTruncation {
        FourierTruncation::new(n).unwrap()
    }

    #[test]
    fn basis_indexing() {
        let t = tr(5);
        for i in 0..t.dim() {
            assert_eq!(t.index(t.basis(i)), i);
        }
        assert_eq!(t.index(FourierBasis::E(1)), 1);
        assert_eq!(t.index(FourierBasis::F(5)), 10);
    }

    #[test]
    fn coefficients() {
        for s in [1.6, 2.0, 2.4] {
            assert_eq!(qs_coefficient(s, 1).unwrap(), 1.0);
        }
        assert!((qs_coefficient(2.0, 2).unwrap() + 0.2).abs() < 1e-15);
        assert!(matches!(qs_coefficient(2.5, 1), Err(Error::OutOfRange { .. })));
        assert!(matches!(qs_coefficient(1.5, 1), Err(Error::OutOfRange { .. })));
        for s in [1.6, 2.0, 2.4] {
            for n in 1..=64 {
                let q = qs_coefficient(s, n).unwrap();
                assert_eq!(q > 0.0, n == 1, "s = {s}, n = {n}");
                let qi = qs_invariant_coefficient(s, n).unwrap();
                assert_eq!(qi > 0.0, n == 1);
                if n > 1 {
                    assert!(q.abs() < qs_coefficient(s, n - 1).unwrap().abs());
                }
            }
        }
    }

    #[test]
    fn rotation_blocks() {
        let t = tr(6);
        let theta = 0.37;
        let p = pi_s_matrix(2.0, &Mobius::rotation(theta), &t, None, None).unwrap();
        assert_eq!(p.matrix[(0, 0)], 1.0);
        for n in 1..=6 {
            let (e, f) = (t.index(FourierBasis::E(n)), t.index(FourierBasis::F(n)));
            let (sn, cs) = (n as f64 * theta).sin_cos();
            assert!((p.matrix[(e, e)] - cs).abs() < 1e-14);
            assert!((p.matrix[(f, e)] - sn).abs() < 1e-14);
            assert!((p.matrix[(e, f)] + sn).abs() < 1e-14);
            assert!((p.matrix[(f, f)] - cs).abs() < 1e-14);
        }
        let id = pi_s_matrix(2.0, &Mobius::identity(), &t, None, None).unwrap();
        assert_eq!(id.matrix, DMatrix::identity(13, 13));
        // The quadrature path agrees with the rotation shortcut.
        let r = Mobius::rotation(theta);
        let tilted = Mobius { alpha: r.alpha, beta: Complex64::new(1e-300, 0.0) };
        let q = pi_s_matrix(2.0, &tilted, &t, None, None).unwrap();
        assert!((q.matrix - p.matrix).amax() < 1e-13);
    }

    #[test]
    fn quarter_turn_eigenvectors() {
        let t = tr(8);
        let pj = pi_s_matrix(2.0, &quarter_turn(), &t, None, None).unwrap().matrix;
        let ph = pi_s_matrix(2.0, &Mobius::rotation(PI), &t, None, None).unwrap().matrix;
        for n in 1..=4 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for b in [FourierBasis::E(2 * n), FourierBasis::F(2 * n)] {
                let i = t.index(b);
                let mut v = DVector::zeros(t.dim());
                v[i] = 1.0;
                assert!((&pj * &v - &v * sign).amax() < 1e-14);
            }
        }
        for n in 1..=8 {
            let i = t.index(FourierBasis::E(n));
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((ph[(i, i)] - sign).abs() < 1e-14);
        }
    }

    #[test]
    fn image_of_z_closed_form() {
        // pi_s(g_t) z = ((1 - a^2) / |1 - a z|^2)^{1/2 + s} (z - a) / (1 - a z).
        let (s, tt) = (2.0_f64, 0.4_f64);
        let a = tt.tanh();
        let t = tr(64);
        let p = pi_s_matrix(s, &Mobius::hyperbolic(tt), &t, None, None).unwrap().matrix;
        let m = 4096;
        let (mut c0, mut c2) = (0.0, 0.0);
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            let z = Complex64::from_polar(1.0, th);
            let one = Complex64::new(1.0, 0.0);
            let f = ((1.0 - a * a) / (one - z * a).norm_sqr()).powf(0.5 + s) * (z - a) / (one - z * a);
            c0 += f.re / m as f64;
            c2 += 2.0 * f.re * (2.0 * th).cos() / m as f64;
        }
        assert!((p[(0, 1)] - c0).abs() < 1e-12);
        assert!((p[(3, 1)] - c2).abs() < 1e-12);
    }

    #[test]
    fn homomorphism() {
        let t = tr(64);
        let (g1, g2) = (Mobius::hyperbolic(0.3), quarter_turn().compose(&Mobius::hyperbolic(0.2)));
        let p1 = pi_s_matrix(2.0, &g1, &t, None, None).unwrap();
        let p2 = pi_s_matrix(2.0, &g2, &t, None, None).unwrap();
        let p12 = pi_s_matrix(2.0, &g1.compose(&g2), &t, None, None).unwrap();
        let k = 33;
        let diff = (&p1.matrix * &p2.matrix - &p12.matrix).view((0, 0), (k, k)).amax();
        assert!(diff <= 10.0 * (p1.leakage + p2.leakage).max(1e-13), "{diff:e}");
    }

    #[test]
    fn coarse_quadrature() {
        let t = tr(16);
        assert!(matches!(
            pi_s_matrix(2.0, &Mobius::hyperbolic(0.3), &t, Some(32), None),
            Err(Error::QuadratureTooCoarse(_))
        ));
        assert!(matches!(
            pi_s_matrix(2.0, &Mobius::hyperbolic(2.0), &t, None, Some(1e-6)),
            Err(Error::QuadratureTooCoarse(_))
        ));
    }

    #[test]
    fn invariance() {
        let rot = Mobius::rotation(0.9);
        let t = tr(32);
        for w in [QsWeights::Displayed, QsWeights::Invariant] {
            assert!(check_qs_invariance(2.0, &rot, &t, 16, w).unwrap() < 1e-14);
        }
        let g = Mobius::hyperbolic(0.3);
        let t256 = tr(256);
        assert!(check_qs_invariance(2.0, &g, &t256, 16, QsWeights::Invariant).unwrap() <= 1e-8);
        assert!(check_qs_invariance(2.0, &g, &t256, 16, QsWeights::Displayed).unwrap() > 1e-2);
    }

    #[test]
    fn tangent() {
        let t = tr(16);
        for s in [1.6, 2.0, 2.4] {
            let fd = tangent_finite_difference(s, 1e-4, &t, None).unwrap();
            let an = analytic_tangent(s);
            let expect = DMatrix::from_row_slice(2, 3, &[an[0], an[1], 0.0, 0.0, 0.0, an[1]]);
            assert!((&fd - expect).amax() < 1e-6);
            let shown = tangent_matrices(s).a;
            assert!((&fd - shown).amax() > 1.0);
        }
        let tm = tangent_matrices(2.0);
        assert_eq!(tm.a.row(0).iter().copied().collect::<Vec<_>>(), vec![-1.0, 6.0, 0.0]);
        let mut neg = tm.a.clone();
        neg.view_mut((0, 1), (2, 2)).neg_mut();
        assert_eq!(neg, tm.b);
    }

    #[test]
    fn pairings() {
        for s in [1.6, 2.0, 2.4] {
            assert_eq!(pairing_vanishes(s), 0.0);
            let tm = tangent_matrices(s);
            let mut ib = tm.ib.clone();
            ib[(0, 0)] = 1.0;
            assert_eq!(symmetric_lift_pairing(&tm.a, &ib), -2.0);
            assert_eq!(symmetric_lift_pairing(&tm.a, &tm.a), 2.0 * tm.a.norm_squared());
            // The mixed lift cannot detect anything.
            assert_eq!(mixed_lift_pairing(&tm.a, &tm.a), 0.0);
        }
    }

    #[test]
    fn density_matches_closed_form() {
        let t = tr(16);
        for s in [1.6, 2.0, 2.4] {
            let v = toledo_density(s, 1e-4, &t).unwrap();
            let c = toledo_density_closed_form(s).unwrap();
            assert!((v - c).abs() < 1e-6, "s = {s}: {v} vs {c}");
            assert!((c + 4.0).abs() < 1e-12);
        }
    }
}

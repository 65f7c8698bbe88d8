//! The real Bergmann cocycle on isotropic lines of a (2, q) form.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{GroupElement, IndefiniteForm, IsotropicSubspace, Tolerances};

/// An isotropic line of a (2, q) form. The representative is stored as
/// `u + v` with `u` in the positive plane and `|u| = |v| = 1`, so `|x| = sqrt 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLine")]
pub struct IsotropicLine {
    form: IndefiniteForm,
    rep: DVector<f64>,
}

#[derive(Deserialize)]
struct RawLine {
    form: IndefiniteForm,
    rep: DVector<f64>,
}

impl TryFrom<RawLine> for IsotropicLine {
    type Error = Error;
    fn try_from(raw: RawLine) -> Result<Self> {
        IsotropicLine::new(raw.form, raw.rep, &Tolerances::default())
    }
}

impl IsotropicLine {
    pub fn new(form: IndefiniteForm, x: DVector<f64>, tol: &Tolerances) -> Result<Self> {
        if form.p() != 2 {
            return Err(Error::UnsupportedSignature(format!("p = {}, need p = 2", form.p())));
        }
        if x.len() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), found: x.len() });
        }
        let nu = x.rows(0, 2).norm();
        let nv = x.rows(2, form.q()).norm();
        let scale = nu * nu + nv * nv;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::DegenerateInput("zero or non-finite vector".into()));
        }
        let q = nu * nu - nv * nv;
        if q.abs() > tol.iso_tol * scale {
            return Err(Error::NotIsotropic(q.abs() / scale));
        }
        let mut rep = x;
        rep.rows_mut(0, 2).scale_mut(1.0 / nu);
        let q_len = form.q();
        rep.rows_mut(2, q_len).scale_mut(1.0 / nv);
        Ok(IsotropicLine { form, rep })
    }

    /// The line through `(cos t, sin t)` in the positive plane and `v`.
    pub fn from_angle(form: IndefiniteForm, theta: f64, v: &DVector<f64>) -> Result<Self> {
        if v.len() != form.q() {
            return Err(Error::DimensionMismatch { expected: form.q(), found: v.len() });
        }
        let mut x = DVector::zeros(form.dim());
        x[0] = theta.cos();
        x[1] = theta.sin();
        x.rows_mut(2, form.q()).copy_from(&(v / v.norm()));
        IsotropicLine::new(form, x, &Tolerances::default())
    }

    /// `(cos t, sin t, 1, 0, ..., 0)`: the boundary circle of the totally
    /// geodesic disc spanned by the first three coordinates.
    pub fn circle(form: IndefiniteForm, theta: f64) -> Result<Self> {
        let mut v = DVector::zeros(form.q());
        v[0] = 1.0;
        IsotropicLine::from_angle(form, theta, &v)
    }

    pub fn form(&self) -> &IndefiniteForm {
        &self.form
    }

    pub fn rep(&self) -> &DVector<f64> {
        &self.rep
    }

    pub fn u(&self) -> (f64, f64) {
        (self.rep[0], self.rep[1])
    }

    pub fn theta(&self) -> f64 {
        self.rep[1].atan2(self.rep[0])
    }

    pub fn negative_part(&self) -> DVector<f64> {
        self.rep.rows(2, self.form.q()).into_owned()
    }

    pub fn as_subspace(&self) -> IsotropicSubspace<f64> {
        IsotropicSubspace::new(
            self.form,
            DMatrix::from_column_slice(self.rep.len(), 1, self.rep.as_slice()),
            &Tolerances::default(),
        )
        .expect("normalized representative is isotropic")
    }

    pub fn transform(&self, g: &GroupElement<f64>) -> Result<Self> {
        let tol = Tolerances { iso_tol: 1e-7, ..Tolerances::default() };
        IsotropicLine::new(self.form, g.apply(&self.rep), &tol)
    }

    /// Angle between the two lines (Euclidean, in `[0, pi/2]`).
    pub fn distance(&self, other: &IsotropicLine) -> f64 {
        let c = (self.rep.dot(&other.rep).abs() / 2.0).min(1.0);
        let s = (&self.rep * (self.rep.dot(&other.rep).signum()) - &other.rep).norm() / 2.0;
        if c > std::f64::consts::FRAC_1_SQRT_2 { 2.0 * (s.min(1.0)).asin() } else { c.acos() }
            .min(std::f64::consts::FRAC_PI_2)
    }

    fn q_normalized(&self, other: &IsotropicLine) -> f64 {
        self.form.eval(&self.rep, &other.rep) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaTolerances {
    /// Normalized `|Q(x, y)|` at or below which two lines count as
    /// non-opposite.
    pub opp_tol: f64,
    /// Normalized `|Q|` below which the sign of the Gram determinant is not
    /// trusted.
    pub sig_tol: f64,
    /// Threshold for the orientation determinant of the unit projections.
    pub orient_tol: f64,
}

impl Default for BetaTolerances {
    fn default() -> Self {
        BetaTolerances { opp_tol: 1e-12, sig_tol: 1e-9, orient_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaValue {
    pub value: i8,
    /// Smallest of the normalized `|Q|` values and, when the span has
    /// signature (2, 1), the orientation determinant.
    pub margin: f64,
}

fn det2(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

pub fn bergmann_beta_margin(
    x: &IsotropicLine,
    y: &IsotropicLine,
    z: &IsotropicLine,
    tol: &BetaTolerances,
) -> Result<BetaValue> {
    let qxy = x.q_normalized(y);
    let qxz = x.q_normalized(z);
    let qyz = y.q_normalized(z);
    for (q, i, j) in [(qxy, 0, 1), (qxz, 0, 2), (qyz, 1, 2)] {
        if q.abs() <= tol.opp_tol {
            return Err(Error::NotPairwiseOpposite(i, j));
        }
    }
    let qmargin = qxy.abs().min(qxz.abs()).min(qyz.abs());
    if qmargin < tol.sig_tol {
        return Err(Error::AmbiguousSignature { margin: qmargin });
    }
    // Rescale so that Q(x, y) < 0 and Q(x, z) < 0. The Gram determinant is
    // then 2 Q(x,y) Q(x,z) Q(y,z), so the sign of Q(y, z) decides between
    // signature (2, 1) and (1, 2).
    let sy = -qxy.signum();
    let sz = -qxz.signum();
    if sy * sz * qyz > 0.0 {
        return Ok(BetaValue { value: 0, margin: qmargin });
    }
    let a = x.u();
    let b = (sy * y.u().0, sy * y.u().1);
    let c = (sz * z.u().0, sz * z.u().1);
    let area = det2((b.0 - a.0, b.1 - a.1), (c.0 - a.0, c.1 - a.1));
    if area.abs() < tol.orient_tol {
        return Err(Error::AmbiguousOrientation { margin: area.abs() });
    }
    Ok(BetaValue { value: if area > 0.0 { 2 } else { -2 }, margin: qmargin.min(area.abs()) })
}

pub fn bergmann_beta(x: &IsotropicLine, y: &IsotropicLine, z: &IsotropicLine) -> Result<i8> {
    bergmann_beta_margin(x, y, z, &BetaTolerances::default()).map(|b| b.value)
}

/// Maximality of an ordered tuple together with the smallest margin over
/// its subtriples. Pairwise opposition is checked first so that a repeated
/// line is always reported as an error.
pub fn tuple_margin(lines: &[IsotropicLine], tol: &BetaTolerances) -> Result<(bool, f64)> {
    if lines.len() < 3 {
        return Err(Error::DegenerateInput(format!("tuple of length {}", lines.len())));
    }
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if lines[i].q_normalized(&lines[j]).abs() <= tol.opp_tol {
                return Err(Error::NotPairwiseOpposite(i, j));
            }
        }
    }
    let mut margin = f64::INFINITY;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            for k in j + 1..lines.len() {
                let b = bergmann_beta_margin(&lines[i], &lines[j], &lines[k], tol)
                    .map_err(|e| Error::Subtriple(i, j, k, Box::new(e)))?;
                if b.value != 2 {
                    return Ok((false, b.margin));
                }
                margin = margin.min(b.margin);
            }
        }
    }
    Ok((true, margin))
}

pub fn is_maximal_tuple(lines: &[IsotropicLine]) -> Result<bool> {
    tuple_margin(lines, &BetaTolerances::default()).map(|(m, _)| m)
}

/// `z` lies in `I_{x,y}` iff `(x, z, y)` is maximal.
pub fn interval_contains(x: &IsotropicLine, y: &IsotropicLine, z: &IsotropicLine) -> Result<bool> {
    bergmann_beta(x, z, y).map(|b| b == 2)
}

/// A line `(cos t, sin t, v)` with `t` uniform and `v` uniform on the unit
/// sphere of the negative block.
pub fn random_line(form: IndefiniteForm, rng: &mut impl Rng) -> Result<IsotropicLine> {
    let q = form.q();
    loop {
        let v = DVector::from_fn(q, |_, _| rng.sample::<f64, _>(StandardNormal));
        if v.norm() > 1e-6 {
            return IsotropicLine::from_angle(form, rng.random::<f64>() * std::f64::consts::TAU, &v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub q: usize,
    pub trials: usize,
    /// Quadruples where some value could not be decided within tolerance.
    pub inconclusive: usize,
    pub value_violations: usize,
    pub alternation_violations: usize,
    pub cocycle_violations: usize,
}

impl CocycleReport {
    pub fn violations(&self) -> usize {
        self.value_violations + self.alternation_violations + self.cocycle_violations
    }
}

/// Quadruple `i` of a seeded run; the stream depends only on `(seed, i)`.
pub fn seeded_quadruple(form: IndefiniteForm, seed: u64, i: usize) -> Result<[IsotropicLine; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    Ok([
        random_line(form, &mut rng)?,
        random_line(form, &mut rng)?,
        random_line(form, &mut rng)?,
        random_line(form, &mut rng)?,
    ])
}

enum Check {
    Ok,
    Inconclusive,
    Violations(usize, usize, usize),
}

#[allow(clippy::needless_range_loop)]
fn check_quadruple(l: &[IsotropicLine; 4]) -> Check {
    let b = |i: usize, j: usize, k: usize| bergmann_beta(&l[i], &l[j], &l[k]);
    let mut vals = [[[0i8; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                match b(i, j, k) {
                    Ok(v) => vals[i][j][k] = v,
                    Err(_) => return Check::Inconclusive,
                }
            }
        }
    }
    let mut value = 0;
    let mut alt = 0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                if i == j || j == k || i == k {
                    continue;
                }
                let v = vals[i][j][k];
                if ![-2, 0, 2].contains(&v) {
                    value += 1;
                }
                if vals[j][i][k] != -v || vals[i][k][j] != -v || vals[j][k][i] != v {
                    alt += 1;
                }
            }
        }
    }
    let d = vals[1][2][3] - vals[0][2][3] + vals[0][1][3] - vals[0][1][2];
    let cocycle = usize::from(d != 0);
    if value + alt + cocycle == 0 {
        Check::Ok
    } else {
        Check::Violations(value, alt, cocycle)
    }
}

/// Values, alternation and the cocycle identity on `trials` seeded
/// quadruples of random lines in signature (2, q).
pub fn cocycle_test(q: usize, trials: usize, seed: u64) -> Result<CocycleReport> {
    let form = IndefiniteForm::real(2, q)?;
    let results: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|i| seeded_quadruple(form, seed, i).map(|l| check_quadruple(&l)))
        .collect::<Result<_>>()?;
    let mut r = CocycleReport {
        q,
        trials,
        inconclusive: 0,
        value_violations: 0,
        alternation_violations: 0,
        cocycle_violations: 0,
    };
    for c in results {
        match c {
            Check::Ok => {}
            Check::Inconclusive => r.inconclusive += 1,
            Check::Violations(a, b, c) => {
                r.value_violations += a;
                r.alternation_violations += b;
                r.cocycle_violations += c;
            }
        }
    }
    Ok(r)
}

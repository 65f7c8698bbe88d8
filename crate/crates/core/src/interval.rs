//! Intervals `I_{x,y}` on the isotropic boundary, their convex chart and
//! sampled closure-containment checks.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergmann::{bergmann_beta_margin, tuple_margin, BetaTolerances, IsotropicLine};
use crate::error::{Error, Result};
use crate::form::{GroupElement, IndefiniteForm, Tolerances};

/// Chart of `I_{x,y}` in a Q-orthonormal frame `(f0, f1 | f2, f3, ...)` with
/// `x = f0 + f2` and `y = -f0 + f2` up to scale. A line with frame
/// coordinates `u = (u1, u2)`, `v = (v3, v')`, `|u| = |v| = 1`, lies in the
/// interval iff `v3 > |u1|` and `u2 > 0`; its chart point is `(u1, v')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalChart {
    x: IsotropicLine,
    y: IsotropicLine,
    frame: DMatrix<f64>,
}

impl IntervalChart {
    pub fn new(x: &IsotropicLine, y: &IsotropicLine) -> Result<Self> {
        let form = *x.form();
        let qxy = form.eval(x.rep(), y.rep());
        if qxy.abs() / 2.0 <= BetaTolerances::default().opp_tol {
            return Err(Error::NotPairwiseOpposite(0, 1));
        }
        let xh = x.rep().clone();
        let yh = y.rep() * (-2.0 / qxy);
        let f0 = (&xh - &yh) * 0.5;
        let f2 = (&xh + &yh) * 0.5;

        // Q-orthogonal complement of the hyperbolic plane <f0, f2>: project
        // every standard basis vector and diagonalize the Gram matrix of the
        // projections. The two null directions are the kernel of the
        // projection; the rest is a Q-orthonormal basis of the complement.
        let d = form.dim();
        let mut proj = DMatrix::identity(d, d);
        for j in 0..d {
            let e = proj.column(j).into_owned();
            let a = form.eval(&f0, &e);
            let b = form.eval(&f2, &e);
            let col = &e - &f0 * a + &f2 * b;
            proj.set_column(j, &col);
        }
        let g = form.gram(&proj);
        let g = (&g + g.transpose()) * 0.5;
        let eig = g.symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].abs().partial_cmp(&eig.eigenvalues[i].abs()).unwrap());
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for &i in order.iter().take(d - 2) {
            let lam = eig.eigenvalues[i];
            let w = &proj * eig.eigenvectors.column(i) / lam.abs().sqrt();
            if lam > 0.0 {
                pos.push(w);
            } else {
                neg.push(w);
            }
        }
        if pos.len() != 1 || neg.len() != form.q() - 1 {
            return Err(Error::DegenerateInput("complement has unexpected signature".into()));
        }
        // Deterministic orientation of the negative frame vectors.
        for w in neg.iter_mut() {
            let k = w.iamax();
            if w[k] < 0.0 {
                w.neg_mut();
            }
        }
        let mut cols = vec![f0, pos.pop().unwrap(), f2];
        cols.extend(neg);
        let mut frame = DMatrix::from_columns(&cols);
        let mut chart = IntervalChart { x: x.clone(), y: y.clone(), frame: frame.clone() };
        // f1 is fixed up to sign by requiring the chart origin in I_{x,y}.
        let mid = chart.frame_line(0.0, 1.0, &DVector::from_element(1, 1.0).resize_vertically(form.q(), 0.0))?;
        let b = bergmann_beta_margin(x, &mid, y, &BetaTolerances::default())?;
        if b.value != 2 {
            frame.column_mut(1).neg_mut();
            chart.frame = frame;
        }
        Ok(chart)
    }

    pub fn endpoints(&self) -> (&IsotropicLine, &IsotropicLine) {
        (&self.x, &self.y)
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn form(&self) -> &IndefiniteForm {
        self.x.form()
    }

    /// Chart dimension; equals q.
    pub fn dim(&self) -> usize {
        self.form().q()
    }

    fn frame_line(&self, u1: f64, u2: f64, v: &DVector<f64>) -> Result<IsotropicLine> {
        let q = self.form().q();
        let mut c = DVector::zeros(q + 2);
        c[0] = u1;
        c[1] = u2;
        c.rows_mut(2, q).copy_from(v);
        IsotropicLine::new(*self.form(), &self.frame * c, &Tolerances { iso_tol: 1e-7, ..Tolerances::default() })
    }

    /// Frame coordinates of a line, normalized with `|u| = |v| = 1` and
    /// `v3 >= 0`.
    pub fn frame_coordinates(&self, z: &IsotropicLine) -> DVector<f64> {
        let form = self.form();
        let s = DMatrix::from_diagonal(&DVector::from_fn(form.dim(), |i, _| form.sign(i)));
        let mut c = &s * self.frame.transpose() * &s * z.rep();
        let nu = c.rows(0, 2).norm();
        let nv = c.rows(2, form.q()).norm();
        c.rows_mut(0, 2).scale_mut(1.0 / nu);
        c.rows_mut(2, form.q()).scale_mut(1.0 / nv);
        if c[2] < 0.0 {
            c.neg_mut();
        }
        c
    }

    pub fn chart(&self, z: &IsotropicLine) -> Result<DVector<f64>> {
        let inside = bergmann_beta_margin(&self.x, z, &self.y, &BetaTolerances::default())
            .map(|b| b.value == 2)
            .unwrap_or(false);
        if !inside {
            return Err(Error::NotInInterval);
        }
        let c = self.frame_coordinates(z);
        let q = self.form().q();
        let mut out = DVector::zeros(q);
        out[0] = c[0];
        out.rows_mut(1, q - 1).copy_from(&c.rows(3, q - 1));
        Ok(out)
    }

    pub fn unchart(&self, c: &DVector<f64>) -> Result<IsotropicLine> {
        let q = self.form().q();
        if c.len() != q {
            return Err(Error::DimensionMismatch { expected: q, found: c.len() });
        }
        let r2 = c.norm_squared();
        if !(r2 < 1.0) {
            return Err(Error::OutsideChart(r2));
        }
        let u1 = c[0];
        let vp = c.rows(1, q - 1);
        let u2 = (1.0 - u1 * u1).sqrt();
        let v3 = (1.0 - vp.norm_squared()).sqrt();
        let mut v = DVector::zeros(q);
        v[0] = v3;
        v.rows_mut(1, q - 1).copy_from(&vp);
        self.frame_line(u1, u2, &v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridKind {
    Tensor { per_axis: usize },
    Halton,
}

/// Deterministic sample points in the open unit ball of the chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub kind: GridKind,
    pub points: Vec<DVector<f64>>,
}

pub const BOUNDARY_RADIUS: f64 = 1.0 - 1e-6;
const RING_POINTS: usize = 64;
const TENSOR_CAP: usize = 1 << 16;

fn cube_to_ball(x: &mut DVector<f64>) {
    let n2 = x.norm();
    if n2 > 0.0 {
        let ninf = x.amax();
        *x *= ninf / n2;
    }
}

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 2u64;
    while out.len() < n {
        if out.iter().all(|p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Interior grid of about `samples` points plus boundary rings and axis
/// points at radius `1 - 1e-6`. A tensor grid of `ceil(samples^(1/dim))`
/// cell centres per axis is used unless it would exceed
/// `max(samples, 2^16)` points, in which case a Halton set of exactly
/// `samples` points replaces it.
pub fn chart_grid(dim: usize, samples: usize) -> SampleGrid {
    let mut points = Vec::new();
    if samples == 0 || dim == 0 {
        return SampleGrid { kind: GridKind::Tensor { per_axis: 0 }, points };
    }
    let cap = samples.max(TENSOR_CAP);
    let mut r = 1usize;
    let tensor_size = loop {
        let size = (r as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if size >= samples as u128 {
            break size;
        }
        r += 1;
    };
    let kind = if tensor_size <= cap as u128 {
        let total = tensor_size as usize;
        for idx in 0..total {
            let mut k = idx;
            let mut x = DVector::zeros(dim);
            for a in 0..dim {
                x[a] = -1.0 + (2 * (k % r) + 1) as f64 / r as f64;
                k /= r;
            }
            cube_to_ball(&mut x);
            points.push(x);
        }
        GridKind::Tensor { per_axis: r }
    } else {
        let bases = primes(dim);
        for i in 1..=samples as u64 {
            let mut x = DVector::from_fn(dim, |a, _| 2.0 * radical_inverse(i, bases[a]) - 1.0);
            cube_to_ball(&mut x);
            points.push(x);
        }
        GridKind::Halton
    };
    for k in 0..RING_POINTS {
        let mut x = DVector::zeros(dim);
        let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / RING_POINTS as f64;
        if dim == 1 {
            x[0] = BOUNDARY_RADIUS * phi.cos().signum();
        } else {
            let i = k % dim;
            let j = (k + 1) % dim;
            x[i] = BOUNDARY_RADIUS * phi.cos();
            x[j] = BOUNDARY_RADIUS * phi.sin();
        }
        points.push(x);
    }
    for a in 0..dim {
        for s in [1.0, -1.0] {
            let mut x = DVector::zeros(dim);
            x[a] = s * BOUNDARY_RADIUS;
            points.push(x);
        }
    }
    SampleGrid { kind, points }
}

/// Lines sampling the closure of an interval: both endpoints first, then the
/// uncharted grid.
pub fn closure_samples(chart: &IntervalChart, samples: usize) -> Result<(GridKind, Vec<IsotropicLine>)> {
    let grid = chart_grid(chart.dim(), samples);
    let (x, y) = chart.endpoints();
    let mut lines = vec![x.clone(), y.clone()];
    let interior: Result<Vec<IsotropicLine>> = grid.points.par_iter().map(|c| chart.unchart(c)).collect();
    lines.extend(interior?);
    Ok((grid.kind, lines))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub pass: bool,
    /// Minimal margin over all samples; zero or negative when some sample
    /// failed.
    pub margin: f64,
    pub samples_checked: usize,
    pub grid: GridKind,
    /// The smallest per-sample margins, `(sample index, margin)`, sorted.
    pub worst: Vec<(usize, f64)>,
    pub first_failure: Option<usize>,
}

const WORST_KEEP: usize = 8;

/// Checks `g * closure(I_source) ⊂ I_target` on the sampled closure. A
/// sample whose interval membership cannot be decided counts as a failure
/// with margin zero.
pub fn check_containment(
    source: &IntervalChart,
    g: Option<&GroupElement<f64>>,
    target: (&IsotropicLine, &IsotropicLine),
    samples: usize,
    tol: &BetaTolerances,
) -> Result<ContainmentReport> {
    let (kind, lines) = closure_samples(source, samples)?;
    let (a, d) = target;
    let margins: Vec<f64> = lines
        .par_iter()
        .map(|z| {
            let w = match g {
                Some(g) => match z.transform(g) {
                    Ok(w) => w,
                    Err(_) => return 0.0,
                },
                None => z.clone(),
            };
            match bergmann_beta_margin(a, &w, d, tol) {
                Ok(b) if b.value == 2 => b.margin,
                Ok(b) => -b.margin,
                Err(_) => 0.0,
            }
        })
        .collect();
    let mut indexed: Vec<(usize, f64)> = margins.iter().copied().enumerate().collect();
    indexed.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap().then(p.0.cmp(&q.0)));
    let first_failure = margins.iter().position(|&m| m <= 0.0);
    let margin = indexed.first().map(|p| p.1).unwrap_or(f64::INFINITY);
    Ok(ContainmentReport {
        pass: first_failure.is_none(),
        margin,
        samples_checked: lines.len(),
        grid: kind,
        worst: indexed.into_iter().take(WORST_KEEP).collect(),
        first_failure,
    })
}

pub type NestingReport = ContainmentReport;

/// For a maximal `(a, b, c, d)`, checks that the sampled closure of
/// `I_{b,c}` lies in `I_{a,d}`.
pub fn verify_nesting(
    a: &IsotropicLine,
    b: &IsotropicLine,
    c: &IsotropicLine,
    d: &IsotropicLine,
    samples: usize,
) -> Result<NestingReport> {
    let tol = BetaTolerances::default();
    let (maximal, _) = tuple_margin(&[a.clone(), b.clone(), c.clone(), d.clone()], &tol)?;
    if !maximal {
        return Err(Error::NotMaximal);
    }
    let chart = IntervalChart::new(b, c)?;
    check_containment(&chart, None, (a, d), samples, &tol)
}

//! A dense Shilov-hyperbolic pair at finite truncation and the ping-pong
//! certificate for the pair of powers `(A, B) = (h^n, g^n)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bergmann::{tuple_margin, BetaTolerances, IsotropicLine};
use crate::error::{Error, Result};
use crate::form::{boost, rotation, GroupElement, IndefiniteForm};
use crate::interval::{check_containment, ContainmentReport, IntervalChart};
use crate::shilov::{find_contraction_power, shilov_analyze, ShilovData};

/// Boost parameter of `g` in the `(e0, e2)` plane; `(e1, e3)` gets half.
pub const G_BOOST: f64 = 2.0;
/// Boost parameter of `h` in the `(e1, e2)` plane.
pub const H_BOOST: f64 = 2.0;
const SHILOV_TOL: f64 = 1e-9;
pub const N_MAX: usize = 40;

/// `pi * frac(sqrt(m) * (i + 1))`.
pub fn pseudo_irrational_angle(m: f64, i: usize) -> f64 {
    let x = m.sqrt() * (i + 1) as f64;
    PI * (x - x.floor())
}

/// The part of `h` acting on `V' = <e0..e3, w1, w2>` besides the strong
/// boost: a product of small boosts and rotations in `<e0, e3, w1, w2>`,
/// recorded so that the witness documents the choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H0Choice {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    /// `(kind, i, j, parameter)` in the local ordered basis `(e0, e3, w1, w2)`.
    pub factors: Vec<(String, usize, usize, f64)>,
    pub complement_angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensePair {
    pub form: IndefiniteForm,
    pub g: GroupElement<f64>,
    pub h: GroupElement<f64>,
    pub x: IsotropicLine,
    pub y: IsotropicLine,
    pub z: IsotropicLine,
    pub t: IsotropicLine,
    pub h0: H0Choice,
}

fn embed(form: &IndefiniteForm, basis: &DMatrix<f64>, local: &DMatrix<f64>) -> DMatrix<f64> {
    let d = form.dim();
    let k = basis.ncols();
    DMatrix::identity(d, d) + basis * (local - DMatrix::identity(k, k)) * basis.transpose()
}

fn random_unit_negative(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

/// Orthonormal `w1, w2` in the negative coordinates `4..` with all components
/// bounded away from zero, plus an orthonormal basis of their complement
/// there.
fn negative_frame(q: usize, seed: u64) -> (DVector<f64>, DVector<f64>, DMatrix<f64>) {
    let n = q - 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = 0.05 / (n as f64).sqrt();
    loop {
        let mut cols: Vec<DVector<f64>> = (0..n).map(|_| random_unit_negative(&mut rng, n)).collect();
        // Modified Gram-Schmidt, twice.
        for _ in 0..2 {
            for i in 0..n {
                for j in 0..i {
                    let c = cols[j].dot(&cols[i]);
                    let cj = cols[j].clone();
                    cols[i] -= cj * c;
                }
                let nn = cols[i].norm();
                cols[i] /= nn;
            }
        }
        let ok = cols[0].iter().chain(cols[1].iter()).all(|x| x.abs() > floor);
        if ok {
            let rest = DMatrix::from_columns(&cols[2..]);
            return (cols[0].clone(), cols[1].clone(), rest);
        }
    }
}

fn lift_negative(q: usize, w: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(q + 2);
    out.rows_mut(4, q - 2).copy_from(w);
    out
}

pub fn build_dense_pair(q: usize, angle_seed: u64) -> Result<DensePair> {
    if q < 6 {
        return Err(Error::ConstructionFailed {
            stage: format!("dimension count: q = {q}, need q >= 6 for V, w1, w2 and rotation planes"),
        });
    }
    let form = IndefiniteForm::real(2, q)?;
    let d = q + 2;

    // g: Shilov-hyperbolic on V = <e0..e3>, distinct rotations on the
    // coordinate planes (4,5), (6,7), ... of the negative complement.
    let mut g = boost(&form, 0, 2, G_BOOST)?.compose(&boost(&form, 1, 3, G_BOOST / 2.0)?);
    for (i, a) in (4..d - 1).step_by(2).enumerate() {
        g = g.compose(&rotation(&form, a, a + 1, pseudo_irrational_angle(2.0, i))?);
    }

    let (w1, w2, rest) = negative_frame(q, angle_seed);
    let factors: Vec<(String, usize, usize, f64)> = vec![
        ("boost".into(), 0, 1, 0.35),
        ("rotation".into(), 1, 2, 0.9),
        ("boost".into(), 0, 2, 0.25),
        ("rotation".into(), 2, 3, 1.3),
        ("boost".into(), 0, 3, 0.15),
    ];
    let local_form = IndefiniteForm::real(1, 3)?;
    let mut local = GroupElement::<f64>::identity(&local_form);
    for (kind, i, j, p) in &factors {
        let f = if kind == "boost" { boost(&local_form, *i, *j, *p)? } else { rotation(&local_form, *i, *j, *p)? };
        local = local.compose(&f);
    }
    let mut e0 = DVector::zeros(d);
    e0[0] = 1.0;
    let mut e3 = DVector::zeros(d);
    e3[3] = 1.0;
    let basis = DMatrix::from_columns(&[e0, e3, lift_negative(q, &w1), lift_negative(q, &w2)]);
    let mut hm = boost(&form, 1, 2, -H_BOOST)?.matrix() * embed(&form, &basis, local.matrix());

    let mut complement_angles = Vec::new();
    let mut i = 0;
    while i + 1 < rest.ncols() {
        let theta = pseudo_irrational_angle(3.0, i / 2);
        complement_angles.push(theta);
        let plane = DMatrix::from_columns(&[
            lift_negative(q, &rest.column(i).into_owned()),
            lift_negative(q, &rest.column(i + 1).into_owned()),
        ]);
        let (s, c) = theta.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        hm *= embed(&form, &plane, &rot);
        i += 2;
    }
    let h = crate::form::check_group_membership(&form, hm, &Default::default())?;

    let c = |a: f64| IsotropicLine::circle(form, a);
    let pair = DensePair {
        form,
        g,
        h,
        x: c(-3.0 * PI / 4.0)?,
        y: c(-PI / 4.0)?,
        z: c(PI / 4.0)?,
        t: c(3.0 * PI / 4.0)?,
        h0: H0Choice { w1: w1.iter().copied().collect(), w2: w2.iter().copied().collect(), factors, complement_angles },
    };
    let (sg, sh) = (shilov_analyze(&pair.g, SHILOV_TOL)?, shilov_analyze(&pair.h, SHILOV_TOL)?);
    let eight = eight_tuple(&pair.x, &pair.y, &pair.z, &pair.t, &sg, &sh);
    match tuple_margin(&eight, &BetaTolerances::default()) {
        Ok((true, _)) => Ok(pair),
        Ok((false, _)) => Err(Error::ConstructionFailed { stage: "eight-tuple is not maximal".into() }),
        Err(e) => Err(Error::ConstructionFailed { stage: format!("eight-tuple: {e}") }),
    }
}

/// `(x, h+, y, g+, z, h-, t, g-)`.
pub fn eight_tuple(
    x: &IsotropicLine,
    y: &IsotropicLine,
    z: &IsotropicLine,
    t: &IsotropicLine,
    g: &ShilovData,
    h: &ShilovData,
) -> Vec<IsotropicLine> {
    vec![x.clone(), h.plus.clone(), y.clone(), g.plus.clone(), z.clone(), h.minus.clone(), t.clone(), g.minus.clone()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedContainment {
    pub name: String,
    pub report: ContainmentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedReport {
    pub pass: bool,
    pub eight_tuple_maximal: bool,
    pub eight_tuple_margin: f64,
    pub containments: Vec<NamedContainment>,
    pub min_margin: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PingPongWitness {
    pub form: IndefiniteForm,
    pub x: IsotropicLine,
    pub y: IsotropicLine,
    pub z: IsotropicLine,
    pub t: IsotropicLine,
    #[serde(rename = "A")]
    pub a: GroupElement<f64>,
    #[serde(rename = "B")]
    pub b: GroupElement<f64>,
    /// Power with `A = h^n`, `B = g^n`, when built from a dense pair.
    pub power: Option<usize>,
    pub h0: Option<H0Choice>,
    pub certificate: Option<CertifiedReport>,
}

/// `(name, generator, source endpoints, target endpoints)`.
type Containment<'a> = (&'static str, GroupElement<f64>, [&'a IsotropicLine; 2], [&'a IsotropicLine; 2]);

/// The four containments of the ping-pong system.
fn containments(w: &PingPongWitness) -> [Containment<'_>; 4] {
    [
        ("A*cl(I_tz) in I_xy", w.a.clone(), [&w.t, &w.z], [&w.x, &w.y]),
        ("B*cl(I_xt) in I_yz", w.b.clone(), [&w.x, &w.t], [&w.y, &w.z]),
        ("A^-1*cl(I_yx) in I_zt", w.a.inverse(), [&w.y, &w.x], [&w.z, &w.t]),
        ("B^-1*cl(I_zy) in I_tx", w.b.inverse(), [&w.z, &w.y], [&w.t, &w.x]),
    ]
}

/// Runs the four sampled containment checks. A failed containment is
/// returned as `ContainmentFailed`; the other failures are reported through
/// the usual errors.
pub fn verify_pingpong(w: &PingPongWitness, samples: usize) -> Result<CertifiedReport> {
    let tol = BetaTolerances::default();
    let (maximal, _) = tuple_margin(&[w.x.clone(), w.y.clone(), w.z.clone(), w.t.clone()], &tol)?;
    if !maximal {
        return Err(Error::NotMaximal);
    }
    let (eight_ok, eight_margin) = match (shilov_analyze(&w.a, SHILOV_TOL), shilov_analyze(&w.b, SHILOV_TOL)) {
        (Ok(sa), Ok(sb)) => {
            let eight = eight_tuple(&w.x, &w.y, &w.z, &w.t, &sb, &sa);
            tuple_margin(&eight, &tol).unwrap_or((false, 0.0))
        }
        _ => (false, 0.0),
    };
    let mut out = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (name, gen, src, dst) in containments(w) {
        let chart = IntervalChart::new(src[0], src[1])?;
        let report = check_containment(&chart, Some(&gen), (dst[0], dst[1]), samples, &tol)?;
        if let Some(sample) = report.first_failure {
            return Err(Error::ContainmentFailed { which: name.into(), sample, margin: report.margin });
        }
        min_margin = min_margin.min(report.margin);
        out.push(NamedContainment { name: name.into(), report });
    }
    Ok(CertifiedReport {
        pass: eight_ok && min_margin > 0.0,
        eight_tuple_maximal: eight_ok,
        eight_tuple_margin: eight_margin,
        containments: out,
        min_margin,
        samples,
    })
}

/// Smallest common power making the four containments hold, starting from
/// the maximum of the individual contraction powers of `g, g^-1, h, h^-1`.
pub fn common_power(pair: &DensePair) -> Result<usize> {
    let (x, y, z, t) = (&pair.x, &pair.y, &pair.z, &pair.t);
    let gi = pair.g.inverse();
    let hi = pair.h.inverse();
    let sg = shilov_analyze(&pair.g, SHILOV_TOL)?;
    let sgi = shilov_analyze(&gi, SHILOV_TOL)?;
    let sh = shilov_analyze(&pair.h, SHILOV_TOL)?;
    let shi = shilov_analyze(&hi, SHILOV_TOL)?;
    let n = [
        find_contraction_power(&pair.g, &sg, x, y, z, t, N_MAX, false)?,
        find_contraction_power(&gi, &sgi, z, t, x, y, N_MAX, false)?,
        find_contraction_power(&pair.h, &sh, t, x, y, z, N_MAX, false)?,
        find_contraction_power(&hi, &shi, y, z, t, x, N_MAX, false)?,
    ];
    Ok(*n.iter().max().unwrap())
}

/// Builds the dense pair, powers it and certifies the result on `samples`
/// points per interval. The power is increased past the individual
/// contraction powers until the sampled certificate passes.
pub fn build_witness(q: usize, seed: u64, samples: usize) -> Result<PingPongWitness> {
    let pair = build_dense_pair(q, seed)?;
    let mut n = common_power(&pair)?;
    loop {
        let mut w = PingPongWitness {
            form: pair.form,
            x: pair.x.clone(),
            y: pair.y.clone(),
            z: pair.z.clone(),
            t: pair.t.clone(),
            a: pair.h.pow(n),
            b: pair.g.pow(n),
            power: Some(n),
            h0: Some(pair.h0.clone()),
            certificate: None,
        };
        match verify_pingpong(&w, samples) {
            Ok(report) => {
                w.certificate = Some(report);
                return Ok(w);
            }
            Err(Error::ContainmentFailed { .. }) if n < N_MAX => n += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Dimension of the unital matrix algebra generated by `gens`, by closing
/// the span of words under left multiplication with Gram-Schmidt on the
/// vectorized matrices.
pub fn generated_algebra_dimension(gens: &[&DMatrix<f64>], rel_tol: f64) -> usize {
    let d = gens[0].nrows();
    let full = d * d;
    let normalized: Vec<DMatrix<f64>> = gens.iter().map(|g| *g / g.norm()).collect();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut frontier: Vec<DMatrix<f64>> = Vec::new();
    let push = |m: DMatrix<f64>, basis: &mut Vec<DVector<f64>>| -> Option<DMatrix<f64>> {
        let mut v = DVector::from_column_slice(m.as_slice());
        let n0 = v.norm();
        if n0 == 0.0 {
            return None;
        }
        v /= n0;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let r = v.norm();
        if r <= rel_tol {
            return None;
        }
        v /= r;
        basis.push(v.clone());
        Some(DMatrix::from_column_slice(d, d, v.as_slice()))
    };
    if let Some(m) = push(DMatrix::identity(d, d), &mut basis) {
        frontier.push(m);
    }
    while !frontier.is_empty() && basis.len() < full {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &normalized {
                if basis.len() >= full {
                    break;
                }
                if let Some(new) = push(g * m, &mut basis) {
                    next.push(new);
                }
            }
        }
        frontier = next;
    }
    basis.len()
}

/// Random group element for tests and Monte Carlo checks: a product of
/// boosts in (positive, negative) coordinate planes and rotations within
/// the positive and negative blocks.
pub fn random_group_element(
    form: &IndefiniteForm,
    rng: &mut impl Rng,
    factors: usize,
    scale: f64,
) -> GroupElement<f64> {
    let (p, d) = (form.p(), form.dim());
    let mut g = GroupElement::<f64>::identity(form);
    for _ in 0..factors {
        let kind = rng.random_range(0..3);
        let f = match kind {
            0 => {
                let i = rng.random_range(0..p);
                let j = rng.random_range(p..d);
                boost(form, i, j, scale * (rng.random::<f64>() * 2.0 - 1.0))
            }
            1 if p >= 2 => rotation(form, 0, 1, rng.random::<f64>() * 2.0 * PI),
            _ => {
                let i = rng.random_range(p..d);
                let mut j = rng.random_range(p..d);
                if j == i {
                    j = if i + 1 < d { i + 1 } else { p };
                }
                if i == j {
                    continue;
                }
                rotation(form, i, j, rng.random::<f64>() * 2.0 * PI)
            }
        };
        g = g.compose(&f.expect("valid plane"));
    }
    g
}

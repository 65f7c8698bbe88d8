//! Chains in the Heisenberg model `C^{n-1} x R` of the boundary of complex
//! hyperbolic space, and spans of pairs of transverse maximal isotropic
//! subspaces.
//!
//! The group law is `(a, s)(b, t) = (a + b, s + t + 2 Im<a, b>)` with
//! `<a, b> = sum a_i conj(b_i)`. Finite chains are left translates of
//! horizontal circles `{(r e^{i phi} u, 0)}`: the chain over the circle with
//! centre `c`, radius `r` and complex direction `u` is
//! `{(c + w, v0 + 2 Im<c, w>) : w = r e^{i phi} u}`, so it is fixed by the
//! circle and the height `v0` of its centre.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{
    is_transverse_maximal, numerical_rank, signature_of_restriction, IsotropicSubspace, Signature, Tolerances,
};

pub type CVec = DVector<Complex64>;

/// Serializes a [`CVec`] as a list of `[re, im]` pairs.
pub mod cvec_serde {
    use super::CVec;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        let xs = Vec::<Complex64>::deserialize(d)?;
        Ok(CVec::from_vec(xs))
    }
}

pub fn herm(a: &CVec, b: &CVec) -> Complex64 {
    b.dotc(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeisenbergPoint {
    Finite {
        #[serde(with = "cvec_serde")]
        zeta: CVec,
        v: f64,
    },
    Infinity,
}

impl HeisenbergPoint {
    pub fn finite(zeta: CVec, v: f64) -> Self {
        HeisenbergPoint::Finite { zeta, v }
    }

    /// Projection to `C^{n-1}`; `None` at infinity.
    pub fn projection(&self) -> Option<&CVec> {
        match self {
            HeisenbergPoint::Finite { zeta, .. } => Some(zeta),
            HeisenbergPoint::Infinity => None,
        }
    }

    /// Left translation by `(a, s)`.
    pub fn translate(&self, a: &CVec, s: f64) -> Self {
        match self {
            HeisenbergPoint::Finite { zeta, v } => {
                HeisenbergPoint::Finite { zeta: a + zeta, v: s + v + 2.0 * herm(a, zeta).im }
            }
            HeisenbergPoint::Infinity => HeisenbergPoint::Infinity,
        }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (HeisenbergPoint::Infinity, HeisenbergPoint::Infinity) => true,
            (HeisenbergPoint::Finite { zeta: a, v: s }, HeisenbergPoint::Finite { zeta: b, v: t }) => {
                (a - b).norm() <= tol && (s - t).abs() <= tol
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Chain {
    /// `pi^-1(base)` together with the point at infinity.
    Vertical {
        #[serde(with = "cvec_serde")]
        base: CVec,
    },
    Circle {
        #[serde(with = "cvec_serde")]
        center: CVec,
        radius: f64,
        #[serde(with = "cvec_serde")]
        direction: CVec,
        height: f64,
    },
}

impl Chain {
    pub fn point_at(&self, phi: f64) -> HeisenbergPoint {
        match self {
            Chain::Vertical { base } => HeisenbergPoint::finite(base.clone(), phi),
            Chain::Circle { center, radius, direction, height } => {
                let w = direction * Complex64::from_polar(*radius, phi);
                let v = height + 2.0 * herm(center, &w).im;
                HeisenbergPoint::finite(center + w, v)
            }
        }
    }

    /// Distance-like residual of `p` from the chain: zero iff `p` lies on it.
    pub fn membership_residual(&self, p: &HeisenbergPoint) -> f64 {
        match (self, p) {
            (Chain::Vertical { .. }, HeisenbergPoint::Infinity) => 0.0,
            (Chain::Circle { .. }, HeisenbergPoint::Infinity) => f64::INFINITY,
            (Chain::Vertical { base }, HeisenbergPoint::Finite { zeta, .. }) => (zeta - base).norm(),
            (Chain::Circle { center, radius, direction, height }, HeisenbergPoint::Finite { zeta, v }) => {
                let w = zeta - center;
                let lambda = herm(&w, direction);
                let off_line = (&w - direction * lambda).norm();
                let off_circle = (lambda.norm() - radius).abs();
                let off_height = (v - height - 2.0 * herm(center, &w).im).abs();
                off_line.max(off_circle).max(off_height)
            }
        }
    }

    pub fn translate(&self, a: &CVec, s: f64) -> Chain {
        match self {
            Chain::Vertical { base } => Chain::Vertical { base: a + base },
            Chain::Circle { center, radius, direction, height } => Chain::Circle {
                center: a + center,
                radius: *radius,
                direction: direction.clone(),
                height: s + height + 2.0 * herm(a, center).im,
            },
        }
    }

    /// Equality as point sets, up to `tol`.
    pub fn approx_eq(&self, other: &Chain, tol: f64) -> bool {
        match (self, other) {
            (Chain::Vertical { base: a }, Chain::Vertical { base: b }) => (a - b).norm() <= tol,
            (
                Chain::Circle { center: c1, radius: r1, direction: u1, height: h1 },
                Chain::Circle { center: c2, radius: r2, direction: u2, height: h2 },
            ) => {
                (c1 - c2).norm() <= tol
                    && (r1 - r2).abs() <= tol
                    && (h1 - h2).abs() <= tol
                    && (1.0 - herm(u1, u2).norm()).abs() <= tol
            }
            _ => false,
        }
    }
}

const POINT_TOL: f64 = 1e-14;

/// The unique chain through two distinct points.
pub fn chain_through_two(x: &HeisenbergPoint, y: &HeisenbergPoint) -> Result<Chain> {
    if x.approx_eq(y, POINT_TOL) {
        return Err(Error::CoincidentPoints);
    }
    let (px, vx, py, vy) = match (x, y) {
        (HeisenbergPoint::Infinity, HeisenbergPoint::Finite { zeta, .. })
        | (HeisenbergPoint::Finite { zeta, .. }, HeisenbergPoint::Infinity) => {
            return Ok(Chain::Vertical { base: zeta.clone() });
        }
        (HeisenbergPoint::Finite { zeta: a, v: s }, HeisenbergPoint::Finite { zeta: b, v: t }) => (a, *s, b, *t),
        _ => unreachable!("coincident infinities handled above"),
    };
    if px.len() != py.len() {
        return Err(Error::DimensionMismatch { expected: px.len(), found: py.len() });
    }
    let diff = py - px;
    let delta = diff.norm();
    if delta <= POINT_TOL * px.norm().max(1.0) {
        return Ok(Chain::Vertical { base: px.clone() });
    }
    let u = diff / Complex64::new(delta, 0.0);
    let tau = (vy - vx) / (2.0 * delta) - herm(px, &u).im;
    let xi = Complex64::new(delta / 2.0, tau);
    let center = px + &u * xi;
    let height = vx - 2.0 * herm(&center, &(px - &center)).im;
    Ok(Chain::Circle { center, radius: xi.norm(), direction: u, height })
}

/// Complex affine hyperplane `{w : <w - base, normal> = 0}` of `C^{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexHyperplane {
    #[serde(with = "cvec_serde")]
    pub base: CVec,
    #[serde(with = "cvec_serde")]
    pub normal: CVec,
}

impl ComplexHyperplane {
    pub fn new(base: CVec, normal: CVec) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || base.len() != normal.len() {
            return Err(Error::DegenerateInput("hyperplane normal".into()));
        }
        Ok(ComplexHyperplane { base, normal: normal.unscale(n) })
    }

    pub fn residual(&self, w: &CVec) -> f64 {
        herm(&(w - &self.base), &self.normal).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma71Output {
    pub chain: Chain,
    /// Intersection with the vertical chain over `p_C`.
    pub c: HeisenbergPoint,
    /// Intersection with the hyperchain over `S_X`.
    pub x: HeisenbergPoint,
    #[serde(with = "cvec_serde")]
    pub z_y: CVec,
    /// Largest of the membership residuals of `y`, `c`, `x` on the chain,
    /// of `pi(c)` against `p_C` and of `pi(x)` against `S_X`.
    pub residual: f64,
}

pub const GENERIC_TOL: f64 = 1e-9;

/// The chain over the circle through `p_C`, `z_y` and `pi(y)` containing
/// `y`, where `z_y` is the intersection of `S_X` with the complex line
/// through `p_C` and `pi(y)`.
pub fn lemma71_construct(y: &HeisenbergPoint, p_c: &CVec, s_x: &ComplexHyperplane) -> Result<Lemma71Output> {
    let (py, vy) = match y {
        HeisenbergPoint::Finite { zeta, v } => (zeta, *v),
        HeisenbergPoint::Infinity => return Err(Error::NotInGenericSet("y is the point at infinity".into())),
    };
    if py.len() != p_c.len() || py.len() != s_x.base.len() {
        return Err(Error::DimensionMismatch { expected: p_c.len(), found: py.len() });
    }
    let alpha = herm(&(py - &s_x.base), &s_x.normal);
    let beta = herm(&(p_c - &s_x.base), &s_x.normal);
    let scale = (py - p_c).norm().max(1.0) * (p_c - &s_x.base).norm().max(1.0);
    if beta.norm() <= GENERIC_TOL * scale {
        return Err(Error::NotInGenericSet("p_C lies in S_X".into()));
    }
    if (alpha * beta.conj()).im.abs() <= GENERIC_TOL * scale {
        return Err(Error::NotInGenericSet("pi(y) lies in the real affine span of S_X and p_C".into()));
    }
    // Line coordinate xi: p_C + xi (pi(y) - p_C); p_C at 0, pi(y) at 1.
    let d = py - p_c;
    let w = -beta / (alpha - beta);
    let z_y = p_c + &d * w;
    // Circumcentre of 0, 1, w: Re xi0 = 1/2 and |xi0| = |xi0 - w|.
    let im0 = (w.norm_sqr() - w.re) / (2.0 * w.im);
    let xi0 = Complex64::new(0.5, im0);
    let dn = d.norm();
    let u = &d / Complex64::new(dn, 0.0);
    let center = p_c + &d * xi0;
    let radius = xi0.norm() * dn;
    let height = vy - 2.0 * herm(&center, &(py - &center)).im;
    let chain = Chain::Circle { center: center.clone(), radius, direction: u, height };

    let lift = |zeta: &CVec| HeisenbergPoint::finite(zeta.clone(), height + 2.0 * herm(&center, &(zeta - &center)).im);
    let c = lift(p_c);
    let x = lift(&z_y);
    let residual = [
        chain.membership_residual(y),
        chain.membership_residual(&c),
        chain.membership_residual(&x),
        Chain::Vertical { base: p_c.clone() }.membership_residual(&c),
        s_x.residual(x.projection().expect("finite")),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(Lemma71Output { chain, c, x, z_y, residual })
}

/// A random configuration `(y, p_C, S_X)` in the Heisenberg model
/// `C^{n-1} x R` of the boundary of complex hyperbolic `n`-space, entries
/// uniform in `[-1, 1]`, drawn from stream `i` of `seed`.
pub fn seeded_configuration(n: usize, seed: u64, i: u64) -> Result<(HeisenbergPoint, CVec, ComplexHyperplane)> {
    if n < 2 {
        return Err(Error::DegenerateInput(format!("n = {n}, need n >= 2")));
    }
    let m = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let cv = |rng: &mut ChaCha8Rng| {
        CVec::from_fn(m, |_, _| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
    };
    let (zeta, p_c, base) = (cv(&mut rng), cv(&mut rng), cv(&mut rng));
    let mut normal = cv(&mut rng);
    while normal.norm() < 1e-3 {
        normal = cv(&mut rng);
    }
    let v = rng.random::<f64>() * 2.0 - 1.0;
    let plane = ComplexHyperplane::new(base, normal).expect("nonzero normal");
    Ok((HeisenbergPoint::finite(zeta, v), p_c, plane))
}

/// Span of two transverse maximal isotropic subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct PChainSpan<T: nalgebra::Scalar> {
    pub basis: DMatrix<T>,
    pub signature: Signature,
}

impl<T: ComplexField<RealField = f64>> PChainSpan<T> {
    /// Whether the subspace spanned by `u` lies in the span.
    pub fn contains(&self, u: &IsotropicSubspace<T>, rank_tol: f64) -> bool {
        let k = self.basis.ncols();
        let mut joined = DMatrix::zeros(self.basis.nrows(), k + u.k());
        joined.view_mut((0, 0), (self.basis.nrows(), k)).copy_from(&self.basis);
        joined.view_mut((0, k), (self.basis.nrows(), u.k())).copy_from(u.basis());
        numerical_rank(&joined, rank_tol) == k
    }
}

pub fn p_chain_span<T: ComplexField<RealField = f64>>(
    v: &IsotropicSubspace<T>,
    w: &IsotropicSubspace<T>,
    tol: &Tolerances,
) -> Result<PChainSpan<T>> {
    if !is_transverse_maximal(v, w, tol)? {
        return Err(Error::NotTransverse);
    }
    let p = v.k();
    let d = v.basis().nrows();
    let mut basis = DMatrix::zeros(d, 2 * p);
    basis.view_mut((0, 0), (d, p)).copy_from(v.basis());
    basis.view_mut((0, p), (d, p)).copy_from(w.basis());
    let signature = signature_of_restriction(v.form(), &basis, tol)?;
    if signature.counts() != (p, p, 0) {
        return Err(Error::NotTransverse);
    }
    Ok(PChainSpan { basis, signature })
}

//! Finite truncations of an indefinite form of signature (p, q).
//!
//! The form is always `diag(+1 x p, -1 x q)` in the standard basis. Real and
//! complex scalars share the same code through `nalgebra::ComplexField`; the
//! Hermitian version conjugates the first argument.

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawForm")]
pub struct IndefiniteForm {
    p: usize,
    q: usize,
    field: Field,
}

#[derive(Deserialize)]
struct RawForm {
    p: usize,
    q: usize,
    #[serde(default = "default_field")]
    field: Field,
}

fn default_field() -> Field {
    Field::Real
}

impl TryFrom<RawForm> for IndefiniteForm {
    type Error = Error;
    fn try_from(raw: RawForm) -> Result<Self> {
        make_form(raw.p, raw.q, raw.field)
    }
}

pub fn make_form(p: usize, q: usize, field: Field) -> Result<IndefiniteForm> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSignature { p, q });
    }
    Ok(IndefiniteForm { p, q, field })
}

impl IndefiniteForm {
    pub fn real(p: usize, q: usize) -> Result<Self> {
        make_form(p, q, Field::Real)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn sign_matrix<T: ComplexField<RealField = f64>>(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| if i == j { T::from_real(self.sign(i)) } else { T::zero() })
    }

    /// Left multiplication by the sign matrix.
    pub fn apply_sign<T: ComplexField<RealField = f64>>(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let mut out = m.clone();
        for i in self.p..self.dim() {
            out.row_mut(i).neg_mut();
        }
        out
    }

    pub fn eval<T: ComplexField<RealField = f64>>(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        let mut acc = T::zero();
        for i in 0..self.dim() {
            let term = x[i].clone().conjugate() * y[i].clone();
            if i < self.p {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// `B* S B` for the columns of `b`.
    pub fn gram<T: ComplexField<RealField = f64>>(&self, b: &DMatrix<T>) -> DMatrix<T> {
        b.adjoint() * self.apply_sign(b)
    }

    fn check_rows(&self, rows: usize) -> Result<()> {
        if rows != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rows });
        }
        Ok(())
    }
}

/// Numerical thresholds. `sig_tol` and `iso_tol` are relative to the largest
/// Gram eigenvalue (or squared column norm); `group_tol` is relative to `|g|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sig_tol: f64,
    pub iso_tol: f64,
    pub rank_tol: f64,
    pub group_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { sig_tol: 1e-9, iso_tol: 1e-9, rank_tol: 1e-9, group_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
    /// Smallest distance from an eigenvalue to the threshold, relative to
    /// the largest eigenvalue magnitude.
    pub margin: f64,
}

impl Signature {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.pos, self.neg, self.zero)
    }
}

fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn numerical_rank<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

fn count_eigenvalues(eigs: &[f64], rel_tol: f64) -> Signature {
    let scale = eigs.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let thr = rel_tol * scale;
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut margin = f64::INFINITY;
    for &e in eigs {
        if e > thr {
            pos += 1;
        } else if e < -thr {
            neg += 1;
        } else {
            zero += 1;
        }
        if scale > 0.0 {
            margin = margin.min((e.abs() - thr).abs() / scale);
        }
    }
    if scale == 0.0 {
        margin = 0.0;
    }
    Signature { pos, neg, zero, margin }
}

fn hermitian_eigenvalues<T: ComplexField<RealField = f64>>(g: &DMatrix<T>) -> Vec<f64> {
    if g.nrows() == 0 {
        return Vec::new();
    }
    let sym = (g + g.adjoint()) * T::from_real(0.5);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

pub fn signature_of_restriction<T: ComplexField<RealField = f64>>(
    form: &IndefiniteForm,
    vectors: &DMatrix<T>,
    tol: &Tolerances,
) -> Result<Signature> {
    form.check_rows(vectors.nrows())?;
    let m = vectors.ncols();
    if m == 0 {
        return Err(Error::DegenerateInput("no vectors".into()));
    }
    if numerical_rank(vectors, tol.rank_tol) < m {
        return Err(Error::DegenerateInput("vectors are linearly dependent".into()));
    }
    let eigs = hermitian_eigenvalues(&form.gram(vectors));
    Ok(count_eigenvalues(&eigs, tol.sig_tol))
}

/// A totally isotropic subspace given by a basis of column vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicSubspace<T: nalgebra::Scalar = f64> {
    form: IndefiniteForm,
    basis: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> IsotropicSubspace<T> {
    pub fn new(form: IndefiniteForm, basis: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        form.check_rows(basis.nrows())?;
        let k = basis.ncols();
        if k == 0 || k > form.p().min(form.q()) {
            return Err(Error::DegenerateInput(format!("isotropic dimension {k}")));
        }
        if numerical_rank(&basis, tol.rank_tol) < k {
            return Err(Error::DegenerateInput("basis is rank deficient".into()));
        }
        let scale = basis.iter().map(|x| x.clone().modulus_squared()).sum::<f64>();
        let g = form.gram(&basis);
        let off = g.iter().fold(0.0f64, |a, x| a.max(x.clone().modulus()));
        if off > tol.iso_tol * scale {
            return Err(Error::NotIsotropic(off));
        }
        Ok(IsotropicSubspace { form, basis })
    }

    pub fn form(&self) -> &IndefiniteForm {
        &self.form
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn k(&self) -> usize {
        self.basis.ncols()
    }
}

fn hstack<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Opposition: the form restricted to `V + W` is non-degenerate of
/// signature (k, k).
pub fn is_opposite<T: ComplexField<RealField = f64>>(
    v: &IsotropicSubspace<T>,
    w: &IsotropicSubspace<T>,
    tol: &Tolerances,
) -> Result<bool> {
    if v.k() != w.k() {
        return Err(Error::DimensionMismatch { expected: v.k(), found: w.k() });
    }
    let k = v.k();
    let mut sum = hstack(v.basis(), w.basis());
    // Column scaling does not change the signature but keeps the relative
    // threshold meaningful when the two bases have very different norms.
    for mut c in sum.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= T::from_real(n);
        }
    }
    let eigs = hermitian_eigenvalues(&v.form().gram(&sum));
    let sig = count_eigenvalues(&eigs, tol.sig_tol);
    Ok(sig.counts() == (k, k, 0))
}

pub fn is_transverse_maximal<T: ComplexField<RealField = f64>>(
    v: &IsotropicSubspace<T>,
    w: &IsotropicSubspace<T>,
    tol: &Tolerances,
) -> Result<bool> {
    let p = v.form().p();
    for s in [v, w] {
        if s.k() != p {
            return Err(Error::DimensionMismatch { expected: p, found: s.k() });
        }
    }
    Ok(numerical_rank(&hstack(v.basis(), w.basis()), tol.rank_tol) == 2 * p)
}

fn orthonormal_columns<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> DMatrix<T> {
    m.clone().qr().q()
}

/// Root of the sum of squared principal angles between two column spans.
pub fn grassmann_distance<T: ComplexField<RealField = f64>>(v: &DMatrix<T>, w: &DMatrix<T>) -> Result<f64> {
    if v.nrows() != w.nrows() || v.ncols() != w.ncols() {
        return Err(Error::DimensionMismatch { expected: v.ncols(), found: w.ncols() });
    }
    if v.ncols() == 0 {
        return Ok(0.0);
    }
    let qv = orthonormal_columns(v);
    let qw = orthonormal_columns(w);
    let cross = qv.adjoint() * &qw;
    let mut cos = singular_values(&cross);
    cos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // Small angles lose precision through acos; take them from the sines.
    let resid = &qw - &qv * &cross;
    let mut sin = singular_values(&resid);
    sin.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = 0.0;
    for (c, s) in cos.iter().zip(sin.iter()) {
        let angle = if *c > std::f64::consts::FRAC_1_SQRT_2 { s.min(1.0).asin() } else { c.min(1.0).acos() };
        acc += angle * angle;
    }
    Ok(acc.sqrt())
}

/// An invertible matrix preserving the form, with its cached residual
/// `|g* S g - S|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawElement<T>")]
#[serde(bound(deserialize = "T: ComplexField<RealField = f64> + Deserialize<'de>"))]
pub struct GroupElement<T: nalgebra::Scalar = f64> {
    form: IndefiniteForm,
    matrix: DMatrix<T>,
    residual: f64,
}

/// Deserialized elements are re-checked; the stored residual is ignored.
#[derive(Deserialize)]
#[serde(bound(deserialize = "T: nalgebra::Scalar + Deserialize<'de>"))]
struct RawElement<T: nalgebra::Scalar> {
    form: IndefiniteForm,
    matrix: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> TryFrom<RawElement<T>> for GroupElement<T> {
    type Error = Error;
    fn try_from(raw: RawElement<T>) -> Result<Self> {
        check_group_membership(&raw.form, raw.matrix, &Tolerances::default())
    }
}

fn membership_residual<T: ComplexField<RealField = f64>>(form: &IndefiniteForm, m: &DMatrix<T>) -> f64 {
    (form.gram(m) - form.sign_matrix::<T>()).norm()
}

pub fn check_group_membership<T: ComplexField<RealField = f64>>(
    form: &IndefiniteForm,
    matrix: DMatrix<T>,
    tol: &Tolerances,
) -> Result<GroupElement<T>> {
    let d = form.dim();
    if matrix.nrows() != d || matrix.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows() });
    }
    let residual = membership_residual(form, &matrix);
    let bound = tol.group_tol * matrix.norm_squared().max(1.0);
    if !(residual <= bound) {
        return Err(Error::NotInGroup { residual, tol: bound });
    }
    Ok(GroupElement { form: *form, matrix, residual })
}

impl<T: ComplexField<RealField = f64>> GroupElement<T> {
    pub fn identity(form: &IndefiniteForm) -> Self {
        GroupElement { form: *form, matrix: DMatrix::identity(form.dim(), form.dim()), residual: 0.0 }
    }

    /// Wraps a product of group elements without re-applying the tolerance;
    /// the residual is recomputed.
    fn from_product(form: IndefiniteForm, matrix: DMatrix<T>) -> Self {
        let residual = membership_residual(&form, &matrix);
        GroupElement { form, matrix, residual }
    }

    pub fn form(&self) -> &IndefiniteForm {
        &self.form
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `S g* S`, exact for the group and far better conditioned than LU.
    pub fn inverse(&self) -> Self {
        let s = self.form.sign_matrix::<T>();
        Self::from_product(self.form, &s * self.matrix.adjoint() * &s)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_product(self.form, &self.matrix * &other.matrix)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = self.matrix.clone();
        for _ in 1..n {
            out = &self.matrix * out;
        }
        if n == 0 {
            return Self::identity(&self.form);
        }
        Self::from_product(self.form, out)
    }

    pub fn conjugate_by(&self, k: &Self) -> Self {
        k.compose(self).compose(&k.inverse())
    }

    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        &self.matrix * v
    }
}

/// Whether the upper-left 2x2 block has positive determinant.
pub fn positive_component_indicator(g: &GroupElement<f64>) -> Result<bool> {
    if g.form().p() != 2 {
        return Err(Error::UnsupportedSignature(format!("p = {}, need p = 2", g.form().p())));
    }
    let m = g.matrix();
    Ok(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] > 0.0)
}

/// Hyperbolic rotation in the plane of a positive basis vector `i` and a
/// negative basis vector `j`.
pub fn boost(form: &IndefiniteForm, i: usize, j: usize, t: f64) -> Result<GroupElement<f64>> {
    if i >= form.p() || j < form.p() || j >= form.dim() {
        return Err(Error::DegenerateInput(format!("boost plane ({i}, {j})")));
    }
    let mut m = DMatrix::identity(form.dim(), form.dim());
    let (c, s) = (t.cosh(), t.sinh());
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = s;
    m[(j, i)] = s;
    Ok(GroupElement::from_product(*form, m))
}

/// Euclidean rotation in the plane of two basis vectors of equal sign.
pub fn rotation(form: &IndefiniteForm, i: usize, j: usize, theta: f64) -> Result<GroupElement<f64>> {
    if i == j || i >= form.dim() || j >= form.dim() || form.sign(i) != form.sign(j) {
        return Err(Error::DegenerateInput(format!("rotation plane ({i}, {j})")));
    }
    let mut m = DMatrix::identity(form.dim(), form.dim());
    let (s, c) = theta.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    Ok(GroupElement::from_product(*form, m))
}

/// Block-diagonal embedding of an orthogonal matrix acting on the negative
/// coordinates `offset..offset + o.nrows()`.
pub fn negative_block(form: &IndefiniteForm, offset: usize, o: &DMatrix<f64>) -> Result<GroupElement<f64>> {
    if offset < form.p() || offset + o.nrows() > form.dim() || !o.is_square() {
        return Err(Error::DegenerateInput("negative block out of range".into()));
    }
    let mut m = DMatrix::identity(form.dim(), form.dim());
    m.view_mut((offset, offset), o.shape()).copy_from(o);
    Ok(GroupElement::from_product(*form, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn real(p: usize, q: usize) -> IndefiniteForm {
        IndefiniteForm::real(p, q).unwrap()
    }

    fn cols(d: usize, vs: &[&[(usize, f64)]]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(d, vs.len());
        for (c, v) in vs.iter().enumerate() {
            for &(i, x) in v.iter() {
                m[(i, c)] = x;
            }
        }
        m
    }

    #[test]
    fn make_form_signs() {
        let f = real(2, 3);
        let s: DMatrix<f64> = f.sign_matrix();
        assert_eq!(s, DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0, -1.0])));
        let f = real(1, 1);
        assert_eq!(f.sign_matrix::<f64>(), DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])));
        assert_eq!(real(2, 16).dim(), 18);
        assert_eq!(make_form(0, 3, Field::Real), Err(Error::InvalidSignature { p: 0, q: 3 }));
        assert!(make_form(2, 0, Field::Complex).is_err());
    }

    #[test]
    fn form_json_rejects_bad_signature() {
        let ok: IndefiniteForm = serde_json::from_str(r#"{"p":2,"q":3,"field":"real"}"#).unwrap();
        assert_eq!(ok.dim(), 5);
        assert!(serde_json::from_str::<IndefiniteForm>(r#"{"p":0,"q":3}"#).is_err());
    }

    #[test]
    fn signature_examples() {
        let f = real(2, 3);
        let t = Tolerances::default();
        let s = signature_of_restriction(&f, &cols(5, &[&[(0, 1.0)], &[(1, 1.0)]]), &t).unwrap();
        assert_eq!(s.counts(), (2, 0, 0));
        let s = signature_of_restriction(&f, &cols(5, &[&[(0, 1.0), (2, 1.0)]]), &t).unwrap();
        assert_eq!(s.counts(), (0, 0, 1));
        // x = e1+e3, y = -e1+e3, z = e2+e4: z is Q-orthogonal to x, y and
        // itself, so the Gram matrix [[0,-2,0],[-2,0,0],[0,0,0]] has
        // eigenvalues 2, -2, 0.
        let b = cols(5, &[&[(0, 1.0), (2, 1.0)], &[(0, -1.0), (2, 1.0)], &[(1, 1.0), (3, 1.0)]]);
        assert_eq!(f.gram(&b)[(0, 1)], -2.0);
        let s = signature_of_restriction(&f, &b, &t).unwrap();
        assert_eq!(s.counts(), (1, 1, 1));
    }

    #[test]
    fn signature_two_one_triple() {
        // x = e1+e3, y = -e1+e3, z = e2+e3. Gram [[0,-2,-1],[-2,0,-1],[-1,-1,0]],
        // determinant 2*(-2)(-1)(-1) = -4 < 0 and trace 0: signature (2,1).
        let f = real(2, 3);
        let b = cols(5, &[&[(0, 1.0), (2, 1.0)], &[(0, -1.0), (2, 1.0)], &[(1, 1.0), (2, 1.0)]]);
        let g = f.gram(&b);
        assert!((g.determinant() + 4.0).abs() < 1e-12);
        let s = signature_of_restriction(&f, &b, &Tolerances::default()).unwrap();
        assert_eq!(s.counts(), (2, 1, 0));
    }

    #[test]
    fn signature_rank_deficient() {
        let f = real(2, 3);
        let b = cols(5, &[&[(0, 1.0)], &[(0, 2.0)]]);
        assert!(matches!(signature_of_restriction(&f, &b, &Tolerances::default()), Err(Error::DegenerateInput(_))));
    }

    fn line(f: IndefiniteForm, v: &[(usize, f64)]) -> IsotropicSubspace<f64> {
        IsotropicSubspace::new(f, cols(f.dim(), &[v]), &Tolerances::default()).unwrap()
    }

    #[test]
    fn opposition_examples() {
        let f = real(2, 3);
        let t = Tolerances::default();
        let x = line(f, &[(0, 1.0), (2, 1.0)]);
        let y = line(f, &[(0, -1.0), (2, 1.0)]);
        let w = line(f, &[(1, 1.0), (3, 1.0)]);
        assert!(is_opposite(&x, &y, &t).unwrap());
        assert!(!is_opposite(&x, &x, &t).unwrap());
        assert!(!is_opposite(&x, &w, &t).unwrap());
        assert!(IsotropicSubspace::new(f, cols(5, &[&[(0, 1.0)]]), &t).is_err());
    }

    #[test]
    fn transverse_examples() {
        let f = real(2, 2);
        let t = Tolerances::default();
        let v = IsotropicSubspace::new(f, cols(4, &[&[(0, 1.0), (2, 1.0)], &[(1, 1.0), (3, 1.0)]]), &t).unwrap();
        let w = IsotropicSubspace::new(f, cols(4, &[&[(0, 1.0), (2, -1.0)], &[(1, 1.0), (3, -1.0)]]), &t).unwrap();
        let u = IsotropicSubspace::new(f, cols(4, &[&[(0, 1.0), (2, 1.0)], &[(1, 1.0), (3, -1.0)]]), &t).unwrap();
        assert!(is_transverse_maximal(&v, &w, &t).unwrap());
        assert!(!is_transverse_maximal(&v, &v, &t).unwrap());
        assert!(!is_transverse_maximal(&v, &u, &t).unwrap());
        let l = line(f, &[(0, 1.0), (2, 1.0)]);
        assert!(matches!(is_transverse_maximal(&l, &v, &t), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grassmann_examples() {
        let e1 = cols(3, &[&[(0, 1.0)]]);
        let e2 = cols(3, &[&[(1, 1.0)]]);
        let h = cols(3, &[&[(0, 1.0), (1, 1.0)]]);
        assert!(grassmann_distance(&e1, &e1).unwrap().abs() < 1e-15);
        assert!((grassmann_distance(&e1, &e2).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((grassmann_distance(&e1, &h).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn membership_examples() {
        let f = real(2, 3);
        let t = Tolerances::default();
        let id = check_group_membership(&f, DMatrix::<f64>::identity(5, 5), &t).unwrap();
        assert_eq!(id.residual(), 0.0);
        let r = rotation(&f, 3, 4, 0.7).unwrap();
        assert!(r.residual() < 1e-15);
        // diag(2, 1/2) in the eigenbasis e1 +- e3 of the (e1, e3) plane.
        let mut m = DMatrix::identity(5, 5);
        m[(0, 0)] = 1.25;
        m[(2, 2)] = 1.25;
        m[(0, 2)] = 0.75;
        m[(2, 0)] = 0.75;
        let g = check_group_membership(&f, m, &t).unwrap();
        assert!(g.residual() < 1e-15);
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0, 1.0, 1.0]));
        assert!(matches!(check_group_membership(&f, bad, &t), Err(Error::NotInGroup { .. })));
    }

    #[test]
    fn indicator_examples() {
        let f = real(2, 3);
        let id = GroupElement::<f64>::identity(&f);
        assert!(positive_component_indicator(&id).unwrap());
        let mut m = DMatrix::identity(5, 5);
        m[(0, 0)] = -1.0;
        let r = check_group_membership(&f, m, &Tolerances::default()).unwrap();
        assert!(!positive_component_indicator(&r).unwrap());
        let mut m2 = DMatrix::identity(5, 5);
        m2[(1, 1)] = -1.0;
        let r2 = check_group_membership(&f, m2, &Tolerances::default()).unwrap();
        assert!(positive_component_indicator(&r.compose(&r2)).unwrap());
        let g3 = GroupElement::<f64>::identity(&real(3, 3));
        assert!(positive_component_indicator(&g3).is_err());
    }

    #[test]
    fn complex_form() {
        let f = make_form(1, 1, Field::Complex).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let v = DMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 0.0), i]);
        let l = IsotropicSubspace::new(f, v.clone(), &Tolerances::default()).unwrap();
        assert_eq!(l.k(), 1);
        let w = DMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 0.0), -i]);
        let m = IsotropicSubspace::new(f, w, &Tolerances::default()).unwrap();
        assert!(is_opposite(&l, &m, &Tolerances::default()).unwrap());
        assert!(!is_opposite(&l, &l, &Tolerances::default()).unwrap());
    }
}

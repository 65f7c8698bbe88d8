//! Elementary symmetric and antisymmetric operators, Lie triple systems in
//! the symmetric matrices, and the complex structures `J_0` of four
//! Hermitian symmetric spaces at finite truncation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    S,
    A,
    E,
}

/// `E_{i,j} x = <x, e_j> e_i`, `S_{i,j} = E_{i,j} + E_{j,i}`,
/// `A_{i,j} = E_{i,j} - E_{j,i}`, with 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryOperator {
    pub kind: OperatorKind,
    pub i: usize,
    pub j: usize,
    pub d: usize,
}

impl ElementaryOperator {
    pub fn new(kind: OperatorKind, i: usize, j: usize, d: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > d || j > d {
            return Err(Error::DegenerateInput(format!("indices ({i}, {j}) outside 1..={d}")));
        }
        Ok(ElementaryOperator { kind, i, j, d })
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.d);
        let (a, b) = (self.i - 1, self.j - 1);
        m[(a, b)] += 1.0;
        match self.kind {
            OperatorKind::E => {}
            OperatorKind::S => m[(b, a)] += 1.0,
            OperatorKind::A => m[(b, a)] -= 1.0,
        }
        m
    }
}

pub fn s_op(i: usize, j: usize, d: usize) -> DMatrix<f64> {
    ElementaryOperator::new(OperatorKind::S, i, j, d).expect("valid indices").matrix()
}

pub fn a_op(i: usize, j: usize, d: usize) -> DMatrix<f64> {
    ElementaryOperator::new(OperatorKind::A, i, j, d).expect("valid indices").matrix()
}

pub fn bracket(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.shape() != y.shape() || x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: y.nrows() });
    }
    Ok(x * y - y * x)
}

fn cbracket(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    x * y - y * x
}

/// Orthonormal basis (Frobenius) of a growing span of matrices.
#[derive(Debug, Clone, Default)]
struct Span {
    basis: Vec<DVector<f64>>,
}

impl Span {
    /// Relative norm of the component of `m` orthogonal to the span.
    fn residual(&self, m: &DMatrix<f64>) -> (DVector<f64>, f64) {
        let mut v = DVector::from_column_slice(m.as_slice());
        let n0 = v.norm();
        if n0 == 0.0 {
            return (v, 0.0);
        }
        v /= n0;
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let r = v.norm();
        (v, r)
    }

    fn insert(&mut self, m: &DMatrix<f64>, tol: f64) -> bool {
        let (v, r) = self.residual(m);
        if r <= tol {
            return false;
        }
        self.basis.push(v / r);
        true
    }

    fn contains(&self, m: &DMatrix<f64>, tol: f64) -> bool {
        self.residual(m).1 <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieTripleCandidate {
    pub basis: Vec<DMatrix<f64>>,
    pub tol: f64,
}

impl LieTripleCandidate {
    pub fn new(basis: Vec<DMatrix<f64>>, tol: f64) -> Result<Self> {
        let mut span = Span::default();
        for (k, b) in basis.iter().enumerate() {
            if (b - b.transpose()).amax() > tol * b.amax().max(1.0) {
                return Err(Error::DegenerateInput(format!("basis element {k} is not symmetric")));
            }
            if !span.insert(b, tol) {
                return Err(Error::DegenerateInput(format!("basis element {k} is linearly dependent")));
            }
        }
        Ok(LieTripleCandidate { basis, tol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LieTripleReport {
    pub is_lie_triple: bool,
    /// Largest relative distance of a double bracket from the span.
    pub worst_residual: f64,
}

pub fn is_lie_triple_system(c: &LieTripleCandidate) -> Result<LieTripleReport> {
    let mut span = Span::default();
    for b in &c.basis {
        span.insert(b, 0.0);
    }
    let mut worst: f64 = 0.0;
    for x in &c.basis {
        for y in &c.basis {
            let yz: Vec<DMatrix<f64>> = c.basis.iter().map(|z| bracket(y, z)).collect::<Result<_>>()?;
            for inner in &yz {
                let dbl = bracket(x, inner)?;
                worst = worst.max(span.residual(&dbl).1);
            }
        }
    }
    Ok(LieTripleReport { is_lie_triple: worst <= c.tol, worst_residual: worst })
}

/// Symmetric matrices `[[0, A], [A^T, 0]]` for `A` running over the
/// elementary `p x q` matrices.
pub fn xr_lie_triple_basis(p: usize, q: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for i in 1..=p {
        for j in 1..=q {
            out.push(s_op(i, p + j, p + q));
        }
    }
    out
}

/// `sum_{n <= d-1} n^-2 S_{n,n+1}`.
pub fn truncated_w(d: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(d, d);
    for n in 1..d {
        w += s_op(n, n + 1, d) / (n * n) as f64;
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSpan {
    pub contains: Vec<bool>,
    /// Dimension of the span after each bracket level, starting with the
    /// span of the generators.
    pub dims: Vec<usize>,
    /// True if the last level added nothing.
    pub closed: bool,
}

/// Closes `span{v, w}` under brackets with `v` and `w` for up to `depth`
/// levels and reports which targets lie in the result. Errors with
/// `DepthExhausted` if the span is still growing and a target is missing.
pub fn generated_algebra_contains(
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    targets: &[DMatrix<f64>],
    depth: usize,
    d: usize,
) -> Result<GeneratedSpan> {
    for m in [v, w] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
    }
    const TOL: f64 = 1e-10;
    let mut span = Span::default();
    let mut frontier = Vec::new();
    for g in [v, w] {
        if span.insert(g, TOL) {
            frontier.push(g.clone());
        }
    }
    let mut dims = vec![span.basis.len()];
    let all_found = |span: &Span| targets.iter().all(|t| span.contains(t, 1e-9));
    let mut level = 0;
    while level < depth && !frontier.is_empty() && !all_found(&span) {
        let mut next = Vec::new();
        for x in &frontier {
            for g in [v, w] {
                // Only the component orthogonal to the span needs
                // bracketing again; this keeps the frontier well conditioned.
                let b = bracket(g, x)?;
                if span.insert(&b, TOL) {
                    let fresh = span.basis.last().expect("just inserted");
                    next.push(DMatrix::from_column_slice(d, d, fresh.as_slice()));
                }
            }
        }
        frontier = next;
        dims.push(span.basis.len());
        level += 1;
    }
    let contains: Vec<bool> = targets.iter().map(|t| span.contains(t, 1e-9)).collect();
    let closed = frontier.is_empty();
    if !closed && contains.iter().any(|c| !c) {
        return Err(Error::DepthExhausted { depth });
    }
    Ok(GeneratedSpan { contains, dims, closed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum HermitianSpace {
    /// `O(p, q)` over the complex numbers, `p x q` blocks `A`.
    Xc { p: usize, q: usize },
    /// `O(2, q)` over the reals.
    Xr { q: usize },
    /// Symplectic group of a real `d`-dimensional space, `d` even.
    Siegel { d: usize },
    /// `O*(d)`, `d` even.
    Ostar { d: usize },
}

impl HermitianSpace {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            HermitianSpace::Xc { p, q } => p >= 1 && q >= 1,
            HermitianSpace::Xr { q } => q >= 1,
            HermitianSpace::Siegel { d } => d >= 2 && d % 2 == 0,
            HermitianSpace::Ostar { d } => d >= 4 && d % 2 == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DegenerateInput(format!("invalid parameters {self:?}")))
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            HermitianSpace::Xc { p, q } => p + q,
            HermitianSpace::Xr { q } => 2 + q,
            HermitianSpace::Siegel { d } | HermitianSpace::Ostar { d } => d,
        }
    }
}

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn embed_offdiag(a: &CMat, lower: &CMat) -> CMat {
    let (r, k) = a.shape();
    let mut m = CMat::zeros(r + k, r + k);
    m.view_mut((0, r), (r, k)).copy_from(a);
    m.view_mut((r, 0), (k, r)).copy_from(lower);
    m
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (r, k) = (a.nrows(), b.nrows());
    let mut m = CMat::zeros(r + k, r + k);
    m.view_mut((0, 0), (r, r)).copy_from(a);
    m.view_mut((r, r), (k, k)).copy_from(b);
    m
}

fn rand_real(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| c(rng.random::<f64>() * 2.0 - 1.0))
}

fn rand_complex(rng: &mut ChaCha8Rng, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
}

fn rand_unitary(rng: &mut ChaCha8Rng, n: usize, real: bool) -> CMat {
    let m = if real { rand_real(rng, n, n) } else { rand_complex(rng, n, n) };
    m.qr().q()
}

/// `(X + Y i)` as the real `2m x 2m` matrix `[[X, -Y], [Y, X]]`.
fn realify(u: &CMat) -> CMat {
    let m = u.nrows();
    let mut out = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (u[(i, j)].re, u[(i, j)].im);
            out[(i, j)] = c(x);
            out[(i, j + m)] = c(-y);
            out[(i + m, j)] = c(y);
            out[(i + m, j + m)] = c(x);
        }
    }
    out
}

fn script_j(m: usize) -> CMat {
    let mut j = CMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, i + m)] = c(1.0);
        j[(i + m, i)] = c(-1.0);
    }
    j
}

struct Structure {
    space: HermitianSpace,
}

impl Structure {
    fn sample_p(&self, rng: &mut ChaCha8Rng) -> CMat {
        match self.space {
            HermitianSpace::Xc { p, q } => {
                let a = rand_complex(rng, p, q);
                embed_offdiag(&a, &a.adjoint())
            }
            HermitianSpace::Xr { q } => {
                let a = rand_real(rng, 2, q);
                embed_offdiag(&a, &a.transpose())
            }
            HermitianSpace::Siegel { d } => {
                let m = d / 2;
                let a = rand_real(rng, m, m);
                let b = rand_real(rng, m, m);
                let (a, b) = (&a + a.transpose(), &b + b.transpose());
                let mut out = CMat::zeros(d, d);
                out.view_mut((0, 0), (m, m)).copy_from(&a);
                out.view_mut((0, m), (m, m)).copy_from(&b);
                out.view_mut((m, 0), (m, m)).copy_from(&b);
                out.view_mut((m, m), (m, m)).copy_from(&(-a));
                out
            }
            HermitianSpace::Ostar { d } => {
                let m = d / 2;
                let a = rand_complex(rng, m, m);
                let a = &a - a.transpose();
                embed_offdiag(&a, &a.adjoint())
            }
        }
    }

    fn sample_k(&self, rng: &mut ChaCha8Rng) -> CMat {
        match self.space {
            HermitianSpace::Xc { p, q } => block_diag(&rand_unitary(rng, p, false), &rand_unitary(rng, q, false)),
            HermitianSpace::Xr { q } => {
                let (s, co) = (rng.random::<f64>() * std::f64::consts::TAU).sin_cos();
                let r = CMat::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)]);
                block_diag(&r, &rand_unitary(rng, q, true))
            }
            HermitianSpace::Siegel { d } => realify(&rand_unitary(rng, d / 2, false)),
            HermitianSpace::Ostar { d } => {
                let u = rand_unitary(rng, d / 2, false);
                let ub = u.map(|z| z.conj());
                block_diag(&u, &ub)
            }
        }
    }

    fn j0(&self, m: &CMat) -> CMat {
        match self.space {
            HermitianSpace::Xc { p, q } => {
                let a = m.view((0, p), (p, q)) * Complex64::i();
                embed_offdiag(&a.clone_owned(), &a.adjoint())
            }
            HermitianSpace::Ostar { d } => {
                let k = d / 2;
                let a = m.view((0, k), (k, k)) * Complex64::i();
                embed_offdiag(&a.clone_owned(), &a.adjoint())
            }
            HermitianSpace::Xr { q } => {
                let rot = CMat::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
                let ia = rot * m.view((0, 2), (2, q));
                embed_offdiag(&ia, &ia.transpose())
            }
            HermitianSpace::Siegel { d } => {
                let z = (CMat::identity(d, d) + script_j(d / 2)) / c(std::f64::consts::SQRT_2);
                &z * m * z.adjoint()
            }
        }
    }

    /// Relative distance of `m` from `p`.
    fn p_residual(&self, m: &CMat) -> f64 {
        let scale = m.norm().max(f64::MIN_POSITIVE);
        let herm = (m - m.adjoint()).norm();
        let extra = match self.space {
            HermitianSpace::Xc { p, .. } => (m.view((0, 0), (p, p)).norm().powi(2)
                + m.view((p, p), (m.nrows() - p, m.nrows() - p)).norm().powi(2))
            .sqrt(),
            HermitianSpace::Xr { .. } => {
                let d = m.nrows();
                let imag = m.map(|z| z.im).norm();
                (m.view((0, 0), (2, 2)).norm().powi(2) + m.view((2, 2), (d - 2, d - 2)).norm().powi(2) + imag * imag)
                    .sqrt()
            }
            HermitianSpace::Siegel { d } => {
                let jj = script_j(d / 2);
                let imag = m.map(|z| z.im).norm();
                ((&jj * m + m * &jj).norm().powi(2) + imag * imag).sqrt()
            }
            HermitianSpace::Ostar { d } => {
                let k = d / 2;
                let a = m.view((0, k), (k, k));
                (m.view((0, 0), (k, k)).norm().powi(2)
                    + m.view((k, k), (k, k)).norm().powi(2)
                    + (a + a.transpose()).norm().powi(2))
                .sqrt()
            }
        };
        (herm + extra) / scale
    }
}

fn trace_form(x: &CMat, y: &CMat) -> f64 {
    (x * y).trace().re
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexStructureReport {
    pub space: HermitianSpace,
    pub samples: usize,
    pub j_squared: f64,
    pub isometry: f64,
    pub k_commutation: f64,
    pub p_closure: f64,
    pub pass: bool,
}

pub const J0_TOL: f64 = 1e-12;

/// Checks `J_0^2 = -Id`, the isometry property for `tr(XY)`, commutation
/// with conjugation by sampled elements of `K` and `J_0(p) = p` on
/// `samples` random elements of `p`.
pub fn verify_complex_structure(space: HermitianSpace, samples: usize, seed: u64) -> Result<ComplexStructureReport> {
    space.validate()?;
    let st = Structure { space };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut jsq, mut iso, mut kc, mut clo) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let fail = |which: &'static str, sample: usize, residual: f64| Error::ConditionFailed { which, sample, residual };
    for s in 0..samples {
        let m = st.sample_p(&mut rng);
        let n = st.sample_p(&mut rng);
        let k = st.sample_k(&mut rng);
        let scale = m.norm();
        let jm = st.j0(&m);

        let r = st.p_residual(&jm);
        clo = clo.max(r);
        if r > J0_TOL {
            return Err(fail("p-closure", s, r));
        }
        let r = (st.j0(&jm) + &m).norm() / scale;
        jsq = jsq.max(r);
        if r > J0_TOL {
            return Err(fail("J0^2 = -Id", s, r));
        }
        let jn = st.j0(&n);
        let r = (trace_form(&jm, &jn) - trace_form(&m, &n)).abs() / (scale * n.norm());
        iso = iso.max(r);
        if r > J0_TOL {
            return Err(fail("isometry", s, r));
        }
        let km = &k * &m * k.adjoint();
        let r = (st.j0(&km) - &k * &jm * k.adjoint()).norm() / scale;
        kc = kc.max(r);
        if r > J0_TOL {
            return Err(fail("K-commutation", s, r));
        }
    }
    Ok(ComplexStructureReport {
        space,
        samples,
        j_squared: jsq,
        isometry: iso,
        k_commutation: kc,
        p_closure: clo,
        pass: true,
    })
}

/// Jacobi residual `|[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]|` for complex
/// matrices, used by the structure tests.
pub fn jacobi_residual(x: &CMat, y: &CMat, z: &CMat) -> f64 {
    (cbracket(x, &cbracket(y, z)) + cbracket(y, &cbracket(z, x)) + cbracket(z, &cbracket(x, y))).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_brackets() {
        let d = 6;
        let b = bracket(&s_op(1, 1, d), &a_op(1, 2, d)).unwrap();
        assert!((b - s_op(1, 2, d) * 2.0).amax() < 1e-12);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 1..=d {
            for j in 1..=d {
                for k in 1..=d {
                    for l in 1..=d {
                        let lhs = bracket(&s_op(i, j, d), &s_op(k, l, d)).unwrap();
                        let rhs = a_op(i, l, d) * delta(j, k)
                            + a_op(i, k, d) * delta(j, l)
                            + a_op(j, l, d) * delta(i, k)
                            + a_op(j, k, d) * delta(i, l);
                        assert!((lhs - rhs).amax() < 1e-12, "{i}{j}{k}{l}");
                    }
                }
            }
        }
        let x = s_op(2, 3, d);
        assert_eq!(bracket(&x, &x).unwrap().amax(), 0.0);
        assert!(bracket(&x, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn lie_triple_examples() {
        let xr = LieTripleCandidate::new(xr_lie_triple_basis(2, 4), 1e-12).unwrap();
        assert!(is_lie_triple_system(&xr).unwrap().is_lie_triple);
        let one = LieTripleCandidate::new(vec![s_op(1, 1, 4)], 1e-12).unwrap();
        assert!(is_lie_triple_system(&one).unwrap().is_lie_triple);
        let two = LieTripleCandidate::new(vec![s_op(1, 1, 4), s_op(1, 2, 4)], 1e-12).unwrap();
        let r = is_lie_triple_system(&two).unwrap();
        assert!(!r.is_lie_triple && r.worst_residual > 0.1);
        assert!(LieTripleCandidate::new(vec![a_op(1, 2, 3)], 1e-12).is_err());
        assert!(LieTripleCandidate::new(vec![s_op(1, 2, 3), s_op(1, 2, 3) * 2.0], 1e-12).is_err());
    }

    #[test]
    fn recursion_identity() {
        let d = 12;
        let w = truncated_w(d);
        let v = s_op(1, 1, d);
        let first = bracket(&v, &bracket(&v, &w).unwrap()).unwrap();
        assert!((first - s_op(1, 2, d) * 4.0).amax() < 1e-12);
        // At k = 2 the lower term would be S_{1,1}, which commutes with v.
        let k2 = bracket(&v, &bracket(&s_op(1, 2, d), &w).unwrap()).unwrap();
        assert!((k2 - s_op(1, 3, d) * 0.5).amax() < 1e-12);
        for k in 3..=d - 2 {
            let lhs = bracket(&v, &bracket(&s_op(1, k, d), &w).unwrap()).unwrap();
            let rhs =
                s_op(1, k - 1, d) * (2.0 / ((k - 1) * (k - 1)) as f64) + s_op(1, k + 1, d) * (2.0 / (k * k) as f64);
            assert!((lhs - rhs).amax() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn generation() {
        let d = 8;
        let targets: Vec<_> = (1..=d).map(|k| s_op(1, k, d)).collect();
        let g = generated_algebra_contains(&s_op(1, 1, d), &truncated_w(d), &targets, 64, d).unwrap();
        assert!(g.contains.iter().all(|&c| c));
        assert!(matches!(
            generated_algebra_contains(&s_op(1, 1, d), &truncated_w(d), &targets, 2, d),
            Err(Error::DepthExhausted { depth: 2 })
        ));
        let commuting = generated_algebra_contains(&s_op(1, 1, d), &s_op(2, 2, d), &[s_op(1, 2, d)], 10, d).unwrap();
        assert_eq!(commuting.dims, vec![2, 2]);
        assert_eq!(commuting.contains, vec![false]);
        assert!(commuting.closed);
    }

    #[test]
    fn complex_structures() {
        for space in [
            HermitianSpace::Xc { p: 2, q: 3 },
            HermitianSpace::Xr { q: 5 },
            HermitianSpace::Siegel { d: 8 },
            HermitianSpace::Ostar { d: 8 },
        ] {
            let r = verify_complex_structure(space, 100, 1).unwrap();
            assert!(r.pass, "{space:?}");
        }
        assert!(verify_complex_structure(HermitianSpace::Siegel { d: 7 }, 1, 0).is_err());
    }

    #[test]
    fn displayed_xr_lift_is_not_in_p() {
        // The lift [[0, IA], [-(IA)^T, 0]] is antisymmetric.
        let st = Structure { space: HermitianSpace::Xr { q: 3 } };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = st.sample_p(&mut rng);
        let rot = CMat::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        let ia = rot * m.view((0, 2), (2, 3));
        let shown = embed_offdiag(&ia, &(-ia.transpose()));
        assert!(st.p_residual(&shown) > 0.5);
    }

    #[test]
    fn j0_of_zero() {
        let st = Structure { space: HermitianSpace::Siegel { d: 4 } };
        let z = CMat::zeros(4, 4);
        assert_eq!(st.j0(&st.j0(&z)), z);
    }
}

use maxrep::bergmann::{bergmann_beta, interval_contains, is_maximal_tuple, random_line, IsotropicLine};
use maxrep::chain::{chain_through_two, herm, CVec, HeisenbergPoint};
use maxrep::delzant_py::{pi_s_matrix, FourierTruncation, Mobius};
use maxrep::interval::IntervalChart;
use maxrep::lie_triple::{a_op, bracket, jacobi_residual, s_op};
use maxrep::pingpong::random_group_element;
use maxrep::shilov::shilov_analyze;
use maxrep::toledo::{toledo_invariant, FreeGroupRep};
use maxrep::{
    boost, check_group_membership, grassmann_distance, is_opposite, rotation, signature_of_restriction, GroupElement,
    IndefiniteForm, Tolerances,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element(form: &IndefiniteForm, seed: u64) -> GroupElement<f64> {
    random_group_element(form, &mut rng(seed), 6, 1.0)
}

fn lines(form: IndefiniteForm, seed: u64, n: usize) -> Vec<IsotropicLine> {
    let mut r = rng(seed);
    (0..n).map(|_| random_line(form, &mut r).unwrap()).collect()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn products_stay_in_group(q in 1usize..6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let g = element(&f, s1).compose(&element(&f, s2).inverse());
        let back = check_group_membership(&f, g.matrix().clone(), &Tolerances::default());
        prop_assert!(back.is_ok());
    }

    #[test]
    fn signature_ignores_basis_change(q in 2usize..6, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let mut r = rng(seed);
        let v = DMatrix::from_fn(f.dim(), 3, |_, _| r.random::<f64>() - 0.5);
        let mix = DMatrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { r.random::<f64>() - 0.5 });
        let tol = Tolerances::default();
        let (Ok(a), Ok(b)) = (signature_of_restriction(&f, &v, &tol), signature_of_restriction(&f, &(&v * mix), &tol)) else {
            return Ok(());
        };
        if a.margin > 1e-6 && b.margin > 1e-6 {
            prop_assert_eq!(a.counts(), b.counts());
        }
        // Isometries preserve the signature as well.
        let g = element(&f, seed ^ 1);
        let c = signature_of_restriction(&f, &(g.matrix() * &v), &tol).unwrap();
        if a.margin > 1e-6 && c.margin > 1e-6 {
            prop_assert_eq!(a.counts(), c.counts());
        }
    }

    #[test]
    fn opposition_symmetric_and_invariant(q in 1usize..6, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let l = lines(f, seed, 2);
        let (v, w) = (l[0].as_subspace(), l[1].as_subspace());
        let tol = Tolerances::default();
        let vw = is_opposite(&v, &w, &tol).unwrap();
        prop_assert_eq!(vw, is_opposite(&w, &v, &tol).unwrap());
        let g = element(&f, seed.wrapping_add(3));
        let (gv, gw) = (l[0].transform(&g).unwrap().as_subspace(), l[1].transform(&g).unwrap().as_subspace());
        prop_assert_eq!(vw, is_opposite(&gv, &gw, &tol).unwrap());
    }

    #[test]
    fn grassmann_triangle(n in 3usize..7, k in 1usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut m = || DMatrix::from_fn(n, k, |_, _| r.random::<f64>() - 0.5);
        let (a, b, c) = (m(), m(), m());
        let ab = grassmann_distance(&a, &b).unwrap();
        let bc = grassmann_distance(&b, &c).unwrap();
        let ac = grassmann_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
        prop_assert!(grassmann_distance(&a, &a).unwrap() < 1e-7);
        prop_assert!((ab - grassmann_distance(&b, &a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn beta_alternating_and_invariant(q in 1usize..8, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let l = lines(f, seed, 3);
        let Ok(b) = bergmann_beta(&l[0], &l[1], &l[2]) else { return Ok(()); };
        prop_assert!([-2, 0, 2].contains(&b));
        prop_assert_eq!(bergmann_beta(&l[1], &l[0], &l[2]).unwrap(), -b);
        prop_assert_eq!(bergmann_beta(&l[1], &l[2], &l[0]).unwrap(), b);
        let g = element(&f, seed ^ 7);
        let gl: Vec<IsotropicLine> = l.iter().map(|x| x.transform(&g).unwrap()).collect();
        if let Ok(gb) = bergmann_beta(&gl[0], &gl[1], &gl[2]) {
            prop_assert_eq!(gb, b);
        }
    }

    #[test]
    fn beta_cocycle(q in 1usize..8, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let l = lines(f, seed, 4);
        let b = |i: usize, j: usize, k: usize| bergmann_beta(&l[i], &l[j], &l[k]);
        if let (Ok(a), Ok(c), Ok(d), Ok(e)) = (b(1, 2, 3), b(0, 2, 3), b(0, 1, 3), b(0, 1, 2)) {
            prop_assert_eq!(a - c + d - e, 0);
        }
    }

    #[test]
    fn chart_round_trip(q in 1usize..6, seed in any::<u64>(), t in 0.0f64..1.0) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let l = lines(f, seed, 2);
        let Ok(chart) = IntervalChart::new(&l[0], &l[1]) else { return Ok(()); };
        let mut r = rng(seed ^ 9);
        let mut ball = || {
            let v = DVector::from_fn(chart.dim(), |_, _| r.random::<f64>() - 0.5);
            let n = v.norm();
            v * (0.95 * r.random::<f64>() / n)
        };
        let (c1, c2) = (ball(), ball());
        for c in [&c1, &c2] {
            let z = chart.unchart(c).unwrap();
            prop_assert!(interval_contains(&l[0], &l[1], &z).unwrap());
            prop_assert!((chart.chart(&z).unwrap() - c).norm() < 1e-8);
        }
        let w = chart.unchart(&(&c1 * (1.0 - t) + &c2 * t)).unwrap();
        prop_assert!(interval_contains(&l[0], &l[1], &w).unwrap());
    }

    #[test]
    fn shilov_inverse_and_conjugate(q in 2usize..6, t in 0.8f64..2.5, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let g = boost(&f, 0, 2, t).unwrap().compose(&boost(&f, 1, 3, 0.3 * t).unwrap());
        let d = shilov_analyze(&g, 1e-9).unwrap();
        let di = shilov_analyze(&g.inverse(), 1e-9).unwrap();
        prop_assert!(di.plus.distance(&d.minus) < 1e-7);
        prop_assert!(di.minus.distance(&d.plus) < 1e-7);
        let k = element(&f, seed);
        let dc = shilov_analyze(&g.conjugate_by(&k), 1e-9).unwrap();
        prop_assert!(dc.plus.distance(&d.plus.transform(&k).unwrap()) < 1e-6);
        prop_assert!((dc.lambda1 - d.lambda1).abs() < 1e-8 * d.lambda1);
    }

    #[test]
    fn toledo_conjugation(q in 2usize..5, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let a = element(&f, seed);
        let b = element(&f, seed ^ 0x55);
        let rep = FreeGroupRep::new(a, b).unwrap();
        let Some(l) = maxrep::toledo::isotropic_eigenlines(&rep.commutator(), 1e-6).into_iter().next() else {
            return Ok(());
        };
        let Ok(r) = toledo_invariant(&rep, &l, true) else { return Ok(()); };
        prop_assert!(r.i_rho.abs() <= 2);
        let k = element(&f, seed ^ 0xaa);
        let conj = rep.conjugate_by(&k);
        if let Ok(rc) = toledo_invariant(&conj, &l.transform(&k).unwrap(), true) {
            prop_assert_eq!(rc.i_rho, r.i_rho);
        }
        // An orientation-reversing conjugation flips the sign.
        let mut flip = DMatrix::identity(f.dim(), f.dim());
        flip[(0, 0)] = -1.0;
        let flip = check_group_membership(&f, flip, &Tolerances::default()).unwrap();
        if let Ok(rf) = toledo_invariant(&rep.conjugate_by(&flip), &l.transform(&flip).unwrap(), true) {
            prop_assert_eq!(rf.i_rho, -r.i_rho);
        }
    }

    #[test]
    fn maximal_tuples_invariant(q in 1usize..6, seed in any::<u64>()) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let v = DVector::from_fn(q, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let tuple: Vec<IsotropicLine> =
            [0.1, 1.3, 2.9, 4.4].iter().map(|&t| IsotropicLine::from_angle(f, t, &v).unwrap()).collect();
        prop_assert!(is_maximal_tuple(&tuple).unwrap());
        let g = element(&f, seed);
        let moved: Vec<IsotropicLine> = tuple.iter().map(|x| x.transform(&g).unwrap()).collect();
        if let Ok(m) = is_maximal_tuple(&moved) {
            prop_assert!(m);
        }
    }

    #[test]
    fn jacobi_and_bilinear(d in 3usize..7, i in 1usize..4, j in 1usize..4, k in 1usize..4, c in -2.0f64..2.0) {
        let (x, y, z) = (s_op(i, j, d), a_op(j, k, d), s_op(k, i, d));
        let cx = x.map(|v| Complex64::new(v, 0.0));
        let cy = y.map(|v| Complex64::new(v, 0.0));
        let cz = z.map(|v| Complex64::new(v, 0.0));
        prop_assert!(jacobi_residual(&cx, &cy, &cz) < 1e-12);
        let lhs = bracket(&(&x * c + &z), &y).unwrap();
        let rhs = bracket(&x, &y).unwrap() * c + bracket(&z, &y).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-12);
        prop_assert!((bracket(&x, &y).unwrap() + bracket(&y, &x).unwrap()).amax() < 1e-12);
    }

    #[test]
    fn chain_symmetric_and_equivariant(seed in any::<u64>(), n in 1usize..3) {
        let mut r = rng(seed);
        let mut cv = || CVec::from_fn(n, |_, _| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
        let (a, b, t) = (cv(), cv(), cv());
        let x = HeisenbergPoint::finite(a, 0.3);
        let y = HeisenbergPoint::finite(b, -0.7);
        let c = chain_through_two(&x, &y).unwrap();
        prop_assert!(c.membership_residual(&x) < 1e-10);
        prop_assert!(c.membership_residual(&y) < 1e-10);
        prop_assert!(c.approx_eq(&chain_through_two(&y, &x).unwrap(), 1e-10));
        let moved = chain_through_two(&x.translate(&t, 1.1), &y.translate(&t, 1.1)).unwrap();
        prop_assert!(moved.approx_eq(&c.translate(&t, 1.1), 1e-9));
        prop_assert!(herm(&t, &t).im.abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn pi_s_homomorphism(s in 1.6f64..2.4, t1 in -0.4f64..0.4, th in 0.0f64..6.0) {
        let trunc = FourierTruncation::new(32).unwrap();
        let g = Mobius::hyperbolic(t1);
        let h = Mobius::rotation(th);
        let pg = pi_s_matrix(s, &g, &trunc, None, None).unwrap().matrix;
        let ph = pi_s_matrix(s, &h, &trunc, None, None).unwrap().matrix;
        let pgh = pi_s_matrix(s, &g.compose(&h), &trunc, None, None).unwrap().matrix;
        // Rotations are exact, so the product agrees on every column.
        prop_assert!((&pg * &ph - &pgh).amax() < 1e-8);
        let id = pi_s_matrix(s, &Mobius::identity(), &trunc, None, None).unwrap().matrix;
        prop_assert!((id - DMatrix::identity(trunc.dim(), trunc.dim())).amax() < 1e-12);
    }

    #[test]
    fn rotation_commutes_with_shift(q in 2usize..5, th in 0.0f64..6.0) {
        let f = IndefiniteForm::real(2, q).unwrap();
        let r = rotation(&f, 0, 1, th).unwrap();
        let l = IsotropicLine::circle(f, 0.2).unwrap();
        let moved = l.transform(&r).unwrap();
        prop_assert!(moved.distance(&IsotropicLine::circle(f, 0.2 + th).unwrap()) < 1e-9);
    }
}

#[test]
fn pingpong_survives_conjugation() {
    let w = maxrep::pingpong::build_witness(8, 3, 200).unwrap();
    let f = w.form;
    for seed in 0..3 {
        let k = element(&f, seed);
        let moved = maxrep::pingpong::PingPongWitness {
            x: w.x.transform(&k).unwrap(),
            y: w.y.transform(&k).unwrap(),
            z: w.z.transform(&k).unwrap(),
            t: w.t.transform(&k).unwrap(),
            a: w.a.conjugate_by(&k),
            b: w.b.conjugate_by(&k),
            certificate: None,
            ..w.clone()
        };
        let r = maxrep::pingpong::verify_pingpong(&moved, 200).unwrap();
        assert!(r.pass && r.min_margin > 0.0);
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generated_span_grows_monotonically(d in 4usize..8, i in 1usize..4, j in 1usize..4, depth in 1usize..6) {
        let v = s_op(1, i, d);
        let w = s_op(j, d, d);
        // Brackets are traceless, so the identity is never reached and the
        // closure runs to its full depth.
        let id = [DMatrix::identity(d, d)];
        let gen = |k| maxrep::lie_triple::generated_algebra_contains(&v, &w, &id, k, d);
        let (Ok(r), Ok(deeper)) = (gen(depth + 20), gen(depth)) else { return Ok(()); };
        prop_assert!(r.closed);
        prop_assert!(r.dims.windows(2).all(|p| p[0] <= p[1]));
        prop_assert!(deeper.dims.len() <= r.dims.len());
        prop_assert!(r.dims.starts_with(&deeper.dims));
    }
}

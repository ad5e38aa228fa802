use fws_core::numerics::{
    hermitian_eigen, integrate_adaptive, integrate_real_line, loglog_slope, CMatrix, DecayHint,
};
use fws_core::{Complex64, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    a
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn eigen_reconstruction_and_orthonormality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &n in &[1usize, 2, 5, 16, 40, 64] {
        let a = random_hermitian(&mut rng, n);
        let s = hermitian_eigen(&a).unwrap();
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let mut diff = s.reconstruct();
        for i in 0..n {
            for j in 0..n {
                diff[(i, j)] -= a[(i, j)];
            }
        }
        assert!(diff.frobenius_norm() <= 1e-10 * a.frobenius_norm(), "n={n}");
        for (k, u) in s.eigenvectors.iter().enumerate() {
            for (l, v) in s.eigenvectors.iter().enumerate() {
                let dot: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((dot - want).norm() <= 1e-12, "n={n} ({k},{l}) {dot}");
            }
        }
        let trace: f64 = s.eigenvalues.iter().sum();
        assert!((trace - a.trace().re).abs() <= 1e-12 * a.frobenius_norm().max(1.0));
    }
}

#[test]
fn eigenvalues_invariant_under_unitary_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 6;
    let a = random_hermitian(&mut rng, n);
    // fixed test rotation: eigenvectors of an unrelated Hermitian matrix
    let q = hermitian_eigen(&random_hermitian(&mut rng, n)).unwrap();
    let mut u = CMatrix::zeros(n);
    for (k, v) in q.eigenvectors.iter().enumerate() {
        for i in 0..n {
            u[(i, k)] = v[i];
        }
    }
    let b = u.adjoint().mul(&a).mul(&u);
    let ea = sorted(hermitian_eigen(&a).unwrap().eigenvalues);
    let eb = sorted(hermitian_eigen(&b).unwrap().eigenvalues);
    for (x, y) in ea.iter().zip(&eb) {
        assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
    }
}

#[test]
fn eigen_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_hermitian(&mut rng, 12);
    let s1 = hermitian_eigen(&a).unwrap();
    let s2 = hermitian_eigen(&a).unwrap();
    assert_eq!(
        s1.eigenvalues.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        s2.eigenvalues.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(s1, s2);
}

#[test]
fn erf_oracle_gaussian() {
    // int_{-8}^{8} exp(-x^2) = sqrt(pi) erf(8), and 1 - erf(8) < 1e-28
    let r = integrate_adaptive(|x| Complex64::new((-x * x).exp(), 0.0), -8.0, 8.0, 1e-12).unwrap();
    assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() <= 1e-10);
}

#[test]
fn real_line_examples() {
    let pi = std::f64::consts::PI;
    let g = integrate_real_line(|x| Complex64::new((-x * x).exp(), 0.0), DecayHint::Gaussian, 1e-11).unwrap();
    assert!((g.value.re - pi.sqrt()).abs() <= 1e-10);
    let e = integrate_real_line(|x| Complex64::new((-x.abs()).exp(), 0.0), DecayHint::Exponential, 1e-11)
        .unwrap();
    assert!((e.value.re - 2.0).abs() <= 1e-10);
    let p = integrate_real_line(
        |x| Complex64::new(1.0 / (1.0 + x * x), 0.0),
        DecayHint::Polynomial(2.0),
        1e-9,
    )
    .unwrap();
    assert!((p.value.re - pi).abs() <= 1e-8);
}

#[test]
fn slope_examples() {
    let f = loglog_slope(&[(2.0, 0.25), (4.0, 1.0 / 16.0), (8.0, 1.0 / 64.0), (16.0, 1.0 / 256.0)]).unwrap();
    assert!((f.slope + 2.0).abs() <= 1e-12);
    assert!((f.r_squared - 1.0).abs() <= 1e-12);
    let pts: Vec<(f64, f64)> = (0..12)
        .map(|k| {
            let x = 2f64.powi(k);
            (x, (1.0 + 0.01 * x.ln().sin()) / x)
        })
        .collect();
    assert!((loglog_slope(&pts).unwrap().slope + 1.0).abs() <= 0.02);
    let e: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0].iter().map(|&x| (x, (-x).exp())).collect();
    assert!(loglog_slope(&e).unwrap().slope <= -4.0);
    assert!(matches!(
        loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]),
        Err(Error::DegenerateWindow(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(
        a in -2.0f64..2.0, b in -2.0f64..2.0,
        w1 in 0.2f64..3.0, w2 in 0.2f64..3.0,
        s1 in -1.0f64..1.0, s2 in -1.0f64..1.0,
    ) {
        let f = move |x: f64| Complex64::new((w1 * x).sin() + s1 * x * x, (-x * x).exp());
        let g = move |x: f64| Complex64::new((w2 * x).cos() * s2, x / (1.0 + x * x));
        let tol = 1e-10;
        let rf = integrate_adaptive(f, -1.5, 2.5, tol).unwrap();
        let rg = integrate_adaptive(g, -1.5, 2.5, tol).unwrap();
        let rh = integrate_adaptive(move |x| f(x) * a + g(x) * b, -1.5, 2.5, tol).unwrap();
        let bound = 2.0 * (rf.error_estimate * a.abs() + rg.error_estimate * b.abs() + rh.error_estimate) + 1e-14;
        prop_assert!((rh.value - (rf.value * a + rg.value * b)).norm() <= bound);
    }

    #[test]
    fn quadrature_is_bit_deterministic(w in 0.5f64..20.0) {
        let f = move |x: f64| Complex64::new((w * x).sin().abs(), (w * x).cos());
        let r1 = integrate_adaptive(f, 0.0, 3.0, 1e-9).unwrap();
        let r2 = integrate_adaptive(f, 0.0, 3.0, 1e-9).unwrap();
        prop_assert_eq!(r1.value.re.to_bits(), r2.value.re.to_bits());
        prop_assert_eq!(r1.value.im.to_bits(), r2.value.im.to_bits());
        prop_assert_eq!(r1.evaluations, r2.evaluations);
    }

    #[test]
    fn jacobi_preserves_trace(seed in 0u64..10_000, n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, n);
        let s = hermitian_eigen(&a).unwrap();
        let sum: f64 = s.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace().re).abs() <= 1e-12 * a.frobenius_norm().max(1e-300));
    }
}

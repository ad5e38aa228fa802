#![allow(clippy::needless_range_loop)] // matrix entries are indexed as (i, j)

use fws_core::refinement::{preset, CascadeInit, Preset};
use fws_core::wavelet::{
    analyze, certify, gaussian_gram_closed_form, gram, hat_gram_closed_form, normalize_phase,
    numeric_verdict, CatalogId, GeneratorKind, GeneratorSpec, GramReport, Outcome, RuleId, Tag,
    WaveletPoint, WaveletSystem, DEPENDENCE_THRESHOLD,
};
use fws_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pts(pairs: &[(f64, f64)]) -> Vec<WaveletPoint> {
    pairs
        .iter()
        .map(|&(lambda, beta)| WaveletPoint { lambda, beta })
        .collect()
}

fn hat_lattice() -> [(f64, f64); 4] {
    [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (2.0, 2.0)]
}

fn expected_null() -> Vec<Complex64> {
    normalize_phase(&[1.0, -0.5, -1.0, -0.5].map(|x| Complex64::new(x, 0.0)))
}

fn matches_up_to_sign(v: &[Complex64], w: &[Complex64], tol: f64) -> bool {
    let plus = v.iter().zip(w).all(|(a, b)| (a - b).norm() <= tol);
    let minus = v.iter().zip(w).all(|(a, b)| (a + b).norm() <= tol);
    plus || minus
}

#[test]
fn gaussian_gram_matches_closed_form() {
    let pairs = [(1.0, 0.0), (2.0, 0.0), (3.0, 1.0)];
    let s = WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &pairs).unwrap();
    let r = gram(&s, 1e-11).unwrap();
    let exact = gaussian_gram_closed_form(&pts(&pairs));
    for i in 0..3 {
        for j in 0..3 {
            let rel = (r.matrix[(i, j)].re - exact[i][j]).abs() / exact[i][j].abs();
            assert!(rel <= 1e-8, "({i},{j}) rel {rel}");
            assert!(r.matrix[(i, j)].im.abs() <= 1e-14);
        }
    }
    assert!(r.sigma_min > 0.0);
    assert_eq!(
        numeric_verdict(&r, DEPENDENCE_THRESHOLD).unwrap().outcome,
        Outcome::IndependentNumeric
    );
}

#[test]
fn hat_lattice_dependent_by_quadrature() {
    let s = WaveletSystem::from_pairs(GeneratorSpec::hat(), &hat_lattice()).unwrap();
    assert!(certify(&s).is_none());
    let v = analyze(&s, 1e-10).unwrap();
    let report = v.evidence.clone().unwrap();
    assert!(report.relative_gap <= 1e-6, "{}", report.relative_gap);
    match v.outcome {
        Outcome::Dependent { null_vector } => {
            assert!(matches_up_to_sign(&null_vector, &expected_null(), 1e-6), "{null_vector:?}")
        }
        other => panic!("expected Dependent, got {other:?}"),
    }
}

#[test]
fn hat_lattice_exact_oracle() {
    let r = GramReport::from_real_matrix(&hat_gram_closed_form(&pts(&hat_lattice())), 0.0).unwrap();
    assert!(r.relative_gap <= 1e-10);
    assert!(matches_up_to_sign(r.null_vector.as_ref().unwrap(), &expected_null(), 1e-6));
}

#[test]
fn hat_quadrature_matches_exact_entries() {
    let pairs = [(1.0, 0.0), (1.5, 0.3), (2.0, 1.0), (0.7, -0.4)];
    let s = WaveletSystem::from_pairs(GeneratorSpec::hat(), &pairs).unwrap();
    let r = gram(&s, 1e-10).unwrap();
    let exact = hat_gram_closed_form(&pts(&pairs));
    for i in 0..4 {
        for j in 0..4 {
            assert!((r.matrix[(i, j)].re - exact[i][j]).abs() <= 1e-12);
        }
    }
}

#[test]
fn refinement_generator_reproduces_its_dependence() {
    for init in [CascadeInit::Indicator, CascadeInit::Hat] {
        let p = Preset::Hat;
        let eq = preset(p).unwrap();
        let g = GeneratorSpec::new(GeneratorKind::Refinement {
            equation: eq.clone(),
            resolution: 1.0 / 1024.0,
            iterations: 40,
            init,
        })
        .unwrap();
        let s = WaveletSystem::from_pairs(g, &eq.refinement_points()).unwrap();
        let v = analyze(&s, 1e-10).unwrap();
        let gap = v.evidence.as_ref().unwrap().relative_gap;
        assert!(
            matches!(v.outcome, Outcome::Dependent { .. }),
            "{p:?}: {} gap {gap}",
            v.outcome.name()
        );
    }
}

#[test]
fn scaling_generator_scales_gram() {
    let pairs = [(1.0, 0.0), (2.0, 0.5), (3.0, -1.0)];
    let a = gram(&WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &pairs).unwrap(), 1e-10).unwrap();
    let g3 = GeneratorSpec::gaussian().scaled(3.0).unwrap();
    let b = gram(&WaveletSystem::from_pairs(g3, &pairs).unwrap(), 1e-10).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = 9.0 * a.matrix[(i, j)].re;
            assert!((b.matrix[(i, j)].re - want).abs() <= 1e-9 * want.abs());
        }
    }
    assert!((a.relative_gap - b.relative_gap).abs() <= 1e-8 * a.relative_gap.max(1e-300) + 1e-15);
    let va = numeric_verdict(&a, DEPENDENCE_THRESHOLD).unwrap().outcome;
    let vb = numeric_verdict(&b, DEPENDENCE_THRESHOLD).unwrap().outcome;
    assert_eq!(va, vb);
}

#[test]
fn dilation_covariance() {
    let pairs = [(1.0, 0.0), (2.0, 1.0), (3.0, -0.5)];
    let s = 1.7;
    let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(l, b)| (s * l, b)).collect();
    let a = gram(&WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &pairs).unwrap(), 1e-12).unwrap();
    let b = gram(&WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &scaled).unwrap(), 1e-12).unwrap();
    // <phi(s lp x - bp), phi(s lq x - bq)> = <phi(lp x - bp), phi(lq x - bq)> / s
    for i in 0..3 {
        for j in 0..3 {
            let want = a.matrix[(i, j)].re / s;
            assert!((b.matrix[(i, j)].re - want).abs() <= 1e-10 * want.abs());
        }
    }
    assert!((a.relative_gap - b.relative_gap).abs() <= 1e-8);
}

fn random_gaussian_system(rng: &mut ChaCha8Rng) -> WaveletSystem {
    loop {
        let n = rng.gen_range(1..=6);
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.5..4.0), rng.gen_range(-3.0..3.0)))
            .collect();
        if let Ok(s) = WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &pairs) {
            return s;
        }
    }
}

#[test]
fn random_gaussian_grams_are_psd_and_never_dependent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let s = random_gaussian_system(&mut rng);
        let r = gram(&s, 1e-10).unwrap();
        let n = s.len() as f64;
        assert!(r.eigenvalues[0] >= -n * r.quad_error, "{:?}", r.eigenvalues);
        let v = numeric_verdict(&r, DEPENDENCE_THRESHOLD).unwrap();
        assert!(!matches!(v.outcome, Outcome::Dependent { .. }));
    }
}

/// Draws `n` points whose dilations come from distinct well-separated levels.
fn spread_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    while out.len() < n {
        let p = (rng.gen_range(0.5..3.0), rng.gen_range(-2.0..2.0));
        let far = out
            .iter()
            .all(|q: &(f64, f64)| (q.0 - p.0).abs() > 0.3 || (q.1 - p.1).abs() > 0.6);
        if far {
            out.push(p);
        }
    }
    out
}

#[test]
fn certificate_soundness_harness() {
    let gaussian_schwartz_only = GeneratorSpec::gaussian().with_tags([Tag::Schwartz]).unwrap();
    let cases: Vec<(RuleId, GeneratorSpec, usize)> = vec![
        (RuleId::ExpDecayL31a, GeneratorSpec::gaussian(), 4),
        (
            RuleId::PolyDecayMaxDilationL31b,
            GeneratorSpec::new(GeneratorKind::TwoSidedExp { n: 1 }).unwrap(),
            3,
        ),
        (
            RuleId::SmoothMinDilationL31c,
            GeneratorSpec::catalog(CatalogId::Sech)
                .with_tags([Tag::SmoothAllDerivsL1])
                .unwrap(),
            3,
        ),
        (RuleId::ThreePointSchwartzC32, gaussian_schwartz_only, 3),
        (RuleId::FtVanishNearZeroL33i, GeneratorSpec::catalog(CatalogId::Shannon), 3),
        (RuleId::FtCompactL33ii, GeneratorSpec::catalog(CatalogId::SincSquared), 3),
        (
            RuleId::UltimatelyDecreasingFtT34,
            GeneratorSpec::catalog(CatalogId::Sech)
                .with_tags([Tag::Schwartz, Tag::FtAbsUltimatelyDecreasingBothSides])
                .unwrap(),
            4,
        ),
        (
            RuleId::LeCombinationT42,
            GeneratorSpec::catalog(CatalogId::GammaLogOverCosh),
            3,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (rule, gen, n) in cases {
        let mut draws = 0;
        while draws < 20 {
            let s = WaveletSystem::from_pairs(gen.clone(), &spread_points(&mut rng, n)).unwrap();
            let Some(c) = certify(&s) else { continue };
            if c.rule_id != rule {
                continue;
            }
            let r = gram(&s, 1e-9).unwrap();
            assert!(
                r.relative_gap >= 1e-4,
                "{rule}: gap {} at {:?}",
                r.relative_gap,
                s.points()
            );
            draws += 1;
        }
    }
}

#[test]
fn system_json_round_trip() {
    let s = WaveletSystem::from_pairs(
        GeneratorSpec::catalog(CatalogId::Shannon),
        &[(1.0, 0.0), (2.0, 0.25)],
    )
    .unwrap();
    let text = serde_json::to_string_pretty(&s).unwrap();
    let back: WaveletSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}

use lightlike::connection::*;
use lightlike::generators::{family_omega, pair_omega, Branch, FlatFamily, FlatFamilySpec, PairSpec};
use lightlike::neutral::{expm, metric, so_algebra_random};
use lightlike::sampling::SampleBox;
use lightlike::structures::{
    nilpotent_from_section, paracomplex_frame_matrix, related_nilpotent_frame_matrix, side_of, FrameField, Sign,
};
use lightlike::{parse, DifferentialForm, Error, Expr, MatrixForm};
use nalgebra::{dmatrix, DMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Sign::{Minus, Plus};

fn e(s: &str) -> Expr {
    parse(s, 2).unwrap()
}

fn pts(count: usize, seed: u64) -> Vec<Vec<f64>> {
    SampleBox::unit(2).sample(count, seed)
}

fn dx(k: usize) -> DifferentialForm {
    DifferentialForm::dx(2, k)
}

/// `ω` with the listed 1-based entries and their metric partners.
fn compatible(entries: &[((usize, usize), DifferentialForm)]) -> ConnectionForm {
    let mut w = MatrixForm::zeros(4, 4, 2, 1);
    for ((i, j), f) in entries {
        let same = (*i <= 2) == (*j <= 2);
        w.set(i - 1, j - 1, f.clone()).unwrap();
        w.set(j - 1, i - 1, if same { f.neg() } else { f.clone() }).unwrap();
    }
    ConnectionForm::new(w).unwrap()
}

fn pair(fp: &str, fm: &str, gp: &str, gm: &str, branch: Branch, mu: Sign) -> PairSpec {
    PairSpec { f_plus: e(fp), f_minus: e(fm), g_plus: e(gp), g_minus: e(gm), branch, mu, m: 2 }
}

fn trivial() -> PairSpec {
    pair("0", "0", "x1", "x1", Branch::A, Plus)
}

fn generic(branch: Branch, mu: Sign) -> PairSpec {
    pair("sin(x1*x2)", "x1^2 - x2", "x2 + 0.3*x1^2", "cosh(x1) + 2*x2", branch, mu)
}

fn sup(f: &DifferentialForm, p: &[Vec<f64>]) -> f64 {
    p.iter().map(|q| f.max_abs(q).unwrap()).fold(0.0, f64::max)
}

fn n2_family(eps: Sign, mu: Sign) -> FlatFamilySpec {
    FlatFamilySpec {
        family: FlatFamily::SymmetricPotential { phi: e("x1*x2"), c0: dmatrix![1.0, 0.5; 0.5, -1.0] },
        f: e("sin(x2)"),
        n: 2,
        m: 2,
        eps,
        mu,
    }
}

#[test]
fn endo_cov_deriv_examples() {
    let p = pts(10, 1);
    let w = pair_omega(&generic(Branch::A, Plus), &p, 1e-9).unwrap();
    let id = MatrixForm::constant(&DMatrix::identity(4, 4), 2);
    assert!(endo_cov_deriv(&w, &id).unwrap().sup_norm(&p).unwrap() <= 1e-12);

    let j = MatrixForm::constant(&paracomplex_frame_matrix(1, Plus), 2);
    assert!(endo_cov_deriv(&ConnectionForm::zero(1, 2), &j).unwrap().sup_norm(&p).unwrap() == 0.0);

    // Trivial pair: ω³₂ = ω⁴₃ = dx1, so ∇J = dx1 ⊗ N.
    let w = pair_omega(&trivial(), &p, 1e-9).unwrap();
    let d = endo_cov_deriv(&w, &j).unwrap();
    let nf = related_nilpotent_frame_matrix(1, Plus, Plus);
    for q in &p {
        let dirs = d.eval_one_forms(q).unwrap();
        assert!((&dirs[0] - &nf).amax() <= 1e-15);
        assert!(dirs[1].amax() == 0.0);
    }
    assert!(nf.amax() > 0.5);

    let wrong = MatrixForm::constant(&DMatrix::identity(8, 8), 2);
    assert!(matches!(endo_cov_deriv(&w, &wrong), Err(Error::DimensionMismatch(_))));
}

#[test]
fn factorization_examples() {
    let p = pts(40, 2);
    let zero = factorization_check(&ConnectionForm::zero(1, 2), Plus, Plus, &p, 1e-12).unwrap();
    assert!(zero.holds && zero.alpha.is_zero());

    for branch in [Branch::A, Branch::B] {
        for mu in [Plus, Minus] {
            let s = generic(branch, mu);
            let w = pair_omega(&s, &p, 1e-9).unwrap();
            for eps in [Plus, Minus] {
                let nu = eps * s.mu_for(eps);
                let r = factorization_check(&w, eps, nu, &p, 1e-9).unwrap();
                assert!(r.holds && r.residual <= 1e-9, "{branch:?} {mu} {eps}: {r:?}");
                assert!(sup(&r.alpha.sub(&s.alpha(eps)).unwrap(), &p) <= 1e-9);
                let fails = factorization_check(&w, eps, nu.flip(), &p, 1e-9).unwrap();
                assert!(!fails.holds && fails.residual > 1e-3);
            }
        }
    }

    let bad = compatible(&[((3, 2), dx(1)), ((4, 3), dx(1).scale(&Expr::constant(2.0)))]);
    for mu in [Plus, Minus] {
        let r = factorization_check(&bad, Plus, mu, &p, 1e-9).unwrap();
        assert!(!r.holds && r.residual > 0.5);
        assert!(sup(&relation_32_41(&bad, Plus, mu).unwrap(), &p) >= 1.0);
    }

    let mut broken = MatrixForm::zeros(4, 4, 2, 1);
    broken.set(1, 0, dx(1)).unwrap();
    let broken = ConnectionForm::new(broken).unwrap();
    assert!(matches!(factorization_check(&broken, Plus, Plus, &p, 1e-9), Err(Error::Precondition(_))));
}

#[test]
fn factorization_for_n2_families() {
    let p = pts(20, 3);
    for eps in [Plus, Minus] {
        for mu in [Plus, Minus] {
            let w = family_omega(&n2_family(eps, mu), &p, 1e-10).unwrap();
            let r = factorization_check(&w, eps, mu, &p, 1e-9).unwrap();
            assert!(r.holds && r.residual <= 1e-9, "{eps} {mu}");
            let df = DifferentialForm::exact(2, &e("sin(x2)")).scale(&Expr::constant(mu.value()));
            assert!(sup(&r.alpha.sub(&df).unwrap(), &p) <= 1e-9);
            assert!(square_norm(&w, eps, None, &p).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn bivector_cov_deriv_examples() {
    let p = pts(20, 4);
    let id = DMatrix::identity(4, 4);
    let omega = lightlike::structures::omega_basis(&id, Plus, 2).unwrap();
    let zero = ConnectionForm::zero(1, 2);
    for d in bivector_cov_deriv_at(&zero, &omega, &[0.1, 0.2]).unwrap() {
        assert_eq!(d.amax(), 0.0);
    }

    let w = pair_omega(&generic(Branch::B, Minus), &p, 1e-9).unwrap();
    let b = MatrixForm::constant(&omega.0, 2);
    let symbolic = bivector_cov_deriv(&w, &b).unwrap();
    for q in &p {
        let numeric = bivector_cov_deriv_at(&w, &omega, q).unwrap();
        for (k, d) in numeric.iter().enumerate() {
            assert!((symbolic.eval_direction(q, k + 1).unwrap() - &d.0).amax() <= 1e-12);
            assert!(d.hhat(&omega).abs() <= 1e-12);
        }
    }
    let big = ConnectionForm::zero(2, 2);
    assert!(bivector_cov_deriv(&big, &b).is_err());
}

#[test]
fn fully_lightlike_examples() {
    let p = pts(30, 5);
    let w = pair_omega(&trivial(), &p, 1e-9).unwrap();
    let r = fully_lightlike_check(&w, Plus, &p, 1e-9).unwrap();
    assert!(r.fully_lightlike && r.mu == Some(Plus));
    assert!(sup(&r.alpha.sub(&dx(1)).unwrap(), &p) == 0.0);

    let r = fully_lightlike_check(&ConnectionForm::zero(1, 2), Plus, &p, 1e-9).unwrap();
    assert!(!r.fully_lightlike && r.mu.is_none());

    // ω³₂ = x1 dx1, ω⁴₃ = |x1| dx1: μ = sign x1 changes across the box.
    let abs = DifferentialForm::dx(2, 1).scale(&e("exp(0.5*log(x1^2))"));
    let mixed = compatible(&[((3, 2), dx(1).scale(&e("x1"))), ((4, 3), abs)]);
    assert!(p.iter().any(|q| q[0] > 0.0) && p.iter().any(|q| q[0] < 0.0));
    assert!(matches!(fully_lightlike_check(&mixed, Plus, &p, 1e-9), Err(Error::MixedSign)));
    let one_side: Vec<Vec<f64>> = p.iter().filter(|q| q[0] > 0.0).cloned().collect();
    let r = fully_lightlike_check(&mixed, Plus, &one_side, 1e-9).unwrap();
    assert!(r.fully_lightlike && r.mu == Some(Plus));

    assert!(fully_lightlike_check(&ConnectionForm::zero(2, 2), Plus, &p, 1e-9).is_err());
}

#[test]
fn horizontality_and_gauge_examples() {
    let p = pts(20, 6);
    let s = generic(Branch::A, Minus);
    let w = pair_omega(&s, &p, 1e-9).unwrap();
    for eps in [Plus, Minus] {
        assert!(horizontality_check(&w, eps, &p, 1e-9).unwrap());
    }

    let frame = FrameField::identity(1, 2);
    let (same, w0) = gauge_horizontal(&frame, &ConnectionForm::zero(1, 2), Plus, &e("0"), &p, 1e-12).unwrap();
    assert_eq!(same.at(&[0.3, -0.2]).unwrap(), DMatrix::identity(4, 4));
    assert!(w0.matrix().sup_norm(&p).unwrap() == 0.0);

    for (eps, f) in [(Plus, &s.f_plus), (Minus, &s.f_minus)] {
        let (moved, w2) = gauge_horizontal(&frame, &w, eps, f, &p, 1e-9).unwrap();
        assert!(moved.orthonormality_residual(&p).unwrap() <= 1e-12);
        assert!(sup(&horizontality_form(&w2, eps).unwrap(), &p) <= 1e-9);
        let rep = fully_lightlike_check(&w2, eps, &p, 1e-9).unwrap();
        let (nmat, side) = nilpotent_from_section(rep.omega0.as_ref().unwrap(), 1e-9).unwrap();
        assert_eq!(side, eps);
        let dn = endo_cov_deriv(&w2, &MatrixForm::constant(&nmat, 2)).unwrap();
        assert!(dn.sup_norm(&p).unwrap() <= 1e-8, "{eps}");
    }
    let wrong = gauge_horizontal(&frame, &w, Plus, &e("x1"), &p, 1e-9);
    assert!(matches!(wrong, Err(Error::Precondition(_))));
}

#[test]
fn walker_examples() {
    let p = pts(20, 7);
    let d = WalkerDistribution::of_related(1, Plus, Plus, 2);
    assert!(walker_check(&ConnectionForm::zero(1, 2), &d, &p, 1e-12).unwrap());

    for branch in [Branch::A, Branch::B] {
        let s = generic(branch, Minus);
        let w = pair_omega(&s, &p, 1e-9).unwrap();
        for eps in [Plus, Minus] {
            let nu = eps * s.mu_for(eps);
            assert!(factorization_check(&w, eps, nu, &p, 1e-9).unwrap().holds);
            let d = WalkerDistribution::of_related(1, eps, nu, 2);
            assert!(d.isotropy_residual(&p).unwrap() == 0.0);
            assert!(walker_residual(&w, &d, &p).unwrap() <= 1e-8);
            for q in &p {
                for dir in w.sample(q).unwrap() {
                    assert!(walker_closed_forms(&dir, 1, eps, nu).amax() <= 1e-8);
                }
            }
        }
    }

    let w = compatible(&[((3, 2), dx(1))]);
    let d = WalkerDistribution::constant(&dmatrix![1.0, 0.0; 0.0, 1.0; -1.0, 0.0; 0.0, 1.0], 2);
    assert!(!walker_check(&w, &d, &p, 1e-9).unwrap());
    assert!((walker_residual(&w, &d, &p).unwrap() - 1.0).abs() <= 1e-12);
    let closed = walker_closed_forms(&w.sample(&[0.0, 0.0]).unwrap()[0], 1, Plus, Plus);
    assert!(closed.amax() >= 1.0);
}

#[test]
fn walker_to_paracomplex_examples() {
    let p = pts(20, 8);
    let out = walker_to_paracomplex(&ConnectionForm::zero(1, 2), Plus, &e("x1"), &p, 1e-9).unwrap();
    assert!(sup(&out.alpha.sub(&dx(1)).unwrap(), &p) <= 1e-12);
    assert!(out.factorization.holds);

    let r = walker_to_paracomplex(&ConnectionForm::zero(1, 2), Plus, &e("0"), &p, 1e-9);
    assert!(matches!(r, Err(Error::Precondition(_))));

    let t = FrameField::new(walker_frame_change(&e("x1*x2 + 1"), 2)).unwrap();
    assert!(t.orthonormality_residual(&p).unwrap() <= 1e-12);
    assert!(t.oriented(&p).unwrap());

    // The Walker relation in an admissible frame of the ε-nilpotent N needs μ_ε = ε.
    for eps in [Plus, Minus] {
        let s = generic(Branch::A, eps);
        let w = pair_omega(&s, &p, 1e-9).unwrap();
        let out = walker_to_paracomplex(&w, eps, &e("x2"), &p, 1e-9).unwrap();
        assert!(out.factorization.holds && out.factorization.residual <= 1e-8, "{eps}");
        assert!(out.distribution_residual <= 1e-8);
        assert!(sup(&out.alpha.sub(&out.alpha_closed_form).unwrap(), &p) <= 1e-9);
        assert!(p.iter().all(|q| out.alpha.max_abs(q).unwrap() > 1e-9));
    }

    let not_walker = compatible(&[((3, 2), dx(1))]);
    let r = walker_to_paracomplex(&not_walker, Plus, &e("x1"), &p, 1e-9);
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn square_norm_examples() {
    let p = pts(20, 9);
    assert_eq!(square_norm(&ConnectionForm::zero(1, 2), Plus, None, &p).unwrap(), 0.0);
    for branch in [Branch::A, Branch::B] {
        let w = pair_omega(&generic(branch, Plus), &p, 1e-9).unwrap();
        for eps in [Plus, Minus] {
            assert!(square_norm(&w, eps, None, &p).unwrap() <= 1e-9);
        }
    }
    let w = compatible(&[((2, 1), dx(1))]);
    let origin = [0.0, 0.0];
    let v = square_norm_triple_sum_at(&w, Plus, None, &origin).unwrap();
    assert_eq!(v, -4.0);
    assert_eq!(square_norm_at(&w, Plus, None, &origin).unwrap(), v);
}

fn random_compatible(rng: &mut ChaCha8Rng) -> ConnectionForm {
    let xs = [so_algebra_random(1, rng), so_algebra_random(1, rng)];
    let coeffs = [e("1 + 0.5*x2"), e("cos(x1)")];
    let mut w = MatrixForm::zeros(4, 4, 2, 1);
    for i in 0..4 {
        for j in 0..4 {
            let terms = (0..2).map(|k| (vec![k + 1], &coeffs[k] * &Expr::constant(xs[k][(i, j)])));
            w.set(i, j, DifferentialForm::from_terms(2, 1, terms).unwrap()).unwrap();
        }
    }
    ConnectionForm::new(w).unwrap()
}

/// Random pair data: `g` linear-dominant keeps `dg` away from zero on the unit box.
fn arb_pair() -> impl Strategy<Value = PairSpec> {
    (
        prop::array::uniform4(-1.0..1.0f64),
        prop::array::uniform2(-0.4..0.4f64),
        prop_oneof![Just(Branch::A), Just(Branch::B)],
        prop_oneof![Just(Plus), Just(Minus)],
    )
        .prop_map(|(c, d, branch, mu)| PairSpec {
            f_plus: e(&format!("{}*x1*x2 + {}*sin(x2)", c[0], c[1])),
            f_minus: e(&format!("{}*x1^2 + {}*x2", c[2], c[3])),
            g_plus: e(&format!("x1 + {}*x2^2", d[0])),
            g_minus: e(&format!("x2 + {}*sin(x1)", d[1])),
            branch,
            mu,
            m: 2,
        })
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Plus), Just(Minus)]
}

/// A compatible connection that either satisfies the factorization
/// equations (pair or `n = 2` family) or is perturbed away from them.
fn arb_case() -> impl Strategy<Value = (ConnectionForm, Sign, Sign)> {
    let pair_case = (arb_pair(), sign()).prop_map(|(s, eps)| {
        let w = pair_omega(&s, &pts(10, 0), 1e-9).unwrap();
        (w, eps, eps * s.mu_for(eps))
    });
    let family_case = (sign(), sign(), -1.0..1.0f64).prop_map(|(eps, mu, c)| {
        let mut spec = n2_family(eps, mu);
        spec.family = FlatFamily::SymmetricPotential { phi: e("x1*x2"), c0: dmatrix![1.0, c; c, -1.0] };
        (family_omega(&spec, &pts(10, 0), 1e-10).unwrap(), eps, mu)
    });
    let perturbed = (arb_pair(), sign(), any::<u64>()).prop_map(|(s, eps, seed)| {
        let w = pair_omega(&s, &pts(10, 0), 1e-9).unwrap();
        let extra = random_compatible(&mut ChaCha8Rng::seed_from_u64(seed));
        (ConnectionForm::new(w.matrix().add(extra.matrix()).unwrap()).unwrap(), eps, eps * s.mu_for(eps))
    });
    prop_oneof![pair_case, family_case, perturbed]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn compatibility_matches_metric_preservation(seed in any::<u64>(), t in -1.0..1.0f64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let w = random_compatible(&mut r);
        let p = pts(5, seed);
        prop_assert!(w.compatibility_residual(&p).unwrap() <= 1e-12);
        let g = metric(1);
        for q in &p {
            for x in w.sample(q).unwrap() {
                let a = expm(&(x * t));
                prop_assert!((a.transpose() * &g * &a - &g).amax() <= 1e-10);
            }
        }
        let mut bent = w.matrix().clone();
        let k = r.gen_range(0..4);
        bent.set(k, k, dx(1)).unwrap();
        let bent = ConnectionForm::new(bent).unwrap();
        prop_assert!(bent.compatibility_residual(&p).unwrap() >= 1.0);
        let a = expm(&(bent.sample(&p[0]).unwrap()[0].clone() * 0.5));
        prop_assert!((a.transpose() * &g * &a - &g).amax() > 1e-3);
    }

    #[test]
    fn factorization_equations_match_residual((w, eps, nu) in arb_case()) {
        let p = pts(15, 1);
        let r = factorization_check(&w, eps, nu, &p, 1e-9).unwrap();
        prop_assert_eq!(r.holds, r.residual <= 1e-9, "{:?} {}", r.line_residuals, r.residual);
        if r.holds {
            let d = WalkerDistribution::of_related(w.n(), eps, nu, 2);
            prop_assert!(walker_residual(&w, &d, &p).unwrap() <= 1e-8);
            prop_assert!(square_norm(&w, eps, None, &p).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn lightlike_sections_are_null_on_their_side(s in arb_pair(), eps in sign()) {
        let p = pts(15, 2);
        let w = pair_omega(&s, &p, 1e-9).unwrap();
        let r = fully_lightlike_check(&w, eps, &p, 1e-9).unwrap();
        prop_assert!(r.fully_lightlike);
        let o0 = r.omega0.unwrap();
        prop_assert!(o0.hhat(&o0).abs() <= 1e-12);
        prop_assert_eq!(side_of(&o0, 1e-9).unwrap(), Some(eps));
        prop_assert!(p.iter().all(|q| r.alpha.max_abs(q).unwrap() > 1e-9));
        prop_assert!(r.factor_residual.unwrap() <= 1e-9);
    }

    #[test]
    fn lightlike_verdict_is_gauge_invariant(s in arb_pair(), eps in sign(), t in -2.0..2.0f64, seed in any::<u64>()) {
        let p = pts(15, 3);
        let w = pair_omega(&s, &p, 1e-9).unwrap();
        let f = if eps == Plus { &s.f_plus } else { &s.f_minus };
        let frame = FrameField::identity(1, 2);
        let (_, horizontal) = gauge_horizontal(&frame, &w, eps, f, &p, 1e-9).unwrap();
        let boosted = w.gauge(&boost24(&Expr::constant(t), 2)).unwrap();
        let base = fully_lightlike_check(&w, eps, &p, 1e-9).unwrap().fully_lightlike;
        prop_assert!(base);
        prop_assert_eq!(fully_lightlike_check(&horizontal, eps, &p, 1e-9).unwrap().fully_lightlike, base);
        prop_assert_eq!(fully_lightlike_check(&boosted, eps, &p, 1e-9).unwrap().fully_lightlike, base);

        let noisy = random_compatible(&mut ChaCha8Rng::seed_from_u64(seed));
        let nb = noisy.gauge(&boost24(&Expr::constant(t), 2)).unwrap();
        prop_assert_eq!(
            fully_lightlike_check(&noisy, eps, &p, 1e-9).map(|r| r.fully_lightlike).ok(),
            fully_lightlike_check(&nb, eps, &p, 1e-9).map(|r| r.fully_lightlike).ok()
        );
    }

    #[test]
    fn square_norm_agrees_with_triple_sum(seed in any::<u64>(), eps in sign()) {
        let w = random_compatible(&mut ChaCha8Rng::seed_from_u64(seed));
        for q in pts(5, seed) {
            let a = square_norm_at(&w, eps, None, &q).unwrap();
            let b = square_norm_triple_sum_at(&w, eps, None, &q).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }
}

#[test]
fn bivector_derivative_keeps_norm() {
    let mut r = ChaCha8Rng::seed_from_u64(10);
    let id = DMatrix::identity(4, 4);
    for _ in 0..20 {
        let w = random_compatible(&mut r);
        for eps in [Plus, Minus] {
            let o = lightlike::structures::omega_basis(&id, eps, 2).unwrap();
            for q in pts(5, 11) {
                for d in bivector_cov_deriv_at(&w, &o, &q).unwrap() {
                    assert!(d.hhat(&o).abs() <= 1e-12);
                }
            }
        }
    }
}

use lightlike::exterior::{flatness_residual, potential_commutes};
use lightlike::generators::{family_omega, family_potential, FlatFamily, FlatFamilySpec};
use lightlike::neutral::lambda_matrix;
use lightlike::sampling::SampleBox;
use lightlike::structures::Sign::Plus;
use lightlike::{parse, DifferentialForm, Error, Expr, MatrixForm};
use nalgebra::{dmatrix, DMatrix};
use proptest::prelude::*;

mod common;
use common::{arb_form, form_gap, point};

fn e(s: &str) -> Expr {
    parse(s, 3).unwrap()
}

fn dx(k: usize) -> DifferentialForm {
    DifferentialForm::dx(2, k)
}

fn single(rows: usize, at: (usize, usize), f: DifferentialForm) -> MatrixForm {
    let mut a = MatrixForm::zeros(rows, rows, f.dim(), f.degree());
    a.set(at.0, at.1, f).unwrap();
    a
}

#[test]
fn wedge_examples() {
    assert!(dx(1).wedge(&dx(1)).unwrap().is_zero());
    let w = dx(1).wedge(&dx(2)).unwrap();
    assert_eq!(w.coefficient(&[1, 2]), Expr::constant(1.0));
    let a = DifferentialForm::one_form(vec![e("x2"), e("0")]);
    let b = DifferentialForm::one_form(vec![e("0"), e("x1")]);
    let c = a.wedge(&b).unwrap().coefficient(&[1, 2]);
    assert_eq!(c.eval(&[2.0, 3.0]).unwrap(), 6.0);
}

#[test]
fn ext_d_examples() {
    assert_eq!(DifferentialForm::scalar(2, e("x1")).ext_d(), dx(1));
    let d = DifferentialForm::one_form(vec![e("x2"), e("0")]).ext_d();
    assert_eq!(d.coefficient(&[1, 2]).eval(&[0.3, 0.4]).unwrap(), -1.0);
    let dd = DifferentialForm::scalar(2, e("exp(x1)*x2")).ext_d().ext_d();
    for p in SampleBox::unit(2).sample(20, 1) {
        assert!(dd.max_abs(&p).unwrap() <= 1e-12);
    }
}

#[test]
fn mwedge_examples() {
    let w = single(4, (0, 1), dx(1));
    let ww = w.mwedge(&w).unwrap();
    assert!(ww.max_abs(&[0.1, 0.2]).unwrap() == 0.0);

    let mut pair = MatrixForm::zeros(4, 4, 2, 1);
    for (i, j, s) in [(2, 1, 1.0), (1, 2, 1.0), (3, 2, 1.0), (2, 3, -1.0)] {
        pair.set(i, j, dx(1).scale(&Expr::constant(s))).unwrap();
    }
    assert!(pair.mwedge(&pair).unwrap().max_abs(&[0.5, -0.5]).unwrap() == 0.0);

    let prod = single(2, (0, 1), dx(1)).mwedge(&single(2, (1, 0), dx(2))).unwrap();
    assert_eq!(prod.get(0, 0).coefficient(&[1, 2]), Expr::constant(1.0));
    assert!(prod.get(1, 1).is_zero() && prod.get(0, 1).is_zero());
}

#[test]
fn mwedge_dimension_mismatch() {
    let a = MatrixForm::zeros(2, 3, 2, 1);
    assert!(matches!(a.mwedge(&a), Err(Error::DimensionMismatch(_))));
}

#[test]
fn flatness_examples() {
    let pts = SampleBox::unit(2).sample(100, 2);
    assert_eq!(flatness_residual(&MatrixForm::zeros(4, 4, 2, 1), &pts).unwrap(), 0.0);

    let spec = FlatFamilySpec {
        family: FlatFamily::SymmetricPotential { phi: e("x1"), c0: DMatrix::identity(1, 1) },
        f: e("x2"),
        n: 1,
        m: 2,
        eps: Plus,
        mu: Plus,
    };
    let w = family_omega(&spec, &pts, 1e-10).unwrap();
    assert!(flatness_residual(w.matrix(), &pts).unwrap() <= 1e-9);

    let a = DifferentialForm::one_form(vec![e("x2"), e("0")]);
    let mut w = single(4, (0, 1), a.clone());
    w.set(1, 0, a.neg()).unwrap();
    for p in &pts {
        assert!((flatness_residual(&w, std::slice::from_ref(p)).unwrap() - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn potential_commutation_examples() {
    let pts = SampleBox::unit(2).sample(30, 3);
    let spec = FlatFamilySpec {
        family: FlatFamily::SymmetricPotential { phi: e("x1"), c0: dmatrix![1.0, 2.0; 2.0, 0.0] },
        f: e("0"),
        n: 2,
        m: 2,
        eps: Plus,
        mu: Plus,
    };
    let w = family_omega(&spec, &pts, 1e-10).unwrap();
    assert!(potential_commutes(&family_potential(&spec).unwrap(), w.matrix(), &pts).unwrap());

    let s = lambda_matrix(1);
    let mut t = DMatrix::zeros(4, 4);
    t[(0, 1)] = -1.0;
    t[(1, 0)] = 1.0;
    assert!((&s * &t - &t * &s).amax() > 0.5);
    let x = MatrixForm::functions(4, 4, 2, |i, j| {
        &(e("x1") * Expr::constant(0.5 * s[(i, j)])) + &(e("x2") * Expr::constant(t[(i, j)]))
    });
    assert!(!potential_commutes(&x, &x.ext_d(), &pts).unwrap());

    let zero = MatrixForm::zeros(4, 4, 2, 0);
    assert!(potential_commutes(&zero, &zero.ext_d(), &pts).unwrap());
    assert!(matches!(potential_commutes(&zero, &x.ext_d(), &pts), Err(Error::Precondition(_))));
}

fn arb_matrix() -> impl Strategy<Value = MatrixForm> {
    prop::collection::vec(arb_form(1), 16).prop_map(|fs| {
        let mut it = fs.into_iter();
        MatrixForm::from_fn(4, 4, 3, 1, |_, _| it.next().unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn graded_anticommutativity(
        f in (0..3usize).prop_flat_map(arb_form),
        g in (0..3usize).prop_flat_map(arb_form),
        x in point(),
    ) {
        let sign = if f.degree() * g.degree() % 2 == 0 { 1.0 } else { -1.0 };
        let fg = f.wedge(&g).unwrap();
        let gf = g.wedge(&f).unwrap().scale(&Expr::constant(sign));
        prop_assert!(form_gap(&fg, &gf, &x) <= 1e-12);
    }

    #[test]
    fn d_squared_vanishes(f in arb_form(0), g in arb_form(1), x in point()) {
        let h = f.as_scalar();
        let mut scale: f64 = 1.0;
        for i in 1..=3 {
            for j in 1..=3 {
                scale = scale.max(h.partial(i).partial(j).eval(&x).unwrap().abs());
            }
        }
        prop_assert!(f.ext_d().ext_d().max_abs(&x).unwrap() <= 1e-12 * scale);
        let ddg = g.ext_d().ext_d();
        prop_assert!(ddg.is_zero() || ddg.max_abs(&x).unwrap() <= 1e-12);
    }

    #[test]
    fn leibniz(f in arb_form(1), g in arb_form(1), h in arb_form(0), x in point()) {
        let lhs = f.wedge(&g).unwrap().ext_d();
        let rhs = f.ext_d().wedge(&g).unwrap().sub(&f.wedge(&g.ext_d()).unwrap()).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &x) <= 1e-10);
        let lhs = h.wedge(&f).unwrap().ext_d();
        let rhs = h.ext_d().wedge(&f).unwrap().add(&h.wedge(&f.ext_d()).unwrap()).unwrap();
        prop_assert!(form_gap(&lhs, &rhs, &x) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mwedge_is_associative(a in arb_matrix(), b in arb_matrix(), c in arb_matrix(), x in point()) {
        let l = a.mwedge(&b).unwrap().mwedge(&c).unwrap();
        let r = a.mwedge(&b.mwedge(&c).unwrap()).unwrap();
        let scale = l.max_abs(&x).unwrap().max(1.0);
        prop_assert!(l.sub(&r).unwrap().max_abs(&x).unwrap() <= 1e-10 * scale);
    }
}

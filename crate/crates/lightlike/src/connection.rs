//! Connection forms of metric connections and the tests built on them:
//! factorization of `∇J`, fully light-like bivector derivatives, Walker
//! distributions, horizontal gauges, and the square norm of `∇J`.
//!
//! Convention: `∇e_j = Σ_i e_i ω^i_j`, so entry `(i, j)` of the matrix is
//! `ω^i_j`. Indices in public helpers are 1-based.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::exterior::{DifferentialForm, MatrixForm};
use crate::neutral::metric;
use crate::sampling;
use crate::structures::{
    i_prime, nilpotent_frame_matrix, omega_basis, paracomplex_frame_matrix, related_nilpotent_frame_matrix, Bivector,
    FrameField, Sign,
};

/// `ω` as a `4n × 4n` matrix of 1-forms on `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    n: usize,
    omega: MatrixForm,
}

impl ConnectionForm {
    pub fn new(omega: MatrixForm) -> Result<Self> {
        if omega.degree() != 1 || omega.rows() != omega.cols() || !omega.rows().is_multiple_of(4) || omega.rows() == 0 {
            return Err(Error::DimensionMismatch("connection form must be a 4n×4n matrix of 1-forms".into()));
        }
        Ok(ConnectionForm { n: omega.rows() / 4, omega })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        ConnectionForm { n, omega: MatrixForm::zeros(4 * n, 4 * n, m, 1) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn matrix(&self) -> &MatrixForm {
        &self.omega
    }

    /// `ω^i_j`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> &DifferentialForm {
        self.omega.get(i - 1, j - 1)
    }

    /// Direction matrices `ω(∂_1), …, ω(∂_m)` at `p`.
    pub fn sample(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.omega.eval_one_forms(p)
    }

    /// `max ‖G ω_k + ᵗω_k G‖∞`: antisymmetric within each signature block,
    /// symmetric across.
    pub fn compatibility_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let g = metric(self.n);
        sampling::try_max(points, |p| {
            Ok(self.sample(p)?.iter().map(|w| (&g * w + w.transpose() * &g).amax()).fold(0.0, f64::max))
        })
    }

    pub fn check_compatible(&self, points: &[Vec<f64>], tol: f64) -> Result<()> {
        let r = self.compatibility_residual(points)?;
        if r > tol {
            return Err(Error::Precondition(format!("ω is not metric compatible (residual {r:e})")));
        }
        Ok(())
    }

    /// Connection form in the frame `e T`: `T⁻¹ ω T + T⁻¹ dT`, with
    /// `T⁻¹ = G ᵗT G` for a pseudo-orthonormal `T`.
    pub fn gauge(&self, t: &MatrixForm) -> Result<ConnectionForm> {
        let g = MatrixForm::constant(&metric(self.n), self.dim());
        let tinv = g.mwedge(&t.transpose())?.mwedge(&g)?;
        let conj = tinv.mwedge(&self.omega)?.mwedge(t)?;
        ConnectionForm::new(conj.add(&tinv.mwedge(&t.ext_d())?)?)
    }

    /// `I′ ω I′`: the connection form in the frame `e I′_{4n,ε}`.
    pub fn conjugate_i_prime(&self, eps: Sign) -> ConnectionForm {
        let c = MatrixForm::constant(&i_prime(self.n, eps), self.dim());
        let w = c.mwedge(&self.omega).and_then(|x| x.mwedge(&c)).expect("shapes agree");
        ConnectionForm { n: self.n, omega: w }
    }
}

/// Components of `∇K` in the frame: `dK + ωK − Kω`.
pub fn endo_cov_deriv(omega: &ConnectionForm, k: &MatrixForm) -> Result<MatrixForm> {
    if k.degree() != 0 || k.rows() != 4 * omega.n() || k.cols() != k.rows() || k.dim() != omega.dim() {
        return Err(Error::DimensionMismatch("K must be a 4n×4n matrix of functions on the same base".into()));
    }
    k.ext_d().add(&omega.matrix().mwedge(k)?)?.sub(&k.mwedge(omega.matrix())?)
}

/// `[ω_k, K]` for each direction at `p`, for a constant frame matrix `K`.
pub fn endo_cov_deriv_at(omega: &ConnectionForm, k: &DMatrix<f64>, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    Ok(omega.sample(p)?.iter().map(|w| w * k - k * w).collect())
}

fn s_i(i: usize, eps: Sign) -> f64 {
    if i == 1 {
        eps.value()
    } else {
        1.0
    }
}

/// Outcome of testing `∇J = α ⊗ N` with `N` related to `J` by `(e, ν)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    pub eps: Sign,
    pub nu: Sign,
    /// `ω^{n+1}_{2n+1} + ε ω^{3n+1}_1`.
    pub alpha: DifferentialForm,
    /// Frame matrix of `N`; `e(ν)` is admissible for it.
    pub n_frame: DMatrix<f64>,
    /// Worst deviation in each of the three groups of connection-form equations.
    pub line_residuals: [f64; 3],
    /// `sup ‖∇J − α ⊗ N‖`.
    pub residual: f64,
    /// `sup ‖∇_k J − β_k N‖` with `β_k` the least-squares multiple at each point.
    pub fit_residual: f64,
    pub holds: bool,
}

/// The connection-form equations characterizing `∇J = α ⊗ N`, as residual forms.
pub fn factorization_lines(omega: &ConnectionForm, eps: Sign, nu: Sign) -> Result<[Vec<DifferentialForm>; 3]> {
    let n = omega.n();
    let w = |i: usize, j: usize| omega.entry(i, j).clone();
    let alpha = w(n + 1, 2 * n + 1).add(&w(3 * n + 1, 1).scale(&Expr::constant(eps.value())))?;
    let zero = DifferentialForm::zero(omega.dim(), 1);
    let (mut l1, mut l2, mut l3) = (vec![], vec![], vec![]);
    for i in 1..=n {
        for j in 1..=n {
            let (si, sj) = (s_i(i, eps), s_i(j, eps));
            let ad = if i == j { alpha.clone() } else { zero.clone() };
            let a = w(n + i, j).add(&w(3 * n + i, 2 * n + j).scale(&Expr::constant(si)))?;
            l1.push(a.scale(&Expr::constant(nu.value())).sub(&ad)?);
            let b = w(n + i, 2 * n + j).add(&w(3 * n + i, j).scale(&Expr::constant(si)))?;
            l1.push(b.sub(&ad)?);
            l2.push(w(i, j).sub(&w(2 * n + i, 2 * n + j))?);
            l2.push(w(i, 2 * n + j).sub(&w(2 * n + i, j))?);
            let c = Expr::constant(si * sj);
            l3.push(w(n + i, n + j).sub(&w(3 * n + i, 3 * n + j).scale(&c))?);
            l3.push(w(n + i, 3 * n + j).sub(&w(3 * n + i, n + j).scale(&c))?);
        }
    }
    Ok([l1, l2, l3])
}

fn forms_sup(forms: &[DifferentialForm], points: &[Vec<f64>]) -> Result<f64> {
    sampling::try_max(points, |p| {
        let mut r: f64 = 0.0;
        for f in forms {
            r = r.max(f.max_abs(p)?);
        }
        Ok(r)
    })
}

/// Test `∇J = α ⊗ N` for the `ε`-paracomplex `J` whose admissible frame
/// carries `ω`, with `N` related to `J` by `(e, ν)`.
pub fn factorization_check(
    omega: &ConnectionForm,
    eps: Sign,
    nu: Sign,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<FactorizationReport> {
    omega.check_compatible(points, tol)?;
    let n = omega.n();
    let lines = factorization_lines(omega, eps, nu)?;
    let mut line_residuals = [0.0; 3];
    for (r, l) in line_residuals.iter_mut().zip(&lines) {
        *r = forms_sup(l, points)?;
    }
    let alpha = omega.entry(n + 1, 2 * n + 1).add(&omega.entry(3 * n + 1, 1).scale(&Expr::constant(eps.value())))?;
    let kj = paracomplex_frame_matrix(n, eps);
    let nf = related_nilpotent_frame_matrix(n, eps, nu);
    let nn = nf.norm_squared();
    let pointwise = sampling::try_map(points, |p| {
        let a = alpha.eval_one_form(p)?;
        let mut direct: f64 = 0.0;
        let mut fit: f64 = 0.0;
        for (k, d) in endo_cov_deriv_at(omega, &kj, p)?.iter().enumerate() {
            direct = direct.max((d - &nf * a[k]).amax());
            let beta = d.dot(&nf) / nn;
            fit = fit.max((d - &nf * beta).amax());
        }
        Ok((direct, fit))
    })?;
    let residual = pointwise.iter().map(|r| r.0).fold(0.0, f64::max);
    let fit_residual = pointwise.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(FactorizationReport {
        eps,
        nu,
        alpha,
        n_frame: nf,
        line_residuals,
        residual,
        fit_residual,
        holds: line_residuals.iter().all(|&r| r <= tol),
    })
}

/// For `n = 1`: `ω³₂ + εω⁴₁ − μ(ω⁴₃ + εω²₁)`.
pub fn relation_32_41(omega: &ConnectionForm, eps: Sign, mu: Sign) -> Result<DifferentialForm> {
    need_n1(omega)?;
    let e = Expr::constant(eps.value());
    let lhs = omega.entry(3, 2).add(&omega.entry(4, 1).scale(&e))?;
    let rhs = omega.entry(4, 3).add(&omega.entry(2, 1).scale(&e))?;
    lhs.sub(&rhs.scale(&Expr::constant(mu.value())))
}

fn need_n1(omega: &ConnectionForm) -> Result<()> {
    if omega.n() != 1 {
        return Err(Error::Precondition(format!("operation needs n = 1, got n = {}", omega.n())));
    }
    Ok(())
}

/// `∇̂Ω` in the frame for a bivector given by its antisymmetric component
/// matrix (functions): `dB + ωB + B ᵗω`.
pub fn bivector_cov_deriv(omega: &ConnectionForm, b: &MatrixForm) -> Result<MatrixForm> {
    need_n1(omega)?;
    if b.degree() != 0 || b.rows() != 4 || b.cols() != 4 {
        return Err(Error::DimensionMismatch("bivector must be a 4×4 matrix of functions".into()));
    }
    b.ext_d().add(&omega.matrix().mwedge(b)?)?.add(&b.mwedge(&omega.matrix().transpose())?)
}

/// `∇̂_{∂_k} Ω` at `p` for constant frame components `b`.
pub fn bivector_cov_deriv_at(omega: &ConnectionForm, b: &Bivector, p: &[f64]) -> Result<Vec<Bivector>> {
    Ok(omega.sample(p)?.iter().map(|w| Bivector(w * &b.0 + &b.0 * w.transpose())).collect())
}

/// Result of the fully light-like test for `Ω = Ω_{ε,2}` in the frame of `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct LightlikeReport {
    pub fully_lightlike: bool,
    /// Largest `|ĥ(∇̂_X Ω, ∇̂_Y Ω)|` over coordinate directions and points.
    pub null_residual: f64,
    /// Smallest pointwise sup-norm of `∇̂Ω`.
    pub min_derivative: f64,
    /// The sign in `ω³₂ + εω⁴₁ = μ(ω⁴₃ + εω²₁)`; `None` when the test fails
    /// or no sample point decides it.
    pub mu: Option<Sign>,
    /// `ω³₂ + εω⁴₁`.
    pub alpha: DifferentialForm,
    /// Frame components of `Ω₀ = Ω_{−ε,1} + μΩ_{ε,3}` when `μ` is known.
    pub omega0: Option<Bivector>,
    /// `sup ‖∇̂Ω − α ⊗ Ω₀‖` when `μ` is known.
    pub factor_residual: Option<f64>,
}

pub fn fully_lightlike_check(
    omega: &ConnectionForm,
    eps: Sign,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<LightlikeReport> {
    need_n1(omega)?;
    let id = DMatrix::identity(4, 4);
    let big_omega = omega_basis(&id, eps, 2)?;
    let e = eps.value();
    let per_point = sampling::try_map(points, |p| {
        let ws = omega.sample(p)?;
        let ds = bivector_cov_deriv_at(omega, &big_omega, p)?;
        let mut null: f64 = 0.0;
        for a in &ds {
            for b in &ds {
                null = null.max(a.hhat(b).abs());
            }
        }
        let size = ds.iter().map(Bivector::amax).fold(0.0, f64::max);
        // Admissible μ at this point: bit 0 for +, bit 1 for −.
        let mut signs = 0b11u8;
        for w in &ws {
            let a = w[(2, 1)] + e * w[(3, 0)];
            let b = w[(3, 2)] + e * w[(1, 0)];
            if a.abs() > 10.0 * tol || b.abs() > 10.0 * tol {
                let mut here = 0u8;
                if (a - b).abs() <= tol {
                    here |= 0b01;
                }
                if (a + b).abs() <= tol {
                    here |= 0b10;
                }
                signs &= here;
                if here == 0 {
                    signs = 0b100;
                    break;
                }
            }
        }
        Ok((null, size, signs))
    })?;
    let null_residual = per_point.iter().map(|r| r.0).fold(0.0, f64::max);
    let min_derivative = per_point.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let alpha = omega.entry(3, 2).add(&omega.entry(4, 1).scale(&Expr::constant(e)))?;
    let lightlike = null_residual <= tol && min_derivative > tol;
    let mut report = LightlikeReport {
        fully_lightlike: lightlike,
        null_residual,
        min_derivative,
        mu: None,
        alpha,
        omega0: None,
        factor_residual: None,
    };
    if !lightlike {
        return Ok(report);
    }
    if per_point.iter().any(|r| r.2 == 0b100) {
        report.fully_lightlike = false;
        return Ok(report);
    }
    let common = per_point.iter().fold(0b11u8, |acc, r| acc & r.2);
    let mu = match common {
        0b01 | 0b11 => Sign::Plus,
        0b10 => Sign::Minus,
        _ => return Err(Error::MixedSign),
    };
    let o0 = omega_basis(&id, eps.flip(), 1)?.add(&omega_basis(&id, eps, 3)?.scale(mu.value()));
    let fr = sampling::try_max(points, |p| {
        let a = report.alpha.eval_one_form(p)?;
        let ds = bivector_cov_deriv_at(omega, &big_omega, p)?;
        Ok(ds.iter().zip(a).map(|(d, ak)| (&d.0 - &o0.0 * ak).amax()).fold(0.0, f64::max))
    })?;
    report.mu = Some(mu);
    report.omega0 = Some(o0);
    report.factor_residual = Some(fr);
    Ok(report)
}

/// `ω⁴₂ − εω³₁` (`n = 1`).
pub fn horizontality_form(omega: &ConnectionForm, eps: Sign) -> Result<DifferentialForm> {
    need_n1(omega)?;
    omega.entry(4, 2).sub(&omega.entry(3, 1).scale(&Expr::constant(eps.value())))
}

/// Whether `d(ω⁴₂ − εω³₁)` vanishes on the points.
pub fn horizontality_check(omega: &ConnectionForm, eps: Sign, points: &[Vec<f64>], tol: f64) -> Result<bool> {
    let d = horizontality_form(omega, eps)?.ext_d();
    Ok(forms_sup(&[d], points)? <= tol)
}

/// Boost in the `(e_2, e_4)` plane by `f`.
pub fn boost24(f: &Expr, m: usize) -> MatrixForm {
    let (c, s) = (f.cosh(), f.sinh());
    MatrixForm::functions(4, 4, m, |i, j| match (i, j) {
        (0, 0) | (2, 2) => Expr::one(),
        (1, 1) | (3, 3) => c.clone(),
        (1, 3) | (3, 1) => s.clone(),
        _ => Expr::zero(),
    })
}

/// Frame and connection form after the boost making `Ω₀` horizontal.
/// Requires `ω⁴₂ − εω³₁ = −df` on the points.
pub fn gauge_horizontal(
    frame: &FrameField,
    omega: &ConnectionForm,
    eps: Sign,
    f: &Expr,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<(FrameField, ConnectionForm)> {
    need_n1(omega)?;
    let m = omega.dim();
    let gap = horizontality_form(omega, eps)?.add(&DifferentialForm::exact(m, f))?;
    let r = forms_sup(&[gap], points)?;
    if r > tol {
        return Err(Error::Precondition(format!("ω⁴₂ − εω³₁ differs from −df by {r:e}")));
    }
    let t = boost24(f, m);
    let e = FrameField::new(frame.matrix().mwedge(&t)?)?;
    Ok((e, omega.gauge(&t)?))
}

/// Light-like generators `ξ_1..ξ_2n` as frame components (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerDistribution {
    pub generators: MatrixForm,
}

impl WalkerDistribution {
    pub fn constant(v: &DMatrix<f64>, m: usize) -> Self {
        WalkerDistribution { generators: MatrixForm::constant(v, m) }
    }

    /// The span of `e(ν) I′ ξ`, i.e. the generators for `N` related by `(e, ν)`.
    pub fn of_related(n: usize, eps: Sign, nu: Sign, m: usize) -> Self {
        let v = crate::structures::d_mu(n, nu) * i_prime(n, eps) * crate::neutral::xi_basis(n);
        Self::constant(&v, m)
    }

    pub fn isotropy_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let n = self.generators.rows() / 4;
        let g = metric(n);
        sampling::try_max(points, |p| {
            let v = self.generators.eval_functions(p)?;
            Ok((v.transpose() * &g * &v).amax())
        })
    }
}

/// `max |h(∇_k ξ_a, ξ_b)|` over directions, pairs and points.
pub fn walker_residual(omega: &ConnectionForm, d: &WalkerDistribution, points: &[Vec<f64>]) -> Result<f64> {
    let g = metric(omega.n());
    let dv = d.generators.ext_d();
    sampling::try_max(points, |p| {
        let v = d.generators.eval_functions(p)?;
        let mut r: f64 = 0.0;
        for (k, w) in omega.sample(p)?.iter().enumerate() {
            let nabla = w * &v + dv.eval_direction(p, k + 1)?;
            r = r.max((v.transpose() * &g * nabla).amax());
        }
        Ok(r)
    })
}

pub fn walker_check(omega: &ConnectionForm, d: &WalkerDistribution, points: &[Vec<f64>], tol: f64) -> Result<bool> {
    Ok(walker_residual(omega, d, points)? <= tol)
}

/// The three families `h(∇ξ_i, ξ_j)`, `h(∇ξ_i, ξ_{n+j})`, `h(∇ξ_{n+i}, ξ_{n+j})`
/// written directly in terms of `ω` for the generators of `e(μ)`, at one
/// direction matrix `w`. Returned as a `2n × 2n` matrix indexed `(a, b)` for
/// `h(∇ξ_a, ξ_b)`, filled where the closed forms apply.
pub fn walker_closed_forms(w: &DMatrix<f64>, n: usize, eps: Sign, mu: Sign) -> DMatrix<f64> {
    let mu = mu.value();
    let om = |i: usize, j: usize| w[(i - 1, j - 1)];
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 1..=n {
        for j in 1..=n {
            let (si, sj) = (s_i(i, eps), s_i(j, eps));
            h[(i - 1, j - 1)] = om(j, i) - mu * om(j, 2 * n + i) + mu * om(2 * n + j, i) - om(2 * n + j, 2 * n + i);
            h[(i - 1, n + j - 1)] =
                om(n + j, i) - mu * om(n + j, 2 * n + i) - mu * sj * om(3 * n + j, i) + sj * om(3 * n + j, 2 * n + i);
            h[(n + i - 1, n + j - 1)] = om(n + j, n + i) + mu * si * om(n + j, 3 * n + i)
                - mu * sj * om(3 * n + j, n + i)
                - si * sj * om(3 * n + j, 3 * n + i);
        }
    }
    h
}

/// Result of turning a Walker distribution into a paracomplex structure.
#[derive(Clone, Debug)]
pub struct WalkerParacomplex {
    /// Frame change `T(h)` from the admissible frame of `N` (after the `I′` conjugation for `ε = −`).
    pub change: MatrixForm,
    /// Connection form in the modified frame.
    pub omega: ConnectionForm,
    pub eps: Sign,
    /// `ω̃³₂ + ω̃⁴₁` in the `+`-normalized modified frame.
    pub alpha: DifferentialForm,
    /// The same form from `h` and the original `ω`.
    pub alpha_closed_form: DifferentialForm,
    /// Factorization of `∇J` for `J` with admissible frame the modified frame.
    pub factorization: FactorizationReport,
    /// Walker residual of the original distribution in the modified frame.
    pub distribution_residual: f64,
}

/// The frame change with entries in `h` that keeps `N` admissible.
pub fn walker_frame_change(h: &Expr, m: usize) -> MatrixForm {
    let h2 = h.powi(2) * Expr::constant(0.5);
    MatrixForm::functions(4, 4, m, |i, j| match (i, j) {
        (0, 0) | (2, 2) => Expr::one(),
        (1, 1) => &h2 + Expr::one(),
        (1, 2) | (2, 1) | (3, 2) => h.clone(),
        (1, 3) => -&h2,
        (2, 3) => -h,
        (3, 1) => h2.clone(),
        (3, 3) => Expr::one() - &h2,
        _ => Expr::zero(),
    })
}

/// Build `J` with `∇J = α ⊗ N` and `𝒟_J = 𝒟` for a Walker distribution
/// `𝒟 = π_N`, `n = 1`, where `ω` is taken in an admissible frame of the
/// `ε`-nilpotent `N`. `hfn` must make `α` nonzero at every sample point.
pub fn walker_to_paracomplex(
    omega: &ConnectionForm,
    eps: Sign,
    hfn: &Expr,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<WalkerParacomplex> {
    need_n1(omega)?;
    let m = omega.dim();
    let base = omega.conjugate_i_prime(eps);
    let walker = base.entry(3, 2).add(base.entry(4, 1))?.sub(&base.entry(4, 3).add(base.entry(2, 1))?)?;
    let r = forms_sup(&[walker], points)?;
    if r > tol {
        return Err(Error::Precondition(format!("distribution is not Walker (residual {r:e})")));
    }
    let t = walker_frame_change(hfn, m);
    let tilde = base.gauge(&t)?;
    let alpha = tilde.entry(3, 2).add(tilde.entry(4, 1))?;
    let h2 = hfn.powi(2) * Expr::constant(0.5);
    let a = base.entry(3, 2).add(base.entry(4, 1))?;
    let b = base.entry(4, 3).add(base.entry(2, 1))?;
    let c = base.entry(4, 2).sub(base.entry(3, 1))?;
    let alpha_closed_form =
        DifferentialForm::exact(m, hfn).sub(&a.scale(&(&h2 - Expr::one())))?.add(&b.scale(&h2))?.add(&c.scale(hfn))?;
    let weakest = sampling::try_map(points, |p| alpha.max_abs(p))?.into_iter().fold(f64::INFINITY, f64::min);
    if weakest <= tol {
        return Err(Error::Precondition(format!(
            "α = ω̃³₂ + ω̃⁴₁ vanishes on the sample set (min {weakest:e}); choose another h"
        )));
    }
    let factorization = factorization_check(&tilde, Sign::Plus, Sign::Plus, points, tol)?;
    let d = WalkerDistribution::of_related(1, Sign::Plus, Sign::Plus, m);
    let distribution_residual = walker_residual(&tilde, &d, points)?;
    let out = if eps == Sign::Plus { tilde } else { tilde.conjugate_i_prime(eps) };
    Ok(WalkerParacomplex { change: t, omega: out, eps, alpha, alpha_closed_form, factorization, distribution_residual })
}

/// `‖∇J‖² = Σ ε_i ε_j h((∇_{e_i}J)e_j, (∇_{e_i}J)e_j)` at `p`, with the base
/// directions contracted through `base_inverse_metric` (identity if `None`).
pub fn square_norm_at(
    omega: &ConnectionForm,
    eps: Sign,
    base_inverse_metric: Option<&DMatrix<f64>>,
    p: &[f64],
) -> Result<f64> {
    let n = omega.n();
    let g = metric(n);
    let kj = paracomplex_frame_matrix(n, eps);
    let ms = endo_cov_deriv_at(omega, &kj, p)?;
    let m = ms.len();
    let q = |k: usize, l: usize| (ms[k].transpose() * &g * &ms[l] * &g).trace();
    let mut s = 0.0;
    for k in 0..m {
        for l in 0..m {
            let gkl = match base_inverse_metric {
                Some(gi) => gi[(k, l)],
                None => f64::from(k == l),
            };
            if gkl != 0.0 {
                s += gkl * q(k, l);
            }
        }
    }
    Ok(s)
}

/// `‖∇Ω*‖² = Σ ε_iε_jε_k ((∇_{e_i}Ω*)(e_j,e_k))²` with the same base contraction
/// (diagonal base metrics only), computed entry by entry.
pub fn square_norm_triple_sum_at(
    omega: &ConnectionForm,
    eps: Sign,
    base_signs: Option<&[f64]>,
    p: &[f64],
) -> Result<f64> {
    let n = omega.n();
    let d = 4 * n;
    let eps_k = |k: usize| if k < 2 * n { 1.0 } else { -1.0 };
    let kj = paracomplex_frame_matrix(n, eps);
    let mut s = 0.0;
    for (i, w) in omega.sample(p)?.iter().enumerate() {
        let ei = base_signs.map_or(1.0, |b| b[i]);
        let dj = w * &kj - &kj * w;
        for j in 0..d {
            for k in 0..d {
                // (∇Ω*)(e_j, e_k) = −h((∇J)e_j, e_k) = −ε_k (∇J)^k_j.
                let v = -eps_k(k) * dj[(k, j)];
                s += ei * eps_k(j) * eps_k(k) * v * v;
            }
        }
    }
    Ok(s)
}

/// Largest `|‖∇J‖²|` over the points.
pub fn square_norm(
    omega: &ConnectionForm,
    eps: Sign,
    base_inverse_metric: Option<&DMatrix<f64>>,
    points: &[Vec<f64>],
) -> Result<f64> {
    sampling::try_max(points, |p| Ok(square_norm_at(omega, eps, base_inverse_metric, p)?.abs()))
}

/// Frame matrix of the `ε`-nilpotent structure admissible for `e(ν)`.
pub fn nilpotent_for(n: usize, eps: Sign, nu: Sign) -> DMatrix<f64> {
    related_nilpotent_frame_matrix(n, eps, nu)
}

/// Frame matrix of `N` in its own admissible frame.
pub fn nilpotent_admissible(n: usize, eps: Sign) -> DMatrix<f64> {
    nilpotent_frame_matrix(n, eps)
}

//! Explicit flat connection forms: the block families with `∇J = df ⊗ N`
//! in rank `4n`, and the rank-4 families whose `Ω_{±,2}` have fully
//! light-like derivatives. Also frame integration `∂_k E = E ω(∂_k)`.

use nalgebra::DMatrix;

use crate::connection::ConnectionForm;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::exterior::{curvature, flatness_residual, potential_commutes, DifferentialForm, MatrixForm};
use crate::neutral::{expm, lambda_matrix, metric};
use crate::sampling;
use crate::structures::{d_mu, i_prime, Sign};

fn sup_entries(m: &MatrixForm, points: &[Vec<f64>]) -> Result<f64> {
    m.sup_norm(points)
}

/// `ω = K + ½ df Λ_n` with `K` built from `D11` (skew) and `D31` (symmetric)
/// on the diagonal pattern `(D11, ·, D31, · / ·, D11, ·, D31 / …)`.
pub fn build_flat_omega(
    d11: &MatrixForm,
    d31: &MatrixForm,
    f: &Expr,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<ConnectionForm> {
    let n = d11.rows();
    if d11.cols() != n || d31.rows() != n || d31.cols() != n || d11.degree() != 1 || d31.degree() != 1 {
        return Err(Error::DimensionMismatch("D11 and D31 must be n×n matrices of 1-forms".into()));
    }
    let m = d11.dim();
    let skew = sup_entries(&d11.add(&d11.transpose())?, points)?;
    let sym = sup_entries(&d31.sub(&d31.transpose())?, points)?;
    if skew > tol || sym > tol {
        return Err(Error::Precondition(format!("D11 must be skew and D31 symmetric (residuals {skew:e}, {sym:e})")));
    }
    let s1 = d11.ext_d().sub(&d11.mwedge(d11)?)?.sub(&d31.mwedge(d31)?)?;
    let s2 = d31.ext_d().sub(&d31.mwedge(d11)?)?.sub(&d11.mwedge(d31)?)?;
    let structure = sup_entries(&s1, points)?.max(sup_entries(&s2, points)?);
    if structure > tol {
        return Err(Error::Precondition(format!("D11, D31 violate the structure equations (residual {structure:e})")));
    }
    let half_df = DifferentialForm::exact(m, f).scale(&Expr::constant(0.5));
    let mut w = MatrixForm::constant_times(&lambda_matrix(n), &half_df);
    for (bi, bj, src) in
        [(0, 0, d11), (1, 1, d11), (2, 2, d11), (3, 3, d11), (0, 2, d31), (2, 0, d31), (1, 3, d31), (3, 1, d31)]
    {
        for i in 0..n {
            for j in 0..n {
                let cur = w.get(bi * n + i, bj * n + j).clone();
                w.set(bi * n + i, bj * n + j, cur.add(src.get(i, j))?)?;
            }
        }
    }
    ConnectionForm::new(w)
}

/// The four explicit `D11`, `D31` families.
#[derive(Clone, Debug, PartialEq)]
pub enum FlatFamily {
    /// `D11 = 0`, `D31 = dφ C₀` with `C₀` symmetric.
    SymmetricPotential { phi: Expr, c0: DMatrix<f64> },
    /// `D11 = 0`, `D31` tridiagonal with `df₁` on the diagonal and `df₂` beside it.
    Tridiagonal { f1: Expr, f2: Expr },
    /// `D31 = 0`, `D11 = dψ C₀` with `C₀` skew.
    SkewPotential { psi: Expr, c0: DMatrix<f64> },
    /// `D31 = 0`, `D11` block tridiagonal in `C₁`, `C₂` (each 4×4), `n = 4p`.
    QuaternionBlocks { p: usize, a1: Expr, b1: Expr, a2: Expr, b2: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatFamilySpec {
    pub family: FlatFamily,
    pub f: Expr,
    pub n: usize,
    pub m: usize,
    /// Sign of the paracomplex structure.
    pub eps: Sign,
    /// Sign of the relation to `N`.
    pub mu: Sign,
}

fn quaternion_block(a: &Expr, b: &Expr) -> [[Expr; 4]; 4] {
    let z = Expr::zero;
    [[z(), -a, z(), -b], [a.clone(), z(), b.clone(), z()], [z(), -b, z(), -a], [b.clone(), z(), a.clone(), z()]]
}

impl FlatFamilySpec {
    fn validate(&self) -> Result<()> {
        let bad_c0 = |c0: &DMatrix<f64>, sym: f64, what: &str| -> Result<()> {
            if c0.shape() != (self.n, self.n) {
                return Err(Error::DimensionMismatch(format!("C₀ must be {0}×{0}", self.n)));
            }
            if (c0 - c0.transpose() * sym).amax() > 0.0 {
                return Err(Error::Precondition(format!("C₀ must be {what}")));
            }
            Ok(())
        };
        match &self.family {
            FlatFamily::SymmetricPotential { c0, .. } => bad_c0(c0, 1.0, "symmetric"),
            FlatFamily::SkewPotential { c0, .. } => bad_c0(c0, -1.0, "skew"),
            FlatFamily::Tridiagonal { .. } => Ok(()),
            FlatFamily::QuaternionBlocks { p, .. } => {
                if *p == 0 || self.n != 4 * p {
                    return Err(Error::Precondition(format!("quaternion blocks need n = 4p, got n = {}", self.n)));
                }
                Ok(())
            }
        }
    }

    /// `(X11, X31)` with `D11 = dX11`, `D31 = dX31`.
    pub fn block_potentials(&self) -> Result<(MatrixForm, MatrixForm)> {
        self.validate()?;
        let (n, m) = (self.n, self.m);
        let zero = MatrixForm::zeros(n, n, m, 0);
        let scaled = |e: &Expr, c: &DMatrix<f64>| MatrixForm::functions(n, n, m, |i, j| e * &Expr::constant(c[(i, j)]));
        Ok(match &self.family {
            FlatFamily::SymmetricPotential { phi, c0 } => (zero, scaled(phi, c0)),
            FlatFamily::SkewPotential { psi, c0 } => (scaled(psi, c0), zero),
            FlatFamily::Tridiagonal { f1, f2 } => {
                let x31 = MatrixForm::functions(n, n, m, |i, j| match i.abs_diff(j) {
                    0 => f1.clone(),
                    1 => f2.clone(),
                    _ => Expr::zero(),
                });
                (zero, x31)
            }
            FlatFamily::QuaternionBlocks { a1, b1, a2, b2, .. } => {
                let c1 = quaternion_block(a1, b1);
                let c2 = quaternion_block(a2, b2);
                let x11 = MatrixForm::functions(n, n, m, |i, j| match (i / 4).abs_diff(j / 4) {
                    0 => c1[i % 4][j % 4].clone(),
                    1 => c2[i % 4][j % 4].clone(),
                    _ => Expr::zero(),
                });
                (x11, zero)
            }
        })
    }

    /// `C = D_μ I′_ε`; the family for `(ε, μ)` is `C ω C` of the `(+, +)` one.
    pub fn sign_change(&self) -> DMatrix<f64> {
        d_mu(self.n, self.mu) * i_prime(self.n, self.eps)
    }
}

fn internal_wedge_checks(
    spec: &FlatFamilySpec,
    d11: &MatrixForm,
    d31: &MatrixForm,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<()> {
    let fail = |what: &str, r: f64| Err(Error::Precondition(format!("{what} does not vanish (residual {r:e})")));
    match &spec.family {
        FlatFamily::Tridiagonal { .. } => {
            let r = d31.mwedge(d31)?.sup_norm(points)?;
            if r > tol {
                return fail("D31 ∧ D31", r);
            }
        }
        FlatFamily::QuaternionBlocks { a1, b1, a2, b2, .. } => {
            let m = spec.m;
            let block = |a: &Expr, b: &Expr| {
                let q = quaternion_block(a, b);
                MatrixForm::functions(4, 4, m, |i, j| q[i][j].clone()).ext_d()
            };
            let (c1, c2) = (block(a1, b1), block(a2, b2));
            for (name, w) in [
                ("C₁ ∧ C₁", c1.mwedge(&c1)?),
                ("C₂ ∧ C₂", c2.mwedge(&c2)?),
                ("C₁ ∧ C₂ + C₂ ∧ C₁", c1.mwedge(&c2)?.add(&c2.mwedge(&c1)?)?),
                ("D11 ∧ D11", d11.mwedge(d11)?),
            ] {
                let r = w.sup_norm(points)?;
                if r > tol {
                    return fail(name, r);
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// The connection form of a family, with its sign conjugation applied.
pub fn family_omega(spec: &FlatFamilySpec, points: &[Vec<f64>], tol: f64) -> Result<ConnectionForm> {
    let (x11, x31) = spec.block_potentials()?;
    let (d11, d31) = (x11.ext_d(), x31.ext_d());
    internal_wedge_checks(spec, &d11, &d31, points, tol)?;
    let w = build_flat_omega(&d11, &d31, &spec.f, points, tol)?;
    conjugate(&w, &spec.sign_change())
}

fn conjugate(w: &ConnectionForm, c: &DMatrix<f64>) -> Result<ConnectionForm> {
    let cm = MatrixForm::constant(c, w.dim());
    ConnectionForm::new(cm.mwedge(w.matrix())?.mwedge(&cm)?)
}

/// The `so(2n,2n)`-valued potential `x` with `ω = dx`.
pub fn family_potential(spec: &FlatFamilySpec) -> Result<MatrixForm> {
    let (x11, x31) = spec.block_potentials()?;
    let (n, m) = (spec.n, spec.m);
    let half_f = spec.f.clone() * Expr::constant(0.5);
    let l = lambda_matrix(n);
    let x = MatrixForm::functions(4 * n, 4 * n, m, |i, j| {
        let (bi, bj, r, c) = (i / n, j / n, i % n, j % n);
        let k = match (bi, bj) {
            (a, b) if a == b => x11.get(r, c).as_scalar(),
            (0, 2) | (2, 0) | (1, 3) | (3, 1) => x31.get(r, c).as_scalar(),
            _ => Expr::zero(),
        };
        k + &half_f * &Expr::constant(l[(i, j)])
    });
    let cm = MatrixForm::constant(&spec.sign_change(), m);
    cm.mwedge(&x)?.mwedge(&cm)
}

/// How a frame field was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMethod {
    /// `E = E₀ exp(−x(p₀)) exp(x(p))`.
    Exponential,
    /// Fourth-order Runge-Kutta along axis-ordered paths.
    RungeKutta,
}

#[derive(Clone, Debug)]
pub struct IntegratedFrames {
    pub method: FrameMethod,
    pub frames: Vec<DMatrix<f64>>,
    /// `max ‖ᵗEGE − G‖∞` over the frames.
    pub orthonormality: f64,
}

/// Largest step used by the integrator.
pub const MAX_STEP: f64 = 1e-2;

fn rk4_axis(omega: &ConnectionForm, start: &[f64], k: usize, to: f64, e: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let from = start[k];
    let steps = ((to - from).abs() / MAX_STEP).ceil().max(1.0) as usize;
    let h = (to - from) / steps as f64;
    let mut p = start.to_vec();
    let mut e = e;
    let w = omega.matrix();
    let at = |p: &mut Vec<f64>, t: f64| -> Result<DMatrix<f64>> {
        p[k] = t;
        w.eval_direction(p, k + 1)
    };
    for s in 0..steps {
        let t = from + h * s as f64;
        let k1 = &e * at(&mut p, t)?;
        let w_mid = at(&mut p, t + h / 2.0)?;
        let k2 = (&e + &k1 * (h / 2.0)) * &w_mid;
        let k3 = (&e + &k2 * (h / 2.0)) * &w_mid;
        let k4 = (&e + &k3 * h) * at(&mut p, t + h)?;
        e += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(e)
}

/// Transport `e0` from `start` to `end`, moving one coordinate at a time in order.
pub fn transport(omega: &ConnectionForm, start: &[f64], end: &[f64], e0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut p = start.to_vec();
    let mut e = e0.clone();
    for k in 0..p.len() {
        if end[k] != p[k] {
            e = rk4_axis(omega, &p, k, end[k], e)?;
            p[k] = end[k];
        }
    }
    Ok(e)
}

/// `‖E_after − I‖∞` after going around the rectangle with corner `p`
/// and sides `a` along axis `k`, `b` along axis `l` (0-based).
pub fn loop_closure(omega: &ConnectionForm, p: &[f64], k: usize, l: usize, a: f64, b: f64) -> Result<f64> {
    let d = 4 * omega.n();
    let mut e = DMatrix::identity(d, d);
    let mut q = p.to_vec();
    for (axis, delta) in [(k, a), (l, b), (k, -a), (l, -b)] {
        e = rk4_axis(omega, &q, axis, q[axis] + delta, e)?;
        q[axis] += delta;
    }
    Ok((e - DMatrix::identity(d, d)).amax())
}

/// Frames `E(p)` with `E(base) = e0` and `∂_k E = E ω(∂_k)`.
///
/// With a `potential` the closed form is used; it must satisfy `ω = dx`
/// and commute pointwise with `ω`, else `Precondition`.
pub fn frame_integrate(
    omega: &ConnectionForm,
    potential: Option<&MatrixForm>,
    base: &[f64],
    e0: &DMatrix<f64>,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<IntegratedFrames> {
    let flat = flatness_residual(omega.matrix(), points)?;
    if flat > tol {
        return Err(Error::Precondition(format!("ω is not flat (residual {flat:e})")));
    }
    let n = omega.n();
    let g = metric(n);
    if (e0.transpose() * &g * e0 - &g).amax() > tol {
        return Err(Error::Precondition("initial frame is not pseudo-orthonormal".into()));
    }
    let (method, frames) = match potential {
        Some(x) => {
            if !potential_commutes(x, omega.matrix(), points)? {
                return Err(Error::Precondition("potential does not commute with ω".into()));
            }
            let start = e0 * expm(&-x.eval_functions(base)?);
            let frames = sampling::try_map(points, |p| Ok(&start * expm(&x.eval_functions(p)?)))?;
            (FrameMethod::Exponential, frames)
        }
        None => (FrameMethod::RungeKutta, sampling::try_map(points, |p| transport(omega, base, p, e0))?),
    };
    let orthonormality = frames.iter().map(|e| (e.transpose() * &g * e - &g).amax()).fold(0.0, f64::max);
    Ok(IntegratedFrames { method, frames, orthonormality })
}

/// A `4 × 4` connection form from its lower entries, filling the rest by
/// antisymmetry within the signature blocks and symmetry across them.
pub fn assemble_n1(lower: [(usize, usize, DifferentialForm); 6], m: usize) -> Result<ConnectionForm> {
    let mut w = MatrixForm::zeros(4, 4, m, 1);
    for (i, j, f) in lower {
        let same = (i <= 2) == (j <= 2);
        w.set(j - 1, i - 1, if same { f.neg() } else { f.clone() })?;
        w.set(i - 1, j - 1, f)?;
    }
    ConnectionForm::new(w)
}

fn check_dg(g: &Expr, m: usize, points: &[Vec<f64>], tol: f64, name: &str) -> Result<DifferentialForm> {
    let dg = DifferentialForm::exact(m, g);
    let weakest = sampling::try_map(points, |p| dg.max_abs(p))?.into_iter().fold(f64::INFINITY, f64::min);
    if weakest <= tol {
        return Err(Error::Precondition(format!("d{name} vanishes on the sample set (min {weakest:e})")));
    }
    Ok(dg)
}

/// Completion for one side `ε` and the residual of the remaining structure equations.
#[derive(Clone, Debug)]
pub struct SingleSide {
    pub omega: ConnectionForm,
    /// Sup of the three structure-equation residuals for `ω²₁`, `ω³₁`, `ω³₂`.
    pub residual: f64,
    /// `e^{μf} dg`.
    pub alpha: DifferentialForm,
}

/// Complete `ω` from `ω²₁, ω³₁, ω³₂` and `f^ε, g^ε` so that `Ω_{ε,2}` has
/// `∇̂Ω = e^{μf} dg ⊗ Ω₀` once the remaining structure equations hold.
#[allow(clippy::too_many_arguments)]
pub fn single_eps_omega(
    f: &Expr,
    g: &Expr,
    w21: &DifferentialForm,
    w31: &DifferentialForm,
    w32: &DifferentialForm,
    mu: Sign,
    eps: Sign,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<SingleSide> {
    let m = w21.dim();
    let dg = check_dg(g, m, points, tol, "g")?;
    let df = DifferentialForm::exact(m, f);
    let (e, u) = (Expr::constant(eps.value()), Expr::constant(mu.value()));
    let emf = (&u * f).exp();
    let alpha = dg.scale(&emf);
    let w41 = alpha.scale(&e).sub(&w32.scale(&e))?;
    let w42 = w31.scale(&e).sub(&df)?;
    let w43 = alpha.scale(&u).sub(&w21.scale(&e))?;
    let omega = assemble_n1(
        [(2, 1, w21.clone()), (3, 1, w31.clone()), (3, 2, w32.clone()), (4, 1, w41), (4, 2, w42), (4, 3, w43)],
        m,
    )?;
    let two = Expr::constant(2.0);
    let eu = &e * &u;
    let r1 = w21
        .ext_d()
        .sub(&w31.wedge(w32)?.scale(&two))?
        .add(&w31.wedge(&dg)?.scale(&emf))?
        .sub(&w32.wedge(&df)?.scale(&e))?
        .sub(&df.wedge(&dg)?.scale(&(&e * &emf)))?;
    let r2 = w31
        .ext_d()
        .sub(&w21.wedge(w32)?.scale(&two))?
        .add(&w21.wedge(&dg)?.scale(&emf))?
        .sub(&w32.wedge(&dg)?.scale(&(&eu * &emf)))?;
    let r3 = w32
        .ext_d()
        .add(&w21.wedge(w31)?.scale(&two))?
        .sub(&w21.wedge(&df)?.scale(&e))?
        .add(&w31.wedge(&dg)?.scale(&(&eu * &emf)))?
        .sub(&df.wedge(&dg)?.scale(&(&u * &emf)))?;
    let residual = sampling::try_max(points, |p| Ok(r1.max_abs(p)?.max(r2.max_abs(p)?).max(r3.max_abs(p)?)))?;
    Ok(SingleSide { omega, residual, alpha })
}

/// Which of the two relation sets a pair solution satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `ω⁴₁ = μω²₁`, `ω⁴₃ = μω³₂`.
    A,
    /// `ω³₂ = μω²₁`, `ω⁴₃ = μω⁴₁`.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchClass {
    A,
    B,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub f_plus: Expr,
    pub f_minus: Expr,
    pub g_plus: Expr,
    pub g_minus: Expr,
    pub branch: Branch,
    pub mu: Sign,
    pub m: usize,
}

impl PairSpec {
    /// `μ_ε` in `ω³₂ + εω⁴₁ = μ_ε(ω⁴₃ + εω²₁)`: `μ` for `ε = +`; for `ε = −`,
    /// `μ` in branch A and `−μ` in branch B.
    pub fn mu_for(&self, eps: Sign) -> Sign {
        match (eps, self.branch) {
            (Sign::Minus, Branch::B) => self.mu.flip(),
            _ => self.mu,
        }
    }

    /// `α^ε = e^{μ_ε f^ε} dg^ε`.
    pub fn alpha(&self, eps: Sign) -> DifferentialForm {
        let (f, g) = match eps {
            Sign::Plus => (&self.f_plus, &self.g_plus),
            Sign::Minus => (&self.f_minus, &self.g_minus),
        };
        let mu = Expr::constant(self.mu_for(eps).value());
        DifferentialForm::exact(self.m, g).scale(&(&mu * f).exp())
    }
}

/// The rank-4 connection form with both `Ω_{±,2}` fully light-like.
pub fn pair_omega(spec: &PairSpec, points: &[Vec<f64>], tol: f64) -> Result<ConnectionForm> {
    let m = spec.m;
    check_dg(&spec.g_plus, m, points, tol, "g⁺")?;
    check_dg(&spec.g_minus, m, points, tol, "g⁻")?;
    let (dfp, dfm) = (DifferentialForm::exact(m, &spec.f_plus), DifferentialForm::exact(m, &spec.f_minus));
    let half = Expr::constant(0.5);
    let w31 = dfp.sub(&dfm)?.scale(&half);
    let w42 = dfp.add(&dfm)?.scale(&Expr::constant(-0.5));
    let mu = Expr::constant(spec.mu.value());
    let a = spec.alpha(Sign::Plus);
    let b = spec.alpha(Sign::Minus);
    let (sum, diff) = (a.add(&b)?.scale(&half), a.sub(&b)?.scale(&half));
    let (w21, w32, w41, w43) = match spec.branch {
        Branch::A => (diff.scale(&mu), sum.clone(), diff, sum.scale(&mu)),
        Branch::B => (sum.scale(&mu), sum, diff.clone(), diff.scale(&mu)),
    };
    assemble_n1([(2, 1, w21), (3, 1, w31), (3, 2, w32), (4, 1, w41), (4, 2, w42), (4, 3, w43)], m)
}

/// Classify a rank-4 `ω` by the relation set it satisfies for `μ`.
pub fn branch_classify(omega: &ConnectionForm, mu: Sign, points: &[Vec<f64>], tol: f64) -> Result<BranchClass> {
    if omega.n() != 1 {
        return Err(Error::Precondition("branch classification needs n = 1".into()));
    }
    let u = Expr::constant(mu.value());
    let w = |i, j| omega.entry(i, j).clone();
    let sup = |f: DifferentialForm| sampling::try_max(points, |p| f.max_abs(p));
    let a = sup(w(4, 1).sub(&w(2, 1).scale(&u))?)?.max(sup(w(4, 3).sub(&w(3, 2).scale(&u))?)?);
    let b = sup(w(3, 2).sub(&w(2, 1).scale(&u))?)?.max(sup(w(4, 3).sub(&w(4, 1).scale(&u))?)?);
    Ok(match (a <= tol, b <= tol) {
        (true, true) => BranchClass::Both,
        (true, false) => BranchClass::A,
        (false, true) => BranchClass::B,
        (false, false) => BranchClass::Neither,
    })
}

/// Sup-norm of the curvature `dω + ω∧ω`.
pub fn curvature_residual(omega: &ConnectionForm, points: &[Vec<f64>]) -> Result<f64> {
    curvature(omega.matrix())?.sup_norm(points)
}

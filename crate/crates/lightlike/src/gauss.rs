//! Time-like minimal surfaces in `E^3_1` built from pairs of null curves,
//! their conformal Gauss maps into `S^4_2 ⊂ E^5_2`, and the connection
//! form of the adapted frame `(e_1, e_2, e_3, e_4)` of `F^*TS^4_2`.
//!
//! Ambient derivatives come from two-variable jets, so they are exact up
//! to rounding. The surface parameter is `(u, v) = (x1, x2)`.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::connection::{
    factorization_check, fully_lightlike_check, walker_check, ConnectionForm, LightlikeReport, WalkerDistribution,
};
use crate::error::{Error, Result};
use crate::expr::{Expr, Jet1, Jet2, Scalar};
use crate::exterior::DifferentialForm;
use crate::generators::{branch_classify, BranchClass};
use crate::sampling::{self, SampleBox};
use crate::structures::Sign;

/// `⟨a, b⟩` on `E^3_1`, signature `(+, +, −)`.
pub fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// `⟨a, b⟩` on `E^5_2`, signature `(+, +, +, −, −)`.
pub fn dot5<T: Scalar>(a: &[T; 5], b: &[T; 5]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3] - a[4] * b[4]
}

fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn embed<T: Scalar>(p: &[T; 3]) -> [T; 5] {
    let q = dot3(p, p);
    let half = T::constant(0.5);
    [(q - T::constant(1.0)) * half, p[0], p[1], p[2], (q + T::constant(1.0)) * half]
}

/// The point of the light cone `L ∩ {x⁵ = x¹ + 1}` representing `p`.
pub fn lightcone_embed(p: &[f64; 3]) -> [f64; 5] {
    embed(p)
}

/// Conformal factors at or below this are treated as a degenerate metric.
pub const DEGENERATE: f64 = 1e-12;

/// The constant light-like normal `ν` with `⟨ν, ι̂⟩ = −1`.
pub const NU: [f64; 5] = [1.0, 0.0, 0.0, 0.0, 1.0];

/// A curve `t ↦ A(t)` in `E^3_1` with `⟨A′, A′⟩ = 0`; `t` is written `x1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NullCurve {
    components: [Expr; 3],
}

impl NullCurve {
    /// Validates nullity at `params` within `tol`.
    pub fn new(components: [Expr; 3], params: &[f64], tol: f64) -> Result<Self> {
        if components.iter().any(|c| c.max_coordinate() > 1) {
            return Err(Error::DimensionMismatch("null curves depend on x1 only".into()));
        }
        let c = NullCurve { components };
        let r = c.null_residual(params)?;
        if r > tol {
            return Err(Error::Precondition(format!("curve is not null (|⟨A′, A′⟩| up to {r:e})")));
        }
        Ok(c)
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.components
    }

    pub fn velocity(&self, t: f64) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.partial(1).eval(&[t])?;
        }
        Ok(out)
    }

    pub fn null_residual(&self, params: &[f64]) -> Result<f64> {
        params.iter().try_fold(0.0f64, |acc, &t| {
            let a = self.velocity(t)?;
            Ok(acc.max(dot3(&a, &a).abs()))
        })
    }
}

/// `ι(u, v) = A(u + v) + B(u − v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimelikeMinimalSurface {
    iota: [Expr; 3],
    iota_u: [Expr; 3],
    iota_v: [Expr; 3],
    domain: SampleBox,
}

/// Build `ι` from two null curves; `⟨A′(u+v), B′(u−v)⟩ > tol` is validated on `samples`.
pub fn surface_from_null_curves(
    a: &NullCurve,
    b: &NullCurve,
    domain: SampleBox,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<TimelikeMinimalSurface> {
    if domain.dim() != 2 {
        return Err(Error::DimensionMismatch("surface domains are 2-dimensional".into()));
    }
    let (u, v) = (Expr::coord(1), Expr::coord(2));
    let (plus, minus) = (&u + &v, &u - &v);
    let mut iota = [Expr::zero(), Expr::zero(), Expr::zero()];
    for (k, slot) in iota.iter_mut().enumerate() {
        *slot = a.components[k].substitute(std::slice::from_ref(&plus))?
            + b.components[k].substitute(std::slice::from_ref(&minus))?;
    }
    for p in samples {
        let (s, d) = (p[0] + p[1], p[0] - p[1]);
        let (va, vb) = (a.velocity(s)?, b.velocity(d)?);
        let nulls = dot3(&va, &va).abs().max(dot3(&vb, &vb).abs());
        if nulls > tol {
            return Err(Error::Precondition(format!("null curve condition fails by {nulls:e} at {p:?}")));
        }
        let c = dot3(&va, &vb);
        if c <= tol {
            return Err(Error::Precondition(format!("⟨A′, B′⟩ = {c:e} ≤ 0 at {p:?}: surface is not time-like")));
        }
    }
    let iota_u = iota.clone().map(|e| e.partial(1));
    let iota_v = iota.clone().map(|e| e.partial(2));
    Ok(TimelikeMinimalSurface { iota, iota_u, iota_v, domain })
}

/// Everything the pipeline needs at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    pub iota: [f64; 3],
    pub iota_u: [f64; 3],
    pub iota_v: [f64; 3],
    pub iota_uu: [f64; 3],
    pub iota_uv: [f64; 3],
    pub iota_vv: [f64; 3],
    /// `e^{2λ} = ⟨ι_u, ι_u⟩`.
    pub conformal_factor: f64,
    pub lambda: f64,
    pub l: f64,
    pub m: f64,
    /// `(m² − l²) e^{−4λ}`.
    pub k: f64,
    /// `−e^{−2λ}(λ_uu − λ_vv)`, the curvature of `g^M` from `λ` alone.
    pub k_intrinsic: f64,
    pub normal: [f64; 3],
    pub normal_u: [f64; 3],
    pub normal_v: [f64; 3],
    pub f: [f64; 5],
    pub f_u: [f64; 5],
    pub f_v: [f64; 5],
    pub iota_hat: [f64; 5],
    pub iota_hat_u: [f64; 5],
    pub iota_hat_v: [f64; 5],
    /// `(e_1, e_2, e_3, e_4)` and their `u`, `v` derivatives, present when `K^M < 0`.
    pub frame: Option<FramePoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramePoint {
    pub e: [[f64; 5]; 4],
    pub de: [[[f64; 5]; 4]; 2],
}

fn values<const N: usize>(x: &[Jet1; N]) -> [f64; N] {
    x.map(|j| j.v)
}

fn grads<const N: usize>(x: &[Jet1; N], k: usize) -> [f64; N] {
    x.map(|j| j.g[k])
}

impl TimelikeMinimalSurface {
    pub fn iota(&self) -> &[Expr; 3] {
        &self.iota
    }

    pub fn domain(&self) -> &SampleBox {
        &self.domain
    }

    /// Exact derivative data at `p = (u, v)`.
    pub fn point(&self, p: &[f64]) -> Result<SurfacePoint> {
        if p.len() != 2 {
            return Err(Error::DimensionMismatch("surface points are (u, v)".into()));
        }
        let vars = [Jet2::variable(p[0], 0), Jet2::variable(p[1], 1)];
        let ev = |es: &[Expr; 3]| -> Result<[Jet2; 3]> {
            Ok([es[0].eval_with(&vars)?, es[1].eval_with(&vars)?, es[2].eval_with(&vars)?])
        };
        let (x, xu, xv) = (ev(&self.iota)?, ev(&self.iota_u)?, ev(&self.iota_v)?);

        let e2l = dot3(&xu, &xu);
        if e2l.v <= DEGENERATE {
            return Err(Error::Precondition(format!("degenerate metric at {p:?}: e^(2λ) = {:e}", e2l.v)));
        }
        let c = cross(&xu, &xv);
        let gc = [c[0], c[1], -c[2]];
        let r2 = dot3(&gc, &gc);
        if r2.v <= 0.0 {
            return Err(Error::Precondition(format!("no space-like normal at {p:?}")));
        }
        let r = r2.sqrt();
        let n2 = gc.map(|g| g / r);
        let h = dot3(&n2, &x);
        let f2 = [h, n2[0], n2[1], n2[2], h];
        let lambda2 = e2l.ln() * Jet2::constant(0.5);

        let first = |a: &[Jet2; 3]| a.map(|j| j.first());
        let (x1, n1) = (first(&x), first(&n2));
        let xuu = xu.map(|j| j.partial(0));
        let xuv = xu.map(|j| j.partial(1));
        let xvv = xv.map(|j| j.partial(1));
        let e2l1 = e2l.first();
        let l1 = dot3(&xuu, &n1);
        let m1 = dot3(&xuv, &n1);
        let d1 = l1 * l1 - m1 * m1;
        let k1 = -d1 / (e2l1 * e2l1);
        let fu = f2.map(|j| j.partial(0));
        let fv = f2.map(|j| j.partial(1));
        let ihat = embed(&x1);

        let frame = (d1.v > 0.0).then(|| {
            let s = Jet1::constant(1.0) / (d1 / e2l1).sqrt();
            let nu = NU.map(Jet1::constant);
            let r2c = Jet1::constant(1.0 / SQRT_2);
            let e1 = fu.map(|q| s * q);
            let e3 = fv.map(|q| s * q);
            let mut e2 = [Jet1::constant(0.0); 5];
            let mut e4 = e2;
            for i in 0..5 {
                e2[i] = (nu[i] - ihat[i]) * r2c;
                e4[i] = (nu[i] + ihat[i]) * r2c;
            }
            let cols = [e1, e2, e3, e4];
            FramePoint { e: cols.map(|c| values(&c)), de: [cols.map(|c| grads(&c, 0)), cols.map(|c| grads(&c, 1))] }
        });

        Ok(SurfacePoint {
            iota: values(&x1),
            iota_u: xu.map(|j| j.v),
            iota_v: xv.map(|j| j.v),
            iota_uu: values(&xuu),
            iota_uv: values(&xuv),
            iota_vv: values(&xvv),
            conformal_factor: e2l.v,
            lambda: lambda2.v,
            l: l1.v,
            m: m1.v,
            k: k1.v,
            k_intrinsic: -(lambda2.h[0][0] - lambda2.h[1][1]) / e2l.v,
            normal: n1.map(|j| j.v),
            normal_u: n2.map(|j| j.g[0]),
            normal_v: n2.map(|j| j.g[1]),
            f: f2.map(|j| j.v),
            f_u: values(&fu),
            f_v: values(&fv),
            iota_hat: values(&ihat),
            iota_hat_u: grads(&ihat, 0),
            iota_hat_v: grads(&ihat, 1),
            frame,
        })
    }

    /// `max |⟨ι_u,ι_u⟩ + ⟨ι_v,ι_v⟩|, |⟨ι_u,ι_v⟩|` over the points.
    pub fn conformality_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        sampling::try_max(points, |p| {
            let s = self.point(p)?;
            Ok((dot3(&s.iota_u, &s.iota_u) + dot3(&s.iota_v, &s.iota_v)).abs().max(dot3(&s.iota_u, &s.iota_v).abs()))
        })
    }

    /// `max ‖ι_uu − ι_vv‖∞` over the points.
    pub fn minimality_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        sampling::try_max(points, |p| {
            let s = self.point(p)?;
            Ok((0..3).map(|i| (s.iota_uu[i] - s.iota_vv[i]).abs()).fold(0.0, f64::max))
        })
    }

    /// Points of `samples` where `K^M < 0`, i.e. `l² − m² > tol`.
    pub fn mask(&self, samples: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>> {
        let keep = sampling::try_map(samples, |p| {
            let s = self.point(p)?;
            Ok(s.l * s.l - s.m * s.m > tol)
        })?;
        Ok(samples.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p.clone()).collect())
    }
}

/// `λ, l, m, K^M` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalData {
    pub lambda: f64,
    pub l: f64,
    pub m: f64,
    pub k: f64,
    pub k_intrinsic: f64,
    pub in_mask: bool,
}

pub fn fundamental_data(s: &TimelikeMinimalSurface, p: &[f64], tol: f64) -> Result<FundamentalData> {
    let q = s.point(p)?;
    Ok(FundamentalData {
        lambda: q.lambda,
        l: q.l,
        m: q.m,
        k: q.k,
        k_intrinsic: q.k_intrinsic,
        in_mask: q.l * q.l - q.m * q.m > tol,
    })
}

/// Worst deviations of the conformal Gauss map identities over the mask.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMapReport {
    pub samples: usize,
    /// `|⟨F, F⟩ − 1|`.
    pub unit: f64,
    /// `|⟨F, ι̂⟩|` and `|⟨F, dι̂⟩|`.
    pub incidence: f64,
    /// `|⟨F, dF⟩|`.
    pub tangency: f64,
    /// `|⟨F, ν⟩|`, `|⟨dF, ν⟩|`.
    pub nu_normal: f64,
    /// `(γ_u, γ_v) − (ι_u, ι_v) e^{−2λ} [[−l, −m], [m, l]]` in `E^3_1`.
    pub gugv: f64,
    /// `g_F + K^M g^M`.
    pub induced_metric: f64,
    /// `|K^M − K_intrinsic|`.
    pub gauss_equation: f64,
}

impl SphereMapReport {
    pub fn max(&self) -> f64 {
        [self.unit, self.incidence, self.tangency, self.nu_normal, self.gugv, self.induced_metric, self.gauss_equation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Check the conformal Gauss map `F = (⟨n, ι⟩, n, ⟨n, ι⟩)` on the masked points.
pub fn conformal_gauss(s: &TimelikeMinimalSurface, mask: &[Vec<f64>]) -> Result<SphereMapReport> {
    if mask.is_empty() {
        return Err(Error::Precondition("mask is empty".into()));
    }
    let rows = sampling::try_map(mask, |p| {
        let q = s.point(p)?;
        let e2 = q.conformal_factor;
        let mut gugv: f64 = 0.0;
        for i in 0..3 {
            let nu = (-q.l * q.iota_u[i] + q.m * q.iota_v[i]) / e2;
            let nv = (-q.m * q.iota_u[i] + q.l * q.iota_v[i]) / e2;
            gugv = gugv.max((q.normal_u[i] - nu).abs()).max((q.normal_v[i] - nv).abs());
        }
        let g = |a: &[f64; 5], b: &[f64; 5]| dot5(a, b);
        let induced =
            (g(&q.f_u, &q.f_u) + q.k * e2).abs().max((g(&q.f_v, &q.f_v) - q.k * e2).abs()).max(g(&q.f_u, &q.f_v).abs());
        Ok([
            (g(&q.f, &q.f) - 1.0).abs(),
            g(&q.f, &q.iota_hat).abs().max(g(&q.f, &q.iota_hat_u).abs()).max(g(&q.f, &q.iota_hat_v).abs()),
            g(&q.f, &q.f_u).abs().max(g(&q.f, &q.f_v).abs()),
            g(&q.f, &NU).abs().max(g(&q.f_u, &NU).abs()).max(g(&q.f_v, &NU).abs()),
            gugv,
            induced,
            (q.k - q.k_intrinsic).abs(),
        ])
    })?;
    let col = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(SphereMapReport {
        samples: mask.len(),
        unit: col(0),
        incidence: col(1),
        tangency: col(2),
        nu_normal: col(3),
        gugv: col(4),
        induced_metric: col(5),
        gauss_equation: col(6),
    })
}

/// Tangential coefficients of `−dξ(∂_k)` in the basis `F_u, F_v`, as columns.
fn shape_operator(q: &SurfacePoint, dxi: [[f64; 5]; 2]) -> Matrix2<f64> {
    let g = Matrix2::new(dot5(&q.f_u, &q.f_u), dot5(&q.f_u, &q.f_v), dot5(&q.f_v, &q.f_u), dot5(&q.f_v, &q.f_v));
    let gi = g.try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
    let mut a = Matrix2::zeros();
    for (k, d) in dxi.iter().enumerate() {
        let rhs = Vector2::new(-dot5(d, &q.f_u), -dot5(d, &q.f_v));
        a.set_column(k, &(gi * rhs));
    }
    a
}

/// The light-like normal `ν` of `F` at `p` with `⟨ν, ι̂⟩ = −1`, found from the
/// normal space of `F` without assuming it is constant.
pub fn light_like_normal(s: &TimelikeMinimalSurface, p: &[f64]) -> Result<[f64; 5]> {
    let q = s.point(p)?;
    let eta = [1.0, 1.0, 1.0, -1.0, -1.0];
    let rows = DMatrix::from_fn(3, 5, |i, j| [q.f, q.f_u, q.f_v][i][j] * eta[j]);
    let eig = (rows.transpose() * &rows).symmetric_eigen();
    let mut idx: Vec<usize> = (0..5).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let col = |k: usize| -> [f64; 5] { std::array::from_fn(|i| eig.eigenvectors[(i, idx[k])]) };
    let (b0, b1) = (col(0), col(1));
    let w = if dot5(&b0, &q.iota_hat).abs() >= dot5(&b1, &q.iota_hat).abs() { b0 } else { b1 };
    let wi = dot5(&w, &q.iota_hat);
    let a = -1.0 / wi;
    let b = -a * dot5(&w, &w) / (2.0 * wi);
    Ok(std::array::from_fn(|i| a * w[i] + b * q.iota_hat[i]))
}

/// Shape operators of `F` at `p`, as matrices acting on `(∂_u, ∂_v)` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOperators {
    pub a_iota: Matrix2<f64>,
    /// `e^{2λ}/(l² − m²) [[l, m], [−m, −l]]`.
    pub a_iota_closed: Matrix2<f64>,
    /// From central differences of [`light_like_normal`], step `1e-5`.
    pub a_nu: Matrix2<f64>,
    pub nu: [f64; 5],
}

pub const FD_STEP: f64 = 1e-5;

pub fn shape_ops(s: &TimelikeMinimalSurface, p: &[f64], tol: f64) -> Result<ShapeOperators> {
    let q = s.point(p)?;
    let d = q.l * q.l - q.m * q.m;
    if d <= tol {
        return Err(Error::Precondition(format!("{p:?} is outside the mask")));
    }
    let a_iota = shape_operator(&q, [q.iota_hat_u, q.iota_hat_v]);
    let c = q.conformal_factor / d;
    let a_iota_closed = Matrix2::new(q.l, q.m, -q.m, -q.l) * c;
    let mut dnu = [[0.0; 5]; 2];
    for (k, slot) in dnu.iter_mut().enumerate() {
        let (mut a, mut b) = (p.to_vec(), p.to_vec());
        a[k] += FD_STEP;
        b[k] -= FD_STEP;
        let (na, nb) = (light_like_normal(s, &a)?, light_like_normal(s, &b)?);
        for i in 0..5 {
            slot[i] = (na[i] - nb[i]) / (2.0 * FD_STEP);
        }
    }
    Ok(ShapeOperators { a_iota, a_iota_closed, a_nu: shape_operator(&q, dnu), nu: light_like_normal(s, p)? })
}

/// Largest angle between `ν(p)` and `ν(p₀)` over the points.
pub fn nu_spread(s: &TimelikeMinimalSurface, points: &[Vec<f64>]) -> Result<f64> {
    let nus = sampling::try_map(points, |p| light_like_normal(s, p))?;
    let Some(first) = nus.first() else { return Ok(0.0) };
    let norm = |a: &[f64; 5]| a.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(nus
        .iter()
        .map(|n| {
            let c = n.iter().zip(first).map(|(a, b)| a * b).sum::<f64>() / (norm(n) * norm(first));
            c.clamp(-1.0, 1.0).acos()
        })
        .fold(0.0, f64::max))
}

/// `ω^i_j(∂_k) = ε_i ⟨∂_k e_j, e_i⟩` from the jet frame, for `k = u, v`.
pub fn numeric_omega_at(s: &TimelikeMinimalSurface, p: &[f64]) -> Result<[DMatrix<f64>; 2]> {
    let q = s.point(p)?;
    let fr = q.frame.ok_or_else(|| Error::Precondition(format!("K^M ≥ 0 at {p:?}")))?;
    let eps = [1.0, 1.0, -1.0, -1.0];
    let at = |k: usize| DMatrix::from_fn(4, 4, |i, j| eps[i] * dot5(&fr.de[k][j], &fr.e[i]));
    Ok([at(0), at(1)])
}

/// `max |⟨e_i, e_j⟩ − ε_i δ_ij|` over the points.
pub fn frame_residual(s: &TimelikeMinimalSurface, points: &[Vec<f64>]) -> Result<f64> {
    let eps = [1.0, 1.0, -1.0, -1.0];
    sampling::try_max(points, |p| {
        let q = s.point(p)?;
        let fr = q.frame.ok_or_else(|| Error::Precondition(format!("K^M ≥ 0 at {p:?}")))?;
        let mut r: f64 = 0.0;
        for i in 0..4 {
            r = r.max((dot5(&fr.e[i], &q.f)).abs());
            for j in 0..4 {
                let want = if i == j { eps[i] } else { 0.0 };
                r = r.max((dot5(&fr.e[i], &fr.e[j]) - want).abs());
            }
        }
        Ok(r)
    })
}

/// Closed-form connection data of the adapted frame.
#[derive(Clone, Debug)]
pub struct GaussConnection {
    pub surface: TimelikeMinimalSurface,
    /// Connection form: `ω²₁ = ω⁴₁ = −(l̃e¹ + m̃e³)`, `ω³₂ = ω⁴₃ = −(m̃e¹ + l̃e³)`,
    /// `ω³₁ = σ_v du + σ_u dv` (Levi-Civita of `g = e^{2σ}(du² − dv²)`), `ω⁴₂ = 0`.
    pub omega: ConnectionForm,
    pub l_tilde: Expr,
    pub m_tilde: Expr,
    /// `e^σ = √(−K^M) e^λ`, so `e¹ = e^σ du`, `e³ = e^σ dv`.
    pub coframe: Expr,
    /// `max |ω_numeric − ω|` over the checked points.
    pub agreement: f64,
    /// Orthonormality of the jet frame over the checked points.
    pub frame_residual: f64,
}

fn euclid(a: &[Expr; 3], b: &[Expr; 3]) -> Expr {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn closed_form(s: &TimelikeMinimalSurface) -> (ConnectionForm, Expr, Expr, Expr) {
    let (xu, xv) = (&s.iota_u, &s.iota_v);
    let xuu = xu.clone().map(|e| e.partial(1));
    let xuv = xu.clone().map(|e| e.partial(2));
    let c = [
        &(&xu[1] * &xv[2]) - &(&xu[2] * &xv[1]),
        &(&xu[2] * &xv[0]) - &(&xu[0] * &xv[2]),
        &(&xu[0] * &xv[1]) - &(&xu[1] * &xv[0]),
    ];
    // Euclidean products: ⟨x, Gc⟩ = x·c, and |Gc| = e^{2λ} for conformal ι.
    let e = &euclid(xu, xu) - &(&(&xu[2] * &xu[2]) * &Expr::constant(2.0));
    let (big_l, big_m) = (euclid(&xuu, &c), euclid(&xuv, &c));
    let d = &big_l.powi(2) - &big_m.powi(2);
    let scale = &e.powi(2) / &(&d * &Expr::constant(SQRT_2));
    let l_t = &big_l * &scale;
    let m_t = &big_m * &scale;
    let sigma = (&d.ln() - &(&e.ln() * &Expr::constant(3.0))) * Expr::constant(0.5);
    let rho = sigma.exp();
    let one = |a: Expr, b: Expr| DifferentialForm::one_form(vec![a, b]);
    let w21 = one(-(&l_t * &rho), -(&m_t * &rho));
    let w32 = one(-(&m_t * &rho), -(&l_t * &rho));
    let w31 = one(sigma.partial(2), sigma.partial(1));
    let w42 = DifferentialForm::zero(2, 1);
    let omega = crate::generators::assemble_n1(
        [(2, 1, w21.clone()), (3, 1, w31), (3, 2, w32.clone()), (4, 1, w21), (4, 2, w42), (4, 3, w32)],
        2,
    )
    .expect("rank-4 assembly of 1-forms on R^2");
    (omega, l_t, m_t, rho)
}

/// Frame, closed-form `ω` and its agreement with the jet computation on `mask`.
pub fn gauss_frame_and_omega(s: &TimelikeMinimalSurface, mask: &[Vec<f64>], tol: f64) -> Result<GaussConnection> {
    if mask.is_empty() {
        return Err(Error::Precondition("mask is empty".into()));
    }
    for p in mask {
        let q = s.point(p)?;
        if q.l * q.l - q.m * q.m <= tol {
            return Err(Error::Precondition(format!("K^M ≥ 0 at {p:?}")));
        }
    }
    let (omega, l_tilde, m_tilde, coframe) = closed_form(s);
    let agreement = sampling::try_max(mask, |p| {
        let num = numeric_omega_at(s, p)?;
        let sym = omega.sample(p)?;
        Ok(num.iter().zip(&sym).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max))
    })?;
    let frame_residual = frame_residual(s, mask)?;
    Ok(GaussConnection { surface: s.clone(), omega, l_tilde, m_tilde, coframe, agreement, frame_residual })
}

/// Per-side outcome of the lift checks.
#[derive(Clone, Debug)]
pub struct LiftSide {
    pub eps: Sign,
    pub lightlike: LightlikeReport,
    /// `α − (−(εl̃ + m̃)(e¹ + εe³))`.
    pub alpha_gap: f64,
    /// `sup ‖∇J_ε − α ⊗ N‖`.
    pub factor_residual: f64,
    pub walker: bool,
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub sides: Vec<LiftSide>,
    pub branch: BranchClass,
}

impl LiftReport {
    /// The first failing stage, if any.
    pub fn failure(&self, tol: f64) -> Option<String> {
        for s in &self.sides {
            let tag = |what: &str| Some(format!("{what} (ε = {})", s.eps));
            if !s.lightlike.fully_lightlike {
                return tag("fully light-like");
            }
            if s.lightlike.mu != Some(Sign::Plus) {
                return tag("μ = +");
            }
            if s.alpha_gap > tol {
                return tag("α closed form");
            }
            if s.factor_residual > tol {
                return tag("∇J = α ⊗ N");
            }
            if !s.walker {
                return tag("Walker distribution");
            }
        }
        (self.branch != BranchClass::A).then(|| format!("branch classification ({:?})", self.branch))
    }
}

/// Run the lift checks for both signs without failing early.
pub fn lift_report(g: &GaussConnection, mask: &[Vec<f64>], tol: f64) -> Result<LiftReport> {
    let w = &g.omega;
    let mut sides = Vec::new();
    for eps in [Sign::Plus, Sign::Minus] {
        let lightlike = fully_lightlike_check(w, eps, mask, tol)?;
        let e = Expr::constant(eps.value());
        let coef = -(&(&e * &g.l_tilde) + &g.m_tilde) * g.coframe.clone();
        let closed = DifferentialForm::one_form(vec![coef.clone(), &coef * &e]);
        let gap = lightlike.alpha.sub(&closed)?;
        let alpha_gap = sampling::try_max(mask, |p| gap.max_abs(p))?;
        let mu = lightlike.mu.unwrap_or(Sign::Plus);
        let factor_residual = factorization_check(w, eps, eps * mu, mask, tol)?.residual;
        let v = DMatrix::from_column_slice(4, 2, &[1.0, 0.0, -eps.value(), 0.0, 0.0, 1.0, 0.0, 1.0]);
        let walker = walker_check(w, &WalkerDistribution::constant(&v, 2), mask, tol)?;
        sides.push(LiftSide { eps, lightlike, alpha_gap, factor_residual, walker });
    }
    let branch = branch_classify(w, Sign::Plus, mask, tol)?;
    Ok(LiftReport { sides, branch })
}

/// The full lift verification; a failing stage is reported as `Constraint`.
pub fn verify_lifts(g: &GaussConnection, mask: &[Vec<f64>], tol: f64) -> Result<LiftReport> {
    let r = lift_report(g, mask, tol)?;
    match r.failure(tol) {
        Some(stage) => Err(Error::Constraint(format!("lift check failed at stage: {stage}"))),
        None => Ok(r),
    }
}

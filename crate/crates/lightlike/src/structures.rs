//! Nilpotent and paracomplex structures on a trivialized rank-`4n` bundle,
//! their admissible frames, and for `n = 1` the matching sections of `Λ²E`.
//!
//! A frame field is a matrix `E` of functions whose columns are `e_1..e_4n`
//! in a fixed pseudo-orthonormal background basis with Gram matrix `G`.
//! Endomorphisms are represented in that background basis, so a structure
//! with frame matrix `F` in the frame is `E F E⁻¹ = E F G ᵗE G`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::MatrixForm;
use crate::neutral::{block_diag, lambda_matrix, metric, xi_basis};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Sign> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `I_{n,ε}`: identity with `ε` in the top-left slot.
pub fn i_n_eps(n: usize, eps: Sign) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    m[(0, 0)] = eps.value();
    m
}

/// `I′_{4n,ε} = diag(I_n, I_n, I_n, I_{n,ε})`.
pub fn i_prime(n: usize, eps: Sign) -> DMatrix<f64> {
    let mut m = DMatrix::identity(4 * n, 4 * n);
    m[(3 * n, 3 * n)] = eps.value();
    m
}

/// `diag(I_2n, μ I_2n)`, the change `e ↦ e(μ)`.
pub fn d_mu(n: usize, mu: Sign) -> DMatrix<f64> {
    DMatrix::from_fn(4 * n, 4 * n, |i, j| match (i == j, i < 2 * n) {
        (false, _) => 0.0,
        (true, true) => 1.0,
        (true, false) => mu.value(),
    })
}

/// The paracomplex block pattern with rows `(O,O,I,O / O,O,O,−I / I,O,O,O / O,−I,O,O)`.
pub fn j_pattern(n: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(n, n);
    crate::neutral::from_blocks(n, |i, j| match (i, j) {
        (1, 3) | (3, 1) => Some(id.clone()),
        (2, 4) | (4, 2) => Some(-&id),
        _ => None,
    })
}

/// Frame matrix of an `ε`-nilpotent structure in an admissible frame: `I′ΛI′`.
pub fn nilpotent_frame_matrix(n: usize, eps: Sign) -> DMatrix<f64> {
    let ip = i_prime(n, eps);
    &ip * lambda_matrix(n) * &ip
}

/// Frame matrix of an `ε`-paracomplex structure in an admissible frame.
pub fn paracomplex_frame_matrix(n: usize, eps: Sign) -> DMatrix<f64> {
    let ip = i_prime(n, eps);
    &ip * j_pattern(n) * &ip
}

/// Frame matrix of the nilpotent structure related to `J` by `(e, ν)`:
/// `e(ν)` is admissible for it.
pub fn related_nilpotent_frame_matrix(n: usize, eps: Sign, nu: Sign) -> DMatrix<f64> {
    let d = d_mu(n, nu);
    &d * nilpotent_frame_matrix(n, eps) * &d
}

/// Inverse of a pseudo-orthonormal matrix: `G ᵗE G`.
pub fn pseudo_inverse(e: &DMatrix<f64>) -> DMatrix<f64> {
    let g = metric(e.nrows() / 4);
    &g * e.transpose() * &g
}

/// `E F E⁻¹` for a pseudo-orthonormal `E`.
pub fn to_background(e: &DMatrix<f64>, f: &DMatrix<f64>) -> DMatrix<f64> {
    e * f * pseudo_inverse(e)
}

/// A frame field `e_1..e_4n` over a coordinate box.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    n: usize,
    e: MatrixForm,
}

impl FrameField {
    pub fn new(e: MatrixForm) -> Result<Self> {
        if e.degree() != 0 || e.rows() != e.cols() || !e.rows().is_multiple_of(4) || e.rows() == 0 {
            return Err(Error::DimensionMismatch("frame must be a 4n×4n matrix of functions".into()));
        }
        Ok(FrameField { n: e.rows() / 4, e })
    }

    pub fn constant(e: &DMatrix<f64>, m: usize) -> Result<Self> {
        Self::new(MatrixForm::constant(e, m))
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::constant(&DMatrix::identity(4 * n, 4 * n), m).expect("square")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &MatrixForm {
        &self.e
    }

    pub fn at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.e.eval_functions(p)
    }

    /// `max ‖ᵗE G E − G‖∞` over the points.
    pub fn orthonormality_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let g = metric(self.n);
        sampling::try_max(points, |p| {
            let e = self.at(p)?;
            Ok((e.transpose() * &g * &e - &g).amax())
        })
    }

    /// Whether `det E > 0` at every point.
    pub fn oriented(&self, points: &[Vec<f64>]) -> Result<bool> {
        let dets = sampling::try_map(points, |p| Ok(self.at(p)?.determinant()))?;
        Ok(dets.iter().all(|&d| d > 0.0))
    }
}

/// Pointwise invariant residuals of a nilpotent structure.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentReport {
    /// `‖N²‖∞`.
    pub square: f64,
    /// Numerical rank of `N` (singular values above `1e-8 · ‖N‖`).
    pub rank: usize,
    /// `‖ᵗN G N‖∞`: image columns pairwise isotropic.
    pub isotropy: f64,
    /// `‖ᵗN G + G N‖∞`: `h(φ, Nφ) = 0` for all `φ`.
    pub skew: f64,
}

impl NilpotentReport {
    pub fn of(nmat: &DMatrix<f64>) -> Self {
        let g = metric(nmat.nrows() / 4);
        let sv = nmat.clone().singular_values();
        let cut = 1e-8 * sv.max().max(1.0);
        NilpotentReport {
            square: (nmat * nmat).amax(),
            rank: sv.iter().filter(|&&s| s > cut).count(),
            isotropy: (nmat.transpose() * &g * nmat).amax(),
            skew: (nmat.transpose() * &g + &g * nmat).amax(),
        }
    }

    pub fn holds(&self, n: usize, tol: f64) -> bool {
        self.square <= tol && self.rank == 2 * n && self.isotropy <= tol && self.skew <= tol
    }
}

/// Pointwise invariant residuals of a paracomplex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ParacomplexReport {
    /// `‖J² − I‖∞`.
    pub square: f64,
    /// `‖ᵗJ G J + G‖∞`.
    pub reversing: f64,
}

impl ParacomplexReport {
    pub fn of(j: &DMatrix<f64>) -> Self {
        let g = metric(j.nrows() / 4);
        let id = DMatrix::identity(j.nrows(), j.ncols());
        ParacomplexReport { square: (j * j - id).amax(), reversing: (j.transpose() * &g * j + &g).amax() }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.square <= tol && self.reversing <= tol
    }
}

/// An `ε`-nilpotent structure given by an admissible frame.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentStructure {
    pub frame: FrameField,
    pub eps: Sign,
}

impl NilpotentStructure {
    /// `N` in the background basis at `p`.
    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let e = self.frame.at(p)?;
        Ok(to_background(&e, &nilpotent_frame_matrix(self.frame.n(), self.eps)))
    }

    /// The light-like generators `ξ_1..ξ_2n` at `p`, one per column.
    pub fn generators_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.frame.n();
        Ok(self.frame.at(p)? * i_prime(n, self.eps) * xi_basis(n))
    }

    /// Worst-case invariant residuals over the points; `rank` is the minimum seen.
    pub fn check(&self, points: &[Vec<f64>]) -> Result<NilpotentReport> {
        let reports = sampling::try_map(points, |p| Ok(NilpotentReport::of(&self.matrix_at(p)?)))?;
        Ok(reports.into_iter().fold(
            NilpotentReport { square: 0.0, rank: usize::MAX, isotropy: 0.0, skew: 0.0 },
            |a, r| NilpotentReport {
                square: a.square.max(r.square),
                rank: a.rank.min(r.rank),
                isotropy: a.isotropy.max(r.isotropy),
                skew: a.skew.max(r.skew),
            },
        ))
    }
}

/// An `ε`-paracomplex structure given by an admissible frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ParacomplexStructure {
    pub frame: FrameField,
    pub eps: Sign,
}

impl ParacomplexStructure {
    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let e = self.frame.at(p)?;
        Ok(to_background(&e, &paracomplex_frame_matrix(self.frame.n(), self.eps)))
    }

    pub fn check(&self, points: &[Vec<f64>]) -> Result<ParacomplexReport> {
        let reports = sampling::try_map(points, |p| Ok(ParacomplexReport::of(&self.matrix_at(p)?)))?;
        Ok(reports.into_iter().fold(ParacomplexReport { square: 0.0, reversing: 0.0 }, |a, r| ParacomplexReport {
            square: a.square.max(r.square),
            reversing: a.reversing.max(r.reversing),
        }))
    }
}

pub fn nilpotent_from_frame(frame: FrameField, eps: Sign) -> NilpotentStructure {
    NilpotentStructure { frame, eps }
}

pub fn paracomplex_from_frame(frame: FrameField, eps: Sign) -> ParacomplexStructure {
    ParacomplexStructure { frame, eps }
}

/// Partners `ξ′_1..ξ′_2n` of a light-like span with `h(ξ_j, ξ′_k) = S_jk`,
/// `S = diag(I_n, −I_n)`, and `h(ξ′_j, ξ′_k) = 0`.
///
/// With `Y = G Ξ (ᵗΞ Ξ)⁻¹ S` the pairing already holds; subtracting
/// `½ Ξ S ᵗY G Y` makes the partners mutually isotropic.
pub fn complete_isotropic_basis(xi: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if !xi.nrows().is_multiple_of(4) || xi.ncols() * 2 != xi.nrows() || xi.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!("expected 4n×2n span, got {}×{}", xi.nrows(), xi.ncols())));
    }
    let n = xi.ncols() / 2;
    let g = metric(n);
    let gram = xi.transpose() * &g * xi;
    if gram.amax() > tol {
        return Err(Error::Precondition(format!("span is not light-like (‖ᵗΞGΞ‖ = {:e})", gram.amax())));
    }
    let inv = (xi.transpose() * xi)
        .try_inverse()
        .filter(|m| m.amax().is_finite() && m.amax() < 1e12)
        .ok_or_else(|| Error::Precondition("span vectors are linearly dependent".into()))?;
    let s = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (false, _) => 0.0,
        (true, true) => 1.0,
        (true, false) => -1.0,
    });
    let y = &g * xi * inv * &s;
    let q = y.transpose() * &g * &y;
    Ok(&y - xi * &s * q * 0.5)
}

/// Frame assembled from a light-like basis and its partners.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicFrame {
    pub frame: DMatrix<f64>,
    /// `-` when `e_3n+1` had to be reversed to keep the orientation; the
    /// generators are then the `ε = −` pattern in the returned frame.
    pub eps: Sign,
}

pub fn frame_from_isotropic(xi: &DMatrix<f64>, xi_prime: &DMatrix<f64>, tol: f64) -> Result<IsotropicFrame> {
    let n = xi.ncols() / 2;
    if xi.shape() != xi_prime.shape() || xi.nrows() != 4 * n || n == 0 {
        return Err(Error::DimensionMismatch("ξ and ξ′ must both be 4n×2n".into()));
    }
    let g = metric(n);
    let s = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (false, _) => 0.0,
        (true, true) => 1.0,
        (true, false) => -1.0,
    });
    let pairing = (xi.transpose() * &g * xi_prime - &s).amax();
    let iso = (xi_prime.transpose() * &g * xi_prime).amax();
    if pairing > tol || iso > tol {
        return Err(Error::Precondition(format!("pairing residual {pairing:e}, isotropy residual {iso:e}")));
    }
    let mut e = DMatrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        let (x, xp) = (xi.column(i), xi_prime.column(i));
        let (y, yp) = (xi.column(n + i), xi_prime.column(n + i));
        e.set_column(i, &(xp + x * 0.5));
        e.set_column(n + i, &(-yp + y * 0.5));
        e.set_column(2 * n + i, &(xp - x * 0.5));
        e.set_column(3 * n + i, &(yp + y * 0.5));
    }
    let eps = if e.determinant() < 0.0 {
        let c = -e.column(3 * n);
        e.set_column(3 * n, &c);
        Sign::Minus
    } else {
        Sign::Plus
    };
    Ok(IsotropicFrame { frame: e, eps })
}

/// A bivector as the antisymmetric matrix `B` with `Ω = Σ_{i<j} B_ij b_i ∧ b_j`
/// over the background basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Bivector(pub DMatrix<f64>);

impl Bivector {
    pub fn wedge(a: &[f64], b: &[f64]) -> Self {
        let d = a.len();
        Bivector(DMatrix::from_fn(d, d, |i, j| a[i] * b[j] - a[j] * b[i]))
    }

    pub fn zero(d: usize) -> Self {
        Bivector(DMatrix::zeros(d, d))
    }

    pub fn add(&self, o: &Self) -> Self {
        Bivector(&self.0 + &o.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Bivector(&self.0 * s)
    }

    /// Components over `b_i ∧ b_j`, `i < j`, in lexicographic order.
    pub fn components(&self) -> Vec<f64> {
        let d = self.0.nrows();
        let mut v = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            for j in i + 1..d {
                v.push(self.0[(i, j)]);
            }
        }
        v
    }

    /// Induced metric `ĥ(Ω, Ω′) = Σ_{i<j} g_i g_j B_ij B′_ij`.
    pub fn hhat(&self, o: &Self) -> f64 {
        let d = self.0.nrows();
        let n = d / 4;
        let g = |i: usize| if i < 2 * n { 1.0 } else { -1.0 };
        let mut s = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                s += g(i) * g(j) * self.0[(i, j)] * o.0[(i, j)];
            }
        }
        s
    }

    pub fn amax(&self) -> f64 {
        self.0.amax()
    }

    /// The skew endomorphism `−√2 B G` associated with the bivector.
    pub fn to_endomorphism(&self) -> DMatrix<f64> {
        &self.0 * metric(self.0.nrows() / 4) * (-std::f64::consts::SQRT_2)
    }

    /// Inverse of [`Bivector::to_endomorphism`].
    pub fn from_endomorphism(k: &DMatrix<f64>) -> Self {
        Bivector(k * metric(k.nrows() / 4) * (-std::f64::consts::FRAC_1_SQRT_2))
    }
}

fn need_n1(e: &DMatrix<f64>) -> Result<()> {
    if e.shape() != (4, 4) {
        return Err(Error::DimensionMismatch(format!("Λ² splitting needs rank 4, got {}", e.nrows())));
    }
    Ok(())
}

/// `Ω_{±,k}` built on the frame columns of `e` (`n = 1`).
pub fn omega_basis(e: &DMatrix<f64>, s: Sign, k: usize) -> Result<Bivector> {
    need_n1(e)?;
    let col = |i: usize| e.column(i - 1).iter().copied().collect::<Vec<_>>();
    let w = |a: usize, b: usize| Bivector::wedge(&col(a), &col(b));
    let (first, second) = match k {
        1 => (w(1, 2), w(3, 4)),
        2 => (w(1, 3), w(4, 2)),
        3 => (w(1, 4), w(2, 3)),
        _ => return Err(Error::Precondition(format!("Ω index {k} outside 1..=3"))),
    };
    Ok(first.add(&second.scale(s.value())).scale(std::f64::consts::FRAC_1_SQRT_2))
}

/// Pseudo-orthonormal basis of `Λ²_side`: `(Ω_{−,1}, Ω_{+,2}, Ω_{+,3})` for
/// `+` and `(Ω_{+,1}, Ω_{−,2}, Ω_{−,3})` for `−`.
pub fn lambda2_side_basis(e: &DMatrix<f64>, side: Sign) -> Result<[Bivector; 3]> {
    Ok([omega_basis(e, side.flip(), 1)?, omega_basis(e, side, 2)?, omega_basis(e, side, 3)?])
}

/// All six, `Λ²_+` first.
pub fn lambda2_basis(e: &DMatrix<f64>) -> Result<Vec<Bivector>> {
    let mut v = lambda2_side_basis(e, Sign::Plus)?.to_vec();
    v.extend(lambda2_side_basis(e, Sign::Minus)?);
    Ok(v)
}

/// Component of `Ω` along each side, measured in the background basis.
pub fn side_components(omega: &Bivector) -> Result<(f64, f64)> {
    let id = DMatrix::identity(4, 4);
    let size = |side| -> Result<f64> {
        let b = lambda2_side_basis(&id, side)?;
        Ok(b.iter().map(|x| (omega.hhat(x) / x.hhat(x)).abs()).fold(0.0, f64::max))
    };
    Ok((size(Sign::Plus)?, size(Sign::Minus)?))
}

/// The side `Λ²_ε` containing `Ω`, if it lies in one.
pub fn side_of(omega: &Bivector, tol: f64) -> Result<Option<Sign>> {
    let (p, m) = side_components(omega)?;
    Ok(match (p > tol, m > tol) {
        (true, false) => Some(Sign::Plus),
        (false, true) => Some(Sign::Minus),
        _ => None,
    })
}

/// `ε`-paracomplex `J` of a time-like section `Ω ∈ U_-(Λ²_ε)`.
pub fn paracomplex_from_section(omega: &Bivector, tol: f64) -> Result<(DMatrix<f64>, Sign)> {
    need_n1(&omega.0)?;
    let norm = omega.hhat(omega);
    if (norm + 1.0).abs() > tol {
        return Err(Error::Precondition(format!("section is not unit time-like (ĥ = {norm})")));
    }
    let side = side_of(omega, tol)?.ok_or_else(|| Error::Precondition("section straddles Λ²_+ and Λ²_-".into()))?;
    Ok((omega.to_endomorphism(), side))
}

pub fn section_from_paracomplex(j: &DMatrix<f64>) -> Bivector {
    Bivector::from_endomorphism(j)
}

/// `ε`-nilpotent `N` of a light-like section `Ω₀ ∈ U_0(Λ²_ε)`.
pub fn nilpotent_from_section(omega0: &Bivector, tol: f64) -> Result<(DMatrix<f64>, Sign)> {
    need_n1(&omega0.0)?;
    let norm = omega0.hhat(omega0);
    if norm.abs() > tol || omega0.amax() <= tol {
        return Err(Error::Precondition(format!("section is not a nonzero light-like bivector (ĥ = {norm})")));
    }
    let side = side_of(omega0, tol)?.ok_or_else(|| Error::Precondition("section straddles Λ²_+ and Λ²_-".into()))?;
    let nmat = omega0.to_endomorphism();
    let rep = NilpotentReport::of(&nmat);
    if !rep.holds(1, tol.max(1e-9) * nmat.amax().max(1.0)) {
        return Err(Error::Precondition("section does not induce a nilpotent structure".into()));
    }
    Ok((nmat, side))
}

pub fn section_from_nilpotent(nmat: &DMatrix<f64>) -> Bivector {
    Bivector::from_endomorphism(nmat)
}

/// A decomposable `k`-vector by its Plücker coordinates over increasing index sets.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    pub grade: usize,
    pub components: BTreeMap<Vec<usize>, f64>,
}

impl Multivector {
    /// `v_1 ∧ … ∧ v_k` for the columns of `v`.
    pub fn wedge_columns(v: &DMatrix<f64>) -> Self {
        let (d, k) = v.shape();
        let mut components = BTreeMap::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let minor = DMatrix::from_fn(k, k, |r, c| v[(idx[r], c)]);
            components.insert(idx.clone(), minor.determinant());
            // Next k-subset in lexicographic order.
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < d - k + i) else { break };
            idx[pos] += 1;
            for i in pos + 1..k {
                idx[i] = idx[i - 1] + 1;
            }
        }
        Multivector { grade: k, components }
    }

    pub fn distance(&self, o: &Self) -> f64 {
        self.components.iter().map(|(k, v)| (v - o.components.get(k).copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max)
    }
}

/// `ξ_1 ∧ … ∧ ξ_2n` of a nilpotent structure at `p`.
pub fn induced_2nvector(nil: &NilpotentStructure, p: &[f64]) -> Result<Multivector> {
    Ok(Multivector::wedge_columns(&nil.generators_at(p)?))
}

/// `diag(X, Y, X, Y)`.
pub fn block_diag_xyxy(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    block_diag(&[x, y, x, y])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_identity_frame() {
        let j = paracomplex_frame_matrix(1, Sign::Plus);
        let cols: Vec<Vec<f64>> = (0..4).map(|k| j.column(k).iter().copied().collect()).collect();
        assert_eq!(
            cols,
            vec![vec![0., 0., 1., 0.], vec![0., 0., 0., -1.], vec![1., 0., 0., 0.], vec![0., -1., 0., 0.]]
        );
    }

    #[test]
    fn nilpotent_is_lambda_for_identity() {
        let nil = nilpotent_from_frame(FrameField::identity(1, 1), Sign::Plus);
        assert_eq!(nil.matrix_at(&[0.0]).unwrap(), lambda_matrix(1));
    }

    #[test]
    fn bivector_bridges_identity_frame() {
        let id = DMatrix::identity(4, 4);
        for eps in [Sign::Plus, Sign::Minus] {
            let o0 =
                omega_basis(&id, eps.flip(), 1).unwrap().add(&omega_basis(&id, eps, 3).unwrap().scale(eps.value()));
            let (nmat, side) = nilpotent_from_section(&o0, 1e-12).unwrap();
            assert_eq!(side, eps);
            assert!((nmat - nilpotent_frame_matrix(1, eps)).amax() < 1e-14);
            let (j, side) = paracomplex_from_section(&omega_basis(&id, eps, 2).unwrap(), 1e-12).unwrap();
            assert_eq!(side, eps);
            assert!((j - paracomplex_frame_matrix(1, eps)).amax() < 1e-14);
        }
    }

    #[test]
    fn standard_partners() {
        let xi = xi_basis(1);
        let xp = complete_isotropic_basis(&xi, 1e-12).unwrap();
        let expected = DMatrix::from_column_slice(4, 2, &[0.5, 0., 0.5, 0., 0., -0.5, 0., 0.5]);
        assert!((&xp - expected).amax() < 1e-15);
        let f = frame_from_isotropic(&xi, &xp, 1e-12).unwrap();
        assert_eq!(f.eps, Sign::Plus);
        assert!((f.frame - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
    }
}

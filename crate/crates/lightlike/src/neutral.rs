//! Linear algebra of `R^{2n,2n}`: the metric, `n × n` block access, the
//! light-like plane `W`, and the subgroups of `SO(2n,2n)` that preserve it.
//!
//! Blocks are 1-based, `A_(i,j)` for `i, j ∈ 1..=4`, matching the usual
//! written form. Basis order is `e_1..e_2n` space-like, then `e_2n+1..e_4n`
//! time-like.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `G = diag(I_2n, -I_2n)`.
pub fn metric(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(4 * n, 4 * n, |i, j| {
        if i != j {
            0.0
        } else if i < 2 * n {
            1.0
        } else {
            -1.0
        }
    })
}

/// The `(i, j)` block of a `4n × 4n` matrix.
pub fn block(a: &DMatrix<f64>, i: usize, j: usize) -> DMatrix<f64> {
    let n = a.nrows() / 4;
    a.view(((i - 1) * n, (j - 1) * n), (n, n)).into_owned()
}

pub fn set_block(a: &mut DMatrix<f64>, i: usize, j: usize, b: &DMatrix<f64>) {
    let n = a.nrows() / 4;
    a.view_mut(((i - 1) * n, (j - 1) * n), (n, n)).copy_from(b);
}

/// Assemble a `4n × 4n` matrix from a block function; `None` is the zero block.
pub fn from_blocks(n: usize, f: impl Fn(usize, usize) -> Option<DMatrix<f64>>) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    for i in 1..=4 {
        for j in 1..=4 {
            if let Some(b) = f(i, j) {
                set_block(&mut a, i, j, &b);
            }
        }
    }
    a
}

pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let size: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut a = DMatrix::zeros(size, size);
    let mut k = 0;
    for b in blocks {
        a.view_mut((k, k), (b.nrows(), b.ncols())).copy_from(b);
        k += b.nrows();
    }
    a
}

/// The nilpotent matrix `Λ_n`.
pub fn lambda_matrix(n: usize) -> DMatrix<f64> {
    let id = DMatrix::identity(n, n);
    let pattern = [[0.0, -1.0, 0.0, 1.0], [1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, -1.0], [1.0, 0.0, 1.0, 0.0]];
    from_blocks(n, |i, j| {
        let s = pattern[i - 1][j - 1];
        (s != 0.0).then(|| &id * s)
    })
}

/// `A^×`: blocks permuted and signed so that `T^×` acts on `W` as `T` does
/// on the partner plane.
pub fn cross(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows() / 4;
    const TABLE: [[(usize, usize, f64); 4]; 4] = [
        [(2, 2, 1.0), (2, 1, -1.0), (4, 2, 1.0), (4, 1, 1.0)],
        [(1, 2, -1.0), (1, 1, 1.0), (3, 2, 1.0), (3, 1, 1.0)],
        [(2, 4, 1.0), (2, 3, 1.0), (4, 4, 1.0), (4, 3, -1.0)],
        [(1, 4, 1.0), (1, 3, 1.0), (3, 4, -1.0), (3, 3, 1.0)],
    ];
    from_blocks(n, |i, j| {
        let (bi, bj, s) = TABLE[i - 1][j - 1];
        Some(block(a, bi, bj) * s)
    })
}

/// `‖ᵗA G A − G‖∞ ≤ tol` and `|det A − 1| ≤ tol`.
pub fn so_member(a: &DMatrix<f64>, tol: f64) -> bool {
    if !a.is_square() || !a.nrows().is_multiple_of(4) || a.nrows() == 0 {
        return false;
    }
    let g = metric(a.nrows() / 4);
    (a.transpose() * &g * a - g).amax() <= tol && (a.determinant() - 1.0).abs() <= tol
}

/// Columns `ξ_1..ξ_2n`: `e_i − e_2n+i` and `e_n+i + e_3n+i`.
pub fn xi_basis(n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(4 * n, 2 * n);
    for i in 0..n {
        x[(i, i)] = 1.0;
        x[(2 * n + i, i)] = -1.0;
        x[(n + i, n + i)] = 1.0;
        x[(3 * n + i, n + i)] = 1.0;
    }
    x
}

fn check_shape(a: &DMatrix<f64>) -> Result<usize> {
    if !a.is_square() || !a.nrows().is_multiple_of(4) || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!("expected 4n×4n, got {}×{}", a.nrows(), a.ncols())));
    }
    Ok(a.nrows() / 4)
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Largest block deviation from the block criterion for `A W ⊂ W`.
pub fn w_condition_residual(a: &DMatrix<f64>) -> f64 {
    let mut r: f64 = 0.0;
    for i in 1..=2 {
        for j in 1..=2 {
            let lhs = block(a, i, j) + block(a, i, j + 2) * sign(j);
            let rhs = (block(a, i + 2, j) + block(a, i + 2, j + 2) * sign(j)) * sign(i);
            r = r.max((lhs - rhs).amax());
        }
    }
    r
}

/// Least-squares distance of `A ξ_j` from `W`, maximised over `j`.
pub fn w_span_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows() / 4;
    let xi = xi_basis(n);
    // ξ columns are orthogonal with norm² 2, so projection is ξ ᵗξ / 2.
    let proj = &xi * xi.transpose() * 0.5;
    let image = a * &xi;
    (&image - proj * &image).amax()
}

pub fn preserves_w(a: &DMatrix<f64>, tol: f64) -> bool {
    check_shape(a).is_ok() && w_condition_residual(a) <= tol
}

/// Representation matrices `(P, P^×)` of `Φ_T`, `Φ_{T^×}` on `ξ_1..ξ_2n`.
pub fn p_matrices(a: &DMatrix<f64>, tol: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = check_shape(a)?;
    let res = w_condition_residual(a);
    if res > tol {
        return Err(Error::Precondition(format!("A does not preserve W (residual {res:e})")));
    }
    let mut p = DMatrix::zeros(2 * n, 2 * n);
    let mut pc = DMatrix::zeros(2 * n, 2 * n);
    for i in 1..=2 {
        for j in 1..=2 {
            let pij = block(a, i, j) + block(a, i, j + 2) * sign(j);
            p.view_mut(((i - 1) * n, (j - 1) * n), (n, n)).copy_from(&pij);
            let (ip, jp) = (3 - i, 3 - j);
            let pcij = (block(a, ip, jp) + block(a, ip + 2, jp) * sign(ip - 1)) * sign(ip + jp);
            pc.view_mut(((i - 1) * n, (j - 1) * n), (n, n)).copy_from(&pcij);
        }
    }
    Ok((p, pc))
}

/// `‖AΛ_n − Λ_nA‖∞ ≤ tol`.
pub fn prop22_commute(a: &DMatrix<f64>, tol: f64) -> bool {
    let Ok(n) = check_shape(a) else { return false };
    let l = lambda_matrix(n);
    (a * &l - &l * a).amax() <= tol
}

/// Determinant data of `P`, `P^×` for a `W`-preserving element.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantReport {
    pub det_p: f64,
    pub det_p_cross: f64,
    /// `|det P · det P^× − 1| ≤ tol`.
    pub product_is_one: bool,
    pub p_equals_cross: bool,
    /// `|det P − 1| ≤ tol`, reported only when `P = P^×`.
    pub det_p_is_one: Option<bool>,
}

impl DeterminantReport {
    pub fn holds(&self) -> bool {
        self.product_is_one && self.det_p_is_one.unwrap_or(true)
    }
}

pub fn prop23_verify(a: &DMatrix<f64>, tol: f64) -> Result<DeterminantReport> {
    let (p, pc) = p_matrices(a, tol)?;
    let (dp, dpc) = (p.determinant(), pc.determinant());
    let equal = (&p - &pc).amax() <= tol;
    Ok(DeterminantReport {
        det_p: dp,
        det_p_cross: dpc,
        product_is_one: (dp * dpc - 1.0).abs() <= tol,
        p_equals_cross: equal,
        det_p_is_one: equal.then(|| (dp - 1.0).abs() <= tol),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    G1,
    G2,
    G3,
    H,
    B,
    C,
}

impl GroupKind {
    pub const ALL: [GroupKind; 6] =
        [GroupKind::G1, GroupKind::G2, GroupKind::G3, GroupKind::H, GroupKind::B, GroupKind::C];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::G1 => "G1",
            GroupKind::G2 => "G2",
            GroupKind::G3 => "G3",
            GroupKind::H => "H",
            GroupKind::B => "B",
            GroupKind::C => "C",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// `B` and `C` live in `SO(2,2)` only.
    pub fn requires_n1(self) -> bool {
        matches!(self, GroupKind::B | GroupKind::C)
    }
}

/// Parameters of one subgroup element.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupParams {
    G1 {
        a11: DMatrix<f64>,
        a21: DMatrix<f64>,
    },
    G2 {
        a11: DMatrix<f64>,
        a31: DMatrix<f64>,
    },
    G3 {
        a11: DMatrix<f64>,
        a41: DMatrix<f64>,
    },
    /// `ᵗX = X`, `X² = Y + ᵗY`.
    H {
        x: DMatrix<f64>,
        y: DMatrix<f64>,
    },
    /// `b_1² + b_2² − b_3² − b_4² = 1`.
    B {
        b: [f64; 4],
    },
    /// The `SO(1,2)` block of `C`, with `K = cc′/2`. When `K ≠ 0`, `eps`
    /// must equal `sign K` and `t` must equal `log|c/c′|`.
    C {
        c: f64,
        c_prime: f64,
        eps: f64,
        t: f64,
    },
}

impl GroupParams {
    pub fn kind(&self) -> GroupKind {
        match self {
            GroupParams::G1 { .. } => GroupKind::G1,
            GroupParams::G2 { .. } => GroupKind::G2,
            GroupParams::G3 { .. } => GroupKind::G3,
            GroupParams::H { .. } => GroupKind::H,
            GroupParams::B { .. } => GroupKind::B,
            GroupParams::C { .. } => GroupKind::C,
        }
    }

    /// `C` parameters with `ε` and `t` fixed by `c, c′` (both nonzero).
    pub fn c_from(c: f64, c_prime: f64) -> Self {
        let k = c * c_prime / 2.0;
        GroupParams::C { c, c_prime, eps: k.signum(), t: (c / c_prime).abs().ln() }
    }
}

fn square_n(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!("{what} must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

fn constraint(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint(what()))
    }
}

/// Build the group element, checking the defining constraints to `tol`.
pub fn sample_group(params: &GroupParams, tol: f64) -> Result<DMatrix<f64>> {
    let a = match params {
        GroupParams::G1 { a11, a21 } => {
            let n = square_n(a11, "A11")?;
            square_n(a21, "A21")?;
            let id = DMatrix::<f64>::identity(n, n);
            constraint(
                (a11.transpose() * a11 + a21.transpose() * a21 - &id).amax() <= tol
                    && (a11.transpose() * a21 - a21.transpose() * a11).amax() <= tol,
                || "G1 needs ᵗA11A11 + ᵗA21A21 = I and ᵗA11A21 = ᵗA21A11".into(),
            )?;
            from_blocks(n, |i, j| match (i, j) {
                (1, 1) | (2, 2) | (3, 3) | (4, 4) => Some(a11.clone()),
                (2, 1) | (3, 4) => Some(a21.clone()),
                (1, 2) | (4, 3) => Some(-a21),
                _ => None,
            })
        }
        GroupParams::G2 { a11, a31 } | GroupParams::G3 { a11, a41: a31 } => {
            let n = square_n(a11, "A11")?;
            square_n(a31, "off-diagonal block")?;
            let id = DMatrix::<f64>::identity(n, n);
            constraint(
                (a11.transpose() * a11 - a31.transpose() * a31 - &id).amax() <= tol
                    && (a11.transpose() * a31 - a31.transpose() * a11).amax() <= tol,
                || format!("{} needs ᵗA11A11 − ᵗBB = I and ᵗA11B = ᵗBA11", params.kind().name()),
            )?;
            let g2 = matches!(params, GroupParams::G2 { .. });
            from_blocks(n, |i, j| match (i, j) {
                (1, 1) | (2, 2) | (3, 3) | (4, 4) => Some(a11.clone()),
                (1, 3) | (3, 1) | (2, 4) | (4, 2) if g2 => Some(a31.clone()),
                (1, 4) | (4, 1) if !g2 => Some(a31.clone()),
                (2, 3) | (3, 2) if !g2 => Some(-a31),
                _ => None,
            })
        }
        GroupParams::H { x, y } => {
            let n = square_n(x, "X")?;
            square_n(y, "Y")?;
            constraint((x - x.transpose()).amax() <= tol && (x * x - y - y.transpose()).amax() <= tol, || {
                "H needs ᵗX = X and X² = Y + ᵗY".into()
            })?;
            let id = DMatrix::<f64>::identity(n, n);
            from_blocks(n, |i, j| match (i, j) {
                (1, 1) | (3, 3) => Some(id.clone()),
                (2, 2) => Some(&id + y),
                (4, 4) => Some(&id - y),
                (2, 3) | (3, 2) | (4, 3) => Some(x.clone()),
                (3, 4) => Some(-x),
                (4, 2) => Some(y.clone()),
                (2, 4) => Some(-y),
                _ => None,
            })
        }
        GroupParams::B { b } => {
            let [b1, b2, b3, b4] = *b;
            constraint((b1 * b1 + b2 * b2 - b3 * b3 - b4 * b4 - 1.0).abs() <= tol, || {
                "B needs b1² + b2² − b3² − b4² = 1".into()
            })?;
            DMatrix::from_row_slice(4, 4, &[b1, -b2, b3, b4, b2, b1, -b4, b3, b3, -b4, b1, b2, b4, b3, -b2, b1])
        }
        GroupParams::C { c, c_prime, eps, t } => {
            let (c, cp, eps, t) = (*c, *c_prime, *eps, *t);
            constraint(eps == 1.0 || eps == -1.0, || format!("ε must be ±1, got {eps}"))?;
            let k = c * cp / 2.0;
            if k != 0.0 {
                constraint(eps == k.signum() && (t - (c / cp).abs().ln()).abs() <= tol, || {
                    format!("K = {k} ≠ 0 fixes ε = {} and t = log|c/c′|", k.signum())
                })?;
            }
            let (ch, sh) = (eps * t.cosh(), eps * t.sinh());
            let m = DMatrix::from_row_slice(
                4,
                4,
                &[1.0, 0.0, 0.0, 0.0, 0.0, ch + k, c, sh - k, 0.0, cp, 1.0, -cp, 0.0, sh + k, c, ch - k],
            );
            constraint(so_member(&m, tol), || {
                format!("C with c = {c}, c′ = {cp}, ε = {eps}, t = {t} is not in SO(2,2)")
            })?;
            m
        }
    };
    if !so_member(&a, tol.max(1e-9)) {
        return Err(Error::Constraint(format!("{} element fails ᵗAGA = G", params.kind().name())));
    }
    Ok(a)
}

fn uniform(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-scale..scale))
}

fn skew(rng: &mut impl Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let m = uniform(rng, n, n, scale);
    (&m - m.transpose()) * 0.5
}

fn symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let m = uniform(rng, n, n, scale);
    (&m + m.transpose()) * 0.5
}

/// Random valid parameters for `kind`. `B` and `C` ignore `n`.
pub fn random_params(kind: GroupKind, n: usize, rng: &mut impl Rng) -> GroupParams {
    let split = |e: DMatrix<f64>| (e.view((0, 0), (n, n)).into_owned(), e.view((n, 0), (n, n)).into_owned());
    match kind {
        GroupKind::G1 => {
            let (k, s) = (skew(rng, n, 1.0), symmetric(rng, n, 1.0));
            let x = from_quadrants(&k, &-&s, &s, &k);
            let (a11, a21) = split(expm(&x));
            GroupParams::G1 { a11, a21 }
        }
        GroupKind::G2 | GroupKind::G3 => {
            let (k, s) = (skew(rng, n, 1.0), symmetric(rng, n, 1.0));
            let (a11, off) = split(expm(&from_quadrants(&k, &s, &s, &k)));
            if kind == GroupKind::G2 {
                GroupParams::G2 { a11, a31: off }
            } else {
                GroupParams::G3 { a11, a41: off }
            }
        }
        GroupKind::H => {
            let x = symmetric(rng, n, 1.0);
            let y = &x * &x * 0.5 + skew(rng, n, 1.0);
            GroupParams::H { x, y }
        }
        GroupKind::B => {
            let (b2, b3, b4): (f64, f64, f64) =
                (rng.gen_range(-0.9..0.9), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b1 = (1.0 - b2 * b2 + b3 * b3 + b4 * b4).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            GroupParams::B { b: [b1, b2, b3, b4] }
        }
        GroupKind::C => {
            let mut c = rng.gen_range(0.2..2.0);
            if rng.gen_bool(0.5) {
                c = -c;
            }
            GroupParams::c_from(c, c)
        }
    }
}

fn from_quadrants(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().exp()
}

/// A random element of the Lie algebra `so(2n,2n)`.
pub fn so_algebra_random(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = metric(n);
    let m = uniform(rng, 4 * n, 4 * n, 0.5);
    (&m - &g * m.transpose() * &g) * 0.5
}

/// `exp(X)` for a seeded random `X ∈ so(2n,2n)`.
pub fn so_random(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    expm(&so_algebra_random(n, &mut rng))
}

/// Orthonormal basis of `{X ∈ so(2n,2n) : X W ⊂ W}`, one flattened matrix per column.
pub fn w_stabilizer_basis(n: usize) -> DMatrix<f64> {
    let d = 4 * n;
    let dim = d * d;
    let g = metric(n);
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let unit = |k: usize| {
        let mut e = DMatrix::zeros(d, d);
        e[(k % d, k / d)] = 1.0;
        e
    };
    // Columns of the linear constraint maps, one basis matrix at a time.
    let images: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..dim)
        .map(|k| {
            let x = unit(k);
            let alg = x.transpose() * &g + &g * &x;
            let xi = xi_basis(n);
            let img = &x * &xi;
            let proj = &xi * xi.transpose() * 0.5;
            (alg, &img - proj * &img)
        })
        .collect();
    let (r1, r2) = (d * d, d * 2 * n);
    for r in 0..r1 + r2 {
        rows.push(DVector::from_iterator(dim, images.iter().map(|(a, w)| if r < r1 { a[r] } else { w[r - r1] })));
    }
    let mut m = DMatrix::zeros(rows.len(), dim);
    for (i, r) in rows.iter().enumerate() {
        m.row_mut(i).copy_from(&r.transpose());
    }
    let eig = (m.transpose() * &m).symmetric_eigen();
    let keep: Vec<usize> = (0..dim).filter(|&k| eig.eigenvalues[k].abs() < 1e-9).collect();
    DMatrix::from_fn(dim, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

/// `exp(X)` for a seeded random `X` in the stabilizer algebra of `W`.
pub fn w_preserving_random(n: usize, seed: u64) -> DMatrix<f64> {
    let basis = w_stabilizer_basis(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DVector::from_fn(basis.ncols(), |_, _| rng.gen_range(-0.5..0.5));
    let flat = basis * coeffs;
    let d = 4 * n;
    expm(&DMatrix::from_column_slice(d, d, flat.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_n1() {
        let l = lambda_matrix(1);
        let expected =
            DMatrix::from_row_slice(4, 4, &[0., -1., 0., 1., 1., 0., 1., 0., 0., 1., 0., -1., 1., 0., 1., 0.]);
        assert_eq!(l, expected);
    }

    #[test]
    fn block_b_with_b2_one() {
        let b = sample_group(&GroupParams::B { b: [0.0, 1.0, 0.0, 0.0] }, 1e-12).unwrap();
        let (p, pc) = p_matrices(&b, 1e-12).unwrap();
        assert_eq!(p, DMatrix::from_row_slice(2, 2, &[0., -1., 1., 0.]));
        assert_eq!(p, pc);
    }

    #[test]
    fn expm_matches_rotation() {
        let x = DMatrix::from_row_slice(2, 2, &[0.0, -3.0, 3.0, 0.0]);
        let r = expm(&x);
        assert!((r[(0, 0)] - 3f64.cos()).abs() < 1e-13 && (r[(1, 0)] - 3f64.sin()).abs() < 1e-13);
        assert_eq!(expm(&DMatrix::zeros(3, 3)), DMatrix::identity(3, 3));
    }

    #[test]
    fn stabilizer_dimension() {
        // GL(2n) acting on W plus the skew maps V/W → W: 4n² + n(2n − 1).
        for n in 1..=2 {
            assert_eq!(w_stabilizer_basis(n).ncols(), 4 * n * n + n * (2 * n - 1));
        }
    }

    #[test]
    fn c_degenerate_one_zero_rejected() {
        let p = GroupParams::C { c: 1.0, c_prime: 0.0, eps: 1.0, t: 0.0 };
        assert!(matches!(sample_group(&p, 1e-9), Err(Error::Constraint(_))));
    }
}

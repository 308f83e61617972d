//! Differential forms on `R^m` with symbolic coefficients, and matrices of them.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::sampling;

/// A `p`-form `Σ c_I dx_I` over strictly increasing 1-based multi-indices `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialForm {
    m: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

/// Sort `idx` in place and return the permutation sign, or `None` on a repeat.
fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DifferentialForm {
    pub fn zero(m: usize, degree: usize) -> Self {
        DifferentialForm { m, degree, terms: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn scalar(m: usize, e: Expr) -> Self {
        let mut f = Self::zero(m, 0);
        f.accumulate(vec![], e);
        f
    }

    /// The coordinate 1-form `dx_k`.
    pub fn dx(m: usize, k: usize) -> Self {
        assert!((1..=m).contains(&k), "dx{k} outside dimension {m}");
        let mut f = Self::zero(m, 1);
        f.accumulate(vec![k], Expr::one());
        f
    }

    /// `Σ c_k dx_k` from a coefficient list of length `m`.
    pub fn one_form(coeffs: Vec<Expr>) -> Self {
        let m = coeffs.len();
        let mut f = Self::zero(m, 1);
        for (k, c) in coeffs.into_iter().enumerate() {
            f.accumulate(vec![k + 1], c);
        }
        f
    }

    /// Build from arbitrary index tuples; each tuple is sorted with its sign.
    pub fn from_terms(m: usize, degree: usize, terms: impl IntoIterator<Item = (Vec<usize>, Expr)>) -> Result<Self> {
        let mut f = Self::zero(m, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&k| k == 0 || k > m) {
                return Err(Error::DimensionMismatch(format!("index tuple {idx:?} for a {degree}-form on R^{m}")));
            }
            if let Some(s) = sort_sign(&mut idx) {
                f.accumulate(idx, if s > 0.0 { c } else { -c });
            }
        }
        Ok(f)
    }

    /// The differential `df = Σ ∂_k f dx_k`.
    pub fn exact(m: usize, f: &Expr) -> Self {
        Self::one_form((1..=m).map(|k| f.partial(k)).collect())
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// The function of a 0-form.
    pub fn as_scalar(&self) -> Expr {
        assert_eq!(self.degree, 0, "as_scalar on a {}-form", self.degree);
        self.coefficient(&[])
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.m != o.m || self.degree != o.degree {
            return Err(Error::DimensionMismatch(format!(
                "{}-form on R^{} vs {}-form on R^{}",
                self.degree, self.m, o.degree, o.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut r = self.clone();
        for (idx, c) in &o.terms {
            r.accumulate(idx.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Expr::constant(-1.0))
    }

    /// Multiply by a function.
    pub fn scale(&self, s: &Expr) -> Self {
        let mut r = Self::zero(self.m, self.degree);
        for (idx, c) in &self.terms {
            r.accumulate(idx.clone(), s * c);
        }
        r
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if self.m != o.m {
            return Err(Error::DimensionMismatch(format!("wedge of forms on R^{} and R^{}", self.m, o.m)));
        }
        let mut r = Self::zero(self.m, self.degree + o.degree);
        if r.degree > r.m {
            return Ok(r);
        }
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut idx: Vec<usize> = a.iter().chain(b).copied().collect();
                if let Some(s) = sort_sign(&mut idx) {
                    let c = ca * cb;
                    r.accumulate(idx, if s > 0.0 { c } else { -c });
                }
            }
        }
        Ok(r)
    }

    pub fn ext_d(&self) -> Self {
        let mut r = Self::zero(self.m, self.degree + 1);
        if r.degree > r.m {
            return r;
        }
        for (idx, c) in &self.terms {
            for k in 1..=self.m {
                if idx.contains(&k) {
                    continue;
                }
                let dc = c.partial(k);
                if dc.is_zero() {
                    continue;
                }
                // dx_k ∧ dx_I: moving dx_k past the smaller indices.
                let pos = idx.iter().filter(|&&i| i < k).count();
                let mut new = idx.clone();
                new.insert(pos, k);
                r.accumulate(new, if pos % 2 == 0 { dc } else { -dc });
            }
        }
        r
    }

    /// Numeric coefficients at `p`, keyed by multi-index.
    pub fn eval(&self, p: &[f64]) -> Result<BTreeMap<Vec<usize>, f64>> {
        self.terms.iter().map(|(i, c)| Ok((i.clone(), c.eval(p)?))).collect()
    }

    /// Components `(c_1, …, c_m)` of a 1-form at `p`.
    pub fn eval_one_form(&self, p: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(self.degree, 1, "eval_one_form on a {}-form", self.degree);
        let mut v = vec![0.0; self.m];
        for (idx, c) in &self.terms {
            v[idx[0] - 1] = c.eval(p)?;
        }
        Ok(v)
    }

    /// Largest absolute coefficient at `p`.
    pub fn max_abs(&self, p: &[f64]) -> Result<f64> {
        let mut r: f64 = 0.0;
        for c in self.terms.values() {
            r = r.max(c.eval(p)?.abs());
        }
        Ok(r)
    }
}

/// An `r × c` grid of `p`-forms, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixForm {
    rows: usize,
    cols: usize,
    m: usize,
    degree: usize,
    entries: Vec<DifferentialForm>,
}

impl MatrixForm {
    pub fn zeros(rows: usize, cols: usize, m: usize, degree: usize) -> Self {
        MatrixForm { rows, cols, m, degree, entries: vec![DifferentialForm::zero(m, degree); rows * cols] }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        m: usize,
        degree: usize,
        mut f: impl FnMut(usize, usize) -> DifferentialForm,
    ) -> Result<Self> {
        let mut r = Self::zeros(rows, cols, m, degree);
        for i in 0..rows {
            for j in 0..cols {
                r.set(i, j, f(i, j))?;
            }
        }
        Ok(r)
    }

    /// A constant matrix as a matrix of 0-forms.
    pub fn constant(a: &DMatrix<f64>, m: usize) -> Self {
        let mut r = Self::zeros(a.nrows(), a.ncols(), m, 0);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                r.entries[i * a.ncols() + j] = DifferentialForm::scalar(m, Expr::constant(a[(i, j)]));
            }
        }
        r
    }

    /// Matrix of functions as 0-forms.
    pub fn functions(rows: usize, cols: usize, m: usize, f: impl Fn(usize, usize) -> Expr) -> Self {
        let mut r = Self::zeros(rows, cols, m, 0);
        for i in 0..rows {
            for j in 0..cols {
                r.entries[i * cols + j] = DifferentialForm::scalar(m, f(i, j));
            }
        }
        r
    }

    /// `α · C` for a constant matrix `C` and a form `α`.
    pub fn constant_times(c: &DMatrix<f64>, alpha: &DifferentialForm) -> Self {
        let mut r = Self::zeros(c.nrows(), c.ncols(), alpha.dim(), alpha.degree());
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                if c[(i, j)] != 0.0 {
                    r.entries[i * c.ncols() + j] = alpha.scale(&Expr::constant(c[(i, j)]));
                }
            }
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &DifferentialForm {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: DifferentialForm) -> Result<()> {
        if f.dim() != self.m || f.degree() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "entry is a {}-form on R^{}, matrix holds {}-forms on R^{}",
                f.degree(),
                f.dim(),
                self.degree,
                self.m
            )));
        }
        self.entries[i * self.cols + j] = f;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut r = Self::zeros(self.cols, self.rows, self.m, self.degree);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        r
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if (self.rows, self.cols, self.m, self.degree) != (o.rows, o.cols, o.m, o.degree) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} {}-forms vs {}x{} {}-forms",
                self.rows, self.cols, self.degree, o.rows, o.cols, o.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(MatrixForm { entries, ..self.clone_shape() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(DifferentialForm::neg)
    }

    pub fn scale(&self, s: &Expr) -> Self {
        self.map(|f| f.scale(s))
    }

    fn clone_shape(&self) -> Self {
        MatrixForm { rows: self.rows, cols: self.cols, m: self.m, degree: self.degree, entries: vec![] }
    }

    fn map(&self, f: impl Fn(&DifferentialForm) -> DifferentialForm) -> Self {
        MatrixForm { entries: self.entries.iter().map(f).collect(), ..self.clone_shape() }
    }

    pub fn ext_d(&self) -> Self {
        let mut r = self.map(DifferentialForm::ext_d);
        r.degree = self.degree + 1;
        r
    }

    /// Matrix product with entry-wise wedge.
    pub fn mwedge(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows || self.m != o.m {
            return Err(Error::DimensionMismatch(format!(
                "mwedge of {}x{} and {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut r = Self::zeros(self.rows, o.cols, self.m, self.degree + o.degree);
        for i in 0..self.rows {
            for k in 0..o.cols {
                let mut acc = DifferentialForm::zero(self.m, self.degree + o.degree);
                for j in 0..self.cols {
                    let (a, b) = (self.get(i, j), o.get(j, k));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.wedge(b)?)?;
                }
                r.entries[i * o.cols + k] = acc;
            }
        }
        Ok(r)
    }

    /// Value of a matrix of 0-forms at `p`.
    pub fn eval_functions(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        assert_eq!(self.degree, 0, "eval_functions on {}-forms", self.degree);
        let mut a = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                a[(i, j)] = self.get(i, j).as_scalar().eval(p)?;
            }
        }
        Ok(a)
    }

    /// Coefficient matrices `(ω_1, …, ω_m)` of a matrix of 1-forms at `p`.
    pub fn eval_one_forms(&self, p: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        assert_eq!(self.degree, 1, "eval_one_forms on {}-forms", self.degree);
        let mut out = vec![DMatrix::zeros(self.rows, self.cols); self.m];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (idx, c) in self.get(i, j).terms() {
                    out[idx[0] - 1][(i, j)] = c.eval(p)?;
                }
            }
        }
        Ok(out)
    }

    /// The `dx_k` coefficient matrix of a matrix of 1-forms at `p`.
    pub fn eval_direction(&self, p: &[f64], k: usize) -> Result<DMatrix<f64>> {
        let mut a = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let c = self.get(i, j).coefficient(&[k]);
                if !c.is_zero() {
                    a[(i, j)] = c.eval(p)?;
                }
            }
        }
        Ok(a)
    }

    /// Largest absolute coefficient over all entries at `p`.
    pub fn max_abs(&self, p: &[f64]) -> Result<f64> {
        let mut r: f64 = 0.0;
        for e in &self.entries {
            r = r.max(e.max_abs(p)?);
        }
        Ok(r)
    }

    /// Largest absolute coefficient over all entries and points.
    pub fn sup_norm(&self, points: &[Vec<f64>]) -> Result<f64> {
        sampling::try_max(points, |p| self.max_abs(p))
    }
}

/// `dω + ω∧ω` for a square matrix of 1-forms.
pub fn curvature(omega: &MatrixForm) -> Result<MatrixForm> {
    if omega.rows() != omega.cols() || omega.degree() != 1 {
        return Err(Error::DimensionMismatch("curvature needs a square matrix of 1-forms".into()));
    }
    omega.ext_d().add(&omega.mwedge(omega)?)
}

/// Sup-norm of `dω + ω∧ω` over the sample points.
pub fn flatness_residual(omega: &MatrixForm, points: &[Vec<f64>]) -> Result<f64> {
    curvature(omega)?.sup_norm(points)
}

/// Whether the potential `x` of `ω = dx` commutes pointwise with every `ω_k`.
///
/// Errors with `Precondition` when `ω` differs from `dx` by more than `1e-10`.
pub fn potential_commutes(x: &MatrixForm, omega: &MatrixForm, points: &[Vec<f64>]) -> Result<bool> {
    const TOL: f64 = 1e-10;
    if x.degree() != 0 || omega.degree() != 1 {
        return Err(Error::DimensionMismatch("potential must be 0-forms, ω 1-forms".into()));
    }
    let gap = x.ext_d().sub(omega)?.sup_norm(points)?;
    if gap > TOL {
        return Err(Error::Precondition(format!("ω differs from dx by {gap:e}")));
    }
    let worst = sampling::try_max(points, |p| {
        let xv = x.eval_functions(p)?;
        let mut r: f64 = 0.0;
        for w in omega.eval_one_forms(p)? {
            r = r.max((&xv * &w - &w * &xv).amax());
        }
        Ok(r)
    })?;
    Ok(worst <= TOL)
}

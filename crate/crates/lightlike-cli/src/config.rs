use std::collections::BTreeMap;

use lightlike::generators::{Branch, FlatFamily, FlatFamilySpec, PairSpec};
use lightlike::sampling::{SampleBox, DEFAULT_SAMPLES, DEFAULT_TOL};
use lightlike::structures::Sign;
use lightlike::{parse, DifferentialForm, Expr};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::CliError;

fn default_dim() -> usize {
    2
}

fn default_n() -> usize {
    1
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// One verification job, read from a single JSON document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// Dimension of the parameter space `R^m`.
    #[serde(default = "default_dim")]
    pub m: usize,
    /// Bundle rank is `4n`.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Scalar expressions in `x1..xm`.
    #[serde(default)]
    pub exprs: BTreeMap<String, String>,
    /// 1-forms as coefficient lists `[c_1, .., c_m]` of `dx1..dxm`.
    #[serde(default)]
    pub forms: BTreeMap<String, Vec<String>>,
    /// Numeric matrices as row lists.
    #[serde(default)]
    pub matrices: BTreeMap<String, Vec<Vec<f64>>>,
    /// Discrete switches: signs, branch, family, group kind.
    #[serde(default)]
    pub options: BTreeMap<String, String>,
    /// `[lo, hi]` per axis; defaults to `[-1, 1]^m`.
    #[serde(rename = "box", default)]
    pub bounds: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.m == 0 || self.n == 0 {
            return Err(CliError::Invalid("m and n must be positive".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Invalid("samples must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Invalid(format!("tol must be positive, got {}", self.tol)));
        }
        self.sample_box().map(|_| ())
    }

    pub fn sample_box(&self) -> Result<SampleBox, CliError> {
        match &self.bounds {
            None => Ok(SampleBox::unit(self.m)),
            Some(b) => {
                if b.len() != self.m {
                    return Err(CliError::Invalid(format!("box has {} axes, m = {}", b.len(), self.m)));
                }
                let pairs: Vec<(f64, f64)> = b.iter().map(|a| (a[0], a[1])).collect();
                SampleBox::new(&pairs).map_err(|e| CliError::Invalid(e.to_string()))
            }
        }
    }

    pub fn points(&self) -> Result<Vec<Vec<f64>>, CliError> {
        Ok(self.sample_box()?.sample(self.samples, self.seed))
    }

    pub fn expr(&self, name: &str) -> Result<Expr, CliError> {
        self.expr_in(name, self.m)
    }

    /// Parse a binding as a function of `m` coordinates.
    pub fn expr_in(&self, name: &str, m: usize) -> Result<Expr, CliError> {
        let src = self.exprs.get(name).ok_or_else(|| CliError::Invalid(format!("expression `{name}` is not bound")))?;
        parse(src, m).map_err(|e| CliError::Invalid(format!("expression `{name}`: {e}")))
    }

    pub fn expr_or(&self, name: &str, default: &str) -> Result<Expr, CliError> {
        match self.exprs.get(name) {
            Some(_) => self.expr(name),
            None => parse(default, self.m).map_err(CliError::from),
        }
    }

    /// A bound 1-form, or `None` when absent.
    pub fn form(&self, name: &str) -> Result<Option<DifferentialForm>, CliError> {
        let Some(cs) = self.forms.get(name) else { return Ok(None) };
        if cs.len() != self.m {
            return Err(CliError::Invalid(format!("form `{name}` has {} coefficients, m = {}", cs.len(), self.m)));
        }
        let coeffs = cs
            .iter()
            .map(|s| parse(s, self.m).map_err(|e| CliError::Invalid(format!("form `{name}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(DifferentialForm::one_form(coeffs)))
    }

    pub fn matrix(&self, name: &str) -> Result<DMatrix<f64>, CliError> {
        let rows = self.matrices.get(name).ok_or_else(|| CliError::Invalid(format!("matrix `{name}` is not bound")))?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(CliError::Invalid(format!("matrix `{name}` must be a non-empty rectangular array")));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CliError::Invalid(format!("matrix `{name}` has non-finite entries")));
        }
        Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn option(&self, name: &str) -> Option<&str> {
        self.options.get(name).map(String::as_str)
    }

    pub fn flag(&self, name: &str) -> Result<bool, CliError> {
        match self.option(name) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(CliError::Invalid(format!("option `{name}` must be true or false, got `{v}`"))),
        }
    }

    pub fn sign(&self, name: &str) -> Result<Option<Sign>, CliError> {
        self.option(name)
            .map(|v| match v {
                "+" | "plus" | "1" => Ok(Sign::Plus),
                "-" | "minus" | "-1" => Ok(Sign::Minus),
                _ => Err(CliError::Invalid(format!("option `{name}` must be + or -, got `{v}`"))),
            })
            .transpose()
    }

    pub fn sign_or(&self, name: &str, default: Sign) -> Result<Sign, CliError> {
        Ok(self.sign(name)?.unwrap_or(default))
    }

    pub fn branch(&self) -> Result<Branch, CliError> {
        match self.option("branch") {
            None | Some("A") => Ok(Branch::A),
            Some("B") => Ok(Branch::B),
            Some(v) => Err(CliError::Invalid(format!("branch must be A or B, got `{v}`"))),
        }
    }

    pub fn pair_spec(&self) -> Result<PairSpec, CliError> {
        Ok(PairSpec {
            f_plus: self.expr("f_plus")?,
            f_minus: self.expr("f_minus")?,
            g_plus: self.expr("g_plus")?,
            g_minus: self.expr("g_minus")?,
            branch: self.branch()?,
            mu: self.sign_or("mu", Sign::Plus)?,
            m: self.m,
        })
    }

    pub fn family_spec(&self) -> Result<FlatFamilySpec, CliError> {
        let family = match self.option("family") {
            Some("symmetric") => FlatFamily::SymmetricPotential { phi: self.expr("phi")?, c0: self.matrix("C0")? },
            Some("tridiagonal") => FlatFamily::Tridiagonal { f1: self.expr("f1")?, f2: self.expr("f2")? },
            Some("skew") => FlatFamily::SkewPotential { psi: self.expr("psi")?, c0: self.matrix("C0")? },
            Some("quaternion") => FlatFamily::QuaternionBlocks {
                p: self.n / 4,
                a1: self.expr("a1")?,
                b1: self.expr("b1")?,
                a2: self.expr("a2")?,
                b2: self.expr("b2")?,
            },
            Some(v) => return Err(CliError::Invalid(format!("unknown family `{v}`"))),
            None => return Err(CliError::Invalid("option `family` is required".into())),
        };
        Ok(FlatFamilySpec {
            family,
            f: self.expr_or("f", "0")?,
            n: self.n,
            m: self.m,
            eps: self.sign_or("eps", Sign::Plus)?,
            mu: self.sign_or("mu", Sign::Plus)?,
        })
    }
}

use lightlike::connection::{
    factorization_check, fully_lightlike_check, square_norm, walker_residual, walker_to_paracomplex, ConnectionForm,
    FactorizationReport, LightlikeReport, WalkerDistribution,
};
use lightlike::gauss::{
    conformal_gauss, gauss_frame_and_omega, lift_report, nu_spread, shape_ops, surface_from_null_curves, NullCurve,
};
use lightlike::generators::{
    assemble_n1, branch_classify, curvature_residual, family_omega, family_potential, frame_integrate, loop_closure,
    pair_omega, Branch, BranchClass, FlatFamilySpec, PairSpec,
};
use lightlike::neutral::{
    lambda_matrix, metric, p_matrices, random_params, sample_group, so_random, w_preserving_random, w_span_residual,
    GroupKind,
};
use lightlike::structures::{
    nilpotent_frame_matrix, nilpotent_from_section, paracomplex_frame_matrix, paracomplex_from_section,
    section_from_nilpotent, section_from_paracomplex, to_background, NilpotentReport, ParacomplexReport, Sign,
};
use lightlike::{sampling, DifferentialForm, Error, Expr};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::Stage;
use crate::CliError;

/// Points on which `dg±` is checked before a pair is built.
pub const PAIR_VALIDATION_POINTS: usize = 1000;

/// Tolerances fixed by the frame integrator and the Gauss-map pipeline.
pub const FRAME_TOL: f64 = 1e-7;
pub const LOOP_TOL: f64 = 1e-6;
pub const SURFACE_TOL: f64 = 1e-8;
pub const SHAPE_TOL: f64 = 1e-6;
pub const OMEGA_TOL: f64 = 1e-5;

pub const COMMANDS: [&str; 10] = [
    "so-check",
    "group-sample",
    "structure-check",
    "factorize",
    "walker-check",
    "norm",
    "flat-gen",
    "pair-gen",
    "classify",
    "gauss-verify",
];

/// Stages and an optional classification result.
pub type Outcome = (Vec<Stage>, Option<String>);

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let stages = match cfg.command.as_str() {
        "so-check" => so_check(cfg)?,
        "group-sample" => group_sample(cfg)?,
        "structure-check" => structure_check(cfg)?,
        "factorize" => factorize(cfg)?,
        "walker-check" => walker_check(cfg)?,
        "norm" => norm(cfg)?,
        "flat-gen" => flat_gen(cfg)?,
        "pair-gen" => return pair_gen(cfg),
        "classify" => return classify(cfg),
        "gauss-verify" => return gauss_verify(cfg),
        other => return Err(CliError::Invalid(format!("unknown command `{other}`"))),
    };
    Ok((stages, None))
}

fn tag(name: &str, eps: Sign) -> String {
    format!("{name}({eps})")
}

fn sup(form: &DifferentialForm, points: &[Vec<f64>]) -> Result<f64, CliError> {
    Ok(sampling::try_max(points, |p| form.max_abs(p))?)
}

fn class_name(c: BranchClass) -> &'static str {
    match c {
        BranchClass::A => "A",
        BranchClass::B => "B",
        BranchClass::Both => "both",
        BranchClass::Neither => "neither",
    }
}

fn square_4n(cfg: &RunConfig, name: &str) -> Result<DMatrix<f64>, CliError> {
    let a = cfg.matrix(name)?;
    if !a.is_square() || a.nrows() % 4 != 0 {
        return Err(CliError::Invalid(format!("matrix `{name}` must be 4n×4n, got {}×{}", a.nrows(), a.ncols())));
    }
    Ok(a)
}

/// Per-member residuals: `ᵗAGA − G`, `det A − 1`, W-span, `P − P^×`, `det P − 1`.
fn member_residuals(a: &DMatrix<f64>, tol: f64) -> [f64; 5] {
    let g = metric(a.nrows() / 4);
    let orth = (a.transpose() * &g * a - &g).amax();
    let det = (a.determinant() - 1.0).abs();
    let w = w_span_residual(a);
    let (pq, dp) = match p_matrices(a, tol) {
        Ok((p, pc)) => ((&p - &pc).amax(), (p.determinant() - 1.0).abs()),
        Err(_) => (f64::NAN, f64::NAN),
    };
    [orth, det, w, pq, dp]
}

const MEMBER_STAGES: [&str; 5] = ["metric", "determinant", "w_preserving", "p_equals_cross", "det_p"];

/// Largest value, with NaN winning so that an undefined residual fails its stage.
fn worst(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn member_stages(rows: &[[f64; 5]], tol: f64, skip: usize) -> Vec<Stage> {
    (0..5 - skip)
        .map(|k| Stage::residual(MEMBER_STAGES[k], worst(rows.iter().map(|r| r[k])), rows.len(), tol))
        .collect()
}

fn so_check(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let a = square_4n(cfg, "A")?;
    let r = member_residuals(&a, cfg.tol);
    let skip = if cfg.flag("admissible")? { 0 } else { 3 };
    Ok(member_stages(&[r], cfg.tol, skip))
}

fn group_sample(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let kind = cfg.option("kind").ok_or_else(|| CliError::Invalid("option `kind` is required".into()))?;
    if kind == "w-random" {
        let rows = (0..cfg.samples as u64)
            .map(|k| {
                let a = w_preserving_random(n, cfg.seed.wrapping_add(k));
                let (p, pc) = p_matrices(&a, cfg.tol)?;
                Ok([w_span_residual(&a), (p.determinant() * pc.determinant() - 1.0).abs()])
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let col = |k: usize| rows.iter().map(|r: &[f64; 2]| r[k]).fold(0.0, f64::max);
        return Ok(vec![
            Stage::residual("w_preserving", col(0), rows.len(), cfg.tol),
            Stage::residual("det_p_times_det_p_cross", col(1), rows.len(), cfg.tol),
        ]);
    }
    let pool: Vec<GroupKind> = GroupKind::ALL.into_iter().filter(|k| n == 1 || !k.requires_n1()).collect();
    let mut members = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let a = if kind == "product" {
            let factors = rng.gen_range(1..=3);
            let mut acc = DMatrix::identity(4 * n, 4 * n);
            for _ in 0..factors {
                let k = pool[rng.gen_range(0..pool.len())];
                acc *= sample_group(&random_params(k, n, &mut rng), 1e-9)?;
            }
            acc
        } else {
            let k =
                GroupKind::from_name(kind).ok_or_else(|| CliError::Invalid(format!("unknown group kind `{kind}`")))?;
            if k.requires_n1() && n != 1 {
                return Err(CliError::Invalid(format!("group {kind} needs n = 1")));
            }
            sample_group(&random_params(k, n, &mut rng), 1e-9)?
        };
        members.push(a);
    }
    let rows = sampling::map(&members, |a| member_residuals(a, cfg.tol));
    Ok(member_stages(&rows, cfg.tol, 0))
}

fn structure_check(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let n = cfg.n;
    let l = lambda_matrix(n);
    let mut stages = vec![Stage::residual("lambda_squared", (&l * &l).amax(), 1, cfg.tol)];
    let frames: Vec<DMatrix<f64>> = (0..cfg.samples as u64).map(|k| so_random(n, cfg.seed.wrapping_add(k))).collect();
    for eps in [Sign::Plus, Sign::Minus] {
        let rows = sampling::try_map(&frames, |e| {
            let nm = to_background(e, &nilpotent_frame_matrix(n, eps));
            let jm = to_background(e, &paracomplex_frame_matrix(n, eps));
            let nr = NilpotentReport::of(&nm);
            let jr = ParacomplexReport::of(&jm);
            let trip = if n == 1 {
                let (jb, js) = paracomplex_from_section(&section_from_paracomplex(&jm), cfg.tol)?;
                let (nb, ns) = nilpotent_from_section(&section_from_nilpotent(&nm), cfg.tol)?;
                let side = if js == eps && ns == eps { 0.0 } else { f64::INFINITY };
                (jb - &jm).amax().max((nb - &nm).amax()).max(side)
            } else {
                0.0
            };
            let rank = (nr.rank as f64 - 2.0 * n as f64).abs();
            Ok([nr.square, rank, nr.isotropy, nr.skew, jr.square, jr.reversing, trip])
        })?;
        let names = ["n_squared", "n_rank", "n_isotropy", "n_skew", "j_squared", "j_reversing", "section_round_trip"];
        let take = if n == 1 { 7 } else { 6 };
        for (k, name) in names.iter().enumerate().take(take) {
            stages.push(Stage::residual(tag(name, eps), worst(rows.iter().map(|r| r[k])), rows.len(), cfg.tol));
        }
    }
    Ok(stages)
}

/// Where a connection form comes from.
enum Source {
    Pair(PairSpec),
    Family(FlatFamilySpec),
    Entries,
}

const ENTRY_NAMES: [(&str, usize, usize); 6] =
    [("w21", 2, 1), ("w31", 3, 1), ("w32", 3, 2), ("w41", 4, 1), ("w42", 4, 2), ("w43", 4, 3)];

fn source(cfg: &RunConfig) -> Result<Source, CliError> {
    let which = match cfg.option("source") {
        Some(s) => s,
        None if cfg.option("family").is_some() => "family",
        None if cfg.exprs.contains_key("g_plus") => "pair",
        None => "entries",
    };
    match which {
        "pair" => Ok(Source::Pair(cfg.pair_spec()?)),
        "family" => Ok(Source::Family(cfg.family_spec()?)),
        "entries" => Ok(Source::Entries),
        other => Err(CliError::Invalid(format!("unknown connection source `{other}`"))),
    }
}

fn build_connection(cfg: &RunConfig, src: &Source, points: &[Vec<f64>]) -> Result<ConnectionForm, CliError> {
    match src {
        Source::Pair(spec) => {
            let check = cfg.sample_box()?.sample(PAIR_VALIDATION_POINTS, cfg.seed);
            Ok(pair_omega(spec, &check, cfg.tol)?)
        }
        Source::Family(spec) => Ok(family_omega(spec, points, cfg.tol)?),
        Source::Entries => {
            if cfg.n != 1 {
                return Err(CliError::Invalid("connection entries are supported for n = 1".into()));
            }
            if let Some(bad) = cfg.forms.keys().find(|k| !ENTRY_NAMES.iter().any(|(name, ..)| name == k)) {
                return Err(CliError::Invalid(format!("unknown connection entry `{bad}`; use w21..w43")));
            }
            let entry = |k: usize| -> Result<(usize, usize, DifferentialForm), CliError> {
                let (name, i, j) = ENTRY_NAMES[k];
                Ok((i, j, cfg.form(name)?.unwrap_or_else(|| DifferentialForm::zero(cfg.m, 1))))
            };
            Ok(assemble_n1([entry(0)?, entry(1)?, entry(2)?, entry(3)?, entry(4)?, entry(5)?], cfg.m)?)
        }
    }
}

/// The `(ε, ν)` pairs to test: `ν = εμ_ε` for pairs, `ν = μ` for families.
fn sides(cfg: &RunConfig, src: &Source) -> Result<Vec<(Sign, Sign)>, CliError> {
    let eps_list = match (cfg.sign("eps")?, src) {
        (Some(e), _) => vec![e],
        (None, Source::Pair(_)) => vec![Sign::Plus, Sign::Minus],
        (None, Source::Family(s)) => vec![s.eps],
        (None, Source::Entries) => vec![Sign::Plus],
    };
    eps_list
        .into_iter()
        .map(|eps| {
            let nu = match (cfg.sign("nu")?, src) {
                (Some(v), _) => v,
                (None, Source::Pair(s)) => eps * s.mu_for(eps),
                (None, Source::Family(s)) => s.mu,
                (None, Source::Entries) => Sign::Plus,
            };
            Ok((eps, nu))
        })
        .collect()
}

fn factor_stages(
    w: &ConnectionForm,
    eps: Sign,
    nu: Sign,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<(Vec<Stage>, FactorizationReport), CliError> {
    let rep = factorization_check(w, eps, nu, points, tol)?;
    let lines = rep.line_residuals.iter().copied().fold(0.0, f64::max);
    let stages = vec![
        Stage::residual(tag("connection_equations", eps), lines, points.len(), tol),
        Stage::residual(tag("nabla_j_factor", eps), rep.residual, points.len(), tol),
    ];
    Ok((stages, rep))
}

fn factorize(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let points = cfg.points()?;
    let src = source(cfg)?;
    let w = build_connection(cfg, &src, &points)?;
    let compat = w.compatibility_residual(&points)?;
    let mut stages = vec![Stage::residual("compatibility", compat, points.len(), cfg.tol)];
    if compat <= cfg.tol {
        for (eps, nu) in sides(cfg, &src)? {
            stages.extend(factor_stages(&w, eps, nu, &points, cfg.tol)?.0);
        }
    }
    Ok(stages)
}

fn norm(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let points = cfg.points()?;
    let src = source(cfg)?;
    let w = build_connection(cfg, &src, &points)?;
    sides(cfg, &src)?
        .into_iter()
        .map(|(eps, _)| {
            Ok(Stage::residual(tag("square_norm", eps), square_norm(&w, eps, None, &points)?, points.len(), cfg.tol))
        })
        .collect()
}

fn walker_check(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let points = cfg.points()?;
    let src = source(cfg)?;
    let w = build_connection(cfg, &src, &points)?;
    let n = w.n();
    let explicit = match cfg.matrices.contains_key("D") {
        true => {
            let d = cfg.matrix("D")?;
            if d.shape() != (4 * n, 2 * n) {
                return Err(CliError::Invalid(format!("matrix `D` must be {}×{}", 4 * n, 2 * n)));
            }
            Some(WalkerDistribution::constant(&d, cfg.m))
        }
        false => None,
    };
    let mut stages = Vec::new();
    let all_sides = sides(cfg, &src)?;
    let runs: Vec<(String, WalkerDistribution)> = match explicit {
        Some(d) => vec![("walker".to_string(), d)],
        None => all_sides
            .iter()
            .map(|&(eps, nu)| (tag("walker", eps), WalkerDistribution::of_related(n, eps, nu, cfg.m)))
            .collect(),
    };
    let mut walker_ok = true;
    for (name, d) in &runs {
        stages.push(Stage::residual(format!("{name}_isotropy"), d.isotropy_residual(&points)?, points.len(), cfg.tol));
        let r = walker_residual(&w, d, &points)?;
        walker_ok &= r <= cfg.tol;
        stages.push(Stage::residual(name.clone(), r, points.len(), cfg.tol));
    }
    if cfg.exprs.contains_key("h") && walker_ok {
        let h = cfg.expr("h")?;
        let eps = cfg.sign_or("eps", Sign::Plus)?;
        let out = walker_to_paracomplex(&w, eps, &h, &points, cfg.tol)?;
        let weakest = sampling::try_map(&points, |p| out.alpha.max_abs(p))?.into_iter().fold(f64::INFINITY, f64::min);
        stages.push(Stage::verdict("paracomplex_alpha_nonzero", weakest > cfg.tol, weakest, points.len(), cfg.tol));
        let f = &out.factorization;
        stages.push(Stage::verdict(
            "paracomplex_factor",
            f.holds && f.residual <= cfg.tol,
            f.residual,
            points.len(),
            cfg.tol,
        ));
        stages.push(Stage::residual("paracomplex_distribution", out.distribution_residual, points.len(), cfg.tol));
    }
    Ok(stages)
}

fn flat_gen(cfg: &RunConfig) -> Result<Vec<Stage>, CliError> {
    let points = cfg.points()?;
    let spec = cfg.family_spec()?;
    let w = family_omega(&spec, &points, cfg.tol)?;
    let mut stages = vec![Stage::residual("flatness", curvature_residual(&w, &points)?, points.len(), cfg.tol)];
    let (factor, rep) = factor_stages(&w, spec.eps, spec.mu, &points, cfg.tol)?;
    stages.extend(factor);
    let want = DifferentialForm::exact(spec.m, &spec.f).scale(&Expr::constant(spec.mu.value()));
    stages.push(Stage::residual("alpha_is_mu_df", sup(&rep.alpha.sub(&want)?, &points)?, points.len(), cfg.tol));
    if cfg.flag("integrate")? {
        let bx = cfg.sample_box()?;
        let base: Vec<f64> = bx.lo.iter().zip(&bx.hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let e0 = DMatrix::identity(4 * spec.n, 4 * spec.n);
        let slow = frame_integrate(&w, None, &base, &e0, &points, cfg.tol)?;
        stages.push(Stage::residual("frame_orthonormality", slow.orthonormality, points.len(), FRAME_TOL));
        if cfg.flag("exp")? {
            let x = family_potential(&spec)?;
            let fast = frame_integrate(&w, Some(&x), &base, &e0, &points, cfg.tol)?;
            let gap = fast.frames.iter().zip(&slow.frames).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
            stages.push(Stage::residual("exp_vs_integrator", gap, points.len(), FRAME_TOL));
        }
        if spec.m >= 2 {
            let corners = bx.sample(10, cfg.seed.wrapping_add(1));
            let closure = corners
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (k, l) = (i % spec.m, (i + 1) % spec.m);
                    loop_closure(&w, c, k, l, 0.25 * (bx.hi[k] - bx.lo[k]), 0.25 * (bx.hi[l] - bx.lo[l]))
                })
                .collect::<Result<Vec<_>, _>>()?;
            stages.push(Stage::residual("loop_closure", closure.into_iter().fold(0.0, f64::max), 10, LOOP_TOL));
        }
    }
    Ok(stages)
}

/// `fully_lightlike_check`, with a sign change of `μ` over the samples counted as a failure.
fn lightlike(
    w: &ConnectionForm,
    eps: Sign,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<Option<LightlikeReport>, CliError> {
    match fully_lightlike_check(w, eps, points, tol) {
        Ok(r) => Ok(Some(r)),
        Err(Error::MixedSign) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn lightlike_stage(r: &Option<LightlikeReport>, eps: Sign, mu: Option<Sign>, points: usize, tol: f64) -> Stage {
    match r {
        Some(r) => {
            let ok = r.fully_lightlike && mu.is_none_or(|m| r.mu == Some(m));
            Stage::verdict(tag("fully_lightlike", eps), ok, r.null_residual, points, tol)
        }
        None => Stage::verdict(tag("fully_lightlike", eps), false, f64::NAN, points, tol),
    }
}

fn pair_gen(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let points = cfg.points()?;
    let spec = cfg.pair_spec()?;
    let src = Source::Pair(spec.clone());
    let w = build_connection(cfg, &src, &points)?;
    let np = points.len();
    let mut stages = vec![Stage::residual("flatness", curvature_residual(&w, &points)?, np, cfg.tol)];
    for eps in [Sign::Plus, Sign::Minus] {
        let r = lightlike(&w, eps, &points, cfg.tol)?;
        stages.push(lightlike_stage(&r, eps, Some(spec.mu_for(eps)), np, cfg.tol));
        if let Some(r) = &r {
            let gap = sup(&r.alpha.sub(&spec.alpha(eps))?, &points)?;
            stages.push(Stage::residual(tag("alpha", eps), gap, np, cfg.tol));
            stages.push(Stage::residual(tag("omega_factor", eps), r.factor_residual.unwrap_or(f64::NAN), np, cfg.tol));
        }
        stages.push(Stage::residual(tag("square_norm", eps), square_norm(&w, eps, None, &points)?, np, cfg.tol));
    }
    let class = branch_classify(&w, spec.mu, &points, cfg.tol)?;
    let want = match spec.branch {
        Branch::A => BranchClass::A,
        Branch::B => BranchClass::B,
    };
    let ok = class == want || class == BranchClass::Both;
    stages.push(Stage::verdict("branch", ok, 0.0, np, cfg.tol));
    Ok((stages, Some(class_name(class).to_string())))
}

fn classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let points = cfg.points()?;
    let src = source(cfg)?;
    let w = build_connection(cfg, &src, &points)?;
    let mu = match (&src, cfg.sign("mu")?) {
        (_, Some(m)) => m,
        (Source::Pair(s), None) => s.mu,
        _ => Sign::Plus,
    };
    let np = points.len();
    let mut stages = Vec::new();
    for eps in [Sign::Plus, Sign::Minus] {
        let r = lightlike(&w, eps, &points, cfg.tol)?;
        stages.push(lightlike_stage(&r, eps, None, np, cfg.tol));
    }
    let class = branch_classify(&w, mu, &points, cfg.tol)?;
    let ok = match cfg.option("expect") {
        Some(want) => want.eq_ignore_ascii_case(class_name(class)),
        None => class != BranchClass::Neither,
    };
    stages.push(Stage::verdict("branch", ok, 0.0, np, cfg.tol));
    Ok((stages, Some(class_name(class).to_string())))
}

fn null_curve(cfg: &RunConfig, prefix: char, lo: f64, hi: f64) -> Result<NullCurve, CliError> {
    let comps = [1, 2, 3].map(|k| cfg.expr_in(&format!("{prefix}{k}"), 1));
    let [a, b, c] = comps;
    let params: Vec<f64> = (0..=40).map(|k| lo + (hi - lo) * k as f64 / 40.0).collect();
    Ok(NullCurve::new([a?, b?, c?], &params, 1e-10)?)
}

fn gauss_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.m != 2 {
        return Err(CliError::Invalid("gauss-verify needs m = 2 (coordinates u, v)".into()));
    }
    let bx = cfg.sample_box()?;
    let (u, v) = ((bx.lo[0], bx.hi[0]), (bx.lo[1], bx.hi[1]));
    let a = null_curve(cfg, 'a', u.0 + v.0, u.1 + v.1)?;
    let b = null_curve(cfg, 'b', u.0 - v.1, u.1 - v.0)?;
    let points = bx.sample(cfg.samples, cfg.seed);
    let s = surface_from_null_curves(&a, &b, bx, &points, 1e-10)?;
    let np = points.len();
    let mut stages = vec![
        Stage::residual("conformality", s.conformality_residual(&points)?, np, SURFACE_TOL),
        Stage::residual("minimality", s.minimality_residual(&points)?, np, SURFACE_TOL),
    ];
    let mask = s.mask(&points, cfg.tol)?;
    let nm = mask.len();
    stages.push(Stage::verdict("negative_curvature_mask", nm > 0, (np - nm) as f64, np, cfg.tol));
    if mask.is_empty() {
        return Ok((stages, None));
    }
    stages.push(Stage::residual("sphere_map", conformal_gauss(&s, &mask)?.max(), nm, SHAPE_TOL));
    let ops = sampling::try_map(&mask, |p| shape_ops(&s, p, cfg.tol))?;
    let closed = ops.iter().map(|o| (o.a_iota - o.a_iota_closed).amax()).fold(0.0, f64::max);
    let a_nu = ops.iter().map(|o| o.a_nu.amax()).fold(0.0, f64::max);
    stages.push(Stage::residual("shape_operator_iota", closed, nm, SHAPE_TOL));
    stages.push(Stage::residual("shape_operator_nu", a_nu, nm, SHAPE_TOL));
    stages.push(Stage::residual("nu_constant_direction", nu_spread(&s, &mask)?, nm, SHAPE_TOL));
    let g = gauss_frame_and_omega(&s, &mask, cfg.tol)?;
    stages.push(Stage::residual("frame_orthonormality", g.frame_residual, nm, SURFACE_TOL));
    stages.push(Stage::residual("omega_numeric_vs_closed", g.agreement, nm, OMEGA_TOL));
    let lifts = lift_report(&g, &mask, OMEGA_TOL)?;
    for side in &lifts.sides {
        let eps = side.eps;
        let ll = &side.lightlike;
        let ok = ll.fully_lightlike && ll.mu == Some(Sign::Plus);
        stages.push(Stage::verdict(tag("fully_lightlike", eps), ok, ll.null_residual, nm, OMEGA_TOL));
        stages.push(Stage::residual(tag("alpha_closed_form", eps), side.alpha_gap, nm, OMEGA_TOL));
        stages.push(Stage::residual(tag("nabla_j_factor", eps), side.factor_residual, nm, OMEGA_TOL));
        stages.push(Stage::verdict(tag("walker", eps), side.walker, 0.0, nm, OMEGA_TOL));
    }
    stages.push(Stage::verdict("branch", lifts.branch == BranchClass::A, 0.0, nm, OMEGA_TOL));
    Ok((stages, Some(class_name(lifts.branch).to_string())))
}

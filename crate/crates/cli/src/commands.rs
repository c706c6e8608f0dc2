use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use condsym_core::detsys::{self, case1_pair, case22_check, residuals_case1, residuals_case2, DetsysError, QOperator};
use condsym_core::expr::{is_zero, ParseError};
use condsym_core::numerics::{
    mixed_residual, verify_reduction, write_matrix, ClosedForm, Grid, ResidualSettings, SideCondition, VerifySettings,
};
use condsym_core::reduction::{lookup, Reduction};
use condsym_core::report::Check;
use condsym_core::{parse, Expr, SamplingSpec};

use crate::report::Report;
use crate::{Common, GridArgs};

/// Problems that make the invocation itself invalid (exit 2).
pub type Usage = String;

fn expr(name: &str, text: &str) -> Result<Expr, Usage> {
    parse(text).map_err(|e: ParseError| format!("--{name}: {e}\n  {text}\n  {:>width$}", "^", width = e.offset + 1))
}

fn sampling(common: &Common) -> SamplingSpec {
    let mut spec = SamplingSpec::default()
        .with_samples(common.samples)
        .with_epsilon(common.epsilon)
        .with_seed(common.seed);
    for (var, (lo, hi)) in &common.ranges {
        spec = spec.with_range(var, *lo, *hi);
    }
    spec
}

fn record_sampling(report: &mut Report, common: &Common) {
    report.input("samples", common.samples);
    report.input("epsilon", common.epsilon);
    report.input("seed", common.seed);
    for (var, (lo, hi)) in &common.ranges {
        report.input(&format!("range_{var}"), vec![*lo, *hi]);
    }
}

fn record_grid(report: &mut Report, g: &GridArgs) {
    report.input("y_range", vec![g.y_range.0, g.y_range.1]);
    report.input("z_range", vec![g.z_range.0, g.z_range.1]);
    report.input("n", g.n);
    report.input("h", g.h);
}

fn grid(g: &GridArgs) -> Result<Grid<f64>, Usage> {
    Grid::new(g.y_range, g.z_range, g.n, g.n).map_err(|e| e.to_string())
}

fn residual_settings(g: &GridArgs) -> ResidualSettings<f64> {
    ResidualSettings {
        h: g.h,
        pde_tolerance: g.pde_tol,
        side_tolerance: g.side_tol,
    }
}

fn checks(report: &mut Report, list: Vec<Check>) {
    for c in list {
        report.check(c);
    }
}

pub fn classify(common: &Common, a: &str, b: &str, c: &str, f: &str) -> Result<Report, Usage> {
    let (a, b, c, f) = (expr("a", a)?, expr("b", b)?, expr("c", c)?, expr("f", f)?);
    let spec = sampling(common);
    let mut report = Report::new("classify");
    for (name, e) in [("a", &a), ("b", &b), ("c", &c), ("f", &f)] {
        report.input(name, e.canonical());
    }
    record_sampling(&mut report, common);
    let cls = match detsys::classify(&QOperator::new(a, b, c), &f, &spec) {
        Ok(cls) => cls,
        Err(DetsysError::ZeroOperator) => return Err(DetsysError::ZeroOperator.to_string()),
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    let op = &cls.operator;
    report.artifact("case", op.case.name());
    report.expr_artifact("K", &op.k);
    report.expr_artifact("L", &op.l);
    report.artifact("swapped", op.swapped);
    if op.swapped {
        report.expr_artifact("f_swapped", &cls.f);
    }
    checks(&mut report, cls.residuals.check(&spec));
    if op.case == detsys::Case::Case1 {
        add_case1_pair(&mut report, &op.l, &cls.f, &spec);
    }
    Ok(report)
}

fn add_case1_pair(report: &mut Report, l: &Expr, f: &Expr, spec: &SamplingSpec) {
    match case1_pair(l, f, spec) {
        Ok(pair) => {
            report.expr_artifact("u_y", &pair.rhs_y);
            report.expr_artifact("u_z", &pair.rhs_z);
            report.check(Check::vanishing("compatibility", &is_zero(&pair.compatibility, spec)));
        }
        Err(e) => report.error(e),
    }
}

pub fn case1(common: &Common, l: &str, f: &str, u: Option<&str>, g: &GridArgs) -> Result<Report, Usage> {
    let (l, f) = (expr("L", l)?, expr("f", f)?);
    let u = u.map(|u| expr("u", u)).transpose()?;
    let spec = sampling(common);
    let mut report = Report::new("case1");
    report.input("L", l.canonical());
    report.input("f", f.canonical());
    record_sampling(&mut report, common);
    checks(&mut report, residuals_case1(&l, &f).check(&spec));
    add_case1_pair(&mut report, &l, &f, &spec);
    if let Some(u) = u {
        report.input("u", u.canonical());
        record_grid(&mut report, g);
        let grid = grid(g)?;
        let field = ClosedForm::new(&u).map_err(|e| format!("--u: {e}"))?;
        let outcome = SideCondition::new(&Expr::zero(), &l)
            .and_then(|side| mixed_residual(&field, &f, &grid, &residual_settings(g), Some(&side)));
        match outcome {
            Ok(r) => checks(&mut report, r.checks()),
            Err(e) => report.error(e),
        }
    }
    Ok(report)
}

pub fn case22(common: &Common, s: &str, d: &str) -> Result<Report, Usage> {
    let (s, d) = (expr("s", s)?, expr("d", d)?);
    let spec = sampling(common);
    let mut report = Report::new("case22");
    report.input("s", s.canonical());
    report.input("d", d.canonical());
    record_sampling(&mut report, common);
    let c = match case22_check(&s, &d) {
        Ok(c) => c,
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    let (k, l) = c.operator();
    report.expr_artifact("K", &k);
    report.expr_artifact("L", &l);
    report.expr_artifact("f", &c.f);
    checks(&mut report, c.constraints().check(&spec));
    Ok(report)
}

fn reduction_artifacts(report: &mut Report, r: &Reduction) {
    let (k, l) = r.generator.operator();
    report.expr_artifact("k", &r.generator.k);
    report.expr_artifact("s", &r.generator.s);
    report.expr_artifact("K", &k);
    report.expr_artifact("L", &l);
    report.expr_artifact("omega", &r.omega);
    report.expr_artifact("sigma", &r.sigma);
}

pub fn reduce(common: &Common, t: &str, omega: Option<&str>, numeric_check: bool, char_step: f64) -> Result<Report, Usage> {
    let t = expr("T", t)?;
    let omega = omega.map(|w| expr("omega", w)).transpose()?;
    let spec = sampling(common);
    let mut report = Report::new("reduce");
    report.input("T", t.canonical());
    if let Some(w) = &omega {
        report.input("omega", w.canonical());
    }
    record_sampling(&mut report, common);
    let built = match &omega {
        Some(w) => Reduction::with_omega(&t, w, &spec),
        None => Reduction::new(&t, &spec),
    };
    let r = match built {
        Ok(r) => r,
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    reduction_artifacts(&mut report, &r);
    report.artifact("phi_only", r.phi_only(&spec).verdict.is_zero());
    report.artifact("reduced_form", r.reduced_form(&Expr::var("Phi")).to_string());
    checks(&mut report, r.identities(&spec));
    if numeric_check {
        report.input("char_step", char_step);
        match lookup(&t, &spec) {
            Some(fam) => match fam.numeric_agreement(char_step, 50) {
                Ok((err, (y, z))) => {
                    let at = [("y".to_string(), y), ("z".to_string(), z)].into_iter().collect();
                    report.check(Check::bounded("numeric_omega_agreement", err, 1e-6, Some(at)));
                }
                Err(e) => report.error(e),
            },
            None => report.error(format!("--numeric-check: no catalog family matches T = {t}")),
        }
    }
    Ok(report)
}

pub fn synthesize(common: &Common, t: &str, phi: &str) -> Result<Report, Usage> {
    let (t, phi) = (expr("T", t)?, expr("Phi", phi)?);
    let spec = sampling(common);
    let mut report = Report::new("synthesize");
    report.input("T", t.canonical());
    report.input("Phi", phi.canonical());
    record_sampling(&mut report, common);
    let rd = match Reduction::new(&t, &spec).and_then(|r| {
        reduction_artifacts(&mut report, &r);
        r.synthesize(&phi)
    }) {
        Ok(rd) => rd,
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    report.expr_artifact("f", &rd.f);
    match rd.reduced_ode() {
        Ok(ode) => report.artifact("reduced_ode", format!("phi'' = {}", ode.rhs)),
        Err(e) => report.error(e),
    }
    let (k, l) = rd.operator();
    match residuals_case2(&k, &l, &rd.f, &spec) {
        Ok(res) => checks(&mut report, res.check(&spec)),
        Err(e) => report.error(e),
    }
    Ok(report)
}

pub struct VerifyArgs {
    pub t: String,
    pub phi: String,
    pub omega0: f64,
    pub phi0: f64,
    pub dphi0: f64,
    pub step: f64,
    pub grid: GridArgs,
    pub export: Option<PathBuf>,
}

pub fn verify(common: &Common, a: &VerifyArgs) -> Result<Report, Usage> {
    let (t, phi) = (expr("T", &a.t)?, expr("Phi", &a.phi)?);
    let grid = grid(&a.grid)?;
    let spec = sampling(common);
    let mut report = Report::new("verify");
    report.input("T", t.canonical());
    report.input("Phi", phi.canonical());
    report.input("omega0", a.omega0);
    report.input("phi0", a.phi0);
    report.input("dphi0", a.dphi0);
    report.input("step", a.step);
    record_grid(&mut report, &a.grid);
    record_sampling(&mut report, common);
    let rd = match Reduction::new(&t, &spec).and_then(|r| r.synthesize(&phi)) {
        Ok(rd) => rd,
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    for (name, e) in [("k", &rd.k), ("s", &rd.s), ("omega", &rd.omega), ("sigma", &rd.sigma), ("f", &rd.f)] {
        report.expr_artifact(name, e);
    }
    let settings = VerifySettings {
        step: a.step,
        residual: residual_settings(&a.grid),
        ..VerifySettings::new(grid, a.omega0, a.phi0, a.dphi0)
    };
    let v = match verify_reduction(&rd, &settings) {
        Ok(v) => v,
        Err(e) => {
            report.error(e);
            return Ok(report);
        }
    };
    report.artifact("solution", v.field.provenance.to_string());
    report.artifact("nodes", v.report.nodes);
    checks(&mut report, v.report.checks());
    if let Some(path) = &a.export {
        let written = File::create(path).and_then(|f| write_matrix(&v.field, BufWriter::new(f)));
        if let Err(e) = written {
            report.error(format!("export to {}: {e}", path.display()));
        }
    }
    Ok(report)
}

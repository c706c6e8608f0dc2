//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{derivative_error, draw, p, sample_points, smooth_expr, YZU};
use condsym_core::detsys::{case1_pair, case22_check, residuals_case1, residuals_case2};
use condsym_core::numerics::{
    mixed_residual, verify_reduction, ClosedForm, Grid, ResidualSettings, SideCondition, VerifySettings,
};
use condsym_core::reduction::{families, lookup, Reduction};
use condsym_core::report::Check;
use condsym_core::{is_zero, Expr, SamplingSpec};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec() -> SamplingSpec {
    SamplingSpec::default()
        .with_samples(100)
        .with_epsilon(1e-8)
        .with_seed(42)
}

fn same(a: &Expr, b: &str) -> bool {
    is_zero(&(a - p(b)), &spec()).verdict.is_zero()
}

fn all_pass(checks: &[Check]) -> bool {
    !checks.is_empty() && checks.iter().all(Check::passed)
}

fn summary(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| format!("{}={}", c.name, c.verdict.label()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Full pipeline for one family, compared with an exact solution.
fn end_to_end(
    t: &str,
    phi: &str,
    expected: [&str; 3],
    range: (f64, f64),
    start: (f64, f64, f64),
    exact: &str,
    budget: Option<Duration>,
) -> Outcome {
    let clock = Instant::now();
    let rd = match Reduction::new(&p(t), &spec()).and_then(|r| r.synthesize(&p(phi))) {
        Ok(rd) => rd,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let forms = same(&rd.f, expected[0]) && same(&rd.sigma, expected[1]) && same(&rd.omega, expected[2]);
    let grid = Grid::square(range.0, range.1, 50).expect("grid");
    let settings = VerifySettings::new(grid, start.0, start.1, start.2);
    let v = match verify_reduction(&rd, &settings) {
        Ok(v) => v,
        Err(e) => return Outcome { pass: false, detail: e.to_string() },
    };
    let elapsed = clock.elapsed();
    let side = v.report.side.as_ref().expect("side condition").max_abs;
    let oracle = v.field.max_deviation(&ClosedForm::new(&p(exact)).expect("oracle")).expect("oracle");
    let in_time = budget.is_none_or(|b| elapsed < b);
    Outcome {
        pass: forms && v.report.passed() && oracle < 1e-6 && in_time,
        detail: format!(
            "f={} sigma={} omega={} forms_ok={forms} pde={:.3e} side={:.3e} |u-{exact}|={oracle:.3e} time={:.3}s",
            rd.f, rd.sigma, rd.omega, v.report.pde.max_abs, side, elapsed.as_secs_f64()
        ),
    }
}

fn criterion_1() -> Outcome {
    end_to_end(
        "y+z",
        "phi",
        ["u", "1", "z-y"],
        (0.0, 1.0),
        (0.0, 1.0, 0.0),
        "cos(z-y)",
        Some(Duration::from_secs(5)),
    )
}

fn criterion_2() -> Outcome {
    let mut o = end_to_end(
        "y*z",
        "-2*phi^3",
        ["-2*z*u^3/y^5", "y", "z/y"],
        (1.0, 2.0),
        (1.0, 1.0, -1.0),
        "y^2/z",
        None,
    );
    // the oracle itself: u = y^2/z has u_yz = -2y/z^2 = f(y, z, y^2/z)
    let grid = Grid::square(1.0, 2.0, 50).expect("grid");
    let f = p("-2*z*u^3/y^5");
    let exact = mixed_residual(
        &ClosedForm::new(&p("y^2/z")).expect("oracle"),
        &f,
        &grid,
        &ResidualSettings::default(),
        None,
    );
    match exact {
        Ok(r) => {
            o.pass &= r.passed();
            o.detail.push_str(&format!(" oracle_pde={:.3e}", r.pde.max_abs));
        }
        Err(e) => {
            o.pass = false;
            o.detail.push_str(&format!(" oracle error: {e}"));
        }
    }
    o
}

fn criterion_3() -> Outcome {
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for t in ["y+z", "y*z", "y+z^2"] {
        for phi in ["phi", "sin(phi)", "-2*phi^3"] {
            let checks = Reduction::new(&p(t), &spec())
                .and_then(|r| r.synthesize(&p(phi)))
                .map_err(|e| e.to_string())
                .and_then(|rd| {
                    let (k, l) = rd.operator();
                    residuals_case2(&k, &l, &rd.f, &spec()).map_err(|e| e.to_string())
                })
                .map(|r| r.check(&spec()));
            match checks {
                Ok(c) if c.len() == 4 && all_pass(&c) => count += 4,
                Ok(c) => failures.push(format!("T={t} Phi={phi}: {}", summary(&c))),
                Err(e) => failures.push(format!("T={t} Phi={phi}: {e}")),
            }
        }
    }
    let elapsed = clock.elapsed();
    Outcome {
        pass: failures.is_empty() && elapsed < Duration::from_secs(10),
        detail: format!(
            "{count}/36 residual checks pass, time={:.3}s {}",
            elapsed.as_secs_f64(),
            failures.join("; ")
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for fam in families() {
        let spec = fam.sampling(&spec());
        match Reduction::new(&fam.t, &spec) {
            Ok(r) => {
                let checks = r.identities(&spec);
                pass &= all_pass(&checks);
                let phi_only = r.phi_only(&spec).verdict.is_zero();
                parts.push(format!("{}: {} phi_only={}", fam.name, summary(&checks), phi_only));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", fam.name));
            }
        }
    }
    let phi_only = |t: &str| Reduction::new(&p(t), &spec()).map(|r| r.phi_only(&spec()).verdict.is_zero());
    let criterion = phi_only("y+z") == Ok(true) && phi_only("y*z") == Ok(false);
    Outcome {
        pass: pass && criterion,
        detail: format!("{} | phi-only pass(y+z) fail(y*z): {criterion}", parts.join("; ")),
    }
}

fn criterion_5() -> Outcome {
    let (l, f) = (p("u"), p("u"));
    let residuals = residuals_case1(&l, &f).check(&spec());
    let compat = case1_pair(&l, &f, &spec())
        .map(|pair| Check::vanishing("compatibility", &is_zero(&pair.compatibility, &spec())));
    let symbolic = all_pass(&residuals) && compat.as_ref().is_ok_and(Check::passed);

    let grid = Grid::square(0.0, 1.0, 50).expect("grid");
    let numeric = SideCondition::new(&Expr::zero(), &l).and_then(|side| {
        mixed_residual(
            &ClosedForm::new(&p("exp(y+z)")).expect("closed form"),
            &f,
            &grid,
            &ResidualSettings::default(),
            Some(&side),
        )
    });
    let (numeric_ok, numeric_detail) = match numeric {
        Ok(r) => (
            r.passed(),
            format!("pde={:.3e} side={:.3e}", r.pde.max_abs, r.side.as_ref().map_or(f64::NAN, |s| s.max_abs)),
        ),
        Err(e) => (false, e.to_string()),
    };

    let bad = residuals_case1(&p("u"), &p("y*u")).check(&spec());
    let r2 = bad.iter().find(|c| c.name == "R2");
    let fails_with_witness = r2.is_some_and(|c| !c.passed() && c.witness.is_some());
    Outcome {
        pass: symbolic && numeric_ok && fails_with_witness,
        detail: format!(
            "(u,u): {} compatibility={} | exp(y+z): {numeric_detail} | (u,y*u): R2 witness={:?}",
            summary(&residuals),
            compat.map_or_else(|e| e.to_string(), |c| c.verdict.label().to_string()),
            r2.and_then(|c| c.witness.clone())
        ),
    }
}

fn criterion_6() -> Outcome {
    let good = case22_check(&p("1"), &p("1"));
    let (constraints, residuals, f) = match &good {
        Ok(c) => {
            let (k, l) = c.operator();
            let r = residuals_case2(&k, &l, &c.f, &spec()).map(|r| r.check(&spec()));
            (c.constraints().check(&spec()), r.unwrap_or_default(), c.f.to_string())
        }
        Err(e) => (Vec::new(), Vec::new(), e.to_string()),
    };
    let triple = good.as_ref().map(|c| c.operator());
    let triple_ok = triple.as_ref().is_ok_and(|(k, l)| same(k, "exp(u)") && same(l, "exp(u) + 1"))
        && good.as_ref().is_ok_and(|c| same(&c.f, "0"));
    let bad = case22_check(&p("y"), &p("0")).map(|c| c.constraints().check(&spec()));
    let c1 = bad.as_ref().ok().and_then(|c| c.iter().find(|c| c.name == "C1").cloned());
    let c1_fails = c1.as_ref().is_some_and(|c| !c.passed() && c.witness.is_some());
    Outcome {
        pass: all_pass(&constraints) && residuals.len() == 4 && all_pass(&residuals) && triple_ok && c1_fails,
        detail: format!(
            "(1,1): {} f={f} {} | (y,0): C1 witness={:?}",
            summary(&constraints),
            summary(&residuals),
            c1.and_then(|c| c.witness)
        ),
    }
}

fn criterion_7() -> Outcome {
    let exprs = draw(&smooth_expr(YZU), 1000, 7);
    let points = sample_points(5);
    let mut worst = (0.0f64, String::new());
    let mut evaluated = 0;
    for e in &exprs {
        for v in YZU {
            let (err, used) = derivative_error(e, v, &points, 1e-4);
            evaluated += used;
            if err > worst.0 {
                worst = (err, format!("d/d{v} {e}"));
            }
        }
    }
    let commuting = draw(&smooth_expr(YZU), 100, 8)
        .iter()
        .filter(|e| is_zero(&(e.d(&["y", "z"]) - e.d(&["z", "y"])), &spec()).verdict.is_zero())
        .count();
    Outcome {
        pass: worst.0 < 1e-5 && commuting == 100 && evaluated > 0,
        detail: format!(
            "1000 expressions, {evaluated} derivative evaluations, worst relative error {:.3e} ({}); mixed partials commute {commuting}/100",
            worst.0, worst.1
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["y+z", "y*z", "y+z^2", "y^2+z"] {
        let Some(fam) = lookup(&p(name), &spec()) else {
            pass = false;
            parts.push(format!("{name}: not in catalog"));
            continue;
        };
        match fam.numeric_agreement(1e-3, 50) {
            Ok((err, at)) => {
                pass &= err <= 1e-6;
                parts.push(format!("{}: {err:.3e} at ({:.3}, {:.3})", fam.name, at.0, at.1));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", fam.name));
            }
        }
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("translation family end-to-end", criterion_1),
        ("scaling family end-to-end", criterion_2),
        ("determining-equation suite", criterion_3),
        ("structural identities", criterion_4),
        ("case 1", criterion_5),
        ("case 2.2", criterion_6),
        ("CAS soundness", criterion_7),
        ("numeric omega agreement", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let label = if o.pass { "PASS" } else { "FAIL" };
        println!("{label} [{}] {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

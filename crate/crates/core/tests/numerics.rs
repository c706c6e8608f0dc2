mod common;

use common::{draw, p, smooth_expr, YZ};
use condsym_core::numerics::{
    lift_solution, mixed_residual, omega_span, solve_reduced_ode, to_conic, to_physical, transform_rhs, wave_residual,
    ClosedForm, Direction, Grid, OdeSettings, ResidualSettings, ScalarField, SideCondition, Transported,
};
use condsym_core::reduction::{Reduction, ReductionData};
use condsym_core::{Rational, SamplingSpec};
use proptest::prelude::*;

fn data(t: &str, phi: &str) -> ReductionData {
    Reduction::new(&p(t), &SamplingSpec::default())
        .unwrap()
        .synthesize(&p(phi))
        .unwrap()
}

/// Worst `|stencil − u_yz|` over a 5×5 grid of `[0.6, 1.9]²`.
fn stencil_error(u: &ClosedForm, uyz: &ClosedForm, h: f64) -> f64 {
    let g = Grid::square(0.6, 1.9, 5).unwrap();
    let mut worst: f64 = 0.0;
    for (i, j) in g.indices() {
        let (y, z) = (g.y_at(i), g.z_at(j));
        let v = |a: f64, b: f64| -> f64 { u.value(a, b).unwrap() };
        let fd = (v(y + h, z + h) - v(y + h, z - h) - v(y - h, z + h) + v(y - h, z - h)) / (4.0 * h * h);
        let exact: f64 = uyz.value(y, z).unwrap();
        worst = worst.max((fd - exact).abs());
    }
    worst
}

#[test]
fn cross_stencil_is_second_order() {
    let a = draw(&smooth_expr(YZ), 20, 11);
    let b = draw(&smooth_expr(YZ), 20, 12);
    let h = 0.02;
    let mut checked = 0;
    // the cos(y*z) factor guarantees genuine mixed dependence
    for (a, b) in a.into_iter().zip(b) {
        let u = a + p("cos(y*z)") * b;
        let uyz = u.d(&["y", "z"]);
        let (uc, dc) = (ClosedForm::new(&u).unwrap(), ClosedForm::new(&uyz).unwrap());
        let (e1, e2) = (stencil_error(&uc, &dc, h), stencil_error(&uc, &dc, h / 2.0));
        // the stencil is exact on fields with vanishing fourth derivatives;
        // nothing to measure there
        if e1 < 1e-9 {
            continue;
        }
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "u = {u}: errors {e1:e}, {e2:e}, order {order}");
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} fields had measurable error");
}

#[test]
fn lift_matches_closed_forms() {
    // (T, Φ, φ(ω), grid, u)
    let cases = [
        ("y+z", "phi", "cos(omega)", (0.0, 1.0), "cos(z-y)"),
        ("y*z", "-2*phi^3", "1/omega", (1.0, 2.0), "y^2/z"),
        ("y+z^2", "phi", "sin(omega)", (0.5, 2.0), "sin(z^2-y)"),
        ("y^2+z", "0", "1 + 2*omega", (0.5, 2.0), "1 + 2*(z-y^2)"),
    ];
    for (t, phi, exact_phi, range, exact_u) in cases {
        let rd = data(t, phi);
        let grid = Grid::square(range.0, range.1, 21).unwrap();
        let exact = ClosedForm::new(&p(exact_u)).unwrap();
        // analytic φ substituted directly
        let direct = p(exact_phi).substitute("omega", &rd.omega);
        let direct = ClosedForm::new(&(&rd.sigma * &direct)).unwrap();
        let field = condsym_core::numerics::SolutionField::sample(
            &direct,
            grid,
            condsym_core::numerics::Provenance::ClosedForm(exact_u.into()),
        )
        .unwrap();
        assert!(field.max_deviation(&exact).unwrap() < 1e-9, "{t}");

        // φ from the ODE, started from the analytic values at ω0
        let phi_c = ClosedForm::in_vars(&p(exact_phi), ["omega", "y"]).unwrap();
        let dphi_c = ClosedForm::in_vars(&p(exact_phi).d(&["omega"]), ["omega", "y"]).unwrap();
        let w0 = 1.0;
        let settings = OdeSettings {
            omega0: w0,
            phi0: phi_c.value(w0, 0.0).unwrap(),
            dphi0: dphi_c.value(w0, 0.0).unwrap(),
            step: 1e-3,
            span: omega_span(&rd.omega, &grid, 0.0, w0).unwrap(),
        };
        let sol = solve_reduced_ode(&rd.reduced_ode().unwrap(), &settings).unwrap();
        let lifted = lift_solution(&rd, &sol, grid).unwrap();
        assert!(lifted.max_deviation(&exact).unwrap() < 1e-6, "{t}");
    }
}

#[test]
fn lifted_solutions_satisfy_the_side_condition() {
    // y*z uses [1, 2]^2: on [0.5, 2]^2 the central difference of u = y^2/z
    // alone is off by h^2/6 * |k u_zzz| ~ 1.6e-5 near z = 0.5
    for (t, phi, w0, phi0, dphi0, lo) in [
        ("y+z", "phi", 0.0, 1.0, 0.0, 0.5),
        ("y*z", "-2*phi^3", 1.0, 1.0, -1.0, 1.0),
        ("y+z^2", "sin(phi)", 0.0, 0.5, 0.1, 0.5),
        ("y^2+z", "phi", 0.0, 1.0, 0.0, 0.5),
    ] {
        let rd = data(t, phi);
        let grid = Grid::square(lo, 2.0, 15).unwrap();
        let mut settings = condsym_core::numerics::VerifySettings::new(grid, w0, phi0, dphi0);
        let coarse = condsym_core::numerics::verify_reduction(&rd, &settings).unwrap().report;
        settings.residual.h = 5e-4;
        let v = condsym_core::numerics::verify_reduction(&rd, &settings).unwrap();
        let side = v.report.side.as_ref().unwrap();
        assert!(side.max_abs < 1e-5, "{t}: {:e}", side.max_abs);
        assert!(v.report.pde.max_abs < 1e-5, "{t}: {:e}", v.report.pde.max_abs);
        // what remains at h = 1e-3 is stencil truncation: it shrinks fourfold
        let ratio = coarse.side.as_ref().unwrap().max_abs / side.max_abs;
        assert!(ratio > 3.5 || coarse.passed(), "{t}: ratio {ratio}");
    }
}

#[test]
fn dalembert_consistency() {
    // u = cos(z − y) solves u_yz = u; in (t, x) it is cos(x), solving u_tt − u_xx = u
    let rd = data("y+z", "phi");
    let sol = solve_reduced_ode(
        &rd.reduced_ode().unwrap(),
        &OdeSettings { omega0: 0.0, phi0: 1.0, dphi0: 0.0, step: 1e-3, span: (-3.0, 3.0) },
    )
    .unwrap();
    let lifted = condsym_core::numerics::LiftedSolution::new(&rd, sol).unwrap();
    let big_f = transform_rhs(Direction::ToPhysical, &rd.f);
    let physical = Grid::square(0.0, 1.0, 50).unwrap();
    let settings = ResidualSettings { h: 1e-3, pde_tolerance: 1e-4, side_tolerance: 1e-4 };
    let r = wave_residual(&Transported(&lifted), &big_f, &physical, &settings).unwrap();
    assert!(r.passed(), "{:e}", r.pde.max_abs);

    // and a closed form with explicit (t, x) dependence
    let u = ClosedForm::new(&p("exp(y)*z^2")).unwrap();
    let f = p("2*exp(y)*z");
    assert!(mixed_residual(&u, &f, &Grid::square(0.0, 1.0, 20).unwrap(), &settings, None).unwrap().passed());
    let big_f = transform_rhs(Direction::ToPhysical, &f);
    let r = wave_residual(&Transported(&u), &big_f, &physical, &settings).unwrap();
    assert!(r.passed(), "{:e}", r.pde.max_abs);
}

#[test]
fn physical_cosine_matches_conic_solution() {
    let conic = ClosedForm::new(&p("cos(z-y)")).unwrap();
    let physical = ClosedForm::in_vars(&p("cos(x)"), ["t", "x"]).unwrap();
    for (t, x) in [(0.0, 0.0), (0.3, -1.2), (2.0, 0.7)] {
        let a: f64 = Transported(&conic).value(t, x).unwrap();
        let b: f64 = physical.value(t, x).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(transform_rhs(Direction::ToConic, &p("u")), p("u"));
}

#[test]
fn side_condition_check_detects_wrong_operators() {
    let u = ClosedForm::new(&p("cos(z-y)")).unwrap();
    let grid = Grid::square(0.5, 1.5, 10).unwrap();
    let right = SideCondition::new(&p("1"), &p("0")).unwrap();
    let wrong = SideCondition::new(&p("z/y"), &p("u/y")).unwrap();
    let s = ResidualSettings::default();
    assert!(mixed_residual(&u, &p("u"), &grid, &s, Some(&right)).unwrap().passed());
    assert!(!mixed_residual(&u, &p("u"), &grid, &s, Some(&wrong)).unwrap().passed());
}

#[test]
fn rk4_is_fourth_order() {
    let ode = condsym_core::reduction::reduced_ode(&p("phi")).unwrap();
    let err = |step: f64| {
        let s = OdeSettings { omega0: 0.0, phi0: 1.0, dphi0: 0.0, step, span: (0.0, 3.0) };
        (solve_reduced_ode(&ode, &s).unwrap().eval(3.0).unwrap() - 3f64.cos()).abs()
    };
    let order = (err(0.1) / err(0.05)).log2();
    assert!((3.8..4.3).contains(&order), "{order}");
}

proptest! {
    #[test]
    fn conic_round_trip_is_exact(t in -10_000i64..10_000, x in -10_000i64..10_000, dt in 1i64..97, dx in 1i64..97) {
        let (t, x) = (Rational::new(t, dt), Rational::new(x, dx));
        let (y, z) = to_conic(t, x);
        prop_assert_eq!(to_physical(y, z), (t, x));
    }

    #[test]
    fn conic_round_trip_in_floating_point(t in -100.0f64..100.0, x in -100.0f64..100.0) {
        let (y, z) = to_conic(t, x);
        let (t2, x2) = to_physical(y, z);
        prop_assert!((t2 - t).abs() <= 1e-13 && (x2 - x).abs() <= 1e-13);
    }
}

use std::process::ExitCode;
use std::time::{Duration, Instant};

use eulerfan::convexint::{localized_wave, run_steps, wave_n_min, PlaneWave, StateSegment, StepOptions};
use eulerfan::fanalgebra::{admissible_c1_interval, evaluate_constraints, find_exact_solution, search_feasible, SearchOptions, SearchOutcome, Verdict};
use eulerfan::number::rat;
use eulerfan::pressuredesign::{assemble_s6_candidate, construct_pressure, find_parameters, DesignOptions, ParameterOptions};
use eulerfan::riemann1d::{riemann_invariants, solve_riemann, ReducedState};
use eulerfan::weakform::{oracle_equivalence, random_fans, QuadOptions};
use eulerfan::{PressureLaw, QuadraticNumber, StatePoint};

type Outcome = Result<String, String>;
type Entry = (&'static str, u64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn q(n: i64, d: i64) -> QuadraticNumber {
    QuadraticNumber::from_ratio(n, d)
}

fn exact_solution() -> Outcome {
    let c = find_exact_solution();
    let law = PressureLaw::quadratic();
    let rep = evaluate_constraints(&c, &law).map_err(|e| e.to_string())?;
    let nu_minus = QuadraticNumber::new(rat(0, 1), rat(-7, 4));
    let c1 = q(10273, 1680);
    let fields = c.rho_minus == q(1, 1)
        && c.rho_plus == q(4, 1)
        && c.rho_1 == q(15, 7)
        && c.alpha == q(-1, 4)
        && c.nu_minus == nu_minus
        && c.beta.is_zero()
        && c.delta.is_zero()
        && c.nu_plus.is_zero()
        && c.c_1 == c1
        && c.gamma == &(&c1 * &q(1, 2)) - &q(559, 105);
    let equalities = rep.equality_residuals.len() == 6 && rep.equality_residuals.iter().all(|r| r.value.is_zero());
    let e_right = rep.slack("E_right").is_some_and(|s| s.is_zero());
    let others = rep.inequality_slacks.iter().filter(|s| s.name != "E_right").all(|s| s.value.is_positive());
    let verdict = matches!(rep.verdict, Verdict::ExactAdmissible);
    check(
        fields && equalities && e_right && others && verdict,
        format!("fields {fields}, six zero identities {equalities}, E_right slack zero {e_right}, other slacks positive {others}"),
    )
}

fn c1_interval() -> Outcome {
    let i = admissible_c1_interval();
    let ok = i.lower_exclusive == q(9049, 1680) && i.upper_inclusive == q(11497, 1680);
    check(ok, format!("({}, {}]", i.lower_exclusive, i.upper_inclusive))
}

fn compression_identity() -> Outcome {
    let law = PressureLaw::quadratic();
    let l = ReducedState::new(4.0, -1.0, 0.0).map_err(|e| e.to_string())?;
    let r = ReducedState::new(1.0, -0.25, 2.0 * 2f64.sqrt()).map_err(|e| e.to_string())?;
    let sol = solve_riemann(&l, &r, &law, 1e-13).map_err(|e| e.to_string())?;
    let single = sol.waves.len() == 1 && sol.waves[0].kind() == "rarefaction" && sol.waves[0].family() == 1;
    let rho0 = sol.eval(0.0).map_err(|e| e.to_string())?.rho;
    let rho_err = (rho0 - 16.0 / 9.0).abs();
    let bp = sol.breakpoints();
    let (lo, hi) = (bp[0], bp[bp.len() - 1]);
    let (_, w2l, w3l) = riemann_invariants(&l, &law).map_err(|e| e.to_string())?;
    let mut drift: f64 = 0.0;
    for i in 0..=400 {
        let xi = lo - 0.5 + (hi - lo + 1.0) * i as f64 / 400.0;
        let (_, w2, w3) = riemann_invariants(&sol.eval(xi).map_err(|e| e.to_string())?, &law).map_err(|e| e.to_string())?;
        drift = drift.max((w2 - w2l).abs()).max((w3 - w3l).abs());
    }
    check(
        single && rho_err <= 1e-10 && drift <= 1e-10,
        format!("single 1-rarefaction {single}, |rho(0) - 16/9| = {rho_err:.2e}, invariant drift {drift:.2e}"),
    )
}

fn oracle() -> Outcome {
    let law = PressureLaw::quadratic();
    let fans = random_fans(200, 2024, &law).map_err(|e| e.to_string())?;
    let rep = oracle_equivalence(&fans, &law, 8, 99, &QuadOptions::default()).map_err(|e| e.to_string())?;
    let zeros = rep.rows.iter().filter(|r| r.algebraic_zero).count();
    check(
        rep.rows.len() >= 200 && rep.disagreements == 0 && zeros > 0 && zeros < rep.rows.len(),
        format!("{} fans ({zeros} exact), {} disagreements", rep.rows.len(), rep.disagreements),
    )
}

fn second_method() -> Outcome {
    let params = find_parameters(&ParameterOptions { beta_bar: Some(10.0), ..ParameterOptions::default() }).map_err(|e| e.to_string())?;
    let dp = construct_pressure(&params, &DesignOptions::default()).map_err(|e| e.to_string())?;
    let cand = assemble_s6_candidate(&params, &dp).map_err(|e| e.to_string())?;
    let rep = evaluate_constraints(&cand, &dp.law).map_err(|e| e.to_string())?;
    let eq = rep.max_abs_residual();
    let min_slack = rep.inequality_slacks.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let rel = (dp.margin_minus / dp.threshold_minus.abs()).min(dp.margin_plus / dp.threshold_plus.abs());
    check(
        eq <= 1e-9 && min_slack > 0.0 && rel >= 0.01,
        format!("max identity residual {eq:.2e}, min slack {min_slack:.3e}, integral margin {:.1}% of threshold", 100.0 * rel),
    )
}

fn localized() -> Outcome {
    let seg = StateSegment::new([1.0, 0.0], [0.0, 1.0], 0.1, 1.0).map_err(|e| e.to_string())?;
    let pw = PlaneWave::new(&seg, 32.0).map_err(|e| e.to_string())?;
    let ratio = pw.sample(64).fd_residual() / pw.sample(128).fd_residual();
    let eps = 0.02;
    let n_min = wave_n_min(&seg, eps).map_err(|e| e.to_string())?;
    let mut dist: f64 = 0.0;
    for (n, grid) in [(n_min * 2.0, 64), (n_min, 128)] {
        dist = dist.max(localized_wave(&seg, eps, n, grid).map_err(|e| e.to_string())?.max_segment_distance(&seg));
    }
    let field = localized_wave(&seg, eps, n_min, 128).map_err(|e| e.to_string())?;
    let m = field.component_means();
    let means_ok = (0..4).all(|c| m.means[c].abs() <= m.error_estimate[c]);
    let alpha = field.l1_velocity() / (seg.lambda * seg.length());
    check(
        ratio >= 3.5 && dist <= eps && means_ok && alpha >= 0.1,
        format!("fd ratio {ratio:.2}, N_min {n_min:.1}, max distance {dist:.2e}, means within estimate {means_ok}, alpha_emp {alpha:.3}"),
    )
}

fn perturbation_steps() -> Outcome {
    let (_, run) = run_steps(&StatePoint::default(), 1.0, 48, 10, &StepOptions::default()).map_err(|e| e.to_string())?;
    let positive = run.steps.len() == 10 && run.steps.iter().all(|s| s.increase > 0.0);
    let decreasing = run.deficits.windows(2).all(|w| w[1] < w[0]);
    let inside = run.steps.iter().all(|s| s.all_inside);
    check(
        positive && run.beta_emp > 0.0 && decreasing && inside,
        format!(
            "increases positive {positive}, beta_emp {:.3e}, deficit {:.4} -> {:.4}, strictly decreasing {decreasing}, inside {inside}",
            run.beta_emp,
            run.deficits[0],
            run.deficits[run.deficits.len() - 1]
        ),
    )
}

fn gamma_neighbourhood() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for gamma in [1.95, 2.05] {
        let law = PressureLaw::polytropic(1.0, gamma).map_err(|e| e.to_string())?;
        let opts = SearchOptions { min_slack: 1e-6, ..SearchOptions::default() };
        match search_feasible(&law, None, 0, &opts).map_err(|e| e.to_string())? {
            SearchOutcome::Feasible { candidate, .. } => {
                let rep = evaluate_constraints(&candidate, &law).map_err(|e| e.to_string())?;
                let slack = rep.inequality_slacks.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
                let eq = rep.max_abs_residual();
                ok &= slack >= 1e-6 && eq <= opts.tol;
                parts.push(format!("gamma {gamma}: min slack {slack:.3e}, max identity residual {eq:.1e}"));
            }
            SearchOutcome::Infeasible { best_penalty, .. } => {
                ok = false;
                parts.push(format!("gamma {gamma}: infeasible, penalty {best_penalty:.2e}"));
            }
        }
    }
    check(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Entry; 8] = [
        ("1 exact explicit solution", 1, exact_solution),
        ("2 C1 interval", 1, c1_interval),
        ("3 compression-wave identity", 1, compression_identity),
        ("4 weak-form oracle equivalence", 120, oracle),
        ("5 designed pressure end to end", 30, second_method),
        ("6 localized wave", 120, localized),
        ("7 perturbation steps", 600, perturbation_steps),
        ("8 gamma neighbourhood search", 300, gamma_neighbourhood),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match out {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2}s of {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

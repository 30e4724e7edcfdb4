use std::path::PathBuf;

use eulerfan::convexint::{
    find_segment, in_u, localized_wave, run_steps, wave_n_min, Membership, SegmentOptions, StateSegment, StepOptions,
};
use eulerfan::fanalgebra::{
    evaluate_constraints, evaluate_constraints_with_tol, explicit_family, search_feasible, FixedData, SearchOptions,
    SearchOutcome, Verdict,
};
use eulerfan::number::{parse_rational, rat};
use eulerfan::pressuredesign::{
    assemble_s6_candidate, check_inequality_chain, construct_pressure, find_parameters, DesignOptions, ParameterOptions,
};
use eulerfan::riemann1d::{compression_wave, riemann_invariants, solve_riemann, ReducedState};
use eulerfan::weakform::{subsolution_residual, weak_residual, FieldHandle, PiecewiseFan, QuadOptions, ResidualRow, TestFunction};
use eulerfan::{FanSubsolutionCandidate, PressureLaw, QuadraticNumber, StatePoint, TabulatedPressure};
use serde_json::{json, Value};

use crate::output::{csv_line, parse_floats, read_text, CmdResult, Done, Failure, RunConfig};
use crate::{
    CiStepArgs, CompressionArgs, DesignArgs, RiemannArgs, SearchArgs, SegmentArgs, VerifyExactArgs, WaveArgs, WeakcheckArgs,
};

fn parse_pressure(spec: &str) -> Result<PressureLaw, Failure> {
    let bad = || Failure::BadInput(format!("unknown pressure {spec:?}; use quadratic, polytropic:K:G or table:PATH.csv"));
    let mut parts = spec.splitn(2, ':');
    match (parts.next(), parts.next()) {
        (Some("quadratic"), None) => Ok(PressureLaw::quadratic()),
        (Some("polytropic"), Some(rest)) => {
            let [k, g] = parse_floats::<2>(&rest.replace(':', ","))?;
            Ok(PressureLaw::polytropic(k, g)?)
        }
        (Some("table"), Some(path)) => {
            let csv = PathBuf::from(path);
            let sidecar = csv.with_extension("json");
            Ok(PressureLaw::Tabulated(TabulatedPressure::read_files(&csv, &sidecar)?))
        }
        _ => Err(bad()),
    }
}

fn verdict_name(v: &Verdict) -> String {
    match v {
        Verdict::ExactAdmissible => "exact_admissible".into(),
        Verdict::AdmissibleWithin { tol } => format!("admissible_within({tol:e})"),
        Verdict::Violated { worst, value } => format!("violated({worst} = {value:e})"),
    }
}

fn oracle_summary(rows: &[ResidualRow]) -> Value {
    let max = |f: &dyn Fn(&ResidualRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    json!({
        "tests": rows.len(),
        "balanced": rows.iter().all(|r| r.balanced(10.0)),
        "admissible": rows.iter().all(|r| r.admissible(10.0)),
        "max_abs_mass": max(&|r| r.mass.abs()),
        "max_abs_momentum": max(&|r| r.momentum[0].abs().max(r.momentum[1].abs())),
        "min_energy_slack": rows.iter().map(|r| r.energy_slack).fold(f64::INFINITY, f64::min),
        "max_quad_error_estimate": max(&|r| r.quad_error_estimate.iter().copied().fold(0.0, f64::max)),
    })
}

pub fn verify_exact(cfg: &RunConfig, a: &VerifyExactArgs) -> CmdResult {
    let fam = explicit_family(&rat(1, 1), &rat(4, 1))?;
    let c1 = match &a.c1 {
        Some(s) => QuadraticNumber::from_rational(parse_rational(s)?),
        None => fam.interval.midpoint(),
    };
    let law = PressureLaw::quadratic();
    let cand = fam.candidate(c1.clone());
    let exact = evaluate_constraints(&cand, &law)?;
    let bound = fam.interval.violated_bound(&c1);
    let float = cand.to_f64();
    let float_report = evaluate_constraints_with_tol(&float, &law, cfg.tol.unwrap_or(1e-10))?;

    let fan = PiecewiseFan::from_candidate(float.clone())?;
    let tests = TestFunction::straddling(fan.partition.speeds(), a.tests, cfg.seed, true);
    let rows = subsolution_residual(&fan, &law, &tests, &QuadOptions::default())?;
    let balanced = rows.iter().all(|r| r.balanced(10.0));
    let admissible = rows.iter().all(|r| r.admissible(10.0));
    let equalities_zero = exact.equality_residuals.iter().all(|r| r.value.is_zero());
    let energy_ok = ["E_left", "E_right"].iter().all(|n| exact.slack(n).is_some_and(|s| !s.is_negative()));
    let agreement = equalities_zero == balanced && energy_ok == admissible;

    println!("{:<16} {:>24}", "constraint", "exact value");
    for r in exact.equality_residuals.iter().chain(&exact.inequality_slacks) {
        println!("{:<16} {:>24}", r.name, r.value.to_string());
    }
    println!("verdict: {}", verdict_name(&exact.verdict));
    println!(
        "oracle: {} tests, balanced {balanced}, admissible {admissible}, agreement {agreement}",
        rows.len()
    );

    let failure = if let Some(name) = bound {
        Some(format!("C1 = {} violates {name}", c1.to_f64()))
    } else if let Verdict::Violated { worst, .. } = &exact.verdict {
        Some(format!("{worst} is violated"))
    } else if !agreement {
        Some("quadrature oracle disagrees with the exact constraints".to_string())
    } else {
        None
    };
    let result = json!({
        "candidate": cand,
        "candidate_f64": float,
        "c1_interval": fam.interval,
        "c1_interval_f64": [fam.interval.lower_exclusive.to_f64(), fam.interval.upper_inclusive.to_f64()],
        "violated_bound": bound,
        "exact_report": exact,
        "verdict": verdict_name(&exact.verdict),
        "e_right_slack_is_zero": exact.slack("E_right").is_some_and(|s| s.is_zero()),
        "float_report": float_report,
        "oracle": oracle_summary(&rows),
        "oracle_rows": rows,
        "oracle_agreement": agreement,
    });
    let mut done = Done::new(result).fail_if(failure.is_some(), || failure.clone().unwrap_or_default());
    done.copies.extend(a.json.clone());
    Ok(done)
}

pub fn riemann(cfg: &RunConfig, a: &RiemannArgs) -> CmdResult {
    let law = parse_pressure(&a.pressure)?;
    let [rl, l1, l2] = parse_floats::<3>(&a.left)?;
    let [rr, r1, r2] = parse_floats::<3>(&a.right)?;
    if a.samples < 2 || !(a.time > 0.0) {
        return Err(Failure::BadInput("need at least 2 samples and a positive time".into()));
    }
    let left = ReducedState::new(rl, l1, l2)?;
    let right = ReducedState::new(rr, r1, r2)?;
    let sol = solve_riemann(&left, &right, &law, cfg.tol.unwrap_or(1e-12))?;
    let bp = sol.breakpoints();
    let (lo, hi) = match (bp.first(), bp.last()) {
        (Some(l), Some(h)) => (l - 1.0, h + 1.0),
        _ => (-1.0, 1.0),
    };
    let x2s: Vec<f64> = (0..a.samples).map(|i| a.time * (lo + (hi - lo) * i as f64 / (a.samples - 1) as f64)).collect();
    let csv = sol.sample_csv(&[a.time], &x2s)?;
    let kinds: Vec<&str> = sol.waves.iter().map(|w| w.kind()).collect();
    let result = json!({
        "left": left,
        "right": right,
        "pressure": law,
        "wave_kinds": kinds,
        "summary": sol.summary(),
        "breakpoints": bp,
    });
    Ok(Done::new(result).file("field.csv", csv))
}

pub fn design_pressure(cfg: &RunConfig, a: &DesignArgs) -> CmdResult {
    let params = find_parameters(&ParameterOptions { beta_bar: a.beta_bar, alpha: a.alpha, eta: a.eta })?;
    let chain = check_inequality_chain(&params);
    let dp = construct_pressure(&params, &DesignOptions { epsilon: a.epsilon, width_fraction: a.width_fraction })?;
    let cand = assemble_s6_candidate(&params, &dp)?;
    let tol = cfg.tol.unwrap_or(1e-9);
    let report = evaluate_constraints_with_tol(&cand, &dp.law, tol)?;
    let margin_ok = dp.margin_minus >= 0.01 * dp.threshold_minus && dp.margin_plus >= 0.01 * dp.threshold_plus;
    let strict_ok = report.inequality_slacks.iter().all(|s| s.value > 0.0);
    let eq_ok = report.max_abs_residual() <= tol;

    let t = dp.table();
    let mut csv = String::from("rho,p,fprime\n");
    for &r in t.breakpoints() {
        csv.push_str(&csv_line(&[r, t.pressure(r), t.fprime(r)]));
    }
    let sidecar = json!({ "rho1": 1.0, "p_at_rho1": t.pressure(1.0) });
    let table_csv = {
        let mut s = String::from("rho,fprime\n");
        for (&r, &f) in t.breakpoints().iter().zip(t.samples()) {
            s.push_str(&csv_line(&[r, f]));
        }
        s
    };
    let result = json!({
        "parameters": params,
        "chain": chain,
        "designed": {
            "epsilon": dp.epsilon,
            "q_minus": dp.q_minus, "q_plus": dp.q_plus,
            "m_minus": dp.m_minus, "m_plus": dp.m_plus,
            "l_minus": dp.l_minus, "l_plus": dp.l_plus,
            "threshold_minus": dp.threshold_minus, "threshold_plus": dp.threshold_plus,
            "margin_minus": dp.margin_minus, "margin_plus": dp.margin_plus,
            "bump_left": dp.bump_left, "bump_right": dp.bump_right, "floor": dp.floor,
        },
        "candidate": cand,
        "constraints": report,
        "verdict": verdict_name(&report.verdict),
        "integral_margins_ok": margin_ok,
    });
    let done = Done::new(result)
        .file("pressure.csv", csv)
        .file("pressure_table.csv", table_csv)
        .file("pressure_table.json", format!("{sidecar}\n"))
        .file("candidate.json", serde_json::to_string_pretty(&cand).expect("candidate serializes") + "\n")
        .fail_if(!eq_ok, || format!("identity residual {:e} exceeds {tol:e}", report.max_abs_residual()))
        .fail_if(!strict_ok, || verdict_name(&report.verdict))
        .fail_if(!margin_ok, || "integral inequality margin below 1% of its threshold".into());
    Ok(done)
}

pub fn search(cfg: &RunConfig, a: &SearchArgs) -> CmdResult {
    let law = match a.gamma {
        Some(g) => PressureLaw::polytropic(1.0, g)?,
        None => parse_pressure(&a.pressure)?,
    };
    let data = a.fixed.then(|| FixedData {
        rho_minus: 1.0,
        rho_plus: 4.0,
        v_minus: [-0.25, 2.0 * 2f64.sqrt()],
        v_plus: [-0.25, 0.0],
    });
    let mut pinned = Vec::new();
    for p in &a.pin {
        let (name, value) = p.split_once('=').ok_or_else(|| Failure::BadInput(format!("pin must be NAME=VALUE, got {p:?}")))?;
        let v: f64 = value.trim().parse().map_err(|_| Failure::BadInput(format!("not a number in pin {p:?}")))?;
        pinned.push((name.trim().to_string(), v));
    }
    let opts = SearchOptions {
        tol: cfg.tol.unwrap_or(1e-10),
        max_iters: a.max_iters,
        starts: a.starts,
        min_slack: a.min_slack,
        pinned,
        ..SearchOptions::default()
    };
    let outcome = search_feasible(&law, data.as_ref(), cfg.seed, &opts)?;
    let (cand, failure) = match &outcome {
        SearchOutcome::Feasible { candidate, .. } => (candidate.clone(), None),
        SearchOutcome::Infeasible { best_penalty, candidate, .. } => {
            (candidate.clone(), Some(format!("no admissible candidate found; best penalty {best_penalty:e}")))
        }
    };
    let min_slack = match &outcome {
        SearchOutcome::Feasible { report, .. } => report.inequality_slacks.iter().map(|s| s.value).fold(f64::INFINITY, f64::min),
        _ => f64::NAN,
    };
    let result = json!({ "pressure": law, "fixed_data": data, "outcome": outcome, "min_inequality_slack": min_slack });
    Ok(Done::new(result)
        .file("candidate.json", serde_json::to_string_pretty(&cand).expect("candidate serializes") + "\n")
        .fail_if(failure.is_some(), || failure.clone().unwrap_or_default()))
}

pub fn compression(cfg: &RunConfig, a: &CompressionArgs) -> CmdResult {
    let law = parse_pressure(&a.pressure)?;
    let times: Vec<f64> = a
        .times
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::BadInput(format!("bad time {s:?}"))))
        .collect::<Result<_, _>>()?;
    if a.samples < 2 || times.iter().any(|t| !(*t < 0.0)) {
        return Err(Failure::BadInput("need at least 2 samples and negative times".into()));
    }
    let cw = compression_wave(a.rho_minus, a.rho_plus, &law)?;
    let bp = cw.forward.breakpoints();
    let (xi_lo, xi_hi) = (bp.first().copied().unwrap_or(0.0), bp.last().copied().unwrap_or(0.0));
    let mut csv = String::from("t,x2,rho,v1,v2\n");
    let mut slopes = Vec::new();
    for &t in &times {
        let (a0, b0) = ((xi_lo * t).min(xi_hi * t) - 0.5, (xi_lo * t).max(xi_hi * t) + 0.5);
        for i in 0..a.samples {
            let x = a0 + (b0 - a0) * i as f64 / (a.samples - 1) as f64;
            let s = cw.state(x, t)?;
            csv.push_str(&csv_line(&[t, x, s.rho, s.v[0], s.v[1]]));
        }
        slopes.push(json!({ "t": t, "max_density_slope": cw.max_density_slope(t, 2000)? }));
    }
    // Invariants w₂, w₃ across the forward fan.
    let mut drift: f64 = 0.0;
    let first = riemann_invariants(&cw.forward.eval(xi_lo)?, &law)?;
    for i in 0..=200 {
        let xi = xi_lo + (xi_hi - xi_lo) * i as f64 / 200.0;
        let w = riemann_invariants(&cw.forward.eval(xi)?, &law)?;
        drift = drift.max((w.1 - first.1).abs()).max((w.2 - first.2).abs());
    }
    let tol = cfg.tol.unwrap_or(1e-10);
    let (minus, plus) = cw.datum()?;
    let origin = cw.state(0.0, -1.0)?;
    let kinds: Vec<&str> = cw.forward.waves.iter().map(|w| w.kind()).collect();
    let result = json!({
        "rho_minus": a.rho_minus,
        "rho_plus": a.rho_plus,
        "pressure": law,
        "forward_wave_kinds": kinds,
        "datum": { "minus": minus, "plus": plus },
        "state_at_origin_line": origin,
        "invariant_drift": drift,
        "slopes": slopes,
    });
    Ok(Done::new(result)
        .file("field.csv", csv)
        .fail_if(drift > tol, || format!("invariants drift by {drift:e} across the fan")))
}

fn state_point(v: &str, u: &str) -> Result<StatePoint, Failure> {
    let v = parse_floats::<2>(v)?;
    let [u11, u12] = parse_floats::<2>(u)?;
    Ok(StatePoint::new(v, u11, u12))
}

pub fn segment(cfg: &RunConfig, a: &SegmentArgs) -> CmdResult {
    let pt = state_point(&a.v, &a.u)?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let membership = in_u(&pt, a.c, tol);
    if membership.membership != Membership::Inside {
        return Err(Failure::BadInput(format!("point is {:?}, not inside the hull", membership.membership)));
    }
    let seg = find_segment(&pt, a.c, &SegmentOptions { angles: a.angles, tol })?;
    let result = json!({ "point": pt, "c": a.c, "membership": membership, "segment": seg });
    Ok(Done::new(result))
}

pub fn wave(cfg: &RunConfig, a: &WaveArgs) -> CmdResult {
    let seg = StateSegment::new(parse_floats::<2>(&a.a)?, parse_floats::<2>(&a.b)?, a.lambda, a.c)?;
    let n_min = wave_n_min(&seg, a.epsilon)?;
    let frequency = a.frequency.unwrap_or(n_min.ceil());
    let field = localized_wave(&seg, a.epsilon, frequency, a.grid)?;
    let (fd_max, fd_l2) = field.fd_residuals();
    let dist = field.max_segment_distance(&seg);
    let means = field.component_means();
    let l1 = field.l1_velocity();
    let alpha = l1 / (seg.lambda * seg.length());
    let allowance = a.epsilon + cfg.tol.unwrap_or(0.0);
    let result = json!({
        "metadata": field.meta,
        "n_min": n_min,
        "frequency": frequency,
        "grid": a.grid,
        "fd_residual_max": fd_max,
        "fd_residual_l2": fd_l2,
        "max_segment_distance": dist,
        "component_means": means,
        "l1_velocity": l1,
        "alpha_emp": alpha,
    });
    Ok(Done::new(result)
        .file("field.csv", field.to_csv())
        .fail_if(dist > allowance, || format!("samples leave the {allowance}-neighbourhood of the segment ({dist:e})")))
}

pub fn ci_step(cfg: &RunConfig, a: &CiStepArgs) -> CmdResult {
    if a.iters == 0 {
        return Err(Failure::BadInput("need at least one iteration".into()));
    }
    let mut opts = StepOptions { frequency: a.frequency, k_max: a.k_max, ..StepOptions::default() };
    if let Some(t) = cfg.tol {
        opts.segment.tol = t;
    }
    let (field, run) = run_steps(&StatePoint::default(), a.c, a.grid, a.iters, &opts)?;
    let positive = run.steps.iter().all(|s| s.increase > 0.0);
    let decreasing = run.deficits.windows(2).all(|w| w[1] < w[0]);
    let inside = run.steps.iter().all(|s| s.all_inside);
    let result = json!({
        "c": a.c,
        "grid": a.grid,
        "options": opts,
        "deficits": run.deficits,
        "beta_emp": run.beta_emp,
        "increases_positive": positive,
        "deficit_strictly_decreasing": decreasing,
        "all_inside": inside,
        "steps": run.steps,
    });
    Ok(Done::new(result)
        .file("field.csv", field.to_csv())
        .fail_if(!positive, || "a step failed to increase the energy".into())
        .fail_if(!decreasing, || "deficit sequence is not strictly decreasing".into())
        .fail_if(!inside, || "a sampled state left the hull".into()))
}

fn load_field(path: &Option<PathBuf>) -> Result<FieldHandle, Failure> {
    let Some(p) = path else {
        let exact = eulerfan::fanalgebra::find_exact_solution().to_f64();
        return Ok(FieldHandle::PiecewiseFan(PiecewiseFan::from_candidate(exact)?));
    };
    let text = read_text(p)?;
    if let Ok(h) = serde_json::from_str::<FieldHandle>(&text) {
        return Ok(h);
    }
    if let Ok(c) = serde_json::from_str::<FanSubsolutionCandidate<f64>>(&text) {
        return Ok(FieldHandle::PiecewiseFan(PiecewiseFan::from_candidate(c)?));
    }
    if let Ok(c) = serde_json::from_str::<FanSubsolutionCandidate<QuadraticNumber>>(&text) {
        return Ok(FieldHandle::PiecewiseFan(PiecewiseFan::from_candidate(c.to_f64())?));
    }
    Err(Failure::BadInput(format!("{} is neither a field nor a fan candidate", p.display())))
}

pub fn weakcheck(cfg: &RunConfig, a: &WeakcheckArgs) -> CmdResult {
    let law = parse_pressure(&a.pressure)?;
    let field = load_field(&a.field)?;
    let speeds = match &field {
        FieldHandle::PiecewiseFan(f) => f.partition.speeds().to_vec(),
        FieldHandle::SelfSimilar(s) => s.breakpoints(),
        FieldHandle::Sampled { .. } => vec![0.0],
    };
    let tests = TestFunction::straddling(&speeds, a.tests, cfg.seed, true);
    let rows = weak_residual(&field, &law, &tests, &QuadOptions { order: a.order, panels_per_radius: a.panels })?;
    let algebraic = match &field {
        FieldHandle::PiecewiseFan(f) => Some(evaluate_constraints_with_tol(&f.candidate, &law, cfg.tol.unwrap_or(1e-9))?),
        _ => None,
    };
    let balanced = rows.iter().all(|r| r.balanced(10.0));
    let admissible = rows.iter().all(|r| r.admissible(10.0));
    let result = json!({
        "field_kind": match &field {
            FieldHandle::PiecewiseFan(_) => "piecewise_fan",
            FieldHandle::SelfSimilar(_) => "self_similar",
            FieldHandle::Sampled { .. } => "sampled",
        },
        "pressure": law,
        "summary": oracle_summary(&rows),
        "algebraic": algebraic,
        "rows": rows,
    });
    Ok(Done::new(result)
        .fail_if(!balanced, || "mass or momentum residual exceeds 10x its quadrature error".into())
        .fail_if(!admissible, || "negative energy slack beyond quadrature error".into()))
}

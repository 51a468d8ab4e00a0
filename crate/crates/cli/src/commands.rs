//! One function per subcommand. Each builds its typed report, prints it in
//! the requested mode, and returns the exit code.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use shiftfix_core::config::NumberSpec;
use shiftfix_core::conditions::{
    check_condition_i, check_condition_ii, default_grid, ConditionReport,
};
use shiftfix_core::corpus::{instance, list_instances, run_instance, InstanceRunReport};
use shiftfix_core::metric::verify_closure;
use shiftfix_core::solver::{picard, SolveVerdict, TraceSummary, UniquenessReport};
use shiftfix_core::verifier::{check_contraction as contraction_check, search_counterexample, ContractionReport};
use shiftfix_core::{ClosureReport, Config, Error, Point, Result, UniquenessVerdict};

use crate::output::{describe_condition, verdict_word, Envelope, SCHEMA_VERSION};

#[derive(Serialize)]
struct CheckPairReport {
    condition_i: ConditionReport,
    condition_ii: ConditionReport,
    pass: bool,
}

pub fn check_pair(config: &Config, json: bool) -> Result<u8> {
    let pair = config.require_pair()?;
    let checks = &config.checks;
    let u_max = checks.effective_u_max();
    let condition_i = check_condition_i(
        &pair,
        checks.seed,
        checks.n_samples,
        checks.tol_eq,
        checks.tol_ord,
        u_max,
    )?;
    let grid = default_grid(&pair, u_max, checks.grid_points);
    let condition_ii = check_condition_ii(&pair, &grid, checks.tol)?;
    let pass = condition_i.pass() && condition_ii.pass();
    let report = CheckPairReport {
        condition_i,
        condition_ii,
        pass,
    };

    if json {
        Envelope::new("check-pair", checks, None, &report).print_json();
    } else {
        println!("{}", describe_condition("(i)", &report.condition_i));
        println!("{}", describe_condition("(ii)", &report.condition_ii));
        println!("overall: {}", if pass { "pass" } else { "fail" });
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CheckContractionReport {
    closure: ClosureReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    contraction: Option<ContractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<ContractionReport>,
    pass: bool,
}

pub fn check_contraction(config: &Config, json: bool) -> Result<u8> {
    let space = config.require_space()?;
    let map = config.require_map()?;
    let pair = config.require_pair()?;
    let checks = &config.checks;

    let closure = verify_closure(&space, &map, checks.seed, checks.n_closure);
    let (contraction, search) = if closure.pass() {
        (
            Some(contraction_check(
                &space,
                &map,
                &pair,
                checks.seed,
                checks.n_samples,
                checks.tol,
            )?),
            Some(search_counterexample(
                &space,
                &map,
                &pair,
                checks.seed,
                checks.budget,
                checks.tol,
            )?),
        )
    } else {
        (None, None)
    };
    let pass = closure.pass()
        && contraction.as_ref().is_some_and(ContractionReport::pass)
        && search.as_ref().is_some_and(ContractionReport::pass);
    let report = CheckContractionReport {
        closure,
        contraction,
        search,
        pass,
    };

    if json {
        Envelope::new("check-contraction", checks, None, &report).print_json();
    } else {
        println!(
            "closure: {} ({} violations over {} samples)",
            if report.closure.pass() { "pass" } else { "violated" },
            report.closure.violations,
            report.closure.samples_used
        );
        for (name, section) in [
            ("sampled check", &report.contraction),
            ("counterexample search", &report.search),
        ] {
            if let Some(r) = section {
                println!(
                    "{name}: {} (worst margin {:.6e} over {} pairs)",
                    verdict_word(r.verdict),
                    r.worst_margin,
                    r.samples_used
                );
                if let Some(w) = &r.witness {
                    println!(
                        "  worst pair x = {}, y = {}: d(x,y) = {:.6e}, d(Tx,Ty) = {:.6e}, psi = {:.6e}, phi = {:.6e}",
                        w.x, w.y, w.d_xy, w.d_txy, w.psi_value, w.phi_value
                    );
                }
            }
        }
        println!("overall: {}", if pass { "pass" } else { "fail" });
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct SolveReport {
    #[serde(flatten)]
    summary: TraceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_out: Option<String>,
}

pub fn solve(
    config: &Config,
    json: bool,
    x0_flag: Option<&str>,
    tol_flag: Option<f64>,
    max_iter_flag: Option<usize>,
    trace_out: Option<&Path>,
) -> Result<u8> {
    let space = config.require_space()?;
    let map = config.require_map()?;
    let mut solver = config.solver.clone();
    if let Some(text) = x0_flag {
        solver.x0 = Some(NumberSpec::Text(text.to_string()));
    }
    if let Some(tol) = tol_flag {
        solver.tol_fix = tol;
    }
    if let Some(n) = max_iter_flag {
        solver.max_iter = n;
    }
    let x0 = solver
        .x0
        .as_ref()
        .ok_or_else(|| Error::Config("solve needs an x0 (flag --x0 or solver.x0)".into()))?
        .resolve()?;

    let trace = picard(&space, &map, Point(x0), solver.tol_fix, solver.max_iter)?;
    let trace_path = match trace_out {
        Some(path) => {
            let mut out = BufWriter::new(
                File::create(path)
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
            );
            trace
                .write_csv(&mut out)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let report = SolveReport {
        summary: trace.summary(),
        trace_out: trace_path,
    };
    if json {
        Envelope::new("solve", &config.checks, Some(&solver), &report).print_json();
    } else {
        let s = &report.summary;
        println!(
            "verdict: {:?}\nfixed point: {}\nresidual: {:.6e}\niterations: {}\nstep-monotonicity violations: {}",
            s.verdict, s.fixed_point, s.residual, s.iterations, s.monotone_violations
        );
        if let Some(path) = &report.trace_out {
            println!("trace written to {path}");
        }
    }
    Ok(if report.summary.verdict == SolveVerdict::Converged {
        0
    } else {
        1
    })
}

#[derive(Serialize)]
struct ProbeReport {
    uniqueness: UniquenessReport,
    pass: bool,
}

pub fn probe_uniqueness(config: &Config, json: bool, starts_flag: Option<usize>) -> Result<u8> {
    let space = config.require_space()?;
    let map = config.require_map()?;
    let checks = &config.checks;
    let solver = &config.solver;
    let n_starts = starts_flag.unwrap_or(checks.n_starts);

    let uniqueness = shiftfix_core::solver::probe_uniqueness(
        &space,
        &map,
        checks.seed,
        n_starts,
        solver.tol_fix,
        checks.tol_unique,
        solver.max_iter,
    )?;
    let pass = uniqueness.verdict == UniquenessVerdict::Unique;
    let report = ProbeReport { uniqueness, pass };

    if json {
        Envelope::new("probe-uniqueness", checks, Some(solver), &report).print_json();
    } else {
        let u = &report.uniqueness;
        println!("starts: {:?}", u.starts.iter().map(|p| p.value()).collect::<Vec<_>>());
        println!("limits: {:?}", u.limits.iter().map(|p| p.value()).collect::<Vec<_>>());
        println!("max pairwise distance: {:.6e}", u.max_pairwise_distance);
        println!("verdict: {:?}", u.verdict);
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CorpusListReport {
    instances: Vec<&'static str>,
}

pub fn corpus_list(json: bool) -> Result<u8> {
    let report = CorpusListReport {
        instances: list_instances(),
    };
    if json {
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "command": "corpus-list",
            "instances": report.instances,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        for name in report.instances {
            println!("{name}");
        }
    }
    Ok(0)
}

pub fn corpus_run(config: &Config, json: bool, name: &str) -> Result<u8> {
    let inst = instance(name)?;
    let report: InstanceRunReport = run_instance(&inst, &config.checks, &config.solver)?;
    let pass = report.expectations_met;

    if json {
        Envelope::new("corpus-run", &config.checks, Some(&config.solver), &report).print_json();
    } else {
        println!("instance: {}", report.name);
        println!(
            "closure: {} violations over {} samples",
            report.closure.violations, report.closure.samples_used
        );
        println!("{}", describe_condition("(i)", &report.condition_i));
        println!("{}", describe_condition("(ii)", &report.condition_ii));
        if let Some(c) = &report.contraction {
            println!(
                "contraction: {} (worst margin {:.6e} over {} pairs)",
                verdict_word(c.verdict),
                c.worst_margin,
                c.samples_used
            );
        }
        println!(
            "solve from {}: {:?} after {} iterations, residual {:.6e}, limit {}",
            report.solve.x0,
            report.solve.verdict,
            report.solve.iterations,
            report.solve.residual,
            report.solve.fixed_point
        );
        println!(
            "uniqueness: {:?} (max pairwise distance {:.6e} over {} starts)",
            report.uniqueness.verdict,
            report.uniqueness.max_pairwise_distance,
            report.uniqueness.starts.len()
        );
        if pass {
            println!("expectations: met");
        } else {
            println!("expectations NOT met:");
            for m in &report.mismatches {
                println!("  - {m}");
            }
        }
    }
    Ok(if pass { 0 } else { 1 })
}

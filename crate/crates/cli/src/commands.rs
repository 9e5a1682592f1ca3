use std::path::PathBuf;
use std::time::Instant;

use etadense::dirichlet::mean_square_sweep;
use etadense::eta::check_bridge;
use etadense::hunt::{hunt_value, HuntConfig, HuntStatus};
use etadense::polygon::{polygon_angles, RadiiSet};
use etadense::primes::sieve_primes;
use etadense::torus::construct_theta;
use etadense::{log_zeta_horizontal, zeta, ComplexPoint, Error};
use rayon::prelude::*;

use crate::config::{parse_complex, require};
use crate::output::{num, write_file, write_manifest, RunInfo, Table};
use crate::{CliError, Params, EXIT_HONEST_FAILURE, EXIT_OK};

fn output_path(p: &Params, default: &str) -> PathBuf {
    p.output.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn check_sigma(sigma: f64) -> Result<(), CliError> {
    if !(sigma >= 0.5) || !sigma.is_finite() {
        return Err(CliError::Validation(format!("sigma must be at least 1/2, got {sigma}")));
    }
    Ok(())
}

/// `start, start + step, ...` up to `end`; empty when `end <= start`.
pub fn t_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() {
        return Err(CliError::Validation(format!("t_step must be positive and the range finite, got step {step}")));
    }
    if end <= start {
        return Ok(Vec::new());
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| start + k as f64 * step).collect())
}

pub fn cmd_eval(p: &Params) -> Result<i32, CliError> {
    let clock = Instant::now();
    let m = require(p.m, "m")?;
    let sigma = require(p.sigma, "sigma")?;
    check_sigma(sigma)?;
    let grid = t_grid(require(p.t_start, "t_start")?, require(p.t_end, "t_end")?, require(p.t_step, "t_step")?)?;
    let table = p.zero_table(sigma, "the vertical quadrature splits at every zero ordinate below t")?;
    let quad = p.quad()?;

    let rows: Vec<Option<Vec<String>>> = grid
        .par_iter()
        .map(|&t| {
            let point = ComplexPoint::new(sigma, t)?;
            let z = zeta(point, &quad.eval)?;
            let l = match log_zeta_horizontal(sigma, t, &table, &quad.eval) {
                Err(Error::BranchObstruction { .. }) => return Ok(None),
                other => other?,
            };
            let b = check_bridge(m, sigma, t, &table, &quad)?;
            let (h, v, y) = (b.horizontal.value, b.vertical.value, b.zero_sum);
            Ok(Some(vec![
                m.to_string(),
                num(sigma),
                num(t),
                num(z.re),
                num(z.im),
                num(l.re),
                num(l.im),
                num(h.re),
                num(h.im),
                num(v.re),
                num(v.im),
                num(y.re),
                num(y.im),
                num(b.residual),
                num(b.budget),
            ]))
        })
        .collect::<Result<_, Error>>()?;

    let mut out = Table::new(&[
        "m",
        "sigma",
        "t",
        "re_zeta",
        "im_zeta",
        "re_log_zeta",
        "im_log_zeta",
        "re_eta_tilde",
        "im_eta_tilde",
        "re_eta",
        "im_eta",
        "re_y",
        "im_y",
        "residual",
        "est_error",
    ]);
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    rows.into_iter().flatten().for_each(|r| out.push(r));
    let path = output_path(p, "eval.csv");
    out.write(&path)?;
    let mut notes = Vec::new();
    if skipped > 0 {
        notes.push(format!("{skipped} grid points inside a zero guard zone were skipped"));
    }
    let info = RunInfo { command: "eval", params: p, table: Some(&table), elapsed: clock.elapsed() };
    write_manifest(&info, &path, out.len(), notes)?;
    Ok(EXIT_OK)
}

pub fn cmd_meansquare(p: &Params) -> Result<i32, CliError> {
    let clock = Instant::now();
    let m = require(p.m, "m")?;
    let sigma = require(p.sigma, "sigma")?;
    check_sigma(sigma)?;
    let xs = p.xs.clone().ok_or_else(|| CliError::Validation("missing required parameter `xs`".into()))?;
    let t_max = require(p.t_max, "t_max")?;
    let grid_step = p.grid_step.unwrap_or(0.25);
    let x_top = xs.iter().cloned().fold(0.0, f64::max);
    let limit = p.sieve_limit.unwrap_or((x_top.ceil() as u64).max(1_000_000));
    let table = p.zero_table(sigma, "the horizontal integrals pass near zeros of zeta")?;
    let quad = p.quad()?;
    let primes = sieve_primes(limit)?;
    let reports = mean_square_sweep(m, sigma, &xs, t_max, grid_step, &table, &quad, &primes)?;

    let mut out = Table::new(&["m", "sigma", "x", "t_max", "grid_step", "mse", "bound_ratio", "skipped", "total"]);
    for r in &reports {
        out.push(vec![
            r.m.to_string(),
            num(r.sigma),
            num(r.x),
            num(r.t_max),
            num(r.grid_step),
            num(r.mse),
            num(r.bound_ratio),
            r.skipped.to_string(),
            r.total.to_string(),
        ]);
    }
    let path = output_path(p, "meansquare.csv");
    out.write(&path)?;
    let info = RunInfo { command: "meansquare", params: p, table: Some(&table), elapsed: clock.elapsed() };
    write_manifest(&info, &path, out.len(), Vec::new())?;
    Ok(EXIT_OK)
}

pub fn cmd_hunt(p: &Params) -> Result<i32, CliError> {
    let clock = Instant::now();
    let m = require(p.m, "m")?;
    let sigma = require(p.sigma, "sigma")?;
    check_sigma(sigma)?;
    let a = parse_complex(
        p.a.as_deref().ok_or_else(|| CliError::Validation("missing required parameter `a`".into()))?,
        "a",
    )?;
    let epsilon = require(p.epsilon, "epsilon")?;
    let table = p.zero_table(sigma, "the horizontal integrals pass near zeros of zeta")?;
    let defaults = HuntConfig::default();
    let config = HuntConfig {
        t_min: p.t_start.unwrap_or(defaults.t_min),
        t_max: p.t_end.unwrap_or(defaults.t_max),
        delta: p.delta.unwrap_or(defaults.delta),
        n_search: p.n_search.unwrap_or(defaults.n_search),
        max_evaluations: p.max_evaluations.unwrap_or(defaults.max_evaluations),
        sieve_limit: p.sieve_limit.unwrap_or(defaults.sieve_limit),
        quad: p.quad()?,
        ..defaults
    };
    let r = hunt_value(m, sigma, a, epsilon, &config, &table)?;

    let status = match r.status {
        HuntStatus::Success => "success",
        HuntStatus::HonestFailure => "honest_failure",
    };
    let mut out = Table::new(&[
        "m",
        "sigma",
        "re_a",
        "im_a",
        "epsilon",
        "t_witness",
        "re_eta_tilde",
        "im_eta_tilde",
        "final_error",
        "torus_error",
        "in_box",
        "budget_used",
        "status",
    ]);
    out.push(vec![
        m.to_string(),
        num(sigma),
        num(a.re),
        num(a.im),
        num(epsilon),
        num(r.t_witness),
        num(r.eta_value.re),
        num(r.eta_value.im),
        num(r.final_error),
        num(r.torus_error),
        r.in_box.to_string(),
        r.budget_used.to_string(),
        status.to_string(),
    ]);
    let path = output_path(p, "hunt.csv");
    out.write(&path)?;
    let d = &r.diagnostics;
    let mut notes = vec![
        format!("searched primes {:?} with target {:?}, step {}", d.search_primes, d.torus_target, d.step),
        format!("{} box hits, {} screened candidates, {} refined", d.box_hits, d.proxy_candidates, d.refined),
    ];
    match (&d.pipeline_failure, d.pipeline_error) {
        (Some(f), _) => notes.push(format!("torus construction: {f}")),
        (None, Some(e)) => notes.push(format!(
            "torus construction: U = {:?}, N = {:?}, error {e}, unsearched window {:?}",
            d.pipeline_u, d.pipeline_n, d.unsearched_window
        )),
        _ => {}
    }
    if !d.note.is_empty() {
        notes.push(d.note.clone());
    }
    let info = RunInfo { command: "hunt", params: p, table: Some(&table), elapsed: clock.elapsed() };
    write_manifest(&info, &path, 1, notes)?;
    Ok(if r.status == HuntStatus::Success { EXIT_OK } else { EXIT_HONEST_FAILURE })
}

pub fn cmd_polygon(p: &Params) -> Result<i32, CliError> {
    let clock = Instant::now();
    if p.construct.unwrap_or(false) {
        return construct(p, clock);
    }
    let radii = p.radii.clone().ok_or_else(|| CliError::Validation("missing required parameter `radii`".into()))?;
    let z = parse_complex(p.z.as_deref().unwrap_or("0"), "z")?;
    let set = RadiiSet::new(radii, None)?;
    let sol = polygon_angles(&set, z)?;
    let mut out = Table::new(&["index", "radius", "theta"]);
    for (k, (r, th)) in set.radii.iter().zip(&sol.thetas).enumerate() {
        out.push(vec![k.to_string(), num(*r), num(*th)]);
    }
    let path = output_path(p, "polygon.csv");
    out.write(&path)?;
    let info = RunInfo { command: "polygon", params: p, table: None, elapsed: clock.elapsed() };
    let notes = vec![format!("closure residual {:e}", sol.residual)];
    write_manifest(&info, &path, out.len(), notes)?;
    Ok(EXIT_OK)
}

fn construct(p: &Params, clock: Instant) -> Result<i32, CliError> {
    let m = require(p.m, "m")?;
    let sigma = require(p.sigma, "sigma")?;
    let a = parse_complex(
        p.a.as_deref().ok_or_else(|| CliError::Validation("missing required parameter `a`".into()))?,
        "a",
    )?;
    let epsilon = require(p.epsilon, "epsilon")?;
    let primes = sieve_primes(p.sieve_limit.unwrap_or(100_000_000))?;
    let r = construct_theta(m, sigma, a, epsilon, &primes)?;

    let mut out = Table::new(&["prime", "theta"]);
    for (q, th) in r.primes.iter().zip(&r.theta2.thetas) {
        out.push(vec![q.to_string(), num(*th)]);
    }
    let path = output_path(p, "theta.csv");
    out.write(&path)?;
    let json_path = path.with_extension("json");
    let json = serde_json::to_vec(&r).map_err(|e| CliError::Validation(e.to_string()))?;
    write_file(&json_path, &json)?;
    let notes = vec![format!(
        "U = {}, N = {}, final error {:e}, closure residual {:e}",
        r.u, r.n, r.final_error, r.polygon_residual
    )];
    let info = RunInfo { command: "polygon", params: p, table: None, elapsed: clock.elapsed() };
    write_manifest(&info, &path, out.len(), notes.clone())?;
    write_manifest(&info, &json_path, 1, notes)?;
    Ok(EXIT_OK)
}

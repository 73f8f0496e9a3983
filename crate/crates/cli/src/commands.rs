//! The subcommands: generate, run, reduce, verify, sweep, xor.
//!
//! Commands return their process exit code: 0 for success, 1 when a
//! verification found a mismatch. Usage problems surface as errors and
//! exit with 2 from main.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use gapstream::instances::{
    gen_hybrid, gen_ngc, gen_ngc_padded, to_directed, CaseLabel, NgcInstance,
};
use gapstream::oracles;
use gapstream::reductions::{
    reduce_acyclic, reduce_bipartite, reduce_connectivity, reduce_cyclefree, reduce_matching,
    reduce_maxcut, reduce_mst, Problem, ReducedInstance,
};
use gapstream::seeds::trial_seed;
use gapstream::solvers::{
    ngc_sample_bfs_at_rate, sample_bfs_rate, single_pass_rate, ExhaustiveBaseline, NgcVerdict,
    SampleBfs,
};
use gapstream::stream::{run_on_stream, EdgeStream, StreamError};
use gapstream::xor_lab::{
    blackboard_enumerate, ip_xor_exhaustive, wilson_interval, xor_bias_convolution,
    xor_bias_product, BiasSpec, ToyGame,
};

use crate::config::Config;

fn parse_case(s: &str) -> Result<CaseLabel> {
    CaseLabel::parse(s).map_err(|e| anyhow!("{e}"))
}

fn gen_instance(n: usize, k: usize, p: usize, case: CaseLabel, seed: u64) -> Result<NgcInstance> {
    let inst = if k % 2 == 0 {
        gen_ngc(n, k, case, seed)
    } else {
        gen_ngc_padded(n, k, p, case, seed)
    };
    inst.map_err(|e| anyhow!("{e}"))
}

fn write_pair(prefix: &str, edges: &str, meta: &str) -> Result<()> {
    std::fs::write(format!("{prefix}.edges"), edges)
        .with_context(|| format!("writing {prefix}.edges"))?;
    std::fs::write(format!("{prefix}.meta"), meta)
        .with_context(|| format!("writing {prefix}.meta"))?;
    Ok(())
}

enum Loaded {
    Ngc(NgcInstance),
    Reduced(ReducedInstance),
}

fn load(prefix: &str) -> Result<Loaded> {
    let meta = std::fs::read_to_string(format!("{prefix}.meta"))
        .with_context(|| format!("reading {prefix}.meta"))?;
    let edges = std::fs::read_to_string(format!("{prefix}.edges"))
        .with_context(|| format!("reading {prefix}.edges"))?;
    let stream = EdgeStream::from_edge_list(&edges)?;
    let kind = meta
        .lines()
        .find_map(|l| l.strip_prefix("kind="))
        .ok_or_else(|| anyhow!("{prefix}.meta has no kind line"))?;
    match kind {
        "ngc" => Ok(Loaded::Ngc(NgcInstance::from_parts(&meta, stream)?)),
        "reduced" => Ok(Loaded::Reduced(ReducedInstance::from_parts(&meta, stream)?)),
        other => bail!("unknown instance kind {other:?}"),
    }
}

// ---------------------------------------------------------------------------

pub fn cmd_gen(config: &Config) -> Result<i32> {
    let n = config.usize("n")?;
    let k = config.usize("k")?;
    let seed = config.u64_or("seed", 0)?;
    let p = config.usize_or("p", 1)?;
    let case_str = config.require("case")?.to_string();
    let directed = config.flag("directed", false)?;
    let out = config.require("out")?.to_string();
    let hybrid = config.get("hybrid").map(|s| s.to_string());
    config.finish()?;

    let inst = if case_str == "hybrid" {
        let bits = hybrid.ok_or_else(|| anyhow!("case=hybrid needs hybrid=<bit string>"))?;
        let pattern: Vec<bool> = bits.chars().map(|c| c == '1').collect();
        gen_hybrid(n, k, &pattern, seed)?
    } else {
        gen_instance(n, k, p, parse_case(&case_str)?, seed)?
    };
    let inst = if directed { to_directed(&inst)? } else { inst };
    write_pair(&out, &inst.stream.to_edge_list(), &inst.metadata_string())?;
    println!(
        "wrote {out}.edges ({} edges over {} vertices) and {out}.meta",
        inst.stream.len(),
        inst.n
    );
    Ok(0)
}

// ---------------------------------------------------------------------------

struct TrialRow {
    trial: u64,
    seed: u64,
    case: CaseLabel,
    verdict: String,
    correct: bool,
    aborted: bool,
    passes: u32,
    peak_bits: u64,
    wall_ms: u64,
    clamped: bool,
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    solver_kind: &str,
    n: usize,
    k: usize,
    p: usize,
    rate_mult: f64,
    c: f64,
    space_limit: Option<u64>,
    timings: bool,
    master: u64,
    trial: u64,
) -> Result<TrialRow> {
    let inst_seed = trial_seed(master, 3 * trial);
    let solver_seed = trial_seed(master, 3 * trial + 1);
    let case = match trial_seed(master, 3 * trial + 2) & 1 {
        0 => CaseLabel::KCycle,
        _ => CaseLabel::TwoKCycle,
    };
    run_one_with_case(
        solver_kind,
        n,
        k,
        p,
        rate_mult,
        c,
        space_limit,
        timings,
        inst_seed,
        solver_seed,
        case,
        trial,
    )
}

#[allow(clippy::too_many_arguments)]
fn run_one_with_case(
    solver_kind: &str,
    n: usize,
    k: usize,
    p: usize,
    rate_mult: f64,
    c: f64,
    space_limit: Option<u64>,
    timings: bool,
    inst_seed: u64,
    solver_seed: u64,
    case: CaseLabel,
    trial: u64,
) -> Result<TrialRow> {
    let inst = gen_instance(n, k, p, case, inst_seed)?;
    let start = Instant::now();
    let expected = match case {
        CaseLabel::KCycle => NgcVerdict::KCycle,
        CaseLabel::TwoKCycle => NgcVerdict::TwoKCycle,
    };

    let (budget, solver): (u32, Option<SampleBfs>) = match solver_kind {
        "sample_bfs" => {
            let rate = sample_bfs_rate(n, k, p) * rate_mult;
            (p as u32, Some(ngc_sample_bfs_at_rate(n, k, rate, solver_seed)))
        }
        "single_pass" => {
            let rate = single_pass_rate(n, k, c) * rate_mult;
            (1, Some(ngc_sample_bfs_at_rate(n, k, rate, solver_seed)))
        }
        "baseline" => (1, None),
        other => bail!("unknown solver name {other:?}"),
    };

    let outcome = match solver {
        Some(mut solver) => {
            let clamped = solver.rate_clamped();
            run_on_stream(&mut solver, &inst.stream, budget, space_limit)
                .map(|r| (r, clamped))
        }
        None => {
            let mut baseline = ExhaustiveBaseline::new(n, k);
            run_on_stream(&mut baseline, &inst.stream, budget, space_limit).map(|r| (r, false))
        }
    };

    let wall_ms = if timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(match outcome {
        Ok((report, clamped)) => TrialRow {
            trial,
            seed: solver_seed,
            case,
            verdict: report.output.as_str().to_string(),
            correct: report.output == expected,
            aborted: false,
            passes: report.passes_used,
            peak_bits: report.peak_state_bits,
            wall_ms,
            clamped,
        },
        Err(StreamError::SpaceLimitExceeded {
            pass, state_bits, ..
        }) => TrialRow {
            trial,
            seed: solver_seed,
            case,
            verdict: "abort".to_string(),
            correct: false,
            aborted: true,
            passes: pass,
            peak_bits: state_bits,
            wall_ms,
            clamped: false,
        },
        Err(e) => return Err(anyhow!("{e}")),
    })
}

pub fn cmd_run(config: &Config) -> Result<i32> {
    let solver_kind = config.require("solver")?.to_string();
    let n = config.usize("n")?;
    let k = config.usize("k")?;
    let p = config.usize_or("p", 1)?;
    let trials = config.u64_or("trials", 0)?;
    let master = config.u64_or("seed", 0)?;
    let rate_mult = config.f64_or("rate_mult", 1.0)?;
    let c = config.f64_or("c", 36.0)?;
    let case_mode = config.get("case").unwrap_or("mix").to_string();
    let space_limit = config.get("space_limit").map(|v| v.parse::<u64>());
    let space_limit = match space_limit {
        Some(Ok(v)) => Some(v),
        Some(Err(_)) => bail!("space_limit must be an integer bit count"),
        None => None,
    };
    let timings = config.flag("timings", false)?;
    let out = config.get("out").map(|s| s.to_string());
    config.finish()?;

    if !matches!(solver_kind.as_str(), "sample_bfs" | "single_pass" | "baseline") {
        bail!("unknown solver name {solver_kind:?}");
    }

    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|trial| match case_mode.as_str() {
            "mix" => run_one(
                &solver_kind, n, k, p, rate_mult, c, space_limit, timings, master, trial,
            ),
            fixed => run_one_with_case(
                &solver_kind,
                n,
                k,
                p,
                rate_mult,
                c,
                space_limit,
                timings,
                trial_seed(master, 3 * trial),
                trial_seed(master, 3 * trial + 1),
                parse_case(fixed)?,
                trial,
            ),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::from("trial,seed,case,verdict,correct,passes,peak_state_bits,wall_ms\n");
    let mut correct = 0u64;
    let mut aborts = 0u64;
    for row in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            row.trial,
            row.seed,
            row.case.as_str(),
            row.verdict,
            row.correct as u8,
            row.passes,
            row.peak_bits,
            row.wall_ms
        )
        .unwrap();
        correct += row.correct as u64;
        aborts += row.aborted as u64;
    }
    if rows.iter().any(|r| r.clamped) {
        eprintln!("note: sampling rate formula exceeded 1 and was clamped");
    }
    if trials > 0 {
        writeln!(
            csv,
            "# success_rate={:.6} correct={correct} aborts={aborts} trials={trials}",
            correct as f64 / trials as f64
        )
        .unwrap();
    }
    match out {
        Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {path}"))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

pub fn cmd_reduce(config: &Config) -> Result<i32> {
    let input = config.require("in")?.to_string();
    let problem = Problem::parse(config.require("problem")?)?;
    let w = config.u64_or("W", 5)?;
    let out = config.require("out")?.to_string();
    config.finish()?;

    let inst = match load(&input)? {
        Loaded::Ngc(inst) => inst,
        Loaded::Reduced(_) => bail!("{input} is already a reduced instance"),
    };
    let reduced = match problem {
        Problem::Mst => reduce_mst(&inst, w)?,
        Problem::Matching => reduce_matching(&inst)?,
        Problem::MaxCut => reduce_maxcut(&inst)?,
        Problem::Acyclic => reduce_acyclic(&inst)?,
        Problem::Connectivity => reduce_connectivity(&inst)?,
        Problem::Bipartite => reduce_bipartite(&inst)?,
        Problem::CycleFree => reduce_cyclefree(&inst)?,
    };
    write_pair(
        &out,
        &reduced.stream.to_edge_list(),
        &reduced.metadata_string(),
    )?;
    println!(
        "wrote {out}.edges and {out}.meta (problem={}, expected {} / {})",
        reduced.problem.as_str(),
        reduced.expected_value_if_k,
        reduced.expected_value_if_2k
    );
    Ok(0)
}

// ---------------------------------------------------------------------------

fn verify_ngc(inst: &NgcInstance) -> Result<i32> {
    let Some((cycle_len, cycle_count, path_len, path_count)) = inst.expected_inventory() else {
        bail!("hybrid instances carry no case label to verify against");
    };
    let d = oracles::decompose(&inst.stream.edge_pairs(), inst.n).map_err(|e| anyhow!("{e}"))?;
    let mut ok = true;
    let mut check = |label: &str, actual: usize, expected: usize| {
        let good = actual == expected;
        ok &= good;
        println!(
            "{label}: {actual}/{expected} {}",
            if good { "PASS" } else { "FAIL" }
        );
    };
    check("cycles", d.cycles.len(), cycle_count);
    check("cycles of target length", d.cycles_of_len(cycle_len), cycle_count);
    check("paths", d.paths.len(), path_count);
    check("paths of target length", d.paths_of_len(path_len), path_count);

    let mut deg = vec![0usize; inst.n];
    for e in inst.stream.elements() {
        deg[e.u as usize] += 1;
        deg[e.v as usize] += 1;
    }
    let endpoint_ok = inst
        .side_info
        .noise_endpoints
        .iter()
        .filter(|&&v| deg[v as usize] == 1)
        .count();
    check(
        "degree-1 noise endpoints",
        endpoint_ok,
        inst.side_info.noise_endpoints.len(),
    );
    Ok(if ok { 0 } else { 1 })
}

fn verify_reduced(red: &ReducedInstance) -> Result<i32> {
    let expected = red
        .expected_value()
        .ok_or_else(|| anyhow!("reduced instance has no source case label"))?;
    let pairs = red.stream.edge_pairs();
    let n = red.provenance.n;
    let actual = match red.problem {
        Problem::Mst => oracles::mst_weight(&red.stream.weighted_edges(), n)
            .ok_or_else(|| anyhow!("reduced graph is disconnected; no MST"))?,
        Problem::Matching => oracles::matching_size_deg2(&pairs, n).map_err(|e| anyhow!("{e}"))? as u64,
        Problem::MaxCut => oracles::maxcut_deg2(&pairs, n).map_err(|e| anyhow!("{e}"))? as u64,
        Problem::Acyclic => {
            if !red.stream.directed() {
                bail!("acyclic instance is not directed");
            }
            oracles::acyclic_size_directed(&pairs, n).map_err(|e| anyhow!("{e}"))? as u64
        }
        Problem::Connectivity => oracles::components(&pairs, n) as u64,
        Problem::Bipartite => oracles::odd_cycle_count(&pairs, n).map_err(|e| anyhow!("{e}"))? as u64,
        Problem::CycleFree => oracles::cycle_count(&pairs, n).map_err(|e| anyhow!("{e}"))? as u64,
    };
    let ok = actual == expected;
    println!(
        "{}: {actual}/{expected} {}",
        red.problem.as_str(),
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(if ok { 0 } else { 1 })
}

pub fn cmd_verify(config: &Config) -> Result<i32> {
    let input = config.require("in")?.to_string();
    config.finish()?;
    match load(&input)? {
        Loaded::Ngc(inst) => verify_ngc(&inst),
        Loaded::Reduced(red) => verify_reduced(&red),
    }
}

// ---------------------------------------------------------------------------

pub fn cmd_sweep(config: &Config) -> Result<i32> {
    let param = config.require("param")?.to_string();
    let values: Vec<f64> = config
        .require("values")?
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| anyhow!("bad value {v:?}")))
        .collect::<Result<Vec<_>>>()?;
    let n = config.usize("n")?;
    let k = config.usize("k")?;
    let p = config.usize_or("p", 1)?;
    let trials = config.u64_or("trials", 100)?;
    let master = config.u64_or("seed", 0)?;
    let out = config.get("out").map(|s| s.to_string());
    config.finish()?;
    if trials == 0 {
        bail!("sweep needs trials >= 1");
    }

    let mut csv = String::from("param,value,trials,correct,p_hat,wilson_low,wilson_high\n");
    for (point, &value) in values.iter().enumerate() {
        let (n_v, k_v, p_v, mult) = match param.as_str() {
            "rate_mult" => (n, k, p, value),
            "p" => (n, k, value as usize, 1.0),
            "k" => (n, value as usize, p, 1.0),
            other => bail!("sweep param must be rate_mult, p, or k, got {other:?}"),
        };
        let rows: Vec<TrialRow> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                run_one(
                    "sample_bfs",
                    n_v,
                    k_v,
                    p_v,
                    mult,
                    36.0,
                    None,
                    false,
                    trial_seed(master, point as u64 + 1),
                    trial,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let correct = rows.iter().filter(|r| r.correct).count() as u64;
        let interval = wilson_interval(correct, trials, 1.96);
        writeln!(
            csv,
            "{param},{value},{trials},{correct},{:.6},{:.6},{:.6}",
            interval.p_hat, interval.wilson_low, interval.wilson_high
        )
        .unwrap();
    }
    match out {
        Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {path}"))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

pub fn cmd_xor(config: &Config) -> Result<i32> {
    let mode = config.require("mode")?.to_string();
    match mode.as_str() {
        "bias" => {
            let biases: Vec<f64> = config
                .require("biases")?
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| anyhow!("bad bias {v:?}")))
                .collect::<Result<Vec<_>>>()?;
            config.finish()?;
            let spec = BiasSpec::new(biases).map_err(|e| anyhow!("{e}"))?;
            let product = xor_bias_product(&spec);
            let convolution = xor_bias_convolution(&spec);
            println!("product={product}");
            println!("convolution={convolution}");
            println!("difference={:.3e}", (product - convolution).abs());
            Ok(0)
        }
        "game" => {
            let path = config.require("file")?.to_string();
            config.finish()?;
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading game table {path}"))?;
            let game = ToyGame::from_table_str(&text).map_err(|e| anyhow!("{e}"))?;
            let report = blackboard_enumerate(&game).map_err(|e| anyhow!("{e}"))?;
            println!("boards,max_conditional_mi_bits,max_bias_residual");
            println!(
                "{},{},{}",
                report.boards, report.max_conditional_mi_bits, report.max_bias_residual
            );
            Ok(0)
        }
        "ip" => {
            let m = config.usize("m")?;
            let l = config.usize("l")?;
            config.finish()?;
            let check = ip_xor_exhaustive(m, l).map_err(|e| anyhow!("{e}"))?;
            println!("m,l,inputs,mismatches,peak_state_bits,space_bound");
            println!(
                "{m},{l},{},{},{},{}",
                check.inputs_checked,
                check.mismatches,
                check.peak_state_bits,
                m as u64 + 66
            );
            Ok(if check.mismatches == 0 { 0 } else { 1 })
        }
        other => bail!("xor mode must be bias, game, or ip, got {other:?}"),
    }
}

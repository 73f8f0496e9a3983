//! Acceptance suite: every shipped guarantee, checked end to end with one
//! printed pass/fail line per criterion. Each criterion is a pure function
//! of the master seed and returns its results as a CSV block; criterion 10
//! replays criteria 1 through 8 and demands byte-identical CSV.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::fmt::Write as _;

use gapstream::instances::{
    gen_ngc, gen_pc, to_directed, xor_product, CaseLabel, NgcInstance, PcInstance, PcLabel,
};
use gapstream::oracles::{self, decompose, exhaustive};
use gapstream::reductions::{
    reduce_acyclic, reduce_bipartite, reduce_connectivity, reduce_cyclefree, reduce_matching,
    reduce_maxcut, reduce_mst,
};
use gapstream::seeds::trial_seed;
use gapstream::solvers::{ngc_sample_bfs, sample_bfs_rate, NgcVerdict};
use gapstream::stream::{id_bits, run_on_stream};
use gapstream::xor_lab::{
    blackboard_enumerate, ip_xor_exhaustive, random_toy_game, xor_bias_convolution,
    xor_bias_product, BiasSpec,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 0x006a_7057_2026;

struct Criterion {
    name: &'static str,
    pass: bool,
    detail: String,
    csv: String,
}

// ---- criterion 1: instance validity ---------------------------------------

fn expected_inventory_holds(inst: &NgcInstance) -> bool {
    let Ok(d) = decompose(&inst.stream.edge_pairs(), inst.n) else {
        return false;
    };
    let Some((cycle_len, cycle_count, path_len, path_count)) = inst.expected_inventory() else {
        return false;
    };
    d.cycles.len() == cycle_count
        && d.cycles_of_len(cycle_len) == cycle_count
        && d.paths.len() == path_count
        && d.paths_of_len(path_len) == path_count
        && d.isolated == 0
}

fn c1_instance_validity(master: u64) -> Criterion {
    let mut csv = String::from("n,k,case,seed,ok\n");
    let mut failures = 0u64;
    let mut total = 0u64;
    for &(n, k) in &[(48usize, 4usize), (192, 8), (768, 8)] {
        for i in 0..1000u64 {
            let seed = trial_seed(master ^ 0x01, (n as u64) << 20 | i);
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = gen_ngc(n, k, case, seed).expect("valid parameters");
                let ok = expected_inventory_holds(&inst);
                total += 1;
                if !ok {
                    failures += 1;
                }
                writeln!(csv, "{n},{k},{},{seed},{}", case.as_str(), ok as u8).unwrap();
            }
        }
    }
    Criterion {
        name: "instance validity (cycle/path inventory)",
        pass: failures == 0,
        detail: format!("{failures} failures over {total} instances"),
        csv,
    }
}

// ---- criterion 2: xor product label law ------------------------------------

/// Walk the product stream itself, one matched edge per layer, without
/// consulting the matching tables. Independent of the generator's pointer
/// arithmetic.
fn stream_walk_label(inst: &PcInstance) -> PcLabel {
    let m = inst.m() as u32;
    let mut cur = inst.start as u32;
    let mut layer = 0u32;
    while (layer as usize) < inst.b() {
        let next = inst
            .stream
            .elements()
            .iter()
            .find(|e| {
                (e.u == cur && e.v / m == layer + 1) || (e.v == cur && e.u / m == layer + 1)
            })
            .map(|e| if e.u == cur { e.v } else { e.u })
            .expect("every layer vertex is matched");
        cur = next;
        layer += 1;
    }
    PcLabel::from_bit(cur % m >= m / 2)
}

fn c2_xor_product(master: u64) -> Criterion {
    let mut csv = String::from("l,b,seed,expected,walked,ok\n");
    let mut failures = 0u64;
    let mut total = 0u64;
    for l in 1usize..=3 {
        for i in 0..500u64 {
            let b = 1 + (i % 2) as usize;
            let inputs: Vec<PcInstance> = (0..l)
                .map(|r| {
                    let seed = trial_seed(master ^ 0x02, (l as u64) << 32 | i << 4 | r as u64);
                    gen_pc(4, b, seed).expect("valid parameters")
                })
                .collect();
            let product = xor_product(&inputs).expect("shared dimensions");
            let expected = inputs.iter().fold(false, |acc, g| acc ^ g.label.as_bit());
            let walked = stream_walk_label(&product);
            let ok = product.label.as_bit() == expected && walked == product.label;
            total += 1;
            if !ok {
                failures += 1;
            }
            writeln!(
                csv,
                "{l},{b},{i},{},{},{}",
                expected as u8,
                walked.as_bit() as u8,
                ok as u8
            )
            .unwrap();
        }
    }
    Criterion {
        name: "xor product label law",
        pass: failures == 0,
        detail: format!("{failures} failures over {total} products"),
        csv,
    }
}

// ---- criteria 3 and 4: sampled-ball solver and its space ------------------

fn c3_c4_solver(master: u64) -> (Criterion, Criterion) {
    let (n, k, p) = (3072usize, 8usize, 4usize);
    let q = sample_bfs_rate(n, k, p);
    let space_cap = (100.0 * q * n as f64) as u64 * (2 * p as u64 + 1) * 2 * id_bits(n) + 256;

    let mut csv = String::from("side,trial,verdict,passes,peak_bits\n");
    let mut successes = 0u64;
    let mut one_sided_violations = 0u64;
    let mut space_violations = 0u64;
    let mut pass_count_violations = 0u64;
    let mut runs = 0u64;

    for (side, case) in [("k", CaseLabel::KCycle), ("2k", CaseLabel::TwoKCycle)] {
        for trial in 0..400u64 {
            let inst_seed = trial_seed(master ^ 0x03, trial * 2 + (side == "2k") as u64 * 1000);
            let solver_seed = trial_seed(master ^ 0x04, trial * 2 + (side == "2k") as u64 * 1000);
            let inst = gen_ngc(n, k, case, inst_seed).expect("valid parameters");
            let mut solver = ngc_sample_bfs(n, k, p, solver_seed);
            let report =
                run_on_stream(&mut solver, &inst.stream, p as u32, None).expect("run completes");
            runs += 1;
            if report.peak_state_bits > space_cap {
                space_violations += 1;
            }
            if report.passes_used != p as u32 {
                pass_count_violations += 1;
            }
            match case {
                CaseLabel::KCycle => {
                    if report.output == NgcVerdict::KCycle {
                        successes += 1;
                    }
                }
                CaseLabel::TwoKCycle => {
                    if report.output == NgcVerdict::KCycle {
                        one_sided_violations += 1;
                    }
                }
            }
            writeln!(
                csv,
                "{side},{trial},{},{},{}",
                report.output.as_str(),
                report.passes_used,
                report.peak_state_bits
            )
            .unwrap();
        }
    }

    let success_rate = successes as f64 / 400.0;
    let solver_pass = (q - 0.09375).abs() < 1e-12
        && success_rate >= 2.0 / 3.0
        && one_sided_violations == 0
        && pass_count_violations == 0;
    let c3 = Criterion {
        name: "sampled-ball solver (success rate and one-sided error)",
        pass: solver_pass,
        detail: format!(
            "q={q}, success rate {success_rate:.4} (floor 0.6667), {one_sided_violations} one-sided violations"
        ),
        csv: csv.clone(),
    };
    let c4 = Criterion {
        name: "space metering stays under the sampling cap",
        pass: space_violations == 0,
        detail: format!("{space_violations} of {runs} runs exceeded {space_cap} bits"),
        csv,
    };
    (c3, c4)
}

// ---- criterion 5: reduction gaps -------------------------------------------

fn c5_reduction_gaps(master: u64) -> Criterion {
    let mut csv = String::from("problem,case,seed,expected,actual,ok\n");
    let mut failures = 0u64;
    let mut total = 0u64;

    let mut check = |problem: &str, case: CaseLabel, seed: u64, expected: u64, actual: u64| {
        let ok = expected == actual;
        total += 1;
        if !ok {
            failures += 1;
        }
        let mut row = String::new();
        writeln!(
            row,
            "{problem},{},{seed},{expected},{actual},{}",
            case.as_str(),
            ok as u8
        )
        .unwrap();
        row
    };

    for i in 0..100u64 {
        for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
            let seed = trial_seed(master ^ 0x05, i * 2 + (case == CaseLabel::TwoKCycle) as u64);

            // MST at (48, 4, W = 5): 51 vs 47.
            let inst = gen_ngc(48, 4, case, seed).unwrap();
            let red = reduce_mst(&inst, 5).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (51, 47));
            let actual = oracles::mst_weight(&red.stream.weighted_edges(), 48)
                .expect("reduced instance is connected");
            csv.push_str(&check("mst", case, seed, red.expected_value().unwrap(), actual));

            // Matching at (k = 5, t = 2): 24 vs 26.
            let inst = gapstream::instances::gen_ngc_padded(60, 5, 1, case, seed).unwrap();
            let red = reduce_matching(&inst).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (24, 26));
            let actual = oracles::matching_size_deg2(&red.stream.edge_pairs(), 60).unwrap() as u64;
            csv.push_str(&check("matching", case, seed, red.expected_value().unwrap(), actual));

            // Max cut at (k = 5, t = 2): 48 vs 52.
            let red = reduce_maxcut(&inst).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (48, 52));
            let actual = oracles::maxcut_deg2(&red.stream.edge_pairs(), 60).unwrap() as u64;
            csv.push_str(&check("maxcut", case, seed, red.expected_value().unwrap(), actual));

            // Bipartiteness at (k = 5, t = 2): 4 vs 0 odd cycles.
            let red = reduce_bipartite(&inst).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (4, 0));
            let actual = oracles::odd_cycle_count(&red.stream.edge_pairs(), 60).unwrap() as u64;
            csv.push_str(&check("bipartite", case, seed, red.expected_value().unwrap(), actual));

            // Acyclic subgraph at directed (k = 4, t = 2): 36 vs 38.
            let inst = gen_ngc(48, 4, case, seed).unwrap();
            let directed = to_directed(&inst).unwrap();
            let red = reduce_acyclic(&directed).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (36, 38));
            let actual =
                oracles::acyclic_size_directed(&red.stream.edge_pairs(), 48).unwrap() as u64;
            csv.push_str(&check("acyclic", case, seed, red.expected_value().unwrap(), actual));

            // Connectivity at (48, 4): 2 vs 1 components.
            let red = reduce_connectivity(&inst).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (2, 1));
            let actual = oracles::components(&red.stream.edge_pairs(), 48) as u64;
            csv.push_str(&check(
                "connectivity",
                case,
                seed,
                red.expected_value().unwrap(),
                actual,
            ));

            // Cycle-freeness after filtering at (48, 4): 2 vs 0 cycles.
            let red = reduce_cyclefree(&inst).unwrap();
            assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (2, 0));
            let actual = oracles::cycle_count(&red.stream.edge_pairs(), 48).unwrap() as u64;
            csv.push_str(&check("cyclefree", case, seed, red.expected_value().unwrap(), actual));
        }
    }

    Criterion {
        name: "reduction gaps match the closed forms exactly",
        pass: failures == 0,
        detail: format!("{failures} mismatches over {total} oracle evaluations"),
        csv,
    }
}

// ---- criterion 6: bias law ---------------------------------------------------

fn c6_bias_law(master: u64) -> Criterion {
    let mut csv = String::from("idx,len,product,convolution\n");
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ 0x06);
    let mut worst = 0.0f64;
    for idx in 0..200 {
        let len = rng.gen_range(1..=10);
        let biases: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        let spec = BiasSpec::new(biases).unwrap();
        let product = xor_bias_product(&spec);
        let convolved = xor_bias_convolution(&spec);
        worst = worst.max((product - convolved).abs());
        writeln!(csv, "{idx},{len},{product},{convolved}").unwrap();
    }
    Criterion {
        name: "bias of independent xor equals the product",
        pass: worst <= 1e-12,
        detail: format!("worst |product - convolution| = {worst:.3e}"),
        csv,
    }
}

// ---- criterion 7: blackboard structure ---------------------------------------

fn c7_blackboard(master: u64) -> Criterion {
    let mut csv = String::from("copies,seed,boards,mi_bits,residual\n");
    let mut worst_mi = 0.0f64;
    let mut worst_residual = 0.0f64;
    for copies in [2usize, 3] {
        for i in 0..25u64 {
            let seed = trial_seed(master ^ 0x07, (copies as u64) << 32 | i);
            let game = random_toy_game(copies, seed);
            let report = blackboard_enumerate(&game).expect("toy game is enumerable");
            worst_mi = worst_mi.max(report.max_conditional_mi_bits);
            worst_residual = worst_residual.max(report.max_bias_residual);
            writeln!(
                csv,
                "{copies},{seed},{},{},{}",
                report.boards, report.max_conditional_mi_bits, report.max_bias_residual
            )
            .unwrap();
        }
    }
    Criterion {
        name: "blackboard protocols leave inputs conditionally independent",
        pass: worst_mi <= 1e-12 && worst_residual <= 1e-12,
        detail: format!("max MI {worst_mi:.3e} bits, max bias residual {worst_residual:.3e}"),
        csv,
    }
}

// ---- criterion 8: inner-product space reuse -----------------------------------

fn c8_space_reuse(_master: u64) -> Criterion {
    let check = ip_xor_exhaustive(2, 2).expect("within exhaustive limit");
    let bound = 2 + 66;
    let pass = check.mismatches == 0
        && check.inputs_checked == 256
        && check.peak_state_bits <= bound;
    let csv = format!(
        "m,l,inputs,mismatches,peak_bits,bound\n2,2,{},{},{},{bound}\n",
        check.inputs_checked, check.mismatches, check.peak_state_bits
    );
    Criterion {
        name: "xor of inner products in single-copy space",
        pass,
        detail: format!(
            "{} inputs, {} mismatches, peak {} bits (bound {bound})",
            check.inputs_checked, check.mismatches, check.peak_state_bits
        ),
        csv,
    }
}

// ---- criterion 9: oracle soundness ---------------------------------------------

/// Orient a max-degree-2 graph consistently along its components, the same
/// convention the directed generator uses.
fn orient(edges: &[(u32, u32)], n: usize) -> Vec<(u32, u32)> {
    let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        adj[u as usize].push((v, idx));
        adj[v as usize].push((u, idx));
    }
    let mut oriented = vec![(0u32, 0u32); edges.len()];
    let mut edge_seen = vec![false; edges.len()];
    let mut vertex_seen = vec![false; n];
    let walk = |start: u32, edge_seen: &mut [bool], vertex_seen: &mut [bool],
                oriented: &mut [(u32, u32)]| {
        let mut cur = start;
        vertex_seen[cur as usize] = true;
        while let Some((next, idx)) = adj[cur as usize]
            .iter()
            .find(|&&(_, idx)| !edge_seen[idx])
            .copied()
        {
            edge_seen[idx] = true;
            oriented[idx] = (cur, next);
            cur = next;
            vertex_seen[cur as usize] = true;
        }
    };
    for v in 0..n {
        if !vertex_seen[v] && adj[v].len() == 1 {
            walk(v as u32, &mut edge_seen, &mut vertex_seen, &mut oriented);
        }
    }
    for v in 0..n {
        if !vertex_seen[v] && !adj[v].is_empty() {
            walk(v as u32, &mut edge_seen, &mut vertex_seen, &mut oriented);
        }
    }
    oriented
}

fn c9_oracle_soundness(master: u64) -> Criterion {
    let mut failures = 0u64;
    let mut graphs_checked = 0u64;
    for n in 1..=8usize {
        for g in exhaustive::max_deg2_graphs(n) {
            graphs_checked += 1;
            let ok = oracles::matching_size_deg2(&g, n).unwrap() == exhaustive::matching(&g, n)
                && oracles::maxcut_deg2(&g, n).unwrap() == exhaustive::maxcut(&g, n)
                && oracles::odd_cycle_count(&g, n).unwrap()
                    == exhaustive::distance_to_bipartite(&g, n)
                && oracles::cycle_count(&g, n).unwrap() == exhaustive::cycle_count(&g, n)
                && oracles::components(&g, n) == exhaustive::components(&g, n)
                && {
                    let directed = orient(&g, n);
                    oracles::acyclic_size_directed(&directed, n).unwrap()
                        == exhaustive::acyclic_size_directed(&directed, n)
                };
            if !ok {
                failures += 1;
            }
        }
    }

    let mut mst_failures = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ 0x09);
    let mut csv = String::from("check,count,failures\n");
    for _ in 0..100 {
        let n = rng.gen_range(2..=8usize);
        let mut edges: Vec<(u32, u32, u64)> = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.gen::<f64>() < 0.5 {
                    edges.push((u, v, rng.gen_range(1..=10u64)));
                }
            }
        }
        if edges.len() > 16 {
            edges.truncate(16);
        }
        if oracles::mst_weight(&edges, n) != exhaustive::mst_weight(&edges, n) {
            mst_failures += 1;
        }
    }
    writeln!(csv, "deg2_graphs,{graphs_checked},{failures}").unwrap();
    writeln!(csv, "mst_random,100,{mst_failures}").unwrap();

    Criterion {
        name: "closed-form oracles agree with brute force",
        pass: failures == 0 && mst_failures == 0,
        detail: format!(
            "{failures} mismatches over {graphs_checked} graphs, {mst_failures} MST mismatches over 100"
        ),
        csv,
    }
}

// ---- criterion 10: determinism ---------------------------------------------------

fn run_criteria_1_to_8(master: u64) -> Vec<Criterion> {
    let (c3, c4) = c3_c4_solver(master);
    vec![
        c1_instance_validity(master),
        c2_xor_product(master),
        c3,
        c4,
        c5_reduction_gaps(master),
        c6_bias_law(master),
        c7_blackboard(master),
        c8_space_reuse(master),
    ]
}

fn c10_determinism(master: u64, first: &[Criterion]) -> Criterion {
    let second = run_criteria_1_to_8(master);
    let mut identical = 0usize;
    for (a, b) in first.iter().zip(&second) {
        if a.csv == b.csv {
            identical += 1;
        }
    }
    Criterion {
        name: "criteria 1-8 replay to byte-identical CSV",
        pass: identical == second.len(),
        detail: format!("{identical}/{} CSV blocks identical", second.len()),
        csv: String::new(),
    }
}

#[test]
fn acceptance() {
    let mut criteria = run_criteria_1_to_8(MASTER_SEED);
    criteria.push(c9_oracle_soundness(MASTER_SEED));
    let c10 = c10_determinism(MASTER_SEED, &criteria[..8]);
    criteria.push(c10);

    let mut all_pass = true;
    for (i, c) in criteria.iter().enumerate() {
        println!(
            "criterion {:>2} [{}] {} - {}",
            i + 1,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        all_pass &= c.pass;
    }
    assert!(all_pass, "at least one acceptance criterion failed");
}

//! Stream-to-stream reductions from gap cycle counting.
//!
//! Each reduction turns a gap-cycle instance into an instance of another
//! streaming problem whose exact answer differs between the two source
//! cases by a closed-form gap. Reduction edges depend only on the side
//! information (never on the random part of the stream), are prepended to
//! the stream, and leave the original element order intact; the cycle-free
//! reduction instead filters elements with `t` bits of bookkeeping.
//!
//! Every `ReducedInstance` records both expected values so the oracles in
//! [`crate::oracles`] can confirm the gap on either case.

use std::fmt::Write as _;

use crate::instances::{CaseLabel, GenError, NgcInstance};
use crate::stream::{EdgeStream, StreamElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Mst,
    Matching,
    MaxCut,
    Acyclic,
    Connectivity,
    Bipartite,
    CycleFree,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Mst => "mst",
            Problem::Matching => "matching",
            Problem::MaxCut => "maxcut",
            Problem::Acyclic => "acyclic",
            Problem::Connectivity => "connectivity",
            Problem::Bipartite => "bipartite",
            Problem::CycleFree => "cyclefree",
        }
    }

    pub fn parse(s: &str) -> Result<Self, GenError> {
        Ok(match s {
            "mst" => Problem::Mst,
            "matching" => Problem::Matching,
            "maxcut" => Problem::MaxCut,
            "acyclic" => Problem::Acyclic,
            "connectivity" => Problem::Connectivity,
            "bipartite" => Problem::Bipartite,
            "cyclefree" => Problem::CycleFree,
            other => return Err(GenError::arg(format!("unknown problem {other:?}"))),
        })
    }
}

/// Where a reduced instance came from: the source parameters, its case label
/// when known, and the approximation parameter the gap certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    pub source_case: Option<CaseLabel>,
    pub weight_w: Option<u64>,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub stream: EdgeStream,
    pub problem: Problem,
    pub expected_value_if_k: u64,
    pub expected_value_if_2k: u64,
    pub provenance: Provenance,
}

impl ReducedInstance {
    /// The expected oracle value for the source case, when it is known.
    pub fn expected_value(&self) -> Option<u64> {
        self.provenance.source_case.map(|case| match case {
            CaseLabel::KCycle => self.expected_value_if_k,
            CaseLabel::TwoKCycle => self.expected_value_if_2k,
        })
    }
}

// Closed forms, in terms of t and k (n = 6tk). Each returns
// (value in the k-cycle case, value in the 2k-cycle case).

/// Maximum matching: `(n/2 - n/2k, n/2 - n/2k + n/6k)` for odd k.
pub fn matching_values(t: usize, k: usize) -> (u64, u64) {
    let base = 3 * t * (k - 1);
    (base as u64, (base + t) as u64)
}

/// Maximum cut: `(n - n/k, n - 2n/3k)` for odd k.
pub fn maxcut_values(t: usize, k: usize) -> (u64, u64) {
    ((6 * t * k - 6 * t) as u64, (6 * t * k - 4 * t) as u64)
}

/// Largest acyclic subgraph of the directed variant:
/// `(n - n/k, n - n/k + n/6k)`.
pub fn acyclic_values(t: usize, k: usize) -> (u64, u64) {
    ((6 * t * k - 6 * t) as u64, (6 * t * k - 5 * t) as u64)
}

/// MST weight with gap edges of weight `w`: `(n - t + (t-1)w, n - 1)`.
pub fn mst_values(n: usize, t: usize, w: u64) -> (u64, u64) {
    ((n - t) as u64 + (t - 1) as u64 * w, (n - 1) as u64)
}

fn require_side_info(inst: &NgcInstance) -> Result<(), GenError> {
    if inst.side_info.tuples.len() != inst.t
        || inst.side_info.noise_endpoints.len() != 4 * inst.t
    {
        return Err(GenError::arg(
            "instance is missing its side information (tuples and noise endpoints)",
        ));
    }
    Ok(())
}

fn provenance(inst: &NgcInstance, weight_w: Option<u64>, epsilon: f64) -> Provenance {
    Provenance {
        n: inst.n,
        k: inst.k,
        t: inst.t,
        seed: inst.seed,
        source_case: inst.case_label,
        weight_w,
        epsilon,
    }
}

fn require_odd_k(inst: &NgcInstance) -> Result<(), GenError> {
    if inst.k % 2 == 0 {
        return Err(GenError::arg(format!(
            "reduction needs odd k (pad to an odd target), got k={}",
            inst.k
        )));
    }
    Ok(())
}

/// MST reduction. Weight-1 edges tie each tuple's first cycle to the next
/// tuple's second cycle (a cyclic shift, so the weight-1 subgraph is
/// connected exactly in the 2k case) and hang four noise paths off each
/// `u1`; weight-`w` edges bridge the two cycles of each tuple, so the
/// k-cycle case must buy `t - 1` heavy edges.
pub fn reduce_mst(inst: &NgcInstance, w: u64) -> Result<ReducedInstance, GenError> {
    require_side_info(inst)?;
    if w < 2 {
        return Err(GenError::arg(format!(
            "w must be at least 2, got {w}: with w = 1 the weight gap collapses"
        )));
    }
    if inst.t < 2 {
        return Err(GenError::arg(
            "t must be at least 2 so the tuple shift moves every index",
        ));
    }
    let t = inst.t;
    let tuples = &inst.side_info.tuples;
    let noise = &inst.side_info.noise_endpoints;

    let mut elements = Vec::with_capacity(inst.stream.len() + 6 * t);
    for i in 0..t {
        let phi = (i + 1) % t;
        elements.push(StreamElement::weighted(tuples[i][0], tuples[phi][2], 1));
    }
    for tuple in tuples {
        elements.push(StreamElement::weighted(tuple[1], tuple[3], w));
    }
    for (i, tuple) in tuples.iter().enumerate() {
        for j in 0..4 {
            elements.push(StreamElement::weighted(tuple[0], noise[4 * i + j], 1));
        }
    }
    for e in inst.stream.elements() {
        elements.push(StreamElement::weighted(e.u, e.v, 1));
    }
    let stream = EdgeStream::new(inst.n, false, true, elements)?;
    let (if_k, if_2k) = mst_values(inst.n, t, w);
    let epsilon = (w - 1) as f64 / (12.0 * inst.k as f64);
    Ok(ReducedInstance {
        stream,
        problem: Problem::Mst,
        expected_value_if_k: if_k,
        expected_value_if_2k: if_2k,
        provenance: provenance(inst, Some(w), epsilon),
    })
}

/// Connectivity reduction: the MST construction without the heavy edges.
/// Component count is `t` in the k-cycle case and 1 otherwise.
pub fn reduce_connectivity(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    require_side_info(inst)?;
    if inst.t < 2 {
        return Err(GenError::arg(
            "t must be at least 2 so the tuple shift moves every index",
        ));
    }
    let t = inst.t;
    let tuples = &inst.side_info.tuples;
    let noise = &inst.side_info.noise_endpoints;
    let mut elements = Vec::with_capacity(inst.stream.len() + 5 * t);
    for i in 0..t {
        let phi = (i + 1) % t;
        elements.push(StreamElement::new(tuples[i][0], tuples[phi][2]));
    }
    for (i, tuple) in tuples.iter().enumerate() {
        for j in 0..4 {
            elements.push(StreamElement::new(tuple[0], noise[4 * i + j]));
        }
    }
    elements.extend_from_slice(inst.stream.elements());
    let stream = EdgeStream::new(inst.n, false, false, elements)?;
    Ok(ReducedInstance {
        stream,
        problem: Problem::Connectivity,
        expected_value_if_k: t as u64,
        expected_value_if_2k: 1,
        provenance: provenance(inst, None, 1.0 / (6.0 * inst.k as f64)),
    })
}

/// Matching-size reduction: the stream is unchanged, the gap comes from odd
/// cycles each losing half an edge of matching.
pub fn reduce_matching(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    require_odd_k(inst)?;
    let (if_k, if_2k) = matching_values(inst.t, inst.k);
    Ok(ReducedInstance {
        stream: inst.stream.clone(),
        problem: Problem::Matching,
        expected_value_if_k: if_k,
        expected_value_if_2k: if_2k,
        provenance: provenance(inst, None, 1.0 / (3.0 * inst.k as f64)),
    })
}

/// Max-cut reduction: odd cycles each leave one edge uncut, even cycles are
/// bipartite and cut everything.
pub fn reduce_maxcut(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    require_odd_k(inst)?;
    let (if_k, if_2k) = maxcut_values(inst.t, inst.k);
    Ok(ReducedInstance {
        stream: inst.stream.clone(),
        problem: Problem::MaxCut,
        expected_value_if_k: if_k,
        expected_value_if_2k: if_2k,
        provenance: provenance(inst, None, 1.0 / (3.0 * inst.k as f64)),
    })
}

/// Largest-acyclic-subgraph reduction over the directed variant: the value
/// is the edge count minus the number of (vertex-disjoint) directed cycles.
pub fn reduce_acyclic(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    if !inst.stream.directed() {
        return Err(GenError::arg(
            "acyclic reduction needs the directed variant of the instance",
        ));
    }
    let (if_k, if_2k) = acyclic_values(inst.t, inst.k);
    Ok(ReducedInstance {
        stream: inst.stream.clone(),
        problem: Problem::Acyclic,
        expected_value_if_k: if_k,
        expected_value_if_2k: if_2k,
        provenance: provenance(inst, None, 1.0 / (6.0 * inst.k as f64)),
    })
}

/// Bipartiteness testing: distance to bipartite is the odd-cycle count,
/// `2t` versus zero for odd k.
pub fn reduce_bipartite(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    require_odd_k(inst)?;
    Ok(ReducedInstance {
        stream: inst.stream.clone(),
        problem: Problem::Bipartite,
        expected_value_if_k: 2 * inst.t as u64,
        expected_value_if_2k: 0,
        provenance: provenance(inst, None, 1.0 / (3.0 * inst.k as f64)),
    })
}

/// Cycle-freeness testing: drop the first-seen edge incident to each
/// tuple's `u1`, which de-cycles every component containing a `u1`. The
/// k-cycle case keeps its `t` other cycles; the 2k case becomes a forest.
pub fn reduce_cyclefree(inst: &NgcInstance) -> Result<ReducedInstance, GenError> {
    require_side_info(inst)?;
    let u1: std::collections::HashMap<u32, usize> = inst
        .side_info
        .tuples
        .iter()
        .enumerate()
        .map(|(i, tuple)| (tuple[0], i))
        .collect();
    let mut dropped = vec![false; inst.t];
    let mut elements = Vec::with_capacity(inst.stream.len());
    for e in inst.stream.elements() {
        let hit = [e.u, e.v]
            .into_iter()
            .find_map(|w| u1.get(&w).copied())
            .filter(|&i| !dropped[i]);
        match hit {
            Some(i) => dropped[i] = true,
            None => elements.push(*e),
        }
    }
    let stream = EdgeStream::new(inst.n, inst.stream.directed(), false, elements)?;
    Ok(ReducedInstance {
        stream,
        problem: Problem::CycleFree,
        expected_value_if_k: inst.t as u64,
        expected_value_if_2k: 0,
        provenance: provenance(inst, None, 1.0 / (6.0 * inst.k as f64)),
    })
}

impl ReducedInstance {
    pub fn metadata_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "kind=reduced").unwrap();
        writeln!(out, "problem={}", self.problem.as_str()).unwrap();
        writeln!(out, "n={}", self.provenance.n).unwrap();
        writeln!(out, "k={}", self.provenance.k).unwrap();
        writeln!(out, "t={}", self.provenance.t).unwrap();
        writeln!(out, "seed={}", self.provenance.seed).unwrap();
        let case = self
            .provenance
            .source_case
            .map_or("unknown", |c| c.as_str());
        writeln!(out, "case={case}").unwrap();
        if let Some(w) = self.provenance.weight_w {
            writeln!(out, "W={w}").unwrap();
        }
        writeln!(out, "epsilon={}", self.provenance.epsilon).unwrap();
        writeln!(out, "expected_if_k={}", self.expected_value_if_k).unwrap();
        writeln!(out, "expected_if_2k={}", self.expected_value_if_2k).unwrap();
        out
    }

    pub fn from_parts(metadata: &str, stream: EdgeStream) -> Result<Self, GenError> {
        let mut fields = std::collections::HashMap::new();
        for line in metadata.lines().filter(|l| !l.trim().is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GenError::arg(format!("bad metadata line {line:?}")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<&String, GenError> {
            fields
                .get(key)
                .ok_or_else(|| GenError::arg(format!("metadata missing {key}")))
        };
        if get("kind")? != "reduced" {
            return Err(GenError::arg("metadata kind is not reduced"));
        }
        let num = |key: &str| -> Result<u64, GenError> {
            get(key)?
                .parse()
                .map_err(|_| GenError::arg(format!("bad numeric field {key}")))
        };
        let source_case = match get("case")?.as_str() {
            "unknown" => None,
            other => Some(CaseLabel::parse(other)?),
        };
        Ok(ReducedInstance {
            stream,
            problem: Problem::parse(get("problem")?)?,
            expected_value_if_k: num("expected_if_k")?,
            expected_value_if_2k: num("expected_if_2k")?,
            provenance: Provenance {
                n: num("n")? as usize,
                k: num("k")? as usize,
                t: num("t")? as usize,
                seed: num("seed")?,
                source_case,
                weight_w: fields.get("W").and_then(|w| w.parse().ok()),
                epsilon: get("epsilon")?
                    .parse()
                    .map_err(|_| GenError::arg("bad epsilon"))?,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_ngc, gen_ngc_padded, to_directed};
    use crate::oracles;

    fn labeled(n: usize, k: usize, case: CaseLabel, seed: u64) -> NgcInstance {
        if k % 2 == 0 {
            gen_ngc(n, k, case, seed).unwrap()
        } else {
            gen_ngc_padded(n, k, 1, case, seed).unwrap()
        }
    }

    #[test]
    fn closed_forms_match_the_small_cases() {
        assert_eq!(matching_values(2, 5), (24, 26));
        assert_eq!(matching_values(2, 3), (12, 14));
        assert_eq!(maxcut_values(2, 5), (48, 52));
        assert_eq!(acyclic_values(2, 4), (36, 38));
        assert_eq!(mst_values(48, 2, 5), (51, 47));
    }

    #[test]
    fn mst_gap_is_confirmed_by_kruskal() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = gen_ngc(48, 4, case, seed).unwrap();
                let red = reduce_mst(&inst, 5).unwrap();
                assert_eq!(red.expected_value_if_k, 51);
                assert_eq!(red.expected_value_if_2k, 47);
                let weight =
                    oracles::mst_weight(&red.stream.weighted_edges(), 48).expect("connected");
                assert_eq!(Some(weight), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn mst_rejects_degenerate_weight() {
        let inst = gen_ngc(48, 4, CaseLabel::KCycle, 0).unwrap();
        let err = reduce_mst(&inst, 1).unwrap_err();
        assert!(err.to_string().contains("at least 2"), "{err}");
    }

    #[test]
    fn mst_degree_increase_is_bounded() {
        let inst = gen_ngc(48, 4, CaseLabel::KCycle, 1).unwrap();
        let red = reduce_mst(&inst, 5).unwrap();
        let mut deg = vec![0usize; 48];
        for e in red.stream.elements() {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        assert!(
            deg.iter().all(|&d| d <= 2 + 6),
            "max degree {:?}",
            deg.iter().max()
        );
    }

    #[test]
    fn matching_gap_is_confirmed_by_the_oracle() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = labeled(60, 5, case, seed);
                let red = reduce_matching(&inst).unwrap();
                assert_eq!(
                    (red.expected_value_if_k, red.expected_value_if_2k),
                    (24, 26)
                );
                let size =
                    oracles::matching_size_deg2(&red.stream.edge_pairs(), 60).unwrap() as u64;
                assert_eq!(Some(size), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn matching_needs_odd_k() {
        let inst = gen_ngc(48, 4, CaseLabel::KCycle, 0).unwrap();
        assert!(reduce_matching(&inst).is_err());
    }

    #[test]
    fn maxcut_gap_is_confirmed_by_the_oracle() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = labeled(60, 5, case, seed);
                let red = reduce_maxcut(&inst).unwrap();
                assert_eq!(
                    (red.expected_value_if_k, red.expected_value_if_2k),
                    (48, 52)
                );
                let cut = oracles::maxcut_deg2(&red.stream.edge_pairs(), 60).unwrap() as u64;
                assert_eq!(Some(cut), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn acyclic_gap_is_confirmed_by_the_oracle() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = to_directed(&gen_ngc(48, 4, case, seed).unwrap()).unwrap();
                let red = reduce_acyclic(&inst).unwrap();
                assert_eq!(
                    (red.expected_value_if_k, red.expected_value_if_2k),
                    (36, 38)
                );
                let size =
                    oracles::acyclic_size_directed(&red.stream.edge_pairs(), 48).unwrap() as u64;
                assert_eq!(Some(size), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn acyclic_rejects_undirected_input() {
        let inst = gen_ngc(48, 4, CaseLabel::KCycle, 0).unwrap();
        assert!(reduce_acyclic(&inst).is_err());
    }

    #[test]
    fn connectivity_gap_is_confirmed_by_union_find() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = gen_ngc(48, 4, case, seed).unwrap();
                let red = reduce_connectivity(&inst).unwrap();
                assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (2, 1));
                let comps = oracles::components(&red.stream.edge_pairs(), 48) as u64;
                assert_eq!(Some(comps), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn bipartite_gap_is_confirmed_by_the_oracle() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = labeled(60, 5, case, seed);
                let red = reduce_bipartite(&inst).unwrap();
                assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (4, 0));
                let odd = oracles::odd_cycle_count(&red.stream.edge_pairs(), 60).unwrap() as u64;
                assert_eq!(Some(odd), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn cyclefree_filter_is_confirmed_by_the_oracle() {
        for seed in 0..100 {
            for case in [CaseLabel::KCycle, CaseLabel::TwoKCycle] {
                let inst = gen_ngc(48, 4, case, seed).unwrap();
                let red = reduce_cyclefree(&inst).unwrap();
                assert_eq!((red.expected_value_if_k, red.expected_value_if_2k), (2, 0));
                assert_eq!(red.stream.len(), inst.stream.len() - 2);
                let cycles = oracles::cycle_count(&red.stream.edge_pairs(), 48).unwrap() as u64;
                assert_eq!(Some(cycles), red.expected_value(), "seed {seed}");
            }
        }
    }

    #[test]
    fn reduced_metadata_round_trips() {
        let inst = gen_ngc(48, 4, CaseLabel::KCycle, 3).unwrap();
        let red = reduce_mst(&inst, 5).unwrap();
        let meta = red.metadata_string();
        let stream = EdgeStream::from_edge_list(&red.stream.to_edge_list()).unwrap();
        let back = ReducedInstance::from_parts(&meta, stream).unwrap();
        assert_eq!(back.problem, red.problem);
        assert_eq!(back.expected_value_if_k, red.expected_value_if_k);
        assert_eq!(back.expected_value_if_2k, red.expected_value_if_2k);
        assert_eq!(back.provenance, red.provenance);
        assert_eq!(back.stream, red.stream);
    }
}

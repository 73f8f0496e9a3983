//! Noisy gap cycle counting instances.
//!
//! An instance on `n = 6tk` vertices is either `2t` disjoint k-cycles plus
//! `4t` paths of length `k-1` (the noise), or `t` disjoint 2k-cycles plus the
//! same noise. It is assembled from four identical copies of a conditioned
//! layered graph `G_0` of width `3t` and depth `(k-2)/2`:
//!
//! * the first `t` first-layer slots (`S`) and a fixed equipartition `X`, `Y`
//!   of the last layer are distinguished; `G_0` is sampled uniformly
//!   conditioned on all `S`-pointers landing in `X` (k-cycle case) or all in
//!   `Y` (2k-cycle case);
//! * copies are glued by identity matchings `S1-S3`, `S2-S4`, `X1-X3`,
//!   `X2-X4`, and, crossed, `Y1-Y4`, `Y2-Y3`. The crossing is what doubles
//!   the cycle length in the `Y` case.
//!
//! The stream lists the gluing edges first (by connector type, then index),
//! then each copy's matchings from the deepest to the shallowest.
//!
//! Vertex ids are layer-major, then copy-major: slot `s` of layer `j` in
//! copy `i` has id `j*4w + i*w + s` with `w = 3t`. Vertices introduced by
//! padding are appended after these.
//!
//! Odd or otherwise infeasible `k` are reached by padding: build the largest
//! feasible even `k~ <= k`, then lengthen every cycle and noise path to the
//! target by subdividing one gluing edge per component with `k - k~` fresh
//! vertices. The result is a genuine instance for the requested `k` on
//! exactly `6tk` vertices.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{assemble_from_pointer, conditioned_pointer, GenError, LayeredGraph};
use crate::stream::{EdgeStream, StreamElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    KCycle,
    TwoKCycle,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::KCycle => "k",
            CaseLabel::TwoKCycle => "2k",
        }
    }

    pub fn parse(s: &str) -> Result<Self, GenError> {
        match s {
            "k" => Ok(CaseLabel::KCycle),
            "2k" => Ok(CaseLabel::TwoKCycle),
            other => Err(GenError::arg(format!("unknown case label {other:?}"))),
        }
    }
}

/// The information an algorithm gets for free under the hard distribution:
/// one endpoint of every noise path, and per cycle group a four-tuple
/// `(u1, u2, u3, u4)` such that `u1, u2` and `u3, u4` lie on two disjoint
/// k-cycles in the k-cycle case while all four share one 2k-cycle otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInfo {
    pub noise_endpoints: Vec<u32>,
    pub tuples: Vec<[u32; 4]>,
}

#[derive(Debug, Clone)]
pub struct NgcInstance {
    /// Actual vertex count, always `6tk`.
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// `None` for hybrid-conditioned instances, which are generally not
    /// valid gap-cycle inputs and carry no ground truth.
    pub case_label: Option<CaseLabel>,
    pub stream: EdgeStream,
    pub side_info: SideInfo,
    /// The sampled base graph, kept for auditing. Absent on instances
    /// loaded back from files.
    pub base_graph: Option<LayeredGraph>,
    /// The even cycle parameter the instance was built at before padding;
    /// equals `k` when no padding was needed.
    pub padded_from: usize,
    pub seed: u64,
    pub hybrid_pattern: Option<Vec<bool>>,
}

fn vertex_id(w: usize, copy: usize, layer: usize, slot: usize) -> u32 {
    (layer * 4 * w + copy * w + slot) as u32
}

fn check_params(n: usize, k: usize) -> Result<usize, GenError> {
    if k < 4 {
        return Err(GenError::arg(format!("k must be at least 4, got {k}")));
    }
    if k % 2 != 0 {
        return Err(GenError::arg(format!(
            "k must be even for direct generation, got {k} (use the padded generator)"
        )));
    }
    if n == 0 || n % (6 * k) != 0 {
        return Err(GenError::arg(format!(
            "n must equal 6*t*k for a positive integer t, got n={n}, k={k}"
        )));
    }
    let t = n / (6 * k);
    if t % 2 != 0 {
        return Err(GenError::arg(format!(
            "t must be even so the last layer admits an equipartition, got t={t}"
        )));
    }
    Ok(t)
}

/// Gluing edges and side information for four copies of a base graph.
fn assemble(base: &LayeredGraph, t: usize) -> (Vec<StreamElement>, SideInfo) {
    let w = base.width();
    let d = base.depth();
    let half = w / 2;
    let mut elements = Vec::new();

    // Connectors, by type then index. S-connectors come first; padding
    // relies on them occupying the first 2t stream slots.
    for v in 0..t {
        elements.push(StreamElement::new(
            vertex_id(w, 0, 0, v),
            vertex_id(w, 2, 0, v),
        ));
    }
    for v in 0..t {
        elements.push(StreamElement::new(
            vertex_id(w, 1, 0, v),
            vertex_id(w, 3, 0, v),
        ));
    }
    for x in 0..half {
        elements.push(StreamElement::new(
            vertex_id(w, 0, d, x),
            vertex_id(w, 2, d, x),
        ));
    }
    for x in 0..half {
        elements.push(StreamElement::new(
            vertex_id(w, 1, d, x),
            vertex_id(w, 3, d, x),
        ));
    }
    for y in half..w {
        elements.push(StreamElement::new(
            vertex_id(w, 0, d, y),
            vertex_id(w, 3, d, y),
        ));
    }
    for y in half..w {
        elements.push(StreamElement::new(
            vertex_id(w, 1, d, y),
            vertex_id(w, 2, d, y),
        ));
    }

    // Matching edges: per copy, deepest matching first, ascending source slot.
    for copy in 0..4 {
        for j in (0..d).rev() {
            for s in 0..w {
                elements.push(StreamElement::new(
                    vertex_id(w, copy, j, s),
                    vertex_id(w, copy, j + 1, base.matching(j)[s] as usize),
                ));
            }
        }
    }

    let noise_endpoints = (0..2)
        .flat_map(|copy| (t..w).map(move |v| (copy, v)))
        .map(|(copy, v)| vertex_id(w, copy, 0, v))
        .collect();
    let tuples = (0..t)
        .map(|v| {
            [
                vertex_id(w, 0, 0, v),
                vertex_id(w, 2, 0, v),
                vertex_id(w, 1, 0, v),
                vertex_id(w, 3, 0, v),
            ]
        })
        .collect();

    (
        elements,
        SideInfo {
            noise_endpoints,
            tuples,
        },
    )
}

/// Per-slot conditioning pattern: `pattern[i]` says whether S-slot `i`'s
/// pointer must land in `Y` (true) or `X` (false).
fn gen_conditioned(
    n: usize,
    k: usize,
    pattern: &[bool],
    seed: u64,
) -> Result<(LayeredGraph, EdgeStream, SideInfo), GenError> {
    let t = check_params(n, k)?;
    if pattern.len() != t {
        return Err(GenError::arg(format!(
            "conditioning pattern has length {}, expected t={t}",
            pattern.len()
        )));
    }
    let w = 3 * t;
    let d = (k - 2) / 2;
    let half = w / 2;
    let sources_x: Vec<usize> = (0..t).filter(|&i| !pattern[i]).collect();
    let sources_y: Vec<usize> = (0..t).filter(|&i| pattern[i]).collect();
    if sources_x.len() > half || sources_y.len() > half {
        return Err(GenError::arg(
            "conditioning pattern infeasible: more sources than target slots",
        ));
    }
    let x_set: Vec<usize> = (0..half).collect();
    let y_set: Vec<usize> = (half..w).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pointer = conditioned_pointer(w, &sources_x, &sources_y, &x_set, &y_set, &mut rng);
    let base = assemble_from_pointer(w, d, &pointer, &mut rng);
    let (elements, side_info) = assemble(&base, t);
    let stream = EdgeStream::new(n, false, false, elements)
        .expect("assembled instance is a valid stream");
    Ok((base, stream, side_info))
}

/// A seeded instance of the gap-cycle distribution: `2t` k-cycles plus noise
/// for [`CaseLabel::KCycle`], `t` 2k-cycles plus noise otherwise.
pub fn gen_ngc(n: usize, k: usize, case: CaseLabel, seed: u64) -> Result<NgcInstance, GenError> {
    let t = check_params(n, k)?;
    let pattern = vec![matches!(case, CaseLabel::TwoKCycle); t];
    let (base, stream, side_info) = gen_conditioned(n, k, &pattern, seed)?;
    Ok(NgcInstance {
        n,
        k,
        t,
        case_label: Some(case),
        stream,
        side_info,
        base_graph: Some(base),
        padded_from: k,
        seed,
        hybrid_pattern: None,
    })
}

/// A hybrid-conditioned instance: S-slot `i`'s pointer lands in `X` when
/// `pattern[i]` is false and in `Y` when true. The all-false and all-true
/// patterns reproduce [`gen_ngc`] exactly (same seed, same stream); mixed
/// patterns generally leave the gap-cycle promise and carry no case label.
pub fn gen_hybrid(
    n: usize,
    k: usize,
    pattern: &[bool],
    seed: u64,
) -> Result<NgcInstance, GenError> {
    let t = check_params(n, k)?;
    let (base, stream, side_info) = gen_conditioned(n, k, pattern, seed)?;
    let uniform = pattern.iter().all(|&b| b) || pattern.iter().all(|&b| !b);
    let case_label = if uniform && !pattern.is_empty() {
        Some(if pattern[0] {
            CaseLabel::TwoKCycle
        } else {
            CaseLabel::KCycle
        })
    } else {
        None
    };
    Ok(NgcInstance {
        n,
        k,
        t,
        case_label,
        stream,
        side_info,
        base_graph: Some(base),
        padded_from: k,
        seed,
        hybrid_pattern: Some(pattern.to_vec()),
    })
}

/// Largest even base parameter `k~ <= k` to build before padding. Prefers a
/// `k~` of the form `4 + l*(4p+8)` for a positive integer `l`; when no such
/// value fits under `k`, falls back to the largest feasible even one.
fn choose_k_tilde(k: usize, p: usize) -> usize {
    let step = 4 * p + 8;
    let mut best = None;
    let mut cand = 4 + step;
    while cand <= k {
        best = Some(cand);
        cand += step;
    }
    best.unwrap_or(if k % 2 == 0 { k } else { k - 1 })
}

/// Gap-cycle instance for an arbitrary `k >= 4` (odd values included) via
/// padding: subdivides one gluing edge of every cycle and of every noise
/// path so all component lengths hit the target exactly. Output is a valid
/// instance for `(n, k)` on exactly `n = 6tk` vertices.
pub fn gen_ngc_padded(
    n: usize,
    k: usize,
    p: usize,
    case: CaseLabel,
    seed: u64,
) -> Result<NgcInstance, GenError> {
    if k < 4 {
        return Err(GenError::arg(format!("k must be at least 4, got {k}")));
    }
    if p == 0 {
        return Err(GenError::arg("p must be at least 1"));
    }
    if n == 0 || n % (6 * k) != 0 {
        return Err(GenError::arg(format!(
            "n must equal 6*t*k for a positive integer t, got n={n}, k={k}"
        )));
    }
    let t = n / (6 * k);
    if t % 2 != 0 {
        return Err(GenError::arg(format!(
            "t must be even so the last layer admits an equipartition, got t={t}"
        )));
    }
    let k_tilde = choose_k_tilde(k, p);
    if k_tilde < 4 {
        return Err(GenError::arg(format!(
            "no feasible base parameter below k={k}"
        )));
    }
    if k_tilde == k {
        return gen_ngc(n, k, case, seed);
    }

    let base = gen_ngc(6 * t * k_tilde, k_tilde, case, seed)?;
    let inst = pad_instance(base, k);
    debug_assert_eq!(inst.n, n);
    Ok(inst)
}

/// Subdivide the gluing edges picked out by the case label so each cycle
/// gains `k - k~` vertices and each noise path does too.
fn pad_instance(base: NgcInstance, k: usize) -> NgcInstance {
    let t = base.t;
    let k_tilde = base.k;
    let extra = k - k_tilde;
    let w = 3 * t;
    let half = w / 2;
    let case = base.case_label.expect("padded instances carry a case label");

    // Last-layer slots whose pointer comes from S; the connectors there sit
    // on cycles and are handled by the S-edge subdivision instead.
    let graph = base
        .base_graph
        .as_ref()
        .expect("generated instance retains its base graph");
    let on_cycle: std::collections::HashSet<usize> = (0..t)
        .map(|v| graph.pointer_of(v).expect("slot in range"))
        .collect();

    // Connector layout in the stream: 2t S-edges, then X1X3, X2X4 (half
    // each), then Y1Y4, Y2Y3.
    let subdivide = |pos: usize| -> bool {
        if pos < 2 * t {
            return true; // S-connectors carry the cycle padding
        }
        let c = pos - 2 * t;
        if c < 2 * half {
            let slot = c % half;
            // X-connectors lie on cycles exactly in the k-cycle case.
            !(case == CaseLabel::KCycle && on_cycle.contains(&slot))
        } else if c < 2 * half + 2 * (w - half) {
            let slot = half + (c - 2 * half) % (w - half);
            !(case == CaseLabel::TwoKCycle && on_cycle.contains(&slot))
        } else {
            false // matching edges are never subdivided
        }
    };

    let mut next_id = base.n as u32;
    let mut elements = Vec::with_capacity(base.stream.len() + 6 * t * extra);
    for (pos, e) in base.stream.elements().iter().enumerate() {
        if subdivide(pos) {
            let mut prev = e.u;
            for _ in 0..extra {
                elements.push(StreamElement::new(prev, next_id));
                prev = next_id;
                next_id += 1;
            }
            elements.push(StreamElement::new(prev, e.v));
        } else {
            elements.push(*e);
        }
    }
    let n = next_id as usize;
    let stream =
        EdgeStream::new(n, false, false, elements).expect("padded instance is a valid stream");
    NgcInstance {
        n,
        k,
        t,
        case_label: Some(case),
        stream,
        side_info: base.side_info,
        base_graph: base.base_graph,
        padded_from: k_tilde,
        seed: base.seed,
        hybrid_pattern: None,
    }
}

/// Orient every component consistently, turning each cycle into a directed
/// cycle and each path into a directed path. Paths are directed away from
/// their smaller-id endpoint (the side-information endpoint); element order
/// in the stream is unchanged.
pub fn to_directed(inst: &NgcInstance) -> Result<NgcInstance, GenError> {
    if inst.stream.directed() {
        return Err(GenError::arg("instance is already directed"));
    }
    let n = inst.n;
    let elements = inst.stream.elements();
    let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
    for (idx, e) in elements.iter().enumerate() {
        adj[e.u as usize].push((e.v, idx));
        adj[e.v as usize].push((e.u, idx));
    }

    // forward[idx] = true when the element already points with the walk.
    let mut forward = vec![true; elements.len()];
    let mut edge_seen = vec![false; elements.len()];
    let mut vertex_seen = vec![false; n];

    let walk = |start: u32,
                    forward: &mut [bool],
                    edge_seen: &mut [bool],
                    vertex_seen: &mut [bool]| {
        let mut cur = start;
        vertex_seen[cur as usize] = true;
        loop {
            let step = adj[cur as usize]
                .iter()
                .find(|&&(_, idx)| !edge_seen[idx])
                .copied();
            match step {
                Some((next, idx)) => {
                    edge_seen[idx] = true;
                    forward[idx] = elements[idx].u == cur;
                    cur = next;
                    vertex_seen[cur as usize] = true;
                }
                None => break,
            }
        }
    };

    // Paths first, from their smaller-id endpoint; ids ascend so every
    // degree-1 vertex reached here is the smaller endpoint of its path.
    for v in 0..n {
        if !vertex_seen[v] && adj[v].len() == 1 {
            walk(v as u32, &mut forward, &mut edge_seen, &mut vertex_seen);
        }
    }
    for v in 0..n {
        if !vertex_seen[v] && !adj[v].is_empty() {
            walk(v as u32, &mut forward, &mut edge_seen, &mut vertex_seen);
        }
    }

    let oriented: Vec<StreamElement> = elements
        .iter()
        .zip(&forward)
        .map(|(e, &fwd)| {
            if fwd {
                *e
            } else {
                StreamElement::new(e.v, e.u)
            }
        })
        .collect();
    let stream =
        EdgeStream::new(n, true, false, oriented).expect("orientation preserves validity");
    Ok(NgcInstance {
        n: inst.n,
        k: inst.k,
        t: inst.t,
        case_label: inst.case_label,
        stream,
        side_info: inst.side_info.clone(),
        base_graph: inst.base_graph.clone(),
        padded_from: inst.padded_from,
        seed: inst.seed,
        hybrid_pattern: inst.hybrid_pattern.clone(),
    })
}

fn write_ids(out: &mut String, ids: impl Iterator<Item = u32>) {
    let mut first = true;
    for id in ids {
        if !first {
            out.push(',');
        }
        write!(out, "{id}").unwrap();
        first = false;
    }
}

impl NgcInstance {
    /// Sidecar metadata: parameters, seed, case label, and the side
    /// information as id lists. Pairs with the edge-list file to round-trip
    /// an instance.
    pub fn metadata_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "kind=ngc").unwrap();
        writeln!(out, "n={}", self.n).unwrap();
        writeln!(out, "k={}", self.k).unwrap();
        writeln!(out, "t={}", self.t).unwrap();
        writeln!(out, "k_tilde={}", self.padded_from).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        let case = match (&self.case_label, &self.hybrid_pattern) {
            (Some(c), _) => c.as_str().to_string(),
            (None, Some(_)) => "hybrid".to_string(),
            (None, None) => "unknown".to_string(),
        };
        writeln!(out, "case={case}").unwrap();
        if let Some(pattern) = &self.hybrid_pattern {
            let bits: String = pattern.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(out, "hybrid_pattern={bits}").unwrap();
        }
        writeln!(out, "directed={}", self.stream.directed() as u8).unwrap();
        out.push_str("noise_endpoints=");
        write_ids(&mut out, self.side_info.noise_endpoints.iter().copied());
        out.push('\n');
        out.push_str("tuples=");
        let mut first = true;
        for tuple in &self.side_info.tuples {
            if !first {
                out.push(',');
            }
            write!(out, "{}:{}:{}:{}", tuple[0], tuple[1], tuple[2], tuple[3]).unwrap();
            first = false;
        }
        out.push('\n');
        out
    }

    /// Rebuild an instance from its metadata sidecar and edge-list stream.
    /// The base graph is not stored and stays absent.
    pub fn from_parts(metadata: &str, stream: EdgeStream) -> Result<NgcInstance, GenError> {
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
        let num = |key: &str| -> Result<usize, GenError> {
            get(key)?
                .parse()
                .map_err(|_| GenError::arg(format!("bad numeric field {key}")))
        };
        if get("kind")? != "ngc" {
            return Err(GenError::arg("metadata kind is not ngc"));
        }
        let n = num("n")?;
        if n != stream.n() {
            return Err(GenError::arg(format!(
                "metadata n={n} disagrees with stream n={}",
                stream.n()
            )));
        }
        let case_field = get("case")?.clone();
        let (case_label, hybrid_pattern) = match case_field.as_str() {
            "hybrid" => {
                let bits = get("hybrid_pattern")?;
                let pattern: Vec<bool> = bits.chars().map(|c| c == '1').collect();
                (None, Some(pattern))
            }
            other => (Some(CaseLabel::parse(other)?), None),
        };
        let parse_ids = |s: &str| -> Result<Vec<u32>, GenError> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|x| {
                    x.parse()
                        .map_err(|_| GenError::arg(format!("bad id {x:?}")))
                })
                .collect()
        };
        let noise_endpoints = parse_ids(get("noise_endpoints")?)?;
        let mut tuples = Vec::new();
        let tuple_field = get("tuples")?;
        if !tuple_field.is_empty() {
            for item in tuple_field.split(',') {
                let ids: Vec<u32> = item
                    .split(':')
                    .map(|x| {
                        x.parse()
                            .map_err(|_| GenError::arg(format!("bad tuple id {x:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                if ids.len() != 4 {
                    return Err(GenError::arg("tuples must have four entries"));
                }
                tuples.push([ids[0], ids[1], ids[2], ids[3]]);
            }
        }
        Ok(NgcInstance {
            n,
            k: num("k")?,
            t: num("t")?,
            case_label,
            stream,
            side_info: SideInfo {
                noise_endpoints,
                tuples,
            },
            base_graph: None,
            padded_from: num("k_tilde")?,
            seed: num("seed")? as u64,
            hybrid_pattern,
        })
    }

    /// Expected component inventory for the instance's case: cycle length,
    /// cycle count, path length (edges), path count.
    pub fn expected_inventory(&self) -> Option<(usize, usize, usize, usize)> {
        self.case_label.map(|case| match case {
            CaseLabel::KCycle => (self.k, 2 * self.t, self.k - 1, 4 * self.t),
            CaseLabel::TwoKCycle => (2 * self.k, self.t, self.k - 1, 4 * self.t),
        })
    }
}

//! The streaming-algorithm contract and its metered runner.
//!
//! An algorithm consumes a stream one element at a time and may do unbounded
//! work *while* handling an element; what is budgeted is the state it
//! persists between two consecutive elements (and across passes). The runner
//! replays the stream for a fixed number of passes, serializes the persisted
//! state after every element under a canonical bit encoding, and reports the
//! peak.
//!
//! Canonical encoding, fixed so space numbers are comparable across
//! algorithms: a vertex id costs `ceil(log2 n)` bits, an edge twice that, a
//! counter 64 bits, a boolean 1 bit. Integers from other bounded domains cost
//! `ceil(log2 domain)` bits.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "space limit exceeded in pass {pass}: {state_bits} bits persisted, limit {limit_bits}"
    )]
    SpaceLimitExceeded {
        pass: u32,
        element_index: usize,
        state_bits: u64,
        limit_bits: u64,
    },
    #[error("malformed edge-list input: {0}")]
    MalformedInput(String),
}

/// One stream element: an edge, optionally weighted. Direction is a property
/// of the owning stream, not of the element; for directed streams the edge
/// points `u -> v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamElement {
    pub u: u32,
    pub v: u32,
    pub weight: Option<u64>,
}

impl StreamElement {
    pub fn new(u: u32, v: u32) -> Self {
        StreamElement { u, v, weight: None }
    }

    pub fn weighted(u: u32, v: u32, w: u64) -> Self {
        StreamElement {
            u,
            v,
            weight: Some(w),
        }
    }

    /// Endpoints in ascending order, for order-insensitive comparisons on
    /// undirected streams.
    pub fn key(&self) -> (u32, u32) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// An ordered edge stream over `n` labeled vertices. The element order is
/// fixed at construction and never changes afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStream {
    n: usize,
    directed: bool,
    weighted: bool,
    elements: Vec<StreamElement>,
}

impl EdgeStream {
    pub fn new(
        n: usize,
        directed: bool,
        weighted: bool,
        elements: Vec<StreamElement>,
    ) -> Result<Self, StreamError> {
        for (i, e) in elements.iter().enumerate() {
            if e.u as usize >= n || e.v as usize >= n {
                return Err(StreamError::InvalidArgument(format!(
                    "element {i}: endpoint out of range for n={n}"
                )));
            }
            if e.u == e.v {
                return Err(StreamError::InvalidArgument(format!(
                    "element {i}: self-loop at vertex {}",
                    e.u
                )));
            }
            if e.weight.is_some() != weighted {
                return Err(StreamError::InvalidArgument(format!(
                    "element {i}: weight presence disagrees with weighted={weighted}"
                )));
            }
            if let Some(0) = e.weight {
                return Err(StreamError::InvalidArgument(format!(
                    "element {i}: weights must be positive"
                )));
            }
        }
        Ok(EdgeStream {
            n,
            directed,
            weighted,
            elements,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[StreamElement] {
        &self.elements
    }

    /// Unweighted edge pairs, for the oracles.
    pub fn edge_pairs(&self) -> Vec<(u32, u32)> {
        self.elements.iter().map(|e| (e.u, e.v)).collect()
    }

    /// Weighted triples; missing weights default to 1.
    pub fn weighted_edges(&self) -> Vec<(u32, u32, u64)> {
        self.elements
            .iter()
            .map(|e| (e.u, e.v, e.weight.unwrap_or(1)))
            .collect()
    }

    /// Edge-list file format. First line `n m directed={0|1} weighted={0|1}`,
    /// then one `u v [w]` line per element in stream order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} {} directed={} weighted={}",
            self.n,
            self.elements.len(),
            self.directed as u8,
            self.weighted as u8
        )
        .unwrap();
        for e in &self.elements {
            match e.weight {
                Some(w) => writeln!(out, "{} {} {}", e.u, e.v, w).unwrap(),
                None => writeln!(out, "{} {}", e.u, e.v).unwrap(),
            }
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self, StreamError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| StreamError::MalformedInput("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(StreamError::MalformedInput(format!(
                "header needs 4 fields, got {}",
                fields.len()
            )));
        }
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T, StreamError> {
            s.parse()
                .map_err(|_| StreamError::MalformedInput(format!("bad {what}: {s}")))
        }
        fn flag(s: &str, name: &str) -> Result<bool, StreamError> {
            match s.strip_prefix(&format!("{name}=")) {
                Some("0") => Ok(false),
                Some("1") => Ok(true),
                _ => Err(StreamError::MalformedInput(format!(
                    "expected {name}=0|1, got {s}"
                ))),
            }
        }
        let n: usize = num(fields[0], "vertex count")?;
        let m: usize = num(fields[1], "edge count")?;
        let directed = flag(fields[2], "directed")?;
        let weighted = flag(fields[3], "weighted")?;
        let mut elements = Vec::with_capacity(m);
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let expect = if weighted { 3 } else { 2 };
            if f.len() != expect {
                return Err(StreamError::MalformedInput(format!(
                    "edge line needs {expect} fields: {line}"
                )));
            }
            let u: u32 = num(f[0], "endpoint")?;
            let v: u32 = num(f[1], "endpoint")?;
            let weight = if weighted {
                Some(num::<u64>(f[2], "weight")?)
            } else {
                None
            };
            elements.push(StreamElement { u, v, weight });
        }
        if elements.len() != m {
            return Err(StreamError::MalformedInput(format!(
                "header says {m} edges, found {}",
                elements.len()
            )));
        }
        EdgeStream::new(n, directed, weighted, elements)
    }
}

/// Bits needed to name one value out of `domain` many.
pub fn id_bits(domain: usize) -> u64 {
    if domain <= 1 {
        0
    } else {
        (usize::BITS - (domain - 1).leading_zeros()) as u64
    }
}

/// Inventory of an algorithm's persisted state under the canonical encoding.
/// Built fresh on every query; the runner turns it into a bit count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StateLayout {
    bits: u64,
}

impl StateLayout {
    pub fn new() -> Self {
        StateLayout::default()
    }

    pub fn vertex_ids(mut self, count: u64, n: usize) -> Self {
        self.bits += count * id_bits(n);
        self
    }

    pub fn edges(mut self, count: u64, n: usize) -> Self {
        self.bits += count * 2 * id_bits(n);
        self
    }

    pub fn counters(mut self, count: u64) -> Self {
        self.bits += count * 64;
        self
    }

    pub fn booleans(mut self, count: u64) -> Self {
        self.bits += count;
        self
    }

    /// Integers from a bounded domain, `ceil(log2 domain)` bits each.
    pub fn bounded_ints(mut self, count: u64, domain: usize) -> Self {
        self.bits += count * id_bits(domain);
        self
    }

    pub fn total_bits(&self) -> u64 {
        self.bits
    }
}

/// Total persisted bits of a state inventory. Deterministic for equal states.
pub fn serialize_state_bits(layout: &StateLayout) -> u64 {
    layout.total_bits()
}

/// A multi-pass streaming algorithm. The runner drives the hooks in order:
/// `begin_pass`, `process_element` per element, `end_pass`, repeated for each
/// pass, then `finish` once. `state` must describe everything the algorithm
/// carries from one element to the next.
pub trait StreamAlgorithm<E> {
    type Output;

    fn begin_pass(&mut self, _pass: u32) {}

    fn process_element(&mut self, element: &E);

    fn end_pass(&mut self, _pass: u32) {}

    /// Inventory of the state persisted between elements, at this moment.
    fn state(&self) -> StateLayout;

    /// True once the algorithm has given up on its own (e.g. a sampling
    /// cutoff). It still sees the remaining stream; it just reports failure.
    fn self_terminated(&self) -> bool {
        false
    }

    fn finish(&mut self) -> Self::Output;
}

/// Outcome of one metered run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport<O> {
    pub passes_used: u32,
    pub peak_state_bits: u64,
    pub output: O,
    pub failed: bool,
}

/// Drive `algo` over `elements` for exactly `pass_budget` passes, metering
/// persisted state at every element boundary (and at pass boundaries). If
/// `space_limit_bits` is set and the persisted state ever exceeds it, the run
/// aborts with [`StreamError::SpaceLimitExceeded`] rather than returning an
/// answer.
pub fn run_streaming<E, A: StreamAlgorithm<E>>(
    algo: &mut A,
    elements: &[E],
    pass_budget: u32,
    space_limit_bits: Option<u64>,
) -> Result<RunReport<A::Output>, StreamError> {
    if pass_budget == 0 {
        return Err(StreamError::InvalidArgument(
            "pass_budget must be at least 1".into(),
        ));
    }
    let mut peak = algo.state().total_bits();
    let check = |bits: u64, pass: u32, element_index: usize| -> Result<(), StreamError> {
        if let Some(limit) = space_limit_bits {
            if bits > limit {
                return Err(StreamError::SpaceLimitExceeded {
                    pass,
                    element_index,
                    state_bits: bits,
                    limit_bits: limit,
                });
            }
        }
        Ok(())
    };
    check(peak, 0, 0)?;
    for pass in 1..=pass_budget {
        algo.begin_pass(pass);
        for (i, e) in elements.iter().enumerate() {
            algo.process_element(e);
            let bits = algo.state().total_bits();
            peak = peak.max(bits);
            check(bits, pass, i)?;
        }
        algo.end_pass(pass);
        let bits = algo.state().total_bits();
        peak = peak.max(bits);
        check(bits, pass, elements.len())?;
    }
    let failed = algo.self_terminated();
    Ok(RunReport {
        passes_used: pass_budget,
        peak_state_bits: peak,
        output: algo.finish(),
        failed,
    })
}

/// Convenience wrapper for edge streams.
pub fn run_on_stream<A: StreamAlgorithm<StreamElement>>(
    algo: &mut A,
    stream: &EdgeStream,
    pass_budget: u32,
    space_limit_bits: Option<u64>,
) -> Result<RunReport<A::Output>, StreamError> {
    run_streaming(algo, stream.elements(), pass_budget, space_limit_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ConstantState {
        ids: u64,
        n: usize,
    }

    impl StreamAlgorithm<StreamElement> for ConstantState {
        type Output = u64;
        fn process_element(&mut self, _e: &StreamElement) {}
        fn state(&self) -> StateLayout {
            StateLayout::new().vertex_ids(self.ids, self.n)
        }
        fn finish(&mut self) -> u64 {
            42
        }
    }

    struct StoreEverything {
        edges: Vec<(u32, u32)>,
        n: usize,
    }

    impl StreamAlgorithm<StreamElement> for StoreEverything {
        type Output = usize;
        fn process_element(&mut self, e: &StreamElement) {
            self.edges.push((e.u, e.v));
        }
        fn state(&self) -> StateLayout {
            StateLayout::new().edges(self.edges.len() as u64, self.n)
        }
        fn finish(&mut self) -> usize {
            self.edges.len()
        }
    }

    fn toy_stream(n: usize, m: usize) -> EdgeStream {
        let elements = (0..m)
            .map(|i| StreamElement::new((i % n) as u32, ((i + 1) % n) as u32))
            .collect();
        EdgeStream::new(n, false, false, elements).unwrap()
    }

    #[test]
    fn id_bits_examples() {
        assert_eq!(id_bits(48), 6);
        assert_eq!(id_bits(1024), 10);
        assert_eq!(id_bits(1), 0);
        assert_eq!(id_bits(2), 1);
    }

    #[test]
    fn canonical_encoding_examples() {
        assert_eq!(serialize_state_bits(&StateLayout::new()), 0);
        assert_eq!(
            serialize_state_bits(&StateLayout::new().vertex_ids(1, 48)),
            6
        );
        assert_eq!(
            serialize_state_bits(&StateLayout::new().edges(3, 1024).counters(1)),
            3 * 20 + 64
        );
    }

    #[test]
    fn constant_algorithm_state_never_grows() {
        let stream = toy_stream(48, 10);
        let mut algo = ConstantState { ids: 2, n: 48 };
        let report = run_on_stream(&mut algo, &stream, 1, None).unwrap();
        assert_eq!(report.passes_used, 1);
        assert_eq!(report.peak_state_bits, 2 * 6);
        assert_eq!(report.output, 42);
        assert!(!report.failed);
    }

    #[test]
    fn store_everything_is_bounded_below_by_encoding() {
        let stream = toy_stream(48, 40);
        let mut algo = StoreEverything {
            edges: Vec::new(),
            n: 48,
        };
        let report = run_on_stream(&mut algo, &stream, 1, None).unwrap();
        assert!(report.peak_state_bits >= 40 * 2 * 6);
    }

    #[test]
    fn zero_pass_budget_is_an_argument_error() {
        let stream = toy_stream(4, 2);
        let mut algo = ConstantState { ids: 0, n: 4 };
        assert!(matches!(
            run_on_stream(&mut algo, &stream, 0, None),
            Err(StreamError::InvalidArgument(_))
        ));
    }

    #[test]
    fn space_limit_aborts_with_distinct_verdict() {
        let stream = toy_stream(48, 40);
        let mut algo = StoreEverything {
            edges: Vec::new(),
            n: 48,
        };
        let err = run_on_stream(&mut algo, &stream, 1, Some(100)).unwrap_err();
        assert!(matches!(err, StreamError::SpaceLimitExceeded { .. }));
    }

    #[test]
    fn multi_pass_sees_stream_repeatedly() {
        let stream = toy_stream(8, 5);
        let mut algo = StoreEverything {
            edges: Vec::new(),
            n: 8,
        };
        let report = run_on_stream(&mut algo, &stream, 3, None).unwrap();
        assert_eq!(report.passes_used, 3);
        assert_eq!(report.output, 15);
    }

    #[test]
    fn stream_rejects_self_loops_and_range_errors() {
        assert!(EdgeStream::new(4, false, false, vec![StreamElement::new(1, 1)]).is_err());
        assert!(EdgeStream::new(4, false, false, vec![StreamElement::new(0, 4)]).is_err());
        assert!(EdgeStream::new(4, false, true, vec![StreamElement::new(0, 1)]).is_err());
        assert!(
            EdgeStream::new(4, false, false, vec![StreamElement::weighted(0, 1, 3)]).is_err()
        );
    }

    #[test]
    fn edge_list_round_trip() {
        let stream = EdgeStream::new(
            6,
            true,
            true,
            vec![
                StreamElement::weighted(0, 1, 5),
                StreamElement::weighted(4, 2, 1),
            ],
        )
        .unwrap();
        let text = stream.to_edge_list();
        let back = EdgeStream::from_edge_list(&text).unwrap();
        assert_eq!(stream, back);
        assert_eq!(text, back.to_edge_list());

        let unweighted = toy_stream(5, 4);
        let back = EdgeStream::from_edge_list(&unweighted.to_edge_list()).unwrap();
        assert_eq!(unweighted, back);
    }
}

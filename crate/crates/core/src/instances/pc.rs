//! Pointer-chasing instances and their XOR product.
//!
//! A `PcInstance` is a layered graph of width `m` and depth `b` streamed in
//! reverse depth order, so that a space-starved algorithm can advance its
//! pointer by only about one matching per pass. The question is whether the
//! start vertex's pointer lands in the first half (`X`) or the second half
//! (`Y`) of the last layer.
//!
//! Vertex ids are layer-major: slot `s` of layer `j` has id `j * m + s`.

use super::{gen_layered, GenError, LayeredGraph};
use crate::stream::{EdgeStream, StreamElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcLabel {
    X,
    Y,
}

impl PcLabel {
    pub fn as_bit(self) -> bool {
        matches!(self, PcLabel::Y)
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            PcLabel::Y
        } else {
            PcLabel::X
        }
    }
}

/// A pointer-chasing instance. `X` is always the lexicographically first
/// half of the last layer (slots `0..m/2`), `Y` the rest, and the start
/// vertex is slot 0 of layer 0.
#[derive(Debug, Clone)]
pub struct PcInstance {
    pub graph: LayeredGraph,
    pub start: usize,
    pub stream: EdgeStream,
    pub label: PcLabel,
}

impl PcInstance {
    pub fn m(&self) -> usize {
        self.graph.width()
    }

    pub fn b(&self) -> usize {
        self.graph.depth()
    }

    pub fn vertex_id(&self, layer: usize, slot: usize) -> u32 {
        (layer * self.m() + slot) as u32
    }
}

/// Stream a layered graph in reverse depth order: the matching into the last
/// layer first, each matching listed by ascending source slot.
fn reversed_stream(graph: &LayeredGraph) -> EdgeStream {
    let m = graph.width();
    let mut elements = Vec::with_capacity(m * graph.depth());
    for j in (0..graph.depth()).rev() {
        for s in 0..m {
            let u = (j * m + s) as u32;
            let v = ((j + 1) * m + graph.matching(j)[s] as usize) as u32;
            elements.push(StreamElement::new(u, v));
        }
    }
    EdgeStream::new(graph.total_vertices(), false, false, elements)
        .expect("layered graph stream is well formed")
}

fn label_of(graph: &LayeredGraph, start: usize) -> PcLabel {
    let target = graph.pointer_of(start).expect("start in range");
    PcLabel::from_bit(target >= graph.width() / 2)
}

/// A uniformly random pointer-chasing instance with start slot 0.
pub fn gen_pc(m: usize, b: usize, seed: u64) -> Result<PcInstance, GenError> {
    if m < 2 || m % 2 != 0 {
        return Err(GenError::arg(format!(
            "m must be even and at least 2 for an equipartition, got {m}"
        )));
    }
    if b == 0 {
        return Err(GenError::arg("b must be at least 1"));
    }
    let graph = gen_layered(m, b, seed)?;
    let stream = reversed_stream(&graph);
    let label = label_of(&graph, 0);
    Ok(PcInstance {
        graph,
        start: 0,
        stream,
        label,
    })
}

/// XOR product of pointer-chasing instances over the same dimensions.
///
/// Each input is replicated into four copies arranged so the product's
/// pointer walk traverses every input once; whether the walk exits a block
/// through its third or fourth copy flips exactly when that input's answer
/// is `Y`. The product is itself a pointer-chasing instance of width `2w`
/// and depth `l * (2b + 1) + l - 1`, and its label is the XOR of the input
/// labels.
pub fn xor_product(inputs: &[PcInstance]) -> Result<PcInstance, GenError> {
    let l = inputs.len();
    if l == 0 {
        return Err(GenError::arg("xor product needs at least one instance"));
    }
    let w = inputs[0].m();
    let b = inputs[0].b();
    for (r, inst) in inputs.iter().enumerate() {
        if inst.m() != w || inst.b() != b {
            return Err(GenError::arg(format!(
                "instance {r} has dimensions ({}, {}), expected ({w}, {b})",
                inst.m(),
                inst.b()
            )));
        }
        if inst.start != 0 {
            return Err(GenError::arg(format!(
                "instance {r} has start {}, inputs must share start 0",
                inst.start
            )));
        }
    }

    let half = w / 2;
    let width = 2 * w;
    let mut matchings: Vec<Vec<u32>> = Vec::with_capacity(l * (2 * b + 1) + l - 1);
    for (r, inst) in inputs.iter().enumerate() {
        // Copies 1 (top half) and 2 (bottom half), forward through the block.
        for j in 0..b {
            let m_j = inst.graph.matching(j);
            let mut pm = vec![0u32; width];
            for s in 0..w {
                pm[s] = m_j[s];
                pm[w + s] = w as u32 + m_j[s];
            }
            matchings.push(pm);
        }
        // The crossing: X-slots stay in their half, Y-slots swap halves.
        let mut cross = vec![0u32; width];
        for s in 0..w {
            if s < half {
                cross[s] = s as u32;
                cross[w + s] = (w + s) as u32;
            } else {
                cross[s] = (w + s) as u32;
                cross[w + s] = s as u32;
            }
        }
        matchings.push(cross);
        // Copies 3 (top) and 4 (bottom), traversed back toward their first
        // layer, so each matching is the inverse of the original.
        for j in (0..b).rev() {
            let m_j = inst.graph.matching(j);
            let mut pm = vec![0u32; width];
            for s in 0..w {
                pm[m_j[s] as usize] = s as u32;
                pm[w + m_j[s] as usize] = (w + s) as u32;
            }
            matchings.push(pm);
        }
        // Identity matching into the next block.
        if r + 1 < l {
            matchings.push((0..width as u32).collect());
        }
    }

    let graph = LayeredGraph::from_matchings(width, matchings)?;
    let stream = reversed_stream(&graph);
    let label = label_of(&graph, 0);
    Ok(PcInstance {
        graph,
        start: 0,
        stream,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walk the emitted stream the way a chasing algorithm would see it:
    /// repeatedly scan the elements in order, advancing across the unique
    /// edge incident to the current vertex that moves one layer up. This is
    /// independent of the matching tables.
    pub(crate) fn stream_walk_label(inst: &PcInstance) -> PcLabel {
        let m = inst.m() as u32;
        let mut cur = inst.start as u32; // layer 0 id
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
                .expect("matched edge exists");
            cur = next;
            layer += 1;
        }
        PcLabel::from_bit(cur % m >= m / 2)
    }

    #[test]
    fn gen_pc_rejects_bad_dimensions() {
        assert!(gen_pc(5, 2, 0).is_err());
        assert!(gen_pc(0, 2, 0).is_err());
        assert!(gen_pc(4, 0, 0).is_err());
    }

    #[test]
    fn identity_matchings_give_an_x_instance() {
        let graph = LayeredGraph::from_matchings(
            6,
            (0..4).map(|_| (0..6u32).collect()).collect(),
        )
        .unwrap();
        let stream = reversed_stream(&graph);
        let label = label_of(&graph, 0);
        let inst = PcInstance {
            graph,
            start: 0,
            stream,
            label,
        };
        assert_eq!(inst.label, PcLabel::X);
        assert_eq!(stream_walk_label(&inst), PcLabel::X);
    }

    #[test]
    fn pc_fig_shape_m6_b4() {
        let inst = gen_pc(6, 4, 11).unwrap();
        assert_eq!(inst.stream.len(), 6 * 4);
        assert_eq!(inst.stream.n(), 30);
        // First streamed matching is the deepest one.
        let first = inst.stream.elements()[0];
        assert_eq!(first.u / 6, 3);
        assert_eq!(first.v / 6, 4);
    }

    #[test]
    fn labels_match_stream_walk_on_many_seeds() {
        for seed in 0..500 {
            let inst = gen_pc(6, 4, seed).unwrap();
            assert_eq!(inst.label, stream_walk_label(&inst), "seed {seed}");
        }
    }

    #[test]
    fn xor_product_dimensions() {
        let (l, b) = (2usize, 1usize);
        let gs: Vec<PcInstance> = (0..l).map(|s| gen_pc(6, b, s as u64).unwrap()).collect();
        let h = xor_product(&gs).unwrap();
        assert_eq!(h.m(), 12);
        assert_eq!(h.b(), l * (2 * b + 1) + l - 1);
    }

    #[test]
    fn xor_product_of_one_preserves_the_label() {
        for seed in 0..50 {
            let g = gen_pc(4, 2, seed).unwrap();
            let h = xor_product(std::slice::from_ref(&g)).unwrap();
            assert_eq!(h.label, g.label, "seed {seed}");
        }
    }

    #[test]
    fn xor_product_label_is_xor_of_input_labels() {
        for seed in 0..200 {
            let gs: Vec<PcInstance> = (0..3)
                .map(|r| gen_pc(4, 2, seed * 31 + r).unwrap())
                .collect();
            let h = xor_product(&gs).unwrap();
            let expect = gs
                .iter()
                .fold(false, |acc, g| acc ^ g.label.as_bit());
            assert_eq!(h.label.as_bit(), expect, "seed {seed}");
            assert_eq!(stream_walk_label(&h), h.label, "seed {seed}");
        }
    }

    #[test]
    fn xor_product_rejects_dimension_mismatch() {
        let a = gen_pc(4, 2, 0).unwrap();
        let b = gen_pc(6, 2, 0).unwrap();
        assert!(xor_product(&[a, b]).is_err());
    }
}

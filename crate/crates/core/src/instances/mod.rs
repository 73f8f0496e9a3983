//! Generators for the hard-instance families.
//!
//! Everything is built out of layered graphs: `d + 1` equal-width vertex
//! layers joined by `d` perfect matchings, so that each first-layer vertex
//! reaches a unique last-layer vertex (its pointer). Pointer-chasing
//! instances stream the matchings in reverse depth order; gap-cycle
//! instances glue four conditioned copies of a layered graph into cycles
//! plus path noise.
//!
//! All generators are pure functions of their parameters and a seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

mod ngc;
mod pc;

pub use ngc::{
    gen_hybrid, gen_ngc, gen_ngc_padded, to_directed, CaseLabel, NgcInstance, SideInfo,
};
pub use pc::{gen_pc, xor_product, PcInstance, PcLabel};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl GenError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        GenError::InvalidArgument(msg.into())
    }
}

impl From<crate::stream::StreamError> for GenError {
    fn from(err: crate::stream::StreamError) -> Self {
        GenError::InvalidArgument(err.to_string())
    }
}

/// A width-`w`, depth-`d` stack of perfect matchings. Layers are indexed
/// `0..=d`, each holding `w` slots; `matchings[j][s]` is the layer-`j+1`
/// slot matched to slot `s` of layer `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredGraph {
    width: usize,
    matchings: Vec<Vec<u32>>,
}

impl LayeredGraph {
    pub fn from_matchings(width: usize, matchings: Vec<Vec<u32>>) -> Result<Self, GenError> {
        if width == 0 {
            return Err(GenError::arg("width must be at least 1"));
        }
        if matchings.is_empty() {
            return Err(GenError::arg("depth must be at least 1"));
        }
        for (j, m) in matchings.iter().enumerate() {
            if m.len() != width {
                return Err(GenError::arg(format!(
                    "matching {j} has {} entries, expected width {width}",
                    m.len()
                )));
            }
            let mut seen = vec![false; width];
            for &target in m {
                if target as usize >= width || seen[target as usize] {
                    return Err(GenError::arg(format!(
                        "matching {j} is not a permutation of 0..{width}"
                    )));
                }
                seen[target as usize] = true;
            }
        }
        Ok(LayeredGraph { width, matchings })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.matchings.len()
    }

    pub fn total_vertices(&self) -> usize {
        self.width * (self.depth() + 1)
    }

    pub fn matching(&self, j: usize) -> &[u32] {
        &self.matchings[j]
    }

    /// The unique last-layer slot reachable from first-layer slot `v`.
    pub fn pointer_of(&self, v: usize) -> Result<usize, GenError> {
        if v >= self.width {
            return Err(GenError::arg(format!(
                "slot {v} out of range for width {}",
                self.width
            )));
        }
        let mut cur = v;
        for m in &self.matchings {
            cur = m[cur] as usize;
        }
        Ok(cur)
    }

    /// Composition of all matchings, as a permutation of `0..width`.
    pub fn pointer_permutation(&self) -> Vec<u32> {
        (0..self.width)
            .map(|v| self.pointer_of(v).unwrap() as u32)
            .collect()
    }
}

pub(crate) fn uniform_permutation(w: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..w as u32).collect();
    perm.shuffle(rng);
    perm
}

/// Uniformly random layered graph: each matching an independent uniform
/// permutation. Deterministic per seed.
pub fn gen_layered(w: usize, d: usize, seed: u64) -> Result<LayeredGraph, GenError> {
    if w == 0 {
        return Err(GenError::arg("width must be at least 1"));
    }
    if d == 0 {
        return Err(GenError::arg("depth must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matchings = (0..d).map(|_| uniform_permutation(w, &mut rng)).collect();
    Ok(LayeredGraph {
        width: w,
        matchings,
    })
}

/// Draw a pointer permutation uniformly among those sending every slot in
/// `sources_x` into `x_set` and every slot in `sources_y` into `y_set`.
pub(crate) fn conditioned_pointer(
    w: usize,
    sources_x: &[usize],
    sources_y: &[usize],
    x_set: &[usize],
    y_set: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<u32> {
    debug_assert!(sources_x.len() <= x_set.len());
    debug_assert!(sources_y.len() <= y_set.len());
    let mut pool_x = x_set.to_vec();
    pool_x.shuffle(rng);
    let mut pool_y = y_set.to_vec();
    pool_y.shuffle(rng);

    let mut pointer = vec![u32::MAX; w];
    let mut taken = vec![false; w];
    for (i, &s) in sources_x.iter().enumerate() {
        pointer[s] = pool_x[i] as u32;
        taken[pool_x[i]] = true;
    }
    for (i, &s) in sources_y.iter().enumerate() {
        pointer[s] = pool_y[i] as u32;
        taken[pool_y[i]] = true;
    }
    let mut rest: Vec<u32> = (0..w as u32).filter(|&v| !taken[v as usize]).collect();
    rest.shuffle(rng);
    let mut free = rest.into_iter();
    for slot in pointer.iter_mut() {
        if *slot == u32::MAX {
            *slot = free.next().expect("pool exhausted");
        }
    }
    pointer
}

/// Assemble a layered graph from a prescribed pointer permutation and
/// uniformly drawn prefix matchings: the last matching is solved for as
/// `pointer . prefix^{-1}`. For a fixed prefix this map is a bijection
/// between last matchings and pointers, so conditioning the pointer yields
/// the exact conditional distribution over layered graphs.
pub(crate) fn assemble_from_pointer(
    w: usize,
    d: usize,
    pointer: &[u32],
    rng: &mut ChaCha8Rng,
) -> LayeredGraph {
    let mut matchings: Vec<Vec<u32>> = (0..d - 1)
        .map(|_| uniform_permutation(w, rng))
        .collect();
    let mut prefix: Vec<usize> = (0..w).collect();
    for m in &matchings {
        for p in prefix.iter_mut() {
            *p = m[*p] as usize;
        }
    }
    let mut last = vec![0u32; w];
    for s in 0..w {
        last[prefix[s]] = pointer[s];
    }
    matchings.push(last);
    LayeredGraph {
        width: w,
        matchings,
    }
}

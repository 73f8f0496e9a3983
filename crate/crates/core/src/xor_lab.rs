//! Bias arithmetic, hardness-amplification experiments, and protocol
//! enumeration.
//!
//! The XOR of independent bits multiplies their biases; everything in this
//! module either measures that law (Monte Carlo advantage estimation over
//! seeded solvers), verifies it exactly (distribution convolution,
//! exhaustive enumeration of toy blackboard protocols), or exhibits its
//! limits (the inner-product demo, where one pass and a reusable buffer
//! solve an l-fold XOR as cheaply as a single copy).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::seeds::trial_seed;
use crate::stream::{run_streaming, StateLayout, StreamAlgorithm};

#[derive(Debug, Error, PartialEq)]
pub enum XorLabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration too large: {0}")]
    SizeError(String),
}

fn arg(msg: impl Into<String>) -> XorLabError {
    XorLabError::InvalidArgument(msg.into())
}

/// Biases of independent 0/1 variables, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSpec {
    biases: Vec<f64>,
}

impl BiasSpec {
    pub fn new(biases: Vec<f64>) -> Result<Self, XorLabError> {
        for (i, &b) in biases.iter().enumerate() {
            if !(0.0..=1.0).contains(&b) {
                return Err(arg(format!("bias {i} = {b} is outside [0, 1]")));
            }
        }
        Ok(BiasSpec { biases })
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }
}

/// Bias of the XOR of independent bits: the product of the biases.
pub fn xor_bias_product(spec: &BiasSpec) -> f64 {
    spec.biases.iter().product()
}

/// The same quantity via exact distribution convolution, as a cross-check
/// of the product law.
pub fn xor_bias_convolution(spec: &BiasSpec) -> f64 {
    let (mut p0, mut p1) = (1.0f64, 0.0f64);
    for &b in &spec.biases {
        let (q0, q1) = (0.5 * (1.0 + b), 0.5 * (1.0 - b));
        (p0, p1) = (p0 * q0 + p1 * q1, p0 * q1 + p1 * q0);
    }
    (p0 - p1).abs()
}

/// Wilson score interval around an empirical success rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageReport {
    pub trials: u64,
    pub correct: u64,
    pub p_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl AdvantageReport {
    pub fn advantage(&self) -> f64 {
        self.p_hat - 0.5
    }

    pub fn covers(&self, p: f64) -> bool {
        (self.wilson_low..=self.wilson_high).contains(&p)
    }
}

pub fn wilson_interval(correct: u64, trials: u64, z: f64) -> AdvantageReport {
    let n = trials as f64;
    let p = correct as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    AdvantageReport {
        trials,
        correct,
        p_hat: p,
        wilson_low: (center - half).max(0.0),
        wilson_high: (center + half).min(1.0),
    }
}

/// Fraction of trials a solver answers correctly, with a 95% Wilson
/// interval. The sampler draws `(instance, truth)` from a trial seed; the
/// solver sees the instance and an independent trial seed. Deterministic
/// per master seed.
pub fn empirical_advantage<I, V: PartialEq>(
    sampler: impl Fn(u64) -> (I, V),
    solver: impl Fn(&I, u64) -> V,
    trials: u64,
    master_seed: u64,
) -> Result<AdvantageReport, XorLabError> {
    if trials == 0 {
        return Err(arg("trials must be at least 1"));
    }
    let mut correct = 0u64;
    for trial in 0..trials {
        let instance_seed = trial_seed(master_seed, 2 * trial);
        let solver_seed = trial_seed(master_seed, 2 * trial + 1);
        let (instance, truth) = sampler(instance_seed);
        if solver(&instance, solver_seed) == truth {
            correct += 1;
        }
    }
    Ok(wilson_interval(correct, trials, 1.96))
}

// ---------------------------------------------------------------------------
// Toy blackboard games
// ---------------------------------------------------------------------------

/// A finite deterministic blackboard protocol. `copies` players each hold a
/// private input (one of `alphabet^stream_len` strings, drawn i.i.d. from
/// `mu`); they write `message_bits`-bit messages in round-robin order for
/// `rounds` rounds, every message a table lookup on (board so far, own
/// input). This captures any deterministic per-player streaming algorithm,
/// since such an algorithm's round-j message is a function of exactly those
/// two things.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyGame {
    pub alphabet: usize,
    pub stream_len: usize,
    pub copies: usize,
    pub rounds: usize,
    pub message_bits: usize,
    /// Distribution over the `alphabet^stream_len` input strings.
    pub mu: Vec<f64>,
    /// Boolean function value per input string.
    pub f: Vec<u8>,
    /// `programs[player][round][board_index * inputs + input_index]`.
    pub programs: Vec<Vec<Vec<u8>>>,
}

impl ToyGame {
    pub fn input_space(&self) -> usize {
        self.alphabet.pow(self.stream_len as u32)
    }

    /// Board states visible to `player` (0-based) before writing in
    /// `round` (0-based).
    fn board_states_before(&self, player: usize, round: usize) -> usize {
        1usize << (self.message_bits * (round * self.copies + player))
    }

    pub fn validate(&self) -> Result<(), XorLabError> {
        if self.alphabet < 1 || self.copies < 1 || self.rounds < 1 || self.message_bits < 1 {
            return Err(arg("alphabet, copies, rounds, message_bits must be positive"));
        }
        let inputs = self.input_space();
        if self.mu.len() != inputs {
            return Err(arg(format!(
                "mu has {} entries, expected {inputs}",
                self.mu.len()
            )));
        }
        if self.mu.iter().any(|&p| p < 0.0) {
            return Err(arg("mu has negative entries"));
        }
        let total: f64 = self.mu.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(arg(format!("mu sums to {total}, expected 1")));
        }
        if self.f.len() != inputs || self.f.iter().any(|&v| v > 1) {
            return Err(arg("f must map every input string to 0 or 1"));
        }
        if self.programs.len() != self.copies {
            return Err(arg("one program per player expected"));
        }
        for (i, rounds) in self.programs.iter().enumerate() {
            if rounds.len() != self.rounds {
                return Err(arg(format!("player {} needs {} round tables", i + 1, self.rounds)));
            }
            for (j, table) in rounds.iter().enumerate() {
                let expect = self.board_states_before(i, j) * inputs;
                if table.len() != expect {
                    return Err(arg(format!(
                        "player {} round {} table has {} entries, expected {expect}",
                        i + 1,
                        j + 1,
                        table.len()
                    )));
                }
                let max_msg = (1u64 << self.message_bits) as u8;
                if table.iter().any(|&m| m >= max_msg) {
                    return Err(arg("message exceeds message_bits"));
                }
            }
        }
        Ok(())
    }

    /// Final board content for one joint input, as an integer.
    fn run(&self, inputs: &[usize]) -> u64 {
        let space = self.input_space();
        let mut board = 0u64;
        for round in 0..self.rounds {
            for player in 0..self.copies {
                let table = &self.programs[player][round];
                let msg = table[board as usize * space + inputs[player]];
                board = (board << self.message_bits) | msg as u64;
            }
        }
        board
    }

    /// Plain-text table format: `key=value` headers, then `mu`, `f`, and
    /// one `program <player> <round>=` line per table, entries comma
    /// separated and indexed board-major then input.
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "alphabet={}", self.alphabet).unwrap();
        writeln!(out, "stream_len={}", self.stream_len).unwrap();
        writeln!(out, "copies={}", self.copies).unwrap();
        writeln!(out, "rounds={}", self.rounds).unwrap();
        writeln!(out, "message_bits={}", self.message_bits).unwrap();
        let join = |xs: &[String]| xs.join(",");
        writeln!(
            out,
            "mu={}",
            join(&self.mu.iter().map(|p| format!("{p}")).collect::<Vec<_>>())
        )
        .unwrap();
        writeln!(
            out,
            "f={}",
            join(&self.f.iter().map(|v| v.to_string()).collect::<Vec<_>>())
        )
        .unwrap();
        for (i, rounds) in self.programs.iter().enumerate() {
            for (j, table) in rounds.iter().enumerate() {
                writeln!(
                    out,
                    "program {} {}={}",
                    i + 1,
                    j + 1,
                    join(&table.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                )
                .unwrap();
            }
        }
        out
    }

    pub fn from_table_str(text: &str) -> Result<ToyGame, XorLabError> {
        let mut headers = BTreeMap::new();
        let mut mu = None;
        let mut f = None;
        let mut program_lines: Vec<(usize, usize, Vec<u8>)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| arg(format!("bad table line {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if let Some(rest) = key.strip_prefix("program ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(arg(format!("bad program header {key:?}")));
                }
                let player: usize = parts[0].parse().map_err(|_| arg("bad player index"))?;
                let round: usize = parts[1].parse().map_err(|_| arg("bad round index"))?;
                let table = value
                    .split(',')
                    .map(|v| v.trim().parse::<u8>().map_err(|_| arg("bad message value")))
                    .collect::<Result<Vec<u8>, _>>()?;
                program_lines.push((player, round, table));
            } else if key == "mu" {
                mu = Some(
                    value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>().map_err(|_| arg("bad mu value")))
                        .collect::<Result<Vec<f64>, _>>()?,
                );
            } else if key == "f" {
                f = Some(
                    value
                        .split(',')
                        .map(|v| v.trim().parse::<u8>().map_err(|_| arg("bad f value")))
                        .collect::<Result<Vec<u8>, _>>()?,
                );
            } else {
                let n: usize = value
                    .parse()
                    .map_err(|_| arg(format!("bad numeric header {key}")))?;
                headers.insert(key.to_string(), n);
            }
        }
        let get = |key: &str| -> Result<usize, XorLabError> {
            headers
                .get(key)
                .copied()
                .ok_or_else(|| arg(format!("missing header {key}")))
        };
        let copies = get("copies")?;
        let rounds = get("rounds")?;
        let mut programs = vec![vec![Vec::new(); rounds]; copies];
        for (player, round, table) in program_lines {
            if player == 0 || player > copies || round == 0 || round > rounds {
                return Err(arg(format!(
                    "program indices ({player}, {round}) out of range"
                )));
            }
            programs[player - 1][round - 1] = table;
        }
        let game = ToyGame {
            alphabet: get("alphabet")?,
            stream_len: get("stream_len")?,
            copies,
            rounds,
            message_bits: get("message_bits")?,
            mu: mu.ok_or_else(|| arg("missing mu line"))?,
            f: f.ok_or_else(|| arg("missing f line"))?,
            programs,
        };
        game.validate()?;
        Ok(game)
    }
}

/// A random one-round binary toy game with dyadic input probabilities
/// (multiples of 1/64, so every enumeration mass is exact in doubles).
pub fn random_toy_game(copies: usize, seed: u64) -> ToyGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p0 = rng.gen_range(1..64) as f64 / 64.0;
    let mu = vec![p0, 1.0 - p0];
    let f = vec![rng.gen_range(0..=1u8), rng.gen_range(0..=1u8)];
    let programs = (0..copies)
        .map(|player| {
            let states = 1usize << player;
            vec![(0..states * 2).map(|_| rng.gen_range(0..=1u8)).collect()]
        })
        .collect();
    ToyGame {
        alphabet: 2,
        stream_len: 1,
        copies,
        rounds: 1,
        message_bits: 1,
        mu,
        f,
        programs,
    }
}

/// Exhaustive enumeration report for one toy game: the largest conditional
/// dependence any final board induces between player inputs, and the
/// largest deviation of the conditional XOR bias from the product of the
/// conditional per-player biases. Both are zero for every deterministic
/// protocol of this shape, up to float noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackboardReport {
    pub boards: usize,
    pub max_conditional_mi_bits: f64,
    pub max_bias_residual: f64,
}

pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

pub fn blackboard_enumerate(game: &ToyGame) -> Result<BlackboardReport, XorLabError> {
    blackboard_enumerate_capped(game, DEFAULT_ENUMERATION_CAP)
}

pub fn blackboard_enumerate_capped(
    game: &ToyGame,
    cap: usize,
) -> Result<BlackboardReport, XorLabError> {
    game.validate()?;
    let space = game.input_space();
    let joint_size = space
        .checked_pow(game.copies as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| {
            XorLabError::SizeError(format!(
                "{space}^{} joint inputs exceeds the cap of {cap}",
                game.copies
            ))
        })?;

    // Exact joint law of (inputs, final board).
    let mut by_board: BTreeMap<u64, Vec<(Vec<usize>, f64)>> = BTreeMap::new();
    let mut inputs = vec![0usize; game.copies];
    for joint in 0..joint_size {
        let mut rest = joint;
        let mut prob = 1.0f64;
        for slot in inputs.iter_mut() {
            *slot = rest % space;
            rest /= space;
            prob *= game.mu[*slot];
        }
        if prob == 0.0 {
            continue;
        }
        let board = game.run(&inputs);
        by_board
            .entry(board)
            .or_default()
            .push((inputs.clone(), prob));
    }

    let mut max_mi = 0.0f64;
    let mut max_residual = 0.0f64;
    for support in by_board.values() {
        let total: f64 = support.iter().map(|(_, p)| p).sum();

        // Conditional mutual information between player i's input and the
        // rest, in bits.
        for i in 0..game.copies {
            let mut m_i: BTreeMap<usize, f64> = BTreeMap::new();
            let mut m_rest: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            let mut joint: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
            for (xs, p) in support {
                let rest: Vec<usize> = xs
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x)
                    .collect();
                *m_i.entry(xs[i]).or_default() += p;
                *m_rest.entry(rest.clone()).or_default() += p;
                *joint.entry((xs[i], rest)).or_default() += p;
            }
            let mut mi = 0.0f64;
            for ((xi, rest), &p) in &joint {
                let px = m_i[xi];
                let py = m_rest[rest];
                mi += (p / total) * ((p * total) / (px * py)).log2();
            }
            max_mi = max_mi.max(mi.abs());
        }

        // Bias factorization residual.
        let bias_of = |mass_zero: f64| -> f64 { ((2.0 * mass_zero - total) / total).abs() };
        let xor_zero: f64 = support
            .iter()
            .filter(|(xs, _)| xs.iter().fold(0u8, |acc, &x| acc ^ game.f[x]) == 0)
            .map(|(_, p)| p)
            .sum();
        let mut product = 1.0f64;
        for i in 0..game.copies {
            let zero_i: f64 = support
                .iter()
                .filter(|(xs, _)| game.f[xs[i]] == 0)
                .map(|(_, p)| p)
                .sum();
            product *= bias_of(zero_i);
        }
        max_residual = max_residual.max((bias_of(xor_zero) - product).abs());
    }

    Ok(BlackboardReport {
        boards: by_board.len(),
        max_conditional_mi_bits: max_mi,
        max_bias_residual: max_residual,
    })
}

// ---------------------------------------------------------------------------
// Inner-product XOR demo
// ---------------------------------------------------------------------------

/// Single-pass solver for the l-fold XOR of block inner products. The
/// stream is `l` blocks of `2m` bits; per block the first half is buffered,
/// the second half is folded into the block's inner-product parity on the
/// fly, and the buffer is reused for the next block. Persisted state is the
/// m-bit buffer, two parity bits, and a position counter, independent of
/// `l` - solving all copies costs the same space as solving one.
#[derive(Debug, Clone)]
pub struct IpXor {
    m: usize,
    buffer: Vec<bool>,
    pos: u64,
    block_parity: bool,
    xor_acc: bool,
}

impl IpXor {
    pub fn new(m: usize) -> Self {
        IpXor {
            m,
            buffer: vec![false; m],
            pos: 0,
            block_parity: false,
            xor_acc: false,
        }
    }
}

impl StreamAlgorithm<bool> for IpXor {
    type Output = bool;

    fn process_element(&mut self, &bit: &bool) {
        let m = self.m as u64;
        if self.pos < m {
            self.buffer[self.pos as usize] = bit;
        } else {
            self.block_parity ^= self.buffer[(self.pos - m) as usize] & bit;
        }
        self.pos += 1;
        if self.pos == 2 * m {
            self.xor_acc ^= self.block_parity;
            self.block_parity = false;
            self.pos = 0;
        }
    }

    fn state(&self) -> StateLayout {
        StateLayout::new()
            .booleans(self.m as u64 + 2)
            .counters(1)
    }

    fn finish(&mut self) -> bool {
        self.xor_acc
    }
}

/// Direct evaluation: per block of `2m` bits the inner product of the two
/// halves mod 2, XORed across blocks.
pub fn ip_xor_direct(bits: &[bool], m: usize) -> bool {
    bits.chunks_exact(2 * m).fold(false, |acc, block| {
        let ip = (0..m).fold(false, |p, i| p ^ (block[i] & block[m + i]));
        acc ^ ip
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IpXorCheck {
    pub inputs_checked: u64,
    pub mismatches: u64,
    pub peak_state_bits: u64,
}

/// Run the demo on every input of `l` blocks of `2m` bits and compare with
/// direct evaluation, tracking the peak persisted state.
pub fn ip_xor_exhaustive(m: usize, l: usize) -> Result<IpXorCheck, XorLabError> {
    let width = 2 * m * l;
    if m == 0 || l == 0 {
        return Err(arg("m and l must be positive"));
    }
    if width > 24 {
        return Err(XorLabError::SizeError(format!(
            "2*m*l = {width} input bits exceed the exhaustive limit of 24"
        )));
    }
    let mut mismatches = 0u64;
    let mut peak = 0u64;
    for mask in 0u32..(1u32 << width) {
        let bits: Vec<bool> = (0..width).map(|i| (mask >> i) & 1 == 1).collect();
        let mut algo = IpXor::new(m);
        let report = run_streaming(&mut algo, &bits, 1, None)
            .expect("bit stream run cannot fail");
        if report.output != ip_xor_direct(&bits, m) {
            mismatches += 1;
        }
        peak = peak.max(report.peak_state_bits);
    }
    Ok(IpXorCheck {
        inputs_checked: 1u64 << width,
        mismatches,
        peak_state_bits: peak,
    })
}

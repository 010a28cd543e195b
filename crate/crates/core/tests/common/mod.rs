//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use oneann_core::partition::PartitionResult;
use oneann_core::{
    accepts, ratio, step, Alphabet, Configuration, Interval, Network, NetworkBuilder, Rational, Word,
};
use rand::Rng;

/// The golden trace of N(27/8, 1/4) on "101" as published: `(t, y1..y7, y8 numerator, y8 denominator)`.
pub const GOLDEN_TRACE: [(usize, [u8; 7], i64, i64); 11] = [
    (0, [0, 0, 1, 0, 0, 0, 0], 0, 1),
    (1, [0, 1, 0, 1, 0, 0, 1], 0, 1),
    (2, [0, 0, 0, 0, 1, 0, 0], 19, 27),
    (3, [0, 0, 1, 0, 0, 1, 0], 38, 81),
    (4, [1, 0, 0, 1, 0, 0, 0], 76, 243),
    (5, [0, 0, 0, 0, 1, 0, 0], 152, 729),
    (6, [0, 0, 1, 0, 0, 0, 0], 304, 2187),
    (7, [0, 1, 0, 1, 0, 0, 1], 608, 6561),
    (8, [0, 0, 0, 0, 1, 0, 0], 15067, 19683),
    (9, [0, 0, 1, 0, 0, 1, 0], 30134, 59049),
    // published with y4 = 0; nxt is active at t = 9, so the dynamics give y4 = 1
    (10, [1, 0, 0, 0, 0, 0, 0], 60268, 177147),
];

/// Cells where the published trace disagrees with the network equations.
pub const GOLDEN_ERRATA: [(usize, usize, u8); 1] = [(10, 4, 1)];

pub fn golden_trace_expected() -> Vec<(usize, Vec<bool>, Rational)> {
    GOLDEN_TRACE
        .iter()
        .map(|&(t, bits, p, q)| {
            let mut b: Vec<bool> = bits.iter().map(|&x| x == 1).collect();
            for &(et, neuron, v) in &GOLDEN_ERRATA {
                if et == t {
                    b[neuron - 1] = v == 1;
                }
            }
            (t, b, ratio(p, q))
        })
        .collect()
}

/// `Σ_{k=1}^{n} x_{n-k+1} β^{-k} < c`, evaluated directly.
pub fn reversed_cut(word: &Word, beta: (i64, i64), c: (i64, i64)) -> bool {
    let beta = BigRational::new(BigInt::from(beta.0), BigInt::from(beta.1));
    let c = BigRational::new(BigInt::from(c.0), BigInt::from(c.1));
    let inv = BigRational::one() / beta;
    let mut sum = BigRational::zero();
    let mut weight = inv.clone();
    for &x in word.0.iter().rev() {
        if x == 1 {
            sum += weight.clone();
        }
        weight *= inv.clone();
    }
    sum < c
}

pub fn all_words(q: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * q);
        for w in &layer {
            for a in 0..q {
                next.push(w.push(a));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn set_of(q: usize, max_len: usize, pred: impl Fn(&Word) -> bool) -> BTreeSet<Word> {
    all_words(q, max_len).into_iter().filter(|w| pred(w)).collect()
}

/// `{x : x·u₂u₁ ∈ L} ∖ {x : x·u₁ ∈ L}` or the mirrored difference.
pub fn quotient_difference(base: &Network, u1: &Word, u2: &Word, l2_minus_l1: bool, max_len: usize) -> BTreeSet<Word> {
    let a = base.alphabet();
    let u2u1 = u2.concat(u1);
    set_of(a.len(), max_len, |x| {
        let in1 = accepts(base, a, &x.concat(u1)).unwrap();
        let in2 = accepts(base, a, &x.concat(&u2u1)).unwrap();
        if l2_minus_l1 {
            in2 && !in1
        } else {
            in1 && !in2
        }
    })
}

/// `Some((m, n))` for `0^m 1^n` with `m, n ≥ 1`.
pub fn zeros_then_ones(x: &Word) -> Option<(usize, usize)> {
    let m = x.0.iter().take_while(|&&s| s == 0).count();
    let n = x.len() - m;
    (m >= 1 && n >= 1 && x.0[m..].iter().all(|&s| s == 1)).then_some((m, n))
}

/// Binary trajectory over `steps` steps from `(b, y)`, presenting `word`
/// then the end symbol whenever nxt fires, built from the reference step.
pub fn trajectory(net: &Network, b: &[bool], y: &Rational, word: &Word, steps: usize) -> Vec<Vec<bool>> {
    let mut cfg = Configuration {
        binary: b.to_vec(),
        analog: y.clone(),
    };
    let mut k = 0;
    let mut out = vec![cfg.binary.clone()];
    for _ in 0..steps {
        let query = cfg.bit(net.nxt()) && k <= word.len();
        let inputs: Vec<bool> = net.inputs().iter().map(|&i| cfg.bit(i)).collect();
        let mut next = step(net, &cfg, &inputs);
        if query {
            let a = word.0.get(k).copied().unwrap_or(0);
            next.set_bit(net.inputs()[a], true);
            k += 1;
        }
        cfg = next;
        out.push(cfg.binary.clone());
    }
    out
}

/// `n` rationals from `iv`: closed endpoints first, then uniform grid points.
pub fn sample_interval(iv: &Interval, n: usize, rng: &mut impl Rng) -> Vec<Rational> {
    if iv.is_degenerate() {
        return vec![iv.lo.clone()];
    }
    let mut out = Vec::with_capacity(n);
    if iv.lo_closed {
        out.push(iv.lo.clone());
    }
    if iv.hi_closed {
        out.push(iv.hi.clone());
    }
    let width = iv.hi.clone() - iv.lo.clone();
    while out.len() < n {
        let den: i64 = rng.gen_range(2..=1 << 20);
        let num: i64 = rng.gen_range(1..den);
        out.push(iv.lo.clone() + width.clone() * ratio(num, den));
    }
    out
}

pub struct InvarianceReport {
    pub intervals: usize,
    pub samples: usize,
    pub failures: Vec<String>,
}

/// Every sample of every interval yields the same binary trajectory as the
/// interval's first sample, for every start state and word.
pub fn check_invariance(
    net: &Network,
    part: &PartitionResult,
    words: &[Word],
    per_interval: usize,
    rng: &mut impl Rng,
) -> InvarianceReport {
    let mut report = InvarianceReport {
        intervals: part.partition.len(),
        samples: 0,
        failures: Vec::new(),
    };
    for (r, iv) in part.partition.intervals().iter().enumerate() {
        let ys = sample_interval(iv, per_interval, rng);
        for b in &part.starts {
            for w in words {
                let first = trajectory(net, b, &ys[0], w, part.horizon);
                for y in &ys[1..] {
                    report.samples += 1;
                    if trajectory(net, b, y, w, part.horizon) != first {
                        report.failures.push(format!("interval {r} {iv} start {b:?} word {w} y {y}"));
                    }
                }
            }
        }
    }
    report
}

/// Whether some start and word separate two adjacent intervals.
pub fn some_boundary_is_sharp(net: &Network, part: &PartitionResult, words: &[Word]) -> bool {
    let ivs = part.partition.intervals();
    ivs.windows(2).any(|w| {
        let (a, b) = (w[0].representative(), w[1].representative());
        part.starts.iter().any(|s| {
            words
                .iter()
                .any(|u| trajectory(net, s, &a, u, part.horizon) != trajectory(net, s, &b, u, part.horizon))
        })
    })
}

fn random_weight(rng: &mut impl Rng) -> Rational {
    if rng.gen_bool(0.25) {
        return Rational::zero();
    }
    let p: i64 = rng.gen_range(-8..=8);
    let q: i64 = rng.gen_range(1..=8);
    ratio(p, q)
}

/// Inputs 1, 2; a clock ring `nxt = 3 ↔ 4` with δ = 2; out 5; analog 6;
/// random rational weights into the out and analog units.
pub fn random_network(rng: &mut impl Rng) -> Network {
    let mut b = NetworkBuilder::new(6);
    b.inputs(vec![1, 2]).nxt(3).out(5).delta(2).alphabet(Alphabet::binary());
    b.bias(3, ratio(-1, 1)).weight(3, 4, Rational::one());
    b.bias(4, ratio(-1, 1)).weight(4, 3, Rational::one());
    for j in [5, 6] {
        for i in 0..=6 {
            b.weight(j, i, random_weight(rng));
        }
    }
    // the analog unit must be read for the partition to matter
    if b.get_weight(5, 6).is_zero() {
        b.weight(5, 6, ratio(rng.gen_range(1..=8), rng.gen_range(1..=8)));
    }
    if b.get_weight(6, 6).is_zero() {
        b.weight(6, 6, ratio(rng.gen_range(1..=8), rng.gen_range(1..=8)));
    }
    b.build().expect("random network is valid")
}

//! Networks accepting a difference of two right quotients of `L(N)`.
//!
//! With `L₁ = L(N)/u₁` and `L₂ = L(N)/(u₂·u₁)`, the builder extends `N` by
//! threshold neurons `α_r` locating the analog state in a partition interval,
//! copies `β_i` of the binary state, and a two-layer realization of the
//! Boolean function combining the two extrapolation tables.

use std::fmt;
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::format::write_anet;
use crate::network::{Network, NetworkBuilder};
use crate::numerics::{HalfLinePair, Rational};
use crate::partition::{
    build_partition_refined, extrapolation_table, reachable_snapshots, required_horizon, PartitionResult,
    StartStates, DEFAULT_BUDGET,
};
use crate::protocol::{run_online, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientMode {
    /// `L₂ ∖ L₁`
    L2MinusL1,
    /// `L₁ ∖ L₂`
    L1MinusL2,
}

impl fmt::Display for QuotientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotientMode::L2MinusL1 => "L2-L1",
            QuotientMode::L1MinusL2 => "L1-L2",
        })
    }
}

/// Which binary states get a DNF term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DnfMode {
    /// States reachable at nxt-firing instants; other rows default to 0.
    Reachable,
    /// All `2^{s-1}` binary states.
    Full,
}

#[derive(Clone, Debug)]
pub struct QuotientSpec {
    pub base: Network,
    pub u1: Word,
    pub u2: Word,
    pub mode: QuotientMode,
    pub dnf: DnfMode,
}

impl QuotientSpec {
    pub fn new(base: Network, u1: Word, u2: Word, mode: QuotientMode) -> Result<Self> {
        if u1.is_empty() || u2.is_empty() {
            return Err(Error::Construction("quotient words must be nonempty".into()));
        }
        let q = base.inputs().len();
        if u1.0.iter().chain(&u2.0).any(|&a| a >= q) {
            return Err(Error::Input("quotient word uses a symbol outside the alphabet".into()));
        }
        let violations = base.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }
        Ok(QuotientSpec {
            base,
            u1,
            u2,
            mode,
            dnf: DnfMode::Reachable,
        })
    }

    pub fn with_dnf(mut self, dnf: DnfMode) -> Self {
        self.dnf = dnf;
        self
    }

    pub fn u2u1(&self) -> Word {
        self.u2.concat(&self.u1)
    }

    /// Horizon covering the longer suffix: `δ(|u₂u₁| + 1) + d`.
    pub fn horizon(&self) -> usize {
        required_horizon(&self.base, &self.u2u1())
    }

    fn combine(&self, in_l1: bool, in_l2: bool) -> bool {
        match self.mode {
            QuotientMode::L2MinusL1 => in_l2 && !in_l1,
            QuotientMode::L1MinusL2 => in_l1 && !in_l2,
        }
    }
}

/// `f` over `(α, β)`: one row per covered binary state and interval.
#[derive(Clone, Debug)]
pub struct TruthTable {
    /// `α` pattern of each interval.
    pub alpha: Vec<Vec<bool>>,
    /// Covered binary states `β`.
    pub beta: Vec<Vec<bool>>,
    /// `values[i][r]` for `beta[i]` and interval `r`.
    pub values: Vec<Vec<bool>>,
}

impl TruthTable {
    /// `p + s`: `p + 1` α-bits and `s - 1` β-bits.
    pub fn arity(&self) -> usize {
        self.alpha.first().map_or(0, Vec::len) + self.beta.first().map_or(0, Vec::len)
    }

    /// Rows with output 1 as `(α, β)`.
    pub fn true_rows(&self) -> impl Iterator<Item = (&[bool], &[bool])> + '_ {
        self.values.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v)
                .map(move |(r, _)| (self.alpha[r].as_slice(), self.beta[i].as_slice()))
        })
    }

    /// Output on an exact pattern; uncovered rows are 0.
    pub fn eval(&self, alpha: &[bool], beta: &[bool]) -> bool {
        let Some(r) = self.alpha.iter().position(|a| a == alpha) else {
            return false;
        };
        self.beta
            .iter()
            .position(|b| b == beta)
            .is_some_and(|i| self.values[i][r])
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().flatten().all(|v| !v)
    }
}

/// `α_r(y) = 1` iff `y` lies on the half-line `(a_r, b_r)`.
pub fn alpha_pattern(pairs: &[HalfLinePair], y: &Rational) -> Vec<bool> {
    pairs.iter().map(|p| p.contains(y)).collect()
}

/// Partition over the start states selected by `spec.dnf`, covering both suffixes.
pub fn quotient_partition(spec: &QuotientSpec) -> Result<PartitionResult> {
    let net = &spec.base;
    let starts = match spec.dnf {
        DnfMode::Reachable => StartStates::Explicit(reachable_snapshots(net, net.alphabet(), DEFAULT_BUDGET)?),
        DnfMode::Full => StartStates::All,
    };
    build_partition_refined(net, net.alphabet(), spec.horizon(), &[spec.u1.clone(), spec.u2u1()], &starts)
}

pub fn boolean_f(spec: &QuotientSpec, part: &PartitionResult) -> Result<TruthTable> {
    let need = spec.horizon();
    if part.horizon < need {
        return Err(Error::Horizon { have: part.horizon, need });
    }
    let net = &spec.base;
    let f1 = extrapolation_table(net, net.alphabet(), part, &spec.u1)?;
    let f2 = extrapolation_table(net, net.alphabet(), part, &spec.u2u1())?;
    let alpha = part
        .partition
        .intervals()
        .iter()
        .map(|iv| alpha_pattern(&part.pairs, &iv.representative()))
        .collect();
    let values = f1
        .verdicts
        .iter()
        .zip(&f2.verdicts)
        .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| spec.combine(x, y)).collect())
        .collect();
    Ok(TruthTable {
        alpha,
        beta: part.starts.clone(),
        values,
    })
}

/// Neuron indices of the parts of `N′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLayout {
    /// Base binary neurons keep `1..s`.
    pub base: Range<usize>,
    pub alpha: Range<usize>,
    pub beta: Range<usize>,
    pub and: Range<usize>,
    pub or: usize,
    pub out: usize,
    pub analog: usize,
}

impl QuotientLayout {
    /// Index of base neuron `i` inside `N′`.
    pub fn map_base(&self, i: usize) -> usize {
        if i == self.base.end {
            self.analog
        } else {
            i
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientNetwork {
    pub network: Network,
    pub layout: QuotientLayout,
    pub table: TruthTable,
    pub partition: PartitionResult,
}

pub const QUOTIENT_DELAY: usize = 3;

pub fn build_quotient_network(spec: &QuotientSpec) -> Result<QuotientNetwork> {
    let part = quotient_partition(spec)?;
    build_quotient_with_partition(spec, part)
}

pub fn build_quotient_with_partition(spec: &QuotientSpec, part: PartitionResult) -> Result<QuotientNetwork> {
    let table = boolean_f(spec, &part)?;
    let base = &spec.base;
    let s = base.size();
    let pairs = &part.pairs;
    let alpha = s..s + pairs.len();
    let beta = alpha.end..alpha.end + (s - 1);
    let terms: Vec<(Vec<bool>, Vec<bool>)> = table.true_rows().map(|(a, b)| (a.to_vec(), b.to_vec())).collect();
    let and = beta.end..beta.end + terms.len();
    let or = and.end;
    let out = or + 1;
    let analog = out + 1;
    let layout = QuotientLayout {
        base: 1..s,
        alpha: alpha.clone(),
        beta: beta.clone(),
        and: and.clone(),
        or,
        out,
        analog,
    };
    let mut b = NetworkBuilder::new(analog);
    for (j, i, w) in base.weights() {
        b.weight(layout.map_base(j), layout.map_base(i), w.clone());
    }
    for (k, p) in pairs.iter().enumerate() {
        let sign = Rational::from(i64::from(p.b.sign()));
        b.weight(alpha.start + k, 0, sign.clone() * p.a.clone());
        b.weight(alpha.start + k, analog, -sign);
    }
    for i in 1..s {
        b.bias(beta.start + i - 1, -Rational::one());
        b.weight(beta.start + i - 1, i, Rational::one());
    }
    let literals = pairs.len() + (s - 1);
    let negative = -Rational::from((literals + 1) as i64);
    for (n, (a, bb)) in terms.iter().enumerate() {
        let j = and.start + n;
        let sources = alpha.clone().chain(beta.clone());
        let bits = a.iter().chain(bb.iter());
        let mut positive = 0i64;
        for (src, &bit) in sources.zip(bits) {
            if bit {
                positive += 1;
                b.weight(j, src, Rational::one());
            } else {
                b.weight(j, src, negative.clone());
            }
        }
        b.bias(j, Rational::from(-positive));
        b.weight(or, j, Rational::one());
    }
    b.bias(or, -Rational::one());
    b.bias(out, -Rational::one());
    b.weight(out, or, Rational::one());
    b.inputs(base.inputs().to_vec())
        .nxt(base.nxt())
        .out(out)
        .delta(base.delta())
        .output_delay(QUOTIENT_DELAY)
        .alphabet(base.alphabet().clone())
        .init_active(base.initial().active().collect())
        .init_analog(base.initial().analog.clone());
    let network = b.build()?;
    Ok(QuotientNetwork {
        network,
        layout,
        table,
        partition: part,
    })
}

/// Timing of the quotient verdict for prefix `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub k: usize,
    /// Base nxt firing, `τ_{k+1} - 1`.
    pub snapshot: usize,
    /// α and β hold the snapshot, `τ_{k+1}`.
    pub latch: usize,
    /// `τ_{k+1} + 3`.
    pub verdict: usize,
}

/// Snapshot and verdict instants along the run of the base network on `x`.
pub fn snapshot_schedule(spec: &QuotientSpec, x: &Word) -> Result<Vec<ScheduleEntry>> {
    let trace = run_online(&spec.base, spec.base.alphabet(), x)?;
    Ok(trace
        .query_times
        .iter()
        .enumerate()
        .map(|(k, &tau)| ScheduleEntry {
            k,
            snapshot: tau - 1,
            latch: tau,
            verdict: tau + QUOTIENT_DELAY,
        })
        .collect())
}

/// `anet v1` text preceded by a comment block naming the neuron roles.
pub fn write_quotient_anet(q: &QuotientNetwork, spec: &QuotientSpec) -> String {
    let l = &q.layout;
    let alphabet = spec.base.alphabet();
    let mut s = String::new();
    let span = |r: &Range<usize>| {
        if r.is_empty() {
            "none".to_string()
        } else {
            format!("{}..{}", r.start, r.end - 1)
        }
    };
    let _ = writeln!(
        s,
        "# quotient {} with u1 = {} and u2 = {}",
        spec.mode,
        alphabet.render(&spec.u1),
        alphabet.render(&spec.u2)
    );
    let _ = writeln!(s, "# base neurons {}; base analog unit moved to {}", span(&l.base), l.analog);
    let _ = writeln!(s, "# alpha {} (one per half-line of the partition)", span(&l.alpha));
    for (k, p) in q.partition.pairs.iter().enumerate() {
        let _ = writeln!(s, "#   alpha {} = [y in {}]", l.alpha.start + k, p);
    }
    let _ = writeln!(s, "# beta {} (copies of the base binary state)", span(&l.beta));
    let _ = writeln!(s, "# and {} (one per true row of f)", span(&l.and));
    let _ = writeln!(s, "# or {}; out {} (verdict delay {})", l.or, l.out, QUOTIENT_DELAY);
    s.push_str(&write_anet(&q.network));
    s
}

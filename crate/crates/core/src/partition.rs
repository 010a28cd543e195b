//! Partitions of the analog state domain `[0, 1]` into intervals on which the
//! binary trajectory over a bounded horizon does not depend on the initial
//! analog value, and the extrapolation tables read off such partitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::network::{Configuration, Network};
use crate::numerics::{HalfLinePair, Interval, IntervalPartition, Rational, Side};
use crate::protocol::{accepts_from, Alphabet, Word};

/// Default cap on candidate endpoints (exhaustive) or live branches (refined).
pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Refined,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::Refined => "refined",
        })
    }
}

/// Which condition produced an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Corner,
    /// Binary neuron `neuron` at step `tau` (its state at `tau + 1`).
    Threshold { neuron: usize, tau: usize },
    /// Analog state at `tau` saturating at 0.
    SaturateLow { tau: usize },
    /// Analog state at `tau` saturating at 1.
    SaturateHigh { tau: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Corner => write!(f, "corner"),
            Family::Threshold { neuron, tau } => write!(f, "threshold y{neuron} tau={tau}"),
            Family::SaturateLow { tau } => write!(f, "saturate-0 tau={tau}"),
            Family::SaturateHigh { tau } => write!(f, "saturate-1 tau={tau}"),
        }
    }
}

/// Initial binary states a partition is built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StartStates {
    /// Over-approximation of the states seen whenever nxt fires.
    Reachable,
    /// All `2^{s-1}` binary vectors.
    All,
    Explicit(Vec<Vec<bool>>),
}

#[derive(Clone, Debug)]
pub struct PartitionResult {
    pub partition: IntervalPartition,
    /// Sorted pairs `Z`; `|Z| = p + 1`.
    pub pairs: Vec<HalfLinePair>,
    pub horizon: usize,
    pub method: Method,
    /// Binary start states the guarantee covers.
    pub starts: Vec<Vec<bool>>,
    /// First family recorded for each pair.
    pub provenance: BTreeMap<HalfLinePair, Family>,
}

impl PartitionResult {
    fn assemble(
        found: Vec<(HalfLinePair, Family)>,
        horizon: usize,
        method: Method,
        starts: Vec<Vec<bool>>,
    ) -> Self {
        let mut provenance = BTreeMap::new();
        for corner in HalfLinePair::corners() {
            provenance.insert(corner, Family::Corner);
        }
        for (pair, fam) in &found {
            provenance.entry(pair.clone()).or_insert(*fam);
        }
        let (partition, pairs) = IntervalPartition::from_unsorted_pairs(found.into_iter().map(|(p, _)| p));
        provenance.retain(|p, _| pairs.binary_search(p).is_ok());
        PartitionResult {
            partition,
            pairs,
            horizon,
            method,
            starts,
            provenance,
        }
    }

    /// `p`, the number of intervals.
    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    /// One line per interval followed by one line per endpoint pair.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# method {} horizon {} intervals {} pairs {}",
            self.method,
            self.horizon,
            self.len(),
            self.pairs.len()
        );
        out.push_str(&self.partition.report());
        for p in &self.pairs {
            let fam = self.provenance.get(p).copied().unwrap_or(Family::Corner);
            let _ = writeln!(out, "pair {p} {fam}");
        }
        out
    }
}

fn bits_value(net: &Network, row: usize, ybin: &[bool]) -> Rational {
    let s = net.size();
    let mut sum = Rational::zero();
    for (i, w) in net.row(row) {
        if *i == 0 || (*i < s && ybin[*i - 1]) {
            sum = sum + w;
        }
    }
    sum
}

/// `ζ_ℓ(ỹ) = -Σ_{i<s} (w_ℓi / w_ℓs) y_i` with `y_0 = 1`.
pub fn zeta(net: &Network, l: usize, ybin: &[bool]) -> Result<Rational> {
    let s = net.size();
    let wls = net.weight(l, s);
    if wls.is_zero() {
        return Err(Error::UndefinedRatio { neuron: l, analog: s });
    }
    Ok(-(bits_value(net, l, ybin) / wls))
}

/// `z_ℓ(ỹ_0..ỹ_τ) = Σ_{t<τ} ζ_s(ỹ_t) w_ss^{-t} + ζ_ℓ(ỹ_τ) w_ss^{-τ}`.
pub fn z_endpoint(net: &Network, l: usize, seq: &[Vec<bool>]) -> Result<Rational> {
    let s = net.size();
    let tau = seq.len().checked_sub(1).ok_or_else(|| Error::Input("empty sequence".into()))?;
    let wss = net.weight(s, s);
    if wss.is_zero() && tau > 0 {
        return Err(Error::UndefinedRatio { neuron: s, analog: s });
    }
    let mut z = Rational::zero();
    for (t, y) in seq[..tau].iter().enumerate() {
        z = z + zeta(net, s, y)? * wss.pow(-(t as i32))?;
    }
    let last = if tau == 0 { Rational::one() } else { wss.pow(-(tau as i32))? };
    Ok(z + zeta(net, l, &seq[tau])? * last)
}

/// The closed-form bound on `|Z| = p + 1`:
/// `(s-1)(2^{s-1} + ... + 2^{(s-1)T}) + 2(2^{2(s-1)} + ... + 2^{(s-1)(T-1)}) + 4`.
pub fn pair_count_bound(s: usize, horizon: usize) -> BigInt {
    let base = BigInt::from(2).pow((s - 1) as u32);
    let mut first = BigInt::from(0);
    let mut power = BigInt::from(1);
    for _ in 1..=horizon {
        power *= &base;
        first += &power;
    }
    let mut second = BigInt::from(0);
    for k in 2..horizon {
        second += base.pow(k as u32);
    }
    BigInt::from(s - 1) * first + BigInt::from(2) * second + BigInt::from(4)
}

/// Distinct values of `-(Σ_{i<s} w_li y_i) / d` over all binary `ỹ`.
fn subset_values(net: &Network, l: usize, d: &Rational, budget: usize) -> Result<BTreeSet<Rational>> {
    let s = net.size();
    let mut values: BTreeSet<Rational> = [-(net.weight(l, 0) / d.clone())].into_iter().collect();
    for (i, w) in net.row(l) {
        if *i == 0 || *i == s {
            continue;
        }
        let shift = -(w.clone() / d.clone());
        let extra: Vec<Rational> = values.iter().map(|v| v.clone() + shift.clone()).collect();
        values.extend(extra);
        if values.len() > budget {
            return Err(Error::Budget(format!(
                "more than {budget} distinct excitation values for neuron {l}; use the refined method"
            )));
        }
    }
    Ok(values)
}

fn all_binary(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
        .collect()
}

const MAX_ENUMERATED_STARTS: usize = 16;

/// Every endpoint the closed-form conditions can produce for horizon `t`,
/// enumerated as sum sets of distinct `ζ` values.
pub fn build_partition_exhaustive(net: &Network, horizon: usize, budget: usize) -> Result<PartitionResult> {
    if horizon == 0 {
        return Err(Error::Horizon { have: 0, need: 1 });
    }
    let s = net.size();
    let wss = net.weight(s, s);
    let readers: Vec<usize> = (1..s)
        .filter(|&j| !net.is_input(j) && !net.weight(j, s).is_zero())
        .collect();
    let mut found: Vec<(HalfLinePair, Family)> = Vec::new();
    let mut spent = 0usize;
    let mut charge = |n: usize| -> Result<()> {
        spent += n;
        if spent > budget {
            Err(Error::Budget(format!(
                "more than {budget} candidate endpoints at horizon {horizon}; use the refined method"
            )))
        } else {
            Ok(())
        }
    };
    let unit = Interval::unit();
    let mut zeta_sets = BTreeMap::new();
    for &j in &readers {
        let wjs = net.weight(j, s);
        zeta_sets.insert(j, subset_values(net, j, &wjs, budget)?);
    }
    let push = |found: &mut Vec<(HalfLinePair, Family)>, a: Rational, sign: i32, fam: Family| {
        if unit.contains(&a) {
            found.push((HalfLinePair::new(a, Side::from_sign(sign).expect("nonzero sign")), fam));
        }
    };
    if wss.is_zero() {
        for &j in &readers {
            let sign = -net.weight(j, s).signum();
            for z in &zeta_sets[&j] {
                charge(1)?;
                push(&mut found, z.clone(), sign, Family::Threshold { neuron: j, tau: 0 });
            }
        }
    } else {
        let zeta_s = subset_values(net, s, &wss, budget)?;
        // sums[τ] = { Σ_{t<τ} ζ_s(ỹ_t) w_ss^{-t} }
        let mut sums: BTreeSet<Rational> = [Rational::zero()].into_iter().collect();
        for tau in 0..horizon {
            let scale = wss.pow(-(tau as i32))?;
            let wss_tau_sign = if tau % 2 == 1 && wss.is_negative() { -1 } else { 1 };
            if tau > 0 {
                charge(2 * sums.len())?;
                for z in &sums {
                    push(&mut found, z.clone(), wss_tau_sign, Family::SaturateLow { tau });
                    push(&mut found, scale.clone() + z.clone(), -wss_tau_sign, Family::SaturateHigh { tau });
                }
            }
            for &j in &readers {
                let sign = -net.weight(j, s).signum() * wss_tau_sign;
                charge(sums.len() * zeta_sets[&j].len())?;
                for z in &sums {
                    for zj in &zeta_sets[&j] {
                        push(&mut found, z.clone() + zj.clone() * scale.clone(), sign, Family::Threshold { neuron: j, tau });
                    }
                }
            }
            if tau + 1 < horizon {
                let mut next = BTreeSet::new();
                for z in &sums {
                    for a in &zeta_s {
                        next.insert(z.clone() + a.clone() * scale.clone());
                    }
                }
                charge(next.len())?;
                sums = next;
            }
        }
    }
    let starts = if s - 1 <= MAX_ENUMERATED_STARTS {
        all_binary(s - 1)
    } else {
        Vec::new()
    };
    Ok(PartitionResult::assemble(found, horizon, Method::Exhaustive, starts))
}

/// Analog state of a symbolic branch as a function of the initial value `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Analog {
    /// `c0 + c1·y`, already inside `[0, 1]`.
    Affine(Rational, Rational),
    /// `σ(c0 + c1·y)`, saturation not yet resolved.
    Raw(Rational, Rational),
}

#[derive(Clone, Debug)]
struct Branch {
    iv: Interval,
    bin: Vec<bool>,
    analog: Analog,
    t: usize,
    /// Symbols presented so far.
    k: usize,
}

struct SymSim<'a> {
    net: &'a Network,
    /// Binary neurons reading the analog unit.
    readers: Vec<usize>,
    analog_is_read: bool,
    found: Vec<(HalfLinePair, Family)>,
    budget: usize,
    spent: usize,
}

impl<'a> SymSim<'a> {
    fn new(net: &'a Network, budget: usize) -> Self {
        let s = net.size();
        let readers: Vec<usize> = (1..s)
            .filter(|&j| !net.is_input(j) && !net.weight(j, s).is_zero())
            .collect();
        let analog_is_read = !readers.is_empty() || !net.weight(s, s).is_zero();
        SymSim {
            net,
            readers,
            analog_is_read,
            found: Vec::new(),
            budget,
            spent: 0,
        }
    }

    fn charge(&mut self, n: usize) -> Result<()> {
        self.spent += n;
        if self.spent > self.budget {
            return Err(Error::Budget(format!("more than {} symbolic branches", self.budget)));
        }
        Ok(())
    }

    fn split(&mut self, pieces: Vec<Interval>, h: &HalfLinePair, fam: Family) -> Vec<Interval> {
        let mut out = Vec::with_capacity(pieces.len() + 1);
        for p in pieces {
            match (p.intersect(h), p.intersect_complement(h)) {
                (Some(a), Some(b)) => {
                    self.found.push((h.clone(), fam));
                    out.push(a);
                    out.push(b);
                }
                (Some(a), None) => out.push(a),
                (None, Some(b)) => out.push(b),
                (None, None) => {}
            }
        }
        out
    }

    /// `{y : c0 + c1·y >= 0}` (`ge = true`) or `{y : c0 + c1·y <= 0}`, for `c1 != 0`.
    fn half_line(c0: &Rational, c1: &Rational, ge: bool) -> HalfLinePair {
        let theta = -(c0.clone() / c1.clone());
        let side = if c1.is_positive() == ge { Side::AtLeast } else { Side::AtMost };
        HalfLinePair::new(theta, side)
    }

    /// Resolves saturation of a raw analog state on `br.iv`.
    fn resolve(&mut self, br: Branch) -> Vec<Branch> {
        let (a, b) = match &br.analog {
            Analog::Raw(a, b) => (a.clone(), b.clone()),
            Analog::Affine(..) => return vec![br],
        };
        let tau = br.t;
        if b.is_zero() {
            let v = crate::network::saturate(a);
            return vec![Branch { analog: Analog::Affine(v, Rational::zero()), ..br }];
        }
        let low = Self::half_line(&a, &b, false);
        let high = Self::half_line(&(a.clone() - Rational::one()), &b, true);
        let pieces = self.split(vec![br.iv.clone()], &low, Family::SaturateLow { tau });
        let pieces = self.split(pieces, &high, Family::SaturateHigh { tau });
        pieces
            .into_iter()
            .map(|iv| {
                let y = iv.representative();
                let analog = if low.contains(&y) {
                    Analog::Affine(Rational::zero(), Rational::zero())
                } else if high.contains(&y) {
                    Analog::Affine(Rational::one(), Rational::zero())
                } else {
                    Analog::Affine(a.clone(), b.clone())
                };
                Branch { iv, analog, ..br.clone() }
            })
            .collect()
    }

    /// One synchronous step; `present` is clamped at `t + 1`.
    fn step(&mut self, br: Branch, present: Option<usize>) -> Result<Vec<Branch>> {
        let net = self.net;
        let s = net.size();
        let resolved = if self.analog_is_read { self.resolve(br) } else { vec![br] };
        let mut out = Vec::new();
        for br in resolved {
            let (c0, c1) = match &br.analog {
                Analog::Affine(c0, c1) => (c0.clone(), c1.clone()),
                // nothing reads it: its value is irrelevant
                Analog::Raw(..) => (Rational::zero(), Rational::zero()),
            };
            let mut tests = Vec::new();
            let mut pieces = vec![br.iv.clone()];
            if !c1.is_zero() {
                for j in self.readers.clone() {
                    let wjs = net.weight(j, s);
                    let base = bits_value(net, j, &br.bin) + wjs.clone() * c0.clone();
                    let h = Self::half_line(&base, &(wjs * c1.clone()), true);
                    pieces = self.split(pieces, &h, Family::Threshold { neuron: j, tau: br.t });
                    tests.push((j, h));
                }
            }
            self.charge(pieces.len())?;
            let wss = net.weight(s, s);
            let ws0 = bits_value(net, s, &br.bin);
            for iv in pieces {
                let y = iv.representative();
                let value = c0.clone() + c1.clone() * y.clone();
                let mut bin = vec![false; s - 1];
                for j in 1..s {
                    if net.is_input(j) {
                        continue;
                    }
                    bin[j - 1] = match tests.iter().find(|(k, _)| *k == j) {
                        Some((_, h)) => h.contains(&y),
                        None => !(bits_value(net, j, &br.bin) + net.weight(j, s) * value.clone()).is_negative(),
                    };
                }
                if let Some(a) = present {
                    bin[net.inputs()[a] - 1] = true;
                }
                let analog = Analog::Raw(ws0.clone() + wss.clone() * c0.clone(), wss.clone() * c1.clone());
                out.push(Branch {
                    iv,
                    bin,
                    analog,
                    t: br.t + 1,
                    k: br.k + usize::from(present.is_some()),
                });
            }
        }
        Ok(out)
    }
}

fn nxt_active(net: &Network, bin: &[bool]) -> bool {
    bin[net.nxt() - 1]
}

/// Symbol clamped at `t + 1` under the protocol: the next letter of `word`,
/// then the formal end symbol, then nothing.
fn next_symbol(net: &Network, bin: &[bool], word: &Word, k: usize) -> Option<usize> {
    if nxt_active(net, bin) && k <= word.len() {
        Some(word.0.get(k).copied().unwrap_or(0))
    } else {
        None
    }
}

/// Concrete binary trajectory `ỹ(0..=steps)` under the same protocol the
/// symbolic method follows (no δ guard).
pub fn binary_trajectory(net: &Network, start: &Configuration, word: &Word, steps: usize) -> Vec<Vec<bool>> {
    let engine = Engine::new(net);
    let mut cfg = start.clone();
    let mut k = 0;
    let mut out = vec![cfg.binary.clone()];
    for _ in 0..steps {
        let present = next_symbol(net, &cfg.binary, word, k);
        let inputs = net.inputs_of(&cfg);
        let mut next = engine.step(&cfg, &inputs);
        if let Some(a) = present {
            next.set_bit(net.inputs()[a], true);
            k += 1;
        }
        cfg = next;
        out.push(cfg.binary.clone());
    }
    out
}

/// Binary states at nxt-firing instants, over-approximated by treating the
/// analog state as unknown in `[0, 1]` after the first query window.
pub fn reachable_snapshots(net: &Network, alphabet: &Alphabet, budget: usize) -> Result<Vec<Vec<bool>>> {
    if alphabet.len() != net.inputs().len() {
        return Err(Error::Input("alphabet does not match the input neurons".into()));
    }
    let engine = Engine::new(net);
    let mut cfg = net.initial().clone();
    let mut t = 0;
    while !cfg.bit(net.nxt()) {
        if t + 1 >= net.delta() {
            return Err(Error::DeltaViolation {
                word: "ε".into(),
                delta: net.delta(),
                since: 0,
            });
        }
        cfg = engine.step(&cfg, &net.inputs_of(&cfg));
        t += 1;
    }
    let mut seen: BTreeSet<Vec<bool>> = [cfg.binary.clone()].into_iter().collect();
    let mut queue = vec![cfg.binary];
    let mut sim = SymSim::new(net, budget);
    while let Some(b) = queue.pop() {
        for a in 0..alphabet.len() {
            let start = Branch {
                iv: Interval::unit(),
                bin: b.clone(),
                analog: Analog::Affine(Rational::zero(), Rational::one()),
                t: 0,
                k: 0,
            };
            let mut live = sim.step(start, Some(a))?;
            let mut steps = 1;
            while !live.is_empty() {
                let mut next = Vec::new();
                for br in live {
                    if nxt_active(net, &br.bin) {
                        if seen.insert(br.bin.clone()) {
                            queue.push(br.bin.clone());
                        }
                    } else if steps < net.delta() {
                        next.extend(sim.step(br, None)?);
                    }
                }
                steps += 1;
                live = next;
            }
        }
    }
    sim.found.clear();
    Ok(seen.into_iter().collect())
}

/// Splits `[0, 1]` wherever a threshold or saturation decision along the
/// protocol runs over `words` depends on the initial analog value.
pub fn build_partition_refined(
    net: &Network,
    alphabet: &Alphabet,
    horizon: usize,
    words: &[Word],
    starts: &StartStates,
) -> Result<PartitionResult> {
    build_partition_refined_with_budget(net, alphabet, horizon, words, starts, DEFAULT_BUDGET)
}

pub fn build_partition_refined_with_budget(
    net: &Network,
    alphabet: &Alphabet,
    horizon: usize,
    words: &[Word],
    starts: &StartStates,
    budget: usize,
) -> Result<PartitionResult> {
    if horizon == 0 {
        return Err(Error::Horizon { have: 0, need: 1 });
    }
    let s = net.size();
    let starts: Vec<Vec<bool>> = match starts {
        StartStates::Reachable => reachable_snapshots(net, alphabet, budget)?,
        StartStates::All => {
            if s - 1 > MAX_ENUMERATED_STARTS {
                return Err(Error::Budget(format!("2^{} start states", s - 1)));
            }
            all_binary(s - 1)
        }
        StartStates::Explicit(v) => {
            if let Some(b) = v.iter().find(|b| b.len() != s - 1) {
                return Err(Error::Input(format!("start state of length {} for {} binary neurons", b.len(), s - 1)));
            }
            v.clone()
        }
    };
    let mut sim = SymSim::new(net, budget);
    for b in &starts {
        for word in words {
            let mut live = vec![Branch {
                iv: Interval::unit(),
                bin: b.clone(),
                analog: Analog::Affine(Rational::zero(), Rational::one()),
                t: 0,
                k: 0,
            }];
            for _ in 0..horizon {
                let mut next = Vec::new();
                for br in live {
                    let present = next_symbol(net, &br.bin, word, br.k);
                    next.extend(sim.step(br, present)?);
                }
                live = next;
            }
        }
    }
    let found = std::mem::take(&mut sim.found);
    Ok(PartitionResult::assemble(found, horizon, Method::Refined, starts))
}

/// `f_u`: for each start state and interval, the final verdict of `u` run
/// from a representative of the interval.
#[derive(Clone, Debug)]
pub struct ExtrapolationTable {
    pub word: Word,
    pub partition: IntervalPartition,
    pub starts: Vec<Vec<bool>>,
    /// `verdicts[i][r]` for `starts[i]` and interval `r`.
    pub verdicts: Vec<Vec<bool>>,
}

impl ExtrapolationTable {
    pub fn lookup(&self, start: &[bool], y: &Rational) -> Option<bool> {
        let i = self.starts.iter().position(|b| b == start)?;
        let r = self.partition.locate(y)?;
        Some(self.verdicts[i][r])
    }
}

/// Steps from a snapshot (nxt active) to the final verdict of `u`.
pub fn required_horizon(net: &Network, u: &Word) -> usize {
    net.delta() * (u.len() + 1) + net.output_delay()
}

/// Final verdict of `u` fed from `cfg`; a δ violation counts as reject.
pub fn extrapolate(net: &Network, cfg: &Configuration, u: &Word) -> Result<bool> {
    match accepts_from(net, cfg, u) {
        Ok(v) => Ok(v),
        Err(Error::DeltaViolation { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn extrapolation_table(
    net: &Network,
    alphabet: &Alphabet,
    part: &PartitionResult,
    u: &Word,
) -> Result<ExtrapolationTable> {
    if alphabet.len() != net.inputs().len() {
        return Err(Error::Input("alphabet does not match the input neurons".into()));
    }
    let need = required_horizon(net, u);
    if part.horizon < need {
        return Err(Error::Horizon { have: part.horizon, need });
    }
    if part.starts.is_empty() && net.size() > 1 {
        return Err(Error::Budget("partition carries no start states".into()));
    }
    let reps: Vec<Rational> = part.partition.intervals().iter().map(Interval::representative).collect();
    let mut verdicts = Vec::with_capacity(part.starts.len());
    for b in &part.starts {
        let mut row = Vec::with_capacity(reps.len());
        for y in &reps {
            let cfg = Configuration {
                binary: b.clone(),
                analog: y.clone(),
            };
            row.push(extrapolate(net, &cfg, u)?);
        }
        verdicts.push(row);
    }
    Ok(ExtrapolationTable {
        word: u.clone(),
        partition: part.partition.clone(),
        starts: part.starts.clone(),
        verdicts,
    })
}

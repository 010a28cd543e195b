//! Beta-expansions, cut languages and the 8-neuron acceptor `N(β, c)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder};
use crate::numerics::Rational;
use crate::protocol::{Alphabet, Word};

/// Base, threshold and digit values of a cut language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutParams {
    pub beta: Rational,
    pub c: Rational,
    pub digits: Vec<Rational>,
}

impl CutParams {
    pub fn new(beta: Rational, c: Rational, digits: Vec<Rational>) -> Result<Self> {
        if beta <= Rational::one() {
            return Err(Error::UnsupportedParameter(format!("base {beta} must exceed 1")));
        }
        if digits.is_empty() {
            return Err(Error::UnsupportedParameter("empty digit set".into()));
        }
        for (k, d) in digits.iter().enumerate() {
            if digits[..k].contains(d) {
                return Err(Error::UnsupportedParameter(format!("duplicate digit {d}")));
            }
        }
        Ok(CutParams { beta, c, digits })
    }

    /// Digits `{0, 1}`. Panics if `beta <= 1`.
    pub fn binary(beta: Rational, c: Rational) -> Self {
        Self::new(beta, c, vec![Rational::zero(), Rational::one()]).expect("base must exceed 1")
    }

    /// `ν = Σ_{k≥1} β^{-k} = 1 / (β - 1)`.
    pub fn nu(&self) -> Rational {
        (self.beta.clone() - Rational::one()).recip().expect("beta > 1")
    }

    /// Range of values an infinite tail can take: `[ν·min(A, 0), ν·max(A)]`.
    pub fn window(&self) -> (Rational, Rational) {
        let nu = self.nu();
        let lo = self.digits.iter().min().cloned().unwrap().min(Rational::zero());
        let hi = self.digits.iter().max().cloned().unwrap();
        (nu.clone() * lo, nu * hi)
    }
}

/// `Σ x_k β^{-k}`; with `reversed` the last symbol carries `β^{-1}`.
pub fn beta_value(word: &Word, params: &CutParams, reversed: bool) -> Rational {
    let inv = params.beta.recip().expect("beta > 1");
    let mut weight = inv.clone();
    let mut sum = Rational::zero();
    let n = word.len();
    for k in 0..n {
        let x = if reversed { word.0[n - 1 - k] } else { word.0[k] };
        sum = sum + &params.digits[x] * &weight;
        weight = weight * &inv;
    }
    sum
}

/// Membership in the cut language `{w : value(w) < c}`.
pub fn cut_member(word: &Word, params: &CutParams, reversed: bool) -> bool {
    beta_value(word, params, reversed) < params.c
}

/// Builds `N(β, c)`: neurons 1, 2 read the symbols `0`, `1`; 3 = nxt, 4 and
/// 5 close the clock cycle, 6 compares, 7 = out, 8 is analog.
pub fn build_cut_acceptor(params: &CutParams) -> Result<Network> {
    if params.digits != [Rational::zero(), Rational::one()] {
        return Err(Error::UnsupportedParameter(
            "the acceptor network is defined for digits {0, 1} only".into(),
        ));
    }
    let beta = &params.beta;
    let rho = beta.cube_root().ok_or_else(|| {
        Error::UnsupportedParameter(format!("base {beta} is not the cube of a rational"))
    })?;
    let one = Rational::one();
    let minus = -Rational::one();
    let mut b = NetworkBuilder::new(8);
    b.inputs(vec![1, 2]).nxt(3).out(7).delta(3).output_delay(0);
    b.alphabet(Alphabet::binary());
    b.weight(8, 2, (beta.clone() - one.clone()) / beta.clone());
    b.weight(8, 8, rho.recip()?);
    for (to, from) in [(4, 3), (5, 4), (3, 5), (6, 5), (6, 8), (7, 3)] {
        b.weight(to, from, one.clone());
    }
    b.weight(7, 6, minus.clone());
    b.bias(6, minus.clone() - (beta.clone() - one) * params.c.clone());
    for j in [3, 4, 5, 7] {
        b.bias(j, minus.clone());
    }
    // out(1) = 1 - y_6(0) decides the empty word, whose value 0 is below c iff c > 0
    if params.c.is_positive() {
        b.init_active(vec![3]);
    } else {
        b.init_active(vec![3, 6]);
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpKind {
    QuasiPeriodicCertificate,
    NotQuasiPeriodicWitness,
    NoExpansion,
    Unknown,
}

impl fmt::Display for QpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QpKind::QuasiPeriodicCertificate => "quasi-periodic",
            QpKind::NotQuasiPeriodicWitness => "not-quasi-periodic",
            QpKind::NoExpansion => "no-expansion",
            QpKind::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QpEvidence {
    /// `layers[k]`: distinct valid remainders after `k` digits; the last layer is empty.
    DeadTree { layers: Vec<Vec<Rational>> },
    /// Every remainder reachable inside the window, closed under valid
    /// digits, together with one cycle among them.
    Cycle { states: Vec<Rational>, cycle: Vec<Rational> },
    /// `r_n = c_n / (b·Q^n)` with `c_n` coprime to `b·Q`, for `β = P/Q`;
    /// some branch was still valid at `alive_depth`.
    DenominatorGrowth { p: BigInt, q: BigInt, b: BigInt, alive_depth: usize },
    Inconclusive { depth: usize, frontier: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpVerdict {
    pub kind: QpKind,
    pub evidence: QpEvidence,
}

impl fmt::Display for QpVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict\t{}", self.kind)?;
        match &self.evidence {
            QpEvidence::DeadTree { layers } => {
                for (k, layer) in layers.iter().enumerate() {
                    let items: Vec<String> = layer.iter().map(|r| r.to_string()).collect();
                    writeln!(f, "r_{k}\t{{{}}}", items.join(", "))?;
                }
            }
            QpEvidence::Cycle { states, cycle } => {
                let s: Vec<String> = states.iter().map(|r| r.to_string()).collect();
                let c: Vec<String> = cycle.iter().map(|r| r.to_string()).collect();
                writeln!(f, "states\t{{{}}}", s.join(", "))?;
                writeln!(f, "cycle\t{}", c.join(" -> "))?;
            }
            QpEvidence::DenominatorGrowth { p, q, b, alive_depth } => {
                writeln!(f, "invariant\tr_n = c_n/({b}*{q}^n), gcd(c_n, {b}*{q}) = 1, beta = {p}/{q}")?;
                writeln!(f, "alive\tdepth {alive_depth}")?;
            }
            QpEvidence::Inconclusive { depth, frontier } => {
                writeln!(f, "explored\tdepth {depth}, frontier {frontier}")?;
            }
        }
        Ok(())
    }
}

const FRONTIER_CAP: usize = 1 << 16;

fn successors(params: &CutParams, r: &Rational) -> Vec<Rational> {
    let (lo, hi) = params.window();
    params
        .digits
        .iter()
        .map(|x| params.beta.clone() * r.clone() - x.clone())
        .filter(|n| *n >= lo && *n <= hi)
        .collect()
}

/// The one-step symbolic check: with `β = P/Q` in lowest terms, integer
/// digits, `Q > 1` and `gcd(P, b) = 1` where `b` is the denominator of `c`,
/// `r_n = c_n/(b·Q^n)` with `gcd(c_n, b·Q) = 1` is preserved by
/// `r ↦ β r − x`, since `P c_n − x b Q^{n+1}` is congruent to `P c_n` modulo
/// every prime of `b·Q`.
pub fn denominator_invariant(params: &CutParams) -> Option<(BigInt, BigInt, BigInt)> {
    let p = params.beta.numer().clone();
    let q = params.beta.denom().clone();
    let b = params.c.denom().clone();
    let numer_c = params.c.numer().clone();
    let ok = q > BigInt::one()
        && params.digits.iter().all(Rational::is_integer)
        && p.gcd(&q).is_one()
        && p.gcd(&b).is_one()
        && numer_c.gcd(&(&b * &q)).is_one();
    ok.then_some((p, q, b))
}

/// `r_0 = c`, `r_{n+1} = β r_n − x_{n+1}` along `digits`, without the window.
pub fn remainder_orbit(params: &CutParams, digits: &[usize]) -> Vec<Rational> {
    let mut out = vec![params.c.clone()];
    for &x in digits {
        let r = params.beta.clone() * out.last().unwrap().clone() - params.digits[x].clone();
        out.push(r);
    }
    out
}

/// Explores the remainder orbit of `c` to `depth` digits.
pub fn qp_explore(params: &CutParams, depth: usize) -> QpVerdict {
    let depth = depth.max(1);
    let (lo, hi) = params.window();
    if params.c < lo || params.c > hi {
        return QpVerdict {
            kind: QpKind::NoExpansion,
            evidence: QpEvidence::DeadTree { layers: vec![Vec::new()] },
        };
    }
    let mut layers: Vec<BTreeSet<Rational>> = vec![[params.c.clone()].into_iter().collect()];
    let mut seen: BTreeSet<Rational> = layers[0].clone();
    let mut edges: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
    let mut closed_at = None;
    for _ in 0..depth {
        let cur = layers.last().unwrap();
        let mut next = BTreeSet::new();
        let mut fresh = false;
        for r in cur {
            let succ = successors(params, r);
            for n in &succ {
                fresh |= !seen.contains(n);
                next.insert(n.clone());
            }
            edges.insert(r.clone(), succ);
        }
        if next.is_empty() {
            layers.push(next);
            return QpVerdict {
                kind: QpKind::NoExpansion,
                evidence: QpEvidence::DeadTree {
                    layers: layers.into_iter().map(|l| l.into_iter().collect()).collect(),
                },
            };
        }
        if next.len() > FRONTIER_CAP {
            layers.push(next);
            break;
        }
        seen.extend(next.iter().cloned());
        layers.push(next);
        if !fresh && seen.iter().all(|r| edges.contains_key(r)) {
            closed_at = Some(layers.len());
            break;
        }
    }
    if closed_at.is_some() {
        if let Some(cycle) = find_cycle(&edges, &params.c) {
            return QpVerdict {
                kind: QpKind::QuasiPeriodicCertificate,
                evidence: QpEvidence::Cycle {
                    states: seen.into_iter().collect(),
                    cycle,
                },
            };
        }
    }
    let alive_depth = layers.len() - 1;
    if let Some((p, q, b)) = denominator_invariant(params) {
        return QpVerdict {
            kind: QpKind::NotQuasiPeriodicWitness,
            evidence: QpEvidence::DenominatorGrowth { p, q, b, alive_depth },
        };
    }
    QpVerdict {
        kind: QpKind::Unknown,
        evidence: QpEvidence::Inconclusive {
            depth: alive_depth,
            frontier: layers.last().map_or(0, BTreeSet::len),
        },
    }
}

fn find_cycle(edges: &BTreeMap<Rational, Vec<Rational>>, start: &Rational) -> Option<Vec<Rational>> {
    // iterative DFS with an explicit path stack
    let mut state: BTreeMap<&Rational, u8> = BTreeMap::new();
    let mut path: Vec<(&Rational, usize)> = vec![(start, 0)];
    state.insert(start, 1);
    while let Some((node, k)) = path.last_mut() {
        let node: &Rational = node;
        let succ = edges.get(node).map(Vec::as_slice).unwrap_or(&[]);
        if *k < succ.len() {
            let n = &succ[*k];
            *k += 1;
            match state.get(n) {
                Some(1) => {
                    let from = path.iter().position(|(r, _)| *r == n).unwrap();
                    let mut cycle: Vec<Rational> = path[from..].iter().map(|(r, _)| (*r).clone()).collect();
                    cycle.push(n.clone());
                    return Some(cycle);
                }
                Some(_) => {}
                None => {
                    state.insert(n, 1);
                    path.push((n, 0));
                }
            }
        } else {
            state.insert(node, 2);
            path.pop();
        }
    }
    None
}

/// Re-verifies the evidence of a verdict from scratch.
pub fn replay(params: &CutParams, verdict: &QpVerdict) -> bool {
    let (lo, hi) = params.window();
    let inside = |r: &Rational| *r >= lo && *r <= hi;
    let step_ok = |a: &Rational, b: &Rational| {
        inside(b) && params.digits.iter().any(|x| params.beta.clone() * a.clone() - x.clone() == *b)
    };
    match (&verdict.kind, &verdict.evidence) {
        (QpKind::NoExpansion, QpEvidence::DeadTree { layers }) => {
            if layers.len() == 1 {
                return !inside(&params.c);
            }
            if layers[0] != [params.c.clone()] || !layers.last().unwrap().is_empty() {
                return false;
            }
            layers.windows(2).all(|w| {
                let expect: BTreeSet<Rational> = w[0].iter().flat_map(|r| successors(params, r)).collect();
                expect == w[1].iter().cloned().collect()
            })
        }
        (QpKind::QuasiPeriodicCertificate, QpEvidence::Cycle { states, cycle }) => {
            let set: BTreeSet<&Rational> = states.iter().collect();
            set.contains(&params.c)
                && states.iter().all(|r| {
                    inside(r)
                        && params.digits.iter().all(|x| {
                            let n = params.beta.clone() * r.clone() - x.clone();
                            !inside(&n) || set.contains(&n)
                        })
                })
                && cycle.len() >= 2
                && cycle.first() == cycle.last()
                && cycle.windows(2).all(|w| step_ok(&w[0], &w[1]))
                && cycle.iter().all(|r| set.contains(r))
        }
        (QpKind::NotQuasiPeriodicWitness, QpEvidence::DenominatorGrowth { p, q, b, .. }) => {
            denominator_invariant(params).as_ref() == Some(&(p.clone(), q.clone(), b.clone()))
        }
        (QpKind::Unknown, QpEvidence::Inconclusive { .. }) => true,
        _ => false,
    }
}

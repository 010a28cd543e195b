//! The 1ANN machine model: `s` neurons, the last of which is analog.
//!
//! Neuron indices are 1-based as in the usual presentation; index 0 in a
//! weight denotes the bias (the formal constant input `y_0 = 1`).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::protocol::Alphabet;

/// Full network state: `s - 1` binary outputs and one analog output in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    /// `binary[i - 1]` is the state of neuron `i`.
    pub binary: Vec<bool>,
    pub analog: Rational,
}

impl Configuration {
    pub fn zeros(size: usize) -> Self {
        Configuration {
            binary: vec![false; size.saturating_sub(1)],
            analog: Rational::zero(),
        }
    }

    /// Binary state of neuron `i` (`1 <= i < s`).
    pub fn bit(&self, i: usize) -> bool {
        self.binary[i - 1]
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        self.binary[i - 1] = value;
    }

    /// Output of neuron `i` as a rational (the analog unit included).
    pub fn value(&self, i: usize) -> Rational {
        if i == self.binary.len() + 1 {
            self.analog.clone()
        } else if self.bit(i) {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// Indices of the active binary neurons.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.binary
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| k + 1)
    }
}

/// A structural problem found by [`Network::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyNetwork,
    InputNotBinary(usize),
    DuplicateInput(usize),
    NxtNotBinary(usize),
    OutNotBinary(usize),
    DeltaZero,
    AlphabetSize { symbols: usize, inputs: usize },
    WeightIndex { to: usize, from: usize },
    InitLength { expected: usize, found: usize },
    InitAnalogOutOfRange(Rational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNetwork => write!(f, "network needs at least two neurons"),
            Violation::InputNotBinary(i) => write!(f, "input must be binary (neuron {i})"),
            Violation::DuplicateInput(i) => write!(f, "input neuron {i} listed twice"),
            Violation::NxtNotBinary(i) => write!(f, "nxt must be binary (neuron {i})"),
            Violation::OutNotBinary(i) => write!(f, "out must be binary (neuron {i})"),
            Violation::DeltaZero => write!(f, "delta must be at least 1"),
            Violation::AlphabetSize { symbols, inputs } => {
                write!(f, "alphabet has {symbols} symbols but {inputs} input neurons")
            }
            Violation::WeightIndex { to, from } => write!(f, "weight w[{to},{from}] out of range"),
            Violation::InitLength { expected, found } => {
                write!(f, "initial state has {found} binary entries, expected {expected}")
            }
            Violation::InitAnalogOutOfRange(r) => write!(f, "initial analog state {r} outside [0,1]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    size: usize,
    /// `rows[j - 1]`: nonzero incoming weights of neuron `j`, sorted by source.
    rows: Vec<Vec<(usize, Rational)>>,
    inputs: Vec<usize>,
    nxt: usize,
    out: usize,
    delta: usize,
    output_delay: usize,
    alphabet: Alphabet,
    init: Configuration,
}

impl Network {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Index of the analog unit, always the last neuron.
    pub fn analog(&self) -> usize {
        self.size
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn nxt(&self) -> usize {
        self.nxt
    }

    pub fn out(&self) -> usize {
        self.out
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn output_delay(&self) -> usize {
        self.output_delay
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &Configuration {
        &self.init
    }

    /// `w_{ji}`; zero for absent edges.
    pub fn weight(&self, j: usize, i: usize) -> Rational {
        self.rows
            .get(j.wrapping_sub(1))
            .and_then(|row| row.binary_search_by_key(&i, |(k, _)| *k).ok().map(|p| row[p].1.clone()))
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero incoming weights of neuron `j`, bias first.
    pub fn row(&self, j: usize) -> &[(usize, Rational)] {
        &self.rows[j - 1]
    }

    /// All nonzero weights as `(to, from, w)`, sorted.
    pub fn weights(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().map(move |(i, w)| (j + 1, *i, w)))
    }

    pub fn is_input(&self, i: usize) -> bool {
        self.inputs.contains(&i)
    }

    /// Checks the structural invariants and reports every violation.
    pub fn validate(&self) -> Vec<Violation> {
        let s = self.size;
        let mut out = Vec::new();
        if s < 2 {
            out.push(Violation::EmptyNetwork);
        }
        let binary = |i: usize| i >= 1 && i < s;
        for (k, &i) in self.inputs.iter().enumerate() {
            if !binary(i) {
                out.push(Violation::InputNotBinary(i));
            }
            if self.inputs[..k].contains(&i) {
                out.push(Violation::DuplicateInput(i));
            }
        }
        if !binary(self.nxt) {
            out.push(Violation::NxtNotBinary(self.nxt));
        }
        if !binary(self.out) {
            out.push(Violation::OutNotBinary(self.out));
        }
        if self.delta == 0 {
            out.push(Violation::DeltaZero);
        }
        if self.alphabet.len() != self.inputs.len() {
            out.push(Violation::AlphabetSize {
                symbols: self.alphabet.len(),
                inputs: self.inputs.len(),
            });
        }
        for (j, row) in self.rows.iter().enumerate() {
            for (i, _) in row {
                if *i > s {
                    out.push(Violation::WeightIndex { to: j + 1, from: *i });
                }
            }
        }
        if self.rows.len() != s {
            out.push(Violation::WeightIndex { to: self.rows.len(), from: 0 });
        }
        if self.init.binary.len() != s.saturating_sub(1) {
            out.push(Violation::InitLength {
                expected: s.saturating_sub(1),
                found: self.init.binary.len(),
            });
        }
        if self.init.analog.is_negative() || self.init.analog > Rational::one() {
            out.push(Violation::InitAnalogOutOfRange(self.init.analog.clone()));
        }
        out
    }

    /// Copy with a different initial configuration.
    pub fn with_initial(mut self, init: Configuration) -> Result<Self> {
        self.init = init;
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidNetwork(v))
        }
    }

    /// Input vector (over `X`, in alphabet order) currently held by `cfg`.
    pub fn inputs_of(&self, cfg: &Configuration) -> Vec<bool> {
        self.inputs.iter().map(|&i| cfg.bit(i)).collect()
    }
}

/// Accumulates weights and protocol metadata, then validates.
#[derive(Clone, Debug)]
pub struct NetworkBuilder {
    size: usize,
    weights: BTreeMap<(usize, usize), Rational>,
    inputs: Vec<usize>,
    nxt: usize,
    out: usize,
    delta: usize,
    output_delay: usize,
    alphabet: Option<Alphabet>,
    init_active: Option<Vec<usize>>,
    init_analog: Rational,
}

impl NetworkBuilder {
    pub fn new(size: usize) -> Self {
        NetworkBuilder {
            size,
            weights: BTreeMap::new(),
            inputs: Vec::new(),
            nxt: 0,
            out: 0,
            delta: 1,
            output_delay: 0,
            alphabet: None,
            init_active: None,
            init_analog: Rational::zero(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Sets `w_{to,from}`, replacing any earlier value; zero removes the edge.
    pub fn weight(&mut self, to: usize, from: usize, w: Rational) -> &mut Self {
        if w.is_zero() {
            self.weights.remove(&(to, from));
        } else {
            self.weights.insert((to, from), w);
        }
        self
    }

    pub fn bias(&mut self, to: usize, w: Rational) -> &mut Self {
        self.weight(to, 0, w)
    }

    pub fn get_weight(&self, to: usize, from: usize) -> Rational {
        self.weights.get(&(to, from)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn inputs(&mut self, inputs: Vec<usize>) -> &mut Self {
        self.inputs = inputs;
        self
    }

    pub fn nxt(&mut self, nxt: usize) -> &mut Self {
        self.nxt = nxt;
        self
    }

    pub fn out(&mut self, out: usize) -> &mut Self {
        self.out = out;
        self
    }

    pub fn delta(&mut self, delta: usize) -> &mut Self {
        self.delta = delta;
        self
    }

    pub fn output_delay(&mut self, d: usize) -> &mut Self {
        self.output_delay = d;
        self
    }

    pub fn alphabet(&mut self, alphabet: Alphabet) -> &mut Self {
        self.alphabet = Some(alphabet);
        self
    }

    /// Binary neurons active at `t = 0`; defaults to `{nxt}`.
    pub fn init_active(&mut self, active: Vec<usize>) -> &mut Self {
        self.init_active = Some(active);
        self
    }

    pub fn init_analog(&mut self, y: Rational) -> &mut Self {
        self.init_analog = y;
        self
    }

    /// Assembles the network without checking invariants.
    pub fn build_unchecked(&self) -> Network {
        let s = self.size;
        let mut rows = vec![Vec::new(); s];
        for (&(j, i), w) in &self.weights {
            if (1..=s).contains(&j) {
                rows[j - 1].push((i, w.clone()));
            } else {
                // keep out-of-range targets visible to validate()
                rows.push(vec![(i, w.clone())]);
            }
        }
        let mut init = Configuration::zeros(s);
        init.analog = self.init_analog.clone();
        let active = self.init_active.clone().unwrap_or_else(|| vec![self.nxt]);
        for i in active {
            if i >= 1 && i < s {
                init.set_bit(i, true);
            } else {
                init.binary.push(true);
            }
        }
        let alphabet = self
            .alphabet
            .clone()
            .unwrap_or_else(|| Alphabet::numbered(self.inputs.len()));
        Network {
            size: s,
            rows,
            inputs: self.inputs.clone(),
            nxt: self.nxt,
            out: self.out,
            delta: self.delta,
            output_delay: self.output_delay,
            alphabet,
            init,
        }
    }

    pub fn build(&self) -> Result<Network> {
        let net = self.build_unchecked();
        let violations = net.validate();
        if violations.is_empty() {
            Ok(net)
        } else {
            Err(Error::InvalidNetwork(violations))
        }
    }
}

/// `xi_j = w_{j0} + sum_i w_{ji} y_i`, with the input neurons reading `inputs`.
pub fn excitation(net: &Network, cfg: &Configuration, inputs: &[bool], j: usize) -> Rational {
    let s = net.size();
    let mut xi = Rational::zero();
    for (i, w) in net.row(j) {
        let active = if *i == 0 {
            true
        } else if *i == s {
            xi = xi + w * &cfg.analog;
            continue;
        } else if let Some(pos) = net.inputs().iter().position(|x| x == i) {
            inputs[pos]
        } else {
            cfg.bit(*i)
        };
        if active {
            xi = xi + w;
        }
    }
    xi
}

/// Heaviside: 1 iff `xi >= 0`.
pub fn heaviside(xi: &Rational) -> bool {
    !xi.is_negative()
}

/// Saturated-linear activation clipped to `[0, 1]`.
pub fn saturate(xi: Rational) -> Rational {
    if xi.is_negative() {
        Rational::zero()
    } else if xi >= Rational::one() {
        Rational::one()
    } else {
        xi
    }
}

/// One synchronous fully parallel update. Input neurons come out as 0; the
/// protocol runner clamps them at query instants.
pub fn step(net: &Network, cfg: &Configuration, inputs: &[bool]) -> Configuration {
    let s = net.size();
    let mut next = Configuration::zeros(s);
    for j in 1..s {
        if net.is_input(j) {
            continue;
        }
        next.set_bit(j, heaviside(&excitation(net, cfg, inputs, j)));
    }
    next.analog = saturate(excitation(net, cfg, inputs, s));
    next
}

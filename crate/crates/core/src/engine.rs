//! Compiled stepper. Each row is scaled by the lcm of its denominators so the
//! binary part of the excitation accumulates in `i64`; the analog term is
//! compared exactly with big integers. Rows whose scaled weights do not fit
//! fall back to the rational reference path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::network::{excitation, heaviside, saturate, Configuration, Network};
use crate::numerics::{lcm_of_denominators, Rational};

const ACC_LIMIT: i128 = (i64::MAX / 2) as i128;

#[derive(Clone, Debug)]
pub struct Engine<'a> {
    net: &'a Network,
    /// `fan_out[i]`: scaled weights `(j, W_ji)` leaving binary source `i` (0 = bias).
    fan_out: Vec<Vec<(usize, i64)>>,
    /// Per row `j`: `Some((L_j, W_js))` when the row is compiled.
    compiled: Vec<Option<(BigInt, BigInt)>>,
    input_pos: Vec<Option<usize>>,
}

impl<'a> Engine<'a> {
    pub fn new(net: &'a Network) -> Self {
        let s = net.size();
        let mut fan_out = vec![Vec::new(); s];
        let mut compiled = vec![None; s + 1];
        let mut input_pos = vec![None; s + 1];
        for (k, &i) in net.inputs().iter().enumerate() {
            input_pos[i] = Some(k);
        }
        for j in 1..=s {
            if j < s && input_pos[j].is_some() {
                continue;
            }
            let row = net.row(j);
            let scale = lcm_of_denominators(row.iter().map(|(_, w)| w));
            let mut scaled = Vec::new();
            let mut total: i128 = 0;
            let mut analog = BigInt::zero();
            let mut fits = true;
            for (i, w) in row {
                let big = w.numer() * (&scale / w.denom());
                if *i == s {
                    analog = big;
                    continue;
                }
                match big.to_i64() {
                    Some(v) => {
                        total += (v as i128).abs();
                        scaled.push((*i, v));
                    }
                    None => fits = false,
                }
            }
            if fits && total <= ACC_LIMIT {
                for (i, v) in scaled {
                    fan_out[i].push((j, v));
                }
                compiled[j] = Some((scale, analog));
            }
        }
        Engine { net, fan_out, compiled, input_pos }
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    /// Same contract as [`crate::network::step`].
    pub fn step(&self, cur: &Configuration, inputs: &[bool]) -> Configuration {
        let s = self.net.size();
        let mut acc = vec![0i64; s + 1];
        let active = |i: usize| match self.input_pos[i] {
            Some(k) => inputs[k],
            None => cur.bit(i),
        };
        for (j, w) in &self.fan_out[0] {
            acc[*j] += w;
        }
        for i in 1..s {
            if active(i) {
                for (j, w) in &self.fan_out[i] {
                    acc[*j] += w;
                }
            }
        }
        let y = &cur.analog;
        let mut next = Configuration::zeros(s);
        for j in 1..s {
            if self.input_pos[j].is_some() {
                continue;
            }
            let fire = match &self.compiled[j] {
                Some((_, wjs)) => {
                    if wjs.is_zero() || y.is_zero() {
                        acc[j] >= 0
                    } else {
                        let lhs = BigInt::from(acc[j]) * y.denom() + wjs * y.numer();
                        !lhs.is_negative()
                    }
                }
                None => heaviside(&excitation(self.net, cur, inputs, j)),
            };
            next.set_bit(j, fire);
        }
        next.analog = match &self.compiled[s] {
            Some((scale, wss)) => {
                let num = BigInt::from(acc[s]) * y.denom() + wss * y.numer();
                let den = scale * y.denom();
                saturate(Rational::from(BigRational::new(num, den)))
            }
            None => saturate(excitation(self.net, cur, inputs, s)),
        };
        next
    }
}

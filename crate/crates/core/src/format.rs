//! The `anet v1` text format.
//!
//! ```text
//! anet v1
//! size 8
//! analog 8
//! inputs 1 2
//! nxt 3
//! out 7
//! delta 3
//! outdelay 0
//! alphabet 0 1
//! init 3
//! initanalog 0
//! w 3 0 -1
//! ```
//!
//! `outdelay`, `alphabet`, `init` and `initanalog` are optional. One `w j i
//! p/q` line per nonzero weight; `i = 0` is the bias. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder};
use crate::numerics::Rational;
use crate::protocol::Alphabet;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn one_usize(fields: &[&str], line: usize) -> Result<usize> {
    if fields.len() != 2 {
        return Err(perr(line, format!("{} takes one value", fields[0])));
    }
    fields[1]
        .parse()
        .map_err(|_| perr(line, format!("bad integer {:?}", fields[1])))
}

fn usize_list(fields: &[&str], line: usize) -> Result<Vec<usize>> {
    fields[1..]
        .iter()
        .map(|f| f.parse().map_err(|_| perr(line, format!("bad integer {f:?}"))))
        .collect()
}

pub fn parse_anet(text: &str) -> Result<Network> {
    let mut header = false;
    let mut size = None;
    let mut analog = None;
    let mut inputs = None;
    let mut nxt = None;
    let mut out = None;
    let mut delta = None;
    let mut outdelay = 0;
    let mut alphabet = None;
    let mut init = None;
    let mut initanalog = Rational::zero();
    let mut weights: Vec<(usize, usize, usize, Rational)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !header {
            if fields != ["anet", "v1"] {
                return Err(perr(line, "expected header \"anet v1\""));
            }
            header = true;
            continue;
        }
        match fields[0] {
            "size" => size = Some(one_usize(&fields, line)?),
            "analog" => analog = Some(one_usize(&fields, line)?),
            "inputs" => inputs = Some(usize_list(&fields, line)?),
            "nxt" => nxt = Some(one_usize(&fields, line)?),
            "out" => out = Some(one_usize(&fields, line)?),
            "delta" => delta = Some(one_usize(&fields, line)?),
            "outdelay" => outdelay = one_usize(&fields, line)?,
            "alphabet" => {
                alphabet = Some(
                    Alphabet::new(fields[1..].iter().copied())
                        .map_err(|e| perr(line, e.to_string()))?,
                )
            }
            "init" => init = Some(usize_list(&fields, line)?),
            "initanalog" => {
                if fields.len() != 2 {
                    return Err(perr(line, "initanalog takes one value"));
                }
                initanalog = fields[1].parse().map_err(|e: Error| perr(line, e.to_string()))?;
            }
            "w" => {
                if fields.len() != 4 {
                    return Err(perr(line, "expected: w j i p/q"));
                }
                let j = fields[1].parse().map_err(|_| perr(line, "bad target index"))?;
                let i = fields[2].parse().map_err(|_| perr(line, "bad source index"))?;
                let w: Rational = fields[3].parse().map_err(|e: Error| perr(line, e.to_string()))?;
                weights.push((line, j, i, w));
            }
            other => return Err(perr(line, format!("unknown directive {other:?}"))),
        }
    }
    if !header {
        return Err(perr(0, "empty network file"));
    }
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| perr(0, format!("missing {name}")));
    let size = need(size, "size")?;
    let analog = need(analog, "analog")?;
    if analog != size {
        return Err(perr(0, format!("analog unit must be the last neuron ({size}), got {analog}")));
    }
    let mut b = NetworkBuilder::new(size);
    b.inputs(inputs.ok_or_else(|| perr(0, "missing inputs"))?)
        .nxt(need(nxt, "nxt")?)
        .out(need(out, "out")?)
        .delta(need(delta, "delta")?)
        .output_delay(outdelay)
        .init_analog(initanalog);
    if let Some(a) = alphabet {
        b.alphabet(a);
    }
    if let Some(i) = init {
        b.init_active(i);
    }
    let mut seen = std::collections::BTreeSet::new();
    for (line, j, i, w) in weights {
        if j == 0 || j > size || i > size {
            return Err(perr(line, format!("weight index ({j},{i}) out of range")));
        }
        if !seen.insert((j, i)) {
            return Err(perr(line, format!("duplicate weight ({j},{i})")));
        }
        b.weight(j, i, w);
    }
    b.build()
}

/// Canonical rendering; every optional field is written explicitly.
pub fn write_anet(net: &Network) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "anet v1");
    let _ = writeln!(s, "size {}", net.size());
    let _ = writeln!(s, "analog {}", net.analog());
    let inputs: Vec<String> = net.inputs().iter().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "inputs {}", inputs.join(" "));
    let _ = writeln!(s, "nxt {}", net.nxt());
    let _ = writeln!(s, "out {}", net.out());
    let _ = writeln!(s, "delta {}", net.delta());
    let _ = writeln!(s, "outdelay {}", net.output_delay());
    let _ = writeln!(s, "alphabet {}", net.alphabet().symbols().join(" "));
    let init: Vec<String> = net.initial().active().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "{}", format!("init {}", init.join(" ")).trim_end());
    let _ = writeln!(s, "initanalog {}", net.initial().analog);
    for (j, i, w) in net.weights() {
        let _ = writeln!(s, "w {j} {i} {w}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::{build_cut_acceptor, CutParams};
    use crate::numerics::ratio;

    #[test]
    fn round_trip_is_exact() {
        let net = build_cut_acceptor(&CutParams::binary(ratio(27, 8), ratio(1, 4))).unwrap();
        let text = write_anet(&net);
        let back = parse_anet(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(write_anet(&back), text);
        assert!(text.contains("w 6 0 -51/32\n"));
    }

    #[test]
    fn defaults_and_comments() {
        let text = "# tiny\nanet v1\nsize 3\nanalog 3\ninputs 1\nnxt 2\nout 2\ndelta 1\nw 2 0 0 # zero edge\nw 3 3 1/2\n";
        let net = parse_anet(text).unwrap();
        assert_eq!(net.output_delay(), 0);
        assert!(net.initial().bit(2));
        assert_eq!(net.weight(3, 3), ratio(1, 2));
        assert_eq!(net.weights().count(), 1);
        assert_eq!(net.alphabet().symbols(), ["0"]);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "anet v1\nsize 3\nanalog 3\ninputs 1\nnxt 2\nout 2\ndelta 1\nw 2 0 1/0\n";
        assert!(matches!(parse_anet(bad), Err(Error::Parse { line: 8, .. })));
        let dup = "anet v1\nsize 3\nanalog 3\ninputs 1\nnxt 2\nout 2\ndelta 1\nw 2 0 1\nw 2 0 2\n";
        assert!(matches!(parse_anet(dup), Err(Error::Parse { line: 9, .. })));
        assert!(matches!(parse_anet("anet v2\n"), Err(Error::Parse { line: 1, .. })));
        let invalid = "anet v1\nsize 3\nanalog 3\ninputs 1\nnxt 2\nout 3\ndelta 0\n";
        assert!(matches!(parse_anet(invalid), Err(Error::InvalidNetwork(v)) if v.len() == 2));
    }
}

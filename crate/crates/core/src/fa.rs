//! Mealy machines and their compilation into binary-state networks.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder};
use crate::numerics::Rational;
use crate::protocol::{Alphabet, Word};

/// Deterministic finite-state transducer with an optional accepting predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyMachine {
    pub states: Vec<String>,
    pub initial: usize,
    pub input: Alphabet,
    pub output: Alphabet,
    /// `delta[p][a] = (next state, emission)`.
    pub delta: Vec<Vec<(usize, Word)>>,
    pub accepting: Option<Vec<bool>>,
}

impl MealyMachine {
    /// Checks totality and index ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 || self.initial >= n {
            return Err(Error::Construction("machine needs a valid initial state".into()));
        }
        if self.delta.len() != n {
            return Err(Error::Construction("transition table does not cover every state".into()));
        }
        for (p, row) in self.delta.iter().enumerate() {
            if row.len() != self.input.len() {
                return Err(Error::Construction(format!(
                    "state {} has {} transitions, expected {}",
                    self.states[p],
                    row.len(),
                    self.input.len()
                )));
            }
            for (next, emit) in row {
                if *next >= n || emit.0.iter().any(|&b| b >= self.output.len()) {
                    return Err(Error::Construction(format!("bad transition from {}", self.states[p])));
                }
            }
        }
        if let Some(acc) = &self.accepting {
            if acc.len() != n {
                return Err(Error::Construction("accepting flags do not cover every state".into()));
            }
        }
        Ok(())
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.as_ref().is_some_and(|a| a[state])
    }

    /// Acceptor over `input` from a plain transition table.
    pub fn dfa(
        states: &[&str],
        input: Alphabet,
        table: &[&[usize]],
        accepting: &[bool],
    ) -> Result<Self> {
        let m = MealyMachine {
            states: states.iter().map(|s| s.to_string()).collect(),
            initial: 0,
            output: input.clone(),
            input,
            delta: table
                .iter()
                .map(|row| row.iter().map(|&q| (q, Word::empty())).collect())
                .collect(),
            accepting: Some(accepting.to_vec()),
        };
        m.validate()?;
        Ok(m)
    }

    /// Binary words with an even number of `1`s.
    pub fn even_parity() -> Self {
        Self::dfa(&["even", "odd"], Alphabet::binary(), &[&[0, 1], &[1, 0]], &[true, false]).unwrap()
    }

    pub fn accept_all(input: Alphabet) -> Self {
        let q = input.len();
        let row = vec![0; q];
        Self::dfa(&["all"], input, &[&row], &[true]).unwrap()
    }

    pub fn reject_all(input: Alphabet) -> Self {
        let q = input.len();
        let row = vec![0; q];
        Self::dfa(&["trap"], input, &[&row], &[false]).unwrap()
    }

    /// `{a^k b^n : k ≥ 1, k ≡ n (mod 3)}` over `{a, b}`.
    pub fn mod3_ab() -> Self {
        // 0 start, 1..=3 a-count k mod 3 (k ≥ 1), 4..=6 (k − n) mod 3 after a b, 7 dead
        let a = |i: usize| 1 + (i + 1) % 3;
        let mut table: Vec<Vec<usize>> = vec![vec![a(0), 7]];
        for i in 0..3 {
            table.push(vec![a(i), 4 + (i + 2) % 3]);
        }
        for d in 0..3 {
            table.push(vec![7, 4 + (d + 2) % 3]);
        }
        table.push(vec![7, 7]);
        let rows: Vec<&[usize]> = table.iter().map(Vec::as_slice).collect();
        let input = Alphabet::new(["a", "b"]).unwrap();
        Self::dfa(
            &["start", "a0", "a1", "a2", "b0", "b1", "b2", "dead"],
            input,
            &rows,
            &[false, true, false, false, true, false, false, false],
        )
        .unwrap()
    }

    /// Copies its input to its output.
    pub fn identity(input: Alphabet) -> Self {
        let q = input.len();
        MealyMachine {
            states: vec!["id".into()],
            initial: 0,
            output: input.clone(),
            input,
            delta: vec![(0..q).map(|a| (0, Word(vec![a]))).collect()],
            accepting: None,
        }
    }
}

/// Concatenated emissions and the final state.
pub fn run_mealy(m: &MealyMachine, word: &Word) -> Result<(Word, usize)> {
    let mut state = m.initial;
    let mut out = Vec::new();
    for &a in &word.0 {
        if a >= m.input.len() {
            return Err(Error::Input(format!("symbol index {a} outside the machine's alphabet")));
        }
        let (next, emit) = &m.delta[state][a];
        out.extend_from_slice(&emit.0);
        state = *next;
    }
    Ok((Word(out), state))
}

/// Direct acceptance by the machine's predicate.
pub fn mealy_accepts(m: &MealyMachine, word: &Word) -> Result<bool> {
    Ok(m.is_accepting(run_mealy(m, word)?.1))
}

/// Neuron layout of a compiled machine.
#[derive(Clone, Debug)]
pub struct FaLayout {
    pub q: usize,
    pub nxt: usize,
    pub out: usize,
    pub boot: usize,
    pub first_state: usize,
    pub first_conj: usize,
    pub size: usize,
}

impl FaLayout {
    pub fn new(q: usize, states: usize) -> Self {
        let nxt = q + 1;
        let first_state = q + 4;
        let first_conj = first_state + states;
        FaLayout {
            q,
            nxt,
            out: q + 2,
            boot: q + 3,
            first_state,
            first_conj,
            size: first_conj + states * q + 1,
        }
    }

    pub fn state(&self, p: usize) -> usize {
        self.first_state + p
    }

    pub fn conj(&self, p: usize, a: usize) -> usize {
        self.first_conj + p * self.q + a
    }
}

/// One-hot compilation: a boot unit seeds the initial state, conjunction
/// units `C[p,a] = H(S_p + X_a - 2)` feed state units `S_p' = OR C`, and nxt
/// fires whenever a state unit is active. Symbols arrive every second step.
pub fn compile_mealy(m: &MealyMachine) -> Result<Network> {
    m.validate()?;
    let n = m.states.len();
    let q = m.input.len();
    let lay = FaLayout::new(q, n);
    let one = Rational::one;
    let mut b = NetworkBuilder::new(lay.size);
    b.inputs((1..=q).collect())
        .nxt(lay.nxt)
        .out(lay.out)
        .delta(2)
        .output_delay(0)
        .alphabet(m.input.clone())
        .init_active(vec![lay.nxt, lay.boot]);
    b.bias(lay.boot, -one());
    b.bias(lay.nxt, -one());
    b.bias(lay.out, -one());
    for p in 0..n {
        let sp = lay.state(p);
        b.bias(sp, -one());
        b.weight(lay.nxt, sp, one());
        for a in 0..q {
            let c = lay.conj(p, a);
            b.bias(c, Rational::from(-2));
            b.weight(c, sp, one());
            b.weight(c, a + 1, one());
            let target = m.delta[p][a].0;
            b.weight(lay.state(target), c, one());
            if m.is_accepting(target) {
                b.weight(lay.out, c, one());
            }
        }
    }
    b.weight(lay.state(m.initial), lay.boot, one());
    if m.is_accepting(m.initial) {
        b.weight(lay.out, lay.boot, one());
    }
    b.build()
}

fn parse_flag(s: &str, line: usize) -> Result<bool> {
    match s {
        "1" | "yes" | "true" | "acc" | "accept" => Ok(true),
        "0" | "no" | "false" | "rej" | "reject" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("bad accepting flag {s:?}"),
        }),
    }
}

fn emission_tokens(s: &str) -> Vec<String> {
    if s == "-" || s == "ε" {
        Vec::new()
    } else if s.contains(',') {
        s.split(',').filter(|t| !t.is_empty()).map(String::from).collect()
    } else {
        s.chars().map(String::from).collect()
    }
}

/// Reads the table format: one row per transition,
/// `state symbol next_state emission [accepting]`, where the flag applies to
/// `state`. Optional directives `input a b ...` and `output x y ...` fix the
/// alphabets; otherwise they are taken in order of first appearance. The
/// first row's state is initial. An emission of `-` is empty.
pub fn parse_mealy_tsv(text: &str) -> Result<MealyMachine> {
    let mut states: Vec<String> = Vec::new();
    let mut input: Option<Vec<String>> = None;
    let mut output: Option<Vec<String>> = None;
    let mut seen_inputs: Vec<String> = Vec::new();
    let mut seen_outputs: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, usize, String, String, Vec<String>, Option<bool>)> = Vec::new();
    let intern = |v: &mut Vec<String>, s: &str| match v.iter().position(|x| x == s) {
        Some(k) => k,
        None => {
            v.push(s.to_string());
            v.len() - 1
        }
    };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "input" => {
                input = Some(fields[1..].iter().map(|s| s.to_string()).collect());
                continue;
            }
            "output" => {
                output = Some(fields[1..].iter().map(|s| s.to_string()).collect());
                continue;
            }
            _ => {}
        }
        if fields.len() < 4 || fields.len() > 5 {
            return Err(Error::Parse {
                line,
                message: "expected: state symbol next_state emission [accepting]".into(),
            });
        }
        let from = intern(&mut states, fields[0]);
        intern(&mut states, fields[2]);
        intern(&mut seen_inputs, fields[1]);
        let emit = emission_tokens(fields[3]);
        for t in &emit {
            intern(&mut seen_outputs, t);
        }
        let flag = fields.get(4).map(|s| parse_flag(s, line)).transpose()?;
        rows.push((line, from, fields[1].to_string(), fields[2].to_string(), emit, flag));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no transitions".into(),
        });
    }
    let input = Alphabet::new(input.unwrap_or(seen_inputs))?;
    let output = match output {
        Some(o) => Alphabet::new(o)?,
        None if seen_outputs.is_empty() => input.clone(),
        None => Alphabet::new(seen_outputs)?,
    };
    let n = states.len();
    let mut delta: Vec<Vec<Option<(usize, Word)>>> = vec![vec![None; input.len()]; n];
    let mut flags: Vec<Option<bool>> = vec![None; n];
    let any_flag = rows.iter().any(|r| r.5.is_some());
    for (line, from, sym, next, emit, flag) in rows {
        let a = input.index(&sym).ok_or_else(|| Error::Parse {
            line,
            message: format!("symbol {sym:?} not in input alphabet"),
        })?;
        let to = states.iter().position(|x| *x == next).unwrap();
        let word = emit
            .iter()
            .map(|t| {
                output.index(t).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("emission symbol {t:?} not in output alphabet"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if delta[from][a].is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate transition for ({}, {sym})", states[from]),
            });
        }
        delta[from][a] = Some((to, Word(word)));
        if let Some(f) = flag {
            if flags[from].is_some_and(|g| g != f) {
                return Err(Error::Parse {
                    line,
                    message: format!("conflicting accepting flags for {}", states[from]),
                });
            }
            flags[from] = Some(f);
        }
    }
    let mut table = Vec::with_capacity(n);
    for (p, row) in delta.into_iter().enumerate() {
        let mut r = Vec::with_capacity(input.len());
        for (a, cell) in row.into_iter().enumerate() {
            r.push(cell.ok_or_else(|| {
                Error::Construction(format!(
                    "missing transition for ({}, {})",
                    states[p],
                    input.symbol(a)
                ))
            })?);
        }
        table.push(r);
    }
    let m = MealyMachine {
        states,
        initial: 0,
        input,
        output,
        delta: table,
        accepting: any_flag.then(|| flags.into_iter().map(|f| f.unwrap_or(false)).collect()),
    };
    m.validate()?;
    Ok(m)
}

/// Inverse of [`parse_mealy_tsv`].
pub fn write_mealy_tsv(m: &MealyMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input {}", m.input.symbols().join(" "));
    let _ = writeln!(out, "output {}", m.output.symbols().join(" "));
    let single = m.output.symbols().iter().all(|s| s.chars().count() == 1);
    let mut order: Vec<usize> = (0..m.states.len()).collect();
    order.swap(0, m.initial);
    for p in order {
        for (a, (next, emit)) in m.delta[p].iter().enumerate() {
            let e = if emit.is_empty() {
                "-".to_string()
            } else {
                let toks: Vec<&str> = emit.0.iter().map(|&b| m.output.symbol(b)).collect();
                if single { toks.concat() } else { toks.join(",") + "," }
            };
            let _ = write!(out, "{}\t{}\t{}\t{}", m.states[p], m.input.symbol(a), m.states[*next], e);
            if m.accepting.is_some() {
                let _ = write!(out, "\t{}", u8::from(m.is_accepting(p)));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{accepts, enumerate_language, run_online};

    #[test]
    fn parity_network_matches_predicate() {
        let m = MealyMachine::even_parity();
        let net = compile_mealy(&m).unwrap();
        let a = Alphabet::binary();
        let lang = enumerate_language(&net, &a, 12).unwrap();
        for w in Word::all_up_to(2, 12) {
            let even = w.0.iter().filter(|&&x| x == 1).count() % 2 == 0;
            assert_eq!(lang.contains(&w), even, "{w}");
        }
    }

    #[test]
    fn accept_all_and_reject_all() {
        let a = Alphabet::binary();
        let yes = compile_mealy(&MealyMachine::accept_all(a.clone())).unwrap();
        let no = compile_mealy(&MealyMachine::reject_all(a.clone())).unwrap();
        assert_eq!(enumerate_language(&yes, &a, 8).unwrap().len(), 511);
        assert!(enumerate_language(&no, &a, 8).unwrap().is_empty());
    }

    #[test]
    fn mod3_machine() {
        let m = MealyMachine::mod3_ab();
        let net = compile_mealy(&m).unwrap();
        let a = m.input.clone();
        for w in Word::all_up_to(2, 9) {
            let k = w.0.iter().take_while(|&&x| x == 0).count();
            let n = w.len() - k;
            let shaped = w.0[k..].iter().all(|&x| x == 1);
            let expect = shaped && k >= 1 && k % 3 == n % 3;
            assert_eq!(mealy_accepts(&m, &w).unwrap(), expect, "{w}");
            assert_eq!(accepts(&net, &a, &w).unwrap(), expect, "{w}");
        }
    }

    #[test]
    fn analog_unit_stays_zero() {
        let m = MealyMachine::mod3_ab();
        let net = compile_mealy(&m).unwrap();
        for w in Word::all_up_to(2, 6) {
            let tr = run_online(&net, &m.input, &w).unwrap();
            assert!(tr.rows.iter().all(|r| r.analog.is_zero()));
        }
    }

    #[test]
    fn run_mealy_examples() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let id = MealyMachine::identity(a.clone());
        let w = a.parse_word("abc").unwrap();
        assert_eq!(run_mealy(&id, &w).unwrap(), (w.clone(), 0));
        assert_eq!(run_mealy(&id, &Word::empty()).unwrap(), (Word::empty(), 0));
        assert!(run_mealy(&id, &Word(vec![5])).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let text = "# parity\neven 0 even - 1\neven 1 odd - 1\nodd 0 odd - 0\nodd 1 even - 0\n";
        let m = parse_mealy_tsv(text).unwrap();
        assert_eq!(m, MealyMachine::even_parity());
        assert_eq!(parse_mealy_tsv(&write_mealy_tsv(&m)).unwrap(), m);
        let t = "s a s xy\ns b s -\n";
        let m = parse_mealy_tsv(t).unwrap();
        assert_eq!(m.output.symbols(), ["x", "y"]);
        assert!(m.accepting.is_none());
        assert_eq!(parse_mealy_tsv(&write_mealy_tsv(&m)).unwrap(), m);
    }

    #[test]
    fn tsv_errors() {
        assert!(parse_mealy_tsv("s 0 s -\n").is_ok());
        assert!(matches!(parse_mealy_tsv("s 0 t -\n"), Err(Error::Construction(_))));
        assert!(matches!(parse_mealy_tsv("s 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_mealy_tsv("s 0 s - 1\ns 0 s - 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}

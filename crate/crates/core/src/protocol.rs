//! Online input/output protocol and the brute-force language oracle.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::network::{Configuration, Network};
use crate::numerics::Rational;

/// Ordered list of distinct symbols; position `k` drives input neuron `X[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Input("alphabet must have at least one symbol".into()));
        }
        for (k, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) || s == "ε" || s == "-" {
                return Err(Error::Input(format!("bad alphabet symbol {s:?}")));
            }
            if symbols[..k].contains(s) {
                return Err(Error::Input(format!("duplicate alphabet symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// `"0", "1", ..., "q-1"`.
    pub fn numbered(q: usize) -> Self {
        Alphabet {
            symbols: (0..q).map(|k| k.to_string()).collect(),
        }
    }

    pub fn binary() -> Self {
        Self::numbered(2)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, k: usize) -> &str {
        &self.symbols[k]
    }

    pub fn index(&self, sym: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == sym)
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Single-character alphabets read the text character by
    /// character; otherwise symbols are whitespace separated. `""` and `"ε"`
    /// denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let tokens: Vec<String> = if self.single_char() {
            text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| {
                self.index(t)
                    .ok_or_else(|| Error::Input(format!("symbol {t:?} not in alphabet")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Inverse of [`Alphabet::parse_word`]; the empty word renders as `ε`.
    pub fn render(&self, word: &Word) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        word.0
            .iter()
            .map(|&k| self.symbols[k].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// A word as symbol indices, ordered length-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, sym: usize) -> Word {
        let mut v = self.0.clone();
        v.push(sym);
        Word(v)
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// All words over `q` symbols of length at most `max_len`, in order.
    pub fn all_up_to(q: usize, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| (0..q).map(move |a| w.push(a)))
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let single = self.0.iter().all(|&k| k < 10);
        for (n, k) in self.0.iter().enumerate() {
            if n > 0 && !single {
                write!(f, " ")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub t: usize,
    pub binary: Vec<bool>,
    pub analog: Rational,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    /// `τ_1 < τ_2 < ... < τ_{n+1}`.
    pub query_times: Vec<usize>,
    /// `verdicts[k]` is the verdict for the prefix of length `k`.
    pub verdicts: Vec<bool>,
    pub output_delay: usize,
}

impl RunTrace {
    pub fn accepted(&self) -> bool {
        *self.verdicts.last().expect("a run has at least one verdict")
    }

    /// Time instant at which the verdict for the prefix of length `k` is read.
    pub fn verdict_time(&self, k: usize) -> usize {
        self.query_times[k] + self.output_delay
    }

    /// Tab-separated rendering: `t`, `y_1`..`y_s`, `note`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let s = self.rows.first().map_or(1, |r| r.binary.len() + 1);
        out.push('t');
        for i in 1..=s {
            let _ = write!(out, "\ty_{i}");
        }
        out.push_str("\tnote\n");
        for row in &self.rows {
            let _ = write!(out, "{}", row.t);
            for &b in &row.binary {
                out.push_str(if b { "\t1" } else { "\t0" });
            }
            let _ = writeln!(out, "\t{}\t{}", row.analog, row.note);
        }
        out
    }
}

/// Stepping state shared by the runner and the enumerator.
#[derive(Clone, Debug)]
struct Session {
    cfg: Configuration,
    t: usize,
    last_query: usize,
}

impl Session {
    fn start(net: &Network) -> Self {
        Session {
            cfg: net.initial().clone(),
            t: 0,
            last_query: 0,
        }
    }

    /// Advances one step, clamping `symbol` (if any) onto the input neurons.
    fn advance(&mut self, engine: &Engine<'_>, symbol: Option<usize>) {
        let net = engine.network();
        let inputs = net.inputs_of(&self.cfg);
        let mut next = engine.step(&self.cfg, &inputs);
        if let Some(a) = symbol {
            next.set_bit(net.inputs()[a], true);
            self.last_query = self.t + 1;
        }
        self.cfg = next;
        self.t += 1;
    }

    fn nxt(&self, net: &Network) -> bool {
        self.cfg.bit(net.nxt())
    }

    /// Runs until `nxt` is active, guarding the δ bound.
    fn await_query(&mut self, engine: &Engine<'_>, word: &dyn Fn() -> String) -> Result<()> {
        let net = engine.network();
        while !self.nxt(net) {
            if self.t + 1 >= self.last_query + net.delta() {
                return Err(Error::DeltaViolation {
                    word: word(),
                    delta: net.delta(),
                    since: self.last_query,
                });
            }
            self.advance(engine, None);
        }
        Ok(())
    }
}

fn check_word(alphabet: &Alphabet, net: &Network, word: &Word) -> Result<()> {
    if alphabet.len() != net.inputs().len() {
        return Err(Error::Input(format!(
            "alphabet has {} symbols, network has {} input neurons",
            alphabet.len(),
            net.inputs().len()
        )));
    }
    if let Some(&a) = word.0.iter().find(|&&a| a >= alphabet.len()) {
        return Err(Error::Input(format!("symbol index {a} outside alphabet")));
    }
    Ok(())
}

/// Drives `net` over `word` and records every row until the final verdict.
pub fn run_online(net: &Network, alphabet: &Alphabet, word: &Word) -> Result<RunTrace> {
    check_word(alphabet, net, word)?;
    let engine = Engine::new(net);
    let n = word.len();
    let d = net.output_delay();
    let name = || alphabet.render(word);
    let mut session = Session::start(net);
    let mut trace = RunTrace {
        rows: Vec::new(),
        query_times: Vec::new(),
        verdicts: Vec::new(),
        output_delay: d,
    };
    let mut note = String::new();
    loop {
        let mut notes = vec![std::mem::take(&mut note)];
        let pending = trace.verdicts.len();
        if pending < trace.query_times.len() && trace.query_times[pending] + d == session.t {
            let v = session.cfg.bit(net.out());
            trace.verdicts.push(v);
            let prefix = Word(word.0[..pending].to_vec());
            notes.push(format!(
                "{} {}",
                alphabet.render(&prefix),
                if v { "accept" } else { "reject" }
            ));
        }
        let queried = trace.query_times.len();
        let will_query = queried <= n && session.nxt(net);
        if will_query {
            notes.push("nxt".to_string());
        }
        trace.rows.push(TraceRow {
            t: session.t,
            binary: session.cfg.binary.clone(),
            analog: session.cfg.analog.clone(),
            note: notes.into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("; "),
        });
        if trace.verdicts.len() == n + 1 {
            break;
        }
        if will_query {
            let sym = word.0.get(queried).copied().unwrap_or(0);
            session.advance(&engine, Some(sym));
            trace.query_times.push(session.t);
            note = if queried < n {
                format!("x{}={}", queried + 1, alphabet.symbol(sym))
            } else {
                format!("x{}={} (end)", queried + 1, alphabet.symbol(sym))
            };
        } else {
            if queried <= n && session.t + 1 >= session.last_query + net.delta() {
                return Err(Error::DeltaViolation {
                    word: name(),
                    delta: net.delta(),
                    since: session.last_query,
                });
            }
            session.advance(&engine, None);
        }
    }
    Ok(trace)
}

/// Final verdict of [`run_online`].
pub fn accepts(net: &Network, alphabet: &Alphabet, word: &Word) -> Result<bool> {
    check_word(alphabet, net, word)?;
    let engine = Engine::new(net);
    let mut session = Session::start(net);
    let name = || alphabet.render(word);
    for &a in &word.0 {
        session.await_query(&engine, &name)?;
        session.advance(&engine, Some(a));
    }
    final_verdict(&engine, session, &name)
}

/// Final verdict of `word` fed to `net` started in `cfg` instead of its
/// initial configuration.
pub fn accepts_from(net: &Network, cfg: &Configuration, word: &Word) -> Result<bool> {
    if let Some(&a) = word.0.iter().find(|&&a| a >= net.inputs().len()) {
        return Err(Error::Input(format!("symbol index {a} outside alphabet")));
    }
    let engine = Engine::new(net);
    let mut session = Session {
        cfg: cfg.clone(),
        t: 0,
        last_query: 0,
    };
    let name = || word.to_string();
    for &a in &word.0 {
        session.await_query(&engine, &name)?;
        session.advance(&engine, Some(a));
    }
    final_verdict(&engine, session, &name)
}

fn final_verdict(engine: &Engine<'_>, mut session: Session, name: &dyn Fn() -> String) -> Result<bool> {
    let net = engine.network();
    session.await_query(engine, name)?;
    session.advance(engine, Some(0));
    for _ in 0..net.output_delay() {
        session.advance(engine, None);
    }
    Ok(session.cfg.bit(net.out()))
}

/// Every accepted word of length at most `max_len`, sharing work between
/// words with a common prefix.
pub fn enumerate_language(net: &Network, alphabet: &Alphabet, max_len: usize) -> Result<BTreeSet<Word>> {
    check_word(alphabet, net, &Word::empty())?;
    let engine = Engine::new(net);
    let mut accepted = BTreeSet::new();
    let mut stack = vec![(Word::empty(), Session::start(net))];
    while let Some((word, mut session)) = stack.pop() {
        let name = || alphabet.render(&word);
        session.await_query(&engine, &name)?;
        if final_verdict(&engine, session.clone(), &name)? {
            accepted.insert(word.clone());
        }
        if word.len() < max_len {
            for a in (0..alphabet.len()).rev() {
                let mut next = session.clone();
                next.advance(&engine, Some(a));
                stack.push((word.push(a), next));
            }
        }
    }
    Ok(accepted)
}

/// A word in exactly one of the two compared sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub word: Word,
    /// True when the word is in the first set only.
    pub in_first: bool,
}

/// Symmetric difference in length-lexicographic order (shortest witnesses first).
pub fn compare_languages(a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> Vec<Witness> {
    let mut out: Vec<Witness> = a
        .difference(b)
        .map(|w| Witness { word: w.clone(), in_first: true })
        .chain(b.difference(a).map(|w| Witness { word: w.clone(), in_first: false }))
        .collect();
    out.sort_by(|x, y| x.word.cmp(&y.word));
    out
}

/// Words of length at most `max_len` satisfying `pred`.
pub fn language_of(q: usize, max_len: usize, pred: impl Fn(&Word) -> bool) -> BTreeSet<Word> {
    Word::all_up_to(q, max_len).into_iter().filter(|w| pred(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::{build_cut_acceptor, CutParams};
    use crate::network::NetworkBuilder;
    use crate::numerics::ratio;

    fn w(s: &str) -> Word {
        Alphabet::binary().parse_word(s).unwrap()
    }

    fn n_27_8() -> Network {
        build_cut_acceptor(&CutParams::binary(ratio(27, 8), ratio(1, 4))).unwrap()
    }

    fn n_27() -> Network {
        build_cut_acceptor(&CutParams::binary(ratio(27, 1), ratio(1, 28))).unwrap()
    }

    #[test]
    fn table_run_query_times_and_verdicts() {
        let tr = run_online(&n_27_8(), &Alphabet::binary(), &w("101")).unwrap();
        assert_eq!(tr.query_times, vec![1, 4, 7, 10]);
        assert_eq!(tr.verdicts, vec![true, false, true, false]);
        assert_eq!(tr.rows.len(), 11);
        assert!(!tr.accepted());
    }

    #[test]
    fn accepts_examples() {
        let a = Alphabet::binary();
        assert!(accepts(&n_27_8(), &a, &w("10")).unwrap());
        assert!(!accepts(&n_27_8(), &a, &w("101")).unwrap());
        assert!(!accepts(&n_27(), &a, &w("11")).unwrap());
        assert!(accepts(&n_27(), &a, &w("0")).unwrap());
    }

    #[test]
    fn empty_word_has_single_verdict() {
        let tr = run_online(&n_27(), &Alphabet::binary(), &Word::empty()).unwrap();
        assert_eq!(tr.verdicts.len(), 1);
        assert_eq!(tr.query_times, vec![1]);
        assert_eq!(tr.rows.last().unwrap().t, 1);
    }

    #[test]
    fn enumeration_matches_accepts() {
        let a = Alphabet::binary();
        let net = n_27();
        let lang = enumerate_language(&net, &a, 2).unwrap();
        let expected: BTreeSet<Word> = ["", "0", "00", "10"].iter().map(|s| w(s)).collect();
        assert_eq!(lang, expected);
        for word in Word::all_up_to(2, 4) {
            assert_eq!(lang_contains(&net, &a, &word), accepts(&net, &a, &word).unwrap());
        }
    }

    fn lang_contains(net: &Network, a: &Alphabet, word: &Word) -> bool {
        enumerate_language(net, a, word.len()).unwrap().contains(word)
    }

    #[test]
    fn silent_network_accepts_nothing() {
        let mut b = NetworkBuilder::new(4);
        b.inputs(vec![1]).nxt(2).out(3).delta(1);
        b.bias(2, Rational::zero()).bias(3, ratio(-1, 1));
        let net = b.build().unwrap();
        assert!(enumerate_language(&net, &Alphabet::numbered(1), 6).unwrap().is_empty());
    }

    #[test]
    fn delta_violation_is_an_error() {
        // nxt never fires again after the first query
        let mut b = NetworkBuilder::new(4);
        b.inputs(vec![1]).nxt(2).out(3).delta(2);
        b.bias(2, ratio(-1, 1));
        let net = b.build().unwrap();
        let a = Alphabet::numbered(1);
        // the empty word only needs the first query
        assert!(accepts(&net, &a, &Word::empty()).is_ok());
        let one = Word(vec![0]);
        let err = accepts(&net, &a, &one).unwrap_err();
        assert!(matches!(err, Error::DeltaViolation { delta: 2, since: 1, .. }));
        assert!(matches!(run_online(&net, &a, &one), Err(Error::DeltaViolation { .. })));
        assert!(matches!(enumerate_language(&net, &a, 1), Err(Error::DeltaViolation { .. })));
    }

    #[test]
    fn compare_examples() {
        let x: BTreeSet<Word> = [w("0"), w("01")].into_iter().collect();
        assert!(compare_languages(&x, &x).is_empty());
        let eps: BTreeSet<Word> = [Word::empty()].into_iter().collect();
        let d = compare_languages(&eps, &BTreeSet::new());
        assert_eq!(d, vec![Witness { word: Word::empty(), in_first: true }]);
    }

    #[test]
    fn length_lex_order() {
        let mut v = vec![w("00"), w("1"), w(""), w("01"), w("0")];
        v.sort();
        assert_eq!(v, vec![w(""), w("0"), w("1"), w("00"), w("01")]);
    }

    #[test]
    fn multi_char_alphabet_round_trip() {
        let a = Alphabet::new(["push", "pop"]).unwrap();
        let word = a.parse_word("push pop pop").unwrap();
        assert_eq!(word, Word(vec![0, 1, 1]));
        assert_eq!(a.render(&word), "push pop pop");
        assert!(a.parse_word("push peek").is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
    }
}

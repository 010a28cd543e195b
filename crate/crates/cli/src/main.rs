use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oneann_core::format::{parse_anet, write_anet};
use oneann_core::partition::{build_partition_refined_with_budget, DEFAULT_BUDGET};
use oneann_core::quotient::write_quotient_anet;
use oneann_core::{
    build_cut_acceptor, build_partition_exhaustive, build_quotient_network, build_reduction, compare_languages,
    compile_mealy, enumerate_language, qp_explore, run_online, CutParams, DnfMode, Error, Network, QuotientMode,
    QuotientSpec, Rational, ReductionConfig, StartStates, Word,
};

#[derive(Parser)]
#[command(name = "oneann", version, about = "Binary-state networks with one analog unit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-prefix verdicts of NET on WORD.
    Run { net: PathBuf, word: String },
    /// Full state trace of NET on WORD as TSV.
    Trace { net: PathBuf, word: String },
    /// Writes the cut-language acceptor for base BETA and threshold C.
    BuildCut { beta: Rational, c: Rational, out: PathBuf },
    /// Searches for a quasi-periodicity certificate or refutation of C in base BETA.
    Qp {
        beta: Rational,
        c: Rational,
        #[arg(long, default_value_t = 64)]
        depth: usize,
    },
    /// Interval partition of the analog state space over T steps.
    Partition {
        net: PathBuf,
        t: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Refined)]
        method: MethodArg,
        /// Start states for the refined method.
        #[arg(long, value_enum, default_value_t = StartsArg::Reachable)]
        starts: StartsArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Writes the network for the difference of the quotients of NET by U1 and U2U1.
    Quotient {
        net: PathBuf,
        u1: String,
        u2: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = DnfArg::Reachable)]
        dnf: DnfArg,
        out: PathBuf,
    },
    /// Compiles a Mealy machine table into a network.
    CompileFa { tsv: PathBuf, out: PathBuf },
    /// Builds the reduction network described by a TOML spec.
    Reduce { spec: PathBuf, out: PathBuf },
    /// Lists the accepted words of length at most MAXLEN.
    Enum { net: PathBuf, maxlen: usize },
    /// Compares two languages up to length MAXLEN.
    Compare { net1: PathBuf, net2: PathBuf, maxlen: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Refined,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartsArg {
    Reachable,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "L2-L1")]
    L2MinusL1,
    #[value(name = "L1-L2")]
    L1MinusL2,
}

#[derive(Clone, Copy, ValueEnum)]
enum DnfArg {
    Reachable,
    Full,
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(..) => "io",
            Failure::Core(e) => match e {
                Error::DivisionByZero => "division-by-zero",
                Error::Parse { .. } => "parse",
                Error::InvalidNetwork(_) => "invalid-network",
                Error::Construction(_) => "construction",
                Error::UnsupportedParameter(_) => "unsupported-parameter",
                Error::Input(_) => "input",
                Error::UndefinedRatio { .. } => "undefined-ratio",
                Error::Horizon { .. } => "horizon",
                Error::Timing(_) => "timing",
                Error::DeltaViolation { .. } => "delta-violation",
                Error::Budget(_) => "budget",
            },
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::Budget(_)) => 3,
            Failure::Core(Error::DeltaViolation { .. }) => 4,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Out = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> Result<Network, Failure> {
    Ok(parse_anet(&read(path)?)?)
}

/// Writes a network and checks that it loads back.
fn save(path: &Path, text: &str) -> Out {
    parse_anet(text)?;
    write(path, text)?;
    Ok(format!("wrote {}\n", path.display()))
}

fn word(net: &Network, text: &str) -> Result<Word, Failure> {
    Ok(net.alphabet().parse_word(text)?)
}

fn run(command: Command) -> Out {
    match command {
        Command::Run { net, word: w } => {
            let net = load(&net)?;
            let x = word(&net, &w)?;
            let trace = run_online(&net, net.alphabet(), &x)?;
            let mut s = String::new();
            for (k, v) in trace.verdicts.iter().enumerate() {
                let prefix = Word(x.0[..k].to_vec());
                let verdict = if *v { "accept" } else { "reject" };
                s.push_str(&format!("{}\t{verdict}\n", net.alphabet().render(&prefix)));
            }
            Ok(s)
        }
        Command::Trace { net, word: w } => {
            let net = load(&net)?;
            let x = word(&net, &w)?;
            Ok(run_online(&net, net.alphabet(), &x)?.to_tsv())
        }
        Command::BuildCut { beta, c, out } => {
            let net = build_cut_acceptor(&cut_params(beta, c)?)?;
            save(&out, &write_anet(&net))
        }
        Command::Qp { beta, c, depth } => Ok(qp_explore(&cut_params(beta, c)?, depth).to_string()),
        Command::Partition {
            net,
            t,
            method,
            starts,
            budget,
        } => {
            let net = load(&net)?;
            let result = match method {
                MethodArg::Exhaustive => build_partition_exhaustive(&net, t, budget)?,
                MethodArg::Refined => {
                    let starts = match starts {
                        StartsArg::Reachable => StartStates::Reachable,
                        StartsArg::All => StartStates::All,
                    };
                    let words = words_within(&net, t);
                    build_partition_refined_with_budget(&net, net.alphabet(), t, &words, &starts, budget)?
                }
            };
            Ok(result.report())
        }
        Command::Quotient {
            net,
            u1,
            u2,
            mode,
            dnf,
            out,
        } => {
            let base = load(&net)?;
            let (u1, u2) = (word(&base, &u1)?, word(&base, &u2)?);
            let mode = match mode {
                ModeArg::L2MinusL1 => QuotientMode::L2MinusL1,
                ModeArg::L1MinusL2 => QuotientMode::L1MinusL2,
            };
            let dnf = match dnf {
                DnfArg::Reachable => DnfMode::Reachable,
                DnfArg::Full => DnfMode::Full,
            };
            let spec = QuotientSpec::new(base, u1, u2, mode)?.with_dnf(dnf);
            let q = build_quotient_network(&spec)?;
            save(&out, &write_quotient_anet(&q, &spec))
        }
        Command::CompileFa { tsv, out } => {
            let m = oneann_core::fa::parse_mealy_tsv(&read(&tsv)?)?;
            save(&out, &write_anet(&compile_mealy(&m)?))
        }
        Command::Reduce { spec, out } => {
            let cfg = ReductionConfig::from_toml(&read(&spec)?)?;
            let dir = spec.parent().unwrap_or(Path::new("."));
            let source = match cfg.source()? {
                oneann_core::reduction::InnerSource::Inner(p) | oneann_core::reduction::InnerSource::Base(p) => p,
            };
            let network = load(&dir.join(source))?;
            let red = build_reduction(&cfg.to_spec(network)?)?;
            save(&out, &write_anet(&red.network))
        }
        Command::Enum { net, maxlen } => {
            let net = load(&net)?;
            let lang = enumerate_language(&net, net.alphabet(), maxlen)?;
            Ok(lang.iter().map(|w| net.alphabet().render(w) + "\n").collect())
        }
        Command::Compare { net1, net2, maxlen } => {
            let (a, b) = (load(&net1)?, load(&net2)?);
            if a.alphabet() != b.alphabet() {
                return Err(Error::Input("the two networks have different alphabets".into()).into());
            }
            let la = enumerate_language(&a, a.alphabet(), maxlen)?;
            let lb = enumerate_language(&b, b.alphabet(), maxlen)?;
            let witnesses = compare_languages(&la, &lb);
            if witnesses.is_empty() {
                return Ok("EQUAL\n".into());
            }
            let mut s = format!("DIFFERENT\t{}\n", witnesses.len());
            for w in witnesses {
                let side = if w.in_first { "first" } else { "second" };
                s.push_str(&format!("{}\tonly-in-{side}\n", a.alphabet().render(&w.word)));
            }
            Ok(s)
        }
    }
}

fn cut_params(beta: Rational, c: Rational) -> Result<CutParams, Failure> {
    Ok(CutParams::new(beta, c, vec![Rational::zero(), Rational::one()])?)
}

/// All words `u` with `δ(|u|+1) + d ≤ t`.
fn words_within(net: &Network, t: usize) -> Vec<Word> {
    let mut len = 0;
    while net.delta() * (len + 2) + net.output_delay() <= t {
        len += 1;
    }
    Word::all_up_to(net.inputs().len(), len)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            eprintln!("error: usage: invalid arguments");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}: {}", f.kind(), f.message());
            ExitCode::from(f.code())
        }
    }
}

//! Command-line front end. `run` is the whole program minus process plumbing,
//! so tests can drive it with in-memory streams.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equiv::{bounded_compare, bounded_traces, compare, default_shared, DEFAULT_TRACE_CAP};
use crate::event::Event;
use crate::models::{Formalism, Model, ModelRef};
use crate::pn::PetriNet;
use crate::statespace::{
    explore, find_deadlocks, find_hot_cycles, reduce_helper, shortest_path, stats_csv, Format, Guards, Lts, Stepper,
};
use crate::translate::{translate, verify_bisimulation};
use crate::bp::Status;

#[derive(Parser, Debug)]
#[command(name = "bpnet", version, about = "Behavioral programs and Petri nets: state spaces, comparison, translation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Abort exploration beyond this many states.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_states: u64,
    /// Abort exploration when a place holds more tokens than this.
    #[arg(long, global = true, default_value_t = 1_000)]
    max_tokens: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print `model,formalism,n,faults,states,transitions`.
    Stats {
        #[command(flatten)]
        model: ModelArgs,
        /// Remove helper events first.
        #[arg(long)]
        pnstar: bool,
    },
    /// Export the state graph.
    Graph {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pnstar: bool,
    },
    /// Compare two models by their projected traces.
    Equiv {
        /// Model reference (`lc:bp:modified:1`) or net file.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Also count distinct traces up to this many steps (on helper-free graphs).
        #[arg(long)]
        bounded: Option<usize>,
        /// Shared event (repeatable); default: every non-helper label.
        #[arg(long = "shared")]
        shared: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TRACE_CAP)]
        trace_cap: usize,
    },
    /// List projected traces up to a length.
    Traces {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// `auto`, or repeat with explicit events.
        #[arg(long = "shared", default_value = "auto")]
        shared: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TRACE_CAP)]
        trace_cap: usize,
    },
    /// Seeded random run.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Choose every event from a numbered prompt.
        #[arg(long)]
        interactive: bool,
    },
    /// Print the b-program generated from a net.
    Translate {
        #[arg(long)]
        pn: PathBuf,
        /// Check the marking/counter correspondence over both state spaces.
        #[arg(long)]
        verify: bool,
    },
    /// Report deadlocks and hot cycles.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        fail_on_deadlock: bool,
        #[arg(long)]
        fail_on_hot_cycle: bool,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Built-in model name (lc, dining, ttt, ab) or a full reference.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_enum, default_value_t = FormalismArg::Bp)]
    formalism: FormalismArg,
    #[arg(long, default_value = "")]
    variant: String,
    /// Size parameter: tracks for lc, philosophers for dining.
    #[arg(long, visible_alias = "tracks")]
    n: Option<usize>,
    #[arg(long)]
    faults: bool,
    /// Net file instead of a built-in model.
    #[arg(long, conflicts_with = "model")]
    pn: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormalismArg {
    Bp,
    Pn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

/// A model plus the names used when reporting it.
struct Loaded {
    model: Model,
    name: String,
    n: usize,
    faults: bool,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

fn load_net(path: &Path) -> Result<PetriNet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(PetriNet::from_json(&text)?)
}

fn net_name(path: &Path) -> String {
    path.file_stem().map_or("net".into(), |s| s.to_string_lossy().into_owned())
}

impl ModelArgs {
    fn load(&self) -> Result<Loaded, Failure> {
        if let Some(p) = &self.pn {
            return Ok(Loaded { model: Model::Pn(load_net(p)?), name: net_name(p), n: 0, faults: false });
        }
        let Some(m) = &self.model else {
            return Err(Failure("either --model or --pn is required".into()));
        };
        let r = if m.contains(':') {
            m.parse::<ModelRef>()?
        } else {
            let formalism = match self.formalism {
                FormalismArg::Bp => Formalism::Bp,
                FormalismArg::Pn => Formalism::Pn,
            };
            ModelRef { variant: self.variant.to_ascii_lowercase(), n: self.n, faults: self.faults, ..ModelRef::new(m, formalism) }
        };
        load_ref(&r)
    }
}

fn load_ref(r: &ModelRef) -> Result<Loaded, Failure> {
    Ok(Loaded { model: r.build()?, name: r.name.clone(), n: r.size(), faults: r.faults })
}

/// A reference containing `:` names a built-in model; anything else is a net file.
fn load_operand(s: &str) -> Result<Loaded, Failure> {
    if s.contains(':') && !Path::new(s).exists() {
        load_ref(&s.parse()?)
    } else {
        let p = Path::new(s);
        Ok(Loaded { model: Model::Pn(load_net(p)?), name: net_name(p), n: 0, faults: false })
    }
}

fn parse_events(items: &[String]) -> Result<BTreeSet<Event>, Failure> {
    items.iter().map(|s| s.parse::<Event>().map_err(Failure::from)).collect()
}

pub fn run(args: &[String], input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let guards = Guards { max_states: cli.max_states, max_tokens: cli.max_tokens };
    match dispatch(cli.command, guards, input, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, guards: Guards, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Stats { model, pnstar } => {
            let m = model.load()?;
            let lts = state_graph(&m.model, guards, pnstar)?;
            let formalism = if pnstar { "pn*".to_string() } else { m.model.formalism().to_string() };
            writeln!(out, "{}", stats_csv(&m.name, &formalism, m.n, m.faults, &lts))?;
            Ok(0)
        }
        Command::Graph { model, format, out: path, pnstar } => {
            let m = model.load()?;
            let lts = state_graph(&m.model, guards, pnstar)?;
            let text = lts.export(match format {
                GraphFormat::Dot => Format::Dot,
                GraphFormat::Json => Format::Json,
            });
            match path {
                Some(p) => fs::write(&p, text).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
                None => write!(out, "{text}")?,
            }
            Ok(0)
        }
        Command::Equiv { left, right, bounded, shared, trace_cap } => {
            let (a, b) = (load_operand(&left)?, load_operand(&right)?);
            let (la, lb) = (a.model.lts(guards)?, b.model.lts(guards)?);
            let shared = if shared.is_empty() {
                let helpers: BTreeSet<Event> = a.model.helpers().into_iter().chain(b.model.helpers()).collect();
                default_shared(&la, &lb, &helpers)
            } else {
                parse_events(&shared)?
            };
            let report = compare(&la, &lb, &shared);
            let mut doc: serde_json::Value = serde_json::from_str(&report.to_json())?;
            if let Some(l) = bounded {
                // steps are counted before projection, so hidden helpers are removed first
                let (ra, rb) = (reduce_helper(&la, &a.model.helpers())?, reduce_helper(&lb, &b.model.helpers())?);
                let c = bounded_compare(&ra, &rb, &shared, l, trace_cap)?;
                doc["bounded"] = serde_json::json!({
                    "max_len": l, "only_left": c.only_a, "only_right": c.only_b, "both": c.both, "csv": c.csv(l),
                });
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(0)
        }
        Command::Traces { model, max_len, shared, trace_cap } => {
            let m = model.load()?;
            let lts = m.model.lts(guards)?;
            let shared = if shared.len() == 1 && shared[0] == "auto" {
                default_shared(&lts, &lts, &m.model.helpers())
            } else {
                parse_events(&shared)?
            };
            let set = bounded_traces(&lts, &shared, max_len, trace_cap)?;
            for t in set.traces() {
                let words: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                writeln!(out, "{}", if words.is_empty() { "<empty>".to_string() } else { words.join(" ") })?;
            }
            writeln!(err, "{} traces", set.len())?;
            Ok(0)
        }
        Command::Run { model, seed, steps, interactive } => {
            let m = model.load()?;
            match &m.model {
                Model::Bp(p) => run_model(p, seed, steps, interactive, input, out),
                Model::Pn(n) => run_model(n, seed, steps, interactive, input, out),
            }
        }
        Command::Translate { pn, verify } => {
            let net = load_net(&pn)?;
            let tr = translate(&net)?;
            write!(out, "{}", tr.dump())?;
            if verify {
                match verify_bisimulation(&net, guards) {
                    Ok(r) => writeln!(out, "bisimulation verified ({} states, {} edges)", r.states, r.edges)?,
                    Err(e) => {
                        writeln!(out, "bisimulation FAILED: {e}")?;
                        return Ok(1);
                    }
                }
            }
            Ok(0)
        }
        Command::Check { model, fail_on_deadlock, fail_on_hot_cycle } => {
            let m = model.load()?;
            let (deadlocks, hot) = match &m.model {
                Model::Bp(p) => check_model(p, guards, out)?,
                Model::Pn(n) => check_model(n, guards, out)?,
            };
            let _ = err;
            Ok(if (fail_on_deadlock && deadlocks > 0) || (fail_on_hot_cycle && hot > 0) { 1 } else { 0 })
        }
    }
}

fn state_graph(model: &Model, guards: Guards, pnstar: bool) -> Result<Lts, Failure> {
    let lts = model.lts(guards)?;
    if pnstar {
        Ok(reduce_helper(&lts, &model.helpers())?)
    } else {
        Ok(lts)
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Running => "RUNNING",
        Status::Deadlock => "DEADLOCK",
        Status::Terminated => "TERMINATED",
    }
}

fn run_model<T: Stepper>(
    m: &T,
    seed: u64,
    steps: usize,
    interactive: bool,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = m.initial();
    let mut taken = 0;
    while taken < steps {
        let succ = m.successors(&s);
        if succ.is_empty() {
            break;
        }
        let pick = if interactive {
            for (i, (e, _)) in succ.iter().enumerate() {
                writeln!(out, "  [{i}] {e}")?;
            }
            write!(out, "choose (q to stop)> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 || line.trim() == "q" {
                break;
            }
            match line.trim().parse::<usize>() {
                Ok(i) if i < succ.len() => i,
                _ => {
                    writeln!(out, "no such choice")?;
                    continue;
                }
            }
        } else {
            rng.gen_range(0..succ.len())
        };
        let (e, next) = succ.into_iter().nth(pick).expect("index in range");
        taken += 1;
        writeln!(out, "{taken}: {e}")?;
        s = next;
    }
    writeln!(out, "{}", status_word(m.status(&s)))?;
    Ok(0)
}

/// Prints replay-checked deadlock paths and hot-cycle lassos; returns their counts.
fn check_model<T: Stepper>(m: &T, guards: Guards, out: &mut dyn Write) -> Result<(usize, usize), Failure> {
    let ex = explore(m, guards)?;
    let lts = &ex.lts;
    let replay = |path: &[(Event, usize)]| -> bool {
        let mut s = m.initial();
        for (e, id) in path {
            let want = &ex.states[*id];
            if !m.successors(&s).iter().any(|(f, t)| f == e && t == want) {
                return false;
            }
            s = want.clone();
        }
        true
    };
    let deadlocks = find_deadlocks(lts);
    writeln!(out, "states: {}, transitions: {}", lts.num_states(), lts.num_edges())?;
    writeln!(out, "deadlocks: {}", deadlocks.len())?;
    for d in &deadlocks {
        let path = shortest_path(lts, *d).expect("deadlock is reachable");
        assert!(replay(&path) && m.status(&ex.states[*d]) == Status::Deadlock, "deadlock witness failed replay");
        let words: Vec<String> = path.iter().map(|(e, _)| e.to_string()).collect();
        writeln!(out, "  state {d} [{}] via: {}", lts.meta[*d].key, words.join(" "))?;
    }
    let mut hot = 0;
    if lts.has_hot_data() {
        let violations = find_hot_cycles(lts)?;
        hot = violations.len();
        writeln!(out, "hot cycles: {hot}")?;
        for v in &violations {
            let mut full = v.prefix.clone();
            full.extend(v.cycle.iter().cloned());
            assert!(replay(&full) && v.cycle.last().map(|c| c.1) == Some(v.entry), "hot-cycle witness failed replay");
            let w = |p: &[(Event, usize)]| p.iter().map(|(e, _)| e.to_string()).collect::<Vec<_>>().join(" ");
            writeln!(out, "  {}: prefix: {} | cycle: {}", v.thread, w(&v.prefix), w(&v.cycle))?;
        }
    }
    Ok((deadlocks.len(), hot))
}

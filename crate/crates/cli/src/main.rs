use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use zxmultiway::export::{branchial_dot, causal_dot, multiway_dot, to_json};
use zxmultiway::frontends::{check_complete_consistent, SetState, SetSystem, StringSystem, TermSystem, TmState, TuringSystem};
use zxmultiway::multiway::*;
use zxmultiway::rulial::{
    completion_experiment, diagram_tier, identity_pair, merge_multiway, monoidal_experiment, quantum_toy, root_not,
    sample_tier, Quotient,
};
use zxmultiway::term::Term;
use zxmultiway::zx::matcher::ZxSystem;
use zxmultiway::zx::rules::{enumerate_rules, instantiate, Family, RuleInstance};
use zxmultiway::zx::{verify_rule, Color, Diagram, DiagramJson, Semantics, Verdict};
use zxmultiway::{Cyclotomic8, Error};

#[derive(Parser)]
#[command(name = "zxmw", version, about = "Multiway evolution of rewriting systems and ZX-diagrams")]
struct Cli {
    /// Engine worker threads; artifacts do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Seed for sampled experiment sweeps.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SystemKind {
    String,
    Set,
    Tm,
    Term,
    Zx,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Evolution,
    States,
}

/// Everything needed to reproduce a run; echoed in every report.
#[derive(Args, Clone, Debug, Serialize)]
struct RunConfig {
    #[arg(long, value_enum)]
    system: SystemKind,
    /// Inline rules. string: "1->01,0->10"; set/term/tm: rules separated by
    /// ';' (tm also accepts "rulial:S,C"); zx: "identity", "enum:N,M" or
    /// "CODE/COLOR/p1,p2;..."
    #[arg(long)]
    rules: Option<String>,
    /// JSON rule file in the frontend's own serialization.
    #[arg(long)]
    rules_file: Option<PathBuf>,
    /// Initial state; repeat for several roots.
    #[arg(long, required = true)]
    init: Vec<String>,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    #[arg(long, value_enum, default_value = "evolution")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_events: usize,
    #[arg(long, default_value_t = 100_000)]
    max_paths: usize,
}

impl RunConfig {
    fn limits(&self) -> Limits {
        Limits { max_states: self.max_states, max_events: self.max_events, max_paths: self.max_paths }
    }

    fn evolve_config(&self, workers: usize) -> EvolveConfig {
        let mode = match self.mode {
            ModeArg::Evolution => Mode::Evolution,
            ModeArg::States => Mode::States,
        };
        let mut cfg = EvolveConfig::new(self.steps, mode).workers(workers);
        cfg.limits = self.limits();
        cfg
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve a system and export its multiway graph.
    Evolve {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Causal graph of a multiway evolution.
    Causal {
        #[command(flatten)]
        run: RunConfig,
        /// Keep only the transitive reduction.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Branchial graph of one foliation slice.
    Branchial {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long)]
        slice: usize,
        /// Ancestor window in steps.
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Linear map of a ZX-diagram as matrix JSON.
    Semantics {
        /// Diagram in text form.
        #[arg(long, conflicts_with = "file")]
        zx: Option<String>,
        /// Diagram JSON file.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Rules(RulesCmd),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    #[command(subcommand)]
    Quantum(QuantumCmd),
    /// Bounded completion: add rules joining divergent branch pairs.
    Complete {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        join_depth: usize,
        #[arg(long, value_enum, default_value = "both")]
        orientation: OrientationArg,
        #[arg(long, default_value_t = 64)]
        max_rules: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand)]
enum RulesCmd {
    /// Canonical rule enumeration up to the given arities.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        max_in: usize,
        #[arg(long, default_value_t = 2)]
        max_out: usize,
        /// Write the instances as a JSON rule file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Checks every rule of a JSON rule file at the given phases.
    Verify {
        #[arg(long)]
        file: PathBuf,
        /// Phases substituted for every variable, such as `pi/2`.
        #[arg(long, value_delimiter = ',', default_value = "0,pi/2,pi,3pi/2")]
        phases: Vec<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Rulial composition of the Z and X identity rules against diagram stacking.
    Monoidal {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=3))]
        tier: u64,
        /// Seeded sample size; the whole tier when omitted.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long, value_enum, default_value = "chain")]
        quotient: QuotientArg,
        /// Include diagrams with parallel wires.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-spider system and its colour inversion, before and after completion.
    Completion {
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QuantumCmd {
    /// Multiway amplitudes of the square root of NOT.
    RootNot {
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Joins every branch pair within a bounded number of steps.
    Confluence {
        #[command(flatten)]
        run: RunConfig,
        #[arg(long, default_value_t = 2)]
        join_depth: usize,
    },
    /// Compares causal graphs across all single-way paths.
    Invariance {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Completeness and consistency of a string system under negation.
    Toy {
        #[arg(long)]
        rules: String,
        #[arg(long, default_value = "1")]
        init: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Both,
    Shortlex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuotientArg {
    None,
    Chain,
    Inversion,
    Both,
}

enum Failure {
    Verdict(String),
    Config(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) => Failure::Resource(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, content: &str) -> Res<()> {
    fs::write(path, content).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    serde_json::from_str(&read(path)?).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn split_rules(s: &str) -> Vec<&str> {
    s.split(';').map(str::trim).filter(|r| !r.is_empty()).collect()
}

fn zx_rules(spec: &str) -> Res<Vec<RuleInstance>> {
    if spec == "identity" {
        let (z, x) = identity_pair();
        return Ok(vec![z, x]);
    }
    if let Some(bounds) = spec.strip_prefix("enum:") {
        let (n, m) = bounds.split_once(',').ok_or_else(|| config("expected enum:N,M"))?;
        let n = n.trim().parse().map_err(|_| config("bad arity"))?;
        let m = m.trim().parse().map_err(|_| config("bad arity"))?;
        return Ok(enumerate_rules(n, m));
    }
    split_rules(spec)
        .into_iter()
        .map(|item| {
            let parts: Vec<&str> = item.split('/').collect();
            let family: Family = parts[0].parse()?;
            let color = match parts.get(1).copied().unwrap_or("Z") {
                "Z" => Color::Z,
                "X" => Color::X,
                c => return Err(config(format!("unknown colour `{c}`"))),
            };
            let params = match parts.get(2) {
                Some(p) => p
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| config(format!("bad parameter in `{item}`"))))
                    .collect::<Res<Vec<_>>>()?,
                None => Vec::new(),
            };
            Ok(instantiate(family, color, &params)?)
        })
        .collect()
}

enum Loaded {
    Str(StringSystem, Vec<String>),
    Set(SetSystem, Vec<SetState>),
    Tm(TuringSystem, Vec<TmState>),
    Term(TermSystem, Vec<Term>),
    Zx(ZxSystem, Vec<Diagram>),
}

fn load(run: &RunConfig) -> Res<Loaded> {
    let inline = || run.rules.clone().ok_or_else(|| config("one of --rules or --rules-file is required"));
    if run.rules.is_some() == run.rules_file.is_some() {
        return Err(config("give exactly one of --rules or --rules-file"));
    }
    let file = run.rules_file.as_deref();
    Ok(match run.system {
        SystemKind::String => {
            let sys = match file {
                Some(f) => from_json(f)?,
                None => StringSystem::parse(&inline()?)?,
            };
            Loaded::Str(sys, run.init.clone())
        }
        SystemKind::Set => {
            let sys = match file {
                Some(f) => from_json(f)?,
                None => SetSystem::parse(&split_rules(&inline()?))?,
            };
            Loaded::Set(sys, run.init.iter().map(|s| SetState::parse(s)).collect::<Result<_, _>>()?)
        }
        SystemKind::Tm => {
            let sys = match file {
                Some(f) => from_json(f)?,
                None => {
                    let spec = inline()?;
                    match spec.strip_prefix("rulial:") {
                        Some(b) => {
                            let v: Vec<u8> =
                                b.split(',').map(|x| x.trim().parse().map_err(|_| config("bad rulial bound"))).collect::<Res<_>>()?;
                            let [s, c] = v[..] else { return Err(config("expected rulial:S,C")) };
                            TuringSystem::rulial(s, c, false)?
                        }
                        None => TuringSystem::parse(&spec)?,
                    }
                }
            };
            // a bare head state means a blank tape; anything else is TmState JSON
            let inits = run
                .init
                .iter()
                .map(|s| match s.parse::<u8>() {
                    Ok(q) => Ok(TmState::blank(q)),
                    Err(_) => serde_json::from_str(s).map_err(|e| config(format!("tm init `{s}`: {e}"))),
                })
                .collect::<Res<_>>()?;
            Loaded::Tm(sys, inits)
        }
        SystemKind::Term => {
            let sys = match file {
                Some(f) => from_json(f)?,
                None => TermSystem::parse(&split_rules(&inline()?))?,
            };
            Loaded::Term(sys, run.init.iter().map(|s| s.parse()).collect::<Result<_, _>>()?)
        }
        SystemKind::Zx => {
            let rules: Vec<RuleInstance> = match file {
                Some(f) => from_json(f)?,
                None => zx_rules(&inline()?)?,
            };
            Loaded::Zx(ZxSystem::new(&rules), run.init.iter().map(|s| s.parse()).collect::<Result<_, _>>()?)
        }
    })
}

macro_rules! with_system {
    ($loaded:expr, |$sys:ident, $inits:ident| $body:expr) => {
        match $loaded {
            Loaded::Str($sys, $inits) => $body,
            Loaded::Set($sys, $inits) => $body,
            Loaded::Tm($sys, $inits) => $body,
            Loaded::Term($sys, $inits) => $body,
            Loaded::Zx($sys, $inits) => $body,
        }
    };
}

fn summary(g: &MultiwayGraph) -> Value {
    let slices: Vec<usize> = (0..=g.max_generation()).map(|t| g.slice(t).len()).collect();
    json!({
        "states": g.state_count(),
        "events": g.events.len(),
        "slices": slices,
        "components": g.components(),
    })
}

fn emit(out: Option<&Path>, report: &Value) -> Res<()> {
    let text = to_json(report)?;
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn graph_of<R: RewriteSystem>(sys: &R, inits: &[R::State], run: &RunConfig, workers: usize) -> Res<MultiwayGraph> {
    Ok(evolve(sys, inits, &run.evolve_config(workers))?.graph)
}

fn run(cli: Cli) -> Res<()> {
    let workers = cli.workers;
    match cli.cmd {
        Cmd::Evolve { run, dot, json } => {
            let g = with_system!(load(&run)?, |s, i| graph_of(&s, &i, &run, workers))?;
            if let Some(p) = dot {
                write(&p, &multiway_dot(&g))?;
            }
            if let Some(p) = json {
                write(&p, &to_json(&g)?)?;
            }
            emit(None, &json!({ "config": run, "graph": summary(&g) }))
        }
        Cmd::Causal { mut run, reduce, dot, json } => {
            run.mode = ModeArg::Evolution;
            let g = with_system!(load(&run)?, |s, i| graph_of(&s, &i, &run, workers))?;
            let mut c = g.causal_graph();
            if reduce {
                c = c.transitive_reduction()?;
            }
            if let Some(p) = dot {
                write(&p, &causal_dot(&g, &c))?;
            }
            if let Some(p) = json {
                write(&p, &to_json(&c)?)?;
            }
            emit(None, &json!({ "config": run, "events": c.events, "edges": c.edges.len(), "acyclic": c.is_acyclic() }))
        }
        Cmd::Branchial { run, slice, window, dot, json } => {
            let g = with_system!(load(&run)?, |s, i| graph_of(&s, &i, &run, workers))?;
            let b = g.branchial(slice, window)?;
            if let Some(p) = dot {
                write(&p, &branchial_dot(&g, &b))?;
            }
            if let Some(p) = json {
                write(&p, &to_json(&b)?)?;
            }
            emit(None, &json!({ "config": run, "vertices": b.vertices.len(), "edges": b.edges.len() }))
        }
        Cmd::Semantics { zx, file, out } => {
            let d: Diagram = match (zx, file) {
                (Some(text), None) => text.parse()?,
                (None, Some(f)) => Diagram::from_json(&from_json::<DiagramJson>(&f)?)?,
                _ => return Err(config("give --zx or --file")),
            };
            let m = Semantics::of(&d)?;
            let exact = matches!(m, Semantics::Exact(_));
            let mut report = serde_json::to_value(m.to_float().to_json()).map_err(|e| config(e.to_string()))?;
            report["exact"] = json!(exact);
            emit(out.as_deref(), &report)
        }
        Cmd::Rules(RulesCmd::Enumerate { max_in, max_out, json }) => {
            let rules = enumerate_rules(max_in, max_out);
            match json {
                Some(p) => {
                    write(&p, &to_json(&rules)?)?;
                    println!("{} rules", rules.len());
                }
                None => {
                    for r in &rules {
                        println!("{}\t{}\t=>\t{}", r.id, r.lhs, r.rhs);
                    }
                }
            }
            Ok(())
        }
        Cmd::Rules(RulesCmd::Verify { file, phases, tol }) => {
            let rules: Vec<RuleInstance> = from_json(&file)?;
            let phases: Vec<zxmultiway::Phase> = phases.iter().map(|p| p.parse()).collect::<Result<_, _>>()?;
            let mut unsound = Vec::new();
            for r in &rules {
                for p in &phases {
                    let binding = r.variables().into_iter().map(|v| (v, *p)).collect();
                    let (l, rr) = r.concrete(&binding)?;
                    let v = verify_rule(&l, &rr, tol)?;
                    if v != Verdict::Equal {
                        unsound.push(json!({ "rule": r.id, "phase": p.to_string(), "verdict": v }));
                    }
                }
            }
            let ok = unsound.is_empty();
            emit(None, &json!({ "rules": rules.len(), "phases": phases.len(), "failures": unsound }))?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verdict("some rules are not sound".into()))
            }
        }
        Cmd::Experiment(ExperimentCmd::Monoidal { tier, sample, steps, quotient, parallel, out }) => {
            let q = match quotient {
                QuotientArg::None => Quotient::None,
                QuotientArg::Chain => Quotient::ChainCommutation,
                QuotientArg::Inversion => Quotient::ColorInversion,
                QuotientArg::Both => Quotient::Both,
            };
            let tier = tier as usize;
            let diagrams = match sample {
                Some(n) => sample_tier(tier, parallel, n, cli.seed),
                None => diagram_tier(tier, parallel),
            };
            let (z, x) = identity_pair();
            let cfg = EvolveConfig::new(steps, Mode::States).workers(workers);
            let reports = diagrams
                .iter()
                .map(|d| monoidal_experiment(d, &z, &x, steps, q, &cfg))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().filter(|r| r.passed).count();
            let total = reports.len();
            emit(
                out.as_deref(),
                &json!({ "tier": tier, "seed": cli.seed, "steps": steps, "passed": passed, "total": total, "instances": reports }),
            )?;
            eprintln!("{passed}/{total} instances compatible");
            if passed == total {
                Ok(())
            } else {
                Err(Failure::Verdict(format!("{} instances not compatible", total - passed)))
            }
        }
        Cmd::Experiment(ExperimentCmd::Completion { steps, out }) => {
            let r = completion_experiment(steps)?;
            let merged = r.components_after == 1;
            emit(out.as_deref(), &serde_json::to_value(&r).map_err(|e| config(e.to_string()))?)?;
            if merged {
                Ok(())
            } else {
                Err(Failure::Verdict("completed graph is not connected".into()))
            }
        }
        Cmd::Quantum(QuantumCmd::RootNot { steps, out, dot }) => {
            let (gate, init) = root_not::<Cyclotomic8>();
            let q = quantum_toy(gate.clone(), &init, steps)?;
            // direct matrix evolution for comparison
            let mut v = init.clone();
            let mut faithful = q.amplitudes[0] == v;
            for t in 1..=steps {
                v = (0..2).map(|r| gate.get(r, 0).clone() * v[0].clone() + gate.get(r, 1).clone() * v[1].clone()).collect();
                faithful &= q.amplitudes[t] == v;
            }
            if let Some(p) = dot {
                write(&p, &multiway_dot(&q.graph))?;
            }
            let slices: Vec<Value> = q
                .amplitudes
                .iter()
                .map(|a| {
                    json!(a
                        .iter()
                        .map(|z| {
                            let c = zxmultiway::Scalar::to_c64(z);
                            [c.re + 0.0, c.im + 0.0]
                        })
                        .collect::<Vec<_>>())
                })
                .collect();
            emit(out.as_deref(), &json!({ "steps": steps, "amplitudes": slices, "faithful": faithful }))?;
            if faithful {
                Ok(())
            } else {
                Err(Failure::Verdict("amplitudes differ from matrix evolution".into()))
            }
        }
        Cmd::Complete { run, depth, join_depth, orientation, max_rules, out } => {
            let ccfg = CompletionConfig {
                depth,
                join_depth,
                orientation: match orientation {
                    OrientationArg::Both => Orientation::Both,
                    OrientationArg::Shortlex => Orientation::ShortLex,
                },
                max_rules,
                limits: run.limits(),
            };
            let report = with_system!(load(&run)?, |s, i| completion_report(s, &i, &run, &ccfg, workers))?;
            let saturated = report["saturated"] == json!(true);
            emit(out.as_deref(), &json!({ "config": run, "completion": report }))?;
            if saturated {
                Ok(())
            } else {
                Err(Failure::Resource(format!("completion stopped at {max_rules} rules")))
            }
        }
        Cmd::Check(CheckCmd::Confluence { run, join_depth }) => {
            let r = with_system!(load(&run)?, |s, i| check_confluence(&s, &i, run.steps, join_depth, &run.limits()))?;
            let ok = matches!(r.verdict, ConfluenceVerdict::Joined { .. });
            emit(None, &json!({ "config": run, "report": r }))?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verdict("branch pairs left unjoined".into()))
            }
        }
        Cmd::Check(CheckCmd::Invariance { run }) => {
            let mut verdicts = Vec::new();
            with_system!(load(&run)?, |s, i| {
                for init in &i {
                    verdicts.push(check_causal_invariance(&s, init, run.steps, &run.limits())?);
                }
            });
            let ok = verdicts.iter().all(|v| matches!(v, InvarianceVerdict::Invariant { .. }));
            let capped = verdicts.iter().any(|v| matches!(v, InvarianceVerdict::Inconclusive { .. }));
            emit(None, &json!({ "config": run, "verdicts": verdicts }))?;
            match (ok, capped) {
                (true, _) => Ok(()),
                (false, true) => Err(Failure::Resource("path cap reached".into())),
                _ => Err(Failure::Verdict("causal graphs differ between paths".into())),
            }
        }
        Cmd::Check(CheckCmd::Toy { rules, init, depth, max_len }) => {
            let sys = StringSystem::parse(&rules)?;
            let r = check_complete_consistent(&sys, &init, depth, max_len)?;
            let ok = r.consistent() && r.complete();
            emit(
                None,
                &json!({
                    "rules": rules, "init": init, "depth": depth, "max_len": max_len,
                    "consistent": r.consistent(), "complete": r.complete(), "report": r,
                }),
            )?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verdict("system is incomplete or inconsistent".into()))
            }
        }
    }
}

fn completion_report<R: RewriteSystem + Clone>(
    sys: R,
    inits: &[R::State],
    run: &RunConfig,
    ccfg: &CompletionConfig,
    workers: usize,
) -> Res<Value> {
    let cfg = run.evolve_config(workers);
    let components = |s: &dyn Fn(&R::State) -> zxmultiway::Result<MultiwayGraph>| -> Res<usize> {
        let graphs = inits.iter().map(s).collect::<Result<Vec<_>, _>>()?;
        Ok(merge_multiway(&graphs)?.components())
    };
    let before = components(&|i| evolve(&sys, std::slice::from_ref(i), &cfg).map(|e| e.graph))?;
    let out = complete(sys.clone(), inits, ccfg)?;
    let after = components(&|i| evolve(&out.system, std::slice::from_ref(i), &cfg).map(|e| e.graph))?;
    let added: Vec<Value> = out.system.added.iter().map(|a| json!({ "from": a.from_key, "to": a.to_key })).collect();
    Ok(json!({
        "added": added,
        "saturated": out.saturated,
        "components_before": before,
        "components_after": after,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(m)) => {
            eprintln!("verdict: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("resource cap: {m}");
            ExitCode::from(3)
        }
    }
}

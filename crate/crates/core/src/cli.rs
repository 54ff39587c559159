//! Command-line front end. Exit codes: 0 success, 1 property refuted, 2 error or unknown.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::behavior::{build_rg, ExplorationLimits};
use crate::dsl;
use crate::fixtures::{fixture, gen_emblem, gen_swimming_pool};
use crate::liveness::{check_liveness_with, deadlock_ilp, DEFAULT_BUDGET};
use crate::net::System;
use crate::report::{
    bounds_table, liveness_report, reach_report, reversibility_report, AnalysisReport, LivenessReport,
    ReversibilityReport,
};
use crate::reversibility::check_reversibility;
use crate::structure::classify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "petri-h1s", version, about = "Liveness and reversibility of weighted Petri nets")]
pub struct Cli {
    /// print a JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural class flags
    Classify { net: String },
    /// Liveness through the deadlock ILP
    Liveness {
        net: String,
        /// also explore the reachability graph and compare
        #[arg(long)]
        oracle: bool,
        /// branch-and-bound node budget
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 200_000)]
        max_nodes: usize,
    },
    /// Reversibility through feasible T-sequences
    Reversibility {
        net: String,
        #[arg(long, default_value_t = 4)]
        kmax: u64,
        #[arg(long, default_value_t = 200_000)]
        max_nodes: usize,
    },
    /// Explicit reachability graph
    Reach {
        net: String,
        #[arg(long, default_value_t = 200_000)]
        max_nodes: usize,
        /// write the graph in DOT format
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Write the deadlock ILP in LP format
    ExportIlp {
        net: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print a generated net in the text format
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Structural upper bound of every place
    Bounds { net: String },
}

#[derive(Subcommand, Debug)]
pub enum GenModel {
    SwimmingPool { a: u64, b: u64, c: u64 },
    Emblem {
        #[arg(num_args = 9, required = true)]
        m: Vec<u64>,
    },
}

/// Reads a net file, or a built-in system given as `fixture:NAME`.
pub fn load_net(spec: &str) -> Result<System, String> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return fixture(name).ok_or_else(|| format!("unknown fixture `{name}`"));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
    dsl::parse(&text).map_err(|e| format!("{spec}: {e}"))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match &cli.command {
        Command::Gen { model } => {
            let s = match model {
                GenModel::SwimmingPool { a, b, c } => {
                    if [a, b, c].iter().any(|&&v| v < 1) {
                        return Err("swimming-pool parameters must be at least 1".into());
                    }
                    gen_swimming_pool(*a, *b, *c)
                }
                GenModel::Emblem { m } => {
                    let m: [u64; 9] = m.as_slice().try_into().map_err(|_| "emblem takes nine markings")?;
                    gen_emblem(m)
                }
            };
            write!(out, "{}", dsl::to_text(&s)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::ExportIlp { net, output } => {
            let s = load_net(net)?;
            let ilp = deadlock_ilp(&s).map_err(|e| e.to_string())?;
            std::fs::write(output, exact_ilp::export_lp(&ilp.model)).map_err(|e| format!("{}: {e}", output.display()))?;
            if !cli.json {
                writeln!(
                    out,
                    "wrote {} ({} constraints, {} variables)",
                    output.display(),
                    ilp.model.constraints.len(),
                    ilp.model.vars.len()
                )
                .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        cmd => analyse(cmd, cli.json, out),
    }
}

fn analyse(cmd: &Command, json: bool, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    let net_arg = match cmd {
        Command::Classify { net }
        | Command::Liveness { net, .. }
        | Command::Reversibility { net, .. }
        | Command::Reach { net, .. }
        | Command::Bounds { net } => net,
        _ => unreachable!("handled by execute"),
    };
    let s = load_net(net_arg)?;
    let mut report = AnalysisReport::new(net_arg.clone());
    let mut code = EXIT_OK;
    let mut text = String::new();
    match cmd {
        Command::Classify { .. } => {
            let t = Instant::now();
            let c = classify(&s.net);
            report.timings_ms.insert("classify".into(), ms(t));
            text = format!("{c:#?}\n");
            report.classification = Some(c);
        }
        Command::Liveness {
            oracle,
            budget,
            max_nodes,
            ..
        } => {
            let t = Instant::now();
            let v = liveness_report(&s, &check_liveness_with(&s, *budget));
            report.timings_ms.insert("liveness".into(), ms(t));
            let mut settled = match &v {
                LivenessReport::Live => Some(true),
                LivenessReport::NonLive { .. } => Some(false),
                _ => None,
            };
            text.push_str(&format!("liveness: {}\n", describe_liveness(&v)));
            if *oracle {
                let t = Instant::now();
                let r = reach_report(&build_rg(&s, ExplorationLimits::nodes(*max_nodes)), &s.net);
                report.timings_ms.insert("oracle".into(), ms(t));
                match r.live {
                    Some(l) => text.push_str(&format!("oracle: {}\n", if l { "live" } else { "not live" })),
                    None => text.push_str(&format!("oracle: graph truncated at {} nodes\n", r.nodes)),
                }
                if settled.is_some() && r.live.is_some() && settled != r.live {
                    return Err("deadlock ILP and reachability graph disagree".into());
                }
                settled = settled.or(r.live);
                report.oracle_live = r.live;
            }
            report.liveness = Some(v);
            code = match settled {
                Some(true) => EXIT_OK,
                Some(false) => EXIT_REFUTED,
                None => EXIT_ERROR,
            };
        }
        Command::Reversibility { kmax, max_nodes, .. } => {
            let t = Instant::now();
            let v = check_reversibility(&s, *kmax, ExplorationLimits::nodes(*max_nodes));
            let v = reversibility_report(&s, &v);
            report.timings_ms.insert("reversibility".into(), ms(t));
            code = match &v {
                ReversibilityReport::Reversible { t_sequence } => {
                    text = format!("reversible, T-sequence: {}\n", t_sequence.join(" "));
                    EXIT_OK
                }
                ReversibilityReport::NotReversible { reason } => {
                    text = format!("not reversible: {reason}\n");
                    EXIT_REFUTED
                }
                ReversibilityReport::NotApplicable { reason } => {
                    text = format!("not applicable: {reason}\n");
                    EXIT_ERROR
                }
                ReversibilityReport::Unknown { k_max } => {
                    text = format!("unknown: no T-sequence found with k up to {k_max}\n");
                    EXIT_ERROR
                }
            };
            report.reversibility = Some(v);
        }
        Command::Reach { max_nodes, dot, .. } => {
            let t = Instant::now();
            let rg = build_rg(&s, ExplorationLimits::nodes(*max_nodes));
            let r = reach_report(&rg, &s.net);
            report.timings_ms.insert("reach".into(), ms(t));
            if let Some(path) = dot {
                std::fs::write(path, rg.to_dot(&s.net)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let flag = |b: Option<bool>| b.map_or("unknown".to_string(), |b| b.to_string());
            text = format!(
                "{} markings, {} arcs{}\nlive: {}\nreversible: {}\ndeadlock-free: {}\n",
                r.nodes,
                r.arcs,
                if r.complete { "" } else { " (truncated)" },
                flag(r.live),
                flag(r.reversible),
                flag(r.deadlock_free)
            );
            if !r.complete {
                code = EXIT_ERROR;
            }
            report.reach = Some(r);
        }
        Command::Bounds { .. } => {
            let t = Instant::now();
            let rows = bounds_table(&s);
            report.timings_ms.insert("bounds".into(), ms(t));
            for row in &rows {
                let up = row.upper.map_or("unbounded".to_string(), |u| u.to_string());
                text.push_str(&format!("{}\t{}\t{}\n", row.place, row.initial, up));
            }
            report.bounds = Some(rows);
        }
        _ => unreachable!("handled by execute"),
    }
    if json {
        writeln!(out, "{}", report.to_json()).map_err(io)?;
    } else {
        write!(out, "{text}").map_err(io)?;
    }
    Ok(code)
}

fn describe_liveness(v: &LivenessReport) -> String {
    match v {
        LivenessReport::Live => "live".into(),
        LivenessReport::NonLive { deadlock, .. } => {
            let m: Vec<String> = deadlock.iter().filter(|(_, &k)| k > 0).map(|(p, k)| format!("{p}={k}")).collect();
            format!("not live, potentially reachable deadlock {{{}}}", m.join(", "))
        }
        LivenessReport::NotApplicable { reason } => format!("not applicable: {reason}"),
        LivenessReport::Inconclusive { budget } => format!("inconclusive after {budget} nodes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["petri-h1s"];
        argv.extend(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["liveness", "fixture:swimming_pool"]).0, EXIT_REFUTED);
        assert_eq!(call(&["reach", "fixture:fig1"]).0, EXIT_OK);
        assert_eq!(call(&["classify", "fixture:nope"]).0, EXIT_ERROR);
        assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(call(&["gen", "swimming-pool", "0", "1", "1"]).0, EXIT_ERROR);
    }

    #[test]
    fn classify_json() {
        let (code, out) = call(&["--json", "classify", "fixture:fig21"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classification"]["shared_place_count"], 2);
    }

    #[test]
    fn generated_text_parses_back() {
        let (code, out) = call(&["gen", "swimming-pool", "1", "1", "1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(dsl::parse(&out).unwrap(), gen_swimming_pool(1, 1, 1));
        let (_, out) = call(&["gen", "emblem", "0", "1", "1", "1", "1", "2", "0", "0", "1"]);
        assert_eq!(dsl::parse(&out).unwrap().net.num_places(), 9);
    }
}

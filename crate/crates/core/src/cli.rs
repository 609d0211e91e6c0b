//! Command-line front end. Exit codes: 0 affirmative, 1 negative verdict,
//! 2 usage or validation error, 3 size cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::arborescence::{arborescence_instance_to_json, parse_arborescence_instance, ArborescenceInstance};
use crate::certificates::{
    build_branching_certificate, certificate_to_json, verify_colored_branching, BranchingVerdict, CertificateOutcome,
};
use crate::error::{Error, Result};
use crate::generators::{self, MatroidKind, PrefModel};
use crate::instance::{
    instance_to_json, parse_instance, parse_matching, parse_matching_set, set_to_json, Matching, MatchingInstance,
};
use crate::popularity::{
    brute_force_condorcet_dimension, brute_force_pareto_sets, default_cap, verify_pareto_optimal, verify_popular,
    verify_strongly_popular, ParetoVerdict, PopularityVerdict,
};
use crate::solvers::{solve_arborescence, solve_auto};

#[derive(Parser, Debug)]
#[command(name = "condorcet", version, about = "Popular sets of matchings and arborescences")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a popular set with the solver suited to the instance.
    Solve {
        instance: PathBuf,
        /// Picking order for round robin, as comma-separated agent names.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
    },
    /// Two arborescences that give every node a maximal incoming arc.
    Arborescence {
        instance: PathBuf,
        /// Also check popularity by enumerating all arborescences.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 200_000)]
        limit: usize,
    },
    /// Decide whether a set of matchings is popular.
    VerifyPopular {
        instance: PathBuf,
        set: PathBuf,
        /// Strong popularity, decided by enumeration.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Decide whether a matching is Pareto-optimal.
    VerifyPareto { instance: PathBuf, matching: PathBuf },
    /// Branching certificate for a set against a competitor, or a dominating set.
    Certify { instance: PathBuf, set: PathBuf, competitor: PathBuf },
    /// Smallest popular set by exhaustive search.
    Dimension {
        instance: PathBuf,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Print a generated instance document.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Exhaustive queries.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
}

#[derive(Subcommand, Debug)]
enum Family {
    /// Identical partial orders forcing dimension k + 1.
    LowerBoundMatching {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Matroid family with no popular set of size k.
    LowerBoundMatroid {
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Three agents without a Pareto-optimal matching.
    NoPareto,
    /// Vertex cover reduction; edges as `u-v` pairs of node indices.
    VertexCover {
        #[arg(long)]
        nodes: usize,
        #[arg(long, value_delimiter = ',')]
        edges: Vec<String>,
        #[arg(long)]
        ell: usize,
    },
    /// Multi-dimensional matching reduction. Parts separated by `;`,
    /// elements by `,`; tuples as `i-j-...` element indices.
    Ldm {
        #[arg(long)]
        parts: String,
        #[arg(long, value_delimiter = ',')]
        tuples: Vec<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
        #[arg(long, value_enum, default_value_t = PrefModel::Strict)]
        model: PrefModel,
        #[arg(long, value_enum, default_value_t = MatroidKind::None)]
        matroid: MatroidKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded random rooted digraph with ranked incoming arcs.
    RandomArborescence {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, value_enum, default_value_t = PrefModel::Strict)]
        model: PrefModel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Assignment instance with a Pareto-optimal pair beaten by a competitor.
    AssignmentCounterexample {
        #[arg(long, default_value_t = 6)]
        max_agents: usize,
        #[arg(long, default_value_t = 600)]
        budget_secs: u64,
    },
}

#[derive(Subcommand, Debug)]
enum OracleQuery {
    /// A non-dominated set of at most `size` matchings.
    ParetoSets {
        instance: PathBuf,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
}

/// What a command prints and how it exits.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn new(text: String, json: Value, code: i32) -> Self {
        Report { text, json, code }
    }
}

/// A closed stdout (e.g. piped into `head`) is not an error.
fn out(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let as_json = cli.json;
    match execute(cli.command) {
        Ok(r) => {
            if as_json {
                out(&serde_json::to_string_pretty(&r.json).expect("output serializes"));
            } else {
                out(r.text.trim_end());
            }
            r.code
        }
        Err(e) => {
            if as_json {
                out(&json!({"error": e.to_string(), "code": e.code()}).to_string());
            } else {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MatchingInstance> {
    parse_instance(&read(path)?)
}

fn show_matching(inst: &MatchingInstance, m: &Matching) -> String {
    (0..inst.n_agents())
        .map(|a| format!("{}:{}", inst.agents()[a], m.0[a].map_or("-", |o| inst.objects()[o].as_str())))
        .collect::<Vec<_>>()
        .join(" ")
}

fn show_set(inst: &MatchingInstance, set: &[Matching]) -> String {
    set.iter().enumerate().map(|(i, m)| format!("  [{}] {}\n", i + 1, show_matching(inst, m))).collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Solve { instance, order } => solve(&load(&instance)?, order),
        Command::Arborescence { instance, check, limit } => arborescence(&parse_arborescence_instance(&read(&instance)?)?, check, limit),
        Command::VerifyPopular { instance, set, strict, cap } => {
            let inst = load(&instance)?;
            let set = parse_matching_set(&inst, &read(&set)?)?;
            let verdict = if strict {
                verify_strongly_popular(&inst, &set, cap.unwrap_or_else(default_cap))?
            } else {
                verify_popular(&inst, &set)?
            };
            Ok(match verdict {
                PopularityVerdict::Popular => Report::new("popular".into(), json!({"verdict": "popular"}), 0),
                PopularityVerdict::NotPopular { counterexample, tally } => Report::new(
                    format!(
                        "not popular\ncounterexample: {}\nmargin: {}",
                        show_matching(&inst, &counterexample),
                        tally.margin
                    ),
                    json!({
                        "verdict": "not_popular",
                        "counterexample": set_to_json(&inst, &[counterexample])[0],
                        "for_set": tally.for_set,
                        "against_set": tally.against_set,
                        "margin": tally.margin,
                    }),
                    1,
                ),
            })
        }
        Command::VerifyPareto { instance, matching } => {
            let inst = load(&instance)?;
            let m = parse_matching(&inst, &read(&matching)?)?;
            Ok(match verify_pareto_optimal(&inst, &m)? {
                ParetoVerdict::ParetoOptimal => {
                    Report::new("pareto-optimal".into(), json!({"verdict": "pareto_optimal"}), 0)
                }
                ParetoVerdict::Dominated { witness } => Report::new(
                    format!("dominated\nwitness: {}", show_matching(&inst, &witness)),
                    json!({"verdict": "dominated", "witness": set_to_json(&inst, &[witness])[0]}),
                    1,
                ),
            })
        }
        Command::Certify { instance, set, competitor } => {
            let inst = load(&instance)?;
            let set = parse_matching_set(&inst, &read(&set)?)?;
            let n = parse_matching(&inst, &read(&competitor)?)?;
            certify(&inst, &set, &n)
        }
        Command::Dimension { instance, strict, cap } => {
            let inst = load(&instance)?;
            let (k, witness) = brute_force_condorcet_dimension(&inst, strict, cap.unwrap_or_else(default_cap))?;
            Ok(Report::new(
                format!("{k}\nwitness:\n{}", show_set(&inst, &witness)),
                json!({"dimension": k, "strict": strict, "witness": set_to_json(&inst, &witness)}),
                0,
            ))
        }
        Command::Generate { family } => generate(family),
        Command::Oracle { query: OracleQuery::ParetoSets { instance, size, cap } } => {
            let inst = load(&instance)?;
            Ok(match brute_force_pareto_sets(&inst, size, cap.unwrap_or_else(default_cap))? {
                Some(set) => Report::new(
                    format!("non-dominated set of size {}:\n{}", set.len(), show_set(&inst, &set)),
                    json!({"exists": true, "set": set_to_json(&inst, &set)}),
                    0,
                ),
                None => Report::new(format!("no non-dominated set of size at most {size}"), json!({"exists": false}), 1),
            })
        }
    }
}

fn solve(inst: &MatchingInstance, order: Option<Vec<String>>) -> Result<Report> {
    let order = order
        .map(|names| {
            names
                .iter()
                .map(|s| inst.agent_id(s.trim()).ok_or_else(|| Error::Validation(format!("unknown agent {s}"))))
                .collect::<Result<Vec<usize>>>()
        })
        .transpose()?;
    let report = solve_auto(inst, order.as_deref())?;
    let popular = verify_popular(inst, &report.set)?.is_popular();
    let mut text = format!("solver: {}\n", serde_json::to_value(report.solver)?.as_str().unwrap_or("?"));
    text += &show_set(inst, &report.set);
    text += &format!("popular: {}\n", yes_no(popular));
    if let Some(w) = &report.warning {
        text += &format!("warning: {w}\n");
    }
    let mut out = serde_json::to_value(&report)?;
    out["set"] = set_to_json(inst, &report.set);
    out["popular"] = json!(popular);
    Ok(Report::new(text, out, 0))
}

fn arborescence(inst: &ArborescenceInstance, check: bool, limit: usize) -> Result<Report> {
    let pair = solve_arborescence(inst)?;
    let names = |tree: &[usize]| -> Vec<Value> {
        tree.iter()
            .map(|&e| {
                let (u, v) = inst.arcs()[e];
                json!([inst.nodes()[u], inst.nodes()[v]])
            })
            .collect()
    };
    let show = |tree: &[usize]| -> String {
        tree.iter()
            .map(|&e| {
                let (u, v) = inst.arcs()[e];
                format!("{}->{}", inst.nodes()[u], inst.nodes()[v])
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut text = format!("first: {}\nsecond: {}\n", show(&pair.first), show(&pair.second));
    let mut out = json!({"first": names(&pair.first), "second": names(&pair.second), "maximal": names(&pair.maximal)});
    let mut code = 0;
    if check {
        let popular = inst.counterexample(&pair.as_set(), false, limit)?.is_none();
        text += &format!("popular: {}\n", yes_no(popular));
        out["popular"] = json!(popular);
        if !popular {
            code = 1;
        }
    }
    Ok(Report::new(text, out, code))
}

fn certify(inst: &MatchingInstance, set: &[Matching], n: &Matching) -> Result<Report> {
    Ok(match build_branching_certificate(inst, set, n)? {
        CertificateOutcome::Certificate(cert) => {
            let verdict = verify_colored_branching(&cert);
            let text = match &verdict {
                BranchingVerdict::Valid { red, blue } => {
                    format!("certificate: valid\narcs: {}\nred: {red}\nblue: {blue}", cert.arcs.len())
                }
                BranchingVerdict::Invalid { reason } => format!("certificate: invalid ({reason})"),
            };
            let code = if verdict.is_valid() { 0 } else { 1 };
            Report::new(
                text,
                json!({"outcome": "certificate", "certificate": certificate_to_json(inst, &cert), "check": verdict}),
                code,
            )
        }
        CertificateOutcome::Improvement(better) => Report::new(
            format!("improvement: the set is dominated by\n{}", show_set(inst, &better)),
            json!({"outcome": "improvement", "set": set_to_json(inst, &better)}),
            1,
        ),
    })
}

fn parse_pairs(items: &[String], what: &str) -> Result<Vec<Vec<usize>>> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .split('-')
                .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad {what} `{s}`"))))
                .collect()
        })
        .collect()
}

fn generate(family: Family) -> Result<Report> {
    let inst = match family {
        Family::LowerBoundMatching { k } => generators::gen_lower_bound_matching(k)?,
        Family::LowerBoundMatroid { k } => generators::gen_lower_bound_matroid(k)?,
        Family::NoPareto => generators::gen_no_pareto(),
        Family::VertexCover { nodes, edges, ell } => {
            let pairs = parse_pairs(&edges, "edge")?;
            let edges = pairs
                .iter()
                .map(|p| match p.as_slice() {
                    [u, v] => Ok((*u, *v)),
                    _ => Err(Error::Parse("edges are written u-v".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            generators::gen_vertex_cover_reduction(nodes, &edges, ell)?
        }
        Family::Ldm { parts, tuples, k } => {
            let parts: Vec<Vec<String>> = parts
                .split(';')
                .map(|p| p.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect())
                .collect();
            generators::gen_ldm_reduction(&parts, &parse_pairs(&tuples, "tuple")?, k)?
        }
        Family::Random { n, m, density, model, matroid, seed } => {
            generators::gen_random(n, m, density, model, matroid, seed)?
        }
        Family::RandomArborescence { nodes, density, model, seed } => {
            let text = arborescence_instance_to_json(&generators::gen_random_arborescence(nodes, density, model, seed)?);
            let doc: Value = serde_json::from_str(&text)?;
            return Ok(Report::new(text, doc, 0));
        }
        Family::AssignmentCounterexample { max_agents, budget_secs } => {
            let (inst, set, n) = generators::find_assignment_counterexample(max_agents, Duration::from_secs(budget_secs))?;
            let doc: Value = serde_json::from_str(&instance_to_json(&inst))?;
            let out = json!({"instance": doc, "set": set_to_json(&inst, &set), "competitor": set_to_json(&inst, &[n])[0]});
            let text = serde_json::to_string_pretty(&out)?;
            return Ok(Report::new(text, out, 0));
        }
    };
    let text = instance_to_json(&inst);
    let doc: Value = serde_json::from_str(&text)?;
    Ok(Report::new(text, doc, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["condorcet", "no-such-command"]), 2);
        assert_eq!(run(["condorcet", "solve", "/nonexistent/instance.json"]), 2);
    }

    #[test]
    fn pair_lists_parse() {
        assert_eq!(parse_pairs(&["0-1".into(), " 2-3 ".into()], "edge").unwrap(), vec![vec![0, 1], vec![2, 3]]);
        assert!(parse_pairs(&["0-x".into()], "edge").is_err());
    }
}

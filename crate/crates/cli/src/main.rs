//! `wtah`: command-line front end for weighted tree automata with
//! hom-constraints.
//!
//! Exit codes: 0 ok or positive verdict, 1 input or validation error,
//! 2 witness or negative verdict, 3 unknown.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use wtah::automaton::{check_unambiguous, domain_size_bound, runs_to_state, support_up_to, Evaluator, RunEnumerator};
use wtah::construct::{eliminate_zero_divisors, hom_image, linearize, project_boolean};
use wtah::report::{emit_eq_restriction, emit_report, emit_verdict, Format};
use wtah::term::{count_trees, parse_term, LeafScope};
use wtah::{
    bounded_equivalence, check_h_unambiguous, check_tetris_free, decide_hom_regularity, emit_automaton,
    parse_automaton, parse_hom, Automaton, DecisionOptions, RegularityVerdict, Tree,
    TreeHomomorphism, Verdict,
};

/// Trees enumerated beyond this count trigger a warning.
const ENUMERATION_WARNING: u128 = 1_000_000;

#[derive(Parser)]
#[command(name = "wtah", version, about = "Weighted tree automata with hom-constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate automaton and/or homomorphism files.
    Validate {
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long)]
        hom: Option<PathBuf>,
    },
    /// Print the weight of a tree.
    Eval {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        tree: String,
    },
    /// List the support with weights up to a height.
    Support {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: usize,
    },
    /// List the accepting runs on a tree, or the runs to one state.
    Runs {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Build the eq-restricted automaton for the homomorphic image.
    Image {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Remove zero-weight runs (needed over semirings with zero divisors).
    FixZeroDivisors {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Project an eq-restricted automaton to the boolean semiring.
    ProjectBool {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replace constraint classes by concrete trees up to a height.
    Linearize {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        height: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one of the structural checks.
    Check {
        #[command(subcommand)]
        check: Check,
    },
    /// Compare two series on all trees up to a height.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Run the regularity pipeline for the image of a WTA under a homomorphism.
    Decide {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, default_value_t = 4)]
        check_bound: usize,
        #[arg(long, default_value_t = 2)]
        lin_height: usize,
        #[arg(long, default_value_t = 5)]
        eq_bound: usize,
        /// External decision command; receives the boolean projection file
        /// as last argument and prints `regular` or `nonregular`.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum Check {
    EqRestricted {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    Unambiguous {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    TetrisFree {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    HUnambiguous {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, default_value_t = 4)]
        height: usize,
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Positive,
    Negative,
    Unknown,
}

impl Outcome {
    fn of(v: &Verdict) -> Outcome {
        if v.is_ok() {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }

    fn code(self) -> u8 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 2,
            Outcome::Unknown => 3,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_automaton(path: &Path) -> Result<Automaton> {
    parse_automaton(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_hom(path: &Path) -> Result<TreeHomomorphism> {
    parse_hom(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_tree(a: &Automaton, text: &str) -> Result<Tree> {
    parse_term(a.alphabet(), LeafScope::GROUND, text).with_context(|| format!("tree `{text}`"))
}

fn write_output(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_enumeration(what: &str, trees: u128, height: usize) {
    if trees > ENUMERATION_WARNING {
        eprintln!("warning: {what} may enumerate up to {trees} trees of height <= {height}");
    }
}

/// Warns about the trees a bounded analysis of `a` visits.
fn warn_domain(a: &Automaton, height: usize) {
    warn_enumeration("this check", domain_size_bound(a, height), height);
}

fn print_verdict(v: &Verdict, format: Format) -> Outcome {
    print!("{}", emit_verdict(v, format));
    Outcome::of(v)
}

fn describe(a: &Automaton) -> String {
    let eq = if a.is_eq_restricted().holds() { "eq-restricted" } else { "not eq-restricted" };
    format!(
        "{} over {}, alphabet {{{}}}, {} states, {} finals, {} rules, {eq}",
        a.kind(),
        a.semiring(),
        a.alphabet(),
        a.states().len(),
        a.finals().len(),
        a.rules().len()
    )
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Validate { automaton, hom } => {
            if automaton.is_none() && hom.is_none() {
                bail!("nothing to validate: pass --automaton and/or --hom");
            }
            let a = automaton.as_deref().map(load_automaton).transpose()?;
            let h = hom.as_deref().map(load_hom).transpose()?;
            if let Some(a) = &a {
                println!("automaton: {}", describe(a));
            }
            if let Some(h) = &h {
                println!("homomorphism: {{{}}} -> {{{}}}, nondeleting, nonerasing", h.source(), h.target());
            }
            if let (Some(a), Some(h)) = (&a, &h) {
                if a.alphabet() != h.source() {
                    bail!("automaton alphabet {{{}}} differs from homomorphism source {{{}}}", a.alphabet(), h.source());
                }
            }
        }
        Command::Eval { automaton, tree } => {
            let a = load_automaton(&automaton)?;
            let t = load_tree(&a, &tree)?;
            println!("{}", Evaluator::new(&a).evaluate(&t));
        }
        Command::Support { automaton, height } => {
            let a = load_automaton(&automaton)?;
            warn_domain(&a, height);
            for (t, w) in support_up_to(&a, height) {
                println!("{t}\t{w}");
            }
        }
        Command::Runs { automaton, tree, state } => {
            let a = load_automaton(&automaton)?;
            let t = load_tree(&a, &tree)?;
            let runs = match &state {
                Some(q) => runs_to_state(&a, &t, q)?,
                None => RunEnumerator::new(&a).accepting(&t),
            };
            let mut used = BTreeSet::new();
            for r in &runs {
                println!("{r} -> {} @ {}", r.target(), r.weight());
                collect_rules(r, &mut used);
            }
            if !used.is_empty() {
                println!("where");
                for i in used {
                    println!("  r{i}: {}", a.rule(i));
                }
            }
        }
        Command::Image { automaton, hom, output } => {
            let a = load_automaton(&automaton)?;
            let h = load_hom(&hom)?;
            write_output(output.as_deref(), &emit_automaton(&hom_image(&a, &h)?))?;
        }
        Command::FixZeroDivisors { automaton, output } => {
            let a = load_automaton(&automaton)?;
            write_output(output.as_deref(), &emit_automaton(&eliminate_zero_divisors(&a)?))?;
        }
        Command::ProjectBool { automaton, output } => {
            let a = load_automaton(&automaton)?;
            write_output(output.as_deref(), &emit_automaton(&project_boolean(&a)?))?;
        }
        Command::Linearize { automaton, height, output } => {
            let a = load_automaton(&automaton)?;
            write_output(output.as_deref(), &emit_automaton(&linearize(&a, height)?))?;
        }
        Command::Check { check } => return run_check(check),
        Command::Equiv { a, b, height, format } => {
            let (a, b) = (load_automaton(&a)?, load_automaton(&b)?);
            let trees = domain_size_bound(&a, height).saturating_add(domain_size_bound(&b, height));
            warn_enumeration("this comparison", trees, height);
            return Ok(print_verdict(&bounded_equivalence(&a, &b, height)?, format));
        }
        Command::Decide { automaton, hom, check_bound, lin_height, eq_bound, oracle, format } => {
            let a = load_automaton(&automaton)?;
            let h = load_hom(&hom)?;
            warn_enumeration("the tetris-free check", count_trees(h.source(), check_bound), check_bound);
            warn_enumeration("the h-unambiguity check", domain_size_bound(&a, check_bound), check_bound);
            if let Ok(image) = hom_image(&a, &h) {
                warn_enumeration("the equivalence check", domain_size_bound(&image, eq_bound), eq_bound);
            }
            let opts = DecisionOptions { check_bound, lin_height, eq_bound, oracle };
            let report = decide_hom_regularity(&a, &h, &opts)?;
            print!("{}", emit_report(&report, format));
            return Ok(match report.verdict {
                RegularityVerdict::EvidenceRegular { .. } | RegularityVerdict::OracleRegular => Outcome::Positive,
                RegularityVerdict::LinearizationMismatch { .. }
                | RegularityVerdict::OracleNonregular
                | RegularityVerdict::PreconditionViolated { .. } => Outcome::Negative,
                RegularityVerdict::Unknown { .. } => Outcome::Unknown,
            });
        }
    }
    Ok(Outcome::Positive)
}

fn collect_rules(r: &wtah::Run, used: &mut BTreeSet<usize>) {
    used.insert(r.rule());
    for c in r.children().iter() {
        collect_rules(c, used);
    }
}

fn run_check(check: Check) -> Result<Outcome> {
    Ok(match check {
        Check::EqRestricted { automaton, format } => {
            let e = load_automaton(&automaton)?.is_eq_restricted();
            print!("{}", emit_eq_restriction(&e, format));
            if e.holds() {
                Outcome::Positive
            } else {
                Outcome::Negative
            }
        }
        Check::Unambiguous { automaton, height, format } => {
            let a = load_automaton(&automaton)?;
            warn_domain(&a, height);
            print_verdict(&check_unambiguous(&a, height), format)
        }
        Check::TetrisFree { hom, height, format } => {
            let h = load_hom(&hom)?;
            warn_enumeration("this check", count_trees(h.source(), height), height);
            print_verdict(&check_tetris_free(&h, height), format)
        }
        Check::HUnambiguous { automaton, hom, height, format } => {
            let a = load_automaton(&automaton)?;
            let h = load_hom(&hom)?;
            warn_domain(&a, height);
            print_verdict(&check_h_unambiguous(&a, &h, height)?, format)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}


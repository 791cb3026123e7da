//! Command-line front end for the solver: load a game file, run the
//! requested stage of the pipeline, and report as text or JSON.
//!
//! Exit codes: 0 on success (and certification passing), 1 when a
//! certification or cross-check fails, 2 on input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use borelgame::alpha::{self, AlphaLabels};
use borelgame::dot::export_dot;
use borelgame::folk;
use borelgame::game::{GameGraph, Lasso, PlayerId};
use borelgame::spe::{self, PlanMode, ProfileDoc, StrategyProfile};
use borelgame::verify::{self, VerificationReport};
use borelgame::zerosum;
use borelgame::{parse_rational, Error, Q};

#[derive(Parser)]
#[command(
    name = "borelgame",
    version,
    about = "Solve and certify two-player games on finite graphs"
)]
struct Cli {
    /// Seed for randomized work; the BORELGAME_SEED environment variable
    /// overrides it. All bundled commands are deterministic and ignore it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum PlanArg {
    /// The root plan is the root vertex's own threat play.
    #[default]
    RootThreat,
    /// The root plan maximizes the payoff sum among viable plays.
    MaxWelfare,
}

impl From<PlanArg> for PlanMode {
    fn from(arg: PlanArg) -> PlanMode {
        match arg {
            PlanArg::RootThreat => PlanMode::RootThreat,
            PlanArg::MaxWelfare => PlanMode::MaxWelfare,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DemoName {
    /// The two-vertex loop game walked through the full pipeline.
    G1,
    /// The tail-table game on which the play/equilibrium correspondence fails.
    Counterexample,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: values, viability iteration, profile, certification.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        plan: PlanArg,
    },
    /// Print the zero-sum value labels (and optimal choices) per player.
    Value {
        file: PathBuf,
        /// Restrict the report to player 1 or 2.
        #[arg(long)]
        player: Option<u8>,
    },
    /// Build the equilibrium profile and print it; --json emits the
    /// document `verify --profile` reads back.
    Spe {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        plan: PlanArg,
        #[arg(long)]
        json: bool,
    },
    /// Certify that no unilateral deviation gains more than epsilon in any
    /// subgame. Exit 0 when the check passes, 1 when it fails.
    Verify {
        file: PathBuf,
        /// Profile document to check instead of the freshly built one.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Tolerance; a rational like `1/2` or `0`.
        #[arg(long, default_value = "0")]
        epsilon: String,
        /// Also certify every plan memory reachable in live play.
        #[arg(long)]
        strict_memory: bool,
        #[arg(long, value_enum, default_value_t)]
        plan: PlanArg,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the viable plays from the root; --oracle cross-checks them
    /// against exhaustive backward induction (acyclic games only).
    Folk {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_prefix: usize,
        #[arg(long, default_value_t = 8)]
        max_cycle: usize,
        #[arg(long)]
        oracle: bool,
    },
    /// Walk through a bundled scenario.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
    /// Render the game as DOT, annotated with labels and threat plays when
    /// the solver applies.
    Export {
        file: PathBuf,
        /// Skip annotations even when the solver applies.
        #[arg(long)]
        plain: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`borelgame ... | head`),
    // like any other line-oriented tool, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> borelgame::Result<ExitCode> {
    resolve_seed(cli.seed)?;
    match cli.command {
        Command::Solve { file, plan } => {
            let g = load_game(&file)?;
            solve(&g, plan.into())
        }
        Command::Value { file, player } => {
            let g = load_game(&file)?;
            let players = match player {
                None => vec![PlayerId::P1, PlayerId::P2],
                Some(n) => vec![PlayerId::from_number(n)?],
            };
            for p in players {
                print_values(&g, p)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Spe { file, plan, json } => {
            let g = load_game(&file)?;
            let profile = spe::build_profile(&g, plan.into())?;
            if json {
                let doc = profile.to_doc(&g);
                println!("{}", serde_json::to_string_pretty(&doc).expect("document serializes"));
            } else {
                print_profile(&g, &profile)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file, profile, epsilon, strict_memory, plan, json } => {
            let g = load_game(&file)?;
            let eps = parse_rational(&epsilon)?;
            let prof = match profile {
                Some(path) => load_profile(&g, &path)?,
                None => spe::build_profile(&g, plan.into())?,
            };
            let report = if strict_memory {
                verify::check_spe_strict(&g, &prof, eps)?
            } else {
                verify::check_spe(&g, &prof, eps)?
            };
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report_json(&g, &report))
                        .expect("report serializes")
                );
            } else {
                print_report(&g, &report);
            }
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Folk { file, max_prefix, max_cycle, oracle } => {
            let g = load_game(&file)?;
            let labels = alpha::alpha_fixed_point(&g)?.labels;
            let set = folk::enumerate_viable(&g, &labels, g.root(), max_prefix, max_cycle)?;
            println!(
                "viable plays from {} (prefix <= {max_prefix}, cycle <= {max_cycle}):",
                g.id(g.root())
            );
            for (lasso, payoff) in &set.plays {
                println!("  {}  {}", lasso.display(&g), payoff);
            }
            if !oracle {
                return Ok(ExitCode::SUCCESS);
            }
            let report = folk::folk_crosscheck(&g)?;
            if report.agree {
                println!("cross-check: the equilibrium play set matches exactly");
                Ok(ExitCode::SUCCESS)
            } else {
                for l in &report.oracle_only {
                    println!("equilibrium-only: {}", l.display(&g));
                }
                for l in &report.viable_only {
                    println!("viable-only: {}", l.display(&g));
                }
                println!("cross-check: MISMATCH");
                Ok(ExitCode::from(1))
            }
        }
        Command::Demo { name } => match name {
            DemoName::G1 => {
                println!("bundled scenario: g1\n");
                let g = borelgame::scenarios::g1();
                solve(&g, PlanMode::RootThreat)
            }
            DemoName::Counterexample => demo_counterexample(),
        },
        Command::Export { file, plain } => {
            let g = load_game(&file)?;
            let rendered = if plain || !g.lsc_certified() {
                export_dot(&g, None, None)
            } else {
                let labels = alpha::alpha_fixed_point(&g)?.labels;
                let threats = spe::threat_table(&g, &labels)?;
                export_dot(&g, Some(&labels), Some(&threats))
            };
            print!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// `BORELGAME_SEED` beats `--seed`; a malformed value is an input error even
/// for commands that never draw randomness.
fn resolve_seed(flag: Option<u64>) -> borelgame::Result<Option<u64>> {
    match std::env::var("BORELGAME_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("BORELGAME_SEED is not a valid seed: `{text}`"))),
        Err(_) => Ok(flag),
    }
}

fn load_game(path: &Path) -> borelgame::Result<GameGraph> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    GameGraph::load(&text)
}

fn load_profile(g: &GameGraph, path: &Path) -> borelgame::Result<StrategyProfile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: ProfileDoc = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidProfile(format!("{}: {e}", path.display())))?;
    StrategyProfile::from_doc(g, &doc)
}

fn game_summary(g: &GameGraph) -> String {
    format!(
        "{} vertices ({} decision), root {}, lower-semi-continuous: {}",
        g.vertex_count(),
        g.decision_vertices().len(),
        g.id(g.root()),
        if g.lsc_certified() { "yes" } else { "NO" },
    )
}

fn solve(g: &GameGraph, mode: PlanMode) -> borelgame::Result<ExitCode> {
    println!("game: {}", game_summary(g));
    println!();
    for p in [PlayerId::P1, PlayerId::P2] {
        print_values(g, p)?;
    }

    let trace = alpha::alpha_iterations(g)?;
    println!("viability iteration");
    for (i, labels) in trace.iter().enumerate() {
        println!("  round {}: {}", i + 1, labels_line(g, labels));
    }
    println!("  fixed point reached: k* = {}", trace.len());
    let labels = trace.last().expect("trace is never empty");
    println!("  alpha*: {}", labels_line(g, labels));
    println!();

    let profile = spe::build_profile_with(g, labels, mode)?;
    print_profile(g, &profile)?;

    let report = verify::check_spe(g, &profile, Q::from_integer(0))?;
    print_report(g, &report);
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn labels_line(g: &GameGraph, labels: &AlphaLabels) -> String {
    labels
        .entries()
        .map(|(v, q)| format!("{}={}", g.id(v), q))
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_values(g: &GameGraph, player: PlayerId) -> borelgame::Result<()> {
    let sol = zerosum::solve(g, player)?;
    println!(
        "zero-sum values for {player} (stabilized in {} round{})",
        sol.rounds,
        if sol.rounds == 1 { "" } else { "s" }
    );
    for v in g.decision_vertices() {
        let choice = sol
            .max_strategy
            .action(v)
            .or_else(|| sol.min_strategy.action(v))
            .expect("every decision vertex has a chosen action");
        println!(
            "  {}: value {}, optimal action `{}`",
            g.id(v),
            sol.labels.get(v),
            g.actions(v)[choice].label
        );
    }
    println!();
    Ok(())
}

fn print_profile(g: &GameGraph, profile: &StrategyProfile) -> borelgame::Result<()> {
    println!("profile (plan mode: {})", profile.mode().as_str());
    println!("  root plan: {}", profile.root_plan().display(g));
    println!("  threat table:");
    for ((w, punished), play) in profile.threats().entries() {
        println!(
            "    {} vs {}: {}  payoff {}",
            g.id(w),
            punished,
            play.display(g),
            g.evaluate_payoff(play)?
        );
    }
    let induced = profile.induced_play(g, g.root())?;
    println!(
        "  on-path play from {}: {}  payoff {}",
        g.id(g.root()),
        induced.display(g),
        g.evaluate_payoff(&induced)?
    );
    println!();
    Ok(())
}

fn print_report(g: &GameGraph, report: &VerificationReport) {
    println!(
        "certification (epsilon = {}{})",
        report.epsilon,
        if report.strict { ", strict memory" } else { "" }
    );
    let mut rows: Vec<[String; 6]> = vec![[
        "vertex".into(),
        "memory".into(),
        "player".into(),
        "follow".into(),
        "best-dev".into(),
        "slack".into(),
    ]];
    for r in &report.rows {
        rows.push([
            g.id(r.vertex).to_string(),
            r.memory.describe(g),
            r.player.to_string(),
            r.on_path.to_string(),
            r.best_deviation.to_string(),
            r.slack.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..6)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let line: Vec<String> =
            row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        println!("  {}", line.join("  ").trim_end());
    }
    println!("verdict: {}", if report.pass { "pass" } else { "FAIL" });
    if !report.pass {
        for r in report.failures() {
            println!(
                "  {} gains {} by deviating at {} ({})",
                r.player,
                r.best_deviation - r.on_path,
                g.id(r.vertex),
                r.memory.describe(g),
            );
        }
    }
}

fn report_json(g: &GameGraph, report: &VerificationReport) -> serde_json::Value {
    serde_json::json!({
        "epsilon": report.epsilon.to_string(),
        "strict": report.strict,
        "pass": report.pass,
        "rows": report.rows.iter().map(|r| serde_json::json!({
            "vertex": g.id(r.vertex),
            "memory": r.memory.describe(g),
            "player": r.player.to_string(),
            "on_path": r.on_path.to_string(),
            "best_deviation": r.best_deviation.to_string(),
            "slack": r.slack.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn demo_counterexample() -> borelgame::Result<ExitCode> {
    let g = borelgame::scenarios::counterexample();
    println!("bundled scenario: counterexample\n");
    println!("game: {}", game_summary(&g));
    println!();
    println!("payoff rule: tail table keyed by who plays the marker action `b` forever");
    let rows: [(&str, &str); 4] = [
        ("neither player", "[v1 -a-> v2 -a-> v1]"),
        ("only P1", "[v1 -b-> v2 -a-> v1]"),
        ("only P2", "[v1 -a-> v2 -b-> v1]"),
        ("both players", "[v1 -b-> v2 -b-> v1]"),
    ];
    for (who, play) in rows {
        let lasso = Lasso::parse(&g, play)?;
        println!("  {:<15} -> {}   e.g. {}", who, g.evaluate_payoff(&lasso)?, play);
    }
    println!();
    println!("warning: this game is not lower-semi-continuous; the fixed-point");
    println!("solver and certifier refuse it, and none of their guarantees apply.");
    println!();
    println!("known result: the game's unique subgame-perfect equilibrium payoff is (2, 2).");
    println!();
    println!("with every label pinned at 1, the play enumeration would admit:");
    let pinned = AlphaLabels::constant(&g, Q::from_integer(1));
    let set = folk::enumerate_viable(&g, &pinned, g.vertex("v1").expect("v1 exists"), 0, 2)?;
    for (lasso, payoff) in &set.plays {
        println!("  {}  {}", lasso.display(&g), payoff);
    }
    println!();
    println!("only the first of these is an equilibrium payoff: the correspondence");
    println!("between viable plays and equilibrium plays that holds for certified");
    println!("games breaks down under this payoff rule, so the enumeration above is");
    println!("illustrative only and no soundness is claimed for it.");
    Ok(ExitCode::SUCCESS)
}

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qgph::conformance::{self, Level};
use qgph::game::{
    boxhom_endpoints, exact_win_probability, search_strategy, simulate, strategy_to_boxhom, verify_strategy,
    ClassicalStrategy, Game, SearchConfig, Strategy,
};
use qgph::json::{
    AlgebraJson, CPMapJson, GameJson, GraphJson, MapJson, QuantumSetJson, RelationJson, RelationWJson,
    StrategyJson,
};
use qgph::qgraph::{classical_hom_graph, classical_part, hom_adjacent, is_homomorphism, is_isomorphism};
use qgph::weaver::{
    algebra_of, channel_from_operator_system, confusability, function_to_intertwiner, graph_to_weaver,
    is_tp_cohomomorphism, pullback, pushforward, t_phi, theorem_o_check, CPMap, QuantumRelationW,
};
use qgph::{Graph, QuantumGraph, Relation};

use report::{interpret, load, write_payload, Report, Status};

#[derive(Parser)]
#[command(name = "qgph", version, about = "Quantum sets, relations, graphs, homomorphism games and channels")]
struct Cli {
    /// Relative tolerance for rank and containment decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized verbs.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the payload to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Box product of two graphs.
    Box(Pair),
    /// Disjoint union of two graphs.
    Coproduct(Pair),
    /// Classical part: the subgraph on one-dimensional atoms.
    Cl(One),
    /// Graph of homomorphisms from the one-vertex graph, with their adjacency.
    HomGraph(One),
    /// Is the map a homomorphism?
    CheckHom(MapArgs),
    /// Is the map an isomorphism?
    CheckIso(MapArgs),
    /// Are two homomorphisms adjacent?
    HomAdjacent(AdjacentArgs),
    #[command(subcommand)]
    Game(GameCommand),
    #[command(subcommand)]
    Channel(ChannelCommand),
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
}

#[derive(Args)]
struct One {
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    map: PathBuf,
}

#[derive(Args)]
struct AdjacentArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    other: PathBuf,
}

#[derive(Subcommand)]
enum GameCommand {
    /// Check a strategy against the perfect-strategy conditions.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Numerical search for a perfect strategy of size n.
    Search {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 3000)]
        max_iters: usize,
    },
    /// Play seeded rounds with a quantum strategy or a classical assignment.
    Simulate {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, conflicts_with = "assignment", required_unless_present = "assignment")]
        strategy: Option<PathBuf>,
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
    },
    /// Exhaustive search for a classical homomorphism.
    ClassicalSearch {
        #[arg(long)]
        game: PathBuf,
    },
}

#[derive(Subcommand)]
enum ChannelCommand {
    /// Quantum relation generated by the Kraus operators.
    TPhi {
        #[arg(long)]
        map: PathBuf,
    },
    /// Confusability relation of the channel.
    Confusability {
        #[arg(long)]
        map: PathBuf,
    },
    /// Pushforward of a relation on the source algebra.
    Push {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Pullback of a relation on the target algebra.
    Pull {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Channel whose confusability relation is a given operator system.
    FromRelation {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Is the map a trace-preserving cohomomorphism?
    CheckCohom {
        #[arg(long)]
        map: PathBuf,
    },
    /// Compare intertwining with the pushforward and pullback conditions.
    TheoremO {
        #[arg(long)]
        source_algebra: PathBuf,
        #[arg(long)]
        target_algebra: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        source_relation: PathBuf,
        #[arg(long)]
        target_relation: PathBuf,
    },
}

#[derive(Subcommand)]
enum ConvertCommand {
    /// Matrix algebra and bimodule of a quantum graph.
    GraphToWeaver {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Relation Q_n □ G → H of a strategy.
    StrategyToBoxhom {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(mut report) => {
            report.elapsed = start.elapsed().as_secs_f64();
            if let (Some(path), Some(payload)) = (&cli.out, &report.payload) {
                if let Err(e) = write_payload(path, payload) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if cli.json {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                print!("{}", report.human(cli.out.is_none()));
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn graph(path: &Path, tol: f64) -> Result<QuantumGraph> {
    let g: GraphJson = load(path)?;
    interpret(path, g.to_quantum(tol))
}

/// The classical graph, when the file holds one (in either form).
fn classical(path: &Path, tol: f64) -> Result<Option<Graph>> {
    let g: GraphJson = load(path)?;
    match &g {
        GraphJson::Classical { .. } => Ok(Some(interpret(path, g.to_classical(tol))?)),
        GraphJson::Quantum { .. } => Ok(None),
    }
}

fn game(path: &Path, tol: f64) -> Result<Game> {
    let g: GameJson = load(path)?;
    interpret(path, g.to_game(tol))
}

fn relation_on(path: &Path, g: &QuantumGraph, h: &QuantumGraph, tol: f64) -> Result<Relation> {
    let m: MapJson = load(path)?;
    let r = interpret(path, m.to_relation(g.vertices(), h.vertices(), tol))?;
    if r.src() != g.vertices() || r.dst() != h.vertices() {
        return Err(report::input_error(format!(
            "{}: relation endpoints differ from the given graphs",
            path.display()
        )));
    }
    Ok(r)
}

fn cp_map(path: &Path, tol: f64) -> Result<CPMap> {
    let m: CPMapJson = load(path)?;
    interpret(path, m.to_map(tol))
}

fn relation_w(
    path: &Path,
    src: std::sync::Arc<qgph::weaver::MatrixAlgebra>,
    dst: std::sync::Arc<qgph::weaver::MatrixAlgebra>,
    tol: f64,
) -> Result<QuantumRelationW> {
    let r: RelationWJson = load(path)?;
    interpret(path, r.to_relation(src, dst, tol))
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    match &cli.command {
        Command::Box(p) | Command::Coproduct(p) => {
            let is_box = matches!(cli.command, Command::Box(_));
            if let (Some(a), Some(b)) = (classical(&p.left, tol)?, classical(&p.right, tol)?) {
                let g = if is_box { a.box_product(&b) } else { a.coproduct(&b) };
                return Report::new(Status::Pass)
                    .residual("vertices", g.len() as f64)
                    .payload(&GraphJson::from_graph(&g));
            }
            let (a, b) = (graph(&p.left, tol)?, graph(&p.right, tol)?);
            let g = if is_box { a.box_product(&b) } else { a.coproduct(&b) };
            Report::new(Status::Pass)
                .residual("vertices", g.vertices().len() as f64)
                .payload(&GraphJson::from_quantum(&g))
        }
        Command::Cl(o) => {
            let g = graph(&o.graph, tol)?;
            let (cl, _) = classical_part(&g);
            let out = GraphJson::from_quantum(&cl);
            let c = out.to_classical(tol)?;
            Report::new(Status::Pass)
                .residual("vertices", c.len() as f64)
                .payload(&GraphJson::from_graph(&c))
        }
        Command::HomGraph(o) => {
            let g = graph(&o.graph, tol)?;
            let h = classical_hom_graph(&g);
            Report::new(Status::Pass)
                .residual("vertices", h.len() as f64)
                .payload(&GraphJson::from_graph(&h))
        }
        Command::CheckHom(a) | Command::CheckIso(a) => {
            let (g, h) = (graph(&a.source, tol)?, graph(&a.target, tol)?);
            let phi = relation_on(&a.map, &g, &h, tol)?;
            let function = phi.is_function()?;
            let ok = if matches!(cli.command, Command::CheckHom(_)) {
                is_homomorphism(&phi, &g, &h)?
            } else {
                is_isomorphism(&phi, &g, &h)?
            };
            let mut r = Report::new(Status::from_bool(ok));
            if !function {
                r = r.message("map is not a function");
            }
            Ok(r)
        }
        Command::HomAdjacent(a) => {
            let (g, h) = (graph(&a.source, tol)?, graph(&a.target, tol)?);
            let p1 = relation_on(&a.map, &g, &h, tol)?;
            let p2 = relation_on(&a.other, &g, &h, tol)?;
            for (p, path) in [(&p1, &a.map), (&p2, &a.other)] {
                if !is_homomorphism(p, &g, &h)? {
                    return Err(report::input_error(format!("{}: not a homomorphism", path.display())));
                }
            }
            Ok(Report::new(Status::from_bool(hom_adjacent(&p1, &p2, &g, &h)?)))
        }
        Command::Game(c) => game_command(c, cli),
        Command::Channel(c) => channel_command(c, tol),
        Command::Convert(c) => convert_command(c, tol),
        Command::Selftest { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let reports = conformance::run_all(level);
            let mut out = Report::new(Status::from_bool(reports.iter().all(|r| r.passed)));
            for r in &reports {
                out = out.message(r.line());
            }
            let rows: Vec<_> = reports
                .iter()
                .map(|r| json!({"criterion": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
                .collect();
            out.payload(&rows)
        }
    }
}

fn game_command(c: &GameCommand, cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    match c {
        GameCommand::Verify { game: gp, strategy } => {
            let game = game(gp, tol)?;
            let sj: StrategyJson = load(strategy)?;
            let s = interpret(strategy, sj.to_strategy(&game))?;
            let v = verify_strategy(&s, &game, tol)?;
            let mut r = Report::new(Status::from_bool(v.passed))
                .residual("projection_defect", v.projection_defect)
                .residual("completeness_defect", v.completeness_defect)
                .residual("orthogonality_defect", v.orthogonality_defect)
                .residual("win_probability", exact_win_probability(&s, &game)?);
            if let (false, Some((g1, h1, h2, g2))) = (v.passed, v.worst_tuple) {
                let (gg, hh) = (game.g(), game.h());
                r = r.message(format!(
                    "violating tuple: g1={} h1={} h2={} g2={}",
                    gg.label(g1),
                    hh.label(h1),
                    hh.label(h2),
                    gg.label(g2)
                ));
            }
            Ok(r)
        }
        GameCommand::Search {
            game: gp,
            n,
            restarts,
            max_iters,
        } => {
            let game = game(gp, tol)?;
            let config = SearchConfig {
                restarts: *restarts,
                max_iters: *max_iters,
                seed: cli.seed,
                tol,
                ..SearchConfig::default()
            };
            let out = search_strategy(&game, *n, &config)?;
            let r = Report::new(if out.strategy.is_some() { Status::Found } else { Status::None })
                .residual("best_penalty", out.best_penalty)
                .residual("restarts_tried", out.restarts_tried as f64);
            match &out.strategy {
                Some(s) => r.payload(&StrategyJson::from_strategy(s, &game)),
                None if out.exhaustive => Ok(r.message("none exists (exhaustive)")),
                None => Ok(r.message("none found")),
            }
        }
        GameCommand::Simulate {
            game: gp,
            strategy,
            assignment,
            rounds,
        } => {
            let game = game(gp, tol)?;
            let s = match (strategy, assignment) {
                (Some(path), _) => {
                    let sj: StrategyJson = load(path)?;
                    Strategy::Quantum(interpret(path, sj.to_strategy(&game))?)
                }
                (None, Some(path)) => {
                    let m: MapJson = load(path)?;
                    let f = assignment_indices(path, &m, &game)?;
                    Strategy::Classical(ClassicalStrategy::deterministic(f))
                }
                (None, None) => unreachable!("clap requires one of the inputs"),
            };
            let (wins, total) = simulate(&s, &game, *rounds, cli.seed)?;
            let exact = match &s {
                Strategy::Quantum(q) => exact_win_probability(q, &game)?,
                Strategy::Classical(c) => c.exact_win_probability(&game)?,
            };
            Ok(Report::new(Status::from_bool(wins == total))
                .residual("wins", wins as f64)
                .residual("rounds", total as f64)
                .residual("exact_win_probability", exact))
        }
        GameCommand::ClassicalSearch { game: gp } => {
            let game = game(gp, tol)?;
            match game.classical_hom_search() {
                Some(f) => {
                    let map: std::collections::BTreeMap<&str, &str> =
                        f.iter().enumerate().map(|(g, &h)| (game.g().label(g), game.h().label(h))).collect();
                    Report::new(Status::Found).payload(&map)
                }
                None => Ok(Report::new(Status::None).message("no homomorphism exists")),
            }
        }
    }
}

fn assignment_indices(path: &Path, m: &MapJson, game: &Game) -> Result<Vec<usize>> {
    let MapJson::Assignment(a) = m else {
        return Err(report::input_error(format!("{}: expected a label assignment", path.display())));
    };
    (0..game.g().len())
        .map(|g| {
            let label = game.g().label(g);
            let target = a
                .get(label)
                .ok_or_else(|| report::input_error(format!("{}: no image for `{label}`", path.display())))?;
            game.h()
                .index_of(target)
                .ok_or_else(|| report::input_error(format!("{}: unknown vertex `{target}`", path.display())))
        })
        .collect()
}

fn channel_command(c: &ChannelCommand, tol: f64) -> Result<Report> {
    match c {
        ChannelCommand::TPhi { map } | ChannelCommand::Confusability { map } => {
            let phi = cp_map(map, tol)?;
            let r = if matches!(c, ChannelCommand::TPhi { .. }) { t_phi(&phi)? } else { confusability(&phi)? };
            Report::new(Status::Pass)
                .residual("dim", r.space().dim() as f64)
                .payload(&RelationWJson::from_relation(&r))
        }
        ChannelCommand::Push { map, relation } => {
            let phi = cp_map(map, tol)?;
            let r = relation_w(relation, phi.src().clone(), phi.src().clone(), tol)?;
            let out = pushforward(&phi, &r)?;
            Report::new(Status::Pass)
                .residual("dim", out.space().dim() as f64)
                .payload(&RelationWJson::from_relation(&out))
        }
        ChannelCommand::Pull { map, relation } => {
            let phi = cp_map(map, tol)?;
            let s = relation_w(relation, phi.dst().clone(), phi.dst().clone(), tol)?;
            let out = pullback(&phi, &s)?;
            Report::new(Status::Pass)
                .residual("dim", out.space().dim() as f64)
                .payload(&RelationWJson::from_relation(&out))
        }
        ChannelCommand::FromRelation { algebra, relation } => {
            let aj: AlgebraJson = load(algebra)?;
            let m = interpret(algebra, aj.to_algebra(tol))?;
            let r = relation_w(relation, m.clone(), m, tol)?;
            let phi = interpret(relation, channel_from_operator_system(&r))?;
            let reproduced = confusability(&phi)?.equal(&r)?;
            Report::new(Status::from_bool(reproduced && phi.trace_defect() <= 1e-8))
                .residual("trace_defect", phi.trace_defect())
                .residual("kraus", phi.kraus().len() as f64)
                .payload(&CPMapJson::from_map(&phi))
        }
        ChannelCommand::CheckCohom { map } => {
            let phi = cp_map(map, tol)?;
            let r = is_tp_cohomomorphism(&phi)?;
            Ok(Report::new(Status::from_bool(r.passed))
                .residual("multiplicativity", r.multiplicativity)
                .residual("adjoint", r.adjoint)
                .residual("unit", r.unit)
                .residual("range", r.range)
                .residual("trace", r.trace))
        }
        ChannelCommand::TheoremO {
            source_algebra,
            target_algebra,
            function,
            source_relation,
            target_relation,
        } => {
            let mj: AlgebraJson = load(source_algebra)?;
            let nj: AlgebraJson = load(target_algebra)?;
            let m = interpret(source_algebra, mj.to_algebra(tol))?;
            let n = interpret(target_algebra, nj.to_algebra(tol))?;
            let f = relation_w(function, m.clone(), n.clone(), tol)?;
            let r = relation_w(source_relation, m.clone(), m, tol)?;
            let s = relation_w(target_relation, n.clone(), n, tol)?;
            let rep = theorem_o_check(&f, &r, &s)?;
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            let mut out = Report::new(Status::from_bool(rep.agree() && rep.intertwines))
                .residual("intertwines", flag(rep.intertwines))
                .residual("pushforward", flag(rep.pushforward))
                .residual("pullback", flag(rep.pullback))
                .residual("reconstructs", flag(rep.reconstructs));
            if !rep.agree() {
                out = out.message("the three conditions disagree");
            }
            Ok(out)
        }
    }
}

fn convert_command(c: &ConvertCommand, tol: f64) -> Result<Report> {
    match c {
        ConvertCommand::GraphToWeaver { graph: path } => {
            let g = graph(path, tol)?;
            let alg = algebra_of(g.vertices())?;
            let r = graph_to_weaver(&g)?;
            Report::new(Status::Pass).residual("dim", r.space().dim() as f64).payload(&json!({
                "algebra": AlgebraJson::from_algebra(&alg),
                "relation": RelationWJson::from_relation(&r),
            }))
        }
        ConvertCommand::StrategyToBoxhom { game: gp, strategy } => {
            let game = game(gp, tol)?;
            let sj: StrategyJson = load(strategy)?;
            let s = interpret(strategy, sj.to_strategy(&game))?;
            let phi = strategy_to_boxhom(&s, &game)?;
            let (src, dst) = boxhom_endpoints(&game, s.n())?;
            let hom = is_homomorphism(&phi, &src, &dst)?;
            let intertwiner = function_to_intertwiner(&phi);
            Report::new(Status::from_bool(hom))
                .residual("intertwiner_dim", intertwiner.map(|f| f.space().dim() as f64).unwrap_or(0.0))
                .payload(&json!({
                    "source": GraphJson::from_quantum(&src),
                    "target": GraphJson::from_quantum(&dst),
                    "vertices": QuantumSetJson::from_set(src.vertices()),
                    "map": RelationJson::from_relation(&phi),
                }))
        }
    }
}

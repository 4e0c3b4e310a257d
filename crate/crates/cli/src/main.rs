use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use revzeck::buildup::{
    buildup_exhaustive, buildup_policy, buildup_winner, BuildUpGame, BuildUpState,
};
use revzeck::chomp::{chomp_solve, ChompBoard, ChompPolicy, ReversedChomp};
use revzeck::fib::decomposition_stats;
use revzeck::randomplay::{
    enumerate_games, exact_histogram, exact_parity_prob, simulate, Histogram, RandomGameModel,
};
use revzeck::solver::{
    game_length_range, length_upper_bound, optimal_moves, solve_with_limit, winner_table_streaming,
    TableRow, WinFraction,
};
use revzeck::strategies::{
    classify123, strategy123, thm12_index, thm12_policy, verify_policy, Certificate, CopycatPolicy,
    Strategy123Policy, Ternary, VerificationFailure,
};
use revzeck::{Error, GameState, Player, ReversedZeckendorf};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "revzeck",
    version,
    about = "Solve, simulate and verify the reversed Zeckendorf game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print JSON instead of text.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Print CSV instead of text (table, simulate and enumerate).
    #[arg(long, global = true)]
    csv: bool,

    /// Worker threads for table and simulate.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed for simulations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Give up once a game graph grows past this many positions.
    #[arg(long, global = true)]
    max_vertices: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Winner, edge and vertex counts for one start position.
    Solve(SolveArgs),
    /// Winner table for a range of n, one row per n as it completes.
    Table {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Shortest and longest games from the Zeckendorf start.
    Lengths {
        #[arg(long)]
        n: u64,
    },
    /// Closed-form upper bound on game length (no solving).
    Bound {
        #[arg(long)]
        n: u64,
    },
    /// Probability that a move-uniform random game has odd length.
    Parity {
        #[arg(long)]
        n: u64,
        /// Compute the exact rational instead of simulating.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Histogram of random game lengths mod Z.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long = "mod", default_value_t = 2)]
        modulus: u32,
    },
    /// Exact game-length distribution mod Z.
    Enumerate {
        #[arg(long)]
        n: u64,
        #[arg(long = "mod", default_value_t = 2)]
        modulus: u32,
        #[arg(long, value_enum, default_value_t = Model::GameUniform)]
        model: Model,
    },
    /// Winner of the ones/twos/threes position (a, b, c).
    Classify {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
    },
    /// Check a strategy against every possible opponent.
    Verify(VerifyArgs),
    /// Winner of the build-up game.
    Buildup {
        #[arg(long)]
        n: u32,
        /// Also search the whole game tree.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Winner of reversed Chomp on a rows x cols board.
    Chomp {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
    /// Run the HTTP play service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Largest n the optimal engine will solve.
        #[arg(long, default_value_t = 80)]
        solve_limit: u64,
        /// Load sessions from this file at start and save them on Ctrl-C.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SolveArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Heights low bin first, e.g. "2,0,2".
    #[arg(long)]
    state: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Thm12,
    Copycat,
    Ternary,
    Buildup,
    Chomp,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// n for thm12 (must be F_{i+1} + F_{i-2}) and buildup.
    #[arg(long)]
    n: Option<u64>,
    /// Index i for thm12.
    #[arg(long)]
    i: Option<usize>,
    /// All-even start for copycat.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    MoveUniform,
    GameUniform,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Exit statuses besides 0 and clap's own 2.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Refuted(String),
}

fn classify_error(e: Error) -> anyhow::Error {
    match e {
        Error::ResourceLimit(m) => Failure::Resource(m).into(),
        Error::Domain(_) | Error::Range { .. } | Error::Parse(_) => {
            Failure::Usage(e.to_string()).into()
        }
        other => other.into(),
    }
}

fn winner_word(p: Player) -> &'static str {
    match p {
        Player::P1 => "P1",
        Player::P2 => "P2",
    }
}

struct Out {
    w: Box<dyn Write>,
    format: Format,
}

impl Out {
    fn json<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        serde_json::to_writer(&mut self.w, value)?;
        writeln!(self.w)?;
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) -> anyhow::Result<()> {
        writeln!(self.w, "{}", text.as_ref())?;
        Ok(())
    }
}

fn parse_state(s: &str) -> anyhow::Result<GameState> {
    s.parse().map_err(classify_error)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .context("starting worker threads")?;
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let w: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut out = Out { w, format };
    let result = dispatch(&cli, &mut out);
    out.w.flush()?;
    result
}

fn dispatch(cli: &Cli, out: &mut Out) -> anyhow::Result<()> {
    match &cli.command {
        Command::Solve(args) => solve_cmd(args, cli.max_vertices, out),
        Command::Table { from, to } => table_cmd(*from, *to, cli.threads, cli.max_vertices, out),
        Command::Lengths { n } => {
            let start = GameState::zeckendorf(*n).map_err(classify_error)?;
            let r = solve_with_limit(&start, cli.max_vertices).map_err(classify_error)?;
            let (shortest, longest) = game_length_range(&r);
            let z = decomposition_stats(*n).map_err(classify_error)?.terms;
            let bound = length_upper_bound(*n).map_err(classify_error)?;
            match out.format {
                Format::Json => out.json(&json!({
                    "n": n, "shortest": shortest, "longest": longest, "bound": bound, "n_minus_z": n - z,
                })),
                _ => out.line(format!(
                    "n = {n}: shortest {shortest} (n - Z(n) = {}), longest {longest}, bound {bound}",
                    n - z
                )),
            }
        }
        Command::Bound { n } => {
            let stats = decomposition_stats(*n).map_err(classify_error)?;
            let bound = length_upper_bound(*n).map_err(classify_error)?;
            match out.format {
                Format::Json => out.json(&json!({
                    "n": n, "bound": bound, "terms": stats.terms, "index_sum": stats.index_sum,
                })),
                _ => out.line(format!(
                    "n = {n}: longest game <= {bound} (Z(n) = {}, Z_I(n) = {})",
                    stats.terms, stats.index_sum
                )),
            }
        }
        Command::Parity { n, exact, trials } => {
            let start = GameState::zeckendorf(*n).map_err(classify_error)?;
            if *exact {
                let p = exact_parity_prob(&start);
                match out.format {
                    Format::Json => out.json(&json!({"n": n, "exact": true, "odd": p.to_string()})),
                    _ => out.line(format!("n = {n}: P(odd length) = {p}")),
                }
            } else {
                let h = simulate(&start, *trials, cli.seed, 2).map_err(classify_error)?;
                match out.format {
                    Format::Json => out.json(&h),
                    _ => {
                        let (lo, hi) = h.intervals[1];
                        out.line(format!(
                            "n = {n}: odd length in {} of {trials} games ({:.4}, 95% CI {lo:.4}..{hi:.4}, seed {})",
                            h.counts[1], h.probabilities[1], cli.seed
                        ))
                    }
                }
            }
        }
        Command::Simulate { n, trials, modulus } => {
            let start = GameState::zeckendorf(*n).map_err(classify_error)?;
            let h = simulate(&start, *trials, cli.seed, *modulus).map_err(classify_error)?;
            histogram_out(&h, out)
        }
        Command::Enumerate { n, modulus, model } => {
            let start = GameState::zeckendorf(*n).map_err(classify_error)?;
            let h = match model {
                Model::GameUniform => {
                    // Fail early with a clear message if the count overflows.
                    enumerate_games(&start, *modulus).map_err(classify_error)?;
                    exact_histogram(&start, *modulus, RandomGameModel::GameUniform)
                }
                Model::MoveUniform => {
                    exact_histogram(&start, *modulus, RandomGameModel::MoveUniform)
                }
            }
            .map_err(classify_error)?;
            histogram_out(&h, out)
        }
        Command::Classify { a, b, c } => {
            let t = Ternary::new(*a, *b, *c);
            if t.value() == 0 {
                bail!(Failure::Usage("a + 2b + 3c must be positive".into()));
            }
            let winner = classify123(*a, *b, *c);
            let class = t.parity_class().row();
            let mv = strategy123(&t).ok();
            match out.format {
                Format::Json => out.json(&json!({
                    "a": a, "b": b, "c": c, "class": class, "winner": winner,
                    "move": mv.map(|m| m.to_string()),
                })),
                _ => out.line(winner_word(winner)),
            }
        }
        Command::Verify(args) => verify_cmd(args, out),
        Command::Buildup { n, exhaustive } => {
            let winner = buildup_winner(*n).map_err(classify_error)?;
            let searched = if *exhaustive {
                Some(buildup_exhaustive(*n).map_err(classify_error)?)
            } else {
                None
            };
            match out.format {
                Format::Json => {
                    out.json(&json!({"n": n, "winner": winner, "exhaustive": searched}))
                }
                _ => {
                    let mut line = format!("n = {n}: {}", winner_word(winner));
                    if let Some(s) = searched {
                        line += &format!(" (search: {})", winner_word(s));
                    }
                    out.line(line)
                }
            }
        }
        Command::Chomp { rows, cols } => {
            let winner = chomp_solve(*rows, *cols).map_err(classify_error)?;
            match out.format {
                Format::Json => out.json(&json!({"rows": rows, "cols": cols, "winner": winner})),
                _ => out.line(format!("{rows}x{cols}: {}", winner_word(winner))),
            }
        }
        Command::Serve {
            port,
            host,
            solve_limit,
            snapshot,
        } => {
            let config = revzeck_server::ServeConfig {
                limits: revzeck_server::Limits {
                    solve_limit: *solve_limit,
                },
                snapshot: snapshot.clone(),
            };
            let addr = format!("{host}:{port}");
            tokio::runtime::Runtime::new()?.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                revzeck_server::serve(listener, config).await?;
                anyhow::Ok(())
            })
        }
    }
}

fn solve_cmd(args: &SolveArgs, max_vertices: Option<usize>, out: &mut Out) -> anyhow::Result<()> {
    let start = match (&args.n, &args.state) {
        (Some(n), _) => GameState::zeckendorf(*n).map_err(classify_error)?,
        (None, Some(s)) => parse_state(s)?,
        (None, None) => unreachable!("clap requires one of --n and --state"),
    };
    let r = solve_with_limit(&start, max_vertices).map_err(classify_error)?;
    match out.format {
        Format::Json => {
            let mut v = json!({"n": r.n, "winner": r.winner, "edges": r.edge_count, "vertices": r.vertex_count});
            if args.state.is_some() {
                v["state"] = json!(start);
            }
            out.json(&v)
        }
        Format::Csv => {
            out.line(TableRow::csv_header())?;
            out.line(
                TableRow {
                    n: r.n,
                    winner: r.winner,
                    edges: r.edge_count,
                    vertices: r.vertex_count,
                }
                .to_csv(),
            )
        }
        Format::Text => {
            let best = optimal_moves(&start, &r).map_err(classify_error)?;
            out.line(format!(
                "start {start} (n = {}): {} wins; {} edges, {} vertices",
                r.n,
                winner_word(r.winner),
                r.edge_count,
                r.vertex_count
            ))?;
            if !best.is_empty() {
                let moves: Vec<String> = best.iter().map(|m| m.to_string()).collect();
                out.line(format!("winning moves: {}", moves.join(", ")))?;
            }
            Ok(())
        }
    }
}

fn table_cmd(
    from: u64,
    to: u64,
    threads: usize,
    max_vertices: Option<usize>,
    out: &mut Out,
) -> anyhow::Result<()> {
    let format = out.format;
    match format {
        Format::Csv => out.line(TableRow::csv_header())?,
        Format::Text => out.line(format!(
            "{:>5} {:>6} {:>10} {:>10}",
            "n", "winner", "edges", "vertices"
        ))?,
        Format::Json => {}
    }
    let mut rows = Vec::new();
    let mut write_err = None;
    let result = winner_table_streaming(from, to, threads, max_vertices, |row| {
        let written = match format {
            Format::Csv => out.line(row.to_csv()),
            Format::Json => out.json(&row),
            Format::Text => out.line(format!(
                "{:>5} {:>6} {:>10} {:>10}",
                row.n,
                winner_word(row.winner),
                row.edges,
                row.vertices
            )),
        }
        .and_then(|_| Ok(out.w.flush()?));
        if let Err(e) = written {
            write_err.get_or_insert(e);
        }
        rows.push(row);
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    if let Err(e) = result {
        let done = rows
            .last()
            .map_or("none".to_string(), |r| format!("n <= {}", r.n));
        return Err(classify_error(e))
            .context(format!("table stopped early; rows emitted for {done}"));
    }
    let wins = WinFraction::from_rows(&rows);
    let summary = format!(
        "P1 wins {} of {} ({:.3})",
        wins.p1_wins,
        wins.games,
        wins.as_f64()
    );
    if format == Format::Text {
        out.line(summary)
    } else {
        eprintln!("{summary}");
        Ok(())
    }
}

fn histogram_out(h: &Histogram, out: &mut Out) -> anyhow::Result<()> {
    match out.format {
        Format::Json => out.json(h),
        Format::Csv => {
            out.line("residue,count,probability")?;
            for (r, p) in h.probabilities.iter().enumerate() {
                let count = h.counts.get(r).map_or(String::new(), |c| c.to_string());
                out.line(format!("{r},{count},{p}"))?;
            }
            Ok(())
        }
        Format::Text => {
            let what = match h.trials {
                Some(t) => format!("{t} simulated games, seed {}", h.seed.unwrap_or_default()),
                None => "exact".to_string(),
            };
            out.line(format!("n = {}, length mod {} ({what})", h.n, h.modulus))?;
            for (r, p) in h.probabilities.iter().enumerate() {
                let mut line = format!("{r:>4} {p:.6}");
                if let Some(c) = h.counts.get(r) {
                    line += &format!(" {c:>12}");
                }
                if let Some(e) = h.exact_probabilities.get(r) {
                    line += &format!("  {e}");
                }
                if let Some((lo, hi)) = h.intervals.get(r) {
                    line += &format!("  [{lo:.4}, {hi:.4}]");
                }
                out.line(line)?;
            }
            Ok(())
        }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this family")).into())
}

fn verify_cmd(args: &VerifyArgs, out: &mut Out) -> anyhow::Result<()> {
    let (what, result): (String, Result<Certificate, VerificationFailure>) = match args.family {
        Family::Thm12 => {
            let i = match (args.i, args.n) {
                (Some(i), _) => i,
                (None, Some(n)) => thm12_index(n).ok_or_else(|| {
                    Failure::Usage(format!("{n} is not F_(i+1) + F_(i-2) for any i >= 3"))
                })?,
                (None, None) => bail!(Failure::Usage("--i or --n is required".into())),
            };
            let mut p = thm12_policy(i).map_err(classify_error)?;
            let start = p.start().clone();
            let r = verify_policy(&ReversedZeckendorf, &start, &mut p, true);
            (format!("combine opening, n = {}", start.value()), r)
        }
        Family::Copycat => {
            let s = args
                .state
                .as_deref()
                .ok_or_else(|| Failure::Usage("--state is required".into()))?;
            let start = parse_state(s)?;
            if !start.all_even() {
                bail!(Failure::Usage(format!("{start} has an odd height")));
            }
            let r = verify_policy(&ReversedZeckendorf, &start, &mut CopycatPolicy, false);
            (format!("copycat from {start}"), r)
        }
        Family::Ternary => {
            let t = Ternary::new(need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
            let start = t.to_state().map_err(classify_error)?;
            let first = classify123(t.ones, t.twos, t.threes) == Player::P1;
            if !first {
                bail!(Failure::Usage(format!(
                    "{t} is lost for the player to move"
                )));
            }
            let r = verify_policy(&ReversedZeckendorf, &start, &mut Strategy123Policy, true);
            (format!("ones/twos/threes strategy from {t}"), r)
        }
        Family::Buildup => {
            let n = u32::try_from(need(args.n, "n")?)
                .map_err(|_| anyhow!(Failure::Usage("n is too large".into())))?;
            let mut p = buildup_policy(n).map_err(classify_error)?;
            let first = p.side() == Player::P1;
            let r = verify_policy(
                &BuildUpGame,
                &BuildUpState::new(n).map_err(classify_error)?,
                &mut p,
                first,
            );
            (
                format!("build-up strategy for {} at n = {n}", winner_word(p.side())),
                r,
            )
        }
        Family::Chomp => {
            let start = ChompBoard::initial(need(args.rows, "rows")?, need(args.cols, "cols")?)
                .map_err(classify_error)?;
            let first = start.cols == 1;
            let r = verify_policy(&ReversedChomp, &start, &mut ChompPolicy, first);
            (
                format!("chomp strategy on {}x{}", start.rows, start.cols),
                r,
            )
        }
    };
    match (&result, out.format) {
        (_, Format::Json) => out.json(&json!({
            "family": what,
            "certified": result.is_ok(),
            "adversary_positions": result.as_ref().ok().map(|c| c.adversary_positions),
            "failure": result.as_ref().err().map(|f| f.to_string()),
        }))?,
        (Ok(c), _) => out.line(format!(
            "{what}: certified against every opponent ({} opponent positions)",
            c.adversary_positions
        ))?,
        (Err(f), _) => out.line(format!("{what}: FAILED: {f}"))?,
    }
    match result {
        Ok(_) => Ok(()),
        Err(f) => Err(Failure::Refuted(f.to_string()).into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if matches!(cli.command, Command::Serve { .. }) {
        tracing_subscriber::fmt()
            .with_env_filter(
                tracing_subscriber::EnvFilter::try_from_default_env()
                    .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
            )
            .init();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Failure>() {
                Some(Failure::Usage(_)) => 2,
                Some(Failure::Resource(_)) => 3,
                Some(Failure::Refuted(_)) | None => 1,
            };
            ExitCode::from(code)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use torex::cycle::parse_literal;
use torex::fixtures::{join, random_rotation_system, random_with_genus, torus_grid};
use torex::gridminor::{grid_minor, tex_lower_bound};
use torex::homology::{
    crossing_lb_from_tex, ew, ewn, ewn_dual, fw, fwn, stretch_bounds, stretch_exact, StretchResult,
};
use torex::lemmas::{check_lemma, random_suite, CheckLimits, Lemma};
use torex::planarizer::{certified_bound, draw_sequence, validate_drawing};
use torex::stretchfinder::find_high_stretch_subgraph;
use torex::surgery::{cut_along, cut_through, good_planarizing_sequence};
use torex::{EmbCycle, RotationSystem};

#[derive(Parser)]
#[command(name = "torex", version, about = "Embedded graphs on orientable surfaces")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cycle-enumeration cap for exact stretch.
    #[arg(long, global = true, default_value_t = torex::homology::DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Widths, stretch, planarizing sequence and crossing-number window.
    Stats { file: PathBuf },
    /// Planar drawing with a certified crossing bound.
    Planarize {
        file: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
        /// Write the planarization (crossings as degree-4 vertices).
        #[arg(long)]
        emit_planarization: Option<PathBuf>,
    },
    /// Toroidal grid minor with a checkable certificate (torus only).
    GridMinor {
        file: PathBuf,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Cut down to a subgraph of large dual stretch.
    HighStretch { file: PathBuf },
    /// Stretch, exact by default.
    Stretch {
        file: PathBuf,
        /// Report a lower and upper bound instead of the exact value.
        #[arg(long)]
        bounds: bool,
    },
    /// Cut through a primal cycle or along a dual cycle.
    Cut(CutArgs),
    /// Check a lemma on a file, or on random rotation systems.
    Verify {
        file: Option<PathBuf>,
        #[arg(long, value_parser = parse_lemma)]
        lemma: Lemma,
        /// Random instances when no file is given.
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 20)]
        max_edges: usize,
    },
    /// Generate fixtures.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
        #[arg(short = 'o', global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CutArgs {
    file: PathBuf,
    #[arg(long, conflicts_with = "along", required_unless_present = "along")]
    through: Option<String>,
    #[arg(long)]
    along: Option<String>,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// The toroidal grid C_P x C_Q.
    Tg { p: usize, q: usize },
    /// Join two embeddings at vertex 0; genus adds up.
    Join { a: PathBuf, b: PathBuf },
    /// Seeded random connected rotation system.
    Random {
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long, default_value_t = 20)]
        max_edges: usize,
        #[arg(long, default_value_t = 1)]
        min_genus: usize,
    },
}

fn parse_lemma(s: &str) -> std::result::Result<Lemma, String> {
    s.parse()
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Torex(#[from] torex::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0} counterexample(s) found")]
    Counterexamples(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Torex(e) if e.is_precondition() => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<RotationSystem> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(RotationSystem::parse(&text)?)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn stretch_json(s: &StretchResult) -> Value {
    json!({
        "mode": s.mode,
        "lower": s.lower,
        "upper": s.upper,
        "exact": s.exact(),
        "one_leaping": s.one_leaping,
        "witness": s.witness.as_ref().map(|(a, b)| [a.literal(), b.literal()]),
    })
}

fn stats(rs: &RotationSystem, cap: usize) -> Result<Value> {
    let g = rs.genus();
    let opt = |r: torex::Result<usize>| r.ok();
    let mut report = json!({
        "V": rs.num_vertices(),
        "E": rs.num_edges(),
        "F": rs.num_faces(),
        "genus": g,
        "max_degree": rs.max_degree(),
        "ewn": opt(ewn(rs)),
        "ewn_dual": opt(ewn_dual(rs)),
        "ew": opt(ew(rs)),
        "fw": opt(fw(rs)),
        "fwn": opt(fwn(rs)),
    });
    if g >= 1 {
        let st = match stretch_exact(rs, cap) {
            Ok(s) => s,
            Err(torex::Error::TooLarge { .. }) => stretch_bounds(rs)?,
            Err(e) => return Err(e.into()),
        };
        report["stretch"] = stretch_json(&st);
    }
    let seq = good_planarizing_sequence(rs)?;
    report["planarizing_sequence"] = seq
        .steps
        .iter()
        .map(|s| json!({"k": s.k, "l": s.l, "gamma": s.gamma_input, "severed": s.severed_input}))
        .collect();
    report["bound"] = json!(certified_bound(&seq));
    let drawing = draw_sequence(rs, &seq)?;
    let mut cr_lower = 0usize;
    if g >= 1 {
        let dual_stretch = stretch_exact(&rs.dual(), cap).ok().and_then(|s| s.exact());
        let tex = tex_lower_bound(rs, dual_stretch)?;
        cr_lower = cr_lower.max(tex.cr_lower.ceil() as usize);
        report["tex"] = to_value(&tex);
    }
    if g == 1 {
        match grid_minor(rs) {
            Ok(r) => {
                let (p, q) = (r.certificate.p, r.certificate.q);
                let lb = crossing_lb_from_tex(p, q)?;
                cr_lower = cr_lower.max(lb.value.div_ceil(4)).max((p * q).div_ceil(12));
                report["grid_minor"] = json!({"p": p, "q": q, "verified": r.certificate.verified});
            }
            Err(e) => report["grid_minor"] = json!({"error": e.to_string()}),
        }
    }
    report["cr_window"] = json!([cr_lower, drawing.total_crossings]);
    Ok(report)
}

fn cycle_arg(host: &RotationSystem, lit: &str, want_dual: bool) -> Result<EmbCycle> {
    let (dual, edges) = parse_literal(lit)?;
    if dual != want_dual {
        let want = if want_dual { "DC:" } else { "C:" };
        return Err(CliError::Usage(format!("expected a `{want}` cycle literal")));
    }
    Ok(EmbCycle::from_edges(host, &edges, dual)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cap = cli.exact_cap;
    match cli.cmd {
        Cmd::Stats { file } => print!("{}", pretty(&stats(&read(&file)?, cap)?)),
        Cmd::Planarize { file, out, emit_planarization } => {
            let rs = read(&file)?;
            let seq = good_planarizing_sequence(&rs)?;
            let d = draw_sequence(&rs, &seq)?;
            let check = validate_drawing(&d);
            let mut v = to_value(&d);
            v["valid"] = json!(check.valid);
            v["problems"] = json!(check.problems);
            if let Some(p) = emit_planarization {
                write(&p, &d.planarization.serialize())?;
            }
            emit(out.as_deref(), &pretty(&v))?;
            if !check.valid {
                return Err(CliError::Torex(torex::Error::Invariant("drawing failed validation".into())));
            }
        }
        Cmd::GridMinor { file, certificate } => {
            let rs = read(&file)?;
            let r = grid_minor(&rs)?;
            let cert = to_value(&r.certificate);
            if let Some(p) = certificate {
                write(&p, &pretty(&cert))?;
            }
            let v = json!({
                "certificate": cert,
                "first_family": r.first.cycles.iter().map(EmbCycle::literal).collect::<Vec<_>>(),
                "second_family": r.second.cycles.iter().map(EmbCycle::literal).collect::<Vec<_>>(),
                "stats": to_value(&r.stats),
                "tex": r.certificate.p * r.certificate.q,
            });
            print!("{}", pretty(&v));
        }
        Cmd::HighStretch { file } => {
            let r = find_high_stretch_subgraph(&read(&file)?, cap)?;
            let mut v = to_value(&r);
            let steps: Vec<Value> = r
                .steps
                .iter()
                .map(|s| {
                    let mut x = to_value(s);
                    x["alpha"] = json!(s.alpha.literal().replacen("C:", "DC:", 1));
                    x["beta"] = json!(s.beta.literal().replacen("C:", "DC:", 1));
                    x
                })
                .collect();
            v["steps"] = json!(steps);
            print!("{}", pretty(&v));
        }
        Cmd::Stretch { file, bounds } => {
            let rs = read(&file)?;
            let s = if bounds { stretch_bounds(&rs)? } else { stretch_exact(&rs, cap)? };
            print!("{}", pretty(&stretch_json(&s)));
        }
        Cmd::Cut(CutArgs { file, through, along, out }) => {
            let rs = read(&file)?;
            let (cut, v) = if let Some(lit) = through {
                let c = cycle_arg(&rs, &lit, false)?;
                let r = cut_through(&rs, &c)?;
                let v = json!({"c1": r.c1, "c2": r.c2, "edge_origin": r.edge_origin});
                (r.cut, v)
            } else {
                let lit = along.expect("clap requires one of --through/--along");
                let c = cycle_arg(&rs.dual(), &lit, true)?;
                let r = cut_along(&rs, &c)?;
                let v = json!({"a1": r.a1, "a2": r.a2, "severed": r.severed_edges(), "edge_origin": r.edge_origin});
                (r.cut, v)
            };
            match out {
                Some(p) => {
                    write(&p, &cut.serialize())?;
                    let mut v = v;
                    v["genus"] = json!(cut.genus());
                    v["V"] = json!(cut.num_vertices());
                    v["E"] = json!(cut.num_edges());
                    print!("{}", pretty(&v));
                }
                None => print!("{}", cut.serialize()),
            }
        }
        Cmd::Verify { file, lemma, random, max_edges } => {
            let limits = CheckLimits { exact_cap: cap, ..CheckLimits::default() };
            let (v, bad) = match file {
                Some(f) => {
                    let c = check_lemma(&read(&f)?, lemma, limits)?;
                    (to_value(&c), c.counterexamples.len())
                }
                None => {
                    let r = random_suite(lemma, random, max_edges, cli.seed, limits)?;
                    (to_value(&r), r.counterexamples.len())
                }
            };
            print!("{}", pretty(&v));
            if bad > 0 {
                return Err(CliError::Counterexamples(bad));
            }
        }
        Cmd::Gen { what, out } => {
            let rs = match what {
                GenCmd::Tg { p, q } => {
                    if p == 0 || q == 0 {
                        return Err(CliError::Usage("grid sides must be positive".into()));
                    }
                    torus_grid(p, q)
                }
                GenCmd::Join { a, b } => join(&read(&a)?, &read(&b)?),
                GenCmd::Random { vertices, edges, max_edges, min_genus } => match (vertices, edges) {
                    (Some(n), Some(m)) if n >= 1 && m >= n.saturating_sub(1).max(1) => {
                        random_rotation_system(n, m, cli.seed)
                    }
                    (None, None) => random_with_genus(max_edges, min_genus, cli.seed),
                    _ => return Err(CliError::Usage("need both --vertices and --edges, with edges >= vertices - 1".into())),
                },
            };
            emit(out.as_deref(), &rs.serialize())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TOREX_LOG", "error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("torex: {e}");
            log::debug!("{e:?}");
            ExitCode::from(e.exit_code())
        }
    }
}

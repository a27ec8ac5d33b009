//! `fixlat`: command-line front end for the lattice and group toolkit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fixlat::classify::{classify_e8, classify_parabolics, e8_lattice, saturate_and_extend, CoxeterDiagram};
use fixlat::enumerate::{minimum, short_vectors, vector_count_by_norm, CosetEnumerator};
use fixlat::fqs::{discriminant_form, extension_data, milgram_signature, overlattice_from_glue};
use fixlat::group::{invariant_lattice_of, o2_subgroup, pointwise_stabilizer};
use fixlat::io::{self, AmbientRef};
use fixlat::isometry::{automorphism_group, is_isometric_with_budget};
use fixlat::lattice::Lattice;
use fixlat::leech::{self, find_element, fixed_rank, s_lattice_check, s_lattice_type, M24_ORDER};
use fixlat::linalg::{Int, Rat, SqMat};
use fixlat::{limits, Error};

#[derive(Parser, Debug)]
#[command(name = "fixlat", version, about = "Exact lattices, discriminant forms and fixed-point sublattices")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized steps; required with --format json for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budgets: Budgets,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Budgets {
    /// Backtracking nodes per isometry search.
    #[arg(long, global = true, env = "FIXLAT_NODE_BUDGET")]
    node_budget: Option<u64>,
    /// Largest discriminant group handled element-wise.
    #[arg(long, global = true, env = "FIXLAT_ELEMENT_BUDGET")]
    element_budget: Option<u64>,
    /// Elements visited while counting double cosets.
    #[arg(long, global = true, env = "FIXLAT_DOUBLE_COSET_BUDGET")]
    double_coset_budget: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-lattice invariants and isometries.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Finite quadratic spaces and gluing.
    #[command(subcommand)]
    Fqs(FqsCmd),
    /// Finite matrix groups acting on a lattice.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Build and check the Leech lattice.
    #[command(subcommand)]
    Leech(LeechCmd),
    /// S-lattice test and type of a Leech sublattice.
    #[command(subcommand)]
    Slattice(SlatticeCmd),
    /// Search for Conway group elements.
    #[command(subcommand)]
    Element(ElementCmd),
    /// Orbit classification of fixed-point sublattices.
    #[command(subcommand)]
    Classify(ClassifyCmd),
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Rank, determinant, parity, minimum, alpha, discriminant group, Milgram residue.
    Info { file: PathBuf },
    /// Vector counts by norm up to a bound.
    Shortvec {
        file: PathBuf,
        #[arg(long)]
        bound: String,
        /// Also list the vectors, in the file's basis.
        #[arg(long)]
        vectors: bool,
    },
    /// Automorphism group order and generators.
    Aut { file: PathBuf },
    /// Isometry test between two lattices.
    Isom { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand, Debug)]
enum FqsCmd {
    /// Milgram signature residue mod 8 of a quadratic space or of a lattice's discriminant form.
    Milgram {
        file: PathBuf,
        /// Read an even lattice and use its discriminant form.
        #[arg(long)]
        lattice: bool,
    },
    /// Glue the first extension class and report the overlattice.
    Glue { first: PathBuf, second: PathBuf },
    /// Count extension classes of first ⊕ second to even unimodular lattices.
    Classes { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Invariant and coinvariant lattices.
    Fixlat { file: PathBuf },
    /// Order from a stabilizer chain.
    Order { file: PathBuf },
    /// The subgroup generated by odd-order elements.
    O2 { file: PathBuf },
    /// Pointwise stabilizer of a sublattice.
    Stab { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LeechCmd {
    /// Print the Leech lattice file.
    Build,
    /// Determinant, parity, minimum, kissing number, frame samples, monomial group.
    Verify {
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SlatticeCmd {
    /// Whether a Leech sublattice is an S-lattice.
    Check { file: PathBuf },
    /// Counts of norm-4 and norm-6 classes modulo 2S, as 2^a 3^b.
    Type { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ElementCmd {
    /// Random search in the Conway group for an element of given order and fixed rank.
    Find {
        #[arg(long)]
        order: u64,
        #[arg(long)]
        rank: usize,
        /// Words to sample.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Write the element's fixed lattice here as a sublattice file.
        #[arg(long)]
        fixed_out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ClassifyCmd {
    /// All orbits of fixed-point sublattices of E8 via parabolic subgroups.
    E8 {
        /// Leave out one simple root (sub-run on the remaining diagram).
        #[arg(long)]
        drop_node: Option<usize>,
        /// Directory for the machine-readable records file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Saturation loop from seed groups.
    Run {
        #[arg(long)]
        seeds: PathBuf,
        /// Group file whose generators are the extension candidates.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
}

/// A command's result: human lines, machine fields, and whether its checks passed.
struct Report {
    text: Vec<String>,
    json: Value,
    ok: bool,
}

impl Report {
    fn new(json: Value) -> Self {
        Report { text: Vec::new(), json, ok: true }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let mark = if ok { "ok" } else { "FAIL" };
        if detail.is_empty() {
            self.line(format!("{mark:<4} {name}"));
        } else {
            self.line(format!("{mark:<4} {name}: {detail}"));
        }
        if let Value::Object(m) = &mut self.json {
            let checks = m.entry("checks").or_insert_with(|| json!([]));
            checks.as_array_mut().unwrap().push(json!({"name": name, "ok": ok, "detail": detail}));
        }
        self.ok &= ok;
    }
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Out = std::result::Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("thread pool set once");
    }
    if let Some(v) = cli.budgets.node_budget {
        limits::set_node_budget(v);
    }
    if let Some(v) = cli.budgets.element_budget {
        limits::set_element_budget(v);
    }
    if let Some(v) = cli.budgets.double_coset_budget {
        limits::set_double_coset_budget(v);
    }
    match run(&cli) {
        Ok(report) => {
            let body = match cli.format {
                Format::Text => report.text.join("\n") + "\n",
                Format::Json => serde_json::to_string_pretty(&report.json).unwrap() + "\n",
            };
            if let Err(e) = emit(cli.out.as_deref(), &body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    }
}

fn header(command: &str) -> Value {
    json!({"format": "fixlat-report", "version": io::SCHEMA_VERSION, "command": command})
}

fn set(r: &mut Report, key: &str, v: Value) {
    r.json.as_object_mut().unwrap().insert(key.into(), v);
}

fn seed(cli: &Cli, command: &str) -> std::result::Result<u64, Failure> {
    match (cli.seed, cli.format) {
        (Some(s), _) => Ok(s),
        (None, Format::Text) => Ok(0),
        (None, Format::Json) => {
            Err(Failure::Usage(format!("{command} is randomized: --seed is required with --format json")))
        }
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Lattice(c) => lattice_cmd(c),
        Command::Fqs(c) => fqs_cmd(c),
        Command::Group(c) => group_cmd(cli, c),
        Command::Leech(c) => leech_cmd(cli, c),
        Command::Slattice(c) => slattice_cmd(c),
        Command::Element(ElementCmd::Find { order, rank, budget, fixed_out }) => {
            let s = seed(cli, "element find")?;
            let g = find_element(*order, *rank, s, *budget)?;
            let mut r = Report::new(header("element find"));
            r.line(format!("found element of order {order} with fixed rank {} (seed {s})", fixed_rank(&g)));
            for row in io::matrix_rows(&g) {
                r.line(format!("  {row:?}"));
            }
            set(&mut r, "seed", json!(s));
            set(&mut r, "order", json!(order));
            set(&mut r, "fixed_rank", json!(fixed_rank(&g)));
            set(&mut r, "matrix", json!(io::matrix_rows(&g)));
            if let Some(path) = fixed_out {
                let fixed = invariant_lattice_of(leech::leech().lattice(), std::slice::from_ref(&g));
                let text = io::sublattice_json(AmbientRef::Builtin("leech".into()), &fixed)?;
                std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                r.line(format!("fixed lattice written to {}", path.display()));
            }
            Ok(r)
        }
        Command::Classify(c) => classify_cmd(c),
    }
}

fn rat_str(r: &Rat) -> String {
    r.to_string()
}

fn lattice_cmd(c: &LatticeCmd) -> Out {
    match c {
        LatticeCmd::Info { file } => {
            let l = io::load_lattice(file)?;
            let mut r = Report::new(header("lattice info"));
            r.line(format!("rank        {}", l.rank()));
            r.line(format!("det         {}", l.det()));
            r.line(format!("integral    {}", l.is_integral()));
            r.line(format!("even        {}", l.is_even()));
            set(&mut r, "rank", json!(l.rank()));
            set(&mut r, "det", json!(rat_str(&l.det())));
            set(&mut r, "integral", json!(l.is_integral()));
            set(&mut r, "even", json!(l.is_even()));
            if l.rank() > 0 {
                let m = minimum(&l)?;
                r.line(format!("minimum     {m}"));
                set(&mut r, "minimum", json!(rat_str(&m)));
            }
            if l.is_even() {
                let d = discriminant_form(&l)?;
                let alpha = fixlat::classify::alpha(&l)?;
                let sig = milgram_signature(&d.space);
                r.line(format!("alpha       {alpha}"));
                r.line(format!("invariant factors {:?}", d.space.orders()));
                r.line(format!("milgram     {sig}"));
                set(&mut r, "alpha", json!(alpha));
                set(&mut r, "invariant_factors", json!(d.space.orders()));
                set(&mut r, "milgram", json!(sig));
            }
            Ok(r)
        }
        LatticeCmd::Shortvec { file, bound, vectors } => {
            let l = io::load_lattice(file)?;
            let b: Rat = parse_rat(bound)?;
            let counts = vector_count_by_norm(&l, &b)?;
            let mut r = Report::new(header("lattice shortvec"));
            let mut rows = Vec::new();
            for (n, c) in &counts {
                r.line(format!("norm {n}: {c}"));
                rows.push(json!({"norm": rat_str(n), "count": c}));
            }
            let total: usize = counts.iter().map(|(_, c)| c).sum();
            r.line(format!("total {total}"));
            set(&mut r, "counts", json!(rows));
            set(&mut r, "total", json!(total));
            if *vectors {
                let list = short_vectors(&l, &b)?;
                for (v, n) in list.coords.iter().zip(&list.norms) {
                    r.line(format!("  {v:?} norm {n}"));
                }
                set(&mut r, "vectors", json!(list.coords));
            }
            Ok(r)
        }
        LatticeCmd::Aut { file } => {
            let l = io::load_lattice(file)?;
            let g = automorphism_group(&l)?;
            let mut r = Report::new(header("lattice aut"));
            r.line(format!("order {}", g.order));
            r.line(format!("generators {}", g.gens.len()));
            set(&mut r, "order", json!(g.order.to_string()));
            set(&mut r, "generators", json!(g.gens.iter().map(io::matrix_rows).collect::<Vec<_>>()));
            Ok(r)
        }
        LatticeCmd::Isom { first, second } => {
            let a = io::load_lattice(first)?;
            let b = io::load_lattice(second)?;
            let t = is_isometric_with_budget(&a, &b, limits::node_budget())?;
            let mut r = Report::new(header("lattice isom"));
            match &t {
                Some(m) => {
                    r.line("isometric");
                    let rows: Vec<Vec<String>> =
                        (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect();
                    for row in &rows {
                        r.line(format!("  [{}]", row.join(", ")));
                    }
                    set(&mut r, "isometric", json!(true));
                    set(&mut r, "transform", json!(rows));
                }
                None => {
                    r.line("not isometric");
                    set(&mut r, "isometric", json!(false));
                }
            }
            Ok(r)
        }
    }
}

fn parse_rat(s: &str) -> std::result::Result<Rat, Failure> {
    let bad = || Failure::Usage(format!("cannot parse {s:?} as a rational number"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: Int = n.trim().parse().map_err(|_| bad())?;
    let d: Int = d.trim().parse().map_err(|_| bad())?;
    if d == Int::from(0) {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

fn fqs_cmd(c: &FqsCmd) -> Out {
    match c {
        FqsCmd::Milgram { file, lattice } => {
            let space = if *lattice { discriminant_form(&io::load_lattice(file)?)?.space } else { io::load_fqs(file)? };
            let sig = milgram_signature(&space);
            let mut r = Report::new(header("fqs milgram"));
            r.line(format!("group order {}", space.order()));
            r.line(format!("milgram {sig}"));
            set(&mut r, "order", json!(space.order().to_string()));
            set(&mut r, "milgram", json!(sig));
            Ok(r)
        }
        FqsCmd::Glue { first, second } => {
            let k = io::load_lattice(first)?;
            let kp = io::load_lattice(second)?;
            let data = extension_data(&k, &kp)?;
            let glued = overlattice_from_glue(&k, &kp, &data.classes[0])?;
            let mut r = Report::new(header("fqs glue"));
            r.line(format!("classes {}", data.classes.len()));
            r.line(format!("overlattice rank {} det {} even {}", glued.rank(), glued.det(), glued.is_even()));
            if glued.rank() > 0 {
                r.line(format!("overlattice minimum {}", minimum(&glued)?));
            }
            set(&mut r, "classes", json!(data.classes.len()));
            set(&mut r, "overlattice", serde_json::from_str::<Value>(&io::lattice_json(&glued)).unwrap());
            Ok(r)
        }
        FqsCmd::Classes { first, second } => {
            let k = io::load_lattice(first)?;
            let kp = io::load_lattice(second)?;
            let data = extension_data(&k, &kp)?;
            let mut r = Report::new(header("fqs classes"));
            r.line(format!("|O(A)| {}", data.oa_order));
            r.line(format!("|Obar(first)| {}", data.obar_k_order));
            if let Some(o) = data.obar_kp_order {
                r.line(format!("|Obar(second)| {o}"));
            }
            r.line(format!("classes {}", data.classes.len()));
            set(&mut r, "oa_order", json!(data.oa_order.to_string()));
            set(&mut r, "obar_first_order", json!(data.obar_k_order.to_string()));
            set(&mut r, "obar_second_order", json!(data.obar_kp_order.map(|o| o.to_string())));
            set(&mut r, "classes", json!(data.classes.len()));
            Ok(r)
        }
    }
}

fn gram_lines(r: &mut Report, title: &str, l: &Lattice) {
    r.line(format!("{title} (rank {}, det {})", l.rank(), l.det()));
    for i in 0..l.rank() {
        let row: Vec<String> = l.gram().row(i).iter().map(|x| x.to_string()).collect();
        r.line(format!("  [{}]", row.join(", ")));
    }
}

fn group_cmd(cli: &Cli, c: &GroupCmd) -> Out {
    match c {
        GroupCmd::Fixlat { file } => {
            let g = io::load_group(file)?;
            let fd = g.fixed_data();
            let mut r = Report::new(header("group fixlat"));
            gram_lines(&mut r, "invariant", &fd.invariant.lattice());
            gram_lines(&mut r, "coinvariant", &fd.coinvariant.lattice());
            set(&mut r, "invariant_rank", json!(fd.invariant.rank()));
            set(&mut r, "coinvariant_rank", json!(fd.coinvariant.rank()));
            set(&mut r, "invariant_gram", json!(io::entries(&fd.invariant.gram())));
            set(&mut r, "coinvariant_gram", json!(io::entries(&fd.coinvariant.gram())));
            Ok(r)
        }
        GroupCmd::Order { file } => {
            let g = io::load_group(file)?;
            let mut r = Report::new(header("group order"));
            r.line(format!("order {}", g.order()));
            if !g.order_is_certified() {
                r.line("(randomized stabilizer chain: a lower bound, exact with high probability)");
            }
            set(&mut r, "order", json!(g.order().to_string()));
            set(&mut r, "certified", json!(g.order_is_certified()));
            Ok(r)
        }
        GroupCmd::O2 { file } => {
            let s = seed(cli, "group o2")?;
            let g = io::load_group(file)?;
            let o2 = o2_subgroup(&g, s)?;
            let mut r = Report::new(header("group o2"));
            r.line(format!("|G| {}", g.order()));
            r.line(format!("|O2(G)| {}", o2.order()));
            set(&mut r, "seed", json!(s));
            set(&mut r, "order", json!(g.order().to_string()));
            set(&mut r, "o2_order", json!(o2.order().to_string()));
            set(&mut r, "o2_generators", json!(o2.gens().iter().map(io::matrix_rows).collect::<Vec<_>>()));
            Ok(r)
        }
        GroupCmd::Stab { file } => {
            let s = io::load_sublattice(file)?;
            let g = pointwise_stabilizer(s.ambient(), &s)?;
            let mut r = Report::new(header("group stab"));
            r.line(format!("order {}", g.order()));
            r.line(format!("generators {}", g.gens().len()));
            set(&mut r, "order", json!(g.order().to_string()));
            set(&mut r, "generators", json!(g.gens().iter().map(io::matrix_rows).collect::<Vec<_>>()));
            Ok(r)
        }
    }
}

fn leech_cmd(cli: &Cli, c: &LeechCmd) -> Out {
    let model = leech::leech();
    match c {
        LeechCmd::Build => {
            let mut r = Report::new(serde_json::from_str(&io::lattice_json(model.lattice())).unwrap());
            r.line(io::lattice_json(model.lattice()));
            Ok(r)
        }
        LeechCmd::Verify { samples } => {
            let s = seed(cli, "leech verify")?;
            let l = model.lattice();
            let mut r = Report::new(header("leech verify"));
            set(&mut r, "seed", json!(s));
            r.check("determinant", l.det() == Rat::from_integer(1.into()), format!("{}", l.det()));
            r.check("even", l.is_even(), format!("{}", l.is_even()));
            let m = minimum(l)?;
            r.check("minimum", m == Rat::from_integer(4.into()), format!("{m}"));
            let n4 = model.norm4_vectors().len();
            r.check("norm-4 vectors", n4 == 196560, format!("{n4}"));
            let (pairs, frames, bad) = frame_samples(l, *samples, s)?;
            r.check(
                "coset representatives",
                bad == 0,
                format!("{samples} samples: {pairs} single pairs, {frames} frames of 48, {bad} violations"),
            );
            let mono = model.monomial_group();
            let want = 4096 * M24_ORDER;
            r.check("monomial group order", mono.order() == want, format!("{}", mono.order()));
            Ok(r)
        }
    }
}

/// Classes of random vectors: short classes must be one ± pair, norm-8
/// classes a frame of 48 vectors in orthogonal pairs.
fn frame_samples(l: &Lattice, samples: usize, seed: u64) -> fixlat::Result<(usize, usize, usize)> {
    let ce = CosetEnumerator::new(l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pairs, mut frames, mut bad) = (0, 0, 0);
    let mut done = 0;
    while done < samples {
        let u: Vec<i64> = (0..24).map(|_| rng.gen_range(-3..=3)).collect();
        let reps = ce.short_reps(&u);
        if reps.zero_class {
            continue;
        }
        done += 1;
        let norm = reps.min_norm().cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
        if norm <= Rat::from_integer(6.into()) {
            if reps.vectors.len() == 2 {
                pairs += 1;
            } else {
                bad += 1;
            }
        } else if norm == Rat::from_integer(8.into()) {
            let vs = &reps.vectors.coords;
            let orthogonal = vs.iter().all(|a| {
                vs.iter().all(|b| {
                    let ab = l.inner(&to_int(a), &to_int(b));
                    let zero = Rat::from_integer(0.into());
                    a == b || ab == zero || ab == -Rat::from_integer(8.into())
                })
            });
            if vs.len() == 48 && orthogonal {
                frames += 1;
            } else {
                bad += 1;
            }
        } else {
            bad += 1;
        }
    }
    Ok((pairs, frames, bad))
}

fn to_int(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| x.into()).collect()
}

fn slattice_cmd(c: &SlatticeCmd) -> Out {
    match c {
        SlatticeCmd::Check { file } => {
            let s = io::load_sublattice(file)?;
            let ok = s_lattice_check(&s)?;
            let mut r = Report::new(header("slattice check"));
            r.check("S-lattice", ok, format!("rank {}", s.rank()));
            Ok(r)
        }
        SlatticeCmd::Type { file } => {
            let s = io::load_sublattice(file)?;
            let t = s_lattice_type(&s)?;
            let mut r = Report::new(header("slattice type"));
            r.line(format!("type {t}"));
            set(&mut r, "a", json!(t.a));
            set(&mut r, "b", json!(t.b));
            set(&mut r, "rank", json!(t.rank));
            r.check("1 + a + b = 2^rank", 1 + t.a + t.b == 1 << t.rank, format!("{}", 1 + t.a + t.b));
            Ok(r)
        }
    }
}

fn classify_cmd(c: &ClassifyCmd) -> Out {
    match c {
        ClassifyCmd::E8 { drop_node, records } => {
            let result = match drop_node {
                None => classify_e8()?,
                Some(k) if *k < 8 => {
                    let simple: Vec<Vec<i64>> =
                        (0..8).filter(|i| i != k).map(|i| (0..8).map(|j| (i == j) as i64).collect()).collect();
                    classify_parabolics(&e8_lattice(), &simple)?
                }
                Some(k) => return Err(Failure::Usage(format!("--drop-node {k} is not a node of the 8-node diagram"))),
            };
            let mut r = Report::new(header("classify e8"));
            r.line(format!("{} orbits", result.records.len()));
            r.line(format!(
                "{:>3} {:>4} {:>10} {:>5} {:>5} {:>4}  coinvariant",
                "no", "rank", "order", "det", "alpha", "ext"
            ));
            for rec in &result.records {
                r.line(format!(
                    "{:>3} {:>4} {:>10} {:>5} {:>5} {:>4}  {}",
                    rec.number,
                    rec.rank,
                    rec.group_order,
                    rec.det,
                    rec.alpha,
                    rec.extension_class_count.map(|c| c.to_string()).unwrap_or_else(|| "?".into()),
                    rec.coinvariant_root_type.as_ref().map(|t| t.to_string()).unwrap_or_else(|| "?".into()),
                ));
            }
            let expected = match drop_node {
                None => 41,
                Some(k) => {
                    let mut d = CoxeterDiagram::from_gram(e8_lattice().gram())?;
                    d.edges.retain(|&(a, b)| a != *k && b != *k);
                    let keep: Vec<usize> = (0..8).filter(|i| i != k).collect();
                    let sub = CoxeterDiagram {
                        nodes: 7,
                        edges: d
                            .edges
                            .iter()
                            .map(|&(a, b)| {
                                (keep.iter().position(|&x| x == a).unwrap(), keep.iter().position(|&x| x == b).unwrap())
                            })
                            .collect(),
                    };
                    fixlat::classify::subdiagram_types(&sub).len()
                }
            };
            r.check(
                "orbit count",
                result.records.len() == expected,
                format!("{} (expected {expected})", result.records.len()),
            );
            r.check("subdiagram bijection", result.bijection, format!("{} types", result.subdiagram_types.len()));
            let steinberg = result.checks.iter().all(|c| c.generated_by_reflections);
            r.check("stabilizers generated by reflections", steinberg, String::new());
            let roots = result.checks.iter().all(|c| c.full_rank_roots);
            r.check("coinvariant root lattices of full rank", roots, String::new());
            let stab = result.checks.iter().all(|c| c.stabilizer_matches);
            r.check("pointwise stabilizers match", stab, String::new());
            let glue = result.checks.iter().all(|c| c.unique_glue);
            r.check("unique glue", glue, String::new());
            if let Some(f) = result.first_failure() {
                r.line(format!("first failing check: {f}"));
            }
            set(&mut r, "orbits", json!(result.records.len()));
            set(
                &mut r,
                "records",
                serde_json::to_value(result.records.iter().map(io::record_out).collect::<Vec<_>>()).unwrap(),
            );
            if let Some(dir) = records {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
                let path = dir.join("records.json");
                std::fs::write(&path, io::records_json(AmbientRef::Builtin("e8".into()), &result.records))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                r.line(format!("records written to {}", path.display()));
            }
            Ok(r)
        }
        ClassifyCmd::Run { seeds, candidates } => {
            let cands: Vec<SqMat> = match candidates {
                Some(p) => io::load_group(p)?.gens().to_vec(),
                None => Vec::new(),
            };
            let mut files: Vec<PathBuf> = std::fs::read_dir(seeds)
                .map_err(|e| Failure::Usage(format!("{}: {e}", seeds.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            let mut r = Report::new(header("classify run"));
            let mut out = Vec::new();
            for f in &files {
                let g = io::load_group(f)?;
                let sat = saturate_and_extend(&g, &cands)?;
                r.line(format!(
                    "{}: {} records, {} extensions, {} candidates skipped",
                    f.file_name().unwrap().to_string_lossy(),
                    sat.records.len(),
                    sat.extensions,
                    sat.skipped
                ));
                for rec in &sat.records {
                    r.line(format!("  rank {} order {} det {}", rec.rank, rec.group_order, rec.det));
                }
                out.push(json!({
                    "seed_file": f.file_name().unwrap().to_string_lossy(),
                    "extensions": sat.extensions,
                    "skipped": sat.skipped,
                    "records": sat.records.iter().map(io::record_out).collect::<Vec<_>>(),
                }));
            }
            set(&mut r, "runs", json!(out));
            Ok(r)
        }
    }
}

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maxplus::csr::{analyze, build_csr, TransientReport};
use maxplus::extremal::{
    generate_dm, generate_wielandt, twice_optimal_walk, verify_crit_rc_dm, verify_crit_rc_wielandt, verify_dm,
    verify_wielandt, Condition, CritRcDmVerdict, CritRcWielandtVerdict, DmVerdict, Generated, WielandtCase,
    WielandtVerdict,
};
use maxplus::{Error, Matrix, MaxPlus};
use serde::Serialize;

const USAGE: u8 = 1;
const VERDICT_FALSE: u8 = 2;
const INTERNAL: u8 = 3;

/// Exact max-plus matrix analysis: powers, CSR terms, transients, and the
/// matrices attaining the Wielandt and Dulmage-Mendelsohn bounds.
///
/// Matrix files hold `n` on the first line followed by `n` rows of entries;
/// an entry is an integer, a fraction `p/q`, or `-inf`. Node indices on the
/// command line are 1-based.
#[derive(Debug, Parser)]
#[command(name = "maxplus", version)]
struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalue, girth, cyclicity, transients and bound attainment.
    Analyze { file: PathBuf },
    /// The power `A^t`, `t >= 1`.
    Powers {
        file: PathBuf,
        #[arg(long)]
        t: u64,
    },
    /// The CSR term `CS^tR`, `t >= 1`.
    Csr {
        file: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// Check the conditions for `T1 = DM(g, n)`.
    CheckDm {
        file: PathBuf,
        /// Comma-separated 1-based numbering, new position to old node;
        /// searched when omitted.
        #[arg(long, value_delimiter = ',')]
        numbering: Option<Vec<usize>>,
    },
    /// Check the conditions for `T1 = Wi(n)`.
    CheckWiel {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        numbering: Option<Vec<usize>>,
    },
    /// Check whether the critical rows and columns reach either bound.
    CheckCritRc { file: PathBuf },
    /// Generate a matrix attaining a bound.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// The twice optimal walk from `i` to `j` with length `t` modulo the girth.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Debug, Subcommand)]
enum Family {
    /// `T1 = DM(g, n)` with `2 <= g < n` coprime.
    Dm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Matrix file to write; the provenance goes to `FILE.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `T1 = Wi(n)` with critical girth `n - 1` or `n`.
    Wielandt {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseArg {
    #[value(name = "n-1")]
    NMinus1,
    #[value(name = "n")]
    N,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Invariant(_)) { INTERNAL } else { USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: USAGE, message: message.into() }
}

/// What a command prints and the status it exits with.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }

    fn verdict(text: String, holds: bool) -> Self {
        Output { text, code: if holds { 0 } else { VERDICT_FALSE } }
    }
}

fn read_matrix(path: &Path) -> Result<Matrix, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    text.parse::<Matrix>().map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn zero_based(numbering: Option<Vec<usize>>, n: usize) -> Result<Option<Vec<usize>>, Failure> {
    let Some(p) = numbering else { return Ok(None) };
    if p.len() != n || p.iter().any(|&v| v == 0 || v > n) {
        return Err(usage(format!("--numbering must list {n} nodes from 1 to {n}")));
    }
    Ok(Some(p.into_iter().map(|v| v - 1).collect()))
}

fn one_based(p: &[usize]) -> Vec<usize> {
    p.iter().map(|v| v + 1).collect()
}

fn node(v: usize, n: usize, flag: &str) -> Result<usize, Failure> {
    if v == 0 || v > n {
        return Err(usage(format!("--{flag} must lie in 1..={n}")));
    }
    Ok(v - 1)
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn report_text(r: &TransientReport) -> String {
    let rows = [
        ("n", r.n.to_string()),
        ("lambda", r.lambda.to_string()),
        ("g", opt(r.g)),
        ("gamma", opt(r.gamma)),
        ("T", opt(r.transient)),
        ("T1", r.t1.to_string()),
        ("Wi(n)", r.wi.to_string()),
        ("DM(g,n)", opt(r.dm)),
        ("attains DM", yes(r.attains_dm).into()),
        ("attains Wi", yes(r.attains_wiel).into()),
        ("crit row/col transient", opt(r.crit_rc_transient)),
    ];
    rows.iter().map(|(k, v)| format!("{k:<24}{v}\n")).collect()
}

#[derive(Serialize)]
struct ConditionView {
    holds: bool,
    vacuous: bool,
    witness: Option<[usize; 2]>,
}

impl From<&Condition> for ConditionView {
    fn from(c: &Condition) -> Self {
        ConditionView { holds: c.holds, vacuous: c.vacuous, witness: c.witness.map(|(i, j)| [i + 1, j + 1]) }
    }
}

fn condition_text(label: &str, c: &ConditionView) -> String {
    let state = match (c.holds, c.vacuous, c.witness) {
        (true, true, _) => "pass (vacuous)".to_string(),
        (true, false, _) => "pass".to_string(),
        (false, _, Some([i, j])) => format!("fail at ({i}, {j})"),
        (false, _, None) => "fail".to_string(),
    };
    format!("{label:<36}{state}\n")
}

fn verdict_line(holds: bool) -> &'static str {
    if holds {
        "verdict: holds\n"
    } else {
        "verdict: does not hold\n"
    }
}

#[derive(Serialize)]
struct DmView {
    holds: bool,
    g: Option<usize>,
    numbering: Option<Vec<usize>>,
    two_by_two: bool,
    crit_strongly_connected: Option<bool>,
    unique_girth_cycle: Option<bool>,
    girth_cycle_critical: Option<bool>,
    coprime: Option<ConditionView>,
    a2_dominated: Option<ConditionView>,
    chord: Option<ConditionView>,
    power: Option<ConditionView>,
}

impl From<&DmVerdict> for DmView {
    fn from(v: &DmVerdict) -> Self {
        let pre = v.prerequisites;
        let cond = v.conditions;
        DmView {
            holds: v.holds,
            g: v.g,
            numbering: v.numbering.as_deref().map(one_based),
            two_by_two: v.two_by_two,
            crit_strongly_connected: pre.map(|p| p.crit_strongly_connected),
            unique_girth_cycle: pre.map(|p| p.unique_girth_cycle),
            girth_cycle_critical: pre.map(|p| p.girth_cycle_critical),
            coprime: cond.as_ref().map(|c| (&c.coprime).into()),
            a2_dominated: cond.as_ref().map(|c| (&c.a2_dominated).into()),
            chord: cond.as_ref().map(|c| (&c.chord).into()),
            power: cond.as_ref().map(|c| (&c.power).into()),
        }
    }
}

fn numbering_text(p: &Option<Vec<usize>>) -> String {
    match p {
        Some(p) => p.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        None => "none".into(),
    }
}

fn dm_text(v: &DmView) -> String {
    let mut s = verdict_line(v.holds).to_string();
    let _ = writeln!(s, "g: {}", opt(v.g));
    let _ = writeln!(s, "numbering: {}", numbering_text(&v.numbering));
    if v.two_by_two {
        s.push_str("n = g = 2: decided by a11 != a22\n");
    }
    for (label, flag) in [
        ("critical graph strongly connected", v.crit_strongly_connected),
        ("unique critical girth cycle", v.unique_girth_cycle),
        ("girth cycle 1..g critical", v.girth_cycle_critical),
    ] {
        if let Some(f) = flag {
            let _ = writeln!(s, "{label:<36}{}", yes(f));
        }
    }
    for (label, c) in [
        ("1. g and n coprime", &v.coprime),
        ("2. A2 < CSR[A1]", &v.a2_dominated),
        ("3. B1 chord inequality", &v.chord),
        ("4. B1 power inequality", &v.power),
    ] {
        if let Some(c) = c {
            s.push_str(&condition_text(label, c));
        }
    }
    s
}

#[derive(Serialize)]
struct WielandtView {
    holds: bool,
    g: Option<usize>,
    case: Option<WielandtCase>,
    numbering: Option<Vec<usize>>,
    two_by_two: bool,
    cycle_critical: ConditionView,
    skeleton: Option<ConditionView>,
    a2_dominated: Option<ConditionView>,
}

impl From<&WielandtVerdict> for WielandtView {
    fn from(v: &WielandtVerdict) -> Self {
        WielandtView {
            holds: v.holds,
            g: v.g,
            case: v.case,
            numbering: v.numbering.as_deref().map(one_based),
            two_by_two: v.two_by_two,
            cycle_critical: (&v.cycle_critical).into(),
            skeleton: v.skeleton.as_ref().map(Into::into),
            a2_dominated: v.a2_dominated.as_ref().map(Into::into),
        }
    }
}

fn case_name(case: Option<WielandtCase>) -> &'static str {
    match case {
        Some(WielandtCase::GirthNMinus1) => "g = n-1",
        Some(WielandtCase::GirthN) => "g = n",
        None => "none",
    }
}

fn wielandt_text(v: &WielandtView) -> String {
    let mut s = verdict_line(v.holds).to_string();
    let _ = writeln!(s, "g: {}", opt(v.g));
    let _ = writeln!(s, "case: {}", case_name(v.case));
    let _ = writeln!(s, "numbering: {}", numbering_text(&v.numbering));
    if v.two_by_two {
        s.push_str("n = g = 2: decided by a11 != a22\n");
    }
    s.push_str(&condition_text("1. matching cycle critical", &v.cycle_critical));
    if let Some(c) = &v.skeleton {
        s.push_str(&condition_text("   skeleton arcs present", c));
    }
    if let Some(c) = &v.a2_dominated {
        s.push_str(&condition_text("2. A2 < CSR[A1]", c));
    }
    s
}

#[derive(Serialize)]
struct CritRcView {
    dm: CritRcDmVerdict,
    wielandt: CritRcWielandtVerdict,
}

fn crit_rc_text(v: &CritRcView) -> String {
    let d = &v.dm;
    let w = &v.wielandt;
    let mut s = String::new();
    let _ = writeln!(s, "DM bound:       {} (bound {}, critical graph index {}, g {})", yes(d.holds), d.bound, d.crit_index, d.g);
    let _ = writeln!(
        s,
        "Wielandt bound: {} (bound {}, A1 index {}, numbering {})",
        yes(w.holds),
        w.bound,
        opt(w.a1_index),
        numbering_text(&w.numbering.as_deref().map(one_based))
    );
    let _ = writeln!(s, "critical row/column transient: {}", d.crit_rc_transient);
    s
}

#[derive(Serialize)]
struct WalkView {
    nodes: Option<Vec<usize>>,
    length: Option<usize>,
    weight: Option<MaxPlus>,
    interesting: bool,
}

fn write_generated(gen: &Generated, out: Option<&Path>) -> Result<Output, Failure> {
    let provenance = to_json(&gen.provenance);
    match out {
        Some(path) => {
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".json");
            fs::write(path, gen.matrix.to_text()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            fs::write(&sidecar, &provenance).map_err(|e| usage(format!("{}: {e}", PathBuf::from(&sidecar).display())))?;
            Ok(Output::ok(format!(
                "wrote {} (T1 = {}) and {}\n",
                path.display(),
                gen.provenance.t1,
                PathBuf::from(sidecar).display()
            )))
        }
        None => {
            eprint!("{provenance}");
            Ok(Output::ok(gen.matrix.to_text()))
        }
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let json = cli.json;
    match cli.command {
        Command::Analyze { file } => {
            let report = analyze(&read_matrix(&file)?)?;
            Ok(Output::ok(if json { to_json(&report) } else { report_text(&report) }))
        }
        Command::Powers { file, t } => {
            let a = read_matrix(&file)?;
            if t == 0 {
                return Err(usage("--t must be at least 1"));
            }
            let p = a.power(t)?;
            Ok(Output::ok(if json { to_json(&p.entries().map(|(_, x)| x.clone()).collect::<Vec<_>>()) } else { p.to_text() }))
        }
        Command::Csr { file, t } => {
            let a = read_matrix(&file)?;
            if t == 0 {
                return Err(usage("--t must be at least 1"));
            }
            let m = build_csr(&a)?.at(t)?;
            Ok(Output::ok(if json { to_json(&m.entries().map(|(_, x)| x.clone()).collect::<Vec<_>>()) } else { m.to_text() }))
        }
        Command::CheckDm { file, numbering } => {
            let a = read_matrix(&file)?;
            let p = zero_based(numbering, a.dim())?;
            let view = DmView::from(&verify_dm(&a, p.as_deref())?);
            Ok(Output::verdict(if json { to_json(&view) } else { dm_text(&view) }, view.holds))
        }
        Command::CheckWiel { file, numbering } => {
            let a = read_matrix(&file)?;
            let p = zero_based(numbering, a.dim())?;
            let view = WielandtView::from(&verify_wielandt(&a, p.as_deref())?);
            Ok(Output::verdict(if json { to_json(&view) } else { wielandt_text(&view) }, view.holds))
        }
        Command::CheckCritRc { file } => {
            let a = read_matrix(&file)?;
            let view = CritRcView { dm: verify_crit_rc_dm(&a)?, wielandt: verify_crit_rc_wielandt(&a)? };
            let holds = view.dm.holds || view.wielandt.holds;
            Ok(Output::verdict(if json { to_json(&view) } else { crit_rc_text(&view) }, holds))
        }
        Command::Generate { family } => match family {
            Family::Dm { n, g, seed, out } => write_generated(&generate_dm(n, g, seed)?, out.as_deref()),
            Family::Wielandt { n, seed, case, out } => {
                let case = match case {
                    CaseArg::NMinus1 => WielandtCase::GirthNMinus1,
                    CaseArg::N => WielandtCase::GirthN,
                };
                write_generated(&generate_wielandt(n, seed, case)?, out.as_deref())
            }
        },
        Command::Oracle { file, i, j, t } => {
            let a = read_matrix(&file)?;
            let n = a.dim();
            let walk = twice_optimal_walk(&a, node(i, n, "i")?, node(j, n, "j")?, t)?;
            let view = WalkView {
                nodes: walk.as_ref().map(|w| one_based(&w.nodes)),
                length: walk.as_ref().map(|w| w.len()),
                weight: walk.as_ref().map(|w| w.weight.clone()),
                interesting: walk.as_ref().is_some_and(|w| w.interesting),
            };
            let text = if json {
                to_json(&view)
            } else {
                match &view.nodes {
                    Some(nodes) => format!(
                        "walk: {}\nlength: {}\nweight (normalized): {}\ninteresting: {}\n",
                        nodes.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                        view.length.unwrap(),
                        view.weight.as_ref().unwrap(),
                        yes(view.interesting)
                    ),
                    None => "no walk\n".into(),
                }
            };
            Ok(Output::ok(text))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(USAGE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

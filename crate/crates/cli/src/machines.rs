//! `run`, `estimate`, `normalize`, `transport` and `show-machine`.

use aitlab_core::algprob::estimate::MAX_PROGRAM_LENGTH;
use aitlab_core::algprob::{
    estimate_m, estimate_m_enumerative, explore, normalize, transport_machine, BudgetSchedule, EncodingMap,
    EstimateReport, NodeValue,
};
use aitlab_core::induction::predict_next;
use aitlab_core::mtm::{reference_universal, run, universal_input, MachineFile};
use aitlab_core::{rational, BitString};
use clap::{ArgGroup, Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::inputs;
use crate::output::{Format, Provenance, Report};

/// Explored tables hold every node up to the depth, so keep them small.
pub const MAX_DEPTH: usize = 20;
/// The enumerative route materializes every program up to `L`.
pub const MAX_ENUMERATE_LENGTH: usize = 24;

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Machine file, or `builtin:NAME`.
    #[arg(long)]
    pub machine: String,
    /// Input program bits.
    #[arg(long, value_parser = inputs::bits, default_value = "")]
    pub input: BitString,
    /// Step budget.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Run the reference universal machine on the machine's description
    /// followed by the input instead.
    #[arg(long)]
    pub universal: bool,
}

pub fn run_cmd(args: &RunArgs) -> Result<Report, CliError> {
    let m = inputs::machine(&args.machine)?;
    let prov = Provenance::new("run")
        .param("machine", &args.machine)
        .param("input", &args.input)
        .param("budget", args.budget)
        .param("universal", args.universal);
    let outcome = if args.universal {
        let input = universal_input(&m, &args.input)?;
        run(reference_universal(), &input, args.budget)
    } else {
        run(&m, &args.input, args.budget)
    };
    Ok(Report::new(prov, outcome))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One walk over the program tree; also yields certified upper bounds.
    Tree,
    /// Run every program of length at most L separately.
    Enumerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Fixed,
    Levin,
}

#[derive(Args, Debug)]
pub struct BudgetArgs {
    /// Longest program length considered.
    #[arg(long = "L")]
    pub max_len: usize,
    /// Per-program step budget.
    #[arg(long = "S")]
    pub step_budget: usize,
}

impl BudgetArgs {
    fn check(&self) -> Result<(), CliError> {
        if self.max_len > MAX_PROGRAM_LENGTH {
            return Err(CliError::input(format!("--L {} exceeds {MAX_PROGRAM_LENGTH}", self.max_len)));
        }
        Ok(())
    }
}

fn check_depth(depth: usize) -> Result<(), CliError> {
    if depth > MAX_DEPTH {
        return Err(CliError::input(format!("--depth {depth} exceeds {MAX_DEPTH}")));
    }
    Ok(())
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("nodes").required(true).args(["x", "depth"])))]
pub struct EstimateArgs {
    #[arg(long)]
    pub machine: String,
    /// A node to estimate; repeatable.
    #[arg(long, value_parser = inputs::bits)]
    pub x: Vec<BitString>,
    /// Estimate every node up to this length instead.
    #[arg(long)]
    pub depth: Option<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value = "tree")]
    pub method: Method,
    /// Step budget schedule (levin needs `--method enumerate`).
    #[arg(long, value_enum, default_value = "fixed")]
    pub schedule: Schedule,
}

#[derive(Serialize)]
struct EstimateResult {
    reports: Vec<EstimateReport>,
    /// `Σ_{ℓ(x)=n} M_lower(x)` for `n = 0..=depth`, when a depth was given.
    #[serde(with = "rational::serde_vec_str", skip_serializing_if = "Vec::is_empty")]
    kraft_sums: Vec<aitlab_core::Rational>,
}

pub fn estimate_cmd(args: &EstimateArgs) -> Result<Report, CliError> {
    args.budget.check()?;
    let m = inputs::machine(&args.machine)?;
    let (l, s) = (args.budget.max_len, args.budget.step_budget);
    let schedule = match args.schedule {
        Schedule::Fixed => BudgetSchedule::Fixed,
        Schedule::Levin => BudgetSchedule::Levin,
    };
    if schedule == BudgetSchedule::Levin && args.method != Method::Enumerate {
        return Err(CliError::input("--schedule levin requires --method enumerate"));
    }
    if args.method == Method::Enumerate && l > MAX_ENUMERATE_LENGTH {
        return Err(CliError::input(format!("--method enumerate supports --L up to {MAX_ENUMERATE_LENGTH}")));
    }
    let nodes: Vec<BitString> = match args.depth {
        Some(d) => {
            check_depth(d)?;
            BitString::all_up_to(d).collect()
        }
        None => args.x.clone(),
    };
    let mut prov = Provenance::new("estimate")
        .param("machine", &args.machine)
        .param("L", l)
        .param("S", s)
        .param("method", args.method)
        .param("schedule", args.schedule);
    prov = match args.depth {
        Some(d) => prov.param("depth", d),
        None => prov.param("x", &args.x),
    };
    let result = match (args.method, args.depth) {
        (Method::Tree, Some(d)) => {
            let table = explore(&m, d, l, s);
            let kraft_sums = (0..=d).map(|n| table.kraft_sum(n)).collect();
            EstimateResult { reports: table.reports, kraft_sums }
        }
        (Method::Tree, None) => {
            let reports = nodes.iter().map(|x| estimate_m(&m, x, l, s)).collect();
            EstimateResult { reports, kraft_sums: Vec::new() }
        }
        (Method::Enumerate, depth) => {
            let reports: Vec<EstimateReport> =
                nodes.iter().map(|x| estimate_m_enumerative(&m, x, l, s, schedule)).collect();
            let kraft_sums = match depth {
                Some(d) => (0..=d)
                    .map(|n| reports.iter().filter(|r| r.x.len() == n).map(|r| r.m_lower.clone()).sum())
                    .collect(),
                None => Vec::new(),
            };
            EstimateResult { reports, kraft_sums }
        }
    };
    Ok(Report::new(prov, result))
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub machine: String,
    #[arg(long)]
    pub depth: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Also report next-bit probabilities after these bits.
    #[arg(long, value_parser = inputs::bits)]
    pub predict: Option<BitString>,
}

#[derive(Serialize)]
struct NodeEntry {
    x: BitString,
    #[serde(flatten)]
    value: NodeValue,
}

pub fn normalize_cmd(args: &NormalizeArgs) -> Result<Report, CliError> {
    args.budget.check()?;
    check_depth(args.depth)?;
    let m = inputs::machine(&args.machine)?;
    let prov = Provenance::new("normalize")
        .param("machine", &args.machine)
        .param("depth", args.depth)
        .param("L", args.budget.max_len)
        .param("S", args.budget.step_budget)
        .param("predict", &args.predict);
    let nm = normalize(&m, args.depth, args.budget.max_len, args.budget.step_budget);
    let prediction = match &args.predict {
        Some(x) if x.len() >= args.depth => {
            return Err(CliError::input(format!("--predict needs a string shorter than --depth {}", args.depth)))
        }
        Some(x) => Some(predict_next(&nm, x)?),
        None => None,
    };
    let nodes: Vec<NodeEntry> = BitString::all_up_to(args.depth)
        .map(|x| NodeEntry { value: nm.value(&x).expect("within depth").clone(), x })
        .collect();
    let result = serde_json::json!({
        "nodes": nodes,
        "zero_denominator_nodes": nm.zero_denominator_nodes,
        "prediction": prediction,
    });
    Ok(Report::new(prov, result))
}

#[derive(Args, Debug)]
pub struct TransportArgs {
    #[arg(long)]
    pub machine: String,
    /// Builtin flip map: identity, inversion, parity or last_bit.
    #[arg(long, default_value = "inversion")]
    pub map: String,
    #[arg(long)]
    pub depth: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Serialize)]
struct TransportRow {
    x: BitString,
    phi_x: BitString,
    #[serde(with = "rational::serde_str")]
    m_transported: aitlab_core::Rational,
    #[serde(with = "rational::serde_str")]
    m_original: aitlab_core::Rational,
    equal: bool,
}

pub fn transport_cmd(args: &TransportArgs) -> Result<Report, CliError> {
    args.budget.check()?;
    check_depth(args.depth)?;
    let m = inputs::machine(&args.machine)?;
    let map = EncodingMap::builtin(&args.map).ok_or_else(|| CliError::input(format!("unknown map {:?}", args.map)))?;
    let prov = Provenance::new("transport")
        .param("machine", &args.machine)
        .param("map", &args.map)
        .param("depth", args.depth)
        .param("L", args.budget.max_len)
        .param("S", args.budget.step_budget);
    let v = transport_machine(&m, &map)?;
    let (l, s) = (args.budget.max_len, args.budget.step_budget);
    let (tu, tv) = (explore(&m, args.depth, l, s), explore(&v, args.depth, l, s));
    let rows = BitString::all_up_to(args.depth)
        .map(|x| {
            let phi_x = map.apply(&x)?;
            let m_transported = tv.m_lower(&x).expect("within depth").clone();
            let m_original = tu.m_lower(&phi_x).expect("same length").clone();
            Ok(TransportRow { equal: m_transported == m_original, x, phi_x, m_transported, m_original })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let invariant_holds = rows.iter().all(|r| r.equal);
    let result = serde_json::json!({
        "transported_states": v.state_count(),
        "rows": rows,
        "invariant_holds": invariant_holds,
    });
    Ok(Report::new(prov, result))
}

#[derive(Args, Debug)]
pub struct ShowMachineArgs {
    #[arg(long)]
    pub machine: String,
}

pub fn show_machine_cmd(args: &ShowMachineArgs) -> Result<Report, CliError> {
    let m = inputs::machine(&args.machine)?;
    let prov = Provenance::new("show-machine").param("machine", &args.machine);
    let mut text = m.to_json();
    text.push('\n');
    Ok(Report::new(prov, MachineFile::from_spec(&m)).with_text(text).default_format(Format::Text))
}

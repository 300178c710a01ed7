//! `persist` and `sustain`.

use std::path::PathBuf;

use aitlab_core::algprob::{explore, normalize};
use aitlab_core::induction::{
    bound_check, check_sustainable, persistence_curve_capped, ComputableTest, Predictor, DEFAULT_FRONTIER_CAP,
};
use aitlab_core::{BitString, Rational};
use clap::{ArgGroup, Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::inputs;
use crate::machines::MAX_DEPTH;
use crate::output::{Format, Provenance, Report};

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("test_source").required(true).args(["test", "test_machine"])))]
pub struct TestArgs {
    /// Test expression: last_bit, all, only_empty, ones_fraction(θ,n) or
    /// goodman(inner,N).
    #[arg(long)]
    pub test: Option<String>,
    /// Use the first bit a machine emits on x as the test value instead.
    #[arg(long)]
    pub test_machine: Option<String>,
    /// Step bound for `--test-machine`.
    #[arg(long, default_value_t = 10_000)]
    pub test_steps: usize,
}

impl TestArgs {
    fn build(&self) -> Result<ComputableTest, CliError> {
        match (&self.test, &self.test_machine) {
            (Some(expr), _) => Ok(ComputableTest::parse(expr)?),
            (None, Some(src)) => Ok(ComputableTest::machine(inputs::machine(src)?, self.test_steps)),
            (None, None) => unreachable!("clap requires one test source"),
        }
    }

    fn provenance(&self, prov: Provenance) -> Provenance {
        match &self.test {
            Some(t) => prov.param("test", t),
            None => prov.param("test_machine", &self.test_machine).param("test_steps", self.test_steps),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MachinePredictor {
    /// The Solomonoff-normalized measure.
    Normalized,
    /// The raw brackets `[M_lower, M_upper]`.
    Estimate,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("predictor_source").required(true).args(["family", "machine"])))]
#[command(group(ArgGroup::new("weight_source").args(["weight", "weight_member"])))]
pub struct PersistArgs {
    /// Mixture family file; the predictor is the mixture given `--z`.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Evidence the mixture is conditioned on first.
    #[arg(long, value_parser = inputs::bits, default_value = "", requires = "family")]
    pub z: BitString,
    /// Machine whose estimates serve as the predictor.
    #[arg(long)]
    pub machine: Option<String>,
    #[arg(long, value_enum, default_value = "normalized", requires = "machine")]
    pub predictor: MachinePredictor,
    /// Longest program length for the machine predictor.
    #[arg(long = "L", requires = "machine")]
    pub max_len: Option<usize>,
    /// Per-program step budget for the machine predictor.
    #[arg(long = "S", requires = "machine")]
    pub step_budget: Option<usize>,
    #[command(flatten)]
    pub test: TestArgs,
    /// Number of curve points `p(1 | 1^j)`, `j < n`.
    #[arg(long)]
    pub n: usize,
    /// Weight `c` of a sustaining explanation; adds the bound check.
    #[arg(long, value_parser = inputs::rational)]
    pub weight: Option<Rational>,
    /// Take the weight from this family member's posterior.
    #[arg(long, requires = "family")]
    pub weight_member: Option<usize>,
    /// Abort when more strings than this still pass the test.
    #[arg(long, default_value_t = DEFAULT_FRONTIER_CAP)]
    pub frontier_cap: usize,
}

pub fn persist_cmd(args: &PersistArgs) -> Result<Report, CliError> {
    let test = args.test.build()?;
    let mut prov = Provenance::new("persist");
    prov = args.test.provenance(prov).param("n", args.n).param("frontier_cap", args.frontier_cap);
    let (predictor, weight): (Box<dyn Predictor>, Option<Rational>) = match (&args.family, &args.machine) {
        (Some(path), _) => {
            prov = prov.param("family", path).param("z", &args.z);
            let mix = inputs::family(path)?.posterior(&args.z)?;
            let weight = match args.weight_member {
                Some(id) => {
                    prov = prov.param("weight_member", id);
                    Some(mix.posterior_of(id)?)
                }
                None => args.weight.clone(),
            };
            (Box::new(mix), weight)
        }
        (None, Some(src)) => {
            let (l, s) = match (args.max_len, args.step_budget) {
                (Some(l), Some(s)) => (l, s),
                _ => return Err(CliError::input("a machine predictor needs --L and --S")),
            };
            if args.n > MAX_DEPTH {
                return Err(CliError::input(format!("machine predictors support --n up to {MAX_DEPTH}")));
            }
            let m = inputs::machine(src)?;
            prov = prov.param("machine", src).param("predictor", args.predictor).param("L", l).param("S", s);
            let p: Box<dyn Predictor> = match args.predictor {
                MachinePredictor::Normalized => Box::new(normalize(&m, args.n, l, s)),
                MachinePredictor::Estimate => Box::new(explore(&m, args.n, l, s)),
            };
            (p, args.weight.clone())
        }
        (None, None) => unreachable!("clap requires one predictor"),
    };
    if let Some(w) = &weight {
        prov = prov.param("weight", aitlab_core::rational::format(w));
    }
    let curve = persistence_curve_capped(predictor.as_ref(), &test, args.n, args.frontier_cap)?;
    let check = weight.as_ref().map(|w| bound_check(&curve, w)).transpose()?;
    let mut csv = String::new();
    if let Some(c) = &check {
        csv.push_str(&format!(
            "# bound: max cum_exception {:.12} vs log2(1/c) {:.12}: {}\n",
            aitlab_core::rational::to_f64(&c.max_cum_exception),
            c.log2_inverse_f64,
            if c.cumulative_holds { "holds" } else { "violated" }
        ));
    }
    csv.push_str(&curve.to_csv());
    let result = serde_json::json!({ "curve": curve, "bound_check": check });
    Ok(Report::new(prov, result).with_csv(csv).default_format(Format::Csv))
}

#[derive(Args, Debug)]
pub struct SustainArgs {
    #[command(flatten)]
    pub test: TestArgs,
    /// Check all strings up to this length.
    #[arg(long)]
    pub depth: usize,
}

pub fn sustain_cmd(args: &SustainArgs) -> Result<Report, CliError> {
    if args.depth > 24 {
        return Err(CliError::input("--depth is limited to 24"));
    }
    let test = args.test.build()?;
    let prov = args.test.provenance(Provenance::new("sustain")).param("depth", args.depth);
    Ok(Report::new(prov, check_sustainable(&test, args.depth)?))
}

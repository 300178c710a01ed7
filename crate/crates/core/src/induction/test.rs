//! Computable tests: total bit-valued predicates on strings.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::InductionError;
use crate::bits::BitString;
use crate::mtm::{run, MachineSpec};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum TestRule {
    /// For `ℓ(x) >= min_len`: `#1(x)/ℓ(x) >= theta`. Shorter strings pass iff
    /// some extension to length `min_len` passes, i.e. iff
    /// `#1(x) + (min_len − ℓ(x)) >= theta · min_len`.
    OnesFraction { theta: Rational, min_len: usize },
    /// The last bit is 1; the empty string passes.
    LastBit,
    /// `inner(x)` while `ℓ(x) <= threshold`, then its negation.
    Goodman { inner: Box<TestRule>, threshold: usize },
    /// Always 1.
    All,
    /// 1 only on the empty string.
    OnlyEmpty,
    /// The first bit `machine` emits on input `x` within `step_bound` steps.
    Machine { machine: Box<MachineSpec>, step_bound: usize },
}

/// Rule for picking a continuation bit that keeps the test at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Always append this bit.
    Constant(bool),
    /// Append `before` while the extended string has length `<= at`, then
    /// `after`.
    Switch { before: bool, after: bool, at: usize },
}

impl Witness {
    pub fn bit(&self, x: &BitString) -> bool {
        match *self {
            Witness::Constant(b) => b,
            Witness::Switch { before, after, at } => {
                if x.len() < at {
                    before
                } else {
                    after
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputableTest {
    pub rule: TestRule,
    pub witness: Option<Witness>,
}

impl ComputableTest {
    pub fn new(rule: TestRule, witness: Option<Witness>) -> Self {
        ComputableTest { rule, witness }
    }

    pub fn ones_fraction(theta: Rational, min_len: usize) -> Self {
        Self::new(TestRule::OnesFraction { theta, min_len }, Some(Witness::Constant(true)))
    }

    /// The 90%-ones test on strings of length at least 10.
    pub fn ninety_percent_ones() -> Self {
        Self::ones_fraction(rational::ratio(9, 10), 10)
    }

    pub fn last_bit() -> Self {
        Self::new(TestRule::LastBit, Some(Witness::Constant(true)))
    }

    pub fn goodman(inner: ComputableTest, threshold: usize) -> Self {
        let witness = match inner.rule {
            TestRule::LastBit => Some(Witness::Switch { before: true, after: false, at: threshold }),
            _ => None,
        };
        Self::new(TestRule::Goodman { inner: Box::new(inner.rule), threshold }, witness)
    }

    pub fn all() -> Self {
        Self::new(TestRule::All, Some(Witness::Constant(true)))
    }

    pub fn only_empty() -> Self {
        Self::new(TestRule::OnlyEmpty, None)
    }

    pub fn machine(machine: MachineSpec, step_bound: usize) -> Self {
        Self::new(TestRule::Machine { machine: Box::new(machine), step_bound }, None)
    }

    /// Parses `last_bit`, `all`, `only_empty`, `ones_fraction(θ,min_len)` and
    /// `goodman(inner,N)`.
    pub fn parse(s: &str) -> Result<Self, InductionError> {
        let rule = parse_rule(s.trim())?;
        Ok(match rule {
            TestRule::OnesFraction { theta, min_len } => Self::ones_fraction(theta, min_len),
            TestRule::LastBit => Self::last_bit(),
            TestRule::All => Self::all(),
            TestRule::OnlyEmpty => Self::only_empty(),
            TestRule::Goodman { inner, threshold } => Self::goodman(ComputableTest::new(*inner, None), threshold),
            TestRule::Machine { .. } => unreachable!("machine tests are not parsed from text"),
        })
    }

    pub fn evaluate(&self, x: &BitString) -> Result<bool, InductionError> {
        eval(&self.rule, x)
    }

    pub fn describe(&self) -> String {
        self.rule.to_string()
    }
}

fn parse_rule(s: &str) -> Result<TestRule, InductionError> {
    let err = || InductionError::TestSyntax(s.to_string());
    match s {
        "last_bit" => return Ok(TestRule::LastBit),
        "all" => return Ok(TestRule::All),
        "only_empty" => return Ok(TestRule::OnlyEmpty),
        _ => {}
    }
    let (name, rest) = s.split_once('(').ok_or_else(err)?;
    let args = rest.strip_suffix(')').ok_or_else(err)?;
    // split on the last top-level comma so nested inner tests may contain commas
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in args.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    let i = split.ok_or_else(err)?;
    let (a, b) = (args[..i].trim(), args[i + 1..].trim());
    let count = b.parse::<usize>().map_err(|_| err())?;
    match name.trim() {
        "ones_fraction" => {
            let theta = rational::parse(a).map_err(|_| err())?;
            if theta < Rational::zero() || theta > rational::int(1) {
                return Err(err());
            }
            Ok(TestRule::OnesFraction { theta, min_len: count })
        }
        "goodman" => Ok(TestRule::Goodman { inner: Box::new(parse_rule(a)?), threshold: count }),
        _ => Err(err()),
    }
}

fn eval(rule: &TestRule, x: &BitString) -> Result<bool, InductionError> {
    Ok(match rule {
        TestRule::OnesFraction { theta, min_len } => {
            let ones = rational::int(x.ones() as i64);
            if x.len() >= *min_len {
                ones >= theta * rational::int(x.len() as i64)
            } else {
                ones + rational::int((min_len - x.len()) as i64) >= theta * rational::int(*min_len as i64)
            }
        }
        TestRule::LastBit => x.last().unwrap_or(true),
        TestRule::Goodman { inner, threshold } => {
            let v = eval(inner, x)?;
            if x.len() <= *threshold {
                v
            } else {
                !v
            }
        }
        TestRule::All => true,
        TestRule::OnlyEmpty => x.is_empty(),
        TestRule::Machine { machine, step_bound } => {
            let out = run(machine, x, *step_bound);
            out.output.get(0).ok_or_else(|| InductionError::Evaluation { x: x.clone(), step_bound: *step_bound })?
        }
    })
}

impl fmt::Display for TestRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestRule::OnesFraction { theta, min_len } => {
                write!(f, "ones_fraction({},{min_len})", rational::format(theta))
            }
            TestRule::LastBit => f.write_str("last_bit"),
            TestRule::Goodman { inner, threshold } => write!(f, "goodman({inner},{threshold})"),
            TestRule::All => f.write_str("all"),
            TestRule::OnlyEmpty => f.write_str("only_empty"),
            TestRule::Machine { step_bound, .. } => write!(f, "machine(step_bound={step_bound})"),
        }
    }
}

pub fn evaluate_test(test: &ComputableTest, x: &BitString) -> Result<bool, InductionError> {
    test.evaluate(x)
}

/// How many counterexamples a report lists before only counting.
const LISTED_COUNTEREXAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SustainabilityReport {
    pub test: String,
    pub depth: usize,
    pub root_passes: bool,
    pub sustainable_to_depth: bool,
    /// Strings `x` with `f(x) = 1` and `f(x0) = f(x1) = 0` (plus `ε` if
    /// `f(ε) = 0`), in length-lex order; the list is truncated, the count
    /// is not.
    pub counterexamples: Vec<BitString>,
    pub counterexample_count: usize,
    /// Strings where the supplied witness bit fails (even if the other bit
    /// works).
    pub witness_failures: Vec<BitString>,
    pub witness_failure_count: usize,
    pub nodes_checked: usize,
}

/// Exhaustively checks `f(ε) = 1` and the extension property for every `x`
/// with `ℓ(x) <= depth`.
pub fn check_sustainable(test: &ComputableTest, depth: usize) -> Result<SustainabilityReport, InductionError> {
    let mut report = SustainabilityReport {
        test: test.describe(),
        depth,
        root_passes: test.evaluate(&BitString::empty())?,
        sustainable_to_depth: false,
        counterexamples: Vec::new(),
        counterexample_count: 0,
        witness_failures: Vec::new(),
        witness_failure_count: 0,
        nodes_checked: 0,
    };
    if !report.root_passes {
        report.counterexamples.push(BitString::empty());
        report.counterexample_count += 1;
    }
    for x in BitString::all_up_to(depth) {
        report.nodes_checked += 1;
        if !test.evaluate(&x)? {
            continue;
        }
        let f0 = test.evaluate(&x.child(false))?;
        let f1 = test.evaluate(&x.child(true))?;
        if !f0 && !f1 {
            report.counterexample_count += 1;
            if report.counterexamples.len() < LISTED_COUNTEREXAMPLES {
                report.counterexamples.push(x.clone());
            }
        }
        if let Some(w) = &test.witness {
            let ok = if w.bit(&x) { f1 } else { f0 };
            if !ok {
                report.witness_failure_count += 1;
                if report.witness_failures.len() < LISTED_COUNTEREXAMPLES {
                    report.witness_failures.push(x);
                }
            }
        }
    }
    report.sustainable_to_depth = report.root_passes && report.counterexample_count == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;

    #[test]
    fn ninety_percent_examples() {
        let f = ComputableTest::ninety_percent_ones();
        assert!(f.evaluate(&bits("1101111111")).unwrap());
        assert!(f.evaluate(&bits("110")).unwrap());
        assert!(f.evaluate(&BitString::empty()).unwrap());
        assert!(!f.evaluate(&bits("1101111110")).unwrap());
        assert!(!f.evaluate(&bits("00")).unwrap());
        assert!(f.evaluate(&bits("11111111101")).unwrap());
    }

    /// The short-string rule, checked against its definition: some extension
    /// to length 10 passes.
    #[test]
    fn short_strings_follow_extension_rule() {
        let f = ComputableTest::ninety_percent_ones();
        for x in BitString::all_up_to(9) {
            let by_extension = BitString::all_of_length(10 - x.len()).any(|y| f.evaluate(&x.concat(&y)).unwrap());
            assert_eq!(f.evaluate(&x).unwrap(), by_extension, "{x:?}");
        }
    }

    #[test]
    fn sustainability() {
        let r = check_sustainable(&ComputableTest::ninety_percent_ones(), 12).unwrap();
        assert!(r.sustainable_to_depth);
        assert_eq!(r.witness_failure_count, 0);

        let r = check_sustainable(&ComputableTest::only_empty(), 5).unwrap();
        assert!(!r.sustainable_to_depth);
        assert_eq!(r.counterexamples, vec![BitString::empty()]);

        let g = ComputableTest::goodman(ComputableTest::last_bit(), 6);
        let r = check_sustainable(&g, 12).unwrap();
        assert!(r.sustainable_to_depth);
        assert_eq!(r.witness_failure_count, 0);
    }

    #[test]
    fn goodman_flips_after_threshold() {
        let g = ComputableTest::goodman(ComputableTest::last_bit(), 3);
        assert!(g.evaluate(&bits("111")).unwrap());
        assert!(!g.evaluate(&bits("1111")).unwrap());
        assert!(g.evaluate(&bits("1110")).unwrap());
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "last_bit",
            "all",
            "only_empty",
            "ones_fraction(9/10,10)",
            "goodman(last_bit,6)",
            "goodman(ones_fraction(1/2,4),3)",
        ] {
            assert_eq!(ComputableTest::parse(s).unwrap().describe(), s);
        }
        assert!(ComputableTest::parse("ones_fraction(2,3)").is_err());
        assert!(ComputableTest::parse("bogus").is_err());
    }

    #[test]
    fn machine_tests_must_answer_in_time() {
        let t = ComputableTest::machine(library::constant_one(), 3);
        assert!(t.evaluate(&bits("0")).unwrap());
        let t = ComputableTest::machine(library::silent_loop(), 3);
        assert!(matches!(t.evaluate(&bits("0")), Err(InductionError::Evaluation { .. })));
        assert!(check_sustainable(&t, 2).is_err());
    }
}

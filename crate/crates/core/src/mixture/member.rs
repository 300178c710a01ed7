//! Exactly computable (semi)measures that can join a mixture.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MixtureError;
use crate::bits::BitString;
use crate::mtm::{run, MachineFile, MachineSpec, RunStatus};
use crate::rational::{self, Rational};

/// One position of a [`MemberKind::Pattern`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    /// A fair coin flip.
    Coin,
}

impl Symbol {
    fn parse(c: char) -> Option<Symbol> {
        match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            '?' => Some(Symbol::Coin),
            _ => None,
        }
    }

    fn prob_one(self) -> Rational {
        match self {
            Symbol::Zero => Rational::zero(),
            Symbol::One => Rational::one(),
            Symbol::Coin => rational::ratio(1, 2),
        }
    }
}

/// Parses a pattern over `0`, `1`, `?`.
pub fn parse_pattern(s: &str) -> Result<Vec<Symbol>, MixtureError> {
    s.chars()
        .map(|c| Symbol::parse(c).ok_or_else(|| MixtureError::InvalidMember(format!("bad pattern symbol {c:?}"))))
        .collect()
}

fn pattern_string(p: &[Symbol]) -> String {
    p.iter()
        .map(|s| match s {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Coin => '?',
        })
        .collect()
}

/// The measure part of a member: a rule for `P(next bit = 1 | x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum MemberKind {
    /// i.i.d. bits with `P(1) = q`.
    Bernoulli { q: Rational },
    /// `prefix` followed by `cycle` repeated forever; `?` positions are fair
    /// coin flips, all others are deterministic.
    Pattern { prefix: Vec<Symbol>, cycle: Vec<Symbol> },
    /// Order-`order` Markov chain; `rows[h]` is `P(1 | last order bits = h)`
    /// with the most recent bit least significant. Histories shorter than
    /// `order` are padded with leading zeros.
    Markov { order: usize, rows: Vec<Rational> },
    /// The deterministic sequence a machine prints on empty input. If the
    /// machine halts, the sequence ends there (the member terminates with
    /// certainty at its final node).
    Machine { machine: Box<MachineSpec>, step_budget: usize, output: BitString, halted: bool },
}

impl MemberKind {
    pub fn bernoulli(q: Rational) -> Self {
        MemberKind::Bernoulli { q }
    }

    /// The deterministic all-ones sequence.
    pub fn all_ones() -> Self {
        MemberKind::Pattern { prefix: vec![], cycle: vec![Symbol::One] }
    }

    pub fn pattern(prefix: &str, cycle: &str) -> Result<Self, MixtureError> {
        Ok(MemberKind::Pattern { prefix: parse_pattern(prefix)?, cycle: parse_pattern(cycle)? })
    }

    pub fn markov(order: usize, rows: Vec<Rational>) -> Self {
        MemberKind::Markov { order, rows }
    }

    /// Runs `machine` once on empty input; queries beyond the produced
    /// output fail unless the machine halted.
    pub fn machine(machine: MachineSpec, step_budget: usize) -> Self {
        let out = run(&machine, &BitString::empty(), step_budget);
        MemberKind::Machine {
            halted: out.status == RunStatus::Halted,
            output: out.output,
            machine: Box::new(machine),
            step_budget,
        }
    }

    fn validate(&self) -> Result<(), MixtureError> {
        let unit = |r: &Rational| !(r < &Rational::zero() || r > &Rational::one());
        match self {
            MemberKind::Bernoulli { q } if !unit(q) => {
                Err(MixtureError::InvalidMember(format!("Bernoulli parameter {} outside [0,1]", rational::format(q))))
            }
            MemberKind::Pattern { cycle, .. } if cycle.is_empty() => {
                Err(MixtureError::InvalidMember("pattern cycle must be non-empty".into()))
            }
            MemberKind::Markov { order, rows } => {
                if *order > 16 {
                    return Err(MixtureError::InvalidMember(format!("Markov order {order} too large")));
                }
                if rows.len() != 1 << order {
                    return Err(MixtureError::InvalidMember(format!(
                        "Markov order {order} needs {} rows, got {}",
                        1usize << order,
                        rows.len()
                    )));
                }
                if let Some(r) = rows.iter().find(|r| !unit(r)) {
                    return Err(MixtureError::InvalidMember(format!(
                        "Markov row {} outside [0,1]",
                        rational::format(r)
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `P(next = 1 | x)` for the measure part, or `None` at the end of a
    /// halted machine's output.
    fn prob_one(&self, x: &BitString) -> Result<Option<Rational>, MixtureError> {
        Ok(Some(match self {
            MemberKind::Bernoulli { q } => q.clone(),
            MemberKind::Pattern { prefix, cycle } => {
                let i = x.len();
                let s = if i < prefix.len() { prefix[i] } else { cycle[(i - prefix.len()) % cycle.len()] };
                s.prob_one()
            }
            MemberKind::Markov { order, rows } => {
                let b = x.bits();
                let h = (0..*order).fold(0usize, |acc, back| {
                    let bit = b.len() > back && b[b.len() - 1 - back];
                    acc | (bit as usize) << back
                });
                rows[h].clone()
            }
            MemberKind::Machine { output, halted, step_budget, .. } => match output.get(x.len()) {
                Some(true) => Rational::one(),
                Some(false) => Rational::zero(),
                None if *halted => return Ok(None),
                None => return Err(MixtureError::MachineExhausted { length: x.len(), step_budget: *step_budget }),
            },
        }))
    }

    pub fn describe(&self) -> String {
        match self {
            MemberKind::Bernoulli { q } => format!("bernoulli({})", rational::format(q)),
            MemberKind::Pattern { prefix, cycle } => {
                format!("pattern({}|{})", pattern_string(prefix), pattern_string(cycle))
            }
            MemberKind::Markov { order, rows } => {
                format!("markov({order};{})", rows.iter().map(rational::format).collect::<Vec<_>>().join(","))
            }
            MemberKind::Machine { step_budget, .. } => format!("machine(budget {step_budget})"),
        }
    }

    /// Whether the measure part is deterministic everywhere.
    pub fn is_deterministic(&self) -> bool {
        match self {
            MemberKind::Bernoulli { q } => q.is_zero() || q.is_one(),
            MemberKind::Pattern { prefix, cycle } => prefix.iter().chain(cycle).all(|s| *s != Symbol::Coin),
            MemberKind::Markov { rows, .. } => rows.iter().all(|q| q.is_zero() || q.is_one()),
            MemberKind::Machine { .. } => true,
        }
    }
}

/// Per-node termination probability `t(x)`: the chance that the sequence
/// stops right after `x`. Lookup order is exact node, then length, then the
/// default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Termination {
    pub default: Rational,
    pub lengths: BTreeMap<usize, Rational>,
    pub nodes: BTreeMap<BitString, Rational>,
}

impl Termination {
    pub fn at(&self, x: &BitString) -> &Rational {
        self.nodes.get(x).or_else(|| self.lengths.get(&x.len())).unwrap_or(&self.default)
    }

    fn validate(&self) -> Result<(), MixtureError> {
        let bad = std::iter::once(&self.default)
            .chain(self.lengths.values())
            .chain(self.nodes.values())
            .find(|t| *t < &Rational::zero() || *t > &Rational::one());
        match bad {
            Some(t) => Err(MixtureError::InvalidMember(format!(
                "termination probability {} outside [0,1]",
                rational::format(t)
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub id: usize,
    pub name: String,
    /// Declared description length; the prior weight is `2^{-c}`.
    pub c: u32,
    pub kind: MemberKind,
    pub termination: Option<Termination>,
}

impl FamilyMember {
    pub fn new(id: usize, name: impl Into<String>, c: u32, kind: MemberKind) -> Self {
        FamilyMember { id, name: name.into(), c, kind, termination: None }
    }

    pub fn with_termination(mut self, t: Termination) -> Self {
        self.termination = Some(t);
        self
    }

    pub fn validate(&self) -> Result<(), MixtureError> {
        self.kind.validate()?;
        if let Some(t) = &self.termination {
            t.validate()?;
        }
        Ok(())
    }

    pub fn prior_weight(&self) -> Rational {
        rational::dyadic(self.c as usize)
    }

    pub fn is_measure(&self) -> bool {
        let halting_machine = matches!(self.kind, MemberKind::Machine { halted: true, .. });
        !halting_machine
            && self.termination.as_ref().is_none_or(|t| {
                t.default.is_zero() && t.lengths.values().all(Zero::is_zero) && t.nodes.values().all(Zero::is_zero)
            })
    }

    /// `t(x)`: probability of stopping right after `x`, given `x`.
    pub fn termination_at(&self, x: &BitString) -> Result<Rational, MixtureError> {
        if self.kind.prob_one(x)?.is_none() {
            return Ok(Rational::one());
        }
        Ok(self.termination.as_ref().map(|t| t.at(x).clone()).unwrap_or_else(Rational::zero))
    }

    /// `m(a | x)` for a single bit, including termination.
    pub fn next_bit(&self, x: &BitString, a: bool) -> Result<Rational, MixtureError> {
        let Some(p1) = self.kind.prob_one(x)? else {
            return Ok(Rational::zero());
        };
        let cont = Rational::one() - self.termination.as_ref().map(|t| t.at(x).clone()).unwrap_or_else(Rational::zero);
        let pa = if a { p1 } else { Rational::one() - p1 };
        Ok(cont * pa)
    }

    /// `m(x)`.
    pub fn prob(&self, x: &BitString) -> Result<Rational, MixtureError> {
        self.prob_from(&BitString::empty(), &Rational::one(), x)
    }

    /// `m(zy)` given `m(z) = mz`.
    pub fn prob_from(&self, z: &BitString, mz: &Rational, y: &BitString) -> Result<Rational, MixtureError> {
        let mut node = z.clone();
        let mut m = mz.clone();
        for &b in y.bits() {
            if m.is_zero() {
                return Ok(m);
            }
            m *= self.next_bit(&node, b)?;
            node.push(b);
        }
        Ok(m)
    }

    /// Samples up to `n` further bits after `z`; stops early if the member
    /// terminates.
    pub fn sample<R: Rng + ?Sized>(&self, z: &BitString, n: usize, rng: &mut R) -> Result<BitString, MixtureError> {
        let mut x = z.clone();
        for _ in 0..n {
            let t = self.termination_at(&x)?;
            if rational::sample_bernoulli(rng, &t) {
                break;
            }
            let p1 = self.kind.prob_one(&x)?.expect("non-terminated node has a next-bit rule");
            let b = rational::sample_bernoulli(rng, &p1);
            x.push(b);
        }
        Ok(BitString::from(&x.bits()[z.len()..]))
    }
}

// ---------------------------------------------------------------------------
// JSON family files
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminationSpec {
    #[serde(with = "rational::serde_opt_str", default)]
    pub default: Option<Rational>,
    #[serde(default)]
    pub lengths: BTreeMap<String, String>,
    #[serde(default)]
    pub nodes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MemberSpec {
    Bernoulli {
        #[serde(default)]
        id: Option<usize>,
        #[serde(default)]
        name: Option<String>,
        c: u32,
        #[serde(with = "rational::serde_str")]
        q: Rational,
        #[serde(default)]
        termination: Option<TerminationSpec>,
    },
    Pattern {
        #[serde(default)]
        id: Option<usize>,
        #[serde(default)]
        name: Option<String>,
        c: u32,
        #[serde(default)]
        prefix: String,
        cycle: String,
        #[serde(default)]
        termination: Option<TerminationSpec>,
    },
    Markov {
        #[serde(default)]
        id: Option<usize>,
        #[serde(default)]
        name: Option<String>,
        c: u32,
        order: usize,
        #[serde(with = "rational::serde_vec_str")]
        rows: Vec<Rational>,
        #[serde(default)]
        termination: Option<TerminationSpec>,
    },
    Machine {
        #[serde(default)]
        id: Option<usize>,
        #[serde(default)]
        name: Option<String>,
        c: u32,
        machine: MachineFile,
        step_budget: usize,
        #[serde(default)]
        termination: Option<TerminationSpec>,
    },
}

fn termination_from_spec(t: TerminationSpec) -> Result<Termination, MixtureError> {
    let parse = |s: &str| rational::parse(s).map_err(|e| MixtureError::InvalidMember(e.to_string()));
    let lengths = t
        .lengths
        .iter()
        .map(|(k, v)| {
            let len = k
                .parse::<usize>()
                .map_err(|_| MixtureError::InvalidMember(format!("termination length {k:?} is not a count")))?;
            Ok((len, parse(v)?))
        })
        .collect::<Result<_, MixtureError>>()?;
    let nodes = t
        .nodes
        .iter()
        .map(|(k, v)| {
            let node = k.parse::<BitString>().map_err(|e| MixtureError::InvalidMember(e.to_string()))?;
            Ok((node, parse(v)?))
        })
        .collect::<Result<_, MixtureError>>()?;
    Ok(Termination { default: t.default.unwrap_or_else(Rational::zero), lengths, nodes })
}

impl MemberSpec {
    pub fn into_member(self, position: usize) -> Result<FamilyMember, MixtureError> {
        let (id, name, c, kind, termination) = match self {
            MemberSpec::Bernoulli { id, name, c, q, termination } => {
                (id, name, c, MemberKind::bernoulli(q), termination)
            }
            MemberSpec::Pattern { id, name, c, prefix, cycle, termination } => {
                (id, name, c, MemberKind::pattern(&prefix, &cycle)?, termination)
            }
            MemberSpec::Markov { id, name, c, order, rows, termination } => {
                (id, name, c, MemberKind::markov(order, rows), termination)
            }
            MemberSpec::Machine { id, name, c, machine, step_budget, termination } => {
                let spec = machine.into_spec().map_err(|e| MixtureError::InvalidMember(e.to_string()))?;
                (id, name, c, MemberKind::machine(spec, step_budget), termination)
            }
        };
        let id = id.unwrap_or(position);
        let name = name.unwrap_or_else(|| kind.describe());
        let mut member = FamilyMember::new(id, name, c, kind);
        if let Some(t) = termination {
            member = member.with_termination(termination_from_spec(t)?);
        }
        member.validate()?;
        Ok(member)
    }
}

/// Parses a family file: a JSON list of members.
pub fn parse_family(text: &str) -> Result<Vec<FamilyMember>, MixtureError> {
    let specs: Vec<MemberSpec> = serde_json::from_str(text).map_err(|e| MixtureError::Json(e.to_string()))?;
    specs.into_iter().enumerate().map(|(i, s)| s.into_member(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;
    use crate::rational::{int, ratio};

    #[test]
    fn measures_are_consistent() {
        let members = vec![
            FamilyMember::new(0, "fair", 1, MemberKind::bernoulli(ratio(1, 2))),
            FamilyMember::new(1, "ones", 1, MemberKind::all_ones()),
            FamilyMember::new(2, "sticky", 1, MemberKind::markov(1, vec![ratio(1, 10), ratio(9, 10)])),
            FamilyMember::new(3, "pat", 1, MemberKind::pattern("1?", "01").unwrap()),
            FamilyMember::new(4, "alt", 1, MemberKind::machine(library::alternator(), 100)),
        ];
        for m in &members {
            assert_eq!(m.prob(&BitString::empty()).unwrap(), int(1));
            for x in BitString::all_up_to(6) {
                let sum = m.prob(&x.child(false)).unwrap() + m.prob(&x.child(true)).unwrap();
                assert_eq!(sum, m.prob(&x).unwrap(), "{} {x:?}", m.name);
            }
        }
        assert_eq!(members[2].prob(&bits("11")).unwrap(), ratio(9, 100));
        assert_eq!(members[3].prob(&bits("1001")).unwrap(), ratio(1, 2));
        assert_eq!(members[4].prob(&bits("0101")).unwrap(), int(1));
    }

    #[test]
    fn semimeasure_deficit_is_termination_mass() {
        let t = Termination { default: ratio(1, 10), ..Default::default() };
        let m = FamilyMember::new(0, "leaky", 1, MemberKind::bernoulli(ratio(1, 3))).with_termination(t);
        assert!(!m.is_measure());
        for x in BitString::all_up_to(5) {
            let mx = m.prob(&x).unwrap();
            let children = m.prob(&x.child(false)).unwrap() + m.prob(&x.child(true)).unwrap();
            assert_eq!(&mx - children, mx * m.termination_at(&x).unwrap());
        }
    }

    #[test]
    fn halting_machine_terminates() {
        let m = FamilyMember::new(0, "halts", 1, MemberKind::machine(library::and_halt(), 100));
        // and_halt needs input, so on empty input it produces nothing
        assert_eq!(m.prob(&BitString::empty()).unwrap(), int(1));
        assert!(matches!(m.prob(&bits("0")), Err(MixtureError::MachineExhausted { .. })));
    }

    #[test]
    fn family_file() {
        let text = r#"[
            {"kind": "bernoulli", "q": "1/2", "c": 2},
            {"kind": "pattern", "cycle": "1", "c": 2, "name": "all-ones"},
            {"kind": "markov", "order": 1, "rows": ["1/10", "9/10"], "c": 3,
             "termination": {"lengths": {"3": "99/100"}}}
        ]"#;
        let fam = parse_family(text).unwrap();
        assert_eq!(fam.len(), 3);
        assert_eq!(fam[1].name, "all-ones");
        assert_eq!(fam[0].name, "bernoulli(1/2)");
        assert_eq!(fam[2].termination_at(&bits("101")).unwrap(), ratio(99, 100));
        assert!(parse_family(r#"[{"kind": "bernoulli", "q": "3/2", "c": 1}]"#).is_err());
        assert!(parse_family(r#"[{"kind": "bernoulli", "q": "1/2", "c": 1, "x": 0}]"#).is_err());
    }
}

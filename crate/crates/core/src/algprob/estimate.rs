//! Budget-bounded lower bounds on `M_T(x)` and upper bounds on `Km_T(x)`.
//!
//! Two routes compute the same numbers:
//!
//! * [`estimate_m_enumerative`] literally enumerates every program of length
//!   at most `L` and asks [`outputs_prefix`] about each one;
//! * [`explore`] walks the tree of programs once, forking the paused machine
//!   whenever it asks for another input bit, and produces reports for every
//!   `x` up to a depth at once. [`estimate_m`] uses this route.
//!
//! Both count only programs that qualify within the per-program step budget
//! `S`. The set of qualifying programs for a fixed `x` is automatically
//! prefix-free (a qualifying program's extensions consume too much before `x`
//! is complete), so the sum is a Kraft sum and never exceeds one.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::mtm::{outputs_prefix, Execution, MachineSpec, Verdict};
use crate::rational::{self, Rational};

/// Programs longer than this are never enumerated (the counts would not fit
/// the 128-bit accumulators, and the run time would be astronomical anyway).
pub const MAX_PROGRAM_LENGTH: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub x: BitString,
    pub max_program_length: usize,
    pub step_budget: usize,
    /// `Σ 2^{-ℓ(p)}` over the qualifying programs found.
    #[serde(with = "rational::serde_str")]
    pub m_lower: Rational,
    /// Length of the shortest qualifying program found.
    pub km_upper: Option<usize>,
    /// Qualifying programs in length-then-lexicographic order.
    pub qualifying_programs: Vec<BitString>,
    /// Programs of length `<= L` whose verdict was still open when the step
    /// budget ran out.
    pub inconclusive_count: u128,
    /// A certified upper bound on the true `M_T(x)`: `m_lower` plus the mass
    /// of every program subtree that was cut off by the budgets while still
    /// consistent with `x`. Only the tree route computes it.
    #[serde(with = "rational::serde_opt_str", default)]
    pub m_upper: Option<Rational>,
}

impl EstimateReport {
    /// Width of the certified bracket `[m_lower, m_upper]`.
    pub fn bracket_width(&self) -> Option<Rational> {
        self.m_upper.as_ref().map(|u| u - &self.m_lower)
    }
}

/// How the per-program step budget depends on the program.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSchedule {
    /// Every program gets `S` steps.
    #[default]
    Fixed,
    /// A program of length `ℓ` gets `S · 2^{L-ℓ}` steps, so shorter programs
    /// are allowed proportionally longer runs.
    Levin,
}

impl BudgetSchedule {
    pub fn budget(self, program_len: usize, max_len: usize, step_budget: usize) -> usize {
        match self {
            BudgetSchedule::Fixed => step_budget,
            BudgetSchedule::Levin => {
                let shift = (max_len - program_len).min(40) as u32;
                step_budget.saturating_mul(1usize << shift)
            }
        }
    }
}

fn check_length(l: usize) {
    assert!(l <= MAX_PROGRAM_LENGTH, "program length bound {l} exceeds {MAX_PROGRAM_LENGTH}");
}

fn dyadic_sum(scaled: u128, l: usize) -> Rational {
    Rational::new(BigInt::from(scaled), BigInt::from(1u8) << l)
}

/// Reference implementation: classifies every program of length `<= L`.
pub fn estimate_m_enumerative(
    machine: &MachineSpec,
    x: &BitString,
    max_len: usize,
    step_budget: usize,
    schedule: BudgetSchedule,
) -> EstimateReport {
    check_length(max_len);
    assert!(max_len < 40, "enumerative route is limited to L < 40");
    let programs: Vec<BitString> = BitString::all_up_to(max_len).collect();
    let verdicts: Vec<Verdict> = programs
        .par_iter()
        .map(|p| outputs_prefix(machine, p, x, schedule.budget(p.len(), max_len, step_budget)))
        .collect();
    let mut qualifying: Vec<BitString> = Vec::new();
    let mut inconclusive = 0u128;
    let mut scaled = 0u128;
    for (p, v) in programs.into_iter().zip(verdicts) {
        match v {
            Verdict::Yes => {
                if qualifying.iter().any(|q| q.is_prefix_of(&p)) {
                    continue;
                }
                scaled += 1u128 << (max_len - p.len());
                qualifying.push(p);
            }
            Verdict::Inconclusive => inconclusive += 1,
            Verdict::No => {}
        }
    }
    EstimateReport {
        x: x.clone(),
        max_program_length: max_len,
        step_budget,
        m_lower: dyadic_sum(scaled, max_len),
        km_upper: qualifying.first().map(BitString::len),
        qualifying_programs: qualifying,
        inconclusive_count: inconclusive,
        m_upper: None,
    }
}

/// Lower bound on `M_T(x)` and friends via the program-tree walk.
pub fn estimate_m(machine: &MachineSpec, x: &BitString, max_len: usize, step_budget: usize) -> EstimateReport {
    let table = explore_inner(machine, x.len(), max_len, step_budget, Some(x));
    table.report(x).expect("x is within the explored depth")
}

/// Upper bound on `Km_T(x)`: the shortest qualifying program found.
pub fn estimate_km(machine: &MachineSpec, x: &BitString, max_len: usize, step_budget: usize) -> Option<usize> {
    estimate_m(machine, x, max_len, step_budget).km_upper
}

/// Reports for every `x` with `ℓ(x) <= depth` from a single tree walk.
pub fn explore(machine: &MachineSpec, depth: usize, max_len: usize, step_budget: usize) -> EstimateTable {
    explore_inner(machine, depth, max_len, step_budget, None)
}

/// Per-node accumulators, indexed by `node_index(x)`.
#[derive(Clone, Debug, Default)]
struct Acc {
    /// `Σ 2^{L-ℓ(p)}` over qualifying programs.
    qualifying_scaled: u128,
    qualifying: Vec<BitString>,
    /// Budget-cut nodes whose output equals this string exactly: the number
    /// of programs they leave undecided, and their mass scaled by `2^L`.
    cut_count: u128,
    cut_scaled: u128,
    /// Length-cut nodes (asked for bit `L+1`) whose output equals this string.
    len_cut_scaled: u128,
}

fn merge(into: &mut [Acc], from: Vec<Acc>) {
    for (a, b) in into.iter_mut().zip(from) {
        a.qualifying_scaled += b.qualifying_scaled;
        a.qualifying.extend(b.qualifying);
        a.cut_count += b.cut_count;
        a.cut_scaled += b.cut_scaled;
        a.len_cut_scaled += b.len_cut_scaled;
    }
}

/// Index of `x` in length-then-lexicographic order.
pub(crate) fn node_index(x: &BitString) -> usize {
    let v = x.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    (1usize << x.len()) - 1 + v
}

struct Walk<'a> {
    depth: usize,
    max_len: usize,
    step_budget: usize,
    focus: Option<&'a BitString>,
}

impl Walk<'_> {
    fn table_len(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }

    /// Whether the current output can still matter.
    fn relevant(&self, out: &BitString) -> bool {
        match self.focus {
            None => true,
            Some(x) => {
                let n = out.len().min(x.len());
                out.bits()[..n] == x.bits()[..n]
            }
        }
    }

    fn record_emission(&self, acc: &mut [Acc], out: &BitString, program: &BitString) {
        if out.len() <= self.depth && self.relevant(out) {
            let a = &mut acc[node_index(out)];
            a.qualifying_scaled += 1u128 << (self.max_len - program.len());
            a.qualifying.push(program.clone());
        }
    }

    /// Explores the subtree rooted at `program`, whose first transition (if
    /// `pending` is set) consumes that bit.
    fn node(&self, mut exec: Execution<'_>, program: BitString, pending: Option<bool>, acc: &mut Vec<Acc>) {
        if let Some(b) = pending {
            if exec.step(Some(b)).is_some() {
                self.record_emission(acc, exec.output(), &program);
            }
        }
        loop {
            let out = exec.output();
            if out.len() >= self.depth || !self.relevant(out) {
                return;
            }
            if exec.halted() {
                return;
            }
            let remaining = (self.max_len - program.len()) as u32;
            if exec.steps() >= self.step_budget {
                let a = &mut acc[node_index(out)];
                a.cut_count += (1u128 << (remaining + 1)) - 1;
                a.cut_scaled += 1u128 << remaining;
                return;
            }
            if exec.needs_input() {
                if remaining == 0 {
                    acc[node_index(out)].len_cut_scaled += 1;
                    return;
                }
                let zero = (exec.clone(), program.child(false));
                let one = (exec, program.child(true));
                if program.len() < 6 {
                    let mut other = vec![Acc::default(); self.table_len()];
                    rayon::join(
                        || self.node(zero.0, zero.1, Some(false), acc),
                        || self.node(one.0, one.1, Some(true), &mut other),
                    );
                    merge(acc, other);
                } else {
                    self.node(zero.0, zero.1, Some(false), acc);
                    self.node(one.0, one.1, Some(true), acc);
                }
                return;
            }
            if exec.step(None).is_some() {
                self.record_emission(acc, exec.output(), &program);
            }
        }
    }
}

fn explore_inner(
    machine: &MachineSpec,
    depth: usize,
    max_len: usize,
    step_budget: usize,
    focus: Option<&BitString>,
) -> EstimateTable {
    check_length(max_len);
    assert!(depth < 24, "refusing to tabulate 2^{depth} strings");
    let walk = Walk { depth, max_len, step_budget, focus };
    let mut acc = vec![Acc::default(); walk.table_len()];
    // x = ε is output by the empty program before any step.
    acc[0].qualifying_scaled = 1u128 << max_len;
    acc[0].qualifying.push(BitString::empty());
    walk.node(Execution::new(machine), BitString::empty(), None, &mut acc);

    // Cut nodes leave open every x that properly extends their output:
    // accumulate down the tree.
    let mut open_count = vec![0u128; acc.len()];
    let mut open_scaled = vec![0u128; acc.len()];
    for x in BitString::all_up_to(depth) {
        let i = node_index(&x);
        if x.is_empty() {
            continue;
        }
        let parent = node_index(&x.prefix(x.len() - 1));
        let p = &acc[parent];
        open_count[i] = open_count[parent] + p.cut_count;
        open_scaled[i] = open_scaled[parent] + p.cut_scaled + p.len_cut_scaled;
    }

    let reports = BitString::all_up_to(depth)
        .map(|x| {
            let i = node_index(&x);
            let a = &mut acc[i];
            let mut qualifying = std::mem::take(&mut a.qualifying);
            qualifying.sort();
            let m_lower = dyadic_sum(a.qualifying_scaled, max_len);
            let m_upper = dyadic_sum(a.qualifying_scaled + open_scaled[i], max_len);
            EstimateReport {
                km_upper: qualifying.first().map(BitString::len),
                x,
                max_program_length: max_len,
                step_budget,
                m_lower,
                qualifying_programs: qualifying,
                inconclusive_count: open_count[i],
                m_upper: Some(m_upper),
            }
        })
        .collect();
    EstimateTable { depth, max_program_length: max_len, step_budget, reports }
}

/// Reports for all strings up to `depth`, in length-then-lexicographic order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateTable {
    pub depth: usize,
    pub max_program_length: usize,
    pub step_budget: usize,
    pub reports: Vec<EstimateReport>,
}

impl EstimateTable {
    pub fn report(&self, x: &BitString) -> Option<EstimateReport> {
        self.get(x).cloned()
    }

    pub fn get(&self, x: &BitString) -> Option<&EstimateReport> {
        (x.len() <= self.depth).then(|| &self.reports[node_index(x)])
    }

    pub fn m_lower(&self, x: &BitString) -> Option<&Rational> {
        self.get(x).map(|r| &r.m_lower)
    }

    /// `Σ_{ℓ(x)=n} M_lower(x)`.
    pub fn kraft_sum(&self, n: usize) -> Rational {
        BitString::all_of_length(n).map(|x| self.reports[node_index(&x)].m_lower.clone()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;
    use crate::rational::{int, ratio};

    #[test]
    fn constant_zero_has_full_mass() {
        let r = estimate_m(&library::constant_zero(), &bits("00000"), 3, 10);
        assert_eq!(r.m_lower, int(1));
        assert_eq!(r.km_upper, Some(0));
        assert_eq!(estimate_km(&library::constant_zero(), &bits("000000"), 3, 10), Some(0));
    }

    #[test]
    fn copy_machine() {
        let r = estimate_m(&library::copy(), &bits("101"), 3, 100);
        assert_eq!(r.m_lower, ratio(1, 8));
        assert_eq!(r.km_upper, Some(3));
        assert_eq!(r.qualifying_programs, vec![bits("101")]);
        assert_eq!(estimate_km(&library::copy(), &bits("1011"), 4, 100), Some(4));
        assert_eq!(estimate_km(&library::copy(), &bits("1011"), 3, 100), None);
    }

    #[test]
    fn routes_agree_on_library() {
        for m in library::suite() {
            let table = explore(&m.machine, 4, 6, 40);
            for x in BitString::all_up_to(4) {
                let slow = estimate_m_enumerative(&m.machine, &x, 6, 40, BudgetSchedule::Fixed);
                let fast = table.report(&x).unwrap();
                assert_eq!(fast.m_lower, slow.m_lower, "{} {x:?}", m.name);
                assert_eq!(fast.qualifying_programs, slow.qualifying_programs, "{} {x:?}", m.name);
                assert_eq!(fast.inconclusive_count, slow.inconclusive_count, "{} {x:?}", m.name);
                assert!(fast.m_upper.clone().unwrap() >= fast.m_lower);
            }
        }
    }

    #[test]
    fn silent_machine_leaves_everything_open() {
        let r = estimate_m(&library::silent_loop(), &bits("1"), 3, 10);
        assert_eq!(r.m_lower, int(0));
        assert_eq!(r.inconclusive_count, 15);
        assert_eq!(r.m_upper, Some(int(1)));
    }

    #[test]
    fn levin_schedule_gives_short_programs_more_time() {
        assert_eq!(BudgetSchedule::Levin.budget(2, 5, 10), 80);
        assert_eq!(BudgetSchedule::Fixed.budget(2, 5, 10), 10);
        let copy = library::copy();
        let r = estimate_m_enumerative(&copy, &bits("11"), 3, 1, BudgetSchedule::Levin);
        assert_eq!(r.m_lower, ratio(1, 4));
    }
}

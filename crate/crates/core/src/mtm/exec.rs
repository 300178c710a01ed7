//! Step-by-step execution of a [`MachineSpec`].

use serde::{Deserialize, Serialize};

use super::machine::{MachineSpec, Move};
use crate::bits::BitString;

/// A two-way infinite binary tape, all zeros initially.
#[derive(Clone, Debug, Default)]
struct Tape {
    right: Vec<bool>,
    left: Vec<bool>,
    head: i64,
}

impl Tape {
    #[inline]
    fn read(&self) -> bool {
        if self.head >= 0 {
            self.right.get(self.head as usize).copied().unwrap_or(false)
        } else {
            self.left.get((-self.head - 1) as usize).copied().unwrap_or(false)
        }
    }

    #[inline]
    fn write(&mut self, bit: bool) {
        let (cells, idx) = if self.head >= 0 {
            (&mut self.right, self.head as usize)
        } else {
            (&mut self.left, (-self.head - 1) as usize)
        };
        if idx >= cells.len() {
            if !bit {
                return;
            }
            cells.resize(idx + 1, false);
        }
        cells[idx] = bit;
    }

    #[inline]
    fn shift(&mut self, m: Move) {
        match m {
            Move::Left => self.head -= 1,
            Move::Right => self.head += 1,
            Move::Stay => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Halted,
    BudgetExhausted,
    InputExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub output: BitString,
    pub consumed: usize,
    pub steps: usize,
    pub status: RunStatus,
}

/// A paused machine configuration. Cloning it forks the computation, which is
/// how the program-tree explorers share work between programs with a common
/// prefix.
#[derive(Clone, Debug)]
pub struct Execution<'m> {
    machine: &'m MachineSpec,
    state: usize,
    tapes: Vec<Tape>,
    output: BitString,
    consumed: usize,
    steps: usize,
    halted: bool,
}

impl<'m> Execution<'m> {
    pub fn new(machine: &'m MachineSpec) -> Self {
        Execution {
            machine,
            state: machine.start(),
            tapes: vec![Tape::default(); machine.work_tapes()],
            output: BitString::empty(),
            consumed: 0,
            steps: 0,
            halted: false,
        }
    }

    pub fn machine(&self) -> &'m MachineSpec {
        self.machine
    }

    pub fn output(&self) -> &BitString {
        &self.output
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Whether the next transition reads (and consumes) an input bit.
    pub fn needs_input(&self) -> bool {
        self.machine.states()[self.state].consumes
    }

    /// Executes one transition and returns the emitted bit, if any.
    ///
    /// `input` must be `Some` exactly when [`needs_input`](Self::needs_input)
    /// holds. Must not be called after the machine halted.
    pub fn step(&mut self, input: Option<bool>) -> Option<bool> {
        debug_assert!(!self.halted, "step after halt");
        debug_assert_eq!(input.is_some(), self.needs_input());
        let k = self.tapes.len();
        let pattern = self.tapes.iter().fold(0usize, |acc, t| (acc << 1) | t.read() as usize);
        let action = self.machine.action(self.state, input, pattern);
        if input.is_some() {
            self.consumed += 1;
        }
        for t in 0..k {
            let tape = &mut self.tapes[t];
            tape.write(action.write[t]);
            tape.shift(action.moves[t]);
        }
        if let Some(b) = action.emit {
            self.output.push(b);
        }
        self.state = action.next;
        self.halted = action.halt;
        self.steps += 1;
        action.emit
    }

    /// Runs on `input` until the machine halts, the step counter reaches
    /// `budget`, or it asks for an input bit beyond `input`.
    pub fn advance(&mut self, input: &[bool], budget: usize) -> RunStatus {
        loop {
            if self.halted {
                return RunStatus::Halted;
            }
            if self.steps >= budget {
                return RunStatus::BudgetExhausted;
            }
            let bit = if self.needs_input() {
                match input.get(self.consumed) {
                    Some(&b) => Some(b),
                    None => return RunStatus::InputExhausted,
                }
            } else {
                None
            };
            self.step(bit);
        }
    }

    pub fn into_outcome(self, status: RunStatus) -> RunOutcome {
        RunOutcome { output: self.output, consumed: self.consumed, steps: self.steps, status }
    }
}

/// Runs `machine` on `input` for at most `budget` transitions.
pub fn run(machine: &MachineSpec, input: &BitString, budget: usize) -> RunOutcome {
    let mut exec = Execution::new(machine);
    let status = exec.advance(input.bits(), budget);
    exec.into_outcome(status)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Decides `T(p) = x*` within `budget` steps: the last bit of `x` must be
/// emitted at a step where exactly the bits of `program` have been consumed.
pub fn outputs_prefix(machine: &MachineSpec, program: &BitString, x: &BitString, budget: usize) -> Verdict {
    if x.is_empty() {
        return if program.is_empty() { Verdict::Yes } else { Verdict::No };
    }
    let p = program.bits();
    let mut exec = Execution::new(machine);
    loop {
        if exec.halted() {
            return Verdict::No;
        }
        if exec.steps() >= budget {
            return Verdict::Inconclusive;
        }
        let bit = if exec.needs_input() {
            match p.get(exec.consumed()) {
                Some(&b) => Some(b),
                None => return Verdict::No,
            }
        } else {
            None
        };
        if let Some(b) = exec.step(bit) {
            let i = exec.output().len() - 1;
            if x.get(i) != Some(b) {
                return Verdict::No;
            }
            if i + 1 == x.len() {
                return if exec.consumed() == p.len() { Verdict::Yes } else { Verdict::No };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;

    #[test]
    fn constant_zero_ignores_input() {
        let m = library::constant_zero();
        let out = run(&m, &bits(""), 5);
        assert_eq!(out.output, bits("00000"));
        assert_eq!(out.consumed, 0);
        assert_eq!(out.status, RunStatus::BudgetExhausted);
    }

    #[test]
    fn copy_runs_out_of_input() {
        let m = library::copy();
        let out = run(&m, &bits("101"), 100);
        assert_eq!(out.output, bits("101"));
        assert_eq!(out.consumed, 3);
        assert_eq!(out.status, RunStatus::InputExhausted);
    }

    #[test]
    fn zero_budget() {
        for m in library::suite() {
            let out = run(&m.machine, &bits("0110"), 0);
            assert_eq!(out.output, BitString::empty());
            assert_eq!((out.consumed, out.steps), (0, 0));
        }
    }

    #[test]
    fn prefix_verdicts() {
        let copy = library::copy();
        assert_eq!(outputs_prefix(&copy, &bits("101"), &bits("101"), 100), Verdict::Yes);
        assert_eq!(outputs_prefix(&copy, &bits("10"), &bits("101"), 100), Verdict::No);
        assert_eq!(outputs_prefix(&copy, &bits("1011"), &bits("101"), 100), Verdict::No);
        assert_eq!(outputs_prefix(&copy, &bits("111"), &bits("101"), 100), Verdict::No);
        assert_eq!(outputs_prefix(&copy, &bits("101"), &bits("101"), 2), Verdict::Inconclusive);
        let zero = library::constant_zero();
        assert_eq!(outputs_prefix(&zero, &bits(""), &bits("0000"), 10), Verdict::Yes);
        assert_eq!(outputs_prefix(&zero, &bits(""), &bits(""), 0), Verdict::Yes);
        assert_eq!(outputs_prefix(&zero, &bits("0"), &bits(""), 0), Verdict::No);
    }
}

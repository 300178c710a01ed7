//! Prefix-structure-preserving re-encodings `φ(xa) = φ(x)·(a ⊕ h(x))` and
//! their transport onto machines.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::AlgProbError;
use crate::bits::BitString;
use crate::mtm::{run, Action, MachineSpec, State};

/// A flip rule given by a deterministic finite automaton over `{0,1}`:
/// `h(x)` is the output label of the state reached after reading `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipAutomaton {
    pub start: usize,
    pub delta: Vec<[usize; 2]>,
    pub output: Vec<bool>,
}

impl FlipAutomaton {
    pub fn new(start: usize, delta: Vec<[usize; 2]>, output: Vec<bool>) -> Result<Self, AlgProbError> {
        let n = delta.len();
        if n == 0 || output.len() != n || start >= n || delta.iter().flatten().any(|&t| t >= n) {
            return Err(AlgProbError::InvalidFlipRule("automaton tables are inconsistent".into()));
        }
        Ok(FlipAutomaton { start, delta, output })
    }

    /// `h ≡ b`.
    pub fn constant(b: bool) -> Self {
        FlipAutomaton { start: 0, delta: vec![[0, 0]], output: vec![b] }
    }

    /// `h(x)` = parity of the number of ones in `x`.
    pub fn parity() -> Self {
        FlipAutomaton { start: 0, delta: vec![[0, 1], [1, 0]], output: vec![false, true] }
    }

    /// `h(x)` = last bit of `x` (`0` for `ε`).
    pub fn last_bit() -> Self {
        FlipAutomaton { start: 0, delta: vec![[0, 1], [0, 1]], output: vec![false, true] }
    }

    fn eval(&self, x: &[bool]) -> bool {
        let s = x.iter().fold(self.start, |s, &b| self.delta[s][b as usize]);
        self.output[s]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlipRule {
    Automaton(FlipAutomaton),
    /// `h(x)` is the first bit `machine` emits on input `x` within
    /// `step_bound` steps.
    Machine {
        machine: MachineSpec,
        step_bound: usize,
    },
}

/// The bijection `φ` determined by a flip rule.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingMap {
    pub rule: FlipRule,
}

impl EncodingMap {
    pub fn identity() -> Self {
        Self::automaton(FlipAutomaton::constant(false))
    }

    /// Bitwise inversion.
    pub fn inversion() -> Self {
        Self::automaton(FlipAutomaton::constant(true))
    }

    pub fn parity() -> Self {
        Self::automaton(FlipAutomaton::parity())
    }

    pub fn last_bit() -> Self {
        Self::automaton(FlipAutomaton::last_bit())
    }

    pub fn automaton(a: FlipAutomaton) -> Self {
        EncodingMap { rule: FlipRule::Automaton(a) }
    }

    pub fn machine(machine: MachineSpec, step_bound: usize) -> Self {
        EncodingMap { rule: FlipRule::Machine { machine, step_bound } }
    }

    /// Builtin maps by name: `identity`, `inversion`, `parity`, `last_bit`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(Self::identity()),
            "inversion" => Some(Self::inversion()),
            "parity" => Some(Self::parity()),
            "last_bit" => Some(Self::last_bit()),
            _ => None,
        }
    }

    /// `h(x)`.
    pub fn flip(&self, x: &[bool]) -> Result<bool, AlgProbError> {
        match &self.rule {
            FlipRule::Automaton(a) => Ok(a.eval(x)),
            FlipRule::Machine { machine, step_bound } => {
                let out = run(machine, &BitString::from(x), *step_bound);
                out.output
                    .get(0)
                    .ok_or_else(|| AlgProbError::MapEvaluation { prefix: BitString::from(x), step_bound: *step_bound })
            }
        }
    }

    /// `φ(x)`.
    pub fn apply(&self, x: &BitString) -> Result<BitString, AlgProbError> {
        let xs = x.bits();
        (0..xs.len()).map(|i| Ok(xs[i] ^ self.flip(&xs[..i])?)).collect::<Result<Vec<_>, _>>().map(BitString::from_bits)
    }

    /// `φ⁻¹(y)`.
    pub fn invert(&self, y: &BitString) -> Result<BitString, AlgProbError> {
        let mut x = Vec::with_capacity(y.len());
        for &b in y.bits() {
            let h = self.flip(&x)?;
            x.push(b ^ h);
        }
        Ok(BitString::from_bits(x))
    }
}

pub fn encoding_apply(map: &EncodingMap, x: &BitString) -> Result<BitString, AlgProbError> {
    map.apply(x)
}

/// Builds `V = φ⁻¹ ∘ U`: `V` runs `U` step for step and emits
/// `φ⁻¹`-transformed output bits in the same steps, tracking the flip-rule
/// automaton on its own output in the finite control.
///
/// Only automaton flip rules can be transported; a machine-defined rule has
/// no finite control to fold into `V`.
pub fn transport_machine(machine: &MachineSpec, map: &EncodingMap) -> Result<MachineSpec, AlgProbError> {
    let FlipRule::Automaton(dfa) = &map.rule else {
        return Err(AlgProbError::TransportUnsupported);
    };
    let start = (machine.start(), dfa.start);
    let mut ids: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut rows: Vec<Vec<(Action, (usize, usize))>> = Vec::new();
    while let Some((s, d)) = queue.pop_front() {
        let row = machine.states()[s]
            .actions
            .iter()
            .map(|a| {
                let (emit, d2) = match a.emit {
                    None => (None, d),
                    Some(y) => {
                        let x = y ^ dfa.output[d];
                        (Some(x), dfa.delta[d][x as usize])
                    }
                };
                let target = (a.next, d2);
                if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(target) {
                    e.insert(order.len());
                    order.push(target);
                    queue.push_back(target);
                }
                (Action { emit, ..a.clone() }, target)
            })
            .collect();
        rows.push(row);
    }
    let states = order
        .iter()
        .zip(rows)
        .map(|(&(s, d), row)| State {
            name: format!("{}|{d}", machine.states()[s].name),
            consumes: machine.states()[s].consumes,
            actions: row.into_iter().map(|(a, t)| Action { next: ids[&t], ..a }).collect(),
        })
        .collect();
    Ok(MachineSpec::new(machine.work_tapes(), 0, states).expect("product of valid tables is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;
    use crate::mtm::run;

    #[test]
    fn inversion_example() {
        let phi = EncodingMap::inversion();
        assert_eq!(phi.apply(&bits("1011")).unwrap(), bits("0100"));
        assert_eq!(phi.apply(&BitString::empty()).unwrap(), BitString::empty());
    }

    #[test]
    fn inverse_round_trip() {
        for phi in [EncodingMap::inversion(), EncodingMap::parity(), EncodingMap::last_bit()] {
            for x in BitString::all_up_to(8) {
                assert_eq!(phi.apply(&phi.invert(&x).unwrap()).unwrap(), x);
                assert_eq!(phi.invert(&phi.apply(&x).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn transported_constant_zero_emits_ones() {
        let v = transport_machine(&library::constant_zero(), &EncodingMap::inversion()).unwrap();
        assert_eq!(run(&v, &BitString::empty(), 6).output, bits("111111"));
    }

    #[test]
    fn identity_transport_is_behaviourally_identical() {
        for m in library::suite() {
            let v = transport_machine(&m.machine, &EncodingMap::identity()).unwrap();
            for p in BitString::all_up_to(5) {
                assert_eq!(run(&v, &p, 200), run(&m.machine, &p, 200), "{}", m.name);
            }
        }
    }

    #[test]
    fn machine_rules_evaluate_but_do_not_transport() {
        let phi = EncodingMap::machine(library::constant_one(), 5);
        assert_eq!(phi.apply(&bits("1011")).unwrap(), bits("0100"));
        assert!(matches!(transport_machine(&library::copy(), &phi), Err(AlgProbError::TransportUnsupported)));
        let silent = EncodingMap::machine(library::silent_loop(), 5);
        assert!(matches!(silent.apply(&bits("1")), Err(AlgProbError::MapEvaluation { .. })));
    }
}

//! Seeded random machines for property tests and experiments.

use rand::Rng;

use super::machine::{Action, MachineSpec, Move, State, MAX_WORK_TAPES};

/// Shape of the random machines drawn by [`random_machine`].
#[derive(Clone, Copy, Debug)]
pub struct RandomMachineParams {
    pub max_states: usize,
    pub work_tapes: usize,
    /// Probability that a state reads input.
    pub consume_prob: f64,
    /// Probability that a transition emits a bit.
    pub emit_prob: f64,
    /// Probability that a transition halts.
    pub halt_prob: f64,
}

impl Default for RandomMachineParams {
    fn default() -> Self {
        RandomMachineParams { max_states: 4, work_tapes: 2, consume_prob: 0.5, emit_prob: 0.6, halt_prob: 0.05 }
    }
}

const MOVES: [Move; 3] = [Move::Left, Move::Right, Move::Stay];

pub fn random_machine<R: Rng + ?Sized>(rng: &mut R, params: &RandomMachineParams) -> MachineSpec {
    let n = rng.gen_range(1..=params.max_states.max(1));
    let k = params.work_tapes;
    let states = (0..n)
        .map(|i| {
            let consumes = rng.gen_bool(params.consume_prob);
            let count = (1usize << k) * if consumes { 2 } else { 1 };
            let actions = (0..count)
                .map(|_| {
                    let mut write = [false; MAX_WORK_TAPES];
                    let mut moves = [Move::Stay; MAX_WORK_TAPES];
                    for t in 0..k {
                        write[t] = rng.gen_bool(0.5);
                        moves[t] = MOVES[rng.gen_range(0..3)];
                    }
                    Action {
                        next: rng.gen_range(0..n),
                        write,
                        moves,
                        emit: rng.gen_bool(params.emit_prob).then(|| rng.gen_bool(0.5)),
                        halt: rng.gen_bool(params.halt_prob),
                    }
                })
                .collect();
            State { name: format!("q{i}"), consumes, actions }
        })
        .collect();
    MachineSpec::new(k, 0, states).expect("random machine is well-formed")
}

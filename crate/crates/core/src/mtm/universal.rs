//! A reference universal monotone machine `U` with `U(x_T p) = T(p)`.
//!
//! `U` has four work tapes:
//!
//! * `A` holds a copy of the transition table of `T`,
//! * `B` is a marker track moving in lockstep with `A` (a `1` marks the
//!   start of each state block and the two ends of the table),
//! * `C` and `D` are the work tapes of `T`. While the description is being
//!   read they serve as unary counters (blocks left, entries left in the
//!   current block); both are back to all zeros before simulation starts.
//!
//! The header is parsed in the finite control. Each subsequent description
//! bit is read by exactly one transition of `U`, so `U` rejects malformed
//! descriptions at the same bit position as
//! [`decode_machine`](super::encode::decode_machine), and it consumes a
//! program bit exactly when the simulated machine does.
//!
//! Entries are stored in a fixed 13-cell layout
//! `[wC, mC, mC, wD, mD, mD, e, e, halt, next×4]` (missing tape fields are
//! zero-padded, `next` is left-padded to four bits), which lets the simulator
//! find entry `i` of a block by skipping `13·i` cells.
//!
//! The control of `U` is generated from a symbolic description: every state
//! is a [`Label`] carrying the small amount of finite information the phase
//! needs, and [`act`] gives the transition for a label and the bits read.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::encode::{
    encode_machine, next_width, EncodingError, MAX_ENCODED_STATES, MAX_ENCODED_TAPES, START_PREFIX_CAP,
    STATES_PREFIX_CAP, TAPES_PREFIX_CAP,
};
use super::machine::{Action, MachineSpec, Move, State, MAX_WORK_TAPES};
use crate::bits::BitString;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const ENTRY_CELLS: u8 = 13;
const NEXT_CELLS: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Field {
    States,
    Tapes,
    Start,
}

impl Field {
    fn prefix_cap(self) -> u8 {
        (match self {
            Field::States => STATES_PREFIX_CAP,
            Field::Tapes => TAPES_PREFIX_CAP,
            Field::Start => START_PREFIX_CAP,
        }) as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Label {
    // header, in the finite control
    Prefix { f: Field, ones: u8, n: u8, k: u8 },
    Digits { f: Field, left: u8, value: u8, first: bool, n: u8, k: u8 },
    // counters and start sentinel
    Sentinel { start: u8, n: u8, k: u8 },
    StartOnes { left: u8, n: u8, k: u8 },
    StateOnes { left: u8, n: u8, k: u8 },
    // copying the table onto A
    BlockBegin { n: u8, k: u8 },
    Kind { n: u8, k: u8 },
    EntryOnes { left: u8, n: u8, k: u8 },
    CWrite { tape: u8, n: u8, k: u8 },
    CMove1 { tape: u8, n: u8, k: u8 },
    CMove2 { tape: u8, m1: bool, n: u8, k: u8 },
    CPad { left: u8, n: u8, k: u8 },
    CEmit1 { n: u8, k: u8 },
    CEmit2 { e1: bool, n: u8, k: u8 },
    CHalt { n: u8, k: u8 },
    CNextPad { left: u8, n: u8, k: u8 },
    CNext { left: u8, value: u8, n: u8, k: u8 },
    CEntryCheck { n: u8, k: u8 },
    // locating the start block
    Rewind { k: u8 },
    SeekScan { k: u8, s: u8 },
    // simulation; `s` is the simulated state, A sits inside its block
    ReadKind { k: u8, s: u8 },
    Consume { k: u8, s: u8 },
    Skip { k: u8, s: u8, left: u8 },
    EWrite { tape: u8, k: u8, s: u8 },
    EMove1 { tape: u8, k: u8, s: u8 },
    EMove2 { tape: u8, m1: bool, k: u8, s: u8 },
    EEmit1 { k: u8, s: u8 },
    EEmit2 { e1: bool, k: u8, s: u8 },
    EHalt { k: u8, s: u8 },
    ENext { left: u8, value: u8, k: u8, s: u8 },
    Return { k: u8, s: u8, t: u8 },
    ScanR { k: u8, t: u8, r: u8 },
    ScanL { k: u8, t: u8, r: u8 },
    // target of halting transitions; never executed
    Dead,
}

impl Label {
    fn consumes(self) -> bool {
        matches!(
            self,
            Label::Prefix { .. }
                | Label::Digits { .. }
                | Label::Kind { .. }
                | Label::CWrite { .. }
                | Label::CMove1 { .. }
                | Label::CMove2 { .. }
                | Label::CEmit1 { .. }
                | Label::CEmit2 { .. }
                | Label::CHalt { .. }
                | Label::CNext { .. }
                | Label::Consume { .. }
        )
    }
}

struct Act {
    next: Label,
    write: [Option<bool>; MAX_WORK_TAPES],
    moves: [Move; MAX_WORK_TAPES],
    emit: Option<bool>,
    halt: bool,
}

fn go(next: Label) -> Act {
    Act { next, write: [None; MAX_WORK_TAPES], moves: [Move::Stay; MAX_WORK_TAPES], emit: None, halt: false }
}

fn fail() -> Act {
    Act { halt: true, ..go(Label::Dead) }
}

impl Act {
    fn w(mut self, tape: usize, bit: bool) -> Self {
        self.write[tape] = Some(bit);
        self
    }

    fn m(mut self, tape: usize, mv: Move) -> Self {
        self.moves[tape] = mv;
        self
    }

    /// Moves the table head and its marker track together.
    fn ab(self, mv: Move) -> Self {
        self.m(A, mv).m(B, mv)
    }

    fn emit(mut self, bit: bool) -> Self {
        self.emit = Some(bit);
        self
    }
}

fn complete(f: Field, v: u8, n: u8, k: u8) -> Act {
    match f {
        Field::States if (1..=MAX_ENCODED_STATES as u8).contains(&v) => {
            go(Label::Prefix { f: Field::Tapes, ones: 0, n: v, k: 0 })
        }
        Field::Tapes if (1..=MAX_ENCODED_TAPES as u8).contains(&v) => {
            go(Label::Prefix { f: Field::Start, ones: 0, n, k: v })
        }
        Field::Start if v < n => go(Label::Sentinel { start: v, n, k }),
        _ => fail(),
    }
}

fn next_field(n: u8, k: u8) -> Label {
    let w = next_width(n as usize) as u8;
    if w < NEXT_CELLS {
        Label::CNextPad { left: NEXT_CELLS - w, n, k }
    } else {
        Label::CNext { left: w, value: 0, n, k }
    }
}

fn skip(k: u8, s: u8, cells: u8) -> Label {
    if cells == 0 {
        Label::EWrite { tape: 0, k, s }
    } else {
        Label::Skip { k, s, left: cells }
    }
}

fn decode_move(hi: bool, lo: bool) -> Move {
    match (hi, lo) {
        (false, true) => Move::Left,
        (true, false) => Move::Right,
        _ => Move::Stay,
    }
}

/// The transition of `U` in state `l` reading input `i` (for consuming
/// states) and work bits `r`.
fn act(l: Label, i: Option<bool>, r: [bool; MAX_WORK_TAPES]) -> Act {
    use Label::*;
    use Move::{Left as Lt, Right as Rt};
    let bit = i.unwrap_or(false);
    let pattern = |k: u8| if k == 2 { (r[C] as usize) << 1 | r[D] as usize } else { r[C] as usize };
    let sim_tape = |tape: u8| if tape == 0 { C } else { D };
    match l {
        Prefix { f, ones, n, k } => {
            if !bit {
                go(Digits { f, left: ones + 1, value: 0, first: true, n, k })
            } else if ones + 1 > f.prefix_cap() {
                fail()
            } else {
                go(Prefix { f, ones: ones + 1, n, k })
            }
        }
        Digits { f, left, value, first, n, k } => {
            if first && left > 1 && !bit {
                return fail();
            }
            let v = value * 2 + bit as u8;
            if left > 1 {
                go(Digits { f, left: left - 1, value: v, first: false, n, k })
            } else {
                complete(f, v, n, k)
            }
        }
        Sentinel { start, n, k } => go(StartOnes { left: start, n, k }).w(A, true).w(B, true).ab(Rt),
        StartOnes { left, n, k } => {
            if left > 0 {
                go(StartOnes { left: left - 1, n, k }).w(C, true).m(C, Rt)
            } else {
                go(StateOnes { left: n, n, k }).m(C, Rt)
            }
        }
        StateOnes { left, n, k } => {
            if left > 1 {
                go(StateOnes { left: left - 1, n, k }).w(C, true).m(C, Rt)
            } else {
                go(BlockBegin { n, k }).w(C, true)
            }
        }
        BlockBegin { n, k } => go(Kind { n, k }).w(C, false).m(C, Lt).w(A, false).w(B, true).ab(Rt),
        Kind { n, k } => {
            let entries = (bit as u8 + 1) << k;
            go(EntryOnes { left: entries, n, k }).w(A, bit).ab(Rt)
        }
        EntryOnes { left, n, k } => {
            if left > 1 {
                go(EntryOnes { left: left - 1, n, k }).w(D, true).m(D, Rt)
            } else {
                go(CWrite { tape: 0, n, k }).w(D, true)
            }
        }
        CWrite { tape, n, k } => go(CMove1 { tape, n, k }).w(A, bit).ab(Rt),
        CMove1 { tape, n, k } => go(CMove2 { tape, m1: bit, n, k }).w(A, bit).ab(Rt),
        CMove2 { tape, m1, n, k } => {
            if m1 && bit {
                return fail();
            }
            let next = if tape + 1 < k {
                CWrite { tape: tape + 1, n, k }
            } else if k == 1 {
                CPad { left: 3, n, k }
            } else {
                CEmit1 { n, k }
            };
            go(next).w(A, bit).ab(Rt)
        }
        CPad { left, n, k } => {
            let next = if left > 1 { CPad { left: left - 1, n, k } } else { CEmit1 { n, k } };
            go(next).w(A, false).ab(Rt)
        }
        CEmit1 { n, k } => go(CEmit2 { e1: bit, n, k }).w(A, bit).ab(Rt),
        CEmit2 { e1, n, k } => {
            if !e1 && bit {
                return fail();
            }
            go(CHalt { n, k }).w(A, bit).ab(Rt)
        }
        CHalt { n, k } => go(next_field(n, k)).w(A, bit).ab(Rt),
        CNextPad { left, n, k } => {
            let next = if left > 1 {
                CNextPad { left: left - 1, n, k }
            } else {
                CNext { left: next_width(n as usize) as u8, value: 0, n, k }
            };
            go(next).w(A, false).ab(Rt)
        }
        CNext { left, value, n, k } => {
            let v = value * 2 + bit as u8;
            if left > 1 {
                go(CNext { left: left - 1, value: v, n, k }).w(A, bit).ab(Rt)
            } else if v >= n {
                fail()
            } else {
                go(CEntryCheck { n, k }).w(A, bit).ab(Rt).w(D, false).m(D, Lt)
            }
        }
        CEntryCheck { n, k } => {
            if r[D] {
                go(CWrite { tape: 0, n, k })
            } else if r[C] {
                go(BlockBegin { n, k })
            } else {
                go(Rewind { k }).w(A, true).w(B, true).ab(Lt).m(C, Lt)
            }
        }
        Rewind { k } => {
            if r[A] && r[B] {
                go(SeekScan { k, s: 0 }).ab(Rt)
            } else {
                go(Rewind { k }).ab(Lt)
            }
        }
        SeekScan { k, s } => {
            if !r[B] {
                go(SeekScan { k, s }).ab(Rt)
            } else if r[C] {
                if s as usize + 1 >= MAX_ENCODED_STATES {
                    // unreachable: the start index is below the state count
                    return fail();
                }
                go(SeekScan { k, s: s + 1 }).w(C, false).m(C, Lt).ab(Rt)
            } else {
                go(ReadKind { k, s }).ab(Rt)
            }
        }
        ReadKind { k, s } => {
            if r[A] {
                go(Consume { k, s })
            } else {
                go(skip(k, s, pattern(k) as u8 * ENTRY_CELLS)).ab(Rt)
            }
        }
        Consume { k, s } => {
            let idx = (bit as usize) << k | pattern(k);
            go(skip(k, s, idx as u8 * ENTRY_CELLS)).ab(Rt)
        }
        Skip { k, s, left } => go(skip(k, s, left - 1)).ab(Rt),
        EWrite { tape, k, s } => go(EMove1 { tape, k, s }).w(sim_tape(tape), r[A]).ab(Rt),
        EMove1 { tape, k, s } => go(EMove2 { tape, m1: r[A], k, s }).ab(Rt),
        EMove2 { tape, m1, k, s } => {
            let next = if tape == 0 { EWrite { tape: 1, k, s } } else { EEmit1 { k, s } };
            go(next).m(sim_tape(tape), decode_move(m1, r[A])).ab(Rt)
        }
        EEmit1 { k, s } => go(EEmit2 { e1: r[A], k, s }).ab(Rt),
        EEmit2 { e1, k, s } => {
            let a = go(EHalt { k, s }).ab(Rt);
            if e1 {
                a.emit(r[A])
            } else {
                a
            }
        }
        EHalt { k, s } => {
            if r[A] {
                fail()
            } else {
                go(ENext { left: NEXT_CELLS, value: 0, k, s }).ab(Rt)
            }
        }
        ENext { left, value, k, s } => {
            let v = value * 2 + r[A] as u8;
            if left > 1 {
                go(ENext { left: left - 1, value: v, k, s }).ab(Rt)
            } else {
                go(Return { k, s, t: v }).ab(Lt)
            }
        }
        Return { k, s, t } => {
            if !r[B] {
                go(Return { k, s, t }).ab(Lt)
            } else if t == s {
                go(ReadKind { k, s: t }).ab(Rt)
            } else if t > s {
                go(ScanR { k, t, r: t - s }).ab(Rt)
            } else {
                go(ScanL { k, t, r: s - t }).ab(Lt)
            }
        }
        ScanR { k, t, r: left } => {
            if !r[B] {
                go(ScanR { k, t, r: left }).ab(Rt)
            } else if left == 1 {
                go(ReadKind { k, s: t }).ab(Rt)
            } else {
                go(ScanR { k, t, r: left - 1 }).ab(Rt)
            }
        }
        ScanL { k, t, r: left } => {
            if !r[B] {
                go(ScanL { k, t, r: left }).ab(Lt)
            } else if left == 1 {
                go(ReadKind { k, s: t }).ab(Rt)
            } else {
                go(ScanL { k, t, r: left - 1 }).ab(Lt)
            }
        }
        Dead => fail(),
    }
}

fn build() -> MachineSpec {
    let start = Label::Prefix { f: Field::States, ones: 0, n: 0, k: 0 };
    let mut ids: HashMap<Label, usize> = HashMap::new();
    let mut order: Vec<Label> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(start, 0);
    order.push(start);
    queue.push_back(start);
    let mut tables: Vec<Vec<(Label, Act)>> = Vec::new();
    while let Some(label) = queue.pop_front() {
        let inputs: &[Option<bool>] = if label.consumes() { &[Some(false), Some(true)] } else { &[None] };
        let mut row = Vec::with_capacity(inputs.len() * 16);
        for &i in inputs {
            for pattern in 0..1usize << MAX_WORK_TAPES {
                let r = std::array::from_fn(|t| (pattern >> (MAX_WORK_TAPES - 1 - t)) & 1 == 1);
                let a = act(label, i, r);
                if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(a.next) {
                    e.insert(order.len());
                    order.push(a.next);
                    queue.push_back(a.next);
                }
                row.push((label, a));
            }
        }
        tables.push(row);
    }
    let states = order
        .iter()
        .zip(tables)
        .map(|(label, row)| {
            let actions = row
                .into_iter()
                .enumerate()
                .map(|(idx, (_, a))| {
                    let pattern = idx & 0xf;
                    let write =
                        std::array::from_fn(|t| a.write[t].unwrap_or((pattern >> (MAX_WORK_TAPES - 1 - t)) & 1 == 1));
                    Action { next: ids[&a.next], write, moves: a.moves, emit: a.emit, halt: a.halt }
                })
                .collect();
            State { name: format!("{label:?}"), consumes: label.consumes(), actions }
        })
        .collect();
    MachineSpec::new(MAX_WORK_TAPES, 0, states).expect("universal machine table is total")
}

/// The built-in universal machine (constructed once, then shared).
pub fn reference_universal() -> &'static MachineSpec {
    static U: OnceLock<MachineSpec> = OnceLock::new();
    U.get_or_init(build)
}

/// `x_T · p`, the input on which `U` behaves like `T` on `p`.
pub fn universal_input(machine: &MachineSpec, program: &BitString) -> Result<BitString, EncodingError> {
    Ok(encode_machine(machine)?.concat(program))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::encode::decode_machine;
    use crate::mtm::exec::{run, RunStatus};
    use crate::mtm::library;

    #[test]
    fn simulates_copy() {
        let u = reference_universal();
        let input = universal_input(&library::copy(), &bits("101")).unwrap();
        let out = run(u, &input, 100_000);
        assert_eq!(out.output, bits("101"));
        assert_eq!(out.consumed, input.len());
        assert_eq!(out.status, RunStatus::InputExhausted);
    }

    #[test]
    fn simulates_constant_zero() {
        let u = reference_universal();
        let input = universal_input(&library::constant_zero(), &BitString::empty()).unwrap();
        let out = run(u, &input, 20_000);
        assert!(out.output.len() >= 4);
        assert!(out.output.bits().iter().all(|&b| !b));
    }

    #[test]
    fn rejects_malformed_descriptions_where_decoder_does() {
        let u = reference_universal();
        for code in ["11111", "00", "100", "0100", "010101", "0110000000"] {
            let input = bits(code);
            let err = decode_machine(input.bits()).unwrap_err();
            let out = run(u, &input, 10_000);
            assert_eq!(out.output, BitString::empty(), "{code}");
            match err {
                crate::mtm::encode::DecodeError::Invalid { position, .. } => {
                    assert_eq!(out.status, RunStatus::Halted, "{code}");
                    assert_eq!(out.consumed, position, "{code}");
                }
                crate::mtm::encode::DecodeError::Truncated { .. } => {
                    assert_eq!(out.status, RunStatus::InputExhausted, "{code}");
                }
            }
        }
    }
}

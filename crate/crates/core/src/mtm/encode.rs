//! Self-delimiting binary descriptions `x_T` of machines.
//!
//! Layout: three header integers (state count `N`, work tapes `k`, start
//! state) followed by one block per state. Integers use the code
//! `1^(m-1) 0 b_1..b_m` where `b` is the `m`-bit binary form of the value
//! (`0` is `0 0`); leading zeros are rejected so the code is canonical.
//! A block is a kind bit (1 = consuming) followed by `(kind+1)·2^k` entries in
//! key order. An entry is, per work tape, a write bit and a 2-bit move
//! (`00` stay, `01` left, `10` right), then a 2-bit emit field (`00` none,
//! `10` emit 0, `11` emit 1), a halt bit and the next state in
//! `max(1, bitlen(N-1))` bits.
//!
//! The reference universal machine parses exactly this format, one input bit
//! per decoding step, so [`decode_machine`] doubles as its specification:
//! both stop at the same bit position on malformed input.

use thiserror::Error;

use super::machine::{Action, MachineSpec, Move, State, MAX_WORK_TAPES};
use crate::bits::BitString;

pub const MAX_ENCODED_STATES: usize = 16;
pub const MAX_ENCODED_TAPES: usize = 2;
pub(crate) const STATES_PREFIX_CAP: usize = 4;
pub(crate) const TAPES_PREFIX_CAP: usize = 1;
pub(crate) const START_PREFIX_CAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("machine has {0} states; the description format holds at most {MAX_ENCODED_STATES}")]
    TooManyStates(usize),
    #[error("machine has {0} work tapes; the description format holds at most {MAX_ENCODED_TAPES}")]
    TooManyTapes(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("description ends after {position} bits")]
    Truncated { position: usize },
    #[error("invalid description at bit {position}: {reason}")]
    Invalid { position: usize, reason: &'static str },
}

impl DecodeError {
    /// Number of bits read when the failure was detected.
    pub fn position(&self) -> usize {
        match self {
            DecodeError::Truncated { position } | DecodeError::Invalid { position, .. } => *position,
        }
    }
}

pub(crate) fn bit_len(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()).max(1) as usize
}

pub(crate) fn next_width(states: usize) -> usize {
    bit_len(states.saturating_sub(1))
}

fn push_uint(out: &mut BitString, n: usize) {
    let m = bit_len(n);
    for _ in 1..m {
        out.push(true);
    }
    out.push(false);
    out.extend_from(&BitString::from_uint(n as u64, m));
}

fn push_move(out: &mut BitString, m: Move) {
    let (a, b) = match m {
        Move::Stay => (false, false),
        Move::Left => (false, true),
        Move::Right => (true, false),
    };
    out.push(a);
    out.push(b);
}

pub fn encode_machine(machine: &MachineSpec) -> Result<BitString, EncodingError> {
    let n = machine.state_count();
    let k = machine.work_tapes();
    if n > MAX_ENCODED_STATES {
        return Err(EncodingError::TooManyStates(n));
    }
    if k > MAX_ENCODED_TAPES {
        return Err(EncodingError::TooManyTapes(k));
    }
    let w = next_width(n);
    let mut out = BitString::empty();
    push_uint(&mut out, n);
    push_uint(&mut out, k);
    push_uint(&mut out, machine.start());
    for st in machine.states() {
        out.push(st.consumes);
        for a in &st.actions {
            for t in 0..k {
                out.push(a.write[t]);
                push_move(&mut out, a.moves[t]);
            }
            match a.emit {
                None => {
                    out.push(false);
                    out.push(false);
                }
                Some(b) => {
                    out.push(true);
                    out.push(b);
                }
            }
            out.push(a.halt);
            out.extend_from(&BitString::from_uint(a.next as u64, w));
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn bit(&mut self) -> Result<bool, DecodeError> {
        let b = *self.bits.get(self.pos).ok_or(DecodeError::Truncated { position: self.pos })?;
        self.pos += 1;
        Ok(b)
    }

    fn invalid(&self, reason: &'static str) -> DecodeError {
        DecodeError::Invalid { position: self.pos, reason }
    }

    fn uint(&mut self, prefix_cap: usize) -> Result<usize, DecodeError> {
        let mut ones = 0;
        while self.bit()? {
            ones += 1;
            if ones > prefix_cap {
                return Err(self.invalid("integer length prefix too long"));
            }
        }
        let m = ones + 1;
        let mut v = 0usize;
        for i in 0..m {
            let b = self.bit()?;
            if i == 0 && m > 1 && !b {
                return Err(self.invalid("integer has a leading zero"));
            }
            v = (v << 1) | b as usize;
        }
        Ok(v)
    }

    fn bits_value(&mut self, w: usize) -> Result<usize, DecodeError> {
        let mut v = 0;
        for _ in 0..w {
            v = (v << 1) | self.bit()? as usize;
        }
        Ok(v)
    }
}

/// Decodes a description from the front of `bits`, returning the machine and
/// the number of bits the description occupies.
pub fn decode_machine(bits: &[bool]) -> Result<(MachineSpec, usize), DecodeError> {
    let mut r = Reader { bits, pos: 0 };
    let n = r.uint(STATES_PREFIX_CAP)?;
    if !(1..=MAX_ENCODED_STATES).contains(&n) {
        return Err(r.invalid("state count out of range"));
    }
    let k = r.uint(TAPES_PREFIX_CAP)?;
    if !(1..=MAX_ENCODED_TAPES).contains(&k) {
        return Err(r.invalid("work tape count out of range"));
    }
    let start = r.uint(START_PREFIX_CAP)?;
    if start >= n {
        return Err(r.invalid("start state out of range"));
    }
    let w = next_width(n);
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let consumes = r.bit()?;
        let count = (1usize << k) * if consumes { 2 } else { 1 };
        let mut actions = Vec::with_capacity(count);
        for _ in 0..count {
            let mut write = [false; MAX_WORK_TAPES];
            let mut moves = [Move::Stay; MAX_WORK_TAPES];
            for t in 0..k {
                write[t] = r.bit()?;
                let hi = r.bit()?;
                let lo = r.bit()?;
                moves[t] = match (hi, lo) {
                    (false, false) => Move::Stay,
                    (false, true) => Move::Left,
                    (true, false) => Move::Right,
                    (true, true) => return Err(r.invalid("invalid move code")),
                };
            }
            let e1 = r.bit()?;
            let e2 = r.bit()?;
            let emit = match (e1, e2) {
                (false, false) => None,
                (false, true) => return Err(r.invalid("invalid emit code")),
                (true, b) => Some(b),
            };
            let halt = r.bit()?;
            let next = r.bits_value(w)?;
            if next >= n {
                return Err(r.invalid("next state out of range"));
            }
            actions.push(Action { next, write, moves, emit, halt });
        }
        states.push(State { name: format!("s{i}"), consumes, actions });
    }
    let spec = MachineSpec::new(k, start, states).expect("decoded table is total");
    Ok((spec, r.pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::library;
    use crate::mtm::random::{random_machine, RandomMachineParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integer_code() {
        let mut b = BitString::empty();
        push_uint(&mut b, 0);
        assert_eq!(b, bits("00"));
        let mut b = BitString::empty();
        push_uint(&mut b, 5);
        assert_eq!(b, bits("110101"));
    }

    #[test]
    fn round_trip_library() {
        for m in library::suite() {
            let code = encode_machine(&m.machine).unwrap();
            let (back, used) = decode_machine(code.bits()).unwrap();
            assert_eq!(back, m.machine, "{}", m.name);
            assert_eq!(used, code.len());
            assert_eq!(encode_machine(&m.machine).unwrap(), code);
        }
    }

    #[test]
    fn random_encodings_are_prefix_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = RandomMachineParams { max_states: 5, ..Default::default() };
        let codes: Vec<BitString> =
            (0..50).map(|_| encode_machine(&random_machine(&mut rng, &params)).unwrap()).collect();
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                if i != j && a != b {
                    assert!(!a.is_prefix_of(b), "{i} is a prefix of {j}");
                }
            }
        }
    }

    #[test]
    fn overflow() {
        let params = RandomMachineParams { work_tapes: 3, ..Default::default() };
        let m = random_machine(&mut ChaCha8Rng::seed_from_u64(1), &params);
        assert_eq!(encode_machine(&m), Err(EncodingError::TooManyTapes(3)));
    }

    #[test]
    fn malformed_prefixes() {
        // five leading ones: state count prefix too long
        assert_eq!(decode_machine(bits("11111").bits()).unwrap_err().position(), 5);
        // state count 0
        assert_eq!(
            decode_machine(bits("00").bits()).unwrap_err(),
            DecodeError::Invalid { position: 2, reason: "state count out of range" }
        );
        // non-canonical 2-digit integer
        assert_eq!(decode_machine(bits("100").bits()).unwrap_err().position(), 3);
        assert!(matches!(decode_machine(bits("01").bits()), Err(DecodeError::Truncated { position: 2 })));
    }
}

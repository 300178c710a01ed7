//! Transition tables for deterministic monotone Turing machines.
//!
//! A machine has a finite control, a unidirectional read-only input tape, a
//! unidirectional write-only output tape and `k` binary work tapes that start
//! as all zeros. Every state is either *consuming* (its transition is chosen
//! by the next input bit, which is then read and the input head advances) or
//! *non-consuming* (it never looks at the input). The transition key is the
//! optional input bit plus the bits under the `k` work heads.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_WORK_TAPES: usize = 4;
pub const DEFAULT_WORK_TAPES: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("work tape count {0} outside 1..={MAX_WORK_TAPES}")]
    WorkTapes(usize),
    #[error("machine has no states")]
    NoStates,
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("state {state:?}: two transitions for key {key}")]
    DuplicateTransition { state: String, key: String },
    #[error("state {state:?}: no transition for key {key}")]
    MissingTransition { state: String, key: String },
    #[error("state {0:?} mixes consuming and non-consuming transitions")]
    MixedInputMode(String),
    #[error("bad field {field:?} = {value:?}: {reason}")]
    BadField { field: &'static str, value: String, reason: String },
    #[error("rule line {line}: {reason}")]
    RuleSyntax { line: usize, reason: String },
    #[error("malformed machine file: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn symbol(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Stay => 'S',
        }
    }

    pub fn from_symbol(c: char) -> Option<Move> {
        match c {
            'L' => Some(Move::Left),
            'R' => Some(Move::Right),
            'S' => Some(Move::Stay),
            _ => None,
        }
    }
}

/// What one transition does. Only the first `k` slots of `write`/`moves` are
/// meaningful; the rest are kept at `false`/`Stay`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub next: usize,
    pub write: [bool; MAX_WORK_TAPES],
    pub moves: [Move; MAX_WORK_TAPES],
    pub emit: Option<bool>,
    pub halt: bool,
}

#[derive(Clone, Debug)]
pub struct State {
    pub name: String,
    pub consumes: bool,
    /// Indexed by `(input_bit << k) | pattern`; pattern has tape 0 as its most
    /// significant bit.
    pub actions: Vec<Action>,
}

/// An immutable, validated machine. Every state has exactly one transition per
/// possible key, so the run relation is total and deterministic.
#[derive(Clone, Debug)]
pub struct MachineSpec {
    work_tapes: usize,
    start: usize,
    states: Vec<State>,
}

/// Structural equality: same tape count, start index and transition table.
/// State names are labels only and do not take part.
impl PartialEq for MachineSpec {
    fn eq(&self, other: &Self) -> bool {
        self.work_tapes == other.work_tapes
            && self.start == other.start
            && self.states.len() == other.states.len()
            && self.states.iter().zip(&other.states).all(|(a, b)| a.consumes == b.consumes && a.actions == b.actions)
    }
}

impl Eq for MachineSpec {}

pub(crate) fn pattern_string(pattern: usize, k: usize) -> String {
    (0..k).map(|t| if (pattern >> (k - 1 - t)) & 1 == 1 { '1' } else { '0' }).collect()
}

fn key_string(input: Option<bool>, pattern: usize, k: usize) -> String {
    let i = match input {
        None => '_',
        Some(false) => '0',
        Some(true) => '1',
    };
    format!("input={i} work={}", pattern_string(pattern, k))
}

impl MachineSpec {
    /// Validates and freezes a transition table.
    pub fn new(work_tapes: usize, start: usize, states: Vec<State>) -> Result<Self, MachineError> {
        if !(1..=MAX_WORK_TAPES).contains(&work_tapes) {
            return Err(MachineError::WorkTapes(work_tapes));
        }
        if states.is_empty() {
            return Err(MachineError::NoStates);
        }
        if start >= states.len() {
            return Err(MachineError::UnknownState(format!("#{start}")));
        }
        let n = states.len();
        let mut states = states;
        for st in &mut states {
            let expected = (1usize << work_tapes) * if st.consumes { 2 } else { 1 };
            if st.actions.len() != expected {
                let idx = st.actions.len().min(expected - 1);
                let (input, pattern) = if st.consumes {
                    (Some(idx >> work_tapes == 1), idx & ((1 << work_tapes) - 1))
                } else {
                    (None, idx)
                };
                return Err(MachineError::MissingTransition {
                    state: st.name.clone(),
                    key: key_string(input, pattern, work_tapes),
                });
            }
            for a in &mut st.actions {
                if a.next >= n {
                    return Err(MachineError::UnknownState(format!("#{}", a.next)));
                }
                for t in work_tapes..MAX_WORK_TAPES {
                    a.write[t] = false;
                    a.moves[t] = Move::Stay;
                }
            }
        }
        Ok(MachineSpec { work_tapes, start, states })
    }

    pub fn work_tapes(&self) -> usize {
        self.work_tapes
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.states.iter().map(|s| s.actions.len()).sum()
    }

    #[inline]
    pub(crate) fn action(&self, state: usize, input: Option<bool>, pattern: usize) -> &Action {
        let idx = match input {
            Some(true) => (1 << self.work_tapes) | pattern,
            _ => pattern,
        };
        &self.states[state].actions[idx]
    }

    /// Loads the JSON machine file format (see [`MachineFile`]).
    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        let file: MachineFile = serde_json::from_str(text).map_err(|e| MachineError::Json(e.to_string()))?;
        file.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MachineFile::from_spec(self)).expect("machine serializes")
    }

    /// Builds a machine from a compact line-oriented rule list.
    ///
    /// Each non-empty line reads
    /// `from input work -> to write moves emit [halt]`, where `input` is
    /// `0`, `1` or `_` (non-consuming), `work` is a `k`-character pattern
    /// over `0`, `1`, `*` (wildcard), `write` is over `0`, `1`, `*` (keep the
    /// bit that was read), `moves` is over `L`, `R`, `S`, and `emit` is `0`,
    /// `1` or `_`. Later lines never override earlier ones; overlapping keys
    /// are an error. `#` starts a comment.
    pub fn from_rules(work_tapes: usize, start: &str, rules: &str) -> Result<Self, MachineError> {
        let mut table = TableBuilder::new(work_tapes)?;
        for (lineno, raw) in rules.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| MachineError::RuleSyntax { line: lineno + 1, reason: reason.to_string() };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < 8 || tokens.len() > 9 || tokens[3] != "->" {
                return Err(err("expected `from input work -> to write moves emit [halt]`"));
            }
            let input = parse_opt_bit(tokens[1]).ok_or_else(|| err("input must be 0, 1 or _"))?;
            let read = tokens[2];
            let write = tokens[5];
            let moves = tokens[6];
            let emit = parse_opt_bit(tokens[7]).ok_or_else(|| err("emit must be 0, 1 or _"))?;
            let halt = match tokens.get(8) {
                None => false,
                Some(&"halt") => true,
                Some(_) => return Err(err("trailing token must be `halt`")),
            };
            if read.len() != work_tapes || write.len() != work_tapes || moves.len() != work_tapes {
                return Err(err("work/write/moves must have one symbol per work tape"));
            }
            let moves: Vec<Move> = moves
                .chars()
                .map(Move::from_symbol)
                .collect::<Option<_>>()
                .ok_or_else(|| err("moves must be over L, R, S"))?;
            let read_chars: Vec<char> = read.chars().collect();
            let write_chars: Vec<char> = write.chars().collect();
            if read_chars.iter().any(|c| !matches!(c, '0' | '1' | '*'))
                || write_chars.iter().any(|c| !matches!(c, '0' | '1' | '*'))
            {
                return Err(err("work/write patterns must be over 0, 1, *"));
            }
            for pattern in 0..1usize << work_tapes {
                let bit = |t: usize| (pattern >> (work_tapes - 1 - t)) & 1 == 1;
                let matches = read_chars.iter().enumerate().all(|(t, &c)| match c {
                    '*' => true,
                    '1' => bit(t),
                    _ => !bit(t),
                });
                if !matches {
                    continue;
                }
                let mut w = [false; MAX_WORK_TAPES];
                let mut m = [Move::Stay; MAX_WORK_TAPES];
                for t in 0..work_tapes {
                    w[t] = match write_chars[t] {
                        '*' => bit(t),
                        c => c == '1',
                    };
                    m[t] = moves[t];
                }
                table.add(tokens[0], input, pattern, tokens[4], w, m, emit, halt)?;
            }
        }
        table.finish(start)
    }
}

fn parse_opt_bit(s: &str) -> Option<Option<bool>> {
    match s {
        "_" => Some(None),
        "0" => Some(Some(false)),
        "1" => Some(Some(true)),
        _ => None,
    }
}

/// Accumulates transitions keyed by state name and checks totality at the end.
/// Transitions out of one state, keyed by (input bit, work pattern), holding
/// the next state's name and an action whose `next` is a placeholder.
type PendingRow = HashMap<(Option<bool>, usize), (String, Action)>;

pub(crate) struct TableBuilder {
    work_tapes: usize,
    names: Vec<String>,
    ids: HashMap<String, usize>,
    consume_mode: Vec<Option<bool>>,
    entries: Vec<PendingRow>,
}

impl TableBuilder {
    pub(crate) fn new(work_tapes: usize) -> Result<Self, MachineError> {
        if !(1..=MAX_WORK_TAPES).contains(&work_tapes) {
            return Err(MachineError::WorkTapes(work_tapes));
        }
        Ok(TableBuilder {
            work_tapes,
            names: Vec::new(),
            ids: HashMap::new(),
            consume_mode: Vec::new(),
            entries: Vec::new(),
        })
    }

    pub(crate) fn declare(&mut self, name: &str) -> Result<usize, MachineError> {
        if self.ids.contains_key(name) {
            return Err(MachineError::DuplicateState(name.to_string()));
        }
        Ok(self.intern(name))
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        self.consume_mode.push(None);
        self.entries.push(HashMap::new());
        id
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn add(
        &mut self,
        from: &str,
        input: Option<bool>,
        pattern: usize,
        to: &str,
        write: [bool; MAX_WORK_TAPES],
        moves: [Move; MAX_WORK_TAPES],
        emit: Option<bool>,
        halt: bool,
    ) -> Result<(), MachineError> {
        let id = self.intern(from);
        let mode = input.is_some();
        match self.consume_mode[id] {
            None => self.consume_mode[id] = Some(mode),
            Some(m) if m != mode => return Err(MachineError::MixedInputMode(from.to_string())),
            _ => {}
        }
        let key = (input, pattern);
        if self.entries[id].contains_key(&key) {
            return Err(MachineError::DuplicateTransition {
                state: from.to_string(),
                key: key_string(input, pattern, self.work_tapes),
            });
        }
        let action = Action { next: 0, write, moves, emit, halt };
        self.entries[id].insert(key, (to.to_string(), action));
        Ok(())
    }

    pub(crate) fn finish(self, start: &str) -> Result<MachineSpec, MachineError> {
        let k = self.work_tapes;
        let start = *self.ids.get(start).ok_or_else(|| MachineError::UnknownState(start.to_string()))?;
        let mut states = Vec::with_capacity(self.names.len());
        for (id, name) in self.names.iter().enumerate() {
            let consumes = self.consume_mode[id].unwrap_or(false);
            let inputs: Vec<Option<bool>> = if consumes { vec![Some(false), Some(true)] } else { vec![None] };
            let mut actions = Vec::with_capacity(inputs.len() << k);
            for input in inputs {
                for pattern in 0..1usize << k {
                    let (to, action) = self.entries[id].get(&(input, pattern)).ok_or_else(|| {
                        MachineError::MissingTransition { state: name.clone(), key: key_string(input, pattern, k) }
                    })?;
                    let next = *self.ids.get(to).ok_or_else(|| MachineError::UnknownState(to.clone()))?;
                    actions.push(Action { next, ..action.clone() });
                }
            }
            states.push(State { name: name.clone(), consumes, actions });
        }
        MachineSpec::new(k, start, states)
    }
}

// ---------------------------------------------------------------------------
// JSON file format
// ---------------------------------------------------------------------------

/// On-disk machine description.
///
/// ```json
/// {
///   "states": ["s"],
///   "start": "s",
///   "work_tapes": 1,
///   "transitions": [
///     {"from": "s", "consume": "0", "read": "0", "to": "s",
///      "write": "0", "move": "S", "emit": "0", "halt": false},
///     ...
///   ]
/// }
/// ```
///
/// `consume` is `null` for non-consuming states and the input bit otherwise;
/// `read`, `write` and `move` carry one symbol per work tape; `emit` is
/// `null` or a single bit. Every state needs one record per key.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub states: Vec<String>,
    pub start: String,
    pub work_tapes: usize,
    pub transitions: Vec<TransitionRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub from: String,
    pub consume: Option<String>,
    pub read: String,
    pub to: String,
    pub write: String,
    #[serde(rename = "move")]
    pub moves: String,
    pub emit: Option<String>,
    pub halt: bool,
}

fn bit_field(field: &'static str, s: &str) -> Result<bool, MachineError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(MachineError::BadField { field, value: s.to_string(), reason: "expected \"0\" or \"1\"".into() }),
    }
}

fn bits_field(field: &'static str, s: &str, k: usize) -> Result<Vec<bool>, MachineError> {
    if s.chars().count() != k {
        return Err(MachineError::BadField { field, value: s.to_string(), reason: format!("expected {k} symbols") });
    }
    s.chars().map(|c| bit_field(field, &c.to_string())).collect()
}

impl MachineFile {
    pub fn into_spec(self) -> Result<MachineSpec, MachineError> {
        let k = self.work_tapes;
        let mut table = TableBuilder::new(k)?;
        for name in &self.states {
            table.declare(name)?;
        }
        for rec in &self.transitions {
            for name in [&rec.from, &rec.to] {
                if !self.states.contains(name) {
                    return Err(MachineError::UnknownState(name.clone()));
                }
            }
            let input = rec.consume.as_deref().map(|s| bit_field("consume", s)).transpose()?;
            let read = bits_field("read", &rec.read, k)?;
            let pattern = read.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            let write_bits = bits_field("write", &rec.write, k)?;
            if rec.moves.chars().count() != k {
                return Err(MachineError::BadField {
                    field: "move",
                    value: rec.moves.clone(),
                    reason: format!("expected {k} symbols"),
                });
            }
            let mut write = [false; MAX_WORK_TAPES];
            let mut moves = [Move::Stay; MAX_WORK_TAPES];
            for (t, c) in rec.moves.chars().enumerate() {
                moves[t] = Move::from_symbol(c).ok_or_else(|| MachineError::BadField {
                    field: "move",
                    value: rec.moves.clone(),
                    reason: "expected L, R or S".into(),
                })?;
                write[t] = write_bits[t];
            }
            let emit = rec.emit.as_deref().map(|s| bit_field("emit", s)).transpose()?;
            table.add(&rec.from, input, pattern, &rec.to, write, moves, emit, rec.halt)?;
        }
        table.finish(&self.start)
    }

    pub fn from_spec(spec: &MachineSpec) -> Self {
        let k = spec.work_tapes;
        let names: Vec<String> = spec.states.iter().map(|s| s.name.clone()).collect();
        let mut transitions = Vec::with_capacity(spec.transition_count());
        let bit = |b: bool| if b { "1".to_string() } else { "0".to_string() };
        for st in &spec.states {
            for (idx, a) in st.actions.iter().enumerate() {
                let pattern = idx & ((1 << k) - 1);
                transitions.push(TransitionRecord {
                    from: st.name.clone(),
                    consume: st.consumes.then(|| bit(idx >> k == 1)),
                    read: pattern_string(pattern, k),
                    to: names[a.next].clone(),
                    write: a.write[..k].iter().map(|&b| if b { '1' } else { '0' }).collect(),
                    moves: a.moves[..k].iter().map(|m| m.symbol()).collect(),
                    emit: a.emit.map(bit),
                    halt: a.halt,
                });
            }
        }
        MachineFile { states: names.clone(), start: names[spec.start].clone(), work_tapes: k, transitions }
    }
}

impl fmt::Display for MachineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "machine({} states, {} work tapes, start {:?})",
            self.states.len(),
            self.work_tapes,
            self.states[self.start].name
        )
    }
}

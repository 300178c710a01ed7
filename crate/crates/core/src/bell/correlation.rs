//! Two-party correlations `P(v, w | a, b)` with binary settings.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::BellError;
use crate::rational::{self, Rational};

/// Alice's outcome; `Null` is the non-detection outcome `∅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AliceOutcome {
    Null,
    Minus,
    Plus,
}

/// Bob's outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "-1" | "-" => Some(Sign::Minus),
            "+1" | "+" | "1" => Some(Sign::Plus),
            _ => None,
        }
    }
}

impl AliceOutcome {
    pub const ALL: [AliceOutcome; 3] = [AliceOutcome::Null, AliceOutcome::Minus, AliceOutcome::Plus];
    pub const DETECTED: [AliceOutcome; 2] = [AliceOutcome::Minus, AliceOutcome::Plus];

    /// `±1`, or `None` for `∅`.
    pub fn value(self) -> Option<i64> {
        match self {
            AliceOutcome::Null => None,
            AliceOutcome::Minus => Some(-1),
            AliceOutcome::Plus => Some(1),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            AliceOutcome::Null => '∅',
            AliceOutcome::Minus => '-',
            AliceOutcome::Plus => '+',
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AliceOutcome::Null => "∅",
            AliceOutcome::Minus => "-1",
            AliceOutcome::Plus => "+1",
        }
    }

    pub fn parse(s: &str) -> Option<AliceOutcome> {
        match s {
            "∅" | "null" | "0" => Some(AliceOutcome::Null),
            _ => Sign::parse(s).map(AliceOutcome::from),
        }
    }
}

impl From<Sign> for AliceOutcome {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Minus => AliceOutcome::Minus,
            Sign::Plus => AliceOutcome::Plus,
        }
    }
}

impl Sign {
    pub fn label(self) -> &'static str {
        match self {
            Sign::Minus => "-1",
            Sign::Plus => "+1",
        }
    }
}

/// Settings `(a, b)` in column order.
pub const SETTINGS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

const ENTRIES: usize = 4 * 3 * 2;

fn index(v: AliceOutcome, w: Sign, a: usize, b: usize) -> usize {
    ((a * 2 + b) * 3 + v as usize) * 2 + w as usize
}

/// `P(v, w | a, b)` with exact entries. Without the `∅` outcome all `∅`
/// entries are zero and are not displayed or serialized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CorrelationFile", into = "CorrelationFile")]
pub struct Correlation {
    null_outcome: bool,
    p: Vec<Rational>,
}

impl Correlation {
    pub fn from_fn(
        null_outcome: bool,
        f: impl Fn(AliceOutcome, Sign, usize, usize) -> Rational,
    ) -> Result<Self, BellError> {
        let mut p = vec![Rational::zero(); ENTRIES];
        for (a, b) in SETTINGS {
            for v in AliceOutcome::ALL {
                for w in Sign::ALL {
                    p[index(v, w, a, b)] = f(v, w, a, b);
                }
            }
        }
        let c = Correlation { null_outcome, p };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), BellError> {
        let bad = |m: String| Err(BellError::InvalidCorrelation(m));
        for (a, b) in SETTINGS {
            let mut total = Rational::zero();
            for v in AliceOutcome::ALL {
                for w in Sign::ALL {
                    let x = self.get(v, w, a, b);
                    if x.is_negative() {
                        return bad(format!("P({},{}|{a},{b}) is negative", v.label(), w.label()));
                    }
                    if v == AliceOutcome::Null && !self.null_outcome && !x.is_zero() {
                        return bad("∅ entries must be zero without the ∅ outcome".into());
                    }
                    total += x;
                }
            }
            if !total.is_one() {
                return bad(format!("entries for (a,b)=({a},{b}) sum to {}", rational::format(&total)));
            }
        }
        Ok(())
    }

    pub fn get(&self, v: AliceOutcome, w: Sign, a: usize, b: usize) -> &Rational {
        &self.p[index(v, w, a, b)]
    }

    pub fn has_null_outcome(&self) -> bool {
        self.null_outcome
    }

    /// The Alice outcomes that appear in this table.
    pub fn alice_outcomes(&self) -> &'static [AliceOutcome] {
        if self.null_outcome {
            &AliceOutcome::ALL
        } else {
            &AliceOutcome::DETECTED
        }
    }

    /// Rows `(v, w)` in display order.
    pub fn rows(&self) -> Vec<(AliceOutcome, Sign)> {
        self.alice_outcomes().iter().flat_map(|&v| Sign::ALL.map(|w| (v, w))).collect()
    }

    /// `Σ_w P(v, w | a, b)`.
    pub fn alice_marginal(&self, v: AliceOutcome, a: usize, b: usize) -> Rational {
        Sign::ALL.iter().map(|&w| self.get(v, w, a, b)).sum()
    }

    /// `Σ_v P(v, w | a, b)`, including `v = ∅`.
    pub fn bob_marginal(&self, w: Sign, a: usize, b: usize) -> Rational {
        AliceOutcome::ALL.iter().map(|&v| self.get(v, w, a, b)).sum()
    }

    /// `P(∅ | a, b)`.
    pub fn null_probability(&self, a: usize, b: usize) -> Rational {
        self.alice_marginal(AliceOutcome::Null, a, b)
    }

    /// The behavior of fixed local responses.
    pub fn deterministic(alice: [AliceOutcome; 2], bob: [Sign; 2]) -> Self {
        let null_outcome = alice.contains(&AliceOutcome::Null);
        Correlation::from_fn(null_outcome, |v, w, a, b| {
            if alice[a] == v && bob[b] == w {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .expect("deterministic behaviors are valid")
    }

    /// `P(v,w|a,b) = 1/2` iff `v·w = (−1)^{ab}`.
    pub fn pr_box() -> Self {
        Correlation::from_fn(false, |v, w, a, b| match v.value() {
            Some(x) if x * w.value() == if a * b == 1 { -1 } else { 1 } => rational::ratio(1, 2),
            _ => Rational::zero(),
        })
        .expect("the PR box is valid")
    }

    /// `P(v,w|a,b) = 1/4` on the detected outcomes.
    pub fn uniform() -> Self {
        Correlation::from_fn(
            false,
            |v, _, _, _| {
                if v == AliceOutcome::Null {
                    Rational::zero()
                } else {
                    rational::ratio(1, 4)
                }
            },
        )
        .expect("uniform is valid")
    }

    /// `Σ_k weight_k · P_k`; the weights must sum to 1.
    pub fn mixture(parts: &[(Rational, Correlation)]) -> Result<Self, BellError> {
        let null_outcome = parts.iter().any(|(_, c)| c.null_outcome);
        Correlation::from_fn(null_outcome, |v, w, a, b| parts.iter().map(|(q, c)| q * c.get(v, w, a, b)).sum())
    }

    /// Entries as a flat vector over `(a, b)` then `v` then `w`, using only
    /// the outcomes that appear.
    pub fn flat_entries(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for (a, b) in SETTINGS {
            for (v, w) in self.rows() {
                out.push(self.get(v, w, a, b).clone());
            }
        }
        out
    }

    /// Same entries, widened to include the `∅` rows.
    pub fn with_null_outcome(&self) -> Correlation {
        Correlation { null_outcome: true, p: self.p.clone() }
    }
}

/// Rows `(v, w)`, columns `(a, b)`.
impl fmt::Display for Correlation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .rows()
            .iter()
            .map(|&(v, w)| SETTINGS.iter().map(|&(a, b)| rational::display(self.get(v, w, a, b))).collect())
            .collect();
        let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1).max(5);
        write!(f, "{:<9}", "(v,w)")?;
        for (a, b) in SETTINGS {
            write!(f, " {:>width$}", format!("({a},{b})"))?;
        }
        writeln!(f)?;
        for ((v, w), row) in self.rows().iter().zip(&cells) {
            write!(f, "{:<9}", format!("({},{})", v.label(), w.label()))?;
            for c in row {
                write!(f, " {c:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationFile {
    #[serde(default)]
    pub null_outcome: bool,
    /// One row per `(v, w)`; `p` lists the columns `(0,0), (0,1), (1,0), (1,1)`.
    pub rows: Vec<CorrelationRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationRow {
    pub v: String,
    pub w: String,
    #[serde(with = "rational::serde_vec_str")]
    pub p: Vec<Rational>,
}

impl TryFrom<CorrelationFile> for Correlation {
    type Error = BellError;

    fn try_from(file: CorrelationFile) -> Result<Self, BellError> {
        let bad = |m: String| BellError::InvalidCorrelation(m);
        let mut p = vec![Rational::zero(); ENTRIES];
        let mut seen = [false; 6];
        for row in &file.rows {
            let v = AliceOutcome::parse(&row.v).ok_or_else(|| bad(format!("unknown Alice outcome {:?}", row.v)))?;
            let w = Sign::parse(&row.w).ok_or_else(|| bad(format!("unknown Bob outcome {:?}", row.w)))?;
            if row.p.len() != 4 {
                return Err(bad(format!("row ({},{}) needs 4 columns", row.v, row.w)));
            }
            let slot = v as usize * 2 + w as usize;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(bad(format!("row ({},{}) given twice", row.v, row.w)));
            }
            for (&(a, b), x) in SETTINGS.iter().zip(&row.p) {
                p[index(v, w, a, b)] = x.clone();
            }
        }
        let c = Correlation { null_outcome: file.null_outcome, p };
        c.validate()?;
        Ok(c)
    }
}

impl From<Correlation> for CorrelationFile {
    fn from(c: Correlation) -> Self {
        let rows = c
            .rows()
            .into_iter()
            .map(|(v, w)| CorrelationRow {
                v: v.label().to_string(),
                w: w.label().to_string(),
                p: SETTINGS.iter().map(|&(a, b)| c.get(v, w, a, b).clone()).collect(),
            })
            .collect();
        CorrelationFile { null_outcome: c.null_outcome, rows }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshClass {
    /// `value <= 2`.
    ClassicalCompatible,
    /// `2 < value <= 2√2`.
    QuantumRange,
    /// `value > 2√2`.
    Superquantum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChshReport {
    /// `E_{00}, E_{01}, E_{10}, E_{11}`.
    #[serde(with = "rational::serde_vec_str")]
    pub correlators: Vec<Rational>,
    /// `|E00 + E01 + E10 − E11|`.
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub class: ChshClass,
    pub classical_bound: i64,
    /// The quantum bound is `2√2`; it is compared through `value² <= 8`.
    pub tsirelson_bound_squared: i64,
    pub exceeds_classical: bool,
    pub exceeds_tsirelson: bool,
}

pub fn chsh(p: &Correlation) -> Result<ChshReport, BellError> {
    if SETTINGS.iter().any(|&(a, b)| !p.null_probability(a, b).is_zero()) {
        return Err(BellError::NullOutcomePresent);
    }
    let correlators: Vec<Rational> = SETTINGS
        .iter()
        .map(|&(a, b)| {
            AliceOutcome::DETECTED
                .iter()
                .flat_map(|&v| Sign::ALL.map(move |w| (v, w)))
                .map(|(v, w)| rational::int(v.value().unwrap() * w.value()) * p.get(v, w, a, b))
                .sum()
        })
        .collect();
    let value = (&correlators[0] + &correlators[1] + &correlators[2] - &correlators[3]).abs();
    let two = rational::int(2);
    let squared = &value * &value;
    let exceeds_classical = value > two;
    let exceeds_tsirelson = squared > rational::int(8);
    let class = if !exceeds_classical {
        ChshClass::ClassicalCompatible
    } else if !exceeds_tsirelson {
        ChshClass::QuantumRange
    } else {
        ChshClass::Superquantum
    };
    Ok(ChshReport {
        correlators,
        value,
        class,
        classical_bound: 2,
        tsirelson_bound_squared: 8,
        exceeds_classical,
        exceeds_tsirelson,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignallingReport {
    /// `max |Σ_v P(v,w|a,b) − Σ_v P(v,w|a',b)|`.
    #[serde(with = "rational::serde_str")]
    pub a_to_b: Rational,
    /// `max |Σ_w P(v,w|a,b) − Σ_w P(v,w|a,b')|`.
    #[serde(with = "rational::serde_str")]
    pub b_to_a: Rational,
    pub nonsignalling: bool,
}

pub fn signalling_report(p: &Correlation) -> SignallingReport {
    let mut a_to_b = Rational::zero();
    for b in 0..2 {
        for w in Sign::ALL {
            let d = rational::abs_diff(&p.bob_marginal(w, 0, b), &p.bob_marginal(w, 1, b));
            a_to_b = a_to_b.max(d);
        }
    }
    let mut b_to_a = Rational::zero();
    for a in 0..2 {
        for v in AliceOutcome::ALL {
            let d = rational::abs_diff(&p.alice_marginal(v, a, 0), &p.alice_marginal(v, a, 1));
            b_to_a = b_to_a.max(d);
        }
    }
    let nonsignalling = a_to_b.is_zero() && b_to_a.is_zero();
    SignallingReport { a_to_b, b_to_a, nonsignalling }
}

/// `P(v,w|a,b) = P0(v,w|a,b) / (1 − P0(∅|a))` for `v ≠ ∅`.
pub fn postselect(p0: &Correlation) -> Result<Correlation, BellError> {
    let mut keep = Vec::with_capacity(2);
    for a in 0..2 {
        let n0 = p0.null_probability(a, 0);
        if n0 != p0.null_probability(a, 1) {
            return Err(BellError::IllPosedPostselection { a });
        }
        if n0.is_one() {
            return Err(BellError::NullCertain { a });
        }
        keep.push(Rational::one() - n0);
    }
    Correlation::from_fn(false, |v, w, a, b| match v {
        AliceOutcome::Null => Rational::zero(),
        _ => p0.get(v, w, a, b) / &keep[a],
    })
}

/// Total-variation distance per setting.
pub fn total_variation(p: &Correlation, q: &Correlation) -> [Rational; 4] {
    SETTINGS.map(|(a, b)| {
        let s: Rational = AliceOutcome::ALL
            .iter()
            .flat_map(|&v| Sign::ALL.map(move |w| (v, w)))
            .map(|(v, w)| rational::abs_diff(p.get(v, w, a, b), q.get(v, w, a, b)))
            .sum();
        s / rational::int(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn pr_box_shape_and_chsh() {
        let pr = Correlation::pr_box();
        assert_eq!(pr.get(AliceOutcome::Minus, Sign::Minus, 0, 1), &ratio(1, 2));
        assert_eq!(pr.get(AliceOutcome::Plus, Sign::Minus, 1, 1), &ratio(1, 2));
        assert!(pr.get(AliceOutcome::Plus, Sign::Plus, 1, 1).is_zero());
        let r = chsh(&pr).unwrap();
        assert_eq!(r.value, rational::int(4));
        assert_eq!(r.class, ChshClass::Superquantum);
        assert!(signalling_report(&pr).nonsignalling);
    }

    #[test]
    fn chsh_boundary_cases() {
        assert!(chsh(&Correlation::uniform()).unwrap().value.is_zero());
        let d = Correlation::deterministic([AliceOutcome::Plus; 2], [Sign::Plus; 2]);
        let r = chsh(&d).unwrap();
        assert_eq!(r.correlators, vec![rational::int(1); 4]);
        assert_eq!(r.value, rational::int(2));
        assert_eq!(r.class, ChshClass::ClassicalCompatible);
    }

    /// A value just under 2√2 is quantum-range; just over is superquantum.
    #[test]
    fn tsirelson_comparison_by_squares() {
        let mix = |t: Rational| {
            Correlation::mixture(&[(t.clone(), Correlation::pr_box()), (Rational::one() - t, Correlation::uniform())])
                .unwrap()
        };
        // value = 4t; 2√2/4 ≈ 0.7071
        assert_eq!(chsh(&mix(ratio(7071, 10000))).unwrap().class, ChshClass::QuantumRange);
        assert_eq!(chsh(&mix(ratio(7072, 10000))).unwrap().class, ChshClass::Superquantum);
        assert_eq!(chsh(&mix(ratio(1, 2))).unwrap().class, ChshClass::ClassicalCompatible);
    }

    #[test]
    fn every_deterministic_local_behavior_is_within_two() {
        for a0 in AliceOutcome::DETECTED {
            for a1 in AliceOutcome::DETECTED {
                for b0 in Sign::ALL {
                    for b1 in Sign::ALL {
                        let d = Correlation::deterministic([a0, a1], [b0, b1]);
                        assert!(chsh(&d).unwrap().value <= rational::int(2));
                    }
                }
            }
        }
    }

    #[test]
    fn signalling_table() {
        // Bob's outcome copies Alice's setting.
        let s = Correlation::from_fn(false, |v, w, a, _| {
            let w_bit = usize::from(w == Sign::Plus);
            if v == AliceOutcome::Plus && w_bit == a {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .unwrap();
        let r = signalling_report(&s);
        assert_eq!(r.a_to_b, Rational::one());
        assert!(r.b_to_a.is_zero());
        assert!(!r.nonsignalling);
    }

    #[test]
    fn postselection_errors() {
        let always_null = Correlation::deterministic([AliceOutcome::Null, AliceOutcome::Plus], [Sign::Plus; 2]);
        assert_eq!(postselect(&always_null), Err(BellError::NullCertain { a: 0 }));
        // ∅ probability for a=0 depends on b
        let ill = Correlation::from_fn(true, |v, w, a, b| {
            let target = if a == 0 && b == 1 { AliceOutcome::Null } else { AliceOutcome::Plus };
            if v == target && w == Sign::Plus {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .unwrap();
        assert_eq!(postselect(&ill), Err(BellError::IllPosedPostselection { a: 0 }));
        let pr = Correlation::pr_box();
        assert_eq!(postselect(&pr).unwrap(), pr);
    }

    /// Product `P_A(v|a)·P_B(w|b)` with `∅` mass on Alice's side stays a
    /// product after postselection: `P(v,w|a,b) = P_A(v|a)/(1−P_A(∅|a)) · P_B(w|b)`.
    #[test]
    fn postselected_product_is_product() {
        let pa = |v: AliceOutcome, a: usize| match (v, a) {
            (AliceOutcome::Null, 0) => ratio(1, 3),
            (AliceOutcome::Minus, 0) => ratio(1, 6),
            (AliceOutcome::Plus, 0) => ratio(1, 2),
            (AliceOutcome::Null, _) => ratio(1, 5),
            (AliceOutcome::Minus, _) => ratio(2, 5),
            (AliceOutcome::Plus, _) => ratio(2, 5),
        };
        let pb = |w: Sign, b: usize| match (w, b) {
            (Sign::Minus, 0) => ratio(1, 7),
            (Sign::Plus, 0) => ratio(6, 7),
            (Sign::Minus, _) => ratio(1, 2),
            (Sign::Plus, _) => ratio(1, 2),
        };
        let p0 = Correlation::from_fn(true, |v, w, a, b| pa(v, a) * pb(w, b)).unwrap();
        let p = postselect(&p0).unwrap();
        for (a, b) in SETTINGS {
            for v in AliceOutcome::DETECTED {
                for w in Sign::ALL {
                    let expected = pa(v, a) / (Rational::one() - pa(AliceOutcome::Null, a)) * pb(w, b);
                    assert_eq!(p.get(v, w, a, b), &expected);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pr = Correlation::pr_box();
        let s = serde_json::to_string(&pr).unwrap();
        assert!(s.contains("\"1/2\""));
        let back: Correlation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pr);
        let bad = r#"{"rows":[{"v":"+1","w":"+1","p":["1","1","1","1/2"]}]}"#;
        assert!(serde_json::from_str::<Correlation>(bad).is_err());
    }
}

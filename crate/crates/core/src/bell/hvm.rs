//! Local hidden-variable models with deterministic responses.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::correlation::{AliceOutcome, Correlation, Sign};
use super::BellError;
use crate::rational::{self, Rational};

/// `λ = l_0 l_1 l'_0 l'_1`: Alice answers `l_a`, Bob answers `l'_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Responses {
    pub alice: [AliceOutcome; 2],
    pub bob: [Sign; 2],
}

impl Responses {
    pub fn behavior(&self) -> Correlation {
        Correlation::deterministic(self.alice, self.bob)
    }

    /// Every response pair, with or without `∅` on Alice's side.
    pub fn all(null_outcome: bool) -> Vec<Responses> {
        let alice: &[AliceOutcome] = if null_outcome { &AliceOutcome::ALL } else { &AliceOutcome::DETECTED };
        let mut out = Vec::new();
        for &l0 in alice {
            for &l1 in alice {
                for m0 in Sign::ALL {
                    for m1 in Sign::ALL {
                        out.push(Responses { alice: [l0, l1], bob: [m0, m1] });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Responses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.alice {
            write!(f, "{}", l.symbol())?;
        }
        for l in self.bob {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Responses {
    type Err = BellError;

    /// Four symbols from `+`, `-`, `∅` (or `0` for `∅`); only the first two
    /// may be `∅`.
    fn from_str(s: &str) -> Result<Self, BellError> {
        let bad = || BellError::InvalidModel(format!("bad response label {s:?}"));
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 4 {
            return Err(bad());
        }
        let alice = |c: char| match c {
            '+' => Some(AliceOutcome::Plus),
            '-' => Some(AliceOutcome::Minus),
            '∅' | '0' => Some(AliceOutcome::Null),
            _ => None,
        };
        let bob = |c: char| match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        };
        Ok(Responses {
            alice: [alice(chars[0]).ok_or_else(bad)?, alice(chars[1]).ok_or_else(bad)?],
            bob: [bob(chars[2]).ok_or_else(bad)?, bob(chars[3]).ok_or_else(bad)?],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenValue {
    pub q: Rational,
    pub responses: Responses,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct HiddenVariableModel {
    values: Vec<HiddenValue>,
}

impl HiddenVariableModel {
    pub fn new(values: Vec<HiddenValue>) -> Result<Self, BellError> {
        if values.is_empty() {
            return Err(BellError::InvalidModel("no hidden values".into()));
        }
        if let Some(v) = values.iter().find(|v| v.q.is_negative()) {
            return Err(BellError::InvalidModel(format!("q({}) is negative", v.responses)));
        }
        let total: Rational = values.iter().map(|v| &v.q).sum();
        if !total.is_one() {
            return Err(BellError::InvalidModel(format!("q sums to {}", rational::format(&total))));
        }
        Ok(HiddenVariableModel { values })
    }

    /// Equal weights on the given labels.
    pub fn uniform(labels: &[&str]) -> Result<Self, BellError> {
        let q = rational::ratio(1, labels.len().max(1) as i64);
        let values = labels
            .iter()
            .map(|l| Ok(HiddenValue { q: q.clone(), responses: l.parse()? }))
            .collect::<Result<_, BellError>>()?;
        Self::new(values)
    }

    /// The four-valued model whose postselection is the PR box.
    pub fn paper_model() -> Self {
        Self::uniform(&["+∅++", "∅++-", "∅--+", "-∅--"]).expect("valid model")
    }

    pub fn values(&self) -> &[HiddenValue] {
        &self.values
    }

    pub fn has_null_outcome(&self) -> bool {
        self.values.iter().any(|v| v.responses.alice.contains(&AliceOutcome::Null))
    }
}

/// `P_0(v,w|a,b) = Σ_λ q(λ) P_λ(v,w|a,b)`.
pub fn behavior_from_hvm(hvm: &HiddenVariableModel) -> Correlation {
    let parts: Vec<_> = hvm.values.iter().map(|v| (v.q.clone(), v.responses.behavior())).collect();
    Correlation::mixture(&parts).expect("a valid model gives a valid correlation")
}

/// A model with `n` random response pairs and random weights `k/Σk`,
/// `k ∈ 1..=10`.
pub fn random_hvm<R: Rng + ?Sized>(rng: &mut R, n: usize, null_outcome: bool) -> HiddenVariableModel {
    let all = Responses::all(null_outcome);
    let picks: Vec<(i64, Responses)> =
        (0..n.max(1)).map(|_| (rng.gen_range(1..=10), all[rng.gen_range(0..all.len())])).collect();
    let total: i64 = picks.iter().map(|p| p.0).sum();
    let values =
        picks.into_iter().map(|(k, responses)| HiddenValue { q: rational::ratio(k, total), responses }).collect();
    HiddenVariableModel::new(values).expect("weights sum to 1")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub values: Vec<ValueRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRecord {
    /// `l_0 l_1 l'_0 l'_1`, e.g. `"+∅++"`.
    pub lambda: String,
    #[serde(with = "rational::serde_str")]
    pub q: Rational,
}

impl TryFrom<ModelFile> for HiddenVariableModel {
    type Error = BellError;

    fn try_from(file: ModelFile) -> Result<Self, BellError> {
        let values = file
            .values
            .into_iter()
            .map(|r| Ok(HiddenValue { q: r.q, responses: r.lambda.parse()? }))
            .collect::<Result<_, BellError>>()?;
        Self::new(values)
    }
}

impl From<HiddenVariableModel> for ModelFile {
    fn from(m: HiddenVariableModel) -> Self {
        ModelFile {
            values: m.values.into_iter().map(|v| ValueRecord { lambda: v.responses.to_string(), q: v.q }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::correlation::SETTINGS;
    use crate::rational::ratio;
    use num_traits::Zero;

    #[test]
    fn paper_table() {
        let p0 = behavior_from_hvm(&HiddenVariableModel::paper_model());
        let q = ratio(1, 4);
        let z = Rational::zero();
        use AliceOutcome::*;
        // columns (0,0) (0,1) (1,0) (1,1)
        let expected: [(AliceOutcome, Sign, [&Rational; 4]); 6] = [
            (Null, Sign::Minus, [&q, &q, &q, &q]),
            (Null, Sign::Plus, [&q, &q, &q, &q]),
            (Minus, Sign::Minus, [&q, &q, &q, &z]),
            (Minus, Sign::Plus, [&z, &z, &z, &q]),
            (Plus, Sign::Minus, [&z, &z, &z, &q]),
            (Plus, Sign::Plus, [&q, &q, &q, &z]),
        ];
        for (v, w, row) in expected {
            for (&(a, b), x) in SETTINGS.iter().zip(row) {
                assert_eq!(p0.get(v, w, a, b), x, "({v:?},{w:?}|{a},{b})");
            }
        }
    }

    #[test]
    fn single_constant_value_is_point_mass() {
        let m = HiddenVariableModel::uniform(&["++++"]).unwrap();
        let p = behavior_from_hvm(&m);
        for (a, b) in SETTINGS {
            assert!(p.get(AliceOutcome::Plus, Sign::Plus, a, b).is_one());
        }
        assert!(!p.has_null_outcome());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let v = HiddenValue { q: ratio(1, 2), responses: "++++".parse().unwrap() };
        assert!(HiddenVariableModel::new(vec![v]).is_err());
        assert!("++∅+".parse::<Responses>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = HiddenVariableModel::paper_model();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"+∅++\""));
        let back: HiddenVariableModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}

//! Anything that assigns (bracketed) probabilities to finite strings.

use num_traits::{One, Zero};
use serde::Serialize;

use super::InductionError;
use crate::algprob::{EstimateTable, NodeValue, NormalizedMeasure};
use crate::bits::BitString;
use crate::mixture::MixtureState;
use crate::rational::{self, Rational};

/// A closed interval known to contain a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bracket {
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
}

impl Bracket {
    pub fn exact(v: Rational) -> Self {
        Bracket { lower: v.clone(), upper: v }
    }

    pub fn new(lower: Rational, upper: Rational) -> Self {
        debug_assert!(lower <= upper);
        Bracket { lower, upper }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn add(&self, other: &Bracket) -> Bracket {
        Bracket { lower: &self.lower + &other.lower, upper: &self.upper + &other.upper }
    }

    /// `[a, b] / [c, d]` for non-negative intervals, clamped to `[0, 1]`.
    /// Returns `None` when the denominator may be zero and the numerator may
    /// not (the ratio is then unconstrained beyond the clamp).
    pub fn ratio_clamped(&self, den: &Bracket) -> Option<Bracket> {
        if den.upper.is_zero() {
            return None;
        }
        let one = Rational::one();
        let lower = (&self.lower / &den.upper).min(one.clone());
        let upper = if den.lower.is_zero() { one } else { (&self.upper / &den.lower).min(one) };
        Some(Bracket { lower, upper })
    }

    /// `1 − [a, b]`.
    pub fn complement(&self) -> Bracket {
        let one = Rational::one();
        Bracket { lower: &one - &self.upper, upper: one - &self.lower }
    }
}

pub trait Predictor: Sync {
    fn describe(&self) -> String;

    /// A bracket around the predictor's value on `x`.
    fn bracket(&self, x: &BitString) -> Result<Bracket, InductionError>;
}

/// `M_V(x | z)`: the mixture conditioned on its current evidence.
impl Predictor for MixtureState {
    fn describe(&self) -> String {
        let names: Vec<_> = self.members().iter().map(|m| format!("{}:c={}", m.name, m.c)).collect();
        format!("mixture[{}] given {:?}", names.join(", "), self.z())
    }

    fn bracket(&self, x: &BitString) -> Result<Bracket, InductionError> {
        Ok(Bracket::exact(self.conditional(x)?))
    }
}

/// The normalized measure. Undefined nodes get `[0, P(a)]` where `a` is the
/// closest defined ancestor.
impl Predictor for NormalizedMeasure {
    fn describe(&self) -> String {
        format!(
            "normalized(depth={}, max_program_length={}, step_budget={})",
            self.depth, self.max_program_length, self.step_budget
        )
    }

    fn bracket(&self, x: &BitString) -> Result<Bracket, InductionError> {
        let out = || InductionError::OutOfDepth { node: x.clone(), depth: self.depth };
        match self.value(x).ok_or_else(out)? {
            NodeValue::Defined { value } => Ok(Bracket::exact(value.clone())),
            NodeValue::Undefined => {
                let mut a = x.clone();
                while a.pop().is_some() {
                    if let Some(v) = self.defined(&a) {
                        return Ok(Bracket::new(Rational::zero(), v.clone()));
                    }
                }
                unreachable!("the root is always defined")
            }
        }
    }
}

/// `[M_lower(x), M_upper(x)]` from a program-tree walk.
impl Predictor for EstimateTable {
    fn describe(&self) -> String {
        format!(
            "estimate(depth={}, max_program_length={}, step_budget={})",
            self.depth, self.max_program_length, self.step_budget
        )
    }

    fn bracket(&self, x: &BitString) -> Result<Bracket, InductionError> {
        let r = self.get(x).ok_or_else(|| InductionError::OutOfDepth { node: x.clone(), depth: self.depth })?;
        let upper = r.m_upper.clone().unwrap_or_else(Rational::one);
        Ok(Bracket::new(r.m_lower.clone(), upper))
    }
}

/// Next-bit probabilities from the lower ends of the brackets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NextBitPrediction {
    pub x: BitString,
    #[serde(with = "rational::serde_str")]
    pub p0: Rational,
    #[serde(with = "rational::serde_str")]
    pub p1: Rational,
    /// `1 − p0 − p1`: the mass lost at this node.
    #[serde(with = "rational::serde_str")]
    pub deficiency: Rational,
}

pub fn predict_next<P: Predictor + ?Sized>(predictor: &P, x: &BitString) -> Result<NextBitPrediction, InductionError> {
    let vx = predictor.bracket(x)?.lower;
    if vx.is_zero() {
        return Err(InductionError::ZeroConditioning(x.clone()));
    }
    let p0 = predictor.bracket(&x.child(false))?.lower / &vx;
    let p1 = predictor.bracket(&x.child(true))?.lower / &vx;
    let deficiency = Rational::one() - &p0 - &p1;
    Ok(NextBitPrediction { x: x.clone(), p0, p1, deficiency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algprob::{explore, normalize};
    use crate::bits::bits;
    use crate::mixture::{make_mixture, FamilyMember, MemberKind};
    use crate::mtm::library;
    use crate::rational::ratio;

    #[test]
    fn copy_machine_next_bit_is_fair() {
        let p = normalize(&library::copy(), 4, 10, 200);
        let r = predict_next(&p, &bits("110")).unwrap();
        assert_eq!(r.p0, ratio(1, 2));
        assert_eq!(r.p1, ratio(1, 2));
        assert!(r.deficiency.is_zero());
    }

    #[test]
    fn starved_estimates_show_deficiency() {
        let t = explore(&library::unary_echo(), 3, 4, 3);
        let r = predict_next(&t, &BitString::empty()).unwrap();
        assert!(r.deficiency > Rational::zero());
        for x in BitString::all_up_to(3) {
            let b = t.bracket(&x).unwrap();
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn mixture_predictions_are_exact() {
        let mix = make_mixture(vec![
            FamilyMember::new(0, "fair", 2, MemberKind::bernoulli(ratio(1, 2))),
            FamilyMember::new(1, "ones", 2, MemberKind::all_ones()),
        ])
        .unwrap();
        let r = predict_next(&mix, &BitString::empty()).unwrap();
        assert_eq!(r.p1, ratio(3, 4));
        assert_eq!(r.p0, ratio(1, 4));
    }

    #[test]
    fn ratio_brackets() {
        let num = Bracket::new(ratio(1, 4), ratio(1, 2));
        let den = Bracket::new(ratio(1, 2), Rational::one());
        let r = num.ratio_clamped(&den).unwrap();
        assert_eq!(r, Bracket::new(ratio(1, 4), Rational::one()));
        assert_eq!(r.complement(), Bracket::new(Rational::zero(), ratio(3, 4)));
        assert!(num.ratio_clamped(&Bracket::zero()).is_none());
    }
}

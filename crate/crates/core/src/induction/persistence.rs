//! How long a predictor keeps believing that a test will keep passing.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::predictor::{Bracket, Predictor};
use super::test::ComputableTest;
use super::InductionError;
use crate::bits::BitString;
use crate::rational::{self, Rational};

/// Frontiers larger than this abort the curve.
pub const DEFAULT_FRONTIER_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    pub j: usize,
    /// `p(1 | 1^j)`.
    pub p1: Bracket,
    /// `p(0 | 1^j) = 1 − p(1 | 1^j)`.
    pub exception: Bracket,
    /// `Σ_{i <= j} p(0 | 1^i)`.
    pub cum_exception: Bracket,
    /// `p(1^{j+1})`: mass of the strings of length `j + 1` whose test history
    /// is all ones.
    pub mass: Bracket,
    pub frontier_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PersistenceCurve {
    pub predictor: String,
    pub test: String,
    /// `p(1^0)`: the predictor's value on the empty string.
    pub initial_mass: Bracket,
    pub points: Vec<CurvePoint>,
    pub exact: bool,
}

impl PersistenceCurve {
    /// `n,p1,cum_exception` with one row per `j`. Bracketed values are
    /// written at their conservative ends: lower for `p1`, upper for the
    /// cumulative exception.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p1,cum_exception\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{:.12},{:.12}",
                p.j,
                rational::to_f64(&p.p1.lower),
                rational::to_f64(&p.cum_exception.upper)
            );
        }
        out
    }
}

pub fn persistence_curve<P: Predictor + ?Sized>(
    predictor: &P,
    test: &ComputableTest,
    n_max: usize,
) -> Result<PersistenceCurve, InductionError> {
    persistence_curve_capped(predictor, test, n_max, DEFAULT_FRONTIER_CAP)
}

/// `p(1 | 1^j)` for `j < n_max`, where `p(a_1..a_n)` sums the predictor
/// over strings of length `n` whose test history `f(x_{1:i})` is `a_1..a_n`.
pub fn persistence_curve_capped<P: Predictor + ?Sized>(
    predictor: &P,
    test: &ComputableTest,
    n_max: usize,
    frontier_cap: usize,
) -> Result<PersistenceCurve, InductionError> {
    let initial_mass = predictor.bracket(&BitString::empty())?;
    let mut exact = initial_mass.is_exact();
    let mut frontier = vec![BitString::empty()];
    let mut mass = initial_mass.clone();
    let mut cum = Bracket::zero();
    let mut points = Vec::with_capacity(n_max);
    for j in 0..n_max {
        let candidates: Vec<BitString> = frontier.iter().flat_map(|x| [x.child(false), x.child(true)]).collect();
        let kept = candidates
            .into_par_iter()
            .map(|y| Ok(test.evaluate(&y)?.then_some(y)))
            .collect::<Result<Vec<_>, InductionError>>()?;
        let next: Vec<BitString> = kept.into_iter().flatten().collect();
        if next.len() > frontier_cap {
            return Err(InductionError::FrontierTooLarge { j: j + 1, size: next.len(), cap: frontier_cap });
        }
        let brackets = next.par_iter().map(|y| predictor.bracket(y)).collect::<Result<Vec<_>, _>>()?;
        let next_mass = brackets.iter().fold(Bracket::zero(), |acc, b| acc.add(b));
        exact &= next_mass.is_exact();
        let p1 = next_mass.ratio_clamped(&mass).ok_or(InductionError::UndefinedCurve { j })?;
        let exception = p1.complement();
        cum = cum.add(&exception);
        points.push(CurvePoint {
            j,
            p1,
            exception,
            cum_exception: cum.clone(),
            mass: next_mass.clone(),
            frontier_size: next.len(),
        });
        frontier = next;
        mass = next_mass;
    }
    Ok(PersistenceCurve { predictor: predictor.describe(), test: test.describe(), initial_mass, points, exact })
}

/// Checks the curve against the weight `c` that the predictor gives to some
/// explanation under which the test always passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    /// `log2(1/c)` when it is an integer.
    pub log2_inverse_exact: Option<i64>,
    /// `floor(log2(1/c))`.
    pub log2_inverse_floor: i64,
    pub log2_inverse_f64: f64,
    #[serde(with = "rational::serde_str")]
    pub max_cum_exception: Rational,
    /// `Σ_j p(0 | 1^j) <= log2(1/c)` at every `n`.
    pub cumulative_holds: bool,
    /// Whether `cumulative_holds` was settled by exact arithmetic rather than
    /// a float comparison.
    pub decided_exactly: bool,
    /// `p(1^n) >= c · p(1^0)` at every `n`.
    pub product_holds: bool,
}

pub fn bound_check(curve: &PersistenceCurve, weight: &Rational) -> Result<BoundCheck, InductionError> {
    if *weight <= Rational::zero() || *weight > Rational::one() {
        return Err(InductionError::BadWeight(rational::format(weight)));
    }
    let inv = Rational::one() / weight;
    let exact_log = rational::exact_log2(&inv);
    let floor = rational::floor_log2(&inv);
    let log2_inverse_f64 = rational::to_f64(&inv).log2();
    let max_cum = curve.points.last().map(|p| p.cum_exception.upper.clone()).unwrap_or_else(Rational::zero);
    let (cumulative_holds, decided_exactly) = if let Some(k) = exact_log {
        (max_cum <= rational::int(k), true)
    } else if max_cum <= rational::int(floor) {
        (true, true)
    } else if max_cum > rational::int(floor + 1) {
        (false, true)
    } else {
        (rational::to_f64(&max_cum) <= log2_inverse_f64, false)
    };
    let floor_mass = weight * &curve.initial_mass.upper;
    let product_holds = curve.points.iter().all(|p| p.mass.lower >= floor_mass);
    Ok(BoundCheck {
        weight: weight.clone(),
        log2_inverse_exact: exact_log,
        log2_inverse_floor: floor,
        log2_inverse_f64,
        max_cum_exception: max_cum,
        cumulative_holds,
        decided_exactly,
        product_holds,
    })
}

/// `(1 + 2^{-(n+1)}) / (1 + 2^{-n})`: the persistence of the last-bit test
/// under equal weights on a fair coin and the all-ones sequence.
pub fn fair_vs_ones_closed_form(n: usize) -> Rational {
    let a = Rational::one() + rational::dyadic(n + 1);
    let b = Rational::one() + rational::dyadic(n);
    a / b
}

//! When postselecting on Alice's detections preserves no-signalling.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::correlation::{postselect, signalling_report, AliceOutcome, Correlation, Sign, SETTINGS};
use super::hvm::{behavior_from_hvm, random_hvm, HiddenVariableModel};
use super::BellError;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaA1Report {
    /// `P0(∅|a)` for `a = 0, 1`.
    #[serde(with = "rational::serde_vec_str")]
    pub null_probabilities: Vec<Rational>,
    /// The postselected `P` is non-signalling from Bob to Alice.
    pub b_to_a_ok: bool,
    #[serde(with = "rational::serde_str")]
    pub b_to_a_deviation: Rational,
    /// `P0(∅,y|a,b) = P0(∅|a)·P0(y|b)` for all `a, b, y`.
    pub cond_indep: bool,
    /// The postselected `P` is non-signalling from Alice to Bob.
    pub a_to_b_ok: bool,
    #[serde(with = "rational::serde_str")]
    pub a_to_b_deviation: Rational,
    /// The same deviation recomputed in floating point.
    pub a_to_b_deviation_f64: f64,
    /// `b_to_a_ok`, and `cond_indep` implies `a_to_b_ok`.
    pub consistent: bool,
}

pub fn check_lemma_a1(p0: &Correlation) -> Result<LemmaA1Report, BellError> {
    let ns = signalling_report(p0);
    if !ns.nonsignalling {
        return Err(BellError::Signalling {
            a_to_b: rational::format(&ns.a_to_b),
            b_to_a: rational::format(&ns.b_to_a),
        });
    }
    let p = postselect(p0)?;
    let post = signalling_report(&p);
    let null: Vec<Rational> = (0..2).map(|a| p0.null_probability(a, 0)).collect();
    let cond_indep = SETTINGS.iter().all(|&(a, b)| {
        Sign::ALL.iter().all(|&w| *p0.get(AliceOutcome::Null, w, a, b) == &null[a] * p0.bob_marginal(w, a, b))
    });
    let a_to_b_deviation_f64 = float_a_to_b(p0);
    let b_to_a_ok = post.b_to_a.is_zero();
    let a_to_b_ok = post.a_to_b.is_zero();
    Ok(LemmaA1Report {
        null_probabilities: null,
        b_to_a_ok,
        b_to_a_deviation: post.b_to_a,
        cond_indep,
        a_to_b_ok,
        a_to_b_deviation: post.a_to_b,
        a_to_b_deviation_f64,
        consistent: b_to_a_ok && (!cond_indep || a_to_b_ok),
    })
}

/// `max_{b,w} |P(w|a=0,b) − P(w|a=1,b)|` for the postselected table, in f64.
fn float_a_to_b(p0: &Correlation) -> f64 {
    let f = |v, w, a, b| rational::to_f64(p0.get(v, w, a, b));
    let mut worst = 0.0f64;
    for b in 0..2 {
        for w in Sign::ALL {
            let marg = |a: usize| {
                let keep = 1.0 - f(AliceOutcome::Null, Sign::Minus, a, b) - f(AliceOutcome::Null, Sign::Plus, a, b);
                (f(AliceOutcome::Minus, w, a, b) + f(AliceOutcome::Plus, w, a, b)) / keep
            };
            worst = worst.max((marg(0) - marg(1)).abs());
        }
    }
    worst
}

/// The PR box relabelled so that `v·w = (−1)^{ab ⊕ αa ⊕ βb ⊕ γ}`.
pub fn pr_box_variant(alpha: usize, beta: usize, gamma: usize) -> Correlation {
    Correlation::from_fn(false, |v, w, a, b| match v.value() {
        Some(x) => {
            let parity = (a * b) ^ (alpha * a) ^ (beta * b) ^ gamma;
            let sign = if parity == 0 { 1 } else { -1 };
            if x * w.value() == sign {
                rational::ratio(1, 2)
            } else {
                Rational::zero()
            }
        }
        None => Rational::zero(),
    })
    .expect("valid")
}

/// A random non-signalling correlation without `∅`: a random mixture of the
/// 16 local deterministic behaviors and the 8 PR boxes.
pub fn random_nonsignalling<R: Rng + ?Sized>(rng: &mut R) -> Correlation {
    let mut extremal: Vec<Correlation> = super::hvm::Responses::all(false).iter().map(|r| r.behavior()).collect();
    for k in 0..8 {
        extremal.push(pr_box_variant(k & 1, (k >> 1) & 1, k >> 2));
    }
    let mut weights: Vec<i64> = extremal.iter().map(|_| rng.gen_range(0..=5)).collect();
    if weights.iter().all(|&k| k == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let parts: Vec<_> = weights
        .into_iter()
        .zip(extremal)
        .filter(|(k, _)| *k > 0)
        .map(|(k, c)| (rational::ratio(k, total), c))
        .collect();
    Correlation::mixture(&parts).expect("weights sum to 1")
}

/// A random non-signalling `P0` satisfying the conditional-independence
/// condition: `P0(∅,y|a,b) = η_a·Q(y|b)` and `P0(x,y|a,b) = (1−η_a)·Q(x,y|a,b)`
/// for a random non-signalling `Q` and `η_a ∈ {0, 1/10, ..., 9/10}`.
pub fn random_a1_correlation<R: Rng + ?Sized>(rng: &mut R) -> Correlation {
    let q = random_nonsignalling(rng);
    let eta = [rational::ratio(rng.gen_range(0..10), 10), rational::ratio(rng.gen_range(0..10), 10)];
    Correlation::from_fn(true, |v, w, a, b| match v {
        AliceOutcome::Null => &eta[a] * q.bob_marginal(w, a, b),
        _ => (Rational::one() - &eta[a]) * q.get(v, w, a, b),
    })
    .expect("valid")
}

/// A random non-signalling `P0` with `∅` that generally violates the
/// condition: an equal mixture of a random local model with `∅` and a random
/// non-signalling table. Resamples until `P0(∅|a) < 1` for both `a`.
pub fn random_nonsignalling_with_null<R: Rng + ?Sized>(rng: &mut R) -> Correlation {
    loop {
        let n = rng.gen_range(1..=6);
        let local = behavior_from_hvm(&random_hvm(rng, n, true));
        let q = random_nonsignalling(rng).with_null_outcome();
        let half = rational::ratio(1, 2);
        let p0 = Correlation::mixture(&[(half.clone(), local), (half, q)]).expect("valid");
        if (0..2).all(|a| !p0.null_probability(a, 0).is_one()) {
            return p0;
        }
    }
}

/// Two hidden values where non-detection for `a = 0` happens exactly when
/// Bob answers `+`.
pub fn correlated_non_detection() -> HiddenVariableModel {
    HiddenVariableModel::uniform(&["∅+++", "++--"]).expect("valid")
}

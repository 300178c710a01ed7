//! Distances between the mixture's predictions and a single member's, and
//! seeded concentration experiments.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::state::MixtureState;
use super::MixtureError;
use crate::bits::BitString;
use crate::rational::{self, Rational};

/// Largest horizon summed exhaustively unless the caller raises the cap.
pub const DEFAULT_HORIZON_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZombieReport {
    pub member: usize,
    pub name: String,
    pub z: BitString,
    pub horizon: usize,
    /// `½ Σ_{ℓ(y)=horizon} |M_V(y|z) − m_j(y|z)|`.
    #[serde(with = "rational::serde_str")]
    pub distance: Rational,
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    pub zombie: bool,
}

/// Exact total-variation distance at `horizon` between the mixture's
/// conditional and member `member_id`'s conditional given the state's `z`.
pub fn zombie_report(
    mix: &MixtureState,
    member_id: usize,
    horizon: usize,
    threshold: &Rational,
) -> Result<ZombieReport, MixtureError> {
    zombie_report_capped(mix, member_id, horizon, threshold, DEFAULT_HORIZON_CAP)
}

pub fn zombie_report_capped(
    mix: &MixtureState,
    member_id: usize,
    horizon: usize,
    threshold: &Rational,
    cap: usize,
) -> Result<ZombieReport, MixtureError> {
    if horizon > cap {
        return Err(MixtureError::HorizonTooLarge { horizon, cap });
    }
    let j = mix.index_of(member_id)?;
    if mix.likelihood(j).is_zero() {
        return Err(MixtureError::MemberExcluded { id: member_id, z: mix.z().clone() });
    }
    if mix.evidence().is_zero() {
        return Err(MixtureError::ImpossibleEvidence(mix.z().clone()));
    }
    // Members with zero posterior never contribute to M_V(·|z).
    let active: Vec<usize> = (0..mix.members().len()).filter(|&i| !mix.joint(i).is_zero()).collect();
    let weights: Vec<Rational> = active.iter().map(|&i| mix.joint(i) / mix.evidence()).collect();
    let target = active.iter().position(|&i| i == j).expect("member j has positive posterior");

    let walker = Walker { mix, active: &active, weights: &weights, target, horizon };
    let start = vec![Rational::one(); active.len()];
    let sum = walker.walk(&mut mix.z().clone(), start)?;
    let distance = sum / Rational::from_integer(2.into());
    Ok(ZombieReport {
        member: member_id,
        name: mix.members()[j].name.clone(),
        z: mix.z().clone(),
        horizon,
        zombie: &distance > threshold,
        distance,
        threshold: threshold.clone(),
    })
}

struct Walker<'a> {
    mix: &'a MixtureState,
    active: &'a [usize],
    weights: &'a [Rational],
    target: usize,
    horizon: usize,
}

impl Walker<'_> {
    /// Sum of `|M_V(y|z) − m_j(y|z)|` over the leaves below `node`, where
    /// `cond[k]` is `m_{active[k]}(node minus z | z)`.
    fn walk(&self, node: &mut BitString, cond: Vec<Rational>) -> Result<Rational, MixtureError> {
        if node.len() - self.mix.z().len() == self.horizon {
            let mv: Rational = self.weights.iter().zip(&cond).map(|(w, c)| w * c).sum();
            return Ok((mv - &cond[self.target]).abs());
        }
        let mut total = Rational::zero();
        for b in [false, true] {
            let mut next = Vec::with_capacity(cond.len());
            for (k, c) in cond.iter().enumerate() {
                next.push(if c.is_zero() {
                    Rational::zero()
                } else {
                    c * self.mix.members()[self.active[k]].next_bit(node, b)?
                });
            }
            if next.iter().all(Zero::is_zero) {
                continue;
            }
            node.push(b);
            let r = self.walk(node, next);
            node.pop();
            total += r?;
        }
        Ok(total)
    }
}

/// Monte Carlo estimate of the same distance for horizons beyond the cap.
/// Only defined when every member with positive posterior is a measure.
#[derive(Clone, Debug, Serialize)]
pub struct ZombieEstimate {
    pub member: usize,
    pub z: BitString,
    pub horizon: usize,
    pub samples: usize,
    pub seed: u64,
    /// Monte Carlo summary fields (floating point).
    pub mc_distance: f64,
    pub mc_std_error: f64,
}

pub fn zombie_report_mc(
    mix: &MixtureState,
    member_id: usize,
    horizon: usize,
    samples: usize,
    seed: u64,
) -> Result<ZombieEstimate, MixtureError> {
    let j = mix.index_of(member_id)?;
    if mix.likelihood(j).is_zero() {
        return Err(MixtureError::MemberExcluded { id: member_id, z: mix.z().clone() });
    }
    let active: Vec<usize> = (0..mix.members().len()).filter(|&i| !mix.joint(i).is_zero()).collect();
    if let Some(&i) = active.iter().find(|&&i| !mix.members()[i].is_measure()) {
        return Err(MixtureError::NotAMeasure(mix.members()[i].id));
    }
    let u = mix.posterior_weights();
    // TV = E_{y ~ M_V(·|z)} [max(0, 1 − m_j(y|z)/M_V(y|z))]
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let pick = pick_member(&mut rng, &active, &u);
            let y = mix.members()[pick].sample(mix.z(), horizon, &mut rng)?;
            let mut mv = Rational::zero();
            let mut mj = Rational::zero();
            for &i in &active {
                let c = mix.member_conditional(i, &y)?.unwrap_or_else(Rational::zero);
                if i == j {
                    mj = c.clone();
                }
                mv += &u[i] * c;
            }
            let gap = Rational::one() - mj / mv;
            Ok(if gap.is_positive() { rational::to_f64(&gap) } else { 0.0 })
        })
        .collect::<Result<_, MixtureError>>()?;
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(ZombieEstimate {
        member: member_id,
        z: mix.z().clone(),
        horizon,
        samples,
        seed,
        mc_distance: mean,
        mc_std_error: (var / n).sqrt(),
    })
}

/// Draws a member position with probability `u[i]` (exactly).
fn pick_member(rng: &mut ChaCha8Rng, active: &[usize], u: &[Rational]) -> usize {
    let mut rest = Rational::one();
    for &i in &active[..active.len() - 1] {
        if rational::sample_bernoulli(rng, &(&u[i] / &rest)) {
            return i;
        }
        rest -= &u[i];
    }
    active[active.len() - 1]
}

/// Seeded check of posterior concentration: sample trajectories from one
/// member, condition the mixture on each, and measure how much posterior
/// mass the true member holds and how close the mixture's predictions are.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationSummary {
    pub true_member: usize,
    pub trajectories: usize,
    pub length: usize,
    pub horizon: usize,
    pub seed: u64,
    /// Exact distance before any evidence.
    #[serde(with = "rational::serde_str")]
    pub distance_at_empty: Rational,
    /// Monte Carlo summary fields (floating point).
    pub mc_mean_posterior: f64,
    pub mc_min_posterior: f64,
    pub mc_mean_distance: f64,
    pub mc_max_distance: f64,
    /// Mean posterior on the true member after each prefix length `0..=length`.
    pub mc_mean_posterior_by_step: Vec<f64>,
}

pub fn concentration_experiment(
    mix: &MixtureState,
    true_id: usize,
    trajectories: usize,
    length: usize,
    horizon: usize,
    seed: u64,
) -> Result<ConcentrationSummary, MixtureError> {
    let j = mix.index_of(true_id)?;
    let member = &mix.members()[j];
    let distance_at_empty = zombie_report(mix, true_id, horizon, &Rational::zero())?.distance;
    let runs: Vec<(Vec<f64>, f64)> = (0..trajectories)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let z = member.sample(&BitString::empty(), length, &mut rng)?;
            let mut state = mix.clone();
            let mut path = vec![rational::to_f64(&state.posterior_of(true_id)?)];
            for &b in z.bits() {
                state = state.observe(&BitString::from_bits([b]))?;
                path.push(rational::to_f64(&state.posterior_of(true_id)?));
            }
            let d = zombie_report(&state, true_id, horizon, &Rational::zero())?.distance;
            Ok((path, rational::to_f64(&d)))
        })
        .collect::<Result<_, MixtureError>>()?;
    let n = trajectories.max(1) as f64;
    let mut by_step = vec![0.0; length + 1];
    for (path, _) in &runs {
        for (i, p) in path.iter().enumerate() {
            by_step[i] += p / n;
        }
    }
    let finals: Vec<f64> = runs.iter().map(|(p, _)| *p.last().unwrap()).collect();
    let dists: Vec<f64> = runs.iter().map(|(_, d)| *d).collect();
    Ok(ConcentrationSummary {
        true_member: true_id,
        trajectories,
        length,
        horizon,
        seed,
        distance_at_empty,
        mc_mean_posterior: finals.iter().sum::<f64>() / n,
        mc_min_posterior: finals.iter().copied().fold(f64::INFINITY, f64::min),
        mc_mean_distance: dists.iter().sum::<f64>() / n,
        mc_max_distance: dists.iter().copied().fold(0.0, f64::max),
        mc_mean_posterior_by_step: by_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mixture::member::{FamilyMember, MemberKind};
    use crate::mixture::state::make_mixture;
    use crate::rational::{dyadic, int, ratio};

    fn fair_and_ones(c_ones: u32) -> MixtureState {
        make_mixture(vec![
            FamilyMember::new(0, "fair", 1, MemberKind::bernoulli(ratio(1, 2))),
            FamilyMember::new(1, "ones", c_ones, MemberKind::all_ones()),
        ])
        .unwrap()
    }

    /// Direct formula over all strings, no incremental tricks.
    fn brute_tv(mix: &MixtureState, j: usize, h: usize) -> Rational {
        let mv_z = mix.evidence().clone();
        let z = mix.z();
        let mut sum = Rational::zero();
        for y in BitString::all_of_length(h) {
            let zy = z.concat(&y);
            let mv: Rational = mix.members().iter().map(|m| m.prior_weight() * m.prob(&zy).unwrap()).sum();
            let m = &mix.members()[j];
            let mj = m.prob(&zy).unwrap() / m.prob(z).unwrap();
            sum += (mv / &mv_z - mj).abs();
        }
        sum / int(2)
    }

    #[test]
    fn no_evidence_is_zombie() {
        let mix = fair_and_ones(6);
        let r = zombie_report(&mix, 1, 3, &ratio(1, 5)).unwrap();
        assert_eq!(r.distance, brute_tv(&mix, 1, 3));
        assert!(r.zombie);
    }

    #[test]
    fn long_evidence_is_not() {
        let mix = fair_and_ones(6).posterior(&BitString::repeat(true, 30)).unwrap();
        let r = zombie_report(&mix, 1, 3, &ratio(1, 5)).unwrap();
        assert_eq!(r.distance, brute_tv(&mix, 1, 3));
        assert!(r.distance < dyadic(20));
        assert!(!r.zombie);
    }

    #[test]
    fn singleton_family_has_zero_distance() {
        let mix = make_mixture(vec![FamilyMember::new(7, "fair", 1, MemberKind::bernoulli(ratio(1, 3)))]).unwrap();
        let r = zombie_report(&mix.posterior(&bits("101")).unwrap(), 7, 5, &int(0)).unwrap();
        assert_eq!(r.distance, int(0));
        assert!(!r.zombie);
    }

    #[test]
    fn horizon_cap() {
        let mix = fair_and_ones(2);
        assert!(matches!(
            zombie_report(&mix, 1, 13, &int(0)),
            Err(MixtureError::HorizonTooLarge { horizon: 13, cap: 12 })
        ));
    }

    #[test]
    fn monte_carlo_tracks_exact_value() {
        let mix = fair_and_ones(2);
        let exact = rational::to_f64(&zombie_report(&mix, 1, 6, &int(0)).unwrap().distance);
        let est = zombie_report_mc(&mix, 1, 6, 4000, 11).unwrap();
        assert!((est.mc_distance - exact).abs() < 4.0 * est.mc_std_error + 1e-9, "{est:?} vs {exact}");
        let again = zombie_report_mc(&mix, 1, 6, 4000, 11).unwrap();
        assert_eq!(est.mc_distance, again.mc_distance);
    }
}

//! Finite mixtures `M_V = Σ_j 2^{-c_j} m_j` and their posteriors.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::member::FamilyMember;
use super::MixtureError;
use crate::bits::BitString;
use crate::rational::{self, Rational};

/// A mixture conditioned on a string `z`.
///
/// `joint[j] = 2^{-c_j} m_j(z)` and `evidence = M_V(z) = Σ_j joint[j]`, so the
/// posterior weight of member `j` is `joint[j] / evidence`.
#[derive(Clone, Debug)]
pub struct MixtureState {
    members: Vec<FamilyMember>,
    z: BitString,
    /// `m_j(z)` per member.
    likelihood: Vec<Rational>,
    joint: Vec<Rational>,
    evidence: Rational,
}

pub fn make_mixture(members: Vec<FamilyMember>) -> Result<MixtureState, MixtureError> {
    MixtureState::new(members)
}

impl MixtureState {
    pub fn new(members: Vec<FamilyMember>) -> Result<Self, MixtureError> {
        for (i, m) in members.iter().enumerate() {
            m.validate()?;
            if members[..i].iter().any(|o| o.id == m.id) {
                return Err(MixtureError::DuplicateId(m.id));
            }
        }
        let total: Rational = members.iter().map(FamilyMember::prior_weight).sum();
        if total > Rational::one() {
            return Err(MixtureError::WeightsExceedOne(rational::format(&total)));
        }
        let likelihood = vec![Rational::one(); members.len()];
        let joint: Vec<Rational> = members.iter().map(FamilyMember::prior_weight).collect();
        Ok(MixtureState { members, z: BitString::empty(), likelihood, joint, evidence: total })
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn z(&self) -> &BitString {
        &self.z
    }

    /// `M_V(z)`.
    pub fn evidence(&self) -> &Rational {
        &self.evidence
    }

    pub fn index_of(&self, id: usize) -> Result<usize, MixtureError> {
        self.members.iter().position(|m| m.id == id).ok_or(MixtureError::UnknownMember(id))
    }

    /// `m_j(z)` by member position.
    pub fn likelihood(&self, idx: usize) -> &Rational {
        &self.likelihood[idx]
    }

    /// `2^{-c_j} m_j(z)` by member position.
    pub fn joint(&self, idx: usize) -> &Rational {
        &self.joint[idx]
    }

    /// Posterior weights `u_j(z)` in member order.
    pub fn posterior_weights(&self) -> Vec<Rational> {
        if self.evidence.is_zero() {
            return vec![Rational::zero(); self.members.len()];
        }
        self.joint.iter().map(|j| j / &self.evidence).collect()
    }

    pub fn posterior_of(&self, id: usize) -> Result<Rational, MixtureError> {
        let i = self.index_of(id)?;
        Ok(&self.joint[i] / &self.evidence)
    }

    /// `M_V(x)` for an arbitrary string, from the prior weights.
    pub fn prior_value(&self, x: &BitString) -> Result<Rational, MixtureError> {
        let terms = self
            .members
            .par_iter()
            .map(|m| Ok(m.prior_weight() * m.prob(x)?))
            .collect::<Result<Vec<Rational>, MixtureError>>()?;
        Ok(terms.into_iter().sum())
    }

    /// Conditions the prior on `z` from scratch.
    pub fn posterior(&self, z: &BitString) -> Result<MixtureState, MixtureError> {
        let likelihood = self.members.par_iter().map(|m| m.prob(z)).collect::<Result<Vec<_>, _>>()?;
        let joint: Vec<Rational> = self.members.iter().zip(&likelihood).map(|(m, l)| m.prior_weight() * l).collect();
        let evidence: Rational = joint.iter().sum();
        if evidence.is_zero() {
            return Err(MixtureError::ImpossibleEvidence(z.clone()));
        }
        Ok(MixtureState { members: self.members.clone(), z: z.clone(), likelihood, joint, evidence })
    }

    /// Appends `y` to the conditioning string, updating incrementally.
    pub fn observe(&self, y: &BitString) -> Result<MixtureState, MixtureError> {
        let likelihood = self
            .members
            .iter()
            .zip(&self.likelihood)
            .map(|(m, l)| m.prob_from(&self.z, l, y))
            .collect::<Result<Vec<_>, _>>()?;
        let joint: Vec<Rational> = self.members.iter().zip(&likelihood).map(|(m, l)| m.prior_weight() * l).collect();
        let evidence: Rational = joint.iter().sum();
        let z = self.z.concat(y);
        if evidence.is_zero() {
            return Err(MixtureError::ImpossibleEvidence(z));
        }
        Ok(MixtureState { members: self.members.clone(), z, likelihood, joint, evidence })
    }

    fn require_evidence(&self) -> Result<(), MixtureError> {
        if self.evidence.is_zero() {
            return Err(MixtureError::ImpossibleEvidence(self.z.clone()));
        }
        Ok(())
    }

    /// `m_j(y | z)` by member position; `None` if `m_j(z) = 0`.
    pub fn member_conditional(&self, idx: usize, y: &BitString) -> Result<Option<Rational>, MixtureError> {
        let l = &self.likelihood[idx];
        if l.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.members[idx].prob_from(&self.z, &Rational::one(), y)?))
    }

    /// `M_V(y | z) = M_V(zy) / M_V(z) = Σ_j u_j(z) m_j(y | z)`.
    pub fn conditional(&self, y: &BitString) -> Result<Rational, MixtureError> {
        self.require_evidence()?;
        let mut num = Rational::zero();
        for (m, j) in self.members.iter().zip(&self.joint) {
            if !j.is_zero() {
                num += j * m.prob_from(&self.z, &Rational::one(), y)?;
            }
        }
        Ok(num / &self.evidence)
    }

    /// One-step termination given `z` per member and the posterior restricted
    /// to continuing.
    pub fn survival_deficiency(&self) -> Result<SurvivalReport, MixtureError> {
        self.require_evidence()?;
        let u = self.posterior_weights();
        let mut per_member = Vec::with_capacity(self.members.len());
        let mut cont = Vec::with_capacity(self.members.len());
        for (i, m) in self.members.iter().enumerate() {
            if self.likelihood[i].is_zero() {
                per_member.push(MemberSurvival { id: m.id, name: m.name.clone(), termination: None });
                cont.push(Rational::zero());
                continue;
            }
            let t = m.termination_at(&self.z)?;
            cont.push(&u[i] * (Rational::one() - &t));
            per_member.push(MemberSurvival { id: m.id, name: m.name.clone(), termination: Some(t) });
        }
        let total: Rational = cont.iter().sum();
        if total.is_zero() {
            return Err(MixtureError::NoContinuation(self.z.clone()));
        }
        let continuing = self
            .members
            .iter()
            .zip(cont)
            .map(|(m, c)| WeightEntry { id: m.id, name: m.name.clone(), weight: c / &total })
            .collect();
        let posterior = self
            .members
            .iter()
            .zip(u)
            .map(|(m, w)| WeightEntry { id: m.id, name: m.name.clone(), weight: w })
            .collect();
        Ok(SurvivalReport { z: self.z.clone(), per_member, posterior, continuing, continuation_probability: total })
    }

    /// Members ordered by `2^{-c_j} m_j(z)`, largest first, ties by id.
    pub fn explanation_ranking(&self) -> Vec<WeightEntry> {
        let mut out: Vec<WeightEntry> = self
            .members
            .iter()
            .zip(&self.joint)
            .map(|(m, j)| WeightEntry { id: m.id, name: m.name.clone(), weight: j.clone() })
            .collect();
        out.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.id.cmp(&b.id)));
        out
    }
}

pub fn posterior(mixture: &MixtureState, z: &BitString) -> Result<MixtureState, MixtureError> {
    mixture.posterior(z)
}

/// `M_V(y | z)` from a prior-state mixture.
pub fn mixture_conditional(mixture: &MixtureState, y: &BitString, z: &BitString) -> Result<Rational, MixtureError> {
    mixture.posterior(z)?.conditional(y)
}

pub fn explanation_ranking(mixture: &MixtureState, z: &BitString) -> Result<Vec<WeightEntry>, MixtureError> {
    let state = mixture.posterior(z).or_else(|e| match e {
        // A ranking of all-zero weights is still a valid (if dull) answer.
        MixtureError::ImpossibleEvidence(_) => {
            let mut s = mixture.clone();
            s.z = z.clone();
            s.likelihood = mixture.members.iter().map(|m| m.prob(z)).collect::<Result<_, _>>()?;
            s.joint = vec![Rational::zero(); mixture.members.len()];
            s.evidence = Rational::zero();
            Ok(s)
        }
        e => Err(e),
    })?;
    Ok(state.explanation_ranking())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightEntry {
    pub id: usize,
    pub name: String,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberSurvival {
    pub id: usize,
    pub name: String,
    /// `term_j(z) / m_j(z)`; absent when `m_j(z) = 0`.
    #[serde(with = "rational::serde_opt_str")]
    pub termination: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivalReport {
    pub z: BitString,
    pub per_member: Vec<MemberSurvival>,
    pub posterior: Vec<WeightEntry>,
    /// Posterior restricted to the event that the sequence continues.
    pub continuing: Vec<WeightEntry>,
    #[serde(with = "rational::serde_str")]
    pub continuation_probability: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mixture::member::{MemberKind, Termination};
    use crate::rational::{dyadic, int, ratio};

    fn fair_and_ones(c: u32) -> MixtureState {
        make_mixture(vec![
            FamilyMember::new(0, "fair", c, MemberKind::bernoulli(ratio(1, 2))),
            FamilyMember::new(1, "ones", c, MemberKind::all_ones()),
        ])
        .unwrap()
    }

    #[test]
    fn mixture_values() {
        let single = make_mixture(vec![FamilyMember::new(0, "ones", 1, MemberKind::all_ones())]).unwrap();
        for n in 0..8 {
            assert_eq!(single.prior_value(&BitString::repeat(true, n)).unwrap(), ratio(1, 2));
        }
        assert_eq!(fair_and_ones(1).prior_value(&bits("11")).unwrap(), ratio(5, 8));
        let err = make_mixture(vec![
            FamilyMember::new(0, "a", 1, MemberKind::all_ones()),
            FamilyMember::new(1, "b", 1, MemberKind::all_ones()),
            FamilyMember::new(2, "c", 1, MemberKind::all_ones()),
        ])
        .unwrap_err();
        assert_eq!(err, MixtureError::WeightsExceedOne("3/2".into()));
    }

    #[test]
    fn posterior_examples() {
        let mix = fair_and_ones(1);
        let z = BitString::repeat(true, 10);
        let post = mix.posterior(&z).unwrap();
        assert_eq!(post.posterior_of(1).unwrap(), ratio(1024, 1025));
        assert_eq!(post.conditional(&bits("1")).unwrap(), ratio(2049, 2050));
        assert_eq!(mix.posterior(&BitString::empty()).unwrap().posterior_weights(), vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(mix.posterior(&bits("1101")).unwrap().posterior_of(1).unwrap(), int(0));
        // incremental and from-scratch conditioning agree
        let inc = mix.observe(&bits("11111")).unwrap().observe(&bits("11111")).unwrap();
        assert_eq!(inc.posterior_weights(), post.posterior_weights());
    }

    #[test]
    fn impossible_evidence() {
        let single = make_mixture(vec![FamilyMember::new(0, "ones", 1, MemberKind::all_ones())]).unwrap();
        assert!(matches!(single.posterior(&bits("10")), Err(MixtureError::ImpossibleEvidence(_))));
    }

    #[test]
    fn chain_rule() {
        let mix = fair_and_ones(2).posterior(&bits("111")).unwrap();
        let y = bits("10");
        let lhs = mix.conditional(&y).unwrap();
        let rhs =
            mix.conditional(&bits("1")).unwrap() * mix.observe(&bits("1")).unwrap().conditional(&bits("0")).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn survival_shift() {
        let meteorite = Termination { default: ratio(99, 100), ..Default::default() };
        let mix = make_mixture(vec![
            FamilyMember::new(0, "earth", 1, MemberKind::bernoulli(ratio(1, 2))).with_termination(meteorite),
            FamilyMember::new(1, "elsewhere", 1, MemberKind::bernoulli(ratio(1, 2))),
        ])
        .unwrap();
        let rep = mix.survival_deficiency().unwrap();
        assert_eq!(rep.per_member[0].termination, Some(ratio(99, 100)));
        assert_eq!(rep.continuing[0].weight, ratio(1, 101));
        assert_eq!(rep.continuing[1].weight, ratio(100, 101));

        let doomed = make_mixture(vec![FamilyMember::new(0, "doomed", 1, MemberKind::all_ones())
            .with_termination(Termination { default: int(1), ..Default::default() })])
        .unwrap();
        assert!(matches!(doomed.survival_deficiency(), Err(MixtureError::NoContinuation(_))));
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let mix = fair_and_ones(2);
        let r = explanation_ranking(&mix, &bits("1")).unwrap();
        assert_eq!(r[0].id, 1);
        assert_eq!(r[0].weight, dyadic(2));
        let r = explanation_ranking(&mix, &BitString::empty()).unwrap();
        assert_eq!((r[0].id, r[1].id), (0, 1));
        assert!(explanation_ranking(&make_mixture(vec![]).unwrap(), &bits("1")).unwrap().is_empty());
    }
}

//! Exact membership test for the local polytope.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::correlation::{chsh, Correlation, SETTINGS};
use super::hvm::Responses;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexWeight {
    /// `l_0 l_1 l'_0 l'_1`.
    pub lambda: String,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Classicality {
    /// `P = Σ weight · P_λ` with non-negative weights summing to 1.
    Feasible { decomposition: Vec<VertexWeight> },
    /// A linear functional `F` on the table entries with `F(P_λ) <= 0` for
    /// every deterministic local behavior and `F(P) > 0`.
    Infeasible {
        /// One coefficient per entry, in the order of
        /// [`Correlation::flat_entries`].
        #[serde(with = "rational::serde_vec_str")]
        certificate: Vec<Rational>,
        #[serde(with = "rational::serde_str")]
        certificate_value: Rational,
        /// `|E00+E01+E10−E11|` when `P` has no `∅` outcome.
        #[serde(with = "rational::serde_opt_str")]
        chsh_value: Option<Rational>,
    },
}

impl Classicality {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Classicality::Feasible { .. })
    }
}

/// The deterministic local behaviors matching `p`'s outcome sets: 36 with
/// `∅`, 16 without.
pub fn local_vertices(p: &Correlation) -> Vec<Responses> {
    Responses::all(p.has_null_outcome())
}

/// Decides whether `p` is a mixture of deterministic local behaviors by an
/// exact phase-one simplex.
pub fn is_classical(p: &Correlation) -> Classicality {
    let vertices = local_vertices(p);
    let columns: Vec<Vec<Rational>> = vertices
        .iter()
        .map(|r| {
            let d = r.behavior();
            // widen so the entry layout matches p
            let d = if p.has_null_outcome() { d.with_null_outcome() } else { d };
            d.flat_entries()
        })
        .collect();
    let b = p.flat_entries();
    let m = b.len();
    let a: Vec<Vec<Rational>> = (0..m).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    match phase_one(&a, &b) {
        PhaseOne::Feasible(x) => {
            let decomposition = vertices
                .iter()
                .zip(x)
                .filter(|(_, w)| !w.is_zero())
                .map(|(r, weight)| VertexWeight { lambda: r.to_string(), weight })
                .collect();
            Classicality::Feasible { decomposition }
        }
        PhaseOne::Infeasible { y, value } => Classicality::Infeasible {
            certificate: y,
            certificate_value: value,
            chsh_value: chsh(p).ok().map(|r| r.value),
        },
    }
}

/// Re-evaluates a decomposition.
pub fn mixture_of(decomposition: &[VertexWeight]) -> Option<Correlation> {
    let parts = decomposition
        .iter()
        .map(|v| Some((v.weight.clone(), v.lambda.parse::<Responses>().ok()?.behavior())))
        .collect::<Option<Vec<_>>>()?;
    Correlation::mixture(&parts).ok()
}

/// `Σ_i F_i · P_i` over the entries of `p`.
pub fn apply_functional(f: &[Rational], p: &Correlation) -> Rational {
    f.iter().zip(p.flat_entries()).map(|(c, x)| c * x).sum()
}

enum PhaseOne {
    Feasible(Vec<Rational>),
    Infeasible { y: Vec<Rational>, value: Rational },
}

/// Minimizes the sum of artificials in `A x + s = b`, `x, s >= 0`, `b >= 0`,
/// with Bland's rule. On infeasibility returns the dual `y` with
/// `yᵀA <= 0` and `yᵀb > 0`.
fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> PhaseOne {
    let m = b.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); width];
            row[..n].clone_from_slice(&a[i]);
            row[n + i] = Rational::one();
            row[width - 1] = b[i].clone();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-one objective
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { unreachable!("phase one is bounded below by zero") };
        let pivot = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (x, p) in cost.iter_mut().zip(&pivot_row) {
            *x -= &f * p;
        }
        basis[r] = enter;
    }
    let value = -cost[width - 1].clone();
    if value.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = t[i][width - 1].clone();
            }
        }
        PhaseOne::Feasible(x)
    } else {
        // y_k = c_Bᵀ B⁻¹ e_k, where B⁻¹ sits under the artificial columns
        let y = (0..m)
            .map(|k| basis.iter().enumerate().filter(|(_, &j)| j >= n).map(|(i, _)| t[i][n + k].clone()).sum())
            .collect();
        PhaseOne::Infeasible { y, value }
    }
}

/// Non-negative weights that re-evaluate to `p` exactly.
pub fn decomposition_is_valid(p: &Correlation, decomposition: &[VertexWeight]) -> bool {
    decomposition.iter().all(|v| !v.weight.is_negative())
        && mixture_of(decomposition).is_some_and(|q| {
            SETTINGS.iter().all(|&(a, b)| p.rows().iter().all(|&(v, w)| q.get(v, w, a, b) == p.get(v, w, a, b)))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::hvm::{behavior_from_hvm, random_hvm, HiddenVariableModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_certificate(p: &Correlation, certificate: &[Rational]) {
        assert!(apply_functional(certificate, p).is_positive());
        for r in local_vertices(p) {
            let d = r.behavior();
            let d = if p.has_null_outcome() { d.with_null_outcome() } else { d };
            assert!(!apply_functional(certificate, &d).is_positive(), "{r}");
        }
    }

    #[test]
    fn paper_table_is_classical() {
        let p0 = behavior_from_hvm(&HiddenVariableModel::paper_model());
        match is_classical(&p0) {
            Classicality::Feasible { decomposition } => {
                assert!(decomposition_is_valid(&p0, &decomposition));
                assert_eq!(mixture_of(&decomposition).unwrap(), p0);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn pr_box_is_not() {
        let pr = Correlation::pr_box();
        match is_classical(&pr) {
            Classicality::Infeasible { certificate, chsh_value, .. } => {
                check_certificate(&pr, &certificate);
                assert_eq!(chsh_value, Some(rational::int(4)));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_behavior_uses_one_vertex() {
        assert!("-+∅+".parse::<Responses>().is_err());
        let r: Responses = "-∅++".parse().unwrap();
        let d = r.behavior();
        match is_classical(&d) {
            Classicality::Feasible { decomposition } => {
                assert_eq!(decomposition.len(), 1);
                assert!(decomposition[0].weight.is_one());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_models_are_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..50 {
            let m = random_hvm(&mut rng, 1 + i % 6, i % 2 == 0);
            let p = behavior_from_hvm(&m);
            match is_classical(&p) {
                Classicality::Feasible { decomposition } => assert!(decomposition_is_valid(&p, &decomposition)),
                other => panic!("model {i}: {other:?}"),
            }
        }
    }
}

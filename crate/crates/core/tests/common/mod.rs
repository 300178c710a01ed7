//! Helpers shared by the integration tests.
#![allow(dead_code)]

use aitlab_core::algprob::{explore, EstimateTable};
use aitlab_core::mtm::{
    encode_machine, random_machine, reference_universal, run, MachineSpec, RandomMachineParams, RunStatus,
};
use aitlab_core::{BitString, Rational};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Step budget for `U` that covers `s_t` steps of `T`.
pub fn universal_budget(t: &MachineSpec, s_t: usize) -> usize {
    let code = encode_machine(t).expect("encodable");
    2000 * s_t + 50 * code.len() + 1000
}

/// Compares `U(x_T p)` with `T(p)` for every `p` with `ℓ(p) <= max_len`.
/// Returns the number of programs checked.
pub fn check_universality(t: &MachineSpec, max_len: usize, s_t: usize) -> Result<usize, String> {
    let u = reference_universal();
    let code = encode_machine(t).map_err(|e| e.to_string())?;
    let budget = universal_budget(t, s_t);
    let programs: Vec<BitString> = BitString::all_up_to(max_len).collect();
    programs
        .par_iter()
        .map(|p| {
            let tr = run(t, p, s_t);
            let ur = run(u, &code.concat(p), budget);
            match tr.status {
                RunStatus::Halted | RunStatus::InputExhausted => {
                    if ur.output != tr.output || ur.status != tr.status || ur.consumed != code.len() + tr.consumed {
                        return Err(format!("p={p:?}: T gave {tr:?}, U gave {ur:?}"));
                    }
                }
                RunStatus::BudgetExhausted => {
                    let long = run(t, p, budget);
                    if !tr.output.is_prefix_of(&ur.output) || !ur.output.is_prefix_of(&long.output) {
                        return Err(format!("p={p:?}: T gave {:?}.., U gave {:?}", tr.output, ur.output));
                    }
                }
            }
            Ok(())
        })
        .collect::<Result<Vec<()>, String>>()
        .map(|v| v.len())
}

pub fn random_machines(count: usize, seed: u64) -> Vec<MachineSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RandomMachineParams::default();
    (0..count).map(|_| random_machine(&mut rng, &params)).collect()
}

/// Kraft sums, semimeasure inequality and `2^{-Km} <= M` on one table.
pub fn check_table(t: &EstimateTable) -> Result<(), String> {
    for n in 0..=t.depth {
        if t.kraft_sum(n) > Rational::one() {
            return Err(format!("Kraft sum at length {n} exceeds 1"));
        }
    }
    for x in BitString::all_up_to(t.depth) {
        let r = t.get(&x).unwrap();
        if x.len() < t.depth {
            let kids = t.m_lower(&x.child(false)).unwrap() + t.m_lower(&x.child(true)).unwrap();
            if kids > r.m_lower {
                return Err(format!("semimeasure inequality fails at {x:?}"));
            }
        }
        match r.km_upper {
            Some(k) => {
                if aitlab_core::rational::dyadic(k) > r.m_lower {
                    return Err(format!("2^-Km > M at {x:?}"));
                }
            }
            None => {
                if !r.m_lower.is_zero() {
                    return Err(format!("M > 0 without a program at {x:?}"));
                }
            }
        }
        if let Some(u) = &r.m_upper {
            if *u < r.m_lower {
                return Err(format!("upper bound below lower bound at {x:?}"));
            }
        }
    }
    Ok(())
}

/// Estimator properties at `(L, S) ∈ {(6,100), (8,300), (10,500)}` on all
/// strings up to `depth`, including monotonicity across the budgets.
pub fn check_estimator_properties(m: &MachineSpec, depth: usize) -> Result<(), String> {
    let budgets = [(6, 100), (8, 300), (10, 500)];
    let tables: Vec<EstimateTable> = budgets.iter().map(|&(l, s)| explore(m, depth, l, s)).collect();
    for t in &tables {
        check_table(t)?;
    }
    for w in tables.windows(2) {
        for (a, b) in w[0].reports.iter().zip(&w[1].reports) {
            if a.m_lower > b.m_lower {
                return Err(format!("M not monotone in the budgets at {:?}", a.x));
            }
            if let (Some(ka), Some(kb)) = (a.km_upper, b.km_upper) {
                if kb > ka {
                    return Err(format!("Km not monotone in the budgets at {:?}", a.x));
                }
            }
            if a.km_upper.is_some() && b.km_upper.is_none() {
                return Err(format!("program lost with a larger budget at {:?}", a.x));
            }
        }
    }
    Ok(())
}

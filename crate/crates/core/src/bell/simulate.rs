//! Monte Carlo run of the observer-loop protocol.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::correlation::{postselect, AliceOutcome, Correlation, Sign, SETTINGS};
use super::hvm::{behavior_from_hvm, HiddenVariableModel, Responses};
use super::BellError;
use crate::rational::{self, Rational};

/// A round that loops this many times aborts the simulation.
pub const MAX_LOOPS_PER_ROUND: u64 = 1 << 20;

const CHUNK: usize = 4096;

/// Exact sampler for `λ ~ q`.
enum LambdaSampler {
    /// `q_i = k_i / D` with `D` a machine word: one uniform draw below `D`.
    Integer { cumulative: Vec<u64>, denominator: u64 },
    /// Sequential Bernoulli trials `q_i / (1 − Σ_{j<i} q_j)`.
    Chain(Vec<Rational>),
}

impl LambdaSampler {
    fn new(q: &[Rational]) -> Self {
        let d = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        if let Some(denominator) = d.to_u64() {
            let mut acc = 0u64;
            let cumulative = q
                .iter()
                .map(|x| {
                    acc += (x.numer() * (&d / x.denom())).to_u64().expect("fits below the denominator");
                    acc
                })
                .collect();
            return LambdaSampler::Integer { cumulative, denominator };
        }
        let mut rest = Rational::one();
        let chain = q
            .iter()
            .map(|x| {
                let p = if rest.is_zero() { Rational::one() } else { x / &rest };
                rest -= x;
                p
            })
            .collect();
        LambdaSampler::Chain(chain)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            LambdaSampler::Integer { cumulative, denominator } => {
                let u = rng.gen_range(0..*denominator);
                cumulative.iter().position(|&c| u < c).expect("u is below the total")
            }
            LambdaSampler::Chain(p) => {
                for (i, pi) in p.iter().enumerate() {
                    if rational::sample_bernoulli(rng, pi) {
                        return i;
                    }
                }
                p.len() - 1
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    /// `[setting][v index][w index]`, `v` over the detected outcomes.
    counts: [[[u64; 2]; 2]; 4],
    loops: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for s in 0..4 {
            for v in 0..2 {
                for w in 0..2 {
                    self.counts[s][v][w] += other.counts[s][v][w];
                }
            }
        }
        self.loops += other.loops;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopSimulation {
    pub seed: u64,
    pub rounds: u64,
    /// Rounds per setting `(0,0), (0,1), (1,0), (1,1)`.
    pub setting_rounds: Vec<u64>,
    /// Total number of loops (non-detections) before the recorded outcomes.
    pub loops: u64,
    /// Recorded `(v, w)` counts; rows `(−1,−1), (−1,+1), (+1,−1), (+1,+1)`,
    /// columns the settings.
    pub counts: Vec<Vec<u64>>,
    /// `counts` divided by the rounds of each setting.
    pub empirical: Vec<Vec<f64>>,
    /// The postselected table the frequencies should approach.
    pub exact: Correlation,
    /// Total-variation distance per setting.
    pub tv_per_setting: Vec<f64>,
    /// The largest per-setting distance.
    pub tv_distance: f64,
}

/// Runs `rounds` rounds with uniformly random settings. In each round λ is
/// drawn afresh until Alice's response is not `∅`; the last draw's `(v, w)`
/// is recorded.
pub fn run_loop_simulation(hvm: &HiddenVariableModel, seed: u64, rounds: u64) -> Result<LoopSimulation, BellError> {
    if rounds == 0 {
        return Err(BellError::NoRounds);
    }
    let p0 = behavior_from_hvm(hvm);
    for a in 0..2 {
        if p0.null_probability(a, 0).is_one() {
            return Err(BellError::GuaranteedLoop { a });
        }
    }
    let exact = postselect(&p0)?;
    let q: Vec<Rational> = hvm.values().iter().map(|v| v.q.clone()).collect();
    let responses: Vec<Responses> = hvm.values().iter().map(|v| v.responses).collect();
    let sampler = LambdaSampler::new(&q);

    let chunks = rounds.div_ceil(CHUNK as u64);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            let end = ((c + 1) * CHUNK as u64).min(rounds);
            for round in c * CHUNK as u64..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(round);
                let (a, b) = (usize::from(rng.gen::<bool>()), usize::from(rng.gen::<bool>()));
                let mut loops = 0u64;
                loop {
                    let r = responses[sampler.sample(&mut rng)];
                    let w = r.bob[b];
                    match r.alice[a] {
                        AliceOutcome::Null => {
                            loops += 1;
                            if loops >= MAX_LOOPS_PER_ROUND {
                                return Err(BellError::LoopGuard { limit: MAX_LOOPS_PER_ROUND });
                            }
                        }
                        v => {
                            let vi = usize::from(v == AliceOutcome::Plus);
                            t.counts[a * 2 + b][vi][w as usize] += 1;
                            break;
                        }
                    }
                }
                t.loops += loops;
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))?;

    let setting_rounds: Vec<u64> = (0..4).map(|s| tally.counts[s].iter().flatten().sum()).collect();
    let mut counts = vec![vec![0u64; 4]; 4];
    let mut empirical = vec![vec![0.0f64; 4]; 4];
    let mut tv_per_setting = vec![0.0f64; 4];
    for (s, &(a, b)) in SETTINGS.iter().enumerate() {
        for (row, (v, w)) in AliceOutcome::DETECTED.iter().flat_map(|&v| Sign::ALL.map(move |w| (v, w))).enumerate() {
            let vi = usize::from(v == AliceOutcome::Plus);
            let n = tally.counts[s][vi][w as usize];
            counts[row][s] = n;
            let freq = if setting_rounds[s] == 0 { 0.0 } else { n as f64 / setting_rounds[s] as f64 };
            empirical[row][s] = freq;
            tv_per_setting[s] += (freq - rational::to_f64(exact.get(v, w, a, b))).abs() / 2.0;
        }
    }
    let tv_distance = tv_per_setting.iter().cloned().fold(0.0, f64::max);
    Ok(LoopSimulation {
        seed,
        rounds,
        setting_rounds,
        loops: tally.loops,
        counts,
        empirical,
        exact,
        tv_per_setting,
        tv_distance,
    })
}

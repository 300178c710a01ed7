//! `mixture ...` subcommands.

use std::path::PathBuf;

use aitlab_core::mixture::{
    concentration_experiment, explanation_ranking, zombie_report_capped, zombie_report_mc, MixtureState,
    DEFAULT_HORIZON_CAP,
};
use aitlab_core::{rational, BitString, Rational};
use clap::{Args, Subcommand};
use serde::Serialize;

use crate::error::CliError;
use crate::inputs;
use crate::output::{Provenance, Report};

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Family file: a JSON list of members.
    #[arg(long)]
    pub family: PathBuf,
    /// Observed bits.
    #[arg(long, value_parser = inputs::bits, default_value = "")]
    pub z: BitString,
}

impl FamilyArgs {
    fn provenance(&self, command: &str) -> Provenance {
        Provenance::new(command).param("family", &self.family).param("z", &self.z)
    }

    fn prior(&self) -> Result<MixtureState, CliError> {
        inputs::family(&self.family)
    }

    fn state(&self) -> Result<MixtureState, CliError> {
        Ok(self.prior()?.posterior(&self.z)?)
    }
}

#[derive(Subcommand, Debug)]
pub enum MixtureCommand {
    /// Posterior weights of every member given z.
    Posterior(FamilyArgs),
    /// M_V(y | z).
    Conditional {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = inputs::bits)]
        y: BitString,
    },
    /// Distance between the mixture's and one member's predictions.
    Zombie {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        member: usize,
        #[arg(long)]
        horizon: usize,
        /// Distances below this count as zombie behavior.
        #[arg(long, value_parser = inputs::rational, default_value = "1/20")]
        threshold: Rational,
        /// Estimate by sampling this many continuations instead of summing.
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest horizon summed exhaustively.
        #[arg(long, default_value_t = DEFAULT_HORIZON_CAP)]
        horizon_cap: usize,
    },
    /// Termination mass and the posterior over continuing members.
    Survival(FamilyArgs),
    /// Members ranked by prior weight times likelihood of z.
    Ranking(FamilyArgs),
    /// Sample trajectories from one member and track posterior concentration.
    Concentrate {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        true_member: usize,
        #[arg(long)]
        trajectories: usize,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        seed: u64,
    },
    /// The worked examples with exact values.
    DemoPaper,
}

#[derive(Serialize)]
struct PosteriorEntry {
    id: usize,
    name: String,
    c: u32,
    #[serde(with = "rational::serde_str")]
    prior: Rational,
    #[serde(with = "rational::serde_str")]
    likelihood: Rational,
    #[serde(with = "rational::serde_str")]
    posterior: Rational,
}

pub fn posterior_entries(state: &MixtureState) -> serde_json::Value {
    let members: Vec<PosteriorEntry> = state
        .members()
        .iter()
        .zip(state.posterior_weights())
        .enumerate()
        .map(|(i, (m, posterior))| PosteriorEntry {
            id: m.id,
            name: m.name.clone(),
            c: m.c,
            prior: m.prior_weight(),
            likelihood: state.likelihood(i).clone(),
            posterior,
        })
        .collect();
    serde_json::json!({
        "z": state.z(),
        "evidence": rational::format(state.evidence()),
        "members": members,
    })
}

pub fn mixture_cmd(cmd: &MixtureCommand) -> Result<Report, CliError> {
    match cmd {
        MixtureCommand::Posterior(f) => {
            Ok(Report::new(f.provenance("mixture posterior"), posterior_entries(&f.state()?)))
        }
        MixtureCommand::Conditional { family, y } => {
            let value = family.state()?.conditional(y)?;
            let prov = family.provenance("mixture conditional").param("y", y);
            let result = serde_json::json!({ "z": family.z, "y": y, "conditional": rational::format(&value) });
            Ok(Report::new(prov, result))
        }
        MixtureCommand::Zombie { family, member, horizon, threshold, samples, seed, horizon_cap } => {
            let state = family.state()?;
            let prov = family
                .provenance("mixture zombie")
                .param("member", member)
                .param("horizon", horizon)
                .param("threshold", rational::format(threshold))
                .param("horizon_cap", horizon_cap);
            match (samples, seed) {
                (Some(n), Some(seed)) => {
                    let prov = prov.param("samples", n).param("seed", seed);
                    Ok(Report::new(prov, zombie_report_mc(&state, *member, *horizon, *n, *seed)?))
                }
                _ => Ok(Report::new(prov, zombie_report_capped(&state, *member, *horizon, threshold, *horizon_cap)?)),
            }
        }
        MixtureCommand::Survival(f) => {
            Ok(Report::new(f.provenance("mixture survival"), f.state()?.survival_deficiency()?))
        }
        MixtureCommand::Ranking(f) => {
            // A ranking is meaningful even when no member explains z.
            let ranking = explanation_ranking(&f.prior()?, &f.z)?;
            Ok(Report::new(f.provenance("mixture ranking"), serde_json::json!({ "z": f.z, "ranking": ranking })))
        }
        MixtureCommand::Concentrate { family, true_member, trajectories, length, horizon, seed } => {
            let prov = Provenance::new("mixture concentrate")
                .param("family", family)
                .param("true_member", true_member)
                .param("trajectories", trajectories)
                .param("length", length)
                .param("horizon", horizon)
                .param("seed", seed);
            if *horizon > DEFAULT_HORIZON_CAP {
                return Err(CliError::input(format!("--horizon is limited to {DEFAULT_HORIZON_CAP}")));
            }
            let mix = inputs::family(family)?;
            let summary = concentration_experiment(&mix, *true_member, *trajectories, *length, *horizon, *seed)?;
            Ok(Report::new(prov, summary))
        }
        MixtureCommand::DemoPaper => crate::demo::mixture_demo(),
    }
}

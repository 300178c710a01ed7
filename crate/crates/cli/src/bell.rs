//! `bell ...` subcommands.

use std::path::PathBuf;

use aitlab_core::bell::{
    behavior_from_hvm, check_lemma_a1, chsh, is_classical, postselect, run_loop_simulation, signalling_report,
    Correlation, HiddenVariableModel,
};
use clap::{ArgGroup, Args, Subcommand};

use crate::error::CliError;
use crate::inputs;
use crate::output::{Provenance, Report};

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["table", "hvm", "paper_model", "pr_box"])))]
pub struct TableSource {
    /// Correlation table file.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Hidden-variable model file; its behavior P0 is used.
    #[arg(long)]
    pub hvm: Option<PathBuf>,
    /// The built-in four-valued model whose postselection is the PR box.
    #[arg(long)]
    pub paper_model: bool,
    /// The PR box itself.
    #[arg(long)]
    pub pr_box: bool,
    /// Postselect on Alice's detections before the operation.
    #[arg(long)]
    pub postselect: bool,
}

impl TableSource {
    fn load(&self) -> Result<Correlation, CliError> {
        let p = if let Some(path) = &self.table {
            inputs::table(path)?
        } else if let Some(path) = &self.hvm {
            behavior_from_hvm(&inputs::hvm(path)?)
        } else if self.paper_model {
            behavior_from_hvm(&HiddenVariableModel::paper_model())
        } else {
            Correlation::pr_box()
        };
        Ok(if self.postselect { postselect(&p)? } else { p })
    }

    fn provenance(&self, command: &str) -> Provenance {
        let prov = Provenance::new(command);
        let prov = if let Some(path) = &self.table {
            prov.param("table", path)
        } else if let Some(path) = &self.hvm {
            prov.param("hvm", path)
        } else if self.paper_model {
            prov.param("paper_model", true)
        } else {
            prov.param("pr_box", true)
        };
        prov.param("postselect", self.postselect)
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("model").required(true).args(["hvm", "paper_model"])))]
pub struct ModelSource {
    #[arg(long)]
    pub hvm: Option<PathBuf>,
    #[arg(long)]
    pub paper_model: bool,
}

impl ModelSource {
    fn load(&self) -> Result<HiddenVariableModel, CliError> {
        match &self.hvm {
            Some(path) => inputs::hvm(path),
            None => Ok(HiddenVariableModel::paper_model()),
        }
    }

    fn provenance(&self, command: &str) -> Provenance {
        match &self.hvm {
            Some(path) => Provenance::new(command).param("hvm", path),
            None => Provenance::new(command).param("paper_model", true),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum BellCommand {
    /// The worked example: P0, the postselected PR box, CHSH and the
    /// no-signalling condition, all exact.
    DemoPaper,
    /// The behavior P0 of a hidden-variable model.
    Build(ModelSource),
    /// P(v,w|a,b) = P0(v,w|a,b) / (1 − P0(∅|a,b)) over detected outcomes.
    Postselect(TableSource),
    /// CHSH value and its classification.
    Chsh(TableSource),
    /// Decide membership in the local polytope, with a certificate either way.
    Classical(TableSource),
    /// Worst-case marginal deviations in both directions.
    Signalling(TableSource),
    /// Check when postselection preserves no-signalling.
    LemmaA1(TableSource),
    /// Monte Carlo run of the protocol that repeats rounds until Alice detects.
    Simulate {
        #[command(flatten)]
        model: ModelSource,
        #[arg(long)]
        rounds: u64,
        #[arg(long)]
        seed: u64,
    },
}

pub fn bell_cmd(cmd: &BellCommand) -> Result<Report, CliError> {
    match cmd {
        BellCommand::DemoPaper => crate::demo::bell_demo(),
        BellCommand::Build(src) => {
            let p = behavior_from_hvm(&src.load()?);
            Ok(Report::new(src.provenance("bell build"), &p).with_text(p.to_string()))
        }
        BellCommand::Postselect(src) => {
            let p = postselect(&src.load()?)?;
            Ok(Report::new(src.provenance("bell postselect"), &p).with_text(p.to_string()))
        }
        BellCommand::Chsh(src) => Ok(Report::new(src.provenance("bell chsh"), chsh(&src.load()?)?)),
        BellCommand::Classical(src) => Ok(Report::new(src.provenance("bell classical"), is_classical(&src.load()?))),
        BellCommand::Signalling(src) => {
            Ok(Report::new(src.provenance("bell signalling"), signalling_report(&src.load()?)))
        }
        BellCommand::LemmaA1(src) => Ok(Report::new(src.provenance("bell lemma-a1"), check_lemma_a1(&src.load()?)?)),
        BellCommand::Simulate { model, rounds, seed } => {
            let prov = model.provenance("bell simulate").param("rounds", rounds).param("seed", seed);
            Ok(Report::new(prov, run_loop_simulation(&model.load()?, *seed, *rounds)?))
        }
    }
}

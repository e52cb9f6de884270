//! Seeded acceptance campaigns.
//!
//! Every campaign draws all of its random parameters up front from its own
//! ChaCha stream, evaluates the trials on the rayon pool and reduces the
//! results in trial order, so reports do not depend on the thread count.

mod algebra;
mod energy;
pub mod oracle;
mod probe;
mod spectral;

use std::time::Instant;

use qei_core::microlocal::Covector;
use qei_core::states::{smear_operator, smeared_field, FockTruncation};
use qei_core::window::Bump;
use qei_core::{CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Campaign, RunConfig};
use crate::error::CliError;
use crate::report::{CriterionReport, Table};

pub use algebra::{passivity, proof_chain, work_identity};
pub use energy::{generator_identity, static_qwei};
pub use probe::microlocal;
pub use spectral::{bochner, foundation, q_step, quiescence};

/// Options that only some campaigns read.
#[derive(Clone, Debug, Default)]
pub struct CampaignOptions {
    /// Replaces the default probe directions of the microlocal campaign.
    pub fan: Option<Vec<Covector>>,
}

/// Report and tables of one campaign.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: CriterionReport,
    pub tables: Vec<Table>,
    pub seconds: f64,
}

/// Independent stream per campaign.
pub fn campaign_rng(seed: u64, campaign: Campaign) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(campaign.number() as u64);
    rng
}

type CampaignResult = Result<(Vec<crate::report::Check>, Vec<Table>), CliError>;

/// Runs one campaign; errors become a failed report.
pub fn run_campaign(cfg: &RunConfig, campaign: Campaign, opts: &CampaignOptions) -> Outcome {
    let start = Instant::now();
    let mut rng = campaign_rng(cfg.seed, campaign);
    let result: CampaignResult = match campaign {
        Campaign::Foundation => foundation(cfg, &mut rng),
        Campaign::QStep => q_step(cfg, &mut rng),
        Campaign::StaticQwei => static_qwei(cfg, &mut rng),
        Campaign::Quiescence => quiescence(cfg, &mut rng),
        Campaign::Bochner => bochner(cfg, &mut rng),
        Campaign::GeneratorIdentity => generator_identity(cfg, &mut rng),
        Campaign::Passivity => passivity(cfg, &mut rng),
        Campaign::WorkIdentity => work_identity(cfg, &mut rng),
        Campaign::ProofChain => proof_chain(cfg, &mut rng),
        Campaign::Microlocal => microlocal(cfg, opts.fan.as_deref()),
    };
    let (report, tables) = match result {
        Ok((checks, tables)) => (CriterionReport::from_checks(campaign, checks), tables),
        Err(e) => (CriterionReport::failed(campaign, &e), Vec::new()),
    };
    Outcome {
        report,
        tables,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub(crate) fn projector(trunc: &FockTruncation, idx: usize) -> CMat {
    let v = trunc.basis_vector(idx);
    &v * v.adjoint()
}

/// `|i⟩⟨j| + |j⟩⟨i|`.
pub(crate) fn flip(dim: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(dim, dim);
    m[(i, j)] = c(1.0, 0.0);
    m[(j, i)] = c(1.0, 0.0);
    m
}

/// Parameters of one hermitian generator: smeared-field coefficients, the
/// smearing window, and multiples of `N₀` and of the `|0⟩↔|1⟩` flip.
#[derive(Clone, Debug)]
pub(crate) struct GeneratorParams {
    pub coefficients: Vec<C64>,
    pub window: Bump,
    pub number: f64,
    pub flip: f64,
}

impl GeneratorParams {
    pub fn random(rng: &mut ChaCha8Rng, modes: usize, window: Option<Bump>) -> Self {
        let coefficients = (0..modes)
            .map(|a| c(uniform(rng, -0.6, 0.6) / (a + 1) as f64, uniform(rng, -0.6, 0.6)))
            .collect();
        let drawn = Bump::new(uniform(rng, -0.6, 0.6), 0.5 + uniform(rng, 0.0, 0.6), 1.0).expect("positive half-width");
        Self {
            coefficients,
            window: window.unwrap_or(drawn),
            number: uniform(rng, -0.6, 0.6),
            flip: uniform(rng, -0.6, 0.6),
        }
    }

    pub fn matrix(&self, trunc: &FockTruncation) -> Result<CMat, CliError> {
        let field = smeared_field(trunc, &self.coefficients)?;
        let dim = trunc.dim();
        Ok(smear_operator(trunc, &field, &self.window)?
            + trunc.number(0) * c(self.number, 0.0)
            + flip(dim, 0, 1) * c(self.flip, 0.0))
    }
}

/// One to three random generators.
pub(crate) fn random_word_params(rng: &mut ChaCha8Rng, modes: usize, window: Option<Bump>) -> Vec<GeneratorParams> {
    let len = rng.gen_range(1..=3);
    (0..len).map(|_| GeneratorParams::random(rng, modes, window)).collect()
}

pub(crate) fn word_unitary(trunc: &FockTruncation, params: &[GeneratorParams]) -> Result<qei_core::passivity::UnitaryWord, CliError> {
    let gens = params.iter().map(|p| p.matrix(trunc)).collect::<Result<Vec<_>, _>>()?;
    Ok(qei_core::passivity::UnitaryWord::new(trunc.dim(), gens)?)
}

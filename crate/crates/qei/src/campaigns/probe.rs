//! Microlocal fan campaign.

use qei_core::microlocal::{
    cone_classify, default_bases, default_fan, windowed_decay, Classification, ConeSpec, Covector, ProbeOptions,
    ProbeTarget,
};
use qei_core::qwei::Reference;
use rayon::prelude::*;

use super::CampaignResult;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{num, Check, Measured, Table};

/// Width of the smooth control blob.
const BLOB_WIDTH: f64 = 0.5;
/// Decay order the smooth control must reach.
const BLOB_MIN_ORDER: f64 = 6.0;

pub fn microlocal(cfg: &RunConfig, fan: Option<&[Covector]>) -> CampaignResult {
    let cat = cfg.build_catalog()?;
    let l = cat.circumference();
    let cone = if cfg.geometry.is_ultrastatic() {
        ConeSpec::cylinder(l)?
    } else {
        let (g00, h) = cat.metric_at(0.0)?;
        ConeSpec::new(g00, h, Some(l))?
    };
    let directions: Vec<Covector> = fan.map(<[Covector]>::to_vec).unwrap_or_else(default_fan);
    let opts = ProbeOptions::default();
    let target = ProbeTarget::ModeSum {
        catalog: &cat,
        reference: Reference::Ground,
    };
    let jobs: Vec<_> = default_bases(l)
        .into_iter()
        .flat_map(|b| directions.iter().map(move |d| (b.clone(), *d)))
        .collect();
    let probes = jobs
        .par_iter()
        .map(|(base, dir)| {
            let state = windowed_decay(&target, base, *dir, &opts)?;
            let center = [base.p.0, base.p.1, base.q.0, base.q.1];
            let blob = ProbeTarget::GaussianBlob {
                center,
                width: BLOB_WIDTH,
            };
            let control = windowed_decay(&blob, base, *dir, &opts)?;
            Ok((cone_classify(&cone, base, *dir), state, control))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(
        "microlocal_fan",
        &["base", "direction", "predicted", "classification", "nu", "fit_residual", "blob_nu"],
    );
    let (mut matches, mut contradictions, mut blob_min) = (0usize, 0usize, f64::INFINITY);
    for (predicted, probe, control) in &probes {
        let got = probe.classification;
        if got == *predicted {
            matches += 1;
        } else if got != Classification::Inconclusive && *predicted != Classification::Inconclusive {
            contradictions += 1;
        }
        blob_min = blob_min.min(control.nu);
        let d = probe.direction;
        table.push(vec![
            probe.base.label.clone(),
            format!("{} {} {} {}", num(d[0]), num(d[1]), num(d[2]), num(d[3])),
            predicted.as_str().into(),
            got.as_str().into(),
            num(probe.nu),
            num(probe.fit_residual),
            num(control.nu),
        ]);
    }
    // The agreement threshold scales with custom fans.
    let required = (cfg.sizes.microlocal_min_matches * probes.len()).div_ceil(24);
    let checks = vec![
        Check::count_at_least("directions matching the cone", matches, required),
        Check::count_at_most("hard contradictions", contradictions, 0),
        Check::at_least("smallest decay order of the smooth control", Measured::exact(blob_min), BLOB_MIN_ORDER),
    ];
    Ok((checks, vec![table]))
}

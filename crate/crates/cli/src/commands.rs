use std::io;

use evidence_core::verification::{run_all, run_bbp_suite};
use evidence_core::{
    evidence_e, find_trp, iso_contour, sweep_evidence, sweep_grid, ContourSpec, HypothesisContrast, IsoOptions,
    Observation, SweepGrid, SweepRow,
};

use crate::output::{write_reports, write_rows, OutputRow};
use crate::{Common, Failure, PointArgs};

fn emit(rows: &[OutputRow], common: &Common) -> Result<(), Failure> {
    write_rows(io::stdout().lock(), rows, common.format).map_err(io_failure)?;
    if rows.iter().any(OutputRow::is_error) {
        Err(Failure::Compute)
    } else {
        Ok(())
    }
}

fn to_row(hc: &HypothesisContrast, row: &SweepRow) -> OutputRow {
    match &row.result {
        Ok(r) => OutputRow::from_result(r),
        Err(e) => OutputRow::failed(hc, Some(row.n), Some(row.x), e),
    }
}

pub fn evidence(point: &PointArgs, common: &Common) -> Result<(), Failure> {
    let hc = point.contrast.build()?;
    let cfg = common.config()?;
    let n = point.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let obs = match (point.x, point.ratio) {
        (Some(x), None) => Observation::new(n, x),
        (None, Some(r)) => Observation::from_ratio(n, r),
        _ => return Err(Failure::Usage("give exactly one of --x and --ratio".into())),
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let row = match evidence_e(&hc, &obs, &cfg) {
        Ok(r) => OutputRow::from_result(&r),
        Err(e) => OutputRow::failed(&hc, Some(obs.n()), Some(obs.x()), &e),
    };
    emit(&[row], common)
}

pub fn sweep(hc: &HypothesisContrast, n_values: Vec<f64>, ratios: Vec<f64>, common: &Common) -> Result<(), Failure> {
    let cfg = common.config()?;
    let rows = sweep_grid(hc, &SweepGrid { n_values, ratios }, &cfg);
    let out: Vec<OutputRow> = rows.iter().map(|r| to_row(hc, r)).collect();
    emit(&out, common)
}

/// One row per grid ratio at its solved `n`, then the apex row.
pub fn iso(
    hc: &HypothesisContrast,
    target: f64,
    ratios: Vec<f64>,
    options: IsoOptions,
    common: &Common,
) -> Result<(), Failure> {
    let cfg = common.config()?;
    let contour = iso_contour(
        hc,
        &ContourSpec {
            target,
            ratios,
            options,
        },
        &cfg,
    );

    let mut cells: Vec<(f64, Result<Observation, _>)> = contour
        .points
        .iter()
        .map(|p| (p.ratio, p.n.clone().and_then(|n| Observation::from_ratio(n, p.ratio))))
        .collect();
    if let Some((ratio, n)) = contour.apex {
        cells.push((ratio, Observation::from_ratio(n, ratio)));
    }
    let valid: Vec<Observation> = cells.iter().filter_map(|c| c.1.as_ref().ok().copied()).collect();
    let mut evaluated = sweep_evidence(hc, &valid, &cfg).into_iter();
    let mut rows: Vec<OutputRow> = cells
        .iter()
        .map(|(ratio, obs)| match obs {
            Ok(_) => to_row(hc, &evaluated.next().expect("one row per valid cell")),
            Err(e) => {
                let mut row = OutputRow::failed(hc, None, None, e);
                row.ratio = crate::output::round12(*ratio);
                row
            }
        })
        .collect();
    if contour.apex.is_some() {
        if let Some(last) = rows.last_mut() {
            last.apex = true;
        }
    }
    emit(&rows, common)
}

/// One row per transition point, evaluated at the point itself.
pub fn trp(hc: &HypothesisContrast, n_values: Vec<f64>, common: &Common) -> Result<(), Failure> {
    let cfg = common.config()?;
    let mut rows = Vec::new();
    for n in n_values {
        match find_trp(hc, n, &cfg).and_then(|t| {
            t.points
                .iter()
                .map(|p| Observation::from_ratio(n, p.ratio))
                .collect::<Result<Vec<_>, _>>()
        }) {
            Ok(obs) => rows.extend(sweep_evidence(hc, &obs, &cfg).iter().map(|r| to_row(hc, r))),
            Err(e) => rows.push(OutputRow::failed(hc, Some(n), None, &e)),
        }
    }
    emit(&rows, common)
}

pub fn verify(hc: Option<HypothesisContrast>, common: &Common) -> Result<(), Failure> {
    let cfg = common.config()?;
    let reports = match hc {
        None => run_all(&cfg),
        Some(hc) => run_bbp_suite(&[hc], &cfg),
    };
    write_reports(io::stdout().lock(), &reports, common.format).map_err(io_failure)?;
    for r in &reports {
        eprintln!("{}", r.line());
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn io_failure(e: io::Error) -> Failure {
    eprintln!("error: {e}");
    Failure::Compute
}

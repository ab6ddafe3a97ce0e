//! Parameter sweep: parallel classification with spot integration over the
//! default grid (or a user-restricted one), a directory of JSON reports, and
//! one summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sigmak::classifier::classify;
use sigmak::error::Error;
use sigmak::first_integral::{null_points, turning_points};
use sigmak::ode::{integrate, IntegrationConfig};
use sigmak::verify::{default_sweep_cells, state_on_level, SweepCell};
use sigmak::{Branch, MetricParams, SigmaSign};

use crate::report::{build_report, xi_tt_sign_i8, ReportInputs};
use crate::table::num;

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub index: usize,
    pub cell: SweepCell,
    pub result: CellResult,
}

#[derive(Debug, Clone)]
pub enum CellResult {
    Classified {
        report_json: String,
        case_path: &'static str,
        drift: Option<f64>,
        events: usize,
    },
    Inadmissible(String),
    Failed(String),
}

/// Pick a start abscissa inside the admissible region for spot integration.
fn spot_state(cell: &SweepCell, params: &MetricParams) -> Option<sigmak::LogState> {
    let branch = cell.branch;
    // Candidate anchors: between the structural points when they exist,
    // otherwise a short scan.
    let mut candidates = vec![0.0, 0.5, -0.5, 1.0, -1.0, 1.5, 2.0];
    if let Ok(roots) = turning_points(cell.h, params) {
        if roots.len() == 2 {
            candidates.insert(0, 0.5 * (roots[0] + roots[1]));
        }
        for r in roots {
            candidates.push(r + 0.1);
            candidates.push(r - 0.1);
        }
    }
    if let Ok(nulls) = null_points(cell.h, params) {
        for r in nulls {
            candidates.push(r + 0.2);
            candidates.push(r - 0.2);
        }
    }
    for xi0 in candidates {
        for sign in [-1.0, 1.0] {
            if let Ok(st) = state_on_level(params, cell.h, branch, xi0, sign) {
                if st.xi_t.abs() < 1e-8 && branch == Branch::Positive {
                    continue; // turning point: fine, but prefer interior
                }
                // Respect the xi_tt-sign stratum where the cell carries one.
                if let Some(want) = cell.xi_tt_sign {
                    match sigmak::classifier::xi_tt_sign_from_state(&st, params) {
                        Ok(got) if got == want => return Some(st),
                        _ => continue,
                    }
                }
                return Some(st);
            }
        }
    }
    // The equilibrium cell (xi_tt = 0) starts exactly at the fixed point.
    if cell.xi_tt_sign == Some(sigmak::classifier::XiTtSign::Zero) {
        if let Ok(roots) = turning_points(cell.h, params) {
            if roots.len() == 1 {
                return Some(sigmak::LogState::new(0.0, roots[0], 0.0));
            }
        }
    }
    None
}

pub fn run_cell(index: usize, cell: &SweepCell) -> CellOutcome {
    let params = match MetricParams::new(cell.n, cell.k, cell.s) {
        Ok(p) => p,
        Err(e) => return CellOutcome { index, cell: *cell, result: CellResult::Failed(e.to_string()) },
    };
    match classify(&params, cell.h, cell.branch, cell.xi_tt_sign) {
        Ok(class) => {
            let mut drift = None;
            let mut events = 0;
            if let Some(st) = spot_state(cell, &params) {
                let cfg = IntegrationConfig {
                    max_span: 4.0,
                    xi_min: -5.0 / params.nf(),
                    xi_max: 6.0,
                    ..Default::default()
                };
                if let Ok(traj) = integrate(&st, &params, &cfg) {
                    drift = Some(traj.drift);
                    events = traj.events.len();
                }
            }
            let inputs = ReportInputs {
                n: cell.n,
                k: cell.k,
                sign: cell.s.as_i8(),
                h: Some(cell.h),
                branch: Some(cell.branch.as_i8()),
                xi_tt_sign: xi_tt_sign_i8(cell.xi_tt_sign),
                xi: None,
                xi_t: None,
                family: None,
            };
            let report = build_report(&params, inputs, &class, false);
            let report_json = serde_json::to_string_pretty(&report).expect("serializable");
            CellOutcome {
                index,
                cell: *cell,
                result: CellResult::Classified {
                    report_json,
                    case_path: class.case_path.label(),
                    drift,
                    events,
                },
            }
        }
        Err(Error::Inadmissible(msg)) => {
            CellOutcome { index, cell: *cell, result: CellResult::Inadmissible(msg) }
        }
        Err(e) => CellOutcome { index, cell: *cell, result: CellResult::Failed(e.to_string()) },
    }
}

/// The sweep grid. Without `h_list`/`branch_list` this is the default grid
/// (designed to hit every fixed-sign leaf), restricted by the optional
/// n/k/sign lists; an explicit `h_list` or `branch_list` replaces the
/// corresponding default strata.
pub fn grid(
    n_list: Option<&[u32]>,
    k_list: Option<&[u32]>,
    sign_list: Option<&[SigmaSign]>,
    h_list: Option<&[f64]>,
    branch_list: Option<&[Branch]>,
) -> Vec<SweepCell> {
    let base = default_sweep_cells();
    let restricted = base
        .into_iter()
        .filter(|c| n_list.map_or(true, |l| l.contains(&c.n)))
        .filter(|c| k_list.map_or(true, |l| l.contains(&c.k)))
        .filter(|c| sign_list.map_or(true, |l| l.contains(&c.s)))
        .filter(|c| branch_list.map_or(true, |l| l.contains(&c.branch)));
    match h_list {
        None => restricted.collect(),
        Some(hs) => {
            // Rebuild the h stratum: one cell per requested level, keeping
            // the (n, k, s, branch) combinations of the restricted grid.
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            for c in restricted {
                if !seen.insert((c.n, c.k, c.s.as_i8(), c.branch.as_i8())) {
                    continue;
                }
                for &h in hs {
                    out.push(SweepCell { h, xi_tt_sign: None, ..c });
                    // Cells in the xi_tt-split region get all three strata.
                    if let Ok(p) = MetricParams::new(c.n, c.k, c.s) {
                        let needs_sign = c.s == SigmaSign::Negative
                            && c.branch == Branch::Positive
                            && 2 * c.k > c.n
                            && sigmak::first_integral::critical_h(&p).map_or(false, |hs| h >= hs * (1.0 - 1e-12));
                        if needs_sign {
                            out.pop();
                            for sign in [
                                sigmak::classifier::XiTtSign::Negative,
                                sigmak::classifier::XiTtSign::Zero,
                                sigmak::classifier::XiTtSign::Positive,
                            ] {
                                out.push(SweepCell { h, xi_tt_sign: Some(sign), ..c });
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

/// Run the sweep over `cells` with `threads` workers; outcomes are returned
/// in cell order regardless of scheduling.
pub fn run(cells: &[SweepCell], threads: usize) -> Vec<CellOutcome> {
    let threads = threads.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut outcomes: Vec<Option<CellOutcome>> = Vec::new();
    outcomes.resize_with(cells.len(), || None);
    let slots = std::sync::Mutex::new(&mut outcomes);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let outcome = run_cell(i, &cells[i]);
                slots.lock().expect("no poisoned workers")[i] = Some(outcome);
            });
        }
    });
    outcomes.into_iter().map(|o| o.expect("every cell ran")).collect()
}

/// Write per-cell reports and the summary table; returns (summary text,
/// per-case counts).
pub fn write_outputs(
    dir: &Path,
    outcomes: &[CellOutcome],
) -> std::io::Result<(String, BTreeMap<&'static str, usize>)> {
    std::fs::create_dir_all(dir)?;
    let mut summary = String::from("index,n,k,sign,branch,h,xi_tt_sign,status,case_path,drift,events\n");
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for o in outcomes {
        let c = &o.cell;
        let xi_tt = c.xi_tt_sign.map(|s| s.as_i8().to_string()).unwrap_or_default();
        match &o.result {
            CellResult::Classified { report_json, case_path, drift, events } => {
                let path = dir.join(format!("cell_{:05}.json", o.index));
                std::fs::write(path, report_json)?;
                *counts.entry(case_path).or_insert(0) += 1;
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{},classified,{},{},{}",
                    o.index,
                    c.n,
                    c.k,
                    c.s.as_i8(),
                    c.branch.as_i8(),
                    num(c.h),
                    xi_tt,
                    case_path,
                    drift.map(num).unwrap_or_default(),
                    events
                );
            }
            CellResult::Inadmissible(msg) => {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{},inadmissible,\"{}\",,",
                    o.index,
                    c.n,
                    c.k,
                    c.s.as_i8(),
                    c.branch.as_i8(),
                    num(c.h),
                    xi_tt,
                    msg.replace('"', "'")
                );
            }
            CellResult::Failed(msg) => {
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{},failed,\"{}\",,",
                    o.index,
                    c.n,
                    c.k,
                    c.s.as_i8(),
                    c.branch.as_i8(),
                    num(c.h),
                    xi_tt,
                    msg.replace('"', "'")
                );
            }
        }
    }
    std::fs::write(dir.join("summary.csv"), &summary)?;
    Ok((summary, counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_classifies_in_parallel() {
        let cells = grid(Some(&[3, 5]), Some(&[2]), None, None, None);
        assert!(!cells.is_empty());
        let outcomes = run(&cells, 4);
        assert_eq!(outcomes.len(), cells.len());
        let classified = outcomes
            .iter()
            .filter(|o| matches!(o.result, CellResult::Classified { .. }))
            .count();
        let inadmissible = outcomes
            .iter()
            .filter(|o| matches!(o.result, CellResult::Inadmissible(_)))
            .count();
        assert!(classified > 10);
        assert!(inadmissible > 0);
        assert!(!outcomes.iter().any(|o| matches!(o.result, CellResult::Failed(_))));
    }
}

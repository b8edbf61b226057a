//! Parameter sweeps: one isolated run per grid point on a worker pool,
//! assembled in sweep order.

use rayon::prelude::*;

use super::commands::{classify_row, find_bound_states, fit_report, fit_row, CLASSIFY_COLUMNS, FIT_COLUMNS};
use super::config::{RunConfig, SweepTask};
use super::table::{Cell, Table};
use crate::boundstates::{BoundState, LoopClass};
use crate::error::{Error, Result};

const BOUND_STATE_COLUMNS: [&str; 11] = [
    "n_states",
    "n_inside",
    "n_outside",
    "inside_re_e",
    "inside_im_e",
    "inside_emitter_weight",
    "inside_xi",
    "outside_re_e",
    "outside_im_e",
    "outside_emitter_weight",
    "outside_xi",
];

fn task_columns(task: SweepTask) -> Vec<&'static str> {
    match task {
        SweepTask::BoundStates => BOUND_STATE_COLUMNS.to_vec(),
        SweepTask::Classify => CLASSIFY_COLUMNS.to_vec(),
        // observable and law are fixed across a sweep
        SweepTask::Fit => FIT_COLUMNS[2..].to_vec(),
    }
}

fn strongest(states: &[BoundState], class: LoopClass) -> Vec<Cell> {
    let best = states
        .iter()
        .filter(|s| s.loop_class == class)
        .max_by(|a, b| a.emitter_weight.total_cmp(&b.emitter_weight));
    match best {
        Some(s) => vec![s.energy.re.into(), s.energy.im.into(), s.emitter_weight.into(), s.xi().into()],
        None => vec![Cell::Empty; 4],
    }
}

fn point_cells(cfg: &RunConfig, task: SweepTask) -> Result<Vec<Cell>> {
    cfg.validate()?;
    match task {
        SweepTask::BoundStates => {
            let states = find_bound_states(cfg)?;
            let count = |c: LoopClass| states.iter().filter(|s| s.loop_class == c).count();
            let mut row: Vec<Cell> = vec![
                states.len().into(),
                count(LoopClass::InsideLoop).into(),
                count(LoopClass::OutsideLoop).into(),
            ];
            row.extend(strongest(&states, LoopClass::InsideLoop));
            row.extend(strongest(&states, LoopClass::OutsideLoop));
            Ok(row)
        }
        SweepTask::Classify => classify_row(cfg),
        SweepTask::Fit => {
            let (report, _) = fit_report(cfg)?;
            Ok(fit_row(cfg, &report)[2..].to_vec())
        }
    }
}

/// Runs every point of the configured sweep. Returns the table and the
/// number of points that succeeded.
pub fn run_sweep(cfg: &RunConfig, jobs: usize) -> Result<(Table, usize)> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Validation(vec!["sweep section is missing".into()]))?;
    let names: Vec<&str> = sweep.params.iter().map(|p| p.name.as_str()).collect();
    let axes: Vec<Vec<f64>> = sweep.params.iter().map(|p| p.resolved_values()).collect();
    let points: Vec<Vec<f64>> = match axes.as_slice() {
        [a] => a.iter().map(|&v| vec![v]).collect(),
        [a, b] => a.iter().flat_map(|&u| b.iter().map(move |&v| vec![u, v])).collect(),
        _ => return Err(Error::Validation(vec!["sweep needs one or two parameters".into()])),
    };
    let task = sweep.task;
    let columns = task_columns(task);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let results: Vec<Result<Vec<Cell>>> = pool.install(|| {
        points
            .par_iter()
            .map(|values| {
                let mut point = cfg.clone();
                point.sweep = None;
                for (name, &v) in names.iter().zip(values) {
                    point.set_param(name, v)?;
                }
                point_cells(&point, task)
            })
            .collect()
    });

    let mut header: Vec<&str> = names.clone();
    header.extend(&columns);
    header.push("error");
    let mut table = Table::new("sweep", &header);
    let mut ok = 0;
    for (values, result) in points.iter().zip(results) {
        let mut row: Vec<Cell> = values.iter().map(|&v| v.into()).collect();
        match result {
            Ok(cells) => {
                ok += 1;
                row.extend(cells);
                row.push(Cell::Empty);
            }
            Err(e) => {
                log::warn!("sweep point {values:?} failed: {e}");
                row.extend(std::iter::repeat_n(Cell::Empty, columns.len()));
                row.push(e.to_string().into());
            }
        }
        table.push(row);
    }
    Ok((table, ok))
}

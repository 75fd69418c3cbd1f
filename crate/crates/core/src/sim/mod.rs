//! Discrete-event timing model of the overlay: AND and XOR garbling cells, a
//! serial host link, block RAM and multi-port DDR.
//!
//! Generic over the time type; see [`crate::Scalar`].

mod engine;
mod params;
mod program;
mod report;

pub use params::{SimOptions, TimingParams};
pub use program::{Op, Program};
pub use report::{sweep_csv, LayerReport, PolicyComparison, PolicyRow, SimReport, SweepRow};

use thiserror::Error;

use crate::netlist::Circuit;
use crate::scheduler::{allocate, extract_layers, make_schedule, Layering, MemoryMap, Policy, Schedule};
use crate::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("schedule or memory map does not match the circuit: {0}")]
    Mismatch(String),
}

/// Runs a prepared program.
pub fn simulate_program<T: Scalar>(
    program: &Program,
    params: &TimingParams<T>,
    options: &SimOptions,
) -> Result<SimReport<T>, SimError> {
    params.validate()?;
    Ok(engine::simulate_program(program, params, options))
}

pub fn simulate<T: Scalar>(
    c: &Circuit,
    schedule: &Schedule,
    map: &MemoryMap,
    params: &TimingParams<T>,
    options: &SimOptions,
) -> Result<SimReport<T>, SimError> {
    if map.policy != options.policy {
        return Err(SimError::Mismatch(format!(
            "memory map uses {} but options request {}",
            map.policy, options.policy
        )));
    }
    simulate_program(&Program::from_schedule(c, schedule, map)?, params, options)
}

/// Schedules, allocates and simulates with the cell counts in `params`.
pub fn simulate_circuit<T: Scalar>(
    c: &Circuit,
    params: &TimingParams<T>,
    options: &SimOptions,
) -> Result<SimReport<T>, SimError> {
    simulate_layered(c, &extract_layers(c), params, options)
}

fn simulate_layered<T: Scalar>(
    c: &Circuit,
    layering: &Layering,
    params: &TimingParams<T>,
    options: &SimOptions,
) -> Result<SimReport<T>, SimError> {
    params.validate()?;
    let schedule = make_schedule(c, layering, params.n_and_cells as usize, params.n_xor_cells as usize);
    let map = allocate(options.policy, c, layering, options.capacity());
    simulate(c, &schedule, &map, params, options)
}

/// The same run under every memory policy, each at its default capacity
/// unless `options` fixes one.
pub fn compare_policies<T: Scalar>(
    c: &Circuit,
    params: &TimingParams<T>,
    options: &SimOptions,
) -> Result<PolicyComparison<T>, SimError> {
    let layering = extract_layers(c);
    let rows = Policy::ALL
        .into_iter()
        .map(|policy| {
            let opts = SimOptions { policy, ..*options };
            simulate_layered(c, &layering, params, &opts).map(|report| PolicyRow { policy, report })
        })
        .collect::<Result<_, _>>()?;
    Ok(PolicyComparison { rows })
}

pub fn sweep_cells<T: Scalar>(
    c: &Circuit,
    params: &TimingParams<T>,
    options: &SimOptions,
    cells: &[(u32, u32)],
) -> Result<Vec<SweepRow<T>>, SimError> {
    if cells.is_empty() {
        return Err(SimError::Config("no cell counts to sweep".into()));
    }
    let layering = extract_layers(c);
    let mut rows: Vec<SweepRow<T>> = Vec::with_capacity(cells.len());
    for &(n_and, n_xor) in cells {
        let p = TimingParams { n_and_cells: n_and, n_xor_cells: n_xor, ..*params };
        let total_ns = simulate_layered(c, &layering, &p, options)?.total_ns;
        let speedup_vs_previous = rows.last().map(|prev| prev.total_ns.as_f64() / total_ns.as_f64());
        rows.push(SweepRow { n_and, n_xor, total_ns, speedup_vs_previous });
    }
    Ok(rows)
}

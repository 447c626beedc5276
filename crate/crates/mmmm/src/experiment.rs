//! The five experiment tables.
//!
//! A-C record how the truncation order and operation counts grow with `t`
//! and `lambda0` for a fixed remainder tolerance. D and E put the closed
//! forms for one and two servers next to a fixed-order series.

use mmmm_core::exact::exact;
use mmmm_core::oracle::{integrate_matrix, OracleConfig};
use mmmm_core::series::{choose_truncation, truncated_expm, TruncationReport};
use mmmm_core::SystemParams;

use crate::args::{ExperimentArgs, TableId};
use crate::failure::{CmdResult, Failure};
use crate::format::{csv_string, fixed, round_half_up};

/// Remainder tolerance of tables A-C.
pub const SERIES_TOL: f64 = 1e-3;

/// Decimal places of the printed error bound.
pub const BOUND_DIGITS: usize = 4;

const TIMES_A: [f64; 13] = [
    0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4,
];
const RATES_BC: [f64; 16] = [
    0.1, 0.8, 1.6, 2.4, 4.0, 8.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0,
];

/// Mean service time of tables D and E (`1/alpha = 0.1`).
pub const ALPHA_DE: f64 = 10.0;
pub const TIMES_DE: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 2.5];
pub const ORDER_D: usize = 10;
pub const ORDER_E: usize = 15;

/// One case of tables D/E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientCase {
    pub case: usize,
    /// Arrival rate the tabulated probabilities correspond to.
    pub lambda0: f64,
    /// Arrival rate in the case heading of the original table.
    pub label: f64,
}

/// Case headings of the original tables do not always match the values
/// beneath them; the rates here are the ones that reproduce the values.
pub const CASES_D: [TransientCase; 3] = [
    TransientCase {
        case: 1,
        lambda0: 0.05,
        label: 0.005,
    },
    TransientCase {
        case: 2,
        lambda0: 0.4,
        label: 0.4,
    },
    TransientCase {
        case: 3,
        lambda0: 0.9,
        label: 0.9,
    },
];
pub const CASES_E: [TransientCase; 2] = [
    TransientCase {
        case: 1,
        lambda0: 0.05,
        label: 0.4,
    },
    TransientCase {
        case: 2,
        lambda0: 0.4,
        label: 0.9,
    },
];

/// A row of tables A-C: the varied quantity and the chosen truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub x: f64,
    pub report: TruncationReport,
}

impl SeriesRow {
    /// Bound rounded half-up to four decimals.
    pub fn printed_bound(&self) -> f64 {
        round_half_up(self.report.error_bound, BOUND_DIGITS)
    }
}

/// Servers, arrival rate and time of each row of tables A-C.
pub fn series_grid(table: TableId) -> Option<Vec<(f64, SystemParams, f64)>> {
    let p = |l: f64, m: usize| SystemParams::new(l, 1.0, m).expect("valid table parameters");
    match table {
        TableId::A => Some(TIMES_A.iter().map(|&t| (t, p(2.0, 10), t)).collect()),
        TableId::B => Some(RATES_BC.iter().map(|&l| (l, p(l, 10), 0.1)).collect()),
        TableId::C => Some(RATES_BC.iter().map(|&l| (l, p(l, 20), 0.1)).collect()),
        TableId::D | TableId::E => None,
    }
}

/// Tables A-C: truncation order, bound and operation counts per row.
pub fn series_table(table: TableId) -> CmdResult<Vec<SeriesRow>> {
    let grid = series_grid(table)
        .ok_or_else(|| Failure::usage(format!("table {table:?} is not a series table")))?;
    grid.into_iter()
        .map(|(x, params, t)| {
            Ok(SeriesRow {
                x,
                report: choose_truncation(&params, t, SERIES_TOL)?,
            })
        })
        .collect()
}

/// A row of tables D/E: one entry `P_ij(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientRow {
    pub case: TransientCase,
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub exact: f64,
    pub approximate: f64,
    /// ODE reference, table E only.
    pub oracle: Option<f64>,
}

fn reference_config() -> OracleConfig {
    OracleConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..OracleConfig::default()
    }
}

/// Tables D/E, optionally restricted to one case and with a replacement
/// arrival rate.
pub fn transient_table(
    table: TableId,
    case: Option<usize>,
    lambda0: Option<f64>,
) -> CmdResult<Vec<TransientRow>> {
    let (cases, m, order): (&[TransientCase], usize, usize) = match table {
        TableId::D => (&CASES_D, 1, ORDER_D),
        TableId::E => (&CASES_E, 2, ORDER_E),
        _ => {
            return Err(Failure::usage(format!(
                "table {table:?} has no transient cases"
            )))
        }
    };
    let selected: Vec<TransientCase> = match case {
        None => cases.to_vec(),
        Some(k) => vec![*cases.iter().find(|c| c.case == k).ok_or_else(|| {
            Failure::usage(format!(
                "table {table:?} has cases 1..={}, got {k}",
                cases.len()
            ))
        })?],
    };
    let mut rows = Vec::new();
    for mut c in selected {
        if let Some(l) = lambda0 {
            c.lambda0 = l;
        }
        let params = SystemParams::new(c.lambda0, ALPHA_DE, m)?;
        for t in TIMES_DE {
            let closed = exact(&params, t)?;
            let series = truncated_expm(&params, t, order)?.transition;
            let oracle = match table {
                TableId::E => Some(integrate_matrix(&params, t, &reference_config())?),
                _ => None,
            };
            for i in 0..=m {
                for j in 0..=m {
                    rows.push(TransientRow {
                        case: c,
                        t,
                        i,
                        j,
                        exact: closed.get(i, j),
                        approximate: series.get(i, j),
                        oracle: oracle.as_ref().map(|o| o.get(i, j)),
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn note(c: &TransientCase, overridden: bool) -> String {
    if overridden {
        format!("lambda0 overridden; printed heading lambda0 = {}", c.label)
    } else if c.label == c.lambda0 {
        format!("printed heading lambda0 = {}", c.label)
    } else {
        format!(
            "printed heading lambda0 = {}; values match lambda0 = {}",
            c.label, c.lambda0
        )
    }
}

pub fn cmd_experiment(args: &ExperimentArgs) -> CmdResult<String> {
    match args.table {
        TableId::A | TableId::B | TableId::C => {
            if args.case.is_some() || args.lambda0.is_some() {
                return Err(Failure::usage(
                    "--case and --lambda0 apply to tables D and E only",
                ));
            }
            let first = if args.table == TableId::A {
                "t"
            } else {
                "lambda0"
            };
            let rows: Vec<Vec<String>> = series_table(args.table)?
                .iter()
                .map(|r| {
                    vec![
                        fixed(r.x, 1),
                        fixed(r.printed_bound(), BOUND_DIGITS),
                        r.report.order.to_string(),
                        r.report.phi.to_string(),
                        r.report.theta.to_string(),
                    ]
                })
                .collect();
            Ok(csv_string(&[first, "error_ub", "F", "phi", "theta"], &rows))
        }
        TableId::D | TableId::E => {
            let with_oracle = args.table == TableId::E;
            let rows: Vec<Vec<String>> = transient_table(args.table, args.case, args.lambda0)?
                .iter()
                .map(|r| {
                    let mut row = vec![
                        r.case.case.to_string(),
                        r.case.lambda0.to_string(),
                        fixed(r.t, 1),
                        format!("P{}{}", r.i, r.j),
                        fixed(r.exact, args.precision),
                        fixed(r.approximate, args.precision),
                    ];
                    if let Some(o) = r.oracle {
                        row.push(fixed(o, args.precision));
                    }
                    row.push(note(&r.case, args.lambda0.is_some()));
                    row
                })
                .collect();
            let mut header = vec!["case", "lambda0", "t", "entry", "exact", "approximate"];
            if with_oracle {
                header.push("oracle");
            }
            header.push("note");
            Ok(csv_string(&header, &rows))
        }
    }
}

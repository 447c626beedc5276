//! `compare` subcommand: every requested method next to the ODE reference.

use std::collections::BTreeMap;

use mmmm_core::asymptotics::{approximate, classify_regime, RegimeTag, RegimeThresholds};
use mmmm_core::exact::exact;
use mmmm_core::infinite::approx_mmm_via_inf;
use mmmm_core::oracle::{integrate, OracleConfig};
use mmmm_core::series::{choose_truncation, truncated_distribution};
use mmmm_core::{Error, SystemParams};
use serde::Serialize;

use crate::args::{CompareArgs, MethodArg, OutputFormat};
use crate::failure::{CmdResult, Failure};
use crate::format::{csv_string, scientific};
use crate::transient::ParamsOut;
use crate::SCHEMA;

/// Value of one method at one grid point, with its deviation from the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodValue {
    pub value: f64,
    pub abs_dev: f64,
    /// `None` when the oracle value is zero.
    pub rel_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    pub t: f64,
    pub regime: Option<RegimeTag>,
    pub oracle: f64,
    /// One entry per requested method; `None` where the method does not apply.
    pub values: Vec<(MethodArg, Option<MethodValue>)>,
    pub series_bound: Option<f64>,
}

/// Distributions that do not depend on `n`, computed once per time.
struct PerTime {
    oracle: Vec<f64>,
    exact: Option<Vec<f64>>,
    series: Option<(Vec<f64>, f64)>,
}

fn per_time(
    params: &SystemParams,
    n0: usize,
    t: f64,
    methods: &[MethodArg],
    tol: f64,
) -> CmdResult<PerTime> {
    let oracle = integrate(params, n0, t, &OracleConfig::default())?.probabilities;
    let exact = if methods.contains(&MethodArg::Exact) {
        exact(params, t).ok().map(|p| p.row(n0).to_vec())
    } else {
        None
    };
    let series = if methods.contains(&MethodArg::Series) {
        choose_truncation(params, t, tol).ok().and_then(|report| {
            truncated_distribution(params, n0, t, report.order)
                .ok()
                .map(|d| (d.probabilities, report.error_bound))
        })
    } else {
        None
    };
    Ok(PerTime {
        oracle,
        exact,
        series,
    })
}

fn deviation(value: f64, oracle: f64) -> MethodValue {
    let abs_dev = (value - oracle).abs();
    MethodValue {
        value,
        abs_dev,
        rel_dev: (oracle != 0.0).then(|| abs_dev / oracle.abs()),
    }
}

/// Evaluates the comparison grid, rows ordered by `t` then `n` as given.
pub fn compare(
    params: &SystemParams,
    n0: usize,
    times: &[f64],
    states: &[usize],
    methods: &[MethodArg],
    tol: f64,
) -> CmdResult<Vec<ComparisonRow>> {
    if times.is_empty() || states.is_empty() {
        return Err(Failure::usage(
            "the comparison grid is empty: give at least one --t and one --n",
        ));
    }
    if n0 > params.m() {
        return Err(Error::StateOutOfRange {
            state: n0,
            m: params.m(),
        }
        .into());
    }
    if let Some(&n) = states.iter().find(|&&n| n > params.m()) {
        return Err(Error::StateOutOfRange {
            state: n,
            m: params.m(),
        }
        .into());
    }
    let methods: Vec<MethodArg> = methods
        .iter()
        .copied()
        .filter(|m| *m != MethodArg::Oracle)
        .collect();
    let thresholds = RegimeThresholds::default();
    let mut rows = Vec::with_capacity(times.len() * states.len());
    for &t in times {
        let cache = per_time(params, n0, t, &methods, tol)?;
        for &n in states {
            let oracle = cache.oracle[n];
            let values = methods
                .iter()
                .map(|&method| {
                    let v = match method {
                        MethodArg::Exact => cache.exact.as_ref().map(|row| row[n]),
                        MethodArg::Series => cache.series.as_ref().map(|(row, _)| row[n]),
                        MethodArg::Asymptotic => approximate(params, n, t, n0, None, &thresholds)
                            .ok()
                            .map(|(_, v)| v),
                        MethodArg::Infinite => {
                            approx_mmm_via_inf(params, n, t, n0).ok().map(|a| a.value)
                        }
                        MethodArg::Oracle => unreachable!("oracle is always reported separately"),
                    };
                    (
                        method,
                        v.filter(|v| v.is_finite()).map(|v| deviation(v, oracle)),
                    )
                })
                .collect();
            rows.push(ComparisonRow {
                n,
                t,
                regime: classify_regime(params, n, t, n0, &thresholds).ok(),
                oracle,
                values,
                series_bound: cache.series.as_ref().map(|(_, b)| *b),
            });
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct ValueJson {
    value: f64,
    abs_dev: f64,
    rel_dev: Option<f64>,
}

#[derive(Serialize)]
struct RowJson {
    n: usize,
    t: f64,
    regime: Option<&'static str>,
    oracle: f64,
    values: BTreeMap<&'static str, Option<ValueJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series_bound: Option<f64>,
}

#[derive(Serialize)]
struct CompareJson {
    schema: &'static str,
    params: ParamsOut,
    n0: usize,
    rows: Vec<RowJson>,
}

fn sig(x: f64, digits: usize) -> f64 {
    scientific(x, digits)
        .parse()
        .expect("formatted float parses")
}

/// Renders comparison rows; numbers use scientific notation with
/// `precision` digits after the point.
pub fn render(
    params: &SystemParams,
    n0: usize,
    rows: &[ComparisonRow],
    output: OutputFormat,
    precision: usize,
) -> String {
    match output {
        OutputFormat::Json => {
            let doc = CompareJson {
                schema: SCHEMA,
                params: ParamsOut::from(params),
                n0,
                rows: rows
                    .iter()
                    .map(|r| RowJson {
                        n: r.n,
                        t: r.t,
                        regime: r.regime.map(|g| g.as_str()),
                        oracle: sig(r.oracle, precision),
                        values: r
                            .values
                            .iter()
                            .map(|(m, v)| {
                                (
                                    m.name(),
                                    v.map(|v| ValueJson {
                                        value: sig(v.value, precision),
                                        abs_dev: sig(v.abs_dev, precision),
                                        rel_dev: v.rel_dev.map(|d| sig(d, precision)),
                                    }),
                                )
                            })
                            .collect(),
                        series_bound: r.series_bound,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut header: Vec<String> = ["n", "t", "regime", "oracle"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let with_bound = rows
                .first()
                .is_some_and(|r| r.values.iter().any(|(m, _)| *m == MethodArg::Series));
            if let Some(first) = rows.first() {
                for (m, _) in &first.values {
                    header.push(m.name().to_string());
                    header.push(format!("{}_abs_dev", m.name()));
                    header.push(format!("{}_rel_dev", m.name()));
                }
            }
            if with_bound {
                header.push("series_bound".to_string());
            }
            let num = |x: f64| scientific(x, precision);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![
                        r.n.to_string(),
                        r.t.to_string(),
                        r.regime.map(|g| g.as_str().to_string()).unwrap_or_default(),
                        num(r.oracle),
                    ];
                    for (_, v) in &r.values {
                        match v {
                            Some(v) => {
                                row.push(num(v.value));
                                row.push(num(v.abs_dev));
                                row.push(v.rel_dev.map(num).unwrap_or_default());
                            }
                            None => row.extend([String::new(), String::new(), String::new()]),
                        }
                    }
                    if with_bound {
                        row.push(r.series_bound.map(|b| format!("{b:e}")).unwrap_or_default());
                    }
                    row
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_string(&header, &body)
        }
    }
}

pub fn cmd_compare(args: &CompareArgs) -> CmdResult<String> {
    let params = args.model.params()?;
    let rows = compare(
        &params,
        args.n0,
        &args.times,
        &args.states,
        &args.methods,
        args.tol,
    )?;
    Ok(render(&params, args.n0, &rows, args.output, args.precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mmmm_core::asymptotics::stirling_factor;
    use mmmm_core::infinite::p0n_inf;

    #[test]
    fn bulk_row_is_scaled_infinite_server() {
        let p = SystemParams::new(25.0, 1.0, 50).unwrap();
        let rows = compare(
            &p,
            0,
            &[1.0],
            &[25],
            &[MethodArg::Asymptotic, MethodArg::Infinite],
            1e-6,
        )
        .unwrap();
        let row = &rows[0];
        assert_eq!(row.regime, Some(RegimeTag::R1B));
        let want = stirling_factor(25).unwrap() * p0n_inf(&p, 25, 1.0).unwrap();
        let asy = row.values[0].1.unwrap().value;
        assert!((asy - want).abs() <= 1e-12 * want);
        assert!(row.values[0].1.unwrap().rel_dev.unwrap() < 0.05);
    }

    #[test]
    fn inapplicable_cells_are_empty() {
        let p = SystemParams::new(25.0, 1.0, 50).unwrap();
        let rows = compare(
            &p,
            0,
            &[1.0],
            &[47],
            &[MethodArg::Exact, MethodArg::Infinite],
            1e-6,
        )
        .unwrap();
        assert!(rows[0].values.iter().all(|(_, v)| v.is_none()));
    }

    #[test]
    fn empty_grid_is_usage_error() {
        let p = SystemParams::new(1.0, 1.0, 3).unwrap();
        assert_eq!(
            compare(&p, 0, &[], &[1], &[MethodArg::Series], 1e-6)
                .unwrap_err()
                .code(),
            2
        );
        assert_eq!(
            compare(&p, 0, &[1.0], &[], &[MethodArg::Series], 1e-6)
                .unwrap_err()
                .code(),
            2
        );
    }
}

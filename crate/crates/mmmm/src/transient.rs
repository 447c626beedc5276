//! `transient` and `stationary` subcommands.

use mmmm_core::asymptotics::{approximate, RegimeTag, RegimeThresholds};
use mmmm_core::exact::exact;
use mmmm_core::infinite::approx_mmm_via_inf;
use mmmm_core::oracle::{integrate, OracleConfig};
use mmmm_core::series::{
    choose_truncation, clamp_negative, error_bound, op_counts, truncated_distribution, BoundForm,
};
use mmmm_core::{erlang_b, stationary, Error, Method, SystemParams};
use serde::Serialize;

use crate::args::{MethodArg, OutputFormat, StationaryArgs, TransientArgs};
use crate::failure::{CmdResult, Failure};
use crate::format::{csv_string, fixed, rounded};
use crate::SCHEMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsOut {
    pub lambda0: f64,
    pub mu: f64,
    pub m: usize,
}

impl From<&SystemParams> for ParamsOut {
    fn from(p: &SystemParams) -> Self {
        ParamsOut {
            lambda0: p.lambda0(),
            mu: p.mu(),
            m: p.m(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationOut {
    #[serde(rename = "F")]
    pub order: usize,
    pub phi: u64,
    pub theta: u64,
}

/// Result of one `transient` query before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientResult {
    pub params: SystemParams,
    pub n0: usize,
    pub t: f64,
    pub method: Method,
    /// `None` where an approximation does not apply.
    pub probabilities: Vec<Option<f64>>,
    pub error_bound: Option<f64>,
    pub truncation: Option<TruncationOut>,
    /// Case used per state, for the asymptotic and infinite-server methods.
    pub regimes: Option<Vec<Option<RegimeTag>>>,
}

#[derive(Serialize)]
struct TransientJson<'a> {
    schema: &'static str,
    params: ParamsOut,
    n0: usize,
    t: f64,
    method: &'a str,
    probabilities: Vec<Option<f64>>,
    error_bound: Option<f64>,
    truncation: Option<TruncationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regimes: Option<Vec<Option<&'static str>>>,
}

fn oracle_config(max_steps: Option<usize>) -> OracleConfig {
    let mut config = OracleConfig::default();
    if let Some(steps) = max_steps {
        config.max_steps = steps;
    }
    config
}

fn parse_regime(raw: &str) -> CmdResult<RegimeTag> {
    RegimeTag::parse(raw).ok_or_else(|| {
        let names: Vec<&str> = RegimeTag::ALL.iter().map(|r| r.as_str()).collect();
        Failure::usage(format!("--case {raw:?} is not one of {}", names.join(", ")))
    })
}

fn series_result(args: &TransientArgs, params: &SystemParams) -> CmdResult<TransientResult> {
    let (order, bound) = match args.order {
        Some(raw) => {
            let order = usize::try_from(raw)
                .map_err(|_| Failure::usage(format!("--order {raw} must be >= 0")))?;
            (order, error_bound(params, args.t, order, BoundForm::Rates))
        }
        None => {
            let report = choose_truncation(params, args.t, args.tol)?;
            (report.order, Some(report.error_bound))
        }
    };
    let mut dist = truncated_distribution(params, args.n0, args.t, order)?;
    if args.clamp {
        clamp_negative(&mut dist.probabilities);
    }
    let truncation = (order >= 1).then(|| {
        let (phi, theta) = op_counts(order, params.m());
        TruncationOut { order, phi, theta }
    });
    Ok(TransientResult {
        params: *params,
        n0: args.n0,
        t: args.t,
        method: Method::Series,
        probabilities: dist.probabilities.into_iter().map(Some).collect(),
        error_bound: bound,
        truncation,
        regimes: None,
    })
}

/// Per-state values and the case used for each; `None` where inapplicable.
type PerState = (Vec<Option<f64>>, Vec<Option<RegimeTag>>);

fn per_state(
    params: &SystemParams,
    n0: usize,
    t: f64,
    mut eval: impl FnMut(usize) -> mmmm_core::Result<(RegimeTag, f64)>,
) -> CmdResult<PerState> {
    if n0 > 1 {
        return Err(Failure::usage(format!(
            "n0 = {n0}: approximations need n0 = 0 or 1"
        )));
    }
    if params.rho() >= 1.0 {
        return Err(Error::LoadNotBelowOne { rho: params.rho() }.into());
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Failure::usage(format!("t = {t}: must be finite and >= 0")));
    }
    let mut values = Vec::with_capacity(params.states());
    let mut regimes = Vec::with_capacity(params.states());
    for n in 0..params.states() {
        match eval(n) {
            Ok((tag, v)) if v.is_finite() => {
                values.push(Some(v));
                regimes.push(Some(tag));
            }
            _ => {
                values.push(None);
                regimes.push(None);
            }
        }
    }
    Ok((values, regimes))
}

/// Evaluates a `transient` query.
pub fn evaluate(args: &TransientArgs) -> CmdResult<TransientResult> {
    let params = args.model.params()?;
    if args.n0 > params.m() {
        return Err(Error::StateOutOfRange {
            state: args.n0,
            m: params.m(),
        }
        .into());
    }
    let plain = |method: Method, probabilities: Vec<f64>| {
        plain_with(
            params,
            args,
            method,
            probabilities.into_iter().map(Some).collect(),
        )
    };
    match args.method {
        MethodArg::Exact => {
            let matrix = exact(&params, args.t)?;
            Ok(plain(Method::Exact, matrix.row(args.n0).to_vec()))
        }
        MethodArg::Oracle => {
            let dist = integrate(&params, args.n0, args.t, &oracle_config(args.max_steps))?;
            Ok(plain(Method::Oracle, dist.probabilities))
        }
        MethodArg::Series => series_result(args, &params),
        MethodArg::Asymptotic => {
            let forced = args.regime.as_deref().map(parse_regime).transpose()?;
            let thresholds = RegimeThresholds::default();
            let (values, regimes) = per_state(&params, args.n0, args.t, |n| {
                approximate(&params, n, args.t, args.n0, forced, &thresholds)
            })?;
            Ok(TransientResult {
                regimes: Some(regimes),
                ..plain_with(params, args, Method::Asymptotic, values)
            })
        }
        MethodArg::Infinite => {
            let (values, regimes) = per_state(&params, args.n0, args.t, |n| {
                approx_mmm_via_inf(&params, n, args.t, args.n0).map(|a| (a.regime, a.value))
            })?;
            Ok(TransientResult {
                regimes: Some(regimes),
                ..plain_with(params, args, Method::InfiniteServer, values)
            })
        }
    }
}

fn plain_with(
    params: SystemParams,
    args: &TransientArgs,
    method: Method,
    values: Vec<Option<f64>>,
) -> TransientResult {
    TransientResult {
        params,
        n0: args.n0,
        t: args.t,
        method,
        probabilities: values,
        error_bound: None,
        truncation: None,
        regimes: None,
    }
}

/// Renders a transient result as JSON or CSV.
pub fn render(result: &TransientResult, output: OutputFormat, precision: usize) -> String {
    match output {
        OutputFormat::Json => {
            let doc = TransientJson {
                schema: SCHEMA,
                params: ParamsOut::from(&result.params),
                n0: result.n0,
                t: result.t,
                method: result.method.as_str(),
                probabilities: result
                    .probabilities
                    .iter()
                    .map(|p| p.map(|v| rounded(v, precision)))
                    .collect(),
                error_bound: result.error_bound,
                truncation: result.truncation,
                regimes: result
                    .regimes
                    .as_ref()
                    .map(|r| r.iter().map(|t| t.map(|t| t.as_str())).collect()),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let header = [
                "method",
                "lambda0",
                "mu",
                "m",
                "n0",
                "t",
                "n",
                "probability",
                "regime",
                "error_bound",
                "F",
                "phi",
                "theta",
            ];
            let p = &result.params;
            let rows: Vec<Vec<String>> = result
                .probabilities
                .iter()
                .enumerate()
                .map(|(n, value)| {
                    let regime = result
                        .regimes
                        .as_ref()
                        .and_then(|r| r[n])
                        .map(|r| r.as_str().to_string())
                        .unwrap_or_default();
                    vec![
                        result.method.as_str().to_string(),
                        p.lambda0().to_string(),
                        p.mu().to_string(),
                        p.m().to_string(),
                        result.n0.to_string(),
                        result.t.to_string(),
                        n.to_string(),
                        value.map(|v| fixed(v, precision)).unwrap_or_default(),
                        regime,
                        result
                            .error_bound
                            .map(|b| format!("{b:e}"))
                            .unwrap_or_default(),
                        result
                            .truncation
                            .map(|tr| tr.order.to_string())
                            .unwrap_or_default(),
                        result
                            .truncation
                            .map(|tr| tr.phi.to_string())
                            .unwrap_or_default(),
                        result
                            .truncation
                            .map(|tr| tr.theta.to_string())
                            .unwrap_or_default(),
                    ]
                })
                .collect();
            csv_string(&header, &rows)
        }
    }
}

pub fn cmd_transient(args: &TransientArgs) -> CmdResult<String> {
    let result = evaluate(args)?;
    Ok(render(&result, args.output, args.precision))
}

#[derive(Serialize)]
struct StationaryJson {
    schema: &'static str,
    params: ParamsOut,
    probabilities: Vec<f64>,
    erlang_b: f64,
}

pub fn cmd_stationary(args: &StationaryArgs) -> CmdResult<String> {
    let params = args.model.params()?;
    let pi = stationary(&params);
    let blocking = erlang_b(&params);
    Ok(match args.output {
        OutputFormat::Json => {
            let doc = StationaryJson {
                schema: SCHEMA,
                params: ParamsOut::from(&params),
                probabilities: pi
                    .probabilities()
                    .iter()
                    .map(|v| rounded(*v, args.precision))
                    .collect(),
                erlang_b: blocking,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = pi
                .probabilities()
                .iter()
                .enumerate()
                .map(|(n, v)| vec![n.to_string(), fixed(*v, args.precision)])
                .collect();
            csv_string(&["n", "probability"], &rows)
        }
    })
}

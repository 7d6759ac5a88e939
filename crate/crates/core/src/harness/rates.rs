use serde::Serialize;

use super::config::RatesRequest;
use crate::spectral::{
    radius_star_in_range, spectral_radius_star, tau_threshold, theoretical_rate, RateParams, SpectralConfig,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    /// Radius used for `tau`: the fixed `u`, or `U*`.
    pub u: Option<f64>,
    pub u_in_range: Option<bool>,
    pub tau: Option<f64>,
    pub rate: Option<f64>,
    /// `ok` or the error kind that left a column empty.
    pub status: String,
}

pub fn rates_table(req: &RatesRequest) -> Result<Vec<RateRow>> {
    if req.p == 0 || req.n.is_empty() {
        return Err(Error::Config("rates need p ≥ 1 and at least one n".into()));
    }
    let params = RateParams {
        sparsity: req.sparsity.unwrap_or(req.p as f64),
        r_bound: req.r_bound,
        t_noise: req.t_noise,
        beta: req.beta,
        q: req.q,
    };
    Ok(req
        .n
        .iter()
        .map(|&n| {
            let mut status = Vec::new();
            let u = match req.u {
                Some(u) => Some(u),
                None => spectral_radius_star(req.r_bound, req.gamma, n, req.p)
                    .map_err(|e| status.push(e.kind()))
                    .ok(),
            };
            let tau = u.map(|u| {
                let cfg = SpectralConfig::new(u, req.r_bound, req.t_noise, req.beta).with_gamma(req.gamma);
                tau_threshold(&cfg, n, req.p)
            });
            let rate = theoretical_rate(&params, n, req.p).map_err(|e| status.push(e.kind())).ok();
            RateRow {
                n,
                u,
                u_in_range: u.map(|u| radius_star_in_range(u, req.r_bound, req.t_noise, req.beta)),
                tau,
                rate,
                status: if status.is_empty() { "ok".into() } else { status.join("+") },
            }
        })
        .collect())
}

pub fn format_rates(rows: &[RateRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
    let mut s = String::from("n,U,U_in_range,tau,rate,status\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            opt(r.u),
            r.u_in_range.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.tau),
            opt(r.rate),
            r.status
        ));
    }
    s
}

//! `verify` suites and `simulate`.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{base_meta, emit_report, report_json, Cli, CmdResult, Failure, SimulateArgs, Suite};
use crate::bounds::ChannelDims;
use crate::channel::{decoding_error_rate, encode_message, transmit_with, ChannelInstance};
use crate::matrixcore::{binomial, SeededStream};
use crate::specfun::mu;
use crate::stats::TrialReport;
use crate::verify::{
    chisq_tail_check, colnorm_max_trend, detmin_trend, hxz_shadow, hxz_trend, wishart_logdet_mean_exact,
    wishart_logdet_stats, wishart_neg_moment_exact, wishart_neg_moment_mc, WishartSpec,
};

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: Value,
}

fn check(name: impl Into<String>, pass: bool, detail: Value) -> Check {
    Check { name: name.into(), pass, detail }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub(super) fn run_suite(cli: &Cli, suite: &Suite) -> CmdResult {
    let stream = SeededStream::new(cli.seed, 0);
    let (name, params, checks, results) = match suite {
        Suite::Chisq { d_list, eps_list } => {
            let trials = cli.trials.unwrap_or(100_000);
            let mut checks = Vec::new();
            let mut cells = Vec::new();
            for (i, &d) in d_list.iter().enumerate() {
                for (j, &eps) in eps_list.iter().enumerate() {
                    let idx = (i * eps_list.len() + j) as u64;
                    let c = chisq_tail_check(d, eps, trials, &stream.child(idx))?;
                    checks.push(check(
                        format!("tail d={d} eps={eps}"),
                        c.within_bound(3.0),
                        json!({"empirical_tail": c.empirical_tail, "tail_bound": c.tail_bound, "binomial_se": c.binomial_se}),
                    ));
                    cells.push(c);
                }
            }
            ("chisq", json!({"d_list": d_list, "eps_list": eps_list, "trials": trials}), checks, json!(cells))
        }
        Suite::Wishart { pairs } => {
            let trials = cli.trials.unwrap_or(200);
            let mut checks = Vec::new();
            let mut rows = Vec::new();
            for (i, &(m, n)) in pairs.iter().enumerate() {
                let spec = WishartSpec::dims(m, n)?;
                let rep = wishart_logdet_stats(&spec, trials, &stream.child(i as u64))?;
                let exact = wishart_logdet_mean_exact(&spec)?;
                let limit = mu(spec.ratio())?;
                checks.push(check(
                    format!("mean m={m} n={n}"),
                    rep.within_se(exact, 3.0),
                    json!({"mc_mean": rep.mean, "std_error": rep.std_error, "exact": exact}),
                ));
                rows.push(json!({"m": m, "n": n, "report": rep, "exact": exact, "mu_limit": limit, "gap_to_limit": exact - limit}));
            }
            ("wishart", json!({"pairs": pairs, "trials": trials}), checks, json!(rows))
        }
        Suite::Negmoment { m, n, r } => {
            let trials = cli.trials.unwrap_or(1_000_000);
            let spec = WishartSpec::new(*m, *n, *r)?;
            let exact = wishart_neg_moment_exact(&spec)?.exp();
            let mc = wishart_neg_moment_mc(&spec, trials, &stream)?;
            let small = wishart_neg_moment_exact(&WishartSpec::new(*m, *n, 1e-9)?)?;
            let checks = vec![
                check(
                    "exp(-M(r)) vs Monte Carlo",
                    mc.report.within_se(exact, 3.0),
                    json!({"exact": exact, "mc_mean": mc.report.mean, "std_error": mc.report.std_error, "heavy_tailed": mc.heavy_tailed}),
                ),
                check("M(r) -> 0 as r -> 0", small.abs() < 1e-6, json!({"minus_m_at_1e-9": small})),
            ];
            ("negmoment", json!({"m": m, "n": n, "r": r, "trials": trials}), checks, json!(mc))
        }
        Suite::Colnorm { p_list, rho_b } => {
            let trials = cli.trials.unwrap_or(50);
            let pts = colnorm_max_trend(p_list, *rho_b, trials, &stream)?;
            let means: Vec<f64> = pts.iter().map(|q| q.excess.mean).collect();
            let checks = vec![check(
                "mean excess strictly decreasing in p",
                strictly_decreasing(&means),
                json!({"means": means}),
            )];
            ("colnorm", json!({"p_list": p_list, "rho_b": rho_b, "trials": trials}), checks, json!(pts))
        }
        Suite::Detmin { p_list, rho_b, kappa, samples } => {
            let pts = detmin_trend(p_list, *rho_b, *kappa, *samples, &stream)?;
            let devs: Vec<f64> = pts.iter().map(|q| q.deviation).collect();
            let checks = vec![check(
                "deviation strictly decreasing in p",
                strictly_decreasing(&devs),
                json!({"deviations": devs}),
            )];
            (
                "detmin",
                json!({"p_list": p_list, "rho_b": rho_b, "kappa": kappa, "samples": samples}),
                checks,
                json!(pts),
            )
        }
        Suite::Hxz { p_list, rho_e, kappa } => {
            let trials = cli.trials.unwrap_or(50);
            let pts = hxz_trend(p_list, *rho_e, *kappa, trials, &stream)?;
            let sig: Vec<f64> = pts.iter().map(|q| q.max_sigma_dev.mean).collect();
            let col: Vec<f64> = pts.iter().map(|q| q.max_colnorm_dev.mean).collect();
            let checks = vec![
                check("mean max_sigma_dev strictly decreasing in p", strictly_decreasing(&sig), json!({"means": sig})),
                check(
                    "mean max_colnorm_dev strictly decreasing in p",
                    strictly_decreasing(&col),
                    json!({"means": col}),
                ),
            ];
            ("hxz", json!({"p_list": p_list, "rho_e": rho_e, "kappa": kappa, "trials": trials}), checks, json!(pts))
        }
        Suite::Decoder { p, m_b, tol } => {
            let trials = cli.trials.unwrap_or(10_000);
            let dims = ChannelDims::relaxed(*p, *m_b, 0)?;
            let gauss = ChannelInstance::gaussian(dims, &stream.child(0))?;
            let g = decoding_error_rate(&gauss, trials, &stream.child(1), *tol)?;
            let ident = ChannelInstance::identity_rows(dims);
            let id = decoding_error_rate(&ident, trials, &stream.child(2), *tol)?;
            let checks = vec![
                check("gaussian: zero decoding errors", g.errors == 0, json!(g)),
                check("identity rows: ambiguity observed (expected failure)", id.ambiguous > 0, json!(id)),
            ];
            ("decoder", json!({"p": p, "m_b": m_b, "tol": tol, "trials": trials}), checks, Value::Null)
        }
    };
    let passed = checks.iter().all(|c| c.pass);
    let mut meta = base_meta(cli, &format!("verify {name}"));
    meta.push("params", params.to_string());
    let body = json!({"suite": name, "params": params, "passed": passed, "checks": checks, "results": results});
    emit_report(cli, &report_json(&meta, body))?;
    Ok(passed)
}

pub(super) fn simulate(cli: &Cli, a: &SimulateArgs) -> CmdResult {
    let trials = cli.trials.unwrap_or(10_000);
    if trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let dims = ChannelDims::new(a.p, a.m_b, a.m_e)?;
    let stream = SeededStream::new(cli.seed, 0);
    let inst = ChannelInstance::gaussian(dims, &stream.child(0))?;
    let decoding = decoding_error_rate(&inst, trials, &stream.child(1), a.tol)?;

    let shadow = if a.m_e > 0 {
        let kappa = (a.m_b - 1) as f64 / a.p as f64;
        let rho_e = a.m_e as f64 / a.p as f64;
        let count = binomial(a.p as u64, (a.m_b - 1) as u64).expect("guarded by the decoder");
        let s = stream.child(2);
        let mut sig = Vec::with_capacity(trials as usize);
        let mut col = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let mut rng = s.trial_rng(t);
            let x = encode_message(rng.random_range(0..count), &dims)?;
            let sent = transmit_with(&inst, &x, &mut rng)?;
            let sh = hxz_shadow(inst.a_e(), &x, &sent.z, kappa, rho_e)?;
            sig.push(sh.max_sigma_dev);
            col.push(sh.max_colnorm_dev);
        }
        json!({
            "kappa": kappa,
            "rho_e": rho_e,
            "max_sigma_dev": TrialReport::from_values(&sig, cli.seed),
            "max_colnorm_dev": TrialReport::from_values(&col, cli.seed),
        })
    } else {
        Value::Null
    };

    let mut meta = base_meta(cli, "simulate");
    let params = json!({"p": a.p, "m_b": a.m_b, "m_e": a.m_e, "tol": a.tol, "trials": trials});
    meta.push("params", params.to_string());
    let body = json!({"params": params, "decoding": decoding, "shadow": shadow});
    emit_report(cli, &report_json(&meta, body))?;
    Ok(true)
}

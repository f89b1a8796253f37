//! Monte Carlo estimation with Wilson score intervals.
//!
//! Every trial draws its configuration from a seed derived as a pure
//! function of (master seed, trial index), and aggregation is either
//! integer counting or an index-ordered float pass, so results are
//! bit-identical across worker counts and runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{approach_given, breakout_given, EventSpec, StripCtx, Truncation};
use crate::geometry::SlabSpec;
use crate::rng::{derive, derive2};
use crate::sampling::{sample, threshold, UniformSheet};

/// Normal quantile for two-sided 95% intervals.
pub const WILSON_Z: f64 = 1.96;

/// Wilson score interval for `successes` out of `trials` at quantile z.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let rad = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - rad) / denom).max(0.0),
        ((center + rad) / denom).min(1.0),
    )
}

/// A Monte Carlo estimate of one event's probability.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Estimate {
    pub event: EventSpec,
    pub k: u32,
    pub d: u32,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub boundary_hits: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl Estimate {
    fn build(
        event: EventSpec,
        slab: SlabSpec,
        p: f64,
        seed: u64,
        trials: u64,
        successes: u64,
        boundary_hits: u64,
    ) -> Estimate {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, WILSON_Z);
        Estimate {
            event,
            k: slab.k(),
            d: slab.d(),
            p,
            trials,
            successes,
            boundary_hits,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }

    pub fn hit_fraction(&self) -> f64 {
        self.boundary_hits as f64 / self.trials as f64
    }

    pub fn csv_header() -> &'static str {
        "event,params,k,d,p,trials,successes,boundary_hits,p_hat,ci_lo,ci_hi,seed"
    }

    pub fn csv_row(&self) -> String {
        let params = serde_json::to_string(&self.event).unwrap();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.event.tag(),
            csv_quote(&params),
            self.k,
            self.d,
            self.p,
            self.trials,
            self.successes,
            self.boundary_hits,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            self.seed
        )
    }
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn check_counts(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trial count must be >= 1"));
    }
    Ok(())
}

/// Estimate a single-configuration event over i.i.d. samples.
pub fn mc_estimate(
    spec: &EventSpec,
    slab: SlabSpec,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_counts(trials)?;
    if spec.is_pair() {
        return Err(Error::invalid(
            "pair events need product_estimate, not mc_estimate",
        ));
    }
    let ev = spec.compile(slab)?;
    let (successes, hits) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = sample(&ev.region, p, derive(seed, t)).expect("p validated");
            let out = ev.eval(&cfg);
            (out.ok as u64, out.hit as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Estimate::build(
        spec.clone(),
        slab,
        p,
        seed,
        trials,
        successes,
        hits,
    ))
}

/// Estimate an event over independent configuration pairs. Single-
/// configuration events are evaluated on the first coordinate, which
/// reproduces their marginal law.
pub fn product_estimate(
    spec: &EventSpec,
    slab: SlabSpec,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_counts(trials)?;
    let ev = spec.compile(slab)?;
    let (successes, hits) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let w = sample(&ev.region, p, derive2(seed, t, 0)).expect("p validated");
            let w2 = sample(&ev.region, p, derive2(seed, t, 1)).expect("p validated");
            let out = ev.eval_pair(&w, &w2);
            (out.ok as u64, out.hit as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Estimate::build(
        spec.clone(),
        slab,
        p,
        seed,
        trials,
        successes,
        hits,
    ))
}

/// Estimates of one event across several p values using shared uniform
/// sheets, so the per-sample indicators are coupled monotonely in p.
pub fn coupled_curve(
    spec: &EventSpec,
    slab: SlabSpec,
    ps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    check_counts(trials)?;
    if spec.is_pair() {
        return Err(Error::invalid("pair events are not supported here"));
    }
    let ev = spec.compile(slab)?;
    for &p in ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityRange(p));
        }
    }
    let per_trial: Vec<Vec<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sheet = UniformSheet::new(&ev.region, derive(seed, t));
            ps.iter()
                .map(|&p| {
                    let out = ev.eval(&threshold(&sheet, p).expect("p validated"));
                    (out.ok, out.hit)
                })
                .collect()
        })
        .collect();
    Ok(ps
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let successes = per_trial.iter().filter(|row| row[i].0).count() as u64;
            let hits = per_trial.iter().filter(|row| row[i].1).count() as u64;
            Estimate::build(spec.clone(), slab, p, seed, trials, successes, hits)
        })
        .collect())
}

/// Sub-estimate inside a nested record.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl SubEstimate {
    fn of(successes: u64, trials: u64) -> SubEstimate {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, WILSON_Z);
        SubEstimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

/// Joint record of the anchored-corridor quantities: the anchor event, the
/// triple intersection with the breakout/approach thresholds, and the mean
/// corridor gap 1·(f² − 2g).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestedRecord {
    pub n: i64,
    pub k: u32,
    pub d: u32,
    pub p: f64,
    /// Externally supplied threshold base (a prior crossing estimate).
    pub c: f64,
    pub outer: u64,
    pub inner: u64,
    pub seed: u64,
    pub trunc: Truncation,
    pub anchor: SubEstimate,
    pub triple: SubEstimate,
    pub gap_mean: f64,
    pub gap_se: f64,
    /// Mean binomial standard error of the inner estimates.
    pub mean_inner_se: f64,
    pub boundary_hits: u64,
}

/// Outer samples of the strip configuration; for each, the anchor event
/// plus nested conditional estimates of the breakout and approach
/// probabilities with `inner` samples each.
#[allow(clippy::too_many_arguments)]
pub fn nested_estimate(
    slab: SlabSpec,
    n: i64,
    p: f64,
    c: f64,
    outer: u64,
    inner: u64,
    seed: u64,
    trunc: Truncation,
) -> Result<NestedRecord> {
    check_counts(outer)?;
    check_counts(inner)?;
    if !(0.0 < c && c <= 1.0) {
        return Err(Error::invalid("threshold base c must be in (0,1]"));
    }
    let ctx = StripCtx::new(slab, n, trunc)?;
    let f_floor = c * c / 10.0;
    let g_ceil = c.powi(4) / 1000.0;

    struct Row {
        anchor: bool,
        triple: bool,
        gap: f64,
        hit: bool,
        inner_se: f64,
    }

    let rows: Vec<Row> = (0..outer)
        .into_par_iter()
        .map(|t| {
            let w = sample(&ctx.region, p, derive2(seed, t, 0)).expect("p validated");
            let (anchor_out, cs) = ctx.anchor(&w);
            let f = breakout_given(&ctx, &cs, &w, inner, derive2(seed, t, 1))
                .expect("inner validated");
            let g = approach_given(&ctx, &cs, &w, inner, derive2(seed, t, 2))
                .expect("inner validated");
            let triple = anchor_out.ok && f.p_hat >= f_floor && g.p_hat <= g_ceil;
            let gap = if triple { f.p_hat * f.p_hat - 2.0 * g.p_hat } else { 0.0 };
            let se = |e: f64| (e * (1.0 - e) / inner as f64).sqrt();
            Row {
                anchor: anchor_out.ok,
                triple,
                gap,
                hit: anchor_out.hit || f.boundary_hit,
                inner_se: (se(f.p_hat) + se(g.p_hat)) / 2.0,
            }
        })
        .collect();

    let anchor_n = rows.iter().filter(|r| r.anchor).count() as u64;
    let triple_n = rows.iter().filter(|r| r.triple).count() as u64;
    let hits = rows.iter().filter(|r| r.hit).count() as u64;
    let mean = rows.iter().map(|r| r.gap).sum::<f64>() / outer as f64;
    let var = rows.iter().map(|r| (r.gap - mean).powi(2)).sum::<f64>()
        / (outer.max(2) - 1) as f64;
    let mean_inner_se = rows.iter().map(|r| r.inner_se).sum::<f64>() / outer as f64;

    Ok(NestedRecord {
        n,
        k: slab.k(),
        d: slab.d(),
        p,
        c,
        outer,
        inner,
        seed,
        trunc,
        anchor: SubEstimate::of(anchor_n, outer),
        triple: SubEstimate::of(triple_n, outer),
        gap_mean: mean,
        gap_se: (var / outer as f64).sqrt(),
        mean_inner_se,
        boundary_hits: hits,
    })
}

/// Crossing-probability table for rectangles of aspect ratio rho: one
/// estimate of the B(floor(rho·n), n) crossing per n.
pub fn sweep(
    slab: SlabSpec,
    rho: f64,
    n_list: &[i64],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if rho <= 0.0 {
        return Err(Error::invalid("aspect ratio must be positive"));
    }
    let mut out = Vec::new();
    for (i, &n) in n_list.iter().enumerate() {
        if n < 1 {
            return Err(Error::invalid("n values must be >= 1"));
        }
        let m = ((rho * n as f64).floor() as i64).max(1);
        out.push(mc_estimate(
            &EventSpec::Lr { m, n },
            slab,
            p,
            trials,
            derive(seed, i as u64),
        )?);
    }
    Ok(out)
}

//! The event catalog: crossing, avoidance, proximity, and corridor events
//! on lifted rectangles and truncated vertical strips.
//!
//! Strip events live on T = [0,43n) × Z truncated to a finite window
//! [a,b). Each evaluation reports a `boundary_hit` flag alongside its
//! outcome: the flag is raised exactly when the witnessing objects touch
//! the window's top or bottom row, i.e. when a larger window could change
//! what was computed. Events on explicitly finite windows (rectangles,
//! [a,b) strips given as parameters) never raise it.
//!
//! Hit rules per event family:
//! - connection events with both endpoint sets finite: a false outcome is
//!   flagged only when both endpoint clusters reach a cutoff row (an
//!   out-of-window connection needs an exit and a re-entry, and the
//!   re-entry point belongs to the target's in-window cluster);
//! - connection events targeting the infinite right edge: a false outcome
//!   is flagged when the source cluster reaches a cutoff row;
//! - proximity events: a false outcome is flagged when either cluster
//!   reaches a cutoff row (one outside loop can re-enter near the other);
//! - the corridor pair event: flagged whenever the moat or the pocket
//!   touches a cutoff row, true or false.
//! True outcomes of monotone-in-window events are never flagged: enlarging
//! the window only adds paths.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::connectivity::{
    backbone, cluster, connected, lattice_component, outer_vertex_boundary, reflect_rows,
    shadow_of, touches_cutoff_rows, within_l1,
};
use crate::error::{Error, Result};
use crate::geometry::{Region, SegmentSpec, SlabSpec};
use crate::rng::derive;
use crate::sampling::{resample_conditional, sample, Config};

/// Finite window [a,b) standing in for the doubly infinite strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub a: i64,
    pub b: i64,
}

impl Truncation {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if !(a < 0 && 0 < b) {
            return Err(Error::invalid(format!(
                "strip window must satisfy a < 0 < b, got [{a},{b})"
            )));
        }
        Ok(Truncation { a, b })
    }

    /// Default window scaled by `mult`: every named segment lives inside
    /// [-4n, 44n); the margins below and above are 12n·mult and 16n·mult,
    /// giving [-16n, 60n) at mult = 1.
    pub fn standard(n: i64, mult: i64) -> Result<Self> {
        if n < 1 || mult < 1 {
            return Err(Error::invalid("truncation requires n >= 1 and mult >= 1"));
        }
        Truncation::new(-4 * n - 12 * n * mult, 44 * n + 16 * n * mult)
    }
}

/// Serializable event descriptions; compile against a slab to evaluate.
///
/// Tags: `lr` is the left-right crossing of B(m,n). `lr-avoid-mid` connects
/// the left edge minus its middle segment to the right edge of B(43n,44n).
/// `anchor` connects the mid-left segment to the full-width row 2n inside
/// the strip. `prox-cross` is the crossing-meets-middle-cluster proximity
/// event on an exact window [a,b); `prox-segs` the two-segment cluster
/// proximity event on the truncated strip. `mirror-pair` connects rows
/// [4n,8n) to rows [-4n,0) on the left edge. `v-chain` is the vertical
/// extension event with `steps` repetitions. `corridor` is the two-
/// configuration event: the second configuration must cross between the
/// mirror segments inside the pocket carved by the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "params", rename_all = "kebab-case")]
pub enum EventSpec {
    Lr { m: i64, n: i64 },
    LrAvoidMid { n: i64 },
    Connect { x: SegmentSpec, y: SegmentSpec, base: [i64; 4] },
    Anchor { n: i64, mult: i64 },
    ProxCross { n: i64, a: i64, b: i64 },
    ProxSegs { n: i64, mult: i64 },
    MirrorPair { n: i64, mult: i64 },
    VChain { n: i64, steps: i64, mult: i64 },
    Corridor { n: i64, mult: i64 },
}

impl EventSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            EventSpec::Lr { .. } => "lr",
            EventSpec::LrAvoidMid { .. } => "lr-avoid-mid",
            EventSpec::Connect { .. } => "connect",
            EventSpec::Anchor { .. } => "anchor",
            EventSpec::ProxCross { .. } => "prox-cross",
            EventSpec::ProxSegs { .. } => "prox-segs",
            EventSpec::MirrorPair { .. } => "mirror-pair",
            EventSpec::VChain { .. } => "v-chain",
            EventSpec::Corridor { .. } => "corridor",
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, EventSpec::Corridor { .. })
    }

    pub fn compile(&self, slab: SlabSpec) -> Result<CompiledEvent> {
        compile(self, slab)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub ok: bool,
    pub hit: bool,
}

#[derive(Clone, Copy, Debug)]
enum HitRule {
    Exact,
    BothTouch,
    #[allow(dead_code)] // used by the conditional samplers' rationale
    SourceTouch,
}

enum Kind {
    Connect {
        x: Vec<u32>,
        y: Vec<u32>,
        y_set: BitSet,
        rule: HitRule,
    },
    ProxCross {
        x: Vec<u32>,
        y: Vec<u32>,
        z: Vec<u32>,
    },
    ProxSegs {
        x: Vec<u32>,
        z: Vec<u32>,
    },
    Corridor(Box<CorridorCtx>),
}

struct CorridorCtx {
    mid: Vec<u32>,
    upper_mask: BitSet,
    probe: Vec<u32>,
    probe_mirror: Vec<u32>,
    origin: u32,
    two_c2: i64,
}

/// An event bound to its sampling region.
pub struct CompiledEvent {
    pub spec: EventSpec,
    pub region: Arc<Region>,
    kind: Kind,
}

fn strip_region(slab: SlabSpec, n: i64, trunc: Truncation) -> Result<Arc<Region>> {
    if n < 1 {
        return Err(Error::invalid("n must be >= 1"));
    }
    Region::new(slab, 0, 43 * n, trunc.a, trunc.b)
}

fn compile(spec: &EventSpec, slab: SlabSpec) -> Result<CompiledEvent> {
    let ev = |region: Arc<Region>, kind| CompiledEvent {
        spec: spec.clone(),
        region,
        kind,
    };
    match *spec {
        EventSpec::Lr { m, n } => {
            let region = Region::rectangle(slab, m, n)?;
            let x = region.resolve_segment_exact(&SegmentSpec::L { m, n })?;
            let y = region.resolve_segment_exact(&SegmentSpec::R { m, n })?;
            let y_set = BitSet::from_indices(region.site_count(), &y);
            Ok(ev(region, Kind::Connect { x, y, y_set, rule: HitRule::Exact }))
        }
        EventSpec::LrAvoidMid { n } => {
            let (m, h) = (43 * n, 44 * n);
            let region = Region::rectangle(slab, m, h)?;
            let x = region.resolve_segment_exact(&SegmentSpec::Union {
                parts: vec![
                    SegmentSpec::VSeg { x: 0, y0: 0, y1: 20 * n },
                    SegmentSpec::VSeg { x: 0, y0: 24 * n, y1: h },
                ],
            })?;
            let y = region.resolve_segment_exact(&SegmentSpec::R { m, n: h })?;
            let y_set = BitSet::from_indices(region.site_count(), &y);
            Ok(ev(region, Kind::Connect { x, y, y_set, rule: HitRule::Exact }))
        }
        EventSpec::Connect { ref x, ref y, base } => {
            let [x0, x1, y0, y1] = base;
            let region = Region::new(slab, x0, x1, y0, y1)?;
            let xs = region.resolve_segment(x)?;
            let ys = region.resolve_segment(y)?;
            let y_set = BitSet::from_indices(region.site_count(), &ys);
            Ok(ev(region, Kind::Connect { x: xs, y: ys, y_set, rule: HitRule::Exact }))
        }
        EventSpec::Anchor { n, mult } => {
            let trunc = Truncation::standard(n, mult)?;
            let region = strip_region(slab, n, trunc)?;
            let x = region.resolve_segment_exact(&SegmentSpec::MidLeft { n })?;
            let y = region.resolve_segment_exact(&SegmentSpec::HSeg {
                y: 2 * n,
                x0: 0,
                x1: 43 * n,
            })?;
            let y_set = BitSet::from_indices(region.site_count(), &y);
            Ok(ev(region, Kind::Connect { x, y, y_set, rule: HitRule::BothTouch }))
        }
        EventSpec::ProxCross { n, a, b } => {
            if a >= b {
                return Err(Error::invalid("window requires a < b"));
            }
            let region = Region::new(slab, 0, 43 * n, a, b)?;
            let x = region.resolve_segment_exact(&SegmentSpec::VSeg { x: 0, y0: 0, y1: 4 * n })?;
            let y = region.resolve_segment_exact(&SegmentSpec::VSeg {
                x: 43 * n - 1,
                y0: 0,
                y1: 4 * n,
            })?;
            let z = region.resolve_segment_exact(&SegmentSpec::VSeg {
                x: 0,
                y0: 8 * n,
                y1: 12 * n,
            })?;
            Ok(ev(region, Kind::ProxCross { x, y, z }))
        }
        EventSpec::ProxSegs { n, mult } => {
            let trunc = Truncation::standard(n, mult)?;
            let region = strip_region(slab, n, trunc)?;
            let x = region.resolve_segment_exact(&SegmentSpec::VSeg { x: 0, y0: 0, y1: 4 * n })?;
            let z = region.resolve_segment_exact(&SegmentSpec::VSeg {
                x: 0,
                y0: 16 * n,
                y1: 20 * n,
            })?;
            Ok(ev(region, Kind::ProxSegs { x, z }))
        }
        EventSpec::MirrorPair { n, mult } => {
            let trunc = Truncation::standard(n, mult)?;
            let region = strip_region(slab, n, trunc)?;
            let x = region.resolve_segment_exact(&SegmentSpec::Probe { n })?;
            let y = region.resolve_segment_exact(&SegmentSpec::ProbeMirror { n })?;
            let y_set = BitSet::from_indices(region.site_count(), &y);
            Ok(ev(region, Kind::Connect { x, y, y_set, rule: HitRule::BothTouch }))
        }
        EventSpec::VChain { n, steps, mult } => {
            if steps < 1 {
                return Err(Error::invalid("steps must be >= 1"));
            }
            let trunc = Truncation::standard(n, mult)?;
            let region = strip_region(slab, n, trunc)?;
            let x = region.resolve_segment_exact(&SegmentSpec::VSeg { x: 0, y0: 0, y1: 4 * n })?;
            let y = region.resolve_segment_exact(&SegmentSpec::VSeg {
                x: 0,
                y0: 4 * n * (steps + 1),
                y1: 4 * n * (steps + 2),
            })?;
            let y_set = BitSet::from_indices(region.site_count(), &y);
            Ok(ev(region, Kind::Connect { x, y, y_set, rule: HitRule::BothTouch }))
        }
        EventSpec::Corridor { n, mult } => {
            let trunc = Truncation::standard(n, mult)?;
            let region = strip_region(slab, n, trunc)?;
            let mid = region.resolve_segment_exact(&SegmentSpec::MidLeft { n })?;
            let probe = region.resolve_segment_exact(&SegmentSpec::Probe { n })?;
            let probe_mirror = region.resolve_segment_exact(&SegmentSpec::ProbeMirror { n })?;
            let mut upper_mask = BitSet::new(region.site_count());
            for v in 0..region.site_count() as u32 {
                if region.row_of(v) >= 2 * n {
                    upper_mask.insert(v);
                }
            }
            let origin = region
                .index_of(0, 0, 0)
                .ok_or_else(|| Error::TruncationTooSmall("origin outside window".into()))?;
            Ok(ev(
                region,
                Kind::Corridor(Box::new(CorridorCtx {
                    mid,
                    upper_mask,
                    probe,
                    probe_mirror,
                    origin,
                    two_c2: 4 * n - 1,
                })),
            ))
        }
    }
}

impl CompiledEvent {
    /// Evaluate a single-configuration event.
    pub fn eval(&self, cfg: &Config) -> Outcome {
        debug_assert_eq!(cfg.region().site_count(), self.region.site_count());
        match &self.kind {
            Kind::Connect { x, y, y_set, rule } => {
                let cx = cluster(cfg, x, None);
                if cx.intersects(y_set) {
                    return Outcome { ok: true, hit: false };
                }
                let hit = match rule {
                    HitRule::Exact => false,
                    HitRule::SourceTouch => touches_cutoff_rows(&self.region, &cx),
                    HitRule::BothTouch => {
                        touches_cutoff_rows(&self.region, &cx)
                            && touches_cutoff_rows(&self.region, &cluster(cfg, y, None))
                    }
                };
                Outcome { ok: false, hit }
            }
            Kind::ProxCross { x, y, z } => {
                if !connected(cfg, x, y, None) {
                    return Outcome { ok: false, hit: false };
                }
                let bb = backbone(cfg, x, y, None);
                let cz = cluster(cfg, z, None);
                let ok = within_l1(
                    &self.region,
                    &shadow_of(&self.region, &bb),
                    &shadow_of(&self.region, &cz),
                    2,
                );
                Outcome { ok, hit: false }
            }
            Kind::ProxSegs { x, z } => {
                let cx = cluster(cfg, x, None);
                let cz = cluster(cfg, z, None);
                let ok = within_l1(
                    &self.region,
                    &shadow_of(&self.region, &cx),
                    &shadow_of(&self.region, &cz),
                    4,
                );
                let hit = !ok
                    && (touches_cutoff_rows(&self.region, &cx)
                        || touches_cutoff_rows(&self.region, &cz));
                Outcome { ok, hit }
            }
            Kind::Corridor(_) => {
                debug_assert!(false, "corridor event needs a configuration pair");
                Outcome { ok: false, hit: false }
            }
        }
    }

    /// Evaluate the corridor pair event: carve the pocket from `w`, then
    /// ask whether `w2` connects the mirror segments inside it.
    ///
    /// Single-configuration events ignore `w2`.
    pub fn eval_pair(&self, w: &Config, w2: &Config) -> Outcome {
        match &self.kind {
            Kind::Corridor(ctx) => {
                let region = &self.region;
                let q = cluster(w, &ctx.mid, Some(&ctx.upper_mask));
                let q_shadow = shadow_of(region, &q);
                let moat = outer_vertex_boundary(region, &q_shadow, None);
                let mut blocked = reflect_rows(region, &moat, ctx.two_c2);
                blocked.union_with(&moat);
                let pocket = lattice_component(region, ctx.origin, &blocked);
                let hit = touches_cutoff_rows(region, &moat)
                    || touches_cutoff_rows(region, &pocket);

                let xs: Vec<u32> = ctx
                    .probe
                    .iter()
                    .copied()
                    .filter(|&v| pocket.contains(v))
                    .collect();
                let ys: Vec<u32> = ctx
                    .probe_mirror
                    .iter()
                    .copied()
                    .filter(|&v| pocket.contains(v))
                    .collect();
                if xs.is_empty() || ys.is_empty() {
                    return Outcome { ok: false, hit };
                }
                let ok = connected(w2, &xs, &ys, Some(&pocket));
                Outcome { ok, hit }
            }
            _ => self.eval(w),
        }
    }
}

/// Segments and sets shared by the conditional-probability functionals on
/// a truncated strip.
pub struct StripCtx {
    pub region: Arc<Region>,
    pub n: i64,
    pub trunc: Truncation,
    mid: Vec<u32>,
    probe: Vec<u32>,
    right_edge: Vec<u32>,
    line_set: BitSet,
    line: Vec<u32>,
}

impl StripCtx {
    pub fn new(slab: SlabSpec, n: i64, trunc: Truncation) -> Result<StripCtx> {
        let region = strip_region(slab, n, trunc)?;
        let mid = region.resolve_segment_exact(&SegmentSpec::MidLeft { n })?;
        let probe = region.resolve_segment_exact(&SegmentSpec::Probe { n })?;
        let right_edge = region.resolve_segment_exact(&SegmentSpec::VSeg {
            x: 43 * n - 1,
            y0: trunc.a,
            y1: trunc.b,
        })?;
        let line = region.resolve_segment_exact(&SegmentSpec::HSeg {
            y: 2 * n,
            x0: 0,
            x1: 43 * n,
        })?;
        let line_set = BitSet::from_indices(region.site_count(), &line);
        Ok(StripCtx {
            region,
            n,
            trunc,
            mid,
            probe,
            right_edge,
            line_set,
            line,
        })
    }

    /// The explored cluster of the mid-left segment in the whole strip.
    pub fn mid_cluster(&self, cfg: &Config) -> BitSet {
        cluster(cfg, &self.mid, None)
    }

    /// Bonds whose state is determined by conditioning on the cluster:
    /// everything touching it (interior bonds keep their state, boundary
    /// bonds are closed by definition of the cluster).
    pub fn frozen_bonds(&self, cs: &BitSet) -> BitSet {
        let mut frozen = BitSet::new(self.region.bond_count());
        for (bid, &(a, b)) in self.region.bonds().iter().enumerate() {
            if cs.contains(a) || cs.contains(b) {
                frozen.insert(bid as u32);
            }
        }
        frozen
    }

    /// Anchor event: mid-left segment connected to the full-width row 2n.
    /// Returns the outcome together with the explored cluster.
    pub fn anchor(&self, cfg: &Config) -> (Outcome, BitSet) {
        let cs = self.mid_cluster(cfg);
        let ok = cs.intersects(&self.line_set);
        let hit = !ok
            && touches_cutoff_rows(&self.region, &cs)
            && touches_cutoff_rows(&self.region, &cluster(cfg, &self.line, None));
        (Outcome { ok, hit }, cs)
    }
}

/// Estimate produced by the nested conditional samplers.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InnerEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// Conditioning-cluster contact with the window cutoffs.
    pub boundary_hit: bool,
}

/// Conditional probability, given the explored cluster, that the probe
/// segment connects to the right edge avoiding the cluster's shadow.
/// Bonds touching the cluster stay as in `cfg`; all others are redrawn.
pub fn breakout_given(
    ctx: &StripCtx,
    cs: &BitSet,
    cfg: &Config,
    inner: u64,
    seed: u64,
) -> Result<InnerEstimate> {
    if inner == 0 {
        return Err(Error::invalid("inner sample count must be >= 1"));
    }
    let region = &ctx.region;
    let shadow_cs = shadow_of(region, cs);
    let mut mask = BitSet::new(region.site_count());
    for v in 0..region.site_count() as u32 {
        if !shadow_cs.contains(v) {
            mask.insert(v);
        }
    }
    let frozen = ctx.frozen_bonds(cs);
    let boundary_hit = touches_cutoff_rows(region, cs);
    let mut successes = 0;
    for i in 0..inner {
        let fresh = resample_conditional(cfg, &frozen, derive(seed, i));
        if connected(&fresh, &ctx.probe, &ctx.right_edge, Some(&mask)) {
            successes += 1;
        }
    }
    Ok(InnerEstimate {
        successes,
        trials: inner,
        p_hat: successes as f64 / inner as f64,
        boundary_hit,
    })
}

/// Conditional probability, given the explored cluster, that some open
/// path from the probe segment comes within l1 distance 4 of the
/// cluster's shadow. Exactly 0 when the cluster is empty; exactly 1 when
/// the probe itself is already within distance 4.
pub fn approach_given(
    ctx: &StripCtx,
    cs: &BitSet,
    cfg: &Config,
    inner: u64,
    seed: u64,
) -> Result<InnerEstimate> {
    if inner == 0 {
        return Err(Error::invalid("inner sample count must be >= 1"));
    }
    let region = &ctx.region;
    let shadow_cs = shadow_of(region, cs);
    let frozen = ctx.frozen_bonds(cs);
    let boundary_hit = touches_cutoff_rows(region, cs);
    let mut successes = 0;
    for i in 0..inner {
        let fresh = resample_conditional(cfg, &frozen, derive(seed, i));
        let cx = cluster(&fresh, &ctx.probe, None);
        if within_l1(region, &shadow_of(region, &cx), &shadow_cs, 4) {
            successes += 1;
        }
    }
    Ok(InnerEstimate {
        successes,
        trials: inner,
        p_hat: successes as f64 / inner as f64,
        boundary_hit,
    })
}

/// Breakout probability with the cluster explored from `cfg` itself.
pub fn breakout_prob(ctx: &StripCtx, cfg: &Config, inner: u64, seed: u64) -> Result<InnerEstimate> {
    let cs = ctx.mid_cluster(cfg);
    breakout_given(ctx, &cs, cfg, inner, seed)
}

/// Approach probability with the cluster explored from `cfg` itself.
pub fn approach_prob(ctx: &StripCtx, cfg: &Config, inner: u64, seed: u64) -> Result<InnerEstimate> {
    let cs = ctx.mid_cluster(cfg);
    approach_given(ctx, &cs, cfg, inner, seed)
}

/// Threshold event on the breakout probability: estimate >= c^2 / 10.
pub fn breakout_at_least(
    ctx: &StripCtx,
    cfg: &Config,
    c: f64,
    inner: u64,
    seed: u64,
) -> Result<bool> {
    Ok(breakout_prob(ctx, cfg, inner, seed)?.p_hat >= c * c / 10.0)
}

/// Threshold event on the approach probability: estimate <= c^4 / 1000.
pub fn approach_at_most(
    ctx: &StripCtx,
    cfg: &Config,
    c: f64,
    inner: u64,
    seed: u64,
) -> Result<bool> {
    Ok(approach_prob(ctx, cfg, inner, seed)?.p_hat <= c.powi(4) / 1000.0)
}

/// Convenience sampler for an event's own region.
pub fn sample_for(ev: &CompiledEvent, p: f64, seed: u64) -> Result<Config> {
    sample(&ev.region, p, seed)
}

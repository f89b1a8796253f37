//! Exact small-instance computations: exhaustive probabilities, FKG
//! verification, the local-modification (A→B map) checker, and the
//! simple-path enumerator that anchors backbone and minimal-path queries.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::connectivity::Path;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::rng::SeqRng;
use crate::sampling::Config;

pub const DEFAULT_ENUM_CAP: usize = 25;

/// Exhaustive probability of an event over all 2^bonds configurations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactResult {
    pub probability: f64,
    pub bond_count: usize,
    pub config_count: u64,
    /// True when the value was accumulated in exact integer arithmetic
    /// (dyadic p); otherwise `error_bound` bounds the floating error.
    pub exact: bool,
    pub error_bound: f64,
}

/// Exact P_p[event] by enumeration, bucketing configurations by open-bond
/// count so the final sum has at most bonds+1 terms. For dyadic p the sum
/// is evaluated in big-integer arithmetic and rounded once.
pub fn exact_prob<F>(region: &Arc<Region>, p: f64, cap: usize, mut event: F) -> Result<ExactResult>
where
    F: FnMut(&Config) -> bool,
{
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    let nb = region.bond_count();
    if nb > cap {
        return Err(Error::CapExceeded { bonds: nb, cap });
    }

    let mut counts = vec![0u64; nb + 1];
    let total = 1u64 << nb;
    for bits in 0..total {
        let open: Vec<u32> = (0..nb as u32).filter(|i| bits >> i & 1 == 1).collect();
        let cfg = Config::from_open_bonds(Arc::clone(region), &open, p, 0);
        if event(&cfg) {
            counts[open.len()] += 1;
        }
    }
    Ok(weigh_counts(&counts, p, nb, total))
}

fn weigh_counts(counts: &[u64], p: f64, nb: usize, total: u64) -> ExactResult {
    if let Some((num, log2_den)) = dyadic(p) {
        // p = num / 2^t exactly: every term is an integer over 2^(t*nb)
        let t = log2_den;
        let comp = (1u64 << t) - num; // (1-p) * 2^t
        let mut acc = BigUint::from(0u32);
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = BigUint::from(num).pow(j as u32)
                * BigUint::from(comp).pow((nb - j) as u32)
                * BigUint::from(c);
            acc += term;
        }
        let probability = big_ratio_to_f64(&acc, t as u64 * nb as u64);
        ExactResult {
            probability,
            bond_count: nb,
            config_count: total,
            exact: true,
            error_bound: 0.0,
        }
    } else {
        let q = 1.0 - p;
        let mut sum = 0.0f64;
        let mut comp = 0.0f64; // Neumaier compensation
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = c as f64 * p.powi(j as i32) * q.powi((nb - j) as i32);
            let t = sum + term;
            comp += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        let probability = sum + comp;
        ExactResult {
            probability,
            bond_count: nb,
            config_count: total,
            exact: false,
            error_bound: (nb as f64 + 2.0) * f64::EPSILON,
        }
    }
}

/// p as num / 2^t with t <= 20, if it is exactly of that form.
fn dyadic(p: f64) -> Option<(u64, u32)> {
    for t in 0..=20u32 {
        let scaled = p * (1u64 << t) as f64;
        if scaled.fract() == 0.0 && scaled >= 0.0 && scaled <= (1u64 << t) as f64 {
            return Some((scaled as u64, t));
        }
    }
    None
}

/// Nearest f64 to acc / 2^shift.
fn big_ratio_to_f64(acc: &BigUint, shift: u64) -> f64 {
    let bits = acc.bits();
    if bits == 0 {
        return 0.0;
    }
    if bits <= 63 {
        let v: u64 = acc.try_into().unwrap();
        return v as f64 / (2.0f64).powi(shift as i32);
    }
    // take the top 63 bits and track the dropped exponent
    let drop = bits - 63;
    let top: u64 = (acc >> drop).try_into().unwrap();
    top as f64 * (2.0f64).powi(drop as i32 - shift as i32)
}

/// Outcome of the positive-association check for a pair of events.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FkgReport {
    pub e_increasing: bool,
    pub f_increasing: bool,
    pub p_e: f64,
    pub p_f: f64,
    pub p_both: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Exhaustively verify that E and F are increasing and that
/// P[E ∩ F] >= P[E]·P[F] with margin no worse than -1e-12.
///
/// Non-increasing inputs are reported, not asserted; `holds` is only
/// meaningful when both events are increasing.
pub fn fkg_check<E, F>(
    region: &Arc<Region>,
    p: f64,
    cap: usize,
    mut e: E,
    mut f: F,
) -> Result<FkgReport>
where
    E: FnMut(&Config) -> bool,
    F: FnMut(&Config) -> bool,
{
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    let nb = region.bond_count();
    if nb > cap {
        return Err(Error::CapExceeded { bonds: nb, cap });
    }
    let total = 1u64 << nb;

    let mut e_vals = vec![false; total as usize];
    let mut f_vals = vec![false; total as usize];
    for bits in 0..total {
        let open: Vec<u32> = (0..nb as u32).filter(|i| bits >> i & 1 == 1).collect();
        let cfg = Config::from_open_bonds(Arc::clone(region), &open, p, 0);
        e_vals[bits as usize] = e(&cfg);
        f_vals[bits as usize] = f(&cfg);
    }

    let increasing = |vals: &[bool]| {
        for bits in 0..total {
            for b in 0..nb {
                if bits >> b & 1 == 0 && vals[bits as usize] && !vals[(bits | 1 << b) as usize] {
                    return false;
                }
            }
        }
        true
    };
    let e_increasing = increasing(&e_vals);
    let f_increasing = increasing(&f_vals);

    let weight_of = |pred: &dyn Fn(u64) -> bool| {
        let mut counts = vec![0u64; nb + 1];
        for bits in 0..total {
            if pred(bits) {
                counts[bits.count_ones() as usize] += 1;
            }
        }
        weigh_counts(&counts, p, nb, total).probability
    };
    let p_e = weight_of(&|b| e_vals[b as usize]);
    let p_f = weight_of(&|b| f_vals[b as usize]);
    let p_both = weight_of(&|b| e_vals[b as usize] && f_vals[b as usize]);
    let margin = p_both - p_e * p_f;

    Ok(FkgReport {
        e_increasing,
        f_increasing,
        p_e,
        p_f,
        p_both,
        margin,
        holds: margin >= -1e-12,
    })
}

/// An instance of the local-modification setup: subsets A, B of {0,1}^n,
/// a map f: A -> B, and a coordinate budget s.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ABInstance {
    pub n_bits: u32,
    /// Members of A; `image[i]` is the map value of `a_members[i]`.
    pub a_members: Vec<u32>,
    pub image: Vec<u32>,
    pub b_members: Vec<u32>,
    pub budget: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ABReport {
    pub hypothesis_ok: bool,
    /// Largest disagreement-set size over preimage classes.
    pub worst_union: u32,
    pub p_a: f64,
    pub p_b: f64,
    pub factor: f64,
    pub rhs: f64,
    pub conclusion_holds: bool,
}

/// Check the map hypothesis (for every image point, the union of
/// disagreement coordinates over its preimages has size <= budget) and the
/// conclusion P_p[A] <= (2 / min(p, 1-p))^budget · P_p[B].
pub fn ab_lemma_check(inst: &ABInstance, p: f64) -> Result<ABReport> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::ProbabilityRange(p));
    }
    if inst.n_bits > 20 {
        return Err(Error::CapExceeded {
            bonds: inst.n_bits as usize,
            cap: 20,
        });
    }
    if inst.a_members.len() != inst.image.len() {
        return Err(Error::invalid("map must be total on A"));
    }
    let b_set: std::collections::BTreeSet<u32> = inst.b_members.iter().copied().collect();
    for w in &inst.image {
        if !b_set.contains(w) {
            return Err(Error::invalid("map image must be contained in B"));
        }
    }

    let mut union_by_image: std::collections::BTreeMap<u32, u32> = Default::default();
    for (a, b) in inst.a_members.iter().zip(&inst.image) {
        *union_by_image.entry(*b).or_insert(0) |= a ^ b;
    }
    let worst_union = union_by_image
        .values()
        .map(|m| m.count_ones())
        .max()
        .unwrap_or(0);
    let hypothesis_ok = worst_union <= inst.budget;

    let weight = |omega: u32| {
        let ones = omega.count_ones() as i32;
        p.powi(ones) * (1.0 - p).powi(inst.n_bits as i32 - ones)
    };
    let dedup_weight = |members: &[u32]| {
        let mut v: Vec<u32> = members.to_vec();
        v.sort_unstable();
        v.dedup();
        v.iter().map(|&w| weight(w)).sum::<f64>()
    };
    let p_a = dedup_weight(&inst.a_members);
    let p_b = dedup_weight(&inst.b_members);
    let factor = (2.0 / p.min(1.0 - p)).powi(inst.budget as i32);
    let rhs = factor * p_b;

    Ok(ABReport {
        hypothesis_ok,
        worst_union,
        p_a,
        p_b,
        factor,
        rhs,
        conclusion_holds: p_a <= rhs + 1e-12,
    })
}

/// Random valid instance: draw B, a bounded modification set per image
/// point, then preimages agreeing with the image off that set, assigned
/// first-come so the map stays single-valued.
pub fn random_ab_instance(n_bits: u32, budget: u32, seed: u64) -> ABInstance {
    assert!((1..=20).contains(&n_bits));
    let mut rng = SeqRng::new(seed);
    let space = 1u64 << n_bits;
    let nb = 1 + rng.below(4.min(space)) as usize;
    let mut b_members: Vec<u32> = Vec::new();
    while b_members.len() < nb {
        let w = rng.below(space) as u32;
        if !b_members.contains(&w) {
            b_members.push(w);
        }
    }

    let mut assigned: std::collections::BTreeMap<u32, u32> = Default::default();
    let max_set = budget.min(n_bits);
    for &w in &b_members {
        let set_size = rng.below(max_set as u64 + 1) as u32;
        let mut coords: Vec<u32> = Vec::new();
        while coords.len() < set_size as usize {
            let c = rng.below(n_bits as u64) as u32;
            if !coords.contains(&c) {
                coords.push(c);
            }
        }
        // every variation of w on `coords` is a valid preimage candidate
        for pick in 0..(1u32 << coords.len()) {
            if !rng.chance(0.6) {
                continue;
            }
            let mut omega = w;
            for (bit, &c) in coords.iter().enumerate() {
                if pick >> bit & 1 == 1 {
                    omega ^= 1 << c;
                }
            }
            assigned.entry(omega).or_insert(w);
        }
    }
    if assigned.is_empty() {
        assigned.insert(b_members[0], b_members[0]);
    }
    let (a_members, image): (Vec<u32>, Vec<u32>) = assigned.into_iter().unzip();
    ABInstance {
        n_bits,
        a_members,
        image,
        b_members,
        budget,
    }
}

/// Every open simple path with start in X and end in Y inside the mask.
/// Paths may revisit the sets internally; only endpoints define membership.
pub fn enumerate_simple_paths(
    cfg: &Config,
    xs: &[u32],
    ys: &[u32],
    mask: Option<&BitSet>,
    site_cap: usize,
) -> Result<Vec<Path>> {
    let region = cfg.region();
    if region.site_count() > site_cap {
        return Err(Error::CapExceeded {
            bonds: region.site_count(),
            cap: site_cap,
        });
    }
    let allowed = |i: u32| mask.is_none_or(|m| m.contains(i));
    let y_set = BitSet::from_indices(
        region.site_count(),
        &ys.iter().copied().filter(|&y| allowed(y)).collect::<Vec<_>>(),
    );
    let mut starts: Vec<u32> = xs.iter().copied().filter(|&x| allowed(x)).collect();
    starts.sort_unstable();
    starts.dedup();

    fn dfs(
        cfg: &Config,
        y_set: &BitSet,
        allowed: &dyn Fn(u32) -> bool,
        on_path: &mut BitSet,
        path: &mut Vec<u32>,
        out: &mut Vec<Path>,
    ) {
        let v = *path.last().unwrap();
        if y_set.contains(v) {
            out.push(Path { sites: path.clone() });
        }
        for e in cfg.region().neighbors(v) {
            if cfg.is_open(e.bond) && allowed(e.nbr) && !on_path.contains(e.nbr) {
                on_path.insert(e.nbr);
                path.push(e.nbr);
                dfs(cfg, y_set, allowed, on_path, path, out);
                path.pop();
                on_path.remove(e.nbr);
            }
        }
    }

    let mut out = Vec::new();
    let mut on_path = BitSet::new(region.site_count());
    let mut path: Vec<u32> = Vec::new();
    for s in starts {
        on_path.insert(s);
        path.push(s);
        dfs(cfg, &y_set, &allowed, &mut on_path, &mut path, &mut out);
        path.pop();
        on_path.remove(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{
        backbone, backbone_by_disjoint_paths, compare_paths, connected, min_self_avoiding_path,
    };
    use crate::geometry::{Region, SegmentSpec, SlabSpec};
    use std::sync::Arc;

    fn lr_event(region: &Arc<Region>) -> impl FnMut(&Config) -> bool {
        let (_, x1, _, y1) = region.base();
        let l = region
            .resolve_segment(&SegmentSpec::L { m: x1, n: y1 })
            .unwrap();
        let r = region
            .resolve_segment(&SegmentSpec::R { m: x1, n: y1 })
            .unwrap();
        move |cfg: &Config| connected(cfg, &l, &r, None)
    }

    #[test]
    fn single_bond_exact() {
        let region = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 2, 1).unwrap();
        for p in [0.3, 0.5, 0.9] {
            let res = exact_prob(&region, p, DEFAULT_ENUM_CAP, lr_event(&region)).unwrap();
            assert!(
                (res.probability - p).abs() <= 1e-12,
                "p={p} got {}",
                res.probability
            );
        }
    }

    #[test]
    fn lr_3x2_half_is_one_half() {
        let region = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 3, 2).unwrap();
        assert_eq!(region.bond_count(), 7);
        let res = exact_prob(&region, 0.5, DEFAULT_ENUM_CAP, lr_event(&region)).unwrap();
        assert!(res.exact);
        assert_eq!(res.config_count, 128);
        assert!((res.probability - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn complement_sums_to_one() {
        let region = Region::rectangle(SlabSpec::new(2, 3).unwrap(), 2, 2).unwrap();
        for p in [0.3, 0.5, 0.77] {
            let e = exact_prob(&region, p, DEFAULT_ENUM_CAP, lr_event(&region)).unwrap();
            let mut ev = lr_event(&region);
            let ne = exact_prob(&region, p, DEFAULT_ENUM_CAP, |c| !ev(c)).unwrap();
            assert!((e.probability + ne.probability - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_prob_monotone_in_p_for_lr() {
        let region = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 3, 2).unwrap();
        let mut last = 0.0;
        for i in 1..=9 {
            let p = i as f64 / 10.0;
            let res = exact_prob(&region, p, DEFAULT_ENUM_CAP, lr_event(&region)).unwrap();
            assert!(res.probability >= last - 1e-12);
            last = res.probability;
        }
    }

    #[test]
    fn fkg_self_pair_and_crossings() {
        let region = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 2, 2).unwrap();
        let l = region.resolve_segment(&SegmentSpec::L { m: 2, n: 2 }).unwrap();
        let r = region.resolve_segment(&SegmentSpec::R { m: 2, n: 2 }).unwrap();
        let top = region
            .resolve_segment(&SegmentSpec::HSeg { y: 1, x0: 0, x1: 2 })
            .unwrap();
        let bot = region
            .resolve_segment(&SegmentSpec::HSeg { y: 0, x0: 0, x1: 2 })
            .unwrap();
        let lr = |c: &Config| connected(c, &l, &r, None);
        let tb = |c: &Config| connected(c, &top, &bot, None);

        let rep = fkg_check(&region, 0.5, DEFAULT_ENUM_CAP, lr, lr).unwrap();
        assert!(rep.e_increasing && rep.holds);
        assert!(rep.margin > 0.0); // P[E] > P[E]^2 for nondegenerate E

        // LR and TB use disjoint bond sets on the 2x2 square, so they are
        // exactly independent: margin 0, inequality tight.
        let rep = fkg_check(&region, 0.5, DEFAULT_ENUM_CAP, lr, tb).unwrap();
        assert!(rep.e_increasing && rep.f_increasing);
        assert!(rep.holds && rep.margin.abs() <= 1e-15);

        // on the 3x2 rectangle the crossings share bonds: strict correlation
        let wide = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 3, 2).unwrap();
        let wl = wide.resolve_segment(&SegmentSpec::L { m: 3, n: 2 }).unwrap();
        let wr = wide.resolve_segment(&SegmentSpec::R { m: 3, n: 2 }).unwrap();
        let wtop = wide
            .resolve_segment(&SegmentSpec::HSeg { y: 1, x0: 0, x1: 3 })
            .unwrap();
        let wbot = wide
            .resolve_segment(&SegmentSpec::HSeg { y: 0, x0: 0, x1: 3 })
            .unwrap();
        let rep = fkg_check(
            &wide,
            0.5,
            DEFAULT_ENUM_CAP,
            |c: &Config| connected(c, &wl, &wr, None),
            |c: &Config| connected(c, &wtop, &wbot, None),
        )
        .unwrap();
        assert!(rep.e_increasing && rep.f_increasing);
        assert!(rep.holds && rep.margin > 0.0);

        // all-bonds-open against any increasing F
        let all = |c: &Config| c.open_count() == c.region().bond_count();
        let rep = fkg_check(&region, 0.3, DEFAULT_ENUM_CAP, all, lr).unwrap();
        assert!(rep.holds);

        // a decreasing event is flagged
        let dec = |c: &Config| c.open_count() == 0;
        let rep = fkg_check(&region, 0.5, DEFAULT_ENUM_CAP, dec, lr).unwrap();
        assert!(!rep.e_increasing);
    }

    #[test]
    fn ab_trivial_examples() {
        // A = B, identity, budget 0
        let inst = ABInstance {
            n_bits: 3,
            a_members: vec![0b101, 0b010],
            image: vec![0b101, 0b010],
            b_members: vec![0b101, 0b010],
            budget: 0,
        };
        let rep = ab_lemma_check(&inst, 0.4).unwrap();
        assert!(rep.hypothesis_ok && rep.conclusion_holds);
        assert!((rep.factor - 1.0).abs() < 1e-12);

        // n=1, A={1}, B={0}, bit flip, s=1, p=1/2: 0.5 <= 2 * 0.5
        let inst = ABInstance {
            n_bits: 1,
            a_members: vec![1],
            image: vec![0],
            b_members: vec![0],
            budget: 1,
        };
        let rep = ab_lemma_check(&inst, 0.5).unwrap();
        assert!(rep.hypothesis_ok && rep.conclusion_holds);
        assert!((rep.p_a - 0.5).abs() < 1e-12);
        assert!((rep.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ab_hypothesis_violation_detected() {
        // two preimages disagreeing with the image in different coordinates
        let inst = ABInstance {
            n_bits: 4,
            a_members: vec![0b0001, 0b0010],
            image: vec![0b0000, 0b0000],
            b_members: vec![0b0000],
            budget: 1,
        };
        let rep = ab_lemma_check(&inst, 0.5).unwrap();
        assert!(!rep.hypothesis_ok);
        assert_eq!(rep.worst_union, 2);
    }

    #[test]
    fn random_instances_accept_and_hold() {
        for seed in 0..100u64 {
            let n_bits = 2 + (seed % 11) as u32; // up to 12
            let budget = (seed % 4) as u32;
            let inst = random_ab_instance(n_bits, budget, seed);
            for p in [0.3, 0.5] {
                let rep = ab_lemma_check(&inst, p).unwrap();
                assert!(rep.hypothesis_ok, "seed {seed}");
                assert!(rep.conclusion_holds, "seed {seed} p {p}");
            }
        }
    }

    #[test]
    fn path_enumeration_examples() {
        // chain: exactly one path
        let r = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 4, 1).unwrap();
        let cfg = crate::sampling::sample(&r, 1.0, 0).unwrap();
        let paths = enumerate_simple_paths(&cfg, &[0], &[3], None, 12).unwrap();
        assert_eq!(paths.len(), 1);

        // 2x2 all open, opposite corners: exactly two
        let r = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 2, 2).unwrap();
        let cfg = crate::sampling::sample(&r, 1.0, 0).unwrap();
        let x = r.index_of(0, 0, 0).unwrap();
        let y = r.index_of(1, 1, 0).unwrap();
        let paths = enumerate_simple_paths(&cfg, &[x], &[y], None, 12).unwrap();
        assert_eq!(paths.len(), 2);

        // no open bonds: none
        let cfg = crate::sampling::sample(&r, 0.0, 0).unwrap();
        assert!(enumerate_simple_paths(&cfg, &[x], &[y], None, 12)
            .unwrap()
            .is_empty());
    }

    /// Backbone and minimal path against enumeration on a random corpus.
    #[test]
    fn corpus_backbone_and_min_path_match_enumeration() {
        let specs = [
            (SlabSpec::new(1, 2).unwrap(), 4i64, 3i64), // 12 sites
            (SlabSpec::new(1, 2).unwrap(), 3, 3),
            (SlabSpec::new(2, 3).unwrap(), 3, 2), // 12 sites
            (SlabSpec::new(2, 3).unwrap(), 2, 3),
        ];
        let mut checked = 0;
        for (si, &(spec, m, n)) in specs.iter().enumerate() {
            let region = Region::rectangle(spec, m, n).unwrap();
            let ns = region.site_count();
            assert!(ns <= 12);
            for rep in 0..30u64 {
                let seed = si as u64 * 1000 + rep;
                let mut rng = SeqRng::new(seed);
                let p = 0.3 + 0.4 * rng.next_f64();
                let cfg = crate::sampling::sample(&region, p, seed).unwrap();
                let x = vec![rng.below(ns as u64) as u32];
                let y = vec![rng.below(ns as u64) as u32];

                let paths = enumerate_simple_paths(&cfg, &x, &y, None, 12).unwrap();
                let mut expect = BitSet::new(ns);
                for path in &paths {
                    for &s in &path.sites {
                        expect.insert(s);
                    }
                }
                let got = backbone(&cfg, &x, &y, None);
                assert_eq!(got, expect, "backbone seed {seed}");
                let flow = backbone_by_disjoint_paths(&cfg, &x, &y, None);
                assert_eq!(flow, expect, "flow backbone seed {seed}");

                let min_expected = paths
                    .iter()
                    .min_by(|a, b| compare_paths(&region, &a.sites, &b.sites));
                let got_min = min_self_avoiding_path(&cfg, &x, &y, None);
                assert_eq!(
                    got_min.as_ref().map(|p| &p.sites),
                    min_expected.map(|p| &p.sites),
                    "min path seed {seed}"
                );
                if let Some(p) = got_min {
                    for &s in &p.sites {
                        assert!(got.contains(s)); // min path inside backbone
                    }
                }
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }
}

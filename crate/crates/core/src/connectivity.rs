//! Cluster and path queries on configurations.
//!
//! Conventions: a set is connected to itself through a zero-length path, so
//! `connected(X, Y, ..)` is true whenever X and Y share a site inside the
//! mask. Distances between site sets are l1 in slab coordinates; on the
//! lifted rectangles used here l1 distance coincides with lattice graph
//! distance, which is what the dilation queries walk.

use std::cmp::Ordering;

use crate::bitset::BitSet;
use crate::geometry::Region;
use crate::sampling::Config;

/// Disjoint-set structure over a region's sites restricted to a mask,
/// built from a configuration's open bonds.
pub struct ClusterIndex {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl ClusterIndex {
    pub fn build(cfg: &Config, mask: Option<&BitSet>) -> ClusterIndex {
        let region = cfg.region();
        let n = region.site_count();
        let mut idx = ClusterIndex {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        };
        for (bid, &(a, b)) in region.bonds().iter().enumerate() {
            if !cfg.is_open(bid as u32) {
                continue;
            }
            if let Some(m) = mask {
                if !m.contains(a) || !m.contains(b) {
                    continue;
                }
            }
            idx.union(a, b);
        }
        idx
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut at = x;
        while at != root {
            let next = self.parent[at as usize];
            self.parent[at as usize] = root;
            at = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }

    pub fn same_set(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}

#[inline]
fn in_mask(mask: Option<&BitSet>, i: u32) -> bool {
    mask.is_none_or(|m| m.contains(i))
}

/// All sites of the mask joined to `seeds` by open paths inside the mask,
/// seeds included (after intersecting them with the mask).
pub fn cluster(cfg: &Config, seeds: &[u32], mask: Option<&BitSet>) -> BitSet {
    let region = cfg.region();
    let mut out = BitSet::new(region.site_count());
    let mut queue: Vec<u32> = Vec::new();
    for &s in seeds {
        if in_mask(mask, s) && out.insert(s) {
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for e in region.neighbors(v) {
            if cfg.is_open(e.bond) && in_mask(mask, e.nbr) && out.insert(e.nbr) {
                queue.push(e.nbr);
            }
        }
    }
    out
}

/// True iff X and Y intersect inside the mask or an open path inside the
/// mask joins them.
pub fn connected(cfg: &Config, xs: &[u32], ys: &[u32], mask: Option<&BitSet>) -> bool {
    let region = cfg.region();
    let mut target = BitSet::new(region.site_count());
    let mut any_target = false;
    for &y in ys {
        if in_mask(mask, y) {
            target.insert(y);
            any_target = true;
        }
    }
    if !any_target {
        return false;
    }
    let mut seen = BitSet::new(region.site_count());
    let mut queue: Vec<u32> = Vec::new();
    for &x in xs {
        if in_mask(mask, x) && seen.insert(x) {
            if target.contains(x) {
                return true;
            }
            queue.push(x);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for e in region.neighbors(v) {
            if cfg.is_open(e.bond) && in_mask(mask, e.nbr) && seen.insert(e.nbr) {
                if target.contains(e.nbr) {
                    return true;
                }
                queue.push(e.nbr);
            }
        }
    }
    false
}

/// Sites of `ambient \ a` at lattice distance 1 from `a`. Adjacency is the
/// full slab adjacency, independent of bond states.
pub fn outer_vertex_boundary(region: &Region, a: &BitSet, ambient: Option<&BitSet>) -> BitSet {
    let mut out = BitSet::new(region.site_count());
    for v in a.iter() {
        for e in region.neighbors(v) {
            if !a.contains(e.nbr) && in_mask(ambient, e.nbr) {
                out.insert(e.nbr);
            }
        }
    }
    out
}

/// Fiber closure of a site set: project to the plane, re-lift.
pub fn shadow_of(region: &Region, a: &BitSet) -> BitSet {
    let fc = region.fiber_count() as u32;
    if fc == 1 {
        return a.clone();
    }
    let mut out = BitSet::new(region.site_count());
    for v in a.iter() {
        let base = v / fc * fc;
        for f in 0..fc {
            out.insert(base + f);
        }
    }
    out
}

/// Minimum l1 distance between two site sets; `None` when either is empty.
pub fn dist1(region: &Region, a: &BitSet, b: &BitSet) -> Option<u64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    if a.intersects(b) {
        return Some(0);
    }
    let av: Vec<_> = a.iter().map(|i| region.site_at(i)).collect();
    let bv: Vec<_> = b.iter().map(|i| region.site_at(i)).collect();
    let mut best = u64::MAX;
    for x in &av {
        for y in &bv {
            best = best.min(x.dist1(y));
        }
    }
    Some(best)
}

/// True iff some site of `b` lies within lattice distance `r` of `a`.
/// Multi-source BFS over full adjacency; on lifted rectangles the lattice
/// distance equals l1 distance.
pub fn within_l1(region: &Region, a: &BitSet, b: &BitSet, r: u64) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    if a.intersects(b) {
        return true;
    }
    let mut seen = a.clone();
    let mut frontier: Vec<u32> = a.iter().collect();
    for _ in 0..r {
        let mut next = Vec::new();
        for &v in &frontier {
            for e in region.neighbors(v) {
                if seen.insert(e.nbr) {
                    if b.contains(e.nbr) {
                        return true;
                    }
                    next.push(e.nbr);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

/// Connected component of `start` in the lattice (all bonds, regardless of
/// state) after deleting `blocked` sites. Empty when start is blocked.
pub fn lattice_component(region: &Region, start: u32, blocked: &BitSet) -> BitSet {
    let mut out = BitSet::new(region.site_count());
    if blocked.contains(start) {
        return out;
    }
    out.insert(start);
    let mut queue = vec![start];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for e in region.neighbors(v) {
            if !blocked.contains(e.nbr) && out.insert(e.nbr) {
                queue.push(e.nbr);
            }
        }
    }
    out
}

/// Mirror a site set across the hyperplane z2 = two_c2 / 2, dropping sites
/// whose image falls outside the region.
pub fn reflect_rows(region: &Region, set: &BitSet, two_c2: i64) -> BitSet {
    assert!(two_c2.rem_euclid(2) == 1, "2*c2 must be an odd integer");
    let fc = region.fiber_count() as u32;
    let (_, _, y0, y1) = region.base();
    let mut out = BitSet::new(region.site_count());
    for v in set.iter() {
        let y = region.row_of(v);
        let ym = two_c2 - y;
        if (y0..y1).contains(&ym) {
            // same column and fiber, mirrored row
            let delta = (ym - y) * fc as i64;
            out.insert((v as i64 + delta) as u32);
        }
    }
    out
}

/// True iff the set contains a site in the region's lowest or highest row
/// (the truncation cutoffs of a vertical strip window).
pub fn touches_cutoff_rows(region: &Region, set: &BitSet) -> bool {
    let (_, _, y0, y1) = region.base();
    set.iter().any(|v| {
        let y = region.row_of(v);
        y == y0 || y == y1 - 1
    })
}

/// An open lattice path, stored as region site indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub sites: Vec<u32>,
}

impl Path {
    pub fn is_simple(&self) -> bool {
        let mut sorted = self.sites.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Consecutive sites bonded with the bond open.
    pub fn is_open(&self, cfg: &Config) -> bool {
        self.sites.windows(2).all(|w| {
            cfg.region()
                .neighbors(w[0])
                .iter()
                .any(|e| e.nbr == w[1] && cfg.is_open(e.bond))
        })
    }
}

/// Total order on simple paths: first by start-site number, then prefixes
/// before their extensions, then by direction rank at the first divergence.
pub fn compare_paths(region: &Region, a: &[u32], b: &[u32]) -> Ordering {
    match a[0].cmp(&b[0]) {
        Ordering::Equal => {}
        other => return other,
    }
    let shared = a.len().min(b.len());
    for i in 1..shared {
        if a[i] != b[i] {
            let ra = step_rank(region, a[i - 1], a[i]);
            let rb = step_rank(region, b[i - 1], b[i]);
            return ra.cmp(&rb);
        }
    }
    a.len().cmp(&b.len())
}

fn step_rank(region: &Region, from: u32, to: u32) -> u8 {
    region
        .neighbors(from)
        .iter()
        .find(|e| e.nbr == to)
        .map(|e| e.rank)
        .expect("consecutive path sites must be adjacent")
}

fn reachable_avoiding(
    cfg: &Config,
    from: u32,
    targets: &BitSet,
    mask: Option<&BitSet>,
    blocked: &BitSet,
) -> bool {
    if targets.contains(from) {
        return true;
    }
    let region = cfg.region();
    let mut seen = BitSet::new(region.site_count());
    seen.insert(from);
    let mut queue = vec![from];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for e in region.neighbors(v) {
            if cfg.is_open(e.bond)
                && in_mask(mask, e.nbr)
                && !blocked.contains(e.nbr)
                && seen.insert(e.nbr)
            {
                if targets.contains(e.nbr) {
                    return true;
                }
                queue.push(e.nbr);
            }
        }
    }
    false
}

/// The order-minimal open self-avoiding path from X to Y inside the mask,
/// or `None` when X and Y are not connected there.
///
/// Greedy descent: starting from the lowest-numbered feasible start site,
/// repeatedly take the smallest direction whose endpoint can still reach Y
/// without the sites already on the path. The feasibility check makes every
/// greedy step safe, so no backtracking occurs.
pub fn min_self_avoiding_path(
    cfg: &Config,
    xs: &[u32],
    ys: &[u32],
    mask: Option<&BitSet>,
) -> Option<Path> {
    let region = cfg.region();
    let mut targets = BitSet::new(region.site_count());
    let mut any = false;
    for &y in ys {
        if in_mask(mask, y) {
            targets.insert(y);
            any = true;
        }
    }
    if !any {
        return None;
    }

    let mut starts: Vec<u32> = xs.iter().copied().filter(|&x| in_mask(mask, x)).collect();
    starts.sort_unstable();
    starts.dedup();
    let empty = BitSet::new(region.site_count());
    let start = starts
        .into_iter()
        .find(|&s| reachable_avoiding(cfg, s, &targets, mask, &empty))?;

    let mut on_path = BitSet::new(region.site_count());
    on_path.insert(start);
    let mut path = vec![start];
    loop {
        let v = *path.last().unwrap();
        if targets.contains(v) {
            return Some(Path { sites: path });
        }
        let mut advanced = false;
        for e in region.neighbors(v) {
            // neighbors are rank-sorted, so this scan is in direction order
            if !cfg.is_open(e.bond) || !in_mask(mask, e.nbr) || on_path.contains(e.nbr) {
                continue;
            }
            if reachable_avoiding(cfg, e.nbr, &targets, mask, &on_path) {
                on_path.insert(e.nbr);
                path.push(e.nbr);
                advanced = true;
                break;
            }
        }
        debug_assert!(advanced, "feasibility invariant violated");
        if !advanced {
            return None;
        }
    }
}

/// Sites lying on at least one open simple path from X to Y inside the mask.
///
/// A vertex v is on a simple X-Y path iff there are two open paths v->X and
/// v->Y that share only v. Equivalently, after attaching virtual terminals
/// s (to all of X), t (to all of Y) and the edge s-t, v is on such a path
/// iff v lies in the biconnected component containing the edge s-t. One
/// biconnected-components pass answers every vertex at once.
pub fn backbone(cfg: &Config, xs: &[u32], ys: &[u32], mask: Option<&BitSet>) -> BitSet {
    let region = cfg.region();
    let n = region.site_count();
    let mut out = BitSet::new(n);

    let xs: Vec<u32> = {
        let mut v: Vec<u32> = xs.iter().copied().filter(|&x| in_mask(mask, x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let ys: Vec<u32> = {
        let mut v: Vec<u32> = ys.iter().copied().filter(|&y| in_mask(mask, y)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    if xs.is_empty() || ys.is_empty() {
        return out;
    }

    // Adjacency of the open subgraph plus the two terminals.
    // Node ids: 0..n real, n = s, n+1 = t.
    let s_node = n as u32;
    let t_node = n as u32 + 1;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + 2];
    for (bid, &(a, b)) in region.bonds().iter().enumerate() {
        if cfg.is_open(bid as u32) && in_mask(mask, a) && in_mask(mask, b) {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    for &x in &xs {
        adj[s_node as usize].push(x);
        adj[x as usize].push(s_node);
    }
    for &y in &ys {
        adj[t_node as usize].push(y);
        adj[y as usize].push(t_node);
    }
    adj[s_node as usize].push(t_node);
    adj[t_node as usize].push(s_node);

    // Iterative Hopcroft-Tarjan with an edge stack; we only keep the
    // component that pops with the s-t edge.
    const UNSET: u32 = u32::MAX;
    let total = n + 2;
    let mut disc = vec![UNSET; total];
    let mut low = vec![0u32; total];
    let mut parent_edge = vec![(UNSET, UNSET); total];
    let mut it = vec![0usize; total];
    let mut timer = 0u32;
    let mut edge_stack: Vec<(u32, u32)> = Vec::new();
    let mut dfs_stack: Vec<u32> = Vec::new();

    disc[s_node as usize] = timer;
    low[s_node as usize] = timer;
    timer += 1;
    dfs_stack.push(s_node);

    let is_st = |u: u32, v: u32| (u == s_node && v == t_node) || (u == t_node && v == s_node);

    while let Some(&u) = dfs_stack.last() {
        let ui = u as usize;
        if it[ui] < adj[ui].len() {
            let v = adj[ui][it[ui]];
            it[ui] += 1;
            let vi = v as usize;
            if disc[vi] == UNSET {
                edge_stack.push((u, v));
                parent_edge[vi] = (u, v);
                disc[vi] = timer;
                low[vi] = timer;
                timer += 1;
                dfs_stack.push(v);
            } else if disc[vi] < disc[ui] && (u, v) != (parent_edge[ui].1, parent_edge[ui].0) {
                // back edge (skip the reverse of the tree edge into u)
                edge_stack.push((u, v));
                low[ui] = low[ui].min(disc[vi]);
            }
        } else {
            dfs_stack.pop();
            if let Some(&p) = dfs_stack.last() {
                let pi = p as usize;
                low[pi] = low[pi].min(low[ui]);
                if low[ui] >= disc[pi] {
                    // pop one biconnected component, delimited by edge (p, u)
                    let mut found_st = false;
                    let mut members: Vec<u32> = Vec::new();
                    while let Some(&(a, b)) = edge_stack.last() {
                        edge_stack.pop();
                        members.push(a);
                        members.push(b);
                        if is_st(a, b) {
                            found_st = true;
                        }
                        if (a, b) == (p, u) {
                            break;
                        }
                    }
                    if found_st {
                        for m in members {
                            if m < n as u32 {
                                out.insert(m);
                            }
                        }
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// Reference route for `backbone`: per-vertex check for two internally
/// disjoint open paths v->X and v->Y via at most two augmentations of a
/// unit-vertex-capacity flow. Quadratic; kept for cross-validation.
pub fn backbone_by_disjoint_paths(
    cfg: &Config,
    xs: &[u32],
    ys: &[u32],
    mask: Option<&BitSet>,
) -> BitSet {
    let region = cfg.region();
    let n = region.site_count();
    let mut out = BitSet::new(n);
    let xset = BitSet::from_indices(
        n,
        &xs.iter().copied().filter(|&x| in_mask(mask, x)).collect::<Vec<_>>(),
    );
    let yset = BitSet::from_indices(
        n,
        &ys.iter().copied().filter(|&y| in_mask(mask, y)).collect::<Vec<_>>(),
    );
    if xset.is_empty() || yset.is_empty() {
        return out;
    }
    let from_x = cluster(cfg, &xset.to_vec(), mask);
    let from_y = cluster(cfg, &yset.to_vec(), mask);
    for v in from_x.iter() {
        if !from_y.contains(v) {
            continue;
        }
        if two_disjoint_paths(cfg, v, &xset, &yset, mask) {
            out.insert(v);
        }
    }
    out
}

/// Unit-capacity check for two internally disjoint open paths from v, one
/// ending in X and one in Y. Sites are split into in/out copies of unit
/// capacity (v itself bypassed); X and Y feed separate unit aggregators
/// into a super sink, so max flow 2 forces one path per set. Quadratic and
/// allocation-heavy, fine for the small instances it serves.
fn two_disjoint_paths(
    cfg: &Config,
    v: u32,
    xset: &BitSet,
    yset: &BitSet,
    mask: Option<&BitSet>,
) -> bool {
    use std::collections::{HashMap, HashSet};
    let region = cfg.region();
    let n = region.site_count() as u32;
    let x_agg = 2 * n;
    let y_agg = 2 * n + 1;
    let sink = 2 * n + 2;
    let source = 2 * v + 1;

    // in-copy of site w is 2w, out-copy 2w+1; v's in-copy is unreachable
    let originals = |u: u32| -> Vec<u32> {
        let mut out = Vec::new();
        if u == x_agg || u == y_agg {
            out.push(sink);
        } else if u != sink && u % 2 == 0 {
            out.push(u + 1);
        } else if u != sink {
            let w = u / 2;
            for e in region.neighbors(w) {
                if cfg.is_open(e.bond) && in_mask(mask, e.nbr) && e.nbr != v {
                    out.push(2 * e.nbr);
                }
            }
            if xset.contains(w) {
                out.push(x_agg);
            }
            if yset.contains(w) {
                out.push(y_agg);
            }
        }
        out
    };

    let mut used: HashSet<(u32, u32)> = HashSet::new();
    for _ in 0..2 {
        let mut prev: HashMap<u32, u32> = HashMap::new();
        prev.insert(source, source);
        let mut stack = vec![source];
        let mut hit = false;
        while let Some(u) = stack.pop() {
            if u == sink {
                hit = true;
                break;
            }
            for t in originals(u) {
                if !used.contains(&(u, t)) && !prev.contains_key(&t) {
                    prev.insert(t, u);
                    stack.push(t);
                }
            }
            // reverse residual arcs along currently used flow
            for &(a, b) in used.iter() {
                if b == u && !prev.contains_key(&a) {
                    prev.insert(a, u);
                    stack.push(a);
                }
            }
        }
        if !hit {
            return false;
        }
        let mut at = sink;
        while at != source {
            let from = prev[&at];
            if used.contains(&(at, from)) {
                used.remove(&(at, from));
            } else {
                used.insert((from, at));
            }
            at = from;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Region, SlabSpec};
    use crate::sampling::sample;
    use std::sync::Arc;

    fn chain_region(len: i64) -> Arc<Region> {
        Region::rectangle(SlabSpec::new(1, 2).unwrap(), len, 1).unwrap()
    }

    #[test]
    fn connected_conventions() {
        let r = chain_region(4);
        let closed = sample(&r, 0.0, 0).unwrap();
        // X = Y nonempty: zero-length path
        assert!(connected(&closed, &[1], &[1], None));
        assert!(!connected(&closed, &[0], &[3], None));
        // single open bond joins
        let one = crate::sampling::Config::from_open_bonds(Arc::clone(&r), &[0], 0.5, 0);
        assert!(connected(&one, &[0], &[1], None));
        assert!(!connected(&one, &[0], &[2], None));
        // empty side
        assert!(!connected(&closed, &[], &[1], None));
    }

    #[test]
    fn cluster_conventions() {
        let r = chain_region(5);
        let closed = sample(&r, 0.0, 0).unwrap();
        let c = cluster(&closed, &[2], None);
        assert_eq!(c.to_vec(), vec![2]);

        let open = sample(&r, 1.0, 0).unwrap();
        let c = cluster(&open, &[0], None);
        assert_eq!(c.count(), 5);

        // idempotent under recomputation from its own sites
        let again = cluster(&open, &c.to_vec(), None);
        assert_eq!(again, c);

        // seeds outside the mask are dropped
        let mask = BitSet::from_indices(5, &[0, 1]);
        let c = cluster(&open, &[0, 4], Some(&mask));
        assert_eq!(c.to_vec(), vec![0, 1]);
    }

    #[test]
    fn cluster_index_matches_bfs() {
        let r = Region::rectangle(SlabSpec::new(2, 3).unwrap(), 4, 3).unwrap();
        for seed in 0..20u64 {
            let cfg = sample(&r, 0.5, seed).unwrap();
            let mut ci = ClusterIndex::build(&cfg, None);
            for a in 0..r.site_count() as u32 {
                let cl = cluster(&cfg, &[a], None);
                for b in 0..r.site_count() as u32 {
                    assert_eq!(ci.same_set(a, b), cl.contains(b), "seed {seed} a {a} b {b}");
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        // isolated site in the plane: 4 lattice neighbors
        let r = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 5, 5).unwrap();
        let mid = r.index_of(2, 2, 0).unwrap();
        let a = BitSet::from_indices(r.site_count(), &[mid]);
        let b = outer_vertex_boundary(&r, &a, None);
        assert_eq!(b.count(), 4);

        // slab interior site at fiber position 0 with k = 2: 5 neighbors
        let r = Region::rectangle(SlabSpec::new(2, 3).unwrap(), 5, 5).unwrap();
        let mid = r.index_of(2, 2, 0).unwrap();
        let a = BitSet::from_indices(r.site_count(), &[mid]);
        let b = outer_vertex_boundary(&r, &a, None);
        assert_eq!(b.count(), 5);

        // boundary of everything is empty
        let all = BitSet::from_indices(r.site_count(), &(0..r.site_count() as u32).collect::<Vec<_>>());
        assert!(outer_vertex_boundary(&r, &all, None).is_empty());
        // disjoint from the set, every member has a neighbor inside
        for v in b.iter() {
            assert!(!a.contains(v));
            assert!(r.neighbors(v).iter().any(|e| a.contains(e.nbr)));
        }
    }

    #[test]
    fn dist_examples() {
        let r = Region::new(SlabSpec::new(1, 2).unwrap(), 0, 4, 0, 4).unwrap();
        let a = BitSet::from_indices(r.site_count(), &[r.index_of(0, 0, 0).unwrap()]);
        let b = BitSet::from_indices(r.site_count(), &[r.index_of(2, 3, 0).unwrap()]);
        assert_eq!(dist1(&r, &a, &b), Some(5));
        assert_eq!(dist1(&r, &a, &a), Some(0));
        assert_eq!(dist1(&r, &BitSet::new(r.site_count()), &b), None);
        assert!(within_l1(&r, &a, &b, 5));
        assert!(!within_l1(&r, &a, &b, 4));
    }

    #[test]
    fn within_matches_dist_on_random_sets() {
        let r = Region::rectangle(SlabSpec::new(2, 3).unwrap(), 5, 4).unwrap();
        let mut rng = crate::rng::SeqRng::new(9);
        for _ in 0..50 {
            let mut a = BitSet::new(r.site_count());
            let mut b = BitSet::new(r.site_count());
            for _ in 0..3 {
                a.insert(rng.below(r.site_count() as u64) as u32);
                b.insert(rng.below(r.site_count() as u64) as u32);
            }
            let d = dist1(&r, &a, &b).unwrap();
            for radius in 0..8 {
                assert_eq!(within_l1(&r, &a, &b, radius), radius >= d);
            }
        }
    }

    #[test]
    fn backbone_chain_and_branch() {
        // open chain 0-1-2-3 with an open dangling branch below site 1
        let r = Region::new(SlabSpec::new(1, 2).unwrap(), 0, 4, 0, 2).unwrap();
        let idx = |x, y| r.index_of(x, y, 0).unwrap();
        let bond_of = |a: u32, b: u32| {
            r.neighbors(a)
                .iter()
                .find(|e| e.nbr == b)
                .map(|e| e.bond)
                .unwrap()
        };
        let open = vec![
            bond_of(idx(0, 0), idx(1, 0)),
            bond_of(idx(1, 0), idx(2, 0)),
            bond_of(idx(2, 0), idx(3, 0)),
            bond_of(idx(1, 0), idx(1, 1)), // dangling branch
        ];
        let cfg = crate::sampling::Config::from_open_bonds(Arc::clone(&r), &open, 0.5, 0);
        let bb = backbone(&cfg, &[idx(0, 0)], &[idx(3, 0)], None);
        assert_eq!(bb.to_vec(), vec![idx(0, 0), idx(1, 0), idx(2, 0), idx(3, 0)]);
        // the two-disjoint-paths reference route agrees
        let bb2 = backbone_by_disjoint_paths(&cfg, &[idx(0, 0)], &[idx(3, 0)], None);
        assert_eq!(bb, bb2);
    }

    #[test]
    fn backbone_square_all_open() {
        let r = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 2, 2).unwrap();
        let cfg = sample(&r, 1.0, 0).unwrap();
        let x = r.index_of(0, 0, 0).unwrap();
        let y = r.index_of(1, 1, 0).unwrap();
        let bb = backbone(&cfg, &[x], &[y], None);
        assert_eq!(bb.count(), 4);
        assert!(!connected(&sample(&r, 0.0, 0).unwrap(), &[x], &[y], None));
        assert!(backbone(&sample(&r, 0.0, 0).unwrap(), &[x], &[y], None).is_empty());
    }

    #[test]
    fn min_path_basics() {
        let r = chain_region(4);
        let all = sample(&r, 1.0, 0).unwrap();
        let p = min_self_avoiding_path(&all, &[0], &[3], None).unwrap();
        assert_eq!(p.sites, vec![0, 1, 2, 3]);
        assert!(p.is_simple() && p.is_open(&all));

        let none = sample(&r, 0.0, 0).unwrap();
        assert!(min_self_avoiding_path(&none, &[0], &[3], None).is_none());

        // zero-length when X meets Y
        let p = min_self_avoiding_path(&none, &[2], &[2], None).unwrap();
        assert_eq!(p.sites, vec![2]);
    }

    #[test]
    fn min_path_prefers_smaller_direction() {
        // all-open 2x2 square, from (0,0) to (1,1): two simple paths; the
        // one stepping +e1 first is smaller in the direction order
        let r = Region::rectangle(SlabSpec::new(1, 2).unwrap(), 2, 2).unwrap();
        let all = sample(&r, 1.0, 0).unwrap();
        let x = r.index_of(0, 0, 0).unwrap();
        let y = r.index_of(1, 1, 0).unwrap();
        let p = min_self_avoiding_path(&all, &[x], &[y], None).unwrap();
        let via_right = vec![x, r.index_of(1, 0, 0).unwrap(), y];
        assert_eq!(p.sites, via_right);
        let other = vec![x, r.index_of(0, 1, 0).unwrap(), y];
        assert_eq!(compare_paths(&r, &p.sites, &other), Ordering::Less);
    }

    #[test]
    fn path_order_prefix_rule() {
        let r = chain_region(4);
        let a = vec![0u32, 1, 2];
        let b = vec![0u32, 1, 2, 3];
        assert_eq!(compare_paths(&r, &a, &b), Ordering::Less);
        assert_eq!(compare_paths(&r, &b, &a), Ordering::Greater);
        assert_eq!(compare_paths(&r, &a, &a), Ordering::Equal);
        // smaller start wins over everything
        let c = vec![1u32, 2];
        assert_eq!(compare_paths(&r, &a, &c), Ordering::Less);
    }
}

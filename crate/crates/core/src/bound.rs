//! Admissible cost-to-go for the branch-and-bound: what the unplaced nodes
//! must add at least, given only their static windows.
//!
//! Three bounds:
//! - the cheapest power of every unplaced node on its own, given the window
//!   left to it by its placed ancestors;
//! - per-type area from interval load (nodes with windows inside `[a, b]`
//!   put at least one cycle each into it);
//! - per-type power as a function of the final area `a`: the nodes inside
//!   an interval get at most `a * width - busy` unit-cycles, and spending
//!   fewer cycles means faster, costlier levels. The cheapest way to use
//!   that budget is bounded by a fractional multiple-choice knapsack over
//!   the convex hull of the type's (cycles, energy) points.

use crate::cost::ArchMode;
use crate::library::ResourceLibrary;
use crate::timing::TimingInfo;

/// Lower convex hull of a type's (cycles, cost) points, from the 1-cycle
/// level while cost keeps dropping.
#[derive(Clone, Debug)]
struct Hull {
    fastest: f64,
    /// (start cycles, length in cycles, saving per cycle), savings decreasing.
    segments: Vec<(u32, u32, f64)>,
}

impl Hull {
    fn new(points: &[(u32, f64)]) -> Self {
        let mut hull: Vec<(u32, f64)> = Vec::new();
        for &p in points {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b when it lies on or above segment a -> p
                let cross =
                    (f64::from(b.0) - f64::from(a.0)) * (p.1 - a.1) - (b.1 - a.1) * (f64::from(p.0) - f64::from(a.0));
                if cross <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut segments = Vec::new();
        for w in hull.windows(2) {
            let len = w[1].0 - w[0].0;
            let saving = (w[0].1 - w[1].1) / f64::from(len);
            if saving <= 0.0 {
                break;
            }
            segments.push((w[0].0, len, saving));
        }
        Hull { fastest: points[0].1, segments }
    }
}

#[derive(Clone, Debug)]
struct Group {
    a: usize,
    b: usize,
    /// Unplaced nodes with their window inside `[a, b]`.
    n: u32,
    /// Per hull segment, cycles these nodes could shift into it.
    avail: Vec<u32>,
    /// Cheapest power of the nodes of this type outside the group.
    outside: f64,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Lookahead {
    enabled: bool,
    horizon: usize,
    rest_by_type: Vec<Vec<f64>>,
    remaining: Vec<Vec<u32>>,
    groups: Vec<Vec<Vec<Group>>>,
    hulls: Vec<Hull>,
    /// Cheapest single-node power per type and window width.
    cheapest: Vec<Vec<f64>>,
    /// Least always-on leakage a unit added to a type costs over the run.
    unit_leak: Vec<f64>,
}

/// Per-cycle power of a level as seen by the additive part of the cost.
pub(crate) fn per_cycle(lib: &ResourceLibrary, ty: usize, level: usize, mode: ArchMode) -> f64 {
    let lv = &lib.levels(ty)[level];
    if mode == ArchMode::Fgdvs {
        lv.pdyn + lv.plk
    } else {
        lv.pdyn
    }
}

impl Lookahead {
    pub(crate) fn new(
        t: &TimingInfo,
        lib: &ResourceLibrary,
        mode: ArchMode,
        order: &[usize],
        node_type: &[usize],
        enabled: bool,
    ) -> Self {
        let n = order.len();
        let types = lib.types().len();
        let horizon = t.latency_bound as usize + 1;
        let usable = |ty: usize| if mode == ArchMode::SingleVdd { 1 } else { lib.levels(ty).len() };
        let cost = |ty: usize, l: usize| per_cycle(lib, ty, l, mode) * f64::from(lib.levels(ty)[l].cycles);
        let width = |v: usize| t.alap[v] - t.asap[v] + 1;
        let cheapest = |v: usize| {
            let ty = node_type[v];
            (0..usable(ty))
                .filter(|&l| lib.levels(ty)[l].cycles <= width(v))
                .map(|l| cost(ty, l))
                .fold(f64::INFINITY, f64::min)
        };
        let hulls: Vec<Hull> = (0..types)
            .map(|ty| {
                let pts: Vec<(u32, f64)> = (0..usable(ty)).map(|l| (lib.levels(ty)[l].cycles, cost(ty, l))).collect();
                Hull::new(&pts)
            })
            .collect();

        let cheapest_w = (0..types)
            .map(|ty| {
                (0..=horizon as u32)
                    .map(|w| {
                        (0..usable(ty))
                            .filter(|&l| lib.levels(ty)[l].cycles <= w)
                            .map(|l| cost(ty, l))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        let mut la = Lookahead {
            enabled,
            horizon,
            rest_by_type: vec![vec![0.0; types]; n + 1],
            remaining: vec![vec![0; types]; n + 1],
            groups: vec![vec![Vec::new(); types]; n + 1],
            hulls,
            cheapest: cheapest_w,
            unit_leak: (0..types)
                .map(|ty| match mode {
                    ArchMode::Fgdvs => 0.0,
                    _ => {
                        let plk = (0..usable(ty)).map(|l| lib.levels(ty)[l].plk).fold(f64::INFINITY, f64::min);
                        plk * f64::from(t.latency_bound)
                    }
                })
                .collect(),
        };
        if !enabled {
            return la;
        }
        let mut counts = vec![vec![0u32; horizon * horizon]; types];
        for depth in (0..n).rev() {
            let v = order[depth];
            let ty = node_type[v];
            let c = cheapest(v);
            la.rest_by_type[depth] = la.rest_by_type[depth + 1].clone();
            la.rest_by_type[depth][ty] += c;
            la.remaining[depth] = la.remaining[depth + 1].clone();
            la.remaining[depth][ty] += 1;
            let (lo, hi) = (t.asap[v] as usize, t.alap[v] as usize);
            for a in 1..=lo {
                for b in hi..horizon {
                    counts[ty][a * horizon + b] += 1;
                }
            }
            let unplaced = &order[depth..];
            for (ty, c) in counts.iter().enumerate() {
                let at = |a: usize, b: usize| if a > b { 0 } else { c[a * horizon + b] };
                let mut groups = Vec::new();
                for a in 1..horizon {
                    for b in a..horizon {
                        let here = at(a, b);
                        // only intervals where shrinking either end loses a node
                        if here == 0 || (b > a && (here == at(a + 1, b) || here == at(a, b - 1))) {
                            continue;
                        }
                        let inside: Vec<usize> = unplaced
                            .iter()
                            .copied()
                            .filter(|&u| node_type[u] == ty && t.asap[u] as usize >= a && t.alap[u] as usize <= b)
                            .collect();
                        let avail = la.hulls[ty]
                            .segments
                            .iter()
                            .map(|&(start, len, _)| {
                                inside.iter().map(|&u| width(u).saturating_sub(start).min(len)).sum()
                            })
                            .collect();
                        let inside_cheapest: f64 = inside.iter().map(|&u| cheapest(u)).sum();
                        groups.push(Group {
                            a,
                            b,
                            n: here,
                            avail,
                            outside: la.rest_by_type[depth][ty] - inside_cheapest,
                        });
                    }
                }
                la.groups[depth][ty] = groups;
            }
        }
        la
    }

    pub(crate) fn enabled(&self) -> bool {
        self.enabled
    }

    pub(crate) fn cheapest(&self, ty: usize, width: u32) -> f64 {
        self.cheapest[ty][width as usize]
    }

    /// Raises `bound` (per-type area) to what interval load forces.
    pub(crate) fn area_bound(&self, depth: usize, busy_type: &[Vec<u32>], prefix: &mut [u32], bound: &mut [u32]) {
        if !self.enabled {
            return;
        }
        for (ty, bound) in bound.iter_mut().enumerate() {
            let groups = &self.groups[depth][ty];
            if groups.is_empty() {
                continue;
            }
            fill_prefix(&busy_type[ty], prefix);
            for g in groups {
                let load = g.n + prefix[g.b] - prefix[g.a - 1];
                *bound = (*bound).max(load.div_ceil((g.b - g.a + 1) as u32));
            }
        }
    }

    /// Least power the unplaced nodes of `ty` can add if the type ends with
    /// at most `area` concurrent units. Infinite when they cannot fit.
    fn type_power(&self, depth: usize, ty: usize, area: u32, prefix: &[u32], floor: f64) -> f64 {
        let hull = &self.hulls[ty];
        let mut best = floor;
        for g in &self.groups[depth][ty] {
            let capacity = area * (g.b - g.a + 1) as u32;
            let used = prefix[g.b] - prefix[g.a - 1];
            if used + g.n > capacity {
                return f64::INFINITY;
            }
            let mut slack = capacity - used - g.n;
            let mut inside = f64::from(g.n) * hull.fastest;
            for (&(_, _, saving), &avail) in hull.segments.iter().zip(&g.avail) {
                let take = slack.min(avail);
                inside -= f64::from(take) * saving;
                slack -= take;
            }
            best = best.max(inside + g.outside);
        }
        best
    }

    /// Whether every completion is covered by `front`, a staircase of
    /// `(area, power)` points sorted by area. `area_lb` is the per-type area
    /// bound, `exact` the current per-type area, `floor` the per-type
    /// cheapest power of the unplaced nodes and `placed` the power already
    /// committed (instance leakage of `exact` included).
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn covered(
        &self,
        depth: usize,
        busy_type: &[Vec<u32>],
        area_lb: &[u32],
        exact: &[u32],
        floor: &[f64],
        placed: f64,
        front: &[(u32, f64)],
        eps: f64,
    ) -> bool {
        if !self.enabled || front.is_empty() {
            return false;
        }
        // min-plus combination of per-type curves over total area
        let mut prefix = vec![0u32; self.horizon];
        let mut combined: Vec<f64> = vec![0.0];
        let mut base = 0u32;
        for (ty, &lo) in area_lb.iter().enumerate() {
            base += lo;
            if self.remaining[depth][ty] == 0 {
                continue;
            }
            fill_prefix(&busy_type[ty], &mut prefix);
            let floor = floor[ty];
            let mut curve = Vec::new();
            // every unplaced node on its own unit is the most area can help
            let leak = |a: u32| f64::from(a - exact[ty]) * self.unit_leak[ty];
            for a in lo..=lo + self.remaining[depth][ty] {
                let p = self.type_power(depth, ty, a, &prefix, floor);
                curve.push(p + leak(a));
                if p <= floor {
                    break;
                }
            }
            let a = lo + curve.len() as u32;
            if curve.last().is_some_and(|&p| p > floor + leak(a)) {
                curve.push(floor + leak(a));
            }
            let mut next = vec![f64::INFINITY; combined.len() + curve.len() - 1];
            for (i, &x) in combined.iter().enumerate() {
                for (j, &y) in curve.iter().enumerate() {
                    next[i + j] = next[i + j].min(x + y);
                }
            }
            // more area never costs power
            for i in 1..next.len() {
                next[i] = next[i].min(next[i - 1]);
            }
            combined = next;
        }
        let mut best = f64::INFINITY;
        let mut k = 0;
        for (i, &rest) in combined.iter().enumerate() {
            let area = base + i as u32;
            while k < front.len() && front[k].0 <= area {
                best = best.min(front[k].1);
                k += 1;
            }
            if best > placed + rest + eps {
                return false;
            }
        }
        true
    }
}

fn fill_prefix(busy: &[u32], prefix: &mut [u32]) {
    prefix[0] = 0;
    for s in 1..busy.len() {
        prefix[s] = prefix[s - 1] + busy[s];
    }
}

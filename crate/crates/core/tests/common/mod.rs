//! Random instances shared by the integration and acceptance tests.
#![allow(dead_code)]

use dvsched::library::TypeEntry;
use dvsched::oracle::state_space_estimate;
use dvsched::{compute_timing, Budget, Dfg, Node, OpType, ResourceLibrary, Schedule, Slot, TimingInfo, VoltageLevel};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Library with `types` op types named t0, t1, ... and 1-3 levels each.
pub fn random_library(r: &mut ChaCha8Rng, types: usize) -> ResourceLibrary {
    let entries = (0..types)
        .map(|i| {
            let nlev = r.gen_range(1..=3);
            let mut pdyn = r.gen_range(4.0..24.0f64);
            let mut vdd = 1.0;
            let psw = (r.gen_range(0.0..1.0f64) * 100.0).round() / 100.0;
            let levels = (0..nlev)
                .map(|l| {
                    let lv = VoltageLevel {
                        vdd,
                        cycles: l as u32 + 1,
                        pdyn: (pdyn * 100.0).round() / 100.0,
                        plk: (r.gen_range(0.05..1.5f64) * 100.0).round() / 100.0,
                        psw,
                    };
                    vdd -= 0.12;
                    pdyn *= r.gen_range(0.2..0.7);
                    lv
                })
                .collect();
            TypeEntry { op: OpType::new(format!("t{i}")), levels }
        })
        .collect();
    ResourceLibrary::new(entries).expect("generated library is valid")
}

/// DAG over `n` nodes with shuffled, gappy ids; edges only forward in a
/// hidden order so the graph is acyclic.
pub fn random_dag(r: &mut ChaCha8Rng, n: usize, types: usize, density: f64) -> Dfg {
    let mut ids: Vec<u32> = (1..=n as u32).map(|i| i * 3 + r.gen_range(0..3)).collect();
    ids.shuffle(r);
    let nodes: Vec<Node> =
        ids.iter().map(|&id| Node { id, op: OpType::new(format!("t{}", r.gen_range(0..types))) }).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(density) {
                edges.push((ids[i], ids[j]));
            }
        }
    }
    Dfg::new("random", nodes, edges).expect("forward edges are acyclic")
}

pub struct Instance {
    pub g: Dfg,
    pub lib: ResourceLibrary,
}

/// `count` instances with 2-8 nodes, 1-3 types and 1-3 levels whose
/// schedule space at `k_max` stays below `max_states` (estimate).
pub fn corpus(seed: u64, count: usize, k_max: u32, max_states: f64) -> Vec<Instance> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.gen_range(2..=8);
        let types = r.gen_range(1..=3);
        let lib = random_library(&mut r, types);
        let density = r.gen_range(0.15..0.6);
        let g = random_dag(&mut r, n, types, density);
        let t = compute_timing(&g, k_max);
        if state_space_estimate(&g, &t, &lib) <= max_states {
            out.push(Instance { g, lib });
        }
    }
    out
}

/// Area caps drawn per type between 1 and the type's node count.
pub fn sampled_area_budget(r: &mut ChaCha8Rng, g: &Dfg) -> Budget {
    let mut caps = Vec::new();
    for op in g.op_types() {
        let count = g.nodes().iter().filter(|n| n.op == op).count() as u32;
        caps.push(format!("{op}={}", r.gen_range(1..=count)));
    }
    Budget::parse_area(&caps.join(",")).unwrap()
}

/// Power cap drawn between the min and max power of an unconstrained front,
/// sometimes just below the min.
pub fn sampled_power_budget(r: &mut ChaCha8Rng, powers: &[f64]) -> Budget {
    let lo = powers.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = powers.iter().copied().fold(0.0, f64::max);
    if !lo.is_finite() {
        return Budget::Power(0.0);
    }
    let u: f64 = r.gen_range(-0.1..1.1);
    Budget::Power((lo + u * (hi - lo)).max(0.0))
}

/// A uniformly-ish random valid schedule: topological placement with random
/// start and fitting duration.
pub fn random_schedule(r: &mut ChaCha8Rng, g: &Dfg, lib: &ResourceLibrary, t: &TimingInfo) -> Schedule {
    let mut slots: Vec<Option<Slot>> = vec![None; g.len()];
    for &v in g.topo_indices() {
        let e = g.preds(v).iter().map(|&p| slots[p].unwrap().start + slots[p].unwrap().duration).max().unwrap_or(0);
        let e = e.max(t.asap[v]);
        let start = r.gen_range(e..=t.alap[v]);
        let fits: Vec<u32> = lib
            .entry(&g.node(v).op)
            .unwrap()
            .levels
            .iter()
            .map(|l| l.cycles)
            .filter(|&d| start + d - 1 <= t.alap[v])
            .collect();
        slots[v] = Some(Slot::new(start, *fits.choose(r).unwrap()));
    }
    Schedule::new(slots.into_iter().map(Option::unwrap).collect())
}

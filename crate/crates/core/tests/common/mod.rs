#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use ug_core::construction::EdgeData;
use ug_core::game::check_partial_isomorphism;
use ug_core::gf2::Gf2Vector;
use ug_core::graph::{MultiGraph, Path};
use ug_core::instance::{Fraction, GroupUgInstance};
use ug_core::lift::{lift, lifted_name};

/// A random simple instance on `n` vertices with at most `max_constraints`
/// constraints (at least one), bundles of one or two distinct shifts.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    m: usize,
    n: usize,
    max_constraints: usize,
) -> GroupUgInstance {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    let mut edges = Vec::new();
    let mut bundles = Vec::new();
    let mut left = max_constraints;
    for p in pairs {
        if left == 0 || (!edges.is_empty() && rng.gen_bool(0.4)) {
            continue;
        }
        let size = rng.gen_range(1..=2.min(left).min(1 << m));
        let mut bundle: Vec<Gf2Vector> = Vec::new();
        while bundle.len() < size {
            let z = Gf2Vector::random(m, rng);
            if !bundle.contains(&z) {
                bundle.push(z);
            }
        }
        left -= size;
        edges.push(p);
        bundles.push(bundle);
    }
    GroupUgInstance::new(m, MultiGraph::from_indices(names, edges), bundles).expect("well-formed")
}

/// Maximum satisfied fraction by enumerating every assignment.
pub fn brute_force_opt(u: &GroupUgInstance) -> Fraction {
    let (n, m) = (u.vertex_count(), u.m());
    let mut best = 0;
    let mut labels = vec![Gf2Vector::zero(m); n];
    for code in 0u64..1 << (n * m) {
        for (v, l) in labels.iter_mut().enumerate() {
            *l = Gf2Vector::from_word(code >> (v * m) & ((1 << m) - 1), m).unwrap();
        }
        best = best.max(u.satisfied(&labels));
    }
    Fraction::new(best, u.constraint_count())
}

/// Pearson statistic of observed counts against a uniform expectation.
pub fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

pub fn random_simple_path<R: Rng>(g: &MultiGraph, len: usize, rng: &mut R) -> Option<Path> {
    let start = rng.gen_range(0..g.vertex_count());
    let mut p = Path {
        vertices: vec![start],
        edges: Vec::new(),
    };
    while p.edges.len() < len {
        let tip = *p.vertices.last().unwrap();
        let options: Vec<(usize, usize)> = g
            .neighbors(tip)
            .iter()
            .copied()
            .filter(|(v, _)| !p.vertices.contains(v))
            .collect();
        let &(v, e) = options.choose(rng)?;
        p.vertices.push(v);
        p.edges.push(e);
    }
    Some(p)
}

/// Labels on a simple path checked on the lift of the two instances induced
/// by the path, as a partial isomorphism on every element of every path vertex.
pub fn verify_on_lift(g: &MultiGraph, ed: &EdgeData, p: &Path, labels: &[Gf2Vector]) -> bool {
    let m = ed.m();
    let names: Vec<String> = p.vertices.iter().map(|&v| g.name(v).to_string()).collect();
    let edges: Vec<(usize, usize)> = (0..p.len()).map(|i| (i, i + 1)).collect();
    let u1: Vec<Vec<Gf2Vector>> = p.edges.iter().map(|&e| ed.z(e).elements()).collect();
    let u2: Vec<Vec<Gf2Vector>> = p
        .edges
        .iter()
        .map(|&e| {
            ed.z(e)
                .elements()
                .into_iter()
                .map(|z| z + ed.b(e))
                .collect()
        })
        .collect();
    let a = lift(
        &GroupUgInstance::new(
            m,
            MultiGraph::from_indices(names.clone(), edges.clone()),
            u1,
        )
        .unwrap(),
    )
    .unwrap();
    let b =
        lift(&GroupUgInstance::new(m, MultiGraph::from_indices(names.clone(), edges), u2).unwrap())
            .unwrap();
    let (va, vb) = (a.relational_view(), b.relational_view());
    let mut pairs = Vec::new();
    for (name, shift) in names.iter().zip(labels) {
        for g in Gf2Vector::all(m) {
            let x = va.element(&lifted_name(name, &g)).unwrap();
            let y = vb.element(&lifted_name(name, &(g + *shift))).unwrap();
            pairs.push((x, y));
        }
    }
    check_partial_isomorphism(&va, &vb, &pairs).is_ok()
}

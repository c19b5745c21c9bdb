mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ug_core::construction::{
    approx_gap_params, classify_good_edges, extend_along_path, lemma53_gap, sample_edge_data,
    EdgeData,
};
use ug_core::gf2::{rref_basis, sample_subspace, Gf2Subspace, Gf2Vector};
use ug_core::graph::{preset, steiner_tree, steiner_tree_rooted, MultiGraph};
use ug_core::solver::{exact_opt, is_completely_satisfiable};

use common::{brute_force_opt, chi_square, random_instance, random_simple_path, verify_on_lift};

// 34 and 7 degrees of freedom at p = 0.001
const CHI2_34: f64 = 65.25;
const CHI2_7: f64 = 24.32;

#[test]
fn planes_in_f2_4_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    for _ in 0..35_000 {
        *counts
            .entry(sample_subspace(4, 2, &mut rng).unwrap().to_bitstrings())
            .or_default() += 1;
    }
    assert_eq!(counts.len(), 35);
    let stat = chi_square(&counts.values().copied().collect::<Vec<_>>());
    assert!(stat < CHI2_34, "chi-square {stat}");
}

#[test]
fn shifts_are_uniform() {
    let g = preset("K3").unwrap();
    let mut counts = [0u64; 8];
    for seed in 0..3334 {
        let ed = sample_edge_data(&g, 3, 1, seed).unwrap();
        for e in 0..3 {
            counts[ed.b(e).word() as usize] += 1;
        }
    }
    let stat = chi_square(&counts);
    assert!(stat < CHI2_7, "chi-square {stat}");
}

fn connects(g: &MultiGraph, edges: &[usize], terminals: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &e in edges {
        let (a, b) = g.edge(e);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, terminals[0]);
    terminals.iter().all(|&t| find(&mut parent, t) == root)
}

/// Fewest edges connecting the terminals, by subset enumeration.
fn brute_force_steiner(g: &MultiGraph, terminals: &[usize]) -> usize {
    let m = g.edge_count();
    (0u32..1 << m)
        .filter(|mask| {
            let edges: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
            connects(g, &edges, terminals)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn steiner_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["K4", "Petersen"] {
        let g = preset(name).unwrap();
        for _ in 0..15 {
            let t = rng.gen_range(2..=5.min(g.vertex_count()));
            let mut vs: Vec<usize> = (0..g.vertex_count()).collect();
            vs.shuffle(&mut rng);
            let terminals = &vs[..t];
            let best = brute_force_steiner(&g, terminals);
            let plain = steiner_tree(&g, terminals).unwrap();
            assert!(plain.is_valid_tree(&g));
            assert_eq!(plain.edge_count(), best, "{name} {terminals:?}");
            for &root in terminals {
                let rooted = steiner_tree_rooted(&g, terminals, root).unwrap();
                assert!(rooted.is_valid_tree(&g));
                assert!(terminals.iter().all(|v| rooted.vertices.contains(v)));
                assert_eq!(rooted.edge_count(), best);
            }
        }
    }
}

/// Good edges re-derived with an independent walk enumeration.
fn naive_good(g: &MultiGraph, ed: &EdgeData, r: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    fn all_span(
        adj: &[Vec<(usize, usize)>],
        ed: &EdgeData,
        at: usize,
        used: &mut Vec<usize>,
        r: usize,
    ) -> bool {
        if used.len() == r {
            let basis: Vec<Gf2Vector> = used
                .iter()
                .flat_map(|&e| ed.z(e).basis().to_vec())
                .collect();
            return rref_basis(&basis, ed.m()).unwrap().is_full();
        }
        for &(next, e) in &adj[at] {
            if used.contains(&e) {
                continue;
            }
            used.push(e);
            let ok = all_span(adj, ed, next, used, r);
            used.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    (0..g.edge_count())
        .filter(|&e| {
            let (a, b) = g.edge(e);
            [a, b]
                .into_iter()
                .all(|tip| all_span(&adj, ed, tip, &mut vec![e], r))
        })
        .collect()
}

#[test]
fn good_edges_match_a_second_enumeration() {
    for name in ["K4", "Petersen", "Heawood"] {
        let g = preset(name).unwrap();
        for (m, ell) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            for r in 1..=4 {
                for seed in 0..3 {
                    let ed = sample_edge_data(&g, m, ell, seed).unwrap();
                    let c = classify_good_edges(&g, &ed, r).unwrap();
                    assert_eq!(
                        c.good,
                        naive_good(&g, &ed, r),
                        "{name} m={m} ℓ={ell} r={r} seed={seed}"
                    );
                }
            }
        }
    }
}

#[test]
fn path_extension_is_a_partial_isomorphism_on_the_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let g = preset("Heawood").unwrap();
    let mut checked = 0;
    let mut seed = 0;
    while checked < 100 {
        seed += 1;
        let m = rng.gen_range(2..=4);
        let ell = rng.gen_range(1..=2.min(m - 1));
        let ed = sample_edge_data(&g, m, ell, seed).unwrap();
        let len = rng.gen_range(1..=6);
        let Some(p) = random_simple_path(&g, len, &mut rng) else {
            continue;
        };
        let span = p
            .edges
            .iter()
            .fold(Gf2Subspace::zero(m), |s, &e| s.join(ed.z(e)).unwrap());
        if !span.is_full() {
            continue;
        }
        let (gs, ge) = (
            Gf2Vector::random(m, &mut rng),
            Gf2Vector::random(m, &mut rng),
        );
        let labels = extend_along_path(&p, &ed, gs, ge).unwrap();
        assert_eq!((labels[0], *labels.last().unwrap()), (gs, ge));
        assert!(
            verify_on_lift(&g, &ed, &p, &labels),
            "seed {seed} path {p:?}"
        );
        checked += 1;
    }
}

#[test]
fn exact_opt_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=(12 / m).min(5));
        let u = random_instance(&mut rng, m, n, 6);
        assert_eq!(exact_opt(&u).unwrap().optimum, brute_force_opt(&u));
    }
}

#[test]
fn satisfiability_agrees_with_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=(20 / m).min(6));
        let u = random_instance(&mut rng, m, n, 8);
        let full = exact_opt(&u).unwrap().optimum == 1.into();
        assert_eq!(is_completely_satisfiable(&u).is_satisfiable(), full);
    }
}

#[test]
fn lemma53_gap_is_nonnegative_on_the_grid() {
    let zero = BigRational::from_integer(BigInt::from(0));
    let mut least = None::<BigRational>;
    for d in 3..=10 {
        for n in 1..=12 {
            let gap = lemma53_gap(d, n).unwrap();
            assert!(gap >= zero, "d={d} n={n}");
            least = Some(least.map_or(gap.clone(), |l| l.min(gap)));
        }
    }
    assert_eq!(least, Some(zero));
}

#[test]
fn gap_params_table() {
    let rat = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let table = [
        (rat(1, 1), 2, rat(4, 5), 1, rat(4, 3)),
        (rat(1, 2), 3, rat(4, 9), 2, rat(4, 5)),
        (rat(1, 4), 4, rat(4, 17), 2, rat(4, 5)),
        (rat(1, 10), 6, rat(4, 65), 3, rat(4, 9)),
        (rat(3, 4), 3, rat(4, 9), 2, rat(4, 5)),
    ];
    for (alpha, ell, ratio, closed, closed_ratio) in table {
        let p = approx_gap_params(&alpha).unwrap();
        assert_eq!(
            (p.ell, &p.ratio, p.ell_closed_form, &p.ratio_at_closed_form),
            (ell, &ratio, closed, &closed_ratio)
        );
        assert!(p.s <= &p.c * &alpha);
        assert_eq!(p.c, rat(1, 1 << ell));
    }
    let all: BTreeSet<u32> = (1..=64)
        .map(|d| approx_gap_params(&rat(1, d)).unwrap().ell)
        .collect();
    assert!(all.iter().all(|&l| l >= 2));
}

use super::{GraphError, MultiGraph};

pub const PRESET_NAMES: [&str; 6] = ["K3", "K4", "Petersen", "Heawood", "McGee", "TutteCoxeter"];

/// Names `v1..vn`, zero-padded so that name order equals numeric order.
fn numbered(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("v{i:0width$}")).collect()
}

fn complete(n: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    MultiGraph::from_indices(numbered(n), edges)
}

/// Cubic Hamiltonian graph from LCF notation `shifts^repeats`.
fn lcf(shifts: &[i64], repeats: usize) -> MultiGraph {
    let n = shifts.len() * repeats;
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..n {
        let j = (i as i64 + shifts[i % shifts.len()]).rem_euclid(n as i64) as usize;
        if i < j {
            edges.push((i, j));
        }
    }
    MultiGraph::from_indices(numbered(n), edges)
}

fn petersen() -> MultiGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    MultiGraph::from_indices(numbered(10), edges)
}

/// A named small graph: complete graphs K3 and K4, or one of the cubic cages
/// Petersen (girth 5), Heawood (6), McGee (7), Tutte–Coxeter (8).
pub fn preset(name: &str) -> Result<MultiGraph, GraphError> {
    let g = match name {
        "K3" => complete(3),
        "K4" => complete(4),
        "Petersen" => petersen(),
        "Heawood" => lcf(&[5, -5], 7),
        "McGee" => lcf(&[12, 7, -7], 8),
        "TutteCoxeter" => lcf(&[-13, -9, 7, -7, 9, 13], 5),
        _ => return Err(GraphError::UnknownPreset(name.to_string())),
    };
    Ok(g.canonicalize().0)
}

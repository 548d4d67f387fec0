//! Oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use cqnn::circuit::{BlockTag, ParamCircuit, PlacedGate};
use cqnn::data::{ingest_csv, AssetData, PipelineConfig};
use cqnn::simulator::{Control, GateKind, GateOp, Statevector};
use num_complex::Complex64;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn bundled(name: &str, cfg: &PipelineConfig) -> AssetData {
    AssetData::from_prices(&ingest_csv(data_path(name)).unwrap(), cfg).unwrap()
}

// ---------------------------------------------------------------------------
// Dense matrix oracle. Qubit 0 is the leftmost Kronecker factor.

pub type Mat = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Mat {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn add(a: &Mat, b: &Mat, scale: Complex64) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + scale * y).collect())
        .collect()
}

fn pauli(name: char) -> Mat {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match name {
        'I' => vec![vec![l, o], vec![o, l]],
        'X' => vec![vec![o, l], vec![l, o]],
        'Y' => vec![vec![o, -i], vec![i, o]],
        'Z' => vec![vec![l, o], vec![o, -l]],
        _ => unreachable!(),
    }
}

/// cos(t/2) I - i sin(t/2) P.
fn rotation(p: char, theta: f64) -> Mat {
    let (s, co) = (theta / 2.0).sin_cos();
    add(&add(&pauli('I'), &pauli('I'), c(co - 1.0, 0.0)), &pauli(p), c(0.0, -s))
}

fn single(kind: GateKind, theta: f64) -> Mat {
    match kind {
        GateKind::Rx => rotation('X', theta),
        GateKind::Ry => rotation('Y', theta),
        GateKind::Rz => rotation('Z', theta),
        GateKind::X | GateKind::Cnot | GateKind::Ccnot => pauli('X'),
        GateKind::H => {
            let h = add(&pauli('X'), &pauli('Z'), c(1.0, 0.0));
            h.iter().map(|r| r.iter().map(|x| x / 2f64.sqrt()).collect()).collect()
        }
        GateKind::Swap => unreachable!(),
    }
}

/// Kronecker product over all qubits of `factor(q)`.
fn product(n: usize, factor: impl Fn(usize) -> Mat) -> Mat {
    (1..n).fold(factor(0), |acc, q| kron(&acc, &factor(q)))
}

fn projector(polarity: bool) -> Mat {
    let z = pauli('Z');
    // (I -/+ Z) / 2
    let sign = if polarity { -1.0 } else { 1.0 };
    add(&pauli('I'), &z, c(sign, 0.0))
        .iter()
        .map(|r| r.iter().map(|x| x / 2.0).collect())
        .collect()
}

/// Full-register matrix of one gate: `I + P_controls (x) (G - I)`, with
/// `G - I` expanded into Kronecker terms.
pub fn gate_matrix(n: usize, op: &GateOp, theta: f64) -> Mat {
    let ctrl = |q: usize| op.controls.iter().find(|c| c.qubit == q).map(|c| projector(c.polarity));
    let terms: Vec<Vec<(usize, Mat)>> = match op.kind {
        GateKind::Swap => {
            // SWAP - I = (XX + YY + ZZ - II) / 2
            let b = op.partner.unwrap();
            let mut t: Vec<Vec<(usize, Mat)>> = ['X', 'Y', 'Z']
                .iter()
                .map(|&p| vec![(op.target, pauli(p)), (b, scaled(&pauli(p), 0.5))])
                .collect();
            t.push(vec![(op.target, pauli('I')), (b, scaled(&pauli('I'), -0.5))]);
            t
        }
        k => vec![vec![(op.target, add(&single(k, theta), &pauli('I'), c(-1.0, 0.0)))]],
    };
    let mut m = identity(1 << n);
    for term in terms {
        let piece = product(n, |q| {
            if let Some((_, f)) = term.iter().find(|(t, _)| *t == q) {
                f.clone()
            } else {
                ctrl(q).unwrap_or_else(|| pauli('I'))
            }
        });
        m = add(&m, &piece, c(1.0, 0.0));
    }
    m
}

fn scaled(m: &Mat, s: f64) -> Mat {
    m.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn circuit_matrix(circuit: &ParamCircuit, params: &[f64]) -> Mat {
    let n = circuit.n_qubits();
    circuit.gates().iter().fold(identity(1 << n), |acc, g| {
        let theta = g.op.param_slot.map(|s| params[s]).unwrap_or(0.0);
        matmul(&gate_matrix(n, &g.op, theta), &acc)
    })
}

pub fn matvec(m: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

// ---------------------------------------------------------------------------
// Random instances.

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Statevector {
    let amps = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Statevector::normalized(amps).unwrap()
}

const KINDS: [GateKind; 8] = [
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::X,
    GateKind::H,
    GateKind::Cnot,
    GateKind::Ccnot,
    GateKind::Swap,
];

/// Random gate on `n` qubits. With `controlled_rotations == false`,
/// rotations never carry controls (as the parameter-shift rule requires).
pub fn random_gate<R: Rng>(n: usize, slot: &mut usize, controlled_rotations: bool, rng: &mut R) -> Option<GateOp> {
    let kind = KINDS[rng.random_range(0..KINDS.len())];
    let mut wires: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        wires.swap(i, rng.random_range(0..=i));
    }
    let target = wires[0];
    let mut free = wires[1..].to_vec();
    let mut op = match kind {
        GateKind::Rx | GateKind::Ry | GateKind::Rz => {
            *slot += 1;
            match kind {
                GateKind::Rx => GateOp::rx(target, *slot - 1),
                GateKind::Ry => GateOp::ry(target, *slot - 1),
                _ => GateOp::rz(target, *slot - 1),
            }
        }
        GateKind::X => GateOp::x(target),
        GateKind::H => GateOp::h(target),
        GateKind::Swap => GateOp::swap(target, free.pop()?),
        GateKind::Cnot => GateOp::cnot(free.pop()?, target),
        GateKind::Ccnot => {
            let (a, b) = (free.pop()?, free.pop()?);
            GateOp::ccnot(a, b, target)
        }
    };
    let polarity_flip = |op: &mut GateOp, rng: &mut R| {
        for c in op.controls.iter_mut() {
            c.polarity = rng.random();
        }
    };
    polarity_flip(&mut op, rng);
    if !kind.is_rotation() || controlled_rotations {
        let extra = rng.random_range(0..=free.len().min(2));
        for _ in 0..extra {
            let q = free.pop().unwrap();
            op = op.with_control(Control { qubit: q, polarity: rng.random() });
        }
    }
    Some(op)
}

pub fn random_circuit<R: Rng>(n: usize, gates: usize, controlled_rotations: bool, rng: &mut R) -> ParamCircuit {
    let mut slot = 0;
    let mut placed = Vec::new();
    while placed.len() < gates {
        if let Some(op) = random_gate(n, &mut slot, controlled_rotations, rng) {
            placed.push(PlacedGate { op, layer: 1, block_tag: BlockTag::Shared });
        }
    }
    ParamCircuit::new(n, slot, placed).unwrap()
}

pub fn random_params<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

// ---------------------------------------------------------------------------
// Statistics.

/// Ranks with ties sharing their average rank.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation: Pearson correlation of the ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

//! Shared test oracles, independent of the implementation paths they check:
//! a dense Kronecker-product construction of circuit unitaries, a
//! finite-difference gradient checker, a brute-force pairwise-concordance
//! AUC, and an independent re-implementation of the hybrid forward chain.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)] // index arithmetic is the point in the dense oracles

use num_complex::Complex64;
use vqsafe_core::matrix::Matrix;

pub type CMat = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![c(0.0, 0.0); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            let aik = a[i][k];
            for j in 0..cols {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(&m, &x)| m * x).sum())
        .collect()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for ia in 0..ra {
        for ja in 0..ca {
            for ib in 0..rb {
                for jb in 0..cb {
                    out[ia * rb + ib][ja * cb + jb] = a[ia][ja] * b[ib][jb];
                }
            }
        }
    }
    out
}

pub fn rz(theta: f64) -> CMat {
    vec![
        vec![c((theta / 2.0).cos(), -(theta / 2.0).sin()), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c((theta / 2.0).cos(), (theta / 2.0).sin())],
    ]
}

pub fn ry(theta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]]
}

/// R(α, β, γ) assembled by explicit matrix multiplication RZ(γ)·RY(β)·RZ(α).
pub fn rotation_dense(alpha: f64, beta: f64, gamma: f64) -> CMat {
    mat_mul(&rz(gamma), &mat_mul(&ry(beta), &rz(alpha)))
}

/// Lift a 2×2 gate onto one qubit of an n-qubit register, with qubit 0 as the
/// leftmost (most significant) tensor factor.
pub fn single_qubit_unitary(n: usize, qubit: usize, gate: &CMat) -> CMat {
    let mut m = identity(1 << qubit);
    m = kron(&m, gate);
    kron(&m, &identity(1 << (n - 1 - qubit)))
}

/// Dense CNOT permutation built directly from the basis-state truth table.
pub fn cnot_dense(n: usize, control: usize, target: usize) -> CMat {
    let dim = 1usize << n;
    let cbit = 1usize << (n - 1 - control);
    let tbit = 1usize << (n - 1 - target);
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let row = if col & cbit != 0 { col ^ tbit } else { col };
        m[row][col] = c(1.0, 0.0);
    }
    m
}

/// Full unitary of one strongly entangling layer: rotations on every qubit
/// then the CNOT ring, composed as dense matrices.
pub fn layer_unitary(n: usize, angles: &[f64], entangler_range: usize) -> CMat {
    assert_eq!(angles.len(), n * 3);
    let mut u = identity(1 << n);
    for qubit in 0..n {
        let gate = rotation_dense(angles[qubit * 3], angles[qubit * 3 + 1], angles[qubit * 3 + 2]);
        u = mat_mul(&single_qubit_unitary(n, qubit, &gate), &u);
    }
    if n > 1 {
        for i in 0..n {
            u = mat_mul(&cnot_dense(n, i, (i + entangler_range) % n), &u);
        }
    }
    u
}

pub fn complex_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn complex_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Relative-with-floor gradient comparison: |a - fd| must not exceed
/// atol + rtol·max(|a|, |fd|).
pub fn grad_close(analytic: f64, fd: f64, rtol: f64, atol: f64) -> bool {
    (analytic - fd).abs() <= atol + rtol * analytic.abs().max(fd.abs())
}

/// Pairwise-concordance AUC with ties counted 1/2, by brute force over all
/// positive/negative pairs.
pub fn pairwise_auc(labels: &[f64], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1.0 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != 0.0 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Independent evaluation of the hybrid forward chain: dense pre-layer and
/// GELU, explicit normalization, dense layer unitary, probability-weighted
/// ±1 sums for ⟨Z⟩, then an unshifted softmax.
pub fn hybrid_forward_oracle(
    pre_w: &Matrix,
    pre_b: &[f64],
    angles: &[f64],
    entangler_range: usize,
    head_w: &Matrix,
    head_b: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let m = pre_w.rows();
    let n = {
        let mut q = 0;
        while (1 << q) < m {
            q += 1;
        }
        q.max(1)
    };
    assert_eq!(1 << n, m);

    let mut h = vec![0.0; m];
    for (j, hj) in h.iter_mut().enumerate() {
        let mut acc = pre_b[j];
        for (k, &xk) in x.iter().enumerate() {
            acc += pre_w.get(j, k) * xk;
        }
        let u = acc;
        let t = ((2.0 / std::f64::consts::PI).sqrt() * (u + 0.044715 * u.powi(3))).tanh();
        *hj = 0.5 * u * (1.0 + t);
    }

    let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    let encoded: Vec<Complex64> = h.iter().map(|&v| c(v / norm, 0.0)).collect();
    let u_dense = layer_unitary(n, angles, entangler_range);
    let out = mat_vec(&u_dense, &encoded);

    let mut q = vec![0.0; n];
    for (k, amp) in out.iter().enumerate() {
        let p = amp.norm_sqr();
        for (i, qi) in q.iter_mut().enumerate() {
            if (k >> (n - 1 - i)) & 1 == 0 {
                *qi += p;
            } else {
                *qi -= p;
            }
        }
    }

    let n_classes = head_w.rows();
    let mut logits = vec![0.0; n_classes];
    for (cidx, l) in logits.iter_mut().enumerate() {
        let mut acc = head_b[cidx];
        for (i, &qi) in q.iter().enumerate() {
            acc += head_w.get(cidx, i) * qi;
        }
        *l = acc;
    }
    let exps: Vec<f64> = logits.iter().map(|&l| l.exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

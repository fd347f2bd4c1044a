//! Dense statevector simulator with exact reverse-mode gradients.
//!
//! Conventions, fixed once and referenced by every test:
//!
//! * qubit 0 maps to the **most significant bit** of the basis index, so for
//!   two qubits the amplitudes are ordered |00⟩, |01⟩, |10⟩, |11⟩ with the
//!   left bit belonging to qubit 0;
//! * the per-qubit rotation is `R(α, β, γ) = RZ(γ)·RY(β)·RZ(α)` with
//!   `RZ(θ) = diag(e^{-iθ/2}, e^{+iθ/2})` and
//!   `RY(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`;
//! * one strongly entangling layer applies the rotation to every qubit and
//!   then `CNOT(i, (i + range) mod n)` for ascending `i`, a ring for the
//!   default range of 1.
//!
//! Gradients are computed by backpropagating cotangents through the simulated
//! amplitudes rather than by parameter-shift rules: the adjoint of each gate
//! is applied to the cotangent, so the unitary part of the circuit leaves the
//! cotangent norm unchanged.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Threshold below which an encoding input is treated as the zero vector.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-30;

/// Pure n-qubit state: 2^n complex amplitudes with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state |0...0⟩.
    pub fn zero_state(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "state needs at least one qubit");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amplitudes }
    }

    /// Wrap amplitudes that are already normalized.
    ///
    /// Panics if the length is not 2^n or the norm is off by more than 1e-10;
    /// both indicate a programming error, not a data error.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        assert!(n_qubits > 0, "state needs at least one qubit");
        assert_eq!(amplitudes.len(), 1 << n_qubits, "amplitude count must be 2^n");
        let state = StateVector { n_qubits, amplitudes };
        assert!(
            (state.norm() - 1.0).abs() <= 1e-10,
            "amplitudes must have unit norm"
        );
        state
    }

    pub(crate) fn from_normalized_unchecked(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        StateVector { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Euclidean norm √(Σ|a_k|²).
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }
}

/// Per-qubit rotation angles (α, β, γ), stored row-major as an n×3 table.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationParams {
    n_qubits: usize,
    angles: Vec<f64>,
}

impl RotationParams {
    pub fn new(n_qubits: usize, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != n_qubits * 3 {
            return Err(Error::ShapeMismatch { expected: n_qubits * 3, got: angles.len() });
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(RotationParams { n_qubits, angles })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        RotationParams { n_qubits, angles: vec![0.0; n_qubits * 3] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angles_mut(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    /// The (α, β, γ) triple of one qubit.
    pub fn triple(&self, qubit: usize) -> (f64, f64, f64) {
        let base = qubit * 3;
        (self.angles[base], self.angles[base + 1], self.angles[base + 2])
    }
}

/// Wiring of one entangling layer.
///
/// `entangler_range` is the CNOT target offset; the default of 1 gives the
/// ring CNOT(0,1), CNOT(1,2), ..., CNOT(n-1,0). Qubit 0 always occupies the
/// most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitLayout {
    pub n_qubits: usize,
    pub entangler_range: usize,
}

impl CircuitLayout {
    /// Range-1 CNOT ring on `n_qubits`.
    pub fn ring(n_qubits: usize) -> Self {
        CircuitLayout { n_qubits, entangler_range: 1 }
    }

    fn validate(&self) -> Result<()> {
        if self.n_qubits > 1 && (self.entangler_range == 0 || self.entangler_range >= self.n_qubits)
        {
            return Err(Error::QubitOutOfRange {
                qubit: self.entangler_range,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// CNOT pairs applied after the rotations, in order.
    fn entangler_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_qubits;
        let range = self.entangler_range;
        (0..n).filter(move |_| n > 1).map(move |i| (i, (i + range) % n))
    }
}

/// Embed a real vector as amplitudes: zero-pad to 2^n, then normalize.
///
/// ```
/// use vqsafe_core::quantum::amplitude_encode;
///
/// let state = amplitude_encode(&[3.0, 4.0], 1).unwrap();
/// assert!((state.amplitudes()[0].re - 0.6).abs() < 1e-15);
/// assert!((state.amplitudes()[1].re - 0.8).abs() < 1e-15);
/// ```
pub fn amplitude_encode(x: &[f64], n_qubits: usize) -> Result<StateVector> {
    assert!(n_qubits > 0, "encoding needs at least one qubit");
    let dim = 1usize << n_qubits;
    if x.len() > dim {
        return Err(Error::DimensionOverflow { dim: x.len(), capacity: dim });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    if norm <= ZERO_NORM_THRESHOLD {
        return Err(Error::ZeroVector);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (a, v) in amplitudes.iter_mut().zip(x) {
        *a = Complex64::new(v / norm, 0.0);
    }
    Ok(StateVector { n_qubits, amplitudes })
}

/// 2×2 matrix of R(α, β, γ) = RZ(γ)·RY(β)·RZ(α).
pub fn rotation_matrix(alpha: f64, beta: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let c = (beta / 2.0).cos();
    let s = (beta / 2.0).sin();
    let sum = (alpha + gamma) / 2.0;
    let diff = (alpha - gamma) / 2.0;
    let e_msum = Complex64::new(sum.cos(), -sum.sin());
    let e_psum = Complex64::new(sum.cos(), sum.sin());
    let e_pdiff = Complex64::new(diff.cos(), diff.sin());
    let e_mdiff = Complex64::new(diff.cos(), -diff.sin());
    [[e_msum * c, e_pdiff * (-s)], [e_mdiff * s, e_psum * c]]
}

/// Partial derivatives of [`rotation_matrix`] with respect to (α, β, γ).
fn rotation_matrix_grads(alpha: f64, beta: f64, gamma: f64) -> [[[Complex64; 2]; 2]; 3] {
    let m = rotation_matrix(alpha, beta, gamma);
    let c = (beta / 2.0).cos();
    let s = (beta / 2.0).sin();
    let sum = (alpha + gamma) / 2.0;
    let diff = (alpha - gamma) / 2.0;
    let e_msum = Complex64::new(sum.cos(), -sum.sin());
    let e_psum = Complex64::new(sum.cos(), sum.sin());
    let e_pdiff = Complex64::new(diff.cos(), diff.sin());
    let e_mdiff = Complex64::new(diff.cos(), -diff.sin());
    let half_i = Complex64::new(0.0, 0.5);

    let d_alpha = [
        [-half_i * m[0][0], half_i * m[0][1]],
        [-half_i * m[1][0], half_i * m[1][1]],
    ];
    let d_beta = [
        [e_msum * (-s / 2.0), e_pdiff * (-c / 2.0)],
        [e_mdiff * (c / 2.0), e_psum * (-s / 2.0)],
    ];
    let d_gamma = [
        [-half_i * m[0][0], -half_i * m[0][1]],
        [half_i * m[1][0], half_i * m[1][1]],
    ];
    [d_alpha, d_beta, d_gamma]
}

fn adjoint(m: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn check_qubit(qubit: usize, n_qubits: usize) -> Result<()> {
    if qubit >= n_qubits {
        return Err(Error::QubitOutOfRange { qubit, n_qubits });
    }
    Ok(())
}

/// Apply a 2×2 gate to one qubit of the amplitude buffer.
fn apply_one_qubit_gate(amps: &mut [Complex64], n_qubits: usize, qubit: usize, m: &[[Complex64; 2]; 2]) {
    let stride = 1usize << (n_qubits - 1 - qubit);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for k0 in base..base + stride {
            let k1 = k0 + stride;
            let a0 = amps[k0];
            let a1 = amps[k1];
            amps[k0] = m[0][0] * a0 + m[0][1] * a1;
            amps[k1] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

fn apply_cnot_in_place(amps: &mut [Complex64], n_qubits: usize, control: usize, target: usize) {
    let control_bit = 1usize << (n_qubits - 1 - control);
    let target_bit = 1usize << (n_qubits - 1 - target);
    for k in 0..amps.len() {
        if k & control_bit != 0 && k & target_bit == 0 {
            amps.swap(k, k | target_bit);
        }
    }
}

/// Apply R(α, β, γ) to one qubit.
pub fn apply_rotation(
    state: &StateVector,
    qubit: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<StateVector> {
    check_qubit(qubit, state.n_qubits)?;
    let m = rotation_matrix(alpha, beta, gamma);
    let mut amps = state.amplitudes.clone();
    apply_one_qubit_gate(&mut amps, state.n_qubits, qubit, &m);
    Ok(StateVector { n_qubits: state.n_qubits, amplitudes: amps })
}

/// Flip the target bit of every basis state whose control bit is set.
pub fn apply_cnot(state: &StateVector, control: usize, target: usize) -> Result<StateVector> {
    check_qubit(control, state.n_qubits)?;
    check_qubit(target, state.n_qubits)?;
    if control == target {
        return Err(Error::ControlEqualsTarget { qubit: control });
    }
    let mut amps = state.amplitudes.clone();
    apply_cnot_in_place(&mut amps, state.n_qubits, control, target);
    Ok(StateVector { n_qubits: state.n_qubits, amplitudes: amps })
}

/// One strongly entangling layer: rotate every qubit, then the CNOT ring.
pub fn strongly_entangling_layer(
    state: &StateVector,
    params: &RotationParams,
    layout: &CircuitLayout,
) -> Result<StateVector> {
    if params.n_qubits != state.n_qubits || layout.n_qubits != state.n_qubits {
        return Err(Error::ShapeMismatch { expected: state.n_qubits, got: params.n_qubits });
    }
    layout.validate()?;
    let n = state.n_qubits;
    let mut amps = state.amplitudes.clone();
    for qubit in 0..n {
        let (alpha, beta, gamma) = params.triple(qubit);
        let m = rotation_matrix(alpha, beta, gamma);
        apply_one_qubit_gate(&mut amps, n, qubit, &m);
    }
    for (control, target) in layout.entangler_pairs() {
        apply_cnot_in_place(&mut amps, n, control, target);
    }
    Ok(StateVector { n_qubits: n, amplitudes: amps })
}

/// ⟨Z_i⟩ for every qubit: Σ_k |a_k|²·(-1)^{bit_i(k)}, each in [-1, 1].
pub fn pauli_z_expectations(state: &StateVector) -> Vec<f64> {
    let n = state.n_qubits;
    let mut out = vec![0.0; n];
    for (k, amp) in state.amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        for (i, o) in out.iter_mut().enumerate() {
            if (k >> (n - 1 - i)) & 1 == 0 {
                *o += p;
            } else {
                *o -= p;
            }
        }
    }
    out
}

/// Forward activations of encode → layer → readout, kept for the backward
/// pass.
#[derive(Debug, Clone)]
pub struct CircuitCache {
    input_len: usize,
    /// Zero-padded raw input, before normalization.
    padded: Vec<f64>,
    /// Norm of the raw input.
    norm: f64,
    /// states[0] is the encoded state, followed by the state after each
    /// rotation and after each CNOT.
    states: Vec<Vec<Complex64>>,
    expectations: Vec<f64>,
}

impl CircuitCache {
    pub fn expectations(&self) -> &[f64] {
        &self.expectations
    }

    pub fn output_state(&self) -> StateVector {
        StateVector::from_normalized_unchecked(
            self.expectations.len(),
            self.states.last().expect("cache holds at least the encoded state").clone(),
        )
    }
}

/// Gradients of the encode → layer → readout map.
#[derive(Debug, Clone)]
pub struct CircuitGradients {
    /// ∂L/∂x for the raw (un-padded) input.
    pub input: Vec<f64>,
    /// ∂L/∂angles, n×3 row-major to match [`RotationParams::angles`].
    pub angles: Vec<f64>,
}

/// Run encoding, one entangling layer and the Pauli-Z readout, caching every
/// intermediate state.
pub fn circuit_forward(
    input: &[f64],
    params: &RotationParams,
    layout: &CircuitLayout,
) -> Result<CircuitCache> {
    let n = layout.n_qubits;
    if params.n_qubits != n {
        return Err(Error::ShapeMismatch { expected: n, got: params.n_qubits });
    }
    layout.validate()?;
    let encoded = amplitude_encode(input, n)?;
    let norm = input.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut padded = vec![0.0; 1 << n];
    padded[..input.len()].copy_from_slice(input);

    let mut states = Vec::with_capacity(2 * n + 1);
    states.push(encoded.amplitudes.clone());
    let mut amps = encoded.amplitudes;
    for qubit in 0..n {
        let (alpha, beta, gamma) = params.triple(qubit);
        let m = rotation_matrix(alpha, beta, gamma);
        apply_one_qubit_gate(&mut amps, n, qubit, &m);
        states.push(amps.clone());
    }
    for (control, target) in layout.entangler_pairs() {
        apply_cnot_in_place(&mut amps, n, control, target);
        states.push(amps.clone());
    }
    let out_state = StateVector::from_normalized_unchecked(n, amps);
    let expectations = pauli_z_expectations(&out_state);
    states.pop();
    states.push(out_state.amplitudes);
    Ok(CircuitCache { input_len: input.len(), padded, norm, states, expectations })
}

/// Backpropagate a readout cotangent through a cached forward pass.
pub fn circuit_backward_cached(
    cache: &CircuitCache,
    params: &RotationParams,
    layout: &CircuitLayout,
    upstream: &[f64],
) -> CircuitGradients {
    let n = layout.n_qubits;
    debug_assert_eq!(upstream.len(), n);
    let dim = 1usize << n;

    // Readout: q_i = Σ_k |ψ_k|² s_ik, so the cotangent on ψ is 2·w_k·ψ_k
    // with w_k = Σ_i g_i·s_ik.
    let out_amps = cache.states.last().expect("cache holds states");
    let mut cotangent = vec![Complex64::new(0.0, 0.0); dim];
    for (k, c) in cotangent.iter_mut().enumerate() {
        let mut w = 0.0;
        for (i, g) in upstream.iter().enumerate() {
            if (k >> (n - 1 - i)) & 1 == 0 {
                w += g;
            } else {
                w -= g;
            }
        }
        *c = out_amps[k] * (2.0 * w);
    }

    // CNOTs in reverse; a CNOT is its own adjoint.
    let pairs: Vec<(usize, usize)> = layout.entangler_pairs().collect();
    for &(control, target) in pairs.iter().rev() {
        apply_cnot_in_place(&mut cotangent, n, control, target);
    }

    // Rotations in reverse: extract the angle gradients against the state
    // entering the gate, then transport the cotangent through the adjoint.
    let mut grad_angles = vec![0.0; n * 3];
    for qubit in (0..n).rev() {
        let (alpha, beta, gamma) = params.triple(qubit);
        let before = &cache.states[qubit];
        let grads = rotation_matrix_grads(alpha, beta, gamma);
        let stride = 1usize << (n - 1 - qubit);
        for (a, dm) in grads.iter().enumerate() {
            let mut acc = 0.0;
            let mut base = 0;
            while base < dim {
                for k0 in base..base + stride {
                    let k1 = k0 + stride;
                    let t0 = dm[0][0] * before[k0] + dm[0][1] * before[k1];
                    let t1 = dm[1][0] * before[k0] + dm[1][1] * before[k1];
                    acc += (cotangent[k0].conj() * t0 + cotangent[k1].conj() * t1).re;
                }
                base += 2 * stride;
            }
            grad_angles[qubit * 3 + a] = acc;
        }
        let m = rotation_matrix(alpha, beta, gamma);
        apply_one_qubit_gate(&mut cotangent, n, qubit, &adjoint(&m));
    }

    // Normalization a = v/r: only the real part of the cotangent couples to
    // the real input, grad_v = (Re(c) - (Re(c)·a)·a)/r.
    let r = cache.norm;
    let mut dot = 0.0;
    for (c, v) in cotangent.iter().zip(&cache.padded) {
        dot += c.re * (v / r);
    }
    let mut grad_input = vec![0.0; cache.input_len];
    for (j, g) in grad_input.iter_mut().enumerate() {
        let a_j = cache.padded[j] / r;
        *g = (cotangent[j].re - dot * a_j) / r;
    }

    CircuitGradients { input: grad_input, angles: grad_angles }
}

/// Exact reverse-mode derivatives of the composite map input ↦ ⟨Z⟩ vector.
///
/// Runs the forward pass internally; use [`circuit_forward`] +
/// [`circuit_backward_cached`] when the activations are already available.
pub fn circuit_backward(
    input: &[f64],
    params: &RotationParams,
    layout: &CircuitLayout,
    upstream: &[f64],
) -> Result<CircuitGradients> {
    if upstream.len() != layout.n_qubits {
        return Err(Error::ShapeMismatch { expected: layout.n_qubits, got: upstream.len() });
    }
    let cache = circuit_forward(input, params, layout)?;
    Ok(circuit_backward_cached(&cache, params, layout, upstream))
}

/// Transport a cotangent through the adjoint of the unitary layer only
/// (rotations and CNOTs, no encoding or readout). Being a product of
/// adjoint unitaries, this leaves the cotangent norm unchanged.
pub fn adjoint_transport(
    cotangent: &[Complex64],
    params: &RotationParams,
    layout: &CircuitLayout,
) -> Result<Vec<Complex64>> {
    let n = layout.n_qubits;
    if params.n_qubits != n {
        return Err(Error::ShapeMismatch { expected: n, got: params.n_qubits });
    }
    if cotangent.len() != 1 << n {
        return Err(Error::ShapeMismatch { expected: 1 << n, got: cotangent.len() });
    }
    layout.validate()?;
    let mut c = cotangent.to_vec();
    let pairs: Vec<(usize, usize)> = layout.entangler_pairs().collect();
    for &(control, target) in pairs.iter().rev() {
        apply_cnot_in_place(&mut c, n, control, target);
    }
    for qubit in (0..n).rev() {
        let (alpha, beta, gamma) = params.triple(qubit);
        let m = rotation_matrix(alpha, beta, gamma);
        apply_one_qubit_gate(&mut c, n, qubit, &adjoint(&m));
    }
    Ok(c)
}

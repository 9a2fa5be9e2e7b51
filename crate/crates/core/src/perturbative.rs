//! Closed-form Bloch-Siegert (weak coupling) and adiabatic (deep-strong
//! coupling) spectra and eigenstates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{basis_index, JointState, ModelParams, Parity, Qubit, Truncation};
use crate::special::{displacement_element, laguerre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// A Bloch-Siegert level: the ground state or branch `+`/`-` of the doublet
/// spanned by `{|e, n-1>, |g, n>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BsLabel {
    n: u32,
    branch: Option<Branch>,
}

impl BsLabel {
    pub fn ground() -> Self {
        Self { n: 0, branch: None }
    }

    pub fn doublet(n: u32, branch: Branch) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "doublet index must be at least 1 (use BsLabel::ground)".into(),
            ));
        }
        Ok(Self {
            n,
            branch: Some(branch),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    /// Parity of the level, `(-1)^n` (ground: `+1`).
    pub fn parity(&self) -> Parity {
        Parity::of_photon_number(self.n as usize)
    }

    /// Position within its parity chain when levels are continued from
    /// `g0 = 0` (valid for `|delta| < omega`).
    pub fn chain_index(&self) -> usize {
        match self.branch {
            None => 0,
            Some(Branch::Minus) => self.n as usize - 1,
            Some(Branch::Plus) => self.n as usize,
        }
    }

    /// Inverse of [`BsLabel::chain_index`].
    pub fn from_chain(p: Parity, index: usize) -> Self {
        match p {
            Parity::Plus if index == 0 => Self::ground(),
            Parity::Plus => {
                let n = 2 * index.div_ceil(2);
                let branch = if index % 2 == 1 { Branch::Minus } else { Branch::Plus };
                Self {
                    n: n as u32,
                    branch: Some(branch),
                }
            }
            Parity::Minus => {
                let n = 2 * (index / 2) + 1;
                let branch = if index.is_multiple_of(2) {
                    Branch::Minus
                } else {
                    Branch::Plus
                };
                Self {
                    n: n as u32,
                    branch: Some(branch),
                }
            }
        }
    }
}

impl std::fmt::Display for BsLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.branch {
            None => f.write_str("0"),
            Some(b) => write!(f, "{},{}", self.n, b),
        }
    }
}

/// `Delta_n = delta + 2 omega_BS n`.
pub fn bs_detuning(params: &ModelParams, n: u32) -> f64 {
    params.detuning() + 2.0 * params.bloch_siegert_shift() * n as f64
}

/// Bloch-Siegert energy: `-Omega/2 - omega_BS` for the ground state and
/// `(n - 1/2) omega - omega_BS +- sqrt(Delta_n^2 + 4 g0^2 n) / 2` otherwise.
pub fn bs_energy(params: &ModelParams, label: BsLabel) -> f64 {
    let wbs = params.bloch_siegert_shift();
    match label.branch {
        None => -0.5 * params.omega_q() - wbs,
        Some(b) => {
            let n = label.n as f64;
            let d = bs_detuning(params, label.n);
            let g = params.g0();
            (n - 0.5) * params.omega() - wbs + b.sign() * 0.5 * (d * d + 4.0 * g * g * n).sqrt()
        }
    }
}

/// `theta_n = atan2(2 g0 sqrt(n), Delta_n)`.
pub fn bs_mixing_angle(params: &ModelParams, n: u32) -> f64 {
    (2.0 * params.g0() * (n as f64).sqrt()).atan2(bs_detuning(params, n))
}

/// Generator `S` of `U = exp(S)`,
/// `S = Lambda (a sigma_- - a^dag sigma_+) + xi (a^2 - a^dag^2) sigma_z`,
/// with `Lambda = g0 / Sigma`, `xi = g0 Lambda / (2 omega)`. Real antisymmetric.
pub fn bs_generator(params: &ModelParams, trunc: &Truncation) -> Matrix {
    let lambda = params.g0() / params.sum();
    let xi = params.g0() * lambda / (2.0 * params.omega());
    let n_max = trunc.n_max();
    let mut s = Matrix::zeros(trunc.dim());
    for n in 0..=n_max {
        // Lambda a sigma_- : |e,n> -> sqrt(n) |g,n-1>
        if n >= 1 {
            let c = lambda * (n as f64).sqrt();
            let (row, col) = (basis_index(Qubit::Ground, n - 1), basis_index(Qubit::Excited, n));
            s[(row, col)] += c;
            s[(col, row)] -= c;
        }
        // xi a^2 sigma_z : |q,n> -> sz sqrt(n(n-1)) |q,n-2>
        if n >= 2 {
            let c = xi * ((n * (n - 1)) as f64).sqrt();
            for q in [Qubit::Ground, Qubit::Excited] {
                let (row, col) = (basis_index(q, n - 2), basis_index(q, n));
                s[(row, col)] += c * q.sigma_z();
                s[(col, row)] -= c * q.sigma_z();
            }
        }
    }
    s
}

/// The bare dressed ket `|+-, n>` (or `|g, 0>`) before the transformation.
fn bs_dressed_ket(params: &ModelParams, label: BsLabel, trunc: &Truncation) -> Vec<f64> {
    let mut v = vec![0.0; trunc.dim()];
    match label.branch {
        None => v[basis_index(Qubit::Ground, 0)] = 1.0,
        Some(b) => {
            let n = label.n as usize;
            let half = 0.5 * bs_mixing_angle(params, label.n);
            let (c, s) = (half.cos(), half.sin());
            let (amp_e, amp_g) = match b {
                Branch::Plus => (c, s),
                Branch::Minus => (s, -c),
            };
            v[basis_index(Qubit::Excited, n - 1)] = amp_e;
            v[basis_index(Qubit::Ground, n)] = amp_g;
        }
    }
    v
}

/// Bloch-Siegert eigenstate `U |+-, n>` (`U |g, 0>` for the ground state),
/// with `U` exponentiated exactly inside the truncated space.
pub fn bs_eigenstate(params: &ModelParams, label: BsLabel, trunc: &Truncation) -> Result<JointState> {
    if label.n as usize + 4 > trunc.n_max() {
        return Err(Error::Truncation {
            n_max: trunc.n_max(),
            reason: format!("Bloch-Siegert state with n = {} needs n_max >= n + 4", label.n),
        });
    }
    let generator = bs_generator(params, trunc);
    let v = generator.expm_apply(&bs_dressed_ket(params, label, trunc));
    JointState::from_real(&v)
}

/// Diagonal entries of the third-order Bloch-Siegert Hamiltonian for
/// `|e, n-1>` and `|g, n>`.
fn bs3_diagonal(params: &ModelParams, q: Qubit, m: usize) -> f64 {
    let wbs = params.bloch_siegert_shift();
    let sz = q.sigma_z();
    let m = m as f64;
    params.omega() * m + 0.5 * params.omega_q() * sz + wbs * (sz * m + 0.5 * sz - 0.5)
}

/// Photon-dependent coupling `g(m) = g0 (1 - m omega_BS / (2 omega))`.
fn bs3_coupling(params: &ModelParams, m: usize) -> f64 {
    params.g0() * (1.0 - m as f64 * params.bloch_siegert_shift() / (2.0 * params.omega()))
}

/// Dense third-order Bloch-Siegert Hamiltonian in the product basis,
/// `H_BS2` with the coupling replaced by `g(n) (a^dag sigma_- + a sigma_+)`
/// (`g(n)` to the left). Not symmetric: the two coupling elements of a
/// doublet differ by the photon number `g(n)` sees.
pub fn build_bs3_hamiltonian(params: &ModelParams, trunc: &Truncation) -> Matrix {
    let n_max = trunc.n_max();
    let mut h = Matrix::zeros(trunc.dim());
    for m in 0..=n_max {
        for q in [Qubit::Ground, Qubit::Excited] {
            let i = basis_index(q, m);
            h[(i, i)] = bs3_diagonal(params, q, m);
        }
        if m < n_max {
            let root = ((m + 1) as f64).sqrt();
            // a^dag sigma_- : |e,m> -> |g,m+1>, then g(m+1)
            h[(basis_index(Qubit::Ground, m + 1), basis_index(Qubit::Excited, m))] = bs3_coupling(params, m + 1) * root;
            // a sigma_+ : |g,m+1> -> |e,m>, then g(m)
            h[(basis_index(Qubit::Excited, m), basis_index(Qubit::Ground, m + 1))] = bs3_coupling(params, m) * root;
        }
    }
    h
}

/// The 2x2 block of the third-order Hamiltonian on `{|e, n-1>, |g, n>}`.
pub fn bs3_block(params: &ModelParams, n: u32) -> [[f64; 2]; 2] {
    let n = n as usize;
    let root = (n as f64).sqrt();
    [
        [
            bs3_diagonal(params, Qubit::Excited, n - 1),
            bs3_coupling(params, n - 1) * root,
        ],
        [bs3_coupling(params, n) * root, bs3_diagonal(params, Qubit::Ground, n)],
    ]
}

/// Third-order Bloch-Siegert energy. The ground level is the decoupled
/// `|g, 0>` diagonal entry and coincides with [`bs_energy`].
pub fn bs3_energy(params: &ModelParams, label: BsLabel) -> f64 {
    match label.branch {
        None => bs3_diagonal(params, Qubit::Ground, 0),
        Some(b) => {
            let [[a, up], [down, d]] = bs3_block(params, label.n);
            let half_gap = 0.5 * ((a - d) * (a - d) + 4.0 * up * down).sqrt();
            0.5 * (a + d) + b.sign() * half_gap
        }
    }
}

/// Adiabatic energy `(n - alpha^2) omega +- (Omega/2) e^(-2 alpha^2) L_n(4 alpha^2)`.
pub fn adiabatic_energy(params: &ModelParams, n: u32, branch: Branch) -> f64 {
    let a2 = params.alpha().powi(2);
    (n as f64 - a2) * params.omega()
        + branch.sign() * 0.5 * params.omega_q() * (-2.0 * a2).exp() * laguerre(n, 4.0 * a2)
}

/// Parity of the adiabatic state `(n, branch)`: `-branch (-1)^n`.
pub fn adiabatic_parity(n: u32, branch: Branch) -> Parity {
    let p = Parity::of_photon_number(n as usize);
    match branch {
        Branch::Plus => p.flip(),
        Branch::Minus => p,
    }
}

/// Adiabatic label `(n, branch)` continued from position `index` of chain `p`.
pub fn adiabatic_label_from_chain(p: Parity, index: usize) -> (u32, Branch) {
    let n = index as u32;
    let branch = if adiabatic_parity(n, Branch::Plus) == p {
        Branch::Plus
    } else {
        Branch::Minus
    };
    (n, branch)
}

/// Cat-like adiabatic state
/// `(|+> D(-alpha)|n> +- |-> D(alpha)|n>) / sqrt(2)`, `|+-> = (|e> +- |g>)/sqrt(2)`.
pub fn adiabatic_state(params: &ModelParams, n: u32, branch: Branch, trunc: &Truncation) -> Result<JointState> {
    let a = params.alpha();
    let need = a * a + 6.0 * a + n as f64;
    if need > trunc.n_max() as f64 {
        return Err(Error::Truncation {
            n_max: trunc.n_max(),
            reason: format!("displaced support needs n_max >= {}", need.ceil()),
        });
    }
    let s = branch.sign();
    let mut amps = vec![Complex64::new(0.0, 0.0); trunc.dim()];
    for m in 0..=trunc.n_max() {
        let left = displacement_element(m, n as usize, -a);
        let right = displacement_element(m, n as usize, a);
        amps[basis_index(Qubit::Excited, m)] = Complex64::new(0.5 * (left + s * right), 0.0);
        amps[basis_index(Qubit::Ground, m)] = Complex64::new(0.5 * (left - s * right), 0.0);
    }
    JointState::from_amplitudes(amps)
}

//! Physical parameters, basis conventions, states and Hamiltonian builders.
//!
//! The product basis is ordered as `index = 2 n + q` with `q = 0` for the
//! qubit ground state `|g>` and `q = 1` for `|e>`, `n` the photon number.
//! `sigma_z |g> = -|g>`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default bound on the probability carried by the two highest Fock levels.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Parameters of `H = omega a^dag a + (Omega/2) sigma_z + g0 sigma_x (a + a^dag)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    omega_q: f64,
    g0: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega_q: f64, g0: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cavity frequency must be positive, got {omega}"
            )));
        }
        if !(omega_q.is_finite() && omega_q >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "qubit frequency must be non-negative, got {omega_q}"
            )));
        }
        if !(g0.is_finite() && g0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling must be non-negative, got {g0}"
            )));
        }
        Ok(Self { omega, omega_q, g0 })
    }

    /// `omega = Omega = 1` with coupling `g0 = g_over_omega`.
    pub fn resonant(g_over_omega: f64) -> Result<Self> {
        Self::new(1.0, 1.0, g_over_omega)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_q(&self) -> f64 {
        self.omega_q
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// `delta = Omega - omega`.
    pub fn detuning(&self) -> f64 {
        self.omega_q - self.omega
    }

    /// `Sigma = Omega + omega`.
    pub fn sum(&self) -> f64 {
        self.omega_q + self.omega
    }

    /// `alpha = g0 / omega`.
    pub fn alpha(&self) -> f64 {
        self.g0 / self.omega
    }

    /// Bloch-Siegert shift `g0^2 / Sigma`.
    pub fn bloch_siegert_shift(&self) -> f64 {
        self.g0 * self.g0 / self.sum()
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega_q - self.omega).abs() <= 1e-12 * self.omega
    }

    /// Photon cutoff used when the caller does not supply one:
    /// `ceil(alpha^2 + 10 alpha + 30)`.
    pub fn default_nmax(&self) -> usize {
        let a = self.alpha();
        (a * a + 10.0 * a + 30.0).ceil() as usize
    }

    /// Same physics with every frequency multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.omega * factor, self.omega_q * factor, self.g0 * factor)
    }

    pub fn with_coupling(&self, g0: f64) -> Result<Self> {
        Self::new(self.omega, self.omega_q, g0)
    }
}

/// Photon-number cutoff plus the tail tolerance eigenvectors must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    n_max: usize,
    tail_tol: f64,
}

impl Truncation {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must lie in (0, 1), got {tail_tol}"
            )));
        }
        Ok(Self { n_max, tail_tol })
    }

    /// Cutoff `n_max` with the default tail tolerance.
    pub fn with_nmax(n_max: usize) -> Result<Self> {
        Self::new(n_max, DEFAULT_TAIL_TOL)
    }

    /// Cutoff from [`ModelParams::default_nmax`].
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            n_max: params.default_nmax(),
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Dimension of the product space, `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Length of each parity chain, `n_max + 1`.
    pub fn chain_len(&self) -> usize {
        self.n_max + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    pub fn bit(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    /// Eigenvalue of `sigma_z`.
    pub fn sigma_z(self) -> f64 {
        match self {
            Qubit::Ground => -1.0,
            Qubit::Excited => 1.0,
        }
    }
}

/// Eigenvalue of `Pi = -sigma_z (-1)^(a^dag a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Parity::Plus),
            -1 => Some(Parity::Minus),
            _ => None,
        }
    }

    /// `(-1)^n` as a parity.
    pub fn of_photon_number(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }

    pub const BOTH: [Parity; 2] = [Parity::Plus, Parity::Minus];
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Plus => f.write_str("+1"),
            Parity::Minus => f.write_str("-1"),
        }
    }
}

/// Index of `|q, n>` in the product basis.
pub fn basis_index(q: Qubit, n: usize) -> usize {
    2 * n + q.bit()
}

/// Parity of the product basis state `|q, n>`: `(-1)^n` for `g`,
/// `(-1)^(n+1)` for `e`.
pub fn parity_of_basis_state(q: Qubit, n: usize) -> Parity {
    match q {
        Qubit::Ground => Parity::of_photon_number(n),
        Qubit::Excited => Parity::of_photon_number(n + 1),
    }
}

/// Product basis state visited by position `k` of the chain with parity `p`.
///
/// The `+1` chain runs `|g,0>, |e,1>, |g,2>, ...`, the `-1` chain runs
/// `|e,0>, |g,1>, |e,2>, ...`.
pub fn chain_basis_state(p: Parity, k: usize) -> (Qubit, usize) {
    if Parity::of_photon_number(k) == p {
        (Qubit::Ground, k)
    } else {
        (Qubit::Excited, k)
    }
}

/// Normalized amplitudes over the truncated product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amps: Vec<Complex64>,
}

impl JointState {
    /// Normalizes `amps`; the length must be `2 (n_max + 1)` for some `n_max >= 1`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 4 || !amps.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector length {} is not 2 (n_max + 1) with n_max >= 1",
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("state has zero norm".into()));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The basis ket `|q, n>` in a space of cutoff `n_max`.
    pub fn basis(q: Qubit, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::Truncation {
                n_max,
                reason: format!("basis state with {n} photons does not fit"),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * (n_max.max(1) + 1)];
        amps[basis_index(q, n)] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() / 2 - 1
    }

    pub fn amp(&self, q: Qubit, n: usize) -> Complex64 {
        self.amps[basis_index(q, n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &JointState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Probability carried by the two highest Fock levels.
    pub fn tail_probability(&self) -> f64 {
        let n = self.n_max();
        [n - 1, n]
            .iter()
            .flat_map(|&m| [Qubit::Ground, Qubit::Excited].map(|q| self.amp(q, m).norm_sqr()))
            .sum()
    }

    /// Probability on basis states of each parity, `(plus, minus)`.
    pub fn parity_weights(&self) -> (f64, f64) {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for n in 0..=self.n_max() {
            for q in [Qubit::Ground, Qubit::Excited] {
                let w = self.amp(q, n).norm_sqr();
                match parity_of_basis_state(q, n) {
                    Parity::Plus => plus += w,
                    Parity::Minus => minus += w,
                }
            }
        }
        (plus, minus)
    }

    /// `<Pi>`.
    pub fn parity_expectation(&self) -> f64 {
        let (plus, minus) = self.parity_weights();
        plus - minus
    }

    /// The parity the state has up to `tol` of leaked probability, if any.
    pub fn definite_parity(&self, tol: f64) -> Option<Parity> {
        let (plus, minus) = self.parity_weights();
        if minus <= tol {
            Some(Parity::Plus)
        } else if plus <= tol {
            Some(Parity::Minus)
        } else {
            None
        }
    }

    /// Re-expresses the state with cutoff `n_max`. Growing pads with zeros;
    /// shrinking fails if more than `1e-12` of probability would be dropped.
    pub fn resized(&self, n_max: usize) -> Result<Self> {
        let dim = 2 * (n_max + 1);
        if dim >= self.dim() {
            let mut amps = self.amps.clone();
            amps.resize(dim, Complex64::new(0.0, 0.0));
            return Ok(Self { amps });
        }
        let dropped: f64 = self.amps[dim..].iter().map(|a| a.norm_sqr()).sum();
        if dropped > 1e-12 {
            return Err(Error::Truncation {
                n_max,
                reason: format!("resizing would drop probability {dropped:e}"),
            });
        }
        if dropped == 0.0 {
            return Ok(Self {
                amps: self.amps[..dim].to_vec(),
            });
        }
        Self::from_amplitudes(self.amps[..dim].to_vec())
    }
}

/// Dense `H_R` in the product basis, dimension `2 (n_max + 1)`.
pub fn build_dense_hamiltonian(params: &ModelParams, trunc: &Truncation) -> Matrix {
    let n_max = trunc.n_max();
    let mut h = Matrix::zeros(trunc.dim());
    let (w, half_q, g) = (params.omega(), 0.5 * params.omega_q(), params.g0());
    for n in 0..=n_max {
        let ig = basis_index(Qubit::Ground, n);
        let ie = basis_index(Qubit::Excited, n);
        h[(ig, ig)] = w * n as f64 - half_q;
        h[(ie, ie)] = w * n as f64 + half_q;
        if n < n_max {
            let c = g * ((n + 1) as f64).sqrt();
            let jg = basis_index(Qubit::Ground, n + 1);
            let je = basis_index(Qubit::Excited, n + 1);
            h[(ig, je)] = c;
            h[(je, ig)] = c;
            h[(ie, jg)] = c;
            h[(jg, ie)] = c;
        }
    }
    h
}

/// One parity sector of `H_R`, tridiagonal in the chain labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityChain {
    pub parity: Parity,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl ParityChain {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// `diag[n] = omega n - (Omega/2)(-1)^n p`, `offdiag[n] = g0 sqrt(n + 1)`.
pub fn build_parity_chain(params: &ModelParams, trunc: &Truncation, p: Parity) -> ParityChain {
    let len = trunc.chain_len();
    let half_q = 0.5 * params.omega_q();
    let diag = (0..len)
        .map(|n| {
            let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
            params.omega() * n as f64 - half_q * alt * p.sign()
        })
        .collect();
    let offdiag = (0..len - 1).map(|n| params.g0() * ((n + 1) as f64).sqrt()).collect();
    ParityChain {
        parity: p,
        diag,
        offdiag,
    }
}

/// Places chain amplitudes on the product basis states they label.
pub fn embed_chain_state(chain_vector: &[f64], p: Parity, trunc: &Truncation) -> Result<JointState> {
    if chain_vector.len() != trunc.chain_len() {
        return Err(Error::DimensionMismatch {
            left: chain_vector.len(),
            right: trunc.chain_len(),
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); trunc.dim()];
    for (k, &c) in chain_vector.iter().enumerate() {
        let (q, n) = chain_basis_state(p, k);
        amps[basis_index(q, n)] = Complex64::new(c, 0.0);
    }
    JointState::from_amplitudes(amps)
}

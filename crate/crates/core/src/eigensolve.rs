//! Symmetric eigensolvers and truncation-converged Rabi spectra.
//!
//! The tridiagonal kernel is implicit QL with Wilkinson shifts. Dense
//! symmetric matrices are first reduced to tridiagonal form by Householder
//! reflections and then handed to the same kernel with the transformation
//! accumulated.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{build_parity_chain, embed_chain_state, JointState, ModelParams, Parity, Truncation};

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order; `vectors[i]` belongs to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal.
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<EigenDecomposition> {
    let n = diag.len();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    if offdiag.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            left: offdiag.len(),
            right: n - 1,
        });
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = want_vectors.then(|| Matrix::identity(n));
    ql_implicit(&mut d, &mut e, z.as_mut())?;
    Ok(sorted(d, z))
}

/// Eigen-decomposition of a dense symmetric matrix.
pub fn dense_sym_eigen(matrix: &Matrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let n = matrix.dim();
    let asym = matrix.asymmetry();
    if asym > 1e-12 * matrix.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut q = matrix.clone();
    let (mut d, mut e) = householder_tridiagonalize(&mut q);
    // e[i] couples i-1 and i; the QL kernel wants e[i] coupling i and i+1
    e.remove(0);
    e.push(0.0);
    let mut z = want_vectors.then_some(q);
    ql_implicit(&mut d, &mut e, z.as_mut())?;
    Ok(sorted(d, z))
}

fn sorted(values: Vec<f64>, z: Option<Matrix>) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vectors = z.map(|z| {
        let mut vecs: Vec<Vec<f64>> = order.iter().map(|&i| z.column(i)).collect();
        reorthogonalize_clusters(&sorted_values, &mut vecs);
        vecs
    });
    EigenDecomposition {
        values: sorted_values,
        vectors,
    }
}

/// Modified Gram-Schmidt inside groups of (quasi-)degenerate eigenvalues.
fn reorthogonalize_clusters(values: &[f64], vecs: &mut [Vec<f64>]) {
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-9 * scale;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] < tol {
            end += 1;
        }
        if end - start > 1 {
            for i in start..end {
                for j in start..i {
                    let (head, tail) = vecs.split_at_mut(i);
                    let proj: f64 = head[j].iter().zip(&tail[0]).map(|(a, b)| a * b).sum();
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= proj * y;
                    }
                }
                let norm = vecs[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                vecs[i].iter_mut().for_each(|x| *x /= norm);
            }
        }
        start = end;
    }
}

/// Implicit QL with Wilkinson shifts. `e[i]` couples `i` and `i + 1`, and
/// `e[n - 1]` is scratch. When `z` is given its columns are rotated along,
/// so passing the identity yields eigenvectors and passing a Householder
/// basis yields eigenvectors of the original dense matrix.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::SolverFailure { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..z.dim() {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = s * zk + c * zk1;
                        z[(k, i)] = c * zk - s * zk1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// On return `a` holds the orthogonal transformation, and the result is
/// `(diag, sub)` with `sub[i]` coupling `i - 1` and `i` (`sub[0] = 0`).
fn householder_tridiagonalize(a: &mut Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let g: f64 = (0..i).map(|k| a[(i, k)] * a[(k, j)]).sum();
                for k in 0..i {
                    a[(k, j)] -= g * a[(k, i)];
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
    (d, e)
}

/// One exact eigenstate of the truncated Rabi Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub parity: Parity,
    /// Position of the level within its parity chain (0 = lowest).
    pub chain_index: usize,
    pub state: JointState,
}

/// Levels sorted by energy, ties broken with `+1` parity first.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub params: ModelParams,
    pub trunc: Truncation,
}

impl Spectrum {
    fn from_levels(mut levels: Vec<Level>, params: ModelParams, trunc: Truncation) -> Self {
        levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.parity.cmp(&b.parity)));
        Self { levels, params, trunc }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The `index`-th level of the chain with parity `p`.
    pub fn chain_level(&self, p: Parity, index: usize) -> Option<&Level> {
        self.levels.iter().find(|l| l.parity == p && l.chain_index == index)
    }

    /// Energies of one chain in ascending order.
    pub fn chain_energies(&self, p: Parity) -> Vec<f64> {
        let mut out: Vec<(usize, f64)> = self
            .levels
            .iter()
            .filter(|l| l.parity == p)
            .map(|l| (l.chain_index, l.energy))
            .collect();
        out.sort_by_key(|x| x.0);
        out.into_iter().map(|x| x.1).collect()
    }
}

/// Eigenpairs of one parity chain; `lowest` limits how many are returned.
pub fn chain_eigen(
    params: &ModelParams,
    trunc: &Truncation,
    p: Parity,
    lowest: Option<usize>,
    want_vectors: bool,
) -> Result<EigenDecomposition> {
    let chain = build_parity_chain(params, trunc, p);
    let mut dec = tridiag_eigen(&chain.diag, &chain.offdiag, want_vectors)?;
    if let Some(k) = lowest {
        dec.values.truncate(k);
        if let Some(v) = dec.vectors.as_mut() {
            v.truncate(k);
        }
    }
    Ok(dec)
}

/// Every level of the truncated Hamiltonian, without a tail check.
pub fn spectrum_at(params: &ModelParams, trunc: &Truncation) -> Result<Spectrum> {
    let mut levels = Vec::with_capacity(trunc.dim());
    for p in Parity::BOTH {
        let dec = chain_eigen(params, trunc, p, None, true)?;
        let vecs = dec.vectors.expect("vectors requested");
        for (i, (energy, v)) in dec.values.into_iter().zip(vecs).enumerate() {
            levels.push(Level {
                energy,
                parity: p,
                chain_index: i,
                state: embed_chain_state(&v, p, trunc)?,
            });
        }
    }
    Ok(Spectrum::from_levels(levels, *params, *trunc))
}

/// Controls for [`converged_spectrum_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    /// Largest allowed eigenvalue change between successive cutoffs, in units of omega.
    pub energy_tol: f64,
    pub tail_tol: f64,
    /// First cutoff tried; defaults to [`ModelParams::default_nmax`].
    pub start_nmax: Option<usize>,
    pub max_nmax: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            energy_tol: 1e-8,
            tail_tol: crate::model::DEFAULT_TAIL_TOL,
            start_nmax: None,
            max_nmax: 4096,
        }
    }
}

/// Lowest `k_levels` of each parity chain, with the cutoff doubled until every
/// requested eigenvalue moves by less than `energy_tol * omega` and every
/// eigenvector meets the tail tolerance. The result holds `2 k_levels` levels.
pub fn converged_spectrum(params: &ModelParams, k_levels: usize, energy_tol: f64) -> Result<Spectrum> {
    converged_spectrum_with(
        params,
        k_levels,
        &ConvergenceOptions {
            energy_tol,
            ..Default::default()
        },
    )
}

pub fn converged_spectrum_with(params: &ModelParams, k_levels: usize, opts: &ConvergenceOptions) -> Result<Spectrum> {
    if k_levels == 0 {
        return Err(Error::InvalidParameter("k_levels must be at least 1".into()));
    }
    let mut n_max = opts
        .start_nmax
        .unwrap_or_else(|| params.default_nmax())
        .max(k_levels + 4);
    let mut previous: Option<[Vec<f64>; 2]> = None;
    loop {
        if n_max > opts.max_nmax {
            return Err(Error::Truncation {
                n_max: opts.max_nmax,
                reason: format!("lowest {k_levels} levels not converged below the cutoff cap"),
            });
        }
        let trunc = Truncation::new(n_max, opts.tail_tol)?;
        let plus = chain_eigen(params, &trunc, Parity::Plus, Some(k_levels), true)?;
        let minus = chain_eigen(params, &trunc, Parity::Minus, Some(k_levels), true)?;

        let tails_ok = [&plus, &minus].iter().all(|dec| {
            dec.vectors.as_ref().expect("vectors requested").iter().all(|v| {
                let len = v.len();
                v[len - 2] * v[len - 2] + v[len - 1] * v[len - 1] <= opts.tail_tol
            })
        });
        let energies_ok = previous.as_ref().is_some_and(|[pp, pm]| {
            let tol = opts.energy_tol * params.omega();
            pp.iter().zip(&plus.values).all(|(a, b)| (a - b).abs() < tol)
                && pm.iter().zip(&minus.values).all(|(a, b)| (a - b).abs() < tol)
        });

        if tails_ok && energies_ok {
            let mut levels = Vec::with_capacity(2 * k_levels);
            for (p, dec) in [(Parity::Plus, plus), (Parity::Minus, minus)] {
                let vecs = dec.vectors.expect("vectors requested");
                for (i, (energy, v)) in dec.values.into_iter().zip(vecs).enumerate() {
                    levels.push(Level {
                        energy,
                        parity: p,
                        chain_index: i,
                        state: embed_chain_state(&v, p, &trunc)?,
                    });
                }
            }
            return Ok(Spectrum::from_levels(levels, *params, trunc));
        }
        previous = Some([plus.values, minus.values]);
        n_max *= 2;
    }
}

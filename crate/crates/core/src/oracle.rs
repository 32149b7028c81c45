//! Brute-force Markov chain of the zero-range image for small systems.
//!
//! States are the occupations `n` of `N` sites holding `M` particles. One
//! parallel step moves `m_i ~ φ(·|n_i)` particles from site `i` to `i+1`;
//! every transition is stored with its jump count `Σ m_i`, so the deformed
//! matrix `M^γ = Σ weight e^{γ·jumps}` is available for any `γ`.

use std::collections::HashMap;
use std::io::Write;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::scalar::{binomial, Rational, Scalar};

pub const DEFAULT_STATE_CAP: usize = 20_000;

/// Lexicographic enumeration of all occupations of `N` sites by `M` particles.
#[derive(Debug, Clone)]
pub struct StateIndex {
    m: usize,
    n: usize,
    states: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
}

/// `C(M+N-1, N-1)`, or `None` if it overflows `usize`.
pub fn state_count(m: usize, n: usize) -> Option<usize> {
    if n == 0 {
        return Some(0);
    }
    let c = binomial((m + n - 1) as i64, (n - 1) as i64);
    usize::try_from(c).ok()
}

impl StateIndex {
    pub fn new(m: usize, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("the zero-range lattice needs N >= 1 sites".into()));
        }
        match state_count(m, n) {
            Some(c) if c <= cap => {}
            _ => {
                return Err(Error::Resource(format!(
                    "M={m}, N={n} has more than {cap} states; raise the cap or shrink the system"
                )))
            }
        }
        let mut states = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut states, &mut cur, 0, m as u32);
        let lookup = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { m, n, states, lookup })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn particles(&self) -> usize {
        self.m
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn index(&self, occ: &[u32]) -> Option<usize> {
        self.lookup.get(occ).copied()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, site: usize, left: u32) {
    if site + 1 == cur.len() {
        cur[site] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[site] = k;
        fill(out, cur, site + 1, left - k);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<T> {
    pub to: usize,
    pub from: usize,
    pub jumps: u32,
    pub weight: T,
}

/// All one-step transitions resolved by jump count, with weights in `T`.
#[derive(Debug, Clone)]
pub struct JumpResolvedChain<T> {
    index: StateIndex,
    transitions: Vec<Transition<T>>,
}

impl<T: Scalar> JumpResolvedChain<T> {
    pub fn build(m: usize, n: usize, params: &Params<T>, cap: usize) -> Result<Self> {
        let index = StateIndex::new(m, n, cap)?;
        let kernel: Vec<Vec<T>> = (0..=m)
            .map(|k| (0..=k).map(|j| params.hop_kernel(j, k)).collect::<Result<Vec<T>>>())
            .collect::<Result<_>>()?;
        let mut transitions = Vec::new();
        let mut acc: HashMap<(usize, u32), T> = HashMap::new();
        let mut moves = vec![0u32; n];
        let mut target = vec![0u32; n];
        for from in 0..index.len() {
            let src = index.state(from).to_vec();
            acc.clear();
            moves.iter_mut().for_each(|x| *x = 0);
            loop {
                let mut w = T::one();
                for i in 0..n {
                    w = w * kernel[src[i] as usize][moves[i] as usize].clone();
                }
                if !w.is_zero() {
                    for i in 0..n {
                        let prev = if i == 0 { n - 1 } else { i - 1 };
                        target[i] = src[i] - moves[i] + moves[prev];
                    }
                    let to = index.index(&target).expect("mass is conserved");
                    let jumps: u32 = moves.iter().sum();
                    let slot = acc.entry((to, jumps)).or_insert_with(T::zero);
                    *slot = slot.clone() + w;
                }
                // Odometer over 0 <= moves[i] <= src[i].
                let mut i = 0;
                while i < n {
                    if moves[i] < src[i] {
                        moves[i] += 1;
                        break;
                    }
                    moves[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            let mut block: Vec<_> = acc
                .drain()
                .map(|((to, jumps), weight)| Transition { to, from, jumps, weight })
                .collect();
            block.sort_by_key(|t| (t.to, t.jumps));
            transitions.extend(block);
        }
        Ok(Self { index, transitions })
    }

    pub fn index(&self) -> &StateIndex {
        &self.index
    }

    pub fn transitions(&self) -> &[Transition<T>] {
        &self.transitions
    }

    /// Column sums of the undeformed matrix; all equal one for a stochastic chain.
    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.index.len()];
        for t in &self.transitions {
            sums[t.from] = sums[t.from].clone() + t.weight.clone();
        }
        sums
    }

    /// `ℋ(k)`: law of the number of particles moving in one step from the
    /// distribution `pi`.
    pub fn hop_distribution_from(&self, pi: &[T]) -> Vec<T> {
        let mut h = vec![T::zero(); self.index.particles() + 1];
        for t in &self.transitions {
            h[t.jumps as usize] = h[t.jumps as usize].clone() + t.weight.clone() * pi[t.from].clone();
        }
        h
    }

    /// Writes `to,from,jumps,weight` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "to,from,jumps,weight")?;
        for t in &self.transitions {
            writeln!(w, "{},{},{},{:?}", t.to, t.from, t.jumps, t.weight.to_f64_lossy())?;
        }
        Ok(())
    }
}

impl JumpResolvedChain<Rational> {
    /// Exact stationary distribution by Gaussian elimination on `(M - I) π = 0`
    /// with one equation replaced by `Σ π = 1`.
    pub fn stationary_exact(&self) -> Result<Vec<Rational>> {
        let s = self.index.len();
        let mut a = vec![vec![Rational::zero(); s + 1]; s];
        for t in &self.transitions {
            a[t.to][t.from] += &t.weight;
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= Rational::one();
        }
        for x in a[s - 1].iter_mut() {
            *x = Rational::one();
        }
        for col in 0..s {
            let piv = (col..s)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Domain("chain is reducible: stationary vector is not unique".into()))?;
            a.swap(col, piv);
            let inv = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(pivot_row.iter()).skip(col) {
                    *x -= &f * p;
                }
            }
        }
        Ok(a.into_iter().map(|row| row[s].clone()).collect())
    }
}

/// `M^γ` for a fixed `γ` in compressed rows (`y = M^γ x` row by row).
#[derive(Debug, Clone)]
pub struct DeformedMatrix {
    pub gamma: f64,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl DeformedMatrix {
    pub fn from_chain<T: Scalar>(chain: &JumpResolvedChain<T>, gamma: f64) -> Self {
        let s = chain.index().len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); s];
        for t in chain.transitions() {
            let v = t.weight.to_f64_lossy() * (gamma * t.jumps as f64).exp();
            rows[t.to].push((t.from, v));
        }
        let mut row_start = Vec::with_capacity(s + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                if cols.len() > *row_start.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self { gamma, row_start, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let (a, b) = (self.row_start[r], self.row_start[r + 1]);
            *out = self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&c, &v)| v * x[c]).sum();
        });
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim()];
        for (&c, &v) in self.cols.iter().zip(&self.vals) {
            s[c] += v;
        }
        s
    }

    /// Writes `row,col,value` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,value")?;
        for r in 0..self.dim() {
            for k in self.row_start[r]..self.row_start[r + 1] {
                writeln!(w, "{},{},{:?}", r, self.cols[k], self.vals[k])?;
            }
        }
        Ok(())
    }
}

pub fn build_deformed_matrix(m: usize, n: usize, params: &crate::ModelParams, gamma: f64) -> Result<DeformedMatrix> {
    let chain = JumpResolvedChain::build(m, n, params, DEFAULT_STATE_CAP)?;
    Ok(DeformedMatrix::from_chain(&chain, gamma))
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 2_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct PerronPair {
    pub value: f64,
    /// Collatz-Wielandt bounds bracketing the eigenvalue.
    pub lower: f64,
    pub upper: f64,
    /// Positive right eigenvector normalized to unit sum.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Perron root and vector of a nonnegative primitive matrix by power iteration.
pub fn perron(matrix: &DeformedMatrix, opts: PowerOptions) -> Result<PerronPair> {
    let s = matrix.dim();
    let mut x = vec![1.0 / s as f64; s];
    let mut y = vec![0.0; s];
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    for it in 1..=opts.max_iter {
        matrix.apply(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in y.iter().zip(&x) {
            let r = a / b;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let total: f64 = y.iter().sum();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / total;
        }
        let spread = hi - lo;
        if spread <= opts.tol * hi {
            return Ok(PerronPair { value: total, lower: lo, upper: hi, vector: x, iterations: it });
        }
        // Below 1e-13 the bounds can stall on roundoff before reaching a tighter tol.
        if spread < best {
            best = spread;
            stale = 0;
        } else {
            stale += 1;
            if stale > 64 && spread <= 1e-13 * hi {
                return Ok(PerronPair { value: total, lower: lo, upper: hi, vector: x, iterations: it });
            }
        }
    }
    Err(Error::IterationLimit(format!("power iteration did not reach {} in {} steps", opts.tol, opts.max_iter)))
}

/// Stationary distribution of the undeformed chain.
pub fn stationary_vector(matrix: &DeformedMatrix) -> Result<Vec<f64>> {
    if matrix.gamma != 0.0 {
        return Err(Error::Domain("the stationary vector needs the undeformed matrix (gamma = 0)".into()));
    }
    Ok(perron(matrix, PowerOptions::default())?.vector)
}

pub fn largest_eigenvalue(matrix: &DeformedMatrix) -> Result<f64> {
    Ok(perron(matrix, PowerOptions::default())?.value)
}

/// `ln Λ₀(γ)` sampled from a prebuilt chain.
pub fn log_lambda<T: Scalar>(chain: &JumpResolvedChain<T>, gamma: f64) -> Result<f64> {
    let mat = DeformedMatrix::from_chain(chain, gamma);
    Ok(largest_eigenvalue(&mat)?.ln())
}

#[derive(Debug, Clone)]
pub struct FdCumulants {
    /// `c_1..c_order`.
    pub values: Vec<f64>,
    /// `|R₂ - R₁|` between the last two Richardson levels.
    pub errors: Vec<f64>,
    pub warning: Option<String>,
}

/// Base step per derivative order; smaller steps lose the fourth derivative
/// to roundoff in double precision.
pub const FD_STEPS: [f64; 4] = [1e-3, 1e-3, 5e-2, 5e-2];

fn stencil(g: &dyn Fn(f64) -> Result<f64>, k: usize, h: f64) -> Result<f64> {
    Ok(match k {
        1 => (g(h)? - g(-h)?) / (2.0 * h),
        2 => (g(h)? - 2.0 * g(0.0)? + g(-h)?) / (h * h),
        3 => (g(2.0 * h)? - 2.0 * g(h)? + 2.0 * g(-h)? - g(-2.0 * h)?) / (2.0 * h * h * h),
        4 => (g(2.0 * h)? - 4.0 * g(h)? + 6.0 * g(0.0)? - 4.0 * g(-h)? + g(-2.0 * h)?) / (h * h * h * h),
        _ => unreachable!(),
    })
}

/// Derivatives of `ln Λ₀` at `γ = 0` by central differences with two levels of
/// Richardson extrapolation over `h, h/2, h/4`.
pub fn cumulants_fd_with_steps(m: usize, n: usize, params: &crate::ModelParams, order: usize, steps: &[f64]) -> Result<FdCumulants> {
    if !(1..=4).contains(&order) || steps.len() < order {
        return Err(Error::InvalidParameter(format!("finite-difference cumulants support orders 1..=4, got {order}")));
    }
    let chain = JumpResolvedChain::build(m, n, params, DEFAULT_STATE_CAP)?;
    let cache = std::sync::Mutex::new(HashMap::<u64, f64>::new());
    let g = |gamma: f64| -> Result<f64> {
        if gamma == 0.0 {
            return Ok(0.0);
        }
        if let Some(v) = cache.lock().unwrap().get(&gamma.to_bits()) {
            return Ok(*v);
        }
        let mat = DeformedMatrix::from_chain(&chain, gamma);
        let v = perron(&mat, PowerOptions { tol: 1e-16, ..PowerOptions::default() })?.value.ln();
        cache.lock().unwrap().insert(gamma.to_bits(), v);
        Ok(v)
    };
    let mut values = Vec::with_capacity(order);
    let mut errors = Vec::with_capacity(order);
    let mut warning = None;
    for k in 1..=order {
        let h = steps[k - 1];
        let d: Vec<f64> = [h, h / 2.0, h / 4.0].iter().map(|&s| stencil(&g, k, s)).collect::<Result<_>>()?;
        let r1a = (4.0 * d[1] - d[0]) / 3.0;
        let r1b = (4.0 * d[2] - d[1]) / 3.0;
        let r2 = (16.0 * r1b - r1a) / 15.0;
        let err = (r2 - r1b).abs();
        // Extrapolation is trustworthy only when the corrections shrink.
        if (r1b - d[2]).abs() > (d[2] - d[1]).abs() * 1.01 && (d[2] - d[1]).abs() > 1e-12 * r2.abs().max(1.0) {
            warning.get_or_insert_with(|| format!("Richardson corrections grow for c_{k}; result may be roundoff-limited"));
        }
        values.push(r2);
        errors.push(err);
    }
    Ok(FdCumulants { values, errors, warning })
}

pub fn cumulants_fd(m: usize, n: usize, params: &crate::ModelParams, order: usize) -> Result<FdCumulants> {
    cumulants_fd_with_steps(m, n, params, order, &FD_STEPS)
}

/// Exact `ℋ(0..=M)` from the rational chain and its exact stationary vector.
pub fn hop_distribution(m: usize, n: usize, params: &crate::ExactParams) -> Result<Vec<Rational>> {
    let chain = JumpResolvedChain::build(m, n, params, DEFAULT_STATE_CAP)?;
    let pi = chain.stationary_exact()?;
    Ok(chain.hop_distribution_from(&pi))
}

/// Exact mean jumps per step under the chain's own stationary vector.
pub fn stationary_current(m: usize, n: usize, params: &crate::ExactParams) -> Result<Rational> {
    let h = hop_distribution(m, n, params)?;
    Ok(h.iter().enumerate().map(|(k, p)| p * Rational::from_integer((k as i64).into())).sum())
}

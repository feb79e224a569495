//! Moments over the circular unitary ensemble.
//!
//! Exact moments reduce to truncated Hall pairings of `e_μ` / `h_μ` in Schur
//! coordinates and never touch floating point. The Haar sampler and the
//! Monte Carlo estimator are an independent numeric route to the same
//! numbers.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::partitions::Partition;
use crate::symfunc::{e_to_schur, h_to_schur, hall_pairing_truncated};
use crate::{par, Error, Result};

/// Largest matrix size accepted by the sampler and the numeric routines.
pub const MAX_SAMPLE_DIM: usize = 64;
/// Frobenius tolerance on `U U* - I`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Minimum sample count for [`mc_moment_estimate`].
pub const MIN_MC_SAMPLES: usize = 1_000;
/// Samples drawn from one RNG stream; fixes the work split independently of
/// the thread count.
const MC_CHUNK: usize = 2_048;

/// Which eigenvalue statistic a moment is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentKind {
    /// Secular coefficients `Sc_j(U) = e_j(eigenvalues)`.
    Secular,
    /// Symmetric-power traces `Tr Sym^j(U) = h_j(eigenvalues)`.
    SymmetricPower,
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentKind::Secular => "secular",
            MomentKind::SymmetricPower => "symmetric-power",
        })
    }
}

impl std::str::FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "secular" | "sc" => Ok(MomentKind::Secular),
            "symmetric-power" | "trsym" | "sym" => Ok(MomentKind::SymmetricPower),
            other => Err(Error::InvalidInput(format!("unknown moment kind {other:?}"))),
        }
    }
}

/// `E ∏_j X_j^{a_j} conj(X_j)^{b_j}` over `U(N)`, where `X_j` is `Sc_j` or
/// `Tr Sym^j` depending on `kind`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MomentSpec {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub n: usize,
    pub kind: MomentKind,
}

impl MomentSpec {
    pub fn new(a: Vec<usize>, b: Vec<usize>, n: usize, kind: MomentKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size N must be at least 1".into()));
        }
        Ok(MomentSpec { a, b, n, kind })
    }

    /// Spec whose multiplicity vectors are those of `mu` and `mu_t`.
    pub fn from_partitions(mu: &Partition, mu_t: &Partition, n: usize, kind: MomentKind) -> Result<Self> {
        Self::new(mu.multiplicities(), mu_t.multiplicities(), n, kind)
    }

    /// Partition with `a_j` parts equal to `j`.
    pub fn mu(&self) -> Partition {
        Partition::from_multiplicities(&self.a)
    }

    /// Partition with `b_j` parts equal to `j`.
    pub fn mu_tilde(&self) -> Partition {
        Partition::from_multiplicities(&self.b)
    }

    /// Same moment with `a` and `b` exchanged (the conjugate integrand).
    pub fn swapped(&self) -> MomentSpec {
        MomentSpec {
            a: self.b.clone(),
            b: self.a.clone(),
            n: self.n,
            kind: self.kind,
        }
    }

    /// Dispatches to [`sc_moment_exact`] or [`trsym_moment_exact`].
    pub fn exact(&self) -> Result<BigInt> {
        match self.kind {
            MomentKind::Secular => sc_moment_exact(self),
            MomentKind::SymmetricPower => trsym_moment_exact(self),
        }
    }
}

/// `∫ ∏ Sc_j^{a_j} conj(Sc_j)^{b_j} dU = ⟨e_μ, e_μ̃⟩_{ℓ ≤ N}`. The `kind`
/// field of `spec` is ignored.
pub fn sc_moment_exact(spec: &MomentSpec) -> Result<BigInt> {
    let (mu, mu_t) = (spec.mu(), spec.mu_tilde());
    if mu.size() != mu_t.size() {
        return Ok(BigInt::default());
    }
    Ok(hall_pairing_truncated(&e_to_schur(&mu)?, &e_to_schur(&mu_t)?, spec.n))
}

/// `∫ ∏ (Tr Sym^j)^{a_j} conj(Tr Sym^j)^{b_j} dU = ⟨h_μ, h_μ̃⟩_{ℓ ≤ N}`. The
/// `kind` field of `spec` is ignored.
pub fn trsym_moment_exact(spec: &MomentSpec) -> Result<BigInt> {
    let (mu, mu_t) = (spec.mu(), spec.mu_tilde());
    if mu.size() != mu_t.size() {
        return Ok(BigInt::default());
    }
    Ok(hall_pairing_truncated(&h_to_schur(&mu)?, &h_to_schur(&mu_t)?, spec.n))
}

/// Whether a moment lies in the range where it equals `N_{μ,μ̃}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RangeVerdict {
    /// Secular kind with `Σ j a_j ≤ N` and `Σ j b_j ≤ N`.
    InRangeDg,
    /// Symmetric-power kind with `min(Σ a_j, Σ b_j) ≤ N`.
    InRangeMin,
    OutOfRange,
}

impl RangeVerdict {
    pub fn in_range(self) -> bool {
        !matches!(self, RangeVerdict::OutOfRange)
    }
}

impl fmt::Display for RangeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RangeVerdict::InRangeDg => "in-range-DG",
            RangeVerdict::InRangeMin => "in-range-min",
            RangeVerdict::OutOfRange => "out-of-range",
        })
    }
}

pub fn range_verdict(spec: &MomentSpec) -> RangeVerdict {
    match spec.kind {
        MomentKind::Secular => {
            let weight = |v: &[usize]| v.iter().enumerate().map(|(j, &x)| (j + 1) * x).sum::<usize>();
            if weight(&spec.a) <= spec.n && weight(&spec.b) <= spec.n {
                RangeVerdict::InRangeDg
            } else {
                RangeVerdict::OutOfRange
            }
        }
        MomentKind::SymmetricPower => {
            let count = |v: &[usize]| v.iter().sum::<usize>();
            if count(&spec.a).min(count(&spec.b)) <= spec.n {
                RangeVerdict::InRangeMin
            } else {
                RangeVerdict::OutOfRange
            }
        }
    }
}

/// A complex `N × N` matrix with `‖U U* − I‖_F ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(DMatrix<Complex64>);

impl UnitaryMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput("unitary matrix must be square and non-empty".into()));
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOL {
            return Err(Error::Numeric(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(UnitaryMatrix(matrix))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// `‖U U* − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    /// Eigenvalues from the complex Schur form.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.dim() == 1 {
            return vec![self.0[(0, 0)]];
        }
        let (_, t) = self.0.clone().schur().unpack();
        t.diagonal().iter().copied().collect()
    }
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    (prod - DMatrix::<Complex64>::identity(n, n)).norm()
}

/// Haar-distributed unitary matrix, deterministic in `seed`.
pub fn haar_sample(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_sample_with(n, &mut rng)
}

/// Gaussian matrix → Householder QR → rescale the columns of `Q` by the
/// phases of `diag(R)`, so that the triangular factor has a positive real
/// diagonal.
pub fn haar_sample_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if n == 0 || n > MAX_SAMPLE_DIM {
        return Err(Error::InvalidInput(format!(
            "sample dimension must be in 1..={MAX_SAMPLE_DIM}, got {n}"
        )));
    }
    let gauss = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(q)
}

/// `(Sc_0, …, Sc_N)` with `det(zI + U) = Σ z^{N−n} Sc_n(U)`, expanded from
/// the eigenvalues.
pub fn secular_coeffs(u: &UnitaryMatrix) -> Vec<Complex64> {
    elementary_from_roots(&u.eigenvalues())
}

/// `e_0, …, e_m` of the given values, by expanding `∏ (1 + x_i t)`.
pub fn elementary_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); roots.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (done, &x) in roots.iter().enumerate() {
        for k in (1..=done + 1).rev() {
            let prev = e[k - 1];
            e[k] += x * prev;
        }
    }
    e
}

/// Power sums `p_1, …, p_m` (index 0 holds `p_0 = len`).
pub fn power_sums(roots: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(roots.len() as f64, 0.0); m + 1];
    let mut powers: Vec<Complex64> = roots.to_vec();
    for slot in out.iter_mut().skip(1) {
        *slot = powers.iter().sum();
        for (p, &r) in powers.iter_mut().zip(roots) {
            *p *= r;
        }
    }
    out
}

/// `h_0, …, h_m` from power sums via `n h_n = Σ_{k=1}^{n} p_k h_{n−k}`.
pub fn complete_from_power_sums(p: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); m + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for n in 1..=m {
        let s: Complex64 = (1..=n).map(|k| p[k] * h[n - k]).sum();
        h[n] = s / n as f64;
    }
    h
}

/// `(h_0, …, h_{n_max})` of the eigenvalues, i.e. `Tr Sym^n(U)`.
pub fn trsym_values(u: &UnitaryMatrix, n_max: usize) -> Result<Vec<Complex64>> {
    if n_max > MAX_SAMPLE_DIM {
        return Err(Error::InvalidInput(format!(
            "n_max must be at most {MAX_SAMPLE_DIM}, got {n_max}"
        )));
    }
    let p = power_sums(&u.eigenvalues(), n_max);
    Ok(complete_from_power_sums(&p, n_max))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `|estimate − exact| / stderr`.
    pub fn z_score(&self, exact: f64) -> f64 {
        (self.estimate - Complex64::new(exact, 0.0)).norm() / self.stderr
    }
}

/// Evaluates the moment integrand at one matrix.
pub fn integrand(spec: &MomentSpec, u: &UnitaryMatrix) -> Result<Complex64> {
    let ell = spec.a.len().max(spec.b.len());
    let values = match spec.kind {
        MomentKind::Secular => {
            let mut sc = secular_coeffs(u);
            sc.resize(ell.max(sc.len()), Complex64::new(0.0, 0.0));
            sc
        }
        MomentKind::SymmetricPower => trsym_values(u, ell)?,
    };
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, &count) in spec.a.iter().enumerate() {
        acc *= values[j + 1].powu(count as u32);
    }
    for (j, &count) in spec.b.iter().enumerate() {
        acc *= values[j + 1].conj().powu(count as u32);
    }
    Ok(acc)
}

/// Monte Carlo estimate of the moment over `samples` Haar draws.
///
/// Work is split into fixed-size chunks, chunk `i` drawing from ChaCha stream
/// `i` of `seed`; partial sums are merged in chunk order, so the result is
/// bit-identical across thread counts and with or without rayon.
pub fn mc_moment_estimate(spec: &MomentSpec, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_MC_SAMPLES} samples required, got {samples}"
        )));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials = par::map_range(chunks, |chunk| -> Result<(Complex64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        for _ in 0..count {
            let u = haar_sample_with(spec.n, &mut rng)?;
            let x = integrand(spec, &u)?;
            sum += x;
            sum_sq += x.norm_sqr();
        }
        Ok((sum, sum_sq))
    });
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    for part in partials {
        let (s, s2) = part?;
        sum += s;
        sum_sq += s2;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

/// Exact value as `f64`, for comparison with Monte Carlo output.
pub fn exact_as_f64(value: &BigInt) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: &[usize], b: &[usize], n: usize, kind: MomentKind) -> MomentSpec {
        MomentSpec::new(a.to_vec(), b.to_vec(), n, kind).unwrap()
    }

    #[test]
    fn secular_exact_examples() {
        use MomentKind::Secular;
        for n in 1..=4 {
            assert_eq!(sc_moment_exact(&spec(&[1], &[1], n, Secular)).unwrap(), BigInt::from(1));
        }
        assert_eq!(sc_moment_exact(&spec(&[2], &[2], 2, Secular)).unwrap(), BigInt::from(2));
        assert_eq!(sc_moment_exact(&spec(&[2], &[2], 1, Secular)).unwrap(), BigInt::from(1));
        // Degree mismatch.
        assert_eq!(sc_moment_exact(&spec(&[1], &[], 3, Secular)).unwrap(), BigInt::from(0));
        assert_eq!(sc_moment_exact(&spec(&[0, 1], &[1], 3, Secular)).unwrap(), BigInt::from(0));
    }

    #[test]
    fn trsym_exact_examples() {
        use MomentKind::SymmetricPower as Sym;
        for n in 1..=5 {
            let mut a = vec![0; n];
            a[n - 1] = 1;
            assert_eq!(trsym_moment_exact(&spec(&a, &a, 1, Sym)).unwrap(), BigInt::from(1));
        }
        assert_eq!(trsym_moment_exact(&spec(&[2], &[2], 1, Sym)).unwrap(), BigInt::from(1));
        assert_eq!(trsym_moment_exact(&spec(&[0, 2], &[0, 2], 2, Sym)).unwrap(), BigInt::from(3));
    }

    #[test]
    fn verdicts() {
        use MomentKind::*;
        assert_eq!(range_verdict(&spec(&[1], &[1], 1, Secular)), RangeVerdict::InRangeDg);
        assert_eq!(range_verdict(&spec(&[0, 3], &[0, 3], 3, SymmetricPower)), RangeVerdict::InRangeMin);
        assert_eq!(range_verdict(&spec(&[2], &[2], 1, Secular)), RangeVerdict::OutOfRange);
        assert_eq!(range_verdict(&spec(&[3], &[0, 0, 1], 1, SymmetricPower)), RangeVerdict::InRangeMin);
        assert!(MomentSpec::new(vec![1], vec![1], 0, Secular).is_err());
    }

    #[test]
    fn haar_sample_basics() {
        let u1 = haar_sample(1, 7).unwrap();
        assert!((u1.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        for n in [2, 5, 16, 64] {
            let u = haar_sample(n, 11).unwrap();
            assert!(u.unitarity_defect() <= UNITARITY_TOL, "n={n}");
        }
        assert_eq!(haar_sample(4, 3).unwrap(), haar_sample(4, 3).unwrap());
        assert_ne!(haar_sample(4, 3).unwrap(), haar_sample(4, 4).unwrap());
        assert!(haar_sample(65, 0).is_err());
        assert!(haar_sample(0, 0).is_err());
    }

    #[test]
    fn secular_and_trsym_values() {
        let u1 = haar_sample(1, 5).unwrap();
        let z = u1.matrix()[(0, 0)];
        let sc = secular_coeffs(&u1);
        assert_eq!(sc.len(), 2);
        assert!((sc[0] - 1.0).norm() < 1e-15);
        assert!((sc[1] - z).norm() < 1e-15);
        let h = trsym_values(&u1, 6).unwrap();
        for (n, hn) in h.iter().enumerate() {
            assert!((hn - z.powu(n as u32)).norm() < 1e-12);
        }

        for n in [2, 3, 6, 10] {
            let u = haar_sample(n, 99).unwrap();
            let sc = secular_coeffs(&u);
            assert!((sc[0] - 1.0).norm() < 1e-15);
            assert!((sc[n].norm() - 1.0).abs() < 1e-8);
            // Σ_k (−1)^k e_k h_{m−k} = 0 for m ≥ 1.
            let h = trsym_values(&u, n).unwrap();
            for m in 1..=n {
                let s: Complex64 = (0..=m)
                    .map(|k| if k % 2 == 0 { sc[k] * h[m - k] } else { -sc[k] * h[m - k] })
                    .sum();
                assert!(s.norm() < 1e-8, "n={n} m={m} residual={s}");
            }
        }
    }

    #[test]
    fn secular_coeffs_match_determinant_at_zero_shift() {
        // Sc_N = det U.
        let u = haar_sample(4, 21).unwrap();
        let det = u.matrix().clone().determinant();
        let sc = secular_coeffs(&u);
        assert!((sc[4] - det).norm() < 1e-10);
    }

    #[test]
    fn mc_is_deterministic_and_validates_input() {
        let s = spec(&[1], &[1], 2, MomentKind::Secular);
        let a = mc_moment_estimate(&s, 3_000, 17).unwrap();
        let b = mc_moment_estimate(&s, 3_000, 17).unwrap();
        assert_eq!(a, b);
        assert!(mc_moment_estimate(&s, 999, 17).is_err());
        assert!(a.z_score(1.0) < 4.0);
    }
}

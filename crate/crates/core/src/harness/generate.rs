//! Seeded instances `(A, X, Y)`.
//!
//! Randomness comes from ChaCha8 seeded with `seed` through
//! `SeedableRng::seed_from_u64`, so an instance is reproducible from its spec
//! on any platform. Gaussian entries use `rand_distr::StandardNormal`.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, ComplexMatrix, HermitianMatrix, C64};
use crate::subspace::SubspaceBasis;

/// Spectrum of `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectrumSpec {
    Explicit { values: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    /// First `k` eigenvalues uniform in `[0, 1]`, the rest in `[1 + gap, 2 + gap]`.
    Clustered { gap: f64 },
    /// `A = diag(a, b, c, d)`.
    PaperExa1 { a: f64, b: f64, c: f64, d: f64, theta: f64 },
    /// `A = diag(a, b, d, c)`.
    PaperExa2 { a: f64, b: f64, c: f64, d: f64, theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SubspaceMode {
    /// Independent random `X` and `Y`.
    RandomPair,
    /// `X` spanned by the eigenvectors of the first `k` listed eigenvalues,
    /// `Y = orth(X + ε G)`.
    InvariantPlusPerturbation { eps: f64 },
    /// `X = span{e1, e2}`, `Y = span{e1, cos θ e2 + sin θ e3}`; requires a paper spectrum.
    PaperFixed,
    /// Random `X` and `Y ⊥ X`, so every principal angle is `π/2`.
    OrthogonalPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub d: usize,
    pub k: usize,
    pub spectrum: SpectrumSpec,
    pub subspace_mode: SubspaceMode,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn paper_exa1(theta: f64) -> Self {
        Self::paper(SpectrumSpec::PaperExa1 { a: 0.0, b: 1.0, c: 2.0, d: 3.0, theta })
    }

    pub fn paper_exa2(theta: f64) -> Self {
        Self::paper(SpectrumSpec::PaperExa2 { a: 0.0, b: 1.0, c: 2.0, d: 3.0, theta })
    }

    fn paper(spectrum: SpectrumSpec) -> Self {
        Self {
            d: 4,
            k: 2,
            spectrum,
            subspace_mode: SubspaceMode::PaperFixed,
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn is_paper(&self) -> bool {
        matches!(
            self.spectrum,
            SpectrumSpec::PaperExa1 { .. } | SpectrumSpec::PaperExa2 { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::SpecInvalid(m));
        if self.d == 0 || self.k == 0 || self.k > self.d {
            return bad(format!("need 1 <= k <= d, got d = {}, k = {}", self.d, self.k));
        }
        match (&self.subspace_mode, self.is_paper()) {
            (SubspaceMode::PaperFixed, false) => return bad("paper_fixed needs a paper spectrum".into()),
            (SubspaceMode::PaperFixed, true) => {}
            (_, true) => return bad("paper spectra only support paper_fixed".into()),
            (_, false) if 2 * self.k > self.d => {
                return bad(format!("random modes need k <= d/2, got d = {}, k = {}", self.d, self.k))
            }
            _ => {}
        }
        if let SubspaceMode::InvariantPlusPerturbation { eps } = self.subspace_mode {
            if !(eps >= 0.0 && eps.is_finite()) {
                return bad(format!("perturbation size {eps} must be finite and >= 0"));
            }
        }
        match &self.spectrum {
            SpectrumSpec::Explicit { values } => {
                if values.len() != self.d {
                    return bad(format!("explicit spectrum has {} values, d = {}", values.len(), self.d));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("explicit spectrum has non-finite values".into());
                }
            }
            SpectrumSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return bad(format!("uniform range [{lo}, {hi}] is invalid"));
                }
            }
            SpectrumSpec::Clustered { gap } => {
                if !(gap.is_finite() && *gap >= 0.0) {
                    return bad(format!("cluster gap {gap} must be finite and >= 0"));
                }
            }
            SpectrumSpec::PaperExa1 { a, b, c, d, theta } | SpectrumSpec::PaperExa2 { a, b, c, d, theta } => {
                if self.d != 4 || self.k != 2 {
                    return bad("paper examples have d = 4, k = 2".into());
                }
                if !(a < b && b < c && c < d) {
                    return bad(format!("need a < b < c < d, got ({a}, {b}, {c}, {d})"));
                }
                if !(*theta >= 0.0 && *theta < FRAC_PI_2) {
                    return bad(format!("theta {theta} outside [0, pi/2)"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub a: HermitianMatrix,
    pub x: SubspaceBasis,
    pub y: SubspaceBasis,
    /// `X` was constructed `A`-invariant (still verified by every check that
    /// needs it).
    pub x_invariant: bool,
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Random unitary from the orthonormalized columns of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    loop {
        let q = orthonormalize(&gaussian_matrix(rng, d, d), 1e-12).expect("gaussian matrix is finite and non-zero");
        if q.cols() == d {
            return q;
        }
    }
}

fn random_basis(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Result<SubspaceBasis> {
    loop {
        let q = orthonormalize(&gaussian_matrix(rng, d, k), 1e-12)?;
        if q.cols() == k {
            return SubspaceBasis::from_isometry(q);
        }
    }
}

fn paper_y(theta: f64) -> Result<SubspaceBasis> {
    let mut y = ComplexMatrix::zeros(4, 2);
    y[(0, 0)] = C64::new(1.0, 0.0);
    y[(1, 1)] = C64::new(theta.cos(), 0.0);
    y[(2, 1)] = C64::new(theta.sin(), 0.0);
    SubspaceBasis::from_isometry(y)
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let (d, k) = (spec.d, spec.k);

    let paper = match spec.spectrum {
        SpectrumSpec::PaperExa1 { a, b, c, d, theta } => Some((vec![a, b, c, d], theta)),
        SpectrumSpec::PaperExa2 { a, b, c, d, theta } => Some((vec![a, b, d, c], theta)),
        _ => None,
    };
    if let Some((diag, theta)) = paper {
        return Ok(Instance {
            spec: spec.clone(),
            a: HermitianMatrix::from_real_diagonal(&diag),
            x: SubspaceBasis::coordinate(4, &[0, 1])?,
            y: paper_y(theta)?,
            x_invariant: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let spectrum: Vec<f64> = match &spec.spectrum {
        SpectrumSpec::Explicit { values } => values.clone(),
        SpectrumSpec::Uniform { lo, hi } => (0..d).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect(),
        SpectrumSpec::Clustered { gap } => (0..d)
            .map(|i| {
                let u = rng.gen::<f64>();
                if i < k {
                    u
                } else {
                    1.0 + gap + u
                }
            })
            .collect(),
        SpectrumSpec::PaperExa1 { .. } | SpectrumSpec::PaperExa2 { .. } => unreachable!("handled above"),
    };
    let u = random_unitary(&mut rng, d);
    let scaled = ComplexMatrix::from_fn(d, d, |i, j| u[(i, j)] * spectrum[j]);
    let a = HermitianMatrix::new(scaled.matmul(&u.adjoint())?)?;
    let leading: Vec<usize> = (0..k).collect();

    let (x, y, x_invariant) = match spec.subspace_mode {
        SubspaceMode::RandomPair => (random_basis(&mut rng, d, k)?, random_basis(&mut rng, d, k)?, false),
        SubspaceMode::InvariantPlusPerturbation { eps } => {
            let x = SubspaceBasis::from_isometry(u.select_columns(&leading))?;
            let y = if eps == 0.0 {
                x.clone()
            } else {
                let g = gaussian_matrix(&mut rng, d, k).scale_real(eps);
                SubspaceBasis::span_of(&x.matrix().add(&g)?, 1e-12)?
            };
            (x, y, true)
        }
        SubspaceMode::OrthogonalPair => {
            let x = random_basis(&mut rng, d, k)?;
            let g = gaussian_matrix(&mut rng, d, k);
            let xm = x.matrix();
            let w = g.sub(&xm.matmul(&xm.adjoint_matmul(&g)?)?)?;
            // second pass keeps X* Y at rounding level
            let w = w.sub(&xm.matmul(&xm.adjoint_matmul(&w)?)?)?;
            (x, SubspaceBasis::span_of(&w, 1e-12)?, false)
        }
        SubspaceMode::PaperFixed => unreachable!("validated"),
    };
    if y.dim() != k {
        return Err(Error::SpecInvalid(format!("perturbed basis lost rank ({} < {k})", y.dim())));
    }
    Ok(Instance {
        spec: spec.clone(),
        a,
        x,
        y,
        x_invariant,
    })
}

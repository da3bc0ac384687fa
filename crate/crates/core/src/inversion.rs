//! Inverse problem: travel time from the real-zero lattice, extraction of the
//! Dirichlet and Dirichlet–Neumann spectra by cardinal interpolation, and a
//! box-constrained Levenberg–Marquardt fit of a parametrised profile.
//!
//! Everything here is `f64`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{maclaurin, origin_data_numeric, prefactors, zero_probes, Dispersion, SchrodingerDispersion, WaveDispersion};
use crate::error::{Error, Result};
use crate::factorization::{reconstruct_d, SpectralData, SpectralDataJson};
use crate::profiles::{classify, travel_time, Profile, ProfileJson, ProfileKind, Regime};
use crate::sampling::{CardinalSeries, Parity};
use crate::scalar::{cre, C};
use crate::shooting::Equation;
use crate::spectra::{circle_moments, dirichlet_neumann_spectrum, dirichlet_spectrum, real_positive_zeros, ZeroKind};

/// Minimum number of real positive zeros for [`infer_travel_time`].
pub const MIN_REAL_ZEROS: usize = 5;
/// Held-out residual above which cardinal interpolation is rejected.
pub const HOLDOUT_THRESHOLD: f64 = 1e-3;

/// Travel time `a` from the real positive zeros, assuming `a < b`.
///
/// Each zero with lattice index `n` gives `a ≈ b − nπ/√λₙ`; these are averaged
/// with weights `n²`, favouring the zeros where the lattice asymptotics are
/// sharpest. Zeros without an index hint are numbered by rank.
pub fn infer_travel_time(data: &SpectralData<f64>, b: f64) -> Result<f64> {
    let mut real: Vec<_> = data.zeros.iter().filter(|z| z.kind == ZeroKind::RealPositive && z.lambda.re > 0.0).collect();
    real.sort_by(|x, y| x.lambda.re.total_cmp(&y.lambda.re));
    if real.len() < MIN_REAL_ZEROS {
        return Err(Error::InsufficientRealZeros { needed: MIN_REAL_ZEROS, have: real.len() });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (rank, z) in real.iter().enumerate() {
        let n = z.index_hint.map(f64::from).unwrap_or((rank + 1) as f64);
        let w = n * n;
        num += w * (b - n * PI / z.lambda.re.sqrt());
        den += w;
    }
    let a = num / den;
    if a <= 0.0 {
        return Err(Error::PathologicalLattice(a));
    }
    Ok(a)
}

/// Dirichlet and Dirichlet–Neumann eigenvalues recovered from spectral data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSpectra {
    pub dirichlet: Vec<f64>,
    pub neumann: Vec<f64>,
    /// Worst relative mismatch between the interpolated and reconstructed
    /// dispersion function at the held-out points `t = k + ¼`.
    pub holdout_residual: f64,
}

/// Rebuild `φ(b;·)` and `φ'(b;·)` from `n_max` samples of the reconstructed
/// dispersion function on the `b`-lattice and return their zeros with
/// `√λ b/π ≤ n_max/2`.
pub fn extract_two_spectra(data: &SpectralData<f64>, b: f64, n_max: usize) -> Result<TwoSpectra> {
    let gamma = data.gamma.ok_or(Error::GammaMissing)?;
    if gamma == 0.0 {
        let k = n_max / 2;
        let dirichlet = (1..=k).map(|n| (n as f64 * PI / b).powi(2)).collect();
        let neumann = (1..=k).map(|n| ((2 * n - 1) as f64 * PI / (2.0 * b)).powi(2)).collect();
        return Ok(TwoSpectra { dirichlet, neumann, holdout_residual: 0.0 });
    }
    if data.equation != Equation::Wave {
        return Err(Error::RegimeMismatch("two-spectra extraction needs wave data with a < b".into()));
    }
    if n_max < 8 {
        return Err(Error::Schema("n_max must be at least 8".into()));
    }
    let a = match data.tail {
        Some((a, _)) => a,
        None => infer_travel_time(data, b)?,
    };
    if classify(a, b) != Regime::ALessB {
        return Err(Error::RegimeMismatch(format!("travel time {a} is not below b = {b}; the b-lattice is not oversampled")));
    }
    let truncation = data.default_truncation()?;
    let d = |lam: f64| reconstruct_d(data, cre(lam), truncation).map(|v| v.re);

    let mut odd = Vec::with_capacity(n_max);
    let mut even = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let s = n as f64 * PI / b;
        odd.push(s * sign * d(s * s)?);
        let s = (2 * n - 1) as f64 * PI / (2.0 * b);
        even.push(s * sign * d(s * s)?);
    }
    let window = n_max as f64 / 2.0;
    let delta = PI * (1.0 - a / b);
    let g = CardinalSeries::new(odd, 1.0, Parity::Odd, window, delta);
    let h = CardinalSeries::new(even, 0.5, Parity::Even, window, delta);
    let t_max = g.valid_until().min(h.valid_until());

    let mut worst: f64 = 0.0;
    let mut norm: f64 = 0.0;
    let mut k = 1.0;
    while k + 0.25 <= t_max {
        let t = k + 0.25;
        let s = PI * t / b;
        let [sp, cp, _, _] = prefactors(b, cre(s * s));
        let (phi, dphi) = (g.eval(t) / s, h.eval(t));
        let interp = sp.re * dphi - cp.re * phi;
        worst = worst.max((interp - d(s * s)?).abs());
        norm = norm.max((sp.re * dphi).abs() + (cp.re * phi).abs());
        k += 1.0;
    }
    let holdout_residual = if norm > 0.0 { worst / norm } else { worst };
    if !(holdout_residual <= HOLDOUT_THRESHOLD) {
        return Err(Error::InterpolationIllConditioned(holdout_residual));
    }
    let to_lambda = |t: f64| (PI * t / b).powi(2);
    Ok(TwoSpectra {
        dirichlet: g.roots(t_max, 1.0 / 16.0).into_iter().map(to_lambda).collect(),
        neumann: h.roots(t_max, 1.0 / 16.0).into_iter().map(to_lambda).collect(),
        holdout_residual,
    })
}

/// Profile family searched by [`fit_profile`]. Breakpoints are uniform on `[0, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Parametrization {
    Constant,
    /// One value per piece.
    PiecewiseConstant { pieces: usize },
    /// C1 Hermite cubic: node values, then node slopes.
    PiecewiseCubic { pieces: usize },
}

impl Parametrization {
    pub fn len(&self) -> usize {
        match *self {
            Self::Constant => 1,
            Self::PiecewiseConstant { pieces } => pieces,
            Self::PiecewiseCubic { pieces } => 2 * (pieces + 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn build(&self, kind: ProfileKind, b: f64, p: &[f64]) -> Result<Profile<f64>> {
        if p.len() != self.len() || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema(format!("expected {} finite parameters, got {}", self.len(), p.len())));
        }
        match *self {
            Self::Constant => Profile::constant(kind, p[0], b),
            Self::PiecewiseConstant { pieces } => {
                let breaks: Vec<f64> = (0..=pieces).map(|i| b * i as f64 / pieces as f64).collect();
                Profile::piecewise_constant(kind, &breaks, p)
            }
            Self::PiecewiseCubic { pieces } => {
                let nodes: Vec<f64> = (0..=pieces).map(|i| b * i as f64 / pieces as f64).collect();
                Profile::hermite(kind, &nodes, &p[..=pieces], &p[pieces + 1..])
            }
        }
    }

    /// Parameters of the constant profile `c`.
    fn constant_params(&self, c: f64) -> Vec<f64> {
        match *self {
            Self::Constant => vec![c],
            Self::PiecewiseConstant { pieces } => vec![c; pieces],
            Self::PiecewiseCubic { pieces } => {
                let mut v = vec![c; pieces + 1];
                v.extend(std::iter::repeat_n(0.0, pieces + 1));
                v
            }
        }
    }

    fn default_bounds(&self, kind: ProfileKind) -> Vec<(f64, f64)> {
        let value = match kind {
            ProfileKind::WaveSpeedRho => (1e-3, 1e3),
            ProfileKind::SchrodingerPotential => (-1e4, 1e4),
        };
        match *self {
            Self::PiecewiseCubic { pieces } => {
                let mut v = vec![value; pieces + 1];
                v.extend(std::iter::repeat_n((-1e3, 1e3), pieces + 1));
                v
            }
            _ => vec![value; self.len()],
        }
    }
}

/// Which data enter the misfit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    /// Number of zero groups (smallest `|λ|` first); `None` takes up to 8.
    #[serde(default)]
    pub zeros: Option<usize>,
    /// Dirichlet and Dirichlet–Neumann eigenvalues per spectrum (0 disables).
    #[serde(default)]
    pub two_spectra: usize,
    /// Match `γ` when the data carry it.
    #[serde(default = "yes")]
    pub gamma: bool,
}

fn yes() -> bool {
    true
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self { zeros: None, two_spectra: 0, gamma: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionProblem {
    pub data: SpectralData<f64>,
    pub b: f64,
    pub regime: Regime,
    pub parametrization: Parametrization,
    pub seed: Vec<f64>,
    /// Empty for family defaults.
    pub bounds: Vec<(f64, f64)>,
    pub features: FeatureSpec,
    /// Target for the weighted residual norm.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionResult {
    pub profile: Profile<f64>,
    pub params: Vec<f64>,
    /// Weighted residual norm `‖r‖₂`.
    pub misfit: f64,
    /// Per-feature weighted relative residuals.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// True exactly when `misfit ≤ tol`.
    pub converged: bool,
    pub inferred_a: Option<f64>,
}

impl InversionResult {
    /// The result, or [`Error::NotConverged`].
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { iterations: self.iterations, misfit: self.misfit })
        }
    }
}

/// A zero group to be matched by the cluster centroid inside a fixed circle.
#[derive(Debug, Clone, Copy)]
struct Target {
    lambda: C<f64>,
    m: u32,
    radius: f64,
}

struct Model<'a> {
    problem: &'a InversionProblem,
    kind: ProfileKind,
    targets: Vec<Target>,
    spectra: Option<TwoSpectra>,
    gamma: Option<f64>,
}

fn dispersion_for(profile: Profile<f64>) -> Result<Box<dyn Dispersion<f64>>> {
    Ok(match profile.kind() {
        ProfileKind::WaveSpeedRho => Box::new(WaveDispersion::new(profile)?),
        ProfileKind::SchrodingerPotential => Box::new(SchrodingerDispersion::new(profile)?),
    })
}

impl<'a> Model<'a> {
    fn new(problem: &'a InversionProblem) -> Result<Self> {
        let data = &problem.data;
        let kind = match data.equation {
            Equation::Wave => ProfileKind::WaveSpeedRho,
            Equation::Schrodinger => ProfileKind::SchrodingerPotential,
        };
        let groups = data.groups()?;
        let take = problem.features.zeros.unwrap_or(8).min(groups.len());
        let mut points: Vec<C<f64>> = groups.iter().map(|g| g.lambda).collect();
        points.extend(groups.iter().filter(|g| g.pair).map(|g| g.lambda.conj()));
        let targets = groups[..take]
            .iter()
            .map(|g| {
                let gap = points.iter().map(|&z| (z - g.lambda).norm()).filter(|&d| d > 0.0).fold(g.lambda.norm(), f64::min);
                Target { lambda: g.lambda, m: g.multiplicity, radius: 0.4 * gap }
            })
            .collect();
        let spectra = if problem.features.two_spectra > 0 {
            let s = extract_two_spectra(data, problem.b, 4 * problem.features.two_spectra + 16)?;
            let k = problem.features.two_spectra;
            if s.dirichlet.len() < k || s.neumann.len() < k {
                return Err(Error::InsufficientZeros { available: s.dirichlet.len().min(s.neumann.len()), requested: k });
            }
            Some(TwoSpectra { dirichlet: s.dirichlet[..k].to_vec(), neumann: s.neumann[..k].to_vec(), ..s })
        } else {
            None
        };
        let gamma = data.gamma.filter(|g| problem.features.gamma && *g != 0.0);
        if take == 0 && spectra.is_none() && gamma.is_none() {
            return Err(Error::Schema("no features to fit".into()));
        }
        Ok(Self { problem, kind, targets, spectra, gamma })
    }

    fn profile(&self, p: &[f64]) -> Result<Profile<f64>> {
        let profile = self.problem.parametrization.build(self.kind, self.problem.b, p)?;
        if self.problem.regime == Regime::ALessB && self.kind == ProfileKind::WaveSpeedRho {
            let a = travel_time(&profile)?;
            if classify(a, self.problem.b) != Regime::ALessB {
                return Err(Error::RegimeMismatch(format!("trial travel time {a} leaves the a < b regime")));
            }
        }
        Ok(profile)
    }

    fn residuals(&self, p: &[f64]) -> Result<Vec<f64>> {
        let profile = self.profile(p)?;
        let f = dispersion_for(profile.clone())?;
        let mut out = Vec::new();
        let mut scan: Option<Vec<f64>> = None;
        let real_targets = self.targets.iter().filter(|t| t.lambda.im == 0.0).count();
        for t in &self.targets {
            let (count, mean) = circle_moments(f.as_ref(), t.lambda, t.radius, 128)?;
            let matched = (count - f64::from(t.m)).abs() <= 0.05;
            let feature = if matched && t.m == 1 {
                polish(f.as_ref(), mean, t)
            } else if matched {
                mean
            } else if t.lambda.im == 0.0 {
                // cluster left the circle: follow the nearest real zero instead
                let list = match &scan {
                    Some(l) => l,
                    None => {
                        let found = real_positive_zeros(f.as_ref(), real_targets + 4).map(|v| v.iter().map(|r| r.lambda.re).collect()).unwrap_or_default();
                        scan.insert(found)
                    }
                };
                let near = list.iter().copied().min_by(|x, y| (x - t.lambda.re).abs().total_cmp(&(y - t.lambda.re).abs()));
                cre(near.unwrap_or(t.lambda.re + t.radius))
            } else {
                t.lambda + t.radius
            };
            let w = f64::from(t.m).sqrt() / t.lambda.norm();
            out.push(w * (feature.re - t.lambda.re));
            if t.lambda.im != 0.0 {
                out.push(w * (feature.im - t.lambda.im));
            }
        }
        if let Some(s) = &self.spectra {
            let k = s.dirichlet.len();
            let dir = dirichlet_spectrum(&profile, k)?;
            let neu = dirichlet_neumann_spectrum(&profile, k)?;
            out.extend(dir.iter().zip(&s.dirichlet).map(|(x, y)| (x - y) / y.abs()));
            out.extend(neu.iter().zip(&s.neumann).map(|(x, y)| (x - y) / y.abs()));
        }
        if let Some(g) = self.gamma {
            let trial = match self.kind {
                ProfileKind::WaveSpeedRho => maclaurin(&profile)?.gamma,
                ProfileKind::SchrodingerPotential => origin_data_numeric(f.as_ref())?.1.re,
            };
            out.push((trial - g) / g.abs());
        }
        Ok(out)
    }
}

/// Newton from the centroid of a simple zero, kept only if it stays in the circle.
fn polish(f: &dyn Dispersion<f64>, start: C<f64>, t: &Target) -> C<f64> {
    let mut z = start;
    for _ in 0..20 {
        let Ok(v) = f.eval(z) else { return start };
        let step = v.value / v.dvalue;
        if !step.is_finite() {
            return start;
        }
        z -= step;
        if (z - t.lambda).norm() > t.radius {
            return start;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    if t.lambda.im == 0.0 {
        z.im = 0.0;
    }
    z
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Least-squares fit of a profile to spectral data.
///
/// Refusals come first: `a > b` data or regime, then the trivial `γ = 0`
/// case (answered by `ρ ≡ 1` or `V ≡ 0`), then `a = b` or Schrödinger data
/// without `γ`. Failure to reach `tol` is reported through
/// [`InversionResult::converged`], not as an error.
pub fn fit_profile(problem: &InversionProblem) -> Result<InversionResult> {
    let data = &problem.data;
    let b = problem.b;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Schema("b must be positive".into()));
    }
    if problem.regime == Regime::AGreaterB {
        return Err(Error::RegimeNotCovered);
    }
    if let Some((a, tb)) = data.tail {
        match classify(a, tb) {
            Regime::AGreaterB => return Err(Error::RegimeNotCovered),
            r if r != problem.regime => return Err(Error::RegimeMismatch(format!("data lattice is {r:?}, problem declares {:?}", problem.regime))),
            _ => {}
        }
    }
    let param = problem.parametrization;
    let kind = match data.equation {
        Equation::Wave => ProfileKind::WaveSpeedRho,
        Equation::Schrodinger => ProfileKind::SchrodingerPotential,
    };
    if data.is_trivial() {
        return trivial_fit(problem, kind);
    }
    if (problem.regime == Regime::AEqualsB || data.equation == Equation::Schrodinger) && data.gamma.is_none() {
        return Err(Error::GammaRequired);
    }
    let n = param.len();
    if problem.seed.len() != n {
        return Err(Error::Schema(format!("seed has {} entries, family needs {n}", problem.seed.len())));
    }
    let bounds = if problem.bounds.is_empty() { param.default_bounds(kind) } else { problem.bounds.clone() };
    if bounds.len() != n || bounds.iter().any(|(lo, hi)| !(lo <= hi)) {
        return Err(Error::Schema("bounds must give lo <= hi for every parameter".into()));
    }
    let model = Model::new(problem)?;
    let clamp = |p: &mut [f64]| p.iter_mut().zip(&bounds).for_each(|(v, &(lo, hi))| *v = v.clamp(lo, hi));

    let mut p = problem.seed.clone();
    clamp(&mut p);
    let mut r = model.residuals(&p)?;
    let mut misfit = norm(&r);
    let mut mu = 1e-3;
    let mut iterations = 0;
    while iterations < problem.max_iter && misfit > problem.tol {
        iterations += 1;
        let jac = jacobian(&model, &p, &r, &bounds)?;
        let m = r.len();
        let j = DMatrix::from_fn(m, n, |i, k| jac[k][i]);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..16 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += mu * jtj[(k, k)].max(1e-12);
            }
            // freeze parameters pinned at a bound and pushed outward
            let mut rhs = -g.clone();
            for k in 0..n {
                let (lo, hi) = bounds[k];
                if (p[k] <= lo && rhs[k] < 0.0) || (p[k] >= hi && rhs[k] > 0.0) {
                    for l in 0..n {
                        a[(k, l)] = 0.0;
                        a[(l, k)] = 0.0;
                    }
                    a[(k, k)] = 1.0;
                    rhs[k] = 0.0;
                }
            }
            let Some(step) = a.lu().solve(&rhs) else {
                mu *= 4.0;
                continue;
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
            clamp(&mut trial);
            if trial == p {
                break;
            }
            match model.residuals(&trial) {
                Ok(rt) if norm(&rt) < misfit => {
                    p = trial;
                    r = rt;
                    misfit = norm(&r);
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => mu *= 4.0,
            }
        }
        if !accepted {
            break;
        }
    }
    let profile = model.profile(&p)?;
    let inferred_a = match data.equation {
        Equation::Wave => Some(infer_travel_time(data, b).or_else(|_| travel_time(&profile))?),
        Equation::Schrodinger => None,
    };
    Ok(InversionResult { profile, params: p, misfit, residuals: r, iterations, converged: misfit <= problem.tol, inferred_a })
}

/// Columns `∂r/∂pₖ` by central differences, one-sided at a bound.
fn jacobian(model: &Model, p: &[f64], r: &[f64], bounds: &[(f64, f64)]) -> Result<Vec<Vec<f64>>> {
    (0..p.len())
        .into_par_iter()
        .map(|k| {
            let h = 1e-5 * (1.0 + p[k].abs());
            let (lo, hi) = bounds[k];
            let shifted = |d: f64| {
                let mut q = p.to_vec();
                q[k] += d;
                model.residuals(&q)
            };
            let col = if p[k] + h <= hi && p[k] - h >= lo {
                let (plus, minus) = (shifted(h)?, shifted(-h)?);
                plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            } else if p[k] + h <= hi {
                shifted(h)?.iter().zip(r).map(|(a, b)| (a - b) / h).collect()
            } else {
                r.iter().zip(&shifted(-h)?).map(|(a, b)| (a - b) / h).collect()
            };
            Ok(col)
        })
        .collect()
}

/// `γ = 0` data: the dispersion function vanishes identically, which only
/// `ρ ≡ 1` (or `V ≡ 0`) produces. The misfit is `max |D|/scale` over probes.
fn trivial_fit(problem: &InversionProblem, kind: ProfileKind) -> Result<InversionResult> {
    let c = match kind {
        ProfileKind::WaveSpeedRho => 1.0,
        ProfileKind::SchrodingerPotential => 0.0,
    };
    let params = problem.parametrization.constant_params(c);
    let profile = problem.parametrization.build(kind, problem.b, &params)?;
    let f = dispersion_for(profile.clone())?;
    let mut misfit: f64 = 0.0;
    for z in zero_probes(problem.b) {
        let v = f.eval(z)?;
        misfit = misfit.max(v.value.norm() / v.scale.max(f64::MIN_POSITIVE));
    }
    let inferred_a = (kind == ProfileKind::WaveSpeedRho).then_some(problem.b);
    Ok(InversionResult { profile, params, misfit, residuals: vec![misfit], iterations: 0, converged: misfit <= problem.tol, inferred_a })
}

fn default_tol() -> f64 {
    1e-8
}

fn default_iter() -> usize {
    60
}

/// JSON form of [`InversionProblem`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InversionProblemJson {
    pub data: SpectralDataJson,
    pub b: f64,
    pub regime: Regime,
    pub parametrization: Parametrization,
    pub seed: Vec<f64>,
    #[serde(default)]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub features: FeatureSpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_iter")]
    pub max_iter: usize,
}

/// JSON form of [`InversionResult`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InversionResultJson {
    pub profile: ProfileJson,
    pub params: Vec<f64>,
    pub misfit: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub inferred_a: Option<f64>,
}

impl InversionProblem {
    pub fn from_json(json: &InversionProblemJson) -> Result<Self> {
        Ok(Self {
            data: SpectralData::from_json(&json.data)?,
            b: json.b,
            regime: json.regime,
            parametrization: json.parametrization,
            seed: json.seed.clone(),
            bounds: json.bounds.iter().map(|&[lo, hi]| (lo, hi)).collect(),
            features: json.features,
            tol: json.tol,
            max_iter: json.max_iter,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: InversionProblemJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> InversionProblemJson {
        InversionProblemJson {
            data: self.data.to_json(),
            b: self.b,
            regime: self.regime,
            parametrization: self.parametrization,
            seed: self.seed.clone(),
            bounds: self.bounds.iter().map(|&(lo, hi)| [lo, hi]).collect(),
            features: self.features,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

impl InversionResult {
    pub fn to_json(&self) -> InversionResultJson {
        InversionResultJson {
            profile: self.profile.to_json(),
            params: self.params.clone(),
            misfit: self.misfit,
            residuals: self.residuals.clone(),
            iterations: self.iterations,
            converged: self.converged,
            inferred_a: self.inferred_a,
        }
    }
}

//! Invariant suite run by `teig verify`.

use serde::Serialize;
use std::f64::consts::PI;

use teig_core::dispersion::{check_not_identically_zero, maclaurin, taylor_numeric, Dispersion, SchrodingerDispersion, WaveDispersion};
use teig_core::factorization::{sample_dphi_grid, sample_phi_grid, sum_rule_check};
use teig_core::profiles::{liouville_transform, travel_time, ProfileKind, Regularity};
use teig_core::shooting::{phi_via_liouville, shoot_schrodinger, shoot_wave, wave_states, OdeOptions};
use teig_core::spectra::{find_eigenvalues_with, SearchOptions};
use teig_core::{principal_sqrt, ContourBox, Error, Profile, Result, SpectralData, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CheckResult {
    fn measured(name: &'static str, residual: f64, tolerance: f64) -> Self {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        Self { name, status, residual: Some(residual), tolerance, reason: None }
    }

    fn skipped(name: &'static str, tolerance: f64, reason: impl Into<String>) -> Self {
        Self { name, status: Status::Skipped, residual: None, tolerance, reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub profile: String,
    pub trivial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub conjugation: f64,
    pub mean_value: f64,
    pub branch: f64,
    pub liouville: f64,
    pub maclaurin: f64,
    pub sum_rule: f64,
    pub sampling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { conjugation: 1e-10, mean_value: 1e-8, branch: 1e-12, liouville: 1e-7, maclaurin: 1e-6, sum_rule: 1e-4, sampling: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tol: Tolerances,
    /// Lattice cells searched for the sum rule.
    pub cells: usize,
    pub search: SearchOptions<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), cells: 4, search: SearchOptions::default() }
    }
}

/// Deterministic probe points with `1 ≤ |λ| ≤ r_max`, spread in angle.
pub fn probes(count: usize, r_max: f64) -> Vec<C<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let r = r_max.powf((k as f64 + 0.5) / count as f64);
            C::from_polar(r, golden * (k as f64 + 1.0))
        })
        .collect()
}

/// `max |D(λ̄) − conj D(λ)| / scale`.
pub fn conjugation_residual(f: &dyn Dispersion<f64>, points: &[C<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in points {
        let v = f.eval(z)?;
        let w = f.eval(z.conj())?;
        worst = worst.max((w.value - v.value.conj()).norm() / v.scale.max(v.value.norm()));
    }
    Ok(worst)
}

/// `max |D(z) − mean of D on |λ − z| = r|| / max |D|` with 64 trapezoid nodes.
pub fn mean_value_residual(f: &dyn Dispersion<f64>, points: &[C<f64>], radius: f64) -> Result<f64> {
    let n = 64;
    let mut worst: f64 = 0.0;
    for &z in points {
        let center = f.eval(z)?.value;
        let mut acc = C::new(0.0, 0.0);
        let mut size = center.norm();
        for j in 0..n {
            let w = f.eval(z + C::from_polar(radius, 2.0 * PI * j as f64 / n as f64))?.value;
            size = size.max(w.norm());
            acc += w;
        }
        worst = worst.max((acc / n as f64 - center).norm() / size);
    }
    Ok(worst)
}

/// `S φ' − C φ` assembled with `+√λ` and `−√λ`; the prefactors are even in
/// the root, so the two must agree.
pub fn branch_residual(p: &Profile, points: &[C<f64>]) -> Result<f64> {
    let b = p.b();
    let mut worst: f64 = 0.0;
    for &z in points {
        let t = match p.kind() {
            ProfileKind::WaveSpeedRho => shoot_wave(p, z)?,
            ProfileKind::SchrodingerPotential => shoot_schrodinger(p, z)?,
        };
        let k = principal_sqrt(z);
        let assemble = |r: C<f64>| {
            let s = (r * b).sin() / r;
            let c = (r * b).cos();
            (s * t.dphi_b - c * t.phi_b, (s * t.dphi_b).norm() + (c * t.phi_b).norm())
        };
        let (d1, scale) = assemble(k);
        let (d2, _) = assemble(-k);
        worst = worst.max((d1 - d2).norm() / scale);
    }
    Ok(worst)
}

/// Direct wave states against the route through the Liouville image, at
/// `b/4`, `b/2`, `b`.
pub fn liouville_residual(p: &Profile, lambdas: &[C<f64>]) -> Result<f64> {
    let image = liouville_transform(p)?;
    let b = p.b();
    let xs = [b / 4.0, b / 2.0, b];
    let opts = OdeOptions::default();
    let mut worst: f64 = 0.0;
    for &z in lambdas {
        let direct = wave_states(p, z, &xs, &opts)?;
        let via = phi_via_liouville(&image, z, &xs, &opts)?;
        for (d, v) in direct.iter().zip(&via) {
            worst = worst.max((d[0] - v).norm() / d[0].norm());
        }
    }
    Ok(worst)
}

/// Moment formulas for `D1`, `D2` against Cauchy coefficients of the shot `D`.
pub fn maclaurin_residual(p: &Profile) -> Result<f64> {
    let exact = maclaurin(p)?;
    let b = p.b();
    let numeric = taylor_numeric(&WaveDispersion::new(p.clone())?, 0.5 / (b * b), 64)?;
    let size = exact.coeffs[1].abs().max(exact.coeffs[2].abs());
    Ok((1..3).map(|k| (numeric[k] - exact.coeffs[k]).norm() / size).fold(0.0, f64::max))
}

/// Signed `D` samples on the two `b`-lattices against shot `φ(b)`, `φ'(b)`.
pub fn sampling_residual(p: &Profile, n_max: usize) -> Result<f64> {
    let f = WaveDispersion::new(p.clone())?;
    let d = |z: C<f64>| f.eval(z).map(|v| v.value);
    let phi = sample_phi_grid(d, p.b(), n_max)?;
    let dphi = sample_dphi_grid(d, p.b(), n_max)?;
    let mut worst: f64 = 0.0;
    for ((lam, v), (mu, w)) in phi.iter().zip(&dphi) {
        let t = shoot_wave(p, C::new(*lam, 0.0))?;
        let u = shoot_wave(p, C::new(*mu, 0.0))?;
        // size of the solution, so that nodes of φ(b) or φ'(b) do not divide by zero
        let scale_t = t.phi_b.norm().max(t.dphi_b.norm() / lam.sqrt());
        let scale_u = u.phi_b.norm().max(u.dphi_b.norm() / mu.sqrt());
        worst = worst.max((v - t.phi_b).norm() / scale_t).max((w - u.dphi_b).norm() / (scale_u * mu.sqrt()));
    }
    Ok(worst)
}

/// Sum rule over the zeros in the first `cells` lattice cells, completed by
/// the lattice tail. Only meaningful when every cell holds exactly `κ` zeros.
pub fn sum_rule(p: &Profile, cells: usize, search: &SearchOptions<f64>, tol: f64) -> Result<CheckResult> {
    const NAME: &str = "sum_rule";
    let mac = maclaurin(p)?;
    if mac.d != 1 {
        return Ok(CheckResult::skipped(NAME, tol, format!("origin has order {}; the sum rule needs a simple zero", mac.d)));
    }
    let a = travel_time(p)?;
    let b = p.b();
    let gap = (b - a).abs();
    if gap <= 1e-9 * b {
        return Ok(CheckResult::skipped(NAME, tol, "a = b: no lattice to complete the product"));
    }
    let kappa = (a + b) / gap;
    if (kappa - kappa.round()).abs() > 1e-6 {
        return Ok(CheckResult::skipped(NAME, tol, format!("kappa = {kappa} is not an integer, so the lattice tail is only asymptotic")));
    }
    let edge = ((cells as f64 + 0.5) * PI / gap).powi(2);
    let region = ContourBox::new(-edge, edge, -edge, edge);
    let f = WaveDispersion::new(p.clone())?;
    let records = find_eigenvalues_with(&f, &region, search)?;
    let cell = |z: C<f64>| (z.norm().sqrt() * gap / PI - 1e-6).ceil().max(1.0) as usize;
    let kept: Vec<_> = records.into_iter().filter(|r| r.lambda.norm() == 0.0 || cell(r.lambda) <= cells).collect();
    for n in 1..=cells {
        let count: u32 = kept.iter().filter(|r| r.lambda.norm() > 0.0 && cell(r.lambda) == n).map(|r| r.multiplicity).sum();
        if f64::from(count) != kappa.round() {
            return Ok(CheckResult { reason: Some(format!("cell {n} holds {count} zeros, expected {kappa}")), ..CheckResult::measured(NAME, f64::INFINITY, tol) });
        }
    }
    let data = SpectralData::from_records(&kept, teig_core::shooting::Equation::Wave, Some(mac.gamma), Some((a, b)))?;
    Ok(CheckResult::measured(NAME, sum_rule_check(&data, &mac)?, tol))
}

/// Run every applicable check. `D ≡ 0` short-circuits to a trivial report.
pub fn verify_profile(p: &Profile, opts: &VerifyOptions) -> Result<VerifyReport> {
    let f: Box<dyn Dispersion<f64>> = match p.kind() {
        ProfileKind::WaveSpeedRho => Box::new(WaveDispersion::new(p.clone())?),
        ProfileKind::SchrodingerPotential => Box::new(SchrodingerDispersion::new(p.clone())?),
    };
    if let Err(Error::IdenticallyZero) = check_not_identically_zero(f.as_ref()) {
        let message = match p.kind() {
            ProfileKind::WaveSpeedRho => "D identically zero ⇒ ρ≡1",
            ProfileKind::SchrodingerPotential => "D identically zero ⇒ V≡0",
        };
        return Ok(VerifyReport { profile: p.name().to_string(), trivial: true, message: Some(message.into()), checks: vec![], passed: true });
    }
    let tol = opts.tol;
    let wide = probes(16, 1e3);
    let small = probes(8, 1e2);
    let mut checks = vec![
        CheckResult::measured("conjugation", conjugation_residual(f.as_ref(), &wide)?, tol.conjugation),
        CheckResult::measured("mean_value", mean_value_residual(f.as_ref(), &small, 1.0)?, tol.mean_value),
        CheckResult::measured("branch_independence", branch_residual(p, &wide)?, tol.branch),
    ];
    let wave = p.kind() == ProfileKind::WaveSpeedRho;
    checks.push(if !wave {
        CheckResult::skipped("liouville", tol.liouville, "applies to wave-speed profiles")
    } else if p.regularity() != Regularity::C1 {
        CheckResult::skipped("liouville", tol.liouville, "profile is not C1")
    } else {
        CheckResult::measured("liouville", liouville_residual(p, &probes(10, 1e2))?, tol.liouville)
    });
    if wave {
        checks.push(CheckResult::measured("maclaurin", maclaurin_residual(p)?, tol.maclaurin));
        checks.push(sum_rule(p, opts.cells, &opts.search, tol.sum_rule)?);
        checks.push(CheckResult::measured("sampling_identities", sampling_residual(p, 8)?, tol.sampling));
    } else {
        for name in ["maclaurin", "sum_rule", "sampling_identities"] {
            checks.push(CheckResult::skipped(name, 0.0, "defined for the wave dispersion function"));
        }
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport { profile: p.name().to_string(), trivial: false, message: None, checks, passed })
}

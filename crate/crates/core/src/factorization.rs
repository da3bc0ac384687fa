//! Hadamard products `Ξ(λ) = λ^d ∏ (1 − λ/λₙ)` built from spectral data,
//! reconstruction `D = γ Ξ`, the sampling identities on the `b`-lattice, and
//! the sum rule `−γ Σ 1/λⱼ = D2`.

use serde::{Deserialize, Serialize};

use crate::dispersion::MaclaurinData;
use crate::error::{Error, Result};
use crate::scalar::{cre, Real, C};
use crate::shooting::Equation;
use crate::spectra::{EigenvalueRecord, ZeroKind};

/// Zeros, origin order and normalisation of a dispersion function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T> {
    /// Nonzero zeros with multiplicities, closed under conjugation.
    pub zeros: Vec<EigenvalueRecord<T>>,
    /// Order of the zero at the origin.
    pub d: u32,
    /// `γ`; `Some(0)` encodes `D ≡ 0`.
    pub gamma: Option<T>,
    /// `(a, b)` enabling completion of the product on the `(a−b)` lattice.
    pub tail: Option<(T, T)>,
    pub equation: Equation,
}

/// A real zero or a conjugate pair, used as one factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroGroup<T> {
    /// Representative with `Im ≥ 0`.
    pub lambda: C<T>,
    pub multiplicity: u32,
    pub pair: bool,
}

impl<T: Real> ZeroGroup<T> {
    /// `(1 − λ/z)^m`, or `((1 − λ/z)(1 − λ/z̄))^m` as a real quadratic.
    fn factor(&self, lambda: C<T>) -> C<T> {
        let z = self.lambda;
        let f = if self.pair {
            let n2 = z.norm_sqr();
            cre(T::one()) - lambda * (z.re * T::lit(2.0) / n2) + lambda * lambda / n2
        } else {
            cre(T::one()) - lambda / z.re
        };
        f.powu(self.multiplicity)
    }

    /// `Σ 1/λ` over the group, with multiplicity.
    fn reciprocal_sum(&self) -> T {
        let m = T::lit(self.multiplicity as f64);
        if self.pair {
            m * T::lit(2.0) * self.lambda.re / self.lambda.norm_sqr()
        } else {
            m / self.lambda.re
        }
    }
}

impl<T: Real> SpectralData<T> {
    /// Build from located zeros; records at the origin set `d`.
    pub fn from_records(records: &[EigenvalueRecord<T>], equation: Equation, gamma: Option<T>, tail: Option<(T, T)>) -> Result<Self> {
        let mut d = 0;
        let mut zeros = Vec::with_capacity(records.len());
        for r in records {
            if r.kind == ZeroKind::Origin || r.lambda.norm() == T::zero() {
                d += r.multiplicity;
            } else {
                zeros.push(*r);
            }
        }
        let data = Self { zeros, d, gamma, tail, equation };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.equation == Equation::Wave && self.d == 0 && self.gamma != Some(T::zero()) {
            return Err(Error::Schema("wave data must have d >= 1".into()));
        }
        for z in &self.zeros {
            if z.multiplicity == 0 {
                return Err(Error::Schema("zero multiplicity must be positive".into()));
            }
            if z.lambda.norm() == T::zero() {
                return Err(Error::Schema("zeros at the origin belong in d".into()));
            }
        }
        self.groups().map(|_| ())
    }

    /// True when the data encodes an identically vanishing dispersion function.
    pub fn is_trivial(&self) -> bool {
        self.gamma == Some(T::zero())
    }

    /// Factors in ascending `|λ|`, conjugate pairs merged.
    pub fn groups(&self) -> Result<Vec<ZeroGroup<T>>> {
        let mut used = vec![false; self.zeros.len()];
        let mut out = Vec::new();
        for i in 0..self.zeros.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let r = self.zeros[i];
            let z = r.lambda;
            let tol = T::lit(1e-9) * (T::one() + z.norm());
            if z.im.abs() <= tol {
                out.push(ZeroGroup { lambda: cre(z.re), multiplicity: r.multiplicity, pair: false });
                continue;
            }
            let j = (0..self.zeros.len())
                .find(|&j| !used[j] && (self.zeros[j].lambda - z.conj()).norm() <= T::lit(1e-6) * (T::one() + z.norm()) && self.zeros[j].multiplicity == r.multiplicity)
                .ok_or_else(|| Error::NotConjugateClosed(format!("no conjugate partner for {z}")))?;
            used[j] = true;
            let up = if z.im > T::zero() { z } else { z.conj() };
            out.push(ZeroGroup { lambda: up, multiplicity: r.multiplicity, pair: true });
        }
        out.sort_by(|a, b| a.lambda.norm().partial_cmp(&b.lambda.norm()).unwrap_or(std::cmp::Ordering::Equal));
        Ok(out)
    }

    /// Truncation using everything known: complete lattice cells (all but
    /// the last occupied one) with a tail model, otherwise every group.
    pub fn default_truncation(&self) -> Result<usize> {
        let groups = self.groups()?;
        Ok(match self.kappa() {
            Some((_, gap)) => groups.iter().map(|g| cell(g.lambda, gap)).max().unwrap_or(1).saturating_sub(1).max(1),
            None => groups.len(),
        })
    }

    /// Lattice exponent `κ = (a+b)/|b−a|`: asymptotic zeros per lattice cell.
    fn kappa(&self) -> Option<(T, T)> {
        let (a, b) = self.tail?;
        let gap = (b - a).abs();
        (gap > T::zero()).then(|| ((a + b) / gap, gap))
    }
}

/// Lattice cell `n` of a zero: `⌈|√z|·|b−a|/π⌉`.
pub fn cell<T: Real>(z: C<T>, gap: T) -> usize {
    let x = z.norm().sqrt() * gap / T::PI() - T::lit(1e-6);
    x.ceil().max(T::one()).to_usize().unwrap_or(usize::MAX)
}

/// `κ Σ_{n>N} log(1 − x/n²)`: explicit terms, then an Euler–Maclaurin remainder.
fn log_tail<T: Real>(x: C<T>, kappa: T, n0: usize) -> C<T> {
    let floor = (x.norm().sqrt() * T::lit(100.0)).to_usize().unwrap_or(0);
    let k = (n0 + 2000).max(floor);
    let mut acc = cre(T::zero());
    for n in (n0 + 1)..=k {
        let n2 = T::of_usize(n) * T::of_usize(n);
        acc += (cre(T::one()) - x / n2).ln();
    }
    // Σ_{n>K} 1/n^p ≈ K^{1−p}/(p−1) − K^{−p}/2 + p K^{−p−1}/12
    let kf = T::of_usize(k);
    let zeta_tail = |p: i32| {
        let pf = T::lit(p as f64);
        kf.powi(1 - p) / (pf - T::one()) - kf.powi(-p) / T::lit(2.0) + pf * kf.powi(-p - 1) / T::lit(12.0)
    };
    acc -= x * zeta_tail(2) + x * x * (zeta_tail(4) / T::lit(2.0)) + x * x * x * (zeta_tail(6) / T::lit(3.0));
    acc * kappa
}

/// `Ξ(λ)`. Without a tail model, `truncation` counts zero groups (a
/// conjugate pair is one group). With one, it counts lattice cells: zeros in
/// cells `1..=N` enter exactly and cells beyond contribute `(1 − x/n²)^κ`,
/// `x = λ(b−a)²/π²`.
pub fn xi_eval<T: Real>(data: &SpectralData<T>, lambda: C<T>, truncation: usize) -> Result<C<T>> {
    let groups = data.groups()?;
    let mut value = lambda.powu(data.d);
    match data.kappa() {
        None => {
            if truncation > groups.len() {
                return Err(Error::InsufficientZeros { available: groups.len(), requested: truncation });
            }
            for g in &groups[..truncation] {
                value *= g.factor(lambda);
            }
        }
        Some((kappa, gap)) => {
            for g in groups.iter().filter(|g| cell(g.lambda, gap) <= truncation) {
                value *= g.factor(lambda);
            }
            let x = lambda * (gap * gap / (T::PI() * T::PI()));
            value *= log_tail(x, kappa, truncation).exp();
        }
    }
    Ok(value)
}

/// `D(λ) = γ Ξ(λ)`.
pub fn reconstruct_d<T: Real>(data: &SpectralData<T>, lambda: C<T>, truncation: usize) -> Result<C<T>> {
    let gamma = data.gamma.ok_or(Error::GammaMissing)?;
    if gamma == T::zero() {
        return Ok(cre(T::zero()));
    }
    Ok(xi_eval(data, lambda, truncation)? * gamma)
}

/// `(n²π²/b², (−1)^{n+1} D(n²π²/b²))` for `n = 1..=n_max`: the values of `φ(b;·)`.
pub fn sample_phi_grid<T: Real, F: Fn(C<T>) -> Result<C<T>>>(d_source: F, b: T, n_max: usize) -> Result<Vec<(T, C<T>)>> {
    (1..=n_max)
        .map(|n| {
            let k = T::of_usize(n) * T::PI() / b;
            let lam = k * k;
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            Ok((lam, d_source(cre(lam))? * sign))
        })
        .collect()
}

/// `((2n−1)²π²/(4b²), (−1)^{n+1} √λ D(λ))`: the values of `φ'(b;·)`.
pub fn sample_dphi_grid<T: Real, F: Fn(C<T>) -> Result<C<T>>>(d_source: F, b: T, n_max: usize) -> Result<Vec<(T, C<T>)>> {
    (1..=n_max)
        .map(|n| {
            let s = (T::of_usize(2 * n) - T::one()) * T::PI() / (T::lit(2.0) * b);
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            Ok((s * s, d_source(cre(s * s))? * (sign * s)))
        })
        .collect()
}

/// `|−γ Σ m/λⱼ − D2| / |D2|` over the data's zeros. With a tail model the
/// last (possibly incomplete) lattice cell is dropped and cells beyond are
/// completed with `κ (b−a)²/π² Σ 1/n²`.
pub fn sum_rule_check<T: Real>(data: &SpectralData<T>, maclaurin: &MaclaurinData<T>) -> Result<T> {
    if data.d != 1 {
        return Err(Error::WrongOriginOrder(data.d));
    }
    let gamma = data.gamma.unwrap_or(maclaurin.gamma);
    let groups = data.groups()?;
    let sum = match data.kappa() {
        None => groups.iter().fold(T::zero(), |s, g| s + g.reciprocal_sum()),
        Some((kappa, gap)) => {
            let last = groups.iter().map(|g| cell(g.lambda, gap)).max().unwrap_or(1);
            let n0 = last.saturating_sub(1);
            let partial = groups.iter().filter(|g| cell(g.lambda, gap) <= n0).fold(T::zero(), |s, g| s + g.reciprocal_sum());
            let tail = inverse_square_tail::<T>(n0) * kappa * gap * gap / (T::PI() * T::PI());
            partial + tail
        }
    };
    let rhs = maclaurin.sum_rule_rhs;
    Ok(((-gamma * sum) - rhs).abs() / rhs.abs())
}

/// `Σ_{n>N} 1/n²`.
fn inverse_square_tail<T: Real>(n0: usize) -> T {
    let k = n0 + 2000;
    let mut acc = T::zero();
    for n in (n0 + 1..=k).rev() {
        acc += T::one() / (T::of_usize(n) * T::of_usize(n));
    }
    let kf = T::of_usize(k);
    acc + T::one() / kf - T::one() / (T::lit(2.0) * kf * kf) + T::one() / (T::lit(6.0) * kf * kf * kf)
}

/// JSON form of one zero.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ZeroJson {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
    /// Lattice index `n`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TailJson {
    pub a: f64,
    pub b: f64,
}

/// JSON form of [`SpectralData`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectralDataJson {
    pub equation: Equation,
    pub d: u32,
    pub gamma: Option<f64>,
    pub zeros: Vec<ZeroJson>,
    #[serde(default)]
    pub tail: Option<TailJson>,
}

impl SpectralData<f64> {
    pub fn from_json(json: &SpectralDataJson) -> Result<Self> {
        let zeros = json
            .zeros
            .iter()
            .map(|z| {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Schema("zero coordinates must be finite".into()));
                }
                let kind = if z.im != 0.0 {
                    ZeroKind::ComplexPair
                } else if z.re > 0.0 {
                    ZeroKind::RealPositive
                } else {
                    ZeroKind::RealNegative
                };
                Ok(EigenvalueRecord { lambda: C::new(z.re, z.im), multiplicity: z.mult, kind, index_hint: z.index, residual: 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        let data = Self { zeros, d: json.d, gamma: json.gamma, tail: json.tail.as_ref().map(|t| (t.a, t.b)), equation: json.equation };
        data.validate()?;
        Ok(data)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: SpectralDataJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> SpectralDataJson {
        SpectralDataJson {
            equation: self.equation,
            d: self.d,
            gamma: self.gamma,
            zeros: self.zeros.iter().map(|z| ZeroJson { re: z.lambda.re, im: z.lambda.im, mult: z.multiplicity, index: z.index_hint }).collect(),
            tail: self.tail.map(|(a, b)| TailJson { a, b }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{eval_d_constant_rho, maclaurin};
    use crate::profiles::{Profile, ProfileKind};
    use std::f64::consts::PI;

    fn triple(l: f64) -> EigenvalueRecord<f64> {
        EigenvalueRecord { lambda: cre(l), multiplicity: 3, kind: ZeroKind::RealPositive, index_hint: None, residual: 0.0 }
    }

    fn quarter(n: usize, tail: bool) -> SpectralData<f64> {
        let zeros = (1..=n).map(|j| triple(4.0 * (j * j) as f64 * PI * PI)).collect();
        SpectralData { zeros, d: 1, gamma: Some(0.25), tail: tail.then_some((0.5, 1.0)), equation: Equation::Wave }
    }

    #[test]
    fn xi_examples() {
        let data = quarter(200, false);
        assert_eq!(xi_eval(&data, cre(0.0), 200).unwrap(), cre(0.0));
        assert!(xi_eval(&data, cre(4.0 * PI * PI), 200).unwrap().norm() < 1e-14);
        let xi = xi_eval(&data, cre(PI * PI), 200).unwrap();
        assert!((xi.re - 8.0 / PI).abs() < 0.02 * 8.0 / PI);
        assert!(matches!(xi_eval(&data, cre(1.0), 201), Err(Error::InsufficientZeros { .. })));
    }

    #[test]
    fn tail_makes_exact_lattice_exact() {
        let data = quarter(20, true);
        for l in [cre(PI * PI), C::new(3.0, 5.0), cre(-50.0)] {
            let d = reconstruct_d(&data, l, 10).unwrap();
            let exact = eval_d_constant_rho(0.25, 1.0, l);
            assert!((d - exact).norm() < 1e-9 * exact.norm(), "{l}: {d} vs {exact}");
        }
    }

    #[test]
    fn sampling_identities_for_constant_rho() {
        let src = |l: C<f64>| Ok(eval_d_constant_rho(0.25, 1.0, l));
        let phi = sample_phi_grid(src, 1.0, 3).unwrap();
        assert!((phi[0].1.re - 2.0 / PI).abs() < 1e-14);
        assert!(phi[1].1.norm() < 1e-14);
        let dphi = sample_dphi_grid(src, 1.0, 1).unwrap();
        assert!((dphi[0].1.re - 0.5f64.sqrt()).abs() < 1e-14);
        let zero = sample_phi_grid(|_| Ok(cre(0.0)), 1.0, 4).unwrap();
        assert!(zero.iter().all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn sum_rule_quarter() {
        let m = maclaurin(&Profile::constant(ProfileKind::WaveSpeedRho, 0.25, 1.0).unwrap()).unwrap();
        assert!(sum_rule_check(&quarter(200, true), &m).unwrap() < 1e-10);
        assert!(sum_rule_check(&quarter(1, false), &m).unwrap() > 0.1);
        let mut two = quarter(3, false);
        two.d = 2;
        assert_eq!(sum_rule_check(&two, &m), Err(Error::WrongOriginOrder(2)));
    }

    #[test]
    fn gamma_scaling() {
        let mut data = quarter(30, true);
        let l = C::new(7.0, -2.0);
        let base = reconstruct_d(&data, l, 20).unwrap();
        let xi = xi_eval(&data, l, 20).unwrap();
        data.gamma = Some(2.5);
        assert!((reconstruct_d(&data, l, 20).unwrap() - base * 10.0).norm() < 1e-14 * base.norm() * 10.0);
        assert_eq!(xi_eval(&data, l, 20).unwrap(), xi);
    }

    #[test]
    fn json_round_trip_and_closure() {
        let data = quarter(3, true);
        let s = serde_json::to_string(&data.to_json()).unwrap();
        assert_eq!(SpectralData::from_json_str(&s).unwrap().to_json(), data.to_json());
        let open = r#"{"equation":"wave","d":1,"gamma":1.0,"zeros":[{"re":1.0,"im":2.0,"mult":1}],"tail":null}"#;
        assert!(matches!(SpectralData::from_json_str(open), Err(Error::NotConjugateClosed(_))));
        let bad = r#"{"equation":"wave","d":0,"gamma":1.0,"zeros":[]}"#;
        assert!(matches!(SpectralData::from_json_str(bad), Err(Error::Schema(_))));
    }
}

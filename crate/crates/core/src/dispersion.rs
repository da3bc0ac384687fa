//! Dispersion functions `D(λ) = S(λ)φ'(b;λ) − C(λ)φ(b;λ)` with
//! `S = sin(√λ b)/√λ`, `C = cos(√λ b)`, their Schrödinger analogue, closed
//! forms for constant coefficients, and Maclaurin data at the origin.

use crate::error::{Error, Result};
use crate::profiles::{travel_time, MomentTable, Profile, ProfileKind};
use crate::scalar::{cre, principal_sqrt, Real, C};
use crate::shooting::{shoot_schrodinger, shoot_wave, Equation, ShootingTrace};

/// Below `|λ| b²` of this size the prefactors come from their power series.
pub const SERIES_RADIUS: f64 = 0.1;
const SERIES_TERMS: usize = 8;

/// Relative cancellation below which `D` is treated as zero at a probe.
pub const ZERO_PROBE_RATIO: f64 = 1e-9;
pub const ZERO_PROBES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionValue<T> {
    pub lambda: C<T>,
    pub value: C<T>,
    /// `dD/dλ`.
    pub dvalue: C<T>,
    /// `|S φ'| + |C φ|`, the size of the two cancelling terms.
    pub scale: T,
    pub equation: Equation,
}

/// `(S, C, dS/dλ, dC/dλ)` for radius `b`.
pub fn prefactors<T: Real>(b: T, lambda: C<T>) -> [C<T>; 4] {
    let z = lambda * (b * b);
    if z.norm() < T::lit(SERIES_RADIUS) {
        // S = b Σ (−z)^k/(2k+1)!, C = Σ (−z)^k/(2k)!
        let mut s = cre(T::zero());
        let mut c = cre(T::zero());
        let mut ds = cre(T::zero());
        let mut dc = cre(T::zero());
        let mut pow = cre(T::one());
        let mut fact_even = T::one();
        let mut fact_odd = T::one();
        for k in 0..SERIES_TERMS {
            if k > 0 {
                fact_even *= T::of_usize((2 * k - 1) * (2 * k));
                fact_odd *= T::of_usize((2 * k) * (2 * k + 1));
            }
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            s += pow * (sign / fact_odd);
            c += pow * (sign / fact_even);
            if k + 1 < SERIES_TERMS {
                let kn = T::of_usize(k + 1);
                let nsign = -sign;
                let next_odd = fact_odd * T::of_usize((2 * k + 2) * (2 * k + 3));
                let next_even = fact_even * T::of_usize((2 * k + 1) * (2 * k + 2));
                ds += pow * (nsign * kn / next_odd);
                dc += pow * (nsign * kn / next_even);
            }
            pow *= z;
        }
        let b2 = b * b;
        [s * b, c, ds * (b * b2), dc * b2]
    } else {
        let r = principal_sqrt(lambda);
        let arg = r * b;
        let s = arg.sin() / r;
        let c = arg.cos();
        let two = T::lit(2.0);
        [s, c, (c * b - s) / (lambda * two), -s * (b / two)]
    }
}

fn assemble<T: Real>(b: T, t: &ShootingTrace<T>) -> DispersionValue<T> {
    let [s, c, ds, dc] = prefactors(b, t.lambda);
    DispersionValue {
        lambda: t.lambda,
        value: s * t.dphi_b - c * t.phi_b,
        dvalue: ds * t.dphi_b + s * t.dlam_dphi_b - dc * t.phi_b - c * t.dlam_phi_b,
        scale: (s * t.dphi_b).norm() + (c * t.phi_b).norm(),
        equation: t.equation,
    }
}

/// Wave dispersion function from a shooting trace.
pub fn eval_d<T: Real>(p: &Profile<T>, lambda: C<T>) -> Result<DispersionValue<T>> {
    Ok(assemble(p.b(), &shoot_wave(p, lambda)?))
}

/// Schrödinger dispersion function `D̃(μ)`.
pub fn eval_d_schrodinger<T: Real>(p: &Profile<T>, mu: C<T>) -> Result<DispersionValue<T>> {
    Ok(assemble(p.b(), &shoot_schrodinger(p, mu)?))
}

/// Closed form for constant `ρ`: `S(λ) C(λρ) − C(λ) S(λρ)`, with derivative.
pub fn constant_rho_value<T: Real>(rho: T, b: T, lambda: C<T>) -> DispersionValue<T> {
    let [s, c, ds, dc] = prefactors(b, lambda);
    let [si, ci, dsi, dci] = prefactors(b, lambda * rho);
    DispersionValue {
        lambda,
        value: s * ci - c * si,
        dvalue: ds * ci + s * dci * rho - dc * si - c * dsi * rho,
        scale: (s * ci).norm() + (c * si).norm(),
        equation: Equation::Wave,
    }
}

pub fn eval_d_constant_rho<T: Real>(rho: T, b: T, lambda: C<T>) -> C<T> {
    constant_rho_value(rho, b, lambda).value
}

/// Closed form for constant `V`: `S(μ) C(μ−V) − C(μ) S(μ−V)`, with derivative.
pub fn constant_potential_value<T: Real>(v: T, b: T, mu: C<T>) -> DispersionValue<T> {
    let [s, c, ds, dc] = prefactors(b, mu);
    let [si, ci, dsi, dci] = prefactors(b, mu - v);
    DispersionValue {
        lambda: mu,
        value: s * ci - c * si,
        dvalue: ds * ci + s * dci - dc * si - c * dsi,
        scale: (s * ci).norm() + (c * si).norm(),
        equation: Equation::Schrodinger,
    }
}

/// Anything the root finder can evaluate: `D` and `D'` at a complex point.
pub trait Dispersion<T: Real>: Sync {
    fn eval(&self, lambda: C<T>) -> Result<DispersionValue<T>>;
    fn equation(&self) -> Equation;
    /// Radius `b` of the underlying problem.
    fn radius(&self) -> T;
    /// Travel time `a` (wave) or `b` (Schrödinger), for the asymptotic lattice.
    fn lattice_time(&self) -> Option<T> {
        None
    }
}

/// Wave dispersion of a profile with its travel time cached.
#[derive(Debug, Clone)]
pub struct WaveDispersion<T> {
    profile: Profile<T>,
    a: T,
}

impl<T: Real> WaveDispersion<T> {
    pub fn new(profile: Profile<T>) -> Result<Self> {
        let a = travel_time(&profile)?;
        Ok(Self { profile, a })
    }
    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }
    pub fn travel_time(&self) -> T {
        self.a
    }
}

impl<T: Real> Dispersion<T> for WaveDispersion<T> {
    fn eval(&self, lambda: C<T>) -> Result<DispersionValue<T>> {
        eval_d(&self.profile, lambda)
    }
    fn equation(&self) -> Equation {
        Equation::Wave
    }
    fn radius(&self) -> T {
        self.profile.b()
    }
    fn lattice_time(&self) -> Option<T> {
        Some(self.a)
    }
}

#[derive(Debug, Clone)]
pub struct SchrodingerDispersion<T> {
    profile: Profile<T>,
}

impl<T: Real> SchrodingerDispersion<T> {
    pub fn new(profile: Profile<T>) -> Result<Self> {
        if profile.kind() != ProfileKind::SchrodingerPotential {
            return Err(Error::InvalidProfile("expected a potential".into()));
        }
        Ok(Self { profile })
    }
    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }
}

impl<T: Real> Dispersion<T> for SchrodingerDispersion<T> {
    fn eval(&self, mu: C<T>) -> Result<DispersionValue<T>> {
        eval_d_schrodinger(&self.profile, mu)
    }
    fn equation(&self) -> Equation {
        Equation::Schrodinger
    }
    fn radius(&self) -> T {
        self.profile.b()
    }
}

/// Closed-form wave dispersion for constant `ρ`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantRho<T> {
    pub rho: T,
    pub b: T,
}

impl<T: Real> Dispersion<T> for ConstantRho<T> {
    fn eval(&self, lambda: C<T>) -> Result<DispersionValue<T>> {
        Ok(constant_rho_value(self.rho, self.b, lambda))
    }
    fn equation(&self) -> Equation {
        Equation::Wave
    }
    fn radius(&self) -> T {
        self.b
    }
    fn lattice_time(&self) -> Option<T> {
        Some(self.rho.sqrt() * self.b)
    }
}

/// Closed-form Schrödinger dispersion for constant `V`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPotential<T> {
    pub v: T,
    pub b: T,
}

impl<T: Real> Dispersion<T> for ConstantPotential<T> {
    fn eval(&self, mu: C<T>) -> Result<DispersionValue<T>> {
        Ok(constant_potential_value(self.v, self.b, mu))
    }
    fn equation(&self) -> Equation {
        Equation::Schrodinger
    }
    fn radius(&self) -> T {
        self.b
    }
}

/// Deterministic probe points used to recognise `D ≡ 0`.
pub fn zero_probes<T: Real>(b: T) -> Vec<C<T>> {
    (0..ZERO_PROBES)
        .map(|k| {
            let r = T::lit(3.0 + 7.3 * k as f64) / (b * b);
            let theta = T::lit(0.3 + 0.37 * k as f64);
            C::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

/// `Err(IdenticallyZero)` if `D` cancels to rounding level at every probe.
pub fn check_not_identically_zero<T: Real, F: Dispersion<T> + ?Sized>(f: &F) -> Result<()> {
    let ratio = T::lit(ZERO_PROBE_RATIO);
    for lambda in zero_probes(f.radius()) {
        let v = f.eval(lambda)?;
        if v.value.norm() > ratio * v.scale {
            return Ok(());
        }
    }
    Err(Error::IdenticallyZero)
}

/// Maclaurin data of the wave dispersion function at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaclaurinData<T> {
    /// Order of the zero at the origin.
    pub d: u32,
    /// `[D0, D1, D2]`.
    pub coeffs: [T; 3],
    /// `D1` if `d = 1`, `D2` if `d = 2`.
    pub gamma: T,
    /// Right-hand side of `−γ Σ 1/λⱼ = D2`.
    pub sum_rule_rhs: T,
}

/// Relative threshold for deciding that a Maclaurin coefficient vanishes.
pub const ORDER_THRESHOLD: f64 = 1e-10;

/// `D1 = b³/3 − M2(b)` and `D2 = −b⁵/30 + b M1² − M1 M2 − (b³/3) M1 + (b²/2) M2 − ∫ M1²`.
pub fn maclaurin<T: Real>(p: &Profile<T>) -> Result<MaclaurinData<T>> {
    if p.kind() != ProfileKind::WaveSpeedRho {
        return Err(Error::InvalidProfile("Maclaurin moments need a wave-speed profile".into()));
    }
    let b = p.b();
    let table = MomentTable::new(p);
    let (m1, m2, sq) = (table.m1(b), table.m2(b), table.m1_squared_integral(b));
    let b2 = b * b;
    let b3 = b2 * b;
    let d1 = b3 / T::lit(3.0) - m2;
    let d2 = -b3 * b2 / T::lit(30.0) + b * m1 * m1 - m1 * m2 - b3 / T::lit(3.0) * m1 + b2 / T::lit(2.0) * m2 - sq;
    let thr = T::lit(ORDER_THRESHOLD) * d1.abs().max(d2.abs()).max(b3);
    let (d, gamma) = if d1.abs() > thr {
        (1, d1)
    } else if d2.abs() > thr {
        (2, d2)
    } else {
        return Err(Error::DegenerateExpansion);
    };
    Ok(MaclaurinData { d, coeffs: [T::zero(), d1, d2], gamma, sum_rule_rhs: d2 })
}

/// Taylor coefficients `[D0, D1, D2]` of any dispersion function, by the
/// trapezoid rule for the Cauchy integral on `|λ| = radius` (numeric only).
pub fn taylor_numeric<T: Real, F: Dispersion<T> + ?Sized>(f: &F, radius: T, points: usize) -> Result<[C<T>; 3]> {
    let mut acc = [cre(T::zero()); 3];
    let n = T::of_usize(points);
    for j in 0..points {
        let theta = T::TAU() * T::of_usize(j) / n;
        let w = C::new(theta.cos(), theta.sin());
        let v = f.eval(w * radius)?.value;
        let mut wk = cre(T::one());
        for slot in acc.iter_mut() {
            *slot += v / wk;
            wk *= w;
        }
    }
    let mut rk = T::one();
    for slot in acc.iter_mut() {
        *slot = *slot / (n * rk);
        rk *= radius;
    }
    Ok(acc)
}

/// Order and leading coefficient at the origin from [`taylor_numeric`]:
/// `(d, γ)` with `γ` the first coefficient above `ORDER_THRESHOLD` relative.
pub fn origin_data_numeric<T: Real, F: Dispersion<T> + ?Sized>(f: &F) -> Result<(u32, C<T>)> {
    let b = f.radius();
    let coeffs = taylor_numeric(f, T::lit(0.5) / (b * b), 64)?;
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm())).max(T::epsilon());
    for (k, c) in coeffs.iter().enumerate() {
        if c.norm() > T::lit(1e-8) * scale {
            return Ok((k as u32, *c));
        }
    }
    Err(Error::DegenerateExpansion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Piece;
    use crate::profiles::Regularity;
    use std::f64::consts::PI;

    fn rho(v: f64) -> Profile<f64> {
        Profile::constant(ProfileKind::WaveSpeedRho, v, 1.0).unwrap()
    }

    // Closed form for ρ ≡ 1/4, b = 1.
    fn quarter_closed(l: C<f64>) -> C<f64> {
        let s = l.sqrt();
        (s * 0.5).sin().powi(3) * 2.0 / s
    }

    #[test]
    fn prefactor_series_matches_closed_form_at_switch() {
        for lam in [C::new(0.099, 0.0), C::new(0.0, 0.0999), C::new(-0.07, 0.07)] {
            let ser = prefactors(1.0, lam);
            let r = lam.sqrt();
            let exact = [r.sin() / r, r.cos(), (r.cos() - r.sin() / r) / (lam * 2.0), -r.sin() / r * 0.5];
            for k in 0..4 {
                assert!((ser[k] - exact[k]).norm() < 1e-13, "{k}: {} vs {}", ser[k], exact[k]);
            }
        }
        let at0 = prefactors(2.0_f64, C::new(0.0, 0.0));
        assert_eq!(at0[0], cre(2.0));
        assert_eq!(at0[1], cre(1.0));
        assert!((at0[2] - cre(-8.0 / 6.0)).norm() < 1e-15);
        assert!((at0[3] - cre(-2.0)).norm() < 1e-15);
    }

    #[test]
    fn examples_wave() {
        let v = eval_d(&rho(1.0), C::new(17.0, 3.0)).unwrap();
        assert!(v.value.norm() <= 1e-12 * v.scale);
        let p = Profile::hermite(ProfileKind::WaveSpeedRho, &[0.0, 1.0], &[0.3, 0.6], &[0.2, -0.1]).unwrap();
        assert_eq!(eval_d(&p, C::new(0.0, 0.0)).unwrap().value.norm(), 0.0);
        let v = eval_d(&rho(0.25), cre(PI * PI)).unwrap();
        assert!((v.value - cre(2.0 / PI)).norm() < 1e-12);
    }

    #[test]
    fn closed_forms() {
        assert!(eval_d_constant_rho(0.25, 1.0, cre(4.0 * PI * PI)).norm() < 1e-14);
        assert!(eval_d_constant_rho(1.0, 1.0, C::new(3.0, 9.0)).norm() == 0.0);
        assert!(eval_d_constant_rho(4.0 / 9.0, 1.0, cre(9.0 * PI * PI)).norm() < 1e-14);
        let l = C::new(31.0, -4.0);
        assert!((eval_d_constant_rho(0.25, 1.0, l) - quarter_closed(l)).norm() < 1e-13);
    }

    #[test]
    fn derivative_matches_closed_form_difference() {
        for l in [C::new(31.0, -4.0), C::new(0.03, 0.01), C::new(-20.0, 1.0)] {
            let v = constant_rho_value(0.25, 1.0, l);
            let h = 1e-5 * (1.0 + l.norm());
            let fd = (quarter_closed(l + h) - quarter_closed(l - h)) / (2.0 * h);
            assert!((v.dvalue - fd).norm() < 1e-7 * (1.0 + fd.norm()), "{l}: {} vs {fd}", v.dvalue);
            let w = eval_d(&rho(0.25), l).unwrap();
            assert!((w.dvalue - v.dvalue).norm() < 1e-10 * (1.0 + v.dvalue.norm()));
        }
    }

    #[test]
    fn examples_schrodinger() {
        let free = Profile::constant(ProfileKind::SchrodingerPotential, 0.0, 1.0).unwrap();
        assert!(eval_d_schrodinger(&free, C::new(5.0, 2.0)).unwrap().value.norm() < 1e-14);
        assert!(eval_d_schrodinger(&free, cre(0.0)).unwrap().value.norm() == 0.0);
        let two = Profile::constant(ProfileKind::SchrodingerPotential, 2.0, 1.0).unwrap();
        let v = eval_d_schrodinger(&two, cre(2.0)).unwrap().value;
        let r = 2f64.sqrt();
        let expected = r.sin() / r - r.cos();
        assert!((v.re - expected).abs() < 1e-13 && v.im == 0.0);
        assert!((expected - 0.542_512).abs() < 1e-6);
        let closed = constant_potential_value(2.0, 1.0, C::new(40.0, 6.0));
        let direct = eval_d_schrodinger(&two, C::new(40.0, 6.0)).unwrap();
        assert!((closed.value - direct.value).norm() < 1e-12 * (1.0 + closed.value.norm()));
        assert!((closed.dvalue - direct.dvalue).norm() < 1e-11 * (1.0 + closed.dvalue.norm()));
    }

    #[test]
    fn maclaurin_quarter() {
        // (2/√λ) sin³(√λ/2) = λ/4 − λ²/32 + 13λ³/7680 + …
        let m = maclaurin(&rho(0.25)).unwrap();
        assert_eq!(m.d, 1);
        assert!((m.coeffs[1] - 0.25).abs() < 1e-15);
        assert!((m.coeffs[2] + 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(m.gamma, m.coeffs[1]);
        assert!(matches!(maclaurin(&rho(1.0)), Err(Error::DegenerateExpansion)));
    }

    #[test]
    fn second_order_origin() {
        // Profiles with b³/3 = M2(b) have a double zero at the origin.
        // ρ = c0 + c2 x² on [0,1]: M2 = c0/3 + c2/5, so c0 = 1 − 3c2/5.
        let c2 = 0.5_f64;
        let p = Profile::new(
            ProfileKind::WaveSpeedRho,
            Regularity::C1,
            vec![Piece { x0: 0.0, x1: 1.0, coeffs: [1.0 - 0.6 * c2, 0.0, c2, 0.0] }],
            "double",
        )
        .unwrap();
        let m = maclaurin(&p).unwrap();
        assert_eq!(m.d, 2);
        assert_eq!(m.gamma, m.coeffs[2]);
        let f = WaveDispersion::new(p).unwrap();
        let (d, g) = origin_data_numeric(&f).unwrap();
        assert_eq!(d, 2);
        assert!((g.re - m.gamma).abs() < 1e-8 * m.gamma.abs());
    }

    #[test]
    fn identically_zero_detection() {
        assert_eq!(check_not_identically_zero(&WaveDispersion::new(rho(1.0)).unwrap()), Err(Error::IdenticallyZero));
        assert!(check_not_identically_zero(&WaveDispersion::new(rho(0.25)).unwrap()).is_ok());
        let free = Profile::constant(ProfileKind::SchrodingerPotential, 0.0, 1.0).unwrap();
        assert_eq!(check_not_identically_zero(&SchrodingerDispersion::new(free).unwrap()), Err(Error::IdenticallyZero));
        assert!(check_not_identically_zero(&ConstantPotential { v: 1e-3, b: 1.0 }).is_ok());
    }
}

//! Complex-parameter initial-value problems `φ'' + λρφ = 0` and
//! `−φ'' + Vφ = μφ` with `φ(0) = 0`, `φ'(0) = 1`, co-integrated with their
//! λ-derivatives.
//!
//! Coefficients are cubic on each piece, so the solution is entire there and
//! is advanced by Taylor series generated from the exact coefficient
//! recurrence. The order adapts per step until trailing terms drop below
//! `tol`; step lengths keep `K·h` bounded so partial sums cannot cancel badly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{LiouvilleImage, Piece, Profile, ProfileKind};
use crate::scalar::{cre, principal_sqrt, Real, C};

/// Largest `|λ|` accepted by the integrator.
pub const LAMBDA_ENVELOPE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Wave,
    Schrodinger,
}

/// Boundary values at `x = b` and their derivatives in the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingTrace<T> {
    pub lambda: C<T>,
    pub phi_b: C<T>,
    pub dphi_b: C<T>,
    pub dlam_phi_b: C<T>,
    pub dlam_dphi_b: C<T>,
    pub equation: Equation,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    /// Relative size below which trailing Taylor terms are dropped.
    pub tol: T,
    /// Upper bound on `K·h`, where `K²` bounds `|c(x)|` on the step.
    pub max_kh: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self { tol: T::epsilon() * T::lit(0.5), max_kh: T::lit(2.5), max_steps: 2_000_000 }
    }
}

/// `[φ, φ', ∂φ, ∂φ']` at a point.
pub type State<T> = [C<T>; 4];

const MAX_ORDER: usize = 96;

/// Coefficients of `c(x)` and `∂c/∂λ` in `t = x − x_c`, for `φ'' = −c φ`.
type LocalCoef<T> = ([C<T>; 4], [C<T>; 4]);

#[inline]
fn l1<T: Real>(z: C<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// One Taylor step of length `h` from state `y`; `None` if the series did not settle.
fn taylor_step<T: Real>(y: &State<T>, h: T, (c, d): &LocalCoef<T>, tol: T, buf: &mut [[C<T>; 2]]) -> Option<State<T>> {
    let zero = C::new(T::zero(), T::zero());
    let mut hp = h * h;
    let mut cs = [zero; 4];
    let mut ds = [zero; 4];
    for j in 0..4 {
        cs[j] = c[j] * hp;
        ds[j] = d[j] * hp;
        hp *= h;
    }
    buf[0] = [y[0], y[2]];
    buf[1] = [y[1] * h, y[3] * h];
    let (mut sa, mut sda) = (buf[0][0] + buf[1][0], buf[1][0]);
    let (mut sb, mut sdb) = (buf[0][1] + buf[1][1], buf[1][1]);
    let scale_a = l1(buf[0][0]).max(l1(buf[1][0]));
    let scale_b = l1(buf[0][1]).max(l1(buf[1][1]));
    let mut quiet = 0;
    for k in 0..MAX_ORDER - 2 {
        let (mut ra, mut rb) = (zero, zero);
        for j in 0..=k.min(3) {
            let [a, b] = buf[k - j];
            ra += cs[j] * a;
            rb += cs[j] * b + ds[j] * a;
        }
        let denom = T::of_usize((k + 2) * (k + 1));
        let (na, nb) = (-ra / denom, -rb / denom);
        buf[k + 2] = [na, nb];
        let kk = T::of_usize(k + 2);
        sa += na;
        sda += na * kk;
        sb += nb;
        sdb += nb * kk;
        let small_a = l1(na) * kk <= tol * scale_a.max(l1(sa)).max(l1(sda));
        let small_b = l1(nb) * kk <= tol * scale_b.max(l1(sb)).max(l1(sdb)).max(scale_a);
        if small_a && small_b {
            quiet += 1;
            if quiet >= 4 {
                return Some([sa, sda / h, sb, sdb / h]);
            }
        } else {
            quiet = 0;
        }
    }
    None
}

/// Integrate the coupled system over the profile's pieces, returning the state at
/// each point of `outputs` (which must be sorted and inside `[0, b]`).
fn integrate<T, F>(profile: &Profile<T>, coef: F, outputs: &[T], opts: &OdeOptions<T>) -> Result<Vec<State<T>>>
where
    T: Real,
    F: Fn(&Piece<T>, T) -> LocalCoef<T>,
{
    let zero = C::new(T::zero(), T::zero());
    let mut y: State<T> = [zero, cre(T::one()), zero, zero];
    let mut results = Vec::with_capacity(outputs.len());
    let mut out_iter = outputs.iter().copied().peekable();
    let mut buf = vec![[zero; 2]; MAX_ORDER];
    let mut steps = 0usize;

    while let Some(&x) = out_iter.peek() {
        if x > T::zero() {
            break;
        }
        results.push(y);
        out_iter.next();
    }

    for piece in profile.pieces() {
        let width = piece.x1 - piece.x0;
        let (c0, _) = coef(piece, piece.x0);
        let mut bound = T::zero();
        let mut wp = T::one();
        for cj in c0 {
            bound += cj.norm() * wp;
            wp *= width;
        }
        let k = bound.sqrt();
        let h_max = if k > T::zero() { (opts.max_kh / k).min(width) } else { width };
        let mut x = piece.x0;
        while x < piece.x1 {
            let target = match out_iter.peek() {
                Some(&xo) if xo < piece.x1 => xo,
                _ => piece.x1,
            };
            while x < target {
                let mut h = h_max.min(target - x);
                let lc = coef(piece, x);
                loop {
                    steps += 1;
                    if steps > opts.max_steps {
                        return Err(Error::ToleranceNotMet { x: x.to_f64().unwrap_or(f64::NAN) });
                    }
                    if let Some(next) = taylor_step(&y, h, &lc, opts.tol, &mut buf) {
                        y = next;
                        break;
                    }
                    h = h * T::lit(0.5);
                    if h <= T::epsilon() * width {
                        return Err(Error::ToleranceNotMet { x: x.to_f64().unwrap_or(f64::NAN) });
                    }
                }
                x = if target - (x + h) <= T::epsilon() * T::lit(4.0) * width { target } else { x + h };
            }
            while let Some(&xo) = out_iter.peek() {
                if xo <= x {
                    results.push(y);
                    out_iter.next();
                } else {
                    break;
                }
            }
        }
    }
    while out_iter.next().is_some() {
        results.push(y);
    }
    Ok(results)
}

fn jet_coeffs<T: Real>(piece: &Piece<T>, x: T) -> [T; 4] {
    let [f, f1, f2, f3] = piece.jet(x);
    [f, f1, f2 * T::lit(0.5), f3 / T::lit(6.0)]
}

fn check_lambda<T: Real>(lambda: C<T>) -> Result<()> {
    let n = lambda.norm();
    if !n.is_finite() || n > T::lit(LAMBDA_ENVELOPE) {
        return Err(Error::LambdaOutOfEnvelope(n.to_f64().unwrap_or(f64::INFINITY)));
    }
    Ok(())
}

fn check_outputs<T: Real>(p: &Profile<T>, xs: &[T]) -> Result<()> {
    for &x in xs {
        p.check_domain(x)?;
    }
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidProfile("output points must be sorted".into()));
    }
    Ok(())
}

fn require_kind<T: Real>(p: &Profile<T>, kind: ProfileKind) -> Result<()> {
    if p.kind() != kind {
        return Err(Error::InvalidProfile(format!("expected a {kind:?} profile")));
    }
    Ok(())
}

/// States of the wave IVP at the sorted points `xs`.
pub fn wave_states<T: Real>(p: &Profile<T>, lambda: C<T>, xs: &[T], opts: &OdeOptions<T>) -> Result<Vec<State<T>>> {
    require_kind(p, ProfileKind::WaveSpeedRho)?;
    check_lambda(lambda)?;
    check_outputs(p, xs)?;
    integrate(
        p,
        |piece, x| {
            let r = jet_coeffs(piece, x).map(cre);
            (r.map(|v| v * lambda), r)
        },
        xs,
        opts,
    )
}

/// States of the Schrödinger IVP at the sorted points `xs`.
pub fn schrodinger_states<T: Real>(p: &Profile<T>, mu: C<T>, xs: &[T], opts: &OdeOptions<T>) -> Result<Vec<State<T>>> {
    require_kind(p, ProfileKind::SchrodingerPotential)?;
    check_lambda(mu)?;
    check_outputs(p, xs)?;
    let z = cre(T::zero());
    integrate(
        p,
        |piece, x| {
            let v = jet_coeffs(piece, x);
            ([mu - v[0], cre(-v[1]), cre(-v[2]), cre(-v[3])], [cre(T::one()), z, z, z])
        },
        xs,
        opts,
    )
}

fn trace_from<T: Real>(lambda: C<T>, s: State<T>, equation: Equation) -> ShootingTrace<T> {
    ShootingTrace { lambda, phi_b: s[0], dphi_b: s[1], dlam_phi_b: s[2], dlam_dphi_b: s[3], equation }
}

pub fn shoot_wave<T: Real>(p: &Profile<T>, lambda: C<T>) -> Result<ShootingTrace<T>> {
    shoot_wave_with(p, lambda, &OdeOptions::default())
}

pub fn shoot_wave_with<T: Real>(p: &Profile<T>, lambda: C<T>, opts: &OdeOptions<T>) -> Result<ShootingTrace<T>> {
    let s = wave_states(p, lambda, &[p.b()], opts)?;
    Ok(trace_from(lambda, s[0], Equation::Wave))
}

pub fn shoot_schrodinger<T: Real>(p: &Profile<T>, mu: C<T>) -> Result<ShootingTrace<T>> {
    shoot_schrodinger_with(p, mu, &OdeOptions::default())
}

pub fn shoot_schrodinger_with<T: Real>(p: &Profile<T>, mu: C<T>, opts: &OdeOptions<T>) -> Result<ShootingTrace<T>> {
    let s = schrodinger_states(p, mu, &[p.b()], opts)?;
    Ok(trace_from(mu, s[0], Equation::Schrodinger))
}

/// `φ(x; λ)` rebuilt through the Liouville image as `ρ(x)^{-1/4} z(y(x))`,
/// where `−z'' + q z = λ z`, `z(0) = 0`, `z'(0) = ρ(0)^{-1/4}`. `xs` sorted.
pub fn phi_via_liouville<T: Real>(image: &LiouvilleImage<T>, lambda: C<T>, xs: &[T], opts: &OdeOptions<T>) -> Result<Vec<C<T>>> {
    let ys = xs.iter().map(|&x| image.y_at(x).map(|y| y.min(image.a))).collect::<Result<Vec<_>>>()?;
    let z = schrodinger_states(&image.q, lambda, &ys, opts)?;
    Ok(xs.iter().zip(&z).map(|(&x, s)| s[0] * (image.phi0_scale / image.rho().eval(x).powf(T::lit(0.25)))).collect())
}

/// Deviation of a wave trace from its high-frequency leading terms, scaled
/// by `exp(−|Im √λ| a)` and by `|√λ|` for the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport<T> {
    pub phi_ratio: T,
    pub dphi_ratio: T,
    /// `|φ(b) − leading| / |leading|`.
    pub phi_relative: T,
    pub dphi_relative: T,
}

pub fn envelope_check<T: Real>(trace: &ShootingTrace<T>, image: &LiouvilleImage<T>) -> Result<EnvelopeReport<T>> {
    if trace.equation != Equation::Wave {
        return Err(Error::InvalidProfile("envelope check applies to wave traces".into()));
    }
    let rho = image.rho();
    let (r0, rb) = (rho.eval(T::zero()), rho.eval(rho.b()));
    let s = principal_sqrt(trace.lambda);
    let arg = s * image.a;
    let damp = (-(s.im.abs()) * image.a).exp();
    let lead_phi = if s.norm() == T::zero() {
        cre(image.a / (r0 * rb).powf(T::lit(0.25)))
    } else {
        arg.sin() / (s * (r0 * rb).powf(T::lit(0.25)))
    };
    let lead_dphi = arg.cos() * (rb / r0).powf(T::lit(0.25));
    let dev_phi = (trace.phi_b - lead_phi).norm();
    let dev_dphi = (trace.dphi_b - lead_dphi).norm();
    Ok(EnvelopeReport {
        phi_ratio: dev_phi * damp * s.norm(),
        dphi_ratio: dev_dphi * damp,
        phi_relative: dev_phi / lead_phi.norm(),
        dphi_relative: dev_dphi / lead_dphi.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{liouville_transform, Regularity};
    use std::f64::consts::PI;

    fn rho(v: f64) -> Profile<f64> {
        Profile::constant(ProfileKind::WaveSpeedRho, v, 1.0).unwrap()
    }

    fn pot(v: f64) -> Profile<f64> {
        Profile::constant(ProfileKind::SchrodingerPotential, v, 1.0).unwrap()
    }

    fn close(a: C<f64>, b: C<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn origin_trace_is_linear() {
        let p = Profile::hermite(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &[0.3, 0.7, 0.4], &[0.1, 0.0, -0.2]).unwrap();
        let t = shoot_wave(&p, C::new(0.0, 0.0)).unwrap();
        assert!(close(t.phi_b, cre(1.0), 1e-13));
        assert!(close(t.dphi_b, cre(1.0), 1e-13));
    }

    #[test]
    fn constant_profiles_match_closed_form() {
        let t = shoot_wave(&rho(0.25), cre(4.0 * PI * PI)).unwrap();
        assert!(t.phi_b.norm() < 1e-11);
        assert!(close(t.dphi_b, cre(-1.0), 1e-11));
        let t = shoot_wave(&rho(4.0 / 9.0), cre(9.0 * PI * PI / 4.0)).unwrap();
        assert!(t.phi_b.norm() < 1e-11);
        assert!(close(t.dphi_b, cre(-1.0), 1e-11));
        let lam = C::new(37.0, -12.0);
        let t = shoot_wave(&rho(0.7), lam).unwrap();
        let k = (lam * 0.7).sqrt();
        assert!(close(t.phi_b, k.sin() / k, 1e-11));
        assert!(close(t.dphi_b, k.cos(), 1e-11));
    }

    #[test]
    fn schrodinger_examples() {
        let t = shoot_schrodinger(&pot(0.0), cre(PI * PI)).unwrap();
        assert!(t.phi_b.norm() < 1e-12);
        let t = shoot_schrodinger(&pot(0.0), cre(0.0)).unwrap();
        assert!(close(t.phi_b, cre(1.0), 1e-13) && close(t.dphi_b, cre(1.0), 1e-13));
        let t = shoot_schrodinger(&pot(2.0), cre(2.0)).unwrap();
        assert!(close(t.phi_b, cre(1.0), 1e-13) && close(t.dphi_b, cre(1.0), 1e-13));
    }

    #[test]
    fn lambda_derivative_matches_closed_form() {
        // φ = sin(k)/k with k = √(λρ): dφ/dλ = ρ (k cos k − sin k) / (2 k³)
        let (r, lam) = (0.3, C::new(55.0, 7.0));
        let t = shoot_wave(&rho(r), lam).unwrap();
        let k = (lam * r).sqrt();
        let expected = (k * k.cos() - k.sin()) * r / (k * k * k * 2.0);
        assert!(close(t.dlam_phi_b, expected, 1e-10));
        assert!(close(t.dlam_dphi_b, -k.sin() * r / (k * 2.0), 1e-10));
    }

    #[test]
    fn envelope_exact_for_unit_speed() {
        let p = rho(1.0);
        let img = liouville_transform(&p).unwrap();
        for lam in [C::new(50.0, 3.0), C::new(-400.0, 0.0), C::new(1e4, 10.0)] {
            let rep = envelope_check(&shoot_wave(&p, lam).unwrap(), &img).unwrap();
            assert!(rep.phi_ratio < 1e-8 && rep.dphi_ratio < 1e-8, "{rep:?}");
        }
    }

    #[test]
    fn liouville_route_matches_direct() {
        let nodes = [0.0, 0.5, 1.0];
        let p = Profile::hermite(ProfileKind::WaveSpeedRho, &nodes, &[0.3, 0.45, 0.5], &[0.2, 0.4, -0.1]).unwrap();
        let img = liouville_transform(&p).unwrap();
        let xs = [0.25, 0.5, 1.0];
        let opts = OdeOptions::default();
        for lam in [C::new(3.0, 1.0), C::new(-20.0, 5.0), C::new(80.0, -40.0), C::new(99.0, 0.0)] {
            let direct = wave_states(&p, lam, &xs, &opts).unwrap();
            let via = phi_via_liouville(&img, lam, &xs, &opts).unwrap();
            for (d, v) in direct.iter().zip(&via) {
                assert!((d[0] - v).norm() <= 1e-7 * d[0].norm(), "{lam} {} {}", d[0], v);
            }
        }
    }

    #[test]
    fn rejects_wrong_kind_and_large_lambda() {
        assert!(shoot_wave(&pot(1.0), cre(1.0)).is_err());
        assert!(matches!(shoot_wave(&rho(1.0), cre(2e8)), Err(Error::LambdaOutOfEnvelope(_))));
        let jumpy = Profile::new(
            ProfileKind::WaveSpeedRho,
            Regularity::Piecewise,
            vec![
                Piece { x0: 0.0, x1: 0.5, coeffs: [0.25, 0.0, 0.0, 0.0] },
                Piece { x0: 0.5, x1: 1.0, coeffs: [0.36, 0.0, 0.0, 0.0] },
            ],
            "two-layer",
        )
        .unwrap();
        // transfer-matrix oracle for the two-layer medium
        let lam = 30.0_f64;
        let (k1, k2) = ((lam * 0.25).sqrt(), (lam * 0.36).sqrt());
        let (p1, d1) = ((k1 * 0.5).sin() / k1, (k1 * 0.5).cos());
        let phi = p1 * (k2 * 0.5).cos() + d1 * (k2 * 0.5).sin() / k2;
        let t = shoot_wave(&jumpy, cre(lam)).unwrap();
        assert!((t.phi_b.re - phi).abs() < 1e-12);
    }

    #[test]
    fn f32_shooting() {
        let p = Profile::<f32>::constant(ProfileKind::WaveSpeedRho, 0.25, 1.0).unwrap();
        let t = shoot_wave(&p, C::new(4.0 * std::f32::consts::PI.powi(2), 0.0)).unwrap();
        assert!(t.phi_b.norm() < 1e-4);
        assert!((t.dphi_b.re + 1.0).abs() < 1e-4);
    }
}

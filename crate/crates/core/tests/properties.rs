use proptest::prelude::*;
use std::f64::consts::PI;

use teig_core::dispersion::{eval_d, prefactors, Dispersion, WaveDispersion};
use teig_core::factorization::{sample_dphi_grid, sample_phi_grid};
use teig_core::inversion::extract_two_spectra;
use teig_core::profiles::{moments, travel_time_to, ProfileKind};
use teig_core::shooting::{shoot_wave, Equation};
use teig_core::spectra::{circle_moments, count_zeros, find_eigenvalues, ZeroKind};
use teig_core::{principal_sqrt, ContourBox, EigenvalueRecord, Profile, SpectralData, C};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

/// C1 cubic Hermite profiles on [0, 1] through three nodes.
fn cubic_profile() -> impl Strategy<Value = Profile> {
    (prop::array::uniform3(0.15f64..0.9), prop::array::uniform3(-0.3f64..0.3)).prop_filter_map("non-positive", |(v, s)| {
        Profile::hermite(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &v, &s).ok()
    })
}

fn lambda(r_max: f64) -> impl Strategy<Value = C<f64>> {
    (0.0..r_max, -PI..PI).prop_map(|(r, t)| C::from_polar(r, t))
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn conjugation_symmetry(p in cubic_profile(), z in lambda(500.0)) {
        let v = eval_d(&p, z).unwrap();
        let w = eval_d(&p, z.conj()).unwrap();
        prop_assert!((w.value - v.value.conj()).norm() <= 1e-10 * v.scale.max(v.value.norm()));
    }

    #[test]
    fn prefactors_do_not_depend_on_the_root(z in lambda(1e4), b in 0.2f64..3.0) {
        let [s, c, _, _] = prefactors(b, z);
        let k = -principal_sqrt(z);
        let (s2, c2) = ((k * b).sin() / k, (k * b).cos());
        let size = 1.0 + s.norm() + c.norm();
        prop_assert!((s - s2).norm() <= 1e-12 * size && (c - c2).norm() <= 1e-12 * size);
    }

    #[test]
    fn lambda_derivative_matches_differences(p in cubic_profile(), z in lambda(300.0)) {
        let h = 1e-4 * (1.0 + z.norm());
        let f = |w: C<f64>| eval_d(&p, w).unwrap();
        let v = f(z);
        let fd = (f(z + h).value - f(z - h).value) / (2.0 * h);
        let fd_im = (f(z + C::new(0.0, h)).value - f(z - C::new(0.0, h)).value) / C::new(0.0, 2.0 * h);
        let size = v.dvalue.norm() + v.scale / (1.0 + z.norm());
        prop_assert!((fd - v.dvalue).norm() <= 1e-5 * size);
        prop_assert!((fd_im - v.dvalue).norm() <= 1e-5 * size);
    }

    #[test]
    fn mean_value_property(p in cubic_profile(), z in lambda(200.0)) {
        let f = WaveDispersion::new(p).unwrap();
        let n = 64;
        let mut acc = C::new(0.0, 0.0);
        let mut size = 0.0f64;
        for j in 0..n {
            let v = f.eval(z + C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).unwrap().value;
            size = size.max(v.norm());
            acc += v;
        }
        prop_assert!((acc / n as f64 - f.eval(z).unwrap().value).norm() <= 1e-8 * size);
    }

    #[test]
    fn moments_and_travel_time_grow(p in cubic_profile(), x in 0.0f64..0.99, dx in 0.001f64..0.01) {
        let (m1a, m2a) = moments(&p, x).unwrap();
        let (m1b, m2b) = moments(&p, x + dx).unwrap();
        prop_assert!(m1b > m1a && m2b > m2a);
        prop_assert!(travel_time_to(&p, x + dx).unwrap() > travel_time_to(&p, x).unwrap());
    }

    #[test]
    fn sampling_identities(p in cubic_profile()) {
        let f = WaveDispersion::new(p.clone()).unwrap();
        let d = |z: C<f64>| f.eval(z).map(|v| v.value);
        for (lam, v) in sample_phi_grid(d, 1.0, 6).unwrap() {
            let t = shoot_wave(&p, C::new(lam, 0.0)).unwrap();
            let size = t.phi_b.norm().max(t.dphi_b.norm() / lam.sqrt());
            prop_assert!((v - t.phi_b).norm() <= 1e-9 * size);
        }
        for (lam, v) in sample_dphi_grid(d, 1.0, 6).unwrap() {
            let t = shoot_wave(&p, C::new(lam, 0.0)).unwrap();
            let size = t.dphi_b.norm().max(t.phi_b.norm() * lam.sqrt());
            prop_assert!((v - t.dphi_b).norm() <= 1e-9 * size);
        }
    }

    #[test]
    fn profile_json_round_trip(p in cubic_profile()) {
        let text = serde_json::to_string(&p.to_json()).unwrap();
        prop_assert_eq!(Profile::from_json_str(&text).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn winding_is_additive(v in 0.1f64..0.8, cut in 20.0f64..180.0) {
        let f = WaveDispersion::new(Profile::constant(ProfileKind::WaveSpeedRho, v, 1.0).unwrap()).unwrap();
        let whole = ContourBox::new(-0.7, 200.3, -20.1, 20.3);
        let lo = ContourBox::new(-0.7, cut, -20.1, 20.3);
        let hi = ContourBox::new(cut, 200.3, -20.1, 20.3);
        let counts = (count_zeros(&f, &lo), count_zeros(&f, &hi), count_zeros(&f, &whole));
        if let (Ok(a), Ok(b), Ok(c)) = counts {
            prop_assert_eq!(a + b, c);
        }
    }

    #[test]
    fn multiplicity_agrees_with_small_circle(v in 0.1f64..0.8) {
        let f = WaveDispersion::new(Profile::constant(ProfileKind::WaveSpeedRho, v, 1.0).unwrap()).unwrap();
        let found = find_eigenvalues(&f, &ContourBox::new(-1.0, 150.0, -15.0, 15.0), 0.05).unwrap();
        for r in found.iter().filter(|r| r.kind != ZeroKind::Origin) {
            let gap = found.iter().filter(|o| o.lambda != r.lambda).map(|o| (o.lambda - r.lambda).norm()).fold(f64::INFINITY, f64::min);
            let (count, _) = circle_moments(&f, r.lambda, (0.3 * gap).min(1.0), 128).unwrap();
            prop_assert!((count - f64::from(r.multiplicity)).abs() < 1e-3, "{} {}", r.lambda, count);
        }
        let data = SpectralData::from_records(&found, Equation::Wave, Some(1.0), None).unwrap();
        let text = serde_json::to_string(&data.to_json()).unwrap();
        prop_assert_eq!(SpectralData::from_json_str(&text).unwrap().to_json(), data.to_json());
    }

    #[test]
    fn extraction_is_gamma_invariant(scale in 0.1f64..100.0) {
        let zeros: Vec<EigenvalueRecord> = (1..=30u32)
            .map(|j| EigenvalueRecord { lambda: C::new(4.0 * f64::from(j * j) * PI * PI, 0.0), multiplicity: 3, kind: ZeroKind::RealPositive, index_hint: Some(j), residual: 0.0 })
            .collect();
        let base = SpectralData { zeros, d: 1, gamma: Some(0.25), tail: Some((0.5, 1.0)), equation: Equation::Wave };
        let scaled = SpectralData { gamma: Some(0.25 * scale), ..base.clone() };
        let (s, t) = (extract_two_spectra(&base, 1.0, 32).unwrap(), extract_two_spectra(&scaled, 1.0, 32).unwrap());
        prop_assert_eq!(s.dirichlet.len(), t.dirichlet.len());
        for (x, y) in s.dirichlet.iter().zip(&t.dirichlet).chain(s.neumann.iter().zip(&t.neumann)) {
            prop_assert!((x - y).abs() <= 1e-12 * x);
        }
    }
}

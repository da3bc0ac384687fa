//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use teig_cli::checks::{branch_residual, conjugation_residual, liouville_residual, mean_value_residual, probes, sampling_residual};
use teig_core::dispersion::{eval_d, eval_d_constant_rho, maclaurin, Dispersion, WaveDispersion};
use teig_core::factorization::sum_rule_check;
use teig_core::inversion::{fit_profile, FeatureSpec, InversionProblem, Parametrization};
use teig_core::profiles::{travel_time, ProfileKind, Regime};
use teig_core::shooting::Equation;
use teig_core::spectra::{lattice_deviations, real_positive_zeros, ZeroKind};
use teig_core::{EigenvalueRecord, Profile, SpectralData, C};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rho(v: f64) -> Profile {
    Profile::constant(ProfileKind::WaveSpeedRho, v, 1.0).unwrap()
}

/// Random C1 cubic profile on [0, 1] with values below 1, hence a < b.
fn random_cubic(rng: &mut ChaCha8Rng) -> Profile {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(0.15..0.9)).collect();
        let s: Vec<f64> = (0..3).map(|_| rng.random_range(-0.3..0.3)).collect();
        if let Ok(p) = Profile::hermite(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &v, &s) {
            if travel_time(&p).unwrap() < 1.0 {
                return p;
            }
        }
    }
}

struct Cli {
    dir: tempfile::TempDir,
}

impl Cli {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn profile(&self, name: &str, p: &Profile) -> PathBuf {
        self.write(name, &serde_json::to_string(&p.to_json()).unwrap())
    }

    /// Exit status and stderr.
    fn run(&self, args: &[&str]) -> (i32, String) {
        let out = Command::new(env!("CARGO_BIN_EXE_teig")).args(args).output().unwrap();
        (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_table(path: &Path) -> Vec<(f64, f64, u32, String)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|row| {
            let row = row.unwrap();
            (row[0].parse().unwrap(), row[1].parse().unwrap(), row[2].parse().unwrap(), row[3].to_string())
        })
        .collect()
}

fn criterion_1(cli: &Cli) -> Outcome {
    let prof = cli.profile("quarter.json", &rho(0.25));
    let out = cli.path("quarter.csv");
    let start = Instant::now();
    let (code, err) = cli.run(&["forward", "--profile", s(&prof), "--region=-1,400,-5,5", "--out", s(&out)]);
    let elapsed = start.elapsed().as_secs_f64();
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let rows = read_table(&out);
    ensure(rows.len() == 4, format!("{} rows, expected 4", rows.len()))?;
    ensure(rows[0].0 == 0.0 && rows[0].1 == 0.0 && rows[0].2 == 1, format!("origin row {:?}", rows[0]))?;
    let mut worst: f64 = 0.0;
    for j in 1..=3 {
        let exact = 4.0 * (j * j) as f64 * PI * PI;
        let (re, im, m, _) = &rows[j];
        ensure(*m == 3 && *im == 0.0, format!("row {j}: {:?}", rows[j]))?;
        worst = worst.max((re - exact).abs() / exact);
    }
    ensure(worst <= 1e-8, format!("relative error {worst:e}"))?;
    ensure(elapsed <= 60.0, format!("took {elapsed:.1} s"))?;
    Ok(format!("4 records, multiplicities 1,3,3,3, max rel err {worst:.1e}, {elapsed:.2} s"))
}

fn criterion_2(cli: &Cli) -> Outcome {
    let prof = cli.profile("ninths.json", &rho(4.0 / 9.0));
    let out = cli.path("ninths.csv");
    let (code, err) = cli.run(&["forward", "--profile", s(&prof), "--region=-1,250,-45,45", "--out", s(&out)]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let rows = read_table(&out);
    let l = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let pair = C::new(9.0 * PI * PI / 4.0 - 2.25 * l * l, 4.5 * PI * l);
    let mut pair_err: f64 = 0.0;
    for target in [pair, pair.conj()] {
        let hit = rows.iter().find(|r| (C::new(r.0, r.1) - target).norm() <= 1e-3 * target.norm()).ok_or(format!("pair {target} not found"))?;
        ensure(hit.2 == 1, format!("pair multiplicity {}", hit.2))?;
        pair_err = pair_err.max((C::new(hit.0, hit.1) - target).norm() / target.norm());
    }
    ensure(pair_err <= 1e-6, format!("pair relative error {pair_err:e}"))?;
    let reals: Vec<_> = rows.iter().filter(|r| r.3 == "real_positive").collect();
    ensure(!reals.is_empty(), "no real zeros")?;
    for (j, r) in reals.iter().enumerate() {
        let exact = 9.0 * ((j + 1) * (j + 1)) as f64 * PI * PI;
        ensure(r.2 == 3 && (r.0 - exact).abs() <= 1e-8 * exact, format!("real zero {:?} vs {exact}", r))?;
    }
    Ok(format!("{} rows; first pair rel err {pair_err:.1e}, multiplicity 1 each; triple at 9π²", rows.len()))
}

fn criterion_3() -> Outcome {
    let mac = maclaurin(&rho(0.25)).map_err(|e| e.to_string())?;
    let (d1, d2) = (mac.coeffs[1], mac.coeffs[2]);
    ensure((d1 - 0.25).abs() <= 1e-10, format!("D1 = {d1}"))?;
    ensure((d2 + 1.0 / 32.0).abs() <= 1e-8, format!("D2 = {d2}"))?;
    let zeros: Vec<EigenvalueRecord> = (1..=200u32)
        .map(|j| EigenvalueRecord { lambda: C::new(4.0 * f64::from(j * j) * PI * PI, 0.0), multiplicity: 3, kind: ZeroKind::RealPositive, index_hint: Some(j), residual: 0.0 })
        .collect();
    let data = SpectralData { zeros, d: 1, gamma: Some(d1), tail: Some((0.5, 1.0)), equation: Equation::Wave };
    let residual = sum_rule_check(&data, &mac).map_err(|e| e.to_string())?;
    ensure(residual <= 1e-4, format!("sum rule residual {residual:e}"))?;
    Ok(format!("D1 err {:.1e}, D2 err {:.1e}, sum rule residual {residual:.1e}", (d1 - 0.25).abs(), (d2 + 1.0 / 32.0).abs()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for v in [0.25, 4.0 / 9.0, 2.0] {
        let p = rho(v);
        for _ in 0..50 {
            let lam = C::from_polar(1e3 * rng.random::<f64>().sqrt(), rng.random_range(-PI..PI));
            let shot = eval_d(&p, lam).map_err(|e| e.to_string())?.value;
            let exact = eval_d_constant_rho(v, 1.0, lam);
            worst = worst.max((shot - exact).norm() / exact.norm());
        }
    }
    ensure(worst <= 1e-8, format!("max relative deviation {worst:e}"))?;
    Ok(format!("150 points, max rel deviation {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let p = random_cubic(&mut rng);
        let lambdas: Vec<C<f64>> = (0..10).map(|_| C::from_polar(100.0 * rng.random::<f64>(), rng.random_range(-PI..PI))).collect();
        worst = worst.max(liouville_residual(&p, &lambdas).map_err(|e| e.to_string())?);
    }
    ensure(worst <= 1e-7, format!("max relative deviation {worst:e}"))?;
    Ok(format!("5 profiles x 10 λ x 3 points, max rel deviation {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let profiles = [rho(0.25), random_cubic(&mut rng), Profile::piecewise_constant(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &[0.25, 0.36]).unwrap()];
    let mut worst: f64 = 0.0;
    for p in &profiles {
        worst = worst.max(sampling_residual(p, 12).map_err(|e| e.to_string())?);
    }
    ensure(worst <= 1e-9, format!("max relative deviation {worst:e}"))?;
    Ok(format!("3 profiles x 12 grid points per lattice, max rel deviation {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut exact_worst: f64 = 0.0;
    for v in [0.25, 4.0 / 9.0] {
        let f = WaveDispersion::new(rho(v)).map_err(|e| e.to_string())?;
        for m in lattice_deviations(&f, 20).map_err(|e| e.to_string())? {
            exact_worst = exact_worst.max(m.deviation().abs() / m.zero.lambda.re);
        }
    }
    ensure(exact_worst <= 1e-6, format!("constant-profile lattice deviation {exact_worst:e}"))?;
    // ρ = 0.25 + 0.75 x², exactly representable as a C1 Hermite cubic
    let quad = Profile::hermite(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &[0.25, 0.4375, 1.0], &[0.0, 0.75, 1.5]).unwrap();
    let f = WaveDispersion::new(quad).map_err(|e| e.to_string())?;
    let devs: Vec<f64> = lattice_deviations(&f, 40).map_err(|e| e.to_string())?.iter().map(|m| m.deviation().abs()).collect();
    let early = devs[9..25].iter().copied().fold(0.0, f64::max);
    let all = devs[9..40].iter().copied().fold(0.0, f64::max);
    ensure(all <= 1.1 * early, format!("deviation grows: max n<=25 {early}, max n<=40 {all}"))?;
    Ok(format!("constant profiles rel dev {exact_worst:.1e} (n<=20); 0.25+0.75x²: max dev n in [10,25] {early:.3}, [10,40] {all:.3}"))
}

fn criterion_8(cli: &Cli) -> Outcome {
    // constant: forward-generated triples through the command line
    let zeros = real_positive_zeros(&WaveDispersion::new(rho(0.25)).unwrap(), 6).map_err(|e| e.to_string())?;
    ensure(zeros.len() == 6 && zeros.iter().all(|z| z.multiplicity == 3), "forward solver did not return 6 triples")?;
    let data = SpectralData { zeros, d: 1, gamma: None, tail: None, equation: Equation::Wave };
    let data_path = cli.write("triples.json", &serde_json::to_string(&data.to_json()).unwrap());
    let out = cli.path("constant_fit.json");
    let (code, err) = cli.run(&["invert", "--spectral-data", s(&data_path), "--family", "constant", "--seed", "0.5", "--out", s(&out)]);
    ensure(code == 0, format!("invert exit {code}: {err}"))?;
    let result: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let c = result["params"][0].as_f64().ok_or("no parameter")?;
    ensure((c - 0.25).abs() <= 1e-4, format!("recovered {c}"))?;

    // two pieces from eight forward-generated real zeros
    let truth = Profile::piecewise_constant(ProfileKind::WaveSpeedRho, &[0.0, 0.5, 1.0], &[0.25, 0.36]).unwrap();
    let zeros = real_positive_zeros(&WaveDispersion::new(truth.clone()).unwrap(), 8).map_err(|e| e.to_string())?;
    let data = SpectralData { zeros, d: 1, gamma: Some(maclaurin(&truth).unwrap().gamma), tail: None, equation: Equation::Wave };
    let problem = InversionProblem {
        data,
        b: 1.0,
        regime: Regime::ALessB,
        parametrization: Parametrization::PiecewiseConstant { pieces: 2 },
        seed: vec![0.3, 0.3],
        bounds: vec![],
        features: FeatureSpec::default(),
        tol: 1e-8,
        max_iter: 60,
    };
    let res = fit_profile(&problem).map_err(|e| e.to_string())?;
    ensure(res.converged, format!("two-piece fit misfit {}", res.misfit))?;
    let rel = (res.params[0] - 0.25).abs() / 0.25;
    let rel = rel.max((res.params[1] - 0.36).abs() / 0.36);
    ensure(rel <= 1e-3, format!("recovered {:?}", res.params))?;
    Ok(format!("constant {c:.8} (|err| {:.1e}); two pieces ({:.6}, {:.6}) rel err {rel:.1e}", (c - 0.25).abs(), res.params[0], res.params[1]))
}

fn criterion_9(cli: &Cli) -> Outcome {
    let problem = |data: serde_json::Value, regime: &str| serde_json::json!({"data": data, "b": 1.0, "regime": regime, "parametrization": {"family": "constant"}, "seed": [0.5]});
    let zeros: Vec<serde_json::Value> = (1..=6).map(|n| serde_json::json!({"re": (n * n) as f64 * PI * PI * 4.0, "im": 0.0, "mult": 3})).collect();

    let eq = cli.write("eq.json", &problem(serde_json::json!({"equation": "wave", "d": 1, "gamma": null, "zeros": zeros, "tail": {"a": 1.0, "b": 1.0}}), "a_equals_b").to_string());
    let (code, err) = cli.run(&["invert", "--problem", s(&eq)]);
    ensure(code == 4 && err.contains("gamma"), format!("a = b without gamma: exit {code}, {err}"))?;

    let gt = cli.write("gt.json", &problem(serde_json::json!({"equation": "wave", "d": 1, "gamma": 1.0, "zeros": zeros, "tail": {"a": 2.0, "b": 1.0}}), "a_greater_b").to_string());
    let (code, err) = cli.run(&["invert", "--problem", s(&gt)]);
    ensure(code == 4 && err.contains("a > b"), format!("a > b: exit {code}, {err}"))?;

    let one = cli.profile("one.json", &rho(1.0));
    let (code, err) = cli.run(&["forward", "--profile", s(&one)]);
    ensure(code == 3 && err.contains("ρ≡1"), format!("rho = 1 forward: exit {code}, {err}"))?;

    let mut recovered = Vec::new();
    for (equation, expect) in [("wave", 1.0), ("schrodinger", 0.0)] {
        let path = cli.write("trivial.json", &serde_json::json!({"equation": equation, "d": 0, "gamma": 0.0, "zeros": []}).to_string());
        let out = cli.path("trivial_fit.json");
        let (code, err) = cli.run(&["invert", "--spectral-data", s(&path), "--out", s(&out)]);
        ensure(code == 0, format!("{equation} trivial data: exit {code}, {err}"))?;
        let result: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let v = result["params"][0].as_f64().ok_or("no parameter")?;
        ensure((v - expect).abs() <= 1e-6, format!("{equation} trivial recovered {v}"))?;
        recovered.push(v);
    }
    Ok(format!("a=b w/o gamma exit 4; a>b exit 4; ρ≡1 exit 3; trivial data -> ρ={} and V={}", recovered[0], recovered[1]))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut conj, mut mean, mut branch): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..10 {
        let p = random_cubic(&mut rng);
        let f = WaveDispersion::new(p.clone()).map_err(|e| e.to_string())?;
        let f: &dyn Dispersion<f64> = &f;
        conj = conj.max(conjugation_residual(f, &probes(16, 1e3)).map_err(|e| e.to_string())?);
        mean = mean.max(mean_value_residual(f, &probes(8, 1e2), 1.0).map_err(|e| e.to_string())?);
        branch = branch.max(branch_residual(&p, &probes(16, 1e3)).map_err(|e| e.to_string())?);
    }
    ensure(conj <= 1e-10 && mean <= 1e-8 && branch <= 1e-12, format!("conjugation {conj:e}, mean value {mean:e}, branch {branch:e}"))?;
    Ok(format!("10 profiles: conjugation {conj:.1e}, mean value {mean:.1e}, branch {branch:.1e}"))
}

fn main() {
    let cli = Cli::new();
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&cli))),
        (2, Box::new(|| criterion_2(&cli))),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(|| criterion_8(&cli))),
        (9, Box::new(|| criterion_9(&cli))),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (n, check) in &criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("criterion {n:>2}: PASS  {detail} [{:.1} s]", start.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}

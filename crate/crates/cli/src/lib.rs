//! `teig` command-line front end.
//!
//! Exit codes: 0 success, 1 failure (failed check, no convergence, I/O),
//! 2 malformed input, 3 identically vanishing dispersion function,
//! 4 regime refusal.

pub mod args;
pub mod checks;
pub mod output;

use std::fs;
use std::path::Path;

use args::{AsymptoticsArgs, Cli, Command, Family, ForwardArgs, InvertArgs, RegimeArg, SampleGridArgs, SearchTolerances, VerifyArgs};
use checks::{verify_profile, Tolerances, VerifyOptions};
use output::Sink;
use teig_core::dispersion::{check_not_identically_zero, maclaurin, origin_data_numeric, Dispersion, SchrodingerDispersion, WaveDispersion};
use teig_core::factorization::{reconstruct_d, sample_dphi_grid, sample_phi_grid};
use teig_core::inversion::{fit_profile, FeatureSpec, InversionProblem, Parametrization};
use teig_core::profiles::{travel_time, ProfileKind, Regime};
use teig_core::quadrature::QuadOptions;
use teig_core::shooting::Equation;
use teig_core::spectra::{find_eigenvalues_with, lattice_deviations, SearchOptions};
use teig_core::{ContourBox, Error, Profile, SpectralData, C};

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::InvalidProfile(_) | Error::NonPositiveProfile { .. } | Error::NotSmooth | Error::NotConjugateClosed(_) => 2,
        Error::IdenticallyZero => 3,
        Error::RegimeNotCovered | Error::RegimeMismatch(_) | Error::GammaRequired | Error::RegimeAEqualsB => 4,
        _ => 1,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(exit_code(&e), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(1, e.to_string())
    }
}

pub type CmdResult = std::result::Result<i32, Failure>;

/// Run a parsed command line and return the exit status, reporting failures on stderr.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.workers {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Forward(a) => forward(a),
        Command::Invert(a) => invert(a),
        Command::Verify(a) => verify(a),
        Command::SampleGrid(a) => sample_grid(a),
        Command::Asymptotics(a) => asymptotics(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

pub fn load_profile(path: &Path) -> std::result::Result<Profile, Failure> {
    Ok(Profile::from_json_str(&read(path)?)?)
}

pub fn load_spectral_data(path: &Path) -> std::result::Result<SpectralData, Failure> {
    Ok(SpectralData::from_json_str(&read(path)?)?)
}

fn parse_list(s: &str, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| Failure::new(2, format!("{what}: cannot parse '{t}'")))).collect()
}

pub fn parse_region(s: &str) -> std::result::Result<ContourBox, Failure> {
    let v = parse_list(s, "region")?;
    if v.len() != 4 {
        return Err(Failure::new(2, "region needs re_lo,re_hi,im_lo,im_hi"));
    }
    let region = ContourBox::new(v[0], v[1], v[2], v[3]);
    if !region.is_valid() {
        return Err(Failure::new(2, "region must be finite with lo < hi"));
    }
    Ok(region)
}

fn search_options(t: &SearchTolerances) -> std::result::Result<SearchOptions<f64>, Failure> {
    if !(t.resolution > 0.0 && t.resolution.is_finite()) {
        return Err(Failure::new(2, "resolution must be positive"));
    }
    let base = SearchOptions::<f64>::default();
    Ok(SearchOptions {
        resolution: t.resolution,
        edge_error_cap: t.tol_edge,
        integer_slack: t.tol_winding,
        quad: QuadOptions { abs_tol: t.tol_quad_abs, rel_tol: t.tol_quad_rel, ..base.quad },
        ..base
    })
}

fn dispersion(p: &Profile) -> std::result::Result<Box<dyn Dispersion<f64>>, Failure> {
    Ok(match p.kind() {
        ProfileKind::WaveSpeedRho => Box::new(WaveDispersion::new(p.clone())?),
        ProfileKind::SchrodingerPotential => Box::new(SchrodingerDispersion::new(p.clone())?),
    })
}

fn trivial_message(kind: ProfileKind) -> &'static str {
    match kind {
        ProfileKind::WaveSpeedRho => "D identically zero ⇒ ρ≡1",
        ProfileKind::SchrodingerPotential => "D identically zero ⇒ V≡0",
    }
}

/// Spectral data for the zeros of a profile: `γ` from the Maclaurin moments
/// (or numerically), and the lattice tail for wave profiles with `a ≠ b`.
pub fn spectral_data_for(p: &Profile, f: &dyn Dispersion<f64>, records: &[teig_core::EigenvalueRecord]) -> std::result::Result<SpectralData, Failure> {
    let (equation, gamma, tail) = match p.kind() {
        ProfileKind::WaveSpeedRho => {
            let gamma = match maclaurin(p) {
                Ok(m) => m.gamma,
                Err(_) => origin_data_numeric(f)?.1.re,
            };
            let a = travel_time(p)?;
            let tail = (teig_core::profiles::classify_regime(p)? != Regime::AEqualsB).then_some((a, p.b()));
            (Equation::Wave, gamma, tail)
        }
        ProfileKind::SchrodingerPotential => (Equation::Schrodinger, origin_data_numeric(f)?.1.re, None),
    };
    Ok(SpectralData::from_records(records, equation, Some(gamma), tail)?)
}

pub fn forward(a: &ForwardArgs) -> CmdResult {
    let p = load_profile(&a.profile)?;
    let region = parse_region(&a.region)?;
    let opts = search_options(&a.search)?;
    let f = dispersion(&p)?;
    if let Err(Error::IdenticallyZero) = check_not_identically_zero(f.as_ref()) {
        return Err(Failure::new(3, trivial_message(p.kind())));
    }
    let records = find_eigenvalues_with(f.as_ref(), &region, &opts)?;
    if let Some(path) = &a.plot {
        let grid = parse_list(&a.grid, "grid")?;
        if grid.len() != 2 || grid.iter().any(|&g| g < 2.0 || g.fract() != 0.0) {
            return Err(Failure::new(2, "grid needs n_re,n_im with each at least 2"));
        }
        output::write_plot(path, f.as_ref(), &region, grid[0] as usize, grid[1] as usize)?;
    }
    if let Some(path) = &a.data_out {
        let data = spectral_data_for(&p, f.as_ref(), &records)?;
        output::write_json(&Sink::File(path.clone()), &data.to_json())?;
    }
    output::write_records(&Sink::from(&a.out), a.format, &records)?;
    Ok(0)
}

fn parametrization(family: Family, pieces: usize) -> std::result::Result<Parametrization, Failure> {
    if pieces == 0 {
        return Err(Failure::new(2, "pieces must be positive"));
    }
    Ok(match family {
        Family::Constant => Parametrization::Constant,
        Family::PiecewiseConstant => Parametrization::PiecewiseConstant { pieces },
        Family::PiecewiseCubic => Parametrization::PiecewiseCubic { pieces },
    })
}

fn regime(r: RegimeArg) -> Regime {
    match r {
        RegimeArg::ALessB => Regime::ALessB,
        RegimeArg::AEqualsB => Regime::AEqualsB,
        RegimeArg::AGreaterB => Regime::AGreaterB,
    }
}

pub fn invert(a: &InvertArgs) -> CmdResult {
    let mut problem = match (&a.problem, &a.spectral_data) {
        (Some(path), _) => InversionProblem::from_json_str(&read(path)?)?,
        (None, Some(path)) => {
            let data = load_spectral_data(path)?;
            let parametrization = parametrization(a.family, a.pieces)?;
            let seed = match &a.seed {
                Some(s) => parse_list(s, "seed")?,
                None => vec![0.5; parametrization.len()],
            };
            InversionProblem {
                data,
                b: a.b,
                regime: regime(a.regime),
                parametrization,
                seed,
                bounds: vec![],
                features: FeatureSpec { zeros: a.zeros, two_spectra: a.two_spectra, gamma: true },
                tol: 1e-8,
                max_iter: 60,
            }
        }
        (None, None) => return Err(Failure::new(2, "invert needs --problem or --spectral-data")),
    };
    if let Some(t) = a.tol_fit {
        problem.tol = t;
    }
    if let Some(m) = a.max_iter {
        problem.max_iter = m;
    }
    let result = fit_profile(&problem)?;
    output::write_json(&Sink::from(&a.out), &result.to_json())?;
    if result.converged {
        Ok(0)
    } else {
        eprintln!("error: {}", Error::NotConverged { iterations: result.iterations, misfit: result.misfit });
        Ok(1)
    }
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let p = load_profile(&a.profile)?;
    let opts = VerifyOptions {
        tol: Tolerances {
            conjugation: a.tol_conjugation,
            mean_value: a.tol_mean_value,
            branch: a.tol_branch,
            liouville: a.tol_liouville,
            maclaurin: a.tol_maclaurin,
            sum_rule: a.tol_sum_rule,
            sampling: a.tol_sampling,
        },
        cells: a.truncation,
        search: search_options(&a.search)?,
    };
    let report = verify_profile(&p, &opts)?;
    output::write_json(&Sink::from(&a.out), &report)?;
    Ok(if report.passed { 0 } else { 1 })
}

pub fn sample_grid(a: &SampleGridArgs) -> CmdResult {
    if a.n_max == 0 {
        return Err(Failure::new(2, "n_max must be positive"));
    }
    let (phi, dphi) = if let Some(path) = &a.profile {
        let p = load_profile(path)?;
        let f = dispersion(&p)?;
        let d = |z: C<f64>| f.eval(z).map(|v| v.value);
        (sample_phi_grid(d, p.b(), a.n_max)?, sample_dphi_grid(d, p.b(), a.n_max)?)
    } else {
        let path = a.spectral_data.as_ref().ok_or_else(|| Failure::new(2, "sample-grid needs --profile or --spectral-data"))?;
        let data = load_spectral_data(path)?;
        let truncation = match a.truncation {
            Some(n) => n,
            None => data.default_truncation()?,
        };
        let d = |z: C<f64>| reconstruct_d(&data, z, truncation);
        (sample_phi_grid(d, a.b, a.n_max)?, sample_dphi_grid(d, a.b, a.n_max)?)
    };
    output::write_grid(&Sink::from(&a.out), a.format, &phi, &dphi)?;
    Ok(0)
}

pub fn asymptotics(a: &AsymptoticsArgs) -> CmdResult {
    let p = load_profile(&a.profile)?;
    if p.kind() != ProfileKind::WaveSpeedRho {
        return Err(Failure::new(2, "asymptotics needs a wave-speed profile"));
    }
    if a.count == 0 {
        return Err(Failure::new(2, "count must be positive"));
    }
    let f = WaveDispersion::new(p.clone())?;
    if let Err(Error::IdenticallyZero) = check_not_identically_zero(&f) {
        return Err(Failure::new(3, trivial_message(p.kind())));
    }
    let rows = lattice_deviations(&f, a.count)?;
    output::write_lattice(&Sink::from(&a.out), a.format, &rows)?;
    Ok(0)
}

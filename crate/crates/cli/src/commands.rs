use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use tubestab::cayley::{eta, eta_inv, phi, phi_inv, phi_n, phi_n_inv, psi, psi_inv, POLE_TOL};
use tubestab::detrep::{
    cayley_push_halfplane, lorentz2_rep_from_contraction, lorentzn_rep_from_contraction,
    skew_rep_from_contraction, verify_rep, DetRep, RepVerdict, VerifyOptions, IM_A0_TOL,
    ISOMETRY_TOL,
};
use tubestab::domains::DomainSpec;
use tubestab::mvpoly::MultiPoly;
use tubestab::numkernel::{matrix_cayley, matrix_cayley_inv, CMatrix};
use tubestab::randmat;
use tubestab::stability::{
    fibered_line_checks, random_lines, sampled_stability, SampleVerdict, FALSIFY_TOL,
};
use tubestab::suites::{run_suite, SuiteName};
use tubestab::C64;

use crate::args::{
    ExtractArgs, GenArgs, MapName, StabArgs, Structure, SuiteArgs, TransformArgs, VerifyArgs,
};
use crate::io::{parse_json, read_json, to_value, usage, write_json, CliError};

/// Grid density along each line for the Im(r/q) samples.
const LINE_T_DENSITY: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
        }
    }
}

/// What a subcommand hands back for the manifest and the exit code.
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<CheckOutcome>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn require(opt: Option<usize>, flag: &str, structure: &str) -> Result<usize, CliError> {
    opt.ok_or_else(|| usage(format!("--{flag} is required for --structure {structure}")))
}

pub fn gen(a: &GenArgs, seed: u64) -> Result<Outcome, CliError> {
    let (size, label) = match a.structure {
        Structure::Halfplane => {
            let n = halfplane_multiplicities(a)?;
            (n.iter().sum(), "halfplane")
        }
        Structure::Lorentz2 => (2 * a.k, "lorentz2"),
        Structure::Lorentzn => (require(a.n, "n", "lorentzn")? * a.k, "lorentzn"),
        Structure::Skew => (2 * require(a.n, "n", "skew")? * a.k, "skew"),
    };
    if a.k == 0 || size == 0 {
        return Err(usage("structure sizes must be positive"));
    }
    let k = match &a.contraction {
        Some(path) => read_json::<CMatrix>(path)?,
        None => {
            if !(a.norm > 0.0 && a.norm < 1.0) {
                return Err(usage(format!("--norm must lie in (0, 1), got {}", a.norm)));
            }
            randmat::contraction(&mut randmat::stream(seed, 0), size, size, a.norm)
        }
    };
    if k.rows() != size || k.cols() != size {
        return Err(usage(format!(
            "{label} needs a {size}x{size} contraction, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let rep = match a.structure {
        Structure::Halfplane => cayley_push_halfplane(&k, &halfplane_multiplicities(a)?),
        Structure::Lorentz2 => lorentz2_rep_from_contraction(&k),
        Structure::Lorentzn => lorentzn_rep_from_contraction(&k, a.n.unwrap_or(0), a.k),
        Structure::Skew => skew_rep_from_contraction(&k, a.n.unwrap_or(0), a.k),
    }
    .map_err(usage)?;
    if let Some(path) = &a.out {
        write_json(path, &rep)?;
    }
    let im_ok = rep.im_a0_min_eig().map(|e| e >= IM_A0_TOL).unwrap_or(false);
    let iso_ok = rep.isometry_error() <= ISOMETRY_TOL;
    Ok(Outcome {
        result: to_value(&rep),
        checks: vec![
            CheckOutcome::new("im_a0_psd", im_ok),
            CheckOutcome::new("isometry", iso_ok),
        ],
        tolerances: tolerances(&[("im_a0", IM_A0_TOL), ("isometry", ISOMETRY_TOL)]),
    })
}

fn halfplane_multiplicities(a: &GenArgs) -> Result<Vec<usize>, CliError> {
    let n = match (&a.multiplicities, a.dims) {
        (Some(n), Some(d)) if n.len() != d => {
            return Err(usage(format!(
                "--N has {} entries but --dims is {d}",
                n.len()
            )));
        }
        (Some(n), _) => n.clone(),
        (None, Some(d)) => vec![1; d],
        (None, None) => return Err(usage("--dims or --N is required for --structure halfplane")),
    };
    if n.is_empty() || n.contains(&0) {
        return Err(usage("multiplicities must be positive"));
    }
    Ok(n)
}

pub fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome, CliError> {
    let p: MultiPoly = read_json(&a.p)?;
    let rep: DetRep = read_json(&a.rep)?;
    let q = match &a.q {
        Some(path) => read_json(path)?,
        None => MultiPoly::one(p.nvars()),
    };
    let opts = VerifyOptions {
        samples: a.samples,
        seed,
        id_tol: a.tol,
        compare_coefficients: !a.no_coefficients,
    };
    let v = verify_rep(&p, &q, &rep, &opts);
    let mut checks: Vec<CheckOutcome> = v
        .structure_checks
        .iter()
        .map(|c| CheckOutcome::new(&c.name, c.passed))
        .collect();
    checks.push(CheckOutcome::new("verdict", v.verdict == RepVerdict::Pass));
    Ok(Outcome {
        result: to_value(&v),
        checks,
        tolerances: tolerances(&[
            ("identity", a.tol),
            ("im_a0", IM_A0_TOL),
            ("isometry", ISOMETRY_TOL),
        ]),
    })
}

fn read_domain(text: &str) -> Result<DomainSpec, CliError> {
    if text.trim_start().starts_with('{') {
        parse_json(text, "--domain")
    } else {
        read_json(std::path::Path::new(text))
    }
}

pub fn stab(a: &StabArgs, seed: u64) -> Result<Outcome, CliError> {
    let p: MultiPoly = read_json(&a.p)?;
    let spec = read_domain(&a.domain)?;
    if p.nvars() != spec.nvars() {
        return Err(usage(format!(
            "polynomial has {} variables, domain has {}",
            p.nvars(),
            spec.nvars()
        )));
    }
    let report = sampled_stability(&p, &spec, a.samples, seed).map_err(usage)?;
    let mut checks = vec![CheckOutcome::new(
        "no_zero_found",
        report.verdict == SampleVerdict::NoZeroFound,
    )];
    let mut result = json!({ "sampling": to_value(&report) });
    if a.lines > 0 {
        let lines = random_lines(&spec, a.lines, seed ^ 0x11).map_err(usage)?;
        let t1 = fibered_line_checks(&p, &spec, &lines, LINE_T_DENSITY, seed).map_err(usage)?;
        checks.push(CheckOutcome::new("line_checks", t1.all_pass));
        result["lines"] = to_value(&t1);
    }
    Ok(Outcome {
        result,
        checks,
        tolerances: tolerances(&[("falsify", FALSIFY_TOL)]),
    })
}

#[derive(serde::Deserialize)]
struct PointJson {
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

fn read_point(path: &std::path::Path) -> Result<Vec<C64>, CliError> {
    let pt: PointJson = read_json(path)?;
    if !pt.im.is_empty() && pt.im.len() != pt.re.len() {
        return Err(usage(format!(
            "{}: re has {} entries but im has {}",
            path.display(),
            pt.re.len(),
            pt.im.len()
        )));
    }
    Ok(pt
        .re
        .iter()
        .enumerate()
        .map(|(j, &x)| C64::new(x, pt.im.get(j).copied().unwrap_or(0.0)))
        .collect())
}

fn point_value(z: &[C64]) -> Value {
    json!({ "re": z.iter().map(|c| c.re).collect::<Vec<_>>(), "im": z.iter().map(|c| c.im).collect::<Vec<_>>() })
}

pub fn transform(a: &TransformArgs) -> Result<Outcome, CliError> {
    let mut residual = None;
    let output = match a.map {
        MapName::Phi | MapName::PhiInv => {
            let f = if a.map == MapName::Phi { phi } else { phi_inv };
            let z = read_point(&a.input)?;
            point_value(
                &z.iter()
                    .map(|&x| f(x))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(usage)?,
            )
        }
        MapName::PhiN => point_value(&phi_n(&read_point(&a.input)?).map_err(usage)?),
        MapName::PhiNInv => point_value(&phi_n_inv(&read_point(&a.input)?).map_err(usage)?),
        MapName::Eta | MapName::EtaInv => {
            let z = read_point(&a.input)?;
            let (w, r) = if a.map == MapName::Eta {
                eta(&z)
            } else {
                eta_inv(&z)
            }
            .map_err(usage)?;
            residual = Some(r);
            point_value(&w)
        }
        MapName::MatrixCayley => to_value(&matrix_cayley(&read_json(&a.input)?).map_err(usage)?),
        MapName::MatrixCayleyInv => {
            to_value(&matrix_cayley_inv(&read_json(&a.input)?).map_err(usage)?)
        }
        MapName::Psi => to_value(&psi(&read_json(&a.input)?).map_err(usage)?),
        MapName::PsiInv => to_value(&psi_inv(&read_json(&a.input)?).map_err(usage)?),
    };
    let mut result = json!({ "schema": tubestab::SCHEMA, "output": output });
    if let Some(r) = residual {
        result["pattern_residual"] = json!(r);
    }
    Ok(Outcome {
        result,
        checks: Vec::new(),
        tolerances: tolerances(&[("pole", POLE_TOL)]),
    })
}

pub fn suite(a: &SuiteArgs, seed: u64) -> Result<Outcome, CliError> {
    let name: SuiteName = a.name.parse().map_err(usage)?;
    let report = run_suite(name, seed);
    let checks = report
        .checks
        .iter()
        .map(|c| CheckOutcome::new(&c.name, c.passed))
        .collect();
    let tols = report
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.tol))
        .collect();
    Ok(Outcome {
        result: to_value(&report),
        checks,
        tolerances: tols,
    })
}

pub fn extract(a: &ExtractArgs) -> Result<Outcome, CliError> {
    let rep: DetRep = read_json(&a.rep)?;
    rep.validate().map_err(usage)?;
    let p = rep.extract().map_err(usage)?;
    if let Some(path) = &a.out {
        write_json(path, &p)?;
    }
    Ok(Outcome {
        result: to_value(&p),
        checks: Vec::new(),
        tolerances: BTreeMap::new(),
    })
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};

use lasgap::certify::{
    self, certify_ilp_with, certify_unconstrained, is_svc, no_gap_precheck,
    search_unconstrained_certificate, top_fourier, CertifyOptions, GapCertificate,
};
use lasgap::error::Error;
use lasgap::instances::{self, default_b};
use lasgap::moment::{lasserre_check, CornerForm};
use lasgap::scalar::parse_rational;
use lasgap::speig::{dense_spectrum, eigenvalues_dpr1, DEFAULT_ROOT_TOL};
use lasgap::{Instance, Rational};

use crate::cli::{
    CertifyArgs, Cli, Command, EigArgs, FeasArgs, Family, GenArgs, ReportArgs, ScanArgs,
    SearchArgs,
};
use crate::files::{self, parse_subset};
use crate::report;

/// Environment variable naming the default output directory of `gen`.
pub const OUT_DIR_ENV: &str = "LASGAP_OUT_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Gen(a) => gen(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Feas(a) => feas(a, out),
        Command::Eig(a) => eig(a, out),
        Command::ScanKnap(a) => scan_knap(a, out),
        Command::Degree(a) => degree(a, out),
        Command::Svc(a) => svc(a, out),
        Command::Search(a) => search(a, out),
    }
}

fn rational(text: &str, what: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!("--{what}: {e}"))
}

fn emit_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn out_dir(arg: Option<PathBuf>) -> PathBuf {
    arg.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(out: &mut dyn Write, path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn file_tag(r: &Rational) -> String {
    r.to_string().replace('/', "_").replace('-', "m")
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<u8> {
    let n = a.n;
    let k = || rational(&a.k, "k");
    let b = || match &a.b {
        Some(b) => rational(b, "b"),
        None => Ok(default_b(n)),
    };
    let (stem, inst, cert): (String, Instance, Option<GapCertificate>) = match a.family {
        Family::Gapknap => {
            let k = k()?;
            let (inst, cert) = instances::gen_gapknap(n, &k)?;
            (format!("gapknap-n{n}-k{}", file_tag(&k)), inst, Some(cert))
        }
        Family::GapknapAug => {
            let k = k()?;
            let (inst, cert) = instances::gen_gapknap_augmented(n, &k)?;
            (format!("gapknap-aug-n{n}-k{}", file_tag(&k)), inst, Some(cert))
        }
        Family::EmptyHull => {
            let (inst, cert) = instances::gen_empty_hull(n, &b()?)?;
            (format!("empty-hull-n{n}"), inst, Some(cert))
        }
        Family::SvcExclude => {
            let vertices = a
                .vertices
                .iter()
                .map(|v| parse_subset(v, n))
                .collect::<Result<Vec<_>>>()?;
            let inst = instances::svc_exclude(n, &vertices, &b()?)?;
            (format!("svc-exclude-n{n}"), inst, None)
        }
        Family::OriginIndicator => {
            let f = instances::gen_origin_indicator(n)?;
            (format!("origin-indicator-n{n}"), Instance::unconstrained(f), None)
        }
        Family::TwoPoint => {
            let point = |p: &Option<String>, name: &str| -> Result<_> {
                let text = p.as_deref().ok_or_else(|| anyhow!("two-point needs --{name}"))?;
                parse_subset(text, n)
            };
            let f = instances::two_point_indicator(n, point(&a.i1, "i1")?, point(&a.i2, "i2")?)?;
            (format!("two-point-n{n}"), Instance::unconstrained(f), None)
        }
    };
    let dir = out_dir(a.out_dir);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(out, &dir.join(format!("{stem}.instance.json")), &files::instance_json(&inst))?;
    if let Some(cert) = cert {
        write_file(
            out,
            &dir.join(format!("{stem}.certificate.json")),
            &files::certificate_json(&cert),
        )?;
    }
    Ok(EXIT_OK)
}

fn certify(a: CertifyArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = files::load_instance(&a.instance)?;
    let cert = files::load_certificate(&a.certificate)?;
    ensure!(
        cert.n() == inst.n(),
        "certificate has n = {}, instance has n = {}",
        cert.n(),
        inst.n()
    );
    let rep = if inst.m() == 0 {
        certify_unconstrained(&inst.objective, &cert)?
    } else {
        let opts = CertifyOptions {
            allow_redundant: a.allow_redundant,
            ..CertifyOptions::default()
        };
        match certify_ilp_with(&inst, &cert, opts) {
            Err(Error::RedundantConstraint { index }) => bail!(
                "constraint {index} excludes no 0/1 point; pass --allow-redundant to certify anyway"
            ),
            other => other?,
        }
    };
    if a.json {
        emit_json(out, &report::cert_json(&rep))?;
    } else {
        write!(out, "{}", report::cert_text(&rep))?;
    }
    Ok(if rep.verdict() { EXIT_OK } else { EXIT_FAILED })
}

fn feas(a: FeasArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = files::load_instance(&a.instance)?;
    let y = files::load_vector(&a.vector)?.moment_vector();
    let rep = lasserre_check(&inst, &y, a.level, a.tol)?;
    if a.json {
        emit_json(out, &report::feas_json(&rep))?;
    } else {
        write!(out, "{}", report::feas_text(&rep))?;
    }
    Ok(if rep.feasible() { EXIT_OK } else { EXIT_FAILED })
}

fn float_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>()
                .or_else(|_| parse_rational(p).map(|r| lasgap::Scalar::to_f64(&r)))
                .map_err(|_| anyhow!("--{what}: not a number: {p:?}"))
        })
        .collect()
}

fn eig(a: EigArgs, out: &mut dyn Write) -> Result<u8> {
    let diag = float_list(&a.diag, "diag")?;
    let rho = float_list(&a.rho, "rho")?;
    ensure!(rho.len() == 1, "--rho takes a single value");
    let signs = match &a.signs {
        None => vec![1; diag.len()],
        Some(s) => s
            .split(',')
            .map(|p| match p.trim() {
                "1" | "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                other => Err(anyhow!("--signs: expected 1 or -1, got {other:?}")),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let form = CornerForm::new(diag, rho[0], signs)?;
    let rep = eigenvalues_dpr1(&form, DEFAULT_ROOT_TOL)?;
    let dense = if a.dense_check {
        let spectrum = dense_spectrum(&form.assemble())?;
        let diff = spectrum
            .iter()
            .zip(&rep.eigenvalues)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        Some((spectrum, diff))
    } else {
        None
    };
    if a.json {
        let d = dense.as_ref().map(|(s, d)| (s.as_slice(), *d));
        emit_json(out, &report::eig_json(&rep, d))?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "{}", report::eig_line(&rep.eigenvalues))?;
    let residuals = rep
        .residuals
        .iter()
        .map(|r| format!("{r:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    writeln!(out, "residuals (secular roots): {residuals}")?;
    for (v, m) in &rep.repeated {
        writeln!(out, "repeated diagonal value {v:.10} kept {m} time(s)")?;
    }
    if let Some((spectrum, diff)) = dense {
        writeln!(out, "dense oracle: {}", report::eig_line(&spectrum))?;
        writeln!(out, "max abs difference: {diff:.3e}")?;
    }
    Ok(EXIT_OK)
}

fn scan_knap(a: ScanArgs, out: &mut dyn Write) -> Result<u8> {
    let k = rational(&a.k, "k")?;
    let scan = instances::scan_gapknap(a.n, &k, a.jobs)?;
    if a.json {
        emit_json(out, &report::scan_json(&scan))?;
    } else {
        write!(out, "{}", report::scan_text(&scan))?;
    }
    Ok(EXIT_OK)
}

fn degree(a: ReportArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = files::load_instance(&a.instance)?;
    let f = &inst.objective;
    let top = top_fourier(f);
    let pre = match no_gap_precheck(f) {
        Ok(p) => Some(p),
        Err(Error::ConstantObjective) => None,
        Err(e) => return Err(e.into()),
    };
    if a.json {
        emit_json(out, &report::degree_json(inst.n(), &top, pre.as_ref()))?;
    } else {
        write!(out, "{}", report::degree_text(inst.n(), &top, pre.as_ref()))?;
    }
    Ok(EXIT_OK)
}

fn svc(a: ReportArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = files::load_instance(&a.instance)?;
    let verdicts: Vec<_> = inst
        .constraints
        .iter()
        .map(|g| is_svc(g, inst.n()))
        .collect();
    if a.json {
        emit_json(out, &report::svc_json(&verdicts))?;
    } else {
        write!(out, "{}", report::svc_text(&verdicts))?;
    }
    Ok(EXIT_OK)
}

fn search(a: SearchArgs, out: &mut dyn Write) -> Result<u8> {
    let inst = files::load_instance(&a.instance)?;
    ensure!(
        inst.m() == 0,
        "search handles unconstrained instances only (found {} constraints)",
        inst.m()
    );
    let outcome = search_unconstrained_certificate(&inst.objective, a.budget)?;
    if a.json {
        emit_json(out, &report::search_json(&outcome))?;
    }
    match &outcome {
        certify::SearchOutcome::Found {
            certificate,
            attempts,
            report: rep,
        } => {
            if !a.json {
                writeln!(out, "certificate found after {attempts} attempt(s)")?;
                write!(out, "{}", report::cert_text(rep))?;
            }
            if let Some(path) = &a.out {
                let text = files::certificate_json(certificate);
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                if !a.json {
                    writeln!(out, "wrote {}", path.display())?;
                }
            }
            Ok(EXIT_OK)
        }
        certify::SearchOutcome::NotFound { attempts } => {
            if !a.json {
                writeln!(
                    out,
                    "no certificate found in {attempts} attempt(s) (not a proof that no gap exists)"
                )?;
            }
            Ok(EXIT_FAILED)
        }
    }
}

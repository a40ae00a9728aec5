use std::collections::BTreeMap;

use crate::channel::make_correlated_pair;
use crate::detector::{energy_pdf, DetectorModel};
use crate::simulator::{derive_seed, run_ber, ScenarioConfig};
use crate::sumrate::{db_to_linear, sweep_sum_rate};
use crate::weights::{build_weight_set, closed_form_norms, single_cross_term_norms};

use super::params::Params;
use super::table::{fmt_num, Cell, RunManifest, Table};
use super::CliError;

/// A rendered output file; `path == "-"` means stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: String,
    pub text: String,
}

const WEIGHTS_PARAMS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("k", "8"),
    ("alpha", "0:0.9:10"),
    ("rho", "0:0.95:20"),
    ("rho_phase", "0"),
    ("paper_closed_forms", "false"),
];

const THEORY_PARAMS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("n", "1,10,100,1000"),
    ("snr_db", "-10:10:21"),
    ("pdf_out", ""),
    ("pdf_points", "2001"),
];

const BER_PARAMS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("n", "10,100"),
    ("snr_db", "-10:0:5"),
    ("bits", "200000"),
    ("alpha", "0.3"),
    ("rho", "0"),
    ("rho_phase", "0"),
    ("g", "1"),
    ("k", "8"),
    ("m", "64"),
];

const SUMRATE_PARAMS: &[(&str, &str)] = &[
    ("seed", "0"),
    ("gamma_db", "30"),
    ("rho", "0.1,0.5,0.9"),
    ("g", "1"),
    ("alpha", "0,log:1e-4:0.99:200"),
    ("m", "64"),
    ("pe_target", "1e-5"),
    ("n_max", "1000000"),
];

pub(super) fn dispatch(
    command: &'static str,
    flags: &BTreeMap<&'static str, String>,
    config: &BTreeMap<String, String>,
    out: String,
) -> Result<Vec<Artifact>, CliError> {
    let defaults = match command {
        "weights" => WEIGHTS_PARAMS,
        "theory" => THEORY_PARAMS,
        "ber" => BER_PARAMS,
        "sumrate" => SUMRATE_PARAMS,
        other => unreachable!("unknown command {other}"),
    };
    let params = Params::resolve(defaults, flags, config)?;
    match command {
        "weights" => weights(params, out),
        "theory" => theory(params, out),
        "ber" => ber(params, out),
        _ => sumrate(params, out),
    }
}

fn in_unit_interval(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !(**v >= 0.0 && **v < 1.0)) {
        Some(v) => Err(CliError::Usage(format!("--{name}: {v} is outside [0, 1)"))),
        None => Ok(()),
    }
}

fn finish(command: &'static str, schema: &'static str, params: Params, out: String, table: &Table) -> Artifact {
    let manifest = RunManifest {
        command,
        schema,
        params,
        out: out.clone(),
    };
    Artifact {
        path: out,
        text: table.render(&manifest),
    }
}

const CONSTRAINT_TOL: f64 = 1e-9;

fn weights(params: Params, out: String) -> Result<Vec<Artifact>, CliError> {
    let seed = params.u64("seed")?;
    let k = params.usize("k")?;
    let alphas = params.grid("alpha")?;
    let rhos = params.grid("rho")?;
    let phase = params.f64("rho_phase")?;
    let compare = params.bool("paper_closed_forms")?;
    in_unit_interval("alpha", &alphas)?;
    in_unit_interval("rho", &rhos)?;

    let mut columns = vec!["alpha", "rho_mag", "norm0_sq", "norm1_sq", "xi_oracle", "xi_paper_printed"];
    if compare {
        columns.extend(["norm1_sq_paper_printed", "xi_difference"]);
    }
    let mut table = Table::new(columns);
    let mut index = 0u64;
    for &alpha in &alphas {
        for &rho in &rhos {
            let pair = make_correlated_pair(k, rho, phase, 1.0, derive_seed(seed, index))?;
            index += 1;
            let ws = build_weight_set(&pair, alpha)?;

            // Constraint and closed-form cross-checks on the solved weights.
            let resp = |h: &crate::channel::ComplexVector<f64>, w| -> Result<f64, CliError> {
                Ok(h.transpose_dot(w)?.norm())
            };
            let residuals = [
                resp(pair.h_su(), ws.omega1())? - alpha.sqrt(),
                resp(pair.h_pu(), ws.omega1())? - (1.0 - alpha).sqrt(),
                resp(pair.h_su(), ws.omega0())?,
                resp(pair.h_pu(), ws.omega0())? - (1.0 - alpha).sqrt(),
            ];
            let closed = closed_form_norms(alpha, rho)?;
            let norm_err = (closed.norm0_sq - ws.norm0_sq())
                .abs()
                .max((closed.norm1_sq - ws.norm1_sq()).abs());
            if residuals.iter().any(|r| r.abs() > CONSTRAINT_TOL) || norm_err > CONSTRAINT_TOL {
                return Err(CliError::Validation(format!(
                    "weight check failed at alpha={alpha}, rho={rho}: residuals {residuals:?}, norm error {norm_err:e}"
                )));
            }

            let printed = single_cross_term_norms(alpha, rho)?;
            let mut row: Vec<Cell> = vec![
                alpha.into(),
                rho.into(),
                ws.norm0_sq().into(),
                ws.norm1_sq().into(),
                ws.xi().into(),
                printed.xi.into(),
            ];
            if compare {
                row.push(printed.norm1_sq.into());
                row.push((printed.xi - ws.xi()).into());
            }
            table.push(row);
        }
    }
    Ok(vec![finish("weights", "weights/v1", params, out, &table)])
}

fn theory(params: Params, out: String) -> Result<Vec<Artifact>, CliError> {
    let ns = params.count_grid("n")?;
    let snrs = params.grid("snr_db")?;
    let pdf_out = params.raw("pdf_out").trim().to_string();
    let pdf_points = params.usize("pdf_points")?;
    if !pdf_out.is_empty() && pdf_points < 2 {
        return Err(CliError::Usage("--pdf-points: at least 2 points are required".into()));
    }

    let mut table = Table::new(vec!["n", "snr_db", "sigma_r_sq", "sigma_n_sq", "threshold", "pe"]);
    let mut pdf = Table::new(vec!["n", "snr_db", "epsilon", "pdf_bit0", "pdf_bit1", "pdf_mixture"]);
    for &n in &ns {
        for &snr_db in &snrs {
            let det = DetectorModel::<f64>::from_snr_db(n, snr_db)?;
            let pe = det.error_probability()?;
            if !(det.threshold > 0.0) || !(0.0..=0.5).contains(&pe) {
                return Err(CliError::Validation(format!(
                    "invalid detector at n={n}, snr_db={snr_db}: threshold {}, pe {pe}",
                    det.threshold
                )));
            }
            table.push(vec![
                n.into(),
                snr_db.into(),
                det.sigma_r_sq.into(),
                det.sigma_n_sq.into(),
                det.threshold.into(),
                pe.into(),
            ]);
            if !pdf_out.is_empty() {
                tabulate_pdf(&mut pdf, &det, snr_db, pdf_points)?;
            }
        }
    }
    let mut artifacts = vec![finish("theory", "theory/v1", params.clone(), out, &table)];
    if !pdf_out.is_empty() {
        artifacts.push(finish("theory", "theory-pdf/v1", params, pdf_out, &pdf));
    }
    Ok(artifacts)
}

/// Quadratically spaced energy grid from 0 to well past the bit-1 bulk, so
/// the narrower bit-0 density near the origin is also resolved.
fn tabulate_pdf(pdf: &mut Table, det: &DetectorModel<f64>, snr_db: f64, points: usize) -> Result<(), CliError> {
    let n = det.n_samples;
    let scale1 = det.sigma_r_sq + det.sigma_n_sq;
    let nf = n as f64;
    let upper = scale1 * (nf + 12.0 * nf.sqrt() + 24.0);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let eps = upper * t * t;
        let off = energy_pdf(eps, n, det.sigma_n_sq)?;
        let on = energy_pdf(eps, n, scale1)?;
        pdf.push(vec![
            n.into(),
            snr_db.into(),
            eps.into(),
            off.into(),
            on.into(),
            (0.5 * (off + on)).into(),
        ]);
    }
    Ok(())
}

fn ber(params: Params, out: String) -> Result<Vec<Artifact>, CliError> {
    let seed = params.u64("seed")?;
    let ns = params.count_grid("n")?;
    let snrs = params.grid("snr_db")?;
    let bits = params.usize("bits")?;
    if bits == 0 {
        return Err(CliError::Usage("--bits: must be at least 1".into()));
    }
    let alpha = params.f64("alpha")?;
    let rho = params.f64("rho")?;
    in_unit_interval("alpha", &[alpha])?;
    in_unit_interval("rho", &[rho])?;
    let base = ScenarioConfig::<f64> {
        k_antennas: params.usize("k")?,
        m_subcarriers: params.usize("m")?,
        n_samples: 1,
        alpha,
        rho_mag: rho,
        rho_phase: params.f64("rho_phase")?,
        g: params.f64("g")?,
        snr_db: 0.0,
        n_bits: bits,
        master_seed: seed,
    };

    let mut table = Table::new(vec![
        "n",
        "snr_db",
        "n_bits",
        "n_errors",
        "ber",
        "analytic_pe",
        "ci95",
        "threshold",
        "within_3sigma",
    ]);
    let mut index = 0u64;
    let mut inside = 0usize;
    for &n in &ns {
        for &snr_db in &snrs {
            let cfg = ScenarioConfig {
                n_samples: n,
                snr_db,
                master_seed: derive_seed(seed, index),
                ..base.clone()
            };
            index += 1;
            let r = run_ber(&cfg)?;
            let ok = r.within_3_sigma();
            inside += ok as usize;
            table.push(vec![
                n.into(),
                snr_db.into(),
                r.n_bits.into(),
                r.n_errors.into(),
                r.ber.into(),
                r.analytic_pe.into(),
                r.per_point_ci95.into(),
                r.threshold.into(),
                ok.into(),
            ]);
        }
    }
    table.footer.push(format!("within_3sigma {inside}/{}", table.rows.len()));
    Ok(vec![finish("ber", "ber/v1", params, out, &table)])
}

fn sumrate(params: Params, out: String) -> Result<Vec<Artifact>, CliError> {
    let gamma_db = params.f64("gamma_db")?;
    let rhos = params.grid("rho")?;
    let gs = params.grid("g")?;
    let alphas = params.grid("alpha")?;
    let m = params.usize("m")?;
    let pe_target = params.f64("pe_target")?;
    let n_max = params.usize("n_max")?;
    in_unit_interval("rho", &rhos)?;
    in_unit_interval("alpha", &alphas)?;
    if let Some(g) = gs.iter().find(|g| **g < 0.0) {
        return Err(CliError::Usage(format!("--g: {g} is negative")));
    }

    let baseline = (1.0 + db_to_linear(gamma_db)).log2();
    let mut table = Table::new(vec!["rho_mag", "g", "alpha", "n_alpha", "pu_rate", "su_rate", "total"]);
    table.footer.push(format!("baseline log2(1+gamma) {}", fmt_num(baseline)));
    for &rho in &rhos {
        for &g in &gs {
            let curve = sweep_sum_rate(gamma_db, rho, g, m, &alphas, pe_target, n_max)?;
            for p in &curve {
                if !p.total.is_finite() {
                    return Err(CliError::Validation(format!("non-finite sum rate at alpha={}", p.alpha)));
                }
                table.push(vec![
                    rho.into(),
                    g.into(),
                    p.alpha.into(),
                    p.n_alpha.into(),
                    p.pu_rate.into(),
                    p.su_rate.into(),
                    p.total.into(),
                ]);
            }
            if let Some(peak) = curve.iter().max_by(|a, b| a.total.total_cmp(&b.total)) {
                table.footer.push(format!(
                    "peak rho_mag={} g={} alpha={} n_alpha={} total={} gain={}",
                    fmt_num(rho),
                    fmt_num(g),
                    fmt_num(peak.alpha),
                    peak.n_alpha.map_or_else(String::new, |n| n.to_string()),
                    fmt_num(peak.total),
                    fmt_num(peak.total - baseline),
                ));
            }
        }
    }
    Ok(vec![finish("sumrate", "sumrate/v1", params, out, &table)])
}

//! Command-line front end. Every subcommand writes to the given sinks and returns the exit
//! code: 0 on success, 1 on numerical failure or a failed validation, 2 on usage errors.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::appendix;
use crate::bautin::{bautin_generators, nakayama_certify};
use crate::elliptic::{level_grid, periods_complex, periods_csv, periods_real, pf_residual};
use crate::exactalg::{Monomial, MultiPoly, PolyU, PolyXY, Rational};
use crate::forms::{AnnulusCase, OneForm, Reducer};
use crate::francoise::{melnikov, ArcJson, MelnikovOutcome, ParamArc, DEFAULT_MAX_ORDER};
use crate::simulate::{displacement_scan, find_limit_cycles, SimConfig};
use crate::theorems;
use crate::zeros::{
    count_zeros_real, derivative_element, random_batch, winding_number_f, ContourSampler, ContourSpec,
    CountMethod, VElement, ZeroReport, SCAN_TOL,
};

#[derive(Parser, Debug)]
#[command(name = "rayleigh-lienard", version, about = "Melnikov functions, periods and limit cycles of the perturbed Rayleigh-Lienard oscillator")]
pub struct Cli {
    /// Worker threads for parallel grids (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Canonical decomposition `omega = (u(H) x^2 + v(H)) y dx + r dH + dR`.
    Reduce {
        #[arg(long)]
        case: AnnulusCase,
        /// Sum of monomial terms, e.g. "y^3 dx" or "x^2*y dx - 3/7 x y dy".
        #[arg(long)]
        form: String,
        #[arg(long)]
        json: bool,
    },
    /// First nonvanishing Melnikov function along an arc.
    Melnikov {
        #[arg(long)]
        case: AnnulusCase,
        /// JSON file `{"lambda": [[l11, l12, ...], ..., [l61, ...]]}`.
        #[arg(long)]
        arc: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: u32,
        #[arg(long)]
        json: bool,
    },
    /// Generators of the Bautin ideal for `H = y^2/2 + a x^2/2 + b x^4/4`.
    Bautin {
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Truncated Nakayama certificate that `(b)` and `(b0)` generate the same ideal.
    Nakayama {
        /// JSON file `{"b": ["l1^2 + l1*l2^3", ...], "b0": ["l1^2", ...]}`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        cap: u32,
        #[arg(long)]
        json: bool,
    },
    /// Periods `I_0, I_2, J_0, J_2` at one level, or CSV over a level grid.
    Periods {
        #[arg(long)]
        case: AnnulusCase,
        /// Real level or complex level such as "0.5+0.1i".
        #[arg(long, allow_hyphen_values = true)]
        h: Option<String>,
        /// Emit CSV rows `h,I0,I2,J0,J2` on a graded grid of this size instead.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Picard-Fuchs residuals on a level grid.
    Pfcheck {
        #[arg(long)]
        case: AnnulusCase,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Largest accepted relative residual.
        #[arg(long, default_value_t = 1e-9)]
        max_residual: f64,
        #[arg(long)]
        csv: bool,
    },
    /// Zeros of `p I_2 + q I_0`, or a seeded random batch with a histogram of counts.
    Zeros {
        /// Required unless `--random` is given; a batch without it covers every case.
        #[arg(long)]
        case: Option<AnnulusCase>,
        /// Coefficients `c0,c1,c2` of `p`.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Coefficients `c0,c1,c2` of `q`.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Real)]
        method: Method,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = SCAN_TOL)]
        tol: f64,
        /// Batch size of seeded random elements.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Winding number of `F = p~ J_2/J_0 + q~` on the exterior eight-loop contour.
    Argwind {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 1e3)]
        radius: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Direct integration: displacement samples and limit cycles in a level window.
    Simulate {
        #[arg(long)]
        case: AnnulusCase,
        /// Six comma-separated values `l1,...,l6`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Level window `lo,hi` (default: the annulus interval, trimmed).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// CSV of `x0,h,d,return_time` for plotting.
        #[arg(long)]
        csv: bool,
    },
    /// Checks every tabulated decomposition identity and its independent reduction.
    ValidateAppendix {
        #[arg(long)]
        json: bool,
    },
    /// Checks the first-order tables of the six basis arcs and the cubic center-direction arcs.
    ValidateTheorems {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Real,
    Argwind,
}

/// Parses `argv` (including the program name) and runs it against stdout and stderr.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &mut buf)),
            Err(e) => Err(anyhow!(e)),
        },
        None => execute(&cli.command, &mut buf),
    };
    let outcome = outcome.and_then(|ok| {
        out.write_all(&buf)?;
        out.flush()?;
        Ok(ok)
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

/// `Ok(false)` means the run completed but a check failed.
fn execute(cmd: &Command, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::Reduce { case, form, json } => reduce(*case, form, *json, out),
        Command::Melnikov {
            case,
            arc,
            max_order,
            json,
        } => run_melnikov(*case, arc, *max_order, *json, out),
        Command::Bautin { a, b, json } => run_bautin(a, b, *json, out),
        Command::Nakayama { input, cap, json } => run_nakayama(input, *cap, *json, out),
        Command::Periods {
            case,
            h,
            grid,
            tol,
            json,
        } => run_periods(*case, h.as_deref(), *grid, *tol, *json, out),
        Command::Pfcheck {
            case,
            grid,
            tol,
            max_residual,
            csv,
        } => run_pfcheck(*case, *grid, *tol, *max_residual, *csv, out),
        Command::Zeros {
            case,
            p,
            q,
            method,
            grid,
            tol,
            random,
            seed,
            json,
        } => match random {
            Some(n) => run_batch(*case, *n, *seed, *grid, *tol, *json, out),
            None => {
                let case = case.ok_or_else(|| anyhow!("--case is required without --random"))?;
                let (p, q) = (
                    p.as_deref().ok_or_else(|| anyhow!("--p is required"))?,
                    q.as_deref().ok_or_else(|| anyhow!("--q is required"))?,
                );
                run_zeros(case, p, q, *method, *grid, *tol, *json, out)
            }
        },
        Command::Argwind {
            p,
            q,
            radius,
            delta,
            json,
        } => run_argwind(p, q, *radius, *delta, *json, out),
        Command::Simulate {
            case,
            lambda,
            eps,
            grid,
            window,
            tol,
            json,
            csv,
        } => run_simulate(*case, lambda, *eps, *grid, window.as_deref(), *tol, *json, *csv, out),
        Command::ValidateAppendix { json } => validate_appendix(*json, out),
        Command::ValidateTheorems { json } => validate_theorems(*json, out),
    }
}

fn coeff_strings(p: &PolyU, len: usize) -> Vec<String> {
    p.dense(len).iter().map(Rational::to_string).collect()
}

fn poly_len(p: &PolyU) -> usize {
    p.degree().map_or(1, |d| d as usize + 1)
}

fn xy_terms(p: &PolyXY) -> serde_json::Value {
    p.terms()
        .map(|((i, j), c)| json!({"i": i, "j": j, "c": c.to_string()}))
        .collect()
}

fn reduce(case: AnnulusCase, form: &str, as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let omega: OneForm = form
        .parse()
        .map_err(|e: crate::forms::FormParseError| anyhow!("cannot parse form term {:?}: {}", e.term, e.reason))?;
    let d = Reducer::new(case).reduce(&omega, None)?;
    if as_json {
        let v = json!({
            "case": case,
            "form": omega.to_string(),
            "u": coeff_strings(&d.u, poly_len(&d.u)),
            "v": coeff_strings(&d.v, poly_len(&d.v)),
            "r": xy_terms(&d.r),
            "R": xy_terms(&d.big_r),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        writeln!(out, "case: {case}")?;
        writeln!(out, "omega = {omega}")?;
        writeln!(out, "u(H) = {}", d.u)?;
        writeln!(out, "v(H) = {}", d.v)?;
        writeln!(out, "r = {}", d.r)?;
        writeln!(out, "R = {}", d.big_r)?;
    }
    Ok(true)
}

fn run_melnikov(case: AnnulusCase, path: &PathBuf, max_order: u32, as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: ArcJson = serde_json::from_str(&text).context("parsing arc JSON")?;
    let arc = ParamArc::try_from(raw)?;
    if max_order == 0 {
        bail!("--max-order must be at least 1");
    }
    let outcome = melnikov(&arc, case, max_order)?;
    let v = match &outcome {
        MelnikovOutcome::Nonzero(r) => json!({
            "case": case,
            "order": r.order,
            "p": coeff_strings(&r.p, 3),
            "q": coeff_strings(&r.q, 3),
        }),
        MelnikovOutcome::AllVanish { max_order, arc_is_zero, .. } => json!({
            "case": case,
            "order": null,
            "all_vanish_through": max_order,
            "arc_is_zero": arc_is_zero,
        }),
    };
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    } else {
        match &outcome {
            MelnikovOutcome::Nonzero(r) => {
                writeln!(out, "order {}: M_{} = ({}) I_2 + ({}) I_0", r.order, r.order, r.p, r.q)?
            }
            MelnikovOutcome::AllVanish { max_order, .. } => {
                writeln!(out, "M_1, ..., M_{max_order} vanish identically")?
            }
        }
    }
    Ok(true)
}

fn run_bautin(a: &Rational, b: &Rational, as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let gens = bautin_generators(a, b)?;
    let strings: Vec<String> = gens.generators.iter().map(MultiPoly::to_string).collect();
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"a": a, "b": b, "generators": strings}))?)?;
    } else {
        writeln!(out, "({})", strings.join(", "))?;
    }
    Ok(true)
}

/// Parses `"l1^2 + 3/2*l1*l2^3 - l2"` in the variables `l1, ..., l{nvars}`.
pub fn parse_lambda_poly(s: &str, nvars: usize) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(nvars);
    let normalized = s.replace('-', " -").replace('+', " +");
    let mut terms: Vec<String> = Vec::new();
    for tok in normalized.split_whitespace() {
        if tok.starts_with(['+', '-']) || terms.is_empty() {
            terms.push(tok.to_string());
        } else {
            let last = terms.last_mut().expect("nonempty");
            last.push('*');
            last.push_str(tok);
        }
    }
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.trim_start_matches('+')),
        };
        let mut c = Rational::one();
        let mut exps = vec![0u32; nvars];
        for f in body.split('*').map(str::trim).filter(|f| !f.is_empty()) {
            if let Some(var) = f.strip_prefix('l') {
                let (idx, e) = match var.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().with_context(|| format!("exponent in {f:?}"))?),
                    None => (var, 1),
                };
                let k: usize = idx.parse().with_context(|| format!("variable in {f:?}"))?;
                if k == 0 || k > nvars {
                    bail!("variable l{k} outside l1..l{nvars}");
                }
                exps[k - 1] += e;
            } else {
                c = &c * &f.parse::<Rational>().map_err(|e| anyhow!("{e}"))?;
            }
        }
        if neg {
            c = -c;
        }
        out = out.add(&MultiPoly::term(c, Monomial::new(exps)));
    }
    Ok(out)
}

fn max_variable(s: &str) -> usize {
    s.split('l')
        .skip(1)
        .filter_map(|t| t.chars().take_while(char::is_ascii_digit).collect::<String>().parse().ok())
        .max()
        .unwrap_or(1)
}

#[derive(serde::Deserialize)]
struct NakayamaInput {
    b: Vec<String>,
    b0: Vec<String>,
}

fn run_nakayama(path: &PathBuf, cap: u32, as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let input: NakayamaInput = serde_json::from_str(&text).context("parsing Nakayama input")?;
    let nvars = input.b.iter().chain(&input.b0).map(|s| max_variable(s)).max().unwrap_or(1);
    let parse = |v: &[String]| v.iter().map(|s| parse_lambda_poly(s, nvars)).collect::<Result<Vec<_>>>();
    let (b, b0) = (parse(&input.b)?, parse(&input.b0)?);
    let strings = |m: &[Vec<MultiPoly>]| -> Vec<Vec<String>> {
        m.iter().map(|r| r.iter().map(MultiPoly::to_string).collect()).collect()
    };
    match nakayama_certify(&b, &b0, cap) {
        Ok(cert) => {
            if as_json {
                let v = json!({
                    "certified": true,
                    "truncation_degree": cert.truncation_degree,
                    "a": strings(&cert.a),
                    "inverse": strings(&cert.matrix_entries),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(out, "certified through degree {}", cert.truncation_degree)?;
                for (i, row) in strings(&cert.a).iter().enumerate() {
                    writeln!(out, "A[{i}] = [{}]", row.join(", "))?;
                }
                for (i, row) in strings(&cert.matrix_entries).iter().enumerate() {
                    writeln!(out, "(I+A)^-1[{i}] = [{}]", row.join(", "))?;
                }
            }
            Ok(true)
        }
        Err(fail) => {
            if as_json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json!({"certified": false, "failure": fail.to_string()}))?)?;
            } else {
                writeln!(out, "not certified: {fail}")?;
            }
            Ok(false)
        }
    }
}

fn run_periods(
    case: AnnulusCase,
    h: Option<&str>,
    grid: Option<usize>,
    tol: f64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    if let Some(n) = grid {
        write!(out, "{}", periods_csv(case, &level_grid(case, n), tol)?)?;
        return Ok(true);
    }
    let h = h.ok_or_else(|| anyhow!("give --h or --grid"))?;
    let value = match h.parse::<f64>() {
        Ok(x) => periods_real(case, x, tol)?,
        Err(_) => {
            let z: Complex64 = h.parse().map_err(|_| anyhow!("cannot parse level {h:?}"))?;
            periods_complex(case, z, tol)?
        }
    };
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        writeln!(out, "case {case}, h = {}, branch {:?}", value.h, value.branch_tag)?;
        for (name, v) in [("I0", value.i0), ("I2", value.i2), ("J0", value.j0), ("J2", value.j2)] {
            writeln!(out, "{name} = {:.16e} {:+.16e}i", v.re, v.im)?;
        }
        writeln!(out, "estimated error {:.1e}", value.est_error)?;
    }
    Ok(true)
}

fn run_pfcheck(case: AnnulusCase, grid: usize, tol: f64, max_residual: f64, as_csv: bool, out: &mut dyn Write) -> Result<bool> {
    let levels = level_grid(case, grid);
    let rows = levels
        .iter()
        .map(|&h| Ok((h, pf_residual(case, h, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().fold(0.0f64, |m, (_, (r1, r2))| m.max(*r1).max(*r2));
    if as_csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["h", "residual_i0", "residual_i2"])?;
        for (h, (r1, r2)) in &rows {
            w.write_record([format!("{h:.17e}"), format!("{r1:.3e}"), format!("{r2:.3e}")])?;
        }
        out.write_all(&w.into_inner()?)?;
    } else {
        writeln!(out, "case {case}: {} levels, max relative residual {worst:.3e} (limit {max_residual:.1e})", rows.len())?;
    }
    Ok(worst <= max_residual)
}

fn parse_coeffs(s: &str) -> Result<[Rational; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.is_empty() || parts.len() > 3 {
        bail!("expected at most 3 comma-separated coefficients, got {s:?}");
    }
    let mut c: [Rational; 3] = std::array::from_fn(|_| Rational::zero());
    for (k, p) in parts.iter().enumerate() {
        c[k] = p.parse().map_err(|e| anyhow!("coefficient {p:?}: {e}"))?;
    }
    Ok(c)
}

fn element_json(e: &VElement) -> serde_json::Value {
    json!({"case": e.case, "p": coeff_strings(&e.p, 3), "q": coeff_strings(&e.q, 3)})
}

fn write_report(out: &mut dyn Write, label: &str, r: &ZeroReport) -> Result<()> {
    writeln!(out, "{label}: {} zero(s), bound {}, certified {}", r.count, r.bound, r.certified)?;
    for z in &r.locations {
        writeln!(out, "  h = {:.12e} (multiplicity {})", z.h, z.multiplicity)?;
    }
    writeln!(out, "  window [{:e}, {:e}]", r.window[0], r.window[1])?;
    for d in &r.diagnostics {
        writeln!(out, "  note: {d}")?;
    }
    Ok(())
}

fn default_sampler(radius: f64, delta: f64) -> Result<ContourSampler> {
    let spec = ContourSpec {
        radius,
        slit_half_width: delta,
        ..ContourSpec::default()
    };
    Ok(ContourSampler::new(spec)?)
}

#[allow(clippy::too_many_arguments)]
fn run_zeros(
    case: AnnulusCase,
    p: &str,
    q: &str,
    method: Method,
    grid: usize,
    tol: f64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let e = VElement::from_coeffs(case, parse_coeffs(p)?, parse_coeffs(q)?);
    match method {
        Method::Real => {
            let r = count_zeros_real(&e, grid.max(200), tol)?;
            if as_json {
                writeln!(out, "{}", serde_json::to_string_pretty(&json!({"element": element_json(&e), "report": r}))?)?;
            } else {
                write_report(out, &format!("{case}: ({}) I_2 + ({}) I_0", e.p, e.q), &r)?;
            }
            Ok(r.certified)
        }
        Method::Argwind => {
            // zeros of I' = p~ J_2 + q~ J_0 in the truncated slit domain
            let d = derivative_element(&e)?;
            if d.case != AnnulusCase::EightExterior {
                bail!("the argument principle is set up for the exterior eight loop only");
            }
            let spec = ContourSpec::default();
            let mut sampler = default_sampler(spec.radius, spec.slit_half_width)?;
            let w = winding_number_f(&d, &mut sampler)?;
            let r = ZeroReport {
                count: w.zero_bound_estimate.max(0) as usize,
                locations: Vec::new(),
                method: CountMethod::ArgumentPrinciple,
                bound: case.zero_bound() - 1,
                certified: (w.winding - w.zero_bound_estimate as f64).abs() < 0.05,
                window: [-spec.radius, spec.radius],
                diagnostics: vec![format!("counts zeros of I' in {}", w.domain)],
            };
            if as_json {
                let v = json!({"element": element_json(&e), "derivative": element_json(&d), "winding": w, "report": r});
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(out, "I' = ({}) J_2 + ({}) J_0, winding {:.6} over {} nodes", d.p, d.q, w.winding, w.samples)?;
                write_report(out, &format!("{case}: zeros of I'"), &r)?;
            }
            Ok(r.certified)
        }
    }
}

fn run_batch(
    case: Option<AnnulusCase>,
    n: usize,
    seed: u64,
    grid: usize,
    tol: f64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let cases: Vec<AnnulusCase> = case.map_or(AnnulusCase::ALL.to_vec(), |c| vec![c]);
    let summaries = cases
        .iter()
        .map(|&c| Ok(random_batch(c, n, seed, grid, tol)?))
        .collect::<Result<Vec<_>>>()?;
    let ok = summaries.iter().all(|s| s.violations == 0);
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"seed": seed, "samples": n, "tol": tol, "batches": summaries}))?)?;
    } else {
        writeln!(out, "# seed={seed} samples={n} grid={} tol={tol:e}", grid.max(200))?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "zeros", "elements"])?;
        for s in &summaries {
            for (k, count) in s.histogram.iter().enumerate() {
                w.write_record([s.case.to_string(), k.to_string(), count.to_string()])?;
            }
        }
        out.write_all(&w.into_inner()?)?;
    }
    Ok(ok)
}

fn run_argwind(p: &str, q: &str, radius: f64, delta: f64, as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let e = VElement::from_coeffs(AnnulusCase::EightExterior, parse_coeffs(p)?, parse_coeffs(q)?);
    let mut sampler = default_sampler(radius, delta)?;
    let w = winding_number_f(&e, &mut sampler)?;
    let near_integer = (w.winding - w.zero_bound_estimate as f64).abs() < 0.05;
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"element": element_json(&e), "winding": w}))?)?;
    } else {
        writeln!(out, "F = ({}) J_2/J_0 + ({})", e.p, e.q)?;
        writeln!(out, "winding {:.6}, zero estimate {}, {} nodes", w.winding, w.zero_bound_estimate, w.samples)?;
        writeln!(out, "domain: {}", w.domain)?;
    }
    Ok(near_integer)
}

fn default_window(case: AnnulusCase) -> [f64; 2] {
    let iv = case.interval();
    let hi = iv.hi.unwrap_or(2.0);
    let pad = 0.02 * (hi - iv.lo);
    [iv.lo + pad, hi - pad]
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    case: AnnulusCase,
    lambda: &[f64],
    eps: f64,
    grid: usize,
    window: Option<&[f64]>,
    tol: f64,
    as_json: bool,
    as_csv: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    let lambda: [f64; 6] = lambda.try_into().map_err(|_| anyhow!("--lambda takes six values"))?;
    let mut cfg = SimConfig::new(case, lambda, eps);
    cfg.rtol = tol;
    cfg.atol = 1e-2 * tol;
    let window = match window {
        Some(&[lo, hi]) if lo < hi => [lo, hi],
        Some(w) => bail!("--window takes two increasing values, got {w:?}"),
        None => default_window(case),
    };
    let samples = displacement_scan(&cfg, window, grid)?;
    let cycles = find_limit_cycles(&cfg, window, grid)?;
    if as_csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x0", "h", "d", "return_time"])?;
        for s in &samples {
            w.write_record([s.x0, s.h, s.d, s.return_time].map(|x| format!("{x:.17e}")))?;
        }
        out.write_all(&w.into_inner()?)?;
    } else if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"config": cfg, "window": window, "cycles": cycles, "samples": samples}))?)?;
    } else {
        writeln!(out, "{case}, eps = {eps:e}, {} samples on h in [{}, {}]", samples.len(), window[0], window[1])?;
        writeln!(out, "{} limit cycle(s)", cycles.len())?;
        for c in &cycles {
            writeln!(out, "  h* = {:.10} (x0 = {:.10}), {:?}", c.h, c.x0, c.stability)?;
        }
    }
    Ok(true)
}

fn validate_appendix(as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let checks = appendix::check_all();
    let passed = checks.iter().filter(|c| c.passed()).count();
    if as_json {
        let rows: Vec<_> = checks
            .iter()
            .map(|c| json!({"label": c.label, "identity_holds": c.identity_holds, "reduction_matches": c.reduction_matches}))
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"passed": passed, "total": checks.len(), "entries": rows}))?)?;
    } else {
        for c in checks.iter().filter(|c| !c.passed()) {
            writeln!(out, "FAILED {}: identity {}, reduction {}", c.label, c.identity_holds, c.reduction_matches)?;
        }
        writeln!(out, "{passed}/{} decompositions verified", checks.len())?;
    }
    Ok(passed == checks.len())
}

fn validate_theorems(as_json: bool, out: &mut dyn Write) -> Result<bool> {
    let first = theorems::check_first_order()?;
    let cubic = theorems::check_cubic()?;
    let ok = first.iter().chain(&cubic).all(theorems::TheoremCheck::passed);
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({"first_order": first, "cubic": cubic, "passed": ok}))?)?;
    } else {
        for c in first.iter().chain(&cubic).filter(|c| !c.passed()) {
            writeln!(out, "FAILED {}: order {:?}, coefficients match {}", c.label, c.order, c.coefficients_match)?;
        }
        let count = |v: &[theorems::TheoremCheck]| v.iter().filter(|c| c.passed()).count();
        writeln!(out, "{}/{} first-order rows verified", count(&first), first.len())?;
        writeln!(out, "{}/{} cubic arcs verified", count(&cubic), cubic.len())?;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("rayleigh-lienard").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = run_args(&["reduce", "--case", "global-center", "--frobnicate"]);
        assert_eq!(code, 2);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn reduce_y_cubed() {
        let (code, out, _) = run_args(&["reduce", "--case", "global-center", "--form", "y^3 dx", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["u"], json!(["-3/7"]));
        assert_eq!(v["v"], json!(["0/1", "12/7"]));
    }

    #[test]
    fn lambda_poly_parser() {
        let p = parse_lambda_poly("l1^2 + l1^2*l2^2 - 3/2 l1 l2^3 + 4", 2).unwrap();
        assert_eq!(p.to_string(), parse_lambda_poly("4 + l1^2 - 3/2*l1*l2^3 + l1^2*l2^2", 2).unwrap().to_string());
        assert!(parse_lambda_poly("l3", 2).is_err());
    }

    #[test]
    fn numeric_failure_exits_one() {
        let (code, _, err) = run_args(&["periods", "--case", "truncated-pendulum", "--h", "0.3"]);
        assert_eq!(code, 1);
        assert!(err.contains("outside"), "{err}");
    }

    #[test]
    fn batch_header_records_seed() {
        let (code, out, _) = run_args(&["zeros", "--case", "global-center", "--random", "4", "--seed", "17"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# seed=17 "), "{out}");
        let (_, again, _) = run_args(&["zeros", "--case", "global-center", "--random", "4", "--seed", "17"]);
        assert_eq!(out, again);
    }
}

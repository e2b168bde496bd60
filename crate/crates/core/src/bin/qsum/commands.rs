use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use qsum::analysis::{figure1_curves, lemma3_prob, ratio_string, success_probability};
use qsum::register::Amplitudes;
use qsum::verify::{check_suite, GridSpec};
use qsum::{run_sum, trace_small, FunctionTable, SmallInstance};

use crate::format;
use crate::{Command, Common, OutputFormat, TableArgs};

pub const EXTENDED_GRID_ENV: &str = "QSUM_GRID_EXTENDED";

#[derive(Debug, Deserialize)]
struct TableFile {
    n: usize,
    k: usize,
    values: Vec<usize>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum ValuesSource {
    Inline,
    File,
    Random,
}

fn random_table(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

fn resolve_table(args: &TableArgs) -> Result<(FunctionTable, ValuesSource)> {
    let file = match &args.values_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let parsed: TableFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            Some(parsed)
        }
        None => None,
    };
    let n = args.n.or(file.as_ref().map(|f| f.n));
    let k = args.k.or(file.as_ref().map(|f| f.k));
    let (Some(n), Some(k)) = (n, k) else {
        bail!("--n and --k are required unless a values file provides them");
    };
    if let Some(file) = &file {
        if args.values.is_none() && (file.n != n || file.k != k) {
            bail!("values file is for n = {}, k = {}, but n = {n}, k = {k} was requested", file.n, file.k);
        }
    }
    let (values, source) = match (&args.values, file) {
        (Some(v), _) => (v.clone(), ValuesSource::Inline),
        (None, Some(file)) => (file.values, ValuesSource::File),
        (None, None) => {
            if k < 2 {
                bail!("modulus k must be at least 2, got {k}");
            }
            (random_table(n, k, args.seed.unwrap_or(0)), ValuesSource::Random)
        }
    };
    Ok((FunctionTable::with_len(n, k, values)?, source))
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(path) => write_file(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn json_body<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn require_json(common: &Common, what: &str) -> Result<()> {
    if common.output == Some(OutputFormat::Csv) {
        bail!("{what} output is only available as JSON");
    }
    Ok(())
}

pub fn run_command(command: Command) -> Result<u8> {
    match command {
        Command::Run { table, r, common } => {
            require_json(&common, "run")?;
            let (f, source) = resolve_table(&table)?;
            let report = run_sum(&f, r, table.seed)?;
            let exact = success_probability(f.n(), f.k(), r)?;
            let body = json!({
                "values_source": source,
                "theorem5_exact": ratio_string(&exact),
                "report": report,
            });
            emit(&common, &json_body(&body)?)?;
        }
        Command::Dist { table, r, common } => {
            let (f, source) = resolve_table(&table)?;
            let report = run_sum(&f, r, None)?;
            let probs = report.distribution.probs();
            let body = match common.output.unwrap_or(OutputFormat::Json) {
                OutputFormat::Csv => {
                    let mut out = String::from("y,prob\n");
                    for (y, p) in probs.iter().enumerate() {
                        out.push_str(&format!("{y},{}\n", format::prob(*p)));
                    }
                    out
                }
                OutputFormat::Json => json_body(&json!({
                    "n": f.n(),
                    "k": f.k(),
                    "r": r,
                    "values": f.values(),
                    "values_source": source,
                    "true_sum": report.true_sum,
                    "probs": probs,
                }))?,
            };
            emit(&common, &body)?;
        }
        Command::Sweep { n, k, common } => {
            let (steps, smooth) = figure1_curves(n, k)?;
            let rows: Vec<_> = (0..=n)
                .map(|q| {
                    let pq = qsum::vandam_identify_prob(n, k, q)?;
                    Ok((q, &steps.points[q].exact, pq, &smooth.points[q].exact))
                })
                .collect::<qsum::Result<_>>()?;
            let body = match common.output.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut out = String::from("q,theorem5,vandam_pq,vandam_bound\n");
                    for (q, t5, pq, bound) in &rows {
                        out.push_str(&format!(
                            "{q},{},{},{}\n",
                            format::prob(qsum::analysis::ratio_to_f64(t5)),
                            format::prob(qsum::analysis::ratio_to_f64(pq)),
                            format::prob(qsum::analysis::ratio_to_f64(bound)),
                        ));
                    }
                    out
                }
                OutputFormat::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(q, t5, pq, bound)| {
                            json!({
                                "q": q,
                                "theorem5": qsum::analysis::ratio_to_f64(t5),
                                "theorem5_exact": ratio_string(t5),
                                "vandam_pq": qsum::analysis::ratio_to_f64(pq),
                                "vandam_pq_exact": ratio_string(pq),
                                "vandam_bound": qsum::analysis::ratio_to_f64(bound),
                                "vandam_bound_exact": ratio_string(bound),
                            })
                        })
                        .collect();
                    json_body(&json!({ "n": n, "k": k, "rows": rows }))?
                }
            };
            emit(&common, &body)?;
        }
        Command::Lemma3 { k, s, a, common } => {
            if k < 2 || s == 0 || s > k || a >= k {
                bail!("lemma3 needs k >= 2, 1 <= s <= k and 0 <= a < k");
            }
            let probs: Vec<f64> = (0..k).map(|y| lemma3_prob(k, s, a, y)).collect();
            let body = match common.output.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut out = String::from("y,prob\n");
                    for (y, p) in probs.iter().enumerate() {
                        out.push_str(&format!("{y},{}\n", format::prob(*p)));
                    }
                    out
                }
                OutputFormat::Json => json_body(&json!({ "k": k, "s": s, "a": a, "probs": probs }))?,
            };
            emit(&common, &body)?;
        }
        Command::Trace {
            which,
            values,
            seed,
            common,
        } => {
            require_json(&common, "trace")?;
            let which: SmallInstance = which.parse().map_err(anyhow::Error::msg)?;
            let (n, k) = which.shape();
            let values = values.unwrap_or_else(|| random_table(n, k, seed.unwrap_or(0)));
            let f = FunctionTable::with_len(n, k, values)?;
            let steps: Vec<_> = trace_small(&f, which)?
                .iter()
                .enumerate()
                .map(|(step, st)| {
                    let amps: Vec<[f64; 2]> = st.amps().iter().map(|c| [c.re, c.im]).collect();
                    json!({ "step": step, "amplitudes": amps })
                })
                .collect();
            let body = json!({
                "which": which,
                "n": n,
                "k": k,
                "values": f.values(),
                "steps": steps,
            });
            emit(&common, &json_body(&body)?)?;
        }
        Command::Verify { extended, common } => {
            require_json(&common, "verify")?;
            let extended = extended || std::env::var(EXTENDED_GRID_ENV).is_ok_and(|v| v == "1");
            let spec = if extended {
                GridSpec::extended()
            } else {
                GridSpec::default()
            };
            let report = check_suite(&spec)?;
            emit(&common, &json_body(&json!({ "grid": spec, "report": report }))?)?;
            return Ok(if report.all_passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}

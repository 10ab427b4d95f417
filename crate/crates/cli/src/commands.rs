//! Argument parsing and the subcommands.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use multirec_core::algebra::family_c;
use multirec_core::derive::{derivative_per_direction, derivative_uniform, Scheme};
use multirec_core::generators::{presets, Morphism};
use multirec_core::morphic::{
    check_cor1, check_hyperplane, check_main_morphic, check_non_recurrent_direction, check_power,
    classify_2x2, non_surd_2x2_witness, ConditionVerdict, Surd2x2, SurdBoundClaim,
};
use multirec_core::recurrence::{
    check_ssurdo, check_surd, check_ur, check_urd, gap_report, RecurrenceBudget, Verdict,
};
use multirec_core::{factor_at, Direction, Letter, Position, Size, WordSource};
use serde_json::json;

use crate::error::{usage, CliError, CliResult};
use crate::figures::{block_token, default_fixture_dir, return_word_tokens, verify_figures, GREEK};
use crate::presets::{build, default_letter, fixed_point, PresetOptions, Word};
use crate::render::{render, Format, RenderSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

fn parse_list(s: &str, sep: &[char]) -> CliResult<Vec<u64>> {
    s.split(sep)
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("bad number {t:?} in {s:?}")))
        })
        .collect()
}

/// "27x8".
pub fn parse_size(s: &str) -> CliResult<Size> {
    Ok(Size::new(parse_list(s, &['x', 'X'])?)?)
}

/// "1,1" or "(1,1)".
pub fn parse_direction(s: &str) -> CliResult<Direction> {
    Ok(Direction::new(parse_list(s.trim_matches(|c| c == '(' || c == ')'), &[','])?)?)
}

pub fn parse_position(s: &str) -> CliResult<Position> {
    Ok(Position(parse_list(s.trim_matches(|c| c == '(' || c == ')'), &[','])?))
}

/// "base,factor".
pub fn parse_claim(s: &str) -> CliResult<SurdBoundClaim> {
    match parse_list(s, &[','])?.as_slice() {
        [base, factor] if *base >= 2 => Ok(SurdBoundClaim {
            base: *base,
            factor: *factor,
        }),
        _ => Err(usage("claim is BASE,FACTOR with BASE >= 2")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "multirec", version, about = "Multidimensional infinite words and their recurrence")]
pub struct Cli {
    /// Worker threads for the parallel checks (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct WordArgs {
    /// Named word; see `multirec presets`.
    #[arg(long, conflicts_with = "morphism")]
    pub preset: Option<String>,
    /// Morphism in JSON, fixed point taken on --letter.
    #[arg(long)]
    pub morphism: Option<PathBuf>,
    /// Start letter of a fixed point.
    #[arg(long)]
    pub letter: Option<u32>,
    /// Dimension of thue-morse-gcd.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Seed of the toeplitz preset.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Steps of the toeplitz preset.
    #[arg(long, default_value_t = 8)]
    pub steps: u32,
    /// Constant fill letter of the toeplitz preset (random fill if absent).
    #[arg(long)]
    pub fill: Option<u32>,
}

impl WordArgs {
    fn options(&self) -> PresetOptions {
        PresetOptions {
            letter: self.letter,
            dimension: self.dim,
            seed: self.seed,
            steps: self.steps,
            fill: self.fill,
        }
    }

    fn load_morphism(&self) -> CliResult<Option<Morphism>> {
        if let Some(path) = &self.morphism {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("bad morphism JSON: {e}")))?;
            return Ok(Some(Morphism::from_json(&v)?));
        }
        Ok(self.preset.as_deref().and_then(presets::by_name))
    }

    fn word(&self) -> CliResult<Word> {
        if let Some(phi) = self.load_morphism()? {
            return fixed_point(phi, self.letter);
        }
        match &self.preset {
            Some(name) => build(name, &self.options()),
            None => Err(usage("give --preset or --morphism")),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a prefix block of a word.
    Generate {
        #[command(flatten)]
        word: WordArgs,
        /// Box extents, e.g. 32x32.
        #[arg(long = "box")]
        extents: String,
        #[arg(long, default_value = "text")]
        format: String,
        /// Gray level per letter for pgm, e.g. 0,128,255.
        #[arg(long)]
        gray: Option<String>,
    },
    /// Print the blocks read at ℓq, ℓ = 0..len.
    Extract {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long)]
        dir: String,
        #[arg(long)]
        size: String,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        origin: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Empirical recurrence checks.
    Check {
        #[command(flatten)]
        word: WordArgs,
        /// urd, surd, ssurdo, ur, or line (one direction, needs --dir).
        #[arg(long, default_value = "urd")]
        mode: String,
        /// L,Q,S,P,B: horizon, direction bound, size bound, origin bound, UR block bound.
        #[arg(long, default_value = "5000,5,3,3,256")]
        budget: String,
        /// Gap bound BASE^ceil(log_BASE max m) * FACTOR.
        #[arg(long)]
        claim: Option<String>,
        #[arg(long)]
        dir: Option<String>,
        #[arg(long)]
        size: Option<String>,
        #[arg(long)]
        origin: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Decide the sufficient conditions for a morphism.
    Classify {
        #[command(flatten)]
        word: WordArgs,
        /// Exponent for the power condition.
        #[arg(long, default_value_t = 2)]
        power: u32,
        /// Direction for the non-recurrence condition.
        #[arg(long)]
        dir: Option<String>,
        /// Case parameter of the 2x2 witness.
        #[arg(long, default_value_t = 3)]
        parameter: u32,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// List the cyclic subgroups C(s) of (Z/sZ)^d.
    Subgroups {
        #[arg(long)]
        s: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// For d = 2, label each residue with the subgroups containing it.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Derivative with respect to the prefix of a given size.
    Derive {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long)]
        size: String,
        #[arg(long = "box")]
        extents: String,
        /// per-direction or uniform.
        #[arg(long, default_value = "per-direction")]
        scheme: String,
        #[arg(long, default_value_t = 5000)]
        horizon: u64,
        /// Also print the code table.
        #[arg(long)]
        table: bool,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Regenerate every shipped figure and compare.
    VerifyFigures {
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// List the named words.
    Presets,
}

fn text_or_json(format: &str) -> CliResult<bool> {
    match format.parse::<Format>()? {
        Format::Text => Ok(false),
        Format::Json => Ok(true),
        f => Err(usage(format!("{f:?} is not available here; use text or json"))),
    }
}

fn json_line(out: &mut String, v: &serde_json::Value) {
    out.push_str(&v.to_string());
    out.push('\n');
}

fn cmd_generate(word: &WordArgs, extents: &str, format: &str, gray: Option<&str>) -> CliResult<(i32, String)> {
    let w = word.word()?;
    let s = parse_size(extents)?;
    if s.dimension() != w.dimension() {
        return Err(usage(format!(
            "box has dimension {}, word has {}",
            s.dimension(),
            w.dimension()
        )));
    }
    let block = factor_at(&w, &Position::origin(w.dimension()), &s)?;
    let mut spec = RenderSpec::new(format.parse()?, w.alphabet_size());
    if let Some(g) = gray {
        spec.gray = Some(
            parse_list(g, &[','])?
                .into_iter()
                .map(|x| u8::try_from(x).map_err(|_| usage("gray levels are 0..255")))
                .collect::<CliResult<_>>()?,
        );
    }
    Ok((EXIT_OK, render(&block, &spec)?))
}

fn cmd_extract(
    word: &WordArgs,
    dir: &str,
    size: &str,
    len: u64,
    origin: Option<&str>,
    format: &str,
) -> CliResult<(i32, String)> {
    let json = text_or_json(format)?;
    let w = word.word()?;
    let q = parse_direction(dir)?;
    let s = parse_size(size)?;
    let p = match origin {
        Some(o) => parse_position(o)?,
        None => Position::origin(w.dimension()),
    };
    let blocks = (0..len)
        .map(|l| {
            let at = p.checked_add(q.scaled(l)?.coords())?;
            factor_at(&w, &at, &s)
        })
        .collect::<multirec_core::Result<Vec<_>>>()?;
    let out = if json {
        let v: Vec<serde_json::Value> = blocks.iter().map(|b| b.to_json()).collect();
        serde_json::Value::Array(v).to_string() + "\n"
    } else {
        blocks.iter().map(block_token).collect::<Vec<_>>().join(" ") + "\n"
    };
    Ok((EXIT_OK, out))
}

fn exit_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::GapExceedsClaim => return EXIT_VERIFY,
            Verdict::NoRecurrenceInHorizon => code = EXIT_BUDGET,
            Verdict::BoundedWitnessed => {}
        }
    }
    code
}

fn fmt_gap(g: Option<u64>) -> String {
    g.map_or("-".into(), |g| g.to_string())
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    word: &WordArgs,
    mode: &str,
    budget: &str,
    claim: Option<&str>,
    dir: Option<&str>,
    size: Option<&str>,
    origin: Option<&str>,
    format: &str,
) -> CliResult<(i32, String)> {
    let json = text_or_json(format)?;
    let w = word.word()?;
    let budget: RecurrenceBudget = budget.parse()?;
    let claim = claim.map(parse_claim).transpose()?;
    let claim_fn = claim.map(|c| move |s: &Size| c.bound(s));
    let claim_ref: Option<multirec_core::recurrence::Claim<'_>> =
        claim_fn.as_ref().map(|f| f as multirec_core::recurrence::Claim<'_>);
    let mut out = String::new();
    let code = match mode {
        "line" => {
            let q = parse_direction(dir.ok_or_else(|| usage("line mode needs --dir"))?)?;
            let s = parse_size(size.unwrap_or("1x".repeat(w.dimension()).trim_end_matches('x')))?;
            let p = match origin {
                Some(o) => parse_position(o)?,
                None => Position::origin(w.dimension()),
            };
            let r = gap_report(&w, &q, &s, &p, budget.horizon, claim_ref.map(|c| c(&s)))?;
            if json {
                json_line(&mut out, &serde_json::to_value(&r).expect("serializable"));
            } else {
                let _ = writeln!(
                    out,
                    "dir={} size={} origin={} occurrences={} max_gap={} tail={} verdict={}",
                    r.direction,
                    r.size,
                    r.origin,
                    r.occurrences.len(),
                    fmt_gap(r.max_gap),
                    r.tail,
                    r.verdict
                );
            }
            exit_for([r.verdict])
        }
        "urd" => {
            let reports = check_urd(&w, &budget, claim_ref)?;
            for r in &reports {
                if json {
                    json_line(&mut out, &serde_json::to_value(r).expect("serializable"));
                } else {
                    let _ = writeln!(
                        out,
                        "dir={} size={} occurrences={} max_gap={} tail={} verdict={}",
                        r.direction,
                        r.size,
                        r.occurrences.len(),
                        fmt_gap(r.max_gap),
                        r.tail,
                        r.verdict
                    );
                }
            }
            exit_for(reports.iter().map(|r| r.verdict))
        }
        "surd" | "ssurdo" => {
            let sums = if mode == "surd" {
                check_surd(&w, &budget, claim_ref)?
            } else {
                check_ssurdo(&w, &budget, claim_ref)?
            };
            for s in &sums {
                if json {
                    json_line(&mut out, &serde_json::to_value(s).expect("serializable"));
                } else {
                    let _ = writeln!(
                        out,
                        "size={} lines={} bound={} verdict={} worst_dir={} worst_origin={}",
                        s.size,
                        s.lines,
                        fmt_gap(s.bound),
                        s.verdict,
                        s.worst.direction,
                        s.worst.origin
                    );
                }
            }
            exit_for(sums.iter().map(|s| s.verdict))
        }
        "ur" => {
            let reps = check_ur(&w, &budget)?;
            for r in &reps {
                if json {
                    json_line(&mut out, &serde_json::to_value(r).expect("serializable"));
                } else {
                    let _ = writeln!(out, "size={} window={}", r.size, fmt_gap(r.window));
                }
            }
            if reps.iter().all(|r| r.window.is_some()) {
                EXIT_OK
            } else {
                EXIT_BUDGET
            }
        }
        m => return Err(usage(format!("unknown mode {m:?}; use urd, surd, ssurdo, ur or line"))),
    };
    Ok((code, out))
}

fn verdict_json(name: &str, r: &multirec_core::Result<(ConditionVerdict, Option<SurdBoundClaim>)>) -> serde_json::Value {
    match r {
        Ok((v, c)) => json!({"condition": name, "holds": v.holds, "witness": v.witness, "claim": c}),
        Err(e) => json!({"condition": name, "applicable": false, "reason": e.to_string()}),
    }
}

fn verdict_text(name: &str, r: &multirec_core::Result<(ConditionVerdict, Option<SurdBoundClaim>)>) -> String {
    match r {
        Ok((v, c)) => {
            let mut s = format!("{name}: {}", if v.holds { "holds" } else { "fails" });
            if let Some(c) = c {
                let _ = write!(s, " (gap bound {}^ceil(log_{} max m) * {})", c.base, c.base, c.factor);
            }
            if let Some(w) = &v.witness {
                let _ = write!(s, " witness={}", serde_json::to_string(w).expect("serializable"));
            }
            s
        }
        Err(e) => format!("{name}: n/a ({e})"),
    }
}

fn cmd_classify(
    word: &WordArgs,
    power: u32,
    dir: Option<&str>,
    parameter: u32,
    format: &str,
) -> CliResult<(i32, String)> {
    let json = text_or_json(format)?;
    let phi = word
        .load_morphism()?
        .ok_or_else(|| usage("classify needs a morphism preset or --morphism"))?;
    let a = match word.letter {
        Some(a) => Letter(a),
        None => default_letter(&phi)?,
    };
    let mut results = vec![
        ("main", check_main_morphic(&phi, a)),
        ("cor1", check_cor1(&phi, a)),
        ("power", check_power(&phi, a, power)),
        ("hyperplane", check_hyperplane(&phi, a)),
    ];
    if let Some(d) = dir {
        let q = parse_direction(d)?;
        results.push(("non-recurrent-direction", check_non_recurrent_direction(&phi, a, &q).map(|v| (v, None))));
    }
    let mut out = String::new();
    for (name, r) in &results {
        if json {
            json_line(&mut out, &verdict_json(name, r));
        } else {
            out.push_str(&verdict_text(name, r));
            out.push('\n');
        }
    }
    if let Ok(class) = classify_2x2(&phi) {
        let witness = match class {
            Surd2x2::NotSurd => Some(non_surd_2x2_witness(&phi, parameter)?),
            Surd2x2::Surd => None,
        };
        if json {
            json_line(&mut out, &json!({"condition": "2x2", "class": class, "witness": witness}));
        } else {
            let _ = write!(out, "2x2: {}", serde_json::to_value(class).expect("serializable").as_str().unwrap_or(""));
            if let Some(w) = witness {
                let _ = write!(
                    out,
                    " case={:?}{} dir={} zeros={}",
                    w.case,
                    if w.transposed { " (transposed)" } else { "" },
                    w.direction,
                    w.zeros.map_or("forever".into(), |z| z.to_string())
                );
            }
            out.push('\n');
        }
    }
    Ok((EXIT_OK, out))
}

fn tuple(c: &[u64]) -> String {
    format!("({})", c.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
}

fn name_of(i: usize) -> String {
    GREEK.get(i).map_or(format!("C{i}"), |g| g.to_string())
}

fn cmd_subgroups(s: u64, d: usize, grid: bool, format: &str) -> CliResult<(i32, String)> {
    let json = text_or_json(format)?;
    let fam = family_c(s, d)?;
    if json {
        return Ok((EXIT_OK, serde_json::to_string(&fam).expect("serializable") + "\n"));
    }
    // Names follow the generators with the last coordinate most significant,
    // so α is the subgroup of the first axis.
    let mut order: Vec<usize> = (0..fam.len()).collect();
    order.sort_by_key(|&i| {
        fam.members[i]
            .generators
            .iter()
            .map(|g| g.coords().iter().rev().copied().collect::<Vec<_>>())
            .min()
    });
    let mut rank = vec![0; fam.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let name_of = |i: usize| name_of(rank[i]);
    let mut out = format!("|C({s})| = {} in dimension {d}\n", fam.len());
    if grid {
        if d != 2 {
            return Err(usage("--grid needs d = 2"));
        }
        for y in (0..s).rev() {
            let row: Vec<String> = (0..s)
                .map(|x| {
                    if x == 0 && y == 0 {
                        "0".into()
                    } else {
                        let mut names: Vec<usize> = fam.containing(&[x, y]).into_iter().map(|i| rank[i]).collect();
                        names.sort();
                        names.into_iter().map(self::name_of).collect::<Vec<_>>().join(",")
                    }
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        return Ok((EXIT_OK, out));
    }
    for &i in &order {
        let m = &fam.members[i];
        let gens: Vec<String> = m.generators.iter().map(|g| tuple(g.coords())).collect();
        let elems: Vec<String> = m
            .subgroup
            .elements()
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| tuple(e.coords()))
            .collect();
        let _ = writeln!(out, "{} | {} | {}", name_of(i), gens.join(","), elems.join(","));
    }
    Ok((EXIT_OK, out))
}

#[allow(clippy::too_many_arguments)]
fn cmd_derive(
    word: &WordArgs,
    size: &str,
    extents: &str,
    scheme: &str,
    horizon: u64,
    table: bool,
    format: &str,
) -> CliResult<(i32, String)> {
    let json = text_or_json(format)?;
    let w = word.word()?;
    let s = parse_size(size)?;
    let b = parse_size(extents)?;
    let scheme: Scheme = scheme.parse()?;
    let d = match scheme {
        Scheme::PerDirection => derivative_per_direction(&w, &s, &b, horizon),
        Scheme::Uniform => derivative_uniform(&w, &s, &b, horizon),
    };
    let d = match d {
        Err(e @ multirec_core::Error::ReturnScanFailed { .. }) => {
            return Ok((EXIT_BUDGET, format!("{e}\n")));
        }
        r => r?,
    };
    let mut out = String::new();
    if json {
        let mut v = json!({"scheme": d.scheme, "size": s.dims(), "codes": d.to_json()});
        if table {
            if let Some(t) = &d.uniform_table {
                v["table"] = serde_json::to_value(t).expect("serializable");
            } else {
                let per: serde_json::Map<String, serde_json::Value> = d
                    .tables
                    .iter()
                    .map(|(q, t)| (q.to_string(), serde_json::to_value(t).expect("serializable")))
                    .collect();
                v["table"] = serde_json::Value::Object(per);
            }
        }
        json_line(&mut out, &v);
        return Ok((EXIT_OK, out));
    }
    out.push_str(&d.to_text()?);
    if table {
        out.push('\n');
        if let Some(t) = &d.uniform_table {
            for (c, r) in t.entries() {
                let _ = writeln!(out, "{c}: {}", return_word_tokens(r));
            }
        } else {
            for (q, t) in &d.tables {
                for (c, r) in t.entries() {
                    let _ = writeln!(out, "{q} {c}: {}", return_word_tokens(r));
                }
            }
        }
    }
    Ok((EXIT_OK, out))
}

fn cmd_verify(fixtures: Option<PathBuf>) -> CliResult<(i32, String)> {
    let dir = fixtures.unwrap_or_else(default_fixture_dir);
    let results = verify_figures(&dir)?;
    let mut out = String::new();
    for r in &results {
        let _ = writeln!(out, "{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let code = if results.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY };
    Ok((code, out))
}

pub fn execute(cli: Cli) -> CliResult<(i32, String)> {
    if let Some(n) = cli.threads {
        // A pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Generate {
            word,
            extents,
            format,
            gray,
        } => cmd_generate(&word, &extents, &format, gray.as_deref()),
        Command::Extract {
            word,
            dir,
            size,
            len,
            origin,
            format,
        } => cmd_extract(&word, &dir, &size, len, origin.as_deref(), &format),
        Command::Check {
            word,
            mode,
            budget,
            claim,
            dir,
            size,
            origin,
            format,
        } => cmd_check(
            &word,
            &mode,
            &budget,
            claim.as_deref(),
            dir.as_deref(),
            size.as_deref(),
            origin.as_deref(),
            &format,
        ),
        Command::Classify {
            word,
            power,
            dir,
            parameter,
            format,
        } => cmd_classify(&word, power, dir.as_deref(), parameter, &format),
        Command::Subgroups { s, d, grid, format } => cmd_subgroups(s, d, grid, &format),
        Command::Derive {
            word,
            size,
            extents,
            scheme,
            horizon,
            table,
            format,
        } => cmd_derive(&word, &size, &extents, &scheme, horizon, table, &format),
        Command::VerifyFigures { fixtures } => cmd_verify(fixtures),
        Command::Presets => Ok((EXIT_OK, crate::presets::names().join("\n") + "\n")),
    }
}

/// Parses `args` (program name first), runs, writes stdout/stderr, and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(cli) {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Usage(_) | CliError::Core(_) | CliError::Io { .. } => EXIT_USAGE,
                CliError::FixtureMissing(_) | CliError::BadFixture { .. } => EXIT_VERIFY,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["multirec"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_size("27x8").unwrap().dims(), &[27, 8]);
        assert_eq!(parse_direction("(1,1)").unwrap().coords(), &[1, 1]);
        assert!(parse_direction("2,2").is_err());
        assert!(parse_size("0x3").is_err());
        assert_eq!(parse_claim("3,3").unwrap(), SurdBoundClaim::main(3));
        assert!(parse_claim("1,3").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(go(&["generate"]).0, EXIT_USAGE);
        assert_eq!(go(&["generate", "--preset", "nope", "--box", "2x2"]).0, EXIT_USAGE);
        let (code, _, err) = go(&["generate", "--preset", "sierpinski", "--box", "2x2x2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("dimension"));
        assert_eq!(go(&["check", "--preset", "sierpinski", "--mode", "x"]).0, EXIT_USAGE);
    }

    #[test]
    fn sierpinski_pbm() {
        let (code, out, _) = go(&["generate", "--preset", "sierpinski", "--box", "32x32", "--format", "pbm"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("P1"));
        assert_eq!(lines.next(), Some("32 32"));
        let rows: Vec<&str> = lines.collect();
        // Bottom row (y = 0) is all black, top row (y = 31) black at x = 0 only.
        assert_eq!(rows[31], vec!["1"; 32].join(" "));
        assert!(rows[0].starts_with("1 0 "));
        assert_eq!(rows[0].matches('1').count(), 1);
    }

    #[test]
    fn extract_diagonal() {
        let (code, out, _) = go(&[
            "extract", "--preset", "surd-not-ssurdo-2x2", "--dir", "1,1", "--size", "1x2", "--len", "10",
        ]);
        assert_eq!(code, 0);
        let toks: Vec<&str> = out.split_whitespace().collect();
        assert_eq!(toks.len(), 10);
        assert!(toks.iter().all(|t| t.len() == 2));
        assert_eq!(toks[0], "01");
    }

    #[test]
    fn subgroups_counts() {
        let (_, out, _) = go(&["subgroups", "--s", "5", "--d", "2"]);
        assert!(out.starts_with("|C(5)| = 6"));
        assert_eq!(out.lines().count(), 7);
        let (_, out, _) = go(&["subgroups", "--s", "5", "--grid"]);
        let grid: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(grid[4], "0 α α α α");
        assert_eq!(grid[3], "β γ δ ε ζ");
    }

    #[test]
    fn check_exit_codes() {
        let (code, out, _) = go(&["check", "--preset", "sierpinski", "--mode", "line", "--dir", "1,1", "--budget", "500,5,3,3,64"]);
        assert_eq!(code, EXIT_BUDGET, "{out}");
        let (code, _, _) = go(&["check", "--preset", "surd-not-ssurdo-2x2", "--mode", "surd", "--budget", "500,2,2,0,64"]);
        assert_eq!(code, EXIT_OK);
        let (code, _, _) = go(&[
            "check", "--preset", "surd-not-ssurdo-2x2", "--mode", "surd", "--budget", "500,2,2,0,64", "--claim", "2,0",
        ]);
        assert_eq!(code, EXIT_VERIFY);
    }

    #[test]
    fn classify_reports() {
        let (code, out, _) = go(&["classify", "--preset", "sierpinski"]);
        assert_eq!(code, 0);
        assert!(out.contains("2x2: NOT_SURD"), "{out}");
        let (_, out, _) = go(&["classify", "--preset", "power-3x3", "--format", "json"]);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn derive_text_has_origin_marker() {
        let (code, out, _) = go(&[
            "derive", "--preset", "surd-not-ssurdo-2x2", "--size", "1x2", "--box", "6x3", "--scheme", "uniform",
        ]);
        assert_eq!(code, 0);
        assert!(out.lines().last().unwrap().starts_with("? "));
    }

    #[test]
    fn deterministic_output() {
        let a = go(&["derive", "--preset", "surd-not-ssurdo-2x2", "--size", "1x2", "--box", "10x6", "--table"]);
        let b = go(&["derive", "--preset", "surd-not-ssurdo-2x2", "--size", "1x2", "--box", "10x6", "--table"]);
        assert_eq!(a, b);
    }
}

//! Batch front end for the certificate library: parse group descriptions
//! and word lists, dispatch one operation per invocation, and emit the
//! result as text, JSON, or CSV.
//!
//! Every verb maps to one library pipeline. Output is deterministic —
//! identical commands produce byte-identical stdout — and all values are
//! exact: integers, or rationals printed as `p/q` in text and serialized
//! as `{num, den}` pairs in JSON. Failures print a single
//! `error[category]: message` line on stderr and exit with a code that
//! encodes the category: 2 for invalid input, 3 for a violated
//! mathematical hypothesis, 4 for an internal assertion.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sclcert_core::amalgam::{
    amalgam_homogeneous, counting_value_amalgam, double_coset_condition, is_mirror_conjugate,
    scl_certificate, DoubleCosetCheck, Side,
};
use sclcert_core::brooks::{
    certified_defect_upper, counting_value, defect_lower_bound, gap_qm, homogeneous_value,
    homogenized_defect_upper, separating_qm, small_qm, BrooksPattern,
};
use sclcert_core::scl::{
    bavard_lower, scl_report, scl_report_amalgam, AmalgamSclReport, BrittonRecord,
    CertificateRecord, MirrorRecord, RatioRecord, ReportOptions, SclReport,
};
use sclcert_core::{Alphabet, AmalgamSpec, AmalgamWord, ClassifiedError, FailureClass, FreeWord};

/// Caps every ball enumeration (defect sweeps, genus-one searches).
const BALL_CAP_VAR: &str = "SCL_BALL_CAP";
const BALL_CAP_DEFAULT: usize = 2_000_000;

#[derive(Parser)]
#[command(
    name = "sclcert",
    version,
    about = "Counting quasimorphisms and certified stable commutator length bounds",
    long_about = "Counting quasimorphisms and certified stable commutator length bounds.\n\n\
        Free groups are written free:N; their words use a..z for generators, A..Z for \
        inverses, and 1 (or the empty string) for the identity. Amalgams of finite groups \
        are loaded from a spec file: [group A], [group B], [group C] multiplication tables \
        plus [embed A], [embed B] index rows. Amalgam words list syllables as factor:index \
        pairs, e.g. \"A:1 B:4\", with 1 for the identity.\n\n\
        All reported values are exact — integers, or rationals printed as p/q in text and \
        serialized as {num, den} integer pairs in JSON. Ball enumerations are guarded by \
        the SCL_BALL_CAP environment variable (default 2000000)."
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Evaluate the counting quasimorphism h_w at one or more words.
    Eval {
        /// Free group, written free:N.
        #[arg(long, value_name = "GROUP")]
        group: String,
        /// Pattern word w (at least two letters).
        #[arg(long, value_name = "WORD")]
        pattern: String,
        /// Word to evaluate at; repeat for a batch.
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
    },
    /// Exact homogeneous value of the counting quasimorphism.
    Homogenize {
        #[arg(long, value_name = "GROUP")]
        group: String,
        #[arg(long, value_name = "WORD")]
        pattern: String,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
    },
    /// Observed defect of h_w over a ball, next to the certified bounds.
    Defect {
        #[arg(long, value_name = "GROUP")]
        group: String,
        #[arg(long, value_name = "WORD")]
        pattern: String,
        /// Radius of the enumerated ball.
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Normalized gap witness: a descriptor with value 1 at the base word.
    Gap {
        #[arg(long, value_name = "GROUP")]
        group: String,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
    },
    /// Separating quasimorphism: value 1 at --word, 0 on every --exclude.
    Separate {
        #[arg(long, value_name = "GROUP")]
        group: String,
        /// Base word the descriptor is normalized at.
        #[arg(long, value_name = "WORD")]
        word: String,
        /// Word the descriptor must vanish on; repeatable.
        #[arg(long = "exclude", value_name = "WORD", required = true)]
        excluded: Vec<String>,
    },
    /// Full certified report: lower bounds, and an upper bound when found.
    SclReport {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
        /// Genus-one search radius (free groups; default derived from the word).
        #[arg(long)]
        radius: Option<usize>,
        /// Longest cyclic window offered as a candidate pattern (free groups).
        #[arg(long, default_value_t = 6)]
        max_window: usize,
        /// Powers sampled by the tiling certificate (amalgams).
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Check the double-coset condition and mirror conjugacy for a word.
    AmalgamCheck {
        /// Amalgam description file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
    },
    /// Evaluate the amalgam counting quasimorphism.
    AmalgamEval {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Pattern word over the amalgam.
        #[arg(long, value_name = "WORD")]
        pattern: String,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
        /// Also bracket the homogeneous value by sampling this power.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Certify a stable commutator length lower bound over the amalgam.
    AmalgamCert {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long = "word", value_name = "WORD", required = true)]
        words: Vec<String>,
        /// Powers sampled by the tiling certificate.
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
}

/// Exactly one of `--group free:N` and `--spec FILE`.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Free group, written free:N.
    #[arg(long, value_name = "GROUP")]
    group: Option<String>,
    /// Amalgam description file.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Text,
    Json,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    let format = cli.format;
    match dispatch(cli.verb, format) {
        Ok(stdout) => print!("{stdout}"),
        Err(failure) => {
            eprintln!("error[{}]: {}", failure.category(), failure.message);
            std::process::exit(failure.exit_code());
        }
    }
}

fn dispatch(verb: Verb, format: Format) -> Result<String, Failure> {
    match verb {
        Verb::Eval {
            group,
            pattern,
            words,
        } => run_eval(format, &group, &pattern, &words),
        Verb::Homogenize {
            group,
            pattern,
            words,
        } => run_homogenize(format, &group, &pattern, &words),
        Verb::Defect {
            group,
            pattern,
            radius,
        } => run_defect(format, &group, &pattern, radius),
        Verb::Gap { group, words } => run_gap(format, &group, &words),
        Verb::Separate {
            group,
            word,
            excluded,
        } => run_separate(format, &group, &word, &excluded),
        Verb::SclReport {
            target,
            words,
            radius,
            max_window,
            n_max,
        } => run_scl_report(format, &target, &words, radius, max_window, n_max),
        Verb::AmalgamCheck { spec, words } => run_amalgam_check(format, &spec, &words),
        Verb::AmalgamEval {
            spec,
            pattern,
            words,
            n_max,
        } => run_amalgam_eval(format, &spec, &pattern, &words, n_max),
        Verb::AmalgamCert { spec, words, n_max } => run_amalgam_cert(format, &spec, &words, n_max),
    }
}

// ---------------------------------------------------------------------------
// Failure plumbing

struct Failure {
    class: FailureClass,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            class: FailureClass::InvalidInput,
            message: message.into(),
        }
    }

    fn category(&self) -> &'static str {
        match self.class {
            FailureClass::InvalidInput => "invalid-input",
            FailureClass::HypothesisViolation => "hypothesis-violation",
            FailureClass::InternalAssertion => "internal-assertion",
        }
    }

    fn exit_code(&self) -> i32 {
        match self.class {
            FailureClass::InvalidInput => 2,
            FailureClass::HypothesisViolation => 3,
            FailureClass::InternalAssertion => 4,
        }
    }
}

/// Carries a library error into a [`Failure`], keeping its message verbatim.
fn classified(err: impl ClassifiedError + std::fmt::Display) -> Failure {
    Failure {
        class: err.class(),
        message: err.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Input parsing

fn parse_group(text: &str) -> Result<Alphabet, Failure> {
    let rank = text
        .strip_prefix("free:")
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| Failure::invalid(format!("group must look like free:N, got {text:?}")))?;
    Alphabet::new(rank).map_err(classified)
}

fn parse_free_word(alphabet: &Alphabet, text: &str) -> Result<FreeWord, Failure> {
    let trimmed = text.trim();
    if trimmed == "1" {
        return Ok(FreeWord::identity());
    }
    alphabet.parse_word(trimmed).map_err(classified)
}

fn parse_pattern(alphabet: &Alphabet, text: &str) -> Result<BrooksPattern, Failure> {
    let word = parse_free_word(alphabet, text)?;
    BrooksPattern::new(word).map_err(classified)
}

fn load_spec(path: &Path) -> Result<AmalgamSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        Failure::invalid(format!("cannot read spec file {}: {err}", path.display()))
    })?;
    AmalgamSpec::parse_str(&text).map_err(classified)
}

fn parse_amalgam_word(spec: &AmalgamSpec, text: &str) -> Result<AmalgamWord, Failure> {
    AmalgamWord::parse_str(spec, text).map_err(classified)
}

fn ball_cap() -> Result<usize, Failure> {
    match std::env::var(BALL_CAP_VAR) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => Ok(cap),
            _ => Err(Failure::invalid(format!(
                "{BALL_CAP_VAR} must be a positive integer, got {raw:?}"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(BALL_CAP_DEFAULT),
        Err(std::env::VarError::NotUnicode(_)) => Err(Failure::invalid(format!(
            "{BALL_CAP_VAR} is not valid unicode"
        ))),
    }
}

fn free_group_name(alphabet: &Alphabet) -> String {
    format!("free:{}", alphabet.rank())
}

fn amalgam_group_name(spec: &AmalgamSpec) -> String {
    format!(
        "amalgam(|A| = {}, |B| = {}, |C| = {})",
        spec.factor(Side::A).order(),
        spec.factor(Side::B).order(),
        spec.edge().order()
    )
}

fn display_word(word: &FreeWord) -> String {
    if word.is_empty() {
        "1".to_string()
    } else {
        word.to_string()
    }
}

// ---------------------------------------------------------------------------
// Output plumbing

/// A report that knows all three of its encodings. JSON comes from the
/// `Serialize` impl, so field names match across formats.
trait Render: Serialize {
    fn text(&self, out: &mut String);
    fn csv(&self, out: &mut String);
}

fn emit<R: Render>(report: &R, format: Format) -> Result<String, Failure> {
    let mut out = String::new();
    match format {
        Format::Text => report.text(&mut out),
        Format::Csv => report.csv(&mut out),
        Format::Json => {
            out = serde_json::to_string_pretty(report).map_err(|err| Failure {
                class: FailureClass::InternalAssertion,
                message: format!("report serialization failed: {err}"),
            })?;
            out.push('\n');
        }
    }
    Ok(out)
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}: {value}");
}

fn csv_row(out: &mut String, fields: &[String]) {
    let escaped: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    let _ = writeln!(out, "{}", escaped.join(","));
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn join_spaced(values: &[i64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn optional<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(T::to_string).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// eval / homogenize

#[derive(Serialize)]
struct EvalRow {
    word: String,
    forward: i64,
    backward: i64,
    value: i64,
}

#[derive(Serialize)]
struct EvalReport {
    verb: &'static str,
    group: String,
    pattern: String,
    results: Vec<EvalRow>,
}

impl Render for EvalReport {
    fn text(&self, out: &mut String) {
        line(out, "group", &self.group);
        line(out, "pattern", &self.pattern);
        for row in &self.results {
            out.push('\n');
            line(out, "word", &row.word);
            line(out, "forward", row.forward);
            line(out, "backward", row.backward);
            line(out, "value", row.value);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,forward,backward,value");
        for row in &self.results {
            csv_row(
                out,
                &[
                    row.word.clone(),
                    row.forward.to_string(),
                    row.backward.to_string(),
                    row.value.to_string(),
                ],
            );
        }
    }
}

fn run_eval(
    format: Format,
    group: &str,
    pattern: &str,
    words: &[String],
) -> Result<String, Failure> {
    let alphabet = parse_group(group)?;
    let pattern = parse_pattern(&alphabet, pattern)?;
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let g = parse_free_word(&alphabet, text)?;
        let value = small_qm(&pattern, &g);
        let forward = counting_value(&pattern, &g);
        results.push(EvalRow {
            word: display_word(&g),
            forward,
            backward: forward - value,
            value,
        });
    }
    emit(
        &EvalReport {
            verb: "eval",
            group: free_group_name(&alphabet),
            pattern: display_word(pattern.word()),
            results,
        },
        format,
    )
}

#[derive(Serialize)]
struct HomogenizeRow {
    word: String,
    value: RatioRecord,
}

#[derive(Serialize)]
struct HomogenizeReport {
    verb: &'static str,
    group: String,
    pattern: String,
    results: Vec<HomogenizeRow>,
}

impl Render for HomogenizeReport {
    fn text(&self, out: &mut String) {
        line(out, "group", &self.group);
        line(out, "pattern", &self.pattern);
        for row in &self.results {
            out.push('\n');
            line(out, "word", &row.word);
            line(out, "value", row.value);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,value");
        for row in &self.results {
            csv_row(out, &[row.word.clone(), row.value.to_string()]);
        }
    }
}

fn run_homogenize(
    format: Format,
    group: &str,
    pattern: &str,
    words: &[String],
) -> Result<String, Failure> {
    let alphabet = parse_group(group)?;
    let pattern = parse_pattern(&alphabet, pattern)?;
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let g = parse_free_word(&alphabet, text)?;
        results.push(HomogenizeRow {
            word: display_word(&g),
            value: homogeneous_value(&pattern, &g).into(),
        });
    }
    emit(
        &HomogenizeReport {
            verb: "homogenize",
            group: free_group_name(&alphabet),
            pattern: display_word(pattern.word()),
            results,
        },
        format,
    )
}

// ---------------------------------------------------------------------------
// defect

#[derive(Serialize)]
struct DefectReport {
    verb: &'static str,
    group: String,
    pattern: String,
    radius: usize,
    ball: u64,
    observed: i64,
    certified_upper: RatioRecord,
    homogenized_upper: RatioRecord,
}

impl Render for DefectReport {
    fn text(&self, out: &mut String) {
        line(out, "group", &self.group);
        line(out, "pattern", &self.pattern);
        line(out, "radius", self.radius);
        line(out, "ball", self.ball);
        line(out, "observed", self.observed);
        line(out, "certified upper", self.certified_upper);
        line(out, "homogenized upper", self.homogenized_upper);
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "pattern,radius,ball,observed,certified_upper,homogenized_upper"
        );
        csv_row(
            out,
            &[
                self.pattern.clone(),
                self.radius.to_string(),
                self.ball.to_string(),
                self.observed.to_string(),
                self.certified_upper.to_string(),
                self.homogenized_upper.to_string(),
            ],
        );
    }
}

fn run_defect(
    format: Format,
    group: &str,
    pattern: &str,
    radius: usize,
) -> Result<String, Failure> {
    let alphabet = parse_group(group)?;
    let pattern = parse_pattern(&alphabet, pattern)?;
    let observed = defect_lower_bound(&alphabet, &pattern, radius, ball_cap()?).map_err(classified)?;
    emit(
        &DefectReport {
            verb: "defect",
            group: free_group_name(&alphabet),
            pattern: display_word(pattern.word()),
            radius,
            ball: alphabet.ball_size(radius) as u64,
            observed,
            certified_upper: certified_defect_upper(&pattern).into(),
            homogenized_upper: homogenized_defect_upper(&pattern).into(),
        },
        format,
    )
}

// ---------------------------------------------------------------------------
// gap / separate

#[derive(Serialize)]
struct GapRow {
    word: String,
    pattern: String,
    scale: RatioRecord,
    defect_upper: RatioRecord,
    value: RatioRecord,
    scl_lower: RatioRecord,
}

#[derive(Serialize)]
struct GapReport {
    verb: &'static str,
    group: String,
    results: Vec<GapRow>,
}

impl Render for GapReport {
    fn text(&self, out: &mut String) {
        line(out, "group", &self.group);
        for row in &self.results {
            out.push('\n');
            line(out, "word", &row.word);
            line(out, "pattern", &row.pattern);
            line(out, "scale", row.scale);
            line(out, "defect upper", row.defect_upper);
            line(out, "value", row.value);
            line(out, "scl lower", row.scl_lower);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,pattern,scale,defect_upper,value,scl_lower");
        for row in &self.results {
            csv_row(
                out,
                &[
                    row.word.clone(),
                    row.pattern.clone(),
                    row.scale.to_string(),
                    row.defect_upper.to_string(),
                    row.value.to_string(),
                    row.scl_lower.to_string(),
                ],
            );
        }
    }
}

fn gap_row(word: &FreeWord, descriptor: &sclcert_core::QmDescriptor) -> Result<GapRow, Failure> {
    let value = descriptor.evaluate(word);
    let scl_lower = bavard_lower(value, descriptor.defect_upper()).map_err(classified)?;
    Ok(GapRow {
        word: display_word(word),
        pattern: display_word(descriptor.pattern().word()),
        scale: descriptor.scale().into(),
        defect_upper: descriptor.defect_upper().into(),
        value: value.into(),
        scl_lower: scl_lower.into(),
    })
}

fn run_gap(format: Format, group: &str, words: &[String]) -> Result<String, Failure> {
    let alphabet = parse_group(group)?;
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let word = parse_free_word(&alphabet, text)?;
        let descriptor = gap_qm(&word).map_err(classified)?;
        results.push(gap_row(&word, &descriptor)?);
    }
    emit(
        &GapReport {
            verb: "gap",
            group: free_group_name(&alphabet),
            results,
        },
        format,
    )
}

#[derive(Serialize)]
struct ExcludedRow {
    word: String,
    value: RatioRecord,
}

#[derive(Serialize)]
struct SeparateReport {
    verb: &'static str,
    group: String,
    base: GapRow,
    excluded: Vec<ExcludedRow>,
}

impl Render for SeparateReport {
    fn text(&self, out: &mut String) {
        line(out, "group", &self.group);
        line(out, "word", &self.base.word);
        line(out, "pattern", &self.base.pattern);
        line(out, "scale", self.base.scale);
        line(out, "defect upper", self.base.defect_upper);
        line(out, "value", self.base.value);
        line(out, "scl lower", self.base.scl_lower);
        for row in &self.excluded {
            let _ = writeln!(out, "excluded {}: {}", row.word, row.value);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,role,pattern,scale,defect_upper,value,scl_lower");
        csv_row(
            out,
            &[
                self.base.word.clone(),
                "base".to_string(),
                self.base.pattern.clone(),
                self.base.scale.to_string(),
                self.base.defect_upper.to_string(),
                self.base.value.to_string(),
                self.base.scl_lower.to_string(),
            ],
        );
        for row in &self.excluded {
            csv_row(
                out,
                &[
                    row.word.clone(),
                    "excluded".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    row.value.to_string(),
                    String::new(),
                ],
            );
        }
    }
}

fn run_separate(
    format: Format,
    group: &str,
    word: &str,
    excluded: &[String],
) -> Result<String, Failure> {
    let alphabet = parse_group(group)?;
    let base = parse_free_word(&alphabet, word)?;
    let excluded_words = excluded
        .iter()
        .map(|text| parse_free_word(&alphabet, text))
        .collect::<Result<Vec<_>, _>>()?;
    let descriptor = separating_qm(&base, &excluded_words).map_err(classified)?;
    let excluded_rows = excluded_words
        .iter()
        .map(|w| ExcludedRow {
            word: display_word(w),
            value: descriptor.evaluate(w).into(),
        })
        .collect();
    emit(
        &SeparateReport {
            verb: "separate",
            group: free_group_name(&alphabet),
            base: gap_row(&base, &descriptor)?,
            excluded: excluded_rows,
        },
        format,
    )
}

// ---------------------------------------------------------------------------
// scl-report

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    verb: &'static str,
    results: Vec<T>,
}

impl Render for Envelope<SclReport> {
    fn text(&self, out: &mut String) {
        for (i, report) in self.results.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            line(out, "group", &report.group);
            line(out, "word", &report.word);
            line(out, "core", &report.core);
            line(out, "exponent sums", join_spaced(&report.exponent_sums));
            if report.infinite {
                line(out, "scl", "infinite (nonzero exponent sum)");
                continue;
            }
            if report.mirror {
                line(out, "mirror", true);
            }
            if let Some(exact) = &report.exact {
                line(out, "scl exact", exact);
            }
            line(out, "candidates", report.candidates.len());
            if let Some(best) = &report.best {
                line(out, "best pattern", &best.pattern);
                line(out, "best value", best.homogeneous_value);
                line(out, "best defect", best.defect_upper);
                line(out, "scl lower", best.lower_bound);
            }
            if let Some(upper) = &report.upper {
                line(out, "upper exponent", upper.exponent);
                let pairs: Vec<String> = upper
                    .commutators
                    .iter()
                    .map(|c| format!("[{}, {}]", c.x, c.y))
                    .collect();
                line(out, "upper commutators", pairs.join(" "));
                line(out, "scl upper", upper.bound);
            }
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "group,word,core,exponent_sums,infinite,mirror,exact,candidates,\
             best_pattern,best_value,best_defect,best_lower,upper_exponent,upper_genus,upper_bound"
        );
        for report in &self.results {
            let best = report.best.as_ref();
            let upper = report.upper.as_ref();
            csv_row(
                out,
                &[
                    report.group.clone(),
                    report.word.clone(),
                    report.core.clone(),
                    join_spaced(&report.exponent_sums),
                    report.infinite.to_string(),
                    report.mirror.to_string(),
                    optional(&report.exact),
                    report.candidates.len().to_string(),
                    best.map(|b| b.pattern.clone()).unwrap_or_default(),
                    best.map(|b| b.homogeneous_value.to_string()).unwrap_or_default(),
                    best.map(|b| b.defect_upper.to_string()).unwrap_or_default(),
                    best.map(|b| b.lower_bound.to_string()).unwrap_or_default(),
                    upper.map(|u| u.exponent.to_string()).unwrap_or_default(),
                    upper.map(|u| u.commutators.len().to_string()).unwrap_or_default(),
                    upper.map(|u| u.bound.to_string()).unwrap_or_default(),
                ],
            );
        }
    }
}

impl Render for Envelope<AmalgamSclReport> {
    fn text(&self, out: &mut String) {
        for (i, report) in self.results.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            line(out, "group", &report.group);
            line(out, "word", &report.word);
            line(out, "torsion", report.torsion);
            match &report.mirror {
                Some(m) => line(out, "mirror", format!("c = {}, rotation = {}", m.c, m.rotation)),
                None => line(out, "mirror", "none"),
            }
            match &report.double_coset_failure {
                Some(w) => line(
                    out,
                    "double coset",
                    format!("fails (c = {}, c' = {}, rotation = {})", w.c, w.c_prime, w.rotation),
                ),
                None => line(out, "double coset", "holds"),
            }
            if let Some(cert) = &report.certificate {
                line(out, "tiling", join_spaced(&cert.tiling_values));
                line(out, "homogeneous lower", cert.homogeneous_lower);
                line(out, "defect upper", cert.defect_upper);
            }
            if let Some(exact) = &report.exact {
                line(out, "scl exact", exact);
            }
            if let Some(lower) = &report.lower {
                line(out, "scl lower", lower);
            }
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "group,word,torsion,mirror_c,mirror_rotation,coset_c,coset_c_prime,coset_rotation,\
             homogeneous_lower,defect_upper,exact,lower"
        );
        for report in &self.results {
            let mirror = report.mirror.as_ref();
            let coset = report.double_coset_failure.as_ref();
            let cert = report.certificate.as_ref();
            csv_row(
                out,
                &[
                    report.group.clone(),
                    report.word.clone(),
                    report.torsion.to_string(),
                    mirror.map(|m| m.c.to_string()).unwrap_or_default(),
                    mirror.map(|m| m.rotation.clone()).unwrap_or_default(),
                    coset.map(|w| w.c.to_string()).unwrap_or_default(),
                    coset.map(|w| w.c_prime.to_string()).unwrap_or_default(),
                    coset.map(|w| w.rotation.clone()).unwrap_or_default(),
                    cert.map(|c| c.homogeneous_lower.to_string()).unwrap_or_default(),
                    cert.map(|c| c.defect_upper.to_string()).unwrap_or_default(),
                    optional(&report.exact),
                    optional(&report.lower),
                ],
            );
        }
    }
}

fn run_scl_report(
    format: Format,
    target: &TargetArgs,
    words: &[String],
    radius: Option<usize>,
    max_window: usize,
    n_max: usize,
) -> Result<String, Failure> {
    if let Some(group) = &target.group {
        let alphabet = parse_group(group)?;
        let options = ReportOptions {
            genus1_radius: radius,
            ball_cap: ball_cap()?,
            max_window,
        };
        let mut results = Vec::with_capacity(words.len());
        for text in words {
            let word = parse_free_word(&alphabet, text)?;
            results.push(scl_report(&alphabet, &word, &options).map_err(classified)?);
        }
        emit(
            &Envelope {
                verb: "scl-report",
                results,
            },
            format,
        )
    } else {
        let path = target.spec.as_deref().expect("clap enforces the target");
        let spec = load_spec(path)?;
        let mut results = Vec::with_capacity(words.len());
        for text in words {
            let word = parse_amalgam_word(&spec, text)?;
            results.push(scl_report_amalgam(&spec, &word, n_max).map_err(classified)?);
        }
        emit(
            &Envelope {
                verb: "scl-report",
                results,
            },
            format,
        )
    }
}

// ---------------------------------------------------------------------------
// amalgam verbs

#[derive(Serialize)]
struct CheckRow {
    word: String,
    syllables: usize,
    double_coset_holds: bool,
    double_coset_failure: Option<BrittonRecord>,
    mirror: Option<MirrorRecord>,
}

#[derive(Serialize)]
struct AmalgamCheckReport {
    verb: &'static str,
    spec: String,
    group: String,
    results: Vec<CheckRow>,
}

impl Render for AmalgamCheckReport {
    fn text(&self, out: &mut String) {
        line(out, "spec", &self.spec);
        line(out, "group", &self.group);
        for row in &self.results {
            out.push('\n');
            line(out, "word", &row.word);
            line(out, "syllables", row.syllables);
            match &row.double_coset_failure {
                Some(w) => line(
                    out,
                    "double coset",
                    format!("fails (c = {}, c' = {}, rotation = {})", w.c, w.c_prime, w.rotation),
                ),
                None => line(out, "double coset", "holds"),
            }
            match &row.mirror {
                Some(m) => line(out, "mirror", format!("c = {}, rotation = {}", m.c, m.rotation)),
                None => line(out, "mirror", "none"),
            }
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "word,syllables,double_coset_holds,coset_c,coset_c_prime,coset_rotation,mirror_c,mirror_rotation"
        );
        for row in &self.results {
            let coset = row.double_coset_failure.as_ref();
            let mirror = row.mirror.as_ref();
            csv_row(
                out,
                &[
                    row.word.clone(),
                    row.syllables.to_string(),
                    row.double_coset_holds.to_string(),
                    coset.map(|w| w.c.to_string()).unwrap_or_default(),
                    coset.map(|w| w.c_prime.to_string()).unwrap_or_default(),
                    coset.map(|w| w.rotation.clone()).unwrap_or_default(),
                    mirror.map(|m| m.c.to_string()).unwrap_or_default(),
                    mirror.map(|m| m.rotation.clone()).unwrap_or_default(),
                ],
            );
        }
    }
}

fn run_amalgam_check(format: Format, path: &Path, words: &[String]) -> Result<String, Failure> {
    let spec = load_spec(path)?;
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let word = parse_amalgam_word(&spec, text)?;
        let check = double_coset_condition(&spec, &word).map_err(classified)?;
        let mirror = is_mirror_conjugate(&spec, &word).map_err(classified)?;
        let failure = match &check {
            DoubleCosetCheck::Holds => None,
            DoubleCosetCheck::Fails(witness) => Some(BrittonRecord {
                c: witness.c,
                c_prime: witness.c_prime,
                rotation: witness.conjugate.to_string(),
            }),
        };
        results.push(CheckRow {
            word: word.to_string(),
            syllables: word.len(),
            double_coset_holds: check.holds(),
            double_coset_failure: failure,
            mirror: mirror.map(|m| MirrorRecord {
                c: m.c,
                rotation: m.conjugate.to_string(),
            }),
        });
    }
    emit(
        &AmalgamCheckReport {
            verb: "amalgam-check",
            spec: path.display().to_string(),
            group: amalgam_group_name(&spec),
            results,
        },
        format,
    )
}

#[derive(Serialize)]
struct BracketRecord {
    lower: RatioRecord,
    upper: RatioRecord,
    exact: bool,
}

#[derive(Serialize)]
struct AmalgamEvalRow {
    word: String,
    forward: i64,
    backward: i64,
    value: i64,
    homogeneous: Option<BracketRecord>,
}

#[derive(Serialize)]
struct AmalgamEvalReport {
    verb: &'static str,
    spec: String,
    group: String,
    pattern: String,
    results: Vec<AmalgamEvalRow>,
}

impl Render for AmalgamEvalReport {
    fn text(&self, out: &mut String) {
        line(out, "spec", &self.spec);
        line(out, "group", &self.group);
        line(out, "pattern", &self.pattern);
        for row in &self.results {
            out.push('\n');
            line(out, "word", &row.word);
            line(out, "forward", row.forward);
            line(out, "backward", row.backward);
            line(out, "value", row.value);
            if let Some(bracket) = &row.homogeneous {
                line(out, "homogeneous lower", bracket.lower);
                line(out, "homogeneous upper", bracket.upper);
            }
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,forward,backward,value,homogeneous_lower,homogeneous_upper");
        for row in &self.results {
            let bracket = row.homogeneous.as_ref();
            csv_row(
                out,
                &[
                    row.word.clone(),
                    row.forward.to_string(),
                    row.backward.to_string(),
                    row.value.to_string(),
                    bracket.map(|b| b.lower.to_string()).unwrap_or_default(),
                    bracket.map(|b| b.upper.to_string()).unwrap_or_default(),
                ],
            );
        }
    }
}

fn run_amalgam_eval(
    format: Format,
    path: &Path,
    pattern: &str,
    words: &[String],
    n_max: Option<usize>,
) -> Result<String, Failure> {
    let spec = load_spec(path)?;
    let pattern = parse_amalgam_word(&spec, pattern)?;
    let inverse = pattern.inverse(&spec);
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let host = parse_amalgam_word(&spec, text)?;
        let forward = counting_value_amalgam(&spec, &host, &pattern).map_err(classified)?;
        let backward = counting_value_amalgam(&spec, &host, &inverse).map_err(classified)?;
        let homogeneous = match n_max {
            None => None,
            Some(n) => {
                let bracket =
                    amalgam_homogeneous(&spec, &host, &pattern, n).map_err(classified)?;
                Some(BracketRecord {
                    lower: bracket.lower.into(),
                    upper: bracket.upper.into(),
                    exact: bracket.is_exact(),
                })
            }
        };
        results.push(AmalgamEvalRow {
            word: host.to_string(),
            forward,
            backward,
            value: forward - backward,
            homogeneous,
        });
    }
    emit(
        &AmalgamEvalReport {
            verb: "amalgam-eval",
            spec: path.display().to_string(),
            group: amalgam_group_name(&spec),
            pattern: pattern.to_string(),
            results,
        },
        format,
    )
}

#[derive(Serialize)]
struct AmalgamCertReport {
    verb: &'static str,
    spec: String,
    group: String,
    n_max: usize,
    results: Vec<CertificateRecord>,
}

impl Render for AmalgamCertReport {
    fn text(&self, out: &mut String) {
        line(out, "spec", &self.spec);
        line(out, "group", &self.group);
        for cert in &self.results {
            out.push('\n');
            line(out, "word", &cert.word);
            line(out, "tiling", join_spaced(&cert.tiling_values));
            line(out, "homogeneous lower", cert.homogeneous_lower);
            line(out, "defect upper", cert.defect_upper);
            line(out, "scl lower", cert.scl_lower);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "word,tiling_values,homogeneous_lower,defect_upper,scl_lower");
        for cert in &self.results {
            csv_row(
                out,
                &[
                    cert.word.clone(),
                    join_spaced(&cert.tiling_values),
                    cert.homogeneous_lower.to_string(),
                    cert.defect_upper.to_string(),
                    cert.scl_lower.to_string(),
                ],
            );
        }
    }
}

fn run_amalgam_cert(
    format: Format,
    path: &Path,
    words: &[String],
    n_max: usize,
) -> Result<String, Failure> {
    let spec = load_spec(path)?;
    let mut results = Vec::with_capacity(words.len());
    for text in words {
        let word = parse_amalgam_word(&spec, text)?;
        let cert = scl_certificate(&spec, &word, n_max).map_err(classified)?;
        results.push(CertificateRecord {
            word: cert.word.to_string(),
            tiling_values: cert.tiling_values,
            homogeneous_lower: cert.homogeneous_lower.into(),
            defect_upper: cert.defect_upper.into(),
            scl_lower: cert.scl_lower.into(),
        });
    }
    emit(
        &AmalgamCertReport {
            verb: "amalgam-cert",
            spec: path.display().to_string(),
            group: amalgam_group_name(&spec),
            n_max,
            results,
        },
        format,
    )
}

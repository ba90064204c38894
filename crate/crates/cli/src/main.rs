//! `chorale-grader`: build corpus profiles, grade chorales, compare sets.
//!
//! Exit codes: 0 success, 1 partial failure, 2 unusable input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chorale_grader::evaluate::PairOutcome;
use chorale_grader::ingest::{is_chorale_file, IngestError};
use chorale_grader::{
    build_profile, corrupt, grade, load_chorale, write_canonical_json, Chorale, CorpusProfile,
    Discrimination, EvaluationSummary, FeatureCounts, GradeReport, SetEvaluation,
};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "chorale-grader",
    version,
    about = "Grade four-part chorales against a corpus profile"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus profile operations.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Grade chorales against a profile.
    Grade {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compare two sets of chorales graded against one profile.
    Evaluate {
        #[arg(long)]
        set_a: PathBuf,
        #[arg(long)]
        set_b: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Pick the better-graded chorale of each (real, other) pair.
    Discriminate {
        /// CSV with header `real,other`; paths relative to the CSV's directory.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Randomly transpose notes by up to two semitones.
    Corrupt {
        file: PathBuf,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Rewrite a chorale (MusicXML or JSON) as canonical JSON.
    Convert {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProfileAction {
    /// Build a profile from every chorale file in a directory.
    Build {
        dir: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

const OK: u8 = 0;
const PARTIAL: u8 = 1;
const UNUSABLE: u8 = 2;

/// Loads a chorale, naming the file in any error.
fn load(p: &Path) -> Result<Chorale, String> {
    load_chorale(p).map_err(|e| match e {
        IngestError::Io { .. } => e.to_string(),
        _ => format!("{}: {e}", p.display()),
    })
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

fn configure_threads() {
    let Ok(v) = std::env::var("CHORALE_GRADER_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                warn(format!("could not size thread pool: {e}"));
            }
        }
        _ => warn(format!("ignoring CHORALE_GRADER_THREADS={v:?}")),
    }
}

/// Chorale files in a directory, sorted by path.
fn chorale_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_chorale_file(p))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads files in parallel, warning about failures; order is preserved.
fn load_all(files: &[PathBuf]) -> (Vec<Chorale>, usize) {
    let loaded: Vec<_> = files.par_iter().map(|p| load(p)).collect();
    let mut ok = Vec::new();
    let mut failed = 0;
    for r in loaded {
        match r {
            Ok(c) => ok.push(c),
            Err(e) => {
                warn(e);
                failed += 1;
            }
        }
    }
    (ok, failed)
}

fn load_set(dir: &Path) -> Result<(Vec<Chorale>, usize)> {
    let (set, failed) = load_all(&chorale_files(dir)?);
    if set.len() < 2 {
        bail!(
            "{} has {} parseable chorales, at least 2 required",
            dir.display(),
            set.len()
        );
    }
    Ok((set, failed))
}

fn load_profile(path: &Path) -> Result<CorpusProfile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read profile {}", path.display()))?;
    CorpusProfile::from_json(&text).with_context(|| format!("invalid profile {}", path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn cmd_profile(dir: &Path, output: &Path) -> Result<u8> {
    let (loaded, mut failed) = load_set(dir)?;
    // Drop chorales whose features cannot be extracted, rather than the whole corpus.
    let corpus: Vec<Chorale> = loaded
        .into_iter()
        .filter(|c| match FeatureCounts::extract(c) {
            Ok(_) => true,
            Err(e) => {
                warn(format!("{}: {e}", c.id()));
                failed += 1;
                false
            }
        })
        .collect();
    let profile: CorpusProfile = build_profile(&corpus)?;
    write_output(Some(output), profile.to_json().as_bytes())?;
    println!("corpus_size {}", profile.corpus_size);
    println!(
        "corpus_error_note_ratio {}",
        profile.corpus_error_note_ratio
    );
    println!("content_hash {}", profile.content_hash);
    if profile.is_degenerate() {
        warn("corpus has no parallel errors; chorales with errors cannot be graded against it");
    }
    Ok(if failed > 0 { PARTIAL } else { OK })
}

fn cmd_grade(files: &[PathBuf], profile: &Path, format: Format) -> Result<u8> {
    let profile = load_profile(profile)?;
    let results: Vec<_> = files
        .par_iter()
        .map(|p| {
            load(p).and_then(|c| grade(&c, &profile).map_err(|e| format!("{}: {e}", p.display())))
        })
        .collect();
    let mut reports: Vec<GradeReport> = Vec::new();
    for r in results {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => warn(e),
        }
    }
    match format {
        Format::Table => {
            let tables: Vec<String> = reports.iter().map(GradeReport::render_table).collect();
            print!("{}", tables.join("\n"));
        }
        Format::Json => {
            let arr: Vec<_> = reports.iter().map(GradeReport::to_json_value).collect();
            println!("{}", serde_json::to_string_pretty(&arr)?);
        }
    }
    Ok(if reports.len() == files.len() {
        OK
    } else {
        PARTIAL
    })
}

fn grade_all(set: &[Chorale], profile: &CorpusProfile) -> Result<SetEvaluation> {
    let outcomes = set
        .par_iter()
        .map(|c| (c.id().to_string(), grade(c, profile)))
        .collect();
    let eval = SetEvaluation::from_outcomes(outcomes)?;
    for (id, e) in &eval.failures {
        warn(format!("{id}: {e}"));
    }
    Ok(eval)
}

fn cmd_evaluate(set_a: &Path, set_b: &Path, profile: &Path) -> Result<u8> {
    let profile = load_profile(profile)?;
    let (a, fa) = load_set(set_a)?;
    let (b, fb) = load_set(set_b)?;
    let (ea, eb) = (grade_all(&a, &profile)?, grade_all(&b, &profile)?);
    let failed = fa + fb + ea.failures.len() + eb.failures.len();
    let summary = EvaluationSummary::compare(ea, eb)?;
    let name = |p: &Path| {
        p.file_name().map_or_else(
            || p.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        )
    };
    print!("{}", summary.render_table(&name(set_a), &name(set_b)));
    Ok(if failed > 0 { PARTIAL } else { OK })
}

fn read_manifest(path: &Path) -> Result<(Vec<(PathBuf, PathBuf)>, usize)> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "real" || &headers[1] != "other" {
        bail!(
            "manifest header must be `real,other`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        );
    }
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for (i, row) in reader.records().enumerate() {
        match row {
            Ok(r) if r.len() == 2 => pairs.push((base.join(r[0].trim()), base.join(r[1].trim()))),
            Ok(_) => {
                warn(format!("manifest row {}: expected 2 fields", i + 1));
                skipped += 1;
            }
            Err(e) => {
                warn(format!("manifest row {}: {e}", i + 1));
                skipped += 1;
            }
        }
    }
    Ok((pairs, skipped))
}

fn cmd_discriminate(pairs: &Path, profile: &Path) -> Result<u8> {
    let profile = load_profile(profile)?;
    let (pairs, skipped) = read_manifest(pairs)?;
    if pairs.is_empty() {
        bail!("manifest has no pairs");
    }
    let grade_path = |p: &Path| -> Result<f64, String> {
        let c = load(p)?;
        grade(&c, &profile)
            .map(|r| r.overall_grade)
            .map_err(|e| format!("{}: {e}", p.display()))
    };
    let grades: Vec<Result<(f64, f64), String>> = pairs
        .par_iter()
        .map(|(a, b)| Ok((grade_path(a)?, grade_path(b)?)))
        .collect();
    let result = Discrimination::from_grades(grades)?;
    for ((a, b), o) in pairs.iter().zip(&result.outcomes) {
        match o {
            PairOutcome::Graded {
                real,
                other,
                correct,
            } => {
                let pick = if real < other {
                    "real"
                } else if real > other {
                    "other"
                } else {
                    "tie"
                };
                println!(
                    "{} ({real:.2}) vs {} ({other:.2}): picked {pick}{}",
                    a.display(),
                    b.display(),
                    if *correct { "" } else { " [wrong]" }
                );
            }
            PairOutcome::Void(why) => warn(format!("pair skipped: {why}")),
        }
    }
    println!(
        "accuracy {:.4} ({}/{})",
        result.accuracy, result.correct, result.total
    );
    Ok(if skipped > 0 || result.total < pairs.len() {
        PARTIAL
    } else {
        OK
    })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Profile {
            action: ProfileAction::Build { dir, output },
        } => cmd_profile(&dir, &output),
        Command::Grade {
            files,
            profile,
            format,
        } => cmd_grade(&files, &profile, format),
        Command::Evaluate {
            set_a,
            set_b,
            profile,
        } => cmd_evaluate(&set_a, &set_b, &profile),
        Command::Discriminate { pairs, profile } => cmd_discriminate(&pairs, &profile),
        Command::Corrupt {
            file,
            rate,
            seed,
            output,
        } => {
            let c = load(&file).map_err(anyhow::Error::msg)?;
            let x = corrupt(&c, rate, seed)?;
            write_output(output.as_deref(), &write_canonical_json(&x))?;
            Ok(OK)
        }
        Command::Convert { file, output } => {
            let c = load(&file).map_err(anyhow::Error::msg)?;
            write_output(output.as_deref(), &write_canonical_json(&c))?;
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(UNUSABLE)
        }
    }
}

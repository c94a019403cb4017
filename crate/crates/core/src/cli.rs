//! The `obuchi` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::automata::{UpLanguage, UpWord};
use crate::convert::{check_eps_complete, parity_to_oba, rabin_to_oba, RabinSpec};
use crate::determinize::{candidate_records, determinize, eps_complete_det, explore_residuals, record_count_bound};
use crate::error::{Error, Result};
use crate::io::{load_automaton, parse_rabin, parse_unchecked, to_dot, to_json, Automaton};
use crate::verify::{check_local_preference, equiv_up, PreferenceBounds};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "obuchi", version, about = "Ordered Büchi automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a file and report findings.
    Validate { file: PathBuf },
    /// Decide membership of `prefix period^ω`.
    Member {
        file: PathBuf,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        prefix: String,
        #[arg(long)]
        period: String,
    },
    /// Determinize an ordered Büchi automaton.
    Determinize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Add ε-transitions to a determinized automaton and check the result.
    EpsComplete {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate into an ordered Büchi automaton.
    #[command(subcommand)]
    Convert(Convert),
    /// Compare two languages on ultimately-periodic words.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_prefix: usize,
        #[arg(long, default_value_t = 3)]
        max_period: usize,
    },
    /// Sample the local preference properties.
    PosiCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_prefix: usize,
        #[arg(long, default_value_t = 2)]
        max_factor: usize,
        #[arg(long, default_value_t = 2)]
        max_period: usize,
        #[arg(long, default_value_t = 1000)]
        max_reports: usize,
    },
    /// Size figures.
    Stats { file: PathBuf },
    /// Graphviz export.
    Dot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Convert {
    /// Rabin condition on letters.
    Rabin {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// ε-complete parity automaton.
    Parity {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        check_only: bool,
    },
}

/// A file the language commands accept.
enum Language {
    Automaton(Automaton),
    Rabin(RabinSpec),
}

impl Language {
    fn alphabet(&self) -> Vec<String> {
        match self {
            Language::Automaton(a) => a.alphabet(),
            Language::Rabin(r) => r.alphabet.clone(),
        }
    }

    fn accepts(&self, w: &UpWord) -> Result<bool> {
        match self {
            Language::Automaton(a) => a.accepts(w),
            Language::Rabin(r) => UpLanguage::accepts(r, w),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_language(path: &Path) -> Result<Language> {
    let text = read(path)?;
    let has_kind = serde_json::from_str::<serde_json::Value>(&text)?.get("kind").is_some();
    if has_kind {
        let a = parse_unchecked(&text)?;
        a.validate().into_result()?;
        Ok(Language::Automaton(a))
    } else {
        Ok(Language::Rabin(parse_rabin(&text)?))
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::EpsInWord | Error::EmptyPeriod | Error::UnknownLetter(_) => EXIT_USAGE,
        _ => EXIT_INVALID,
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { file } => {
            let text = read(&file)?;
            let report = match serde_json::from_str::<serde_json::Value>(&text)?.get("kind") {
                None => parse_rabin(&text).map(|_| Default::default()),
                Some(_) => parse_unchecked(&text).map(|a| a.validate()),
            };
            match report {
                Ok(r) => {
                    for w in &r.warnings {
                        writeln!(out, "warning: {w}")?;
                    }
                    for e in &r.errors {
                        writeln!(out, "error: {e}")?;
                    }
                    if r.is_valid() {
                        writeln!(out, "valid")?;
                        Ok(EXIT_OK)
                    } else {
                        writeln!(out, "invalid")?;
                        Ok(EXIT_FALSE)
                    }
                }
                Err(e @ Error::Io(_)) => Err(e),
                Err(e) => {
                    writeln!(out, "error: {e}\ninvalid")?;
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Member { file, prefix, period } => {
            let lang = load_language(&file)?;
            let w = UpWord::parse(&prefix, &period)?;
            let b = lang.accepts(&w)?;
            writeln!(out, "{b}")?;
            Ok(if b { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Determinize { file, output } => {
            let Automaton::Oba(a) = load_automaton(&file)? else {
                return Err(Error::Usage("determinize expects an ordered-buchi file".into()));
            };
            let d = determinize(&a);
            let n = d.state_count();
            emit(out, output.as_deref(), &to_json(&Automaton::Det(d)))?;
            writeln!(out, "{}, bound {}", plural(n, "state"), record_count_bound(a.size())?)?;
            Ok(EXIT_OK)
        }
        Command::EpsComplete { file, output } => {
            let d = match load_automaton(&file)? {
                Automaton::Det(d) => d,
                Automaton::Oba(a) => determinize(&a),
                _ => {
                    return Err(Error::Usage(
                        "eps-complete expects a det-parity or ordered-buchi file".into(),
                    ))
                }
            };
            let p = eps_complete_det(&d);
            let report = check_eps_complete(&p)?;
            emit(out, output.as_deref(), &to_json(&Automaton::Parity(p)))?;
            match report.first() {
                None => {
                    writeln!(out, "ε-complete")?;
                    Ok(EXIT_OK)
                }
                Some(v) => {
                    writeln!(out, "not ε-complete: {v}")?;
                    Ok(EXIT_FALSE)
                }
            }
        }
        Command::Convert(Convert::Rabin { file, output }) => {
            let spec = parse_rabin(&read(&file)?)?;
            let (oba, _) = rabin_to_oba(&spec)?;
            let n = oba.size();
            emit(out, output.as_deref(), &to_json(&Automaton::Oba(oba)))?;
            writeln!(out, "{}", plural(n, "state"))?;
            Ok(EXIT_OK)
        }
        Command::Convert(Convert::Parity {
            file,
            output,
            check_only,
        }) => {
            let p = match load_automaton(&file)? {
                Automaton::Parity(p) => p,
                Automaton::Det(d) => d.automaton,
                _ => return Err(Error::Usage("convert parity expects a parity file".into())),
            };
            let report = check_eps_complete(&p)?;
            if let Some(v) = report.first() {
                writeln!(out, "not ε-complete: {v}")?;
                return Ok(EXIT_FALSE);
            }
            writeln!(out, "ε-complete")?;
            if check_only {
                return Ok(EXIT_OK);
            }
            let conv = parity_to_oba(&p)?;
            for note in &conv.notes {
                writeln!(out, "note: {note}")?;
            }
            let n = conv.oba.size();
            emit(out, output.as_deref(), &to_json(&Automaton::Oba(conv.oba)))?;
            writeln!(out, "{}", plural(n, "state"))?;
            Ok(EXIT_OK)
        }
        Command::Equiv {
            left,
            right,
            max_prefix,
            max_period,
        } => {
            let (l, r) = (load_language(&left)?, load_language(&right)?);
            let (mut la, mut ra) = (l.alphabet(), r.alphabet());
            la.sort();
            ra.sort();
            if la != ra {
                return Err(Error::Usage(format!(
                    "alphabets differ: {{{}}} vs {{{}}}",
                    la.join(","),
                    ra.join(",")
                )));
            }
            let res = equiv_up(|w| l.accepts(w), |w| r.accepts(w), &la, max_prefix, max_period)?;
            writeln!(out, "{res}")?;
            Ok(if res.is_equal() { EXIT_OK } else { EXIT_FALSE })
        }
        Command::PosiCheck {
            file,
            max_prefix,
            max_factor,
            max_period,
            max_reports,
        } => {
            let lang = load_language(&file)?;
            let bounds = PreferenceBounds {
                max_prefix,
                max_factor,
                max_period,
                max_reports,
            };
            let report = check_local_preference(|w| lang.accepts(w), &lang.alphabet(), bounds)?;
            for v in &report.violations {
                writeln!(out, "{v}")?;
            }
            if report.truncated {
                writeln!(out, "report truncated after {max_reports} violations")?;
            }
            writeln!(
                out,
                "{} over {} instances",
                plural(report.violations.len(), "violation"),
                report.instances
            )?;
            Ok(if report.is_clean() { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Stats { file } => {
            match load_language(&file)? {
                Language::Automaton(Automaton::Oba(a)) => {
                    let res = explore_residuals(&a);
                    let heads: Vec<&str> = res.states.iter().map(|&q| a.universe.name(q)).collect();
                    writeln!(out, "states: {}", a.size())?;
                    writeln!(out, "letters: {}", a.letters.len())?;
                    writeln!(out, "residual heads: {{{}}}", heads.join(", "))?;
                    writeln!(out, "candidate records: {}", candidate_records(&a).len())?;
                    writeln!(out, "record bound: {}", record_count_bound(a.size())?)?;
                }
                Language::Automaton(Automaton::Parity(p))
                | Language::Automaton(Automaton::Det(crate::determinize::Determinization { automaton: p, .. })) => {
                    writeln!(out, "states: {}", p.size())?;
                    writeln!(out, "letters: {}", p.alphabet.len())?;
                    writeln!(out, "index: [{}, {}]", p.index.0, p.index.1)?;
                    writeln!(out, "transitions: {}", p.transitions.len())?;
                    writeln!(out, "deterministic: {}", p.deterministic)?;
                }
                Language::Automaton(Automaton::GenBuchi(g)) => {
                    writeln!(out, "letters: {}", g.alphabet.len())?;
                    writeln!(out, "required sets: {}", g.required.len())?;
                }
                Language::Rabin(r) => {
                    writeln!(out, "letters: {}", r.alphabet.len())?;
                    writeln!(out, "pairs: {}", r.pairs.len())?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Dot { file, output } => {
            let a = load_automaton(&file)?;
            emit(out, output.as_deref(), &to_dot(&a))?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("obuchi").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_subcommand_is_usage() {
        let (code, _, err) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn unknown_flag_is_usage() {
        assert_eq!(call(&["stats", "x.json", "--bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (code, _, err) = call(&["stats", "/nonexistent/file.json"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("nonexistent"));
    }
}

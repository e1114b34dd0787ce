//! `simulate <preset|config.toml> [--out DIR] [--threads N] [--override key=value ...]`
//!
//! Exit status 0 on success, 1 for a bad description, 2 when the numerics
//! fail. Errors go to stderr as one `error kind=<tag> message="..."` line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use raman_memory::experiment::{preset_names, run, LoadedConfig, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Run a dressed-medium experiment from a preset or a TOML file")]
struct Cli {
    /// Preset name or path to a TOML description.
    #[arg(required_unless_present = "list_presets")]
    target: Option<String>,
    /// Output directory (default: output.directory, else ./out/<name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Dot-path override, e.g. control.rabi=20; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// List the built-in presets and exit.
    #[arg(long)]
    list_presets: bool,
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let message = message.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
    eprintln!("error kind={kind} message=\"{message}\"");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail("usage", first, 1);
        }
    };
    if cli.list_presets {
        for name in preset_names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let target = cli.target.unwrap_or_default();
    let options = RunOptions {
        out_dir: cli.out,
        threads: cli.threads,
    };
    let result = LoadedConfig::load(&target)
        .and_then(|c| c.with_overrides(&cli.overrides))
        .and_then(|c| run(&c, &options));
    match result {
        Ok(report) => {
            for w in &report.warnings {
                log::warn!("{w}");
            }
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = if e.is_config_error() { 1 } else { 2 };
            fail(e.tag(), &e.to_string(), code)
        }
    }
}

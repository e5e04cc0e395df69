//! `pade-ortho`: batch runs of the Padé-orthogonal toolkit.
//!
//! Exit status: 0 on success, 2 on an invalid job, 3 on a numerical failure
//! (a `diagnostic.json` is written next to the other outputs).

mod job;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use job::{command_name, Command, Job, JobFile, JobFlags};
use run::{execute, Output, RunError};

#[derive(Parser, Debug)]
#[command(
    name = "pade-ortho",
    version,
    about = "Padé-orthogonal approximants and singularity diagnostics"
)]
struct Cli {
    /// What to compute; may also be given as "command" in the job file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON job file; flags given on the command line take precedence.
    #[arg(long)]
    job: Option<PathBuf>,
    #[command(flatten)]
    flags: JobFlags,
}

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn load_job(cli: Cli) -> Result<Job, Vec<String>> {
    let file = match &cli.job {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| vec![format!("job: cannot read {}: {e}", path.display())])?;
            serde_json::from_str::<JobFile>(&text).map_err(|e| vec![format!("job: {}: {e}", path.display())])?
        }
        None => JobFile::default(),
    };
    file.merge(cli.command, cli.flags).validate()
}

fn write_outputs(dir: &Path, outputs: &[Output]) -> std::io::Result<()> {
    for o in outputs {
        std::fs::write(dir.join(&o.name), &o.contents)?;
    }
    Ok(())
}

fn manifest(job: &Job, outputs: &[String], seconds: f64, status: &str) -> String {
    let v = json!({
        "tool": "pade-ortho",
        "version": env!("CARGO_PKG_VERSION"),
        "status": status,
        "job": job,
        "outputs": outputs,
        "wall_time_seconds": seconds,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = match load_job(cli) {
        Ok(j) => j,
        Err(errs) => {
            for e in errs {
                eprintln!("error: {e}");
            }
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&job.output_dir) {
        eprintln!("error: output_dir: cannot create {}: {e}", job.output_dir.display());
        return ExitCode::from(EXIT_INVALID);
    }
    let start = Instant::now();
    let result = execute(&job);
    let seconds = start.elapsed().as_secs_f64();
    let (outputs, status, code) = match result {
        Ok(outputs) => (outputs, "ok", ExitCode::SUCCESS),
        Err(RunError::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(RunError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            let diag = json!({ "command": command_name(job.command), "error": msg });
            let out = Output {
                name: "diagnostic.json".into(),
                contents: serde_json::to_string_pretty(&diag).expect("serializable") + "\n",
            };
            (vec![out], "numerical-failure", ExitCode::from(EXIT_NUMERICAL))
        }
    };
    let mut names: Vec<String> = outputs.iter().map(|o| o.name.clone()).collect();
    names.push("manifest.json".into());
    let write = write_outputs(&job.output_dir, &outputs).and_then(|_| {
        std::fs::write(
            job.output_dir.join("manifest.json"),
            manifest(&job, &names, seconds, status),
        )
    });
    if let Err(e) = write {
        eprintln!("error: output_dir: cannot write to {}: {e}", job.output_dir.display());
        return ExitCode::from(EXIT_INVALID);
    }
    for n in &names {
        println!("{}", job.output_dir.join(n).display());
    }
    code
}

use std::process::ExitCode;

use clap::Parser;
use kgcavity_cli::args::Cli;
use kgcavity_cli::RunError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("kgcavity: config error: {e}");
            return ExitCode::from(2);
        }
    };
    #[cfg(feature = "parallel")]
    if cfg.workers > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global() {
            eprintln!("kgcavity: warning: thread pool: {e}");
        }
    }
    match kgcavity_cli::run(&cfg) {
        Ok(out) => {
            println!("{}", out.report.summary());
            for f in out.csv_files.iter().chain([&out.summary_file, &out.snapshot_file]) {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = if matches!(e, RunError::Config(_)) { "config error" } else { "error" };
            eprintln!("kgcavity: {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

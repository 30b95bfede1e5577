mod args;
mod report;
mod run;

use clap::Parser;
use std::io::Write;

fn main() {
    let cli = args::Cli::parse();
    let code = match run::run(&cli.command).and_then(|(text, path)| emit(&text, path)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), run::CliError> {
    let result = match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        }
    };
    result.map_err(|source| run::CliError::Io {
        path: path.map_or_else(|| "standard output".into(), |p| p.display().to_string()),
        source,
    })
}

use clap::Parser;

use iwahori_cli::{error_code, render, run, write_reports, Cli, EXIT_FAIL, EXIT_PASS};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli.config, &cli.command) {
        Ok(out) => {
            print!("{}", render(&out.report));
            if let Some(t) = &out.timings {
                eprint!("{}", render(t));
            }
            match cli.config.json.as_deref().map(|dir| write_reports(dir, &out)) {
                Some(Err(e)) => {
                    eprintln!("error: {e:#}");
                    EXIT_FAIL
                }
                _ if out.passed => EXIT_PASS,
                _ => EXIT_FAIL,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            error_code(&e)
        }
    };
    std::process::exit(code);
}

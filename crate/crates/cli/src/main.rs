use clap::Parser;
use netscreen::commands::{self, Cli, Command};
use netscreen::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => {
            for p in commands::simulate(&a)? {
                println!("{}", p.display());
            }
        }
        Command::Screen(a) => {
            let out = commands::screen(&a)?;
            println!("d_hat = {}", out.d_hat);
            println!("selected: {}", out.selected_names.join(", "));
        }
        Command::Classify(a) => {
            let out = commands::classify(&a)?;
            println!("accuracy = {:.4}", out.evaluation.accuracy);
            if let Some(auc) = out.evaluation.auc {
                println!("auc = {auc:.4}");
            }
        }
        Command::Experiment(a) => {
            let report = commands::run_experiment(&a)?;
            print!("{}", netscreen::experiment::render_table(&report));
        }
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

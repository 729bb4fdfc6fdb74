fn main() {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = kemeny_qa::cli::run(std::env::args_os(), &mut stdout) {
        match &e {
            // clap renders its own help and version text.
            kemeny_qa::cli::CliError::Usage(msg) => eprintln!("{msg}"),
            other => eprintln!("error: {other}"),
        }
        std::process::exit(e.exit_code());
    }
}

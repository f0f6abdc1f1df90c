fn main() {
    let code = gca_core::cli::run_cli(std::env::args(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}

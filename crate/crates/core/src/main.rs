fn main() {
    let code = siegel_runge::cli::run(std::env::args_os());
    std::process::exit(code);
}

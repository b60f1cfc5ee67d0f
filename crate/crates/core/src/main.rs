fn main() {
    std::process::exit(sqrtfrac::cli::run(std::env::args_os()));
}

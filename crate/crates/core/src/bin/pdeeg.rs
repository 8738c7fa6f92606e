fn main() {
    std::process::exit(pdeeg::cli::run(std::env::args_os()));
}

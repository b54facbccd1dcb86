fn main() {
    std::process::exit(commfact::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(pnoc_dse::cli::run(std::env::args_os()));
}

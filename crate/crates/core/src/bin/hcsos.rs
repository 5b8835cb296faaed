fn main() {
    std::process::exit(hcsos::cli::run(std::env::args_os()));
}

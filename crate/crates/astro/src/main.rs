fn main() {
    std::process::exit(astro::cli::run(std::env::args_os()));
}

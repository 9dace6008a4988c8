fn main() {
    std::process::exit(poverty_trap::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(popadapt::cli::run(std::env::args_os()));
}

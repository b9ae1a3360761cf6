fn main() {
    std::process::exit(grassmann_mv::experiments::cli::run(std::env::args_os()));
}

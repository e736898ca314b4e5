fn main() {
    std::process::exit(rayleigh_lienard::cli::dispatch(std::env::args_os()));
}

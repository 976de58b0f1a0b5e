fn main() {
    std::process::exit(quantile_encoder::cli::run(std::env::args_os()));
}

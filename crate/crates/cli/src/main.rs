fn main() {
    std::process::exit(skyrelay_cli::run(std::env::args().collect()));
}

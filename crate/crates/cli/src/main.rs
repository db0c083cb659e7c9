fn main() {
    std::process::exit(qlandauer_cli::parse_and_dispatch(std::env::args()));
}

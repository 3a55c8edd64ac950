fn main() {
    std::process::exit(geomex_cli::run(std::env::args()));
}

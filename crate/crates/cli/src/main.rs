fn main() {
    std::process::exit(plantgraph_cli::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(mlco2::cli::main());
}

fn main() {
    std::process::exit(fpfuse::cli::main());
}

fn main() {
    std::process::exit(lee_ldpc::cli::main());
}

fn main() {
    std::process::exit(glnmom::cli::main_exit_code());
}

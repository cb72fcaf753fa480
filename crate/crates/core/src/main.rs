fn main() {
    std::process::exit(pvfrag::cli::main_exit_code());
}

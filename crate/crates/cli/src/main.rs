fn main() {
    std::process::exit(riesz_cli::main_with_env());
}

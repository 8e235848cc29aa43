fn main() {
    let code = sop_basins::cli::main_with_args(std::env::args_os());
    std::process::exit(code);
}

fn main() {
    let code = topo_cli::main_with_args(std::env::args_os());
    std::process::exit(code);
}

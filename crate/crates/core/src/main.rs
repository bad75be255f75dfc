fn main() {
    let code = switched_mac::cli::run(std::env::args_os());
    std::process::exit(code);
}

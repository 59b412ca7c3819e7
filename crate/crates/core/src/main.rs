fn main() {
    std::process::exit(spheroidal::cli::main_with_args(std::env::args_os()));
}

fn main() {
    std::process::exit(vdmac::cli::main_with_args(std::env::args_os()));
}

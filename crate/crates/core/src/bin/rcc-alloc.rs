fn main() {
    std::process::exit(rcc_alloc::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(qpipe::cli::run(std::env::args_os()));
}

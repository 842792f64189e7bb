fn main() {
    std::process::exit(qcurv::cli::run(std::env::args_os()));
}

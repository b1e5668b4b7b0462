fn main() {
    std::process::exit(dpreg_bench::cli::run(std::env::args_os()));
}

fn main() {
    std::process::exit(procscope::cli::main());
}

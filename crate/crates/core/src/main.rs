fn main() -> std::process::ExitCode {
    dynevo::harness::cli::main()
}

fn main() -> std::process::ExitCode {
    floqsim::cli::main()
}

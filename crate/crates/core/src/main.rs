fn main() -> std::process::ExitCode {
    udlab::cli::main()
}

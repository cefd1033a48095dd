fn main() {
    // Rust masks SIGPIPE by default, which turns `fbcc inspect ... | head`
    // into a panic when stdout closes early. Restore the traditional
    // die-on-broken-pipe behavior before any output happens.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(fbcc_cli::run_from(std::env::args_os()));
}

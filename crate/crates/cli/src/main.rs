fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match angval_cli::run(std::env::args_os()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            if let Some(clap_err) = e.downcast_ref::<clap::Error>() {
                clap_err.exit();
            }
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

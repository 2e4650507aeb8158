fn main() { colnet::cli::main(); }

fn main() { println!("mflab"); }

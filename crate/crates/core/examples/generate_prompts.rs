//! Prints the 54 value-laden prompts with their ids.
//!
//! cargo run --example generate_prompts

use valuebias::prompts::{generate_prompts, ValenceFilter};

fn main() {
    let prompts = generate_prompts(ValenceFilter::All);
    for p in &prompts {
        println!("{:<14} {}", p.id, p.text);
    }
    println!("{} prompts", prompts.len());
}

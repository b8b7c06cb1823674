//! Loads a bundled preset and a config written inline, then runs a single
//! trial of each.

use discrete_opinion::cli::{simulate, Config, PRESETS};

const INLINE: &str = r#"
[[experiment]]
id = "inline"
trials = 1
seed = 5
grid = { delta = 0.125 }
network = { model = "erdos_renyi", n = 40, p = 0.2 }
weights = { w_in = 2.0, w_out = [0.5, 1.5] }
partition = "kernighan_lin"
media = { rule = "relative", b_tilde = 1.0 }
init = { scheme = "non_divergent" }
update = { mode = "async" }
"#;

fn main() -> discrete_opinion::Result<()> {
    let names: Vec<&str> = PRESETS.iter().map(|(name, _)| *name).collect();
    println!("presets: {}", names.join(", "));

    let prop1 = Config::preset("prop1")?;
    println!("\n{}", simulate(&prop1.experiment[0])?);

    let inline = Config::parse(INLINE, "inline")?;
    println!("\n{}", simulate(&inline.experiment[0])?);
    Ok(())
}

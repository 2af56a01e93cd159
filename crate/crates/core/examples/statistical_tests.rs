//! The test battery on small samples: permutation, Welch, Cohen's d, Kendall and adjustments.
//!
//! cargo run --example statistical_tests

use valuebias::stats::{adjust, cohens_d, kendall_tau_b, perm_interaction, perm_t_test, welch_t, Adjustment};

fn main() -> valuebias::Result<()> {
    let llama = [12.0, 15.5, 11.0, 14.0, 13.5, 16.0];
    let gemma = [18.0, 17.5, 21.0, 19.0, 16.5, 20.0];

    let perm = perm_t_test(&llama, &gemma, 10_000, 7)?;
    println!("perm_t: diff {:.3}, p {:.5} ({:?})", perm.statistic, perm.p_value, perm.permutations);
    let welch = welch_t(&llama, &gemma)?;
    println!("welch_t: t {:.3}, df {:.2}, p {:.5}", welch.statistic, welch.df.unwrap_or(f64::NAN), welch.p_value);
    println!("cohen's d: {:.3}", cohens_d(&llama, &gemma)?);

    let inter = perm_interaction([&[1.0, 2.0, 1.5], &[3.0, 4.0, 3.5], &[3.0, 4.0, 3.5], &[1.0, 2.0, 1.5]], 10_000, 7)?;
    println!("interaction: {:.3}, p {:.4}", inter.statistic, inter.p_value);

    println!("kendall tau-b: {:.4}", kendall_tau_b(&[1.0, 2.0, 2.0, 4.0, 5.0], &[1.0, 3.0, 2.0, 4.0, 4.0])?);

    let raw = [0.0005, 0.004, 0.03, 0.2];
    println!("bonferroni(m=40): {:?}", adjust(&raw, Adjustment::Bonferroni { m: 40 })?);
    println!("bh_fdr: {:?}", adjust(&raw, Adjustment::BhFdr)?);
    Ok(())
}

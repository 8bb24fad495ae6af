//! The licensing rule in isolation: when may a subgroup's classifier use
//! the target's own demographic parameters instead of only the pooled,
//! transferable ones?
//!
//! Two conditions license the local choice:
//!  1. concentration gain — the subgroup's local outcome distribution is
//!     strictly more concentrated (less uncertain) than the pooled one;
//!  2. prevalence excess — local prevalence exceeds pooled prevalence by
//!     at least the threshold tau.
//! Otherwise the invariant choice is the safe default.
//!
//! Run with: cargo run --example licensing_rule

use popadapt::blend::{dominant_information, licensing_case_oracle, licensing_select};
use popadapt::model::{AgeGroup, Gender, SubgroupKey};
use popadapt::stats::SubgroupStats;

fn stats(
    delta_local: Option<f64>,
    delta_pop: Option<f64>,
    prev_local: Option<f64>,
    prev_pop: Option<f64>,
) -> SubgroupStats {
    SubgroupStats {
        key: SubgroupKey { age: AgeGroup::A16to44, gender: Gender::Female },
        delta_local,
        delta_pop,
        prev_local,
        prev_pop,
        n_local: 40,
        n_pop: 400,
    }
}

fn show(label: &str, s: &SubgroupStats, tau: f64) {
    let (choice, reason) = licensing_select(s, tau);
    println!("  {label:<52} -> {choice:?} ({reason:?})");
}

fn main() {
    let tau = 0.9;
    println!("Decisions at tau = {tau}:");
    show(
        "local sharper than pool (delta 0.10 < 0.30)",
        &stats(Some(0.10), Some(0.30), Some(0.50), Some(0.50)),
        tau,
    );
    show(
        "local blurrier (delta 0.40 > 0.30), prevalence equal",
        &stats(Some(0.40), Some(0.30), Some(0.50), Some(0.50)),
        tau,
    );
    show(
        "local blurrier but prevalence 0.95 vs 0.02 pooled",
        &stats(Some(0.40), Some(0.30), Some(0.95), Some(0.02)),
        tau,
    );
    show(
        "no local outcome statistics at all",
        &stats(None, Some(0.30), None, Some(0.50)),
        tau,
    );
    show(
        "equal concentration (ties do not license)",
        &stats(Some(0.30), Some(0.30), Some(0.50), Some(0.50)),
        tau,
    );

    println!("\nSame borderline subgroup across thresholds (prevalence 0.80 vs 0.10):");
    for tau in [0.5, 0.7, 0.9] {
        let s = stats(Some(0.40), Some(0.30), Some(0.80), Some(0.10));
        let (choice, reason) = licensing_select(&s, tau);
        println!("  tau {tau:.1} -> {choice:?} ({reason:?})");
    }

    // The concentration condition is exactly an information comparison:
    // the dominant event of a sharper distribution carries less surprise.
    println!("\nDominant-event information I(p) = -ln(max(p, 1-p)):");
    for p in [0.5, 0.65, 0.8, 0.95] {
        println!("  p = {p:.2}  I = {:.4} nats", dominant_information(p));
    }
    println!("\nOrdering I(local) vs I(pool) (Less means the local side is sharper):");
    for (pl, pp) in [(0.95, 0.65), (0.05, 0.65), (0.65, 0.95), (0.6, 0.4)] {
        println!(
            "  local p = {pl:.2}, pooled p = {pp:.2}  ->  {:?}",
            licensing_case_oracle(pl, pp)
        );
    }
}

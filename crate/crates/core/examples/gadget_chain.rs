//! Builds chains of gadgets and checks that the scripted schedule is a valid
//! improving sequence whose length doubles with each added gadget.

use discrete_opinion::gadget::{
    exponential_schedule, gadget_chain, schedule_length, verify_schedule,
};

fn main() -> discrete_opinion::Result<()> {
    println!(
        "{:>2} {:>8} {:>8} {:>12}",
        "n", "agents", "moves", "phi drop"
    );
    for n in 1..=10 {
        let chain = gadget_chain(n, 10.0, 0.5)?;
        let schedule = exponential_schedule(&chain);
        let report = verify_schedule(&chain, &schedule, true)?;
        assert_eq!(report.moves as u64, schedule_length(n as u32));
        let trace = report.potential_trace.unwrap();
        println!(
            "{n:>2} {:>8} {:>8} {:>12.4e}",
            chain.graph().node_count(),
            report.moves,
            trace[0] - trace[trace.len() - 1]
        );
    }
    Ok(())
}

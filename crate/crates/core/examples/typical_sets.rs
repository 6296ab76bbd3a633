//! Strong typicality at work: Monte Carlo coverage of the typical set and
//! the exact size/probability window obtained by enumerating types.

use embedcap::prob::{JointPmf, Pmf};
use embedcap::typicality::{is_strongly_typical, monte_carlo_coverage, typical_set_stats, Sequence};

fn main() -> embedcap::Result<()> {
    let p = Pmf::bernoulli("S", 0.1)?;

    let cov = monte_carlo_coverage(&p, 200, 0.1, 10_000, 7);
    println!("coverage at n=200, eps=0.1: {cov:.4}");

    for n in [8, 12, 16] {
        let st = typical_set_stats(&JointPmf::from_pmf(&p), n, 0.5)?;
        println!(
            "n={n:2}  |T|={:6}  P(T)={:.4}  window=[{:.1}, {:.1}]  holds={}",
            st.size,
            st.probability,
            st.size_lower,
            st.size_upper,
            st.sandwich_holds()
        );
    }

    let seq = Sequence::from_digits(p.alphabet().clone(), "0000000001")?;
    println!("0000000001 typical at eps=0.5: {}", is_strongly_typical(&seq, &p, 0.5));
    Ok(())
}

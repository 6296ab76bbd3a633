//! Entropies and mutual informations of a host observed through a noisy
//! embedding: build `p(s)`, chain an encoder and a channel, read off the
//! quantities the rate bounds are made of.

use embedcap::prob::{
    conditional_mutual_information, entropy, mutual_information, Alphabet, DistortionMeasure,
    JointPmf, Kernel, Pmf,
};

fn main() -> embedcap::Result<()> {
    let host = Pmf::bernoulli("S", 0.2)?;
    let s = host.alphabet().clone();
    let x = Alphabet::new("X", 2)?;

    // flip the host bit with probability 0.1, then a BSC(0.05)
    let enc = Kernel::bsc(&s, "X", 0.1)?;
    let channel = Kernel::bsc(&x, "Y", 0.05)?;
    let joint = JointPmf::from_pmf(&host).chain(&enc)?.chain(&channel)?;

    println!("H(S)       = {:.6}", entropy(&host));
    println!("I(X;Y)     = {:.6}", mutual_information(&joint, &["X"], &["Y"])?);
    println!("I(S;Y)     = {:.6}", mutual_information(&joint, &["S"], &["Y"])?);
    println!("I(X;Y|S)   = {:.6}", conditional_mutual_information(&joint, &["X"], &["Y"], &["S"])?);
    println!("H(S,X,Y)   = {:.6}", joint.entropy_of(&["S", "X", "Y"])?);

    let d = DistortionMeasure::hamming(&s, &x)?;
    println!("E d(S,X)   = {:.6}", embedcap::prob::expected_distortion(&joint, &d)?);
    Ok(())
}

//! Channel parametrizations: coupling, eigenvalue, flip probabilities and
//! the log-likelihood message gauge.

use potts_tree::channel::{beta_of_epsilon, channel_matrix, lambda_of_epsilon, MessageVector, PottsChannel};

fn main() -> potts_tree::Result<()> {
    let ch = PottsChannel::new(5, 1.2838)?;
    println!("q = {}, beta = {}", ch.q(), ch.beta());
    println!("theta          = {:.6}", ch.theta());
    println!("lambda2        = {:.6}", ch.lambda2());
    println!("lambda_q       = {:.6}", ch.lambda_q());
    println!("stay           = {:.6}", ch.stay_probability());
    println!("eps per symbol = {:.6}", ch.epsilon_per_symbol());
    println!("eps total      = {:.6}", ch.epsilon_total());

    // total flip probability <-> inverse temperature
    let eps = 0.2348;
    let beta = beta_of_epsilon(eps, 5)?;
    println!("eps_total {eps} -> beta {beta:.6}, lambda {:.6}", lambda_of_epsilon(eps, 5)?);

    for row in channel_matrix(&PottsChannel::new(3, 0.5 * 2f64.ln())?) {
        println!("{:?}", row.entries());
    }

    // messages are stored with their largest entry at zero
    let m = MessageVector::from_log_weights(vec![3.0, 1.0, -2.0])?;
    println!("gauged {:?}, X^0_2 = {}", m.log_weights(), m.ratio(0, 2));
    println!("as probabilities {:?}", m.to_probs().entries());
    Ok(())
}
